#include "rhpc/report_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "rhpc/scenario.hpp"

#ifndef RHPC_BUILD_ID
#define RHPC_BUILD_ID "rhpc-dev"
#endif

namespace rhpc {

const char *build_id() { return RHPC_BUILD_ID; }

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

void write_trace_csv(std::ostream &os, const ScenarioConfig &cfg, const SimTrace &trace) {
  os << "step,time_s";
  for (const DGSpec &s : cfg.agents)
    for (const char *col : {"x1", "x2", "P", "Q", "a1", "a2"})
      os << ",DG" << s.id << '_' << col;
  os << ",ref1,ref2,dp_pcc,mismatch\n";
  for (const TraceRow &row : trace.rows) {
    os << row.step << ',' << format_double(static_cast<double>(row.step) * trace.period_ms / 1000.0);
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      os << ',' << format_double(row.x[i].x1) << ',' << format_double(row.x[i].x2) << ','
         << format_double(row.power[i].p) << ',' << format_double(row.power[i].q) << ','
         << row.act[i].a1 << ',' << row.act[i].a2;
    }
    os << ',' << format_double(row.ref.x1) << ',' << format_double(row.ref.x2) << ','
       << format_double(row.dp_pcc) << ',' << format_double(row.mismatch_p) << '\n';
  }
}

void write_links_csv(std::ostream &os, const ScenarioConfig &cfg, const SimTrace &trace) {
  os << "step,from,to,delivered,attacked,age,weight\n";
  for (const TraceRow &row : trace.rows) {
    for (std::size_t l = 0; l < row.links.size(); ++l) {
      const LinkRecord &r = row.links[l];
      os << row.step << ',' << cfg.agents[trace.links[l].from].id << ','
         << cfg.agents[trace.links[l].to].id << ',' << int(r.delivered) << ',' << int(r.attacked)
         << ',' << r.age << ',' << format_double(r.weight) << '\n';
    }
  }
}

void write_error_csv(std::ostream &os, const SimTrace &trace) {
  os << "step,error_norm\n";
  const std::vector<double> e = error_norm_series(trace);
  for (std::size_t k = 0; k < e.size(); ++k)
    os << trace.rows[k].step << ',' << format_double(e[k]) << '\n';
}

void write_metrics(std::ostream &os, const Metrics &metrics, const std::string &prefix) {
  for (const auto &[key, value] : metrics)
    os << prefix << key << '=' << format_double(value) << '\n';
}

void write_manifest(std::ostream &os, const ScenarioConfig &cfg) {
  os << to_yaml(cfg);
  os << "meta: {build: \"" << build_id() << "\", seed: " << cfg.seed << "}\n";
}

void write_run_outputs(const std::string &dir, const ScenarioConfig &cfg, const SimTrace &trace,
                       const Metrics &metrics) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char *name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("trace.csv");
    write_trace_csv(f, cfg, trace);
  }
  {
    auto f = open("links.csv");
    write_links_csv(f, cfg, trace);
  }
  {
    auto f = open("error_norm.csv");
    write_error_csv(f, trace);
  }
  {
    auto f = open("metrics.txt");
    write_metrics(f, metrics);
  }
  {
    auto f = open("run_manifest.yaml");
    write_manifest(f, cfg);
  }
}

} // namespace rhpc
