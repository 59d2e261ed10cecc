#include "rhpc/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rhpc/error.hpp"

namespace rhpc {

Eigen::MatrixXd WMatrix::essential(std::size_t m) const {
  const std::vector<int> &idx = unsaturated[m];
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      out(r, c) = full[m](idx[r], idx[c]);
  return out;
}

Eigen::MatrixXd uniform_weights(const CommGraph &graph) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(graph.n_agents, graph.n_agents);
  for (int i = 0; i < graph.n_agents; ++i) {
    const std::vector<int> nb = graph.in_neighbors(i);
    for (int j : nb)
      a(i, j) = 1.0 / static_cast<double>(nb.size());
  }
  return a;
}

WMatrix build_w_matrix(const ScenarioConfig &cfg, std::span<const ActivationMatrix> act,
                       const Eigen::MatrixXd &weights) {
  const int n = static_cast<int>(cfg.agents.size());
  if (static_cast<int>(act.size()) != n || weights.rows() != n || weights.cols() != n)
    throw std::invalid_argument("build_w_matrix: size mismatch");
  const double c = cfg.control.step_c;
  const bool relax = cfg.mode == GridMode::Islanded && cfg.island_reactive_relaxation &&
                     cfg.toggles.activation;
  WMatrix w;
  for (std::size_t m = 0; m < 2; ++m) {
    Eigen::MatrixXd &mat = w.full[m];
    mat = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const DGSpec &s = cfg.agents[i];
      if (act[i][m] == 0) {
        mat(i, i) = 1.0;
        continue;
      }
      w.unsaturated[m].push_back(i);
      if (s.type == DGType::GFL) {
        mat(i, i) += 1.0 - c;
        for (int j = 0; j < n; ++j)
          mat(i, j) += c * weights(i, j);
      } else {
        mat(i, i) += 1.0 - c - c * s.pin_gain;
        for (int j = 0; j < n; ++j) {
          int gate = cfg.toggles.activation ? act[j][m] : 1;
          if (relax && m == 1 && cfg.agents[j].type == DGType::GFL)
            gate = 0;
          mat(i, j) += c * weights(i, j) * gate;
        }
      }
    }
  }
  return w;
}

double spectral_radius(const Eigen::MatrixXd &m) {
  if (m.rows() == 0)
    return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double essential_radius(const WMatrix &w) {
  return std::max(spectral_radius(w.essential(0)), spectral_radius(w.essential(1)));
}

VerifyReport enumerate_configurations(const ScenarioConfig &cfg, std::size_t cap) {
  std::vector<int> gfl;
  for (std::size_t i = 0; i < cfg.agents.size(); ++i)
    if (cfg.agents[i].type == DGType::GFL)
      gfl.push_back(static_cast<int>(i));
  const std::size_t bits = 2 * gfl.size();
  const Eigen::MatrixXd weights = uniform_weights(cfg.graph);

  VerifyReport rep;
  std::vector<std::uint64_t> codes;
  if (bits < 63 && (std::uint64_t{1} << bits) <= cap) {
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code)
      codes.push_back(code);
  } else {
    rep.sampled = true;
    std::mt19937_64 rng(mix_seed(cfg.seed, 0x5a3b));
    codes.push_back(0);
    while (codes.size() < cap)
      codes.push_back(rng());
  }
  for (std::uint64_t code : codes) {
    std::vector<ActivationMatrix> act(cfg.agents.size(), ActivationMatrix::all_on());
    for (std::size_t g = 0; g < gfl.size(); ++g) {
      act[gfl[g]].a1 = (code >> (2 * g)) & 1 ? 0 : 1;
      act[gfl[g]].a2 = (code >> (2 * g + 1)) & 1 ? 0 : 1;
    }
    const double rho = essential_radius(build_w_matrix(cfg, act, weights));
    if (rep.configs.empty() || rho > rep.worst_rho) {
      rep.worst_rho = rho;
      rep.worst_index = rep.configs.size();
    }
    rep.configs.push_back({std::move(act), rho});
  }
  return rep;
}

std::vector<double> error_norm_series(const SimTrace &trace) {
  std::vector<double> out;
  out.reserve(trace.rows.size());
  for (const TraceRow &row : trace.rows) {
    double s = 0.0;
    for (const IncrementState &x : row.x) {
      const IncrementState e = x - row.ref;
      s += e.x1 * e.x1 + e.x2 * e.x2;
    }
    out.push_back(std::sqrt(s));
  }
  return out;
}

ContractionReport contraction_check(const SimTrace &trace, double rho, long start, long end,
                                    double tail_fraction, double tol) {
  if (!(rho < 1.0))
    throw std::invalid_argument("contraction check needs rho < 1");
  const long rows = static_cast<long>(trace.rows.size());
  start = std::max(0L, start);
  end = std::min(end < 0 ? rows : end, rows);
  if (end - start < 2)
    throw std::invalid_argument("contraction window is empty");
  const std::vector<double> e = error_norm_series(trace);

  ContractionReport r;
  r.rho = rho;
  r.window_start = start;
  r.window_end = end;
  for (long k = start; k + 1 < end; ++k)
    r.xi_hat = std::max(r.xi_hat, e[k + 1] - rho * e[k]);
  r.mu_hat = r.xi_hat / (1.0 - rho);
  const long tail_len = std::max(1L, std::lround(tail_fraction * static_cast<double>(end - start)));
  r.tail_start = end - tail_len;
  for (long k = r.tail_start; k < end; ++k)
    r.tail_sup = std::max(r.tail_sup, e[k]);
  r.holds = r.tail_sup <= r.mu_hat * (1.0 + tol);
  return r;
}

double error_band(const SimTrace &trace, std::size_t m, long k0, long k1,
                  std::span<const int> subset, bool exclude_saturated) {
  const long rows = static_cast<long>(trace.rows.size());
  k0 = std::max(0L, k0);
  k1 = std::min(k1 < 0 ? rows : k1, rows);
  double band = 0.0;
  bool any = false;
  for (long k = k0; k < k1; ++k) {
    const TraceRow &row = trace.rows[k];
    double lo = kInf, hi = -kInf;
    for (int i : subset) {
      if (exclude_saturated && row.act[i][m] == 0)
        continue;
      lo = std::min(lo, row.x[i][m]);
      hi = std::max(hi, row.x[i][m]);
    }
    if (lo > hi)
      continue;
    any = true;
    band = std::max(band, hi - lo);
  }
  if (!any)
    throw std::invalid_argument("error band subset is empty on every step of the window");
  return band;
}

double peak_deviation(const SimTrace &trace, int agent, std::size_t m, long k0, long k1) {
  const long rows = static_cast<long>(trace.rows.size());
  k1 = std::min(k1 < 0 ? rows : k1, rows);
  if (k0 < 0 || k0 >= k1)
    throw std::invalid_argument("event window is empty");
  const double base = trace.rows[k0].x[agent][m];
  double peak = 0.0;
  for (long k = k0; k < k1; ++k)
    peak = std::max(peak, std::abs(trace.rows[k].x[agent][m] - base));
  return peak;
}

double overshoot_ratio(const SimTrace &a, const SimTrace &b, int agent, std::size_t m, long k0,
                       long k1) {
  if (a.rows.size() != b.rows.size())
    throw std::invalid_argument("overshoot ratio needs traces of equal length");
  const double den = peak_deviation(a, agent, m, k0, k1);
  if (den == 0.0)
    throw std::invalid_argument("overshoot ratio denominator is zero (flat signal)");
  return peak_deviation(b, agent, m, k0, k1) / den;
}

Metrics run_metrics(const ScenarioConfig &cfg, const SimTrace &trace, double rho) {
  Metrics out;
  const long rows = static_cast<long>(trace.rows.size());
  out.emplace_back("steps", static_cast<double>(rows));
  if (rows == 0)
    return out;

  const AnalysisSettings &an = cfg.analysis;
  const long b0 = cfg.steps_for(an.band_start_s);
  const long b1 = an.band_end_s < 0 ? rows : std::min(rows, cfg.steps_for(an.band_end_s));
  std::vector<int> all, gfm, gfl;
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    all.push_back(static_cast<int>(i));
    (cfg.agents[i].type == DGType::GFM ? gfm : gfl).push_back(static_cast<int>(i));
  }
  auto band = [&](std::size_t m, const std::vector<int> &subset) {
    try {
      return error_band(trace, m, b0, b1, subset);
    } catch (const std::invalid_argument &) {
      return std::nan("");
    }
  };
  out.emplace_back("band_p", band(0, all));
  out.emplace_back("band_q", band(1, all));
  out.emplace_back("band_p_gfm", band(0, gfm));
  out.emplace_back("band_q_gfm", band(1, gfm));

  const long e0 = cfg.steps_for(an.event_start_s);
  const long e1 = an.event_end_s < 0 ? rows : std::min(rows, cfg.steps_for(an.event_end_s));
  if (e0 < e1 && an.overshoot_agent >= 0 && an.overshoot_agent < trace.n_agents)
    out.emplace_back("overshoot_peak_p", peak_deviation(trace, an.overshoot_agent, 0, e0, e1));

  double max_mis = 0.0, max_pcc = 0.0, max_p_violation = 0.0;
  for (const TraceRow &row : trace.rows) {
    max_mis = std::max({max_mis, std::abs(row.mismatch_p), std::abs(row.mismatch_q)});
    max_pcc = std::max({max_pcc, std::abs(row.dp_pcc), std::abs(row.dq_pcc)});
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
      const DGSpec &s = cfg.agents[i];
      if (s.type != DGType::GFL)
        continue;
      max_p_violation = std::max({max_p_violation, s.p_limits.lo - row.power[i].p,
                                  row.power[i].p - s.p_limits.hi});
    }
  }
  out.emplace_back("max_abs_mismatch", max_mis);
  out.emplace_back("max_abs_pcc", max_pcc);
  out.emplace_back("max_limit_violation_p", max_p_violation);

  out.emplace_back("rho", rho);
  const std::vector<double> e = error_norm_series(trace);
  out.emplace_back("final_error_norm", e.back());
  if (rho < 1.0 && rows >= 2) {
    const ContractionReport cr =
        contraction_check(trace, rho, cfg.steps_for(an.burn_in_s), rows);
    out.emplace_back("xi_hat", cr.xi_hat);
    out.emplace_back("mu_hat", cr.mu_hat);
    out.emplace_back("tail_sup", cr.tail_sup);
    out.emplace_back("uub_holds", cr.holds ? 1.0 : 0.0);
  }
  return out;
}

double metric(const Metrics &m, const std::string &key) {
  for (const auto &[k, v] : m)
    if (k == key)
      return v;
  throw std::out_of_range("no metric named " + key);
}

std::string toggle_label(const Toggles &t) {
  std::string s;
  s += t.activation ? "act+" : "act-";
  s += t.attention ? "_att+" : "_att-";
  s += t.predictor ? "_pred+" : "_pred-";
  return s;
}

Comparison compare_strategies(const ScenarioConfig &cfg, std::span<const std::string> toggles) {
  std::vector<bool Toggles::*> members;
  for (const std::string &name : toggles) {
    bool Toggles::*mp = nullptr;
    if (name == "activation")
      mp = &Toggles::activation;
    else if (name == "attention")
      mp = &Toggles::attention;
    else if (name == "predictor")
      mp = &Toggles::predictor;
    else
      throw ValidationError("toggle", "unknown toggle '" + name + "'");
    if (std::find(members.begin(), members.end(), mp) == members.end())
      members.push_back(mp);
  }

  Comparison cmp;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << members.size()); ++code) {
    ScenarioConfig variant = cfg;
    for (std::size_t b = 0; b < members.size(); ++b)
      if ((code >> b) & 1)
        variant.toggles.*members[b] = !(cfg.toggles.*members[b]);
    StrategyRun run;
    run.toggles = variant.toggles;
    const double rho = enumerate_configurations(variant).worst_rho;
    try {
      run.trace = rhpc::run(variant);
      run.metrics = run_metrics(variant, run.trace, rho);
    } catch (const NumericError &e) {
      run.diverged = true;
      run.error = e.what();
    }
    if (!run.diverged) {
      for (const TraceRow &row : run.trace.rows)
        for (const IncrementState &x : row.x)
          if (x.norm() > 1e6)
            run.diverged = true;
    }
    run.metrics.emplace_back("diverged", run.diverged ? 1.0 : 0.0);
    cmp.runs.push_back(std::move(run));
  }

  const StrategyRun &base = cmp.runs.front();
  for (std::size_t r = 1; r < cmp.runs.size(); ++r) {
    const StrategyRun &run = cmp.runs[r];
    const std::string label = toggle_label(run.toggles);
    if (base.diverged || run.diverged) {
      cmp.summary.emplace_back(label + ".diverged", run.diverged ? 1.0 : 0.0);
      continue;
    }
    for (const char *key : {"band_p", "band_q", "band_q_gfm", "tail_sup"}) {
      try {
        cmp.summary.emplace_back(label + "." + key + "_ratio",
                                 metric(run.metrics, key) / metric(base.metrics, key));
      } catch (const std::out_of_range &) {
      }
    }
    const AnalysisSettings &an = cfg.analysis;
    const long rows = static_cast<long>(base.trace.rows.size());
    const long e0 = cfg.steps_for(an.event_start_s);
    const long e1 = an.event_end_s < 0 ? rows : std::min(rows, cfg.steps_for(an.event_end_s));
    try {
      cmp.summary.emplace_back(label + ".overshoot_ratio",
                               overshoot_ratio(base.trace, run.trace, an.overshoot_agent, 0, e0, e1));
    } catch (const std::invalid_argument &) {
    }
  }
  return cmp;
}

} // namespace rhpc
