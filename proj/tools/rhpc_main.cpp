// rhpc: run, compare and verify resilient hierarchical power-control scenarios.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "rhpc/analysis.hpp"
#include "rhpc/error.hpp"
#include "rhpc/recurrent.hpp"
#include "rhpc/report_io.hpp"
#include "rhpc/scenario.hpp"

namespace {

using namespace rhpc;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kNumeric = 3, kStability = 4 };

struct Common {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<long> horizon;
  std::vector<std::string> toggles;
};

ScenarioConfig load(const Common &c) {
  std::vector<std::string> warnings;
  ScenarioConfig cfg = load_scenario(c.scenario, &warnings);
  if (c.seed)
    cfg.seed = *c.seed;
  if (c.horizon)
    cfg.horizon = *c.horizon;
  if (c.seed || c.horizon)
    validate_scenario(cfg);
  for (const std::string &w : warnings)
    std::cerr << "warning: " << w << '\n';
  return cfg;
}

int cmd_validate(const Common &c) {
  const ScenarioConfig cfg = load(c);
  std::cout << "ok: " << cfg.name << " (" << cfg.agents.size() << " agents, "
            << cfg.graph.edges.size() << " links, horizon " << cfg.horizon << ")\n";
  return kOk;
}

int cmd_run(const Common &c) {
  const ScenarioConfig cfg = load(c);
  const double rho = enumerate_configurations(cfg).worst_rho;
  const SimTrace trace = run(cfg);
  const Metrics m = run_metrics(cfg, trace, rho);
  write_run_outputs(c.out, cfg, trace, m);
  write_metrics(std::cout, m);
  return kOk;
}

int cmd_compare(const Common &c) {
  const ScenarioConfig cfg = load(c);
  const Comparison cmp = compare_strategies(cfg, c.toggles);
  fs::create_directories(c.out);
  std::ofstream report(fs::path(c.out) / "comparison.txt");
  for (const StrategyRun &r : cmp.runs) {
    const std::string label = toggle_label(r.toggles);
    ScenarioConfig variant = cfg;
    variant.toggles = r.toggles;
    if (!r.diverged)
      write_run_outputs((fs::path(c.out) / label).string(), variant, r.trace, r.metrics);
    write_metrics(report, r.metrics, label + ".");
    write_metrics(std::cout, r.metrics, label + ".");
  }
  write_metrics(report, cmp.summary, "compare.");
  write_metrics(std::cout, cmp.summary, "compare.");
  return kOk;
}

std::string describe(const ScenarioConfig &cfg, const std::vector<ActivationMatrix> &act) {
  std::string s;
  for (std::size_t i = 0; i < act.size(); ++i)
    if (cfg.agents[i].type == DGType::GFL)
      s += "DG" + std::to_string(cfg.agents[i].id) + ":" + std::to_string(act[i].a1) +
           std::to_string(act[i].a2) + " ";
  return s.empty() ? "(no GFL agents)" : s;
}

int cmd_verify(const Common &c) {
  const ScenarioConfig cfg = load(c);
  const VerifyReport rep = enumerate_configurations(cfg);
  std::cout << "configurations=" << rep.configs.size() << (rep.sampled ? " (sampled)" : "")
            << '\n';
  for (const ConfigRadius &cr : rep.configs)
    std::cout << "rho[" << describe(cfg, cr.act) << "]=" << format_double(cr.rho) << '\n';
  std::cout << "worst_rho=" << format_double(rep.worst_rho) << '\n';
  if (!rep.all_contracting()) {
    std::cerr << "stability gate failed: rho=" << format_double(rep.worst_rho)
              << " for activation pattern " << describe(cfg, rep.configs[rep.worst_index].act)
              << '\n';
    return kStability;
  }
  const SimTrace trace = run(cfg);
  if (trace.rows.size() >= 2) {
    const ContractionReport cr = contraction_check(trace, rep.worst_rho,
                                                   cfg.steps_for(cfg.analysis.burn_in_s), -1);
    std::cout << "xi_hat=" << format_double(cr.xi_hat) << "\nmu_hat=" << format_double(cr.mu_hat)
              << "\ntail_sup=" << format_double(cr.tail_sup) << "\nuub_holds=" << int(cr.holds)
              << '\n';
  }
  return kOk;
}

struct TrainArgs {
  int hidden = 8;
  int epochs = 300;
  double lr = 0.01;
};

int cmd_train(const Common &c, const TrainArgs &t) {
  ScenarioConfig cfg = load(c);
  // Nominal data: same scenario without attacks or packet loss.
  cfg.attacks.clear();
  for (LinkConfig &l : cfg.links)
    l.params.loss_prob = 0.0;
  cfg.predictor = HoldLast{};
  const SimTrace trace = run(cfg);
  std::vector<std::vector<IncrementState>> traj(cfg.agents.size());
  for (const TraceRow &row : trace.rows)
    for (std::size_t i = 0; i < row.x.size(); ++i)
      traj[i].push_back(row.x[i]);
  RecurrentTraining hp;
  hp.hidden = t.hidden;
  hp.history = cfg.history;
  hp.epochs = t.epochs;
  hp.learning_rate = t.lr;
  hp.seed = cfg.seed;
  const RecurrentFit fit = train_recurrent(traj, hp);
  fs::path out(c.out);
  if (out.has_parent_path())
    fs::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot write " + c.out);
  fit.model.save(f);
  std::cout << "holdout_mse=" << format_double(fit.holdout_mse)
            << "\nholdout_mse_hold_last=" << format_double(fit.holdout_mse_hold_last)
            << "\nmodel=" << c.out << '\n';
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Resilient hierarchical power-control simulator"};
  app.require_subcommand(1);

  Common common;
  TrainArgs train;
  auto add_common = [&](CLI::App *sub, bool with_out, bool with_toggles) {
    sub->add_option("--scenario", common.scenario, "scenario file or preset name")->required();
    if (with_out)
      sub->add_option("--out", common.out, "output directory (model file for train-predictor)");
    sub->add_option("--seed", common.seed, "override the scenario seed");
    sub->add_option("--horizon", common.horizon, "override the number of steps");
    if (with_toggles)
      sub->add_option("--toggle", common.toggles, "activation|attention|predictor")
          ->check(CLI::IsMember({"activation", "attention", "predictor"}));
  };
  CLI::App *run_cmd = app.add_subcommand("run", "simulate and write trace, metrics and manifest");
  add_common(run_cmd, true, false);
  CLI::App *cmp_cmd = app.add_subcommand("compare", "paired runs over toggled strategies");
  add_common(cmp_cmd, true, true);
  CLI::App *ver_cmd = app.add_subcommand("verify", "essential spectral radius and UUB check");
  add_common(ver_cmd, false, false);
  CLI::App *val_cmd = app.add_subcommand("validate", "parse and validate a scenario");
  add_common(val_cmd, false, false);
  CLI::App *trn_cmd =
      app.add_subcommand("train-predictor", "fit the recurrent predictor on nominal runs");
  add_common(trn_cmd, true, false);
  trn_cmd->add_option("--hidden", train.hidden, "hidden units");
  trn_cmd->add_option("--epochs", train.epochs, "training epochs");
  trn_cmd->add_option("--lr", train.lr, "Adam learning rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run_cmd)
      return cmd_run(common);
    if (*cmp_cmd)
      return cmd_compare(common);
    if (*ver_cmd)
      return cmd_verify(common);
    if (*val_cmd)
      return cmd_validate(common);
    if (*trn_cmd)
      return cmd_train(common, train);
  } catch (const ValidationError &e) {
    std::cerr << "validation error [" << e.rule() << "]: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericError &e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
