#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rhpc/analysis.hpp"
#include "rhpc/error.hpp"
#include "rhpc/report_io.hpp"
#include "rhpc/scenario.hpp"

using namespace rhpc;

namespace {

std::string csv(const ScenarioConfig &cfg, const SimTrace &t) {
  std::ostringstream os;
  write_trace_csv(os, cfg, t);
  return os.str();
}

const char *kFaultFree = R"(preset: table1-grid
horizon: 700
links:
  default: {loss: 0.0, max_delay_ms: 0, delay: fixed}
attacks: []
)";

ValidationError expect_validation_error(const std::string &text) {
  try {
    parse_scenario(text);
  } catch (const ValidationError &e) {
    return e;
  }
  ADD_FAILURE() << "no ValidationError for:\n" << text;
  return ValidationError("none", "");
}

} // namespace

TEST(Presets, AllFourLoadAndValidate) {
  std::vector<std::string> names;
  for (const auto &[name, text] : preset_sources())
    names.push_back(name);
  for (const char *want :
       {"table1-grid", "table1-grid-traditional", "table1-island", "table1-island-traditional"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
    ScenarioConfig cfg;
    ASSERT_NO_THROW(cfg = load_scenario(want)) << want;
    EXPECT_EQ(cfg.name, want);
    EXPECT_EQ(cfg.agents.size(), 5u);
  }
}

TEST(Presets, GridPresetValues) {
  const ScenarioConfig cfg = load_scenario("table1-grid");
  EXPECT_EQ(cfg.mode, GridMode::GridConnected);
  EXPECT_EQ(cfg.period_ms, 10.0);
  ASSERT_FALSE(cfg.links.empty());
  for (const LinkConfig &l : cfg.links) {
    EXPECT_EQ(l.params.loss_prob, 0.1);
    EXPECT_EQ(l.params.max_delay, 2);
  }
  ASSERT_EQ(cfg.attacks.size(), 1u);
  EXPECT_EQ(cfg.attacks[0].schedule.start, 200);
  EXPECT_EQ(cfg.agents[1].p_limits.hi, 0.5);
  EXPECT_EQ(cfg.graph.pinned, (std::vector<int>{0, 2}));
  EXPECT_FALSE(load_scenario("table1-grid-traditional").toggles.activation);
  const ScenarioConfig isl = load_scenario("table1-island");
  EXPECT_EQ(isl.mode, GridMode::Islanded);
  EXPECT_TRUE(isl.island_reactive_relaxation);
}

TEST(Presets, GridPresetRadiusBaseline) {
  const VerifyReport r = enumerate_configurations(load_scenario("table1-grid"));
  EXPECT_EQ(r.configs.size(), 64u);
  EXPECT_TRUE(r.all_contracting());
  EXPECT_NEAR(r.worst_rho, 0.90486, 1e-5);
}

TEST(ScenarioFile, UnknownKeyRejectedWithLine) {
  const ValidationError e = expect_validation_error("preset: table1-grid\nhorizn: 5\n");
  EXPECT_EQ(e.rule(), "schema");
  const std::string msg = e.what();
  EXPECT_NE(msg.find("horizn"), std::string::npos);
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  const ValidationError nested =
      expect_validation_error("preset: table1-grid\ncontrol: {c: 0.2, cc: 1}\n");
  EXPECT_NE(std::string(nested.what()).find("control.cc"), std::string::npos);
}

TEST(ScenarioFile, ParseErrorReportsLineAndColumn) {
  const ValidationError e = expect_validation_error("name: x\nagents: [\n  {id: 1,\n");
  EXPECT_EQ(e.rule(), "parse");
  const std::string msg = e.what();
  EXPECT_NE(msg.find("line"), std::string::npos);
  EXPECT_NE(msg.find("column"), std::string::npos);
}

TEST(ScenarioFile, StepSizeOutsideUnitIntervalRejected) {
  const ScenarioConfig cfg = parse_scenario("preset: table1-grid\ncontrol: {c: 1.5}\n");
  try {
    validate_scenario(cfg);
    FAIL();
  } catch (const ValidationError &e) {
    EXPECT_EQ(e.rule(), "control_step");
  }
}

TEST(ScenarioFile, PresetOverrideMergesFieldByField) {
  const ScenarioConfig cfg = parse_scenario("preset: table1-grid\ncontrol: {c: 0.3}\n");
  EXPECT_EQ(cfg.control.step_c, 0.3);
  EXPECT_EQ(cfg.control.boundary_eps, 1e-6);
  EXPECT_EQ(cfg.agents.size(), 5u);
}

TEST(ScenarioFile, LoadFromFileResolvesRelativePreset) {
  const auto dir = std::filesystem::temp_directory_path() / "rhpc_scenario_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "s.yaml";
  std::ofstream(path) << kFaultFree;
  const ScenarioConfig cfg = load_scenario(path.string());
  EXPECT_EQ(cfg.horizon, 700);
  EXPECT_THROW(load_scenario((dir / "missing.yaml").string()), std::exception);
}

TEST(Manifest, RoundTripReproducesTrace) {
  for (const char *name : {"table1-grid", "table1-island-traditional"}) {
    ScenarioConfig cfg = load_scenario(name);
    cfg.horizon = 400;
    const ScenarioConfig back = parse_scenario(to_yaml(cfg));
    EXPECT_EQ(to_yaml(back), to_yaml(cfg)) << name;
    EXPECT_EQ(csv(back, run(back)), csv(cfg, run(cfg))) << name;
  }
}

TEST(Manifest, SeedOverrideLeavesFaultFreeTraceUnchanged) {
  ScenarioConfig a = parse_scenario(kFaultFree);
  ScenarioConfig b = a;
  b.seed = 12345;
  EXPECT_EQ(csv(a, run(a)), csv(b, run(b)));

  ScenarioConfig lossy = load_scenario("table1-grid");
  lossy.horizon = 300;
  ScenarioConfig other = lossy;
  other.seed = 12345;
  EXPECT_NE(csv(lossy, run(lossy)), csv(other, run(other)));
}

TEST(Verify, UnpinnedVariantIsNotContracting) {
  ScenarioConfig cfg = load_scenario("table1-grid");
  for (DGSpec &s : cfg.agents)
    s.pin_gain = 0.0;
  const VerifyReport r = enumerate_configurations(cfg);
  EXPECT_FALSE(r.all_contracting());
  EXPECT_NEAR(r.worst_rho, 1.0, 1e-9);
}

TEST(TraceCsv, ColumnCountAndRows) {
  ScenarioConfig cfg = load_scenario("table1-grid");
  cfg.horizon = 50;
  const std::string text = csv(cfg, run(cfg));
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("step,time_s,DG1_x1,DG1_x2,DG1_P,DG1_Q,DG1_a1,DG1_a2,", 0), 0u);
  const auto columns = [](const std::string &l) { return std::count(l.begin(), l.end(), ',') + 1; };
  // step, time_s, six per agent, ref1, ref2, dp_pcc, mismatch
  EXPECT_EQ(columns(line), 2 + 6 * 5 + 4);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(columns(line), 2 + 6 * 5 + 4);
    ++rows;
  }
  EXPECT_EQ(rows, 50);
}
