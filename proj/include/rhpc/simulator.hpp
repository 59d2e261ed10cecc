#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rhpc/commnet.hpp"
#include "rhpc/domain.hpp"
#include "rhpc/protocol.hpp"
#include "rhpc/resilience.hpp"

namespace rhpc {

// ---------------------------------------------------------------------------
// Load profiles

enum class LoadKind { Flat, PiecewiseLinear, Steps, RampsNoise };

struct LoadPoint {
  double t_s = 0.0;
  double dp = 0.0;
  double dq = 0.0;
};

struct LoadProfileSpec {
  LoadKind kind = LoadKind::Flat;
  std::vector<LoadPoint> points; ///< breakpoints, strictly increasing in time
  double noise_p = 0.0;          ///< RampsNoise: uniform noise half-width, MW
  double noise_q = 0.0;          ///< RampsNoise: uniform noise half-width, MVar
  double dp_rate = 1.0;          ///< declared rate bound, MW per step
  double dq_rate = 1.0;          ///< declared rate bound, MVar per step
};

/// Samples k = 0..horizon-1 at t = k·period. Throws ValidationError when the
/// result breaks the declared rate bounds.
std::vector<LoadSample> generate_loads(const LoadProfileSpec &spec, long horizon, double period_ms,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scenario

struct LinkConfig {
  Edge edge;
  LinkParams params;
};

/// Strategy switches used by comparison runs. Turning one off gives the
/// "traditional" variant of that mechanism.
struct Toggles {
  bool activation = true; ///< off: A^ac ≡ 1 (no saturation isolation)
  bool attention = true;  ///< off: uniform weights 1/|N_i|
  bool predictor = true;  ///< off: zero-order hold on packet loss
  bool operator==(const Toggles &) const = default;
};

struct BaseLoads {
  double p_load = 0.0;
  double q_load = 0.0;
  double p_loss = 0.0;
  double q_loss = 0.0;
};

/// Step windows used by reports; all times in seconds.
struct AnalysisSettings {
  double burn_in_s = 0.0;
  double band_start_s = 0.0;
  double band_end_s = -1.0; ///< -1: end of run
  double event_start_s = 0.0;
  double event_end_s = -1.0;
  int overshoot_agent = 0; ///< 0-based
};

struct ScenarioConfig {
  std::string name = "custom";
  GridMode mode = GridMode::GridConnected;
  double period_ms = 10.0;
  long horizon = 1000;
  std::uint64_t seed = 1;

  std::vector<DGSpec> agents;
  CommGraph graph;
  std::vector<LinkConfig> links; ///< one per graph edge, same order
  std::vector<AttackSpec> attacks;
  int f_bound = 1;

  ControlParams control;
  bool island_reactive_relaxation = false;
  bool gfm_slack = true; ///< islanded: GFM units absorb the instantaneous mismatch

  AttentionParams attention;
  PredictorKind predictor = LinearAR{2};
  int history = 8; ///< H, predictor history length
  std::string predictor_model; ///< path of a trained recurrent model, if any

  LoadProfileSpec load;
  BaseLoads base;
  std::optional<NormBase> pcc_base; ///< default: Σ|P_DG|, Σ|Q_DG|
  Toggles toggles;
  AnalysisSettings analysis;

  NormBase resolved_pcc_base() const;
  long steps_for(double seconds) const;
};

/// Runs every rule (specs, topology, f-local, links, load rates, parameters).
/// Throws ValidationError naming the rule; returns soft warnings.
std::vector<std::string> validate_scenario(const ScenarioConfig &cfg);

// ---------------------------------------------------------------------------
// Balance

struct BalanceResult {
  double dp_pcc = 0.0;
  double dq_pcc = 0.0;
  double p_pcc = 0.0; ///< absolute PCC import, MW
  double q_pcc = 0.0;
  double mismatch_p = 0.0;
  double mismatch_q = 0.0;
};

BalanceResult power_balance(std::span<const PowerOutput> outputs, std::span<const DGSpec> specs,
                            const LoadSample &load, const BaseLoads &base, GridMode mode);

// ---------------------------------------------------------------------------
// Trace

struct LinkRecord {
  bool delivered = false;
  bool attacked = false;
  int age = 0;
  double weight = 0.0; ///< a_ij used by the receiver this step
  bool operator==(const LinkRecord &) const = default;
};

struct TraceRow {
  long step = 0;
  LoadSample load;
  std::vector<IncrementState> x;
  std::vector<PowerOutput> power;
  std::vector<ActivationMatrix> act;
  IncrementState ref;
  double dp_pcc = 0.0;
  double dq_pcc = 0.0;
  double mismatch_p = 0.0;
  double mismatch_q = 0.0;
  std::vector<LinkRecord> links;
};

struct SimTrace {
  int n_agents = 0;
  double period_ms = 10.0;
  std::vector<Edge> links;
  std::vector<TraceRow> rows;
};

// ---------------------------------------------------------------------------
// Engine

struct SimOptions {
  /// Order in which agents are visited inside a step; empty = natural order.
  /// Updates are synchronous, so this never changes the trace.
  std::vector<int> agent_order;
  /// Replaces the attention weights by 1/|N_i| regardless of toggles.
  bool frozen_uniform_weights = false;
};

class Simulator {
public:
  explicit Simulator(const ScenarioConfig &cfg, SimOptions opts = {});

  /// Executes one control step and appends its trace row.
  void step();
  long current_step() const { return k_; }
  const SimTrace &trace() const { return trace_; }
  SimTrace take_trace() { return std::move(trace_); }

private:
  struct Channel {
    int from = 0;
    std::size_t link = 0;
    ScaleFeatures features;
    PredictorState predictor;
    std::optional<IncrementState> value;
    ActivationMatrix activation;
    double weight = 0.0;
    bool fresh = false;
  };
  struct Agent {
    DGSpec spec;
    FeasibleBox box;
    bool pinned = false;
    ScaleFeatures own;
    std::vector<Channel> inbox;
  };

  PowerOutput physical_output(std::size_t i, const IncrementState &x) const;
  void refresh_weights(Agent &a) const;

  ScenarioConfig cfg_;
  SimOptions opts_;
  std::vector<Agent> agents_;
  std::vector<LinkState> links_;
  std::vector<LoadSample> loads_;
  std::vector<int> order_;
  std::vector<IncrementState> commanded_; ///< u(k-1): states before slack absorption
  ReferenceState ref_;
  NormBase pcc_base_;
  PredictorKind predictor_;
  long k_ = 0;
  SimTrace trace_;
};

/// Validates, then applies `horizon` steps.
SimTrace run(const ScenarioConfig &cfg, SimOptions opts = {});

} // namespace rhpc
