#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rhpc/simulator.hpp"

namespace rhpc {

/// Linearized one-step map of the consensus states for a fixed activation
/// configuration and fixed weights, one N×N block per dimension. Saturated
/// rows are identity rows; the leader coupling enters as an input and is not
/// part of the matrix.
struct WMatrix {
  std::array<Eigen::MatrixXd, 2> full;
  std::array<std::vector<int>, 2> unsaturated;

  /// Submatrix over the unsaturated agents of dimension m.
  Eigen::MatrixXd essential(std::size_t m) const;
};

/// a_ij = 1/|N_i| over in-neighbors; rows of agents without neighbors are zero.
Eigen::MatrixXd uniform_weights(const CommGraph &graph);

/// `weights(i, j)` is the weight agent i gives to sender j.
WMatrix build_w_matrix(const ScenarioConfig &cfg, std::span<const ActivationMatrix> act,
                       const Eigen::MatrixXd &weights);

/// Largest eigenvalue modulus of a square matrix (0 for an empty one).
/// Throws std::runtime_error when the eigen solver fails.
double spectral_radius(const Eigen::MatrixXd &m);

/// Max over both dimensions of the essential spectral radius.
double essential_radius(const WMatrix &w);

/// ρ ≥ 1 − kRhoTol counts as "not contracting".
inline constexpr double kRhoTol = 1e-10;

struct ConfigRadius {
  std::vector<ActivationMatrix> act;
  double rho = 0.0;
};

struct VerifyReport {
  std::vector<ConfigRadius> configs;
  bool sampled = false; ///< true when the configuration space exceeded the cap
  double worst_rho = 0.0;
  std::size_t worst_index = 0;
  bool all_contracting() const { return worst_rho < 1.0 - kRhoTol; }
};

/// Every GFL saturation pattern (per dimension) with uniform weights. Above
/// `cap` configurations a seeded random sample of size `cap` is used.
VerifyReport enumerate_configurations(const ScenarioConfig &cfg, std::size_t cap = 1u << 16);

/// ‖E(k)‖ with E(k) = X(k) − 1⊗Δx_ref(k), Euclidean over the stacked vector.
std::vector<double> error_norm_series(const SimTrace &trace);

struct ContractionReport {
  bool holds = false;
  double rho = 0.0;
  double xi_hat = 0.0;
  double mu_hat = 0.0;
  double tail_sup = 0.0;
  long window_start = 0;
  long window_end = 0;
  long tail_start = 0;
};

/// Fits the smallest Ξ̂ with ‖E(k+1)‖ ≤ ρ‖E(k)‖ + Ξ̂ over [start, end) and
/// tests sup‖E‖ over the final `tail_fraction` of the window against
/// μ̂·(1 + tol). Throws std::invalid_argument for ρ ≥ 1 or an empty window.
ContractionReport contraction_check(const SimTrace &trace, double rho, long start, long end,
                                    double tail_fraction = 0.2, double tol = 0.05);

/// Max over steps in [k0, k1) of the spread (max − min) of x_{i,m} across
/// `subset`. With `exclude_saturated`, agents whose recorded activation on m
/// is 0 at a step are left out of that step. Throws std::invalid_argument
/// when no step has a non-empty subset.
double error_band(const SimTrace &trace, std::size_t m, long k0, long k1,
                  std::span<const int> subset, bool exclude_saturated = true);

/// Peak |x_{agent,m}(k) − x_{agent,m}(k0)| over [k0, k1).
double peak_deviation(const SimTrace &trace, int agent, std::size_t m, long k0, long k1);

/// peak_deviation(b) / peak_deviation(a). Throws std::invalid_argument when
/// the denominator is zero.
double overshoot_ratio(const SimTrace &a, const SimTrace &b, int agent, std::size_t m, long k0,
                       long k1);

using Metrics = std::vector<std::pair<std::string, double>>;

/// Standard per-run metrics using the scenario's analysis windows.
Metrics run_metrics(const ScenarioConfig &cfg, const SimTrace &trace, double rho);

double metric(const Metrics &m, const std::string &key);

struct StrategyRun {
  Toggles toggles;
  bool diverged = false;
  std::string error;
  Metrics metrics;
  SimTrace trace;
};

struct Comparison {
  std::vector<StrategyRun> runs; ///< runs[0] uses the scenario's own toggles
  Metrics summary;               ///< ratios of every run against runs[0]
};

/// Runs the Cartesian set over the named toggles ("activation", "attention",
/// "predictor") with a shared seed. Unknown names throw ValidationError.
Comparison compare_strategies(const ScenarioConfig &cfg, std::span<const std::string> toggles);

std::string toggle_label(const Toggles &t);

} // namespace rhpc
