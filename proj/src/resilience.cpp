#include "rhpc/resilience.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rhpc/error.hpp"
#include "rhpc/recurrent.hpp"

namespace rhpc {

void AttentionParams::validate() const {
  for (double s : sigmas)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw ValidationError("attention_sigma", "sensitivities must be finite and >= 0");
  if (window < 1)
    throw ValidationError("attention_window", "window must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ValidationError("attention_gamma", "gamma must lie in (0, 1]");
}

ScaleFeatures update_features(ScaleFeatures feat, const IncrementState &sample,
                              const AttentionParams &params) {
  if (!feat.initialized()) {
    feat.r1 = feat.r2 = feat.r3 = sample;
    feat.window.push_back(sample);
    return feat;
  }
  feat.window.push_back(sample);
  while (static_cast<int>(feat.window.size()) > params.window)
    feat.window.pop_front();

  IncrementState sum;
  for (const auto &w : feat.window)
    sum += w;
  feat.r1 = sample;
  feat.r2 = (1.0 / static_cast<double>(feat.window.size())) * sum;
  feat.r3 = (1.0 - params.gamma) * feat.r3 + params.gamma * sample;
  return feat;
}

double feature_distance(const ScaleFeatures &own, const ScaleFeatures &neighbor,
                        const AttentionParams &params) {
  double d = 0.0;
  for (std::size_t s = 0; s < 3; ++s)
    d += params.sigmas[s] * (neighbor.scale(s) - own.scale(s)).norm();
  return d;
}

std::vector<double> softmax_floored(std::span<const double> logits) {
  std::vector<double> w(logits.size());
  if (logits.empty())
    return w;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    w[j] = std::exp(std::max(logits[j] - top, kMinLogWeight));
    total += w[j];
  }
  for (double &x : w)
    x /= total;
  return w;
}

std::vector<double> attention_weights(const ScaleFeatures &own,
                                      std::span<const ScaleFeatures *const> neighbors,
                                      const AttentionParams &params) {
  std::vector<double> logits;
  logits.reserve(neighbors.size());
  for (const ScaleFeatures *nb : neighbors)
    logits.push_back(-feature_distance(own, *nb, params));
  return softmax_floored(logits);
}

// ---------------------------------------------------------------------------

void PredictorState::push(const IncrementState &v, long t) {
  history.push_back({v, t});
  while (history.size() > capacity)
    history.pop_front();
}

namespace {

// Least-squares AR(p) with intercept, fitted per dimension over the sample
// sequence and extrapolated one sample ahead. The minimum-norm solution keeps
// degenerate (constant) histories exact.
double ar_extrapolate(const std::deque<TimedSample> &h, std::size_t dim, int order) {
  const int n = static_cast<int>(h.size());
  const int p = std::min(order, n - 1);
  if (p <= 0)
    return h.back().value[dim];
  const int rows = n - p;
  Eigen::MatrixXd a(rows, p + 1);
  Eigen::VectorXd b(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = r + p;
    a(r, 0) = 1.0;
    for (int m = 1; m <= p; ++m)
      a(r, m) = h[t - m].value[dim];
    b(r) = h[t].value[dim];
  }
  const Eigen::VectorXd coef = a.completeOrthogonalDecomposition().solve(b);
  double pred = coef(0);
  for (int m = 1; m <= p; ++m)
    pred += coef(m) * h[n - m].value[dim];
  return pred;
}

} // namespace

IncrementState predict_missing(const PredictorState &p, const PredictorKind &kind, long k) {
  if (p.history.empty())
    throw std::logic_error("predict_missing: empty history");
  return std::visit(
      [&](const auto &kd) -> IncrementState {
        using K = std::decay_t<decltype(kd)>;
        if constexpr (std::is_same_v<K, HoldLast>) {
          return p.history.back().value;
        } else if constexpr (std::is_same_v<K, LinearAR>) {
          IncrementState out{ar_extrapolate(p.history, 0, kd.order),
                             ar_extrapolate(p.history, 1, kd.order)};
          return out.finite() ? out : p.history.back().value;
        } else {
          if (!kd.model)
            return p.history.back().value;
          return kd.model->predict(p.history, k);
        }
      },
      kind);
}

} // namespace rhpc
