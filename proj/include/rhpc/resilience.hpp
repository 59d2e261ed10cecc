#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "rhpc/domain.hpp"

namespace rhpc {

class RecurrentModel;

struct AttentionParams {
  std::array<double, 3> sigmas{1.0, 2.0, 4.0};
  int window = 10;    ///< moving-average length W
  double gamma = 0.1; ///< EWMA smoothing in (0, 1]

  void validate() const;
};

/// Instantaneous, moving-average and EWMA views of one received stream.
struct ScaleFeatures {
  IncrementState r1;
  IncrementState r2;
  IncrementState r3;
  std::deque<IncrementState> window;

  bool initialized() const { return !window.empty(); }
  const IncrementState &scale(std::size_t s) const { return s == 0 ? r1 : (s == 1 ? r2 : r3); }
};

ScaleFeatures update_features(ScaleFeatures feat, const IncrementState &sample,
                              const AttentionParams &params);

/// Σ_s σ_s ‖r_j^(s) − r_own^(s)‖.
double feature_distance(const ScaleFeatures &own, const ScaleFeatures &neighbor,
                        const AttentionParams &params);

/// Exponents are floored at this many nats below the largest one so every
/// weight stays strictly positive in double precision.
inline constexpr double kMinLogWeight = -700.0;

/// Softmax of −distance over the neighbors, in input order.
std::vector<double> attention_weights(const ScaleFeatures &own,
                                      std::span<const ScaleFeatures *const> neighbors,
                                      const AttentionParams &params);

/// Softmax over arbitrary logits with the same floor; used for partial refresh.
std::vector<double> softmax_floored(std::span<const double> logits);

// ---------------------------------------------------------------------------
// Missing-data prediction

struct HoldLast {};
struct LinearAR {
  int order = 2;
};
struct Recurrent {
  std::shared_ptr<const RecurrentModel> model;
};
using PredictorKind = std::variant<HoldLast, LinearAR, Recurrent>;

struct TimedSample {
  IncrementState value;
  long t = 0; ///< receiver-local step
};

struct PredictorState {
  std::deque<TimedSample> history;
  std::size_t capacity = 8; ///< H

  void push(const IncrementState &v, long t);
};

/// One-step estimate of a lost neighbor state at step k.
/// Throws std::logic_error on empty history.
IncrementState predict_missing(const PredictorState &p, const PredictorKind &kind, long k);

} // namespace rhpc
