#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "rhpc/resilience.hpp"

namespace rhpc {

/// Small LSTM that maps a sequence of per-step velocities of a received
/// stream to the next velocity. No bias terms: an all-zero input sequence
/// yields exactly zero output, so a constant history predicts that constant.
///
/// Flat parameter layout (row-major blocks, in order):
///   Wx  4h x 2   input weights, gate order (input, forget, output, cell)
///   Wh  4h x h   recurrent weights
///   V   2  x h   readout
class RecurrentModel {
public:
  RecurrentModel(int hidden, int history, double scale);

  int hidden_size() const { return hidden_; }
  int history_len() const { return history_; }
  double scale() const { return scale_; }

  static std::size_t param_count(int hidden) {
    return static_cast<std::size_t>(4 * hidden * 2 + 4 * hidden * hidden + 2 * hidden);
  }

  Eigen::VectorXd &params() { return params_; }
  const Eigen::VectorXd &params() const { return params_; }

  /// Output for normalized velocities (input already divided by scale()).
  Eigen::Vector2d forward(std::span<const Eigen::Vector2d> inputs) const;

  /// ½‖forward(inputs) − target‖², accumulating d/dparams into grad.
  double loss_and_grad(std::span<const Eigen::Vector2d> inputs, const Eigen::Vector2d &target,
                       Eigen::VectorXd &grad) const;

  /// Predicts the stream at step k from its timed history.
  IncrementState predict(const std::deque<TimedSample> &history, long k) const;

  void save(std::ostream &os) const;
  static RecurrentModel load(std::istream &is);

private:
  int hidden_;
  int history_;
  double scale_;
  Eigen::VectorXd params_;
};

struct RecurrentTraining {
  int hidden = 8;
  int history = 8; ///< H, samples per input window (>= 2)
  int epochs = 300;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
  std::size_t max_windows = 4096;
};

struct RecurrentFit {
  RecurrentModel model;
  double holdout_mse = 0.0;
  double holdout_mse_hold_last = 0.0;
};

/// Trains on nominal trajectories (one sample per step). The last trajectory
/// is held out when there are several; otherwise the final quarter of the
/// single trajectory is. Throws std::invalid_argument on insufficient data
/// and std::runtime_error when the model does not match hold-last on the
/// held-out data.
RecurrentFit train_recurrent(const std::vector<std::vector<IncrementState>> &trajectories,
                             const RecurrentTraining &hp);

} // namespace rhpc
