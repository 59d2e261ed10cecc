#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rhpc {

enum class DGType { GFL, GFM };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  static constexpr Interval unbounded() { return {}; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool is_unbounded() const { return lo == -kInf && hi == kInf; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval &) const = default;
};

/// Standardized power increment (active, reactive); the consensus variable.
struct IncrementState {
  double x1 = 0.0;
  double x2 = 0.0;

  double operator[](std::size_t m) const { return m == 0 ? x1 : x2; }
  double &operator[](std::size_t m) { return m == 0 ? x1 : x2; }

  bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
  double norm() const { return std::hypot(x1, x2); }

  IncrementState &operator+=(const IncrementState &o) {
    x1 += o.x1;
    x2 += o.x2;
    return *this;
  }
  IncrementState &operator-=(const IncrementState &o) {
    x1 -= o.x1;
    x2 -= o.x2;
    return *this;
  }
  IncrementState &operator*=(double s) {
    x1 *= s;
    x2 *= s;
    return *this;
  }
  friend IncrementState operator+(IncrementState a, const IncrementState &b) { return a += b; }
  friend IncrementState operator-(IncrementState a, const IncrementState &b) { return a -= b; }
  friend IncrementState operator*(double s, IncrementState a) { return a *= s; }
  friend IncrementState operator*(IncrementState a, double s) { return a *= s; }
  bool operator==(const IncrementState &) const = default;
};

/// Per-dimension 0/1 participation gate of a generator in neighbors' sums.
struct ActivationMatrix {
  int a1 = 1;
  int a2 = 1;

  int operator[](std::size_t m) const { return m == 0 ? a1 : a2; }
  int &operator[](std::size_t m) { return m == 0 ? a1 : a2; }
  static constexpr ActivationMatrix all_on() { return {1, 1}; }
  bool operator==(const ActivationMatrix &) const = default;
};

struct DGSpec {
  int id = 0; ///< 1-based label as used in scenario files
  DGType type = DGType::GFM;
  double p_set = 0.0; ///< MW
  double q_set = 0.0; ///< MVar
  Interval p_limits;
  Interval q_limits;
  double pin_gain = 0.0;
};

/// Feasible region of the standardized increment; an axis-aligned box.
struct FeasibleBox {
  Interval x1;
  Interval x2;

  const Interval &axis(std::size_t m) const { return m == 0 ? x1 : x2; }
  bool contains(const IncrementState &x) const { return x1.contains(x.x1) && x2.contains(x.x2); }
  static constexpr FeasibleBox whole_plane() { return {}; }
};

struct LoadSample {
  double dp = 0.0; ///< ΔP_L(k), MW
  double dq = 0.0; ///< ΔQ_L(k), MVar
  bool operator==(const LoadSample &) const = default;
};

/// Throws ValidationError when a DG description breaks one of its invariants.
/// Returns soft warnings (currently: setpoint outside its own limits).
std::vector<std::string> validate_spec(const DGSpec &spec);

FeasibleBox feasible_box_from_spec(const DGSpec &spec);

IncrementState standardize(double dp, double dq, const DGSpec &spec);

struct PowerOutput {
  double p = 0.0;
  double q = 0.0;
};

PowerOutput destandardize(const IncrementState &x, const DGSpec &spec);

struct LoadRateViolation {
  std::size_t index = 0; ///< first sample whose change from its predecessor breaks the bound
  int axis = 0;          ///< 0 active, 1 reactive
  double step = 0.0;
};

/// Empty optional means the profile respects both rate bounds (inclusive).
std::optional<LoadRateViolation> validate_load_profile(std::span<const LoadSample> samples,
                                                       double dp_rate, double dq_rate);

const char *to_string(DGType t);

} // namespace rhpc
