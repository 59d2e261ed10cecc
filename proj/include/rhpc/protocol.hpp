#pragma once

#include <optional>
#include <span>

#include "rhpc/domain.hpp"

namespace rhpc {

enum class GridMode { GridConnected, Islanded };

struct ControlParams {
  double step_c = 0.2;         ///< consensus step size c in (0, 1)
  double boundary_eps = 1e-6;  ///< distance to a bound that counts as "on the boundary"
  double eps_p = 0.05;         ///< active consensus tolerance band
  double eps_q = 0.05;         ///< reactive consensus tolerance band

  void validate() const;
};

struct ReferenceState {
  IncrementState ref;
  bool pcc_active = false;
};

/// What an agent knows about one in-neighbor at the current step. `state` is
/// empty when nothing has ever been received (or predicted) for it; the
/// update laws then substitute the agent's own state.
struct NeighborInput {
  std::optional<IncrementState> state;
  ActivationMatrix activation;
  double weight = 0.0;
};

/// Euclidean projection onto an axis-aligned box (componentwise clamp).
IncrementState project(const IncrementState &point, const FeasibleBox &box);

/// a_m = 0 iff x_m lies within eps of a finite bound on dimension m.
ActivationMatrix activation(const IncrementState &x, const FeasibleBox &box, double eps);

/// Projected consensus update for grid-following units.
IncrementState gfl_update(const IncrementState &x, std::span<const NeighborInput> neighbors,
                          const ControlParams &params, const FeasibleBox &box);

/// Gated consensus plus reference tracking for grid-forming units. Neighbor
/// j contributes to dimension m only when its activation a_m is 1.
IncrementState gfm_update(const IncrementState &x, std::span<const NeighborInput> neighbors,
                          const ReferenceState &ref, double pin_gain, const ControlParams &params);

/// Virtual-leader reference: (Σ pinned + A_pcc·x_pcc) / (|pinned| + 1).
/// A_pcc is forced to 0 in islanded mode. Throws ValidationError when no
/// agent is pinned.
ReferenceState scada_reference_update(std::span<const IncrementState> pinned_states,
                                      const IncrementState &x_pcc, bool pcc_available,
                                      GridMode mode);

struct NormBase {
  double p = 1.0; ///< MW
  double q = 1.0; ///< MVar
};

IncrementState compute_x_pcc(double dp_pcc, double dq_pcc, const NormBase &base);

} // namespace rhpc
