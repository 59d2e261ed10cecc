#include "rhpc/protocol.hpp"

#include <algorithm>

#include "rhpc/error.hpp"

namespace rhpc {

void ControlParams::validate() const {
  if (!(step_c > 0.0 && step_c < 1.0))
    throw ValidationError("control_step", "step size c must lie in (0, 1)");
  if (!(boundary_eps >= 0.0))
    throw ValidationError("control_boundary_eps", "boundary tolerance must be >= 0");
  if (!(eps_p >= 0.0) || !(eps_q >= 0.0))
    throw ValidationError("control_tolerance", "consensus tolerances must be >= 0");
}

IncrementState project(const IncrementState &point, const FeasibleBox &box) {
  return {std::clamp(point.x1, box.x1.lo, box.x1.hi), std::clamp(point.x2, box.x2.lo, box.x2.hi)};
}

ActivationMatrix activation(const IncrementState &x, const FeasibleBox &box, double eps) {
  ActivationMatrix a;
  for (std::size_t m = 0; m < 2; ++m) {
    const Interval &iv = box.axis(m);
    const bool at_lo = std::isfinite(iv.lo) && x[m] - iv.lo <= eps;
    const bool at_hi = std::isfinite(iv.hi) && iv.hi - x[m] <= eps;
    a[m] = (at_lo || at_hi) ? 0 : 1;
  }
  return a;
}

IncrementState gfl_update(const IncrementState &x, std::span<const NeighborInput> neighbors,
                          const ControlParams &params, const FeasibleBox &box) {
  IncrementState mix;
  for (const NeighborInput &nb : neighbors)
    mix += nb.weight * nb.state.value_or(x);
  const double c = params.step_c;
  return project((1.0 - c) * x + c * mix, box);
}

IncrementState gfm_update(const IncrementState &x, std::span<const NeighborInput> neighbors,
                          const ReferenceState &ref, double pin_gain, const ControlParams &params) {
  IncrementState mix;
  for (const NeighborInput &nb : neighbors) {
    if (!nb.state) {
      mix += nb.weight * x;
      continue;
    }
    for (std::size_t m = 0; m < 2; ++m)
      mix[m] += nb.activation[m] * nb.weight * (*nb.state)[m];
  }
  const double c = params.step_c;
  return (1.0 - c) * x + c * mix + (c * pin_gain) * (ref.ref - x);
}

ReferenceState scada_reference_update(std::span<const IncrementState> pinned_states,
                                      const IncrementState &x_pcc, bool pcc_available,
                                      GridMode mode) {
  if (pinned_states.empty())
    throw ValidationError("topology_pinned", "reference update needs at least one pinned agent");
  const bool pcc_active = pcc_available && mode == GridMode::GridConnected;
  IncrementState sum;
  for (const IncrementState &s : pinned_states)
    sum += s;
  if (pcc_active)
    sum += x_pcc;
  return {(1.0 / static_cast<double>(pinned_states.size() + 1)) * sum, pcc_active};
}

IncrementState compute_x_pcc(double dp_pcc, double dq_pcc, const NormBase &base) {
  if (!(base.p > 0.0) || !(base.q > 0.0))
    throw ValidationError("pcc_base", "PCC normalization base must be positive");
  return {dp_pcc / base.p, dq_pcc / base.q};
}

} // namespace rhpc
