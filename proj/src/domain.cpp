#include "rhpc/domain.hpp"

#include <sstream>

#include "rhpc/error.hpp"

namespace rhpc {

namespace {

Interval standardized_interval(const Interval &limits, double setpoint) {
  if (limits.is_unbounded())
    return Interval::unbounded();
  const double scale = std::abs(setpoint);
  return {(limits.lo - setpoint) / scale, (limits.hi - setpoint) / scale};
}

std::string label(const DGSpec &spec) { return "DG" + std::to_string(spec.id); }

} // namespace

const char *to_string(DGType t) { return t == DGType::GFL ? "gfl" : "gfm"; }

std::vector<std::string> validate_spec(const DGSpec &spec) {
  if (!(std::isfinite(spec.p_set) && spec.p_set != 0.0))
    throw ValidationError("dg_setpoint", label(spec) + " active setpoint must be finite and nonzero");
  if (!(std::isfinite(spec.q_set) && spec.q_set != 0.0))
    throw ValidationError("dg_setpoint", label(spec) + " reactive setpoint must be finite and nonzero");
  if (!(spec.pin_gain >= 0.0) || !std::isfinite(spec.pin_gain))
    throw ValidationError("dg_pin_gain", label(spec) + " pin gain must be finite and >= 0");

  if (spec.type == DGType::GFM) {
    if (!spec.p_limits.is_unbounded() || !spec.q_limits.is_unbounded())
      throw ValidationError("dg_limits", label(spec) + " is GFM and must have unbounded limits");
    return {};
  }

  if (spec.pin_gain > 0.0)
    throw ValidationError("dg_pin_gain", label(spec) + " is GFL; only GFM units may be pinned");
  for (const Interval *iv : {&spec.p_limits, &spec.q_limits}) {
    if (!iv->bounded() || iv->lo > iv->hi)
      throw ValidationError("dg_limits", label(spec) + " is GFL and needs finite, nonempty limits");
  }

  std::vector<std::string> warnings;
  if (!spec.p_limits.contains(spec.p_set)) {
    std::ostringstream os;
    os << label(spec) << " active setpoint " << spec.p_set << " MW lies outside [" << spec.p_limits.lo
       << ", " << spec.p_limits.hi << "]";
    warnings.push_back(os.str());
  }
  if (!spec.q_limits.contains(spec.q_set)) {
    std::ostringstream os;
    os << label(spec) << " reactive setpoint " << spec.q_set << " MVar lies outside ["
       << spec.q_limits.lo << ", " << spec.q_limits.hi << "]";
    warnings.push_back(os.str());
  }
  return warnings;
}

FeasibleBox feasible_box_from_spec(const DGSpec &spec) {
  if (spec.p_set == 0.0 || spec.q_set == 0.0)
    throw ValidationError("dg_setpoint", label(spec) + " zero setpoint cannot be standardized");
  return {standardized_interval(spec.p_limits, spec.p_set),
          standardized_interval(spec.q_limits, spec.q_set)};
}

IncrementState standardize(double dp, double dq, const DGSpec &spec) {
  return {dp / std::abs(spec.p_set), dq / std::abs(spec.q_set)};
}

PowerOutput destandardize(const IncrementState &x, const DGSpec &spec) {
  return {spec.p_set + x.x1 * std::abs(spec.p_set), spec.q_set + x.x2 * std::abs(spec.q_set)};
}

std::optional<LoadRateViolation> validate_load_profile(std::span<const LoadSample> samples,
                                                       double dp_rate, double dq_rate) {
  if (samples.empty())
    throw ValidationError("load_profile", "load profile is empty");
  if (!(dp_rate > 0.0) || !(dq_rate > 0.0))
    throw ValidationError("load_profile", "rate bounds must be positive");
  // Round-off slack so that steps of exactly the bound (as generated by
  // interpolation) are not reported.
  constexpr double slack = 1.0 + 1e-9;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double sp = samples[k + 1].dp - samples[k].dp;
    if (std::abs(sp) > dp_rate * slack)
      return LoadRateViolation{k + 1, 0, sp};
    const double sq = samples[k + 1].dq - samples[k].dq;
    if (std::abs(sq) > dq_rate * slack)
      return LoadRateViolation{k + 1, 1, sq};
  }
  return std::nullopt;
}

} // namespace rhpc
