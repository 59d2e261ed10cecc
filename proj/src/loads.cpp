#include <algorithm>
#include <sstream>

#include "rhpc/error.hpp"
#include "rhpc/simulator.hpp"

namespace rhpc {

namespace {

LoadSample interpolate(const std::vector<LoadPoint> &pts, double t, bool hold_steps) {
  if (pts.empty())
    return {};
  if (t <= pts.front().t_s)
    return {pts.front().dp, pts.front().dq};
  if (t >= pts.back().t_s)
    return {pts.back().dp, pts.back().dq};
  const auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                                   [](double v, const LoadPoint &p) { return v < p.t_s; });
  const LoadPoint &b = *hi;
  const LoadPoint &a = *(hi - 1);
  if (hold_steps)
    return {a.dp, a.dq};
  const double w = (t - a.t_s) / (b.t_s - a.t_s);
  return {a.dp + w * (b.dp - a.dp), a.dq + w * (b.dq - a.dq)};
}

} // namespace

std::vector<LoadSample> generate_loads(const LoadProfileSpec &spec, long horizon, double period_ms,
                                       std::uint64_t seed) {
  if (horizon < 0)
    throw ValidationError("horizon", "horizon must be >= 0");
  for (std::size_t i = 1; i < spec.points.size(); ++i)
    if (!(spec.points[i].t_s > spec.points[i - 1].t_s))
      throw ValidationError("load_points", "load breakpoints must be strictly increasing in time");

  std::vector<LoadSample> out;
  out.reserve(static_cast<std::size_t>(horizon));
  std::mt19937_64 rng(mix_seed(seed, 0x10ad));
  for (long k = 0; k < horizon; ++k) {
    const double t = static_cast<double>(k) * period_ms / 1000.0;
    LoadSample s;
    switch (spec.kind) {
    case LoadKind::Flat:
      break;
    case LoadKind::PiecewiseLinear:
      s = interpolate(spec.points, t, false);
      break;
    case LoadKind::Steps:
      s = interpolate(spec.points, t, true);
      break;
    case LoadKind::RampsNoise: {
      s = interpolate(spec.points, t, false);
      s.dp += spec.noise_p * (2.0 * uniform01(rng) - 1.0);
      s.dq += spec.noise_q * (2.0 * uniform01(rng) - 1.0);
      break;
    }
    }
    out.push_back(s);
  }

  if (!out.empty()) {
    if (auto v = validate_load_profile(out, spec.dp_rate, spec.dq_rate)) {
      std::ostringstream os;
      os << "load changes by " << v->step << (v->axis == 0 ? " MW" : " MVar") << " at step "
         << v->index << ", above the declared rate bound";
      throw ValidationError("load_rate", os.str());
    }
  }
  return out;
}

} // namespace rhpc
