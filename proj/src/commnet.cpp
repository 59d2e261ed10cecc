#include "rhpc/commnet.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <queue>

#include "rhpc/error.hpp"

namespace rhpc {

std::vector<int> CommGraph::in_neighbors(int i) const {
  std::vector<int> out;
  for (const Edge &e : edges)
    if (e.to == i)
      out.push_back(e.from);
  return out;
}

namespace {

std::string dg(int idx) { return "DG" + std::to_string(idx + 1); }

// Breadth-first reachability over `adj` from every node in `roots`.
std::vector<char> reach(const std::vector<std::vector<int>> &adj, const std::vector<int> &roots) {
  std::vector<char> seen(adj.size(), 0);
  std::queue<int> q;
  for (int r : roots) {
    if (!seen[r]) {
      seen[r] = 1;
      q.push(r);
    }
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  return seen;
}

} // namespace

TopologyCheck validate_topology(const CommGraph &graph, std::span<const DGSpec> specs) {
  const int n = graph.n_agents;
  if (n != static_cast<int>(specs.size()))
    return {TopologyFault::BadIndex, -1, "graph has " + std::to_string(n) + " agents but " +
                                             std::to_string(specs.size()) + " specs"};
  for (const Edge &e : graph.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      return {TopologyFault::BadIndex, -1, "edge references an unknown agent"};
    if (e.from == e.to)
      return {TopologyFault::SelfEdge, e.from, dg(e.from) + " has a self-edge"};
  }
  for (int p : graph.pinned) {
    if (p < 0 || p >= n)
      return {TopologyFault::BadIndex, -1, "pinned set references an unknown agent"};
    if (specs[p].type != DGType::GFM)
      return {TopologyFault::PinnedNotGfm, p, dg(p) + " is pinned but is not GFM"};
  }

  auto is_gfm = [&](int i) { return specs[i].type == DGType::GFM; };

  // (a) leader (node n) plus GFM agents, leader edges to the pinned set.
  std::vector<std::vector<int>> backbone(n + 1);
  for (int p : graph.pinned)
    backbone[n].push_back(p);
  for (const Edge &e : graph.edges)
    if (is_gfm(e.from) && is_gfm(e.to))
      backbone[e.from].push_back(e.to);
  const auto from_leader = reach(backbone, {n});
  for (int i = 0; i < n; ++i)
    if (is_gfm(i) && !from_leader[i])
      return {TopologyFault::LeaderTree, i,
              dg(i) + " is not reachable from the leader through pinned/GFM links"};

  // (b) every GFL reachable from some GFM over the full graph.
  std::vector<std::vector<int>> full(n);
  for (const Edge &e : graph.edges)
    full[e.from].push_back(e.to);
  std::vector<int> gfms;
  for (int i = 0; i < n; ++i)
    if (is_gfm(i))
      gfms.push_back(i);
  const auto from_gfm = reach(full, gfms);
  for (int i = 0; i < n; ++i)
    if (!is_gfm(i) && !from_gfm[i])
      return {TopologyFault::GflUnreachable, i, dg(i) + " has no directed path from a GFM agent"};
  return {};
}

// ---------------------------------------------------------------------------

bool AttackSchedule::active(long k) const {
  if (k < start || (stop >= 0 && k >= stop))
    return false;
  if (on_steps <= 0)
    return true;
  const long phase = (k - start) % (on_steps + off_steps);
  return phase < on_steps;
}

IncrementState AttackSignal::evaluate(long k, long start) const {
  const double t = static_cast<double>(k - start);
  double v = 0.0;
  switch (kind) {
  case SignalKind::Constant:
    v = value;
    break;
  case SignalKind::Ramp:
    v = value * t;
    break;
  case SignalKind::Sinusoid:
    v = value * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / period);
    break;
  case SignalKind::StealthyLowFreq:
    // Starts at zero offset and drifts slowly; per-step change <= value*2π/period.
    v = value * (std::sin(2.0 * std::numbers::pi * t / period + phase) - std::sin(phase));
    break;
  }
  return {v, v};
}

FLocalCheck validate_f_local(std::span<const AttackSpec> attacks, int f) {
  std::map<int, std::vector<Edge>> per_agent;
  for (const AttackSpec &a : attacks) {
    auto &links = per_agent[a.link.to];
    if (std::find(links.begin(), links.end(), a.link) == links.end())
      links.push_back(a.link);
  }
  for (const auto &[agent, links] : per_agent) {
    const int deg = static_cast<int>(links.size());
    if (deg > f)
      return {false, agent, deg};
  }
  return {};
}

Payload inject_fdi(Payload payload, const AttackSpec &attack, long k) {
  if (!attack.schedule.active(k))
    return payload;
  payload.state += attack.offset(k);
  payload.attacked = true;
  return payload;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

LinkState::LinkState(Edge e, LinkParams p, std::uint64_t scenario_seed, std::uint64_t link_id,
                     std::optional<AttackSpec> a)
    : edge(e), params(p), attack(std::move(a)), loss_rng(mix_seed(scenario_seed, link_id, 1)),
      delay_rng(mix_seed(scenario_seed, link_id, 2)) {
  if (!(params.loss_prob >= 0.0 && params.loss_prob < 1.0))
    throw ValidationError("link_loss", "loss probability must lie in [0, 1)");
  if (params.max_delay < 0 || params.fixed_delay < 0 || params.fixed_delay > params.max_delay)
    throw ValidationError("link_delay", "delay must satisfy 0 <= delay <= max_delay");
}

int LinkState::draw_delay(long) {
  if (params.delay_mode == DelayMode::Fixed || params.max_delay == 0)
    return params.fixed_delay;
  const double u = uniform01(delay_rng);
  return std::min(params.max_delay, static_cast<int>(u * (params.max_delay + 1)));
}

bool send(LinkState &link, Payload payload, long k) {
  payload.sent_at = k;
  if (link.attack)
    payload = inject_fdi(payload, *link.attack, k);
  const int delay = link.draw_delay(k);
  const bool lost = uniform01(link.loss_rng) < link.params.loss_prob;
  if (lost)
    return false;
  link.buffer.push_back({payload, k + delay});
  return true;
}

DeliveryOutcome collect(LinkState &link, long k) {
  DeliveryOutcome out;
  auto newest = link.buffer.end();
  for (auto it = link.buffer.begin(); it != link.buffer.end(); ++it) {
    if (it->deliver_at <= k &&
        (newest == link.buffer.end() || it->payload.sent_at > newest->payload.sent_at))
      newest = it;
  }
  if (newest == link.buffer.end())
    return out;
  out.status = DeliveryOutcome::Status::Delivered;
  out.payload = newest->payload;
  out.attacked = newest->payload.attacked;
  out.age = static_cast<int>(k - newest->payload.sent_at);
  std::erase_if(link.buffer, [k](const LinkState::Queued &q) { return q.deliver_at <= k; });
  return out;
}

std::vector<std::pair<int, DeliveryOutcome>> collect_inbox(std::span<LinkState> links, int agent,
                                                           long k) {
  std::vector<std::pair<int, DeliveryOutcome>> out;
  for (LinkState &l : links)
    if (l.edge.to == agent)
      out.emplace_back(l.edge.from, collect(l, k));
  return out;
}

} // namespace rhpc
