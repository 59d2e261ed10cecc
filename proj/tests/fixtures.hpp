#pragma once

#include <vector>

#include "rhpc/simulator.hpp"

namespace rhpc::testing {

inline DGSpec gfm(int id, double p, double q, double pin = 0.0) {
  DGSpec s;
  s.id = id;
  s.type = DGType::GFM;
  s.p_set = p;
  s.q_set = q;
  s.pin_gain = pin;
  return s;
}

inline DGSpec gfl(int id, double p, double q, Interval pl, Interval ql) {
  DGSpec s;
  s.id = id;
  s.type = DGType::GFL;
  s.p_set = p;
  s.q_set = q;
  s.p_limits = pl;
  s.q_limits = ql;
  return s;
}

/// Lossless, zero-delay links on every edge.
inline std::vector<LinkConfig> ideal_links(const CommGraph &g) {
  std::vector<LinkConfig> out;
  for (const Edge &e : g.edges)
    out.push_back({e, LinkParams{}});
  return out;
}

/// Five-agent system shaped like the shipped presets, fault-free, with wide
/// GFL limits so nothing saturates under small loads.
inline ScenarioConfig five_agent_fault_free(double load_p = 0.3, double load_q = 0.1) {
  ScenarioConfig cfg;
  cfg.name = "five";
  cfg.agents = {gfm(1, 0.8, 0.6, 1.0), gfl(2, 0.4, 0.3, {0.0, 1.2}, {-0.3, 0.9}),
                gfm(3, 0.8, 0.6, 1.0), gfl(4, 0.4, 0.3, {0.0, 1.2}, {-0.3, 0.9}),
                gfl(5, 0.4, 0.3, {0.0, 1.2}, {-0.3, 0.9})};
  cfg.graph.n_agents = 5;
  cfg.graph.edges = {{0, 2}, {2, 0}, {1, 0}, {0, 1}, {3, 2}, {2, 3}, {0, 4}, {2, 4}, {4, 0}};
  cfg.graph.pinned = {0, 2};
  cfg.links = ideal_links(cfg.graph);
  cfg.load.kind = LoadKind::PiecewiseLinear;
  cfg.load.points = {{0.0, 0.0, 0.0}, {0.5, load_p, load_q}, {3.0, load_p, load_q},
                     {4.0, load_p * 0.5, load_q * 0.5}};
  cfg.load.dp_rate = 0.05;
  cfg.load.dq_rate = 0.05;
  cfg.horizon = 1000;
  return cfg;
}

} // namespace rhpc::testing
