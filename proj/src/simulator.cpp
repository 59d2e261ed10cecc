#include "rhpc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "rhpc/error.hpp"
#include "rhpc/recurrent.hpp"

namespace rhpc {

NormBase ScenarioConfig::resolved_pcc_base() const {
  if (pcc_base)
    return *pcc_base;
  NormBase b{0.0, 0.0};
  for (const DGSpec &s : agents) {
    b.p += std::abs(s.p_set);
    b.q += std::abs(s.q_set);
  }
  return b;
}

long ScenarioConfig::steps_for(double seconds) const {
  return std::lround(seconds * 1000.0 / period_ms);
}

std::vector<std::string> validate_scenario(const ScenarioConfig &cfg) {
  std::vector<std::string> warnings;
  if (cfg.agents.empty())
    throw ValidationError("agents", "scenario has no agents");
  if (!(cfg.period_ms > 0.0))
    throw ValidationError("period", "control period must be positive");
  if (cfg.horizon < 0)
    throw ValidationError("horizon", "horizon must be >= 0");
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    for (auto &w : validate_spec(cfg.agents[i]))
      warnings.push_back(std::move(w));
  }
  cfg.control.validate();
  cfg.attention.validate();
  if (cfg.history < 1)
    throw ValidationError("predictor_history", "history length must be >= 1");
  if (std::holds_alternative<Recurrent>(cfg.predictor) && cfg.history < 2)
    throw ValidationError("predictor_history", "recurrent predictor needs history >= 2");
  if (auto *ar = std::get_if<LinearAR>(&cfg.predictor); ar && ar->order < 1)
    throw ValidationError("predictor_order", "autoregressive order must be >= 1");

  if (cfg.graph.n_agents != static_cast<int>(cfg.agents.size()))
    throw ValidationError("topology", "graph size does not match the agent list");
  if (cfg.graph.pinned.empty())
    throw ValidationError("topology_pinned", "at least one GFM agent must be pinned");
  const TopologyCheck topo = validate_topology(cfg.graph, cfg.agents);
  if (!topo.ok()) {
    const char *rule = "topology";
    switch (topo.fault) {
    case TopologyFault::LeaderTree:
      rule = "topology_leader_tree";
      break;
    case TopologyFault::GflUnreachable:
      rule = "topology_gfl_reachable";
      break;
    case TopologyFault::PinnedNotGfm:
      rule = "topology_pinned";
      break;
    default:
      break;
    }
    throw ValidationError(rule, topo.message);
  }
  {
    std::set<Edge> seen;
    for (const Edge &e : cfg.graph.edges)
      if (!seen.insert(e).second)
        throw ValidationError("topology", "duplicate edge DG" + std::to_string(e.from + 1) +
                                              " -> DG" + std::to_string(e.to + 1));
  }
  for (int p : cfg.graph.pinned)
    if (!(cfg.agents[p].pin_gain > 0.0))
      warnings.push_back("DG" + std::to_string(p + 1) + " is pinned with zero pin gain");
  for (std::size_t i = 0; i < cfg.agents.size(); ++i)
    if (cfg.agents[i].pin_gain > 0.0 &&
        std::find(cfg.graph.pinned.begin(), cfg.graph.pinned.end(), static_cast<int>(i)) ==
            cfg.graph.pinned.end())
      throw ValidationError("dg_pin_gain", "DG" + std::to_string(i + 1) +
                                               " has a pin gain but is not in the pinned set");

  if (cfg.links.size() != cfg.graph.edges.size())
    throw ValidationError("links", "one link configuration per edge is required");
  for (std::size_t l = 0; l < cfg.links.size(); ++l) {
    const LinkParams &p = cfg.links[l].params;
    if (!(cfg.links[l].edge == cfg.graph.edges[l]))
      throw ValidationError("links", "link list does not follow the edge list");
    if (!(p.loss_prob >= 0.0 && p.loss_prob < 1.0))
      throw ValidationError("link_loss", "loss probability must lie in [0, 1)");
    if (p.max_delay < 0 || p.fixed_delay < 0 || p.fixed_delay > p.max_delay)
      throw ValidationError("link_delay", "delay must satisfy 0 <= delay <= max_delay");
  }

  for (const AttackSpec &a : cfg.attacks) {
    if (std::find(cfg.graph.edges.begin(), cfg.graph.edges.end(), a.link) == cfg.graph.edges.end())
      throw ValidationError("attack_link", "attacked link DG" + std::to_string(a.link.from + 1) +
                                               " -> DG" + std::to_string(a.link.to + 1) +
                                               " is not a communication edge");
    if ((a.signal.kind == SignalKind::Sinusoid || a.signal.kind == SignalKind::StealthyLowFreq) &&
        !(a.signal.period > 0.0))
      throw ValidationError("attack_signal", "sinusoidal attack needs a positive period");
  }
  if (cfg.f_bound < 0)
    throw ValidationError("f_local", "f must be >= 0");
  const FLocalCheck fl = validate_f_local(cfg.attacks, cfg.f_bound);
  if (!fl.ok)
    throw ValidationError("f_local", "DG" + std::to_string(fl.agent + 1) + " has " +
                                         std::to_string(fl.attacked_in_degree) +
                                         " attacked incoming links (f = " +
                                         std::to_string(cfg.f_bound) + ")");

  const NormBase nb = cfg.resolved_pcc_base();
  if (!(nb.p > 0.0) || !(nb.q > 0.0))
    throw ValidationError("pcc_base", "PCC normalization base must be positive");

  generate_loads(cfg.load, cfg.horizon, cfg.period_ms, cfg.seed);
  return warnings;
}

BalanceResult power_balance(std::span<const PowerOutput> outputs, std::span<const DGSpec> specs,
                            const LoadSample &load, const BaseLoads &base, GridMode mode) {
  double dp_gen = 0.0, dq_gen = 0.0, p_sched = 0.0, q_sched = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    dp_gen += outputs[i].p - specs[i].p_set;
    dq_gen += outputs[i].q - specs[i].q_set;
    p_sched += specs[i].p_set;
    q_sched += specs[i].q_set;
  }
  BalanceResult r;
  const double dp = load.dp - dp_gen;
  const double dq = load.dq - dq_gen;
  if (mode == GridMode::GridConnected) {
    r.dp_pcc = dp;
    r.dq_pcc = dq;
    r.p_pcc = base.p_load + base.p_loss - p_sched + dp;
    r.q_pcc = base.q_load + base.q_loss - q_sched + dq;
  } else {
    r.mismatch_p = dp;
    r.mismatch_q = dq;
  }
  return r;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(const ScenarioConfig &cfg, SimOptions opts)
    : cfg_(cfg), opts_(std::move(opts)), pcc_base_(cfg.resolved_pcc_base()),
      predictor_(cfg.predictor) {
  const int n = static_cast<int>(cfg_.agents.size());
  trace_.n_agents = n;
  trace_.period_ms = cfg_.period_ms;

  if (auto *rec = std::get_if<Recurrent>(&predictor_); rec && !rec->model &&
                                                        !cfg_.predictor_model.empty()) {
    std::ifstream in(cfg_.predictor_model, std::ios::binary);
    if (!in)
      throw ValidationError("predictor_model", "cannot open " + cfg_.predictor_model);
    rec->model = std::make_shared<RecurrentModel>(RecurrentModel::load(in));
  }
  if (!cfg_.toggles.predictor)
    predictor_ = HoldLast{};

  for (int i = 0; i < n; ++i) {
    Agent a;
    a.spec = cfg_.agents[i];
    a.box = feasible_box_from_spec(a.spec);
    a.pinned = std::find(cfg_.graph.pinned.begin(), cfg_.graph.pinned.end(), i) !=
               cfg_.graph.pinned.end();
    agents_.push_back(std::move(a));
  }
  for (std::size_t l = 0; l < cfg_.links.size(); ++l) {
    const LinkConfig &lc = cfg_.links[l];
    std::optional<AttackSpec> attack;
    for (const AttackSpec &as : cfg_.attacks)
      if (as.link == lc.edge)
        attack = as;
    links_.emplace_back(lc.edge, lc.params, cfg_.seed, static_cast<std::uint64_t>(l), attack);
    trace_.links.push_back(lc.edge);

    Channel ch;
    ch.from = lc.edge.from;
    ch.link = l;
    ch.predictor.capacity = static_cast<std::size_t>(cfg_.history);
    agents_[lc.edge.to].inbox.push_back(std::move(ch));
  }
  for (Agent &a : agents_)
    for (Channel &ch : a.inbox)
      ch.weight = 1.0 / static_cast<double>(a.inbox.size());

  loads_ = generate_loads(cfg_.load, cfg_.horizon, cfg_.period_ms, cfg_.seed);
  commanded_.assign(n, IncrementState{});

  if (opts_.agent_order.empty()) {
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
  } else {
    order_ = opts_.agent_order;
    std::vector<int> sorted = order_;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
      if (static_cast<int>(sorted.size()) != n || sorted[i] != i)
        throw std::invalid_argument("agent_order must be a permutation of the agents");
  }
}

PowerOutput Simulator::physical_output(std::size_t i, const IncrementState &x) const {
  const DGSpec &s = agents_[i].spec;
  PowerOutput p = destandardize(x, s);
  // Inverter hardware limits; only differs from the state by round-off
  // because GFL states are projected into their box.
  p.p = std::clamp(p.p, s.p_limits.lo, s.p_limits.hi);
  p.q = std::clamp(p.q, s.q_limits.lo, s.q_limits.hi);
  return p;
}

void Simulator::refresh_weights(Agent &a) const {
  if (a.inbox.empty())
    return;
  if (opts_.frozen_uniform_weights || !cfg_.toggles.attention) {
    for (Channel &ch : a.inbox)
      ch.weight = 1.0 / static_cast<double>(a.inbox.size());
    return;
  }
  // Lost neighbors keep their previous weight; the fresh ones share the mass
  // they held before by softmax over their feature distances. Summing that
  // mass directly (rather than 1 - kept) avoids cancelling it to zero.
  double mass = 0.0;
  std::vector<double> logits;
  for (const Channel &ch : a.inbox)
    if (ch.fresh) {
      mass += ch.weight;
      logits.push_back(-feature_distance(a.own, ch.features, cfg_.attention));
    }
  if (logits.empty())
    return;
  const std::vector<double> w = softmax_floored(logits);
  std::size_t j = 0;
  for (Channel &ch : a.inbox)
    if (ch.fresh)
      ch.weight = std::max(mass * w[j++], std::numeric_limits<double>::min());
  double total = 0.0;
  for (const Channel &ch : a.inbox)
    total += ch.weight;
  for (Channel &ch : a.inbox)
    ch.weight /= total;
}

void Simulator::step() {
  const long k = k_;
  if (k >= static_cast<long>(loads_.size()))
    throw std::out_of_range("simulation horizon exhausted");
  const std::size_t n = agents_.size();
  const LoadSample load = loads_[static_cast<std::size_t>(k)];

  // Commanded states become physical outputs; in islanded mode the GFM
  // backbone picks up whatever the commanded outputs leave unbalanced.
  std::vector<IncrementState> x = commanded_;
  std::vector<PowerOutput> power(n);
  for (std::size_t i = 0; i < n; ++i)
    power[i] = physical_output(i, x[i]);
  BalanceResult bal = power_balance(power, cfg_.agents, load, cfg_.base, cfg_.mode);
  if (cfg_.mode == GridMode::Islanded && cfg_.gfm_slack) {
    double sp = 0.0, sq = 0.0;
    for (const Agent &a : agents_)
      if (a.spec.type == DGType::GFM) {
        sp += std::abs(a.spec.p_set);
        sq += std::abs(a.spec.q_set);
      }
    if (sp > 0.0 && sq > 0.0) {
      const IncrementState share{bal.mismatch_p / sp, bal.mismatch_q / sq};
      for (std::size_t i = 0; i < n; ++i)
        if (agents_[i].spec.type == DGType::GFM) {
          x[i] += share;
          power[i] = physical_output(i, x[i]);
        }
    }
  }

  TraceRow row;
  row.step = k;
  row.load = load;
  row.x = x;
  row.power = power;
  row.ref = ref_.ref;
  row.dp_pcc = bal.dp_pcc;
  row.dq_pcc = bal.dq_pcc;
  row.mismatch_p = bal.mismatch_p;
  row.mismatch_q = bal.mismatch_q;
  row.act.resize(n);
  row.links.resize(links_.size());

  std::vector<ActivationMatrix> act(n);
  for (std::size_t i = 0; i < n; ++i)
    act[i] = cfg_.toggles.activation
                 ? activation(x[i], agents_[i].box, cfg_.control.boundary_eps)
                 : ActivationMatrix::all_on();
  row.act = act;

  // (1) transmit
  for (int i : order_)
    for (LinkState &l : links_)
      if (l.edge.from == i)
        send(l, Payload{x[i], act[i], k, false}, k);

  // (2) receive, features, weights, prediction
  for (int i : order_) {
    Agent &a = agents_[i];
    a.own = update_features(std::move(a.own), x[i], cfg_.attention);
    for (Channel &ch : a.inbox) {
      const DeliveryOutcome out = collect(links_[ch.link], k);
      LinkRecord &rec = row.links[ch.link];
      ch.fresh = out.delivered();
      rec.delivered = out.delivered();
      rec.attacked = out.attacked;
      rec.age = out.age;
      if (out.delivered()) {
        ch.features = update_features(std::move(ch.features), out.payload->state, cfg_.attention);
        ch.predictor.push(out.payload->state, k);
        ch.value = out.payload->state;
        ch.activation = out.payload->activation;
      } else if (!ch.predictor.history.empty()) {
        ch.value = predict_missing(ch.predictor, predictor_, k);
      }
    }
    refresh_weights(a);
    for (const Channel &ch : a.inbox)
      row.links[ch.link].weight = ch.weight;
  }

  // (3) virtual leader: Δx_ref(k+1) from x(k) and the PCC increment
  std::vector<IncrementState> pinned;
  for (int p : cfg_.graph.pinned)
    pinned.push_back(x[static_cast<std::size_t>(p)]);
  const IncrementState x_pcc = compute_x_pcc(bal.dp_pcc, bal.dq_pcc, pcc_base_);
  const ReferenceState next_ref =
      scada_reference_update(pinned, x_pcc, cfg_.graph.pcc_present, cfg_.mode);

  // (4) synchronous control updates using Δx_ref(k)
  const bool relax = cfg_.mode == GridMode::Islanded && cfg_.island_reactive_relaxation &&
                     cfg_.toggles.activation;
  std::vector<IncrementState> u(n);
  for (int i : order_) {
    const Agent &a = agents_[i];
    std::vector<NeighborInput> inputs;
    inputs.reserve(a.inbox.size());
    for (const Channel &ch : a.inbox) {
      NeighborInput in{ch.value, cfg_.toggles.activation ? ch.activation : ActivationMatrix{},
                       ch.weight};
      if (relax && agents_[ch.from].spec.type == DGType::GFL)
        in.activation.a2 = 0;
      inputs.push_back(in);
    }
    if (a.spec.type == DGType::GFL)
      u[i] = gfl_update(x[i], inputs, cfg_.control, a.box);
    else
      u[i] = gfm_update(x[i], inputs, ref_, a.spec.pin_gain, cfg_.control);
    if (!u[i].finite()) {
      std::ostringstream os;
      os << "non-finite state for DG" << a.spec.id << " at step " << k;
      throw NumericError(i, k, os.str());
    }
  }

  // (5) commit
  commanded_ = std::move(u);
  ref_ = next_ref;
  trace_.rows.push_back(std::move(row));
  ++k_;
}

SimTrace run(const ScenarioConfig &cfg, SimOptions opts) {
  validate_scenario(cfg);
  Simulator sim(cfg, std::move(opts));
  for (long k = 0; k < cfg.horizon; ++k)
    sim.step();
  return sim.take_trace();
}

} // namespace rhpc
