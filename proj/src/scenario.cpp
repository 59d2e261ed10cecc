#include "rhpc/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rhpc/error.hpp"

namespace rhpc {

namespace {

namespace fs = std::filesystem;

std::string where(const YAML::Node &n) {
  const YAML::Mark m = n.Mark();
  if (m.is_null())
    return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void schema_error(const YAML::Node &n, const std::string &msg) {
  throw ValidationError("schema", msg + where(n));
}

// ---------------------------------------------------------------------------
// Key schema: every map lists its allowed keys; a nested schema applies to
// map values or to each element of a sequence value.

struct Schema {
  std::map<std::string, const Schema *> keys;
};

const Schema kLeaf{};
const Schema kLimitsAgent{{{"id", &kLeaf},
                           {"type", &kLeaf},
                           {"p", &kLeaf},
                           {"q", &kLeaf},
                           {"p_limits", &kLeaf},
                           {"q_limits", &kLeaf},
                           {"pin_gain", &kLeaf}}};
const Schema kLinkParams{{{"edge", &kLeaf},
                          {"loss", &kLeaf},
                          {"max_delay_ms", &kLeaf},
                          {"delay", &kLeaf},
                          {"fixed_delay_ms", &kLeaf}}};
const Schema kLinks{{{"default", &kLinkParams}, {"overrides", &kLinkParams}}};
const Schema kAttack{{{"link", &kLeaf},
                      {"start_s", &kLeaf},
                      {"stop_s", &kLeaf},
                      {"on_steps", &kLeaf},
                      {"off_steps", &kLeaf},
                      {"signal", &kLeaf},
                      {"value", &kLeaf},
                      {"period_steps", &kLeaf},
                      {"phase", &kLeaf}}};
const Schema kControl{
    {{"c", &kLeaf}, {"boundary_eps", &kLeaf}, {"eps_p", &kLeaf}, {"eps_q", &kLeaf}}};
const Schema kAttention{{{"sigmas", &kLeaf}, {"window", &kLeaf}, {"gamma", &kLeaf}}};
const Schema kPredictor{
    {{"kind", &kLeaf}, {"order", &kLeaf}, {"history", &kLeaf}, {"model", &kLeaf}}};
const Schema kLoad{{{"kind", &kLeaf},
                    {"points", &kLeaf},
                    {"noise_p", &kLeaf},
                    {"noise_q", &kLeaf},
                    {"dp_rate", &kLeaf},
                    {"dq_rate", &kLeaf}}};
const Schema kBase{
    {{"p_load", &kLeaf}, {"q_load", &kLeaf}, {"p_loss", &kLeaf}, {"q_loss", &kLeaf}}};
const Schema kPq{{{"p", &kLeaf}, {"q", &kLeaf}}};
const Schema kToggles{{{"activation", &kLeaf}, {"attention", &kLeaf}, {"predictor", &kLeaf}}};
const Schema kAnalysis{{{"burn_in_s", &kLeaf},
                        {"band_s", &kLeaf},
                        {"event_s", &kLeaf},
                        {"overshoot_agent", &kLeaf}}};
const Schema kMeta{{{"build", &kLeaf}, {"seed", &kLeaf}}};
const Schema kRoot{{{"preset", &kLeaf},
                    {"name", &kLeaf},
                    {"mode", &kLeaf},
                    {"period_ms", &kLeaf},
                    {"horizon", &kLeaf},
                    {"seed", &kLeaf},
                    {"agents", &kLimitsAgent},
                    {"edges", &kLeaf},
                    {"pinned", &kLeaf},
                    {"pcc", &kLeaf},
                    {"links", &kLinks},
                    {"attacks", &kAttack},
                    {"f", &kLeaf},
                    {"control", &kControl},
                    {"island_reactive_relaxation", &kLeaf},
                    {"gfm_slack", &kLeaf},
                    {"attention", &kAttention},
                    {"predictor", &kPredictor},
                    {"load", &kLoad},
                    {"base", &kBase},
                    {"pcc_base", &kPq},
                    {"toggles", &kToggles},
                    {"analysis", &kAnalysis},
                    {"meta", &kMeta}}};

void check_keys(const YAML::Node &node, const Schema &schema, const std::string &path) {
  if (&schema == &kLeaf || !node)
    return;
  if (node.IsSequence()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      check_keys(node[i], schema, path + "[" + std::to_string(i) + "]");
    return;
  }
  if (!node.IsMap())
    schema_error(node, "'" + path + "' must be a mapping");
  for (const auto &kv : node) {
    const std::string key = kv.first.as<std::string>();
    const auto it = schema.keys.find(key);
    if (it == schema.keys.end())
      schema_error(kv.first, "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    check_keys(kv.second, *it->second, path.empty() ? key : path + "." + key);
  }
}

YAML::Node parse_yaml(const std::string &text, const std::string &origin) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException &e) {
    throw ValidationError("parse", origin + ": line " + std::to_string(e.mark.line + 1) +
                                       ", column " + std::to_string(e.mark.column + 1) + ": " +
                                       e.msg);
  }
}

YAML::Node deep_merge(const YAML::Node &base, const YAML::Node &over) {
  if (!base || !base.IsMap() || !over.IsMap())
    return YAML::Clone(over);
  YAML::Node out = YAML::Clone(base);
  for (const auto &kv : over) {
    const std::string key = kv.first.as<std::string>();
    out[key] = out[key] ? deep_merge(out[key], kv.second) : YAML::Clone(kv.second);
  }
  return out;
}

YAML::Node resolve_presets(const YAML::Node &doc, int depth) {
  if (!doc.IsMap() || !doc["preset"])
    return doc;
  if (depth > 8)
    schema_error(doc["preset"], "preset chain too deep");
  const std::string name = doc["preset"].as<std::string>();
  const std::string *text = nullptr;
  for (const auto &[n, t] : preset_sources())
    if (n == name)
      text = &t;
  if (!text)
    throw ValidationError("preset", "unknown preset '" + name + "'" + where(doc["preset"]));
  YAML::Node base = parse_yaml(*text, "preset " + name);
  check_keys(base, kRoot, "");
  base = resolve_presets(base, depth + 1);
  YAML::Node over = YAML::Clone(doc);
  over.remove("preset");
  return deep_merge(base, over);
}

template <typename T> T get(const YAML::Node &n, const char *key, T fallback) {
  const YAML::Node v = n[key];
  if (!v || v.IsNull())
    return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::BadConversion &) {
    schema_error(v, std::string("bad value for '") + key + "'");
  }
}

template <typename T> T req(const YAML::Node &n, const char *key) {
  const YAML::Node v = n[key];
  if (!v || v.IsNull())
    schema_error(n, std::string("missing required key '") + key + "'");
  return get<T>(n, key, T{});
}

Interval parse_limits(const YAML::Node &n, const char *key) {
  const YAML::Node v = n[key];
  if (!v || v.IsNull())
    return Interval::unbounded();
  if (!v.IsSequence() || v.size() != 2)
    schema_error(v, std::string("'") + key + "' must be [lo, hi]");
  try {
    return {v[0].as<double>(), v[1].as<double>()};
  } catch (const YAML::BadConversion &) {
    schema_error(v, std::string("bad value for '") + key + "'");
  }
}

struct IdMap {
  std::map<int, int> index;
  int operator()(const YAML::Node &n) const {
    int id = 0;
    try {
      id = n.as<int>();
    } catch (const YAML::BadConversion &) {
      schema_error(n, "agent id must be an integer");
    }
    const auto it = index.find(id);
    if (it == index.end())
      throw ValidationError("topology", "unknown agent id " + std::to_string(id) + where(n));
    return it->second;
  }
  Edge edge(const YAML::Node &n) const {
    if (!n.IsSequence() || n.size() != 2)
      schema_error(n, "edge must be [from, to]");
    return {(*this)(n[0]), (*this)(n[1])};
  }
};

int delay_steps(double ms, double period_ms) {
  return static_cast<int>(std::ceil(ms / period_ms - 1e-9));
}

LinkParams parse_link(const YAML::Node &n, LinkParams p, double period_ms) {
  if (!n)
    return p;
  p.loss_prob = get<double>(n, "loss", p.loss_prob);
  if (n["max_delay_ms"])
    p.max_delay = delay_steps(get<double>(n, "max_delay_ms", 0.0), period_ms);
  if (n["fixed_delay_ms"])
    p.fixed_delay = delay_steps(get<double>(n, "fixed_delay_ms", 0.0), period_ms);
  const std::string mode = get<std::string>(n, "delay", p.delay_mode == DelayMode::Fixed ? "fixed" : "uniform");
  if (mode == "fixed")
    p.delay_mode = DelayMode::Fixed;
  else if (mode == "uniform")
    p.delay_mode = DelayMode::Uniform;
  else
    schema_error(n["delay"], "delay must be 'fixed' or 'uniform'");
  return p;
}

ScenarioConfig build_config(const YAML::Node &doc, const std::string &base_dir) {
  if (!doc.IsMap())
    schema_error(doc, "scenario must be a mapping");
  ScenarioConfig cfg;
  cfg.name = get<std::string>(doc, "name", cfg.name);
  const std::string mode = get<std::string>(doc, "mode", "grid");
  if (mode == "grid")
    cfg.mode = GridMode::GridConnected;
  else if (mode == "islanded")
    cfg.mode = GridMode::Islanded;
  else
    schema_error(doc["mode"], "mode must be 'grid' or 'islanded'");
  cfg.period_ms = get<double>(doc, "period_ms", cfg.period_ms);
  if (!(cfg.period_ms > 0.0))
    throw ValidationError("period", "control period must be positive" + where(doc["period_ms"]));
  cfg.horizon = get<long>(doc, "horizon", cfg.horizon);
  cfg.seed = get<std::uint64_t>(doc, "seed", cfg.seed);

  const YAML::Node agents = doc["agents"];
  if (!agents || !agents.IsSequence() || agents.size() == 0)
    throw ValidationError("agents", "scenario needs a non-empty 'agents' list" + where(doc));
  IdMap ids;
  for (const YAML::Node &a : agents) {
    DGSpec s;
    s.id = req<int>(a, "id");
    if (!ids.index.emplace(s.id, static_cast<int>(cfg.agents.size())).second)
      throw ValidationError("agents", "duplicate agent id " + std::to_string(s.id) + where(a));
    const std::string type = req<std::string>(a, "type");
    if (type == "GFM")
      s.type = DGType::GFM;
    else if (type == "GFL")
      s.type = DGType::GFL;
    else
      schema_error(a["type"], "type must be GFM or GFL");
    s.p_set = req<double>(a, "p");
    s.q_set = req<double>(a, "q");
    s.p_limits = parse_limits(a, "p_limits");
    s.q_limits = parse_limits(a, "q_limits");
    s.pin_gain = get<double>(a, "pin_gain", 0.0);
    cfg.agents.push_back(s);
  }

  cfg.graph.n_agents = static_cast<int>(cfg.agents.size());
  if (const YAML::Node edges = doc["edges"]) {
    if (!edges.IsSequence())
      schema_error(edges, "'edges' must be a list of [from, to]");
    for (const YAML::Node &e : edges)
      cfg.graph.edges.push_back(ids.edge(e));
  }
  if (const YAML::Node pinned = doc["pinned"]) {
    if (!pinned.IsSequence())
      schema_error(pinned, "'pinned' must be a list of agent ids");
    for (const YAML::Node &p : pinned)
      cfg.graph.pinned.push_back(ids(p));
  }
  cfg.graph.pcc_present = get<bool>(doc, "pcc", true);

  const YAML::Node links = doc["links"];
  const LinkParams def = parse_link(links ? links["default"] : YAML::Node(), LinkParams{}, cfg.period_ms);
  for (const Edge &e : cfg.graph.edges)
    cfg.links.push_back({e, def});
  if (links && links["overrides"]) {
    for (const YAML::Node &o : links["overrides"]) {
      if (!o["edge"])
        schema_error(o, "link override needs 'edge'");
      const Edge e = ids.edge(o["edge"]);
      bool found = false;
      for (LinkConfig &lc : cfg.links)
        if (lc.edge == e) {
          lc.params = parse_link(o, lc.params, cfg.period_ms);
          found = true;
        }
      if (!found)
        throw ValidationError("links", "override for a link that is not an edge" + where(o));
    }
  }

  if (const YAML::Node attacks = doc["attacks"]) {
    for (const YAML::Node &a : attacks) {
      AttackSpec as;
      if (!a["link"])
        schema_error(a, "attack needs 'link'");
      as.link = ids.edge(a["link"]);
      as.schedule.start = cfg.steps_for(get<double>(a, "start_s", 0.0));
      as.schedule.stop = a["stop_s"] && !a["stop_s"].IsNull()
                             ? cfg.steps_for(get<double>(a, "stop_s", 0.0))
                             : -1;
      as.schedule.on_steps = get<long>(a, "on_steps", 0);
      as.schedule.off_steps = get<long>(a, "off_steps", 0);
      const std::string kind = get<std::string>(a, "signal", "constant");
      if (kind == "constant")
        as.signal.kind = SignalKind::Constant;
      else if (kind == "ramp")
        as.signal.kind = SignalKind::Ramp;
      else if (kind == "sinusoid")
        as.signal.kind = SignalKind::Sinusoid;
      else if (kind == "stealthy")
        as.signal.kind = SignalKind::StealthyLowFreq;
      else
        schema_error(a["signal"], "signal must be constant, ramp, sinusoid or stealthy");
      as.signal.value = get<double>(a, "value", 0.0);
      as.signal.period = get<double>(a, "period_steps", 1.0);
      as.signal.phase = get<double>(a, "phase", 0.0);
      cfg.attacks.push_back(as);
    }
  }
  cfg.f_bound = get<int>(doc, "f", cfg.f_bound);

  if (const YAML::Node c = doc["control"]) {
    cfg.control.step_c = get<double>(c, "c", cfg.control.step_c);
    cfg.control.boundary_eps = get<double>(c, "boundary_eps", cfg.control.boundary_eps);
    cfg.control.eps_p = get<double>(c, "eps_p", cfg.control.eps_p);
    cfg.control.eps_q = get<double>(c, "eps_q", cfg.control.eps_q);
  }
  cfg.island_reactive_relaxation =
      get<bool>(doc, "island_reactive_relaxation", cfg.island_reactive_relaxation);
  cfg.gfm_slack = get<bool>(doc, "gfm_slack", cfg.gfm_slack);

  if (const YAML::Node at = doc["attention"]) {
    if (const YAML::Node s = at["sigmas"]) {
      if (!s.IsSequence() || s.size() != 3)
        schema_error(s, "'sigmas' must list three scale weights");
      for (std::size_t i = 0; i < 3; ++i)
        cfg.attention.sigmas[i] = s[i].as<double>();
    }
    cfg.attention.window = get<int>(at, "window", cfg.attention.window);
    cfg.attention.gamma = get<double>(at, "gamma", cfg.attention.gamma);
  }

  if (const YAML::Node p = doc["predictor"]) {
    const std::string kind = get<std::string>(p, "kind", "linear_ar");
    if (kind == "hold_last")
      cfg.predictor = HoldLast{};
    else if (kind == "linear_ar")
      cfg.predictor = LinearAR{get<int>(p, "order", 2)};
    else if (kind == "recurrent")
      cfg.predictor = Recurrent{};
    else
      schema_error(p["kind"], "predictor kind must be hold_last, linear_ar or recurrent");
    cfg.history = get<int>(p, "history", cfg.history);
    const std::string model = get<std::string>(p, "model", "");
    if (!model.empty())
      cfg.predictor_model =
          fs::path(model).is_absolute() ? model : (fs::path(base_dir) / model).lexically_normal().string();
    if (kind == "recurrent" && cfg.predictor_model.empty())
      throw ValidationError("predictor_model", "recurrent predictor needs 'model'" + where(p));
  }

  if (const YAML::Node l = doc["load"]) {
    const std::string kind = get<std::string>(l, "kind", "flat");
    if (kind == "flat")
      cfg.load.kind = LoadKind::Flat;
    else if (kind == "piecewise")
      cfg.load.kind = LoadKind::PiecewiseLinear;
    else if (kind == "steps")
      cfg.load.kind = LoadKind::Steps;
    else if (kind == "ramps_noise")
      cfg.load.kind = LoadKind::RampsNoise;
    else
      schema_error(l["kind"], "load kind must be flat, piecewise, steps or ramps_noise");
    if (const YAML::Node pts = l["points"]) {
      for (const YAML::Node &pt : pts) {
        if (!pt.IsSequence() || pt.size() != 3)
          schema_error(pt, "load point must be [t_s, dp, dq]");
        cfg.load.points.push_back({pt[0].as<double>(), pt[1].as<double>(), pt[2].as<double>()});
      }
    }
    cfg.load.noise_p = get<double>(l, "noise_p", 0.0);
    cfg.load.noise_q = get<double>(l, "noise_q", 0.0);
    cfg.load.dp_rate = get<double>(l, "dp_rate", cfg.load.dp_rate);
    cfg.load.dq_rate = get<double>(l, "dq_rate", cfg.load.dq_rate);
  }

  if (const YAML::Node b = doc["base"]) {
    cfg.base.p_load = get<double>(b, "p_load", 0.0);
    cfg.base.q_load = get<double>(b, "q_load", 0.0);
    cfg.base.p_loss = get<double>(b, "p_loss", 0.0);
    cfg.base.q_loss = get<double>(b, "q_loss", 0.0);
  }
  if (const YAML::Node pb = doc["pcc_base"])
    cfg.pcc_base = NormBase{req<double>(pb, "p"), req<double>(pb, "q")};

  if (const YAML::Node t = doc["toggles"]) {
    cfg.toggles.activation = get<bool>(t, "activation", true);
    cfg.toggles.attention = get<bool>(t, "attention", true);
    cfg.toggles.predictor = get<bool>(t, "predictor", true);
  }

  if (const YAML::Node an = doc["analysis"]) {
    cfg.analysis.burn_in_s = get<double>(an, "burn_in_s", 0.0);
    auto window = [&](const char *key, double &lo, double &hi) {
      const YAML::Node w = an[key];
      if (!w)
        return;
      if (!w.IsSequence() || w.size() != 2)
        schema_error(w, std::string("'") + key + "' must be [start_s, end_s]");
      lo = w[0].as<double>();
      hi = w[1].IsNull() ? -1.0 : w[1].as<double>();
    };
    window("band_s", cfg.analysis.band_start_s, cfg.analysis.band_end_s);
    window("event_s", cfg.analysis.event_start_s, cfg.analysis.event_end_s);
    if (an["overshoot_agent"])
      cfg.analysis.overshoot_agent = ids(an["overshoot_agent"]);
  }
  return cfg;
}

std::string num(double v) {
  if (std::isinf(v))
    return v > 0 ? ".inf" : "-.inf";
  if (std::isnan(v))
    return ".nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // Keep floats recognizable as floats in the emitted document.
  if (s.find_first_of(".eEn") == std::string::npos)
    s += ".0";
  return s;
}

} // namespace

ScenarioConfig parse_scenario(const std::string &text, const std::string &base_dir) {
  YAML::Node doc = parse_yaml(text, "scenario");
  if (!doc || doc.IsNull())
    throw ValidationError("schema", "scenario document is empty");
  check_keys(doc, kRoot, "");
  doc = resolve_presets(doc, 0);
  try {
    return build_config(doc, base_dir);
  } catch (const YAML::BadConversion &e) {
    throw ValidationError("schema", "bad value (line " + std::to_string(e.mark.line + 1) +
                                        ", column " + std::to_string(e.mark.column + 1) + ")");
  }
}

ScenarioConfig load_scenario(const std::string &source, std::vector<std::string> *warnings) {
  ScenarioConfig cfg;
  std::error_code ec;
  if (fs::is_regular_file(source, ec)) {
    std::ifstream in(source);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      cfg = parse_scenario(ss.str(), fs::path(source).parent_path().string().empty()
                                         ? "."
                                         : fs::path(source).parent_path().string());
    } catch (const ValidationError &e) {
      throw ValidationError(e.rule(), source + ": " + std::string(e.what()).substr(e.rule().size() + 2));
    }
  } else {
    bool known = false;
    for (const auto &[name, text] : preset_sources())
      known = known || name == source;
    if (!known)
      throw ValidationError("scenario", "no scenario file or preset named '" + source + "'");
    cfg = parse_scenario("preset: " + source + "\n");
  }
  std::vector<std::string> w = validate_scenario(cfg);
  if (warnings)
    warnings->insert(warnings->end(), w.begin(), w.end());
  return cfg;
}

std::string to_yaml(const ScenarioConfig &cfg) {
  std::ostringstream os;
  auto id = [&](int idx) { return std::to_string(cfg.agents[static_cast<std::size_t>(idx)].id); };
  auto edge = [&](const Edge &e) { return "[" + id(e.from) + ", " + id(e.to) + "]"; };
  auto secs = [&](long steps) { return num(static_cast<double>(steps) * cfg.period_ms / 1000.0); };
  auto ms = [&](int steps) { return num(static_cast<double>(steps) * cfg.period_ms); };

  os << "name: \"" << cfg.name << "\"\n";
  os << "mode: " << (cfg.mode == GridMode::GridConnected ? "grid" : "islanded") << "\n";
  os << "period_ms: " << num(cfg.period_ms) << "\n";
  os << "horizon: " << cfg.horizon << "\n";
  os << "seed: " << cfg.seed << "\n";
  os << "agents:\n";
  for (const DGSpec &s : cfg.agents) {
    os << "  - {id: " << s.id << ", type: " << (s.type == DGType::GFM ? "GFM" : "GFL") << ", p: " << num(s.p_set)
       << ", q: " << num(s.q_set) << ", p_limits: [" << num(s.p_limits.lo) << ", "
       << num(s.p_limits.hi) << "], q_limits: [" << num(s.q_limits.lo) << ", "
       << num(s.q_limits.hi) << "], pin_gain: " << num(s.pin_gain) << "}\n";
  }
  os << "edges: [";
  for (std::size_t i = 0; i < cfg.graph.edges.size(); ++i)
    os << (i ? ", " : "") << edge(cfg.graph.edges[i]);
  os << "]\npinned: [";
  for (std::size_t i = 0; i < cfg.graph.pinned.size(); ++i)
    os << (i ? ", " : "") << id(cfg.graph.pinned[i]);
  os << "]\npcc: " << (cfg.graph.pcc_present ? "true" : "false") << "\n";
  os << "links:\n  overrides:\n";
  for (const LinkConfig &lc : cfg.links) {
    const LinkParams &p = lc.params;
    os << "    - {edge: " << edge(lc.edge) << ", loss: " << num(p.loss_prob)
       << ", max_delay_ms: " << ms(p.max_delay)
       << ", delay: " << (p.delay_mode == DelayMode::Fixed ? "fixed" : "uniform")
       << ", fixed_delay_ms: " << ms(p.fixed_delay) << "}\n";
  }
  os << "attacks:" << (cfg.attacks.empty() ? " []\n" : "\n");
  for (const AttackSpec &a : cfg.attacks) {
    static const char *kinds[] = {"constant", "ramp", "sinusoid", "stealthy"};
    os << "  - {link: " << edge(a.link) << ", start_s: " << secs(a.schedule.start)
       << ", stop_s: " << (a.schedule.stop < 0 ? std::string("null") : secs(a.schedule.stop))
       << ", on_steps: " << a.schedule.on_steps << ", off_steps: " << a.schedule.off_steps
       << ", signal: " << kinds[static_cast<int>(a.signal.kind)]
       << ", value: " << num(a.signal.value) << ", period_steps: " << num(a.signal.period)
       << ", phase: " << num(a.signal.phase) << "}\n";
  }
  os << "f: " << cfg.f_bound << "\n";
  os << "control: {c: " << num(cfg.control.step_c)
     << ", boundary_eps: " << num(cfg.control.boundary_eps)
     << ", eps_p: " << num(cfg.control.eps_p) << ", eps_q: " << num(cfg.control.eps_q) << "}\n";
  os << "island_reactive_relaxation: " << (cfg.island_reactive_relaxation ? "true" : "false")
     << "\n";
  os << "gfm_slack: " << (cfg.gfm_slack ? "true" : "false") << "\n";
  os << "attention: {sigmas: [" << num(cfg.attention.sigmas[0]) << ", "
     << num(cfg.attention.sigmas[1]) << ", " << num(cfg.attention.sigmas[2])
     << "], window: " << cfg.attention.window << ", gamma: " << num(cfg.attention.gamma) << "}\n";
  os << "predictor: {kind: ";
  if (std::holds_alternative<HoldLast>(cfg.predictor))
    os << "hold_last";
  else if (const auto *ar = std::get_if<LinearAR>(&cfg.predictor))
    os << "linear_ar, order: " << ar->order;
  else
    os << "recurrent";
  os << ", history: " << cfg.history;
  if (!cfg.predictor_model.empty())
    os << ", model: \"" << cfg.predictor_model << "\"";
  os << "}\n";
  static const char *load_kinds[] = {"flat", "piecewise", "steps", "ramps_noise"};
  os << "load:\n  kind: " << load_kinds[static_cast<int>(cfg.load.kind)] << "\n  points: [";
  for (std::size_t i = 0; i < cfg.load.points.size(); ++i) {
    const LoadPoint &p = cfg.load.points[i];
    os << (i ? ", " : "") << "[" << num(p.t_s) << ", " << num(p.dp) << ", " << num(p.dq) << "]";
  }
  os << "]\n  noise_p: " << num(cfg.load.noise_p) << "\n  noise_q: " << num(cfg.load.noise_q)
     << "\n  dp_rate: " << num(cfg.load.dp_rate) << "\n  dq_rate: " << num(cfg.load.dq_rate)
     << "\n";
  os << "base: {p_load: " << num(cfg.base.p_load) << ", q_load: " << num(cfg.base.q_load)
     << ", p_loss: " << num(cfg.base.p_loss) << ", q_loss: " << num(cfg.base.q_loss) << "}\n";
  if (cfg.pcc_base)
    os << "pcc_base: {p: " << num(cfg.pcc_base->p) << ", q: " << num(cfg.pcc_base->q) << "}\n";
  os << "toggles: {activation: " << (cfg.toggles.activation ? "true" : "false")
     << ", attention: " << (cfg.toggles.attention ? "true" : "false")
     << ", predictor: " << (cfg.toggles.predictor ? "true" : "false") << "}\n";
  const AnalysisSettings &an = cfg.analysis;
  auto end = [](double v) { return v < 0 ? std::string("null") : num(v); };
  os << "analysis: {burn_in_s: " << num(an.burn_in_s) << ", band_s: [" << num(an.band_start_s)
     << ", " << end(an.band_end_s) << "], event_s: [" << num(an.event_start_s) << ", "
     << end(an.event_end_s) << "], overshoot_agent: " << id(an.overshoot_agent) << "}\n";
  return os.str();
}

} // namespace rhpc
