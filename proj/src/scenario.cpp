#include "sttneg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sttneg/errors.hpp"
#include "sttneg/tube_io.hpp"

namespace sttneg {

namespace {

std::vector<double> scalar_or_list(const json& j, std::size_t n, const std::string& what) {
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  if (!j.is_array()) throw ParseError(what + " must be a number or a list");
  auto v = j.get<std::vector<double>>();
  if (v.size() != n) {
    throw ParseError(what + " needs " + std::to_string(n) + " entries, got " +
                     std::to_string(v.size()));
  }
  return v;
}

std::vector<NamedBox> boxes_from_json(const json& j, const std::string& prefix) {
  std::vector<NamedBox> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& o = j[k];
    NamedBox nb;
    if (o.is_object()) {
      nb.name = o.value("name", prefix + std::to_string(k + 1));
      nb.box = rect_from_json(o.at("box"));
    } else {
      nb.name = prefix + std::to_string(k + 1);
      nb.box = rect_from_json(o);
    }
    out.push_back(std::move(nb));
  }
  return out;
}

json boxes_to_json(const std::vector<NamedBox>& boxes) {
  json a = json::array();
  for (const auto& b : boxes) a.push_back({{"name", b.name}, {"box", to_json(b.box)}});
  return a;
}

HyperRect lift(const AgentSpec& a, const HyperRect& ws) {
  std::vector<Interval> dims(a.state_dim);
  std::vector<bool> set(a.state_dim, false);
  for (std::size_t w = 0; w < a.workspace_mask.size(); ++w) {
    dims[a.workspace_mask[w]] = ws[w];
    set[a.workspace_mask[w]] = true;
  }
  for (const auto& [d, iv] : a.aux_ranges) {
    dims[d] = iv;
    set[d] = true;
  }
  for (std::size_t d = 0; d < a.state_dim; ++d) {
    if (!set[d]) {
      throw ValidationError("agent " + std::to_string(a.id) + ": state dimension " +
                            std::to_string(d) + " is neither in the workspace mask nor given a range");
    }
  }
  return HyperRect(std::move(dims));
}

AgentSpec agent_from_json(const json& j, std::size_t arena_dims) {
  AgentSpec a;
  a.id = j.at("id").get<int>();
  a.dynamics = dynamics_kind_from_string(j.value("dynamics", std::string("single_integrator")));
  if (a.dynamics == DynamicsKind::OmniRobot) {
    a.state_dim = 3;
    a.workspace_mask = {0, 1};
    a.aux_ranges = {{2, Interval{-M_PI, M_PI}}};
  } else {
    a.state_dim = arena_dims;
    for (std::size_t k = 0; k < arena_dims; ++k) a.workspace_mask.push_back(k);
  }
  if (j.contains("state_dim")) a.state_dim = j.at("state_dim").get<std::size_t>();
  if (j.contains("workspace_mask")) a.workspace_mask = j.at("workspace_mask").get<Mask>();
  if (j.contains("aux_ranges")) {
    a.aux_ranges.clear();
    for (const auto& r : j.at("aux_ranges")) {
      const auto range = r.at("range").get<std::vector<double>>();
      if (range.size() != 2) throw ParseError("aux range must be [lo, hi]");
      a.aux_ranges.push_back({r.at("dim").get<std::size_t>(), Interval{range[0], range[1]}});
    }
  }
  a.start = rect_from_json(j.at("start"));
  a.target = rect_from_json(j.at("target"));
  a.t_p = j.at("t_p").get<double>();
  a.gains = j.contains("gains") ? scalar_or_list(j.at("gains"), a.state_dim, "gains")
                                : std::vector<double>(a.state_dim, 1.0);
  if (j.contains("d_max") && !j.at("d_max").is_null()) {
    a.d_max = scalar_or_list(j.at("d_max"), a.state_dim, "d_max");
  }
  if (j.contains("x0") && !j.at("x0").is_null()) {
    a.x0 = scalar_or_list(j.at("x0"), a.state_dim, "x0");
  }
  a.channel = j.value("channel", std::string("identity"));
  if (a.channel != "identity" && a.channel != "inverse_input") {
    throw ParseError("channel must be 'identity' or 'inverse_input'");
  }
  if (j.contains("obstacles")) {
    a.obstacles = boxes_from_json(j.at("obstacles"), "A" + std::to_string(a.id) + "-O");
  }
  return a;
}

template <class T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  try {
    Scenario s;
    s.schema_version = doc.at("schema_version").get<int>();
    if (s.schema_version != kScenarioSchemaVersion) {
      throw ParseError("unsupported scenario schema_version " + std::to_string(s.schema_version));
    }
    const auto& units = doc.at("units");
    if (units.at("length").get<std::string>() != "m" || units.at("time").get<std::string>() != "s") {
      throw ParseError("scenario units must be {\"length\": \"m\", \"time\": \"s\"}");
    }
    if (units.contains("angle") && units.at("angle").get<std::string>() != "rad") {
      throw ParseError("angles must be given in rad");
    }
    s.name = doc.value("name", std::string("scenario"));
    s.description = doc.value("description", std::string());
    s.arena = rect_from_json(doc.at("arena"));
    if (doc.contains("obstacles")) s.obstacles = boxes_from_json(doc.at("obstacles"), "O");
    for (const auto& a : doc.at("agents")) s.agents.push_back(agent_from_json(a, s.arena.size()));

    if (doc.contains("negotiation")) {
      const auto& n = doc.at("negotiation");
      s.negotiation.dt_check = opt<double>(n, "dt_check");
      s.negotiation.delta = opt<double>(n, "delta");
      s.negotiation.blend = opt<double>(n, "blend");
      s.negotiation.max_iter = opt<std::size_t>(n, "max_iter").value_or(0);
      s.negotiation.clear_freeze = opt<bool>(n, "clear_freeze").value_or(true);
      s.negotiation.token_order = opt<std::vector<int>>(n, "token_order").value_or(std::vector<int>{});
      if (n.contains("edges") && !n.at("edges").is_null()) {
        for (const auto& e : n.at("edges")) {
          s.negotiation.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        }
      }
    }
    if (doc.contains("simulation")) {
      const auto& m = doc.at("simulation");
      s.simulation.dt = opt<double>(m, "dt");
      s.simulation.seeds = opt<std::size_t>(m, "seeds").value_or(1);
      s.simulation.seed = opt<std::uint64_t>(m, "seed").value_or(1);
      s.simulation.stay_fraction = opt<double>(m, "stay_fraction").value_or(0.05);
      s.simulation.d_max_fraction = opt<double>(m, "d_max_fraction").value_or(0.05);
      s.simulation.process =
          disturbance_process_from_string(m.value("disturbance", std::string("uniform")));
      s.simulation.min_separation = opt<double>(m, "min_separation").value_or(0.0);
    }
    if (doc.contains("tubes")) {
      const auto& t = doc.at("tubes");
      s.tubes.clearance = opt<double>(t, "clearance").value_or(-1.0);
      s.tubes.padding = opt<double>(t, "padding").value_or(0.1);
      s.tubes.width.start_inset = opt<double>(t, "start_inset").value_or(0.0);
      s.tubes.width.end_inset = opt<double>(t, "end_inset").value_or(0.0);
    }
    validate_scenario(s);
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const Scenario& s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["name"] = s.name;
  doc["description"] = s.description;
  doc["units"] = {{"length", "m"}, {"time", "s"}, {"angle", "rad"}};
  doc["arena"] = to_json(s.arena);
  doc["obstacles"] = boxes_to_json(s.obstacles);
  json agents = json::array();
  for (const auto& a : s.agents) {
    json j;
    j["id"] = a.id;
    j["dynamics"] = to_string(a.dynamics);
    j["state_dim"] = a.state_dim;
    j["workspace_mask"] = a.workspace_mask;
    json aux = json::array();
    for (const auto& [d, iv] : a.aux_ranges) aux.push_back({{"dim", d}, {"range", {iv.lo, iv.hi}}});
    j["aux_ranges"] = std::move(aux);
    j["start"] = to_json(a.start);
    j["target"] = to_json(a.target);
    j["t_p"] = a.t_p;
    j["gains"] = a.gains;
    j["d_max"] = a.d_max ? json(*a.d_max) : json(nullptr);
    j["x0"] = a.x0 ? json(*a.x0) : json(nullptr);
    j["channel"] = a.channel;
    j["obstacles"] = boxes_to_json(a.obstacles);
    agents.push_back(std::move(j));
  }
  doc["agents"] = std::move(agents);
  auto or_null = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json edges = json::array();
  for (const auto& [a, b] : s.negotiation.edges) edges.push_back({a, b});
  doc["negotiation"] = {{"dt_check", or_null(s.negotiation.dt_check)},
                        {"delta", or_null(s.negotiation.delta)},
                        {"blend", or_null(s.negotiation.blend)},
                        {"max_iter", s.negotiation.max_iter},
                        {"clear_freeze", s.negotiation.clear_freeze},
                        {"token_order", s.negotiation.token_order},
                        {"edges", std::move(edges)}};
  doc["simulation"] = {{"dt", or_null(s.simulation.dt)},
                       {"seeds", s.simulation.seeds},
                       {"seed", s.simulation.seed},
                       {"stay_fraction", s.simulation.stay_fraction},
                       {"d_max_fraction", s.simulation.d_max_fraction},
                       {"disturbance", to_string(s.simulation.process)},
                       {"min_separation", s.simulation.min_separation}};
  doc["tubes"] = {{"clearance", s.tubes.clearance},
                  {"padding", s.tubes.padding},
                  {"start_inset", s.tubes.width.start_inset},
                  {"end_inset", s.tubes.width.end_inset}};
  return doc;
}

std::size_t Scenario::index_of(int id) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].id == id) return i;
  }
  throw InvalidArgument("unknown agent id " + std::to_string(id));
}

HyperRect Scenario::state_arena(std::size_t i) const { return lift(agents[i], arena); }
HyperRect Scenario::state_start(std::size_t i) const { return lift(agents[i], agents[i].start); }
HyperRect Scenario::state_target(std::size_t i) const { return lift(agents[i], agents[i].target); }

ObstacleSet Scenario::state_obstacles(std::size_t i) const {
  ObstacleSet set;
  set.agent = agents[i].id;
  const HyperRect full = state_arena(i);
  auto add = [&](const NamedBox& nb) {
    HyperRect lifted = full;
    for (std::size_t w = 0; w < agents[i].workspace_mask.size(); ++w) {
      lifted[agents[i].workspace_mask[w]] = nb.box[w];
    }
    set.obstacles.push_back(std::move(lifted));
    set.names.push_back(nb.name);
  };
  for (const auto& o : obstacles) add(o);
  for (const auto& o : agents[i].obstacles) add(o);
  return set;
}

double Scenario::dt_check() const {
  if (negotiation.dt_check) return *negotiation.dt_check;
  double tp = agents.front().t_p;
  for (const auto& a : agents) tp = std::min(tp, a.t_p);
  return tp / 1e4;
}

double Scenario::delta() const { return negotiation.delta.value_or(2.0 * dt_check()); }
double Scenario::blend() const { return negotiation.blend.value_or(4.0 * dt_check()); }

double Scenario::sim_dt() const {
  if (simulation.dt) return *simulation.dt;
  double tp = 0.0;
  for (const auto& a : agents) tp = std::max(tp, a.t_p);
  return 1e-3 * tp / 200.0;
}

double Scenario::stay_window(std::size_t i) const {
  return simulation.stay_fraction * agents[i].t_p;
}

Topology Scenario::topology() const {
  Topology t;
  for (const auto& a : agents) t.ids.push_back(a.id);
  for (int id : negotiation.token_order) t.token_order.push_back(index_of(id));
  for (const auto& [a, b] : negotiation.edges) t.edges.push_back({index_of(a), index_of(b)});
  return t;
}

std::vector<Mask> Scenario::masks() const {
  std::vector<Mask> m;
  for (const auto& a : agents) m.push_back(a.workspace_mask);
  return m;
}

void validate_scenario(const Scenario& s) {
  if (s.agents.empty()) throw ValidationError("scenario has no agents");
  std::set<int> ids;
  for (const auto& a : s.agents) {
    const std::string who = "agent " + std::to_string(a.id);
    if (!ids.insert(a.id).second) throw ValidationError("duplicate agent id " + std::to_string(a.id));
    if (!(a.t_p > 0.0)) throw ValidationError(who + ": prescribed time must be positive");
    if (a.workspace_mask.size() != s.arena.size()) {
      throw ValidationError(who + ": workspace mask length differs from the arena dimension");
    }
    for (std::size_t w = 0; w < a.workspace_mask.size(); ++w) {
      if (a.workspace_mask[w] >= a.state_dim || (w && a.workspace_mask[w] <= a.workspace_mask[w - 1])) {
        throw ValidationError(who + ": workspace mask must be increasing state indices");
      }
    }
    if (a.start.size() != s.arena.size() || a.target.size() != s.arena.size()) {
      throw ValidationError(who + ": start/target must have the arena dimension");
    }
    if (a.gains.size() != a.state_dim) throw ValidationError(who + ": one gain per state dimension");
    for (double k : a.gains) {
      if (!(k > 0.0)) throw ValidationError(who + ": gains must be positive");
    }
    if (a.d_max) {
      for (double d : *a.d_max) {
        if (!(d >= 0.0)) throw ValidationError(who + ": d_max must be non-negative");
      }
    }
    if (a.dynamics == DynamicsKind::OmniRobot && a.state_dim != 3) {
      throw ValidationError(who + ": omni robot has three states");
    }
    if (a.dynamics == DynamicsKind::CustomAffine) {
      throw ValidationError(who + ": custom dynamics cannot be declared in a scenario file");
    }
    for (const auto& [d, iv] : a.aux_ranges) {
      if (d >= a.state_dim || !(iv.lo < iv.hi)) throw ValidationError(who + ": bad aux range");
    }
    const std::string S = "S" + std::to_string(a.id), T = "T" + std::to_string(a.id);
    if (!contains(s.arena, a.start)) throw ValidationError("start set " + S + " leaves the arena");
    if (!contains(s.arena, a.target)) throw ValidationError("target set " + T + " leaves the arena");
    auto check_obstacle = [&](const NamedBox& o) {
      if (o.box.size() != s.arena.size()) throw ValidationError("obstacle " + o.name + " has wrong dimension");
      if (intersects(a.start, o.box)) {
        throw ValidationError("start set " + S + " intersects obstacle " + o.name);
      }
      if (intersects(a.target, o.box)) {
        throw ValidationError("target set " + T + " intersects obstacle " + o.name);
      }
    };
    for (const auto& o : s.obstacles) check_obstacle(o);
    for (const auto& o : a.obstacles) check_obstacle(o);
    if (a.x0) {
      const HyperRect full_start = lift(a, a.start);
      for (std::size_t k = 0; k < a.state_dim; ++k) {
        const double v = (*a.x0)[k];
        if (!(full_start[k].lo < v && v < full_start[k].hi)) {
          throw ValidationError(who + ": x0 must lie strictly inside " + S);
        }
      }
    }
    (void)lift(a, s.arena);
  }
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    for (std::size_t j = i + 1; j < s.agents.size(); ++j) {
      const auto& a = s.agents[i];
      const auto& b = s.agents[j];
      if (intersects(a.start, b.start)) {
        throw ValidationError("start sets S" + std::to_string(a.id) + " and S" +
                              std::to_string(b.id) + " overlap; starts must be pairwise disjoint");
      }
      if (intersects(a.target, b.target)) {
        throw ValidationError("target sets T" + std::to_string(a.id) + " and T" +
                              std::to_string(b.id) + " overlap; targets must be pairwise disjoint");
      }
    }
  }
  if (!s.negotiation.token_order.empty()) {
    std::vector<int> order = s.negotiation.token_order;
    std::sort(order.begin(), order.end());
    if (std::vector<int>(ids.begin(), ids.end()) != order) {
      throw ValidationError("token order must list every agent id exactly once");
    }
  }
  for (const auto& [a, b] : s.negotiation.edges) {
    if (!ids.count(a) || !ids.count(b)) throw ValidationError("edge references an unknown agent");
  }
  if (s.negotiation.dt_check && !(*s.negotiation.dt_check > 0.0)) {
    throw ValidationError("dt_check must be positive");
  }
  if (s.simulation.dt && !(*s.simulation.dt > 0.0)) throw ValidationError("dt must be positive");
}

}  // namespace sttneg
