#include "sttneg/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <limits>

#include "sttneg/errors.hpp"
#include "sttneg/tube_io.hpp"

namespace sttneg {

namespace fs = std::filesystem;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json check_json(const PropertyCheck& c) {
  return {{"ok", c.ok}, {"first_violation", num(c.first_violation)}, {"detail", c.detail}};
}

PropertyCheck check_from_json(const json& j) {
  return {j.at("ok").get<bool>(), num_from(j.at("first_violation")),
          j.at("detail").get<std::string>()};
}

json parse_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void require(const std::string& dir, const std::string& name) {
  if (!fs::exists(path_in(dir, name))) {
    throw InvalidArgument("missing artifact " + path_in(dir, name));
  }
}

void put(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

std::string trajectory_file(int id) { return "trajectories/agent_" + std::to_string(id) + ".csv"; }

}  // namespace

json to_json(const ParameterizedTube& p) {
  json freezes = json::array();
  for (const auto& f : p.freezes) {
    freezes.push_back({{"t_lo", f.t_lo},
                       {"t_hi", f.t_hi},
                       {"delta", f.delta},
                       {"blend", f.blend},
                       {"frozen", to_json(f.frozen)},
                       {"tail", to_json(f.tail)}});
  }
  return {{"base", to_json(p.base)}, {"tube", to_json(p.tube)}, {"freezes", std::move(freezes)}};
}

ParameterizedTube parameterized_from_json(const json& j) {
  ParameterizedTube p;
  p.base = tube_from_json(j.at("base"));
  p.tube = tube_from_json(j.at("tube"));
  for (const auto& f : j.at("freezes")) {
    FreezeRecord r;
    r.t_lo = f.at("t_lo").get<double>();
    r.t_hi = f.at("t_hi").get<double>();
    r.delta = f.at("delta").get<double>();
    r.blend = f.at("blend").get<double>();
    r.frozen = rect_from_json(f.at("frozen"));
    r.tail = tube_from_json(f.at("tail"));
    p.freezes.push_back(std::move(r));
  }
  return p;
}

json plan_report_json(const Plan& plan) {
  const Scenario& s = plan.scenario;
  json agents = json::array();
  for (std::size_t i = 0; i < plan.validity.size(); ++i) {
    const auto& v = plan.validity[i];
    agents.push_back({{"id", s.agents[i].id},
                      {"ok", v.ok()},
                      {"revision", plan.post[i].revision()},
                      {"ordered", check_json(v.ordered)},
                      {"arena", check_json(v.arena)},
                      {"start", check_json(v.start)},
                      {"end", check_json(v.end)},
                      {"obstacles", check_json(v.obstacles)}});
  }
  const auto& d = plan.disjointness;
  return {{"ok", plan.ok()},
          {"dt_check", s.dt_check()},
          {"delta", s.delta()},
          {"blend", s.blend()},
          {"iterations", plan.log.iterations()},
          {"updates", plan.log.updates()},
          {"agents", std::move(agents)},
          {"disjointness",
           {{"clean", d.clean},
            {"intersecting_samples", d.intersecting_samples},
            {"agent_i", d.agent_i},
            {"agent_j", d.agent_j},
            {"first_violation", num(d.first_violation)}}},
          {"failures", plan.failures()}};
}

json verdict_json(const RasVerdict& v) {
  return {{"agent", v.agent},
          {"ok", v.ok()},
          {"reach", v.reach},
          {"reach_time", num(v.reach_time)},
          {"avoid", v.avoid},
          {"avoid_violation_time", num(v.avoid_violation_time)},
          {"stay", v.stay},
          {"contained", v.contained},
          {"collision_free", v.collision_free},
          {"min_distance", num(v.min_distance)}};
}

json run_summary_json(const RunResult& run) {
  json per_seed = json::array();
  for (const auto& o : run.seeds) {
    per_seed.push_back({{"seed", o.seed},
                        {"ok", o.ok},
                        {"funnel_violations", o.funnel_violations},
                        {"min_pairwise_distance", num(o.min_pairwise_distance)}});
  }
  const auto& f = run.first;
  return {{"ok", run.ok()},
          {"seeds", run.seeds.size()},
          {"passed", run.passed()},
          {"funnel_violations", run.funnel_violations()},
          {"min_pairwise_distance", num(run.min_pairwise_distance())},
          {"first_seed",
           {{"seed", run.seeds.empty() ? 0 : run.seeds.front().seed},
            {"ok", f.ok()},
            {"collision_free", f.collision_free},
            {"all_contained", f.all_contained},
            {"funnel_violations", f.funnel_violations},
            {"min_pairwise_distance", num(f.min_pairwise_distance)},
            {"closest_pair", {f.closest_i, f.closest_j}},
            {"closest_t", f.closest_t}}},
          {"per_seed", std::move(per_seed)}};
}

void save_plan(const Plan& plan, const std::string& dir) {
  const Scenario& s = plan.scenario;
  json pre = json::array();
  json post = json::array();
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    pre.push_back({{"id", s.agents[i].id}, {"tube", to_json(plan.pre[i])}});
    json p = to_json(plan.post[i]);
    p["id"] = s.agents[i].id;
    post.push_back(std::move(p));
  }
  write_file_atomic(path_in(dir, "scenario.json"), to_json(s).dump(2) + "\n");
  write_file_atomic(path_in(dir, "tubes_pre.json"), json{{"agents", pre}}.dump() + "\n");
  write_file_atomic(path_in(dir, "tubes_post.json"), json{{"agents", post}}.dump() + "\n");
  write_file_atomic(path_in(dir, "negotiation.jsonl"), plan.log.to_jsonl());
  write_file_atomic(path_in(dir, "plan_report.json"), plan_report_json(plan).dump(2) + "\n");
}

Plan load_plan(const std::string& dir) {
  for (const char* f : {"scenario.json", "tubes_pre.json", "tubes_post.json", "negotiation.jsonl",
                        "plan_report.json"}) {
    require(dir, f);
  }
  Plan plan;
  plan.scenario = parse_scenario(parse_file(path_in(dir, "scenario.json")));
  const Scenario& s = plan.scenario;
  const json pre = parse_file(path_in(dir, "tubes_pre.json")).at("agents");
  const json post = parse_file(path_in(dir, "tubes_post.json")).at("agents");
  if (pre.size() != s.agents.size() || post.size() != s.agents.size()) {
    throw ValidationError("tube files do not match the scenario agents");
  }
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    if (pre[i].at("id").get<int>() != s.agents[i].id || post[i].at("id").get<int>() != s.agents[i].id) {
      throw ValidationError("tube files list agents in a different order than the scenario");
    }
    plan.pre.push_back(tube_from_json(pre[i].at("tube")));
    plan.post.push_back(parameterized_from_json(post[i]));
  }
  plan.log = NegotiationLog::from_jsonl(read_file(path_in(dir, "negotiation.jsonl")));
  const json report = parse_file(path_in(dir, "plan_report.json"));
  for (const auto& a : report.at("agents")) {
    ValidityReport v;
    v.ordered = check_from_json(a.at("ordered"));
    v.arena = check_from_json(a.at("arena"));
    v.start = check_from_json(a.at("start"));
    v.end = check_from_json(a.at("end"));
    v.obstacles = check_from_json(a.at("obstacles"));
    plan.validity.push_back(std::move(v));
  }
  const json& d = report.at("disjointness");
  plan.disjointness.clean = d.at("clean").get<bool>();
  plan.disjointness.intersecting_samples = d.at("intersecting_samples").get<std::size_t>();
  plan.disjointness.agent_i = d.at("agent_i").get<int>();
  plan.disjointness.agent_j = d.at("agent_j").get<int>();
  plan.disjointness.first_violation = num_from(d.at("first_violation"));
  return plan;
}

void save_run(const RunResult& run, const std::string& dir) {
  std::string events;
  json verdicts = json::array();
  for (const auto& tr : run.first.trajectories) {
    write_file_atomic(path_in(dir, trajectory_file(tr.agent)), tr.to_csv());
    events += tr.events_jsonl();
  }
  for (const auto& v : run.first.verdicts) verdicts.push_back(verdict_json(v));
  write_file_atomic(path_in(dir, "events.jsonl"), events);
  write_file_atomic(path_in(dir, "verdicts.json"), verdicts.dump(2) + "\n");
  write_file_atomic(path_in(dir, "summary.json"), run_summary_json(run).dump(2) + "\n");
}

bool has_run(const std::string& dir) { return fs::exists(path_in(dir, "summary.json")); }

std::vector<Trajectory> load_trajectories(const std::string& dir, const Scenario& s) {
  std::vector<Trajectory> out;
  for (const auto& a : s.agents) {
    require(dir, trajectory_file(a.id));
    out.push_back(Trajectory::from_csv(read_file(path_in(dir, trajectory_file(a.id))), a.id));
  }
  return out;
}

VerifyReport verify_artifacts(const std::string& dir) {
  VerifyReport rep;
  auto check = [&rep](bool ok, const std::string& what) {
    (ok ? rep.passed : rep.failed).push_back(what);
  };
  const Plan stored = load_plan(dir);
  Plan fresh = stored;
  verify_plan(fresh);
  const Scenario& s = stored.scenario;

  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const std::string who = "agent " + std::to_string(s.agents[i].id);
    check(fresh.validity[i].ok(), who + " tube validity: " + fresh.validity[i].summary());
    check(stored.post[i].base == stored.pre[i], who + " negotiated tube starts from the saved pre tube");
    check(stored.post[i].revision() ==
              static_cast<std::size_t>(std::count_if(
                  stored.log.records.begin(), stored.log.records.end(),
                  [&](const NegotiationRecord& r) {
                    return r.hub == s.agents[i].id && r.action == "parameterized";
                  })),
          who + " freeze records match the negotiation log");
  }
  check(fresh.disjointness.clean,
        "pairwise tube disjointness (" + std::to_string(fresh.disjointness.intersecting_samples) +
            " intersecting samples)");
  const json stored_report = parse_file(path_in(dir, "plan_report.json"));
  check(plan_report_json(fresh).dump() == stored_report.dump(),
        "recomputed plan report matches the stored one");

  if (has_run(dir)) {
    const json summary = parse_file(path_in(dir, "summary.json"));
    const std::uint64_t seed = summary.at("first_seed").at("seed").get<std::uint64_t>();
    const auto members = fleet_members(s, fresh.tubes(), seed);
    const FleetReport fleet =
        assess_fleet(load_trajectories(dir, s), members, s.simulation.min_separation, false);
    json verdicts = json::array();
    for (const auto& v : fleet.verdicts) {
      verdicts.push_back(verdict_json(v));
      check(v.ok(), "agent " + std::to_string(v.agent) + " reach/avoid/stay/containment verdict");
    }
    check(verdicts.dump() == parse_file(path_in(dir, "verdicts.json")).dump(),
          "recomputed verdicts match the stored ones");
    check(fleet.collision_free, "fleet collision free (min distance " +
                                    std::to_string(fleet.min_pairwise_distance) + ")");
    check(summary.at("ok").get<bool>(),
          "all seeds passed (" + std::to_string(summary.at("passed").get<std::size_t>()) + "/" +
              std::to_string(summary.at("seeds").get<std::size_t>()) + ")");
  }
  return rep;
}

std::vector<std::string> export_plot_data(const std::string& dir, std::size_t samples,
                                          const std::string& out_dir) {
  if (samples < 2) throw InvalidArgument("at least two samples are required");
  const Plan plan = load_plan(dir);
  const Scenario& s = plan.scenario;
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    const std::string p = path_in(out_dir, name);
    write_file_atomic(p, text);
    written.push_back(p);
  };

  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const Tube& pre = plan.pre[i];
    const Tube& post = plan.post[i].tube;
    const std::size_t n = post.size();
    std::vector<double> plo(n), phi(n), qlo(n), qhi(n);
    std::vector<std::string> tables(s.agents[i].workspace_mask.size(),
                                    "t,pre_lower,pre_upper,post_lower,post_upper\n");
    const double t0 = post.t_start(), t1 = post.horizon();
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = k + 1 == samples ? t1 : t0 + (t1 - t0) * static_cast<double>(k) /
                                                        static_cast<double>(samples - 1);
      pre.bounds(t, plo, phi);
      post.bounds(t, qlo, qhi);
      for (std::size_t w = 0; w < tables.size(); ++w) {
        const std::size_t d = s.agents[i].workspace_mask[w];
        std::string& out = tables[w];
        put(out, t);
        for (double v : {plo[d], phi[d], qlo[d], qhi[d]}) {
          out += ',';
          put(out, v);
        }
        out += '\n';
      }
    }
    for (std::size_t w = 0; w < tables.size(); ++w) {
      emit("tube_agent_" + std::to_string(s.agents[i].id) + "_dim_" + std::to_string(w + 1) + ".csv",
           tables[w]);
    }
  }

  std::string markers = "iter,hub,t_lo,t_hi,neighbors\n";
  for (const auto& r : plan.log.records) {
    if (!r.interval) continue;
    markers += std::to_string(r.iter) + "," + std::to_string(r.hub) + ",";
    put(markers, r.interval->t_lo);
    markers += ',';
    put(markers, r.interval->t_hi);
    markers += ',';
    for (std::size_t k = 0; k < r.interval->neighbors.size(); ++k) {
      if (k) markers += ';';
      markers += std::to_string(r.interval->neighbors[k]);
    }
    markers += '\n';
  }
  emit("collision_markers.csv", markers);

  if (has_run(dir)) {
    for (const auto& tr : load_trajectories(dir, s)) {
      std::string out = "t";
      for (std::size_t k = 1; k <= tr.n; ++k) out += ",x" + std::to_string(k);
      out += ",contained\n";
      const std::size_t count = std::min(samples, tr.size());
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx =
            count == 1 ? 0 : static_cast<std::size_t>(std::llround(
                                 static_cast<double>(k) * static_cast<double>(tr.size() - 1) /
                                 static_cast<double>(count - 1)));
        put(out, tr.t[idx]);
        for (std::size_t d = 0; d < tr.n; ++d) {
          out += ',';
          put(out, tr.x[idx * tr.n + d]);
        }
        out += tr.contained[idx] ? ",1\n" : ",0\n";
      }
      emit("trajectory_agent_" + std::to_string(tr.agent) + ".csv", out);
    }
  }
  return written;
}

}  // namespace sttneg
