// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "random_scenarios.hpp"
#include "sttneg/artifacts.hpp"
#include "sttneg/control.hpp"
#include "sttneg/dynamics.hpp"
#include "sttneg/errors.hpp"
#include "sttneg/pipeline.hpp"
#include "sttneg/scenario.hpp"

using namespace sttneg;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      if (!pass) detail << "; ";
      pass = false;
      detail << why;
    }
  }
};

int failures = 0;

void report(int n, const Verdict& v, const std::string& summary, double secs) {
  std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << summary;
  if (!v.pass) std::cout << "  [" << v.detail.str() << "]";
  std::cout << "  (" << std::fixed << std::setprecision(2) << secs << " s)" << std::endl;
  std::cout.unsetf(std::ios::fixed);
  if (!v.pass) ++failures;
}

std::string scenario_path(const std::string& name) {
  return std::string(STTNEG_SOURCE_DIR) + "/scenarios/" + name + ".json";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1: controller oracle and shape properties.
void controller_oracle() {
  const auto t0 = Clock::now();
  Verdict v;
  const double e = (1.5 - 1.0) / 1.0;
  const double eps = std::log((1 + e) / (1 - e));
  const double xi = 4.0 / ((1 - e * e) * 2.0);
  const double direct = -1.0 * xi * eps;
  const double u = control_input(1.5, 0.0, 2.0, 1.0);
  v.require(std::abs(u - direct) <= 1e-9, "oracle mismatch");
  v.require(std::abs(u - (-2.929635)) <= 5e-6, "quoted value mismatch");

  double worst_odd = 0.0;
  const double r = 1.7;
  for (int k = 1; k < 1000; ++k) {
    const double a = r * k / 1000.0;
    worst_odd = std::max(worst_odd, std::abs(control_input(a, -r, r, 1.3) + control_input(-a, -r, r, 1.3)));
  }
  v.require(worst_odd <= 1e-12, "odd symmetry off by " + std::to_string(worst_odd));

  bool monotone = true;
  double prev = INFINITY;
  for (int k = 1; k < 1000; ++k) {
    const double x = -2.0 + 5.0 * k / 1000.0;
    const double ui = control_input(x, -2.0, 3.0, 0.8);
    monotone = monotone && ui < prev;
    prev = ui;
  }
  v.require(monotone, "not strictly decreasing");
  const double secs = seconds_since(t0);
  v.require(secs < 1.0, "slower than 1 s");
  std::ostringstream s;
  s << std::setprecision(10) << "u=" << u << " direct=" << direct << ", odd-symmetry max err "
    << std::setprecision(2) << worst_odd << ", monotone on 999 points";
  report(1, v, s.str(), secs);
}

struct Planned {
  std::string name;
  Plan plan;
};

struct Corpus {
  std::vector<Planned> plans;
  std::size_t stalemates = 0;
  std::size_t redraws = 0;
  std::vector<std::string> stalemate_reasons;
  double seconds = 0.0;
};

Corpus build_corpus() {
  const auto t0 = Clock::now();
  Corpus c;
  for (const char* name : {"case_study_1", "case_study_2"}) {
    c.plans.push_back({name, plan_scenario(load_scenario(scenario_path(name)))});
  }
  testing::ScenarioGenerator gen(20240917);
  std::size_t accepted = 0;
  while (accepted < 50) {
    Scenario s = gen.next("random_" + std::to_string(accepted + 1));
    try {
      c.plans.push_back({s.name, plan_scenario(s)});
      ++accepted;
    } catch (const CannotReplan& e) {
      ++c.stalemates;
      c.stalemate_reasons.push_back("cannot replan");
    } catch (const NegotiationDidNotTerminate& e) {
      ++c.stalemates;
      c.stalemate_reasons.push_back("pass limit");
    }
  }
  c.redraws = gen.redraws;
  c.seconds = seconds_since(t0);
  return c;
}

// 2: every tube is a valid reach-avoid tube on a 1e4-point grid.
void tube_validity(const Corpus& c) {
  const auto t0 = Clock::now();
  Verdict v;
  std::size_t tubes = 0;
  for (const auto& p : c.plans) {
    const Scenario& s = p.plan.scenario;
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      const double dt = s.agents[i].t_p / 1e4;
      for (const Tube* t : {&p.plan.pre[i], &p.plan.post[i].tube}) {
        const ValidityReport r = verify_tube(*t, s.state_start(i), s.state_target(i),
                                             s.state_arena(i), s.state_obstacles(i), dt);
        ++tubes;
        v.require(r.ok(), p.name + " agent " + std::to_string(s.agents[i].id) + ": " + r.summary());
      }
    }
  }
  const double secs = seconds_since(t0) + c.seconds;
  v.require(secs < 30.0, "slower than 30 s");
  std::ostringstream s;
  s << tubes << " tubes (pre and post negotiation) over " << c.plans.size()
    << " scenarios, 0 violations required";
  report(2, v, s.str(), secs);
}

// 3: negotiated tubes are pairwise disjoint; negotiation of disjoint tubes is a no-op.
void disjointness(const Corpus& c) {
  const auto t0 = Clock::now();
  Verdict v;
  std::size_t updated = 0;
  for (const auto& p : c.plans) {
    const Scenario& s = p.plan.scenario;
    if (p.plan.log.updates() > 0) ++updated;
    double t_p = 0.0;
    for (const auto& a : s.agents) t_p = std::max(t_p, a.t_p);
    const DisjointnessReport d = verify_disjointness(p.plan.tubes(), s.masks(), t_p / 1e4);
    v.require(d.clean && d.intersecting_samples == 0,
              p.name + ": agents " + std::to_string(d.agent_i) + "/" + std::to_string(d.agent_j) +
                  " intersect at t=" + std::to_string(d.first_violation));

    std::vector<ParameterizedTube> fresh;
    for (const Tube& t : p.plan.tubes()) fresh.emplace_back(t);
    const NegotiationResult again = negotiate(fresh, s.masks(), replan_contexts(s), s.topology(),
                                              negotiation_params(s));
    bool same = again.log.updates() == 0;
    for (std::size_t i = 0; i < fresh.size(); ++i) same = same && again.tubes[i].tube == fresh[i].tube;
    v.require(same, p.name + ": renegotiation changed disjoint tubes");
  }
  const double secs = seconds_since(t0) + c.seconds;
  v.require(secs < 60.0, "slower than 60 s");
  std::ostringstream s;
  s << c.plans.size() << " scenarios disjoint at t_p/1e4 (" << updated
    << " needed negotiation), renegotiation exact no-op; " << c.stalemates
    << " further random layouts stalemated and were replaced";
  if (c.stalemates > 0) {
    std::size_t limit = 0;
    for (const auto& r : c.stalemate_reasons) limit += r == "pass limit";
    s << " (" << c.stalemates - limit << " cannot replan, " << limit << " pass limit)";
  }
  report(3, v, s.str(), secs);
}

// 4: the four-agent walkthrough.
void example_one() {
  const auto t0 = Clock::now();
  Verdict v;
  const Plan plan = plan_scenario(load_scenario(scenario_path("example_1")));
  const auto& recs = plan.log.records;
  v.require(plan.ok(), "plan not valid");
  v.require(recs.size() == 8, "expected two passes of four hubs");
  if (recs.size() == 8) {
    const char* actions[] = {"parameterized", "parameterized", "none", "parameterized"};
    for (std::size_t k = 0; k < 4; ++k) {
      v.require(recs[k].hub == static_cast<int>(k + 1) && recs[k].action == actions[k],
                "pass 1 hub " + std::to_string(k + 1) + " did " + recs[k].action);
    }
    for (std::size_t k = 4; k < 8; ++k) v.require(recs[k].action == "none", "second pass not clean");
    v.require(recs[3].interval && recs[3].interval->neighbors == std::vector<int>{1},
              "agent 4 not in conflict with agent 1");
    bool saw_updated_one = false;
    for (const auto& e : recs[3].examined) saw_updated_one |= e.agent == 1 && e.revision == 1;
    v.require(saw_updated_one, "agent 4 did not examine the updated tube of 1");
  }
  const Scenario& s = plan.scenario;
  v.require(!detect_collision_interval(3, plan.pre, s.masks(), s.dt_check(), {0}),
            "agents 4 and 1 already conflict before negotiation");
  v.require(plan.post[2].tube == plan.pre[2] && plan.post[2].revision() == 0, "agent 3 modified");

  for (std::size_t i : {0u, 1u, 3u}) {
    const ParameterizedTube& p = plan.post[i];
    const std::string who = "agent " + std::to_string(i + 1);
    if (p.freezes.size() != 1) {
      v.require(false, who + " has " + std::to_string(p.freezes.size()) + " freezes");
      continue;
    }
    const FreezeRecord& f = p.freezes[0];
    v.require(f.frozen == p.base.at(f.t_lo - f.delta), who + ": frozen box is not the delta-earlier cross-section");
    bool prefix = true, plateau = true, tail = true;
    for (int k = 0; k <= 1000; ++k) {
      const double a = (f.t_lo - f.blend) * k / 1000.0;
      prefix = prefix && p.tube.at(a) == p.base.at(a);
      const double b = f.t_lo + (f.t_hi - f.t_lo) * k / 1000.0;
      plateau = plateau && p.tube.at(b) == f.frozen;
      const double c = f.t_hi + (p.tube.horizon() - f.t_hi) * k / 1000.0;
      tail = tail && p.tube.at(c) == f.tail.at(c);
    }
    v.require(prefix, who + ": prefix differs from the original tube");
    v.require(plateau, who + ": plateau is not the frozen box");
    v.require(tail, who + ": tail differs from the replanned tube");
  }
  std::ostringstream d;
  d << "hubs 1,2,4 updated, 3 untouched, 4 triggered by revised 1; prefix/frozen/tail branches exact";
  report(4, v, d.str(), seconds_since(t0));
}

// 5: closed-loop containment over 100 disturbance seeds per case study.
void containment() {
  const auto t0 = Clock::now();
  Verdict v;
  std::ostringstream d;
  for (const char* name : {"case_study_1", "case_study_2"}) {
    const auto t1 = Clock::now();
    const Scenario s = load_scenario(scenario_path(name));
    const Plan plan = plan_scenario(s);
    RunOptions ro;
    ro.seed = 1;
    ro.seeds = 100;
    ro.threads = std::max(1u, std::thread::hardware_concurrency());
    const RunResult run = run_simulations(s, plan.tubes(), ro);
    const double per_run = seconds_since(t1) / 100.0;
    std::size_t verdicts_ok = 0, verdicts = 0;
    for (const auto& so : run.seeds) {
      for (const auto& rv : so.verdicts) {
        ++verdicts;
        verdicts_ok += rv.reach && rv.avoid && rv.stay && rv.contained;
      }
    }
    v.require(run.funnel_violations() == 0,
              std::string(name) + ": " + std::to_string(run.funnel_violations()) + " funnel violations");
    v.require(verdicts_ok == verdicts, std::string(name) + ": " + std::to_string(verdicts - verdicts_ok) +
                                           " failed RAS verdicts");
    v.require(run.min_pairwise_distance() > 0.0, std::string(name) + ": agents met");
    v.require(run.passed() == 100, std::string(name) + ": " + std::to_string(run.passed()) + "/100 seeds ok");
    v.require(per_run < 10.0, std::string(name) + ": run slower than 10 s");
    d << name << " " << run.passed() << "/100 seeds, " << run.funnel_violations()
      << " violations, min distance " << std::setprecision(4) << run.min_pairwise_distance()
      << " m, " << std::setprecision(3) << per_run << " s/run; ";
  }
  const double secs = seconds_since(t0);
  v.require(secs < 1800.0, "suite slower than 30 min");
  report(5, v, d.str(), secs);
}

// 6: RK4 order by step halving on a smooth single-integrator loop.
void integration_order() {
  const auto t0 = Clock::now();
  Verdict v;
  // x' = u(x) with the feedback u = -(x - 2) - 0.3 sin(3x) evaluated at every stage.
  const auto model = DynamicsModel::custom_affine(
      1, 1,
      [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, -(x[0] - 2.0) - 0.3 * std::sin(3.0 * x[0]));
      },
      [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); });
  auto terminal = [&](double dt) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, -1.0);
    const auto steps = std::lround(4.0 / dt);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    for (long k = 0; k < steps; ++k) x = step_dynamics(model, x, zero, zero, dt);
    return x[0];
  };
  const double ref = terminal(1e-4);
  double min_order = INFINITY;
  std::ostringstream d;
  d << "orders";
  double prev_err = std::abs(terminal(0.2) - ref);
  for (double dt : {0.1, 0.05, 0.025}) {
    const double err = std::abs(terminal(dt) - ref);
    const double order = std::log2(prev_err / err);
    min_order = std::min(min_order, order);
    d << " " << std::setprecision(3) << order;
    prev_err = err;
  }
  v.require(min_order >= 3.5, "observed order " + std::to_string(min_order));
  report(6, v, d.str(), seconds_since(t0));
}

// 7: identical scenario and seed give byte-identical trajectory exports.
void determinism() {
  const auto t0 = Clock::now();
  Verdict v;
  const fs::path root = fs::temp_directory_path() / ("sttneg_accept_" + std::to_string(std::random_device{}()));
  const Scenario s = load_scenario(scenario_path("case_study_1"));
  std::size_t files = 0;
  for (unsigned threads : {1u, 3u}) {
    const Plan plan = plan_scenario(s);
    RunOptions ro;
    ro.seed = 17;
    ro.threads = threads;
    const fs::path dir = root / std::to_string(threads);
    save_plan(plan, dir.string());
    save_run(run_simulations(s, plan.tubes(), ro), dir.string());
  }
  for (const auto& e : fs::recursive_directory_iterator(root / "1")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root / "1");
    ++files;
    v.require(slurp(e.path()) == slurp(root / "3" / rel), rel.string() + " differs");
  }
  fs::remove_all(root);
  std::ostringstream d;
  d << files << " artifact files byte-identical across two runs (1 and 3 threads)";
  report(7, v, d.str(), seconds_since(t0));
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void()>>> steps = {
      {1, controller_oracle},
      {0, [] {
         const Corpus c = build_corpus();
         tube_validity(c);
         disjointness(c);
       }},
      {4, example_one},
      {5, containment},
      {6, integration_order},
      {7, determinism},
  };
  for (const auto& [n, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::cout << "criterion " << (n == 0 ? "2/3" : std::to_string(n)) << ": FAIL  error: " << e.what()
                << std::endl;
      ++failures;
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
