#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sttneg/artifacts.hpp"
#include "sttneg/errors.hpp"
#include "sttneg/pipeline.hpp"
#include "sttneg/scenario.hpp"

using namespace sttneg;
namespace fs = std::filesystem;

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(STTNEG_SOURCE_DIR) + "/scenarios/" + name + ".json";
}
std::string data_path(const std::string& name) {
  return std::string(STTNEG_SOURCE_DIR) + "/tests/data/" + name + ".json";
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("sttneg_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& s) const { return (path_ / s).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& path) {
  const std::string s = slurp(path);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string error_of(const std::string& path) {
  try {
    load_scenario(path);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LoadScenario, CaseStudyOne) {
  const Scenario s = load_scenario(scenario_path("case_study_1"));
  EXPECT_EQ(s.agents.size(), 3u);
  EXPECT_EQ(s.obstacles.size(), 4u);
  EXPECT_EQ(s.arena, (HyperRect{{0, 10}, {0, 10}}));
  for (const auto& a : s.agents) {
    EXPECT_EQ(a.t_p, 200.0);
    EXPECT_EQ(a.dynamics, DynamicsKind::OmniRobot);
    EXPECT_EQ(a.state_dim, 3u);
  }
  EXPECT_EQ(s.obstacles[0].name, "O1");
  EXPECT_EQ(s.sim_dt(), 1e-3);
}

TEST(LoadScenario, CaseStudyTwo) {
  const Scenario s = load_scenario(scenario_path("case_study_2"));
  EXPECT_EQ(s.agents.size(), 6u);
  EXPECT_EQ(s.arena, (HyperRect{{0, 5}, {0, 5}, {0, 5}}));
  for (const auto& a : s.agents) EXPECT_EQ(a.dynamics, DynamicsKind::SingleIntegrator);
}

TEST(LoadScenario, OverlappingTargetsAreNamed) {
  const std::string msg = error_of(data_path("overlapping_targets"));
  EXPECT_NE(msg.find("T1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("T2"), std::string::npos) << msg;
  EXPECT_THROW(load_scenario(data_path("overlapping_targets")), ValidationError);
}

TEST(LoadScenario, StartInsideObstacleIsNamed) {
  const std::string msg = error_of(data_path("start_in_obstacle"));
  EXPECT_NE(msg.find("S1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("O1"), std::string::npos) << msg;
}

TEST(LoadScenario, EmptyAgentListFails) {
  EXPECT_THROW(load_scenario(data_path("no_agents")), ValidationError);
}

TEST(LoadScenario, MalformedInputIsParseError) {
  EXPECT_THROW(load_scenario(data_path("does_not_exist")), Error);
  EXPECT_THROW(parse_scenario(nlohmann::json::parse(R"({"schema_version": 1})")), ParseError);
  EXPECT_THROW(parse_scenario(nlohmann::json::parse(
                   R"({"schema_version": 2, "units": {"length": "m", "time": "s"}})")),
               ParseError);
  EXPECT_THROW(parse_scenario(nlohmann::json::parse(
                   R"({"schema_version": 1, "units": {"length": "ft", "time": "s"}, "arena": [[0,1]], "agents": []})")),
               ParseError);
}

TEST(LoadScenario, JsonRoundTrip) {
  for (const char* name : {"case_study_1", "case_study_2", "example_1"}) {
    const Scenario s = load_scenario(scenario_path(name));
    const nlohmann::json doc = to_json(s);
    EXPECT_EQ(to_json(parse_scenario(doc)), doc) << name;
  }
}

TEST(Plan, ConflictFreeTubesAreUntouched) {
  const Plan plan = plan_scenario(load_scenario(data_path("conflict_free")));
  ASSERT_TRUE(plan.ok());
  EXPECT_EQ(plan.log.updates(), 0u);
  for (std::size_t i = 0; i < plan.pre.size(); ++i) {
    EXPECT_EQ(plan.post[i].tube, plan.pre[i]);
    EXPECT_EQ(plan.post[i].revision(), 0u);
  }
}

TEST(Plan, CaseStudiesAreValidAndDisjoint) {
  for (const char* name : {"case_study_1", "case_study_2"}) {
    const Plan plan = plan_scenario(load_scenario(scenario_path(name)));
    EXPECT_TRUE(plan.ok()) << name;
    EXPECT_TRUE(plan.disjointness.clean) << name;
    EXPECT_EQ(plan.disjointness.intersecting_samples, 0u) << name;
  }
}

TEST(Plan, ExampleOneNegotiationStructure) {
  const Plan plan = plan_scenario(load_scenario(scenario_path("example_1")));
  ASSERT_TRUE(plan.ok());
  const auto& recs = plan.log.records;
  ASSERT_EQ(recs.size(), 8u);
  const std::vector<std::string> first = {"parameterized", "parameterized", "none", "parameterized"};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(recs[k].iter, 1u);
    EXPECT_EQ(recs[k].hub, static_cast<int>(k + 1));
    EXPECT_EQ(recs[k].action, first[k]);
  }
  for (std::size_t k = 4; k < 8; ++k) EXPECT_EQ(recs[k].action, "none");
  EXPECT_EQ(recs[0].interval->neighbors, std::vector<int>{3});
  EXPECT_EQ(recs[1].interval->neighbors, std::vector<int>{4});
  EXPECT_EQ(recs[3].interval->neighbors, std::vector<int>{1});

  // Agent 4's conflict exists only against the already updated tube of 1.
  const auto& ex = recs[3].examined;
  const auto one = std::find_if(ex.begin(), ex.end(), [](const auto& e) { return e.agent == 1; });
  ASSERT_NE(one, ex.end());
  EXPECT_EQ(one->revision, 1u);
  const Scenario& s = plan.scenario;
  EXPECT_FALSE(detect_collision_interval(3, plan.pre, s.masks(), s.dt_check(), {0}).has_value());
  std::vector<Tube> mixed = plan.pre;
  mixed[0] = plan.post[0].tube;
  EXPECT_TRUE(detect_collision_interval(3, mixed, s.masks(), s.dt_check(), {0}).has_value());

  EXPECT_EQ(plan.post[0].revision(), 1u);
  EXPECT_EQ(plan.post[1].revision(), 1u);
  EXPECT_EQ(plan.post[2].revision(), 0u);
  EXPECT_EQ(plan.post[3].revision(), 1u);
  EXPECT_EQ(plan.post[2].tube, plan.pre[2]);
}

TEST(Plan, ExampleOneTubesHaveThreeBranches) {
  const Plan plan = plan_scenario(load_scenario(scenario_path("example_1")));
  for (std::size_t i : {0u, 1u, 3u}) {
    const ParameterizedTube& p = plan.post[i];
    ASSERT_EQ(p.freezes.size(), 1u);
    const FreezeRecord& f = p.freezes[0];
    EXPECT_EQ(p.base, plan.pre[i]);
    EXPECT_EQ(f.frozen, p.base.at(f.t_lo - f.delta));
    const double fade_start = f.t_lo - f.blend;
    for (int k = 0; k <= 400; ++k) {
      const double t = fade_start * k / 400.0;
      ASSERT_EQ(p.tube.at(t), p.base.at(t)) << "agent " << i + 1 << " t=" << t;
    }
    for (int k = 0; k <= 400; ++k) {
      const double t = f.t_lo + (f.t_hi - f.t_lo) * k / 400.0;
      ASSERT_EQ(p.tube.at(t), f.frozen) << "agent " << i + 1 << " t=" << t;
    }
    EXPECT_EQ(f.tail.t_start(), f.t_hi);
    for (int k = 0; k <= 400; ++k) {
      const double t = f.t_hi + (p.tube.horizon() - f.t_hi) * k / 400.0;
      ASSERT_EQ(p.tube.at(t), f.tail.at(t)) << "agent " << i + 1 << " t=" << t;
    }
    EXPECT_TRUE(contains(plan.scenario.state_target(i), p.tube.at(p.tube.horizon())));
  }
}

TEST(Plan, DeterministicAcrossRuns) {
  const Scenario s = load_scenario(scenario_path("case_study_2"));
  TempDir a, b;
  save_plan(plan_scenario(s), a.str());
  save_plan(plan_scenario(s), b.str());
  for (const char* f : {"scenario.json", "tubes_pre.json", "tubes_post.json", "negotiation.jsonl",
                        "plan_report.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Plan, OverridesReachNegotiation) {
  Scenario s = load_scenario(scenario_path("example_1"));
  s.negotiation.max_iter = 1;
  EXPECT_THROW(plan_scenario(s), NegotiationDidNotTerminate);
}

TEST(Artifacts, SaveLoadReproducesVerificationBitExactly) {
  const Scenario s = load_scenario(scenario_path("example_1"));
  const Plan plan = plan_scenario(s);
  TempDir dir;
  save_plan(plan, dir.str());
  Plan loaded = load_plan(dir.str());
  ASSERT_EQ(loaded.post.size(), plan.post.size());
  for (std::size_t i = 0; i < plan.post.size(); ++i) {
    EXPECT_EQ(loaded.pre[i], plan.pre[i]);
    EXPECT_EQ(loaded.post[i].tube, plan.post[i].tube);
    EXPECT_EQ(loaded.post[i].freezes.size(), plan.post[i].freezes.size());
  }
  EXPECT_EQ(plan_report_json(loaded).dump(), plan_report_json(plan).dump());
  verify_plan(loaded);
  EXPECT_EQ(plan_report_json(loaded).dump(), plan_report_json(plan).dump());
  EXPECT_EQ(loaded.log.to_jsonl(), plan.log.to_jsonl());

  const VerifyReport v = verify_artifacts(dir.str());
  EXPECT_TRUE(v.ok()) << (v.failed.empty() ? "" : v.failed.front());
}

TEST(Artifacts, TamperedTubeFailsVerification) {
  const Plan plan = plan_scenario(load_scenario(data_path("conflict_free")));
  TempDir dir;
  save_plan(plan, dir.str());
  std::string text = slurp(dir / "negotiation.jsonl");
  // Claim an update that the tubes do not carry.
  const auto pos = text.find("\"none\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 6, "\"parameterized\"");
  std::ofstream(dir / "negotiation.jsonl", std::ios::binary) << text;
  EXPECT_FALSE(verify_artifacts(dir.str()).ok());
}

TEST(Artifacts, MissingDirectoryIsAnError) {
  EXPECT_THROW(load_plan("/nonexistent/sttneg"), Error);
  EXPECT_THROW(verify_artifacts("/nonexistent/sttneg"), Error);
}

TEST(Artifacts, RunRoundTripAndVerdicts) {
  const Scenario s = load_scenario(data_path("conflict_free"));
  const Plan plan = plan_scenario(s);
  RunOptions ro;
  ro.seeds = 2;
  ro.dt = 2e-3;
  const RunResult run = run_simulations(s, plan.tubes(), ro);
  ASSERT_TRUE(run.ok());
  EXPECT_EQ(run.passed(), 2u);
  EXPECT_EQ(run.funnel_violations(), 0u);
  TempDir dir;
  save_plan(plan, dir.str());
  save_run(run, dir.str());
  ASSERT_TRUE(has_run(dir.str()));
  const auto trajs = load_trajectories(dir.str(), s);
  ASSERT_EQ(trajs.size(), 2u);
  EXPECT_EQ(trajs[0].x, run.first.trajectories[0].x);
  EXPECT_EQ(trajs[1].u, run.first.trajectories[1].u);
  const VerifyReport v = verify_artifacts(dir.str());
  EXPECT_TRUE(v.ok()) << (v.failed.empty() ? "" : v.failed.front());
}

TEST(Run, DetunedGainsFailContainment) {
  const Scenario s = load_scenario(data_path("detuned"));
  const Plan plan = plan_scenario(s);
  ASSERT_TRUE(plan.ok());
  const RunResult run = run_simulations(s, plan.tubes(), {});
  EXPECT_FALSE(run.ok());
  EXPECT_GT(run.funnel_violations(), 0u);
  EXPECT_FALSE(run.first.all_contained);
}

TEST(Run, SeedsAreDistinctButReproducible) {
  const Scenario s = load_scenario(data_path("conflict_free"));
  const Plan plan = plan_scenario(s);
  RunOptions ro;
  ro.dt = 5e-3;
  ro.seed = 7;
  const RunResult a = run_simulations(s, plan.tubes(), ro);
  const RunResult b = run_simulations(s, plan.tubes(), ro);
  ro.seed = 8;
  const RunResult c = run_simulations(s, plan.tubes(), ro);
  EXPECT_EQ(a.first.trajectories[0].x, b.first.trajectories[0].x);
  EXPECT_NE(a.first.trajectories[0].x, c.first.trajectories[0].x);
}

TEST(Export, CaseStudyOneTables) {
  const Plan plan = plan_scenario(load_scenario(scenario_path("case_study_1")));
  TempDir dir;
  save_plan(plan, dir.str());
  const auto files = export_plot_data(dir.str(), 1000, dir / "plot");
  std::size_t tables = 0;
  for (const auto& f : files) {
    if (fs::path(f).filename().string().rfind("tube_agent_", 0) != 0) continue;
    ++tables;
    EXPECT_EQ(line_count(f), 1001u) << f;
  }
  EXPECT_EQ(tables, 6u);
  EXPECT_TRUE(fs::exists(dir / "plot/tube_agent_3_dim_2.csv"));
  EXPECT_TRUE(fs::exists(dir / "plot/collision_markers.csv"));
}

TEST(Export, TwoSamplesAreTheEndpoints) {
  const Plan plan = plan_scenario(load_scenario(data_path("conflict_free")));
  TempDir dir;
  save_plan(plan, dir.str());
  export_plot_data(dir.str(), 2, dir / "plot");
  std::istringstream in(slurp(dir / "plot/tube_agent_1_dim_1.csv"));
  std::string header, first, last, extra;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, last);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(first.substr(0, 2), "0,");
  EXPECT_EQ(last.substr(0, 3), "20,");
  EXPECT_THROW(export_plot_data(dir.str(), 1, dir / "plot"), InvalidArgument);
}

TEST(Export, CaseStudyTwoHasSixByThreeTables) {
  const Plan plan = plan_scenario(load_scenario(scenario_path("case_study_2")));
  TempDir dir;
  save_plan(plan, dir.str());
  const auto files = export_plot_data(dir.str(), 50, dir / "plot");
  const auto tables = std::count_if(files.begin(), files.end(), [](const std::string& f) {
    return fs::path(f).filename().string().rfind("tube_agent_", 0) == 0;
  });
  EXPECT_EQ(tables, 18);
  EXPECT_TRUE(fs::exists(dir / "plot/tube_agent_6_dim_3.csv"));
  EXPECT_GT(line_count(dir / "plot/collision_markers.csv"), 1u);
}
