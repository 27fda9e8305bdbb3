#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sttneg/artifacts.hpp"
#include "sttneg/errors.hpp"
#include "sttneg/pipeline.hpp"
#include "sttneg/scenario.hpp"

namespace {

using namespace sttneg;

enum Exit { kOk = 0, kCheckFailed = 1, kBadInput = 2, kPlanningFailed = 3 };

struct Overrides {
  std::optional<double> dt_check;
  std::optional<double> delta;
  std::optional<double> blend;
  std::optional<std::size_t> max_iter;

  void add_to(CLI::App* app) {
    app->add_option("--dt-check", dt_check, "grid step for tube checks [s]")->check(CLI::PositiveNumber);
    app->add_option("--delta", delta, "freeze offset before a collision [s]")->check(CLI::PositiveNumber);
    app->add_option("--blend", blend, "entry fade width [s]")->check(CLI::NonNegativeNumber);
    app->add_option("--max-iter", max_iter, "negotiation pass limit")->check(CLI::PositiveNumber);
  }

  void apply(Scenario& s) const {
    if (dt_check) s.negotiation.dt_check = dt_check;
    if (delta) s.negotiation.delta = delta;
    if (blend) s.negotiation.blend = blend;
    if (max_iter) s.negotiation.max_iter = *max_iter;
  }
};

std::string default_out(const Scenario& s) {
  const char* env = std::getenv("STTNEG_OUTPUT_DIR");
  const std::filesystem::path root = env && *env ? env : "sttneg_out";
  return (root / s.name).string();
}

Plan plan_and_save(const Scenario& s, const std::string& out) {
  Plan plan = plan_scenario(s);
  save_plan(plan, out);
  std::cout << "planned " << s.agents.size() << " agents: " << plan.log.updates()
            << " tube update(s) over " << plan.log.iterations() << " negotiation pass(es)\n";
  for (const auto& f : plan.failures()) std::cout << "FAIL " << f << "\n";
  std::cout << "artifacts: " << out << "\n";
  return plan;
}

int report(const VerifyReport& r) {
  for (const auto& p : r.passed) std::cout << "ok   " << p << "\n";
  for (const auto& f : r.failed) std::cout << "FAIL " << f << "\n";
  return r.ok() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent spatiotemporal tube planner with negotiation and funnel control"};
  app.require_subcommand(1);

  std::string scenario_path, artifacts_dir, out_dir;
  Overrides overrides;

  auto* plan_cmd = app.add_subcommand("plan", "build, circumvent and negotiate tubes");
  plan_cmd->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--out", out_dir, "artifact directory");
  overrides.add_to(plan_cmd);

  std::size_t seeds = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  unsigned threads = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "plan, then simulate the closed loop");
  sim_cmd->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", out_dir, "artifact directory");
  sim_cmd->add_option("--seeds", seeds, "number of disturbance seeds")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed, "first disturbance seed");
  sim_cmd->add_option("--dt", dt, "integration step [s]")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--threads", threads, "worker threads per fleet")->check(CLI::PositiveNumber);
  overrides.add_to(sim_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "re-check a saved artifact directory");
  verify_cmd->add_option("artifacts", artifacts_dir, "artifact directory")->required()->check(CLI::ExistingDirectory);

  std::size_t samples = 1000;
  auto* export_cmd = app.add_subcommand("export", "write plot-ready tables");
  export_cmd->add_option("artifacts", artifacts_dir, "artifact directory")->required()->check(CLI::ExistingDirectory);
  export_cmd->add_option("--samples", samples, "samples per table")->check(CLI::Range(2, 100000000));
  export_cmd->add_option("--out", out_dir, "output directory (default <artifacts>/plot)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (plan_cmd->parsed() || sim_cmd->parsed()) {
      Scenario s = load_scenario(scenario_path);
      overrides.apply(s);
      if (dt) s.simulation.dt = dt;
      if (seeds) s.simulation.seeds = seeds;
      if (seed) s.simulation.seed = *seed;
      validate_scenario(s);
      const std::string out = out_dir.empty() ? default_out(s) : out_dir;
      Plan plan = plan_and_save(s, out);
      if (!plan.ok()) return kCheckFailed;
      if (plan_cmd->parsed()) return kOk;

      RunOptions ro;
      ro.seed = s.simulation.seed;
      ro.seeds = s.simulation.seeds;
      ro.dt = s.sim_dt();
      ro.threads = threads;
      const RunResult run = run_simulations(s, plan.tubes(), ro);
      save_run(run, out);
      for (const auto& v : run.first.verdicts) {
        std::cout << "agent " << v.agent << ": reach=" << v.reach << " avoid=" << v.avoid
                  << " stay=" << v.stay << " contained=" << v.contained
                  << " collision_free=" << v.collision_free << "\n";
      }
      std::cout << run.passed() << "/" << run.seeds.size() << " seeds passed, "
                << run.funnel_violations() << " funnel violation(s), min pairwise distance "
                << run.min_pairwise_distance() << " m\n";
      return run.ok() ? kOk : kCheckFailed;
    }
    if (verify_cmd->parsed()) return report(verify_artifacts(artifacts_dir));
    if (export_cmd->parsed()) {
      const std::string out =
          out_dir.empty() ? (std::filesystem::path(artifacts_dir) / "plot").string() : out_dir;
      const auto files = export_plot_data(artifacts_dir, samples, out);
      std::cout << "wrote " << files.size() << " files to " << out << "\n";
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const NegotiationDidNotTerminate& e) {
    std::cerr << "error: " << e.what() << " (" << e.log().records.size() << " log records)\n";
    return kPlanningFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPlanningFailed;
  }
  return kOk;
}
