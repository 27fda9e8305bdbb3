#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include "sttneg/artifacts.hpp"
#include "sttneg/control.hpp"
#include "sttneg/errors.hpp"
#include "sttneg/pipeline.hpp"
#include "sttneg/scenario.hpp"

namespace py = pybind11;
using namespace sttneg;

namespace {

py::dict verdict_dict(const RasVerdict& v) {
  py::dict d;
  d["agent"] = v.agent;
  d["reach"] = v.reach;
  d["reach_time"] = v.reach_time;
  d["avoid"] = v.avoid;
  d["stay"] = v.stay;
  d["contained"] = v.contained;
  d["collision_free"] = v.collision_free;
  d["min_distance"] = v.min_distance;
  d["ok"] = v.ok();
  return d;
}

// Samples tube bounds on a uniform grid: (t, lower[samples, n], upper[samples, n]).
py::tuple sample_tube(const Tube& tube, std::size_t samples) {
  if (samples < 2) throw InvalidArgument("at least two samples are required");
  const std::size_t n = tube.size();
  py::array_t<double> t(static_cast<py::ssize_t>(samples));
  py::array_t<double> lo({samples, n}), hi({samples, n});
  auto tv = t.mutable_unchecked<1>();
  auto lv = lo.mutable_unchecked<2>();
  auto hv = hi.mutable_unchecked<2>();
  std::vector<double> l(n), h(n);
  for (std::size_t k = 0; k < samples; ++k) {
    const double tk = k + 1 == samples
                          ? tube.horizon()
                          : tube.t_start() + (tube.horizon() - tube.t_start()) *
                                                 static_cast<double>(k) / static_cast<double>(samples - 1);
    tube.bounds(tk, l, h);
    tv(k) = tk;
    for (std::size_t d = 0; d < n; ++d) {
      lv(k, d) = l[d];
      hv(k, d) = h[d];
    }
  }
  return py::make_tuple(t, lo, hi);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatiotemporal tube planning, negotiation and closed-loop simulation";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<CannotReplan>(m, "CannotReplan", error.ptr());
  py::register_exception<InfeasibleScenario>(m, "InfeasibleScenario", error.ptr());
  py::register_exception<NegotiationDidNotTerminate>(m, "NegotiationDidNotTerminate", error.ptr());
  py::register_exception<FunnelViolation>(m, "FunnelViolation", error.ptr());

  m.def("normalized_error", &normalized_error, py::arg("x"), py::arg("lower"), py::arg("upper"));
  m.def("control_input", &control_input, py::arg("x"), py::arg("lower"), py::arg("upper"),
        py::arg("kappa"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_property_readonly("agent_ids",
                             [](const Scenario& s) {
                               std::vector<int> ids;
                               for (const auto& a : s.agents) ids.push_back(a.id);
                               return ids;
                             })
      .def_property_readonly("obstacle_count", [](const Scenario& s) { return s.obstacles.size(); })
      .def_property_readonly("arena",
                             [](const Scenario& s) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& iv : s.arena.dims()) out.emplace_back(iv.lo, iv.hi);
                               return out;
                             })
      .def("to_json", [](const Scenario& s) { return to_json(s).dump(); });

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def(
      "parse_scenario",
      [](const std::string& text) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(text, nullptr, true, true);
        } catch (const nlohmann::json::parse_error& e) {
          throw ParseError(e.what());
        }
        return parse_scenario(doc);
      },
      py::arg("text"));

  py::class_<Plan>(m, "Plan")
      .def_property_readonly("scenario", [](const Plan& p) { return p.scenario; })
      .def_property_readonly("ok", &Plan::ok)
      .def_property_readonly("failures", &Plan::failures)
      .def_property_readonly("updates", [](const Plan& p) { return p.log.updates(); })
      .def_property_readonly("iterations", [](const Plan& p) { return p.log.iterations(); })
      .def_property_readonly("log_jsonl", [](const Plan& p) { return p.log.to_jsonl(); })
      .def_property_readonly("revisions",
                             [](const Plan& p) {
                               std::vector<std::size_t> out;
                               for (const auto& t : p.post) out.push_back(t.revision());
                               return out;
                             })
      .def(
          "sample",
          [](const Plan& p, int agent, std::size_t samples, bool negotiated) {
            const std::size_t i = p.scenario.index_of(agent);
            return sample_tube(negotiated ? p.post[i].tube : p.pre[i], samples);
          },
          py::arg("agent"), py::arg("samples") = 1000, py::arg("negotiated") = true,
          "Uniformly sampled bounds (t, lower, upper) of one agent's tube.");

  m.def("plan", &plan_scenario, py::arg("scenario"), py::call_guard<py::gil_scoped_release>());
  m.def("save_plan", &save_plan, py::arg("plan"), py::arg("directory"));
  m.def("load_plan", &load_plan, py::arg("directory"));

  m.def(
      "simulate",
      [](const Plan& plan, std::size_t seeds, std::uint64_t seed, double dt, const std::string& out) {
        RunOptions ro;
        ro.seeds = seeds;
        ro.seed = seed;
        ro.dt = dt;
        RunResult run;
        {
          py::gil_scoped_release release;
          run = run_simulations(plan.scenario, plan.tubes(), ro);
          if (!out.empty()) {
            save_plan(plan, out);
            save_run(run, out);
          }
        }
        py::dict d;
        d["ok"] = run.ok();
        d["seeds"] = run.seeds.size();
        d["passed"] = run.passed();
        d["funnel_violations"] = run.funnel_violations();
        d["min_pairwise_distance"] = run.min_pairwise_distance();
        py::list verdicts;
        for (const auto& v : run.first.verdicts) verdicts.append(verdict_dict(v));
        d["verdicts"] = verdicts;
        return d;
      },
      py::arg("plan"), py::arg("seeds") = 1, py::arg("seed") = 1, py::arg("dt") = 0.0,
      py::arg("out") = "", "Simulates the negotiated tubes; writes artifacts when `out` is given.");

  m.def(
      "verify",
      [](const std::string& dir) {
        const VerifyReport r = verify_artifacts(dir);
        py::dict d;
        d["ok"] = r.ok();
        d["passed"] = r.passed;
        d["failed"] = r.failed;
        return d;
      },
      py::arg("directory"));
  m.def(
      "export_plot_data",
      [](const std::string& dir, const std::string& out, std::size_t samples) {
        return export_plot_data(dir, samples, out);
      },
      py::arg("directory"), py::arg("out"), py::arg("samples") = 1000);
}
