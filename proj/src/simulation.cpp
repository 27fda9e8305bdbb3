#include "sttneg/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <charconv>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sttneg/errors.hpp"

namespace sttneg {

std::string to_string(DisturbanceProcess p) {
  switch (p) {
    case DisturbanceProcess::Uniform:
      return "uniform";
    case DisturbanceProcess::TruncatedNormal:
      return "truncated_normal";
    case DisturbanceProcess::ConstantBias:
      return "constant_bias";
  }
  return "unknown";
}

DisturbanceProcess disturbance_process_from_string(const std::string& name) {
  if (name == "uniform") return DisturbanceProcess::Uniform;
  if (name == "truncated_normal") return DisturbanceProcess::TruncatedNormal;
  if (name == "constant_bias") return DisturbanceProcess::ConstantBias;
  throw InvalidArgument("unknown disturbance process '" + name + "'");
}

DisturbanceSource::DisturbanceSource(const DisturbanceSpec& spec, int agent) : spec_(spec) {
  for (double b : spec_.bound) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("disturbance bound must be >= 0");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(agent), 0x5eedu};
  rng_.seed(seq);
}

Eigen::VectorXd DisturbanceSource::next() {
  const auto n = static_cast<Eigen::Index>(spec_.bound.size());
  auto uniform = [&] {
    Eigen::VectorXd d(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double b = spec_.bound[static_cast<std::size_t>(k)];
      d[k] = b > 0.0 ? std::uniform_real_distribution<double>(-b, b)(rng_) : 0.0;
    }
    return d;
  };
  switch (spec_.process) {
    case DisturbanceProcess::Uniform:
      return uniform();
    case DisturbanceProcess::TruncatedNormal: {
      Eigen::VectorXd d(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        const double b = spec_.bound[static_cast<std::size_t>(k)];
        if (b == 0.0) {
          d[k] = 0.0;
          continue;
        }
        std::normal_distribution<double> nd(0.0, 0.5 * b);
        double v;
        do {
          v = nd(rng_);
        } while (std::abs(v) > b);
        d[k] = v;
      }
      return d;
    }
    case DisturbanceProcess::ConstantBias:
      if (!bias_) bias_ = uniform();
      return *bias_;
  }
  return Eigen::VectorXd::Zero(n);
}

std::size_t Trajectory::violation_count() const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const auto& e) { return e.kind == "funnel_violation"; }));
}

namespace {

void put(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

}  // namespace

std::string Trajectory::to_csv() const {
  std::string out;
  out.reserve(size() * (2 + n * 3 + m) * 22 + 256);
  out += "t";
  for (std::size_t k = 1; k <= n; ++k) out += ",x" + std::to_string(k);
  for (std::size_t k = 1; k <= m; ++k) out += ",u" + std::to_string(k);
  for (std::size_t k = 1; k <= n; ++k) {
    out += ",lower" + std::to_string(k) + ",upper" + std::to_string(k);
  }
  out += ",contained\n";
  for (std::size_t i = 0; i < size(); ++i) {
    put(out, t[i]);
    for (std::size_t k = 0; k < n; ++k) {
      out += ',';
      put(out, x[i * n + k]);
    }
    for (std::size_t k = 0; k < m; ++k) {
      out += ',';
      put(out, u[i * m + k]);
    }
    for (std::size_t k = 0; k < n; ++k) {
      out += ',';
      put(out, lower[i * n + k]);
      out += ',';
      put(out, upper[i * n + k]);
    }
    out += contained[i] ? ",1\n" : ",0\n";
  }
  return out;
}

Trajectory Trajectory::from_csv(const std::string& text, int agent) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty trajectory table");
  Trajectory tr;
  tr.agent = agent;
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.size() > 1 && col[0] == 'x') ++tr.n;
      if (col.size() > 1 && col[0] == 'u' && col.rfind("upper", 0) != 0) ++tr.m;
    }
  }
  const std::size_t cols = 1 + tr.n + tr.m + 2 * tr.n + 1;
  std::vector<double> row(cols);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const char* p = line.c_str();
    for (std::size_t c = 0; c < cols; ++c) {
      char* end = nullptr;
      row[c] = std::strtod(p, &end);
      if (end == p) throw ParseError("malformed trajectory row: " + line);
      p = (*end == ',') ? end + 1 : end;
    }
    tr.t.push_back(row[0]);
    for (std::size_t k = 0; k < tr.n; ++k) tr.x.push_back(row[1 + k]);
    for (std::size_t k = 0; k < tr.m; ++k) tr.u.push_back(row[1 + tr.n + k]);
    for (std::size_t k = 0; k < tr.n; ++k) {
      tr.lower.push_back(row[1 + tr.n + tr.m + 2 * k]);
      tr.upper.push_back(row[1 + tr.n + tr.m + 2 * k + 1]);
    }
    tr.contained.push_back(row[cols - 1] != 0.0 ? 1 : 0);
  }
  if (tr.size() >= 2) tr.dt = tr.t[1] - tr.t[0];
  return tr;
}

std::string Trajectory::events_jsonl() const {
  std::string out;
  for (const auto& e : events) {
    nlohmann::json j = {{"agent", agent}, {"kind", e.kind}, {"t", e.t}};
    if (e.dim >= 0) j["dim"] = e.dim;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Trajectory simulate_agent(const DynamicsModel& model, const Tube& tube,
                          const ControllerGains& gains, const DisturbanceSpec& disturbance,
                          const Eigen::VectorXd& x0, const SimulationOptions& options) {
  const std::size_t n = tube.size();
  if (model.state_dim != n) throw DimensionMismatch("model and tube state dimensions differ");
  if (static_cast<std::size_t>(x0.size()) != n) throw DimensionMismatch("x0 has wrong size");
  if (disturbance.bound.size() != n) throw DimensionMismatch("disturbance bound has wrong size");
  if (!(options.dt > 0.0)) throw InvalidArgument("simulation step must be positive");
  if (options.stay_window < 0.0) throw InvalidArgument("stay window must be non-negative");
  gains.validate(n);

  {
    const HyperRect initial = tube.at(tube.t_start());
    for (std::size_t k = 0; k < n; ++k) {
      const double v = x0[static_cast<Eigen::Index>(k)];
      if (!(initial[k].lo < v && v < initial[k].hi)) {
        throw InvalidArgument("initial state of agent " + std::to_string(tube.agent()) +
                              " is not strictly inside the initial tube " + initial.str());
      }
    }
  }

  const double span = tube.horizon() - tube.t_start() + options.stay_window;
  const auto steps = static_cast<std::size_t>(std::llround(span / options.dt));
  Trajectory tr;
  tr.agent = tube.agent();
  tr.n = n;
  tr.m = model.input_dim;
  tr.dt = options.dt;
  tr.t.reserve(steps + 1);
  tr.x.reserve((steps + 1) * n);
  tr.u.reserve((steps + 1) * tr.m);
  tr.lower.reserve((steps + 1) * n);
  tr.upper.reserve((steps + 1) * n);
  tr.contained.reserve(steps + 1);

  DisturbanceSource source(disturbance, tube.agent());
  std::vector<double> lo(n), hi(n);
  Eigen::VectorXd x = x0;
  bool inside = true;
  bool reached = false;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = tube.t_start() + static_cast<double>(k) * options.dt;
    ControlOutput c = evaluate_control(x, tube, t, gains, options.channel, lo, hi);
    if (static_cast<std::size_t>(c.u.size()) != tr.m) {
      throw DimensionMismatch("channel map produced an input of the wrong size");
    }
    tr.t.push_back(t);
    tr.x.insert(tr.x.end(), x.data(), x.data() + n);
    tr.u.insert(tr.u.end(), c.u.data(), c.u.data() + tr.m);
    tr.lower.insert(tr.lower.end(), lo.begin(), lo.end());
    tr.upper.insert(tr.upper.end(), hi.begin(), hi.end());
    const bool now_inside = !c.violated_dim;
    tr.contained.push_back(now_inside ? 1 : 0);
    if (inside && !now_inside) {
      tr.events.push_back({"funnel_violation", t, static_cast<int>(*c.violated_dim)});
    } else if (!inside && now_inside) {
      tr.events.push_back({"funnel_recovered", t, -1});
    }
    inside = now_inside;
    if (!reached && options.target &&
        options.target->contains_point(std::span<const double>(x.data(), n))) {
      reached = true;
      tr.events.push_back({"reach", t, -1});
    }
    if (k == steps) break;
    try {
      x = step_dynamics(model, x, c.u, source.next(), options.dt);
    } catch (const NumericalBlowup& e) {
      throw NumericalBlowup("agent " + std::to_string(tube.agent()) + " at t=" +
                            std::to_string(t) + ": " + e.what());
    }
  }
  return tr;
}

RasVerdict evaluate_ras(const Trajectory& tr, const HyperRect& start, const HyperRect& target,
                        const ObstacleSet& obstacles, double t_p, double stay_window) {
  (void)start;
  RasVerdict v;
  v.agent = tr.agent;
  if (target.size() != tr.n) throw DimensionMismatch("target and trajectory dimensions differ");
  const double slack = 1e-9 * std::max(1.0, t_p);
  bool stay_seen = false;
  v.stay = true;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.t[i];
    const std::span<const double> x(tr.x.data() + i * tr.n, tr.n);
    if (!tr.contained[i]) v.contained = false;
    const bool in_target = target.contains_point(x);
    if (t <= t_p + slack) {
      if (!v.reach && in_target) {
        v.reach = true;
        v.reach_time = t;
      }
      if (v.avoid) {
        for (const auto& o : obstacles.obstacles) {
          if (o.contains_point(x)) {
            v.avoid = false;
            v.avoid_violation_time = t;
            break;
          }
        }
      }
    }
    if (t >= t_p - slack && t <= t_p + stay_window + slack) {
      stay_seen = true;
      if (!in_target) v.stay = false;
    }
  }
  if (!stay_seen || tr.size() == 0 || tr.t.back() < t_p + stay_window - slack) v.stay = false;
  return v;
}

double workspace_distance(std::span<const double> a, const Mask& ma, std::span<const double> b,
                          const Mask& mb) {
  double s = 0.0;
  for (std::size_t k = 0; k < ma.size(); ++k) {
    const double d = a[ma[k]] - b[mb[k]];
    s += d * d;
  }
  return std::sqrt(s);
}

bool FleetReport::ok() const {
  if (!collision_free || !all_contained) return false;
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.ok(); });
}

FleetReport simulate_fleet(const std::vector<FleetMember>& members, const FleetOptions& options) {
  const std::size_t count = members.size();
  std::vector<Trajectory> trajs(count);
  std::vector<std::exception_ptr> errors(count);

  auto run_one = [&](std::size_t i) {
    try {
      const auto& mbr = members[i];
      SimulationOptions so;
      so.dt = options.dt;
      so.stay_window = mbr.stay_window;
      so.channel = mbr.channel;
      so.target = mbr.target;
      trajs[i] = simulate_agent(mbr.model, mbr.tube, mbr.gains, mbr.disturbance, mbr.x0, so);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) run_one(i);
  } else {
    std::vector<std::jthread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run_one(i);
      });
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error("agent " + std::to_string(members[i].id) + ": " + e.what());
    }
  }

  return assess_fleet(std::move(trajs), members, options.min_separation,
                      options.keep_trajectories);
}

FleetReport assess_fleet(std::vector<Trajectory> trajs, const std::vector<FleetMember>& members,
                         double min_separation, bool keep_trajectories) {
  const std::size_t count = members.size();
  if (trajs.size() != count) throw DimensionMismatch("one trajectory per fleet member required");
  FleetReport rep;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& mbr = members[i];
    RasVerdict v = evaluate_ras(trajs[i], mbr.start, mbr.target, mbr.obstacles,
                                mbr.tube.horizon(), mbr.stay_window);
    v.agent = mbr.id;
    rep.funnel_violations += trajs[i].violation_count();
    if (!v.contained) rep.all_contained = false;
    rep.verdicts.push_back(v);
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const auto& a = trajs[i];
      const auto& b = trajs[j];
      const std::size_t common = std::min(a.size(), b.size());
      for (std::size_t k = 0; k < common; ++k) {
        const double d = workspace_distance({a.x.data() + k * a.n, a.n}, members[i].mask,
                                            {b.x.data() + k * b.n, b.n}, members[j].mask);
        rep.verdicts[i].min_distance = std::min(rep.verdicts[i].min_distance, d);
        rep.verdicts[j].min_distance = std::min(rep.verdicts[j].min_distance, d);
        if (d < rep.min_pairwise_distance) {
          rep.min_pairwise_distance = d;
          rep.closest_i = members[i].id;
          rep.closest_j = members[j].id;
          rep.closest_t = a.t[k];
        }
      }
    }
  }
  for (auto& v : rep.verdicts) {
    v.collision_free = v.min_distance > min_separation;
    if (!v.collision_free) rep.collision_free = false;
  }
  if (keep_trajectories) rep.trajectories = std::move(trajs);
  return rep;
}

}  // namespace sttneg
