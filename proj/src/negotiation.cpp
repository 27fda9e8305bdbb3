#include "sttneg/negotiation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "sttneg/scan.hpp"
#include "sttneg/tube_io.hpp"

namespace sttneg {

Topology Topology::fully_connected(std::vector<int> ids) {
  Topology t;
  t.ids = std::move(ids);
  return t;
}

std::vector<std::size_t> Topology::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  if (edges.empty()) {
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (j != i) out.push_back(j);
    }
    return out;
  }
  for (const auto& [a, b] : edges) {
    if (a == i && b != i) out.push_back(b);
    if (b == i && a != i) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> Topology::order() const {
  if (!token_order.empty()) return token_order;
  std::vector<std::size_t> o(ids.size());
  std::iota(o.begin(), o.end(), std::size_t{0});
  return o;
}

void Topology::validate() const {
  if (!token_order.empty()) {
    std::vector<std::size_t> sorted = token_order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (sorted[k] != k || sorted.size() != ids.size()) {
        throw InvalidArgument("token order must visit every agent exactly once");
      }
    }
  }
  for (const auto& [a, b] : edges) {
    if (a >= ids.size() || b >= ids.size()) throw InvalidArgument("edge references unknown agent");
  }
}

bool tubes_overlap(const Tube& a, const Mask& mask_a, const Tube& b, const Mask& mask_b,
                   double t) {
  for (std::size_t m = 0; m < mask_a.size(); ++m) {
    double alo, ahi, blo, bhi;
    a.dim(mask_a[m]).bounds(std::clamp(t, a.t_start(), a.horizon()), alo, ahi);
    b.dim(mask_b[m]).bounds(std::clamp(t, b.t_start(), b.horizon()), blo, bhi);
    if (alo > bhi || blo > ahi) return false;
  }
  return true;
}

namespace {

void check_masks(const Tube& a, const Mask& ma, const Tube& b, const Mask& mb) {
  if (ma.size() != mb.size()) {
    throw DimensionMismatch("workspace masks of agents " + std::to_string(a.agent()) + " and " +
                            std::to_string(b.agent()) + " differ in length");
  }
  for (auto k : ma) {
    if (k >= a.size()) throw InvalidArgument("workspace mask index out of range");
  }
  for (auto k : mb) {
    if (k >= b.size()) throw InvalidArgument("workspace mask index out of range");
  }
}

}  // namespace

std::optional<CollisionInterval> detect_collision_interval(std::size_t i,
                                                           const std::vector<Tube>& tubes,
                                                           const std::vector<Mask>& masks,
                                                           double dt_check,
                                                           const std::vector<std::size_t>& neighbors) {
  if (!(dt_check > 0.0)) throw InvalidArgument("dt_check must be positive");
  if (masks.size() != tubes.size()) throw DimensionMismatch("one workspace mask per tube");
  std::vector<std::size_t> nbrs = neighbors;
  if (nbrs.empty()) {
    for (std::size_t j = 0; j < tubes.size(); ++j) {
      if (j != i) nbrs.push_back(j);
    }
  }
  std::optional<CollisionInterval> out;
  const Tube& a = tubes[i];
  for (std::size_t j : nbrs) {
    const Tube& b = tubes[j];
    check_masks(a, masks[i], b, masks[j]);
    const double t0 = std::max(a.t_start(), b.t_start());
    const double t1 = std::min(a.horizon(), b.horizon());
    if (t1 < t0) continue;
    const auto ws = find_windows(
        [&](double t) { return tubes_overlap(a, masks[i], b, masks[j], t); }, t0, t1, dt_check);
    if (ws.empty()) continue;
    if (!out) {
      out = CollisionInterval{a.agent(), ws.front().begin, ws.back().end, {}};
    } else {
      out->t_lo = std::min(out->t_lo, ws.front().begin);
      out->t_hi = std::max(out->t_hi, ws.back().end);
    }
    out->neighbors.push_back(b.agent());
  }
  return out;
}

ParameterizedTube parameterize_tube(const ParameterizedTube& current,
                                    const std::optional<CollisionInterval>& interval,
                                    double delta, const ReplanContext& ctx, double blend) {
  if (!interval) return current;
  const Tube& prior = current.tube;
  const double t_start = prior.t_start();
  const double t_p = prior.horizon();
  const double t_lo = interval->t_lo;
  const double t_hi = interval->t_hi;
  if (!(delta > 0.0)) throw InvalidArgument("freeze offset delta must be positive");
  if (blend < 0.0) throw InvalidArgument("blend width must be non-negative");
  if (t_hi < t_lo) throw InvalidArgument("collision interval is reversed");
  if (t_lo - delta < t_start) {
    throw CannotReplan("collision begins at t=" + std::to_string(t_lo) +
                       ", before a frozen cross-section delta=" + std::to_string(delta) +
                       " earlier exists");
  }
  if (t_hi >= t_p) {
    throw CannotReplan("collision interval [" + std::to_string(t_lo) + ", " +
                       std::to_string(t_hi) + "] reaches the prescribed time " +
                       std::to_string(t_p) + "; no time remains to replan");
  }

  // Entry fade over [t_lo - w, t_lo], ending exactly where the overlap begins.
  const double w = std::min(0.5 * blend, t_lo - t_start);
  const double plateau_end = t_hi;

  const HyperRect frozen = prior.at(t_lo - delta);
  // The tail must stay resolvable on the detection grid: per dt_check step a
  // boundary may move at most half the narrowest width.
  if (ctx.circumvent.dt_check > 0.0) {
    const double span = t_p - plateau_end;
    for (std::size_t k = 0; k < frozen.size(); ++k) {
      const double move = std::max(std::abs(ctx.target[k].lo - frozen[k].lo),
                                   std::abs(ctx.target[k].hi - frozen[k].hi));
      const double width = std::min(frozen[k].width(), ctx.target[k].width());
      if (1.5 * move / span * ctx.circumvent.dt_check > 0.5 * width) {
        throw CannotReplan("collision interval [" + std::to_string(t_lo) + ", " +
                           std::to_string(t_hi) + "] leaves only " + std::to_string(span) +
                           " s to reach the target; the replanned tube would outrun the check grid");
      }
    }
  }
  WidthPolicy tail_width = ctx.width;
  tail_width.start_inset = 0.0;
  Tube tail = build_reachability_tube(frozen, ctx.target, t_p, ctx.arena, tail_width,
                                      plateau_end, prior.agent());
  tail = circumvent_obstacles(tail, ctx.obstacles, ctx.arena, ctx.circumvent);

  std::vector<BoundaryProfile> dims;
  dims.reserve(prior.size());
  for (std::size_t k = 0; k < prior.size(); ++k) {
    const BoundaryProfile& p = prior.dim(k);
    std::vector<Segment> segs;
    const double keep_end = t_lo - w;
    if (keep_end > t_start) {
      auto head = p.clipped(t_start, keep_end).segments();
      segs.insert(segs.end(), head.begin(), head.end());
    }
    Segment hold;
    hold.lower.terms.push_back(Term::constant(frozen[k].lo));
    hold.upper.terms.push_back(Term::constant(frozen[k].hi));
    if (w > 0.0) {
      Segment fade = hold;
      fade.t0 = t_lo - w;
      fade.t1 = t_lo;
      fade.fade_t0 = fade.t0;
      fade.fade_t1 = fade.t1;
      fade.fade_from = std::make_shared<const BoundaryProfile>(p.clipped(fade.t0, fade.t1));
      segs.push_back(std::move(fade));
    }
    if (plateau_end > t_lo) {
      hold.t0 = t_lo;
      hold.t1 = plateau_end;
      segs.push_back(hold);
    }
    const auto& tail_segs = tail.dim(k).segments();
    segs.insert(segs.end(), tail_segs.begin(), tail_segs.end());
    dims.emplace_back(std::move(segs));
  }

  ParameterizedTube out = current;
  out.tube = Tube(prior.agent(), t_start, t_p, std::move(dims));
  out.freezes.push_back(FreezeRecord{t_lo, plateau_end, delta, w, frozen, std::move(tail)});
  return out;
}

std::size_t NegotiationLog::updates() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) {
    return r.action == "parameterized";
  }));
}

std::string NegotiationLog::to_jsonl() const {
  std::ostringstream os;
  for (const auto& r : records) {
    json j;
    j["iter"] = r.iter;
    j["hub"] = r.hub;
    json ex = json::array();
    for (const auto& e : r.examined) ex.push_back({e.agent, e.revision});
    j["examined"] = std::move(ex);
    json pairs = json::array();
    if (r.interval) {
      for (int n : r.interval->neighbors) pairs.push_back({r.hub, n});
      j["t_lo"] = r.interval->t_lo;
      j["t_hi"] = r.interval->t_hi;
    } else {
      j["t_lo"] = nullptr;
      j["t_hi"] = nullptr;
    }
    j["conflict_pair"] = std::move(pairs);
    j["action"] = r.action;
    os << j.dump() << "\n";
  }
  return os.str();
}

NegotiationLog NegotiationLog::from_jsonl(const std::string& text) {
  NegotiationLog log;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      NegotiationRecord r;
      r.iter = j.at("iter").get<std::size_t>();
      r.hub = j.at("hub").get<int>();
      for (const auto& e : j.at("examined")) {
        r.examined.push_back({e.at(0).get<int>(), e.at(1).get<std::size_t>()});
      }
      if (!j.at("t_lo").is_null()) {
        CollisionInterval ci;
        ci.agent = r.hub;
        ci.t_lo = j.at("t_lo").get<double>();
        ci.t_hi = j.at("t_hi").get<double>();
        for (const auto& p : j.at("conflict_pair")) ci.neighbors.push_back(p.at(1).get<int>());
        r.interval = std::move(ci);
      }
      r.action = j.at("action").get<std::string>();
      log.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed negotiation record: ") + e.what());
    }
  }
  return log;
}

namespace {

// Latest freeze start at or before the detected contact whose held box,
// taken `delta` earlier, stays clear of every neighbour until t_hi. Falls
// back to the contact time when no such point exists.
double clear_freeze_start(std::size_t i, const std::vector<Tube>& tubes,
                          const std::vector<Mask>& masks, const std::vector<std::size_t>& nbrs,
                          const CollisionInterval& iv, double delta, double dt_check) {
  const Tube& a = tubes[i];
  const Mask& ma = masks[i];
  auto clear = [&](double t_c) {
    const HyperRect box = a.at(t_c - delta);
    for (std::size_t j : nbrs) {
      const Tube& b = tubes[j];
      const double t1 = std::min(iv.t_hi, b.horizon());
      for (const double t : time_grid(std::max(t_c, b.t_start()), t1, dt_check)) {
        bool hit = true;
        for (std::size_t m = 0; m < ma.size() && hit; ++m) {
          double lo, hi;
          b.dim(masks[j][m]).bounds(t, lo, hi);
          const Interval& r = box[ma[m]];
          hit = !(r.lo > hi || lo > r.hi);
        }
        if (hit) return false;
      }
    }
    return true;
  };
  const double step = std::max(delta, dt_check);
  for (double back = 0.0;; back = back == 0.0 ? step : 2.0 * back) {
    const double t_c = iv.t_lo - back;
    if (t_c - delta < a.t_start()) break;
    if (clear(t_c)) return t_c;
  }
  return iv.t_lo;
}

}  // namespace

NegotiationResult negotiate(std::vector<ParameterizedTube> tubes, const std::vector<Mask>& masks,
                            const std::vector<ReplanContext>& contexts, const Topology& topology,
                            const NegotiationParams& params) {
  const std::size_t n = tubes.size();
  if (masks.size() != n || contexts.size() != n || topology.size() != n) {
    throw DimensionMismatch("negotiation inputs disagree on the number of agents");
  }
  topology.validate();
  if (!(params.dt_check > 0.0)) throw InvalidArgument("dt_check must be positive");
  const double delta = params.delta >= 0.0 ? params.delta : 2.0 * params.dt_check;
  const double blend = params.blend >= 0.0 ? params.blend : 4.0 * params.dt_check;
  const std::size_t max_iter = params.max_iter ? params.max_iter : 10 * std::max<std::size_t>(n, 1);

  NegotiationResult result;
  result.tubes = std::move(tubes);
  std::vector<Tube> current;
  current.reserve(n);
  for (const auto& t : result.tubes) current.push_back(t.tube);

  const auto order = topology.order();
  for (std::size_t iter = 1;; ++iter) {
    if (iter > max_iter) {
      throw NegotiationDidNotTerminate(
          "negotiation did not settle within " + std::to_string(max_iter) + " passes",
          result.log);
    }
    bool updated = false;
    for (std::size_t i : order) {
      const auto nbrs = topology.neighbors(i);
      NegotiationRecord rec;
      rec.iter = iter;
      rec.hub = topology.ids[i];
      for (std::size_t j : nbrs) rec.examined.push_back({topology.ids[j], result.tubes[j].revision()});
      if (!nbrs.empty()) {
        rec.interval = detect_collision_interval(i, current, masks, params.dt_check, nbrs);
      }
      if (rec.interval) {
        const std::string who = "agent " + std::to_string(topology.ids[i]) + ": ";
        try {
          CollisionInterval freeze = *rec.interval;
          if (params.clear_freeze) {
            freeze.t_lo = clear_freeze_start(i, current, masks, nbrs, freeze, delta, params.dt_check);
          }
          result.tubes[i] = parameterize_tube(result.tubes[i], freeze, delta, contexts[i], blend);
        } catch (const CannotReplan& e) {
          throw CannotReplan(who + e.what());
        } catch (const InfeasibleScenario& e) {
          throw InfeasibleScenario(who + e.what());
        }
        current[i] = result.tubes[i].tube;
        rec.action = "parameterized";
        updated = true;
      } else {
        rec.action = "none";
      }
      result.log.records.push_back(std::move(rec));
    }
    if (!updated) break;
  }
  return result;
}

DisjointnessReport verify_disjointness(const std::vector<Tube>& tubes, const std::vector<Mask>& masks,
                                       double dt_check, const Topology* topology) {
  if (!(dt_check > 0.0)) throw InvalidArgument("dt_check must be positive");
  if (masks.size() != tubes.size()) throw DimensionMismatch("one workspace mask per tube");
  DisjointnessReport rep;
  for (std::size_t i = 0; i < tubes.size(); ++i) {
    std::vector<std::size_t> nbrs;
    if (topology) {
      nbrs = topology->neighbors(i);
    } else {
      for (std::size_t j = 0; j < tubes.size(); ++j) nbrs.push_back(j);
    }
    for (std::size_t j : nbrs) {
      if (j <= i) continue;
      const Tube& a = tubes[i];
      const Tube& b = tubes[j];
      check_masks(a, masks[i], b, masks[j]);
      const double t0 = std::max(a.t_start(), b.t_start());
      const double t1 = std::min(a.horizon(), b.horizon());
      if (t1 < t0) continue;
      auto overlap = [&](double t) { return tubes_overlap(a, masks[i], b, masks[j], t); };
      const auto grid = time_grid(t0, t1, dt_check);
      bool previous = false;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const bool now = overlap(grid[k]);
        const bool entering = now && !previous;
        previous = now;
        if (!now) continue;
        ++rep.intersecting_samples;
        if (!entering) continue;
        const double onset = k == 0 ? grid[0] : bisect_edge(overlap, grid[k], grid[k - 1]);
        if (rep.clean || onset < rep.first_violation) {
          rep.clean = false;
          rep.agent_i = a.agent();
          rep.agent_j = b.agent();
          rep.first_violation = onset;
        }
      }
    }
  }
  return rep;
}

}  // namespace sttneg
