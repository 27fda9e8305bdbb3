#include "sttneg/tube.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sttneg/errors.hpp"
#include "sttneg/scan.hpp"

namespace sttneg {

namespace {

constexpr double kHorizonSlack = 1e-9;

// Intersection of the tube cross-section at t with a box, without allocating.
bool hits(const Tube& tube, double t, const HyperRect& box) {
  for (std::size_t k = 0; k < tube.size(); ++k) {
    double lo, hi;
    tube.dim(k).bounds(t, lo, hi);
    if (lo > box[k].hi || box[k].lo > hi) return false;
  }
  return true;
}

bool inside(const Tube& tube, double t, const HyperRect& box) {
  for (std::size_t k = 0; k < tube.size(); ++k) {
    double lo, hi;
    tube.dim(k).bounds(t, lo, hi);
    if (lo < box[k].lo || hi > box[k].hi) return false;
  }
  return true;
}

double default_clearance(const HyperRect& arena, std::size_t k) {
  return 0.02 * arena[k].width();
}

}  // namespace

Tube::Tube(int agent, double t_start, double horizon, std::vector<BoundaryProfile> dims)
    : agent_(agent), t_start_(t_start), horizon_(horizon), dims_(std::move(dims)) {
  if (!(horizon_ > t_start_)) throw InvalidArgument("tube horizon must exceed its start time");
  if (dims_.empty()) throw InvalidArgument("tube needs at least one dimension");
}

HyperRect Tube::at(double t) const {
  if (t < t_start_ - kHorizonSlack || t > horizon_ + kHorizonSlack) {
    throw InvalidArgument("time " + std::to_string(t) + " outside tube horizon [" +
                          std::to_string(t_start_) + ", " + std::to_string(horizon_) + "]");
  }
  return at_clamped(t);
}

HyperRect Tube::at_clamped(double t) const {
  t = std::clamp(t, t_start_, horizon_);
  std::vector<Interval> out(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) dims_[k].bounds(t, out[k].lo, out[k].hi);
  return HyperRect(std::move(out));
}

void Tube::bounds(double t, std::span<double> lo, std::span<double> hi) const {
  t = std::clamp(t, t_start_, horizon_);
  for (std::size_t k = 0; k < dims_.size(); ++k) dims_[k].bounds(t, lo[k], hi[k]);
}

double Tube::peak_slew(std::size_t samples) const {
  double peak = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = t_start_ + (horizon_ - t_start_) * static_cast<double>(i) / samples;
    for (const auto& d : dims_) {
      peak = std::max({peak, std::abs(d.lower_slope(t)), std::abs(d.upper_slope(t))});
    }
  }
  return peak;
}

HyperRect tube_cross_section(const Tube& tube, double t) { return tube.at(t); }

Tube build_reachability_tube(const HyperRect& start, const HyperRect& target, double t_p,
                             const HyperRect& arena, const WidthPolicy& width, double t_start,
                             int agent) {
  if (start.size() != target.size() || start.size() != arena.size()) {
    throw DimensionMismatch("start, target and arena must share a dimension count");
  }
  if (!(t_p > t_start)) throw InvalidArgument("prescribed time must exceed the tube start time");
  if (!contains(arena, start)) {
    throw InfeasibleScenario("start set " + start.str() + " lies outside arena " + arena.str());
  }
  if (!contains(arena, target)) {
    throw InfeasibleScenario("target set " + target.str() + " lies outside arena " + arena.str());
  }
  if (width.start_inset < 0.0 || width.start_inset >= 1.0 || width.end_inset < 0.0 ||
      width.end_inset >= 1.0) {
    throw InvalidArgument("width insets must lie in [0, 1)");
  }
  auto inset = [](const Interval& iv, double f) {
    const double cut = 0.5 * f * iv.width();
    return Interval{iv.lo + cut, iv.hi - cut};
  };
  std::vector<BoundaryProfile> dims;
  dims.reserve(start.size());
  for (std::size_t k = 0; k < start.size(); ++k) {
    const Interval s = inset(start[k], width.start_inset);
    const Interval g = inset(target[k], width.end_inset);
    if (!(s.lo < s.hi) || !(g.lo < g.hi)) {
      throw DegenerateTube("start and target sets need positive width in dimension " +
                           std::to_string(k));
    }
    Segment seg;
    seg.t0 = t_start;
    seg.t1 = t_p;
    auto term = [&](double from, double to) {
      return from == to ? Term::constant(from) : Term::smooth(t_start, t_p, from, to);
    };
    seg.lower.terms.push_back(term(s.lo, g.lo));
    seg.upper.terms.push_back(term(s.hi, g.hi));
    dims.emplace_back(std::vector<Segment>{std::move(seg)});
  }
  return Tube(agent, t_start, t_p, std::move(dims));
}

std::string ObstacleSet::name(std::size_t j) const {
  if (j < names.size() && !names[j].empty()) return names[j];
  return "obstacle#" + std::to_string(j + 1);
}

namespace {

struct Detour {
  std::size_t dim = 0;
  double shift = 0.0;
  bool clean = false;  // no contact with any obstacle inside the bump window
  Tube tube;
};

Tube with_bump(const Tube& tube, std::size_t k, double amplitude, double p0, double w0, double w1,
               double p1) {
  Tube out = tube;
  const Term bump = Term::bump(p0, w0, w1, p1, amplitude);
  out.dim(k).add_to_both(bump, p0, p1);
  return out;
}

}  // namespace

Tube circumvent_obstacles(const Tube& tube, const ObstacleSet& obstacles, const HyperRect& arena,
                          const CircumventOptions& options) {
  if (!(options.dt_check > 0.0)) throw InvalidArgument("dt_check must be positive");
  if (arena.size() != tube.size()) throw DimensionMismatch("arena/tube dimension mismatch");
  for (const auto& o : obstacles.obstacles) {
    if (o.size() != tube.size()) throw DimensionMismatch("obstacle/tube dimension mismatch");
  }
  if (options.padding < 0.0) throw InvalidArgument("padding must be non-negative");

  std::vector<std::size_t> detour_dims = options.detour_dims;
  if (detour_dims.empty()) {
    for (std::size_t k = 0; k < tube.size(); ++k) detour_dims.push_back(k);
  }
  const std::size_t max_rounds =
      options.max_rounds ? options.max_rounds : 8 * (obstacles.count() + 1);
  const double dt = options.dt_check;
  const double t0 = tube.t_start();
  const double t1 = tube.horizon();

  Tube out = tube;
  for (std::size_t round = 0;; ++round) {
    // Earliest blocking window over all obstacles.
    std::size_t blocker = obstacles.count();
    TimeWindow window{};
    for (std::size_t j = 0; j < obstacles.count(); ++j) {
      const auto& o = obstacles.obstacles[j];
      auto ws = find_windows([&](double t) { return hits(out, t, o); }, t0, t1, dt);
      if (!ws.empty() && (blocker == obstacles.count() || ws.front().begin < window.begin)) {
        blocker = j;
        window = ws.front();
      }
    }
    if (blocker == obstacles.count()) return out;

    const HyperRect& obs = obstacles.obstacles[blocker];
    std::ostringstream where;
    where << obstacles.name(blocker) << " " << obs.str() << " blocks agent " << tube.agent()
          << " during [" << window.begin << ", " << window.end << "] s";
    if (round >= max_rounds) {
      throw InfeasibleScenario("no collision-free corridor after " + std::to_string(round) +
                               " detours: " + where.str());
    }
    if (window.begin <= t0 || window.end >= t1) {
      throw InfeasibleScenario("obstacle contact at the tube start or end: " + where.str());
    }

    const double len = window.end - window.begin;
    const double pad = std::max(options.padding * len, 2.0 * dt);
    const double p0 = std::max(t0, window.begin - pad);
    const double p1 = std::min(t1, window.end + pad);
    const auto hold_grid = time_grid(window.begin, window.end, dt);
    const auto pad_grid = time_grid(p0, p1, dt);

    std::vector<Detour> candidates;
    for (std::size_t k : detour_dims) {
      const double c = options.clearance >= 0.0 ? options.clearance : default_clearance(arena, k);
      const double eps = 1e-9 * arena[k].width();
      double max_hi = -std::numeric_limits<double>::infinity();
      double min_lo = std::numeric_limits<double>::infinity();
      for (double t : hold_grid) {
        max_hi = std::max(max_hi, out.dim(k).upper(t));
        min_lo = std::min(min_lo, out.dim(k).lower(t));
      }
      const double shifts[2] = {(obs[k].lo - c - eps) - max_hi, (obs[k].hi + c + eps) - min_lo};
      for (double shift : shifts) {
        if (shift == 0.0) continue;
        bool in_arena = true;
        for (double t : pad_grid) {
          double lo, hi;
          out.dim(k).bounds(t, lo, hi);
          if (lo + shift < arena[k].lo || hi + shift > arena[k].hi) {
            in_arena = false;
            break;
          }
        }
        if (!in_arena) continue;
        Detour d;
        d.dim = k;
        d.shift = shift;
        d.tube = with_bump(out, k, shift, p0, window.begin, window.end, p1);
        const auto still = find_windows([&](double t) { return hits(d.tube, t, obs); }, p0, p1,
                                        dt);
        if (!still.empty()) continue;
        bool arena_ok = true;
        for (double t : pad_grid) {
          if (!inside(d.tube, t, arena)) {
            arena_ok = false;
            break;
          }
        }
        if (!arena_ok) continue;
        d.clean = true;
        for (std::size_t j = 0; j < obstacles.count() && d.clean; ++j) {
          for (double t : pad_grid) {
            if (hits(d.tube, t, obstacles.obstacles[j])) {
              d.clean = false;
              break;
            }
          }
        }
        candidates.push_back(std::move(d));
      }
    }
    if (candidates.empty()) {
      throw InfeasibleScenario("no detour dimension has room around the obstacle: " + where.str());
    }
    auto best = std::min_element(candidates.begin(), candidates.end(),
                                 [](const Detour& a, const Detour& b) {
                                   if (a.clean != b.clean) return a.clean;
                                   return std::abs(a.shift) < std::abs(b.shift);
                                 });
    out = std::move(best->tube);
  }
}

std::string ValidityReport::summary() const {
  std::ostringstream os;
  auto one = [&](const char* name, const PropertyCheck& c) {
    os << name << "=" << (c.ok ? "ok" : "FAIL");
    if (!c.ok) os << "@" << c.first_violation << (c.detail.empty() ? "" : " (" + c.detail + ")");
    os << " ";
  };
  one("ordered", ordered);
  one("arena", arena);
  one("start", start);
  one("end", end);
  one("obstacles", obstacles);
  return os.str();
}

ValidityReport verify_tube(const Tube& tube, const HyperRect& start, const HyperRect& target,
                           const HyperRect& arena, const ObstacleSet& obstacles, double dt_check) {
  if (!(dt_check > 0.0)) throw InvalidArgument("dt_check must be positive");
  ValidityReport r;
  const double t0 = tube.t_start();
  const double t1 = tube.horizon();

  auto mark = [](PropertyCheck& c, const std::vector<TimeWindow>& ws, std::string detail) {
    if (ws.empty()) return;
    if (!c.ok && c.first_violation <= ws.front().begin) return;
    c.ok = false;
    c.first_violation = ws.front().begin;
    c.detail = std::move(detail);
  };

  mark(r.ordered,
       find_windows(
           [&](double t) {
             for (std::size_t k = 0; k < tube.size(); ++k) {
               double lo, hi;
               tube.dim(k).bounds(t, lo, hi);
               if (!(lo < hi)) return true;
             }
             return false;
           },
           t0, t1, dt_check),
       "lower boundary meets upper boundary");

  mark(r.arena, find_windows([&](double t) { return !inside(tube, t, arena); }, t0, t1, dt_check),
       "cross-section leaves the arena");

  if (!inside(tube, t0, start)) {
    r.start.ok = false;
    r.start.first_violation = t0;
    r.start.detail = "initial cross-section not inside start set";
  }
  if (!inside(tube, t1, target)) {
    r.end.ok = false;
    r.end.first_violation = t1;
    r.end.detail = "final cross-section not inside target set";
  }
  for (std::size_t j = 0; j < obstacles.count(); ++j) {
    const auto& o = obstacles.obstacles[j];
    mark(r.obstacles, find_windows([&](double t) { return hits(tube, t, o); }, t0, t1, dt_check),
         obstacles.name(j));
  }
  return r;
}

}  // namespace sttneg
