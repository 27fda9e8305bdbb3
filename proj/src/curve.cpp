#include "sttneg/curve.hpp"

#include <algorithm>
#include <cmath>

#include "sttneg/errors.hpp"

namespace sttneg {

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

double smoothstep_slope(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 6.0 * u * (1.0 - u);
}

Term Term::constant(double value) {
  Term t;
  t.kind = Kind::Constant;
  t.a = value;
  return t;
}

Term Term::linear(double t0, double value_at_t0, double slope) {
  Term t;
  t.kind = Kind::Linear;
  t.t0 = t0;
  t.a = value_at_t0;
  t.b = slope;
  return t;
}

Term Term::smooth(double t0, double t1, double from, double to) {
  if (!(t1 > t0)) throw InvalidArgument("smoothstep term needs t1 > t0");
  Term t;
  t.kind = Kind::Smoothstep;
  t.t0 = t0;
  t.t1 = t1;
  t.a = from;
  t.b = to;
  return t;
}

Term Term::bump(double rise0, double rise1, double fall0, double fall1, double amplitude) {
  if (!(rise0 < rise1 && rise1 <= fall0 && fall0 < fall1)) {
    throw InvalidArgument("bump term needs rise0 < rise1 <= fall0 < fall1");
  }
  Term t;
  t.kind = Kind::Bump;
  t.t0 = rise0;
  t.t1 = rise1;
  t.t2 = fall0;
  t.t3 = fall1;
  t.a = amplitude;
  return t;
}

double Term::value(double t) const {
  switch (kind) {
    case Kind::Constant:
      return a;
    case Kind::Linear:
      return a + b * (t - t0);
    case Kind::Smoothstep: {
      const double u = (t - t0) / (t1 - t0);
      if (u <= 0.0) return a;
      if (u >= 1.0) return b;
      return a + (b - a) * smoothstep(u);
    }
    case Kind::Bump:
      if (t <= t0 || t >= t3) return 0.0;
      if (t < t1) return a * smoothstep((t - t0) / (t1 - t0));
      if (t <= t2) return a;
      return a * (1.0 - smoothstep((t - t2) / (t3 - t2)));
  }
  return 0.0;
}

double Term::slope(double t) const {
  switch (kind) {
    case Kind::Constant:
      return 0.0;
    case Kind::Linear:
      return b;
    case Kind::Smoothstep:
      return (b - a) * smoothstep_slope((t - t0) / (t1 - t0)) / (t1 - t0);
    case Kind::Bump:
      if (t <= t0 || t >= t3) return 0.0;
      if (t < t1) return a * smoothstep_slope((t - t0) / (t1 - t0)) / (t1 - t0);
      if (t <= t2) return 0.0;
      return -a * smoothstep_slope((t - t2) / (t3 - t2)) / (t3 - t2);
  }
  return 0.0;
}

double Curve::value(double t) const {
  double v = 0.0;
  for (const auto& term : terms) v += term.value(t);
  return v;
}

double Curve::slope(double t) const {
  double v = 0.0;
  for (const auto& term : terms) v += term.slope(t);
  return v;
}

namespace {

struct Fade {
  double s;
  double ds;
};

Fade fade_weight(const Segment& seg, double t) {
  const double span = seg.fade_t1 - seg.fade_t0;
  const double u = (t - seg.fade_t0) / span;
  return {smoothstep(u), smoothstep_slope(u) / span};
}

}  // namespace

double Segment::lower_at(double t) const {
  if (!fade_from) return lower.value(t);
  const auto [s, ds] = fade_weight(*this, t);
  return (1.0 - s) * fade_from->lower(t) + s * lower.value(t);
}

double Segment::upper_at(double t) const {
  if (!fade_from) return upper.value(t);
  const auto [s, ds] = fade_weight(*this, t);
  return (1.0 - s) * fade_from->upper(t) + s * upper.value(t);
}

double Segment::lower_slope(double t) const {
  if (!fade_from) return lower.slope(t);
  const auto [s, ds] = fade_weight(*this, t);
  return -ds * fade_from->lower(t) + (1.0 - s) * fade_from->lower_slope(t) +
         ds * lower.value(t) + s * lower.slope(t);
}

double Segment::upper_slope(double t) const {
  if (!fade_from) return upper.slope(t);
  const auto [s, ds] = fade_weight(*this, t);
  return -ds * fade_from->upper(t) + (1.0 - s) * fade_from->upper_slope(t) +
         ds * upper.value(t) + s * upper.slope(t);
}

bool Segment::operator==(const Segment& o) const {
  if (t0 != o.t0 || t1 != o.t1 || lower != o.lower || upper != o.upper) return false;
  if (static_cast<bool>(fade_from) != static_cast<bool>(o.fade_from)) return false;
  if (!fade_from) return true;
  return fade_t0 == o.fade_t0 && fade_t1 == o.fade_t1 && *fade_from == *o.fade_from;
}

BoundaryProfile::BoundaryProfile(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidArgument("boundary profile needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.t1 >= s.t0)) throw InvalidArgument("segment with t1 < t0");
    if (s.fade_from && !(s.fade_t1 > s.fade_t0)) {
      throw InvalidArgument("fade window must have positive length");
    }
    if (i > 0 && segments_[i - 1].t1 != s.t0) {
      throw InvalidArgument("boundary profile segments must be contiguous");
    }
  }
}

double BoundaryProfile::t_begin() const { return segments_.front().t0; }
double BoundaryProfile::t_end() const { return segments_.back().t1; }

const Segment& BoundaryProfile::locate(double t) const {
  // Half-open [t0, t1) except the final segment, which is closed.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t1; });
  if (it == segments_.end()) return segments_.back();
  return *it;
}

double BoundaryProfile::lower(double t) const { return locate(t).lower_at(t); }
double BoundaryProfile::upper(double t) const { return locate(t).upper_at(t); }
double BoundaryProfile::lower_slope(double t) const { return locate(t).lower_slope(t); }
double BoundaryProfile::upper_slope(double t) const { return locate(t).upper_slope(t); }

void BoundaryProfile::bounds(double t, double& lo, double& hi) const {
  const Segment& s = locate(t);
  lo = s.lower_at(t);
  hi = s.upper_at(t);
}

BoundaryProfile BoundaryProfile::clipped(double t0, double t1) const {
  if (t1 < t0) throw InvalidArgument("clip range reversed");
  std::vector<Segment> out;
  for (const auto& s : segments_) {
    if (s.t1 <= t0 || s.t0 >= t1) continue;
    Segment c = s;
    c.t0 = std::max(c.t0, t0);
    c.t1 = std::min(c.t1, t1);
    out.push_back(std::move(c));
  }
  if (out.empty()) {
    Segment c = locate(t0);
    c.t0 = t0;
    c.t1 = t1;
    out.push_back(std::move(c));
  }
  out.front().t0 = t0;
  out.back().t1 = t1;
  return BoundaryProfile(std::move(out));
}

void BoundaryProfile::add_to_both(const Term& term, double t0, double t1) {
  for (auto& s : segments_) {
    if (s.t1 < t0 || s.t0 > t1) continue;
    s.lower.terms.push_back(term);
    s.upper.terms.push_back(term);
    if (s.fade_from) {
      auto nested = std::make_shared<BoundaryProfile>(*s.fade_from);
      nested->add_to_both(term, t0, t1);
      s.fade_from = std::move(nested);
    }
  }
}

std::vector<double> BoundaryProfile::joints() const {
  std::vector<double> j;
  for (std::size_t i = 1; i < segments_.size(); ++i) j.push_back(segments_[i].t0);
  return j;
}

bool BoundaryProfile::operator==(const BoundaryProfile& o) const {
  return segments_ == o.segments_;
}

}  // namespace sttneg
