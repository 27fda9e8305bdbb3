#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace sttneg {

/// Cubic smoothstep 3u^2 - 2u^3, clamped to [0, 1] outside u in [0, 1].
double smoothstep(double u);
double smoothstep_slope(double u);

/// One additive term of a boundary curve. Every kind is defined (and C1) on
/// the whole real line, so segments may evaluate a curve slightly outside
/// their own time range.
struct Term {
  enum class Kind { Constant, Linear, Smoothstep, Bump };

  Kind kind = Kind::Constant;
  // Constant: a.  Linear: a + b (t - t0).  Smoothstep: a -> b over [t0, t1].
  // Bump: amplitude a; rises over [t0, t1], holds, falls over [t2, t3].
  double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double a = 0.0, b = 0.0;

  static Term constant(double value);
  static Term linear(double t0, double value_at_t0, double slope);
  static Term smooth(double t0, double t1, double from, double to);
  static Term bump(double rise0, double rise1, double fall0, double fall1, double amplitude);

  double value(double t) const;
  double slope(double t) const;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Curve {
  std::vector<Term> terms;

  double value(double t) const;
  double slope(double t) const;

  friend bool operator==(const Curve&, const Curve&) = default;
};

struct Segment;

/// Time-ordered, gap-free list of segments carrying the lower and upper
/// boundary of one dimension.
class BoundaryProfile {
 public:
  BoundaryProfile() = default;
  explicit BoundaryProfile(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  std::vector<Segment>& segments() { return segments_; }
  double t_begin() const;
  double t_end() const;

  double lower(double t) const;
  double upper(double t) const;
  double lower_slope(double t) const;
  double upper_slope(double t) const;
  void bounds(double t, double& lo, double& hi) const;

  /// Segments restricted to [t0, t1]; curve parameters are untouched, only
  /// segment ranges are clipped.
  BoundaryProfile clipped(double t0, double t1) const;

  /// Adds `term` to both boundaries wherever the profile overlaps [t0, t1].
  void add_to_both(const Term& term, double t0, double t1);

  /// Joint times between consecutive segments.
  std::vector<double> joints() const;

  bool operator==(const BoundaryProfile& o) const;

 private:
  const Segment& locate(double t) const;
  std::vector<Segment> segments_;
};

/// A time slice [t0, t1) of a boundary profile. When `fade_from` is set the
/// segment blends from that profile into its own curves:
///   (1 - s) * fade_from(t) + s * curve(t),  s = smoothstep over [fade_t0, fade_t1].
struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  Curve lower;
  Curve upper;
  std::shared_ptr<const BoundaryProfile> fade_from;
  double fade_t0 = 0.0;
  double fade_t1 = 0.0;

  double lower_at(double t) const;
  double upper_at(double t) const;
  double lower_slope(double t) const;
  double upper_slope(double t) const;

  bool operator==(const Segment& o) const;
};

}  // namespace sttneg
