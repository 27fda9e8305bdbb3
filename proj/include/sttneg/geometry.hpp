#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sttneg {

/// Closed interval [lo, hi] on one axis.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool valid() const;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box; one closed interval per dimension.
class HyperRect {
 public:
  HyperRect() = default;
  explicit HyperRect(std::vector<Interval> dims);
  HyperRect(std::initializer_list<Interval> dims);

  std::size_t size() const { return dims_.size(); }
  const Interval& operator[](std::size_t k) const { return dims_[k]; }
  Interval& operator[](std::size_t k) { return dims_[k]; }
  const std::vector<Interval>& dims() const { return dims_; }

  std::vector<double> center() const;
  bool contains_point(std::span<const double> x) const;
  std::string str() const;

  friend bool operator==(const HyperRect&, const HyperRect&) = default;

 private:
  std::vector<Interval> dims_;
};

// Touching boundaries count as intersecting.
bool intersects(const HyperRect& a, const HyperRect& b);
bool contains(const HyperRect& outer, const HyperRect& inner);
HyperRect project(const HyperRect& r, std::span<const std::size_t> mask);

/// Chebyshev gap between two boxes: zero when they intersect, otherwise the
/// largest per-dimension separation.
double separation(const HyperRect& a, const HyperRect& b);

}  // namespace sttneg
