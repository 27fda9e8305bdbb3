#include "sttneg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sttneg/errors.hpp"

namespace sttneg {

bool Interval::valid() const {
  return std::isfinite(lo) && std::isfinite(hi) && lo <= hi;
}

HyperRect::HyperRect(std::vector<Interval> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidArgument("HyperRect needs at least one dimension");
  for (const auto& iv : dims_) {
    if (!iv.valid()) throw InvalidArgument("invalid interval in HyperRect");
  }
}

HyperRect::HyperRect(std::initializer_list<Interval> dims)
    : HyperRect(std::vector<Interval>(dims)) {}

std::vector<double> HyperRect::center() const {
  std::vector<double> c(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) c[k] = dims_[k].center();
  return c;
}

bool HyperRect::contains_point(std::span<const double> x) const {
  if (x.size() != dims_.size()) throw DimensionMismatch("point/box dimension mismatch");
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (!dims_[k].contains(x[k])) return false;
  }
  return true;
}

std::string HyperRect::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (k) os << "x";
    os << "[" << dims_[k].lo << "," << dims_[k].hi << "]";
  }
  return os.str();
}

namespace {
void require_same_size(const HyperRect& a, const HyperRect& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("box dimensions differ: " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
  }
}
}  // namespace

bool intersects(const HyperRect& a, const HyperRect& b) {
  require_same_size(a, b);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k].overlaps(b[k])) return false;
  }
  return true;
}

bool contains(const HyperRect& outer, const HyperRect& inner) {
  require_same_size(outer, inner);
  for (std::size_t k = 0; k < outer.size(); ++k) {
    if (!outer[k].contains(inner[k])) return false;
  }
  return true;
}

HyperRect project(const HyperRect& r, std::span<const std::size_t> mask) {
  if (mask.empty()) throw InvalidArgument("projection mask is empty");
  std::vector<Interval> out;
  out.reserve(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] >= r.size()) throw InvalidArgument("projection index out of range");
    if (i > 0 && mask[i] <= mask[i - 1]) {
      throw InvalidArgument("projection mask must be strictly increasing");
    }
    out.push_back(r[mask[i]]);
  }
  return HyperRect(std::move(out));
}

double separation(const HyperRect& a, const HyperRect& b) {
  require_same_size(a, b);
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    gap = std::max({gap, b[k].lo - a[k].hi, a[k].lo - b[k].hi});
  }
  return gap;
}

}  // namespace sttneg
