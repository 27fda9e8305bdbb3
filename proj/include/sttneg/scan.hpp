#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sttneg {

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

inline constexpr double kBisectionTolerance = 1e-6;

/// Uniform grid over [t0, t1] with spacing at most dt; both ends included.
inline std::vector<double> time_grid(double t0, double t1, double dt) {
  std::vector<double> g;
  if (!(t1 > t0)) {
    g.push_back(t0);
    return g;
  }
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9));
  g.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) g.push_back(t0 + (t1 - t0) * static_cast<double>(k) / n);
  g.push_back(t1);
  return g;
}

/// Bisects between a time where pred is `false_at_a` and one where it flips.
/// Returns the endpoint on the side where pred holds.
template <class Pred>
double bisect_edge(Pred&& pred, double a, double b, double tol = kBisectionTolerance) {
  const bool pa = pred(a);
  while (std::abs(b - a) > tol) {
    const double m = 0.5 * (a + b);
    if (pred(m) == pa) a = m; else b = m;
  }
  return pa ? a : b;
}

/// Maximal runs of grid samples where pred holds, with edges refined by
/// bisection against the neighbouring sample.
template <class Pred>
std::vector<TimeWindow> find_windows(Pred&& pred, double t0, double t1, double dt,
                                     double tol = kBisectionTolerance) {
  const auto grid = time_grid(t0, t1, dt);
  std::vector<char> hit(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) hit[k] = pred(grid[k]) ? 1 : 0;
  std::vector<TimeWindow> out;
  std::size_t k = 0;
  while (k < grid.size()) {
    if (!hit[k]) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e + 1 < grid.size() && hit[e + 1]) ++e;
    TimeWindow w;
    w.begin = k == 0 ? grid[0] : bisect_edge(pred, grid[k], grid[k - 1], tol);
    w.end = e + 1 == grid.size() ? grid.back() : bisect_edge(pred, grid[e], grid[e + 1], tol);
    out.push_back(w);
    k = e + 1;
  }
  return out;
}

}  // namespace sttneg
