#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "sttneg/curve.hpp"
#include "sttneg/errors.hpp"

using namespace sttneg;

TEST(Smoothstep, EndpointsAndMidpoint) {
  EXPECT_EQ(smoothstep(-1.0), 0.0);
  EXPECT_EQ(smoothstep(0.0), 0.0);
  EXPECT_EQ(smoothstep(0.5), 0.5);
  EXPECT_EQ(smoothstep(1.0), 1.0);
  EXPECT_EQ(smoothstep(2.0), 1.0);
  EXPECT_EQ(smoothstep_slope(0.0), 0.0);
  EXPECT_EQ(smoothstep_slope(1.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothstep_slope(0.5), 1.5);
}

TEST(Term, SmoothHitsEndpointsExactly) {
  const Term t = Term::smooth(0.0, 200.0, 9.5, 9.0);
  EXPECT_EQ(t.value(0.0), 9.5);
  EXPECT_EQ(t.value(200.0), 9.0);
  EXPECT_EQ(t.value(250.0), 9.0);
  EXPECT_THROW(Term::smooth(1.0, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST(Term, LinearValueAndSlope) {
  const Term t = Term::linear(2.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(t.value(4.0), 2.0);
  EXPECT_DOUBLE_EQ(t.slope(-3.0), 0.5);
}

TEST(Term, BumpShape) {
  const Term b = Term::bump(1.0, 2.0, 4.0, 6.0, -3.0);
  EXPECT_EQ(b.value(0.5), 0.0);
  EXPECT_EQ(b.value(3.0), -3.0);
  EXPECT_EQ(b.value(7.0), 0.0);
  EXPECT_THROW(Term::bump(2.0, 1.0, 4.0, 6.0, 1.0), InvalidArgument);
}

TEST(Term, AnalyticSlopeMatchesFiniteDifference) {
  const Term terms[] = {Term::smooth(1.0, 5.0, -2.0, 3.0), Term::bump(1.0, 2.0, 4.0, 6.0, 1.5),
                        Term::linear(0.0, 1.0, -0.25), Term::constant(4.0)};
  const double h = 1e-5;
  for (const auto& term : terms) {
    for (double t = 0.0; t <= 7.0; t += 0.0137) {
      const double fd = (term.value(t + h) - term.value(t - h)) / (2 * h);
      EXPECT_NEAR(fd, term.slope(t), 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

namespace {

Segment seg(double t0, double t1, Term lo, Term hi) {
  Segment s;
  s.t0 = t0;
  s.t1 = t1;
  s.lower.terms = {lo};
  s.upper.terms = {hi};
  return s;
}

}  // namespace

TEST(BoundaryProfile, RejectsGaps) {
  EXPECT_THROW(BoundaryProfile({seg(0, 1, Term::constant(0), Term::constant(1)),
                                seg(1.5, 2, Term::constant(0), Term::constant(1))}),
               InvalidArgument);
}

TEST(BoundaryProfile, LocatesSegments) {
  BoundaryProfile p({seg(0, 1, Term::constant(0), Term::constant(1)),
                     seg(1, 2, Term::constant(5), Term::constant(6))});
  EXPECT_EQ(p.lower(0.5), 0.0);
  EXPECT_EQ(p.lower(1.0), 5.0);
  EXPECT_EQ(p.upper(2.0), 6.0);
  EXPECT_EQ(p.joints(), std::vector<double>{1.0});
}

TEST(BoundaryProfile, ClippedKeepsValues) {
  BoundaryProfile p({seg(0, 4, Term::smooth(0, 4, 0, 8), Term::smooth(0, 4, 1, 9))});
  const auto c = p.clipped(1.0, 3.0);
  EXPECT_EQ(c.t_begin(), 1.0);
  EXPECT_EQ(c.t_end(), 3.0);
  for (double t = 1.0; t <= 3.0; t += 0.1) EXPECT_EQ(c.lower(t), p.lower(t));
}

TEST(BoundaryProfile, FadeIsC1AtBothEnds) {
  auto src = std::make_shared<const BoundaryProfile>(
      BoundaryProfile({seg(0, 10, Term::linear(0, 0, 1), Term::linear(0, 1, 1))}));
  Segment head = seg(0, 4, Term::linear(0, 0, 1), Term::linear(0, 1, 1));
  Segment fade = seg(4, 5, Term::constant(3.9), Term::constant(4.9));
  fade.fade_from = src;
  fade.fade_t0 = 4;
  fade.fade_t1 = 5;
  Segment hold = seg(5, 10, Term::constant(3.9), Term::constant(4.9));
  BoundaryProfile p({head, fade, hold});
  const double h = 1e-6;
  for (double joint : {4.0, 5.0}) {
    const double left = (p.lower(joint - h) - p.lower(joint - 2 * h)) / h;
    const double right = (p.lower(joint + 2 * h) - p.lower(joint + h)) / h;
    EXPECT_NEAR(left, right, 1e-3) << "joint " << joint;
  }
  EXPECT_EQ(p.lower(5.5), 3.9);
}

TEST(BoundaryProfile, AddToBothShiftsBounds) {
  BoundaryProfile p({seg(0, 10, Term::constant(0), Term::constant(1))});
  p.add_to_both(Term::bump(2, 3, 5, 6, 2.0), 2, 6);
  EXPECT_EQ(p.lower(4.0), 2.0);
  EXPECT_EQ(p.upper(4.0), 3.0);
  EXPECT_EQ(p.lower(8.0), 0.0);
}
