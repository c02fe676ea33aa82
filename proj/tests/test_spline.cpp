#include <cmath>
#include <random>

#include "doctest.h"
#include "monokan/spline.hpp"
#include "test_support.hpp"

using namespace monokan;
using testing::identity_spline;

TEST_CASE("knot grid validation") {
  CHECK_THROWS_AS(KnotGrid({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(KnotGrid({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(KnotGrid({1.0, 0.0}), std::invalid_argument);
  const KnotGrid g = KnotGrid::uniform(-1.0, 1.0, 5);
  CHECK(g.size() == 5);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  CHECK(g.interval_of(-2.0) == 0);
  CHECK(g.interval_of(-1.0) == 0);
  CHECK(g.interval_of(0.75) == 3);
  CHECK(g.interval_of(1.0) == 3);
  CHECK(g.interval_of(3.0) == 3);
}

TEST_CASE("hermite basis endpoint identities and midpoint") {
  const HermiteBasis at0 = hermite_basis(0.0);
  CHECK(at0.h00 == 1.0);
  CHECK(at0.h10 == 0.0);
  CHECK(at0.h01 == 0.0);
  CHECK(at0.h11 == 0.0);

  const HermiteBasis at1 = hermite_basis(1.0);
  CHECK(at1.h00 == 0.0);
  CHECK(at1.h10 == 0.0);
  CHECK(at1.h01 == 1.0);
  CHECK(at1.h11 == 0.0);

  // midpoint values are dyadic, so the comparison is exact
  const HermiteBasis mid = hermite_basis(0.5);
  CHECK(mid.h00 == 0.5);
  CHECK(mid.h10 == 0.125);
  CHECK(mid.h01 == 0.5);
  CHECK(mid.h11 == -0.125);

  CHECK_THROWS_AS(hermite_basis(-0.001), std::domain_error);
  CHECK_THROWS_AS(hermite_basis(1.001), std::domain_error);
}

TEST_CASE("spline construction validation") {
  CHECK_THROWS_AS(HermiteSpline(KnotGrid({0.0, 1.0}), {0.0}, {0.0, 0.0}),
                  std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(HermiteSpline(KnotGrid({0.0, 1.0}), {0.0, inf}, {0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("eval reproduces the identity and extrapolates linearly") {
  const HermiteSpline s = identity_spline();
  CHECK(eval(s, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(eval(s, 2.0) == 2.0);    // right tail: y_K + m_K (x - x^K)
  CHECK(eval(s, -3.0) == -3.0);  // left tail
  CHECK(eval(s, 0.0) == 0.0);
  CHECK(eval(s, 1.0) == 1.0);
}

TEST_CASE("eval with zero slopes at the midpoint") {
  const HermiteSpline s(KnotGrid({0.0, 1.0}), {0.0, 1.0}, {0.0, 0.0});
  CHECK(eval(s, 0.5) == 0.5);  // h00(.5)*0 + h01(.5)*1, dyadic
}

TEST_CASE("eval_derivative matches knots, tails and the midpoint") {
  const HermiteSpline id = identity_spline();
  for (const double x : {-1.0, 0.0, 1.0, 4.0}) CHECK(eval_derivative(id, x) == 1.0);
  for (const double x : {0.25, 0.9})
    CHECK(eval_derivative(id, x) == doctest::Approx(1.0).epsilon(1e-15));

  const HermiteSpline s(KnotGrid({0.0, 1.0}), {0.0, 1.0}, {0.0, 0.0});
  CHECK(eval_derivative(s, 0.0) == 0.0);
  CHECK(eval_derivative(s, 1.0) == 0.0);
  CHECK(eval_derivative(s, 0.5) == doctest::Approx(1.5).epsilon(1e-15));

  // derivative oracle: central finite difference of eval
  const double h = 1e-6;
  const double fd = (eval(s, 0.5 + h) - eval(s, 0.5 - h)) / (2.0 * h);
  CHECK(eval_derivative(s, 0.5) == doctest::Approx(fd).epsilon(1e-9));
}

TEST_CASE("param_gradients matches the basis at the midpoint") {
  const HermiteSpline s = identity_spline();
  const SplineParamGradients g = param_gradients(s, 0.5);
  CHECK(g.d_values[0] == 0.5);
  CHECK(g.d_values[1] == 0.5);
  CHECK(g.d_slopes[0] == 0.125);
  CHECK(g.d_slopes[1] == -0.125);
}

TEST_CASE("param_gradients at a knot and in the tails") {
  const HermiteSpline s(KnotGrid({0.0, 0.5, 1.0}), {0.0, 0.2, 1.0}, {0.5, 0.5, 0.5});
  const SplineParamGradients at_knot = param_gradients(s, 0.5);
  CHECK(at_knot.d_values[1] == 1.0);
  CHECK(at_knot.d_values[0] == 0.0);
  CHECK(at_knot.d_values[2] == 0.0);
  CHECK(at_knot.d_slopes[1] == 0.0);

  const SplineParamGradients left = param_gradients(s, -1.0);
  CHECK(left.d_values[0] == 1.0);
  CHECK(left.d_slopes[0] == -1.0);
  CHECK(left.d_values[1] == 0.0);

  const SplineParamGradients right = param_gradients(s, 1.75);
  CHECK(right.d_values[2] == 1.0);
  CHECK(right.d_slopes[2] == 0.75);
}

TEST_CASE("param_gradients agrees with finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xdist(-3.0, 3.0);
  std::uniform_real_distribution<double> ydist(-2.0, 2.0);
  const KnotGrid grid = KnotGrid::uniform(-1.0, 1.0, 6);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> values(6), slopes(6);
    for (double& v : values) v = ydist(rng);
    for (double& v : slopes) v = ydist(rng);
    HermiteSpline s(grid, values, slopes);
    for (int probe = 0; probe < 100; ++probe) {
      const double x = xdist(rng);
      const SplineParamGradients g = param_gradients(s, x);
      const double h = 1e-6;
      for (std::size_t k = 0; k < 6; ++k) {
        const double saved = s.values[k];
        s.values[k] = saved + h;
        const double up = eval(s, x);
        s.values[k] = saved - h;
        const double down = eval(s, x);
        s.values[k] = saved;
        const double fd = (up - down) / (2.0 * h);
        CHECK(g.d_values[k] == doctest::Approx(fd).epsilon(1e-6));
        const double ms = s.slopes[k];
        s.slopes[k] = ms + h;
        const double up2 = eval(s, x);
        s.slopes[k] = ms - h;
        const double down2 = eval(s, x);
        s.slopes[k] = ms;
        const double fd2 = (up2 - down2) / (2.0 * h);
        CHECK(g.d_slopes[k] == doctest::Approx(fd2).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("eval is linear in the parameters") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const KnotGrid grid = KnotGrid::uniform(0.0, 2.0, 4);
  std::vector<double> values{0.1, -0.4, 0.9, 1.2}, slopes{0.3, -1.0, 0.2, 0.0};
  for (int trial = 0; trial < 50; ++trial) {
    HermiteSpline s(grid, values, slopes);
    const double x = dist(rng) + 1.0;
    const double delta = dist(rng);
    const std::size_t k = static_cast<std::size_t>(trial) % 4;
    const SplineParamGradients g = param_gradients(s, x);
    const double base = eval(s, x);
    s.values[k] += delta;
    CHECK(eval(s, x) - base == doctest::Approx(delta * g.d_values[k]).epsilon(1e-12));
    s.values[k] -= delta;
    s.slopes[k] += delta;
    CHECK(eval(s, x) - base == doctest::Approx(delta * g.d_slopes[k]).epsilon(1e-12));
    s.slopes[k] -= delta;
  }
}

TEST_CASE("secant slopes") {
  CHECK(secant_slopes(identity_spline()) == std::vector<double>{1.0});
  const HermiteSpline flat(KnotGrid({0.0, 2.0, 5.0}), {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
  CHECK(secant_slopes(flat) == std::vector<double>{0.0, 0.0});
  const HermiteSpline s(KnotGrid({0.0, 1.0, 3.0}), {0.0, 1.0, 1.5}, {0.0, 0.0, 0.0});
  const std::vector<double> d = secant_slopes(s);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 0.25);
}

TEST_CASE("interpolation and C1 invariants on a general spline") {
  const KnotGrid grid({-1.0, -0.25, 0.5, 2.0});
  const HermiteSpline s(grid, {0.4, -0.3, 0.8, 0.9}, {1.2, -0.5, 0.0, 2.0});
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(eval(s, grid[k]) == doctest::Approx(s.values[k]).epsilon(1e-12));
    CHECK(eval_derivative(s, grid[k]) == doctest::Approx(s.slopes[k]).epsilon(1e-12));
  }
  // seams: interval boundaries and the extrapolation joints
  const double eps = 1e-11;
  for (const double seam : {-1.0, -0.25, 0.5, 2.0}) {
    CHECK(eval(s, seam - eps) == doctest::Approx(eval(s, seam + eps)).epsilon(1e-9));
    CHECK(eval_derivative(s, seam - eps) ==
          doctest::Approx(eval_derivative(s, seam + eps)).epsilon(1e-9));
  }
}

TEST_CASE("is_monotone rejects Free and applies the Fritsch conditions") {
  const HermiteSpline id = identity_spline();
  CHECK_THROWS_AS(is_monotone(id, Direction::Free), std::invalid_argument);
  CHECK(is_monotone(id, Direction::Increasing));
  CHECK_FALSE(is_monotone(id, Direction::Decreasing));

  // alpha^2 + beta^2 = 10 > 9
  const HermiteSpline hot(KnotGrid({0.0, 1.0}), {0.0, 1.0}, {3.0, 1.0});
  CHECK_FALSE(is_monotone(hot, Direction::Increasing));
  const auto issues = interval_issues(hot, Direction::Increasing);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == IntervalIssue::Kind::OutsideFritschDisk);
  CHECK(issues[0].a == doctest::Approx(10.0));

  // sign-flipped identity is decreasing
  const HermiteSpline down(KnotGrid({0.0, 1.0}), {1.0, 0.0}, {-1.0, -1.0});
  CHECK(is_monotone(down, Direction::Decreasing));
  CHECK_FALSE(is_monotone(down, Direction::Increasing));

  // flat data demands zero slopes
  const HermiteSpline flat_bad(KnotGrid({0.0, 1.0}), {0.5, 0.5}, {0.1, 0.0});
  CHECK_FALSE(is_monotone(flat_bad, Direction::Increasing));
  const HermiteSpline flat_ok(KnotGrid({0.0, 1.0}), {0.5, 0.5}, {0.0, 0.0});
  CHECK(is_monotone(flat_ok, Direction::Increasing));
  CHECK(is_monotone(flat_ok, Direction::Decreasing));

  // negative slope against increasing data
  const HermiteSpline bad_slope(KnotGrid({0.0, 1.0}), {0.0, 1.0}, {-0.1, 1.0});
  CHECK_FALSE(is_monotone(bad_slope, Direction::Increasing));
}

TEST_CASE("Fritsch boundary case alpha^2 + beta^2 == 9 is accepted") {
  const double m = 3.0 / std::sqrt(2.0);
  const HermiteSpline s(KnotGrid({0.0, 1.0}), {0.0, 1.0}, {m, m});
  CHECK(is_monotone(s, Direction::Increasing));
}

TEST_CASE("monotone certificate soundness over random pairs") {
  // flat start, a steep middle interval, then a slow tail; every interval
  // satisfies the disk condition with alpha^2 + beta^2 up to 8.1
  const HermiteSpline s(KnotGrid({-1.0, -0.2, 0.1, 1.0}), {-0.5, -0.5, 0.3, 0.35},
                        {0.0, 0.0, 0.15, 0.05});
  REQUIRE(is_monotone(s, Direction::Increasing));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int pair = 0; pair < 100000; ++pair) {
    double a = dist(rng), b = dist(rng);
    if (b < a) std::swap(a, b);
    CHECK(eval(s, a) <= eval(s, b) + 1e-12);
  }
}
