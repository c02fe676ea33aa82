#include <cmath>

#include "doctest.h"
#include "monokan/certifier.hpp"
#include "monokan/constraints.hpp"
#include "monokan/model_io.hpp"
#include "test_support.hpp"

using namespace monokan;
using testing::random_projected_model;

TEST_CASE("projected models certify; decertified edges are located exactly") {
  MonoKanModel m = random_projected_model({3, 2, 1},
                                          MonotonicitySpec{{Direction::Increasing,
                                                            Direction::Free,
                                                            Direction::Decreasing}},
                                          4, 777);
  REQUIRE(certify(m).pass);

  SUBCASE("negative spline weight on an increasing input column, condition 1") {
    m.layers[0].edge(1, 0).omega_phi = -1.0;
    const Certificate cert = certify(m);
    REQUIRE_FALSE(cert.pass);
    REQUIRE(cert.violations.size() == 1);
    CHECK(cert.violations[0].condition == 1);
    CHECK(cert.violations[0].layer == 0);
    CHECK(cert.violations[0].output == 1);
    CHECK(cert.violations[0].input == 0);
    CHECK(cert.violations[0].observed_a == -1.0);
  }

  SUBCASE("positive omega_b on a decreasing column, condition 1") {
    m.layers[0].edge(0, 2).omega_b = 0.4;
    const Certificate cert = certify(m);
    REQUIRE_FALSE(cert.pass);
    CHECK(cert.violations[0].condition == 1);
    CHECK(cert.violations[0].input == 2);
  }

  SUBCASE("free column weights are never checked") {
    m.layers[0].edge(0, 1).omega_phi = -5.0;
    m.layers[0].edge(0, 1).spline.values = {1.0, 0.5, 0.2, -3.0};
    CHECK(certify(m).pass);
  }

  SUBCASE("hidden edge outside the Fritsch disk, condition 10") {
    Edge& e = m.layers[1].edge(0, 1);
    e.spline.values = {0.0, 1.0, 2.0, 3.0};  // secants all (3-knot gaps) positive
    const double d = secant_slopes(e.spline)[0];
    e.spline.slopes = {3.0 * d, 1.0 * d, d, d};  // alpha=3, beta=1 on interval 0
    const Certificate cert = certify(m);
    REQUIRE_FALSE(cert.pass);
    CHECK(cert.violations[0].condition == 10);
    CHECK(cert.violations[0].layer == 1);
    CHECK(cert.violations[0].interval == 0);
    CHECK(cert.violations[0].observed_a == doctest::Approx(10.0));
  }

  SUBCASE("hidden decreasing values, condition 7") {
    Edge& e = m.layers[1].edge(0, 0);
    e.spline.values = {0.0, -0.5, 0.0, 0.0};
    e.spline.slopes = {0.0, 0.0, 0.0, 0.0};
    const Certificate cert = certify(m);
    REQUIRE_FALSE(cert.pass);
    CHECK(cert.violations[0].condition == 7);
  }
}

TEST_CASE("a silu basis deserialized from a foreign file fails certification") {
  const MonoKanModel good = random_projected_model({2, 1},
                                                   MonotonicitySpec{{Direction::Increasing,
                                                                     Direction::Free}},
                                                   4, 42);
  std::string text = model_to_json(good);
  const auto at = text.find("\"sigmoid\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 9, "\"silu\"");
  const MonoKanModel loaded = model_from_json(text);
  const Certificate cert = certify(loaded);
  REQUIRE_FALSE(cert.pass);
  CHECK(cert.violations[0].condition == 0);
  CHECK(cert.violations[0].message.find("basis not monotone") != std::string::npos);
}

TEST_CASE("falsify finds nothing on certified models") {
  const MonoKanModel m = random_projected_model(1234);
  const FalsifyResult res = falsify(m, 20000, 99, 2.0);
  CHECK(res.violations == 0);
  CHECK(res.worst_gap == 0.0);
  if (m.spec.constrained_count() > 0)
    CHECK(res.checked_pairs == 20000 * m.spec.constrained_count());
}

TEST_CASE("falsify under heavy extrapolation still finds nothing") {
  const MonoKanModel m = random_projected_model(77);
  CHECK(falsify(m, 20000, 3, 10.0).violations == 0);
}

TEST_CASE("falsify catches a planted violation and reports a real pair") {
  MonoKanModel m = random_projected_model({1, 1}, MonotonicitySpec{{Direction::Increasing}},
                                          4, 4242);
  // plant a bump: steep contrary slopes well outside the disk
  Edge& e = m.layers[0].edge(0, 0);
  e.omega_phi = 1.0;
  e.spline.values = {0.0, 0.1, 0.2, 0.3};
  e.spline.slopes = {0.0, 8.0, 0.0, 0.0};  // alpha far beyond the disk: dips between knots
  REQUIRE_FALSE(certify(m).pass);
  const FalsifyResult res = falsify(m, 100000, 5, 0.5);
  REQUIRE(res.violations > 0);
  // re-confirm the worst pair is a genuine counterexample
  const double f_low = forward(m, res.worst_x);
  const double f_high = forward(m, res.worst_x_prime);
  CHECK(res.worst_x[0] < res.worst_x_prime[0]);
  CHECK(f_low > f_high + 1e-12);
  CHECK(res.worst_gap == doctest::Approx(f_high - f_low));
}

TEST_CASE("falsify on the identity model accepts both orientations") {
  MonoKanModel m = random_projected_model({1, 1}, MonotonicitySpec{{Direction::Increasing}},
                                          2, 9);
  Edge& e = m.layers[0].edge(0, 0);
  e.spline = testing::identity_spline();
  e.omega_phi = 1.0;
  e.omega_b = 0.0;
  m.layers[0].biases[0] = 0.0;
  REQUIRE(certify(m).pass);
  CHECK(falsify(m, 10000, 1, 2.0).violations == 0);
  m.spec.directions[0] = Direction::Decreasing;
  // the identity is *not* decreasing: every drawn pair violates
  const FalsifyResult res = falsify(m, 10000, 1, 2.0);
  CHECK(res.violations == 10000);
}

TEST_CASE("falsify argument validation") {
  const MonoKanModel m = random_projected_model(3);
  CHECK_THROWS_AS(falsify(m, 0, 1, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(falsify(m, 10, 1, -1.0), std::invalid_argument);
}

TEST_CASE("falsify is deterministic for a fixed seed") {
  MonoKanModel m = random_projected_model({2, 1},
                                          MonotonicitySpec{{Direction::Increasing,
                                                            Direction::Increasing}},
                                          4, 5150);
  m.layers[0].edge(0, 0).spline.slopes = {9.0, 9.0, 9.0, 9.0};  // decertify
  const FalsifyResult a = falsify(m, 50000, 123, 2.0);
  const FalsifyResult b = falsify(m, 50000, 123, 2.0);
  CHECK(a.violations == b.violations);
  CHECK(a.worst_gap == b.worst_gap);
  CHECK(a.worst_x == b.worst_x);
}
