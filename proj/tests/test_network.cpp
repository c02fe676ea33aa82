#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "monokan/certifier.hpp"
#include "monokan/network.hpp"
#include "test_support.hpp"

using namespace monokan;
using testing::identity_spline;
using testing::random_projected_model;

namespace {

MonoKanModel one_edge_model(Edge edge, double bias, BasisFunction basis) {
  MonoKanModel m;
  m.widths = {1, 1};
  m.spec = MonotonicitySpec::all_free(1);
  m.input_scaler = FeatureScaler::identity(1);
  Layer layer;
  layer.n_in = 1;
  layer.n_out = 1;
  layer.basis = basis;
  layer.edges.push_back(std::move(edge));
  layer.biases = {bias};
  m.layers.push_back(std::move(layer));
  m.validate();
  return m;
}

/// Stacks g after f: the output node of f feeds g's input edge column.
MonoKanModel stack(const MonoKanModel& f, const MonoKanModel& g) {
  MonoKanModel m;
  m.spec = f.spec;
  m.input_scaler = f.input_scaler;
  m.widths = f.widths;
  m.widths.insert(m.widths.end(), g.widths.begin() + 1, g.widths.end());
  m.layers = f.layers;
  m.layers.insert(m.layers.end(), g.layers.begin(), g.layers.end());
  m.validate();
  return m;
}

}  // namespace

TEST_CASE("basis functions are increasing and differentiable") {
  for (const BasisFunction b : {BasisFunction::Sigmoid, BasisFunction::Tanh,
                                BasisFunction::Softplus, BasisFunction::Identity}) {
    CHECK(basis_is_increasing(b));
    double prev = basis_value(b, -10.0);
    for (double x = -9.5; x <= 10.0; x += 0.5) {
      const double cur = basis_value(b, x);
      CHECK(cur > prev);
      prev = cur;
    }
    for (const double x : {-3.0, -0.5, 0.0, 1.25, 6.0}) {
      const double h = 1e-6;
      const double fd = (basis_value(b, x + h) - basis_value(b, x - h)) / (2.0 * h);
      CHECK(basis_derivative(b, x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  CHECK_FALSE(basis_is_increasing(BasisFunction::Silu));
  // silu really is non-monotone: it decreases left of its minimum near -1.28
  CHECK(basis_value(BasisFunction::Silu, -2.0) < basis_value(BasisFunction::Silu, -5.0));
}

TEST_CASE("forward computes the weighted node equation") {
  const MonoKanModel m =
      one_edge_model(Edge{identity_spline(), 2.0, 0.0}, 0.5, BasisFunction::Identity);
  CHECK(forward(m, std::vector<double>{0.5}) == 1.5);
}

TEST_CASE("forward with zero weights returns the bias") {
  const MonoKanModel m =
      one_edge_model(Edge{identity_spline(), 0.0, 0.0}, -0.75, BasisFunction::Sigmoid);
  CHECK(forward(m, std::vector<double>{123.0}) == -0.75);
}

TEST_CASE("two stacked identity layers compose to the identity") {
  const MonoKanModel f =
      one_edge_model(Edge{identity_spline(), 1.0, 0.0}, 0.0, BasisFunction::Identity);
  const MonoKanModel m = stack(f, f);
  CHECK(m.widths == std::vector<std::size_t>{1, 1, 1});
  for (const double x : {0.0, 0.25, 0.7, 1.0}) {
    CHECK(forward(m, std::vector<double>{x}) == doctest::Approx(x).epsilon(1e-15));
  }
}

TEST_CASE("forward rejects width mismatches") {
  const MonoKanModel m =
      one_edge_model(Edge{identity_spline(), 1.0, 0.0}, 0.0, BasisFunction::Identity);
  CHECK_THROWS_AS(forward(m, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("forward is deterministic") {
  const MonoKanModel m = random_projected_model(5);
  std::vector<double> x(m.input_width(), 0.37);
  const double a = forward(m, x);
  const double b = forward(m, x);
  CHECK(a == b);
}

TEST_CASE("backward: direct node-equation gradients") {
  const MonoKanModel m =
      one_edge_model(Edge{identity_spline(), 1.0, 0.0}, 0.0, BasisFunction::Identity);
  const ParamLayout layout(m);
  ForwardTape tape;
  forward(m, std::vector<double>{0.5}, &tape);
  std::vector<double> grads(layout.total(), 0.0);
  backward(m, layout, tape, 1.0, grads);
  CHECK(grads[layout.omega_phi_offset(0, 0, 0)] == 0.5);  // phi(x)
  CHECK(grads[layout.bias_offset(0, 0)] == 1.0);
}

TEST_CASE("backward matches finite differences on random architectures") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xdist(-1.5, 1.5);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> wdist(1, 5);
    std::uniform_int_distribution<std::size_t> ldist(1, 3);
    const std::size_t depth = ldist(rng);
    std::vector<std::size_t> widths;
    for (std::size_t l = 0; l < depth; ++l) widths.push_back(wdist(rng));
    widths.push_back(1);
    MonoKanModel m =
        random_projected_model(widths, MonotonicitySpec::all_free(widths.front()), 4,
                               9000 + trial);
    const ParamLayout layout(m);
    std::vector<double> x(widths.front());
    for (double& v : x) v = xdist(rng);

    ForwardTape tape;
    forward(m, x, &tape);
    std::vector<double> grads(layout.total(), 0.0);
    backward(m, layout, tape, 1.0, grads);
    const std::vector<double> fd = testing::finite_difference_gradients(m, x, 1e-6);
    double worst = 0.0;
    for (std::size_t p = 0; p < grads.size(); ++p) {
      const double scale = std::max({1e-3, std::abs(grads[p]), std::abs(fd[p])});
      worst = std::max(worst, std::abs(grads[p] - fd[p]) / scale);
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("backward rejects stale tapes") {
  const MonoKanModel m = random_projected_model({2, 2, 1}, MonotonicitySpec::all_free(2), 4, 77);
  const ParamLayout layout(m);
  ForwardTape tape;
  forward(m, std::vector<double>{0.1, 0.2}, &tape);
  tape.activations.pop_back();
  std::vector<double> grads(layout.total(), 0.0);
  CHECK_THROWS_AS(backward(m, layout, tape, 1.0, grads), std::logic_error);
}

TEST_CASE("param_count follows the closed form") {
  const MonoKanModel a = random_projected_model({1, 1}, MonotonicitySpec::all_free(1), 4, 1);
  CHECK(param_count(a) == 11);  // 1 edge * (2*4+2) + 1 bias
  const MonoKanModel b = random_projected_model({2, 1}, MonotonicitySpec::all_free(2), 2, 2);
  CHECK(param_count(b) == 13);  // 2 edges * 6 + 1 bias
  // doubling K adds exactly 2 * delta-K per edge
  const MonoKanModel c4 = random_projected_model({3, 2, 1}, MonotonicitySpec::all_free(3), 4, 3);
  const MonoKanModel c8 = random_projected_model({3, 2, 1}, MonotonicitySpec::all_free(3), 8, 3);
  const std::size_t edges = 3 * 2 + 2 * 1;
  CHECK(param_count(c8) - param_count(c4) == edges * 2 * 4);
}

TEST_CASE("composition keeps the certified directions") {
  const MonotonicitySpec inc{{Direction::Increasing}};
  const MonotonicitySpec dec{{Direction::Decreasing}};
  const MonoKanModel f_inc = random_projected_model({1, 3, 1}, inc, 8, 501);
  const MonoKanModel g_inc = random_projected_model({1, 2, 1}, inc, 8, 502);
  const MonoKanModel f_dec = random_projected_model({1, 3, 1}, dec, 8, 503);

  REQUIRE(certify(f_inc).pass);
  REQUIRE(certify(g_inc).pass);
  REQUIRE(certify(f_dec).pass);

  const MonoKanModel inc_of_inc = stack(f_inc, g_inc);
  CHECK(certify(inc_of_inc).pass);
  CHECK(falsify(inc_of_inc, 100000, 7, 2.0).violations == 0);

  const MonoKanModel inc_of_dec = stack(f_dec, g_inc);  // g(f(x)), f decreasing
  CHECK(certify(inc_of_dec).pass);
  CHECK(falsify(inc_of_dec, 100000, 7, 2.0).violations == 0);
}

TEST_CASE("logit and probability orderings agree") {
  const MonoKanModel m = random_projected_model(31);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> logits;
  for (int s = 0; s < 64; ++s) {
    std::vector<double> x(m.input_width());
    for (double& v : x) v = dist(rng);
    logits.push_back(forward(m, x));
  }
  std::vector<double> probs;
  for (const double z : logits) probs.push_back(1.0 / (1.0 + std::exp(-z)));
  std::vector<std::size_t> by_logit(logits.size()), by_prob(logits.size());
  std::iota(by_logit.begin(), by_logit.end(), 0);
  by_prob = by_logit;
  std::sort(by_logit.begin(), by_logit.end(),
            [&](std::size_t a, std::size_t b) { return logits[a] < logits[b]; });
  std::sort(by_prob.begin(), by_prob.end(),
            [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
  CHECK(by_logit == by_prob);
}
