#include "monokan/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace monokan {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

KnotGrid::KnotGrid(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw std::invalid_argument("knot grid needs at least 2 knots");
  if (!all_finite(knots_)) throw std::invalid_argument("knot grid has non-finite entries");
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    if (!(knots_[k + 1] > knots_[k]))
      throw std::invalid_argument("knot grid must be strictly increasing");
  }
}

KnotGrid KnotGrid::uniform(double lo, double hi, std::size_t count) {
  if (count < 2) throw std::invalid_argument("knot grid needs at least 2 knots");
  if (!(hi > lo)) throw std::invalid_argument("uniform grid needs hi > lo");
  std::vector<double> xs(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) xs[k] = lo + step * static_cast<double>(k);
  xs.back() = hi;
  return KnotGrid(std::move(xs));
}

std::size_t KnotGrid::interval_of(double x) const {
  if (x <= knots_.front()) return 0;
  if (x >= knots_.back()) return knots_.size() - 2;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

HermiteBasis hermite_basis(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("hermite_basis: t outside [0,1]");
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {2.0 * t3 - 3.0 * t2 + 1.0,  // h00
          t3 - 2.0 * t2 + t,          // h10
          -2.0 * t3 + 3.0 * t2,       // h01
          t3 - t2};                   // h11
}

HermiteBasis hermite_basis_derivative(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("hermite_basis_derivative: t outside [0,1]");
  const double t2 = t * t;
  return {6.0 * t2 - 6.0 * t,        // h00'
          3.0 * t2 - 4.0 * t + 1.0,  // h10'
          -6.0 * t2 + 6.0 * t,       // h01'
          3.0 * t2 - 2.0 * t};       // h11'
}

HermiteSpline::HermiteSpline(KnotGrid g, std::vector<double> y, std::vector<double> m)
    : grid(std::move(g)), values(std::move(y)), slopes(std::move(m)) {
  if (values.size() != grid.size() || slopes.size() != grid.size())
    throw std::invalid_argument("spline values/slopes must match the knot count");
  if (!all_finite(values) || !all_finite(slopes))
    throw std::invalid_argument("spline parameters must be finite");
}

double eval(const HermiteSpline& s, double x) {
  const KnotGrid& g = s.grid;
  if (x < g.front()) return s.values.front() + s.slopes.front() * (x - g.front());
  if (x > g.back()) return s.values.back() + s.slopes.back() * (x - g.back());
  const std::size_t k = g.interval_of(x);
  const double dx = g[k + 1] - g[k];
  const HermiteBasis h = hermite_basis((x - g[k]) / dx);
  return h.h00 * s.values[k] + h.h10 * dx * s.slopes[k] + h.h01 * s.values[k + 1] +
         h.h11 * dx * s.slopes[k + 1];
}

double eval_derivative(const HermiteSpline& s, double x) {
  const KnotGrid& g = s.grid;
  if (x < g.front()) return s.slopes.front();
  if (x > g.back()) return s.slopes.back();
  const std::size_t k = g.interval_of(x);
  const double dx = g[k + 1] - g[k];
  const HermiteBasis h = hermite_basis_derivative((x - g[k]) / dx);
  // d/dx of h10(t) * dx * m_k is h10'(t) * m_k since dt/dx = 1/dx.
  return (h.h00 * s.values[k] + h.h01 * s.values[k + 1]) / dx + h.h10 * s.slopes[k] +
         h.h11 * s.slopes[k + 1];
}

SplineParamGradients param_gradients(const HermiteSpline& s, double x) {
  const std::size_t n = s.knot_count();
  SplineParamGradients out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  accumulate_param_gradients(s, x, 1.0, out.d_values, out.d_slopes);
  return out;
}

void accumulate_param_gradients(const HermiteSpline& s, double x, double weight,
                                std::span<double> d_values, std::span<double> d_slopes) {
  const KnotGrid& g = s.grid;
  if (x < g.front()) {
    d_values.front() += weight;
    d_slopes.front() += weight * (x - g.front());
    return;
  }
  if (x > g.back()) {
    d_values.back() += weight;
    d_slopes.back() += weight * (x - g.back());
    return;
  }
  const std::size_t k = g.interval_of(x);
  const double dx = g[k + 1] - g[k];
  const HermiteBasis h = hermite_basis((x - g[k]) / dx);
  d_values[k] += weight * h.h00;
  d_values[k + 1] += weight * h.h01;
  d_slopes[k] += weight * h.h10 * dx;
  d_slopes[k + 1] += weight * h.h11 * dx;
}

std::vector<double> secant_slopes(const HermiteSpline& s) {
  const std::size_t n = s.knot_count();
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k)
    d[k] = (s.values[k + 1] - s.values[k]) / (s.grid[k + 1] - s.grid[k]);
  return d;
}

std::vector<IntervalIssue> interval_issues(const HermiteSpline& s, Direction dir) {
  if (dir == Direction::Free)
    throw std::invalid_argument("monotonicity direction must be Increasing or Decreasing");
  const double sign = dir == Direction::Decreasing ? -1.0 : 1.0;
  std::vector<IntervalIssue> issues;
  const std::vector<double> d = secant_slopes(s);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double mk = s.slopes[k];
    const double mk1 = s.slopes[k + 1];
    if (sign * d[k] < -kSecantZeroTol) {
      issues.push_back({k, IntervalIssue::Kind::SecantWrongSign, d[k], 0.0});
    } else if (std::abs(d[k]) <= kSecantZeroTol) {
      if (mk != 0.0 || mk1 != 0.0)
        issues.push_back({k, IntervalIssue::Kind::FlatSlopesNotZero, mk, mk1});
    } else {
      const double alpha = mk / d[k];
      const double beta = mk1 / d[k];
      if (alpha < 0.0 || beta < 0.0) {
        issues.push_back({k, IntervalIssue::Kind::SlopeWrongSign, mk, mk1});
      } else if (alpha * alpha + beta * beta > 9.0 + kFritschSlack) {
        issues.push_back({k, IntervalIssue::Kind::OutsideFritschDisk, alpha * alpha + beta * beta, 0.0});
      }
    }
  }
  return issues;
}

bool is_monotone(const HermiteSpline& s, Direction dir) { return interval_issues(s, dir).empty(); }

}  // namespace monokan
