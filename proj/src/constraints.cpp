#include "monokan/constraints.hpp"

#include <cmath>

namespace monokan {

ProjectionReport& ProjectionReport::operator+=(const ProjectionReport& o) {
  edges_touched += o.edges_touched;
  values_clamped += o.values_clamped;
  slopes_zeroed += o.slopes_zeroed;
  fritsch_rescaled += o.fritsch_rescaled;
  return *this;
}

bool ProjectionReport::empty() const {
  return edges_touched == 0 && values_clamped == 0 && slopes_zeroed == 0 &&
         fritsch_rescaled == 0;
}

ProjectionReport apply_cons(Edge& e) {
  ProjectionReport report;
  bool touched = false;
  if (e.omega_phi < 0.0) {
    e.omega_phi = 0.0;
    touched = true;
  }
  if (e.omega_b < 0.0) {
    e.omega_b = 0.0;
    touched = true;
  }
  std::vector<double>& y = e.spline.values;
  std::vector<double>& m = e.spline.slopes;
  const KnotGrid& grid = e.spline.grid;
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    if (y[k + 1] < y[k]) {
      y[k + 1] = y[k];
      ++report.values_clamped;
      touched = true;
    }
    const double d = (y[k + 1] - y[k]) / (grid[k + 1] - grid[k]);
    if (std::abs(d) <= kSecantZeroTol) {
      if (m[k] != 0.0) {
        m[k] = 0.0;
        ++report.slopes_zeroed;
        touched = true;
      }
      if (m[k + 1] != 0.0) {
        m[k + 1] = 0.0;
        ++report.slopes_zeroed;
        touched = true;
      }
    } else {
      if (m[k] < 0.0) {
        m[k] = 0.0;
        ++report.slopes_zeroed;
        touched = true;
      }
      if (m[k + 1] < 0.0) {
        m[k + 1] = 0.0;
        ++report.slopes_zeroed;
        touched = true;
      }
      double alpha = m[k] / d;
      double beta = m[k + 1] / d;
      const double r2 = alpha * alpha + beta * beta;
      // The slack keeps re-projection a bit-exact no-op: rescaling lands on
      // the boundary only up to rounding, and the monotonicity predicate
      // accepts the same margin.
      if (r2 > 9.0 + kFritschSlack) {
        const double tau = 3.0 / std::sqrt(r2);
        alpha *= tau;
        beta *= tau;
        m[k] = alpha * d;
        m[k + 1] = beta * d;
        ++report.fritsch_rescaled;
        touched = true;
      }
    }
  }
  if (touched) report.edges_touched = 1;
  return report;
}

ProjectionReport apply_cons(Layer& layer, std::size_t input) {
  ProjectionReport report;
  for (std::size_t j = 0; j < layer.n_out; ++j) report += apply_cons(layer.edge(j, input));
  return report;
}

ProjectionReport apply_cons_decreasing(Edge& e) {
  for (double& v : e.spline.values) v = -v;
  for (double& v : e.spline.slopes) v = -v;
  e.omega_b = -e.omega_b;
  const ProjectionReport report = apply_cons(e);
  for (double& v : e.spline.values) v = -v;
  for (double& v : e.spline.slopes) v = -v;
  e.omega_b = -e.omega_b;
  return report;
}

ProjectionReport apply_cons_decreasing(Layer& layer, std::size_t input) {
  ProjectionReport report;
  for (std::size_t j = 0; j < layer.n_out; ++j)
    report += apply_cons_decreasing(layer.edge(j, input));
  return report;
}

ProjectionReport project_model(MonoKanModel& m) {
  ProjectionReport report;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    Layer& layer = m.layers[l];
    if (l == 0) {
      for (std::size_t i = 0; i < layer.n_in; ++i) {
        switch (m.spec.directions[i]) {
          case Direction::Increasing: report += apply_cons(layer, i); break;
          case Direction::Decreasing: report += apply_cons_decreasing(layer, i); break;
          case Direction::Free: break;
        }
      }
    } else {
      for (std::size_t i = 0; i < layer.n_in; ++i) report += apply_cons(layer, i);
    }
  }
  return report;
}

}  // namespace monokan
