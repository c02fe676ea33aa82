#pragma once

#include <cstddef>

#include "monokan/network.hpp"

namespace monokan {

/// What a projection pass changed, for training logs.
struct ProjectionReport {
  std::size_t edges_touched = 0;
  std::size_t values_clamped = 0;    // knot values raised by the forward sweep
  std::size_t slopes_zeroed = 0;     // slopes set to zero (flat interval or sign clamp)
  std::size_t fritsch_rescaled = 0;  // intervals rescaled onto the disk boundary

  ProjectionReport& operator+=(const ProjectionReport& o);
  bool empty() const;
};

/// In-place projection of one edge onto the increasing-feasible set:
/// clamp both weights nonnegative, sweep knot values nondecreasing, zero
/// slopes on flat intervals, clamp slopes nonnegative, rescale any interval
/// with alpha^2 + beta^2 beyond the Fritsch disk. Afterwards the spline
/// satisfies is_monotone(spline, Increasing).
ProjectionReport apply_cons(Edge& e);

/// Same projection applied to every edge fed by `input` in the layer.
ProjectionReport apply_cons(Layer& layer, std::size_t input);

/// Decreasing variant: negate values, slopes and omega_b, run apply_cons,
/// negate back. Leaves omega_phi >= 0 and omega_b <= 0 with the spline
/// satisfying is_monotone(spline, Decreasing).
ProjectionReport apply_cons_decreasing(Edge& e);
ProjectionReport apply_cons_decreasing(Layer& layer, std::size_t input);

/// Full-model projection: layer 0 columns according to the model's direction
/// tags (Free columns untouched), every column of the deeper layers. The
/// result certifies monotone; re-projecting a projected model changes no bit.
ProjectionReport project_model(MonoKanModel& m);

}  // namespace monokan
