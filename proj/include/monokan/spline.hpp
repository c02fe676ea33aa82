#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace monokan {

// Tolerances shared by the monotonicity predicate, the parameter projection
// and the certifier. A secant with |d| <= kSecantZeroTol is treated as flat.
// The Fritsch disk test accepts alpha^2 + beta^2 up to 9 + kFritschSlack so
// that slopes rescaled onto the disk boundary stay accepted after rounding.
inline constexpr double kSecantZeroTol = 1e-12;
inline constexpr double kFritschSlack = 1e-9;

enum class Direction { Increasing, Decreasing, Free };

/// Strictly increasing knot abscissae. Fixed at construction, never trained.
class KnotGrid {
public:
  explicit KnotGrid(std::vector<double> knots);

  /// `count` equally spaced knots spanning [lo, hi].
  static KnotGrid uniform(double lo, double hi, std::size_t count);

  std::size_t size() const { return knots_.size(); }
  double operator[](std::size_t k) const { return knots_[k]; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }

  /// Index k of the interval [x^k, x^{k+1}] containing x, clamped to the
  /// first/last interval when x lies outside the grid.
  std::size_t interval_of(double x) const;

private:
  std::vector<double> knots_;
};

struct HermiteBasis {
  double h00, h10, h01, h11;
};

/// The four cubic Hermite basis values at t. Throws std::domain_error for
/// t outside [0,1]; extrapolation is the spline's job, not the basis'.
HermiteBasis hermite_basis(double t);

/// d/dt of the four basis cubics.
HermiteBasis hermite_basis_derivative(double t);

/// Piecewise cubic defined by knot values y_k and knot slopes m_k, extended
/// linearly outside [x^1, x^K] with slopes m_1 and m_K so the curve is C^1
/// on the whole real line.
struct HermiteSpline {
  KnotGrid grid;
  std::vector<double> values;  // y_k
  std::vector<double> slopes;  // m_k

  HermiteSpline(KnotGrid grid, std::vector<double> values, std::vector<double> slopes);

  std::size_t knot_count() const { return grid.size(); }
};

double eval(const HermiteSpline& s, double x);
double eval_derivative(const HermiteSpline& s, double x);

/// dp/dy_k and dp/dm_k at x, as full K-length vectors. At most two entries
/// of each are nonzero (one in the extrapolation regions).
struct SplineParamGradients {
  std::vector<double> d_values;
  std::vector<double> d_slopes;
};
SplineParamGradients param_gradients(const HermiteSpline& s, double x);

/// Adds weight * dp/dy_k into d_values[k] (same for slopes). Fast path for
/// backpropagation; writes only the nonzero entries.
void accumulate_param_gradients(const HermiteSpline& s, double x, double weight,
                                std::span<double> d_values, std::span<double> d_slopes);

/// Secant slopes d_k = (y_{k+1} - y_k) / (x^{k+1} - x^k), length K-1.
std::vector<double> secant_slopes(const HermiteSpline& s);

/// One interval failing the monotonicity conditions for a direction.
struct IntervalIssue {
  enum class Kind {
    SecantWrongSign,    // d_k points against the requested direction
    FlatSlopesNotZero,  // d_k = 0 but m_k or m_{k+1} nonzero
    SlopeWrongSign,     // alpha or beta negative
    OutsideFritschDisk, // alpha^2 + beta^2 > 9 (+ slack)
  };
  std::size_t interval = 0;
  Kind kind = Kind::SecantWrongSign;
  double a = 0.0;  // observed: d_k, (m_k) or alpha^2+beta^2 depending on kind
  double b = 0.0;  // observed companion value (m_{k+1}) when applicable
};

/// Every interval violating the direction's conditions. Empty result means
/// the spline, including its linear tails, is monotone over all of R.
/// Throws std::invalid_argument when dir is Free.
std::vector<IntervalIssue> interval_issues(const HermiteSpline& s, Direction dir);

bool is_monotone(const HermiteSpline& s, Direction dir);

}  // namespace monokan
