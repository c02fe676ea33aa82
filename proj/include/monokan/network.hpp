#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "monokan/spline.hpp"

namespace monokan {

/// Fixed activation added on every edge next to the learnable spline.
/// Sigmoid/Tanh/Softplus/Identity are the trainable surface; they are all
/// strictly increasing. Silu exists only so that foreign model files can be
/// deserialized and then rejected by the certifier.
enum class BasisFunction { Sigmoid, Tanh, Softplus, Identity, Silu };

double basis_value(BasisFunction b, double x);
double basis_derivative(BasisFunction b, double x);
bool basis_is_increasing(BasisFunction b);
std::string basis_name(BasisFunction b);

/// One connection: a learnable spline phi plus scalar weights for the spline
/// and the shared basis function.
struct Edge {
  HermiteSpline spline;
  double omega_phi = 1.0;
  double omega_b = 0.0;
};

struct Layer {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  std::vector<Edge> edges;     // row-major: edges[j * n_in + i]
  std::vector<double> biases;  // theta, one per output node
  BasisFunction basis = BasisFunction::Sigmoid;

  Edge& edge(std::size_t j, std::size_t i) { return edges[j * n_in + i]; }
  const Edge& edge(std::size_t j, std::size_t i) const { return edges[j * n_in + i]; }
};

/// Per-input-feature monotonicity tags, one per model input.
struct MonotonicitySpec {
  std::vector<Direction> directions;

  static MonotonicitySpec all_free(std::size_t n);
  std::size_t constrained_count() const;
};

/// Per-feature affine standardization: scaled = (raw - shift) / scale.
/// Scales are strictly positive, so direction tags mean the same thing for
/// raw and scaled features.
struct FeatureScaler {
  std::vector<double> shift;
  std::vector<double> scale;

  static FeatureScaler identity(std::size_t n);
  std::vector<double> apply(std::span<const double> raw) const;
};

struct MonoKanModel {
  std::vector<Layer> layers;
  std::vector<std::size_t> widths;  // [n_0, ..., n_L]; n_L == 1
  MonotonicitySpec spec;            // length n_0
  FeatureScaler input_scaler;

  std::size_t input_width() const { return widths.front(); }
  std::size_t layer_count() const { return layers.size(); }

  /// Throws std::invalid_argument on any shape inconsistency.
  void validate() const;
};

/// Activation record from a forward pass: activations[l] is the input to
/// layer l, activations[L] the model output vector.
struct ForwardTape {
  std::vector<std::vector<double>> activations;
};

/// Forward pass. x must already be in the model's standardized scale.
double forward(const MonoKanModel& m, std::span<const double> x, ForwardTape* tape = nullptr);

/// Applies the stored input scaler, then forward.
double predict_raw(const MonoKanModel& m, std::span<const double> raw);

/// Flat addressing for every trainable parameter. Order (fixed): for each
/// layer, for each edge row-major, values then slopes then omega_phi then
/// omega_b; then the layer's biases.
class ParamLayout {
public:
  explicit ParamLayout(const MonoKanModel& m);

  std::size_t total() const { return total_; }
  std::size_t values_offset(std::size_t l, std::size_t j, std::size_t i) const;
  std::size_t slopes_offset(std::size_t l, std::size_t j, std::size_t i) const;
  std::size_t omega_phi_offset(std::size_t l, std::size_t j, std::size_t i) const;
  std::size_t omega_b_offset(std::size_t l, std::size_t j, std::size_t i) const;
  std::size_t bias_offset(std::size_t l, std::size_t j) const;
  std::size_t knots(std::size_t l, std::size_t j, std::size_t i) const;

  /// Pointers to every parameter of m in layout order. m must have the same
  /// shape the layout was built from.
  std::vector<double*> collect(MonoKanModel& m) const;

private:
  struct EdgeEntry {
    std::size_t base = 0;
    std::size_t knot_count = 0;
  };
  std::vector<std::vector<EdgeEntry>> edges_;  // [l][j * n_in + i]
  std::vector<std::size_t> n_in_;
  std::vector<std::size_t> bias_base_;
  std::size_t total_ = 0;
};

/// Reverse-mode gradients of upstream * output w.r.t. every parameter,
/// accumulated into grads (size layout.total()). The tape must come from
/// forward() on this very model; a shape mismatch throws std::logic_error.
void backward(const MonoKanModel& m, const ParamLayout& layout, const ForwardTape& tape,
              double upstream, std::span<double> grads);

/// Trainable parameter count: 2K + 2 per edge plus one bias per output node.
std::size_t param_count(const MonoKanModel& m);

}  // namespace monokan
