#include "monokan/network.hpp"

#include <cmath>
#include <stdexcept>

namespace monokan {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double basis_value(BasisFunction b, double x) {
  switch (b) {
    case BasisFunction::Sigmoid: return sigmoid(x);
    case BasisFunction::Tanh: return std::tanh(x);
    case BasisFunction::Softplus: return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
    case BasisFunction::Identity: return x;
    case BasisFunction::Silu: return x * sigmoid(x);
  }
  throw std::invalid_argument("unknown basis function");
}

double basis_derivative(BasisFunction b, double x) {
  switch (b) {
    case BasisFunction::Sigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case BasisFunction::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case BasisFunction::Softplus: return sigmoid(x);
    case BasisFunction::Identity: return 1.0;
    case BasisFunction::Silu: {
      const double s = sigmoid(x);
      return s + x * s * (1.0 - s);
    }
  }
  throw std::invalid_argument("unknown basis function");
}

bool basis_is_increasing(BasisFunction b) { return b != BasisFunction::Silu; }

std::string basis_name(BasisFunction b) {
  switch (b) {
    case BasisFunction::Sigmoid: return "sigmoid";
    case BasisFunction::Tanh: return "tanh";
    case BasisFunction::Softplus: return "softplus";
    case BasisFunction::Identity: return "identity";
    case BasisFunction::Silu: return "silu";
  }
  return "?";
}

MonotonicitySpec MonotonicitySpec::all_free(std::size_t n) {
  return MonotonicitySpec{std::vector<Direction>(n, Direction::Free)};
}

std::size_t MonotonicitySpec::constrained_count() const {
  std::size_t c = 0;
  for (Direction d : directions)
    if (d != Direction::Free) ++c;
  return c;
}

FeatureScaler FeatureScaler::identity(std::size_t n) {
  return FeatureScaler{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
}

std::vector<double> FeatureScaler::apply(std::span<const double> raw) const {
  if (raw.size() != shift.size())
    throw std::invalid_argument("scaler width does not match the input");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - shift[i]) / scale[i];
  return out;
}

void MonoKanModel::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("model needs at least one layer");
  if (widths.back() != 1) throw std::invalid_argument("model output width must be 1");
  if (layers.size() + 1 != widths.size())
    throw std::invalid_argument("layer count does not match the widths");
  if (spec.directions.size() != widths.front())
    throw std::invalid_argument("monotonicity spec length must equal the input width");
  if (input_scaler.shift.size() != widths.front() ||
      input_scaler.scale.size() != widths.front())
    throw std::invalid_argument("input scaler width must equal the input width");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.n_in != widths[l] || layer.n_out != widths[l + 1])
      throw std::invalid_argument("layer shape does not match the widths");
    if (layer.edges.size() != layer.n_in * layer.n_out)
      throw std::invalid_argument("edge matrix is not rectangular");
    if (layer.biases.size() != layer.n_out)
      throw std::invalid_argument("bias length must equal the output width");
  }
}

double forward(const MonoKanModel& m, std::span<const double> x, ForwardTape* tape) {
  if (x.size() != m.widths.front())
    throw std::invalid_argument("input width does not match the model");
  std::vector<double> cur(x.begin(), x.end());
  if (tape) {
    tape->activations.clear();
    tape->activations.push_back(cur);
  }
  std::vector<double> bvals;
  for (const Layer& layer : m.layers) {
    bvals.resize(layer.n_in);
    for (std::size_t i = 0; i < layer.n_in; ++i) bvals[i] = basis_value(layer.basis, cur[i]);
    std::vector<double> next(layer.n_out);
    for (std::size_t j = 0; j < layer.n_out; ++j) {
      double acc = layer.biases[j];
      for (std::size_t i = 0; i < layer.n_in; ++i) {
        const Edge& e = layer.edge(j, i);
        acc += e.omega_phi * eval(e.spline, cur[i]) + e.omega_b * bvals[i];
      }
      next[j] = acc;
    }
    cur = std::move(next);
    if (tape) tape->activations.push_back(cur);
  }
  return cur.front();
}

double predict_raw(const MonoKanModel& m, std::span<const double> raw) {
  return forward(m, m.input_scaler.apply(raw));
}

ParamLayout::ParamLayout(const MonoKanModel& m) {
  edges_.resize(m.layers.size());
  n_in_.resize(m.layers.size());
  bias_base_.resize(m.layers.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const Layer& layer = m.layers[l];
    n_in_[l] = layer.n_in;
    edges_[l].reserve(layer.edges.size());
    for (const Edge& e : layer.edges) {
      const std::size_t knots = e.spline.knot_count();
      edges_[l].push_back({offset, knots});
      offset += 2 * knots + 2;
    }
    bias_base_[l] = offset;
    offset += layer.n_out;
  }
  total_ = offset;
}

std::size_t ParamLayout::values_offset(std::size_t l, std::size_t j, std::size_t i) const {
  return edges_[l][j * n_in_[l] + i].base;
}

std::size_t ParamLayout::slopes_offset(std::size_t l, std::size_t j, std::size_t i) const {
  const EdgeEntry& e = edges_[l][j * n_in_[l] + i];
  return e.base + e.knot_count;
}

std::size_t ParamLayout::omega_phi_offset(std::size_t l, std::size_t j, std::size_t i) const {
  const EdgeEntry& e = edges_[l][j * n_in_[l] + i];
  return e.base + 2 * e.knot_count;
}

std::size_t ParamLayout::omega_b_offset(std::size_t l, std::size_t j, std::size_t i) const {
  const EdgeEntry& e = edges_[l][j * n_in_[l] + i];
  return e.base + 2 * e.knot_count + 1;
}

std::size_t ParamLayout::bias_offset(std::size_t l, std::size_t j) const {
  return bias_base_[l] + j;
}

std::size_t ParamLayout::knots(std::size_t l, std::size_t j, std::size_t i) const {
  return edges_[l][j * n_in_[l] + i].knot_count;
}

std::vector<double*> ParamLayout::collect(MonoKanModel& m) const {
  std::vector<double*> out(total_, nullptr);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    Layer& layer = m.layers[l];
    for (std::size_t je = 0; je < layer.edges.size(); ++je) {
      Edge& e = layer.edges[je];
      std::size_t at = edges_[l][je].base;
      if (edges_[l][je].knot_count != e.spline.knot_count())
        throw std::logic_error("parameter layout no longer matches the model");
      for (double& v : e.spline.values) out[at++] = &v;
      for (double& v : e.spline.slopes) out[at++] = &v;
      out[at++] = &e.omega_phi;
      out[at++] = &e.omega_b;
    }
    std::size_t at = bias_base_[l];
    for (double& v : layer.biases) out[at++] = &v;
  }
  return out;
}

void backward(const MonoKanModel& m, const ParamLayout& layout, const ForwardTape& tape,
              double upstream, std::span<double> grads) {
  if (tape.activations.size() != m.layers.size() + 1)
    throw std::logic_error("tape depth does not match the model");
  for (std::size_t l = 0; l <= m.layers.size(); ++l)
    if (tape.activations[l].size() != m.widths[l])
      throw std::logic_error("tape widths do not match the model");
  if (grads.size() != layout.total())
    throw std::logic_error("gradient buffer does not match the layout");

  std::vector<double> g{upstream};
  for (std::size_t l = m.layers.size(); l-- > 0;) {
    const Layer& layer = m.layers[l];
    const std::vector<double>& xin = tape.activations[l];
    std::vector<double> gprev(layer.n_in, 0.0);
    for (std::size_t j = 0; j < layer.n_out; ++j) {
      const double gj = g[j];
      grads[layout.bias_offset(l, j)] += gj;
      for (std::size_t i = 0; i < layer.n_in; ++i) {
        const Edge& e = layer.edge(j, i);
        const double xi = xin[i];
        grads[layout.omega_phi_offset(l, j, i)] += gj * eval(e.spline, xi);
        grads[layout.omega_b_offset(l, j, i)] += gj * basis_value(layer.basis, xi);
        const std::size_t kc = layout.knots(l, j, i);
        accumulate_param_gradients(e.spline, xi, gj * e.omega_phi,
                                   grads.subspan(layout.values_offset(l, j, i), kc),
                                   grads.subspan(layout.slopes_offset(l, j, i), kc));
        gprev[i] += gj * (e.omega_phi * eval_derivative(e.spline, xi) +
                          e.omega_b * basis_derivative(layer.basis, xi));
      }
    }
    g = std::move(gprev);
  }
}

std::size_t param_count(const MonoKanModel& m) {
  std::size_t count = 0;
  for (const Layer& layer : m.layers) {
    for (const Edge& e : layer.edges) count += 2 * e.spline.knot_count() + 2;
    count += layer.n_out;
  }
  return count;
}

}  // namespace monokan
