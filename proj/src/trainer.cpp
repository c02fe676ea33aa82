#include "monokan/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "monokan/parallel.hpp"

namespace monokan {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Per-sample loss and d(loss)/d(pred); the batch loss is the mean.
void sample_loss(LossKind kind, double pred, double target, double& value, double& grad) {
  switch (kind) {
    case LossKind::MeanSquaredError: {
      const double e = pred - target;
      value = e * e;
      grad = 2.0 * e;
      return;
    }
    case LossKind::BinaryCrossEntropy: {
      // softplus-stabilized logistic loss on the logit
      value = std::max(pred, 0.0) - pred * target + std::log1p(std::exp(-std::abs(pred)));
      grad = sigmoid(pred) - target;
      return;
    }
  }
  throw std::invalid_argument("unknown loss kind");
}

HermiteSpline secant_slope_spline(KnotGrid grid, std::vector<double> values) {
  const std::size_t n = grid.size();
  std::vector<double> slopes(n);
  for (std::size_t k = 0; k + 1 < n; ++k)
    slopes[k] = (values[k + 1] - values[k]) / (grid[k + 1] - grid[k]);
  slopes[n - 1] = slopes[n - 2];
  return HermiteSpline(std::move(grid), std::move(values), std::move(slopes));
}

Edge make_edge(const KnotGrid& grid, Direction dir, std::mt19937_64& rng) {
  const std::size_t n = grid.size();
  std::vector<double> values(n);
  if (dir == Direction::Free) {
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    for (double& v : values) v = noise(rng);
    Edge e{secant_slope_spline(grid, std::move(values)), 1.0, 0.05};
    return e;
  }
  // Gently increasing values with jitter small enough to keep every
  // increment positive; secant slopes then sit well inside the Fritsch disk.
  std::uniform_real_distribution<double> slope_dist(0.05, 0.15);
  const double slope = slope_dist(rng);
  const double gap = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  std::uniform_real_distribution<double> jitter(-0.2 * slope * gap, 0.2 * slope * gap);
  for (std::size_t k = 0; k < n; ++k) values[k] = slope * grid[k] + jitter(rng);
  Edge e{secant_slope_spline(grid, std::move(values)), 1.0, 0.05};
  if (dir == Direction::Decreasing) {
    for (double& v : e.spline.values) v = -v;
    for (double& v : e.spline.slopes) v = -v;
    e.omega_b = -0.05;
  }
  return e;
}

struct Optimizer {
  double lr = 0.0;
  std::variant<AdamConfig, SgdConfig> kind;
  std::vector<double> m, v;  // Adam moments or SGD velocity (m only)
  std::size_t t = 0;

  Optimizer(double learning_rate, std::variant<AdamConfig, SgdConfig> k, std::size_t n)
      : lr(learning_rate), kind(k), m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double*>& params, std::span<const double> grads) {
    if (const AdamConfig* adam = std::get_if<AdamConfig>(&kind)) {
      ++t;
      const double c1 = 1.0 - std::pow(adam->beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(adam->beta2, static_cast<double>(t));
      for (std::size_t p = 0; p < params.size(); ++p) {
        m[p] = adam->beta1 * m[p] + (1.0 - adam->beta1) * grads[p];
        v[p] = adam->beta2 * v[p] + (1.0 - adam->beta2) * grads[p] * grads[p];
        *params[p] -= lr * (m[p] / c1) / (std::sqrt(v[p] / c2) + adam->epsilon);
      }
    } else {
      const SgdConfig& sgd = std::get<SgdConfig>(kind);
      for (std::size_t p = 0; p < params.size(); ++p) {
        m[p] = sgd.momentum * m[p] + grads[p];
        *params[p] -= lr * m[p];
      }
    }
  }
};

// Mean loss over the index range; gradients accumulated into grads. Chunked
// with a deterministic reduction so MONOKAN_THREADS never changes the sums.
double batch_gradients(const MonoKanModel& model, const ParamLayout& layout,
                       const Dataset& data, std::span<const std::size_t> idx,
                       LossKind kind, std::vector<double>& grads) {
  constexpr std::size_t kChunk = 64;
  const std::size_t count = idx.size();
  const std::size_t chunks = chunk_count(count, kChunk);
  std::vector<std::vector<double>> chunk_grads(chunks);
  std::vector<double> chunk_loss(chunks, 0.0);
  const double inv = 1.0 / static_cast<double>(count);

  for_each_chunk(count, kChunk, [&](std::size_t begin, std::size_t end, std::size_t c) {
    std::vector<double>& g = chunk_grads[c];
    g.assign(layout.total(), 0.0);
    ForwardTape tape;
    for (std::size_t s = begin; s < end; ++s) {
      const std::size_t row = idx[s];
      const double pred = forward(model, data.features[row], &tape);
      double value = 0.0, dpred = 0.0;
      sample_loss(kind, pred, data.targets[row], value, dpred);
      chunk_loss[c] += value;
      backward(model, layout, tape, dpred * inv, g);
    }
  });

  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += chunk_loss[c];
    const std::vector<double>& g = chunk_grads[c];
    for (std::size_t p = 0; p < grads.size(); ++p) grads[p] += g[p];
  }
  return total * inv;
}

}  // namespace

MonoKanModel init_model(const std::vector<std::size_t>& widths, MonotonicitySpec spec,
                        const GridSettings& grids, std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("widths need at least [n_0, 1]");
  for (std::size_t w : widths)
    if (w == 0) throw std::invalid_argument("layer widths must be positive");
  if (widths.back() != 1) throw std::invalid_argument("output width must be 1");
  if (spec.directions.size() != widths.front())
    throw std::invalid_argument("monotonicity spec length must equal the input width");
  if (grids.knots < 2) throw std::invalid_argument("need at least 2 knots");
  if (!(grids.input_halfwidth > 0.0) || !(grids.hidden_halfwidth > 0.0))
    throw std::invalid_argument("grid halfwidths must be positive");

  std::mt19937_64 rng(seed);
  MonoKanModel model;
  model.widths = widths;
  model.spec = std::move(spec);
  model.input_scaler = FeatureScaler::identity(widths.front());
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    layer.n_in = widths[l];
    layer.n_out = widths[l + 1];
    layer.basis = BasisFunction::Sigmoid;
    const double hw = l == 0 ? grids.input_halfwidth : grids.hidden_halfwidth;
    const KnotGrid grid = KnotGrid::uniform(-hw, hw, grids.knots);
    layer.edges.reserve(layer.n_in * layer.n_out);
    for (std::size_t j = 0; j < layer.n_out; ++j) {
      for (std::size_t i = 0; i < layer.n_in; ++i) {
        const Direction dir = l == 0 ? model.spec.directions[i] : Direction::Increasing;
        layer.edges.push_back(make_edge(grid, dir, rng));
      }
    }
    layer.biases.assign(layer.n_out, 0.0);
    model.layers.push_back(std::move(layer));
  }
  model.validate();
  return model;
}

LossValue loss(std::span<const double> pred, std::span<const double> target, LossKind kind) {
  if (pred.size() != target.size())
    throw std::invalid_argument("prediction/target length mismatch");
  if (pred.empty()) throw std::invalid_argument("loss needs at least one sample");
  if (kind == LossKind::BinaryCrossEntropy) {
    for (double t : target)
      if (t != 0.0 && t != 1.0)
        throw std::invalid_argument("binary cross-entropy targets must be 0 or 1");
  }
  const std::size_t n = pred.size();
  LossValue out{0.0, std::vector<double>(n)};
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) {
    double value = 0.0, grad = 0.0;
    sample_loss(kind, pred[s], target[s], value, grad);
    out.value += value;
    out.d_pred[s] = grad * inv;
  }
  out.value *= inv;
  return out;
}

TrainLog train(MonoKanModel& model, const Dataset& train_data, const Dataset* validation,
               const TrainConfig& cfg) {
  model.validate();
  const std::size_t n = train_data.size();
  if (n == 0) throw std::invalid_argument("training dataset is empty");
  if (train_data.width() != model.widths.front())
    throw std::invalid_argument("dataset width does not match the model");
  if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (cfg.loss == LossKind::BinaryCrossEntropy) {
    for (double t : train_data.targets)
      if (t != 0.0 && t != 1.0)
        throw std::invalid_argument("classification targets must be 0 or 1");
  }

  std::size_t batch = cfg.batch_size ? *cfg.batch_size : (n <= 4096 ? n : 256);
  if (batch == 0 || batch > n) batch = n;

  ParamLayout layout(model);
  std::vector<double*> params = layout.collect(model);
  Optimizer opt(cfg.learning_rate, cfg.optimizer, layout.total());
  std::vector<double> grads(layout.total());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);

  TrainLog log;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    if (batch < n) std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t b0 = 0; b0 < n; b0 += batch) {
      const std::size_t b1 = std::min(n, b0 + batch);
      std::fill(grads.begin(), grads.end(), 0.0);
      const double batch_loss = batch_gradients(
          model, layout, train_data, std::span(order).subspan(b0, b1 - b0), cfg.loss, grads);
      if (!std::isfinite(batch_loss)) {
        std::ostringstream os;
        os << "loss became non-finite at epoch " << epoch
           << "; the learning rate is probably too high";
        throw TrainingDiverged(os.str());
      }
      opt.step(params, grads);
      if (cfg.projection == ProjectionSchedule::PerStep) rec.projection += project_model(model);
      loss_sum += batch_loss * static_cast<double>(b1 - b0);
    }
    if (cfg.projection == ProjectionSchedule::PerEpoch) rec.projection += project_model(model);

    rec.train_loss = loss_sum / static_cast<double>(n);
    if (validation && validation->size() > 0) {
      rec.val_loss = mean_loss(model, *validation, cfg.loss);
      if (cfg.loss == LossKind::BinaryCrossEntropy)
        rec.val_accuracy = accuracy(model, *validation);
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log.epochs.push_back(rec);

    if (cfg.early_stopping && validation && validation->size() > 0) {
      if (rec.val_loss < best_val - 1e-12) {
        best_val = rec.val_loss;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        break;
      }
    }
  }
  return log;
}

std::vector<double> predict_all(const MonoKanModel& m, const Dataset& d) {
  std::vector<double> out(d.size());
  for (std::size_t s = 0; s < d.size(); ++s) out[s] = forward(m, d.features[s]);
  return out;
}

double mean_squared_error(const MonoKanModel& m, const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty dataset");
  double acc = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    const double e = forward(m, d.features[s]) - d.targets[s];
    acc += e * e;
  }
  return acc / static_cast<double>(d.size());
}

double accuracy(const MonoKanModel& m, const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty dataset");
  std::size_t hits = 0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    const bool predicted = forward(m, d.features[s]) > 0.0;
    const bool actual = d.targets[s] > 0.5;
    if (predicted == actual) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

double mean_loss(const MonoKanModel& m, const Dataset& d, LossKind kind) {
  const std::vector<double> pred = predict_all(m, d);
  return loss(pred, d.targets, kind).value;
}

}  // namespace monokan
