#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "monokan/constraints.hpp"
#include "monokan/dataio.hpp"
#include "monokan/network.hpp"

namespace monokan {

enum class LossKind { MeanSquaredError, BinaryCrossEntropy };
enum class ProjectionSchedule { PerStep, PerEpoch };

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct SgdConfig {
  double momentum = 0.0;
};

struct TrainConfig {
  std::size_t max_epochs = 200;
  /// nullopt: full batch up to 4096 rows, 256 beyond. 0: force full batch.
  std::optional<std::size_t> batch_size;
  double learning_rate = 1e-2;
  std::variant<AdamConfig, SgdConfig> optimizer = AdamConfig{};
  std::uint64_t seed = 0;
  ProjectionSchedule projection = ProjectionSchedule::PerStep;
  LossKind loss = LossKind::MeanSquaredError;
  bool early_stopping = false;
  std::size_t patience = 20;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double val_accuracy = std::numeric_limits<double>::quiet_NaN();
  ProjectionReport projection;  // accumulated over the epoch
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
};

/// Raised when the loss turns non-finite mid-training (exit code 3 in the
/// CLI). Usually means the learning rate is too high.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSettings {
  std::size_t knots = 8;
  double input_halfwidth = 1.0;   // layer-0 grids span [-w, w]
  double hidden_halfwidth = 2.0;  // deeper grids span [-w, w]
};

/// Seeded feasible initialization: constrained edges get gently increasing
/// values with secant slopes (well inside the Fritsch disk), omega_phi = 1,
/// omega_b = 0.05 (sign-flipped for decreasing columns); free edges get
/// zero-mean value noise. Projecting the result reports zero mutations.
MonoKanModel init_model(const std::vector<std::size_t>& widths, MonotonicitySpec spec,
                        const GridSettings& grids, std::uint64_t seed);

struct LossValue {
  double value = 0.0;
  std::vector<double> d_pred;
};

/// MSE or softplus-stabilized logistic loss on logits, with analytic
/// gradients w.r.t. the predictions. BCE targets must be 0 or 1.
LossValue loss(std::span<const double> pred, std::span<const double> target, LossKind kind);

/// Algorithm loop: per batch, accumulate reverse-mode gradients, take an
/// optimizer step, project back onto the feasible set (per step or per
/// epoch). The model is updated in place; features must already be scaled.
TrainLog train(MonoKanModel& m, const Dataset& train_data, const Dataset* validation,
               const TrainConfig& cfg);

// ---- evaluation helpers (features must be scaled) ----
std::vector<double> predict_all(const MonoKanModel& m, const Dataset& d);
double mean_squared_error(const MonoKanModel& m, const Dataset& d);
double accuracy(const MonoKanModel& m, const Dataset& d);
double mean_loss(const MonoKanModel& m, const Dataset& d, LossKind kind);

}  // namespace monokan
