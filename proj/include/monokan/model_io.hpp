#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "monokan/certifier.hpp"
#include "monokan/network.hpp"
#include "monokan/trainer.hpp"

namespace monokan {

inline constexpr const char* kModelSchemaVersion = "monokan-model-v1";

/// Model file round trips are bit-exact: doubles are written with shortest
/// round-trip decimal representation.
std::string model_to_json(const MonoKanModel& m);
MonoKanModel model_from_json(const std::string& text);
void save_model(const MonoKanModel& m, const std::filesystem::path& file);
MonoKanModel load_model(const std::filesystem::path& file);

std::string certificate_to_json(const Certificate& c);
std::string falsify_result_to_json(const FalsifyResult& r);

/// Newline-delimited JSON, one record per epoch.
std::string train_log_to_ndjson(const TrainLog& log);

/// Training configuration plus the architecture knobs that are not part of
/// TrainConfig proper.
struct RunSettings {
  TrainConfig train;
  std::vector<std::size_t> hidden_widths = {4};
  GridSettings grids;
  BasisFunction basis = BasisFunction::Sigmoid;
};

/// Strict parse: unknown keys are errors. Throws std::runtime_error with a
/// line-numbered message on malformed input.
RunSettings run_settings_from_json(const std::string& text);
RunSettings load_run_settings(const std::filesystem::path& file);

}  // namespace monokan
