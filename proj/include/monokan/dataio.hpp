#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "monokan/network.hpp"

namespace monokan {

enum class Task { Regression, BinaryClassification };

struct Dataset {
  std::vector<std::vector<double>> features;  // rows x width
  std::vector<double> targets;
  std::vector<std::string> feature_names;
  Task task = Task::Regression;

  std::size_t size() const { return features.size(); }
  std::size_t width() const { return features.empty() ? 0 : features.front().size(); }
};

struct SplitFractions {
  double train = 0.7;
  double validation = 0.15;
  double test = 0.15;
};

/// Where and how to fetch the raw file for a dataset that ships as a
/// descriptor only. format is one of "csv", "auto-mpg", "cleveland".
struct FetchInfo {
  std::string url;
  std::string format = "csv";
};

struct DatasetSpec {
  std::string name;
  std::filesystem::path csv_path;
  Task task = Task::Regression;
  std::string target_column;
  std::optional<double> binarize_target_greater_than;
  std::vector<std::string> drop_columns;
  std::vector<std::string> categorical_columns;  // one-hot expanded, always Free
  std::vector<std::pair<std::string, Direction>> monotone_columns;
  SplitFractions split;
  std::uint64_t split_seed = 0;
  std::string missing_marker = "?";
  std::optional<FetchInfo> fetch;
};

/// Parses a descriptor file (JSON). Relative csv paths resolve against the
/// descriptor's directory.
DatasetSpec load_dataset_spec(const std::filesystem::path& file);

struct LoadedData {
  Dataset train;
  Dataset validation;
  Dataset test;
  FeatureScaler scaler;    // min-max to [-1,1], fit on the train split only
  MonotonicitySpec spec;   // per post-expansion feature
  std::vector<std::string> feature_names;
  std::size_t rows_dropped = 0;  // rows removed for missing values
};

/// Ingests the CSV named by the spec: drops incomplete rows, one-hot expands
/// categorical columns, shuffles with the split seed and cuts the three
/// splits, then fits the scaler on train. Features are returned raw; apply
/// scale_features with the returned scaler before training.
LoadedData load(const DatasetSpec& spec);

void scale_features(Dataset& d, const FeatureScaler& s);

// ---- CSV primitives (RFC-4180 style, header required) ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& file);
std::string csv_escape(std::string_view field);

// ---- raw UCI file converters used by the fetch command ----

/// auto-mpg.data: whitespace-separated numeric fields with the car name
/// quoted at the end of each line.
std::string convert_auto_mpg(std::string_view raw);

/// processed.cleveland.data: comma-separated, no header.
std::string convert_cleveland(std::string_view raw);

/// Applies the named converter ("csv" passes through).
std::string convert_raw_dataset(std::string_view raw, const std::string& format);

}  // namespace monokan
