#include "monokan/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace monokan {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool parse_double(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

Direction direction_from_string(const std::string& s) {
  if (s == "increasing") return Direction::Increasing;
  if (s == "decreasing") return Direction::Decreasing;
  if (s == "free") return Direction::Free;
  throw std::runtime_error("unknown direction '" + s + "' (use increasing/decreasing/free)");
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    any_field = true;
  };
  auto end_record = [&] {
    if (!any_field && record.empty()) return;  // skip blank lines
    end_field();
    if (table.header.empty())
      table.header = std::move(record);
    else
      table.rows.push_back(std::move(record));
    record.clear();
    any_field = false;
    field.clear();
  };

  for (std::size_t p = 0; p < text.size(); ++p) {
    const char c = text[p];
    if (in_quotes) {
      if (c == '"') {
        if (p + 1 < text.size() && text[p + 1] == '"') {
          field.push_back('"');
          ++p;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': in_quotes = true; any_field = true; break;
      case ',': end_field(); break;
      case '\r': break;
      case '\n': end_record(); break;
      default: field.push_back(c); any_field = true; break;
    }
  }
  if (in_quotes) throw std::runtime_error("unterminated quoted CSV field");
  if (any_field || !field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw std::runtime_error("CSV has no header row");

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      std::ostringstream os;
      os << "CSV row " << r + 2 << " has " << table.rows[r].size() << " fields, expected "
         << table.header.size();
      throw std::runtime_error(os.str());
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& file) { return parse_csv(read_file(file)); }

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

DatasetSpec load_dataset_spec(const std::filesystem::path& file) {
  json doc;
  try {
    doc = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + file.string() + ": " + e.what());
  }
  DatasetSpec spec;
  spec.name = doc.value("name", file.stem().string());
  if (!doc.contains("csv")) throw std::runtime_error(file.string() + ": missing \"csv\"");
  spec.csv_path = file.parent_path() / doc.at("csv").get<std::string>();
  const std::string task = doc.value("task", "regression");
  if (task == "regression")
    spec.task = Task::Regression;
  else if (task == "classification")
    spec.task = Task::BinaryClassification;
  else
    throw std::runtime_error("unknown task '" + task + "'");
  if (!doc.contains("target")) throw std::runtime_error(file.string() + ": missing \"target\"");
  spec.target_column = doc.at("target").get<std::string>();
  if (doc.contains("binarize_target_greater_than"))
    spec.binarize_target_greater_than = doc.at("binarize_target_greater_than").get<double>();
  if (doc.contains("drop")) spec.drop_columns = doc.at("drop").get<std::vector<std::string>>();
  if (doc.contains("categorical"))
    spec.categorical_columns = doc.at("categorical").get<std::vector<std::string>>();
  if (doc.contains("monotone")) {
    for (const auto& [col, dir] : doc.at("monotone").items())
      spec.monotone_columns.emplace_back(col, direction_from_string(dir.get<std::string>()));
    std::sort(spec.monotone_columns.begin(), spec.monotone_columns.end());
  }
  if (doc.contains("split")) {
    const json& s = doc.at("split");
    spec.split.train = s.value("train", 0.7);
    spec.split.validation = s.value("val", 0.15);
    spec.split.test = s.value("test", 0.15);
    spec.split_seed = s.value("seed", std::uint64_t{0});
  }
  spec.missing_marker = doc.value("missing", "?");
  if (doc.contains("fetch")) {
    FetchInfo f;
    f.url = doc.at("fetch").at("url").get<std::string>();
    f.format = doc.at("fetch").value("format", "csv");
    spec.fetch = f;
  }
  return spec;
}

LoadedData load(const DatasetSpec& spec) {
  const CsvTable table = read_csv(spec.csv_path);

  auto column_index = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
      throw std::runtime_error("column '" + name + "' not found in " + spec.csv_path.string());
    return static_cast<std::size_t>(it - table.header.begin());
  };

  const std::size_t target_col = column_index(spec.target_column);
  std::set<std::size_t> dropped_cols{target_col};
  for (const std::string& name : spec.drop_columns) dropped_cols.insert(column_index(name));

  std::set<std::size_t> categorical;
  for (const std::string& name : spec.categorical_columns) {
    const std::size_t c = column_index(name);
    if (dropped_cols.count(c))
      throw std::runtime_error("categorical column '" + name + "' is dropped or the target");
    categorical.insert(c);
  }

  std::map<std::size_t, Direction> monotone;
  for (const auto& [name, dir] : spec.monotone_columns) {
    const std::size_t c = column_index(name);
    if (categorical.count(c))
      throw std::runtime_error("monotone feature '" + name + "' is categorical, not numeric");
    if (dropped_cols.count(c))
      throw std::runtime_error("monotone feature '" + name + "' is dropped or the target");
    monotone.emplace(c, dir);
  }

  std::vector<std::size_t> used_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (!dropped_cols.count(c)) used_cols.push_back(c);

  auto is_missing = [&](const std::string& v) { return v.empty() || v == spec.missing_marker; };

  // Pass 1: keep complete rows, collect category levels.
  std::vector<std::size_t> kept;
  std::map<std::size_t, std::set<std::string>> levels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::vector<std::string>& row = table.rows[r];
    bool complete = !is_missing(row[target_col]);
    for (const std::size_t c : used_cols)
      if (is_missing(row[c])) complete = false;
    if (!complete) continue;
    kept.push_back(r);
    for (const std::size_t c : categorical) levels[c].insert(row[c]);
  }
  const std::size_t rows_dropped = table.rows.size() - kept.size();
  if (kept.empty()) throw std::runtime_error("no complete rows in " + spec.csv_path.string());

  // Feature layout: CSV column order, categorical columns expanded in place
  // to one indicator per level (level order sorted, hence deterministic).
  std::vector<std::string> feature_names;
  std::vector<Direction> directions;
  struct ColumnPlan {
    std::size_t csv_col;
    bool is_categorical;
    std::vector<std::string> level_list;
  };
  std::vector<ColumnPlan> plan;
  for (const std::size_t c : used_cols) {
    if (categorical.count(c)) {
      ColumnPlan p{c, true, {levels[c].begin(), levels[c].end()}};
      for (const std::string& lv : p.level_list) {
        feature_names.push_back(table.header[c] + "=" + lv);
        directions.push_back(Direction::Free);
      }
      plan.push_back(std::move(p));
    } else {
      plan.push_back({c, false, {}});
      feature_names.push_back(table.header[c]);
      const auto it = monotone.find(c);
      directions.push_back(it == monotone.end() ? Direction::Free : it->second);
    }
  }

  // Pass 2: numeric conversion.
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  features.reserve(kept.size());
  targets.reserve(kept.size());
  for (const std::size_t r : kept) {
    const std::vector<std::string>& row = table.rows[r];
    std::vector<double> x;
    x.reserve(feature_names.size());
    for (const ColumnPlan& p : plan) {
      if (p.is_categorical) {
        for (const std::string& lv : p.level_list) x.push_back(row[p.csv_col] == lv ? 1.0 : 0.0);
      } else {
        double v = 0.0;
        if (!parse_double(row[p.csv_col], v)) {
          std::ostringstream os;
          os << "row " << r + 2 << ": column '" << table.header[p.csv_col]
             << "' has non-numeric value '" << row[p.csv_col]
             << "' (declare it categorical or drop it)";
          throw std::runtime_error(os.str());
        }
        x.push_back(v);
      }
    }
    double y = 0.0;
    if (!parse_double(row[target_col], y)) {
      std::ostringstream os;
      os << "row " << r + 2 << ": non-numeric target '" << row[target_col] << "'";
      throw std::runtime_error(os.str());
    }
    if (spec.task == Task::BinaryClassification) {
      if (spec.binarize_target_greater_than)
        y = y > *spec.binarize_target_greater_than ? 1.0 : 0.0;
      else if (y != 0.0 && y != 1.0)
        throw std::runtime_error("classification target must be 0/1 or use "
                                 "binarize_target_greater_than");
    }
    features.push_back(std::move(x));
    targets.push_back(y);
  }

  // Seeded shuffle and split.
  const double fsum = spec.split.train + spec.split.validation + spec.split.test;
  if (!(spec.split.train >= 0 && spec.split.validation >= 0 && spec.split.test >= 0) ||
      std::abs(fsum - 1.0) > 1e-9)
    throw std::runtime_error("split fractions must be nonnegative and sum to 1");
  const std::size_t n = features.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.split_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = static_cast<std::size_t>(std::floor(spec.split.train * n));
  const std::size_t n_val = static_cast<std::size_t>(std::floor(spec.split.validation * n));
  if (n_train == 0) throw std::runtime_error("train split is empty");
  if (n_train + n_val >= n) throw std::runtime_error("test split is empty");

  LoadedData out;
  out.rows_dropped = rows_dropped;
  out.feature_names = feature_names;
  out.spec.directions = directions;
  const Task task = spec.task;
  auto fill = [&](Dataset& d, std::size_t begin, std::size_t end) {
    d.task = task;
    d.feature_names = feature_names;
    for (std::size_t s = begin; s < end; ++s) {
      d.features.push_back(features[order[s]]);
      d.targets.push_back(targets[order[s]]);
    }
  };
  fill(out.train, 0, n_train);
  fill(out.validation, n_train, n_train + n_val);
  fill(out.test, n_train + n_val, n);

  // Min-max scaler to [-1, 1], fit on train only.
  const std::size_t width = feature_names.size();
  out.scaler.shift.assign(width, 0.0);
  out.scaler.scale.assign(width, 1.0);
  for (std::size_t f = 0; f < width; ++f) {
    double lo = out.train.features[0][f], hi = lo;
    for (const std::vector<double>& row : out.train.features) {
      lo = std::min(lo, row[f]);
      hi = std::max(hi, row[f]);
    }
    if (hi > lo) {
      out.scaler.shift[f] = 0.5 * (hi + lo);
      out.scaler.scale[f] = 0.5 * (hi - lo);
    } else {
      out.scaler.shift[f] = lo;  // constant feature maps to 0
      out.scaler.scale[f] = 1.0;
    }
  }
  return out;
}

void scale_features(Dataset& d, const FeatureScaler& s) {
  for (std::vector<double>& row : d.features) {
    if (row.size() != s.shift.size())
      throw std::invalid_argument("scaler width does not match the dataset");
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = (row[f] - s.shift[f]) / s.scale[f];
  }
}

std::string convert_auto_mpg(std::string_view raw) {
  std::ostringstream out;
  out << "mpg,cylinders,displacement,horsepower,weight,acceleration,model_year,origin,car_name\n";
  std::istringstream in{std::string(raw)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::size_t q1 = line.find('"');
    const std::size_t q2 = line.rfind('"');
    if (q1 == std::string::npos || q2 <= q1) {
      std::ostringstream os;
      os << "auto-mpg line " << line_no << ": missing quoted car name";
      throw std::runtime_error(os.str());
    }
    const std::string name = line.substr(q1 + 1, q2 - q1 - 1);
    std::istringstream fields(line.substr(0, q1));
    std::vector<std::string> vals;
    for (std::string tok; fields >> tok;) vals.push_back(tok);
    if (vals.size() != 8) {
      std::ostringstream os;
      os << "auto-mpg line " << line_no << ": expected 8 numeric fields, got " << vals.size();
      throw std::runtime_error(os.str());
    }
    for (const std::string& v : vals) out << v << ',';
    out << csv_escape(name) << '\n';
  }
  return out.str();
}

std::string convert_cleveland(std::string_view raw) {
  std::ostringstream out;
  out << "age,sex,cp,trestbps,chol,fbs,restecg,thalach,exang,oldpeak,slope,ca,thal,num\n";
  std::istringstream in{std::string(raw)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (commas != 13) {
      std::ostringstream os;
      os << "cleveland line " << line_no << ": expected 14 fields, got " << commas + 1;
      throw std::runtime_error(os.str());
    }
    out << line << '\n';
  }
  return out.str();
}

std::string convert_raw_dataset(std::string_view raw, const std::string& format) {
  if (format == "csv") return std::string(raw);
  if (format == "auto-mpg") return convert_auto_mpg(raw);
  if (format == "cleveland") return convert_cleveland(raw);
  throw std::runtime_error("unknown raw dataset format '" + format + "'");
}

}  // namespace monokan
