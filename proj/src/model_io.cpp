#include "monokan/model_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace monokan {

namespace {

using nlohmann::json;

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::Increasing: return "increasing";
    case Direction::Decreasing: return "decreasing";
    case Direction::Free: return "free";
  }
  return "?";
}

Direction direction_from(const std::string& s) {
  if (s == "increasing") return Direction::Increasing;
  if (s == "decreasing") return Direction::Decreasing;
  if (s == "free") return Direction::Free;
  throw std::runtime_error("unknown direction '" + s + "'");
}

BasisFunction basis_from(const std::string& s) {
  if (s == "sigmoid") return BasisFunction::Sigmoid;
  if (s == "tanh") return BasisFunction::Tanh;
  if (s == "softplus") return BasisFunction::Softplus;
  if (s == "identity") return BasisFunction::Identity;
  if (s == "silu") return BasisFunction::Silu;
  throw std::runtime_error("unknown basis function '" + s + "'");
}

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t p = 0; p < byte && p < text.size(); ++p)
    if (text[p] == '\n') ++line;
  return line;
}

json parse_with_lines(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << what << " parse error at line " << line_of_offset(text, e.byte) << ": " << e.what();
    throw std::runtime_error(os.str());
  }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key))
      throw std::runtime_error(std::string("unknown key \"") + key + "\" in " + where);
  }
}

}  // namespace

std::string model_to_json(const MonoKanModel& m) {
  m.validate();
  json doc;
  doc["schema"] = kModelSchemaVersion;
  doc["widths"] = m.widths;
  json spec = json::array();
  for (Direction d : m.spec.directions) spec.push_back(direction_name(d));
  doc["spec"] = spec;
  doc["basis"] = basis_name(m.layers.front().basis);
  doc["input_scaler"] = {{"shift", m.input_scaler.shift}, {"scale", m.input_scaler.scale}};
  json layers = json::array();
  for (const Layer& layer : m.layers) {
    json edges = json::array();
    for (const Edge& e : layer.edges) {
      edges.push_back({{"knots", e.spline.grid.knots()},
                       {"values", e.spline.values},
                       {"slopes", e.spline.slopes},
                       {"omega_phi", e.omega_phi},
                       {"omega_b", e.omega_b}});
    }
    layers.push_back({{"biases", layer.biases}, {"edges", std::move(edges)}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump(1);
}

MonoKanModel model_from_json(const std::string& text) {
  const json doc = parse_with_lines(text, "model");
  if (!doc.contains("schema") || doc.at("schema").get<std::string>() != kModelSchemaVersion)
    throw std::runtime_error(std::string("expected schema \"") + kModelSchemaVersion + "\"");
  MonoKanModel m;
  m.widths = doc.at("widths").get<std::vector<std::size_t>>();
  for (const json& d : doc.at("spec"))
    m.spec.directions.push_back(direction_from(d.get<std::string>()));
  const BasisFunction basis = basis_from(doc.at("basis").get<std::string>());
  m.input_scaler.shift = doc.at("input_scaler").at("shift").get<std::vector<double>>();
  m.input_scaler.scale = doc.at("input_scaler").at("scale").get<std::vector<double>>();
  for (double s : m.input_scaler.scale)
    if (!(s > 0.0)) throw std::runtime_error("input scaler scales must be positive");

  const json& layers = doc.at("layers");
  if (!layers.is_array() || layers.size() + 1 != m.widths.size())
    throw std::runtime_error("layer count does not match the widths");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Layer layer;
    layer.n_in = m.widths[l];
    layer.n_out = m.widths[l + 1];
    layer.basis = basis;
    layer.biases = layers[l].at("biases").get<std::vector<double>>();
    const json& edges = layers[l].at("edges");
    if (edges.size() != layer.n_in * layer.n_out)
      throw std::runtime_error("edge count does not match the layer shape");
    layer.edges.reserve(edges.size());
    for (const json& e : edges) {
      layer.edges.push_back(Edge{
          HermiteSpline(KnotGrid(e.at("knots").get<std::vector<double>>()),
                        e.at("values").get<std::vector<double>>(),
                        e.at("slopes").get<std::vector<double>>()),
          e.at("omega_phi").get<double>(), e.at("omega_b").get<double>()});
    }
    m.layers.push_back(std::move(layer));
  }
  m.validate();
  return m;
}

void save_model(const MonoKanModel& m, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << model_to_json(m) << '\n';
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

MonoKanModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

std::string certificate_to_json(const Certificate& c) {
  json doc;
  doc["verdict"] = c.pass ? "PASS" : "FAIL";
  doc["tolerances"] = {{"secant_zero", c.secant_zero_tol}, {"fritsch_slack", c.fritsch_slack}};
  json violations = json::array();
  for (const Violation& v : c.violations) {
    json entry = {{"layer", v.layer},         {"output", v.output},
                  {"input", v.input},         {"condition", v.condition},
                  {"observed", {v.observed_a, v.observed_b}},
                  {"message", v.message}};
    if (v.interval)
      entry["interval"] = *v.interval;
    else
      entry["interval"] = nullptr;
    violations.push_back(std::move(entry));
  }
  doc["violations"] = std::move(violations);
  return doc.dump(1);
}

std::string falsify_result_to_json(const FalsifyResult& r) {
  json doc;
  doc["checked_pairs"] = r.checked_pairs;
  doc["violations"] = r.violations;
  doc["worst_gap"] = number_or_null(r.worst_gap);
  if (r.violations > 0) {
    doc["worst_feature"] = r.worst_feature;
    doc["worst_x"] = r.worst_x;
    doc["worst_x_prime"] = r.worst_x_prime;
  }
  return doc.dump(1);
}

std::string train_log_to_ndjson(const TrainLog& log) {
  std::ostringstream out;
  for (const EpochRecord& rec : log.epochs) {
    json line = {{"epoch", rec.epoch},
                 {"train_loss", number_or_null(rec.train_loss)},
                 {"val_loss", number_or_null(rec.val_loss)},
                 {"val_accuracy", number_or_null(rec.val_accuracy)},
                 {"projection",
                  {{"edges_touched", rec.projection.edges_touched},
                   {"values_clamped", rec.projection.values_clamped},
                   {"slopes_zeroed", rec.projection.slopes_zeroed},
                   {"fritsch_rescaled", rec.projection.fritsch_rescaled}}},
                 {"seconds", rec.seconds}};
    out << line.dump() << '\n';
  }
  return out.str();
}

RunSettings run_settings_from_json(const std::string& text) {
  const json doc = parse_with_lines(text, "config");
  reject_unknown_keys(doc,
                      {"max_epochs", "batch_size", "learning_rate", "optimizer", "seed",
                       "projection", "loss", "hidden_widths", "knots", "input_grid_halfwidth",
                       "hidden_grid_halfwidth", "early_stopping", "patience", "basis"},
                      "config");
  RunSettings rs;
  rs.train.max_epochs = doc.value("max_epochs", rs.train.max_epochs);
  if (doc.contains("batch_size")) {
    const json& b = doc.at("batch_size");
    if (b.is_string()) {
      const std::string s = b.get<std::string>();
      if (s == "full")
        rs.train.batch_size = 0;
      else if (s == "auto")
        rs.train.batch_size.reset();
      else
        throw std::runtime_error("batch_size must be a count, \"full\" or \"auto\"");
    } else {
      rs.train.batch_size = b.get<std::size_t>();
    }
  }
  rs.train.learning_rate = doc.value("learning_rate", rs.train.learning_rate);
  if (doc.contains("optimizer")) {
    const json& opt = doc.at("optimizer");
    reject_unknown_keys(opt, {"kind", "beta1", "beta2", "eps", "momentum"}, "optimizer");
    const std::string kind = opt.value("kind", "adam");
    if (kind == "adam") {
      AdamConfig a{};
      a.beta1 = opt.value("beta1", a.beta1);
      a.beta2 = opt.value("beta2", a.beta2);
      a.epsilon = opt.value("eps", a.epsilon);
      rs.train.optimizer = a;
    } else if (kind == "sgd") {
      SgdConfig s{};
      s.momentum = opt.value("momentum", s.momentum);
      rs.train.optimizer = s;
    } else {
      throw std::runtime_error("optimizer kind must be \"adam\" or \"sgd\"");
    }
  }
  rs.train.seed = doc.value("seed", rs.train.seed);
  if (doc.contains("projection")) {
    const std::string p = doc.at("projection").get<std::string>();
    if (p == "per-step")
      rs.train.projection = ProjectionSchedule::PerStep;
    else if (p == "per-epoch")
      rs.train.projection = ProjectionSchedule::PerEpoch;
    else
      throw std::runtime_error("projection must be \"per-step\" or \"per-epoch\"");
  }
  if (doc.contains("loss")) {
    const std::string lk = doc.at("loss").get<std::string>();
    if (lk == "mse")
      rs.train.loss = LossKind::MeanSquaredError;
    else if (lk == "bce")
      rs.train.loss = LossKind::BinaryCrossEntropy;
    else
      throw std::runtime_error("loss must be \"mse\" or \"bce\"");
  }
  rs.train.early_stopping = doc.value("early_stopping", rs.train.early_stopping);
  rs.train.patience = doc.value("patience", rs.train.patience);
  if (doc.contains("hidden_widths"))
    rs.hidden_widths = doc.at("hidden_widths").get<std::vector<std::size_t>>();
  rs.grids.knots = doc.value("knots", rs.grids.knots);
  rs.grids.input_halfwidth = doc.value("input_grid_halfwidth", rs.grids.input_halfwidth);
  rs.grids.hidden_halfwidth = doc.value("hidden_grid_halfwidth", rs.grids.hidden_halfwidth);
  if (doc.contains("basis")) {
    rs.basis = basis_from(doc.at("basis").get<std::string>());
    if (!basis_is_increasing(rs.basis))
      throw std::runtime_error("basis \"" + basis_name(rs.basis) +
                               "\" is not increasing and cannot be trained monotonically");
  }
  return rs;
}

RunSettings load_run_settings(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_settings_from_json(buf.str());
}

}  // namespace monokan
