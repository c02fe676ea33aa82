#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "monokan/certifier.hpp"
#include "monokan/constraints.hpp"
#include "monokan/dataio.hpp"
#include "monokan/model_io.hpp"
#include "monokan/trainer.hpp"
#include "svg_export.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace monokan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitDiverged = 3;

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct SeedOverride {
  std::optional<std::uint64_t> value;
  void apply(TrainConfig& cfg, DatasetSpec& spec) const {
    if (!value) return;
    cfg.seed = *value;
    spec.split_seed = *value;
  }
};

struct ScaledData {
  LoadedData data;
};

ScaledData load_scaled(const DatasetSpec& spec, const FeatureScaler* fixed_scaler) {
  ScaledData out{load(spec)};
  const FeatureScaler& scaler = fixed_scaler ? *fixed_scaler : out.data.scaler;
  if (fixed_scaler) out.data.scaler = *fixed_scaler;
  scale_features(out.data.train, scaler);
  scale_features(out.data.validation, scaler);
  scale_features(out.data.test, scaler);
  return out;
}

int cmd_train(const fs::path& config_path, const fs::path& data_path,
              const fs::path& model_path, const fs::path& log_path,
              const SeedOverride& seed, bool as_json) {
  RunSettings settings;
  if (!config_path.empty()) settings = load_run_settings(config_path);
  DatasetSpec spec = load_dataset_spec(data_path);
  seed.apply(settings.train, spec);

  const ScaledData scaled = load_scaled(spec, nullptr);
  const LoadedData& data = scaled.data;

  std::vector<std::size_t> widths;
  widths.push_back(data.feature_names.size());
  widths.insert(widths.end(), settings.hidden_widths.begin(), settings.hidden_widths.end());
  widths.push_back(1);

  MonoKanModel model = init_model(widths, data.spec, settings.grids, settings.train.seed);
  for (Layer& layer : model.layers) layer.basis = settings.basis;
  model.input_scaler = data.scaler;

  if (spec.task == Task::BinaryClassification &&
      settings.train.loss != LossKind::BinaryCrossEntropy)
    settings.train.loss = LossKind::BinaryCrossEntropy;

  const TrainLog log =
      train(model, data.train, data.validation.size() > 0 ? &data.validation : nullptr,
            settings.train);
  const Certificate cert = certify(model);
  save_model(model, model_path);
  if (!log_path.empty()) write_text(log_path, train_log_to_ndjson(log));

  json summary;
  summary["epochs"] = log.epochs.size();
  summary["final_train_loss"] = log.epochs.back().train_loss;
  summary["certificate"] = cert.pass ? "PASS" : "FAIL";
  summary["model"] = model_path.string();
  summary["rows_dropped"] = data.rows_dropped;
  if (spec.task == Task::Regression) {
    const double mse = mean_squared_error(model, data.test);
    summary["test_mse"] = mse;
    summary["test_rmse"] = std::sqrt(mse);
  } else {
    summary["test_accuracy"] = accuracy(model, data.test);
    summary["test_bce"] = mean_loss(model, data.test, LossKind::BinaryCrossEntropy);
  }
  if (as_json) {
    std::cout << summary.dump(1) << "\n";
  } else {
    std::cout << "trained " << log.epochs.size() << " epochs, final train loss "
              << log.epochs.back().train_loss << "\n";
    if (spec.task == Task::Regression)
      std::cout << "test mse " << summary["test_mse"].get<double>() << " (rmse "
                << summary["test_rmse"].get<double>() << ")\n";
    else
      std::cout << "test accuracy " << summary["test_accuracy"].get<double>() << "\n";
    std::cout << "certificate " << (cert.pass ? "PASS" : "FAIL") << "\n";
    std::cout << "model written to " << model_path.string() << "\n";
  }
  return cert.pass ? kExitOk : kExitCheckFailed;
}

int cmd_eval(const fs::path& model_path, const fs::path& data_path, const SeedOverride& seed,
             const std::string& split, bool as_json) {
  const MonoKanModel model = load_model(model_path);
  DatasetSpec spec = load_dataset_spec(data_path);
  TrainConfig unused;
  seed.apply(unused, spec);
  const ScaledData scaled = load_scaled(spec, &model.input_scaler);
  const Dataset* d = &scaled.data.test;
  if (split == "train") d = &scaled.data.train;
  else if (split == "val") d = &scaled.data.validation;
  else if (split != "test") throw std::runtime_error("--split must be train, val or test");
  if (d->size() == 0) throw std::runtime_error("selected split is empty");

  json out;
  out["split"] = split;
  out["rows"] = d->size();
  if (spec.task == Task::Regression) {
    const double mse = mean_squared_error(model, *d);
    out["mse"] = mse;
    out["rmse"] = std::sqrt(mse);
  } else {
    out["accuracy"] = accuracy(model, *d);
    out["bce"] = mean_loss(model, *d, LossKind::BinaryCrossEntropy);
  }
  if (as_json) {
    std::cout << out.dump(1) << "\n";
  } else {
    std::cout << split << " rows " << d->size();
    if (spec.task == Task::Regression)
      std::cout << ", mse " << out["mse"].get<double>() << ", rmse "
                << out["rmse"].get<double>() << "\n";
    else
      std::cout << ", accuracy " << out["accuracy"].get<double>() << ", bce "
                << out["bce"].get<double>() << "\n";
  }
  return kExitOk;
}

int cmd_certify(const fs::path& model_path, bool as_json) {
  const MonoKanModel model = load_model(model_path);
  const Certificate cert = certify(model);
  if (as_json) {
    std::cout << certificate_to_json(cert) << "\n";
  } else {
    std::cout << (cert.pass ? "PASS" : "FAIL") << "\n";
    for (const Violation& v : cert.violations)
      std::cout << "condition " << v.condition << ": " << v.message << "\n";
  }
  return cert.pass ? kExitOk : kExitCheckFailed;
}

int cmd_falsify(const fs::path& model_path, std::size_t pairs, std::uint64_t seed,
                double expansion, bool as_json) {
  const MonoKanModel model = load_model(model_path);
  const FalsifyResult res = falsify(model, pairs, seed, expansion);
  if (as_json) {
    std::cout << falsify_result_to_json(res) << "\n";
  } else {
    std::cout << res.violations << " violation(s) in " << res.checked_pairs << " pairs\n";
    if (res.violations > 0)
      std::cout << "worst gap " << res.worst_gap << " on feature " << res.worst_feature
                << "\n";
  }
  return res.violations == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_export_splines(const fs::path& model_path, const fs::path& out_dir,
                       std::size_t samples, bool svg) {
  if (samples < 2) throw std::runtime_error("--samples must be at least 2");
  const MonoKanModel model = load_model(model_path);
  fs::create_directories(out_dir);

  json index;
  index["model"] = model_path.string();
  index["edges"] = json::array();
  std::vector<SplinePlot> plots;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Layer& layer = model.layers[l];
    for (std::size_t j = 0; j < layer.n_out; ++j) {
      for (std::size_t i = 0; i < layer.n_in; ++i) {
        const Edge& e = layer.edge(j, i);
        const double lo = e.spline.grid.front() - 0.5;
        const double hi = e.spline.grid.back() + 0.5;
        std::ostringstream name;
        name << "edge_l" << l << "_j" << j << "_i" << i << ".csv";
        std::ostringstream csv;
        csv << "x,phi,dphi\n";
        SplinePlot plot;
        plot.label = "l" + std::to_string(l) + " j" + std::to_string(j) + " i" +
                     std::to_string(i);
        for (std::size_t s = 0; s < samples; ++s) {
          const double x =
              lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(samples - 1);
          const double phi = eval(e.spline, x);
          csv << x << ',' << phi << ',' << eval_derivative(e.spline, x) << '\n';
          plot.x.push_back(x);
          plot.y.push_back(phi);
        }
        write_text(out_dir / name.str(), csv.str());
        index["edges"].push_back({{"layer", l},
                                  {"output", j},
                                  {"input", i},
                                  {"file", name.str()},
                                  {"omega_phi", e.omega_phi},
                                  {"omega_b", e.omega_b}});
        plots.push_back(std::move(plot));
      }
    }
  }
  write_text(out_dir / "index.json", index.dump(1));
  if (svg) write_text(out_dir / "splines.svg", render_spline_grid(plots));
  std::cout << "wrote " << plots.size() << " edge file(s) to " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_fetch_data(const fs::path& data_path, bool force) {
  const DatasetSpec spec = load_dataset_spec(data_path);
  if (!spec.fetch) throw std::runtime_error("descriptor has no fetch section");
  if (fs::exists(spec.csv_path) && !force) {
    std::cout << spec.csv_path.string() << " already exists (use --force to refetch)\n";
    return kExitOk;
  }
  const std::string& url = spec.fetch->url;
  std::string host, path;
  bool https = false;
  if (url.rfind("https://", 0) == 0) {
    https = true;
    host = url.substr(8);
  } else if (url.rfind("http://", 0) == 0) {
    host = url.substr(7);
  } else {
    throw std::runtime_error("fetch url must be http(s): " + url);
  }
  const auto slash = host.find('/');
  path = slash == std::string::npos ? "/" : host.substr(slash);
  host = host.substr(0, slash);

  httplib::Result res;
  if (https) {
    httplib::SSLClient client(host);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    res = client.Get(path);
  } else {
    httplib::Client client(host);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    res = client.Get(path);
  }
  if (!res || res->status != 200) {
    std::ostringstream os;
    os << "fetch failed for " << url;
    if (res) os << " (status " << res->status << ")";
    else os << " (" << httplib::to_string(res.error()) << ")";
    throw std::runtime_error(os.str());
  }
  const std::string csv = convert_raw_dataset(res->body, spec.fetch->format);
  fs::create_directories(spec.csv_path.parent_path());
  write_text(spec.csv_path, csv);
  std::cout << "wrote " << spec.csv_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monotonic Kolmogorov-Arnold networks: train, certify, falsify"};
  app.require_subcommand(1);

  std::string config_path, data_path, model_path, out_path, log_path;
  std::string split = "test";
  std::size_t samples = 201;
  std::size_t pairs = 100000;
  std::uint64_t falsify_seed = 0;
  double expansion = 2.0;
  bool as_json = false;
  bool svg = false;
  bool force = false;
  std::optional<std::uint64_t> seed;

  CLI::App* train = app.add_subcommand("train", "train a model from a dataset descriptor");
  train->add_option("--config", config_path, "training config JSON");
  train->add_option("--data", data_path, "dataset descriptor JSON")->required();
  train->add_option("--model", model_path, "output model path")->required();
  train->add_option("--log", log_path, "output NDJSON training log");
  train->add_option("--seed", seed, "override the training and split seeds");
  train->add_flag("--json", as_json, "JSON summary on stdout");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a saved model on a dataset split");
  eval->add_option("--model", model_path, "model path")->required();
  eval->add_option("--data", data_path, "dataset descriptor JSON")->required();
  eval->add_option("--seed", seed, "split seed used during training");
  eval->add_option("--split", split, "train, val or test (default test)");
  eval->add_flag("--json", as_json, "JSON output");

  CLI::App* certify = app.add_subcommand("certify", "check the monotonicity conditions");
  certify->add_option("--model", model_path, "model path")->required();
  certify->add_flag("--json", as_json, "full certificate JSON");

  CLI::App* falsify = app.add_subcommand("falsify", "random search for counterexamples");
  falsify->add_option("--model", model_path, "model path")->required();
  falsify->add_option("--pairs", pairs, "pairs per constrained feature (default 100000)");
  falsify->add_option("--seed", falsify_seed, "RNG seed");
  falsify->add_option("--expansion", expansion, "box expansion beyond [-1,1] (default 2)");
  falsify->add_flag("--json", as_json, "JSON output");

  CLI::App* exp = app.add_subcommand("export-splines", "sample every edge spline to CSV");
  exp->add_option("--model", model_path, "model path")->required();
  exp->add_option("--out", out_path, "output directory")->required();
  exp->add_option("--samples", samples, "rows per edge (default 201)");
  exp->add_flag("--svg", svg, "also render a small-multiples SVG");

  CLI::App* fetch = app.add_subcommand("fetch-data", "download a descriptor's raw file");
  fetch->add_option("--data", data_path, "dataset descriptor JSON")->required();
  fetch->add_flag("--force", force, "overwrite an existing csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config_path, data_path, model_path, log_path, SeedOverride{seed},
                       as_json);
    if (eval->parsed())
      return cmd_eval(model_path, data_path, SeedOverride{seed}, split, as_json);
    if (certify->parsed()) return cmd_certify(model_path, as_json);
    if (falsify->parsed())
      return cmd_falsify(model_path, pairs, falsify_seed, expansion, as_json);
    if (exp->parsed()) return cmd_export_splines(model_path, out_path, samples, svg);
    if (fetch->parsed()) return cmd_fetch_data(data_path, force);
  } catch (const TrainingDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
