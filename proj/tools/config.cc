// Copyright 2026 The maskdl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include "maskdl/error.h"
#include "maskdl/numerics.h"

namespace maskdl::cli {
namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

std::size_t get_count(const Json& v, const std::string& key) {
  if (!v.is_number_unsigned()) {
    throw ConfigError("'" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const Json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

bool get_flag(const Json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return v.get<bool>();
}

std::string get_text(const Json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

template <typename T, typename F>
std::vector<T> get_list(const Json& v, const std::string& key, F&& item) {
  if (!v.is_array()) throw ConfigError("'" + key + "' must be an array");
  std::vector<T> out;
  for (const Json& x : v) out.push_back(item(x, key));
  return out;
}

DictionaryKind dictionary_from_string(const std::string& name) {
  if (name == "gaussian") return DictionaryKind::kGaussian;
  if (name == "orthonormal") return DictionaryKind::kOrthonormal;
  throw ConfigError("unknown dictionary '" + name + "' (expected gaussian or orthonormal)");
}

AxisParam axis_from_string(const std::string& name) {
  if (name == "p_prime") return AxisParam::kPPrime;
  if (name == "scaled_d") return AxisParam::kScaledD;
  if (name == "noise_std") return AxisParam::kNoiseStd;
  if (name == "noise_var") return AxisParam::kNoiseVar;
  if (name == "k") return AxisParam::kK;
  if (name == "mask_size") return AxisParam::kMaskSize;
  throw ConfigError("unknown axis_param '" + name + "'");
}

std::size_t axis_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    throw ConfigError(std::string("axis value for ") + what +
                      " must be a positive integer, got " + std::to_string(v));
  }
  return static_cast<std::size_t>(v);
}

// Noise standard deviations spaced linearly between 1/d and 1/sqrt(d).
std::vector<double> noise_std_grid(std::size_t d, std::size_t points) {
  const double lo = 1.0 / static_cast<double>(d);
  const double hi = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> grid;
  for (std::size_t i = 0; i < points; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return grid;
}

template <typename T>
bool distinct(const std::vector<T>& v) {
  return std::set<T>(v.begin(), v.end()).size() == v.size();
}

}  // namespace

std::string to_string(DictionaryKind kind) {
  return kind == DictionaryKind::kGaussian ? "gaussian" : "orthonormal";
}

std::string to_string(AxisParam axis) {
  switch (axis) {
    case AxisParam::kPPrime:
      return "p_prime";
    case AxisParam::kScaledD:
      return "scaled_d";
    case AxisParam::kNoiseStd:
      return "noise_std";
    case AxisParam::kNoiseVar:
      return "noise_var";
    case AxisParam::kK:
      return "k";
    case AxisParam::kMaskSize:
      return "mask_size";
  }
  return "unknown";
}

void ModelConfig::validate() const {
  if (d < 1 || p < 1) throw ConfigError("model: d and p must be positive");
  if (k < 1 || k > p) {
    throw ConfigError("model: k = " + std::to_string(k) + " must lie in [1, p = " +
                      std::to_string(p) + "]");
  }
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw ConfigError("model: noise_var must be finite and >= 0");
  }
  if (!(sigma_z >= 0.0) || !std::isfinite(sigma_z)) {
    throw ConfigError("model: sigma_z must be finite and >= 0");
  }
  if (normalize_codes && !(sigma_z > 0.0)) {
    throw ConfigError("model: normalized codes need sigma_z > 0");
  }
  if (n < 1) throw ConfigError("model: n must be positive");
  if (dictionary == DictionaryKind::kOrthonormal && p > d) {
    throw ConfigError("model: an orthonormal dictionary needs p <= d");
  }
}

GroundTruthModel make_model(const ModelConfig& cfg, RngStream& rng) {
  cfg.validate();
  GroundTruthModel m;
  const auto d = static_cast<Index>(cfg.d);
  const auto p = static_cast<Index>(cfg.p);
  m.A = cfg.dictionary == DictionaryKind::kGaussian ? gaussian_matrix(rng, d, p, true)
                                                    : orthonormal_matrix(rng, d, p);
  m.k = cfg.k;
  m.sigma_z = cfg.sigma_z;
  m.normalize_codes = cfg.normalize_codes;
  m.noise_var = cfg.noise_var;
  return m;
}

Dataset make_dataset(const ModelConfig& cfg, std::size_t n_holdout, RngStream rng) {
  RngStream a_rng = rng.derive(1);
  const GroundTruthModel model = make_model(cfg, a_rng);
  RngStream data_rng = rng.derive(2);
  return generate_dataset(data_rng, model, cfg.n, n_holdout);
}

void ExperimentConfig::validate() const {
  if (axis.empty()) throw ConfigError("experiment: axis values must be non-empty");
  if (seeds.empty() || !distinct(seeds)) {
    throw ConfigError("experiment: seeds must be non-empty and distinct");
  }
  if (algorithms.empty() || !distinct(algorithms)) {
    throw ConfigError("experiment: algorithms must be non-empty and distinct");
  }
  if (inits.empty() || !distinct(inits)) {
    throw ConfigError("experiment: inits must be non-empty and distinct");
  }
  for (double v : axis) {
    const CellSetup cell = apply_axis(*this, v);
    cell.model.validate();
  }
}

ExperimentConfig preset(const std::string& experiment, bool paper_scale) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  ModelConfig& m = cfg.model;
  TrainConfig& t = cfg.train;
  if (paper_scale) {
    m.d = 100;
    m.p = 200;
    m.k = 5;
    m.n = 1000;
    t.epochs = 500;
    t.batch_size = 200;
  } else {
    m.d = 50;
    m.p = 100;
    m.k = 3;
    m.n = 500;
    t.epochs = 100;
    t.batch_size = 50;
  }
  m.noise_var = 1.0 / static_cast<double>(m.d);
  m.normalize_codes = true;

  if (experiment == "scale_overrealization" || experiment == "custom") {
    cfg.axis_param = AxisParam::kPPrime;
    cfg.axis = paper_scale ? std::vector<double>{200, 400, 600, 800, 1000}
                           : std::vector<double>{100, 200, 400};
  } else if (experiment == "scale_all") {
    cfg.axis_param = AxisParam::kScaledD;
    cfg.axis = paper_scale ? std::vector<double>{100, 150, 200, 250}
                           : std::vector<double>{40, 60, 80};
  } else if (experiment == "noise_sweep") {
    cfg.axis_param = AxisParam::kNoiseStd;
    cfg.axis = paper_scale ? std::vector<double>{0.01, 0.0325, 0.055, 0.0775, 0.1}
                           : noise_std_grid(m.d, 5);
    t.p_prime = paper_scale ? 1000 : 400;
  } else {
    throw ConfigError("unknown experiment '" + experiment +
                      "' (expected scale_overrealization, scale_all, noise_sweep or "
                      "custom)");
  }
  return cfg;
}

CellSetup apply_axis(const ExperimentConfig& cfg, double value) {
  CellSetup cell{cfg.model, cfg.train};
  switch (cfg.axis_param) {
    case AxisParam::kPPrime:
      cell.train.p_prime = axis_count(value, "p_prime");
      break;
    case AxisParam::kScaledD: {
      const std::size_t d = axis_count(value, "scaled_d");
      cell.model.d = d;
      cell.model.p = 2 * d;
      cell.model.k = std::max<std::size_t>(1, d / 20);
      cell.model.noise_var = 1.0 / static_cast<double>(d);
      cell.train.p_prime = 2 * cell.model.p;
      cell.train.k = 0;
      cell.train.mask_size.reset();
      break;
    }
    case AxisParam::kNoiseStd:
      if (!(value >= 0.0)) throw ConfigError("axis value for noise_std must be >= 0");
      cell.model.noise_var = value * value;
      break;
    case AxisParam::kNoiseVar:
      if (!(value >= 0.0)) throw ConfigError("axis value for noise_var must be >= 0");
      cell.model.noise_var = value;
      break;
    case AxisParam::kK:
      cell.model.k = axis_count(value, "k");
      cell.train.k = 0;
      break;
    case AxisParam::kMaskSize:
      cell.train.mask_size = axis_count(value, "mask_size");
      break;
  }
  return cell;
}

ModelConfig model_from_json(const Json& j, ModelConfig base) {
  check_keys(j, {"d", "p", "k", "noise_var", "sigma_z", "normalize_codes", "n",
                 "n_holdout", "dictionary"},
             "model");
  if (j.contains("d")) base.d = get_count(j["d"], "d");
  if (j.contains("p")) base.p = get_count(j["p"], "p");
  if (j.contains("k")) base.k = get_count(j["k"], "k");
  if (j.contains("noise_var")) base.noise_var = get_real(j["noise_var"], "noise_var");
  if (j.contains("sigma_z")) base.sigma_z = get_real(j["sigma_z"], "sigma_z");
  if (j.contains("normalize_codes")) {
    base.normalize_codes = get_flag(j["normalize_codes"], "normalize_codes");
  }
  if (j.contains("n")) base.n = get_count(j["n"], "n");
  if (j.contains("n_holdout")) base.n_holdout = get_count(j["n_holdout"], "n_holdout");
  if (j.contains("dictionary")) {
    base.dictionary = dictionary_from_string(get_text(j["dictionary"], "dictionary"));
  }
  return base;
}

TrainConfig train_from_json(const Json& j, TrainConfig base) {
  check_keys(j, {"algorithm", "epochs", "batch_size", "lr", "beta1", "beta2", "adam_eps",
                 "mask_size", "k", "p_prime", "init", "seed", "shuffle", "mask_scope",
                 "full_mask_check"},
             "train");
  if (j.contains("algorithm")) {
    base.algorithm = algorithm_from_string(get_text(j["algorithm"], "algorithm"));
  }
  if (j.contains("epochs")) base.epochs = get_count(j["epochs"], "epochs");
  if (j.contains("batch_size")) base.batch_size = get_count(j["batch_size"], "batch_size");
  if (j.contains("lr")) base.lr = get_real(j["lr"], "lr");
  if (j.contains("beta1")) base.beta1 = get_real(j["beta1"], "beta1");
  if (j.contains("beta2")) base.beta2 = get_real(j["beta2"], "beta2");
  if (j.contains("adam_eps")) base.adam_eps = get_real(j["adam_eps"], "adam_eps");
  if (j.contains("mask_size")) {
    if (j["mask_size"].is_null()) {
      base.mask_size.reset();
    } else {
      base.mask_size = get_count(j["mask_size"], "mask_size");
    }
  }
  if (j.contains("k")) base.k = get_count(j["k"], "k");
  if (j.contains("p_prime")) base.p_prime = get_count(j["p_prime"], "p_prime");
  if (j.contains("init")) base.init = init_kind_from_string(get_text(j["init"], "init"));
  if (j.contains("seed")) base.seed = get_count(j["seed"], "seed");
  if (j.contains("shuffle")) base.shuffle = get_flag(j["shuffle"], "shuffle");
  if (j.contains("mask_scope")) {
    base.mask_scope = mask_scope_from_string(get_text(j["mask_scope"], "mask_scope"));
  }
  if (j.contains("full_mask_check")) {
    base.full_mask_check = get_flag(j["full_mask_check"], "full_mask_check");
  }
  return base;
}

ExperimentConfig experiment_from_json(const Json& j, bool paper_scale) {
  check_keys(j, {"experiment", "axis_param", "axis", "model", "train", "algorithms",
                 "inits", "seeds"},
             "experiment");
  const std::string name =
      j.contains("experiment") ? get_text(j["experiment"], "experiment") : "custom";
  ExperimentConfig cfg = preset(name, paper_scale);
  if (j.contains("axis_param")) {
    cfg.axis_param = axis_from_string(get_text(j["axis_param"], "axis_param"));
  }
  if (j.contains("axis")) cfg.axis = get_list<double>(j["axis"], "axis", get_real);
  if (j.contains("model")) cfg.model = model_from_json(j["model"], cfg.model);
  if (j.contains("train")) cfg.train = train_from_json(j["train"], cfg.train);
  if (j.contains("algorithms")) {
    cfg.algorithms = get_list<Algorithm>(j["algorithms"], "algorithms",
                                         [](const Json& x, const std::string& key) {
                                           return algorithm_from_string(get_text(x, key));
                                         });
  }
  if (j.contains("inits")) {
    cfg.inits = get_list<InitKind>(j["inits"], "inits",
                                   [](const Json& x, const std::string& key) {
                                     return init_kind_from_string(get_text(x, key));
                                   });
  }
  if (j.contains("seeds")) {
    cfg.seeds = get_list<std::uint64_t>(j["seeds"], "seeds", get_count);
  }
  cfg.validate();
  return cfg;
}

OverfitParams overfit_from_json(const Json& j) {
  check_keys(j, {"d", "p", "noise_var", "normalize_codes", "sigma_z", "n_eval", "gamma1",
                 "gamma2", "lambda_z", "net_sigma", "budget", "dictionary"},
             "overfit");
  OverfitParams o;
  if (j.contains("d")) o.d = get_count(j["d"], "d");
  if (j.contains("p")) o.p = get_count(j["p"], "p");
  if (j.contains("noise_var")) o.noise_var = get_real(j["noise_var"], "noise_var");
  if (j.contains("normalize_codes")) {
    o.normalize_codes = get_flag(j["normalize_codes"], "normalize_codes");
  }
  if (j.contains("sigma_z")) o.sigma_z = get_real(j["sigma_z"], "sigma_z");
  if (j.contains("n_eval")) o.n_eval = get_count(j["n_eval"], "n_eval");
  if (j.contains("gamma1")) o.gamma1 = get_real(j["gamma1"], "gamma1");
  if (j.contains("gamma2")) o.gamma2 = get_real(j["gamma2"], "gamma2");
  if (j.contains("lambda_z")) o.lambda_z = get_real(j["lambda_z"], "lambda_z");
  if (j.contains("net_sigma")) o.net_sigma = get_real(j["net_sigma"], "net_sigma");
  if (j.contains("budget")) o.budget = get_real(j["budget"], "budget");
  if (j.contains("dictionary")) {
    o.dictionary = dictionary_from_string(get_text(j["dictionary"], "dictionary"));
  }
  return o;
}

MaskingParams masking_from_json(const Json& j) {
  check_keys(j, {"d", "p", "k", "noise_var", "mask_size", "sigma_z_grid", "trials",
                 "dictionary"},
             "masking");
  MaskingParams m;
  if (j.contains("d")) m.d = get_count(j["d"], "d");
  if (j.contains("p")) m.p = get_count(j["p"], "p");
  if (j.contains("k")) m.k = get_count(j["k"], "k");
  if (j.contains("noise_var")) m.noise_var = get_real(j["noise_var"], "noise_var");
  if (j.contains("mask_size")) m.mask_size = get_count(j["mask_size"], "mask_size");
  if (j.contains("sigma_z_grid")) {
    m.sigma_z_grid = get_list<double>(j["sigma_z_grid"], "sigma_z_grid", get_real);
  }
  if (j.contains("trials")) m.trials = get_count(j["trials"], "trials");
  if (j.contains("dictionary")) {
    m.dictionary = dictionary_from_string(get_text(j["dictionary"], "dictionary"));
  }
  return m;
}

Json to_json(const ModelConfig& cfg) {
  return Json{{"d", cfg.d},
              {"p", cfg.p},
              {"k", cfg.k},
              {"noise_var", cfg.noise_var},
              {"sigma_z", cfg.sigma_z},
              {"normalize_codes", cfg.normalize_codes},
              {"n", cfg.n},
              {"n_holdout", cfg.n_holdout},
              {"dictionary", to_string(cfg.dictionary)}};
}

Json to_json(const TrainConfig& cfg) {
  return Json{{"algorithm", to_string(cfg.algorithm)},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"lr", cfg.lr},
              {"beta1", cfg.beta1},
              {"beta2", cfg.beta2},
              {"adam_eps", cfg.adam_eps},
              {"mask_size", cfg.mask_size ? Json(*cfg.mask_size) : Json(nullptr)},
              {"k", cfg.k},
              {"p_prime", cfg.p_prime},
              {"init", to_string(cfg.init)},
              {"seed", cfg.seed},
              {"shuffle", cfg.shuffle},
              {"mask_scope", to_string(cfg.mask_scope)},
              {"full_mask_check", cfg.full_mask_check}};
}

Json to_json(const ExperimentConfig& cfg) {
  Json algorithms = Json::array();
  for (Algorithm a : cfg.algorithms) algorithms.push_back(to_string(a));
  Json inits = Json::array();
  for (InitKind i : cfg.inits) inits.push_back(to_string(i));
  return Json{{"experiment", cfg.experiment},
              {"axis_param", to_string(cfg.axis_param)},
              {"axis", cfg.axis},
              {"model", to_json(cfg.model)},
              {"train", to_json(cfg.train)},
              {"algorithms", algorithms},
              {"inits", inits},
              {"seeds", cfg.seeds}};
}

Json to_json(const OverfitParams& o) {
  return Json{{"d", o.d},
              {"p", o.p},
              {"noise_var", o.noise_var},
              {"normalize_codes", o.normalize_codes},
              {"sigma_z", o.sigma_z},
              {"n_eval", o.n_eval},
              {"gamma1", o.gamma1},
              {"gamma2", o.gamma2},
              {"lambda_z", o.lambda_z ? Json(*o.lambda_z) : Json(nullptr)},
              {"net_sigma", o.net_sigma ? Json(*o.net_sigma) : Json(nullptr)},
              {"budget", o.budget},
              {"dictionary", to_string(o.dictionary)}};
}

Json to_json(const MaskingParams& m) {
  return Json{{"d", m.d},
              {"p", m.p},
              {"k", m.k},
              {"noise_var", m.noise_var},
              {"mask_size", m.mask_size},
              {"sigma_z_grid", m.sigma_z_grid},
              {"trials", m.trials},
              {"dictionary", to_string(m.dictionary)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace maskdl::cli
