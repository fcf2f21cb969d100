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

// JSON configuration for the maskdl tool. Every object rejects keys it does
// not know, and every parse failure surfaces as maskdl::ConfigError.

#ifndef MASKDL_TOOLS_CONFIG_H_
#define MASKDL_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maskdl/data_model.h"
#include "maskdl/rng.h"
#include "maskdl/trainer.h"

namespace maskdl::cli {

using Json = nlohmann::ordered_json;

enum class DictionaryKind { kGaussian, kOrthonormal };

struct ModelConfig {
  std::size_t d = 50;
  std::size_t p = 100;
  std::size_t k = 3;
  double noise_var = 0.02;
  double sigma_z = 1.0;
  bool normalize_codes = true;
  std::size_t n = 500;
  /// 0: as many as the initialization needs.
  std::size_t n_holdout = 0;
  DictionaryKind dictionary = DictionaryKind::kGaussian;

  void validate() const;
};

/// Ground truth drawn from `rng` per the config.
GroundTruthModel make_model(const ModelConfig& cfg, RngStream& rng);

/// A from rng.derive(1), samples from rng.derive(2).
Dataset make_dataset(const ModelConfig& cfg, std::size_t n_holdout, RngStream rng);

enum class AxisParam { kPPrime, kScaledD, kNoiseStd, kNoiseVar, kK, kMaskSize };

struct ExperimentConfig {
  std::string experiment = "custom";
  AxisParam axis_param = AxisParam::kPPrime;
  std::vector<double> axis;
  ModelConfig model;
  TrainConfig train;
  std::vector<Algorithm> algorithms = {Algorithm::kBaseline, Algorithm::kMasked};
  std::vector<InitKind> inits = {InitKind::kSamples, InitKind::kLocal};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};

  void validate() const;
};

/// Preset by name: scale_overrealization, scale_all, noise_sweep, custom.
ExperimentConfig preset(const std::string& experiment, bool paper_scale);

/// Model and training config of one sweep cell after applying the axis value.
struct CellSetup {
  ModelConfig model;
  TrainConfig train;
};
CellSetup apply_axis(const ExperimentConfig& cfg, double value);

struct OverfitParams {
  std::size_t d = 8;
  std::size_t p = 4;
  double noise_var = 0.05;
  bool normalize_codes = true;
  double sigma_z = 1.0;
  std::size_t n_eval = 2000;
  double gamma1 = 3.0;
  double gamma2 = 2.0;
  std::optional<double> lambda_z;
  std::optional<double> net_sigma;
  double budget = 5e5;
  DictionaryKind dictionary = DictionaryKind::kGaussian;
};

struct MaskingParams {
  std::size_t d = 60;
  std::size_t p = 30;
  std::size_t k = 3;
  double noise_var = 1.0 / 60.0;
  std::size_t mask_size = 54;
  std::vector<double> sigma_z_grid = {1.0, 4.0, 16.0, 64.0};
  std::size_t trials = 5000;
  DictionaryKind dictionary = DictionaryKind::kOrthonormal;
};

std::string to_string(DictionaryKind kind);
std::string to_string(AxisParam axis);

ModelConfig model_from_json(const Json& j, ModelConfig base = {});
TrainConfig train_from_json(const Json& j, TrainConfig base = {});
ExperimentConfig experiment_from_json(const Json& j, bool paper_scale);
OverfitParams overfit_from_json(const Json& j);
MaskingParams masking_from_json(const Json& j);

Json to_json(const ModelConfig& cfg);
Json to_json(const TrainConfig& cfg);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const OverfitParams& cfg);
Json to_json(const MaskingParams& cfg);

/// Reads and parses a JSON file; IoError if unreadable, ConfigError if
/// malformed.
Json read_json_file(const std::filesystem::path& path);

}  // namespace maskdl::cli

#endif  // MASKDL_TOOLS_CONFIG_H_
