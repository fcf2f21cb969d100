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

// Batched dictionary training: Adam on the full or masked reconstruction
// loss, each step followed by projection onto unit-norm columns.

#ifndef MASKDL_TRAINER_H_
#define MASKDL_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maskdl/data_model.h"
#include "maskdl/numerics.h"
#include "maskdl/sparse.h"

namespace maskdl {

enum class Algorithm { kBaseline, kMasked };
enum class InitKind { kSamples, kLocal };
enum class MaskScope { kPerBatch, kPerSample };

std::string to_string(Algorithm a);
std::string to_string(InitKind i);
std::string to_string(MaskScope s);
Algorithm algorithm_from_string(const std::string& name);
InitKind init_kind_from_string(const std::string& name);
MaskScope mask_scope_from_string(const std::string& name);

struct TrainConfig {
  Algorithm algorithm = Algorithm::kBaseline;
  std::size_t epochs = 500;
  std::size_t batch_size = 200;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Observed-set size |M|; unset means d - floor(d / 10).
  std::optional<std::size_t> mask_size;
  /// Sparsity used for decoding; 0 means the model's k.
  std::size_t k = 0;
  /// Number of learned atoms; 0 means the model's p.
  std::size_t p_prime = 0;
  InitKind init = InitKind::kSamples;
  std::uint64_t seed = 0;
  bool shuffle = true;
  MaskScope mask_scope = MaskScope::kPerBatch;
  /// Worker threads for per-sample decoding. Results do not depend on it.
  unsigned threads = 1;
  /// Masked only: run the masked code path with M = [d] and the loss on [d].
  /// Reproduces the baseline bit for bit.
  bool full_mask_check = false;

  std::size_t resolved_k(const GroundTruthModel& model) const;
  std::size_t resolved_p_prime(const GroundTruthModel& model) const;
  std::size_t resolved_mask_size(std::size_t d) const;

  /// Throws ConfigError if the config cannot run on this dataset.
  void validate(const Dataset& dataset) const;
};

struct AdamState {
  Matrix first_moment;
  Matrix second_moment;
  std::size_t step_count = 0;

  static AdamState zeros(Index d, Index p);
};

/// One bias-corrected Adam step on B followed by column normalization.
/// The moments are left untouched by the normalization. Throws NumericError on
/// a non-finite gradient and ContractError on a shape mismatch.
void adam_step(AdamState& state, const Matrix& grad, Matrix& B, const TrainConfig& cfg);

/// samples: columns are holdout[0..p_prime) normalized.
/// local: A followed by holdout[0..p_prime - p) normalized.
/// Throws ContractError when the holdout is too short or A is missing.
Matrix init_dictionary(InitKind init, const std::vector<Sample>& holdout,
                       const std::optional<Matrix>& A, std::size_t p_prime);

struct RunResult {
  Matrix final_dictionary;
  /// Entry 0 is the initial dictionary, entry e the dictionary after epoch e.
  std::vector<double> error_cosine;
  std::vector<double> error_euclidean;
  /// Entry 0 is the objective at initialization; entry e is the mean
  /// per-sample training loss seen during epoch e.
  std::vector<double> loss_history;
  std::size_t iterations = 0;
  TrainConfig config;
};

/// Passed to the optional per-iteration observer, before the Adam step.
struct IterationInfo {
  std::size_t epoch = 0;      // 1-based
  std::size_t iteration = 0;  // 0-based, global
  /// Masks of this iteration: one (per batch) or one per batch sample.
  const std::vector<Mask>* masks = nullptr;
  /// Mean gradient over the batch.
  const Matrix* gradient = nullptr;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

/// Trains a dictionary on dataset.samples (observations only). Each epoch
/// runs ceil(n / batch_size) iterations; the last batch may be smaller.
/// Non-finite values abort with a NumericError naming the epoch and
/// iteration.
RunResult train(const Dataset& dataset, const TrainConfig& cfg,
                const IterationObserver& observer = {});

}  // namespace maskdl

#endif  // MASKDL_TRAINER_H_
