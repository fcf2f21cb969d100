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

// Generative model y = A z + eps with k-sparse Gaussian codes and isotropic
// Gaussian noise, plus the in-memory dataset built from it.

#ifndef MASKDL_DATA_MODEL_H_
#define MASKDL_DATA_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maskdl/numerics.h"
#include "maskdl/rng.h"
#include "maskdl/sparse.h"

namespace maskdl {

enum class SupportDistribution { kUniform };

std::string to_string(SupportDistribution dist);
SupportDistribution support_distribution_from_string(const std::string& name);

struct GroundTruthModel {
  Matrix A;  // d x p, unit-norm columns
  std::size_t k = 1;
  double sigma_z = 1.0;
  bool normalize_codes = false;
  double noise_var = 0.0;
  SupportDistribution support_dist = SupportDistribution::kUniform;

  std::size_t d() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(A.cols()); }
  double noise_std() const;

  /// Throws ContractError when an invariant fails: 1 <= k <= p, unit-norm
  /// finite columns, noise_var >= 0, sigma_z >= 0 (and > 0 when codes are
  /// normalized).
  void validate() const;
};

struct Sample {
  Vector y;
  SparseVector z_true;
  Vector eps_true;
};

/// y = A z + eps, evaluated in one fixed order so that the latent-consistency
/// check can reproduce it bitwise.
Vector synthesize(const Matrix& A, const SparseVector& z, const Vector& eps);

/// Observation-only view over samples. Training code receives this and
/// cannot reach the stored latents.
class ObservationView {
 public:
  ObservationView() = default;
  explicit ObservationView(std::span<const Sample> samples) : samples_(samples) {}

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Vector& operator[](std::size_t i) const { return samples_[i].y; }
  ObservationView subview(std::size_t offset, std::size_t count) const {
    return ObservationView(samples_.subspan(offset, count));
  }

 private:
  std::span<const Sample> samples_;
};

struct Dataset {
  GroundTruthModel model;
  std::vector<Sample> samples;
  std::vector<Sample> holdout;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  ObservationView observations() const { return ObservationView(samples); }
  ObservationView holdout_observations() const { return ObservationView(holdout); }
};

/// Support uniform over size-k subsets of [p], values i.i.d. N(0, sigma_z^2),
/// rescaled to unit norm when model.normalize_codes is set.
SparseVector sample_code(RngStream& rng, const GroundTruthModel& model);

/// One draw of the full generative process.
Sample draw_sample(RngStream& rng, const GroundTruthModel& model);

/// n training samples followed by n_holdout samples from the same stream.
Dataset generate_dataset(RngStream& rng, const GroundTruthModel& model,
                         std::size_t n, std::size_t n_holdout);

/// ||y - (A z + eps)|| recomputed with synthesize(); exactly 0 for samples
/// produced by generate_dataset.
double latent_residual(const Sample& sample, const Matrix& A);

}  // namespace maskdl

#endif  // MASKDL_DATA_MODEL_H_
