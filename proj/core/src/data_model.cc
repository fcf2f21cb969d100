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

#include "maskdl/data_model.h"

#include <cmath>

#include "maskdl/error.h"

namespace maskdl {

std::string to_string(SupportDistribution dist) {
  switch (dist) {
    case SupportDistribution::kUniform:
      return "uniform";
  }
  return "unknown";
}

SupportDistribution support_distribution_from_string(const std::string& name) {
  if (name == "uniform") return SupportDistribution::kUniform;
  throw ContractError("unknown support distribution '" + name + "'");
}

double GroundTruthModel::noise_std() const { return std::sqrt(noise_var); }

void GroundTruthModel::validate() const {
  if (A.rows() < 1 || A.cols() < 1) throw ContractError("model: empty A");
  if (k < 1 || k > p()) {
    throw ContractError("model: k = " + std::to_string(k) +
                        " must satisfy 1 <= k <= p = " + std::to_string(p()));
  }
  if (!A.allFinite()) throw ContractError("model: A has non-finite entries");
  for (Index j = 0; j < A.cols(); ++j) {
    if (std::abs(A.col(j).norm() - 1.0) > 1e-10) {
      throw ContractError("model: column " + std::to_string(j) +
                          " of A is not unit norm");
    }
  }
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw ContractError("model: noise_var must be finite and >= 0");
  }
  if (!(sigma_z >= 0.0) || !std::isfinite(sigma_z)) {
    throw ContractError("model: sigma_z must be finite and >= 0");
  }
  if (normalize_codes && !(sigma_z > 0.0)) {
    throw ContractError("model: normalized codes require sigma_z > 0");
  }
}

SparseVector sample_code(RngStream& rng, const GroundTruthModel& model) {
  std::vector<std::size_t> support = rng.subset(model.p(), model.k);
  std::vector<double> values(support.size());
  double sq = 0.0;
  for (double& v : values) {
    v = model.sigma_z * rng.normal();
    sq += v * v;
  }
  if (model.normalize_codes) {
    const double norm = std::sqrt(sq);
    for (double& v : values) v /= norm;
  }
  return SparseVector(model.p(), std::move(support), std::move(values));
}

Vector synthesize(const Matrix& A, const SparseVector& z, const Vector& eps) {
  Vector y = z.apply(A);
  y += eps;
  return y;
}

Sample draw_sample(RngStream& rng, const GroundTruthModel& model) {
  Sample s;
  s.z_true = sample_code(rng, model);
  const double std_dev = model.noise_std();
  s.eps_true.resize(model.A.rows());
  for (Index i = 0; i < s.eps_true.size(); ++i) s.eps_true(i) = std_dev * rng.normal();
  s.y = synthesize(model.A, s.z_true, s.eps_true);
  return s;
}

Dataset generate_dataset(RngStream& rng, const GroundTruthModel& model,
                         std::size_t n, std::size_t n_holdout) {
  model.validate();
  if (n < 1) throw ContractError("generate_dataset: n must be >= 1");
  Dataset ds;
  ds.model = model;
  ds.seed = rng.seed();
  ds.stream_id = rng.stream_id();
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ds.samples.push_back(draw_sample(rng, model));
  ds.holdout.reserve(n_holdout);
  for (std::size_t i = 0; i < n_holdout; ++i) {
    ds.holdout.push_back(draw_sample(rng, model));
  }
  return ds;
}

double latent_residual(const Sample& sample, const Matrix& A) {
  return (sample.y - synthesize(A, sample.z_true, sample.eps_true)).norm();
}

}  // namespace maskdl
