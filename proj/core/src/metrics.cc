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

#include "maskdl/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "maskdl/error.h"

namespace maskdl {

RecoveryReport recovery_error(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) {
    throw ContractError("recovery_error: A has " + std::to_string(A.rows()) +
                        " rows, B has " + std::to_string(B.rows()));
  }
  if (A.cols() < 1 || B.cols() < 1) throw ContractError("recovery_error: empty matrix");
  const Vector a_norms = column_norms(A);
  const Vector b_norms = column_norms(B);
  if ((a_norms.array() <= 0.0).any() || (b_norms.array() <= 0.0).any()) {
    throw ContractError("recovery_error: zero column");
  }
  const Matrix gram = A.transpose() * B;

  RecoveryReport report;
  report.per_atom_best_match.reserve(static_cast<std::size_t>(A.cols()));
  double euclid_sum = 0.0;
  double cosine_sum = 0.0;
  for (Index i = 0; i < A.cols(); ++i) {
    const double a2 = a_norms(i) * a_norms(i);
    Index best_j = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    Index cos_j = 0;
    double best_cos = -1.0;
    for (Index j = 0; j < B.cols(); ++j) {
      const double g = gram(i, j);
      const double dist = a2 + b_norms(j) * b_norms(j) - 2.0 * std::abs(g);
      if (dist < best_dist) {
        best_dist = dist;
        best_j = j;
      }
      const double cos = std::abs(g) / (a_norms(i) * b_norms(j));
      if (cos > best_cos) {
        best_cos = cos;
        cos_j = j;
      }
    }
    const int sign = gram(i, best_j) < 0.0 ? -1 : 1;
    // Re-evaluate both winners directly so exact matches give exactly zero.
    // 1 - |cos| equals half the squared distance between the unit vectors.
    euclid_sum += (A.col(i) - sign * B.col(best_j)).squaredNorm();
    const double cos_sign = gram(i, cos_j) < 0.0 ? -1.0 : 1.0;
    cosine_sum += 0.5 * (A.col(i) / a_norms(i) - cos_sign * B.col(cos_j) / b_norms(cos_j))
                            .squaredNorm();
    report.per_atom_best_match.push_back(
        {static_cast<std::size_t>(i), static_cast<std::size_t>(best_j), sign});
  }
  const auto p = static_cast<double>(A.cols());
  report.d_r_euclidean = euclid_sum / p;
  report.d_r_cosine = cosine_sum / p;
  return report;
}

double mutual_coherence(const Matrix& A) {
  if (A.cols() < 2) return 0.0;
  const Matrix unit = normalize_columns(A);
  const Matrix gram = unit.transpose() * unit;
  double mu = 0.0;
  for (Index j = 0; j < gram.cols(); ++j) {
    for (Index i = 0; i < j; ++i) mu = std::max(mu, std::abs(gram(i, j)));
  }
  return mu;
}

namespace {

double support_distortion(const Matrix& A, const std::vector<std::size_t>& support) {
  const Matrix sub = select_cols(A, support);
  Eigen::JacobiSVD<Matrix> svd(sub);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  // More columns than rows: the smallest singular value is zero.
  const double smin =
      sub.cols() > sub.rows() ? 0.0 : (sv.size() > 0 ? sv(sv.size() - 1) : 0.0);
  return std::max(smax * smax - 1.0, 1.0 - smin * smin);
}

}  // namespace

RipEstimate rip_delta(const Matrix& A, std::size_t s, RipMode mode, double budget,
                      RngStream& rng) {
  const auto p = static_cast<std::size_t>(A.cols());
  if (s < 1 || s > p) throw ContractError("rip_delta: need 1 <= s <= p");
  const double total = binomial(p, s);
  RipEstimate est;
  auto consider = [&](const std::vector<std::size_t>& support) {
    const double delta = support_distortion(A, support);
    if (est.supports_evaluated == 0 || delta > est.delta) {
      est.delta = delta;
      est.worst_support = support;
    }
    ++est.supports_evaluated;
  };

  if (mode == RipMode::kExact && total > budget) {
    throw BudgetError("rip_delta: C(" + std::to_string(p) + ", " + std::to_string(s) +
                          ") supports exceed the exact-mode budget",
                      total, budget);
  }
  if (total <= budget) {
    std::vector<std::size_t> combo(s);
    for (std::size_t i = 0; i < s; ++i) combo[i] = i;
    do {
      consider(combo);
    } while (next_combination(combo, p));
    est.is_lower_bound = false;
    return est;
  }
  const auto draws = static_cast<std::size_t>(budget);
  std::set<std::vector<std::size_t>> seen;
  while (seen.size() < draws) {
    std::vector<std::size_t> support = rng.subset(p, s);
    if (seen.insert(support).second) consider(support);
  }
  est.is_lower_bound = true;
  return est;
}

double omp_coefficient_threshold(double sigma, std::size_t k, std::size_t p,
                                 double mu, double eta) {
  const double denom = 1.0 - (2.0 * static_cast<double>(k) - 1.0) * mu;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 * sigma * std::sqrt(static_cast<double>(k)) *
         std::sqrt(2.0 * (1.0 + eta) * std::log(static_cast<double>(p))) / denom;
}

SupportRecoveryReport support_recovery_rate(const GroundTruthModel& model,
                                            const Matrix& B,
                                            const std::optional<Mask>& mask,
                                            std::size_t trials, RngStream& rng,
                                            double eta) {
  model.validate();
  if (B.rows() != model.A.rows()) {
    throw ContractError("support_recovery_rate: dictionary rows differ from model");
  }
  OmpOptions options;
  options.force_k_steps = true;
  const Mask effective = mask ? *mask : Mask::full(model.d());
  const MaskedDecoder decoder(B, effective, options);

  SupportRecoveryReport report;
  report.trials = trials;
  report.coherence = mutual_coherence(decoder.restricted());
  report.incoherent =
      report.coherence < 1.0 / (2.0 * static_cast<double>(model.k) - 1.0);
  report.gamma_threshold = omp_coefficient_threshold(
      model.noise_std(), model.k, static_cast<std::size_t>(B.cols()),
      report.coherence, eta);

  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Sample s = draw_sample(rng, model);
    const SparseVector z = decoder.decode(s.y, model.k);
    if (z.support() == s.z_true.support()) ++hits;
  }
  report.rate = trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
  return report;
}

}  // namespace maskdl
