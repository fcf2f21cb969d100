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

#ifndef MASKDL_METRICS_H_
#define MASKDL_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "maskdl/data_model.h"
#include "maskdl/decoder.h"
#include "maskdl/numerics.h"
#include "maskdl/rng.h"
#include "maskdl/sparse.h"

namespace maskdl {

struct AtomMatch {
  std::size_t atom = 0;    // column of A
  std::size_t column = 0;  // closest column of B
  int sign = 1;            // c in {-1, +1}
};

struct RecoveryReport {
  /// (1/p) sum_i min_{j, c} ||A_i - c B_j||^2
  double d_r_euclidean = 0.0;
  /// (1/p) sum_i (1 - max_j |cos(A_i, B_j)|)
  double d_r_cosine = 0.0;
  /// Euclidean best match per atom of A (ties: lowest j, then c = +1).
  std::vector<AtomMatch> per_atom_best_match;
};

/// Column-wise recovery error of B against the ground truth A.
///
/// Both forms are evaluated by their definitions, so B need not have unit
/// columns (the adversarial dictionaries built by theory.h do not). When both
/// inputs are unit-norm, d_r_euclidean = 2 * d_r_cosine. Throws ContractError
/// if the row counts differ or a column is zero.
RecoveryReport recovery_error(const Matrix& A, const Matrix& B);

/// max_{i != j} |<a_i, a_j>| / (||a_i|| ||a_j||). Equal to the usual mutual
/// coherence for unit-norm columns; 0 for a single column.
double mutual_coherence(const Matrix& A);

enum class RipMode { kExact, kSampled };

struct RipEstimate {
  double delta = 0.0;
  /// True when only a strict subset of supports was examined.
  bool is_lower_bound = false;
  std::size_t supports_evaluated = 0;
  std::vector<std::size_t> worst_support;
};

/// delta_s = max over size-s column subsets S of
/// max(sigma_max^2(A_S) - 1, 1 - sigma_min^2(A_S)).
///
/// Exact mode enumerates all C(p, s) supports and throws BudgetError above
/// budget. Sampled mode inspects `budget` distinct random supports (all of
/// them when budget >= C(p, s), in which case the value is exact).
RipEstimate rip_delta(const Matrix& A, std::size_t s, RipMode mode, double budget,
                      RngStream& rng);

/// Minimum support coefficient magnitude above which OMP is guaranteed to
/// pick a correct atom each step (noise sigma, coherence mu):
/// 2 sigma sqrt(k) sqrt(2 (1 + eta) log p) / (1 - (2k - 1) mu).
/// Infinity when (2k - 1) mu >= 1.
double omp_coefficient_threshold(double sigma, std::size_t k, std::size_t p,
                                 double mu, double eta = 0.0);

struct SupportRecoveryReport {
  double rate = 0.0;
  double gamma_threshold = 0.0;
  double coherence = 0.0;
  /// coherence < 1 / (2k - 1); the threshold is meaningless otherwise.
  bool incoherent = false;
  std::size_t trials = 0;
};

/// Fraction of fresh model samples whose OMP support (on B, or on P_M B when
/// a mask is given) equals supp(z_true) exactly. Decoding always takes k
/// steps.
SupportRecoveryReport support_recovery_rate(const GroundTruthModel& model,
                                            const Matrix& B,
                                            const std::optional<Mask>& mask,
                                            std::size_t trials, RngStream& rng,
                                            double eta = 0.0);

}  // namespace maskdl

#endif  // MASKDL_METRICS_H_
