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

// Monte-Carlo checks of two facts about the objectives:
//  * with k = 1, a large dictionary built from epsilon-nets of the 2-sparse
//    signal sets has lower reconstruction loss than the ground truth while
//    staying away from it;
//  * under a mask, OMP on the ground truth approaches the support-oracle
//    predictors as the signal grows.
// Only this module reads the stored latents.

#ifndef MASKDL_THEORY_H_
#define MASKDL_THEORY_H_

#include <optional>
#include <string>
#include <vector>

#include "maskdl/data_model.h"
#include "maskdl/numerics.h"
#include "maskdl/rng.h"
#include "maskdl/sparse.h"

namespace maskdl {

/// (1 - 1/d) quantile of ||z||, estimated from `trials` draws (>= 100 d).
/// Exactly 1 for normalized codes.
double lambda_quantile(const GroundTruthModel& model, std::size_t trials, RngStream& rng);

inline constexpr double kDefaultNetBudget = 5e5;

struct NetSpec {
  double epsilon = 0.0;   // gamma2 * sigma^2
  double radius = 0.0;    // gamma1 * max(sigma sqrt(d), lambda_z)
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  /// Grid points within this distance of some +-A_l are dropped.
  double hole_radius = 0.0;
  /// Every point of a span within `radius` has a grid point this close.
  double grid_cover = 0.0;
  /// All pairs, then all singletons.
  std::vector<std::vector<std::size_t>> supports;
  std::size_t columns = 0;
};

struct AdversarialDictionary {
  Matrix B;  // d x q, columns not normalized
  NetSpec spec;
};

/// Union over 1- and 2-column supports S of a square grid on
/// {A_S x : ||A_S x|| <= radius + grid_cover} with grid_cover = epsilon / 4,
/// minus the points within epsilon / 2 of any +-A_l. The result is an
/// epsilon-net of each such set, and every column is farther than
/// epsilon / 2 from every +-A_l. Only k = 1 is supported.
///
/// Throws BudgetError (carrying the required column count) when the net
/// needs more than `budget` columns, ContractError on bad parameters.
AdversarialDictionary build_adversarial_dictionary(const Matrix& A, std::size_t k,
                                                   double sigma, double gamma1,
                                                   double gamma2, double lambda_z,
                                                   double budget = kDefaultNetBudget);

struct NetAudit {
  std::size_t trials = 0;
  double max_distance = 0.0;
  bool covered = false;  // max_distance <= epsilon
};

/// Draws `trials` points uniformly from the radius-limited 2-sparse signal
/// sets and measures the distance to the nearest column of B.
NetAudit audit_net_cover(const Matrix& A, const AdversarialDictionary& net,
                         std::size_t trials, RngStream& rng);

struct NetParams {
  double gamma1 = 3.0;
  double gamma2 = 2.0;
  /// Unset: estimated with lambda_quantile.
  std::optional<double> lambda_z;
  /// Noise scale used for the net; unset: the model's noise std.
  std::optional<double> sigma;
  double budget = kDefaultNetBudget;
};

struct OverfitReport {
  double loss_a = 0.0;  // mean ||y - A z*||^2, exhaustive decoding
  double loss_b = 0.0;
  double gap = 0.0;     // loss_a - loss_b
  double gap_se = 0.0;  // standard error of the paired difference
  double d_r_euclidean = 0.0;
  double d_r_cosine = 0.0;
  double sigma_min_sq = 0.0;  // sigma_min(A)^2, to compare with p / d
  double p_over_d = 0.0;
  std::size_t n_eval = 0;
  std::size_t columns = 0;
  std::optional<NetSpec> net;
  /// gap > 3 gap_se and d_r_euclidean > 0.001.
  bool passed = false;
};

/// Losses of A and B on the same n_eval fresh samples, exhaustive decoding.
OverfitReport compare_dictionaries(const GroundTruthModel& model, const Matrix& B,
                                   std::size_t n_eval, RngStream& rng,
                                   unsigned threads = 1);

/// Builds the adversarial dictionary for the model and compares it to A.
OverfitReport verify_theorem_overfit(const GroundTruthModel& model,
                                     const NetParams& params, std::size_t n_eval,
                                     RngStream& rng, unsigned threads = 1);

enum class OracleKind { kRidge, kLeastSquares };

struct OracleEstimator {
  OracleKind kind = OracleKind::kLeastSquares;
  Matrix A;
  Mask mask;
  double sigma_z = 1.0;
  double sigma = 0.0;
};

/// Held-out prediction from [y]_M given the true support S:
/// least squares  A_{H,S} Lambda^+ [y]_M,
/// ridge          A_{H,S} (Lambda^T Lambda + (sigma^2 / sigma_z^2) I)^{-1} Lambda^T [y]_M,
/// where Lambda = P_M A_S and H = [d] \ M. Ridge with sigma = 0 is least
/// squares. Throws NumericError when least squares meets a rank-deficient
/// Lambda and ContractError on bad inputs.
Vector oracle_predict(const OracleEstimator& est, const Vector& y_observed,
                      const std::vector<std::size_t>& support);

/// Expected held-out error of the oracle over z_S ~ N(0, sigma_z^2 I) and
/// the noise, for a fixed support.
double oracle_conditional_risk(const OracleEstimator& est,
                               const std::vector<std::size_t>& support);

enum class Predictor { kOmp, kLsOracle, kRidgeOracle };

struct MaskedRiskReport {
  double sigma_z = 0.0;
  double omp = 0.0;
  double ls_oracle = 0.0;
  double ridge_oracle = 0.0;
  /// Averages of oracle_conditional_risk over the drawn supports.
  double ls_conditional = 0.0;
  double ridge_conditional = 0.0;
  double gap = 0.0;     // omp - ls_oracle
  double gap_se = 0.0;
  double recovery_rate = 0.0;
  std::size_t trials = 0;
};

/// All three risks on the same draws. Requires trials >= 1000 and a proper
/// mask.
MaskedRiskReport masked_risks(const GroundTruthModel& model, const Mask& mask,
                              std::size_t trials, RngStream& rng, unsigned threads = 1);

double masked_risk(const GroundTruthModel& model, Predictor predictor, const Mask& mask,
                   std::size_t trials, RngStream& rng);

struct MaskingReport {
  std::vector<MaskedRiskReport> points;
  /// Standard errors of the successive paired differences.
  std::vector<double> gap_step_se;
  std::vector<double> recovery_step_se;
  double coherence = 0.0;  // of P_M A
  double coherence_limit = 0.0;  // 1 / (2k - 1)
  bool incoherent = false;
  bool gap_non_increasing = false;
  bool recovery_non_decreasing = false;
  bool ridge_dominates = false;
  bool passed = false;
  std::vector<std::string> warnings;
};

/// Evaluates masked_risks along the sigma_z grid, reusing one set of
/// standardized draws (codes are scaled by sigma_z). Steps may rise by at
/// most twice their paired standard error. Codes must not be normalized. In
/// strict mode a coherent P_M A raises ContractError instead of a warning.
MaskingReport verify_theorem_masking(const GroundTruthModel& model, const Mask& mask,
                                     const std::vector<double>& sigma_z_grid,
                                     std::size_t trials, RngStream& rng,
                                     bool strict = false, unsigned threads = 1);

}  // namespace maskdl

#endif  // MASKDL_THEORY_H_
