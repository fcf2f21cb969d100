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

#include "maskdl/theory.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "maskdl/decoder.h"
#include "maskdl/error.h"
#include "maskdl/metrics.h"

namespace maskdl {
namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Standard error of the mean of v.
double standard_error(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double mean = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace

double lambda_quantile(const GroundTruthModel& model, std::size_t trials, RngStream& rng) {
  model.validate();
  const std::size_t d = model.d();
  if (trials < 100 * d) {
    throw ContractError("lambda_quantile: need at least 100 d = " +
                        std::to_string(100 * d) + " trials");
  }
  if (model.normalize_codes) return 1.0;
  std::vector<double> norms(trials);
  for (double& n : norms) n = sample_code(rng, model).norm();
  std::sort(norms.begin(), norms.end());
  const std::size_t tail = trials / d;
  return norms[trials - tail - 1];
}

namespace {

// Enumerates the kept grid points of one support, given an orthonormal basis
// Q of its span (one or two columns).
class NetGrid {
 public:
  NetGrid(const Matrix& A, const NetSpec& spec) : A_(A), spec_(spec) {}

  void visit(const Matrix& Q, const std::function<void(const Vector&)>& emit) const {
    const double reach = spec_.radius + spec_.grid_cover;
    const Matrix proj = Q.transpose() * A_;  // coordinates of each A_l in the span
    const Vector a_sq = A_.colwise().squaredNorm().transpose();
    const double hole_sq = spec_.hole_radius * spec_.hole_radius;
    // Square cells of half-diagonal grid_cover (an interval of half-width
    // grid_cover in one dimension).
    const double h =
        Q.cols() == 2 ? spec_.grid_cover * std::sqrt(2.0) : 2.0 * spec_.grid_cover;
    const auto half = static_cast<long>(std::ceil(reach / h)) + 1;
    Vector w(Q.cols());
    auto consider = [&]() {
      const double w_sq = w.squaredNorm();
      if (w_sq > reach * reach) return;
      for (Index l = 0; l < A_.cols(); ++l) {
        const double dot = w.dot(proj.col(l));
        if (w_sq + a_sq(l) - 2.0 * std::abs(dot) <= hole_sq) return;
      }
      emit(Q * w);
    };
    for (long i = -half; i < half; ++i) {
      w(0) = (static_cast<double>(i) + 0.5) * h;
      if (Q.cols() == 1) {
        consider();
        continue;
      }
      for (long j = -half; j < half; ++j) {
        w(1) = (static_cast<double>(j) + 0.5) * h;
        consider();
      }
    }
  }

 private:
  const Matrix& A_;
  const NetSpec& spec_;
};

Matrix span_basis(const Matrix& A, const std::vector<std::size_t>& support) {
  const Matrix sub = select_cols(A, support);
  Eigen::ColPivHouseholderQR<Matrix> qr(sub);
  if (qr.rank() < sub.cols()) {
    throw ContractError("build_adversarial_dictionary: dependent ground-truth columns");
  }
  Eigen::HouseholderQR<Matrix> thin(sub);
  return thin.householderQ() * Matrix::Identity(sub.rows(), sub.cols());
}

// Drops exact duplicate columns, keeping first occurrences in order.
Matrix drop_duplicates(const Matrix& B) {
  const auto q = static_cast<std::size_t>(B.cols());
  std::vector<std::size_t> idx(q);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    for (Index r = 0; r < B.rows(); ++r) {
      const double x = B(r, static_cast<Index>(a));
      const double y = B(r, static_cast<Index>(b));
      if (x != y) return x < y;
    }
    return a < b;
  };
  std::sort(idx.begin(), idx.end(), less);
  std::vector<char> keep(q, 1);
  for (std::size_t i = 1; i < q; ++i) {
    if (B.col(static_cast<Index>(idx[i])) == B.col(static_cast<Index>(idx[i - 1]))) {
      keep[idx[i]] = 0;
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < q; ++j) {
    if (keep[j]) kept.push_back(j);
  }
  if (kept.size() == q) return B;
  return select_cols(B, kept);
}

}  // namespace

AdversarialDictionary build_adversarial_dictionary(const Matrix& A, std::size_t k,
                                                   double sigma, double gamma1,
                                                   double gamma2, double lambda_z,
                                                   double budget) {
  if (k != 1) throw ContractError("build_adversarial_dictionary: only k = 1 is supported");
  if (!(sigma > 0.0)) throw ContractError("build_adversarial_dictionary: need sigma > 0");
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !(lambda_z >= 0.0)) {
    throw ContractError("build_adversarial_dictionary: gamma1, gamma2 must be positive");
  }
  if (A.cols() < 1 || !A.allFinite()) {
    throw ContractError("build_adversarial_dictionary: invalid ground truth");
  }
  const auto d = static_cast<double>(A.rows());
  const auto p = static_cast<std::size_t>(A.cols());

  NetSpec spec;
  spec.gamma1 = gamma1;
  spec.gamma2 = gamma2;
  spec.epsilon = gamma2 * sigma * sigma;
  spec.radius = gamma1 * std::max(sigma * std::sqrt(d), lambda_z);
  spec.hole_radius = spec.epsilon / 2.0;
  spec.grid_cover = spec.epsilon / 4.0;
  if (!(spec.epsilon < spec.radius)) {
    throw ContractError("build_adversarial_dictionary: epsilon must be below the radius");
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) spec.supports.push_back({i, j});
  }
  for (std::size_t i = 0; i < p; ++i) spec.supports.push_back({i});

  std::vector<Matrix> bases;
  bases.reserve(spec.supports.size());
  for (const auto& s : spec.supports) bases.push_back(span_basis(A, s));

  const NetGrid grid(A, spec);
  std::size_t required = 0;
  for (const Matrix& Q : bases) grid.visit(Q, [&](const Vector&) { ++required; });
  if (static_cast<double>(required) > budget) {
    throw BudgetError("build_adversarial_dictionary: the net needs " +
                          std::to_string(required) + " columns",
                      static_cast<double>(required), budget);
  }

  Matrix B(A.rows(), static_cast<Index>(required));
  Index next = 0;
  for (const Matrix& Q : bases) {
    grid.visit(Q, [&](const Vector& v) { B.col(next++) = v; });
  }
  AdversarialDictionary out{drop_duplicates(B), std::move(spec)};
  out.spec.columns = static_cast<std::size_t>(out.B.cols());
  return out;
}

NetAudit audit_net_cover(const Matrix& A, const AdversarialDictionary& net,
                         std::size_t trials, RngStream& rng) {
  const auto p = static_cast<std::size_t>(A.cols());
  if (p < 2) throw ContractError("audit_net_cover: need at least two atoms");
  const Vector b_sq = net.B.colwise().squaredNorm().transpose();
  NetAudit audit;
  audit.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::vector<std::size_t> support = rng.subset(p, 2);
    const Matrix Q = span_basis(A, support);
    // Uniform point of the disk of the given radius inside the span.
    const double r = net.spec.radius * std::sqrt(rng.uniform());
    const double angle = 2.0 * std::acos(-1.0) * rng.uniform();
    const Vector v = r * (std::cos(angle) * Q.col(0) + std::sin(angle) * Q.col(1));
    const Vector dist_sq = (b_sq - 2.0 * (net.B.transpose() * v)).array() + v.squaredNorm();
    Index best = 0;
    dist_sq.minCoeff(&best);
    audit.max_distance = std::max(audit.max_distance, (v - net.B.col(best)).norm());
  }
  audit.covered = audit.max_distance <= net.spec.epsilon;
  return audit;
}

OverfitReport compare_dictionaries(const GroundTruthModel& model, const Matrix& B,
                                   std::size_t n_eval, RngStream& rng, unsigned threads) {
  model.validate();
  if (B.rows() != model.A.rows()) {
    throw ContractError("compare_dictionaries: dictionary rows differ from model");
  }
  if (n_eval < 2) throw ContractError("compare_dictionaries: need n_eval >= 2");
  std::vector<Sample> samples;
  samples.reserve(n_eval);
  for (std::size_t i = 0; i < n_eval; ++i) samples.push_back(draw_sample(rng, model));

  const std::size_t k = model.k;
  ExhaustiveOptions opts;
  opts.budget = std::max({opts.budget, binomial(model.p(), k),
                          binomial(static_cast<std::size_t>(B.cols()), k)});
  std::vector<double> loss_a(n_eval), loss_b(n_eval);
  parallel_for(n_eval, threads, [&](std::size_t i) {
    const Vector& y = samples[i].y;
    loss_a[i] = (y - exhaustive_decode(y, model.A, k, opts).apply(model.A)).squaredNorm();
    loss_b[i] = (y - exhaustive_decode(y, B, k, opts).apply(B)).squaredNorm();
  });
  std::vector<double> diff(n_eval);
  for (std::size_t i = 0; i < n_eval; ++i) diff[i] = loss_a[i] - loss_b[i];

  OverfitReport report;
  report.n_eval = n_eval;
  report.columns = static_cast<std::size_t>(B.cols());
  report.loss_a = mean_of(loss_a);
  report.loss_b = mean_of(loss_b);
  report.gap = mean_of(diff);
  report.gap_se = standard_error(diff);
  const RecoveryReport r = recovery_error(model.A, B);
  report.d_r_euclidean = r.d_r_euclidean;
  report.d_r_cosine = r.d_r_cosine;
  Eigen::JacobiSVD<Matrix> svd(model.A);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  report.sigma_min_sq = model.A.cols() > model.A.rows() ? 0.0 : smin * smin;
  report.p_over_d = static_cast<double>(model.p()) / static_cast<double>(model.d());
  report.passed = report.gap > 3.0 * report.gap_se && report.d_r_euclidean > 1e-3;
  return report;
}

OverfitReport verify_theorem_overfit(const GroundTruthModel& model,
                                     const NetParams& params, std::size_t n_eval,
                                     RngStream& rng, unsigned threads) {
  model.validate();
  const double sigma = params.sigma ? *params.sigma : model.noise_std();
  double lambda_z = 0.0;
  if (params.lambda_z) {
    lambda_z = *params.lambda_z;
  } else {
    RngStream lambda_rng = rng.derive(0x4c);
    lambda_z = lambda_quantile(model, 1000 * model.d(), lambda_rng);
  }
  AdversarialDictionary net = build_adversarial_dictionary(
      model.A, model.k, sigma, params.gamma1, params.gamma2, lambda_z, params.budget);
  OverfitReport report = compare_dictionaries(model, net.B, n_eval, rng, threads);
  report.net = std::move(net.spec);
  return report;
}

namespace {

struct OracleBlocks {
  Matrix lambda;    // P_M A_S
  Matrix held_out;  // A_{H,S}
};

OracleBlocks oracle_blocks(const OracleEstimator& est,
                           const std::vector<std::size_t>& support) {
  if (static_cast<std::size_t>(est.A.rows()) != est.mask.dim()) {
    throw ContractError("oracle: mask dimension differs from the dictionary");
  }
  if (support.empty()) throw ContractError("oracle: empty support");
  for (std::size_t s : support) {
    if (s >= static_cast<std::size_t>(est.A.cols())) {
      throw ContractError("oracle: support index out of range");
    }
  }
  const Matrix cols = select_cols(est.A, support);
  return {select_rows(cols, est.mask.observed()), select_rows(cols, est.mask.held_out())};
}

double ridge_lambda(const OracleEstimator& est) {
  if (est.kind == OracleKind::kLeastSquares || est.sigma == 0.0) return 0.0;
  if (!(est.sigma_z > 0.0)) throw ContractError("oracle: ridge requires sigma_z > 0");
  return est.sigma * est.sigma / (est.sigma_z * est.sigma_z);
}

// W such that the prediction is W [y]_M.
Matrix oracle_weights(const OracleEstimator& est, const OracleBlocks& blocks) {
  const double lambda = ridge_lambda(est);
  const Index k = blocks.lambda.cols();
  if (lambda == 0.0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(blocks.lambda);
    cod.setThreshold(kSolveTolerance);
    if (cod.rank() < k) {
      throw NumericError("oracle: observed block of the support is rank deficient");
    }
    return blocks.held_out * cod.pseudoInverse();
  }
  Matrix gram = blocks.lambda.transpose() * blocks.lambda;
  gram.diagonal().array() += lambda;
  return blocks.held_out * gram.llt().solve(blocks.lambda.transpose());
}

}  // namespace

Vector oracle_predict(const OracleEstimator& est, const Vector& y_observed,
                      const std::vector<std::size_t>& support) {
  if (static_cast<std::size_t>(y_observed.size()) != est.mask.size()) {
    throw ContractError("oracle_predict: observed signal has the wrong length");
  }
  return oracle_weights(est, oracle_blocks(est, support)) * y_observed;
}

double oracle_conditional_risk(const OracleEstimator& est,
                               const std::vector<std::size_t>& support) {
  const OracleBlocks blocks = oracle_blocks(est, support);
  const Matrix W = oracle_weights(est, blocks);
  const double bias = (blocks.held_out - W * blocks.lambda).squaredNorm();
  return est.sigma_z * est.sigma_z * bias + est.sigma * est.sigma * W.squaredNorm();
}

namespace {

struct TrialErrors {
  std::vector<double> omp, ls, ridge, ls_cond, ridge_cond, recovered;
};

// Evaluates the three predictors on fixed draws (z, eps).
TrialErrors evaluate_draws(const Matrix& A, std::size_t k, double sigma_z, double sigma,
                           const Mask& mask, const std::vector<SparseVector>& codes,
                           const std::vector<Vector>& noise, unsigned threads) {
  OmpOptions options;
  options.force_k_steps = true;
  const MaskedDecoder decoder(A, mask, options);
  const OracleEstimator ls{OracleKind::kLeastSquares, A, mask, sigma_z, sigma};
  const OracleEstimator ridge{OracleKind::kRidge, A, mask, sigma_z, sigma};
  const std::size_t n = codes.size();
  TrialErrors e;
  for (auto* v : {&e.omp, &e.ls, &e.ridge, &e.ls_cond, &e.ridge_cond, &e.recovered}) {
    v->assign(n, 0.0);
  }
  parallel_for(n, threads, [&](std::size_t t) {
    const Vector signal = codes[t].apply(A);
    const Vector y = signal + noise[t];
    const Vector y_obs = select_rows(y, mask.observed());
    const Vector truth = select_rows(signal, mask.held_out());
    const SparseVector z_hat = decoder.decode_observed(y_obs, k).code;
    const Vector omp_pred = select_rows(z_hat.apply(A), mask.held_out());
    const auto& support = codes[t].support();
    e.omp[t] = (truth - omp_pred).squaredNorm();
    e.ls[t] = (truth - oracle_predict(ls, y_obs, support)).squaredNorm();
    e.ridge[t] = (truth - oracle_predict(ridge, y_obs, support)).squaredNorm();
    e.ls_cond[t] = oracle_conditional_risk(ls, support);
    e.ridge_cond[t] = oracle_conditional_risk(ridge, support);
    e.recovered[t] = z_hat.support() == support ? 1.0 : 0.0;
  });
  return e;
}

MaskedRiskReport summarize(const TrialErrors& e, double sigma_z) {
  MaskedRiskReport r;
  r.sigma_z = sigma_z;
  r.trials = e.omp.size();
  r.omp = mean_of(e.omp);
  r.ls_oracle = mean_of(e.ls);
  r.ridge_oracle = mean_of(e.ridge);
  r.ls_conditional = mean_of(e.ls_cond);
  r.ridge_conditional = mean_of(e.ridge_cond);
  std::vector<double> diff(e.omp.size());
  for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = e.omp[t] - e.ls[t];
  r.gap = mean_of(diff);
  r.gap_se = standard_error(diff);
  r.recovery_rate = mean_of(e.recovered);
  return r;
}

void check_masked_inputs(const GroundTruthModel& model, const Mask& mask,
                         std::size_t trials) {
  model.validate();
  mask.require_proper();
  if (mask.dim() != model.d()) throw ContractError("masked risk: mask dimension mismatch");
  if (model.k > mask.size()) throw ContractError("masked risk: k exceeds |M|");
  if (trials < 1000) throw ContractError("masked risk: need at least 1000 trials");
}

}  // namespace

MaskedRiskReport masked_risks(const GroundTruthModel& model, const Mask& mask,
                              std::size_t trials, RngStream& rng, unsigned threads) {
  check_masked_inputs(model, mask, trials);
  std::vector<SparseVector> codes;
  std::vector<Vector> noise;
  codes.reserve(trials);
  noise.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Sample s = draw_sample(rng, model);
    codes.push_back(std::move(s.z_true));
    noise.push_back(std::move(s.eps_true));
  }
  return summarize(evaluate_draws(model.A, model.k, model.sigma_z, model.noise_std(), mask,
                                  codes, noise, threads),
                   model.sigma_z);
}

double masked_risk(const GroundTruthModel& model, Predictor predictor, const Mask& mask,
                   std::size_t trials, RngStream& rng) {
  const MaskedRiskReport r = masked_risks(model, mask, trials, rng);
  switch (predictor) {
    case Predictor::kOmp:
      return r.omp;
    case Predictor::kLsOracle:
      return r.ls_oracle;
    case Predictor::kRidgeOracle:
      return r.ridge_oracle;
  }
  return r.omp;
}

MaskingReport verify_theorem_masking(const GroundTruthModel& model, const Mask& mask,
                                     const std::vector<double>& sigma_z_grid,
                                     std::size_t trials, RngStream& rng, bool strict,
                                     unsigned threads) {
  check_masked_inputs(model, mask, trials);
  if (model.normalize_codes) {
    throw ContractError("verify_theorem_masking: codes must not be normalized");
  }
  if (sigma_z_grid.empty()) throw ContractError("verify_theorem_masking: empty grid");
  for (double s : sigma_z_grid) {
    if (!(s > 0.0)) throw ContractError("verify_theorem_masking: sigma_z must be positive");
  }

  MaskingReport report;
  report.coherence = mutual_coherence(select_rows(model.A, mask.observed()));
  report.coherence_limit = 1.0 / (2.0 * static_cast<double>(model.k) - 1.0);
  report.incoherent = report.coherence < report.coherence_limit;
  if (!report.incoherent) {
    const std::string msg = "P_M A has coherence " + std::to_string(report.coherence) +
                            ", not below 1/(2k-1) = " +
                            std::to_string(report.coherence_limit);
    if (strict) throw ContractError("verify_theorem_masking: " + msg);
    report.warnings.push_back(msg);
  }

  GroundTruthModel unit = model;
  unit.sigma_z = 1.0;
  std::vector<SparseVector> base;
  std::vector<Vector> noise;
  for (std::size_t t = 0; t < trials; ++t) {
    Sample s = draw_sample(rng, unit);
    base.push_back(std::move(s.z_true));
    noise.push_back(std::move(s.eps_true));
  }

  std::vector<TrialErrors> errors;
  for (double sz : sigma_z_grid) {
    std::vector<SparseVector> codes;
    codes.reserve(trials);
    for (const SparseVector& z : base) {
      std::vector<double> values = z.values();
      for (double& v : values) v *= sz;
      codes.emplace_back(z.dim(), z.support(), std::move(values));
    }
    errors.push_back(evaluate_draws(model.A, model.k, sz, model.noise_std(), mask, codes,
                                    noise, threads));
    report.points.push_back(summarize(errors.back(), sz));
  }

  report.gap_non_increasing = true;
  report.recovery_non_decreasing = true;
  report.ridge_dominates = true;
  for (const MaskedRiskReport& pt : report.points) {
    if (pt.ridge_conditional > pt.ls_conditional * (1.0 + 1e-12)) {
      report.ridge_dominates = false;
    }
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    std::vector<double> gap_step(trials), rec_step(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      gap_step[t] = (errors[i + 1].omp[t] - errors[i + 1].ls[t]) -
                    (errors[i].omp[t] - errors[i].ls[t]);
      rec_step[t] = errors[i + 1].recovered[t] - errors[i].recovered[t];
    }
    const double gap_se = standard_error(gap_step);
    const double rec_se = standard_error(rec_step);
    report.gap_step_se.push_back(gap_se);
    report.recovery_step_se.push_back(rec_se);
    if (mean_of(gap_step) > 2.0 * gap_se) report.gap_non_increasing = false;
    if (mean_of(rec_step) < -2.0 * rec_se) report.recovery_non_decreasing = false;
  }
  report.passed =
      report.gap_non_increasing && report.recovery_non_decreasing && report.ridge_dominates;
  return report;
}

}  // namespace maskdl
