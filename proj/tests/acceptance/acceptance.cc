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


// Acceptance checks 1 to 10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "commands.h"
#include "config.h"
#include "maskdl/decoder.h"
#include "maskdl/metrics.h"
#include "maskdl/numerics.h"
#include "maskdl/objectives.h"
#include "maskdl/rng.h"
#include "maskdl/theory.h"
#include "maskdl/trainer.h"

namespace maskdl::cli {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Vector gaussian_vector(RngStream& rng, std::size_t n) {
  Vector v(static_cast<Index>(n));
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v;
}

// Brute-force reference written independently of the library decoder.
SparseVector enumerate_supports(const Vector& y, const Matrix& B, std::size_t k) {
  const auto p = static_cast<std::size_t>(B.cols());
  std::vector<std::size_t> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_s;
  Vector best_x;
  for (;;) {
    Matrix sub(B.rows(), static_cast<Index>(k));
    for (std::size_t i = 0; i < k; ++i) sub.col(static_cast<Index>(i)) = B.col(static_cast<Index>(s[i]));
    const Vector x = sub.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    const double r = (y - sub * x).squaredNorm();
    if (r < best) {
      best = r;
      best_s = s;
      best_x = x;
    }
    std::size_t i = k;
    while (i > 0 && s[i - 1] == p - k + i - 1) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return SparseVector(p, best_s, std::vector<double>(best_x.data(), best_x.data() + best_x.size()));
}

Verdict gradient_check() {
  RngStream rng(101);
  const double h = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 2 + rng.uniform_below(29);
    const std::size_t p = 1 + rng.uniform_below(20);
    const std::size_t k = 1 + rng.uniform_below(std::min(d, p));
    Matrix B = gaussian_matrix(rng, static_cast<Index>(d), static_cast<Index>(p), false);
    std::vector<double> values(k);
    for (double& v : values) v = rng.normal();
    const SparseVector z(p, rng.subset(p, k), values);
    const Vector y = gaussian_vector(rng, d);
    const auto rows = rng.subset(d, 1 + rng.uniform_below(d));
    const Matrix G = loss_gradient(y, B, z, rows);
    for (std::size_t j : z.support()) {
      for (Index i = 0; i < B.rows(); ++i) {
        const double saved = B(i, static_cast<Index>(j));
        B(i, static_cast<Index>(j)) = saved + h;
        const double up = eval_set_loss(y, B, z, rows);
        B(i, static_cast<Index>(j)) = saved - h;
        const double down = eval_set_loss(y, B, z, rows);
        B(i, static_cast<Index>(j)) = saved;
        const double g = G(i, static_cast<Index>(j));
        worst = std::max(worst, std::abs((up - down) / (2 * h) - g) / std::max(std::abs(g), 1e-3));
      }
    }
  }
  return {worst < 1e-5, "100 instances, worst relative error " + fmt(worst, 3)};
}

Verdict decoder_check() {
  RngStream rng(102);
  int mismatches = 0;
  int worse_than_omp = 0;
  int done = 0;
  while (done < 200) {
    const std::size_t d = 3 + rng.uniform_below(10);
    const std::size_t p = 2 + rng.uniform_below(9);
    // k < d keeps the best support unique; at k = d every support fits exactly.
    const std::size_t k = 1 + rng.uniform_below(std::min(d - 1, p));
    if (binomial(p, k) > 200) continue;
    const Matrix B = gaussian_matrix(rng, static_cast<Index>(d), static_cast<Index>(p), true);
    const Vector y = gaussian_vector(rng, d);
    const SparseVector got = exhaustive_decode(y, B, k);
    const SparseVector ref = enumerate_supports(y, B, k);
    bool same = got.support() == ref.support();
    for (std::size_t i = 0; same && i < k; ++i) {
      same = std::abs(got.values()[i] - ref.values()[i]) <= 1e-10;
    }
    if (!same) ++mismatches;
    if (residual_norm(y, B, got) > residual_norm(y, B, omp(y, B, k)) + 1e-12) ++worse_than_omp;
    ++done;
  }
  return {mismatches == 0 && worse_than_omp == 0,
          "200 instances, " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(worse_than_omp) + " residuals above OMP"};
}

Verdict omp_recovery_check() {
  RngStream rng(103);
  int hits = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const std::size_t k = 1 + rng.uniform_below(3);
    const std::size_t p = 5 + rng.uniform_below(k == 3 ? 4 : 10);
    const std::size_t d = k == 1 ? 20 : (k == 2 ? 40 : 200);
    const double limit = 1.0 / (2.0 * static_cast<double>(k) - 1.0);
    Matrix B;
    do {
      B = gaussian_matrix(rng, static_cast<Index>(d), static_cast<Index>(p), true);
    } while (!(mutual_coherence(B) < limit));
    std::vector<double> values(k);
    for (double& v : values) v = rng.normal();
    const SparseVector z(p, rng.subset(p, k), values);
    if (omp(z.apply(B), B, k).support() == z.support()) ++hits;
  }
  return {hits == trials, std::to_string(hits) + "/" + std::to_string(trials) + " exact supports"};
}

Verdict metric_check() {
  RngStream rng(104);
  double worst_invariance = 0.0;
  double worst_identity = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index d = 4 + static_cast<Index>(rng.uniform_below(20));
    const Index p = 2 + static_cast<Index>(rng.uniform_below(20));
    const Matrix A = gaussian_matrix(rng, d, p, true);
    Matrix B(d, p + 3);
    const auto perm = rng.permutation(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      B.col(j) = sign * A.col(static_cast<Index>(perm[static_cast<std::size_t>(j)]));
    }
    B.rightCols(3) = gaussian_matrix(rng, d, 3, true);
    for (const Matrix* M : {&A, static_cast<const Matrix*>(&B)}) {
      const RecoveryReport r = recovery_error(A, *M);
      worst_invariance = std::max({worst_invariance, r.d_r_cosine, r.d_r_euclidean});
    }
    const Matrix C = gaussian_matrix(rng, d, 1 + static_cast<Index>(rng.uniform_below(15)), true);
    const RecoveryReport r = recovery_error(A, C);
    worst_identity = std::max(worst_identity, std::abs(r.d_r_euclidean - 2.0 * r.d_r_cosine));
  }
  return {worst_invariance <= 1e-12 && worst_identity <= 1e-12,
          "max invariance error " + fmt(worst_invariance, 3) + ", max |euc - 2 cos| " +
              fmt(worst_identity, 3)};
}

std::map<std::pair<Algorithm, InitKind>, double> cell_means(const SweepResult& r, double axis) {
  std::map<std::pair<Algorithm, InitKind>, std::vector<double>> groups;
  for (const SweepRow& row : r.rows) {
    if (row.axis_value == axis) groups[{row.algorithm, row.init}].push_back(row.final_d_r_cosine);
  }
  std::map<std::pair<Algorithm, InitKind>, double> out;
  for (const auto& [key, v] : groups) out[key] = mean(v);
  return out;
}

Verdict overrealization_check(const SweepResult& r) {
  const auto at100 = cell_means(r, 100);
  const auto at400 = cell_means(r, 400);
  bool pass = true;
  std::string detail;
  for (InitKind init : {InitKind::kSamples, InitKind::kLocal}) {
    const double base400 = at400.at({Algorithm::kBaseline, init});
    const double mask400 = at400.at({Algorithm::kMasked, init});
    const double gap400 = base400 - mask400;
    const double gap100 =
        at100.at({Algorithm::kBaseline, init}) - at100.at({Algorithm::kMasked, init});
    pass = pass && mask400 < base400 && gap400 > gap100;
    detail += to_string(init) + ": p'=400 baseline " + fmt(base400) + " masked " +
              fmt(mask400) + ", gap " + fmt(gap400) + " vs " + fmt(gap100) + " at p'=100; ";
  }
  detail.pop_back();
  detail.pop_back();
  return {pass, detail};
}

Verdict low_noise_check(unsigned threads) {
  ExperimentConfig cfg = preset("noise_sweep", false);
  cfg.experiment = "custom";
  cfg.axis = {1.0 / static_cast<double>(cfg.model.d)};
  cfg.inits = {InitKind::kSamples};
  cfg.train.p_prime = 400;
  SweepOptions opts;
  opts.threads = threads;
  opts.reproducible = true;
  const SweepResult r = run_sweep(cfg, opts);
  const auto means = cell_means(r, cfg.axis.front());
  const double base = means.at({Algorithm::kBaseline, InitKind::kSamples});
  const double masked = means.at({Algorithm::kMasked, InitKind::kSamples});
  double worst = 0.0;
  for (const SweepRow& row : r.rows) worst = std::max(worst, row.final_d_r_cosine);
  const bool pass = base < 0.05 && masked < 0.05 && std::abs(base - masked) < 0.02;
  return {pass, "baseline " + fmt(base) + ", masked " + fmt(masked) + ", |diff| " +
                    fmt(std::abs(base - masked)) + ", worst run " + fmt(worst)};
}

Verdict local_init_check(const SweepResult& r) {
  const ExperimentConfig& cfg = r.config;
  double init_error = 0.0;
  for (std::uint64_t seed : cfg.seeds) {
    const CellSetup setup = apply_axis(cfg, 400);
    const Dataset data = make_dataset(setup.model, 400, RngStream(r.master_seed).derive(seed));
    const Matrix B = init_dictionary(InitKind::kLocal, data.holdout, data.model.A, 400);
    init_error = std::max(init_error, recovery_error(data.model.A, B).d_r_cosine);
  }
  const auto at400 = cell_means(r, 400);
  const double base = at400.at({Algorithm::kBaseline, InitKind::kLocal});
  const double masked = at400.at({Algorithm::kMasked, InitKind::kLocal});
  const bool pass = base - init_error > 0.02 && masked < base;
  return {pass, "initial " + fmt(init_error) + ", baseline final " + fmt(base) +
                    ", masked final " + fmt(masked)};
}

Verdict overfit_check(unsigned threads) {
  const OverfitParams o;
  ModelConfig mc;
  mc.d = o.d;
  mc.p = o.p;
  mc.k = 1;
  mc.noise_var = o.noise_var;
  mc.normalize_codes = o.normalize_codes;
  mc.dictionary = o.dictionary;
  RngStream root(0);
  RngStream a_rng = root.derive(1);
  const GroundTruthModel model = make_model(mc, a_rng);
  NetParams np;
  np.gamma1 = o.gamma1;
  np.gamma2 = o.gamma2;
  np.budget = o.budget;
  RngStream eval_rng = root.derive(2);
  const OverfitReport r = verify_theorem_overfit(model, np, o.n_eval, eval_rng, threads);
  return {r.gap > 3.0 * r.gap_se && r.d_r_euclidean > 1e-3,
          "gap " + fmt(r.gap) + " (3 SE = " + fmt(3.0 * r.gap_se) + "), d_R " +
              fmt(r.d_r_euclidean) + ", q = " + std::to_string(r.columns)};
}

Verdict masking_check(unsigned threads) {
  const MaskingParams m;
  ModelConfig mc;
  mc.d = m.d;
  mc.p = m.p;
  mc.k = m.k;
  mc.noise_var = m.noise_var;
  mc.normalize_codes = false;
  mc.dictionary = m.dictionary;
  RngStream root(0);
  RngStream a_rng = root.derive(1);
  const GroundTruthModel model = make_model(mc, a_rng);
  RngStream mask_rng = root.derive(3);
  const Mask mask = Mask::random(mask_rng, m.d, m.mask_size);
  RngStream eval_rng = root.derive(2);
  const MaskingReport r =
      verify_theorem_masking(model, mask, m.sigma_z_grid, m.trials, eval_rng, false, threads);
  std::string gaps;
  std::string rates;
  for (const MaskedRiskReport& pt : r.points) {
    gaps += (gaps.empty() ? "" : " ") + fmt(pt.gap, 3);
    rates += (rates.empty() ? "" : " ") + fmt(pt.recovery_rate, 3);
  }
  return {r.gap_non_increasing && r.recovery_non_decreasing && r.ridge_dominates,
          "gaps [" + gaps + "], recovery [" + rates + "], ridge <= LS " +
              (r.ridge_dominates ? "yes" : "no")};
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(r, out);
  return out.str();
}

int run_all() {
  const unsigned threads = default_thread_count();
  int failures = 0;
  auto report = [&](int id, const std::function<Verdict()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("criterion %d: %s (%s; %.1f s)\n", id, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), s);
    std::fflush(stdout);
  };

  report(1, gradient_check);
  report(2, decoder_check);
  report(3, omp_recovery_check);
  report(4, metric_check);

  const ExperimentConfig sweep_cfg = preset("scale_overrealization", false);
  SweepOptions opts;
  opts.master_seed = 0;
  opts.threads = threads;
  opts.reproducible = true;
  SweepResult sweep;
  std::string sweep_error;
  try {
    sweep = run_sweep(sweep_cfg, opts);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  auto with_sweep = [&](const std::function<Verdict(const SweepResult&)>& f) {
    return [&, f]() -> Verdict {
      if (!sweep_error.empty()) return {false, "sweep failed: " + sweep_error};
      return f(sweep);
    };
  };
  report(5, with_sweep(overrealization_check));
  report(6, [&] { return low_noise_check(threads); });
  report(7, with_sweep(local_init_check));
  report(8, [&] { return overfit_check(threads); });
  report(9, [&] { return masking_check(threads); });
  report(10, with_sweep([&](const SweepResult& first) -> Verdict {
    const SweepResult again = run_sweep(sweep_cfg, opts);
    const std::string a = sweep_csv(first);
    const std::string b = sweep_csv(again);
    return {a == b, std::to_string(first.rows.size()) + " rows, " + std::to_string(a.size()) +
                        " bytes, " + (a == b ? "identical" : "different")};
  }));

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace maskdl::cli

int main() { return maskdl::cli::run_all(); }
