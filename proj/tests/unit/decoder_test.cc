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


#include "maskdl/decoder.h"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "maskdl/error.h"
#include "maskdl/metrics.h"
#include "maskdl/numerics.h"
#include "maskdl/rng.h"
#include "maskdl/sparse.h"
#include "test_util.h"

namespace maskdl {
namespace {

using testing::incoherent_matrix;

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

SparseVector random_code(RngStream& rng, std::size_t p, std::size_t k) {
  std::vector<double> values(k);
  for (double& v : values) v = rng.normal();
  return SparseVector(p, rng.subset(p, k), values);
}

// Independent enumeration over all supports, solving each with an SVD.
SparseVector brute_force(const Vector& y, const Matrix& B, std::size_t k) {
  const auto p = static_cast<std::size_t>(B.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_support;
  Vector best_x;
  std::vector<std::size_t> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  while (true) {
    Matrix sub(B.rows(), static_cast<Index>(k));
    for (std::size_t i = 0; i < k; ++i) sub.col(static_cast<Index>(i)) = B.col(static_cast<Index>(s[i]));
    const Vector x = sub.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    const double r = (y - sub * x).squaredNorm();
    if (r < best) {
      best = r;
      best_support = s;
      best_x = x;
    }
    std::size_t i = k;
    while (i > 0 && s[i - 1] == p - k + i - 1) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return SparseVector(p, best_support,
                      std::vector<double>(best_x.data(), best_x.data() + best_x.size()));
}

TEST(OmpTest, IdentityPicksLargestCoordinate) {
  const Vector y = vec3(3, 0, 1);
  const OmpTrace t = omp_trace(y, Matrix::Identity(3, 3), 1);
  EXPECT_EQ(t.code.support(), (std::vector<std::size_t>{0}));
  EXPECT_DOUBLE_EQ(t.code.values()[0], 3.0);
  const Vector r = y - t.code.apply(Matrix::Identity(3, 3));
  EXPECT_TRUE(r.isApprox(vec3(0, 0, 1)));
  EXPECT_DOUBLE_EQ(t.residual_norms.back(), 1.0);
}

TEST(OmpTest, ExactAtomIsSelected) {
  RngStream rng(4);
  const Matrix B = incoherent_matrix(rng, 20, 8, 1.0 / 3.0);
  for (std::size_t j = 0; j < 8; ++j) {
    const SparseVector z = omp(B.col(static_cast<Index>(j)), B, 1);
    ASSERT_EQ(z.support(), (std::vector<std::size_t>{j}));
    EXPECT_NEAR(z.values()[0], 1.0, 1e-12);
  }
}

TEST(OmpTest, ExactRecoveryUnderIncoherence) {
  RngStream rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix B = incoherent_matrix(rng, 20, 8, 1.0 / 3.0);
    const SparseVector z = random_code(rng, 8, 2);
    const SparseVector got = omp(z.apply(B), B, 2);
    ASSERT_EQ(got.support(), z.support()) << "trial " << trial;
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(got.values()[i], z.values()[i], 1e-8);
  }
}

TEST(OmpTest, EarlyStopOnZeroSignal) {
  const SparseVector z = omp(Vector::Zero(3), Matrix::Identity(3, 3), 2);
  EXPECT_EQ(z.nnz(), 0u);
}

TEST(OmpTest, ContractViolations) {
  EXPECT_THROW(omp(Vector::Zero(2), Matrix::Identity(3, 3), 1), ContractError);
  EXPECT_THROW(omp(Vector::Zero(3), Matrix::Identity(3, 3), 4), ContractError);
  Matrix B = Matrix::Identity(3, 3);
  B.col(1).setZero();
  EXPECT_THROW(omp(vec3(1, 1, 1), B, 1), DegenerateColumnError);
  EXPECT_THROW(omp(vec3(NAN, 1, 1), Matrix::Identity(3, 3), 1), NumericError);
}

TEST(MaskedOmpTest, FullMaskMatchesOmp) {
  RngStream rng(5);
  const Matrix B = gaussian_matrix(rng, 15, 25, true);
  const MaskedDecoder dec(B, Mask::full(15));
  for (int t = 0; t < 50; ++t) {
    Vector y(15);
    for (Index i = 0; i < 15; ++i) y(i) = rng.normal();
    EXPECT_EQ(dec.decode(y, 3), omp(y, B, 3));
    EXPECT_EQ(omp_masked(y, B, 3, Mask::full(15)), omp(y, B, 3));
  }
}

TEST(MaskedOmpTest, RecoversSupportWhenRestrictionIsIncoherent) {
  RngStream rng(6);
  const std::size_t d = 30;
  const std::size_t p = 6;
  const std::size_t k = 2;
  int checked = 0;
  while (checked < 50) {
    const Matrix B = gaussian_matrix(rng, d, p, true);
    const Mask mask = Mask::random(rng, d, 24);
    const MaskedDecoder dec(B, mask);
    if (mutual_coherence(dec.restricted()) >= 1.0 / (2.0 * k - 1.0)) continue;
    const SparseVector z = random_code(rng, p, k);
    const SparseVector got = dec.decode(z.apply(B), k);
    ASSERT_EQ(got.support(), z.support());
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(got.values()[i], z.values()[i], 1e-8);
    ++checked;
  }
}

TEST(MaskedOmpTest, SignalOffMaskDecodesToZero) {
  RngStream rng(7);
  const Matrix B = gaussian_matrix(rng, 6, 4, true);
  const Mask mask(6, {0, 1, 2});
  Vector y = Vector::Zero(6);
  y(3) = 1.0;
  y(5) = -2.0;
  const SparseVector z = MaskedDecoder(B, mask).decode(y, 2);
  EXPECT_EQ(z.nnz(), 0u);
  EXPECT_EQ(z.apply(B).norm(), 0.0);
}

TEST(MaskedOmpTest, ReadsOnlyObservedRows) {
  RngStream rng(8);
  const Matrix B = gaussian_matrix(rng, 10, 12, true);
  const Mask mask(10, {0, 2, 3, 5, 7, 8, 9});
  const MaskedDecoder dec(B, mask);
  Vector y(10);
  for (Index i = 0; i < 10; ++i) y(i) = rng.normal();
  Vector y2 = y;
  for (std::size_t h : mask.held_out()) y2(static_cast<Index>(h)) = 100.0 * rng.normal();
  EXPECT_EQ(dec.decode(y, 3), dec.decode(y2, 3));
}

TEST(ExhaustiveTest, IdentityTwoSparse) {
  const Vector y = vec3(3, 0, 1);
  const SparseVector z = exhaustive_decode(y, Matrix::Identity(3, 3), 2);
  EXPECT_EQ(z.support(), (std::vector<std::size_t>{0, 2}));
  EXPECT_DOUBLE_EQ(z.values()[0], 3.0);
  EXPECT_DOUBLE_EQ(z.values()[1], 1.0);
  EXPECT_NEAR(residual_norm(y, Matrix::Identity(3, 3), z), 0.0, 1e-15);
}

TEST(ExhaustiveTest, MatchesBruteForceAndBeatsOmp) {
  RngStream rng(9);
  const Matrix B = gaussian_matrix(rng, 10, 6, true);
  for (int t = 0; t < 100; ++t) {
    Vector y(10);
    for (Index i = 0; i < 10; ++i) y(i) = rng.normal();
    const SparseVector got = exhaustive_decode(y, B, 2);
    const SparseVector ref = brute_force(y, B, 2);
    ASSERT_EQ(got.support(), ref.support());
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(got.values()[i], ref.values()[i], 1e-10);
    EXPECT_LE(residual_norm(y, B, got), residual_norm(y, B, omp(y, B, 2)) + 1e-12);
  }
}

TEST(ExhaustiveTest, ThreadCountDoesNotChangeResult) {
  RngStream rng(10);
  const Matrix B = gaussian_matrix(rng, 12, 14, true);
  Vector y(12);
  for (Index i = 0; i < 12; ++i) y(i) = rng.normal();
  EXPECT_EQ(exhaustive_decode(y, B, 3, {.budget = 1e6, .threads = 1}),
            exhaustive_decode(y, B, 3, {.budget = 1e6, .threads = 3}));
}

TEST(ExhaustiveTest, BudgetExceeded) {
  RngStream rng(11);
  const Matrix B = gaussian_matrix(rng, 12, 30, true);
  try {
    exhaustive_decode(Vector::Ones(12), B, 3, {.budget = 100.0, .threads = 1});
    FAIL() << "expected BudgetError";
  } catch (const BudgetError& e) {
    EXPECT_EQ(e.required(), 4060.0);
    EXPECT_EQ(e.budget(), 100.0);
  }
}

}  // namespace
}  // namespace maskdl
