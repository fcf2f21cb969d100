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


#include "maskdl/numerics.h"

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "maskdl/error.h"
#include "maskdl/metrics.h"
#include "maskdl/rng.h"

namespace maskdl {
namespace {

TEST(LeastSquaresTest, IdentityReturnsTarget) {
  Vector y(2);
  y << 3.0, -1.0;
  const Vector x = least_squares(Matrix::Identity(2, 2), y);
  EXPECT_DOUBLE_EQ(x(0), 3.0);
  EXPECT_DOUBLE_EQ(x(1), -1.0);
}

TEST(LeastSquaresTest, SingleColumnProjection) {
  Matrix A(2, 1);
  A << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Vector y(2);
  y << 1.0, 0.0;
  const Vector x = least_squares(A, y);
  ASSERT_EQ(x.size(), 1);
  EXPECT_NEAR(x(0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(LeastSquaresTest, MatchesNormalEquations) {
  RngStream rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = gaussian_matrix(rng, 6, 3, false);
    Vector y(6);
    for (Index i = 0; i < 6; ++i) y(i) = rng.normal();
    const Matrix gram = A.transpose() * A;
    const Vector expected = gram.inverse() * (A.transpose() * y);
    const Vector x = least_squares(A, y);
    for (Index i = 0; i < 3; ++i) EXPECT_NEAR(x(i), expected(i), 1e-8);
  }
}

TEST(LeastSquaresTest, RejectsShapeMismatch) {
  EXPECT_THROW(least_squares(Matrix::Identity(3, 2), Vector::Zero(2)), ContractError);
}

TEST(GaussianMatrixTest, NormalizedColumnsHaveUnitNorm) {
  RngStream rng(3);
  const Matrix A = gaussian_matrix(rng, 17, 40, true);
  for (Index j = 0; j < A.cols(); ++j) EXPECT_NEAR(A.col(j).norm(), 1.0, 1e-12);
}

TEST(GaussianMatrixTest, SameSeedSameMatrix) {
  RngStream a(42, 5);
  RngStream b(42, 5);
  const Matrix x = gaussian_matrix(a, 10, 20, true);
  const Matrix y = gaussian_matrix(b, 10, 20, true);
  EXPECT_TRUE((x.array() == y.array()).all());
}

TEST(GaussianMatrixTest, CoherenceUsuallyBelowPointSix) {
  int below = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream rng(seed);
    if (mutual_coherence(gaussian_matrix(rng, 100, 200, true)) < 0.6) ++below;
  }
  EXPECT_GE(below, 99);
}

TEST(OrthonormalMatrixTest, ColumnsAreOrthonormal) {
  RngStream rng(8);
  const Matrix Q = orthonormal_matrix(rng, 12, 7);
  EXPECT_LT((Q.transpose() * Q - Matrix::Identity(7, 7)).norm(), 1e-12);
  EXPECT_THROW(orthonormal_matrix(rng, 3, 4), ContractError);
}

TEST(NormalizeColumnsTest, ScalesToUnitNorm) {
  Matrix B(2, 1);
  B << 3.0, 4.0;
  const Matrix N = normalize_columns(B);
  EXPECT_DOUBLE_EQ(N(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(N(1, 0), 0.8);
}

TEST(NormalizeColumnsTest, Idempotent) {
  RngStream rng(1);
  const Matrix A = gaussian_matrix(rng, 9, 5, true);
  EXPECT_LE((normalize_columns(A) - A).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NormalizeColumnsTest, ZeroColumnThrows) {
  EXPECT_THROW(normalize_columns(Matrix::Zero(2, 1)), DegenerateColumnError);
}

TEST(BinomialTest, SmallValues) {
  EXPECT_EQ(binomial(6, 2), 15.0);
  EXPECT_EQ(binomial(10, 0), 1.0);
  EXPECT_EQ(binomial(3, 5), 0.0);
  EXPECT_EQ(binomial(200, 3), 1313400.0);
}

TEST(NextCombinationTest, EnumeratesAllSubsetsInOrder) {
  std::vector<std::size_t> combo = {0, 1};
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> previous;
  do {
    if (!previous.empty()) EXPECT_LT(previous, combo);
    previous = combo;
    seen.insert(combo);
  } while (next_combination(combo, 5));
  EXPECT_EQ(seen.size(), 10u);
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(ParallelForTest, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw NumericError("boom");
                            }),
               NumericError);
}

TEST(RngTest, DeriveIgnoresConsumption) {
  RngStream a(5);
  RngStream b(5);
  for (int i = 0; i < 10; ++i) b.next_u64();
  RngStream ca = a.derive(3);
  RngStream cb = b.derive(3);
  EXPECT_EQ(ca.next_u64(), cb.next_u64());
  EXPECT_NE(a.derive(3).next_u64(), a.derive(4).next_u64());
}

TEST(RngTest, SubsetIsSortedAndDistinct) {
  RngStream rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto s = rng.subset(20, 6);
    ASSERT_EQ(s.size(), 6u);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
    EXPECT_LT(s.back(), 20u);
  }
}

TEST(RngTest, NormalMoments) {
  RngStream rng(17);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

}  // namespace
}  // namespace maskdl
