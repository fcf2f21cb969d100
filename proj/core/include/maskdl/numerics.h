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

// Dense linear algebra shared by every module. Matrices are Eigen
// column-major doubles; dictionaries store one atom per column.

#ifndef MASKDL_NUMERICS_H_
#define MASKDL_NUMERICS_H_

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "maskdl/rng.h"

namespace maskdl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Global tolerances.
inline constexpr double kSolveTolerance = 1e-8;
inline constexpr double kNormTolerance = 1e-12;

/// Minimum-norm minimizer of ||y - A x||^2.
///
/// Backed by a complete orthogonal decomposition (column-pivoted QR followed
/// by an RZ step), which stays well defined for rank-deficient or nearly
/// collinear column sets such as the atoms OMP picks from an over-realized
/// dictionary. Throws ContractError on a shape mismatch or empty operand.
Vector least_squares(const Matrix& A, const Vector& y);

/// d x p matrix with i.i.d. N(0, 1) entries, filled column by column. With
/// normalize_cols every column is rescaled to unit Euclidean norm.
Matrix gaussian_matrix(RngStream& rng, Index d, Index p, bool normalize_cols);

/// d x p matrix with orthonormal columns (Haar-distributed), p <= d.
Matrix orthonormal_matrix(RngStream& rng, Index d, Index p);

/// Divides each column by its Euclidean norm. Throws DegenerateColumnError
/// naming the first zero (or non-finite) column.
Matrix normalize_columns(const Matrix& B);
void normalize_columns_in_place(Matrix& B);

Vector column_norms(const Matrix& B);

bool all_finite(const Matrix& M);
bool all_finite(const Vector& v);

/// Rows of M listed in rows (P_M M for a row subset M).
Matrix select_rows(const Matrix& M, std::span<const std::size_t> rows);
Vector select_rows(const Vector& v, std::span<const std::size_t> rows);
/// Columns of M listed in cols (M_S).
Matrix select_cols(const Matrix& M, std::span<const std::size_t> cols);

/// Binomial coefficient as a double (exact below 2^53).
double binomial(std::size_t n, std::size_t k);

/// Advances a sorted k-combination of [0, n) to its lexicographic successor.
/// Returns false once the last combination has been passed.
bool next_combination(std::vector<std::size_t>& combo, std::size_t n);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work items are
/// claimed dynamically, so body must not depend on execution order.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

/// Thread count from the MASKDL_THREADS environment variable, falling back to
/// std::thread::hardware_concurrency().
unsigned default_thread_count();

}  // namespace maskdl

#endif  // MASKDL_NUMERICS_H_
