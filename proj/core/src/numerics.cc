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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "maskdl/error.h"

namespace maskdl {

Vector least_squares(const Matrix& A, const Vector& y) {
  if (A.rows() < 1 || A.cols() < 1) {
    throw ContractError("least_squares: empty matrix");
  }
  if (A.rows() != y.size()) {
    throw ContractError("least_squares: A has " + std::to_string(A.rows()) +
                        " rows but y has " + std::to_string(y.size()) +
                        " entries");
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  return cod.solve(y);
}

Matrix gaussian_matrix(RngStream& rng, Index d, Index p, bool normalize_cols) {
  if (d < 1 || p < 1) throw ContractError("gaussian_matrix: d, p must be >= 1");
  Matrix A(d, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < d; ++i) A(i, j) = rng.normal();
  }
  if (normalize_cols) normalize_columns_in_place(A);
  return A;
}

Matrix orthonormal_matrix(RngStream& rng, Index d, Index p) {
  if (p > d) throw ContractError("orthonormal_matrix: requires p <= d");
  Matrix G = gaussian_matrix(rng, d, p, false);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(d, p);
  // Fix the sign ambiguity of QR so the result is Haar distributed.
  const Matrix R = qr.matrixQR().topLeftCorner(p, p);
  for (Index j = 0; j < p; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  normalize_columns_in_place(Q);
  return Q;
}

void normalize_columns_in_place(Matrix& B) {
  for (Index j = 0; j < B.cols(); ++j) {
    const double norm = B.col(j).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DegenerateColumnError("column " + std::to_string(j) +
                                  " has zero or non-finite norm");
    }
    B.col(j) /= norm;
  }
}

Matrix normalize_columns(const Matrix& B) {
  Matrix out = B;
  normalize_columns_in_place(out);
  return out;
}

Vector column_norms(const Matrix& B) { return B.colwise().norm().transpose(); }

bool all_finite(const Matrix& M) { return M.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

Matrix select_rows(const Matrix& M, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Index>(rows.size()), M.cols());
  for (Index j = 0; j < M.cols(); ++j) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out(static_cast<Index>(r), j) = M(static_cast<Index>(rows[r]), j);
    }
  }
  return out;
}

Vector select_rows(const Vector& v, std::span<const std::size_t> rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out(static_cast<Index>(r)) = v(static_cast<Index>(rows[r]));
  }
  return out;
}

Matrix select_cols(const Matrix& M, std::span<const std::size_t> cols) {
  Matrix out(M.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out.col(static_cast<Index>(c)) = M.col(static_cast<Index>(cols[c]));
  }
  return out;
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(result);
}

bool next_combination(std::vector<std::size_t>& combo, std::size_t n) {
  const std::size_t k = combo.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (combo[i] < n - k + i) {
      ++combo[i];
      for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
      return true;
    }
  }
  return false;
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("MASKDL_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) {
      return static_cast<unsigned>(value);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace maskdl
