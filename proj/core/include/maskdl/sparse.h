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

#ifndef MASKDL_SPARSE_H_
#define MASKDL_SPARSE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "maskdl/numerics.h"

namespace maskdl {

/// k-sparse vector in R^dim: strictly increasing support with aligned values.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}
  /// Pairs need not be sorted; they are sorted by index. Throws
  /// ContractError on out-of-range or duplicate indices or non-finite values.
  SparseVector(std::size_t dim, std::vector<std::size_t> support,
               std::vector<double> values);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return support_.size(); }
  const std::vector<std::size_t>& support() const { return support_; }
  const std::vector<double>& values() const { return values_; }

  Vector to_dense() const;
  /// B z, touching only the support columns of B.
  Vector apply(const Matrix& B) const;
  double norm() const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> support_;
  std::vector<double> values_;
};

/// Observed coordinate subset M of [d]. The complement is the held-out set.
///
/// 1 <= |M| <= d. A full mask (|M| = d) is representable so the baseline path
/// can share code with the masked one; anything that evaluates on the
/// complement must reject it via require_proper().
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t dim, std::vector<std::size_t> observed);

  static Mask full(std::size_t dim);
  static Mask random(RngStream& rng, std::size_t dim, std::size_t size);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return observed_.size(); }
  bool is_full() const { return observed_.size() == dim_; }
  const std::vector<std::size_t>& observed() const { return observed_; }
  /// Sorted complement [d] \ M.
  const std::vector<std::size_t>& held_out() const { return held_out_; }

  /// Throws ContractError unless both M and its complement are non-empty.
  void require_proper() const;

  bool operator==(const Mask& other) const {
    return dim_ == other.dim_ && observed_ == other.observed_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> observed_;
  std::vector<std::size_t> held_out_;
};

}  // namespace maskdl

#endif  // MASKDL_SPARSE_H_
