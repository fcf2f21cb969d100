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

#include "maskdl/sparse.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "maskdl/error.h"

namespace maskdl {

SparseVector::SparseVector(std::size_t dim, std::vector<std::size_t> support,
                           std::vector<double> values)
    : dim_(dim) {
  if (support.size() != values.size()) {
    throw ContractError("SparseVector: support and values differ in length");
  }
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  support_.reserve(order.size());
  values_.reserve(order.size());
  for (std::size_t o : order) {
    if (support[o] >= dim) {
      throw ContractError("SparseVector: index " + std::to_string(support[o]) +
                          " out of range for dimension " + std::to_string(dim));
    }
    if (!support_.empty() && support_.back() == support[o]) {
      throw ContractError("SparseVector: duplicate index " +
                          std::to_string(support[o]));
    }
    if (!std::isfinite(values[o])) {
      throw ContractError("SparseVector: non-finite value");
    }
    support_.push_back(support[o]);
    values_.push_back(values[o]);
  }
}

Vector SparseVector::to_dense() const {
  Vector out = Vector::Zero(static_cast<Index>(dim_));
  for (std::size_t i = 0; i < support_.size(); ++i) {
    out(static_cast<Index>(support_[i])) = values_[i];
  }
  return out;
}

Vector SparseVector::apply(const Matrix& B) const {
  if (static_cast<std::size_t>(B.cols()) != dim_) {
    throw ContractError("SparseVector::apply: dictionary has " +
                        std::to_string(B.cols()) + " columns, code has dim " +
                        std::to_string(dim_));
  }
  Vector out = Vector::Zero(B.rows());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    out.noalias() += values_[i] * B.col(static_cast<Index>(support_[i]));
  }
  return out;
}

double SparseVector::norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

Mask::Mask(std::size_t dim, std::vector<std::size_t> observed)
    : dim_(dim), observed_(std::move(observed)) {
  std::sort(observed_.begin(), observed_.end());
  if (observed_.empty()) throw ContractError("Mask: observed set is empty");
  if (observed_.back() >= dim) {
    throw ContractError("Mask: index out of range");
  }
  if (std::adjacent_find(observed_.begin(), observed_.end()) != observed_.end()) {
    throw ContractError("Mask: duplicate observed index");
  }
  held_out_.reserve(dim - observed_.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (next < observed_.size() && observed_[next] == i) {
      ++next;
    } else {
      held_out_.push_back(i);
    }
  }
}

Mask Mask::full(std::size_t dim) {
  std::vector<std::size_t> all(dim);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return Mask(dim, std::move(all));
}

Mask Mask::random(RngStream& rng, std::size_t dim, std::size_t size) {
  return Mask(dim, rng.subset(dim, size));
}

void Mask::require_proper() const {
  if (observed_.empty() || held_out_.empty()) {
    throw ContractError("mask must leave a non-empty held-out set (|M| = " +
                        std::to_string(observed_.size()) + ", d = " +
                        std::to_string(dim_) + ")");
  }
}

}  // namespace maskdl
