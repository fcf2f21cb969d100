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

// Sparse decoders: orthogonal matching pursuit on the full or a row-masked
// dictionary, and an exhaustive k-sparse least-squares search for small
// instances.

#ifndef MASKDL_DECODER_H_
#define MASKDL_DECODER_H_

#include <string>
#include <vector>

#include "maskdl/numerics.h"
#include "maskdl/sparse.h"

namespace maskdl {

enum class DecoderKind { kOmp, kExhaustive };

std::string to_string(DecoderKind kind);

struct OmpOptions {
  /// Always take k steps, even when the residual is already negligible.
  bool force_k_steps = false;
  /// Score atoms by |<b_j, r>| / ||b_j||. Matters for masked decoding, where
  /// the restricted atoms P_M b_j are not unit norm. When false the raw
  /// correlation |<b_j, r>| is used.
  bool rescale_selection = true;
  /// Stop once ||r|| <= stop_tolerance * ||y||.
  double stop_tolerance = 1e-10;
};

/// Step-by-step record of one OMP run.
struct OmpTrace {
  SparseVector code;
  std::vector<std::size_t> selection_order;
  /// residual_norms[0] = ||y||, then ||r_t|| after each selection.
  std::vector<double> residual_norms;
};

/// g_OMP(y, B, k). Each step selects the unselected atom with the largest
/// score against the current residual (ties to the lowest index) and then
/// refits least squares on every selected atom. May return fewer than k atoms
/// when the residual vanishes early.
///
/// Throws ContractError if k > min(rows, cols) or shapes disagree,
/// DegenerateColumnError if B has a zero column, NumericError if y or B
/// contain non-finite values.
SparseVector omp(const Vector& y, const Matrix& B, std::size_t k,
                 const OmpOptions& options = {});
OmpTrace omp_trace(const Vector& y, const Matrix& B, std::size_t k,
                   const OmpOptions& options = {});

/// g_OMP([y]_M, P_M B, k). The returned code lives in R^{p'} and is meant to
/// be applied to the full B. With a full mask the result is bitwise equal to
/// omp(y, B, k).
SparseVector omp_masked(const Vector& y, const Matrix& B, std::size_t k,
                        const Mask& mask, const OmpOptions& options = {});

/// Caches P_M B and the selection scales so many signals can be decoded
/// against one (dictionary, mask) pair.
///
/// Restricted atoms that happen to vanish on M are never preferred over a
/// nonzero one; the full dictionary must still have no zero column.
class MaskedDecoder {
 public:
  MaskedDecoder(const Matrix& B, Mask mask, OmpOptions options = {});

  /// y is the full d-dimensional signal; only [y]_M is read.
  SparseVector decode(const Vector& y, std::size_t k) const;
  OmpTrace decode_trace(const Vector& y, std::size_t k) const;
  /// Decodes an already restricted signal [y]_M.
  OmpTrace decode_observed(const Vector& y_observed, std::size_t k) const;

  const Mask& mask() const { return mask_; }
  const Matrix& restricted() const { return restricted_; }

 private:
  Mask mask_;
  OmpOptions options_;
  Matrix restricted_;
  Vector inv_scale_;
};

struct ExhaustiveOptions {
  /// Maximum number of supports C(p', k) that may be enumerated.
  double budget = 1e6;
  unsigned threads = 1;
};

/// Global minimizer of ||y - B z||^2 over all size-k supports; ties go to the
/// lexicographically smallest support. Throws BudgetError if C(p', k)
/// exceeds options.budget.
SparseVector exhaustive_decode(const Vector& y, const Matrix& B, std::size_t k,
                               const ExhaustiveOptions& options = {});

/// ||y - B z|| for a decoded code.
double residual_norm(const Vector& y, const Matrix& B, const SparseVector& z);

}  // namespace maskdl

#endif  // MASKDL_DECODER_H_
