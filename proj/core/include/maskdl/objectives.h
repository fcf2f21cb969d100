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

// Empirical reconstruction and masked losses, and their gradients with
// respect to the dictionary. Codes are treated as constants when
// differentiating: no gradient flows through the decoder.

#ifndef MASKDL_OBJECTIVES_H_
#define MASKDL_OBJECTIVES_H_

#include <span>
#include <vector>

#include "maskdl/data_model.h"
#include "maskdl/decoder.h"
#include "maskdl/numerics.h"
#include "maskdl/sparse.h"

namespace maskdl {

struct LossReport {
  double total = 0.0;  // mean of per_sample
  std::vector<double> per_sample;
  DecoderKind decoder_used = DecoderKind::kOmp;
};

struct LossOptions {
  OmpOptions omp;
  ExhaustiveOptions exhaustive;
};

/// per_sample[i] = ||y_i - B z_i||^2 with z_i from the chosen decoder.
LossReport recon_loss(const ObservationView& batch, const Matrix& B, std::size_t k,
                      DecoderKind decoder, const LossOptions& options = {});

/// per_sample[i] = ||[y_i - B z_i]_{[d]\M}||^2 with
/// z_i = g_OMP([y_i]_M, P_M B, k). The mask must be proper.
LossReport masked_loss(const ObservationView& batch, const Matrix& B, std::size_t k,
                       const Mask& mask, const OmpOptions& options = {});

/// ||[y - B z]_E||^2.
double eval_set_loss(const Vector& y, const Matrix& B, const SparseVector& z,
                     std::span<const std::size_t> eval_rows);

/// Gradient of ||[y]_E - [B z]_E||^2 in B with z held fixed:
/// -2 ([y]_E - [B z]_E) z^T on rows E, zero elsewhere. Only columns in
/// supp(z) are nonzero.
Matrix loss_gradient(const Vector& y, const Matrix& B, const SparseVector& z,
                     std::span<const std::size_t> eval_rows);

/// grad += scale * loss_gradient(y, B, z, eval_rows), touching only the
/// nonzero block. Returns the (unscaled) loss on the evaluation rows.
double accumulate_loss_gradient(const Vector& y, const Matrix& B,
                                const SparseVector& z,
                                std::span<const std::size_t> eval_rows,
                                double scale, Matrix& grad);

/// [0, d) as an explicit row list, the evaluation set of the full loss.
std::vector<std::size_t> all_rows(std::size_t d);

}  // namespace maskdl

#endif  // MASKDL_OBJECTIVES_H_
