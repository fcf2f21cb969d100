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

#include "maskdl/objectives.h"

#include <numeric>
#include <string>

#include "maskdl/error.h"

namespace maskdl {
namespace {

LossReport finish(std::vector<double> per_sample, DecoderKind kind) {
  LossReport report;
  report.decoder_used = kind;
  double sum = 0.0;
  for (double v : per_sample) sum += v;
  report.total = per_sample.empty() ? 0.0 : sum / static_cast<double>(per_sample.size());
  report.per_sample = std::move(per_sample);
  return report;
}

}  // namespace

std::vector<std::size_t> all_rows(std::size_t d) {
  std::vector<std::size_t> rows(d);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

LossReport recon_loss(const ObservationView& batch, const Matrix& B, std::size_t k,
                      DecoderKind decoder, const LossOptions& options) {
  std::vector<double> per_sample(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Vector& y = batch[i];
    const SparseVector z = decoder == DecoderKind::kOmp
                               ? omp(y, B, k, options.omp)
                               : exhaustive_decode(y, B, k, options.exhaustive);
    per_sample[i] = (y - z.apply(B)).squaredNorm();
  }
  return finish(std::move(per_sample), decoder);
}

LossReport masked_loss(const ObservationView& batch, const Matrix& B, std::size_t k,
                       const Mask& mask, const OmpOptions& options) {
  mask.require_proper();
  const MaskedDecoder decoder(B, mask, options);
  std::vector<double> per_sample(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Vector& y = batch[i];
    const SparseVector z = decoder.decode(y, k);
    per_sample[i] = eval_set_loss(y, B, z, mask.held_out());
  }
  return finish(std::move(per_sample), DecoderKind::kOmp);
}

double eval_set_loss(const Vector& y, const Matrix& B, const SparseVector& z,
                     std::span<const std::size_t> eval_rows) {
  const Vector fit = z.apply(B);
  double loss = 0.0;
  for (std::size_t r : eval_rows) {
    const double diff = y(static_cast<Index>(r)) - fit(static_cast<Index>(r));
    loss += diff * diff;
  }
  return loss;
}

double accumulate_loss_gradient(const Vector& y, const Matrix& B,
                                const SparseVector& z,
                                std::span<const std::size_t> eval_rows,
                                double scale, Matrix& grad) {
  if (z.dim() != static_cast<std::size_t>(B.cols())) {
    throw ContractError("loss_gradient: code dimension " + std::to_string(z.dim()) +
                        " != dictionary atoms " + std::to_string(B.cols()));
  }
  if (y.size() != B.rows() || grad.rows() != B.rows() || grad.cols() != B.cols()) {
    throw ContractError("loss_gradient: shape mismatch");
  }
  const Vector fit = z.apply(B);
  const auto& support = z.support();
  const auto& values = z.values();
  double loss = 0.0;
  for (std::size_t r : eval_rows) {
    const auto row = static_cast<Index>(r);
    if (row >= B.rows()) throw ContractError("loss_gradient: eval row out of range");
    const double diff = y(row) - fit(row);
    loss += diff * diff;
    const double g = -2.0 * diff * scale;
    for (std::size_t s = 0; s < support.size(); ++s) {
      grad(row, static_cast<Index>(support[s])) += g * values[s];
    }
  }
  return loss;
}

Matrix loss_gradient(const Vector& y, const Matrix& B, const SparseVector& z,
                     std::span<const std::size_t> eval_rows) {
  Matrix grad = Matrix::Zero(B.rows(), B.cols());
  accumulate_loss_gradient(y, B, z, eval_rows, 1.0, grad);
  return grad;
}

}  // namespace maskdl
