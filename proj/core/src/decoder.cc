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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maskdl/error.h"

namespace maskdl {
namespace {

void check_decode_shapes(const Vector& y, const Matrix& B, std::size_t k,
                         const char* who) {
  if (y.size() != B.rows()) {
    throw ContractError(std::string(who) + ": signal has " +
                        std::to_string(y.size()) + " entries, dictionary has " +
                        std::to_string(B.rows()) + " rows");
  }
  const auto limit = static_cast<std::size_t>(std::min(B.rows(), B.cols()));
  if (k > limit) {
    throw ContractError(std::string(who) + ": k = " + std::to_string(k) +
                        " exceeds min(rows, atoms) = " + std::to_string(limit));
  }
  if (!y.allFinite()) throw NumericError(std::string(who) + ": signal is not finite");
  if (!B.allFinite()) {
    throw NumericError(std::string(who) + ": dictionary is not finite");
  }
}

void check_no_zero_column(const Vector& norms) {
  for (Index j = 0; j < norms.size(); ++j) {
    if (!(norms(j) > 0.0)) {
      throw DegenerateColumnError("dictionary column " + std::to_string(j) +
                                  " is zero");
    }
  }
}

Vector selection_scales(const Vector& norms, bool rescale) {
  if (!rescale) return Vector::Ones(norms.size());
  Vector inv(norms.size());
  for (Index j = 0; j < norms.size(); ++j) {
    inv(j) = norms(j) > 0.0 ? 1.0 / norms(j) : 0.0;
  }
  return inv;
}

// Greedy pursuit shared by every OMP entry point. B is the (possibly row
// restricted) dictionary the signal y lives against.
OmpTrace pursue(const Vector& y, const Matrix& B, const Vector& inv_scale,
                std::size_t k, const OmpOptions& options) {
  const Index atoms = B.cols();
  OmpTrace trace;
  std::vector<char> taken(static_cast<std::size_t>(atoms), 0);
  std::vector<std::size_t>& order = trace.selection_order;
  order.reserve(k);

  const double y_norm = y.norm();
  const double stop = options.stop_tolerance * y_norm;
  Vector residual = y;
  Vector coeffs;
  Vector corr(atoms);
  trace.residual_norms.push_back(y_norm);

  for (std::size_t step = 0; step < k; ++step) {
    if (!options.force_k_steps && trace.residual_norms.back() <= stop) break;
    corr.noalias() = B.transpose() * residual;
    Index best = -1;
    double best_score = -1.0;
    for (Index j = 0; j < atoms; ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      const double score = std::abs(corr(j)) * inv_scale(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;
    taken[static_cast<std::size_t>(best)] = 1;
    order.push_back(static_cast<std::size_t>(best));

    const Matrix sub = select_cols(B, order);
    coeffs = least_squares(sub, y);
    residual = y - sub * coeffs;
    trace.residual_norms.push_back(residual.norm());
  }

  std::vector<double> values(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) values[i] = coeffs(static_cast<Index>(i));
  trace.code = SparseVector(static_cast<std::size_t>(atoms), order, std::move(values));
  return trace;
}

}  // namespace

std::string to_string(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kOmp:
      return "omp";
    case DecoderKind::kExhaustive:
      return "exhaustive";
  }
  return "unknown";
}

OmpTrace omp_trace(const Vector& y, const Matrix& B, std::size_t k,
                   const OmpOptions& options) {
  check_decode_shapes(y, B, k, "omp");
  const Vector norms = column_norms(B);
  check_no_zero_column(norms);
  return pursue(y, B, selection_scales(norms, options.rescale_selection), k, options);
}

SparseVector omp(const Vector& y, const Matrix& B, std::size_t k,
                 const OmpOptions& options) {
  return omp_trace(y, B, k, options).code;
}

MaskedDecoder::MaskedDecoder(const Matrix& B, Mask mask, OmpOptions options)
    : mask_(std::move(mask)), options_(options) {
  if (mask_.dim() != static_cast<std::size_t>(B.rows())) {
    throw ContractError("MaskedDecoder: mask dimension " +
                        std::to_string(mask_.dim()) + " != dictionary rows " +
                        std::to_string(B.rows()));
  }
  if (!B.allFinite()) throw NumericError("MaskedDecoder: dictionary is not finite");
  check_no_zero_column(column_norms(B));
  restricted_ = select_rows(B, mask_.observed());
  inv_scale_ = selection_scales(column_norms(restricted_), options_.rescale_selection);
}

OmpTrace MaskedDecoder::decode_observed(const Vector& y_observed,
                                        std::size_t k) const {
  if (k > mask_.size()) {
    throw ContractError("omp_masked: k = " + std::to_string(k) +
                        " exceeds the observed set size " +
                        std::to_string(mask_.size()));
  }
  check_decode_shapes(y_observed, restricted_, k, "omp_masked");
  return pursue(y_observed, restricted_, inv_scale_, k, options_);
}

OmpTrace MaskedDecoder::decode_trace(const Vector& y, std::size_t k) const {
  if (static_cast<std::size_t>(y.size()) != mask_.dim()) {
    throw ContractError("omp_masked: signal length " + std::to_string(y.size()) +
                        " != mask dimension " + std::to_string(mask_.dim()));
  }
  return decode_observed(select_rows(y, mask_.observed()), k);
}

SparseVector MaskedDecoder::decode(const Vector& y, std::size_t k) const {
  return decode_trace(y, k).code;
}

SparseVector omp_masked(const Vector& y, const Matrix& B, std::size_t k,
                        const Mask& mask, const OmpOptions& options) {
  return MaskedDecoder(B, mask, options).decode(y, k);
}

namespace {

struct SupportCandidate {
  double residual = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> support;
};

// Squared residual of projecting y onto span(B_S), via Gram-Schmidt with one
// re-orthogonalization pass. Dependent columns are skipped, which gives the
// same residual as the minimum-norm least-squares fit.
class ProjectionResidual {
 public:
  ProjectionResidual(const Matrix& B, const Vector& y, std::size_t k)
      : B_(B), y_(y), basis_(B.rows(), static_cast<Index>(k)), work_(B.rows()),
        residual_(B.rows()) {}

  double operator()(const std::vector<std::size_t>& support) {
    Index rank = 0;
    residual_ = y_;
    for (std::size_t col : support) {
      work_ = B_.col(static_cast<Index>(col));
      const double original = work_.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (Index q = 0; q < rank; ++q) {
          work_ -= basis_.col(q).dot(work_) * basis_.col(q);
        }
      }
      const double norm = work_.norm();
      if (!(norm > 1e-12 * original)) continue;
      basis_.col(rank) = work_ / norm;
      residual_ -= basis_.col(rank).dot(residual_) * basis_.col(rank);
      ++rank;
    }
    return residual_.squaredNorm();
  }

 private:
  const Matrix& B_;
  const Vector& y_;
  Matrix basis_;
  Vector work_;
  Vector residual_;
};

}  // namespace

SparseVector exhaustive_decode(const Vector& y, const Matrix& B, std::size_t k,
                               const ExhaustiveOptions& options) {
  check_decode_shapes(y, B, k, "exhaustive_decode");
  check_no_zero_column(column_norms(B));
  const auto atoms = static_cast<std::size_t>(B.cols());
  const double total = binomial(atoms, k);
  if (total > options.budget) {
    throw BudgetError("exhaustive_decode: C(" + std::to_string(atoms) + ", " +
                          std::to_string(k) + ") supports exceed the budget",
                      total, options.budget);
  }
  if (k == 0) return SparseVector(atoms);

  // Jobs are contiguous blocks of leading indices; enumeration inside a job is
  // lexicographic, and jobs are reduced in order, so ties resolve to the
  // lexicographically smallest support regardless of scheduling.
  const std::size_t leads = atoms - k + 1;
  const std::size_t jobs =
      options.threads <= 1 ? 1 : std::min<std::size_t>(leads, 16 * options.threads);
  std::vector<SupportCandidate> best(jobs);
  parallel_for(jobs, options.threads, [&](std::size_t job) {
    const std::size_t lead_begin = job * leads / jobs;
    const std::size_t lead_end = (job + 1) * leads / jobs;
    ProjectionResidual residual_of(B, y, k);
    SupportCandidate& local = best[job];
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = lead_begin + i;
    do {
      if (combo[0] >= lead_end) break;
      const double r = residual_of(combo);
      if (r < local.residual) {
        local.residual = r;
        local.support = combo;
      }
    } while (next_combination(combo, atoms));
  });

  const SupportCandidate* winner = &best[0];
  for (const SupportCandidate& c : best) {
    if (c.residual < winner->residual) winner = &c;
  }
  if (winner->support.empty()) {
    throw NumericError("exhaustive_decode: no finite residual found");
  }
  const Vector coeffs = least_squares(select_cols(B, winner->support), y);
  return SparseVector(atoms, winner->support,
                      std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size()));
}

double residual_norm(const Vector& y, const Matrix& B, const SparseVector& z) {
  return (y - z.apply(B)).norm();
}

}  // namespace maskdl
