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

#include "maskdl/trainer.h"

#include <cmath>
#include <numeric>
#include <string>

#include "maskdl/decoder.h"
#include "maskdl/error.h"
#include "maskdl/metrics.h"
#include "maskdl/objectives.h"

namespace maskdl {
namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kMaskStream = 2;
constexpr std::uint64_t kEvalStream = 3;

}  // namespace

std::string to_string(Algorithm a) {
  return a == Algorithm::kBaseline ? "baseline" : "masked";
}

std::string to_string(InitKind i) { return i == InitKind::kSamples ? "samples" : "local"; }

std::string to_string(MaskScope s) {
  return s == MaskScope::kPerBatch ? "per_batch" : "per_sample";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "baseline") return Algorithm::kBaseline;
  if (name == "masked") return Algorithm::kMasked;
  throw ConfigError("unknown algorithm '" + name + "' (expected baseline or masked)");
}

InitKind init_kind_from_string(const std::string& name) {
  if (name == "samples") return InitKind::kSamples;
  if (name == "local") return InitKind::kLocal;
  throw ConfigError("unknown init '" + name + "' (expected samples or local)");
}

MaskScope mask_scope_from_string(const std::string& name) {
  if (name == "per_batch") return MaskScope::kPerBatch;
  if (name == "per_sample") return MaskScope::kPerSample;
  throw ConfigError("unknown mask scope '" + name + "' (expected per_batch or per_sample)");
}

std::size_t TrainConfig::resolved_k(const GroundTruthModel& model) const {
  return k == 0 ? model.k : k;
}

std::size_t TrainConfig::resolved_p_prime(const GroundTruthModel& model) const {
  return p_prime == 0 ? model.p() : p_prime;
}

std::size_t TrainConfig::resolved_mask_size(std::size_t d) const {
  return mask_size ? *mask_size : d - d / 10;
}

void TrainConfig::validate(const Dataset& dataset) const {
  const std::size_t d = dataset.model.d();
  const std::size_t n = dataset.samples.size();
  const std::size_t kk = resolved_k(dataset.model);
  const std::size_t pp = resolved_p_prime(dataset.model);
  if (n == 0) throw ConfigError("train: dataset has no samples");
  if (batch_size < 1 || batch_size > n) {
    throw ConfigError("train: batch_size " + std::to_string(batch_size) +
                      " must lie in [1, n = " + std::to_string(n) + "]");
  }
  if (!(lr > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(adam_eps > 0.0)) {
    throw ConfigError("train: invalid Adam hyperparameters");
  }
  if (kk < 1 || kk > std::min(d, pp)) {
    throw ConfigError("train: k = " + std::to_string(kk) + " must lie in [1, min(d, p')]");
  }
  if (init == InitKind::kLocal && pp < dataset.model.p()) {
    throw ConfigError("train: local init needs p' >= p");
  }
  const std::size_t from_holdout =
      init == InitKind::kLocal ? pp - dataset.model.p() : pp;
  if (dataset.holdout.size() < from_holdout) {
    throw ConfigError("train: " + to_string(init) + " init with p' = " +
                      std::to_string(pp) + " needs " + std::to_string(from_holdout) +
                      " holdout samples, dataset has " +
                      std::to_string(dataset.holdout.size()));
  }
  if (algorithm == Algorithm::kMasked && !full_mask_check) {
    const std::size_t m = resolved_mask_size(d);
    if (kk > m || m >= d) {
      throw ConfigError("train: masked training needs k <= mask_size < d (mask_size = " +
                        std::to_string(m) + ", d = " + std::to_string(d) + ")");
    }
  }
}

AdamState AdamState::zeros(Index d, Index p) {
  return {Matrix::Zero(d, p), Matrix::Zero(d, p), 0};
}

void adam_step(AdamState& state, const Matrix& grad, Matrix& B, const TrainConfig& cfg) {
  if (grad.rows() != B.rows() || grad.cols() != B.cols() ||
      state.first_moment.rows() != B.rows() || state.first_moment.cols() != B.cols() ||
      state.second_moment.rows() != B.rows() || state.second_moment.cols() != B.cols()) {
    throw ContractError("adam_step: shape mismatch");
  }
  if (!grad.allFinite()) throw NumericError("adam_step: gradient is not finite");
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  state.first_moment = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * grad;
  state.second_moment =
      cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  const double step = cfg.lr / bias1;
  const double root_bias2 = std::sqrt(bias2);
  B.array() -= step * state.first_moment.array() /
               (state.second_moment.array().sqrt() / root_bias2 + cfg.adam_eps);
  normalize_columns_in_place(B);
}

Matrix init_dictionary(InitKind init, const std::vector<Sample>& holdout,
                       const std::optional<Matrix>& A, std::size_t p_prime) {
  std::size_t first = 0;
  Index d = 0;
  if (init == InitKind::kLocal) {
    if (!A) throw ContractError("init_dictionary: local init needs the ground truth");
    first = static_cast<std::size_t>(A->cols());
    d = A->rows();
    if (p_prime < first) {
      throw ContractError("init_dictionary: p' = " + std::to_string(p_prime) +
                          " is smaller than p = " + std::to_string(first));
    }
  } else if (!holdout.empty()) {
    d = holdout.front().y.size();
  }
  const std::size_t needed = p_prime - first;
  if (holdout.size() < needed) {
    throw ContractError("init_dictionary: need " + std::to_string(needed) +
                        " holdout samples, have " + std::to_string(holdout.size()));
  }
  if (p_prime == 0) throw ContractError("init_dictionary: p' must be positive");
  Matrix B(d, static_cast<Index>(p_prime));
  if (first > 0) B.leftCols(static_cast<Index>(first)) = *A;
  for (std::size_t j = 0; j < needed; ++j) {
    const Vector& y = holdout[j].y;
    if (y.size() != d) throw ContractError("init_dictionary: holdout dimension mismatch");
    const double norm = y.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DegenerateColumnError("init_dictionary: holdout sample " + std::to_string(j) +
                                  " cannot be normalized");
    }
    B.col(static_cast<Index>(first + j)) = y / norm;
  }
  return B;
}

namespace {

class Run {
 public:
  Run(const Dataset& dataset, const TrainConfig& cfg, const IterationObserver& observer)
      : data_(dataset),
        cfg_(cfg),
        observer_(observer),
        d_(dataset.model.d()),
        k_(cfg.resolved_k(dataset.model)),
        mask_size_(cfg.resolved_mask_size(d_)),
        masked_(cfg.algorithm == Algorithm::kMasked),
        root_(cfg.seed),
        shuffle_rng_(root_.derive(kShuffleStream)),
        mask_rng_(root_.derive(kMaskStream)),
        full_rows_(all_rows(d_)) {}

  RunResult operator()() {
    RunResult result;
    result.config = cfg_;
    B_ = init_dictionary(cfg_.init, data_.holdout, data_.model.A,
                         cfg_.resolved_p_prime(data_.model));
    adam_ = AdamState::zeros(B_.rows(), B_.cols());
    record_error(result);
    try {
      result.loss_history.push_back(initial_loss());
    } catch (const NumericError& e) {
      throw NumericError(std::string("train: epoch 0 (initial evaluation): ") + e.what());
    }

    const std::size_t n = data_.samples.size();
    const std::size_t batches = (n + cfg_.batch_size - 1) / cfg_.batch_size;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 1; epoch <= cfg_.epochs; ++epoch) {
      if (cfg_.shuffle) order = shuffle_rng_.permutation(n);
      double epoch_loss = 0.0;
      for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t begin = b * cfg_.batch_size;
        const std::size_t end = std::min(n, begin + cfg_.batch_size);
        try {
          epoch_loss += iterate(epoch, result.iterations,
                                std::span(order).subspan(begin, end - begin));
        } catch (const NumericError& e) {
          throw NumericError("train: epoch " + std::to_string(epoch) + ", iteration " +
                             std::to_string(result.iterations) + ": " + e.what());
        }
        ++result.iterations;
      }
      result.loss_history.push_back(epoch_loss / static_cast<double>(n));
      record_error(result);
    }
    result.final_dictionary = B_;
    return result;
  }

 private:
  void record_error(RunResult& result) const {
    const RecoveryReport r = recovery_error(data_.model.A, B_);
    result.error_cosine.push_back(r.d_r_cosine);
    result.error_euclidean.push_back(r.d_r_euclidean);
  }

  Mask draw_mask(RngStream& rng) const {
    if (!masked_ || cfg_.full_mask_check) return Mask::full(d_);
    return Mask::random(rng, d_, mask_size_);
  }

  std::span<const std::size_t> eval_rows(const Mask& mask) const {
    if (!masked_ || cfg_.full_mask_check) return full_rows_;
    return mask.held_out();
  }

  SparseVector decode(const Vector& y, const MaskedDecoder* decoder) const {
    if (!masked_) return omp(y, B_, k_, options_);
    return decoder->decode(y, k_);
  }

  double initial_loss() const {
    RngStream eval_rng = root_.derive(kEvalStream);
    double total = 0.0;
    for (const Sample& s : data_.samples) {
      if (!masked_) {
        total += eval_set_loss(s.y, B_, omp(s.y, B_, k_, options_), full_rows_);
        continue;
      }
      const Mask mask = draw_mask(eval_rng);
      const MaskedDecoder decoder(B_, mask, options_);
      total += eval_set_loss(s.y, B_, decoder.decode(s.y, k_), eval_rows(mask));
    }
    return total / static_cast<double>(data_.samples.size());
  }

  // One optimizer step on the given batch; returns the summed sample loss.
  double iterate(std::size_t epoch, std::size_t iteration,
                 std::span<const std::size_t> batch) {
    const std::size_t size = batch.size();
    const bool per_sample = masked_ && cfg_.mask_scope == MaskScope::kPerSample;
    std::vector<Mask> masks;
    if (masked_) {
      const std::size_t count = per_sample ? size : 1;
      masks.reserve(count);
      for (std::size_t i = 0; i < count; ++i) masks.push_back(draw_mask(mask_rng_));
    }
    std::vector<MaskedDecoder> decoders;
    if (masked_ && !per_sample) decoders.emplace_back(B_, masks.front(), options_);

    std::vector<SparseVector> codes(size);
    parallel_for(size, cfg_.threads, [&](std::size_t i) {
      const Vector& y = data_.samples[batch[i]].y;
      if (per_sample) {
        const MaskedDecoder own(B_, masks[i], options_);
        codes[i] = decode(y, &own);
      } else {
        codes[i] = decode(y, decoders.empty() ? nullptr : &decoders.front());
      }
    });

    Matrix grad = Matrix::Zero(B_.rows(), B_.cols());
    const double scale = 1.0 / static_cast<double>(size);
    double loss = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const Mask* mask = masks.empty() ? nullptr : &masks[per_sample ? i : 0];
      const auto rows = mask ? eval_rows(*mask) : std::span<const std::size_t>(full_rows_);
      loss += accumulate_loss_gradient(data_.samples[batch[i]].y, B_, codes[i], rows,
                                       scale, grad);
    }
    if (!std::isfinite(loss)) throw NumericError("loss is not finite");
    if (observer_) observer_({epoch, iteration, &masks, &grad});
    adam_step(adam_, grad, B_, cfg_);
    return loss;
  }

  const Dataset& data_;
  const TrainConfig& cfg_;
  const IterationObserver& observer_;
  const std::size_t d_;
  const std::size_t k_;
  const std::size_t mask_size_;
  const bool masked_;
  const OmpOptions options_{};
  RngStream root_;
  RngStream shuffle_rng_;
  RngStream mask_rng_;
  const std::vector<std::size_t> full_rows_;
  Matrix B_;
  AdamState adam_;
};

}  // namespace

RunResult train(const Dataset& dataset, const TrainConfig& cfg,
                const IterationObserver& observer) {
  dataset.model.validate();
  cfg.validate(dataset);
  return Run(dataset, cfg, observer)();
}

}  // namespace maskdl
