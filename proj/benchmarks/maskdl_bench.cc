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


#include <benchmark/benchmark.h>

#include "maskdl/data_model.h"
#include "maskdl/decoder.h"
#include "maskdl/numerics.h"
#include "maskdl/rng.h"
#include "maskdl/trainer.h"

namespace maskdl {
namespace {

Vector random_signal(RngStream& rng, Index d) {
  Vector y(d);
  for (Index i = 0; i < d; ++i) y(i) = rng.normal();
  return y;
}

void BM_Omp(benchmark::State& state) {
  RngStream rng(1);
  const auto p = static_cast<Index>(state.range(0));
  const Matrix B = gaussian_matrix(rng, 100, p, true);
  const Vector y = random_signal(rng, 100);
  for (auto _ : state) benchmark::DoNotOptimize(omp(y, B, 5));
}
BENCHMARK(BM_Omp)->Arg(200)->Arg(400)->Arg(1000);

void BM_MaskedOmp(benchmark::State& state) {
  RngStream rng(2);
  const Matrix B = gaussian_matrix(rng, 100, 400, true);
  const Mask mask = Mask::random(rng, 100, 90);
  const MaskedDecoder decoder(B, mask);
  const Vector y = random_signal(rng, 100);
  for (auto _ : state) benchmark::DoNotOptimize(decoder.decode(y, 5));
}
BENCHMARK(BM_MaskedOmp);

void BM_Exhaustive(benchmark::State& state) {
  RngStream rng(3);
  const auto p = static_cast<Index>(state.range(0));
  const Matrix B = gaussian_matrix(rng, 10, p, true);
  const Vector y = random_signal(rng, 10);
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_decode(y, B, 2));
}
BENCHMARK(BM_Exhaustive)->Arg(10)->Arg(40);

void BM_TrainEpoch(benchmark::State& state) {
  RngStream rng(4);
  GroundTruthModel model;
  model.A = gaussian_matrix(rng, 50, 100, true);
  model.k = 3;
  model.normalize_codes = true;
  model.noise_var = 0.02;
  const Dataset data = generate_dataset(rng, model, 500, 400);
  TrainConfig cfg;
  cfg.algorithm = state.range(0) == 0 ? Algorithm::kBaseline : Algorithm::kMasked;
  cfg.epochs = 1;
  cfg.batch_size = 50;
  cfg.p_prime = 400;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, cfg));
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace maskdl

BENCHMARK_MAIN();
