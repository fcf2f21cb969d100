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


#ifndef MASKDL_TESTS_UNIT_TEST_UTIL_H_
#define MASKDL_TESTS_UNIT_TEST_UTIL_H_

#include <cstddef>
#include <cstdint>

#include "maskdl/data_model.h"
#include "maskdl/metrics.h"
#include "maskdl/numerics.h"
#include "maskdl/rng.h"

namespace maskdl::testing {

inline GroundTruthModel gaussian_model(std::uint64_t seed, std::size_t d, std::size_t p,
                                       std::size_t k, double noise_var,
                                       bool normalize_codes = false,
                                       double sigma_z = 1.0) {
  RngStream rng(seed, 99);
  GroundTruthModel m;
  m.A = gaussian_matrix(rng, static_cast<Index>(d), static_cast<Index>(p), true);
  m.k = k;
  m.noise_var = noise_var;
  m.normalize_codes = normalize_codes;
  m.sigma_z = sigma_z;
  return m;
}

// Redraws until the coherence is below `limit`.
inline Matrix incoherent_matrix(RngStream& rng, std::size_t d, std::size_t p, double limit) {
  for (;;) {
    Matrix B = gaussian_matrix(rng, static_cast<Index>(d), static_cast<Index>(p), true);
    if (mutual_coherence(B) < limit) return B;
  }
}

}  // namespace maskdl::testing

#endif  // MASKDL_TESTS_UNIT_TEST_UTIL_H_
