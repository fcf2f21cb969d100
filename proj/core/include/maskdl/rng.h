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

#ifndef MASKDL_RNG_H_
#define MASKDL_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace maskdl {

/// Deterministic random stream identified by (seed, stream id).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Its seed is SplitMix64(seed ^ SplitMix64(stream_id)). All value
/// conversions (uniform reals, bounded integers, normals, subsets) are
/// implemented here rather than with <random> distributions, so a given
/// (seed, stream id) yields the same draws with any standard library.
///
/// Independent sub-streams are obtained with derive(); a stream is meant to
/// be owned by one task at a time.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream whose identity depends only on (seed, stream_id, tag),
  /// never on how many values this stream has already produced.
  RngStream derive(std::uint64_t tag) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_zero();
  /// Uniform integer in [0, bound), unbiased. bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Standard normal via Box-Muller (cosine branch only).
  double normal();

  /// Uniformly random size-k subset of [0, n), returned sorted.
  std::vector<std::size_t> subset(std::size_t n, std::size_t k);
  /// Uniformly random permutation of [0, n).
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace maskdl

#endif  // MASKDL_RNG_H_
