// Copyright 2026 The firstint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

namespace firstint {

/// splitmix64 step; also used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the stream identified by (master, index). Streams are
/// independent of how work is distributed over threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// xoshiro256** with hand-rolled distributions, so that sequences are
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  long range(long lo, long hi);
  bool bernoulli(double p) { return uniform() < p; }
  /// Index drawn proportionally to non-negative weights (not all zero).
  std::size_t weighted(const std::vector<double>& weights);

 private:
  std::uint64_t s_[4];
};

}  // namespace firstint
