// Copyright 2026 The Anchored Inversion Authors
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

#ifndef ANCHORED_RNG_HPP
#define ANCHORED_RNG_HPP

#include <cstdint>
#include <random>

#include "anchored/linalg.hpp"

namespace anchored {

using Rng = std::mt19937_64;

/// Stream tags used to derive independent substreams from a run seed.
enum class StreamTag : std::uint32_t {
  typeA_assignment = 1,
  structural = 2,
  anchors = 3,
  field = 4,
  output_error = 5,
  posterior = 6,
  truth_noise = 7,
};

/**
 * Deterministic substream for (seed, tag, index). Every stochastic step of a
 * draw pulls from its own substream, so results do not depend on how draws
 * are scheduled across workers.
 */
inline Rng substream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

template <typename Scalar = double>
Vector<Scalar> standard_normal(Index n, Rng& rng) {
  std::normal_distribution<Scalar> normal;
  Vector<Scalar> z(n);
  for (Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

}  // namespace anchored

#endif  // ANCHORED_RNG_HPP
