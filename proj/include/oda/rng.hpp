// Copyright 2026 The ODA Lab Authors.
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
#include <random>
#include <vector>

namespace oda {

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Deterministic random stream.
///
/// The engine is std::mt19937_64 (bit-exact across platforms); all
/// distributions are implemented here rather than via <random>'s
/// implementation-defined distribution classes, so replays from a seed are
/// byte-identical everywhere. Child streams are derived from the root seed
/// and a stream id, independent of how much the parent has been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : root_(seed), engine_(detail::splitmix64(seed)) {}

  std::uint64_t root_seed() const { return root_; }

  /// Independent child stream keyed by (root seed, stream id).
  Rng fork(std::uint64_t stream_id) const {
    return Rng(detail::splitmix64(root_ ^ detail::splitmix64(stream_id + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  bool coin() { return (next_u64() & 1ULL) != 0; }

  /// Uniform on [0, bound), bound >= 1. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return r % bound;
  }

  /// Uniform integer on the inclusive range [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Binomial(n, 1/2) by counting n fair bits.
  std::size_t binomial_half(std::size_t n) {
    std::size_t count = 0;
    while (n >= 64) {
      count += static_cast<std::size_t>(__builtin_popcountll(next_u64()));
      n -= 64;
    }
    if (n > 0) {
      const std::uint64_t word = next_u64() & ((n == 64) ? ~0ULL : ((1ULL << n) - 1));
      count += static_cast<std::size_t>(__builtin_popcountll(word));
    }
    return count;
  }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t root_;
  std::mt19937_64 engine_;
};

}  // namespace oda
