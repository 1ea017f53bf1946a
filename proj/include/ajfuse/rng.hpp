// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstdint>
#include <optional>

namespace ajfuse {

/// Counter-based generator with a fixed, platform-independent algorithm.
///
/// Draw i (0-based) is SplitMix64's finalizer applied to
/// `seed + (i + 1) * 0x9E3779B97F4A7C15` (mod 2^64). Uniform doubles take the
/// top 53 bits; normals use the Box-Muller transform on two uniforms in (0,1],
/// emitting the cosine branch first and caching the sine branch.
///
/// One instance per worker. Use `derive` to fork independent streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform in [0, 1).
  double uniform() noexcept;

  /// Uniform in (0, 1].
  double uniform_open0() noexcept;

  double normal() noexcept;

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

  /// Seed for the stream of a parallel work item: `seed ^ index`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return seed ^ index;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

/// SplitMix64 finalizer; a bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace ajfuse
