// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/rng.hpp"

#include <cmath>
#include <numbers>

namespace ajfuse {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::next_u64() noexcept {
  ++counter_;
  return mix64(seed_ + counter_ * kGamma);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double Rng::uniform_open0() noexcept {
  return static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
}

double Rng::normal() noexcept {
  if (spare_normal_) {
    double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  const double u1 = uniform_open0();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Multiply-shift keeps the mapping exact and platform independent.
  const auto wide = static_cast<unsigned __int128>(next_u64()) * span;
  return lo + static_cast<std::int64_t>(wide >> 64);
}

}  // namespace ajfuse
