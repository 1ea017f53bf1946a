// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ajfuse/error.hpp"
#include "ajfuse/metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace ajfuse {
namespace {

using testing::random_image;
using testing::textured_image;

using oracle::naive_ssim;

TEST(SsimPair, SelfSimilarityIsOne) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Image a = textured_image(40, 32, seed);
    EXPECT_NEAR(ssim_pair(a, a), 1.0, 1e-9);
  }
}

TEST(SsimPair, ConstantImagesReduceToLuminance) {
  const SsimParams p;
  const double v1 = 0.2, v2 = 0.7;
  const double want = (2 * v1 * v2 + p.c1) / (v1 * v1 + v2 * v2 + p.c1);
  EXPECT_NEAR(ssim_pair(Image(20, 20, v1), Image(20, 20, v2), p), want, 1e-12);
}

TEST(SsimPair, MatchesNaiveOracle) {
  const Image a = random_image(16, 16, 101);
  const Image b = random_image(16, 16, 202);
  SsimParams p;
  EXPECT_NEAR(ssim_pair(a, b, p), naive_ssim(a, b, p), 1e-10);
  p.stride = 2;
  p.window = 5;
  EXPECT_NEAR(ssim_pair(a, b, p), naive_ssim(a, b, p), 1e-10);
  p.aggregate = SsimAggregate::Sum;
  EXPECT_NEAR(ssim_pair(a, b, p), naive_ssim(a, b, p), 1e-9);
}

TEST(SsimPair, CorrelatedInputsMatchOracle) {
  const Image a = textured_image(24, 30, 5);
  Image b = a;
  Rng rng(3);
  for (double& v : b.pixels) v = 0.8 * v + 0.1 + 0.05 * rng.normal();
  EXPECT_NEAR(ssim_pair(a, b), naive_ssim(a, b, SsimParams{}), 1e-10);
}

TEST(SsimPair, SymmetricAndBounded) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Image a = random_image(20, 20, seed, -1.0, 2.0);
    Image b = random_image(20, 20, seed + 50);
    for (std::size_t i = 0; i < b.size(); ++i) b.pixels[i] = 1.0 - a.pixels[i] + 0.1 * b.pixels[i];
    EXPECT_EQ(ssim_pair(a, b), ssim_pair(b, a));
    const Image map = ssim_map(a, b);
    for (double v : map.pixels) {
      EXPECT_LE(std::abs(v), 1.0 + 1e-12);
    }
  }
}

TEST(SsimPair, CropTranslatesMap) {
  const Image a = random_image(24, 24, 1);
  const Image b = random_image(24, 24, 2);
  const SsimParams p{.window = 5};
  const Image full = ssim_map(a, b, p);
  const Image sub = ssim_map(a.crop(3, 2, 18, 19), b.crop(3, 2, 18, 19), p);
  for (std::size_t y = 0; y < sub.height; ++y) {
    for (std::size_t x = 0; x < sub.width; ++x) {
      EXPECT_NEAR(sub.at(y, x), full.at(y + 3, x + 2), 1e-12);
    }
  }
}

TEST(SsimPair, Errors) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::CheckFailed;
  };
  EXPECT_EQ(code([] { (void)ssim_pair(Image(8, 8), Image(8, 8)); }), ErrorCode::WindowTooLarge);
  EXPECT_EQ(code([] { (void)ssim_pair(Image(20, 20), Image(20, 21)); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code([] { (void)ssim_pair(Image(20, 20), Image(20, 20), {.window = 4}); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code([] { (void)ssim_pair(Image(20, 20), Image(20, 20), {.c1 = 0.0}); }),
            ErrorCode::InvalidArgument);
}

TEST(FusionSsim, IdenticalTripleTotalsTwo) {
  const Image a = textured_image(32, 32, 7);
  const SsimReport r = fusion_ssim(a, a, a);
  EXPECT_NEAR(r.total, 2.0, 1e-9);
}

TEST(FusionSsim, Decomposition) {
  const Image om = textured_image(32, 32, 8);
  const Image cp = random_image(32, 32, 9);
  const SsimReport r = fusion_ssim(om, cp, om);
  EXPECT_NEAR(r.total, 1.0 + ssim_pair(cp, om), 1e-12);
}

TEST(FusionSsim, SumOfPairwiseOracles) {
  const Image om = random_image(16, 16, 10);
  const Image cp = random_image(16, 16, 11);
  const Image f = random_image(16, 16, 12);
  const SsimReport r = fusion_ssim(om, cp, f, {}, true);
  EXPECT_NEAR(r.ssim_om_f, naive_ssim(om, f, {}), 1e-10);
  EXPECT_NEAR(r.ssim_cp_f, naive_ssim(cp, f, {}), 1e-10);
  EXPECT_EQ(r.total, r.ssim_om_f + r.ssim_cp_f);
  ASSERT_TRUE(r.map_om_f.has_value());
  EXPECT_EQ(r.map_om_f->height, 6u);
}

TEST(AverageSsim, Basics) {
  EXPECT_EQ(average_ssim(std::vector<double>{2.0}), 2.0);
  EXPECT_EQ(average_ssim(std::vector<double>{0.0, 2.0}), 1.0);
  try {
    (void)average_ssim(std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyList);
  }
}

TEST(AverageSsim, ExtendedPrecisionMean) {
  Rng rng(31);
  std::vector<double> values(30);
  long double sum = 0.0L;
  for (double& v : values) {
    v = -2.0 + 4.0 * rng.uniform();
    sum += v;
  }
  EXPECT_NEAR(average_ssim(values), static_cast<double>(sum / 30.0L), 1e-12);
}

}  // namespace
}  // namespace ajfuse
