// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include <gtest/gtest.h>

#include <cmath>

#include "ajfuse/error.hpp"
#include "ajfuse/registration.hpp"
#include "ajfuse/synthgen.hpp"
#include "test_support.hpp"

namespace ajfuse {
namespace {

CorpusSpec noiseless(std::size_t frames, double drift) {
  CorpusSpec spec;
  spec.n_frames = frames;
  spec.width_drift_um_per_frame = drift;
  spec.overspray_noise_sd = 0.0;
  spec.om_speckle_sd = 0.0;
  spec.satellites_per_line = 0;
  spec.seed = 12;
  return spec;
}

// Full width at half maximum along one column, by linear interpolation of
// the two half-height crossings around `center`.
double threshold_scan_width_px(const HeightMap& hm, std::size_t col, std::size_t center) {
  const double half = 0.5 * hm.at(center, col);
  std::size_t lo = center, hi = center;
  while (lo > 0 && hm.at(lo - 1, col) >= half) --lo;
  while (hi + 1 < hm.height && hm.at(hi + 1, col) >= half) ++hi;
  auto cross = [&](std::size_t inside, std::size_t outside) {
    const double a = hm.at(inside, col), b = hm.at(outside, col);
    return static_cast<double>(inside) +
           (static_cast<double>(outside) - static_cast<double>(inside)) * (a - half) / (a - b);
  };
  return cross(hi, hi + 1) - cross(lo, lo - 1);
}

TEST(Synthgen, ZeroDriftKeepsWidths) {
  const SyntheticCorpus c = generate_corpus(noiseless(4, 0.0));
  for (const auto& line : c.truth.lines) EXPECT_EQ(line.width_um, c.truth.lines[0].width_um);
}

TEST(Synthgen, DriftIsLinearInFrame) {
  CorpusSpec spec = noiseless(6, 0.25);
  const SyntheticCorpus c = generate_corpus(spec);
  ASSERT_EQ(c.truth.lines.size(), 24u);
  for (const auto& line : c.truth.lines) {
    EXPECT_EQ(line.width_um, spec.base_width_um + static_cast<double>(line.frame) * 0.25);
  }
}

TEST(Synthgen, RenderedFwhmMatchesTruth) {
  CorpusSpec spec = noiseless(5, 0.5);
  const SyntheticCorpus c = generate_corpus(spec);
  for (const auto& line : c.truth.lines) {
    const HeightMap& hm = c.cp_maps[line.frame].map;
    const auto center = static_cast<std::size_t>(std::lround(line.centroid_row));
    for (std::size_t col : {0ul, hm.width / 2, hm.width - 1}) {
      const double width_px = threshold_scan_width_px(hm, col, center);
      EXPECT_NEAR(width_px, line.width_um / spec.pitch_um, 1.0)
          << "frame " << line.frame << " line " << line.line;
    }
  }
}

TEST(Synthgen, PeakHeightAtCentroids) {
  const SyntheticCorpus c = generate_corpus(noiseless(3, 0.1));
  for (const auto& line : c.truth.lines) {
    const HeightMap& hm = c.cp_maps[line.frame].map;
    const auto row = static_cast<std::size_t>(std::lround(line.centroid_row));
    EXPECT_NEAR(hm.at(row, hm.width / 2), line.peak_height_um, 1e-9);
  }
}

TEST(Synthgen, SameSeedBitIdentical) {
  CorpusSpec spec;
  spec.n_frames = 3;
  spec.seed = 99;
  const SyntheticCorpus a = generate_corpus(spec);
  const SyntheticCorpus b = generate_corpus(spec);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.om_frames[k].image, b.om_frames[k].image);
    EXPECT_EQ(a.cp_maps[k].map, b.cp_maps[k].map);
  }
  spec.seed = 100;
  EXPECT_NE(generate_corpus(spec).om_frames[0].image, a.om_frames[0].image);
}

TEST(Synthgen, NoiselessFramesAlignAtOrigin) {
  CorpusSpec spec;
  spec.n_frames = 4;
  spec.overspray_noise_sd = 0.0;
  spec.om_speckle_sd = 0.0;
  const SyntheticCorpus c = generate_corpus(spec);
  const auto reg = register_corpus(c.om_frames, c.cp_maps, {});
  for (const auto& a : reg.frame_alignments) {
    EXPECT_EQ(a.dy, 0);
    EXPECT_EQ(a.dx, 0);
    EXPECT_GE(a.score, 0.999);
  }
}

TEST(Synthgen, CpMapsCarryInjectedOffset) {
  CorpusSpec spec = noiseless(2, 0.0);
  spec.injected_offsets = {{0, 0}, {3, -2}};
  const SyntheticCorpus c = generate_corpus(spec);
  const HeightMap& ref = c.cp_maps[0].map;
  const HeightMap& moved = c.cp_maps[1].map;
  // moved(y + 3, x - 2) == ref(y, x) away from the borders.
  for (std::size_t y = 10; y + 10 < ref.height; ++y) {
    for (std::size_t x = 10; x + 10 < ref.width; ++x) {
      ASSERT_NEAR(moved.at(y + 3, x - 2), ref.at(y, x), 1e-12);
    }
  }
  EXPECT_EQ(c.truth.frames[1].dy, 3);
  EXPECT_EQ(c.truth.frames[1].dx, -2);
}

TEST(Synthgen, TimestampsAndPitch) {
  CorpusSpec spec;
  spec.n_frames = 5;
  const SyntheticCorpus c = generate_corpus(spec);
  EXPECT_EQ(c.om_frames.front().timestamp_h, 0.0);
  EXPECT_EQ(c.om_frames.back().timestamp_h, spec.duration_h);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(c.om_frames[k].timestamp_h, c.cp_maps[k].timestamp_h);
    EXPECT_EQ(c.cp_maps[k].map.pitch_um, spec.pitch_um);
    for (double v : c.om_frames[k].image.pixels) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Synthgen, InfeasibleSpecs) {
  auto code = [](CorpusSpec spec) {
    try {
      (void)generate_corpus(spec);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::CheckFailed;
  };
  CorpusSpec crowded;
  crowded.rows = 40;
  EXPECT_EQ(code(crowded), ErrorCode::SpecInfeasible);
  CorpusSpec shrinking;
  shrinking.width_drift_um_per_frame = -1.0;
  EXPECT_EQ(code(shrinking), ErrorCode::SpecInfeasible);
  CorpusSpec wide;
  wide.base_width_um = 30.0;
  EXPECT_EQ(code(wide), ErrorCode::SpecInfeasible);
  CorpusSpec offsets;
  offsets.injected_offsets = {{1, 1}};
  EXPECT_EQ(code(offsets), ErrorCode::SpecInfeasible);
}

}  // namespace
}  // namespace ajfuse
