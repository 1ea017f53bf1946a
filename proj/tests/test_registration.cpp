// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ajfuse/error.hpp"
#include "ajfuse/registration.hpp"
#include "ajfuse/synthgen.hpp"
#include "test_support.hpp"

namespace ajfuse {
namespace {

using testing::circular_shift;
using testing::textured_image;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::CheckFailed;  // sentinel: nothing thrown
}

Image banded_frame(const std::vector<double>& centers, std::size_t rows, std::size_t cols) {
  Image img(rows, cols, 0.05);
  for (std::size_t y = 0; y < rows; ++y) {
    double v = 0.05;
    for (double c : centers) v += 0.9 * std::exp(-0.5 * std::pow((y - c) / 3.0, 2));
    for (std::size_t x = 0; x < cols; ++x) img.at(y, x) = v;
  }
  return img;
}

TEST(SegmentLines, FourBandsGiveFourStrips) {
  const std::vector<double> centers{20, 55, 90, 125};
  const Image frame = banded_frame(centers, 150, 40);
  const auto strips = segment_om_lines(frame, 4);
  ASSERT_EQ(strips.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(strips[i].rows.begin, centers[i]);
    EXPECT_GT(strips[i].rows.end, centers[i]);
    EXPECT_NEAR(strips[i].center_row, centers[i], 0.5);
    EXPECT_EQ(strips[i].image.height, strips[i].rows.size());
    if (i > 0) {
      EXPECT_EQ(strips[i].rows.begin, strips[i - 1].rows.end);
    }
  }
  EXPECT_EQ(strips.front().rows.begin, 0u);
  EXPECT_EQ(strips.back().rows.end, 150u);
}

TEST(SegmentLines, SyntheticCorpusCentroids) {
  CorpusSpec spec;
  spec.n_frames = 3;
  spec.seed = 5;
  const SyntheticCorpus corpus = generate_corpus(spec);
  for (std::size_t k = 0; k < spec.n_frames; ++k) {
    const auto strips = segment_om_lines(corpus.om_frames[k].image, spec.lines_per_frame);
    ASSERT_EQ(strips.size(), spec.lines_per_frame);
    for (std::size_t i = 0; i < strips.size(); ++i) {
      const double truth = corpus.truth.lines[k * spec.lines_per_frame + i].centroid_row;
      EXPECT_LE(strips[i].rows.begin, truth);
      EXPECT_GT(strips[i].rows.end, truth);
    }
  }
}

TEST(SegmentLines, SingleLineIsWholeImage) {
  const Image img = textured_image(30, 20, 2);
  const auto strips = segment_om_lines(img, 1);
  ASSERT_EQ(strips.size(), 1u);
  EXPECT_EQ(strips[0].image, img);
}

TEST(SegmentLines, Errors) {
  EXPECT_EQ(code_of([] { (void)segment_om_lines(Image(40, 10, 0.5), 4); }),
            ErrorCode::NoLinesFound);
  EXPECT_EQ(code_of([] { (void)segment_om_lines(banded_frame({20, 60}, 90, 10), 4); }),
            ErrorCode::NoLinesFound);
  EXPECT_EQ(code_of([] { (void)segment_om_lines(Image(11, 10, 0.5), 4); }),
            ErrorCode::InvalidArgument);
}

TEST(HeightRange, ConstantMap) {
  const auto r = compute_global_height_range({HeightMap(3, 3, 3.0)});
  EXPECT_EQ(r.z_min, 3.0);
  EXPECT_EQ(r.z_max, 3.0);
}

TEST(HeightRange, TwoMaps) {
  HeightMap a(1, 2), b(1, 2);
  a.z_um = {0.0, 5.0};
  b.z_um = {-1.0, 4.0};
  const auto r = compute_global_height_range({a, b});
  EXPECT_EQ(r.z_min, -1.0);
  EXPECT_EQ(r.z_max, 5.0);
}

TEST(HeightRange, MatchesBruteForceScan) {
  Rng rng(77);
  std::vector<HeightMap> maps;
  for (int m = 0; m < 30; ++m) {
    HeightMap hm(3 + m % 4, 5 + m % 3);
    for (double& z : hm.z_um) z = -10.0 + 25.0 * rng.uniform();
    maps.push_back(hm);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& hm : maps) {
    for (std::size_t y = 0; y < hm.height; ++y) {
      for (std::size_t x = 0; x < hm.width; ++x) {
        lo = std::min(lo, hm.at(y, x));
        hi = std::max(hi, hm.at(y, x));
      }
    }
  }
  const auto r = compute_global_height_range(maps);
  EXPECT_EQ(r.z_min, lo);
  EXPECT_EQ(r.z_max, hi);
  EXPECT_EQ(code_of([] { (void)compute_global_height_range({}); }), ErrorCode::EmptyCorpus);
}

TEST(HeightmapToImage, EndpointsMidpointAndClamp) {
  EXPECT_EQ(heightmap_to_image(HeightMap(2, 2, -1.0), -1.0, 3.0).pixels,
            std::vector<double>(4, 0.0));
  EXPECT_EQ(heightmap_to_image(HeightMap(2, 2, 3.0), -1.0, 3.0).pixels,
            std::vector<double>(4, 1.0));
  EXPECT_EQ(heightmap_to_image(HeightMap(2, 2, 1.0), -1.0, 3.0).pixels,
            std::vector<double>(4, 0.5));
  HeightMap out_of_range(1, 2);
  out_of_range.z_um = {-5.0, 9.0};
  EXPECT_EQ(heightmap_to_image(out_of_range, -1.0, 3.0).pixels, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(heightmap_to_image(HeightMap(2, 2, 2.0), 2.0, 2.0).pixels,
            std::vector<double>(4, 0.0));
}

TEST(HeightmapToImage, Monotone) {
  HeightMap hm(1, 200);
  for (std::size_t i = 0; i < 200; ++i) hm.z_um[i] = -2.0 + 0.03 * static_cast<double>(i);
  const Image img = heightmap_to_image(hm, -1.0, 3.0);
  for (std::size_t i = 1; i < 200; ++i) EXPECT_LE(img.pixels[i - 1], img.pixels[i]);
}

TEST(AlignTranslation, IdentityIsZeroOffset) {
  const Image a = textured_image(48, 48, 3);
  const auto r = align_translation(a, a, {.max_shift = 5});
  EXPECT_EQ(r.dy, 0);
  EXPECT_EQ(r.dx, 0);
  EXPECT_NEAR(r.score, 1.0, 1e-12);
  EXPECT_FALSE(r.warning);
}

TEST(AlignTranslation, RecoversCircularShift) {
  const Image a = textured_image(48, 48, 4);
  const auto r = align_translation(a, circular_shift(a, 3, -2), {.max_shift = 5});
  EXPECT_EQ(r.dy, 3);
  EXPECT_EQ(r.dx, -2);
  EXPECT_GT(r.score, 0.99);
}

TEST(AlignTranslation, OutOfWindowShiftWarns) {
  // Uncorrelated texture so no in-window offset resembles the true one.
  const Image a = testing::random_image(48, 48, 5);
  const auto r = align_translation(a, circular_shift(a, 7, 0),
                                   {.max_shift = 5, .warn_threshold = 0.5});
  EXPECT_LE(std::abs(r.dy), 5);
  EXPECT_LE(std::abs(r.dx), 5);
  EXPECT_LT(r.score, 0.5);
  EXPECT_TRUE(r.warning);
}

TEST(AlignTranslation, EveryShiftInWindowRecovered) {
  const Image a = textured_image(40, 40, 6);
  const int m = 4;
  for (int dy = -m; dy <= m; ++dy) {
    for (int dx = -m; dx <= m; ++dx) {
      const auto r = align_translation(a, circular_shift(a, dy, dx), {.max_shift = m});
      EXPECT_EQ(r.dy, dy);
      EXPECT_EQ(r.dx, dx);
    }
  }
}

TEST(AlignTranslation, Errors) {
  EXPECT_EQ(code_of([] { (void)align_translation(Image(10, 10, 0.3), Image(10, 10, 0.7), {.max_shift = 2}); }),
            ErrorCode::DegenerateInput);
  EXPECT_EQ(code_of([] { (void)align_translation(Image(10, 10), Image(10, 11)); }),
            ErrorCode::ShapeMismatch);
  const Image small = textured_image(8, 8, 1);
  EXPECT_EQ(code_of([&] { (void)align_translation(small, small, {.max_shift = 6}); }),
            ErrorCode::InvalidArgument);
}

TEST(ExtractRoi, FullRangeZeroOffset) {
  const Image om = textured_image(20, 15, 1);
  const Image cp = textured_image(20, 15, 2);
  const RoiPair p = extract_roi(om, cp, {}, {0, 20}, {0, 15});
  EXPECT_EQ(p.roi_om, om);
  EXPECT_EQ(p.roi_cp, cp);
}

TEST(ExtractRoi, OffsetDisplacesCpCrop) {
  const Image om = textured_image(30, 10, 1);
  const Image cp = textured_image(30, 10, 2);
  AlignmentResult a;
  a.dy = 2;
  const RoiPair p = extract_roi(om, cp, a, {10, 20}, {0, 10});
  EXPECT_EQ(p.roi_om, om.crop(10, 0, 10, 10));
  EXPECT_EQ(p.roi_cp, cp.crop(12, 0, 10, 10));
  a.dy = 11;
  EXPECT_EQ(code_of([&] { (void)extract_roi(om, cp, a, {10, 20}, {0, 10}); }),
            ErrorCode::RoiOutOfBounds);
}

TEST(AutoRoi, ContainsLinePixels) {
  CorpusSpec spec;
  spec.n_frames = 2;
  spec.seed = 9;
  spec.overspray_noise_sd = 0.0;
  spec.om_speckle_sd = 0.0;
  spec.satellites_per_line = 0;
  const SyntheticCorpus corpus = generate_corpus(spec);
  const Image& om = corpus.om_frames[1].image;
  const auto strips = segment_om_lines(om, spec.lines_per_frame);
  const FrameSurface surface(spec, 1);
  for (std::size_t i = 0; i < strips.size(); ++i) {
    const auto [rows, cols] = auto_roi(strips[i], om.height, om.width, {}, 64, 64);
    // Line pixels: rows within one FWHM of the true centroid, inside the ROI columns.
    const double fwhm_px = spec.width_um(1) / spec.pitch_um;
    const double c = spec.centroid_row(i);
    std::size_t total = 0, inside = 0;
    for (std::size_t y = 0; y < om.height; ++y) {
      if (std::abs(static_cast<double>(y) - c) > fwhm_px) continue;
      for (std::size_t x = cols.begin; x < cols.end; ++x) {
        if (surface.height_um(y, x) < 0.5 * spec.peak_height_um) continue;
        ++total;
        if (y >= rows.begin && y < rows.end) ++inside;
      }
    }
    ASSERT_GT(total, 0u);
    EXPECT_GE(static_cast<double>(inside), 0.99 * static_cast<double>(total)) << "line " << i;
  }
}

TEST(RegisterCorpus, CountsAndOrder) {
  CorpusSpec spec;
  spec.n_frames = 2;
  spec.seed = 3;
  SyntheticCorpus corpus = generate_corpus(spec);
  const auto reg = register_corpus(corpus.om_frames, corpus.cp_maps, {});
  ASSERT_EQ(reg.pairs.size(), 8u);
  for (std::size_t i = 0; i < reg.pairs.size(); ++i) {
    EXPECT_EQ(reg.pairs[i].time_index, i / 4);
    EXPECT_EQ(reg.pairs[i].line_index, i % 4);
    EXPECT_TRUE(reg.pairs[i].roi_om.same_shape(reg.pairs[i].roi_cp));
  }
}

TEST(RegisterCorpus, ShuffledInputGivesSameOutput) {
  CorpusSpec spec;
  spec.n_frames = 4;
  spec.seed = 8;
  spec.injected_offsets = {{1, 2}, {-3, 0}, {0, 4}, {5, -5}};
  const SyntheticCorpus corpus = generate_corpus(spec);
  const auto sorted = register_corpus(corpus.om_frames, corpus.cp_maps, {});
  auto om = corpus.om_frames;
  auto cp = corpus.cp_maps;
  std::reverse(om.begin(), om.end());
  std::rotate(cp.begin(), cp.begin() + 1, cp.end());
  const auto shuffled = register_corpus(om, cp, {});
  ASSERT_EQ(sorted.pairs.size(), shuffled.pairs.size());
  for (std::size_t i = 0; i < sorted.pairs.size(); ++i) {
    EXPECT_EQ(sorted.pairs[i].roi_om, shuffled.pairs[i].roi_om);
    EXPECT_EQ(sorted.pairs[i].roi_cp, shuffled.pairs[i].roi_cp);
    EXPECT_EQ(sorted.pairs[i].alignment, shuffled.pairs[i].alignment);
    EXPECT_EQ(sorted.pairs[i].time_index, shuffled.pairs[i].time_index);
  }
}

TEST(RegisterCorpus, RecoversInjectedOffsets) {
  CorpusSpec spec;
  spec.n_frames = 5;
  spec.seed = 21;
  spec.injected_offsets = {{0, 0}, {4, -3}, {-6, 2}, {9, 9}, {-10, -1}};
  const SyntheticCorpus corpus = generate_corpus(spec);
  const auto reg = register_corpus(corpus.om_frames, corpus.cp_maps, {});
  for (const auto& p : reg.pairs) {
    const auto& truth = corpus.truth.frames[p.time_index];
    EXPECT_EQ(p.alignment.dy, truth.dy);
    EXPECT_EQ(p.alignment.dx, truth.dx);
  }
}

TEST(RegisterCorpus, TimestampMismatch) {
  CorpusSpec spec;
  spec.n_frames = 2;
  SyntheticCorpus corpus = generate_corpus(spec);
  corpus.cp_maps[1].timestamp_h += 1.0;
  EXPECT_EQ(code_of([&] { (void)register_corpus(corpus.om_frames, corpus.cp_maps, {}); }),
            ErrorCode::TimestampMismatch);
  corpus.cp_maps.pop_back();
  EXPECT_EQ(code_of([&] { (void)register_corpus(corpus.om_frames, corpus.cp_maps, {}); }),
            ErrorCode::TimestampMismatch);
}

}  // namespace
}  // namespace ajfuse
