// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstddef>
#include <vector>

#include "ajfuse/image.hpp"

namespace ajfuse {

/// Integer offset of the moving image relative to the reference:
/// moving(y + dy, x + dx) corresponds to reference(y, x).
struct AlignmentResult {
  int dy = 0;
  int dx = 0;
  double score = 0.0;    // zero-normalized cross-correlation at (dy, dx)
  bool warning = false;  // score fell below the warn threshold

  friend bool operator==(const AlignmentResult&, const AlignmentResult&) = default;
};

struct AlignOptions {
  int max_shift = 20;
  double warn_threshold = 0.5;
  std::size_t min_overlap = 16;
};

/// Half-open index range.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

/// One horizontal strip of an OM frame holding a single printed line plus
/// its surrounding context.
struct LineStrip {
  Image image;
  IndexRange rows;          // strip rows in frame coordinates
  double center_row = 0.0;  // line centroid in frame coordinates
};

struct RoiPair {
  Image roi_om;
  Image roi_cp;
  std::size_t time_index = 0;
  std::size_t line_index = 0;
  AlignmentResult alignment;
  IndexRange om_rows;  // crop location in OM frame coordinates
  IndexRange om_cols;
  double timestamp_h = 0.0;
};

struct HeightRange {
  double z_min = 0.0;
  double z_max = 0.0;
};

/// Splits a frame into `n_lines` strips at valleys of its row-mean profile.
/// Throws NoLinesFound when fewer than n_lines prominent peaks exist, and
/// InvalidArgument when the frame has fewer than 3 * n_lines rows.
std::vector<LineStrip> segment_om_lines(const Image& om, std::size_t n_lines);

/// Global extrema across every map. Throws EmptyCorpus on an empty list.
HeightRange compute_global_height_range(const std::vector<HeightMap>& corpus);

/// pixel = clamp((z - z_min) / (z_max - z_min), 0, 1); all zeros when
/// z_max == z_min.
Image heightmap_to_image(const HeightMap& hm, double z_min, double z_max);
Image heightmap_to_image(const HeightMap& hm, const HeightRange& range);

/// Exhaustive search over [-max_shift, max_shift]^2 for the offset with the
/// highest zero-normalized cross-correlation over the overlap. Ties (within
/// 1e-12) go to the smaller L1 norm, then lexicographically smaller (dy, dx).
/// Throws ShapeMismatch, InvalidArgument when some candidate overlap is below
/// min_overlap pixels, and DegenerateInput when no candidate overlap has
/// variance in both images.
AlignmentResult align_translation(const Image& reference, const Image& moving,
                                  const AlignOptions& options = {});

/// Crops `om` at (rows, cols) and `cp` at the same ranges displaced by the
/// alignment offset. Throws RoiOutOfBounds when either crop leaves its image.
RoiPair extract_roi(const Image& om, const Image& cp, const AlignmentResult& alignment,
                    IndexRange rows, IndexRange cols);

/// A roi_rows x roi_cols window centered on the strip's line (rows) and the
/// frame center (cols), shifted as needed so both crops stay in bounds.
/// Throws RoiOutOfBounds when no such placement exists.
std::pair<IndexRange, IndexRange> auto_roi(const LineStrip& strip, std::size_t frame_rows,
                                           std::size_t frame_cols,
                                           const AlignmentResult& alignment,
                                           std::size_t roi_rows, std::size_t roi_cols);

struct TimedImage {
  double timestamp_h = 0.0;
  Image image;
};

struct TimedHeightMap {
  double timestamp_h = 0.0;
  HeightMap map;
};

struct RegistrationParams {
  std::size_t n_lines = 4;
  AlignOptions align;
  std::size_t roi_rows = 64;
  std::size_t roi_cols = 64;
  // Align the OM frame against the CP image instead of the other way round.
  bool cp_as_reference = false;
};

struct RegisteredCorpus {
  std::vector<RoiPair> pairs;  // sorted by (time_index, line_index)
  HeightRange height_range;
  std::vector<AlignmentResult> frame_alignments;  // one per time_index
};

/// Matches frames by timestamp, converts CP maps with the global height
/// range, aligns each frame and extracts one ROI pair per line. Throws
/// TimestampMismatch when the two timestamp sets differ or repeat.
RegisteredCorpus register_corpus(std::vector<TimedImage> om_frames,
                                 std::vector<TimedHeightMap> cp_maps,
                                 const RegistrationParams& params = {});

}  // namespace ajfuse
