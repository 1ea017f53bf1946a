// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/registration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "ajfuse/error.hpp"
#include "ajfuse/parallel.hpp"

namespace ajfuse {

namespace {

std::vector<double> row_means(const Image& img) {
  std::vector<double> out(img.height);
  for (std::size_t r = 0; r < img.height; ++r) {
    const auto row = img.row(r);
    out[r] = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(img.width);
  }
  return out;
}

std::vector<double> box_smooth(const std::vector<double>& p, std::size_t radius) {
  const auto n = static_cast<std::ptrdiff_t>(p.size());
  const auto rad = static_cast<std::ptrdiff_t>(radius);
  std::vector<double> out(p.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::ptrdiff_t k = -rad; k <= rad; ++k) {
      s += p[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i + k, 0, n - 1))];
    }
    out[static_cast<std::size_t>(i)] = s / static_cast<double>(2 * rad + 1);
  }
  return out;
}

struct Peak {
  std::size_t row;
  double prominence;
};

std::vector<Peak> find_peaks(const std::vector<double>& p, double min_prominence) {
  const std::size_t n = p.size();
  const double lowest = -std::numeric_limits<double>::infinity();
  auto value = [&](std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? lowest
                                                           : p[static_cast<std::size_t>(i)];
  };
  std::vector<Peak> peaks;
  for (std::size_t r = 0; r < n; ++r) {
    const auto i = static_cast<std::ptrdiff_t>(r);
    // First row of a plateau that does not continue upward.
    if (!(p[r] > value(i - 1))) continue;
    std::size_t end = r;
    while (end + 1 < n && p[end + 1] == p[r]) ++end;
    if (value(static_cast<std::ptrdiff_t>(end) + 1) > p[r]) continue;

    double left_min = p[r];
    for (std::ptrdiff_t k = i - 1; k >= 0 && p[static_cast<std::size_t>(k)] <= p[r]; --k) {
      left_min = std::min(left_min, p[static_cast<std::size_t>(k)]);
    }
    double right_min = p[r];
    for (std::size_t k = end + 1; k < n && p[k] <= p[r]; ++k) {
      right_min = std::min(right_min, p[k]);
    }
    const double prominence = p[r] - std::max(left_min, right_min);
    if (prominence >= min_prominence) peaks.push_back({(r + end) / 2, prominence});
  }
  return peaks;
}

}  // namespace

std::vector<LineStrip> segment_om_lines(const Image& om, std::size_t n_lines) {
  if (n_lines == 0 || om.height < 3 * n_lines) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("need at least {} rows to split {} lines, image has {}",
                            3 * n_lines, n_lines, om.height));
  }
  const std::vector<double> raw = row_means(om);
  if (n_lines == 1) {
    LineStrip strip{om, {0, om.height}, 0.0};
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    const double half = *lo + 0.5 * (*hi - *lo);
    double wsum = 0.0;
    double csum = 0.0;
    for (std::size_t r = 0; r < raw.size(); ++r) {
      const double w = std::max(0.0, raw[r] - half);
      wsum += w;
      csum += w * static_cast<double>(r);
    }
    strip.center_row = wsum > 0.0 ? csum / wsum : 0.5 * static_cast<double>(om.height - 1);
    return {strip};
  }

  const std::vector<double> profile = box_smooth(raw, 2);
  const auto [lo_it, hi_it] = std::minmax_element(profile.begin(), profile.end());
  const double range = *hi_it - *lo_it;
  if (!(range > 1e-9 * std::max(1.0, std::abs(*hi_it)))) {
    throw Error(ErrorCode::NoLinesFound, "row profile is flat");
  }
  std::vector<Peak> peaks = find_peaks(profile, 0.2 * range);
  if (peaks.size() < n_lines) {
    throw Error(ErrorCode::NoLinesFound,
                fmt::format("found {} line peaks, expected {}", peaks.size(), n_lines));
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.prominence > b.prominence; });
  peaks.resize(n_lines);
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.row < b.row; });

  std::vector<std::size_t> bounds{0};
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
    const auto first = profile.begin() + static_cast<std::ptrdiff_t>(peaks[i].row + 1);
    const auto last = profile.begin() + static_cast<std::ptrdiff_t>(peaks[i + 1].row + 1);
    bounds.push_back(static_cast<std::size_t>(std::min_element(first, last) - profile.begin()));
  }
  bounds.push_back(om.height);

  std::vector<LineStrip> strips;
  strips.reserve(n_lines);
  for (std::size_t i = 0; i < n_lines; ++i) {
    const IndexRange rows{bounds[i], bounds[i + 1]};
    double peak = raw[peaks[i].row];
    double base = peak;
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
      peak = std::max(peak, raw[r]);
      base = std::min(base, raw[r]);
    }
    const double half = base + 0.5 * (peak - base);
    double wsum = 0.0;
    double csum = 0.0;
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
      const double w = std::max(0.0, raw[r] - half);
      wsum += w;
      csum += w * static_cast<double>(r);
    }
    const double center = wsum > 0.0 ? csum / wsum : static_cast<double>(peaks[i].row);
    strips.push_back({om.crop(rows.begin, 0, rows.size(), om.width), rows, center});
  }
  return strips;
}

HeightRange compute_global_height_range(const std::vector<HeightMap>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no height maps");
  HeightRange range{std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (const auto& hm : corpus) {
    hm.validate();
    const auto [lo, hi] = std::minmax_element(hm.z_um.begin(), hm.z_um.end());
    range.z_min = std::min(range.z_min, *lo);
    range.z_max = std::max(range.z_max, *hi);
  }
  return range;
}

Image heightmap_to_image(const HeightMap& hm, double z_min, double z_max) {
  Image img(hm.height, hm.width, 0.0, hm.pitch_um, true);
  const double span = z_max - z_min;
  if (!(span > 0.0)) return img;
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.pixels[i] = std::clamp((hm.z_um[i] - z_min) / span, 0.0, 1.0);
  }
  return img;
}

Image heightmap_to_image(const HeightMap& hm, const HeightRange& range) {
  return heightmap_to_image(hm, range.z_min, range.z_max);
}

AlignmentResult align_translation(const Image& reference, const Image& moving,
                                  const AlignOptions& options) {
  require_same_shape(reference, moving, "align_translation");
  const int max_shift = options.max_shift;
  if (max_shift < 0) throw Error(ErrorCode::InvalidArgument, "max_shift must be >= 0");
  const auto h = static_cast<long>(reference.height);
  const auto w = static_cast<long>(reference.width);
  if ((h - max_shift) * (w - max_shift) < static_cast<long>(options.min_overlap) ||
      h <= max_shift || w <= max_shift) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{}x{} images leave less than {} overlapping pixels at "
                            "max_shift {}",
                            h, w, options.min_overlap, max_shift));
  }

  // Mean-centering both images first keeps the one-pass moment sums well
  // conditioned; the correlation itself is invariant to the shift.
  auto centered = [](const Image& img) {
    const double mean = std::accumulate(img.pixels.begin(), img.pixels.end(), 0.0) /
                        static_cast<double>(img.size());
    std::vector<double> out(img.pixels);
    for (double& v : out) v -= mean;
    return out;
  };
  const std::vector<double> a = centered(reference);
  const std::vector<double> b = centered(moving);

  struct Candidate {
    int dy;
    int dx;
  };
  std::vector<Candidate> order;
  for (int dy = -max_shift; dy <= max_shift; ++dy) {
    for (int dx = -max_shift; dx <= max_shift; ++dx) order.push_back({dy, dx});
  }
  std::stable_sort(order.begin(), order.end(), [](const Candidate& p, const Candidate& q) {
    const int lp = std::abs(p.dy) + std::abs(p.dx);
    const int lq = std::abs(q.dy) + std::abs(q.dx);
    if (lp != lq) return lp < lq;
    return std::pair(p.dy, p.dx) < std::pair(q.dy, q.dx);
  });

  std::vector<double> scores(order.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto [dy, dx] = order[k];
    const long r0 = std::max(0L, -static_cast<long>(dy));
    const long r1 = std::min(h, h - dy);
    const long c0 = std::max(0L, -static_cast<long>(dx));
    const long c1 = std::min(w, w - dx);
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (long r = r0; r < r1; ++r) {
      const double* pa = a.data() + r * w;
      const double* pb = b.data() + (r + dy) * w + dx;
      for (long c = c0; c < c1; ++c) {
        const double va = pa[c];
        const double vb = pb[c];
        sa += va;
        sb += vb;
        saa += va * va;
        sbb += vb * vb;
        sab += va * vb;
      }
    }
    const double n = static_cast<double>((r1 - r0) * (c1 - c0));
    const double var_a = saa - sa * sa / n;
    const double var_b = sbb - sb * sb / n;
    const double floor_a = 1e-12 * std::max(saa, 1e-300);
    const double floor_b = 1e-12 * std::max(sbb, 1e-300);
    if (var_a <= floor_a || var_b <= floor_b) continue;
    scores[k] = std::clamp((sab - sa * sb / n) / std::sqrt(var_a * var_b), -1.0, 1.0);
  }

  std::size_t best = order.size();
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (std::isnan(scores[k])) continue;
    if (best == order.size() || scores[k] > scores[best] + 1e-12) best = k;
  }
  if (best == order.size()) {
    throw Error(ErrorCode::DegenerateInput,
                "correlation undefined: no overlap has variance in both images");
  }
  AlignmentResult result{order[best].dy, order[best].dx, scores[best], false};
  result.warning = result.score < options.warn_threshold;
  return result;
}

RoiPair extract_roi(const Image& om, const Image& cp, const AlignmentResult& alignment,
                    IndexRange rows, IndexRange cols) {
  auto in_bounds = [](long begin, long end, std::size_t limit) {
    return begin >= 0 && end > begin && end <= static_cast<long>(limit);
  };
  const auto rb = static_cast<long>(rows.begin);
  const auto re = static_cast<long>(rows.end);
  const auto cb = static_cast<long>(cols.begin);
  const auto ce = static_cast<long>(cols.end);
  if (!in_bounds(rb, re, om.height) || !in_bounds(cb, ce, om.width) ||
      !in_bounds(rb + alignment.dy, re + alignment.dy, cp.height) ||
      !in_bounds(cb + alignment.dx, ce + alignment.dx, cp.width)) {
    throw Error(ErrorCode::RoiOutOfBounds,
                fmt::format("ROI rows [{}, {}) cols [{}, {}) with offset ({}, {}) leaves "
                            "the {}x{} / {}x{} images",
                            rb, re, cb, ce, alignment.dy, alignment.dx, om.height, om.width,
                            cp.height, cp.width));
  }
  RoiPair pair;
  pair.roi_om = om.crop(rows.begin, cols.begin, rows.size(), cols.size());
  pair.roi_cp = cp.crop(static_cast<std::size_t>(rb + alignment.dy),
                        static_cast<std::size_t>(cb + alignment.dx), rows.size(),
                        cols.size());
  pair.alignment = alignment;
  pair.om_rows = rows;
  pair.om_cols = cols;
  return pair;
}

std::pair<IndexRange, IndexRange> auto_roi(const LineStrip& strip, std::size_t frame_rows,
                                           std::size_t frame_cols,
                                           const AlignmentResult& alignment,
                                           std::size_t roi_rows, std::size_t roi_cols) {
  auto place = [](double center, long extent, long limit, int offset) {
    const long lo = std::max(0L, -static_cast<long>(offset));
    const long hi = std::min(limit, limit - offset) - extent;
    if (extent <= 0 || hi < lo) {
      throw Error(ErrorCode::RoiOutOfBounds,
                  fmt::format("no in-bounds placement for a {}-pixel ROI in {} pixels "
                              "with offset {}",
                              extent, limit, offset));
    }
    const long start = std::lround(center - 0.5 * static_cast<double>(extent - 1));
    const long clamped = std::clamp(start, lo, hi);
    return IndexRange{static_cast<std::size_t>(clamped),
                      static_cast<std::size_t>(clamped + extent)};
  };
  const IndexRange rows = place(strip.center_row, static_cast<long>(roi_rows),
                                static_cast<long>(frame_rows), alignment.dy);
  const IndexRange cols = place(0.5 * static_cast<double>(frame_cols - 1),
                                static_cast<long>(roi_cols), static_cast<long>(frame_cols),
                                alignment.dx);
  return {rows, cols};
}

RegisteredCorpus register_corpus(std::vector<TimedImage> om_frames,
                                 std::vector<TimedHeightMap> cp_maps,
                                 const RegistrationParams& params) {
  if (om_frames.empty() && cp_maps.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no frames to register");
  }
  auto by_time = [](const auto& a, const auto& b) { return a.timestamp_h < b.timestamp_h; };
  std::sort(om_frames.begin(), om_frames.end(), by_time);
  std::sort(cp_maps.begin(), cp_maps.end(), by_time);
  if (om_frames.size() != cp_maps.size()) {
    throw Error(ErrorCode::TimestampMismatch,
                fmt::format("{} OM frames vs {} CP maps", om_frames.size(), cp_maps.size()));
  }
  for (std::size_t i = 0; i < om_frames.size(); ++i) {
    if (om_frames[i].timestamp_h != cp_maps[i].timestamp_h) {
      throw Error(ErrorCode::TimestampMismatch,
                  fmt::format("OM timestamp {} has no CP counterpart (nearest {})",
                              om_frames[i].timestamp_h, cp_maps[i].timestamp_h));
    }
    if (i > 0 && om_frames[i].timestamp_h == om_frames[i - 1].timestamp_h) {
      throw Error(ErrorCode::TimestampMismatch,
                  fmt::format("duplicate timestamp {}", om_frames[i].timestamp_h));
    }
  }

  std::vector<HeightMap> maps;
  maps.reserve(cp_maps.size());
  for (const auto& m : cp_maps) maps.push_back(m.map);
  RegisteredCorpus out;
  out.height_range = compute_global_height_range(maps);

  const std::size_t n_frames = om_frames.size();
  std::vector<std::vector<RoiPair>> per_frame(n_frames);
  out.frame_alignments.resize(n_frames);
  parallel_for(n_frames, [&](std::size_t k) {
    const Image& om = om_frames[k].image;
    const Image cp = heightmap_to_image(cp_maps[k].map, out.height_range);
    require_same_shape(om, cp, fmt::format("frame {} OM vs CP", k));
    AlignmentResult alignment;
    if (params.cp_as_reference) {
      alignment = align_translation(cp, om, params.align);
      alignment.dy = -alignment.dy;
      alignment.dx = -alignment.dx;
    } else {
      alignment = align_translation(om, cp, params.align);
    }
    out.frame_alignments[k] = alignment;
    const auto strips = segment_om_lines(om, params.n_lines);
    for (std::size_t line = 0; line < strips.size(); ++line) {
      const auto [rows, cols] = auto_roi(strips[line], om.height, om.width, alignment,
                                         params.roi_rows, params.roi_cols);
      RoiPair pair = extract_roi(om, cp, alignment, rows, cols);
      pair.time_index = k;
      pair.line_index = line;
      pair.timestamp_h = om_frames[k].timestamp_h;
      per_frame[k].push_back(std::move(pair));
    }
  });
  for (auto& frame : per_frame) {
    for (auto& pair : frame) out.pairs.push_back(std::move(pair));
  }
  return out;
}

}  // namespace ajfuse
