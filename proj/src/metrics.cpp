// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/core.h>

#include "ajfuse/error.hpp"

namespace ajfuse {

namespace {

// Summed-area table with a zero border row and column.
class IntegralImage {
 public:
  IntegralImage(std::size_t h, std::size_t w) : w_(w + 1), data_((h + 1) * (w + 1), 0.0) {}

  template <typename F>
  void fill(std::size_t h, std::size_t w, F value) {
    for (std::size_t r = 0; r < h; ++r) {
      double run = 0.0;
      for (std::size_t c = 0; c < w; ++c) {
        run += value(r, c);
        data_[(r + 1) * w_ + c + 1] = data_[r * w_ + c + 1] + run;
      }
    }
  }

  double box(std::size_t r, std::size_t c, std::size_t size) const {
    const std::size_t r1 = r + size;
    const std::size_t c1 = c + size;
    return data_[r1 * w_ + c1] - data_[r * w_ + c1] - data_[r1 * w_ + c] + data_[r * w_ + c];
  }

 private:
  std::size_t w_;
  std::vector<double> data_;
};

double mean_of(const Image& img) {
  return std::accumulate(img.pixels.begin(), img.pixels.end(), 0.0) /
         static_cast<double>(img.size());
}

}  // namespace

void SsimParams::validate() const {
  if (window < 3 || window % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("SSIM window must be odd and >= 3, got {}", window));
  }
  if (stride == 0) throw Error(ErrorCode::InvalidArgument, "SSIM stride must be >= 1");
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "SSIM stabilizers must be positive");
  }
}

Image ssim_map(const Image& a, const Image& b, const SsimParams& p) {
  p.validate();
  require_same_shape(a, b, "ssim_pair");
  if (p.window > std::min(a.height, a.width)) {
    throw Error(ErrorCode::WindowTooLarge,
                fmt::format("window {} exceeds {}x{} image", p.window, a.height, a.width));
  }
  const std::size_t h = a.height;
  const std::size_t w = a.width;
  // Moments are accumulated about the global means to limit cancellation.
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  IntegralImage sa(h, w), sb(h, w), saa(h, w), sbb(h, w), sab(h, w);
  auto da = [&](std::size_t r, std::size_t c) { return a.at(r, c) - ma; };
  auto db = [&](std::size_t r, std::size_t c) { return b.at(r, c) - mb; };
  sa.fill(h, w, da);
  sb.fill(h, w, db);
  saa.fill(h, w, [&](std::size_t r, std::size_t c) { return da(r, c) * da(r, c); });
  sbb.fill(h, w, [&](std::size_t r, std::size_t c) { return db(r, c) * db(r, c); });
  sab.fill(h, w, [&](std::size_t r, std::size_t c) { return da(r, c) * db(r, c); });

  const std::size_t out_h = (h - p.window) / p.stride + 1;
  const std::size_t out_w = (w - p.window) / p.stride + 1;
  const double n = static_cast<double>(p.window * p.window);
  Image map(out_h, out_w, 0.0, a.pitch_um, false);
  for (std::size_t i = 0; i < out_h; ++i) {
    for (std::size_t j = 0; j < out_w; ++j) {
      const std::size_t r = i * p.stride;
      const std::size_t c = j * p.stride;
      const double ea = sa.box(r, c, p.window) / n;
      const double eb = sb.box(r, c, p.window) / n;
      const double var_a = std::max(0.0, saa.box(r, c, p.window) / n - ea * ea);
      const double var_b = std::max(0.0, sbb.box(r, c, p.window) / n - eb * eb);
      const double cov = sab.box(r, c, p.window) / n - ea * eb;
      const double mu_a = ma + ea;
      const double mu_b = mb + eb;
      const double sd_a = std::sqrt(var_a);
      const double sd_b = std::sqrt(var_b);
      const double luminance = (2.0 * mu_a * mu_b + p.c1) / (mu_a * mu_a + mu_b * mu_b + p.c1);
      const double contrast = (2.0 * sd_a * sd_b + p.c2) / (var_a + var_b + p.c2);
      const double correlation = (cov + p.c3) / (sd_a * sd_b + p.c3);
      map.at(i, j) = luminance * contrast * correlation;
    }
  }
  return map;
}

double ssim_pair(const Image& a, const Image& b, const SsimParams& p) {
  const Image map = ssim_map(a, b, p);
  const double sum = std::accumulate(map.pixels.begin(), map.pixels.end(), 0.0);
  return p.aggregate == SsimAggregate::Sum ? sum : sum / static_cast<double>(map.size());
}

SsimReport fusion_ssim(const Image& roi_om, const Image& roi_cp, const Image& fused,
                       const SsimParams& p, bool with_maps) {
  require_same_shape(roi_om, fused, "fusion_ssim ROI_OM vs fused");
  require_same_shape(roi_cp, fused, "fusion_ssim ROI_CP vs fused");
  SsimReport report;
  if (with_maps) {
    report.map_om_f = ssim_map(roi_om, fused, p);
    report.map_cp_f = ssim_map(roi_cp, fused, p);
  }
  report.ssim_om_f = ssim_pair(roi_om, fused, p);
  report.ssim_cp_f = ssim_pair(roi_cp, fused, p);
  report.total = report.ssim_om_f + report.ssim_cp_f;
  return report;
}

double average_ssim(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyList, "no SSIM values to average");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace ajfuse
