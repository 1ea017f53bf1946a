// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "ajfuse/image.hpp"

namespace ajfuse {

enum class SsimAggregate { Mean, Sum };

/// Sliding-window SSIM settings. Windows lie fully inside the image (no
/// padding); window statistics are unweighted population moments.
struct SsimParams {
  std::size_t window = 11;
  std::size_t stride = 1;
  double c1 = 1e-4;    // luminance stabilizer
  double c2 = 9e-4;    // contrast stabilizer
  double c3 = 4.5e-4;  // correlation stabilizer
  SsimAggregate aggregate = SsimAggregate::Mean;

  void validate() const;
};

struct SsimReport {
  double ssim_om_f = 0.0;
  double ssim_cp_f = 0.0;
  double total = 0.0;
  std::optional<Image> map_om_f;  // per-window values, when requested
  std::optional<Image> map_cp_f;
};

/// Per-window luminance * contrast * correlation, one value per window
/// position (row-major over window origins).
Image ssim_map(const Image& a, const Image& b, const SsimParams& p = {});

/// Mean (or sum) of ssim_map. Throws ShapeMismatch and WindowTooLarge.
double ssim_pair(const Image& a, const Image& b, const SsimParams& p = {});

/// SSIM(ROI_OM, fused) + SSIM(ROI_CP, fused).
SsimReport fusion_ssim(const Image& roi_om, const Image& roi_cp, const Image& fused,
                       const SsimParams& p = {}, bool with_maps = false);

/// Arithmetic mean; throws EmptyList.
double average_ssim(std::span<const double> values);

}  // namespace ajfuse
