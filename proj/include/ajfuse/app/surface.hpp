// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "ajfuse/app/config.hpp"
#include "ajfuse/image.hpp"
#include "ajfuse/registration.hpp"

namespace ajfuse::app {

struct SurfaceFrame {
  double t_h = 0.0;  // timestamp in hours
  Image fused;
};

struct SurfaceSample {
  double t_h;
  double x_um;
  double z_um;
};

/// Time-ordered fused images reduced to one height profile per frame.
///
/// With ProfileAxis::Rows the profile runs down the rows, i.e. across a
/// horizontal printed line, and each sample averages the columns in `band`.
/// With ProfileAxis::Cols it runs along the columns and averages the rows in
/// `band`. Normalized intensities map back to µm through the registration's
/// global height range.
class SurfaceStack {
 public:
  /// Throws InvalidArgument unless timestamps strictly increase, every frame
  /// has the same profile length, and the band fits every frame.
  SurfaceStack(std::vector<SurfaceFrame> frames, ProfileAxis axis,
               std::optional<IndexRange> band, HeightRange height_range);

  const std::vector<SurfaceFrame>& frames() const noexcept { return frames_; }
  std::size_t profile_length() const noexcept { return length_; }

  std::vector<double> profile(std::size_t frame) const;
  std::vector<SurfaceSample> samples() const;

  /// `t,x_um,z` header followed by one row per sample, frame-major.
  std::string to_csv() const;

 private:
  std::vector<SurfaceFrame> frames_;
  ProfileAxis axis_;
  IndexRange band_;
  HeightRange range_;
  std::size_t length_ = 0;
};

}  // namespace ajfuse::app
