// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/image.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "ajfuse/error.hpp"

namespace ajfuse {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidScheduleParams: return "InvalidScheduleParams";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NoLinesFound: return "NoLinesFound";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::RoiOutOfBounds: return "RoiOutOfBounds";
    case ErrorCode::TimestampMismatch: return "TimestampMismatch";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::SpecInfeasible: return "SpecInfeasible";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::CheckFailed: return "CheckFailed";
  }
  return "Unknown";
}

Image::Image(std::size_t h, std::size_t w, double fill, double pitch,
             bool is_clamped)
    : height(h), width(w), pixels(h * w, fill), pitch_um(pitch),
      clamped(is_clamped) {
  if (h == 0 || w == 0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("image dimensions must be positive, got {}x{}", h, w));
  }
}

Image Image::from_pixels(std::size_t h, std::size_t w,
                         std::vector<double> values, double pitch,
                         bool is_clamped) {
  if (values.size() != h * w) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("pixel count {} does not match {}x{}", values.size(), h, w));
  }
  Image img(h, w, 0.0, pitch, is_clamped);
  img.pixels = std::move(values);
  return img;
}

Image Image::crop(std::size_t row0, std::size_t col0, std::size_t rows,
                  std::size_t cols) const {
  if (rows == 0 || cols == 0 || row0 + rows > height || col0 + cols > width) {
    throw Error(ErrorCode::RoiOutOfBounds,
                fmt::format("crop rows [{}, {}) cols [{}, {}) outside {}x{} image",
                            row0, row0 + rows, col0, col0 + cols, height, width));
  }
  Image out(rows, cols, 0.0, pitch_um, clamped);
  for (std::size_t r = 0; r < rows; ++r) {
    auto src = row(row0 + r).subspan(col0, cols);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Image Image::clamped_copy() const {
  Image out = *this;
  for (double& v : out.pixels) v = std::clamp(v, 0.0, 1.0);
  out.clamped = true;
  return out;
}

bool Image::all_finite() const noexcept {
  return std::all_of(pixels.begin(), pixels.end(),
                     [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Image& a, const Image& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("{}: {}x{} vs {}x{}", what, a.height, a.width,
                            b.height, b.width));
  }
}

double max_abs_diff(const Image& a, const Image& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.pixels[i] - b.pixels[i]));
  }
  return m;
}

HeightMap::HeightMap(std::size_t h, std::size_t w, double fill, double pitch)
    : height(h), width(w), z_um(h * w, fill), pitch_um(pitch) {
  if (h == 0 || w == 0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("height map dimensions must be positive, got {}x{}", h, w));
  }
}

void HeightMap::validate() const {
  if (height == 0 || width == 0 || z_um.size() != height * width) {
    throw Error(ErrorCode::InvalidArgument, "height map has inconsistent dimensions");
  }
  for (double z : z_um) {
    if (!std::isfinite(z)) {
      throw Error(ErrorCode::InvalidArgument, "height map contains non-finite values");
    }
  }
}

}  // namespace ajfuse
