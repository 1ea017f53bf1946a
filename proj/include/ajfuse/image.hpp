// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ajfuse {

/// Default physical scale of the optical data: 50 µm spans 267 pixels.
inline constexpr double kDefaultPitchUm = 50.0 / 267.0;

/// Row-major grid of real values with a physical pixel pitch.
///
/// Stored modality data (OM frames, converted CP images, fused outputs) keeps
/// every pixel in [0,1] and has `clamped` set. Intermediate diffusion states
/// reuse the same type with `clamped == false` and unbounded values.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;
  double pitch_um = kDefaultPitchUm;
  bool clamped = true;

  Image() = default;
  Image(std::size_t h, std::size_t w, double fill = 0.0,
        double pitch = kDefaultPitchUm, bool is_clamped = true);

  static Image from_pixels(std::size_t h, std::size_t w,
                           std::vector<double> values,
                           double pitch = kDefaultPitchUm,
                           bool is_clamped = true);

  double& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }

  std::size_t size() const noexcept { return pixels.size(); }
  std::span<double> row(std::size_t r) { return {pixels.data() + r * width, width}; }
  std::span<const double> row(std::size_t r) const { return {pixels.data() + r * width, width}; }

  bool same_shape(const Image& other) const noexcept {
    return height == other.height && width == other.width;
  }

  /// Copy of rows [row0, row0+rows) and columns [col0, col0+cols).
  Image crop(std::size_t row0, std::size_t col0, std::size_t rows,
             std::size_t cols) const;

  /// Copy with every pixel clamped to [0,1] and `clamped` set.
  Image clamped_copy() const;

  bool all_finite() const noexcept;

  friend bool operator==(const Image&, const Image&) = default;
};

/// Throws ShapeMismatch naming `what` when the two grids differ in shape.
void require_same_shape(const Image& a, const Image& b, std::string_view what);

double max_abs_diff(const Image& a, const Image& b);

/// Surface heights in µm, the raw confocal-profilometry modality.
struct HeightMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> z_um;
  double pitch_um = kDefaultPitchUm;

  HeightMap() = default;
  HeightMap(std::size_t h, std::size_t w, double fill = 0.0,
            double pitch = kDefaultPitchUm);

  double& at(std::size_t row, std::size_t col) { return z_um[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return z_um[row * width + col]; }

  /// Throws InvalidArgument if dimensions are zero, inconsistent, or any
  /// height is non-finite.
  void validate() const;

  friend bool operator==(const HeightMap&, const HeightMap&) = default;
};

}  // namespace ajfuse
