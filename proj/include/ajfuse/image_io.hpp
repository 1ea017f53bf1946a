// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <filesystem>
#include <string>

#include "ajfuse/image.hpp"

namespace ajfuse {

enum class PgmFormat {
  Binary16,  // P5, maxval 65535, big-endian samples
  Plain,     // P2, maxval 65535, whitespace-separated decimal samples
};

/// Pixels are clamped to [0,1] and mapped linearly onto [0,65535].
void write_pgm(const std::filesystem::path& path, const Image& img,
               PgmFormat format = PgmFormat::Binary16);

/// Reads P2 or P5 graymaps with any maxval in [1, 65535]; samples are mapped
/// back to [0,1] by dividing by maxval. The pitch is not stored in the file.
Image read_pgm(const std::filesystem::path& path, double pitch_um = kDefaultPitchUm);

struct HeightMapMeta {
  double pitch_um = kDefaultPitchUm;
  double timestamp_h = 0.0;
};

/// Writes a headerless CSV of µm values and a sidecar `<path>.meta` holding
/// `pitch_um = ...` and `timestamp = ...` lines.
void write_heightmap(const std::filesystem::path& path, const HeightMap& hm,
                     double timestamp_h);

HeightMap read_heightmap(const std::filesystem::path& path,
                         HeightMapMeta* meta_out = nullptr);

std::filesystem::path heightmap_meta_path(const std::filesystem::path& csv_path);

/// Shortest decimal text that round-trips the double exactly.
std::string format_exact(double value);

}  // namespace ajfuse
