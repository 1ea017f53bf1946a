// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "ajfuse/image.hpp"
#include "ajfuse/registration.hpp"

namespace ajfuse {

enum class CrossSection { Gaussian };

/// Geometry and noise model of a synthetic printed-line corpus.
///
/// Lines run horizontally with Gaussian height cross-sections. Line i of
/// frame k has full width at half maximum base_width_um + k * drift. Small
/// overspray satellites scattered beside each line give the frames texture
/// along the line direction. The OM frame renders the height field through
/// a saturating response plus speckle; the CP map is the same surface
/// displaced by the frame's injected offset plus measurement noise.
struct CorpusSpec {
  std::size_t n_frames = 8;
  std::size_t lines_per_frame = 4;
  std::size_t rows = 336;
  std::size_t cols = 112;
  std::size_t margin_px = 24;
  double pitch_um = kDefaultPitchUm;
  double base_width_um = 4.0;
  double width_drift_um_per_frame = 0.1;
  double peak_height_um = 2.0;
  CrossSection cross_section = CrossSection::Gaussian;
  double overspray_noise_sd = 0.01;  // µm, additive on the CP map
  double om_speckle_sd = 0.01;       // intensity, additive on the OM frame
  double om_background = 0.08;
  double om_saturation = 0.25;  // gain g of the response (1 - e^{-g u}) / (1 - e^{-g})
  std::size_t satellites_per_line = 10;
  double satellite_height_frac = 0.35;
  double satellite_radius_px = 2.0;
  double duration_h = 16.0;
  std::vector<std::pair<int, int>> injected_offsets;  // per frame (dy, dx); empty = zeros
  std::uint64_t seed = 0;

  /// Throws SpecInfeasible when lines would overlap or leave the frame.
  void validate() const;

  double width_um(std::size_t frame) const {
    return base_width_um + static_cast<double>(frame) * width_drift_um_per_frame;
  }
  double centroid_row(std::size_t line) const;
  double timestamp_h(std::size_t frame) const;
  std::pair<int, int> offset(std::size_t frame) const;
};

struct LineTruth {
  std::size_t frame = 0;
  std::size_t line = 0;
  double centroid_row = 0.0;  // OM frame coordinates
  double width_um = 0.0;      // FWHM
  double peak_height_um = 0.0;
};

struct FrameTruth {
  double timestamp_h = 0.0;
  int dy = 0;
  int dx = 0;
};

struct GroundTruth {
  std::vector<FrameTruth> frames;
  std::vector<LineTruth> lines;  // frame-major
};

struct SyntheticCorpus {
  std::vector<TimedImage> om_frames;
  std::vector<TimedHeightMap> cp_maps;
  GroundTruth truth;
};

SyntheticCorpus generate_corpus(const CorpusSpec& spec);

/// Noiseless, unshifted surface of one frame in OM pixel coordinates.
class FrameSurface {
 public:
  FrameSurface(const CorpusSpec& spec, std::size_t frame);

  double height_um(double row, double col) const;

 private:
  struct Satellite {
    double row;
    double col;
    double height_um;
  };
  std::vector<double> centroids_;
  double sigma_px_;
  double peak_um_;
  double satellite_sigma_px_;
  std::vector<Satellite> satellites_;
};

/// Writes om/frame_NNN.pgm, cp/frame_NNN.csv (+ .meta), manifest.csv and
/// truth.csv under `dir`.
void write_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus);

}  // namespace ajfuse
