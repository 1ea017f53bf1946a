// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "ajfuse/error.hpp"
#include "ajfuse/image_io.hpp"
#include "ajfuse/manifest.hpp"
#include "ajfuse/parallel.hpp"
#include "ajfuse/rng.hpp"

namespace ajfuse {

namespace {

const double kFwhmToSigma = 1.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));

// Independent streams per frame: satellites, OM speckle, CP noise.
enum Stream : std::uint64_t { kSatellites = 0, kSpeckle = 1, kCpNoise = 2 };

Rng frame_stream(const CorpusSpec& spec, std::size_t frame, Stream stream) {
  return Rng(Rng::derive(mix64(spec.seed), 4 * frame + stream));
}

[[noreturn]] void infeasible(const std::string& why) {
  throw Error(ErrorCode::SpecInfeasible, why);
}

}  // namespace

void CorpusSpec::validate() const {
  if (n_frames == 0 || lines_per_frame == 0) infeasible("need at least one frame and one line");
  if (!(pitch_um > 0.0) || !(peak_height_um > 0.0)) {
    infeasible("pitch and peak height must be positive");
  }
  if (!injected_offsets.empty() && injected_offsets.size() != n_frames) {
    infeasible(fmt::format("{} injected offsets for {} frames", injected_offsets.size(), n_frames));
  }
  if (rows <= 2 * margin_px) infeasible("margins leave no room for lines");
  double widest = 0.0;
  for (std::size_t k = 0; k < n_frames; ++k) {
    const double w = width_um(k);
    if (!(w > 0.0)) infeasible(fmt::format("frame {} has non-positive width {}", k, w));
    widest = std::max(widest, w);
  }
  const double fwhm_px = widest / pitch_um;
  const double spacing = static_cast<double>(rows - 2 * margin_px) /
                         static_cast<double>(lines_per_frame);
  if (lines_per_frame > 1 && 2.0 * fwhm_px > spacing) {
    infeasible(fmt::format("lines {:.1f} px wide overlap at {:.1f} px spacing", fwhm_px, spacing));
  }
  if (centroid_row(0) - fwhm_px < 0.0 ||
      centroid_row(lines_per_frame - 1) + fwhm_px > static_cast<double>(rows - 1)) {
    infeasible("lines leave the frame");
  }
  if (!(om_saturation > 0.0) || om_background < 0.0 || om_background >= 1.0) {
    infeasible("invalid OM response parameters");
  }
  if (overspray_noise_sd < 0.0 || om_speckle_sd < 0.0 || satellite_radius_px <= 0.0) {
    infeasible("noise levels must be nonnegative and satellites need a positive radius");
  }
}

double CorpusSpec::centroid_row(std::size_t line) const {
  const double spacing = static_cast<double>(rows - 2 * margin_px) /
                         static_cast<double>(lines_per_frame);
  return std::round(static_cast<double>(margin_px) + spacing * (static_cast<double>(line) + 0.5));
}

double CorpusSpec::timestamp_h(std::size_t frame) const {
  if (n_frames <= 1) return 0.0;
  return duration_h * static_cast<double>(frame) / static_cast<double>(n_frames - 1);
}

std::pair<int, int> CorpusSpec::offset(std::size_t frame) const {
  return injected_offsets.empty() ? std::pair{0, 0} : injected_offsets.at(frame);
}

FrameSurface::FrameSurface(const CorpusSpec& spec, std::size_t frame)
    : sigma_px_(spec.width_um(frame) / spec.pitch_um * kFwhmToSigma),
      peak_um_(spec.peak_height_um),
      satellite_sigma_px_(spec.satellite_radius_px) {
  const double fwhm_px = spec.width_um(frame) / spec.pitch_um;
  Rng rng = frame_stream(spec, frame, kSatellites);
  for (std::size_t i = 0; i < spec.lines_per_frame; ++i) {
    const double c = spec.centroid_row(i);
    centroids_.push_back(c);
    for (std::size_t s = 0; s < spec.satellites_per_line; ++s) {
      const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double dist = (1.2 + 0.8 * rng.uniform()) * fwhm_px;
      const double col = rng.uniform() * static_cast<double>(spec.cols);
      const double h = spec.satellite_height_frac * spec.peak_height_um * (0.5 + rng.uniform());
      satellites_.push_back({c + side * dist, col, h});
    }
  }
}

double FrameSurface::height_um(double row, double col) const {
  double z = 0.0;
  for (double c : centroids_) {
    const double d = (row - c) / sigma_px_;
    z += peak_um_ * std::exp(-0.5 * d * d);
  }
  for (const auto& s : satellites_) {
    const double dr = row - s.row;
    const double dc = col - s.col;
    z += s.height_um *
         std::exp(-0.5 * (dr * dr + dc * dc) / (satellite_sigma_px_ * satellite_sigma_px_));
  }
  return z;
}

SyntheticCorpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  corpus.om_frames.resize(spec.n_frames);
  corpus.cp_maps.resize(spec.n_frames);
  for (std::size_t k = 0; k < spec.n_frames; ++k) {
    const auto [dy, dx] = spec.offset(k);
    corpus.truth.frames.push_back({spec.timestamp_h(k), dy, dx});
    for (std::size_t i = 0; i < spec.lines_per_frame; ++i) {
      corpus.truth.lines.push_back(
          {k, i, spec.centroid_row(i), spec.width_um(k), spec.peak_height_um});
    }
  }

  const double response_norm = 1.0 - std::exp(-spec.om_saturation);
  parallel_for(spec.n_frames, [&](std::size_t k) {
    const FrameSurface surface(spec, k);
    const auto [dy, dx] = spec.offset(k);

    Image om(spec.rows, spec.cols, 0.0, spec.pitch_um, true);
    Rng speckle = frame_stream(spec, k, kSpeckle);
    for (std::size_t r = 0; r < spec.rows; ++r) {
      for (std::size_t c = 0; c < spec.cols; ++c) {
        const double u = surface.height_um(static_cast<double>(r), static_cast<double>(c)) /
                         spec.peak_height_um;
        const double response = (1.0 - std::exp(-spec.om_saturation * u)) / response_norm;
        double v = spec.om_background + (1.0 - spec.om_background) * response;
        if (spec.om_speckle_sd > 0.0) v += spec.om_speckle_sd * speckle.normal();
        om.at(r, c) = std::clamp(v, 0.0, 1.0);
      }
    }

    HeightMap cp(spec.rows, spec.cols, 0.0, spec.pitch_um);
    Rng noise = frame_stream(spec, k, kCpNoise);
    for (std::size_t r = 0; r < spec.rows; ++r) {
      for (std::size_t c = 0; c < spec.cols; ++c) {
        double z = surface.height_um(static_cast<double>(r) - dy, static_cast<double>(c) - dx);
        if (spec.overspray_noise_sd > 0.0) z += spec.overspray_noise_sd * noise.normal();
        cp.at(r, c) = z;
      }
    }
    corpus.om_frames[k] = {spec.timestamp_h(k), std::move(om)};
    corpus.cp_maps[k] = {spec.timestamp_h(k), std::move(cp)};
  });
  return corpus;
}

void write_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "om");
  fs::create_directories(dir / "cp");
  std::vector<ManifestEntry> entries;
  for (std::size_t k = 0; k < corpus.om_frames.size(); ++k) {
    const std::string om_rel = fmt::format("om/frame_{:03}.pgm", k);
    const std::string cp_rel = fmt::format("cp/frame_{:03}.csv", k);
    write_pgm(dir / om_rel, corpus.om_frames[k].image);
    write_heightmap(dir / cp_rel, corpus.cp_maps[k].map, corpus.cp_maps[k].timestamp_h);
    entries.push_back({om_rel, corpus.om_frames[k].timestamp_h, Modality::OM});
    entries.push_back({cp_rel, corpus.cp_maps[k].timestamp_h, Modality::CP});
  }
  write_manifest(dir / "manifest.csv", entries);

  std::ofstream truth(dir / "truth.csv");
  if (!truth) throw Error(ErrorCode::IoError, "cannot write truth.csv");
  truth << "frame,line,timestamp,centroid_row,width_um,peak_height_um,dy,dx\n";
  for (const auto& line : corpus.truth.lines) {
    const auto& frame = corpus.truth.frames.at(line.frame);
    truth << line.frame << ',' << line.line << ',' << format_exact(frame.timestamp_h) << ','
          << format_exact(line.centroid_row) << ',' << format_exact(line.width_um) << ','
          << format_exact(line.peak_height_um) << ',' << frame.dy << ',' << frame.dx << '\n';
  }
}

}  // namespace ajfuse
