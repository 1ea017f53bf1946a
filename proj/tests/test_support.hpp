// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "ajfuse/image.hpp"
#include "ajfuse/registration.hpp"
#include "ajfuse/rng.hpp"
#include "ajfuse/synthgen.hpp"

namespace ajfuse::testing {

inline Image random_image(std::size_t h, std::size_t w, std::uint64_t seed, double lo = 0.0,
                          double hi = 1.0) {
  Rng rng(seed);
  Image img(h, w);
  for (double& v : img.pixels) v = lo + (hi - lo) * rng.uniform();
  return img;
}

// Smooth texture with enough structure for correlation and SSIM tests.
inline Image textured_image(std::size_t h, std::size_t w, std::uint64_t seed) {
  Rng rng(seed);
  const double a = 0.2 + 0.3 * rng.uniform();
  const double b = 0.1 + 0.4 * rng.uniform();
  const double c = 0.05 + 0.2 * rng.uniform();
  Image img(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double v = 0.5 + 0.2 * std::sin(a * y + 0.3) * std::cos(b * x) +
                       0.15 * std::sin(c * (x + 2.0 * y)) + 0.05 * rng.uniform();
      img.at(y, x) = v;
    }
  }
  return img;
}

// out(y, x) = img((y - dy) mod h, (x - dx) mod w), so out(y + dy, x + dx) = img(y, x).
inline Image circular_shift(const Image& img, int dy, int dx) {
  Image out(img.height, img.width);
  const auto h = static_cast<long>(img.height);
  const auto w = static_cast<long>(img.width);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      out.at(y, x) = img.at(((y - dy) % h + h) % h, ((x - dx) % w + w) % w);
    }
  }
  return out;
}

inline RoiPair make_pair(Image om, Image cp) {
  RoiPair p;
  p.roi_om = std::move(om);
  p.roi_cp = std::move(cp);
  return p;
}

// Full-frame ROI pairs from a small synthetic corpus, registered with the library.
inline std::vector<RoiPair> synthetic_pairs(std::size_t n_frames, std::uint64_t seed) {
  CorpusSpec spec;
  spec.n_frames = n_frames;
  spec.seed = seed;
  SyntheticCorpus corpus = generate_corpus(spec);
  RegistrationParams params;
  params.roi_rows = 32;
  params.roi_cols = 32;
  return register_corpus(std::move(corpus.om_frames), std::move(corpus.cp_maps), params).pairs;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("ajfuse_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace ajfuse::testing
