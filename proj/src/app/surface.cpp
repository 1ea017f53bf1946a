// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/app/surface.hpp"

#include <fmt/core.h>

#include "ajfuse/error.hpp"
#include "ajfuse/image_io.hpp"

namespace ajfuse::app {

SurfaceStack::SurfaceStack(std::vector<SurfaceFrame> frames, ProfileAxis axis,
                           std::optional<IndexRange> band, HeightRange height_range)
    : frames_(std::move(frames)), axis_(axis), range_(height_range) {
  if (frames_.empty()) throw Error(ErrorCode::InvalidArgument, "surface stack needs frames");
  const Image& first = frames_.front().fused;
  length_ = axis_ == ProfileAxis::Rows ? first.height : first.width;
  const std::size_t across = axis_ == ProfileAxis::Rows ? first.width : first.height;
  band_ = band.value_or(IndexRange{0, across});
  for (std::size_t k = 0; k < frames_.size(); ++k) {
    const Image& img = frames_[k].fused;
    const std::size_t len = axis_ == ProfileAxis::Rows ? img.height : img.width;
    const std::size_t other = axis_ == ProfileAxis::Rows ? img.width : img.height;
    if (len != length_) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("frame {} profile length {} differs from {}", k, len, length_));
    }
    if (band_.begin >= band_.end || band_.end > other) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("band [{}, {}) does not fit frame {}", band_.begin, band_.end, k));
    }
    if (k > 0 && !(frames_[k].t_h > frames_[k - 1].t_h)) {
      throw Error(ErrorCode::InvalidArgument, "surface frames must strictly increase in time");
    }
  }
}

std::vector<double> SurfaceStack::profile(std::size_t frame) const {
  const Image& img = frames_.at(frame).fused;
  const double span = range_.z_max - range_.z_min;
  std::vector<double> out(length_);
  for (std::size_t i = 0; i < length_; ++i) {
    double sum = 0.0;
    for (std::size_t j = band_.begin; j < band_.end; ++j) {
      sum += axis_ == ProfileAxis::Rows ? img.at(i, j) : img.at(j, i);
    }
    out[i] = range_.z_min + span * sum / static_cast<double>(band_.size());
  }
  return out;
}

std::vector<SurfaceSample> SurfaceStack::samples() const {
  std::vector<SurfaceSample> out;
  out.reserve(frames_.size() * length_);
  for (std::size_t k = 0; k < frames_.size(); ++k) {
    const auto z = profile(k);
    for (std::size_t i = 0; i < length_; ++i) {
      out.push_back({frames_[k].t_h, static_cast<double>(i) * frames_[k].fused.pitch_um, z[i]});
    }
  }
  return out;
}

std::string SurfaceStack::to_csv() const {
  std::string out = "t,x_um,z\n";
  for (const auto& s : samples()) {
    out += fmt::format("{},{},{}\n", format_exact(s.t_h), format_exact(s.x_um), format_exact(s.z_um));
  }
  return out;
}

}  // namespace ajfuse::app
