// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/schedule.hpp"

#include <cmath>

#include <fmt/core.h>

#include "ajfuse/error.hpp"

namespace ajfuse {

NoiseSchedule::NoiseSchedule(std::vector<double> beta) : beta_(std::move(beta)) {
  if (beta_.empty()) {
    throw Error(ErrorCode::InvalidScheduleParams, "schedule needs at least one step");
  }
  alpha_.reserve(beta_.size());
  alpha_bar_.reserve(beta_.size() + 1);
  one_minus_alpha_bar_.reserve(beta_.size() + 1);
  alpha_bar_.push_back(1.0);
  one_minus_alpha_bar_.push_back(0.0);
  for (double b : beta_) {
    if (!(b > 0.0 && b < 1.0)) {
      throw Error(ErrorCode::InvalidScheduleParams,
                  fmt::format("beta must lie in (0, 1), got {}", b));
    }
    const double prev = alpha_bar_.back();
    alpha_.push_back(1.0 - b);
    alpha_bar_.push_back(prev * (1.0 - b));
    one_minus_alpha_bar_.push_back(one_minus_alpha_bar_.back() + prev * b);
  }
}

void NoiseSchedule::check_step(int t, int lo) const {
  if (t < lo || t > steps()) {
    throw Error(ErrorCode::StepOutOfRange,
                fmt::format("step {} outside [{}, {}]", t, lo, steps()));
  }
}

NoiseSchedule build_schedule(int steps, double beta_start, double beta_end,
                             ScheduleKind kind) {
  if (steps < 1 || !(beta_start > 0.0) || !(beta_start <= beta_end) ||
      !(beta_end < 1.0)) {
    throw Error(ErrorCode::InvalidScheduleParams,
                fmt::format("need T >= 1 and 0 < beta_start <= beta_end < 1, got "
                            "T={} beta_start={} beta_end={}",
                            steps, beta_start, beta_end));
  }
  std::vector<double> beta(static_cast<std::size_t>(steps));
  switch (kind) {
    case ScheduleKind::Linear:
      if (steps == 1) {
        beta[0] = beta_start;
      } else {
        const double span = beta_end - beta_start;
        for (int i = 0; i < steps; ++i) {
          beta[static_cast<std::size_t>(i)] =
              i == steps - 1 ? beta_end
                             : beta_start + span * static_cast<double>(i) / (steps - 1);
        }
      }
      break;
  }
  return NoiseSchedule(std::move(beta));
}

NoiseSchedule build_schedule(const ScheduleParams& params) {
  return build_schedule(params.steps, params.beta_start, params.beta_end, params.kind);
}

Image standard_normal_like(std::size_t height, std::size_t width, double pitch,
                           Rng& rng) {
  Image out(height, width, 0.0, pitch, false);
  for (double& v : out.pixels) v = rng.normal();
  return out;
}

Image forward_marginal_sample(const Image& f0, int t, const NoiseSchedule& sched,
                              const Image& noise) {
  sched.check_step(t, 0);
  require_same_shape(f0, noise, "forward_marginal_sample noise");
  if (t == 0) return f0;
  const double signal = std::sqrt(sched.alpha_bar(t));
  const double spread = std::sqrt(sched.one_minus_alpha_bar(t));
  Image out(f0.height, f0.width, 0.0, f0.pitch_um, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] = signal * f0.pixels[i] + spread * noise.pixels[i];
  }
  return out;
}

Image forward_marginal_sample(const Image& f0, int t, const NoiseSchedule& sched,
                              Rng& rng) {
  sched.check_step(t, 0);
  if (t == 0) return f0;
  return forward_marginal_sample(
      f0, t, sched, standard_normal_like(f0.height, f0.width, f0.pitch_um, rng));
}

Image forward_step(const Image& prev, int t, const NoiseSchedule& sched, Rng& rng) {
  sched.check_step(t);
  const double keep = std::sqrt(sched.alpha(t));
  const double spread = std::sqrt(sched.beta(t));
  Image out(prev.height, prev.width, 0.0, prev.pitch_um, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] = keep * prev.pixels[i] + spread * rng.normal();
  }
  return out;
}

}  // namespace ajfuse
