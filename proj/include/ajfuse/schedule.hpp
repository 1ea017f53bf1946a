// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstddef>
#include <vector>

#include "ajfuse/image.hpp"
#include "ajfuse/rng.hpp"

namespace ajfuse {

enum class ScheduleKind { Linear };

struct ScheduleParams {
  int steps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  ScheduleKind kind = ScheduleKind::Linear;
};

/// Forward-process variances and their cumulative products.
///
/// Steps are 1-based: `beta(t)` and `alpha(t)` for t in [1, T],
/// `alpha_bar(t)` and `one_minus_alpha_bar(t)` for t in [0, T] with
/// alpha_bar(0) == 1 and one_minus_alpha_bar(0) == 0.
///
/// `one_minus_alpha_bar` is accumulated directly as
/// (1 - ab[t-1]) + ab[t-1] * beta[t] instead of being formed as 1 - ab[t],
/// so it carries full relative precision when alpha_bar is close to 1. In
/// particular one_minus_alpha_bar(1) == beta(1) exactly.
class NoiseSchedule {
 public:
  NoiseSchedule() = default;
  NoiseSchedule(std::vector<double> beta);

  int steps() const noexcept { return static_cast<int>(beta_.size()); }

  double beta(int t) const { return beta_.at(static_cast<std::size_t>(t - 1)); }
  double alpha(int t) const { return alpha_.at(static_cast<std::size_t>(t - 1)); }
  double alpha_bar(int t) const { return alpha_bar_.at(static_cast<std::size_t>(t)); }
  double one_minus_alpha_bar(int t) const {
    return one_minus_alpha_bar_.at(static_cast<std::size_t>(t));
  }

  const std::vector<double>& betas() const noexcept { return beta_; }
  const std::vector<double>& alphas() const noexcept { return alpha_; }
  const std::vector<double>& alpha_bars() const noexcept { return alpha_bar_; }

  /// Throws StepOutOfRange unless lo <= t <= steps().
  void check_step(int t, int lo = 1) const;

  friend bool operator==(const NoiseSchedule&, const NoiseSchedule&) = default;

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
  std::vector<double> one_minus_alpha_bar_;
};

/// Builds a schedule with beta interpolated from beta_start to beta_end.
/// Throws InvalidScheduleParams unless T >= 1 and 0 < start <= end < 1.
NoiseSchedule build_schedule(int steps, double beta_start, double beta_end,
                             ScheduleKind kind = ScheduleKind::Linear);
NoiseSchedule build_schedule(const ScheduleParams& params);

/// Closed-form jump f_t = sqrt(ab_t) f0 + sqrt(1 - ab_t) eps, one standard
/// normal per pixel drawn in row-major order. t = 0 returns f0 unchanged.
Image forward_marginal_sample(const Image& f0, int t, const NoiseSchedule& sched,
                              Rng& rng);

/// Same jump with caller-supplied noise.
Image forward_marginal_sample(const Image& f0, int t, const NoiseSchedule& sched,
                              const Image& noise);

/// One step of the forward chain: sqrt(1 - beta_t) f + sqrt(beta_t) eps.
Image forward_step(const Image& prev, int t, const NoiseSchedule& sched, Rng& rng);

/// A grid of independent standard normals.
Image standard_normal_like(std::size_t height, std::size_t width, double pitch,
                           Rng& rng);

}  // namespace ajfuse
