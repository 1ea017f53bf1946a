// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/diffusion.hpp"

#include <chrono>
#include <cmath>

#include <fmt/core.h>

#include "ajfuse/error.hpp"

namespace ajfuse {

void FusionConfig::validate() const {
  if (schedule.steps < 1) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("steps must be >= 1, got {}", schedule.steps));
  }
  if (!(eta >= 0.0) || !(psi >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("eta and psi must be nonnegative, got {} and {}", eta, psi));
  }
  if (trajectory_stride < 0) {
    throw Error(ErrorCode::InvalidArgument, "trajectory stride must be >= 0");
  }
  (void)build_schedule(schedule);
}

Image ProximalBlendRectifier::apply(const Image& estimate, const Image& roi_om,
                                    const Image& roi_cp, double eta, double psi) const {
  require_same_shape(estimate, roi_om, "rectify estimate vs ROI_OM");
  require_same_shape(estimate, roi_cp, "rectify estimate vs ROI_CP");
  if (!(eta >= 0.0) || !(psi >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rectification weights must be nonnegative");
  }
  const double norm = 1.0 + eta + psi;
  Image out(estimate.height, estimate.width, 0.0, estimate.pitch_um, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] =
        (estimate.pixels[i] + eta * roi_om.pixels[i] + psi * roi_cp.pixels[i]) / norm;
  }
  return out;
}

Image denoise_estimate(const Image& f_t, int t, const NoiseSchedule& sched,
                       const ScoreModel& score) {
  sched.check_step(t);
  const Image s = score.score(f_t, t, sched);
  require_same_shape(f_t, s, "score output");
  if (!s.all_finite()) {
    throw Error(ErrorCode::NonFiniteScore, fmt::format("non-finite score at step {}", t));
  }
  const double noise_var = sched.one_minus_alpha_bar(t);
  const double inv_signal = 1.0 / std::sqrt(sched.alpha_bar(t));
  Image out(f_t.height, f_t.width, 0.0, f_t.pitch_um, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] = (f_t.pixels[i] + noise_var * s.pixels[i]) * inv_signal;
  }
  return out;
}

Image rectify(const Image& f_tilde, const Image& roi_om, const Image& roi_cp, double eta,
              double psi) {
  return ProximalBlendRectifier{}.apply(f_tilde, roi_om, roi_cp, eta, psi);
}

TransitionCoefficients transition_coefficients(int t, const NoiseSchedule& sched) {
  sched.check_step(t);
  const double denom = sched.one_minus_alpha_bar(t);
  return {std::sqrt(sched.alpha(t)) * sched.one_minus_alpha_bar(t - 1) / denom,
          std::sqrt(sched.alpha_bar(t - 1)) * sched.beta(t) / denom};
}

Image ddim_transition(const Image& f_t, const Image& f_hat0, int t,
                      const NoiseSchedule& sched) {
  require_same_shape(f_t, f_hat0, "transition state vs estimate");
  const auto [cs, ce] = transition_coefficients(t, sched);
  Image out(f_t.height, f_t.width, 0.0, f_t.pitch_um, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] = cs * f_t.pixels[i] + ce * f_hat0.pixels[i];
  }
  return out;
}

FusionResult fuse_pair(const RoiPair& pair, const FusionConfig& cfg, const ScoreModel& score,
                       Rng& rng, const Rectifier& rectifier) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  require_same_shape(pair.roi_om, pair.roi_cp, "ROI pair");
  const NoiseSchedule sched = build_schedule(cfg.schedule);

  FusionResult result;
  result.config = cfg;
  Image state = standard_normal_like(pair.roi_om.height, pair.roi_om.width,
                                     pair.roi_om.pitch_um, rng);
  for (int t = sched.steps(); t >= 1; --t) {
    Image estimate = denoise_estimate(state, t, sched, score);
    const Image rectified = rectifier.apply(estimate, pair.roi_om, pair.roi_cp, cfg.eta, cfg.psi);
    state = ddim_transition(state, rectified, t, sched);
    if (!state.all_finite()) {
      throw Error(ErrorCode::NonFiniteState, fmt::format("state diverged at step {}", t));
    }
    if (cfg.trajectory_stride > 0 && t % cfg.trajectory_stride == 0) {
      result.trajectory.push_back({t, std::move(estimate)});
    }
  }
  result.fused = cfg.clamp_output ? state.clamped_copy() : std::move(state);
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Image fuse_baseline(const RoiPair& pair, double eta, double psi) {
  require_same_shape(pair.roi_om, pair.roi_cp, "ROI pair");
  Image mid(pair.roi_om.height, pair.roi_om.width, 0.0, pair.roi_om.pitch_um, true);
  for (std::size_t i = 0; i < mid.size(); ++i) {
    mid.pixels[i] = 0.5 * (pair.roi_om.pixels[i] + pair.roi_cp.pixels[i]);
  }
  Image out = rectify(mid, pair.roi_om, pair.roi_cp, eta, psi);
  out.clamped = true;
  return out;
}

}  // namespace ajfuse
