// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstdint>
#include <vector>

#include "ajfuse/image.hpp"
#include "ajfuse/registration.hpp"
#include "ajfuse/rng.hpp"
#include "ajfuse/schedule.hpp"
#include "ajfuse/scores.hpp"

namespace ajfuse {

struct FusionConfig {
  ScheduleParams schedule;  // schedule.steps is T
  double eta = 0.0;         // weight pulling the estimate toward ROI_OM
  double psi = 0.0;         // weight pulling the estimate toward ROI_CP
  std::uint64_t seed = 0;
  bool clamp_output = true;
  int trajectory_stride = 0;  // keep f~_{0|t} whenever t % stride == 0; 0 disables

  /// Throws InvalidArgument / InvalidScheduleParams on invalid values.
  void validate() const;
};

struct TrajectorySnapshot {
  int t = 0;
  Image estimate;  // f~_{0|t}
};

struct FusionResult {
  Image fused;
  std::vector<TrajectorySnapshot> trajectory;
  FusionConfig config;
  double wall_time_s = 0.0;
};

/// Cross-modality correction of a clean-data estimate.
class Rectifier {
 public:
  virtual ~Rectifier() = default;
  virtual Image apply(const Image& estimate, const Image& roi_om, const Image& roi_cp,
                      double eta, double psi) const = 0;
};

/// Closed-form minimizer of
///   1/2 |f - est|^2 + eta/2 |f - ROI_OM|^2 + psi/2 |f - ROI_CP|^2,
/// i.e. (est + eta ROI_OM + psi ROI_CP) / (1 + eta + psi).
class ProximalBlendRectifier final : public Rectifier {
 public:
  Image apply(const Image& estimate, const Image& roi_om, const Image& roi_cp, double eta,
              double psi) const override;
};

/// Clean-data estimate (f_t + (1 - ab_t) s(f_t, t)) / sqrt(ab_t), t in [1, T].
/// Throws StepOutOfRange and NonFiniteScore.
Image denoise_estimate(const Image& f_t, int t, const NoiseSchedule& sched,
                       const ScoreModel& score);

/// Proximal blend; throws ShapeMismatch, and InvalidArgument for negative weights.
Image rectify(const Image& f_tilde, const Image& roi_om, const Image& roi_cp, double eta,
              double psi);

struct TransitionCoefficients {
  double state;     // sqrt(a_t) (1 - ab_{t-1}) / (1 - ab_t)
  double estimate;  // sqrt(ab_{t-1}) beta_t / (1 - ab_t)
};

TransitionCoefficients transition_coefficients(int t, const NoiseSchedule& sched);

/// Deterministic step f_{t-1} = state * f_t + estimate * f^_{0|t}.
Image ddim_transition(const Image& f_t, const Image& f_hat0, int t,
                      const NoiseSchedule& sched);

/// Runs the reverse loop from f_T ~ N(0, I): denoise, rectify, transition for
/// t = T..1. Throws NonFiniteState naming the step if the state diverges.
FusionResult fuse_pair(const RoiPair& pair, const FusionConfig& cfg, const ScoreModel& score,
                       Rng& rng, const Rectifier& rectifier = ProximalBlendRectifier{});

/// Non-generative fusion: rectify((ROI_OM + ROI_CP) / 2, ROI_OM, ROI_CP, eta, psi).
Image fuse_baseline(const RoiPair& pair, double eta, double psi);

}  // namespace ajfuse
