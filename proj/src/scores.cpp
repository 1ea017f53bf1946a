// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/scores.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "ajfuse/error.hpp"

namespace ajfuse {

namespace {

// Variance of the diffused component at step t.
double diffused_variance(double data_var, int t, const NoiseSchedule& sched) {
  return sched.alpha_bar(t) * data_var + sched.one_minus_alpha_bar(t);
}

}  // namespace

Image ZeroScore::score(const Image& f, int t, const NoiseSchedule& sched) const {
  sched.check_step(t, 0);
  return Image(f.height, f.width, 0.0, f.pitch_um, false);
}

GaussianScore::GaussianScore(GaussianScoreParams params) : params_(std::move(params)) {
  if (!(params_.sigma0_sq >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sigma0_sq must be nonnegative");
  }
  if (params_.mu.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty mean grid");
}

Image GaussianScore::score(const Image& f, int t, const NoiseSchedule& sched) const {
  sched.check_step(t, 0);
  require_same_shape(f, params_.mu, "gaussian score input vs mean");
  const double var = diffused_variance(params_.sigma0_sq, t, sched);
  if (!(var > 0.0)) {
    throw Error(ErrorCode::StepOutOfRange, "score of a zero-variance marginal is undefined");
  }
  const double signal = std::sqrt(sched.alpha_bar(t));
  Image out(f.height, f.width, 0.0, f.pitch_um, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] = -(f.pixels[i] - signal * params_.mu.pixels[i]) / var;
  }
  return out;
}

GmmScore::GmmScore(GmmScoreParams params) : params_(std::move(params)) {
  if (params_.patches.empty()) throw Error(ErrorCode::InvalidArgument, "no mixture patches");
  if (!(params_.bandwidth_sq >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bandwidth_sq must be nonnegative");
  }
  for (const auto& p : params_.patches) {
    require_same_shape(p, params_.patches.front(), "mixture patch");
  }
}

std::vector<double> GmmScore::responsibilities(const Image& f, int t,
                                               const NoiseSchedule& sched) const {
  sched.check_step(t, 0);
  require_same_shape(f, params_.patches.front(), "gmm score input vs patches");
  const double var = diffused_variance(params_.bandwidth_sq, t, sched);
  if (!(var > 0.0)) {
    throw Error(ErrorCode::StepOutOfRange, "score of a zero-variance marginal is undefined");
  }
  const double signal = std::sqrt(sched.alpha_bar(t));
  std::vector<double> logits(params_.patches.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const auto& p = params_.patches[k].pixels;
    double sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = f.pixels[i] - signal * p[i];
      sq += d * d;
    }
    logits[k] = -sq / (2.0 * var);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

Image GmmScore::score(const Image& f, int t, const NoiseSchedule& sched) const {
  const std::vector<double> resp = responsibilities(f, t, sched);
  const double var = diffused_variance(params_.bandwidth_sq, t, sched);
  const double signal = std::sqrt(sched.alpha_bar(t));
  // sum_k r_k * (-(f - signal p_k) / var) = -(f - signal * sum_k r_k p_k) / var
  std::vector<double> center(f.size(), 0.0);
  for (std::size_t k = 0; k < resp.size(); ++k) {
    if (resp[k] == 0.0) continue;
    const auto& p = params_.patches[k].pixels;
    for (std::size_t i = 0; i < center.size(); ++i) center[i] += resp[k] * p[i];
  }
  Image out(f.height, f.width, 0.0, f.pitch_um, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] = -(f.pixels[i] - signal * center[i]) / var;
  }
  return out;
}

GaussianScore gaussian_score(GaussianScoreParams params) {
  return GaussianScore(std::move(params));
}

GmmScore gmm_empirical_score(GmmScoreParams params) { return GmmScore(std::move(params)); }

}  // namespace ajfuse
