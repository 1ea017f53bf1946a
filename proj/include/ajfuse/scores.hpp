// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <string>
#include <vector>

#include "ajfuse/image.hpp"
#include "ajfuse/schedule.hpp"

namespace ajfuse {

/// Score function s(f_t, t) = grad log p_t(f_t) of the forward-diffused data
/// distribution. Implementations are immutable and safe to evaluate
/// concurrently.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  /// Same-shaped gradient grid. Throws ShapeMismatch for grids the model was
  /// not built for.
  virtual Image score(const Image& f, int t, const NoiseSchedule& sched) const = 0;

  virtual std::string name() const = 0;
};

/// s == 0 everywhere; useful to isolate the sampler's algebra.
class ZeroScore final : public ScoreModel {
 public:
  Image score(const Image& f, int t, const NoiseSchedule& sched) const override;
  std::string name() const override { return "zero"; }
};

struct GaussianScoreParams {
  Image mu;
  double sigma0_sq = 0.0;  // isotropic data variance
};

/// Exact score of N(sqrt(ab_t) mu, (ab_t sigma0^2 + 1 - ab_t) I), the
/// t-diffused marginal of N(mu, sigma0^2 I).
class GaussianScore final : public ScoreModel {
 public:
  explicit GaussianScore(GaussianScoreParams params);

  Image score(const Image& f, int t, const NoiseSchedule& sched) const override;
  std::string name() const override { return "gaussian"; }

  const GaussianScoreParams& params() const noexcept { return params_; }

 private:
  GaussianScoreParams params_;
};

struct GmmScoreParams {
  std::vector<Image> patches;  // mixture centers, uniform weights
  double bandwidth_sq = 0.05 * 0.05;
};

/// Exact score of the uniform mixture of N(sqrt(ab_t) p_k,
/// (ab_t bandwidth^2 + 1 - ab_t) I) over the patches p_k.
class GmmScore final : public ScoreModel {
 public:
  explicit GmmScore(GmmScoreParams params);

  Image score(const Image& f, int t, const NoiseSchedule& sched) const override;
  std::string name() const override { return "gmm"; }

  /// Posterior component weights at (f, t); computed with log-sum-exp.
  std::vector<double> responsibilities(const Image& f, int t,
                                       const NoiseSchedule& sched) const;

  const GmmScoreParams& params() const noexcept { return params_; }

 private:
  GmmScoreParams params_;
};

GaussianScore gaussian_score(GaussianScoreParams params);
GmmScore gmm_empirical_score(GmmScoreParams params);

}  // namespace ajfuse
