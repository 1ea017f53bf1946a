// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ajfuse/diffusion.hpp"
#include "ajfuse/metrics.hpp"
#include "ajfuse/registration.hpp"
#include "ajfuse/scores.hpp"

namespace ajfuse {

/// Uniform grid with inclusive endpoints.
struct TuningGrid {
  double lo = 0.0;
  double hi = 100.0;
  std::size_t n_points = 11;

  void validate() const;
  std::vector<double> points() const;
};

struct TuningRow {
  double candidate = 0.0;
  double average_ssim = 0.0;
};

struct TuningResult {
  double eta_star = 0.0;
  double psi_star = 0.0;
  double psi0 = 0.0;
  std::vector<TuningRow> stage1;  // eta candidates at psi = psi0
  std::vector<TuningRow> stage2;  // psi candidates at eta = eta_star
  std::size_t n_pairs = 0;
  std::size_t evaluations = 0;  // objective evaluations, |grid_eta| + |grid_psi|
  FusionConfig config;
};

/// Corpus-average fusion SSIM as a function of (eta, psi).
using TuningObjective = std::function<double(double eta, double psi)>;

/// Two-stage coordinate search: eta* = argmax over grid_eta at psi0, then
/// psi* = argmax over grid_psi at eta*. Ties go to the smallest candidate.
/// Candidates within a stage are evaluated concurrently.
TuningResult tune_objective(const TuningGrid& grid_eta, const TuningGrid& grid_psi,
                            double psi0, const TuningObjective& objective);

/// Average of fusion_ssim(...).total over all pairs for each (eta, psi)
/// candidate. Pair i always fuses with the stream Rng::derive(cfg.seed, i), so
/// each value is a deterministic function of its candidate and matches what
/// a standalone fusion run with the same config produces.
std::vector<double> evaluate_candidates(const std::vector<RoiPair>& pairs,
                                        const std::vector<std::pair<double, double>>& candidates,
                                        const FusionConfig& cfg, const ScoreModel& score,
                                        const SsimParams& ssim = {});

/// Fine-tunes (eta, psi) on the pairs with the full diffusion fusion loop.
/// Throws EmptyCorpus, InvalidArgument when psi0 lies outside grid_psi, and
/// rethrows fusion errors prefixed with the failing candidate and pair.
TuningResult tune(const std::vector<RoiPair>& pairs, const TuningGrid& grid_eta,
                  const TuningGrid& grid_psi, double psi0, const FusionConfig& cfg,
                  const ScoreModel& score, const SsimParams& ssim = {});

}  // namespace ajfuse
