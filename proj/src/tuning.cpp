// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/tuning.hpp"

#include <cmath>

#include <fmt/core.h>

#include "ajfuse/error.hpp"
#include "ajfuse/parallel.hpp"

namespace ajfuse {

namespace {

std::size_t argmax_first(const std::vector<TuningRow>& rows) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::isnan(rows[i].average_ssim)) {
      throw Error(ErrorCode::NonFiniteState,
                  fmt::format("objective is NaN at candidate {}", rows[i].candidate));
    }
    if (rows[i].average_ssim > rows[best].average_ssim) best = i;
  }
  return best;
}

}  // namespace

void TuningGrid::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi || n_points == 0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("invalid grid {}:{}:{}", lo, hi, n_points));
  }
  if (n_points == 1 && lo != hi) {
    throw Error(ErrorCode::InvalidArgument,
                "a single-point grid needs lo == hi to include both endpoints");
  }
}

std::vector<double> TuningGrid::points() const {
  validate();
  std::vector<double> out(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    out[i] = i + 1 == n_points
                 ? hi
                 : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }
  return out;
}

TuningResult tune_objective(const TuningGrid& grid_eta, const TuningGrid& grid_psi,
                            double psi0, const TuningObjective& objective) {
  const std::vector<double> etas = grid_eta.points();
  const std::vector<double> psis = grid_psi.points();
  if (!(psi0 >= grid_psi.lo && psi0 <= grid_psi.hi)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("psi0 {} outside the psi grid [{}, {}]", psi0, grid_psi.lo,
                            grid_psi.hi));
  }
  TuningResult result;
  result.psi0 = psi0;

  result.stage1.resize(etas.size());
  parallel_for(etas.size(), [&](std::size_t i) {
    result.stage1[i] = {etas[i], objective(etas[i], psi0)};
  });
  result.eta_star = result.stage1[argmax_first(result.stage1)].candidate;

  result.stage2.resize(psis.size());
  parallel_for(psis.size(), [&](std::size_t k) {
    result.stage2[k] = {psis[k], objective(result.eta_star, psis[k])};
  });
  result.psi_star = result.stage2[argmax_first(result.stage2)].candidate;
  result.evaluations = etas.size() + psis.size();
  return result;
}

std::vector<double> evaluate_candidates(const std::vector<RoiPair>& pairs,
                                        const std::vector<std::pair<double, double>>& candidates,
                                        const FusionConfig& cfg, const ScoreModel& score,
                                        const SsimParams& ssim) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCorpus, "no ROI pairs to tune on");
  const std::size_t n = pairs.size();
  std::vector<double> totals(candidates.size() * n);
  parallel_for(totals.size(), [&](std::size_t job) {
    const std::size_t c = job / n;
    const std::size_t i = job % n;
    FusionConfig local = cfg;
    local.eta = candidates[c].first;
    local.psi = candidates[c].second;
    local.trajectory_stride = 0;
    try {
      Rng rng(Rng::derive(cfg.seed, i));
      const FusionResult fused = fuse_pair(pairs[i], local, score, rng);
      totals[job] = fusion_ssim(pairs[i].roi_om, pairs[i].roi_cp, fused.fused, ssim).total;
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("candidate (eta={}, psi={}) pair {}: {}", local.eta,
                                        local.psi, i, e.what()));
    }
  });
  std::vector<double> averages(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    averages[c] = average_ssim(std::span<const double>(totals).subspan(c * n, n));
  }
  return averages;
}

TuningResult tune(const std::vector<RoiPair>& pairs, const TuningGrid& grid_eta,
                  const TuningGrid& grid_psi, double psi0, const FusionConfig& cfg,
                  const ScoreModel& score, const SsimParams& ssim) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCorpus, "no ROI pairs to tune on");
  cfg.validate();
  ssim.validate();
  const std::vector<double> etas = grid_eta.points();
  const std::vector<double> psis = grid_psi.points();
  if (!(psi0 >= grid_psi.lo && psi0 <= grid_psi.hi)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("psi0 {} outside the psi grid [{}, {}]", psi0, grid_psi.lo,
                            grid_psi.hi));
  }

  TuningResult result;
  result.psi0 = psi0;
  result.n_pairs = pairs.size();
  result.config = cfg;

  // Each stage runs as one batch so candidates and pairs share the workers.
  std::vector<std::pair<double, double>> stage1;
  for (double eta : etas) stage1.emplace_back(eta, psi0);
  const auto avg1 = evaluate_candidates(pairs, stage1, cfg, score, ssim);
  for (std::size_t i = 0; i < etas.size(); ++i) result.stage1.push_back({etas[i], avg1[i]});
  result.eta_star = result.stage1[argmax_first(result.stage1)].candidate;

  std::vector<std::pair<double, double>> stage2;
  for (double psi : psis) stage2.emplace_back(result.eta_star, psi);
  const auto avg2 = evaluate_candidates(pairs, stage2, cfg, score, ssim);
  for (std::size_t k = 0; k < psis.size(); ++k) result.stage2.push_back({psis[k], avg2[k]});
  result.psi_star = result.stage2[argmax_first(result.stage2)].candidate;

  result.evaluations = etas.size() + psis.size();
  result.config.eta = result.eta_star;
  result.config.psi = result.psi_star;
  return result;
}

}  // namespace ajfuse
