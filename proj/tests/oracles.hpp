// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

// Reference computations used to check the library. Everything here is
// written directly from the definitions, without the library's shortcuts.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ajfuse/image.hpp"
#include "ajfuse/metrics.hpp"
#include "ajfuse/schedule.hpp"

namespace ajfuse::oracle {

/// log N(f; scale * center, var * I), in long double.
inline long double log_gaussian(const Image& f, const Image& center, long double scale,
                                long double var) {
  long double q = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const long double d = f.pixels[i] - scale * center.pixels[i];
    q += d * d;
  }
  return -q / (2.0L * var) -
         0.5L * static_cast<long double>(f.size()) *
             std::log(2.0L * std::numbers::pi_v<long double> * var);
}

/// log of the uniform mixture of N(scale * c_k, var * I).
inline long double log_mixture(const Image& f, const std::vector<Image>& centers,
                               long double scale, long double var) {
  std::vector<long double> terms;
  for (const auto& c : centers) terms.push_back(log_gaussian(f, c, scale, var));
  const long double m = *std::max_element(terms.begin(), terms.end());
  long double s = 0.0L;
  for (long double v : terms) s += std::exp(v - m);
  return m + std::log(s / static_cast<long double>(centers.size()));
}

/// Central differences of `logp` at f, one pixel at a time.
template <typename LogDensity>
Image finite_difference_gradient(const Image& f, LogDensity&& logp, double h) {
  Image g(f.height, f.width);
  for (std::size_t i = 0; i < f.size(); ++i) {
    Image plus = f, minus = f;
    plus.pixels[i] += h;
    minus.pixels[i] -= h;
    g.pixels[i] = static_cast<double>((logp(plus) - logp(minus)) / (2.0L * h));
  }
  return g;
}

/// max |got - want| / max |want|.
inline double relative_error(const Image& got, const Image& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num = std::max(num, std::abs(got.pixels[i] - want.pixels[i]));
    den = std::max(den, std::abs(want.pixels[i]));
  }
  return num / den;
}

/// Per-window SSIM with population moments, each window summed from scratch.
inline double naive_ssim(const Image& a, const Image& b, const SsimParams& p) {
  const std::size_t w = p.window;
  const double n = static_cast<double>(w * w);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t y = 0; y + w <= a.height; y += p.stride) {
    for (std::size_t x = 0; x + w <= a.width; x += p.stride) {
      double ma = 0, mb = 0;
      for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          ma += a.at(y + i, x + j);
          mb += b.at(y + i, x + j);
        }
      }
      ma /= n;
      mb /= n;
      double va = 0, vb = 0, cov = 0;
      for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          const double da = a.at(y + i, x + j) - ma;
          const double db = b.at(y + i, x + j) - mb;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      }
      va /= n;
      vb /= n;
      cov /= n;
      const double sa = std::sqrt(va), sb = std::sqrt(vb);
      const double l = (2 * ma * mb + p.c1) / (ma * ma + mb * mb + p.c1);
      const double c = (2 * sa * sb + p.c2) / (va + vb + p.c2);
      const double s = (cov + p.c3) / (sa * sb + p.c3);
      total += l * c * s;
      ++count;
    }
  }
  return p.aggregate == SsimAggregate::Mean ? total / static_cast<double>(count) : total;
}

/// With a Gaussian data score and no rectification every reverse step is the
/// per-pixel affine map f <- a_t f + b_t mu. Returns the composition
/// f_0 = A f_T + B mu for t = T..1, with the schedule rebuilt in long double.
struct AffineLoop {
  long double A = 1.0L;
  long double B = 0.0L;
};

inline AffineLoop compose_gaussian_loop(int steps, long double beta_start, long double beta_end,
                                        long double sigma0_sq) {
  std::vector<long double> ab(static_cast<std::size_t>(steps) + 1, 1.0L);
  std::vector<long double> beta(static_cast<std::size_t>(steps) + 1, 0.0L);
  for (int t = 1; t <= steps; ++t) {
    beta[t] = steps == 1 ? beta_end
                         : beta_start + (beta_end - beta_start) * (t - 1) / (steps - 1);
    ab[t] = ab[t - 1] * (1.0L - beta[t]);
  }
  AffineLoop loop;
  for (int t = steps; t >= 1; --t) {
    const long double v = ab[t] * sigma0_sq + 1.0L - ab[t];
    // Denoise: f~ = (f + (1 - ab) s) / sqrt(ab), s = -(f - sqrt(ab) mu) / v.
    const long double den_f = (1.0L - (1.0L - ab[t]) / v) / std::sqrt(ab[t]);
    const long double den_mu = (1.0L - ab[t]) / v;
    const long double cs = std::sqrt(1.0L - beta[t]) * (1.0L - ab[t - 1]) / (1.0L - ab[t]);
    const long double ce = std::sqrt(ab[t - 1]) * beta[t] / (1.0L - ab[t]);
    const long double a = cs + ce * den_f;
    const long double b = ce * den_mu;
    loop.B = a * loop.B + b;
    loop.A = a * loop.A;
  }
  return loop;
}

/// Full width at half maximum of a sampled profile around its highest
/// sample. The baseline is the profile minimum; crossings are located by
/// linear interpolation. Returns the width in sample units.
inline double half_max_width(const std::vector<double>& profile) {
  const auto peak_it = std::max_element(profile.begin(), profile.end());
  const double base = *std::min_element(profile.begin(), profile.end());
  const double half = base + 0.5 * (*peak_it - base);
  const auto peak = static_cast<std::size_t>(peak_it - profile.begin());
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && profile[lo - 1] >= half) --lo;
  while (hi + 1 < profile.size() && profile[hi + 1] >= half) ++hi;
  auto cross = [&](std::size_t in, std::size_t out) {
    const double a = profile[in], b = profile[out];
    return static_cast<double>(in) +
           (static_cast<double>(out) - static_cast<double>(in)) * (a - half) / (a - b);
  };
  const double left = lo > 0 ? cross(lo, lo - 1) : 0.0;
  const double right = hi + 1 < profile.size() ? cross(hi, hi + 1)
                                               : static_cast<double>(profile.size() - 1);
  return right - left;
}

}  // namespace ajfuse::oracle
