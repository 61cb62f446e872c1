// Copyright 2026 The admitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADMITSIM_GAMMA_H_
#define ADMITSIM_GAMMA_H_

// Gamma-family primitives over the log-converted score
//
//   Q = -ln((S - S_min) / (S_max - S_min)),
//
// which maps raw scores in (S_min, S_max] onto [0, inf). Small Q is a
// competitive raw score, so "admitted" always means Q <= threshold.

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace admitsim {

/// Shape/scale pair of a region's log-score distribution.
class GammaParams {
 public:
  GammaParams(double shape, double scale);

  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }
  double mean() const noexcept { return shape_ * scale_; }

  /// Same shape, scale multiplied by `factor` (the plus-factor scale).
  GammaParams rescaled(double factor) const;

  friend bool operator==(const GammaParams&, const GammaParams&) = default;

 private:
  double shape_;
  double scale_;
};

/// A non-negative log-converted score. +inf is admitted as "no bar".
class LogScore {
 public:
  explicit LogScore(double q);

  static LogScore zero() noexcept { return LogScore(Unchecked{}, 0.0); }
  static LogScore infinity() noexcept;

  double value() const noexcept { return q_; }

  friend auto operator<=>(const LogScore&, const LogScore&) = default;

 private:
  struct Unchecked {};
  LogScore(Unchecked, double q) noexcept : q_(q) {}
  double q_;
};

class ScoreScale {
 public:
  ScoreScale(double s_min, double s_max);

  double s_min() const noexcept { return s_min_; }
  double s_max() const noexcept { return s_max_; }

  friend bool operator==(const ScoreScale&, const ScoreScale&) = default;

 private:
  double s_min_;
  double s_max_;
};

/// Raw score in (s_min, s_max] to log score. s == s_min or out of range
/// raises a domain error.
LogScore to_log_score(double raw_score, const ScoreScale& scale);
double from_log_score(LogScore q, const ScoreScale& scale);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
///
/// Power series for x < a + 1, Lentz continued fraction for the upper
/// function otherwise. Relative accuracy is around 1e-14 for a <= 100.
double regularized_lower_gamma(double a, double x);

/// Complement Q(a, x) = 1 - P(a, x), computed without cancellation.
double regularized_upper_gamma(double a, double x);

double gamma_pdf(const GammaParams& p, LogScore q);
double gamma_cdf(const GammaParams& p, LogScore q);

/// Inverse CDF. prob must lie strictly inside (0, 1).
LogScore gamma_quantile(const GammaParams& p, double prob);

/// `n` log-spaced points on [lo, hi], both ends included. n >= 2, 0 < lo < hi.
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t n);

/// True iff F_rich(q) >= F_poor(q) at every grid point. The grid must be
/// non-empty, strictly increasing and positive.
bool cdf_dominates(const GammaParams& rich, const GammaParams& poor,
                   std::span<const double> grid);

/// Asymptotic form of the dominance condition: F_rich >= F_poor for all
/// q >= 0 holds iff k_rich <= k_poor and theta_rich <= theta_poor. The
/// small-q behaviour pins the shapes, the tail pins the scales.
bool cdf_dominates_asymptotically(const GammaParams& rich,
                                  const GammaParams& poor);

/// Default upper end of the ratio grid: 20 * max(k * theta).
double default_ratio_q_max(const GammaParams& rich, const GammaParams& poor);

inline constexpr std::size_t kDefaultRatioGridSize = 4096;

/// sup_q F_rich(q) / F_poor(q), combining a log-spaced grid on
/// [1e-8 * mean(theta_rich, theta_poor), q_max] with the analytic q -> 0
/// limit: (theta_poor / theta_rich)^k for equal shapes, +inf when
/// k_rich < k_poor, 0 when k_rich > k_poor.
double cdf_ratio_sup(const GammaParams& rich, const GammaParams& poor,
                     double q_max, std::size_t grid_size);
double cdf_ratio_sup(const GammaParams& rich, const GammaParams& poor);

}  // namespace admitsim

#endif  // ADMITSIM_GAMMA_H_
