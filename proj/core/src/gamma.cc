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

#include "admitsim/gamma.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "admitsim/errors.h"

namespace admitsim {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxSeriesTerms = 100000;

// glibc's lgamma writes the global signgam; the reentrant variant does not.
double log_gamma(double a) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(a, &sign);
#else
  return std::lgamma(a);
#endif
}

// x^a e^-x / Gamma(a)
double gamma_prefix(double a, double x) {
  return std::exp(a * std::log(x) - x - log_gamma(a));
}

double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxSeriesTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps * 0.25) break;
  }
  return sum * gamma_prefix(a, x);
}

double upper_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxSeriesTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps * 0.25) break;
  }
  return gamma_prefix(a, x) * h;
}

void check_incomplete_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    raise(ErrorKind::kDomain, "incomplete gamma: shape must be positive and finite");
  }
  if (!(x >= 0.0)) {
    raise(ErrorKind::kDomain, "incomplete gamma: argument must be >= 0");
  }
}

}  // namespace

GammaParams::GammaParams(double shape, double scale) : shape_(shape), scale_(scale) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    std::ostringstream msg;
    msg << "gamma shape must be positive and finite, got " << shape;
    raise(ErrorKind::kDomain, msg.str());
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    std::ostringstream msg;
    msg << "gamma scale must be positive and finite, got " << scale;
    raise(ErrorKind::kDomain, msg.str());
  }
}

GammaParams GammaParams::rescaled(double factor) const {
  return GammaParams(shape_, scale_ * factor);
}

LogScore::LogScore(double q) : q_(q) {
  if (!(q >= 0.0)) {
    std::ostringstream msg;
    msg << "log score must be >= 0, got " << q;
    raise(ErrorKind::kDomain, msg.str());
  }
}

LogScore LogScore::infinity() noexcept {
  return LogScore(Unchecked{}, std::numeric_limits<double>::infinity());
}

ScoreScale::ScoreScale(double s_min, double s_max) : s_min_(s_min), s_max_(s_max) {
  if (!std::isfinite(s_min) || !std::isfinite(s_max) || !(s_min < s_max)) {
    std::ostringstream msg;
    msg << "score scale requires finite s_min < s_max, got (" << s_min << ", "
        << s_max << ")";
    raise(ErrorKind::kDomain, msg.str());
  }
}

LogScore to_log_score(double raw_score, const ScoreScale& scale) {
  if (!(raw_score > scale.s_min()) || !(raw_score <= scale.s_max())) {
    std::ostringstream msg;
    msg << "raw score " << raw_score << " outside (" << scale.s_min() << ", "
        << scale.s_max() << "]";
    raise(ErrorKind::kDomain, msg.str());
  }
  const double rel = (raw_score - scale.s_min()) / (scale.s_max() - scale.s_min());
  // -log(1) is -0.0; normalise.
  return LogScore(rel >= 1.0 ? 0.0 : -std::log(rel));
}

double from_log_score(LogScore q, const ScoreScale& scale) {
  return scale.s_min() + (scale.s_max() - scale.s_min()) * std::exp(-q.value());
}

double regularized_lower_gamma(double a, double x) {
  check_incomplete_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::min(1.0, lower_series(a, x));
  return 1.0 - upper_continued_fraction(a, x);
}

double regularized_upper_gamma(double a, double x) {
  check_incomplete_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - std::min(1.0, lower_series(a, x));
  return upper_continued_fraction(a, x);
}

double gamma_pdf(const GammaParams& p, LogScore q) {
  const double k = p.shape();
  const double theta = p.scale();
  const double x = q.value();
  if (std::isinf(x)) return 0.0;
  if (x == 0.0) {
    if (k < 1.0) return std::numeric_limits<double>::infinity();
    if (k == 1.0) return 1.0 / theta;
    return 0.0;
  }
  return std::exp((k - 1.0) * std::log(x) - x / theta - log_gamma(k) -
                  k * std::log(theta));
}

double gamma_cdf(const GammaParams& p, LogScore q) {
  return regularized_lower_gamma(p.shape(), q.value() / p.scale());
}

LogScore gamma_quantile(const GammaParams& p, double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    std::ostringstream msg;
    msg << "quantile probability must lie in (0, 1), got " << prob;
    raise(ErrorKind::kDomain, msg.str());
  }
  const double k = p.shape();
  const double theta = p.scale();
  auto cdf = [&](double x) { return regularized_lower_gamma(k, x / theta); };

  // Bracket [lo, hi] with cdf(lo) < prob <= cdf(hi), doubling from the mean.
  double lo = 0.0;
  double hi = p.mean();
  while (cdf(hi) < prob) {
    lo = hi;
    hi *= 2.0;
  }

  // Small-q asymptote F ~ (q/theta)^k / Gamma(k + 1) is a good start in the
  // lower tail; otherwise start mid-bracket.
  double x = theta * std::exp((std::log(prob) + log_gamma(k + 1.0)) / k);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

  for (int iter = 0; iter < 2000; ++iter) {
    const double f = cdf(x) - prob;
    if (f == 0.0) return LogScore(x);
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dens = gamma_pdf(p, LogScore(x));
    double next = (dens > 0.0 && std::isfinite(dens)) ? x - f / dens : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * kEps * x || hi - lo <= 4.0 * kEps * hi) {
      return LogScore(next);
    }
    x = next;
  }
  return LogScore(x);
}

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    raise(ErrorKind::kArgument, "log_spaced_grid requires n >= 2 and 0 < lo < hi");
  }
  std::vector<double> grid(n);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::exp(log_lo + step * static_cast<double>(i));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

bool cdf_dominates(const GammaParams& rich, const GammaParams& poor,
                   std::span<const double> grid) {
  if (grid.empty()) raise(ErrorKind::kArgument, "cdf_dominates: empty grid");
  double prev = 0.0;
  for (double q : grid) {
    if (!(q > prev)) {
      raise(ErrorKind::kArgument,
            "cdf_dominates: grid must be positive and strictly increasing");
    }
    prev = q;
  }
  for (double q : grid) {
    if (gamma_cdf(rich, LogScore(q)) < gamma_cdf(poor, LogScore(q))) return false;
  }
  return true;
}

bool cdf_dominates_asymptotically(const GammaParams& rich, const GammaParams& poor) {
  return rich.shape() <= poor.shape() && rich.scale() <= poor.scale();
}

double default_ratio_q_max(const GammaParams& rich, const GammaParams& poor) {
  return 20.0 * std::max(rich.mean(), poor.mean());
}

double cdf_ratio_sup(const GammaParams& rich, const GammaParams& poor,
                     double q_max, std::size_t grid_size) {
  if (!(q_max > 0.0) || !std::isfinite(q_max)) {
    raise(ErrorKind::kArgument, "cdf_ratio_sup: q_max must be positive and finite");
  }
  if (grid_size < 2) raise(ErrorKind::kArgument, "cdf_ratio_sup: grid_size must be >= 2");

  double limit;
  if (rich.shape() == poor.shape()) {
    limit = std::pow(poor.scale() / rich.scale(), rich.shape());
  } else if (rich.shape() < poor.shape()) {
    return std::numeric_limits<double>::infinity();
  } else {
    limit = 0.0;
  }

  double q_lo = 1e-8 * 0.5 * (rich.scale() + poor.scale());
  if (q_lo >= q_max) q_lo = 1e-8 * q_max;
  double sup = limit;
  for (double q : log_spaced_grid(q_lo, q_max, grid_size)) {
    const double f_rich = gamma_cdf(rich, LogScore(q));
    const double f_poor = gamma_cdf(poor, LogScore(q));
    if (f_poor == 0.0) {
      if (f_rich > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    sup = std::max(sup, f_rich / f_poor);
  }
  return sup;
}

double cdf_ratio_sup(const GammaParams& rich, const GammaParams& poor) {
  return cdf_ratio_sup(rich, poor, default_ratio_q_max(rich, poor),
                       kDefaultRatioGridSize);
}

}  // namespace admitsim
