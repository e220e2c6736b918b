#pragma once

// Summary statistics, log-log regression, two-sample KS and the bootstrap
// decile-dominance verdict.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "episim/error.hpp"
#include "episim/rng.hpp"

namespace episim {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidParameter("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sample standard deviation (n - 1 denominator); 0 for a single point.
inline double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Linear-interpolation quantile of an ascending sample (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidParameter("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

using Deciles = std::array<double, 9>;  // 10%, 20%, ..., 90%

inline Deciles deciles_sorted(std::span<const double> sorted) {
  Deciles d{};
  for (std::size_t i = 0; i < 9; ++i) d[i] = quantile_sorted(sorted, static_cast<double>(i + 1) / 10.0);
  return d;
}

inline Deciles deciles(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return deciles_sorted(xs);
}

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci_low = 0.0;  // 95% two-sided, Student t on the residuals
  double ci_high = 0.0;
};

struct ScalingPoint {
  double n;
  double y;
};

// Ordinary least squares of ln y on ln n.
inline ExponentFit exponent_fit(std::span<const ScalingPoint> points) {
  if (points.size() < 3) throw InvalidParameter("exponent_fit needs at least 3 points");
  const auto m = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& p : points) {
    if (!(p.y > 0.0) || !(p.n > 0.0)) throw InvalidParameter("exponent_fit needs positive n and y");
    sx += std::log(p.n);
    sy += std::log(p.y);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double dx = std::log(p.n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.y) - my);
  }
  if (sxx <= 0.0) throw InvalidParameter("exponent_fit needs at least two distinct n");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (const auto& p : points) {
    const double r = std::log(p.y) - (fit.intercept + fit.slope * std::log(p.n));
    rss += r * r;
  }
  const double dof = m - 2.0;
  fit.slope_stderr = std::sqrt(rss / dof / sxx);
  const double tq = boost::math::quantile(boost::math::students_t(dof), 0.975);
  fit.ci_low = fit.slope - tq * fit.slope_stderr;
  fit.ci_high = fit.slope + tq * fit.slope_stderr;
  return fit;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2}.
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Two-sample Kolmogorov-Smirnov test with the Stephens small-sample
// correction lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidParameter("ks needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

struct DecileComparison {
  double q;           // 0.1 ... 0.9
  double quantile_a;  // lower-candidate sample
  double quantile_b;
  double difference;  // quantile_b - quantile_a
  double upper_bound; // one-sided bootstrap upper confidence bound of difference
};

struct DominanceVerdict {
  bool consistent = true;
  std::vector<double> violating_deciles;
  std::vector<DecileComparison> deciles;

  std::string label() const {
    if (consistent) return "consistent-with-dominance";
    std::string s = "violation-at-deciles[";
    for (std::size_t i = 0; i < violating_deciles.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(static_cast<int>(std::lround(violating_deciles[i] * 100))) + "%";
    }
    return s + "]";
  }
};

struct BootstrapOptions {
  std::size_t resamples = 2000;
  double confidence = 0.95;
  std::uint64_t seed = 0;
};

// Tests a <=_st b decile by decile.  A decile is a violation when even the
// one-sided upper confidence bound of Q_b - Q_a (percentile bootstrap) is
// negative; ties are consistent.
inline DominanceVerdict dominance_report(std::span<const double> a, std::span<const double> b,
                                         const BootstrapOptions& opt = {}) {
  if (a.size() < 100 || b.size() < 100) throw InvalidParameter("dominance_report needs at least 100 points per sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const Deciles qa = deciles_sorted(sa), qb = deciles_sorted(sb);

  Rng rng(opt.seed, 0, Domain::bootstrap);
  std::vector<std::array<double, 9>> diffs(opt.resamples);
  std::vector<double> ra(sa.size()), rb(sb.size());
  for (std::size_t r = 0; r < opt.resamples; ++r) {
    for (auto& x : ra) x = sa[rng.below(sa.size())];
    for (auto& x : rb) x = sb[rng.below(sb.size())];
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    const Deciles da = deciles_sorted(ra), db = deciles_sorted(rb);
    for (std::size_t k = 0; k < 9; ++k) diffs[r][k] = db[k] - da[k];
  }
  DominanceVerdict v;
  std::vector<double> col(opt.resamples);
  for (std::size_t k = 0; k < 9; ++k) {
    for (std::size_t r = 0; r < opt.resamples; ++r) col[r] = diffs[r][k];
    std::sort(col.begin(), col.end());
    const double upper = quantile_sorted(col, opt.confidence);
    const double q = static_cast<double>(k + 1) / 10.0;
    v.deciles.push_back({q, qa[k], qb[k], qb[k] - qa[k], upper});
    if (upper < 0.0) {
      v.consistent = false;
      v.violating_deciles.push_back(q);
    }
  }
  return v;
}

}  // namespace episim
