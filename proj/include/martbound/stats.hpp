#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "martbound/rng.hpp"
#include "martbound/util.hpp"

namespace martbound {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Exact (conservative) two-sided binomial confidence interval from the beta
// quantiles; never undercovers, which is what comparing against hard bounds
// needs.
inline Interval binomial_ci(std::int64_t successes, std::int64_t trials,
                            double confidence = 0.99) {
  require(trials >= 1, "binomial_ci: trials must be >= 1");
  require(0 <= successes && successes <= trials,
          "binomial_ci: successes out of range");
  require(0.0 < confidence && confidence < 1.0,
          "binomial_ci: confidence in (0,1)");
  const double alpha = 1.0 - confidence;
  Interval ci;
  if (successes == 0) {
    ci.lo = 0.0;
  } else {
    boost::math::beta_distribution<double> lo_dist(
        double(successes), double(trials - successes + 1));
    ci.lo = boost::math::quantile(lo_dist, alpha / 2.0);
  }
  if (successes == trials) {
    ci.hi = 1.0;
  } else {
    boost::math::beta_distribution<double> hi_dist(
        double(successes + 1), double(trials - successes));
    ci.hi = boost::math::quantile(hi_dist, 1.0 - alpha / 2.0);
  }
  return ci;
}

// (mean |x|^p)^{1/p}, scaled by the sample max so large p cannot overflow.
inline double p_norm_estimate(std::span<const double> xs, double p) {
  require(!xs.empty(), "p_norm_estimate: empty sample");
  require(p > 0.0, "p_norm_estimate: p must be > 0");
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double x : xs) s += std::pow(std::abs(x) / m, p);
  return m * std::pow(s / double(xs.size()), 1.0 / p);
}

// Percentile bootstrap over index resamples; deterministic in (seed, stream).
template <typename Stat>
inline Interval bootstrap_ci(std::span<const double> xs, Stat&& stat,
                             int resamples, std::uint64_t seed,
                             std::uint64_t stream, double confidence = 0.99) {
  require(!xs.empty(), "bootstrap_ci: empty sample");
  require(resamples >= 2, "bootstrap_ci: need at least 2 resamples");
  RngStream rng(seed, stream);
  const std::size_t n = xs.size();
  std::vector<double> resample(n), values(resamples);
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i)
      resample[i] = xs[static_cast<std::size_t>(rng.uniform() * double(n))];
    values[r] = stat(std::span<const double>(resample));
  }
  std::sort(values.begin(), values.end());
  const double alpha = 1.0 - confidence;
  const auto pick = [&](double quantile) {
    const double pos = quantile * double(resamples - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const std::size_t k = std::min<std::size_t>(i + 1, resamples - 1);
    const double frac = pos - double(i);
    return values[i] * (1.0 - frac) + values[k] * frac;
  };
  return {pick(alpha / 2.0), pick(1.0 - alpha / 2.0)};
}

}  // namespace martbound
