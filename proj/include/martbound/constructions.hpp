#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "martbound/exact_constants.hpp"
#include "martbound/optimize.hpp"
#include "martbound/util.hpp"

namespace martbound {

// ============================================================================
// Extremal two-point constructions on the real line.
//
// The martingale takes n iid increments d_j = +-u with probability q/2 each
// and 0 otherwise. With t = n q and u = a_2 / sqrt(t) the running budgets
//
//   S_r := (sum_j E_{j-1} |d_j|^r)^{1/r} = t^{1/r} u            (constant)
//
// hit S_2 = a_2 exactly, and t is tuned so the p-budget matches a_p through
// the strictly decreasing profile
//
//   g_n(t)   = t^{-p/2} (1 - (1 - t/n)^n)          (finite n, 0 < t <= n)
//   g_inf(t) = t^{-p/2} (1 - e^{-t})               (n -> infinity)
//
// solved against (a_p/a_2)^p. Everything runs in log space: at the extreme
// corners of the supported range the target overflows double and t itself
// underflows.
// ============================================================================

inline double log_scale_ratio_finite(double p, std::int64_t n, double t) {
  require(p > 2.0, "scale_ratio: p must be > 2");
  require(n >= 1, "scale_ratio: n must be >= 1");
  require(t > 0.0 && t <= double(n), "scale_ratio: need 0 < t <= n");
  // 1 - (1 - t/n)^n, evaluated as -expm1(n log1p(-t/n)) so that tiny t
  // cancels correctly and t = n degenerates to exactly 1.
  const double inner = double(n) * std::log1p(-t / double(n));
  return -(p / 2.0) * std::log(t) + std::log(-std::expm1(inner));
}

inline double log_scale_ratio_limit(double p, double t) {
  require(p > 2.0, "scale_ratio: p must be > 2");
  require(t > 0.0, "scale_ratio: t must be > 0");
  return -(p / 2.0) * std::log(t) + std::log(-std::expm1(-t));
}

inline double scale_ratio_finite(double p, std::int64_t n, double t) {
  return std::exp(log_scale_ratio_finite(p, n, t));
}

inline double scale_ratio_limit(double p, double t) {
  return std::exp(log_scale_ratio_limit(p, t));
}

// Jump intensity t solving g_n(t) = (a_p/a_2)^p. Infeasible when
// a_p <= a_2 / sqrt(n): even the full Rademacher walk (q = 1) has a larger
// p-budget than requested.
inline double solve_t(double p, std::int64_t n, double a_p, double a_2) {
  require(a_p > 0.0 && a_2 > 0.0, "solve_t: scales must be > 0");
  const double log_target = p * (std::log(a_p) - std::log(a_2));
  const double x_hi = std::log(double(n));
  const double f_hi = log_scale_ratio_finite(p, n, double(n)) - log_target;
  if (f_hi > 0.0) {
    if (f_hi < 1e-12 * std::max(1.0, std::fabs(log_target)))
      return double(n);
    throw std::domain_error(
        "solve_t: a_p/a_2 below 1/sqrt(n); no admissible jump intensity");
  }
  auto f = [&](double x) {
    // exp(log n) can land a hair above n; clamp to stay in domain.
    const double t = std::min(std::exp(x), double(n));
    return log_scale_ratio_finite(p, n, t) - log_target;
  };
  double x_lo = x_hi - 1.0;
  for (int guard = 0; f(x_lo) < 0.0; ++guard) {
    require(guard < 20000, "solve_t: bracket expansion failed");
    x_lo -= 8.0;
  }
  return std::exp(bisect_root(f, x_lo, x_hi, 1e-13));
}

// Same equation against the n -> infinity profile; always solvable.
inline double solve_t_limit(double p, double a_p, double a_2) {
  require(a_p > 0.0 && a_2 > 0.0, "solve_t_limit: scales must be > 0");
  const double log_target = p * (std::log(a_p) - std::log(a_2));
  auto f = [&](double x) {
    return log_scale_ratio_limit(p, std::exp(x)) - log_target;
  };
  double x_lo = 0.0, x_hi = 0.0;
  for (int guard = 0; f(x_lo) < 0.0; ++guard) {
    require(guard < 20000, "solve_t_limit: bracket expansion failed");
    x_lo -= 8.0;
  }
  for (int guard = 0; f(x_hi) > 0.0; ++guard) {
    require(guard < 20000, "solve_t_limit: bracket expansion failed");
    x_hi += 8.0;
  }
  return std::exp(bisect_root(f, x_lo, x_hi, 1e-13));
}

struct ExtremalConstruction {
  double p = 0.0;
  std::int64_t n = 0;
  double a_p = 0.0;
  double a_2 = 0.0;
  double t = 0.0;  // expected jump count, t = n q
  double q = 0.0;  // per-step jump probability
  double u = 0.0;  // jump magnitude, u = a_2 / sqrt(t)

  // (sum_j E_{j-1} |d_j|^r)^{1/r} = t^{1/r} u, a constant random variable.
  double budget_norm(double r) const {
    require(r > 0.0, "budget_norm: r must be > 0");
    return std::exp(std::log(t) / r + std::log(u));
  }
};

struct LimitConstruction {
  double p = 0.0;
  double a_p = 0.0;
  double a_2 = 0.0;
  double t = 0.0;
  double u = 0.0;

  double budget_norm(double r) const {
    require(r > 0.0, "budget_norm: r must be > 0");
    return std::exp(std::log(t) / r + std::log(u));
  }
};

inline ExtremalConstruction build_extremal(double p, std::int64_t n,
                                           double a_p, double a_2) {
  ExtremalConstruction c;
  c.p = p;
  c.n = n;
  c.a_p = a_p;
  c.a_2 = a_2;
  c.t = solve_t(p, n, a_p, a_2);
  c.q = c.t / double(n);
  c.u = std::exp(std::log(a_2) - 0.5 * std::log(c.t));

  // Internal consistency: these identities are exact properties of the
  // construction, so any violation is a bug in the solver above.
  const double log_target = p * (std::log(a_p) - std::log(a_2));
  const double log_g = log_scale_ratio_finite(p, n, c.t);
  if (std::fabs(log_g - log_target) >
      1e-9 * std::max(1.0, std::fabs(log_target)))
    throw std::logic_error("build_extremal: profile equation not satisfied");
  if (rel_diff(c.budget_norm(2.0), a_2) > 1e-12)
    throw std::logic_error("build_extremal: variance budget mismatch");
  // Interpolation between the p- and 2-budgets: for every even order
  // 2m <= p,  S_2m^{2m} = (S_p^p)^{(2m-2)/(p-2)} (S_2^2)^{(p-2m)/(p-2)}.
  const double log_t = std::log(c.t), log_u = std::log(c.u);
  for (int m = 1; 2 * m <= static_cast<int>(p) && m <= 8; ++m) {
    const double lhs = log_t + 2.0 * m * log_u;
    const double rhs = (2.0 * m - 2.0) / (p - 2.0) * (log_t + p * log_u) +
                       (p - 2.0 * m) / (p - 2.0) * (log_t + 2.0 * log_u);
    if (std::fabs(lhs - rhs) > 1e-9 * std::max(1.0, std::fabs(lhs)))
      throw std::logic_error("build_extremal: budget interpolation broken");
  }
  return c;
}

inline LimitConstruction build_limit(double p, double a_p, double a_2) {
  LimitConstruction c;
  c.p = p;
  c.a_p = a_p;
  c.a_2 = a_2;
  c.t = solve_t_limit(p, a_p, a_2);
  c.u = std::exp(std::log(a_2) - 0.5 * std::log(c.t));
  return c;
}

// ============================================================================
// Exact distribution computations for the finite construction. The endpoint
// is f_n = u (2B - K) with K ~ Bin(n, q) jumps and B ~ Bin(K, 1/2) upward
// ones. All sums run in log space with adaptive truncation: summands are
// followed past their peak until they fall kLogTailCut below the running
// maximum, which leaves the result exact to double precision.
// ============================================================================

namespace detail {

constexpr double kLogTailCut = 80.0;

inline double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

// log E (2B - K)^{2m} for B ~ Bin(K, 1/2), through the partition constants:
// E (2B - K)^{2m} = sum_j C(K, j) j! Gamma(j, m).
inline double log_rademacher_power(std::int64_t K, int m) {
  if (K < 1) return -kInf;
  LogSum acc;
  const int jmax = static_cast<int>(std::min<std::int64_t>(K, m));
  for (int j = 1; j <= jmax; ++j) {
    acc.add(log_choose(double(K), double(j)) + std::lgamma(j + 1.0) +
            log_big(gamma_value(j, m)));
  }
  return acc.log();
}

// log E |2B - K|^r for B ~ Bin(K, 1/2) and real r > 0. The summand
// C(K, (K+s)/2) 2^{-K} s^r peaks near s = sqrt(rK); enumeration stops once
// it decays past the cut.
inline double log_rademacher_abs_power(std::int64_t K, double r) {
  if (K < 1) return -kInf;
  LogSum acc;
  const double log_half_pow = -double(K) * std::log(2.0);
  const double s_peak = std::sqrt(r * double(K));
  double best = -kInf;
  const std::int64_t s0 = (K % 2 == 0) ? 2 : 1;
  for (std::int64_t s = s0; s <= K; s += 2) {
    const double term = log_choose(double(K), (double(K) + s) / 2.0) +
                        log_half_pow + r * std::log(double(s));
    acc.add(term + std::log(2.0));  // +-s contribute equally
    best = std::max(best, term);
    if (double(s) > s_peak + 1.0 && term < best - kLogTailCut) break;
  }
  return acc.log();
}

// log P(K = k) for K ~ Bin(n, q).
inline double log_binom_pmf(std::int64_t n, double q, std::int64_t k) {
  return log_choose(double(n), double(k)) + double(k) * std::log(q) +
         double(n - k) * std::log1p(-q);
}

template <typename InnerLog>
inline double log_jump_count_sum(std::int64_t n, double q, double t,
                                 InnerLog&& inner_log) {
  LogSum acc;
  double best = -kInf;
  for (std::int64_t K = 1; K <= n; ++K) {
    const double inner = inner_log(K);
    if (inner == -kInf) continue;
    const double term = log_binom_pmf(n, q, K) + inner;
    acc.add(term);
    best = std::max(best, term);
    if (double(K) > t + 10.0 * std::sqrt(t + 1.0) + 80.0 &&
        term < best - kLogTailCut)
      break;
  }
  return acc.log();
}

}  // namespace detail

// ||f_n||_{2m}, exact up to floating point.
inline double extremal_even_moment(const ExtremalConstruction& c, int m) {
  require(m >= 1, "extremal_even_moment: m must be >= 1");
  const double log_power = detail::log_jump_count_sum(
      c.n, c.q, c.t,
      [&](std::int64_t K) { return detail::log_rademacher_power(K, m); });
  return std::exp(log_power / (2.0 * m) + std::log(c.u));
}

// ||f_n||_r for real r > 0.
inline double extremal_abs_moment(const ExtremalConstruction& c, double r) {
  require(r > 0.0, "extremal_abs_moment: r must be > 0");
  const double log_power = detail::log_jump_count_sum(
      c.n, c.q, c.t,
      [&](std::int64_t K) { return detail::log_rademacher_abs_power(K, r); });
  return std::exp(log_power / r + std::log(c.u));
}

// P(f_n >= r), exact up to floating point; one-sided.
inline double extremal_upper_tail(const ExtremalConstruction& c, double r) {
  require(r >= 0.0, "extremal_upper_tail: r must be >= 0");
  const std::int64_t s0 = static_cast<std::int64_t>(
      std::ceil(r / c.u - 1e-12));
  if (s0 > c.n) return 0.0;
  LogSum acc;
  if (s0 <= 0) acc.add(double(c.n) * std::log1p(-c.q));  // K = 0 term
  double best = -kInf;
  for (std::int64_t K = std::max<std::int64_t>(1, s0); K <= c.n; ++K) {
    // Inner binomial upper tail P(2B - K >= s0 | K): terms decrease in B
    // beyond the mean, so truncate on decay.
    const std::int64_t B_start = (K + s0) % 2 == 0 ? (K + s0) / 2
                                                   : (K + s0 + 1) / 2;
    LogSum inner;
    double inner_best = -kInf;
    for (std::int64_t B = B_start; B <= K; ++B) {
      const double term = detail::log_choose(double(K), double(B)) -
                          double(K) * std::log(2.0);
      inner.add(term);
      inner_best = std::max(inner_best, term);
      if (double(B) > double(K) / 2.0 + 1.0 &&
          term < inner_best - detail::kLogTailCut)
        break;
    }
    if (inner.empty()) continue;
    const double term = detail::log_binom_pmf(c.n, c.q, K) + inner.log();
    acc.add(term);
    best = std::max(best, term);
    if (double(K) > c.t + 10.0 * std::sqrt(c.t + 1.0) + 80.0 &&
        term < best - detail::kLogTailCut)
      break;
  }
  if (acc.empty()) return 0.0;
  return std::exp(acc.log());
}

// ||f||_{2m} for the limiting construction: f = u (N1 - N2) with N1, N2
// independent Poisson(t/2), whose even moments are the partition polynomial.
inline double limit_even_moment(const LimitConstruction& c, int m) {
  return sym_poisson_moment(c.t, c.u, m);
}

}  // namespace martbound
