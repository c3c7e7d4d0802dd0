#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "martbound/moment_bounds.hpp"
#include "martbound/optimize.hpp"
#include "martbound/util.hpp"

namespace martbound {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt big_factorial(int n) {
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline BigInt big_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt b = 1;
  for (int t = 0; t < k; ++t) {
    b *= (n - t);
    b /= (t + 1);
  }
  return b;
}

// Natural log of a positive big integer, exact to double precision even when
// the value itself overflows double.
inline double log_big(const BigInt& v) {
  require(v > 0, "log_big: value must be positive");
  const unsigned bits = boost::multiprecision::msb(v);
  if (bits <= 1000) return std::log(v.convert_to<double>());
  const BigInt shifted = v >> (bits - 52);
  return std::log(shifted.convert_to<double>()) +
         double(bits - 52) * std::log(2.0);
}

// ============================================================================
// Partition moment constants.
//
// Gamma(j, m) counts, with multinomial weights, the ways a set of 2m slots
// splits into j blocks of even sizes >= 2:
//
//   Gamma(j, m) = (2m)! * sum over partitions of m into j parts
//                 prod_k 1 / ( j_k! * ((2 m_k)!)^{j_k} )
//
// where a partition is grouped by its distinct part sizes m_1 > ... > m_r
// with multiplicities j_1, ..., j_r. Every summand is the number of set
// partitions with the given block profile, so Gamma(j, m) is a positive
// integer; arithmetic is exact rational throughout.
// ============================================================================

// One partition, grouped as (part size, multiplicity), sizes decreasing.
using GroupedPartition = std::vector<std::pair<int, int>>;

struct PartitionConstant {
  int j = 0;
  int m = 0;
  BigRat value;
  std::vector<GroupedPartition> partitions;
};

namespace detail {

inline void enumerate_partitions(int remaining, int parts_left, int max_size,
                                 GroupedPartition& current,
                                 std::vector<GroupedPartition>& out) {
  if (parts_left == 0) {
    if (remaining == 0) out.push_back(current);
    return;
  }
  // Each of the parts_left parts is >= 1 and <= max_size.
  for (int size = std::min(max_size, remaining - parts_left + 1); size >= 1;
       --size) {
    const int max_mult = std::min(parts_left, remaining / size);
    for (int mult = 1; mult <= max_mult; ++mult) {
      current.emplace_back(size, mult);
      enumerate_partitions(remaining - size * mult, parts_left - mult,
                           size - 1, current, out);
      current.pop_back();
    }
  }
}

}  // namespace detail

inline PartitionConstant gamma_jm(int j, int m) {
  require(1 <= j && j <= m, "gamma_jm: need 1 <= j <= m");
  PartitionConstant out;
  out.j = j;
  out.m = m;
  GroupedPartition scratch;
  detail::enumerate_partitions(m, j, m, scratch, out.partitions);
  const BigInt two_m_fact = big_factorial(2 * m);
  BigRat total = 0;
  for (const auto& part : out.partitions) {
    BigInt denom = 1;
    for (const auto& [size, mult] : part) {
      denom *= big_factorial(mult);
      BigInt block = big_factorial(2 * size);
      for (int t = 0; t < mult; ++t) denom *= block;
    }
    total += BigRat(two_m_fact, denom);
  }
  out.value = total;
  return out;
}

// Memoized integer value of gamma_jm; the cache covers m <= 64, which is
// ample for every consumer here (enumeration cost explodes past that).
inline BigInt gamma_value(int j, int m) {
  require(1 <= j && j <= m, "gamma_value: need 1 <= j <= m");
  require(m <= 64, "gamma_value: m capped at 64");
  static std::map<std::pair<int, int>, BigInt> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({j, m});
  if (it != cache.end()) return it->second;
  const PartitionConstant pc = gamma_jm(j, m);
  require(boost::multiprecision::denominator(pc.value) == 1,
          "gamma_value: constant is not an integer");
  BigInt v = boost::multiprecision::numerator(pc.value);
  cache.emplace(std::make_pair(j, m), v);
  return v;
}

// Gamma(j, m)^{1/2m} normalized by its growth scale j^{1 - j/(2m)}.
inline double gamma_growth_ratio(int j, int m) {
  const double log_gamma = log_big(gamma_value(j, m));
  const double log_scale = (1.0 - j / (2.0 * m)) * std::log(double(j));
  return std::exp(log_gamma / (2.0 * m) - log_scale);
}

// ============================================================================
// Even-moment bound for sums of independent symmetric vectors, interpolating
// between the increment-sup scale b_2m and the variance scale b_2:
//
//   B(b_2m, b_2; m) = ( sum_{j=1}^{m} Gamma(j,m)
//                       (b_2m^{m-j} b_2^{j-1})^{2m/(m-1)} )^{1/2m},  m >= 2,
//
// with the m = 1 convention B = b_2 (only the variance scale remains).
// ============================================================================
inline double B_2m_sym(double b_2m, double b_2, int m) {
  require(m >= 1, "B_2m_sym: m must be >= 1");
  require(b_2m > 0.0 && b_2 > 0.0, "B_2m_sym: scales must be > 0");
  if (m == 1) return b_2;
  const double log_b2m = std::log(b_2m);
  const double log_b2 = std::log(b_2);
  const double expo = 2.0 * m / (m - 1.0);
  LogSum acc;
  for (int j = 1; j <= m; ++j) {
    acc.add(log_big(gamma_value(j, m)) +
            expo * ((m - j) * log_b2m + (j - 1) * log_b2));
  }
  return std::exp(acc.log() / (2.0 * m));
}

// ============================================================================
// Moments of the symmetrized Poisson variable Z = u (N1 - N2), with N1, N2
// independent Poisson(t/2). Two independent routes:
//
//  * partition form:  E (Z/u)^{2m} = sum_{j=1}^m Gamma(j, m) t^j,
//  * cumulant form:   all even cumulants of Z/u equal t (odd ones vanish);
//    moments follow from the standard moment-from-cumulant recursion.
//
// Both are exposed so tests can pin their agreement.
// ============================================================================

struct SymPoissonMoment {
  double via_partitions = 0.0;  // ||Z||_2m through the partition constants
  double via_cumulants = 0.0;   // ||Z||_2m through the cumulant recursion
};

inline SymPoissonMoment sym_poisson_moment_paths(double t, double u, int m) {
  require(t > 0.0 && u > 0.0, "sym_poisson_moment: t and u must be > 0");
  require(1 <= m && m <= 64, "sym_poisson_moment: m in [1, 64]");
  SymPoissonMoment out;

  LogSum acc;
  const double log_t = std::log(t);
  for (int j = 1; j <= m; ++j) {
    acc.add(log_big(gamma_value(j, m)) + j * log_t);
  }
  out.via_partitions = u * std::exp(acc.log() / (2.0 * m));

  // mu_r = sum_{i even >= 2} C(r-1, i-1) t mu_{r-i}; long double keeps the
  // recursion exact enough for the 1e-10 agreement contract.
  const int order = 2 * m;
  std::vector<long double> mu(order + 1, 0.0L);
  mu[0] = 1.0L;
  std::vector<std::vector<long double>> choose(order + 1);
  for (int n = 0; n <= order; ++n) {
    choose[n].assign(n + 1, 1.0L);
    for (int k = 1; k < n; ++k)
      choose[n][k] = choose[n - 1][k - 1] + choose[n - 1][k];
  }
  for (int r = 1; r <= order; ++r) {
    long double s = 0.0L;
    for (int i = 2; i <= r; i += 2)
      s += choose[r - 1][i - 1] * static_cast<long double>(t) * mu[r - i];
    mu[r] = s;
  }
  out.via_cumulants =
      u * static_cast<double>(std::pow(mu[order], 1.0L / order));
  return out;
}

inline double sym_poisson_moment(double t, double u, int m) {
  return sym_poisson_moment_paths(t, u, m).via_partitions;
}

// ============================================================================
// Exact even moments of the n-step unit Rademacher walk:
//
//   E (e_1 + ... + e_n)^{2m} = sum_{j=1}^{min(m,n)} C(n, j) j! Gamma(j, m).
// ============================================================================

inline BigInt rademacher_moment_power(int n, int m) {
  require(n >= 1 && m >= 1, "rademacher_moment_power: n, m >= 1");
  BigInt total = 0;
  const int jmax = std::min(n, m);
  for (int j = 1; j <= jmax; ++j)
    total += big_binomial(n, j) * big_factorial(j) * gamma_value(j, m);
  return total;
}

inline double rademacher_moment(int n, int m, double u) {
  require(u > 0.0, "rademacher_moment: u must be > 0");
  return u * std::exp(log_big(rademacher_moment_power(n, m)) / (2.0 * m));
}

// ============================================================================
// Optimized constant of the downcrossing argument:
//
//   C_i(p) = inf over beta > 1 + delta, delta > 0 with
//            i beta^p delta^2 / (beta - 1 - delta)^2 < 1 of
//            (beta / delta) / (1 - i beta^p delta^2 / (beta-1-delta)^2)^{1/p}.
//
// Parameterized by (delta, k) with k = (beta - 1 - delta)/delta; evaluated in
// log space (beta^p overflows long before the optimum is reached).
// ============================================================================

struct BurkholderConstant {
  int i = 1;
  double p = 2.0;
  double value = 0.0;
  double beta = 0.0;   // argmin
  double delta = 0.0;  // argmin
};

inline BurkholderConstant burkholder_C(int i, double p) {
  require(i == 1 || i == 2, "burkholder_C: i must be 1 or 2");
  require(p >= 1.0, "burkholder_C: p must be >= 1");
  const double log_i = std::log(double(i));

  auto log_objective = [&](double delta, double k) {
    const double beta = 1.0 + delta * (k + 1.0);
    const double log_w = log_i + p * std::log(beta) - 2.0 * std::log(k);
    if (log_w >= 0.0) return kInf;  // infeasible cell
    const double w = std::exp(log_w);
    return std::log(beta) - std::log(delta) -
           std::log1p(-w) / p;
  };

  double lo_d = 1e-4, hi_d = 1.0, lo_k = 1e-2, hi_k = 1e2;
  double best = kInf, best_d = 1.0 / (4.0 * p), best_k = 3.0;
  {
    const double w0 = log_objective(best_d, best_k);
    if (std::isfinite(w0)) best = w0;  // guaranteed-feasible anchor
  }
  const int grid = 200;
  for (int round = 0; round < 4; ++round) {
    const double ld0 = std::log(lo_d), ld1 = std::log(hi_d);
    const double lk0 = std::log(lo_k), lk1 = std::log(hi_k);
    for (int a = 0; a < grid; ++a) {
      const double delta = std::exp(ld0 + (ld1 - ld0) * a / (grid - 1));
      for (int b = 0; b < grid; ++b) {
        const double k = std::exp(lk0 + (lk1 - lk0) * b / (grid - 1));
        const double v = log_objective(delta, k);
        if (v < best) {
          best = v;
          best_d = delta;
          best_k = k;
        }
      }
    }
    // Zoom on the best cell (two grid steps each way).
    const double step_d = std::exp(2.0 * (ld1 - ld0) / (grid - 1));
    const double step_k = std::exp(2.0 * (lk1 - lk0) / (grid - 1));
    lo_d = best_d / step_d;
    hi_d = best_d * step_d;
    lo_k = best_k / step_k;
    hi_k = best_k * step_k;
  }
  BurkholderConstant out;
  out.i = i;
  out.p = p;
  out.value = std::exp(best);
  out.delta = best_d;
  out.beta = 1.0 + best_d * (best_k + 1.0);
  return out;
}

// ============================================================================
// The 1980-family constant: the best value of
//
//   (c_1 a_p^p + c_2 a_2^p)^{1/p}
//
// over the classical two-coefficient family, instantiated at the explicit
// admissible witness
//
//   u(s) = e^3 y_s^2 / (s q^2),   v(s) = 10^s y_s^{s-2},
//   y_s  = max_alpha (s alpha + 1)^{1-alpha/2} q^alpha,   q = a_2 / a_p,
//   b_i  = q^{-p/(p-2)}  (all i),
//
// with m = floor(p/2) and
//
//   c_i(p)      = v(p-2i) 2^{-i} (p falling 2i) prod_{k<i} u(p-2k),
//   c~_m(p)     = 2^{-m} (p falling 2m) prod_{i<m} u(p-2i),
//   c_1         = sum_{i<m} c_i(p) b_i^{-2i} / i!,
//   c_2         = c~_m(p)/m! + sum_{i<m} c_i(p) b_i^{p-2i-2} / i!.
//
// Admissibility of (u, v) is re-validated numerically on every call; a
// failure would be an implementation bug, not an input error. Everything is
// assembled in log space: the coefficients overflow double well inside the
// supported (p, q) range. The optional refinement re-optimizes each b_i in
// closed form (each appears in exactly two terms).
// ============================================================================

struct B1980Result {
  double value = 0.0;
  int m = 0;
  double log_c1_term = 0.0;  // log(c_1 a_p^p)
  double log_c2_term = 0.0;  // log(c_2 a_2^p)
  bool refined = false;
};

namespace detail {

// max over alpha in [0,1] of (s alpha + 1)^{1-alpha/2} e^{alpha log_q}.
inline double log_y_s(double s, double log_q) {
  auto log_g = [&](double alpha) {
    return (1.0 - alpha / 2.0) * std::log(s * alpha + 1.0) + alpha * log_q;
  };
  auto log_q_s = [&](double alpha) {
    const double c = s * alpha + 1.0;
    return 0.5 * std::log(c) + 0.5 * (s * alpha - 2.0 * s) / c;
  };
  if (log_q <= -s) return 0.0;                       // max at alpha = 0
  if (log_q >= log_q_s(1.0)) return log_g(1.0);      // max at alpha = 1
  const double alpha = bisect_root(
      [&](double a) { return log_q_s(a) - log_q; }, 0.0, 1.0, 1e-14);
  return log_g(alpha);
}

inline double log_falling(double p, int count) {
  double s = 0.0;
  for (int t = 0; t < count; ++t) s += std::log(p - t);
  return s;
}

}  // namespace detail

inline B1980Result b1980(double p, double a_p, double a_2,
                         bool refine = false) {
  require(p > 2.0, "b1980: p must be > 2");
  require(a_p > 0.0 && a_2 > 0.0, "b1980: a_p and a_2 must be > 0");
  const int m = static_cast<int>(std::floor(p / 2.0));
  const double log_q = std::log(a_2) - std::log(a_p);

  // Witness coefficient logs at every exponent s = p, p-2, ..., p-2(m-1).
  std::vector<double> log_u(m), log_v(m), s_of(m);
  for (int idx = 0; idx < m; ++idx) {
    const double s = p - 2.0 * idx;
    const double ly = detail::log_y_s(s, log_q);
    s_of[idx] = s;
    log_u[idx] = 3.0 + 2.0 * ly - std::log(s) - 2.0 * log_q;
    log_v[idx] = s * std::log(10.0) + (s - 2.0) * ly;
    // Admissibility: u, v >= 1 when s > 2 and the conjugate-power condition
    // when s > 3. The witness satisfies these identically; tripping one
    // means the formulas above are wrong.
    const double tol = 1e-9;
    if (s > 2.0) {
      if (log_u[idx] < -tol || log_v[idx] < -tol)
        throw std::logic_error("b1980: witness violates u,v >= 1");
    } else {
      if (!(std::exp(log_u[idx]) + std::exp(log_v[idx]) >= 1.0 - tol))
        throw std::logic_error("b1980: witness violates u+v >= 1 at s=2");
    }
    if (s > 3.0) {
      const double sum = std::exp(log_u[idx] / (3.0 - s)) +
                         std::exp(log_v[idx] / (3.0 - s));
      if (sum > 1.0 + tol)
        throw std::logic_error("b1980: witness violates conjugate condition");
    }
  }

  // log c_i(p) (without the 1/i!).
  std::vector<double> log_ci(m);
  double prefix_u = 0.0;
  for (int i = 0; i < m; ++i) {
    log_ci[i] = log_v[i] - i * std::log(2.0) + detail::log_falling(p, 2 * i) +
                prefix_u;
    prefix_u += log_u[i];
  }
  const double log_ctilde =
      -m * std::log(2.0) + detail::log_falling(p, 2 * m) + prefix_u;

  const double witness_log_b = -p / (p - 2.0) * log_q;
  std::vector<double> log_b(m, witness_log_b);
  const double log_ap_p = p * std::log(a_p);
  const double log_a2_p = p * std::log(a_2);
  if (refine) {
    // b_i appears in exactly two addends; the interior optimum of
    // A (a_p^p b^{-2i} + a_2^p b^{p-2i-2}) is closed-form. Degenerate
    // exponents push b to a clamped extreme, approaching the open infimum.
    for (int i = 0; i < m; ++i) {
      const double lead = p - 2.0 * i - 2.0;
      if (i == 0) {
        log_b[i] = witness_log_b + (lead > 0.0 ? -60.0 : 0.0);
      } else if (lead <= 0.0) {
        log_b[i] = witness_log_b + 60.0;
      } else {
        log_b[i] =
            (std::log(2.0 * i) - std::log(lead) + log_ap_p - log_a2_p) /
            (p - 2.0);
      }
    }
  }

  double log_fact = 0.0;  // log(i!)
  LogSum c1_terms, c2_terms;
  for (int i = 0; i < m; ++i) {
    if (i > 0) log_fact += std::log(double(i));
    c1_terms.add(log_ci[i] - log_fact - 2.0 * i * log_b[i] + log_ap_p);
    c2_terms.add(log_ci[i] - log_fact + (p - 2.0 * i - 2.0) * log_b[i] +
                 log_a2_p);
  }
  double log_m_fact = 0.0;
  for (int k = 2; k <= m; ++k) log_m_fact += std::log(double(k));
  c2_terms.add(log_ctilde - log_m_fact + log_a2_p);

  LogSum total;
  total.add(c1_terms.log());
  total.add(c2_terms.log());

  B1980Result out;
  out.m = m;
  out.log_c1_term = c1_terms.log();
  out.log_c2_term = c2_terms.log();
  out.refined = refine;
  out.value = std::exp(total.log() / p);
  return out;
}

}  // namespace martbound
