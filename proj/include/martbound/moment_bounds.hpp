#pragma once

#include <cmath>
#include <utility>

#include "martbound/optimize.hpp"
#include "martbound/util.hpp"

namespace martbound {

// ============================================================================
// Moment-norm bounds for ||f*||_p driven by the two inputs
//   a_p : the increment-sup norm  ||d*||_p   (times the geometry constant
//         where a construction calls for it), and
//   a_2 : the conditional-variance norm D ||s_2||_p.
//
// Three interchangeable envelopes of the optimal bound are provided:
//   hat   : min over c in [1,p] of the two-term spectrum  c a_p + sqrt(c)
//           e^{p/c} a_2  (upper envelope of the spectrum family),
//   check : max over alpha in [0,1] of (p alpha + 1)^{1-alpha/2} a_p^{1-alpha}
//           a_2^alpha  (closed-form lower envelope),
//   star  : a_p + sqrt(p) a_2 + p a_p / ln(2 + (a_p/a_2) sqrt(p))
//           (single-formula envelope).
// All three agree up to absolute constants; the scan subcommand measures the
// constants empirically.
// ============================================================================

struct BoundQuery {
  double p = 4.0;   // moment order, > 2
  double a_p = 1.0;
  double a_2 = 1.0;

  void validate() const {
    require(p > 2.0, "BoundQuery: p must be > 2");
    require(a_p >= 0.0 && a_2 >= 0.0 && (a_p > 0.0 || a_2 > 0.0),
            "BoundQuery: a_p, a_2 must be nonnegative, not both zero");
  }
};

// One point of the spectrum family: c a_p + sqrt(c) e^{p/c} a_2, c in [1, p].
inline double spectrum_term(const BoundQuery& q, double c) {
  q.validate();
  require(c >= 1.0 && c <= q.p, "spectrum_term: c must lie in [1, p]");
  return c * q.a_p + std::sqrt(c) * std::exp(q.p / c) * q.a_2;
}

struct HatEnvelope {
  double value = 0.0;
  double c = 1.0;  // argmin over [1, p]
};

// Minimum of the spectrum family over c. The objective is smooth but not
// convex in general, so scan a logarithmic grid first and polish the best
// bracket with golden section.
inline HatEnvelope hat_B(const BoundQuery& q) {
  q.validate();
  const int grid = 2048;
  const double logp = std::log(q.p);
  auto at = [&](int i) {
    // exp(log p) may overshoot p by an ulp; keep the grid inside [1, p].
    return std::min(std::exp(logp * i / (grid - 1)), q.p);
  };
  int best = 0;
  double best_val = kInf;
  for (int i = 0; i < grid; ++i) {
    const double v = spectrum_term(q, at(i));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = at(std::max(0, best - 1));
  const double hi = at(std::min(grid - 1, best + 1));
  const MinResult m = golden_section_min(
      [&](double c) { return spectrum_term(q, c); }, lo, hi, 1e-13);
  return {m.value, m.x};
}

// (p alpha + 1)^{1 - alpha/2} q^alpha with q = a_2 / a_p.
inline double g_p(double p, double alpha, double q) {
  return std::pow(p * alpha + 1.0, 1.0 - alpha / 2.0) * std::pow(q, alpha);
}

// Stationarity threshold of g_p: increasing in alpha, maps [0,1] onto
// [exp(-p), sqrt(p+1) exp(-p/(2(p+1)))].
inline double q_p(double p, double alpha) {
  const double c = p * alpha + 1.0;
  return std::sqrt(c) * std::exp(0.5 * (p * alpha - 2.0 * p) / c);
}

inline double q_p_lower(double p) { return std::exp(-p); }
inline double q_p_upper(double p) {
  return std::sqrt(p + 1.0) * std::exp(-0.5 * p / (p + 1.0));
}

struct CheckEnvelope {
  double value = 0.0;
  double alpha = 0.0;  // argmax over [0, 1]
};

// Maximum of a_p g_p(alpha, a_2/a_p) over alpha in [0,1]. The maximizer is
// pinned by q_p(alpha) = q when q falls inside the image interval, and sits
// at the matching endpoint otherwise. Comparisons run on log q so extreme
// ratios cannot underflow.
inline CheckEnvelope check_B(const BoundQuery& query) {
  query.validate();
  require(query.a_p > 0.0 && query.a_2 > 0.0,
          "check_B: a_p and a_2 must be > 0");
  const double p = query.p;
  const double log_q = std::log(query.a_2) - std::log(query.a_p);
  auto log_q_p = [&](double alpha) {
    const double c = p * alpha + 1.0;
    return 0.5 * std::log(c) + 0.5 * (p * alpha - 2.0 * p) / c;
  };
  if (log_q <= -p) return {query.a_p, 0.0};
  if (log_q >= log_q_p(1.0)) {
    return {query.a_p * g_p(p, 1.0, query.a_2 / query.a_p), 1.0};
  }
  const double alpha = bisect_root(
      [&](double a) { return log_q_p(a) - log_q; }, 0.0, 1.0, 1e-14);
  // Evaluate in logs: q^alpha can underflow for log_q near -p.
  const double log_val =
      std::log(query.a_p) +
      (1.0 - alpha / 2.0) * std::log(p * alpha + 1.0) + alpha * log_q;
  return {std::exp(log_val), alpha};
}

// a_p + sqrt(p) a_2 + p a_p / ln(2 + (a_p/a_2) sqrt(p)).
inline double star_B(const BoundQuery& q) {
  q.validate();
  require(q.a_2 > 0.0, "star_B: a_2 must be > 0");
  return q.a_p + std::sqrt(q.p) * q.a_2 +
         q.p * q.a_p / std::log(2.0 + (q.a_p / q.a_2) * std::sqrt(q.p));
}

// Root of sqrt(c) = e^{p/c}, i.e. c ln c = 2 p. Balances the two spectrum
// factors; grows like 2p / ln p.
inline double c_p_solve(double p) {
  require(p > 0.0, "c_p_solve: p must be > 0");
  const double hi = std::max(4.0, 2.0 * p + 2.0);
  return bisect_root(
      [&](double c) { return c * std::log(c) - 2.0 * p; }, 1.0, hi, 1e-14);
}

// Root z in [1, p] of sqrt(z) e^{p/z} = e^{p/alpha}, the spectrum level set
// matching exponent alpha. Defined for alpha in [1, p / ln(e p)]; the root
// always satisfies z < 2 alpha.
inline double z_alpha_solve(double p, double alpha) {
  require(p > 1.0, "z_alpha_solve: p must be > 1");
  require(alpha >= 1.0 && alpha <= p / std::log(std::exp(1.0) * p),
          "z_alpha_solve: alpha out of [1, p/ln(e p)]");
  auto log_g = [&](double z) { return 0.5 * std::log(z) + p / z; };
  const double target = p / alpha;
  if (log_g(1.0) <= target) return 1.0;
  return bisect_root([&](double z) { return log_g(z) - target; }, 1.0, p,
                     1e-14);
}

// sqrt(min(p, n)) n^{(p-2)/(2p)} a_p, where a_p carries the geometry factor.
inline double chung_bound(double p, double n, double a_p) {
  require(p >= 2.0 && n >= 1.0 && a_p >= 0.0, "chung_bound: bad parameters");
  return std::sqrt(std::min(p, n)) *
         std::pow(n, (p - 2.0) / (2.0 * p)) * a_p;
}

// sqrt(p) D s2_norm for conditionally symmetric martingales, p >= 1.
inline double cond_symmetric_moment_bound(double p, double D,
                                          double s2_norm) {
  require(p >= 1.0 && D > 0.0 && s2_norm >= 0.0,
          "cond_symmetric_moment_bound: bad parameters");
  return std::sqrt(p) * D * s2_norm;
}

// Explicit absolute constant carried by the maximal-function proof.
inline double with_proof_constant(double envelope_value) {
  return 60.0 * envelope_value;
}

// Spectrum point for sums of independent vectors (D = 1). The optional flag
// doubles a_p, covering reductions that pay a factor 2 on the increment sup
// when symmetrizing.
inline double independent_sum_bound(double p, double a_p, double a_2,
                                    double c, bool doubled_d_star = false) {
  BoundQuery q{p, doubled_d_star ? 2.0 * a_p : a_p, a_2};
  return spectrum_term(q, c);
}

// Ratio a_2/a_p at which the spectrum term at c collapses to 2 c a_p; used
// by the minimality scan.
inline double minimality_ratio_q(double p, double c) {
  require(c >= 1.0 && c <= p, "minimality_ratio_q: c must lie in [1, p]");
  return std::sqrt(c) * std::exp(-p / c);
}

}  // namespace martbound
