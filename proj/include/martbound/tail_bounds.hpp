#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>

#include "martbound/optimize.hpp"
#include "martbound/util.hpp"

namespace martbound {

// ============================================================================
// Closed-form exponential tail bounds for Pr(sup_j ||f_j|| >= r).
//
// Every bound comes in a two-sided flavor (leading constant 2, geometry
// folded into its parameters) and a one-sided flavor for real-valued
// (super)martingales (leading constant 1, no geometry factor). The flag
// `two_sided` switches the constant; parameter preparation is the caller's
// job and is identical in both cases.
// ============================================================================

struct TailBound {
  double value = 0.0;              // the reported bound
  bool informative = false;        // value < 1
  std::optional<double> lambda_used;
  std::optional<double> alt_value;  // secondary form, see each operation
};

namespace detail {
inline TailBound make_bound(double value) {
  TailBound b;
  b.value = value;
  b.informative = value < 1.0;
  return b;
}
inline double lead(bool two_sided) { return two_sided ? 2.0 : 1.0; }
}  // namespace detail

// Generic Chernoff-type bound from a per-step compensator profile
// e_j >= D^2 E_{j-1}(exp(lambda ||d_j||) - 1 - lambda ||d_j||):
//   value     = K exp(-lambda r) prod_j (1 + e_j)      (reported)
//   alt_value = K exp(-lambda r + sum_j e_j)           (weaker)
inline TailBound generic_exponential_tail(double lambda, double r,
                                          std::span<const double> e_profile,
                                          bool two_sided = true) {
  require(lambda >= 0.0, "generic_exponential_tail: lambda must be >= 0");
  require(r >= 0.0, "generic_exponential_tail: r must be >= 0");
  double log_prod = 0.0, sum = 0.0;
  for (double e : e_profile) {
    require(e >= 0.0, "generic_exponential_tail: compensator terms are >= 0");
    log_prod += std::log1p(e);
    sum += e;
  }
  const double K = detail::lead(two_sided);
  TailBound b = detail::make_bound(K * std::exp(-lambda * r + log_prod));
  b.lambda_used = lambda;
  b.alt_value = K * std::exp(-lambda * r + sum);
  return b;
}

// Bounded increments ||d_j|| <= a and conditional variance sum <= b^2:
//   value     = K exp[ r/a - (r/a + b^2/a^2) ln(1 + r a / b^2) ]
//   alt_value = K (e b^2 / (r a))^(r/a)   (weaker, r > 0)
inline TailBound bennett_tail(double r, double a, double b,
                              bool two_sided = true) {
  require(a > 0.0 && b > 0.0, "bennett_tail: a and b must be > 0");
  require(r >= 0.0, "bennett_tail: r must be >= 0");
  const double K = detail::lead(two_sided);
  const double ra = r / a;
  const double v = b * b / (a * a);
  TailBound out = detail::make_bound(
      K * std::exp(ra - (ra + v) * std::log1p(ra / v)));
  out.lambda_used = std::log1p(ra / v) / a;
  out.alt_value =
      r > 0.0 ? K * std::pow(std::exp(1.0) * v / ra, ra) : K;
  return out;
}

// Moment growth E_{j-1}||d_j||^m summing to at most m! Gamma^{m-2} B^2 / 2
// (geometry already folded into B):
//   value = K exp( -r^2 / (B^2 + B sqrt(B^2 + 2 Gamma r)) )
inline TailBound bernstein_tail(double r, double B, double Gamma,
                                bool two_sided = true) {
  require(B > 0.0, "bernstein_tail: B must be > 0");
  require(Gamma >= 0.0, "bernstein_tail: Gamma must be >= 0");
  require(r >= 0.0, "bernstein_tail: r must be >= 0");
  const double K = detail::lead(two_sided);
  const double denom = B * B + B * std::sqrt(B * B + 2.0 * Gamma * r);
  TailBound out = detail::make_bound(K * std::exp(-r * r / denom));
  // Optimal multiplier of the quadratic-over-linear cumulant majorant.
  const double s = std::sqrt(B * B + 2.0 * Gamma * r);
  out.lambda_used = Gamma > 0.0 ? (s - B) / (Gamma * s) : r / (B * B);
  return out;
}

// Deterministic increment envelope sum ||d_j||_inf^2 <= b_star^2:
//   value = 2 exp( -r^2 / (2 D^2 b_star^2) )
inline TailBound bounded_increment_tail(double r, double b_star, double D) {
  require(b_star > 0.0, "bounded_increment_tail: b_star must be > 0");
  require(D > 0.0, "bounded_increment_tail: D must be > 0");
  require(r >= 0.0, "bounded_increment_tail: r must be >= 0");
  return detail::make_bound(
      2.0 * std::exp(-r * r / (2.0 * D * D * b_star * b_star)));
}

// Conditionally symmetric increments with ||S_2||_inf <= b:
//   value = 2 exp( -r^2 / (2 D^2 b^2) )
inline TailBound conditionally_symmetric_tail(double r, double b, double D) {
  require(b > 0.0, "conditionally_symmetric_tail: b must be > 0");
  require(D > 0.0, "conditionally_symmetric_tail: D must be > 0");
  require(r >= 0.0, "conditionally_symmetric_tail: r must be >= 0");
  return detail::make_bound(2.0 * std::exp(-r * r / (2.0 * D * D * b * b)));
}

struct LambdaOpt {
  double lambda = 0.0;
  double bound = 0.0;
};

// Minimizes -lambda r + psi(lambda) over lambda >= 0 for a convex psi with
// psi(0) = 0, possibly finite only on [0, lambda_max). The feasible upper end
// is discovered by expansion; non-finite psi is treated as +inf.
inline LambdaOpt optimize_lambda(double r,
                                 const std::function<double(double)>& psi,
                                 bool two_sided = true) {
  require(r >= 0.0, "optimize_lambda: r must be >= 0");
  const double K = detail::lead(two_sided);
  auto h = [&](double lam) {
    const double v = psi(lam);
    return std::isfinite(v) ? -lam * r + v : kInf;
  };
  require(std::isfinite(psi(0.0)), "optimize_lambda: psi(0) must be finite");
  if (r == 0.0) return {0.0, K * std::exp(psi(0.0))};

  // Expand until h turns upward or the domain edge is passed; convexity makes
  // the first rising step a valid bracket end.
  double hi = 1e-8;
  double prev = h(hi);
  require(std::isfinite(prev) || std::isfinite(h(1e-300)),
          "optimize_lambda: psi not finite near 0");
  while (hi < 1e18) {
    const double next = h(hi * 2.0);
    if (next >= prev) break;
    hi *= 2.0;
    prev = next;
  }
  const MinResult m = golden_section_min(h, 0.0, hi * 2.0, 1e-14);
  const MinResult at0{0.0, h(0.0)};
  const MinResult best = (at0.value < m.value) ? at0 : m;
  return {best.x, K * std::exp(best.value)};
}

}  // namespace martbound
