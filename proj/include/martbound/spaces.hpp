#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "martbound/rng.hpp"
#include "martbound/util.hpp"

namespace martbound {

// ============================================================================
// Normed sequence spaces over d atoms with counting measure.
//
// Smoothness queries (the two-point inequality
//   ||x+y||^2 + ||x-y||^2 <= 2||x||^2 + 2 D^2 ||y||^2
// and its best constant D) are defined for euclidean and l^p with p >= 2,
// where D = 1 and D = sqrt(p-1) respectively. l^1 and l^inf are carried only
// as norms, for checks that deliberately run outside the smooth regime.
// ============================================================================

enum class SpaceKind { euclidean, lp, l1, linf };

struct SpaceSpec {
  SpaceKind kind = SpaceKind::euclidean;
  int dim = 1;
  double p = 2.0;  // meaningful only for kind == lp

  static SpaceSpec euclidean(int dim) {
    SpaceSpec s{SpaceKind::euclidean, dim, 2.0};
    s.validate();
    return s;
  }
  static SpaceSpec lp(double p, int dim) {
    SpaceSpec s{SpaceKind::lp, dim, p};
    s.validate();
    return s;
  }
  static SpaceSpec l1(int dim) {
    SpaceSpec s{SpaceKind::l1, dim, 1.0};
    s.validate();
    return s;
  }
  static SpaceSpec linf(int dim) {
    SpaceSpec s{SpaceKind::linf, dim, 0.0};
    s.validate();
    return s;
  }

  void validate() const {
    require(dim >= 1, "SpaceSpec: dim must be >= 1");
    if (kind == SpaceKind::lp)
      require(p >= 2.0, "SpaceSpec: lp exponent must be >= 2");
  }

  bool is_real_line() const {
    return dim == 1 && kind != SpaceKind::lp;
  }
};

inline double norm(const SpaceSpec& space, std::span<const double> v) {
  require(static_cast<int>(v.size()) == space.dim,
          "norm: vector length does not match space dim");
  switch (space.kind) {
    case SpaceKind::euclidean: {
      double s = 0.0;
      for (double c : v) s += c * c;
      return std::sqrt(s);
    }
    case SpaceKind::l1: {
      double s = 0.0;
      for (double c : v) s += std::abs(c);
      return s;
    }
    case SpaceKind::linf: {
      double m = 0.0;
      for (double c : v) m = std::max(m, std::abs(c));
      return m;
    }
    case SpaceKind::lp: {
      // Scale by the max coordinate so large exponents cannot overflow.
      double m = 0.0;
      for (double c : v) m = std::max(m, std::abs(c));
      if (m == 0.0) return 0.0;
      double s = 0.0;
      for (double c : v) s += std::pow(std::abs(c) / m, space.p);
      return m * std::pow(s, 1.0 / space.p);
    }
  }
  return 0.0;
}

// Best two-point smoothness constant of the space.
inline double smoothness_constant(const SpaceSpec& space) {
  switch (space.kind) {
    case SpaceKind::euclidean:
      return 1.0;
    case SpaceKind::lp:
      return std::sqrt(space.p - 1.0);
    default:
      throw std::domain_error(
          "smoothness_constant: space is not two-point smooth");
  }
}

// Slack of the smoothness inequality at (x, y) for a candidate constant D:
//   slack = 2||x||^2 + 2 D^2 ||y||^2 - ||x+y||^2 - ||x-y||^2.
// Nonnegative (up to rounding) whenever D is at least the true constant.
inline double two_smooth_slack(const SpaceSpec& space, double D,
                               std::span<const double> x,
                               std::span<const double> y) {
  require(x.size() == y.size(), "two_smooth_slack: length mismatch");
  const std::size_t d = x.size();
  std::vector<double> sum(d), diff(d);
  for (std::size_t i = 0; i < d; ++i) {
    sum[i] = x[i] + y[i];
    diff[i] = x[i] - y[i];
  }
  const double nx = norm(space, x);
  const double ny = norm(space, y);
  const double ns = norm(space, sum);
  const double nd = norm(space, diff);
  return 2.0 * nx * nx + 2.0 * D * D * ny * ny - ns * ns - nd * nd;
}

struct SmoothnessReport {
  double estimated_D = 0.0;      // max over sampled pairs of the ratio root
  double worst_violation = 0.0;  // max(-slack) at the nominal constant; <= 0 if clean
  std::size_t samples_checked = 0;
  std::vector<double> witness_x;  // pair achieving estimated_D
  std::vector<double> witness_y;
};

namespace detail {

// Ratio whose supremum over pairs is the squared smoothness constant.
inline double smoothness_ratio(const SpaceSpec& space,
                               std::span<const double> x,
                               std::span<const double> y) {
  const std::size_t d = x.size();
  std::vector<double> sum(d), diff(d);
  for (std::size_t i = 0; i < d; ++i) {
    sum[i] = x[i] + y[i];
    diff[i] = x[i] - y[i];
  }
  const double ny = norm(space, y);
  if (ny == 0.0) return 0.0;
  const double nx = norm(space, x);
  const double ns = norm(space, sum);
  const double nd = norm(space, diff);
  return (ns * ns + nd * nd - 2.0 * nx * nx) / (2.0 * ny * ny);
}

}  // namespace detail

// Monte Carlo sweep for the smoothness constant plus the deterministic
// extremal family: x = (1,...,1) against a sign-alternating direction scaled
// toward zero, which attains the constant in the second-order limit.
inline SmoothnessReport estimate_smoothness(const SpaceSpec& space,
                                            std::size_t samples,
                                            std::uint64_t seed) {
  space.validate();
  const double nominal = smoothness_constant(space);
  const int d = space.dim;
  RngStream rng(seed, 0);

  SmoothnessReport report;
  std::vector<double> x(d), y(d);
  auto consider = [&](const std::vector<double>& xc,
                      const std::vector<double>& yc) {
    const double ratio = detail::smoothness_ratio(space, xc, yc);
    const double est = ratio > 0.0 ? std::sqrt(ratio) : 0.0;
    if (est > report.estimated_D) {
      report.estimated_D = est;
      report.witness_x = xc;
      report.witness_y = yc;
    }
    const double slack = two_smooth_slack(space, nominal, xc, yc);
    report.worst_violation = std::max(report.worst_violation, -slack);
    ++report.samples_checked;
  };

  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) x[i] = rng.normal();
    for (int i = 0; i < d; ++i) y[i] = rng.normal();
    consider(x, y);
  }

  // Extremal pair, swept over dyadic scales. Scales below 2^-13 are skipped:
  // there the quadratic signal drowns in norm rounding noise.
  if (d >= 1) {
    std::fill(x.begin(), x.end(), 1.0);
    for (int k = 0; k <= 13; ++k) {
      const double eps = std::ldexp(1.0, -k);
      for (int i = 0; i < d; ++i) y[i] = (i % 2 == 0 ? eps : -eps);
      consider(x, y);
    }
  }
  return report;
}

// --- JSON -------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const SpaceSpec& s) {
  switch (s.kind) {
    case SpaceKind::euclidean:
      j = {{"kind", "euclidean"}, {"dim", s.dim}};
      break;
    case SpaceKind::lp:
      j = {{"kind", "lp"}, {"p", s.p}, {"dim", s.dim}};
      break;
    case SpaceKind::l1:
      j = {{"kind", "l1"}, {"dim", s.dim}};
      break;
    case SpaceKind::linf:
      j = {{"kind", "linf"}, {"dim", s.dim}};
      break;
  }
}

inline void from_json(const nlohmann::json& j, SpaceSpec& s) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.at("dim").get<int>();
  if (kind == "euclidean") {
    s = SpaceSpec::euclidean(dim);
  } else if (kind == "lp") {
    s = SpaceSpec::lp(j.at("p").get<double>(), dim);
  } else if (kind == "l1") {
    s = SpaceSpec::l1(dim);
  } else if (kind == "linf") {
    s = SpaceSpec::linf(dim);
  } else {
    throw std::invalid_argument("SpaceSpec: unknown kind '" + kind + "'");
  }
}

}  // namespace martbound
