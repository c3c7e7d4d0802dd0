#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "martbound/constructions.hpp"
#include "martbound/moment_bounds.hpp"
#include "martbound/optimize.hpp"
#include "martbound/rng.hpp"
#include "martbound/spaces.hpp"
#include "martbound/stats.hpp"
#include "martbound/tail_bounds.hpp"
#include "martbound/util.hpp"

namespace martbound {

// ============================================================================
// Generative martingale descriptions. All built-in families draw a scalar
// increment and push it along a direction vector of unit norm, so increment
// norms equal |scalar| and the per-step conditional second moments are known
// in closed form (the predictable characteristic s2 is computed symbolically,
// never estimated).
// ============================================================================

struct ScalarAtom {
  double value = 0.0;
  double prob = 0.0;
};

struct ScalarDistribution {
  std::vector<ScalarAtom> atoms;

  void validate() const {
    require(!atoms.empty(), "ScalarDistribution: no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
      require(a.prob >= 0.0, "ScalarDistribution: negative probability");
      total += a.prob;
    }
    require(std::fabs(total - 1.0) <= 1e-12,
            "ScalarDistribution: probabilities must sum to 1");
  }
  double mean() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob * a.value;
    return s;
  }
  double second_moment() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob * a.value * a.value;
    return s;
  }
  double sup_abs() const {
    double m = 0.0;
    for (const auto& a : atoms)
      if (a.prob > 0.0) m = std::max(m, std::fabs(a.value));
    return m;
  }
  double sup_value() const {
    double m = -kInf;
    for (const auto& a : atoms)
      if (a.prob > 0.0) m = std::max(m, a.value);
    return m;
  }
  bool is_symmetric() const {
    for (const auto& a : atoms) {
      double matched = 0.0, weight = 0.0;
      for (const auto& b : atoms)
        if (std::fabs(b.value + a.value) <= 1e-12) matched += b.prob;
      for (const auto& b : atoms)
        if (std::fabs(b.value - a.value) <= 1e-12) weight += b.prob;
      if (std::fabs(matched - weight) > 1e-12) return false;
    }
    return true;
  }
  double sample(RngStream& rng) const {
    double x = rng.uniform();
    for (const auto& a : atoms) {
      if (x < a.prob) return a.value;
      x -= a.prob;
    }
    return atoms.back().value;
  }
};

enum class Family {
  independent_discrete,
  rademacher,
  two_point,
  cond_symmetric_scaled,
  supermartingale_drift
};

enum class DirectionRule { fixed_axis, fresh_random_unit, axis_cycle };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::independent_discrete: return "independent_discrete";
    case Family::rademacher: return "rademacher";
    case Family::two_point: return "two_point";
    case Family::cond_symmetric_scaled: return "cond_symmetric_scaled";
    case Family::supermartingale_drift: return "supermartingale_drift";
  }
  return "?";
}

inline Family family_from_name(const std::string& s) {
  if (s == "independent_discrete") return Family::independent_discrete;
  if (s == "rademacher") return Family::rademacher;
  if (s == "two_point") return Family::two_point;
  if (s == "cond_symmetric_scaled") return Family::cond_symmetric_scaled;
  if (s == "supermartingale_drift") return Family::supermartingale_drift;
  throw std::invalid_argument("unknown martingale family '" + s + "'");
}

inline std::string direction_name(DirectionRule r) {
  switch (r) {
    case DirectionRule::fixed_axis: return "fixed_axis";
    case DirectionRule::fresh_random_unit: return "fresh_random_unit";
    case DirectionRule::axis_cycle: return "axis_cycle";
  }
  return "?";
}

inline DirectionRule direction_from_name(const std::string& s) {
  if (s == "fixed_axis") return DirectionRule::fixed_axis;
  if (s == "fresh_random_unit") return DirectionRule::fresh_random_unit;
  if (s == "axis_cycle") return DirectionRule::axis_cycle;
  throw std::invalid_argument("unknown direction rule '" + s + "'");
}

struct MartingaleSpec {
  Family family = Family::rademacher;
  SpaceSpec space = SpaceSpec::euclidean(1);
  DirectionRule direction = DirectionRule::fixed_axis;
  std::int64_t n = 1;

  double u = 1.0;  // rademacher / two_point jump size
  double q = 1.0;  // two_point jump probability
  // two_point provenance when built from a target (p, a_p, a_2); zero when
  // (u, q) were given directly.
  double target_p = 0.0, target_ap = 0.0, target_a2 = 0.0;

  std::vector<ScalarDistribution> steps;  // independent / supermartingale
  double drift = 0.0;                     // supermartingale: d_j = X_j - drift

  void validate() const {
    space.validate();
    require(n >= 1, "MartingaleSpec: horizon must be >= 1");
    switch (family) {
      case Family::rademacher:
        require(u > 0.0, "MartingaleSpec: u must be > 0");
        break;
      case Family::two_point:
        require(u > 0.0 && q > 0.0 && q <= 1.0,
                "MartingaleSpec: need u > 0 and q in (0,1]");
        break;
      case Family::cond_symmetric_scaled:
        break;
      case Family::independent_discrete:
      case Family::supermartingale_drift: {
        require(!steps.empty(), "MartingaleSpec: no increment distributions");
        require(steps.size() == 1 ||
                    steps.size() == static_cast<std::size_t>(n),
                "MartingaleSpec: need 1 or n increment distributions");
        require(drift >= 0.0, "MartingaleSpec: drift must be >= 0");
        for (const auto& d : steps) {
          d.validate();
          const double scale = std::max(1.0, d.sup_abs());
          require(std::fabs(d.mean()) <= 1e-12 * scale,
                  "MartingaleSpec: increments must have mean zero");
        }
        if (family == Family::independent_discrete)
          require(drift == 0.0,
                  "MartingaleSpec: martingale family cannot carry drift");
        else
          require(space.dim == 1,
                  "MartingaleSpec: supermartingale family is real-valued");
        break;
      }
    }
  }

  const ScalarDistribution& step_dist(std::int64_t j) const {
    return steps.size() == 1 ? steps[0]
                             : steps[static_cast<std::size_t>(j)];
  }

  bool conditionally_symmetric() const {
    switch (family) {
      case Family::rademacher:
      case Family::two_point:
      case Family::cond_symmetric_scaled:
        return true;
      case Family::independent_discrete:
        for (const auto& d : steps)
          if (!d.is_symmetric()) return false;
        return true;
      case Family::supermartingale_drift:
        return false;
    }
    return false;
  }

  static MartingaleSpec make_rademacher(std::int64_t n, double u,
                                        SpaceSpec space,
                                        DirectionRule dir) {
    MartingaleSpec s;
    s.family = Family::rademacher;
    s.n = n;
    s.u = u;
    s.space = space;
    s.direction = dir;
    s.validate();
    return s;
  }

  static MartingaleSpec make_two_point(std::int64_t n, double p, double a_p,
                                       double a_2, SpaceSpec space,
                                       DirectionRule dir) {
    const ExtremalConstruction c = build_extremal(p, n, a_p, a_2);
    MartingaleSpec s;
    s.family = Family::two_point;
    s.n = n;
    s.u = c.u;
    s.q = c.q;
    s.target_p = p;
    s.target_ap = a_p;
    s.target_a2 = a_2;
    s.space = space;
    s.direction = dir;
    s.validate();
    return s;
  }

  static MartingaleSpec make_cond_symmetric(std::int64_t n, SpaceSpec space,
                                            DirectionRule dir) {
    MartingaleSpec s;
    s.family = Family::cond_symmetric_scaled;
    s.n = n;
    s.space = space;
    s.direction = dir;
    s.validate();
    return s;
  }

  static MartingaleSpec make_independent(std::int64_t n,
                                         std::vector<ScalarDistribution> dists,
                                         SpaceSpec space, DirectionRule dir) {
    MartingaleSpec s;
    s.family = Family::independent_discrete;
    s.n = n;
    s.steps = std::move(dists);
    s.space = space;
    s.direction = dir;
    s.validate();
    return s;
  }

  static MartingaleSpec make_supermartingale(std::int64_t n,
                                             ScalarDistribution base,
                                             double drift) {
    MartingaleSpec s;
    s.family = Family::supermartingale_drift;
    s.n = n;
    s.steps = {std::move(base)};
    s.drift = drift;
    s.space = SpaceSpec::euclidean(1);
    s.validate();
    return s;
  }
};

// ============================================================================
// Path simulation.
// ============================================================================

struct PathStatistics {
  double f_star = 0.0;       // sup_j ||f_j||          (includes f_0 = 0)
  double f_plus_star = 0.0;  // sup_j f_j, dim-1 specs
  double final_norm = 0.0;   // ||f_n||
  double final_value = 0.0;  // f_n itself, dim-1 specs
  double d_star = 0.0;       // sup_j ||d_j||
  double d_plus_star = 0.0;  // sup_j d_j vee 0, dim-1 specs
  double s2 = 0.0;           // (sum_j E_{j-1} ||d_j||^2)^{1/2}, closed form
  double S2 = 0.0;           // (sum_j ||d_j||^2)^{1/2}
  double Sp = 0.0;           // (sum_j ||d_j||^p_order)^{1/p_order}
};

namespace detail {

inline void draw_direction(const MartingaleSpec& spec, std::int64_t j,
                           RngStream& rng, std::vector<double>& dir) {
  const int d = spec.space.dim;
  std::fill(dir.begin(), dir.end(), 0.0);
  switch (spec.direction) {
    case DirectionRule::fixed_axis:
      dir[0] = 1.0;
      return;
    case DirectionRule::axis_cycle:
      dir[static_cast<std::size_t>(j % d)] = 1.0;
      return;
    case DirectionRule::fresh_random_unit: {
      double nrm = 0.0;
      do {
        for (int i = 0; i < d; ++i) dir[i] = rng.normal();
        nrm = norm(spec.space, dir);
      } while (nrm == 0.0);
      for (int i = 0; i < d; ++i) dir[i] /= nrm;
      return;
    }
  }
}

}  // namespace detail

inline PathStatistics run_path(const MartingaleSpec& spec, RngStream& rng,
                               double p_order) {
  const int d = spec.space.dim;
  std::vector<double> f(d, 0.0), dir(d, 0.0);
  std::vector<double> jumps;
  jumps.reserve(static_cast<std::size_t>(spec.n));
  PathStatistics st;
  double sum_cond_sq = 0.0, sum_sq = 0.0;
  double max_norm = 0.0;

  for (std::int64_t j = 0; j < spec.n; ++j) {
    double scalar = 0.0, cond_sq = 0.0;
    switch (spec.family) {
      case Family::rademacher:
        scalar = rng.coin() ? spec.u : -spec.u;
        cond_sq = spec.u * spec.u;
        break;
      case Family::two_point:
        if (rng.uniform() < spec.q)
          scalar = rng.coin() ? spec.u : -spec.u;
        cond_sq = spec.q * spec.u * spec.u;
        break;
      case Family::cond_symmetric_scaled: {
        const double mag = 1.0 / (1.0 + max_norm);
        scalar = rng.coin() ? mag : -mag;
        cond_sq = mag * mag;
        break;
      }
      case Family::independent_discrete: {
        const ScalarDistribution& dist = spec.step_dist(j);
        scalar = dist.sample(rng);
        cond_sq = dist.second_moment();
        break;
      }
      case Family::supermartingale_drift: {
        const ScalarDistribution& dist = spec.step_dist(j);
        scalar = dist.sample(rng) - spec.drift;
        cond_sq = dist.second_moment() + spec.drift * spec.drift;
        break;
      }
    }
    detail::draw_direction(spec, j, rng, dir);
    for (int i = 0; i < d; ++i) f[i] += scalar * dir[i];

    const double abs_jump = std::fabs(scalar);
    jumps.push_back(abs_jump);
    sum_cond_sq += cond_sq;
    sum_sq += abs_jump * abs_jump;
    st.d_star = std::max(st.d_star, abs_jump);
    if (d == 1) {
      st.d_plus_star = std::max(st.d_plus_star, scalar);
      st.f_plus_star = std::max(st.f_plus_star, f[0]);
    }
    const double nrm = norm(spec.space, f);
    max_norm = std::max(max_norm, nrm);
    if (j + 1 == spec.n) {
      st.final_norm = nrm;
      if (d == 1) st.final_value = f[0];
    }
  }
  st.f_star = max_norm;
  st.s2 = std::sqrt(sum_cond_sq);
  st.S2 = std::sqrt(sum_sq);
  st.Sp = jumps.empty() ? 0.0 : [&] {
    double m = 0.0;
    for (double v : jumps) m = std::max(m, v);
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double v : jumps) s += std::pow(v / m, p_order);
    return m * std::pow(s, 1.0 / p_order);
  }();
  return st;
}

// Deterministic parallel simulation: replica i always uses stream (seed, i)
// and writes into slot i, so the result is independent of thread count.
inline std::vector<PathStatistics> simulate(const MartingaleSpec& spec,
                                            std::int64_t replicas,
                                            std::uint64_t seed,
                                            double p_order = 2.0,
                                            int workers = 0) {
  spec.validate();
  require(replicas >= 1, "simulate: replicas must be >= 1");
  std::vector<PathStatistics> out(static_cast<std::size_t>(replicas));
  parallel_for(
      static_cast<std::size_t>(replicas),
      [&](std::size_t i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        out[i] = run_path(spec, rng, p_order);
      },
      workers);
  return out;
}

struct TailEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  Interval ci;
};

inline TailEstimate estimate_tail(std::span<const double> samples, double r,
                                  double confidence = 0.99) {
  require(!samples.empty(), "estimate_tail: empty sample");
  TailEstimate e;
  e.trials = static_cast<std::int64_t>(samples.size());
  for (double v : samples)
    if (v >= r) ++e.successes;
  e.estimate = double(e.successes) / double(e.trials);
  e.ci = binomial_ci(e.successes, e.trials, confidence);
  return e;
}

// ============================================================================
// Closed-form hypothesis constants of the tail theorems, per family.
// ============================================================================

// sup_j || ||d_j|| ||_inf, the two-sided increment bound a.
inline double increment_sup(const MartingaleSpec& spec) {
  switch (spec.family) {
    case Family::rademacher:
    case Family::two_point:
      return spec.u;
    case Family::cond_symmetric_scaled:
      return 1.0;  // first magnitude is 1, later ones only shrink
    case Family::independent_discrete:
    case Family::supermartingale_drift: {
      double m = 0.0;
      for (const auto& d : spec.steps)
        m = std::max(m, d.sup_abs() + spec.drift);
      return m;
    }
  }
  return 0.0;
}

// sup_j ess-sup d_j, the one-sided increment bound for supermartingales.
inline double increment_upper_sup(const MartingaleSpec& spec) {
  switch (spec.family) {
    case Family::rademacher:
    case Family::two_point:
      return spec.u;
    case Family::cond_symmetric_scaled:
      return 1.0;
    case Family::independent_discrete:
    case Family::supermartingale_drift: {
      double m = -kInf;
      for (const auto& d : spec.steps)
        m = std::max(m, d.sup_value() - spec.drift);
      return m;
    }
  }
  return 0.0;
}

// || s2 ||_inf^2 = sup over paths of sum_j E_{j-1} ||d_j||^2.
inline double predictable_variance_sup(const MartingaleSpec& spec) {
  switch (spec.family) {
    case Family::rademacher:
      return double(spec.n) * spec.u * spec.u;
    case Family::two_point:
      return double(spec.n) * spec.q * spec.u * spec.u;
    case Family::cond_symmetric_scaled:
      // mag_1 = 1 and mag_j <= 1/2 afterwards (the running max is >= 1).
      return 1.0 + double(spec.n - 1) / 4.0;
    case Family::independent_discrete:
    case Family::supermartingale_drift: {
      double s = 0.0;
      for (std::int64_t j = 0; j < spec.n; ++j)
        s += spec.step_dist(j).second_moment() + spec.drift * spec.drift;
      return s;
    }
  }
  return 0.0;
}

// || S2 ||_inf^2 = sup over paths of sum_j ||d_j||^2.
inline double path_variance_sup(const MartingaleSpec& spec) {
  switch (spec.family) {
    case Family::rademacher:
    case Family::two_point:
      return double(spec.n) * spec.u * spec.u;
    case Family::cond_symmetric_scaled:
      return 1.0 + double(spec.n - 1) / 4.0;
    case Family::independent_discrete:
    case Family::supermartingale_drift: {
      double s = 0.0;
      for (std::int64_t j = 0; j < spec.n; ++j) {
        const double m = spec.step_dist(j).sup_abs() + spec.drift;
        s += m * m;
      }
      return s;
    }
  }
  return 0.0;
}

// sum_j (ess-sup ||d_j||)^2, the b_*^2 budget.
inline double sup_square_budget(const MartingaleSpec& spec) {
  return path_variance_sup(spec);  // identical for scalar-jump families
}

// ============================================================================
// Verification reports.
// ============================================================================

struct CheckResult {
  std::string name;       // which bound the check instantiates
  double threshold = 0.0; // r or lambda the check ran at
  double bound = 0.0;
  double estimate = 0.0;
  Interval ci;
  bool informative = true;
  bool pass = false;
};

struct SimulationReport {
  std::string kind;    // tail | moment | goodlambda
  std::string family;
  std::string theorem;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> statistics;
  std::vector<CheckResult> checks;
  bool pass = true;
};

enum class TailTheorem {
  bennett,            // bounded increments + predictable variance, two-sided
  bounded_increment,  // sup-square budget, two-sided
  cond_symmetric,     // pathwise variance budget under conditional symmetry
  supermartingale     // one-sided bennett for drifted sequences
};

inline std::string tail_theorem_name(TailTheorem t) {
  switch (t) {
    case TailTheorem::bennett: return "bennett";
    case TailTheorem::bounded_increment: return "bounded_increment";
    case TailTheorem::cond_symmetric: return "cond_symmetric";
    case TailTheorem::supermartingale: return "supermartingale_bennett";
  }
  return "?";
}

inline TailTheorem tail_theorem_from_name(const std::string& s) {
  if (s == "bennett") return TailTheorem::bennett;
  if (s == "bounded" || s == "bounded_increment")
    return TailTheorem::bounded_increment;
  if (s == "condsym" || s == "cond_symmetric")
    return TailTheorem::cond_symmetric;
  if (s == "supermartingale" || s == "supermartingale_bennett")
    return TailTheorem::supermartingale;
  throw std::invalid_argument("unknown tail theorem '" + s + "'");
}

// The theorem's closed-form bound as a function of r, with hypothesis
// constants extracted from the spec. Throws if the spec does not satisfy the
// selected theorem's hypotheses.
inline std::function<TailBound(double)> tail_bound_for(
    const MartingaleSpec& spec, TailTheorem theorem) {
  const double D = smoothness_constant(spec.space);
  switch (theorem) {
    case TailTheorem::bennett: {
      require(spec.family != Family::supermartingale_drift,
              "bennett two-sided check needs a martingale spec");
      const double a = increment_sup(spec);
      const double b = D * std::sqrt(predictable_variance_sup(spec));
      return [a, b](double r) { return bennett_tail(r, a, b, true); };
    }
    case TailTheorem::bounded_increment: {
      require(spec.family != Family::supermartingale_drift,
              "bounded-increment check needs a martingale spec");
      const double b_star = std::sqrt(sup_square_budget(spec));
      return [b_star, D](double r) {
        return bounded_increment_tail(r, b_star, D);
      };
    }
    case TailTheorem::cond_symmetric: {
      require(spec.conditionally_symmetric(),
              "conditional-symmetry check needs a conditionally symmetric "
              "spec");
      const double b = std::sqrt(path_variance_sup(spec));
      return [b, D](double r) {
        return conditionally_symmetric_tail(r, b, D);
      };
    }
    case TailTheorem::supermartingale: {
      require(spec.space.dim == 1,
              "supermartingale check needs a real-valued spec");
      const double a = increment_upper_sup(spec);
      require(a > 0.0, "supermartingale check: nonpositive increment sup");
      const double b = std::sqrt(predictable_variance_sup(spec));
      return [a, b](double r) { return bennett_tail(r, a, b, false); };
    }
  }
  throw std::logic_error("unreachable");
}

// 20 thresholds spanning the informative range of a decreasing bound: from
// where it drops below ~1 down to where the Monte Carlo resolution floor
// (exact-binomial CI at zero successes) still leaves a decade of headroom.
inline std::vector<double> default_r_grid(
    const std::function<TailBound(double)>& bound_fn, double r_max_hint,
    int points = 20, double floor_level = 2e-3) {
  auto level_at = [&](double level) {
    double lo = 0.0, hi = r_max_hint;
    while (bound_fn(hi).value > level) hi *= 2.0;
    return bisect_root(
        [&](double r) { return bound_fn(r).value - level; }, lo, hi, 1e-10);
  };
  const double r_lo = level_at(0.999);
  const double r_hi = level_at(floor_level);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = r_lo + (r_hi - r_lo) * double(i) / double(points - 1);
  return grid;
}

inline SimulationReport verify_tail_bounds(const MartingaleSpec& spec,
                                           TailTheorem theorem,
                                           std::span<const double> r_grid,
                                           std::int64_t replicas,
                                           std::uint64_t seed,
                                           int workers = 0) {
  require(!r_grid.empty(), "verify_tail_bounds: empty r grid");
  const auto bound_fn = tail_bound_for(spec, theorem);
  const bool one_sided = theorem == TailTheorem::supermartingale;
  const auto stats = simulate(spec, replicas, seed, 2.0, workers);
  std::vector<double> statistic(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i)
    statistic[i] = one_sided ? stats[i].f_plus_star : stats[i].f_star;

  SimulationReport report;
  report.kind = "tail";
  report.family = family_name(spec.family);
  report.theorem = tail_theorem_name(theorem);
  report.replicas = replicas;
  report.seed = seed;
  for (double r : r_grid) {
    const TailBound b = bound_fn(r);
    const TailEstimate e = estimate_tail(statistic, r);
    CheckResult c;
    c.name = report.theorem;
    c.threshold = r;
    c.bound = b.value;
    c.estimate = e.estimate;
    c.ci = e.ci;
    c.informative = b.informative;
    c.pass = !b.informative || e.ci.hi <= b.value;
    report.pass = report.pass && c.pass;
    report.checks.push_back(c);
  }
  return report;
}

inline SimulationReport verify_moment_bounds(const MartingaleSpec& spec,
                                             double p, std::int64_t replicas,
                                             std::uint64_t seed,
                                             int workers = 0) {
  require(p > 2.0, "verify_moment_bounds: p must be > 2");
  require(spec.family != Family::supermartingale_drift,
          "verify_moment_bounds: martingale specs only");
  const double D = smoothness_constant(spec.space);
  const auto stats = simulate(spec, replicas, seed, p, workers);

  std::vector<double> f_star(stats.size()), d_star(stats.size()),
      s2(stats.size()), S2(stats.size()), final_norm(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    f_star[i] = stats[i].f_star;
    d_star[i] = stats[i].d_star;
    s2[i] = stats[i].s2;
    S2[i] = stats[i].S2;
    final_norm[i] = stats[i].final_norm;
  }

  SimulationReport report;
  report.kind = "moment";
  report.family = family_name(spec.family);
  report.theorem = "spectrum_envelope";
  report.replicas = replicas;
  report.seed = seed;

  const double f_star_p = p_norm_estimate(f_star, p);
  const Interval f_star_ci = bootstrap_ci(
      f_star, [&](std::span<const double> xs) {
        return p_norm_estimate(xs, p);
      },
      1000, seed, 1u << 20);
  const double d_star_p = p_norm_estimate(d_star, p);
  const double s2_p = p_norm_estimate(s2, p);
  report.statistics["f_star_p_norm"] = f_star_p;
  report.statistics["d_star_p_norm"] = d_star_p;
  report.statistics["s2_p_norm"] = s2_p;

  {
    // ||f*||_p against the optimized spectrum with its explicit constant 60.
    const BoundQuery bq{p, d_star_p, D * s2_p};
    const double bound = with_proof_constant(hat_B(bq).value);
    CheckResult c;
    c.name = "spectrum_envelope_60";
    c.threshold = p;
    c.bound = bound;
    c.estimate = f_star_p;
    c.ci = f_star_ci;
    c.pass = bound >= f_star_ci.lo;
    report.pass = report.pass && c.pass;
    report.checks.push_back(c);
  }
  if (spec.conditionally_symmetric()) {
    // ||f*||_p <= sqrt(p) D ||S2||_p for conditionally symmetric specs.
    const double S2_p = p_norm_estimate(S2, p);
    const double bound = cond_symmetric_moment_bound(p, D, S2_p);
    CheckResult c;
    c.name = "cond_symmetric_sqrt_p";
    c.threshold = p;
    c.bound = bound;
    c.estimate = f_star_p;
    c.ci = f_star_ci;
    c.pass = bound >= f_star_ci.lo;
    report.pass = report.pass && c.pass;
    report.checks.push_back(c);
  }
  {
    // E||f_n||^2 <= D^2 E s2^2: the basic smooth-space second-moment bound.
    std::vector<double> final_sq(final_norm.size());
    for (std::size_t i = 0; i < final_norm.size(); ++i)
      final_sq[i] = final_norm[i] * final_norm[i];
    auto mean_stat = [](std::span<const double> xs) {
      double s = 0.0;
      for (double x : xs) s += x;
      return s / double(xs.size());
    };
    const double mean_final_sq = mean_stat(final_sq);
    double mean_s2_sq = 0.0;
    for (double v : s2) mean_s2_sq += v * v;
    mean_s2_sq /= double(s2.size());
    const Interval ci =
        bootstrap_ci(final_sq, mean_stat, 1000, seed, (1u << 20) + 1);
    CheckResult c;
    c.name = "second_moment_smooth";
    c.threshold = 2.0;
    c.bound = D * D * mean_s2_sq;
    c.estimate = mean_final_sq;
    c.ci = ci;
    c.pass = c.bound >= ci.lo;
    report.pass = report.pass && c.pass;
    report.checks.push_back(c);
  }
  if (spec.family == Family::two_point && spec.target_p > 2.0) {
    // Lower-bound direction: the construction's ||f_n||_p does not fall
    // below the optimal envelope by more than the frozen factor 64.
    std::vector<double> final_val(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i)
      final_val[i] = stats[i].final_norm;
    const double f_n_p = p_norm_estimate(final_val, spec.target_p);
    const BoundQuery bq{spec.target_p, spec.target_ap, spec.target_a2};
    const double envelope = check_B(bq).value;
    CheckResult c;
    c.name = "optimality_floor";
    c.threshold = spec.target_p;
    c.bound = envelope / 64.0;  // floor the estimate must stay above
    c.estimate = f_n_p;
    c.ci = bootstrap_ci(
        final_val,
        [&](std::span<const double> xs) {
          return p_norm_estimate(xs, spec.target_p);
        },
        1000, seed, (1u << 20) + 2);
    c.pass = f_n_p >= c.bound;
    report.pass = report.pass && c.pass;
    report.statistics["optimality_ratio"] = f_n_p / envelope;
    report.checks.push_back(c);
  }
  return report;
}

// Good-lambda comparison: joint event {f* > beta λ, w* <= λ} against
// eps * P(f* > λ), with w* = (d*/δ2) ∨ (D s2/δ1). One-sided specs use the
// positive-part statistics and drop the leading factor 2 in eps.
inline SimulationReport good_lambda_check(const MartingaleSpec& spec,
                                          double beta, double delta1,
                                          double delta2,
                                          std::span<const double> lambda_grid,
                                          std::int64_t replicas,
                                          std::uint64_t seed,
                                          int workers = 0) {
  require(beta - 1.0 - delta2 > 0.0,
          "good_lambda_check: need beta - 1 - delta2 > 0");
  require(delta1 > 0.0 && delta2 > 0.0,
          "good_lambda_check: deltas must be > 0");
  require(!lambda_grid.empty(), "good_lambda_check: empty lambda grid");
  const bool one_sided = spec.family == Family::supermartingale_drift;
  if (!one_sided)
    require(spec.conditionally_symmetric(),
            "good_lambda_check: two-sided form needs conditional symmetry");
  const double D = one_sided ? 1.0 : smoothness_constant(spec.space);
  const double N = (beta - 1.0 - delta2) / delta2;
  const double eps = (one_sided ? 1.0 : 2.0) *
                     std::pow(std::exp(1.0) * delta1 * delta1 /
                                  (N * delta2 * delta2),
                              N);

  const auto stats = simulate(spec, replicas, seed, 2.0, workers);
  std::vector<double> f(stats.size()), w(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    f[i] = one_sided ? s.f_plus_star : s.f_star;
    const double dstar = one_sided ? s.d_plus_star : s.d_star;
    w[i] = std::max(dstar / delta2, D * s.s2 / delta1);
  }

  SimulationReport report;
  report.kind = "goodlambda";
  report.family = family_name(spec.family);
  report.theorem = one_sided ? "good_lambda_one_sided" : "good_lambda";
  report.replicas = replicas;
  report.seed = seed;
  report.statistics["epsilon"] = eps;
  report.statistics["N"] = N;

  const std::int64_t trials = static_cast<std::int64_t>(stats.size());
  for (double lambda : lambda_grid) {
    std::int64_t joint = 0, single = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      if (f[i] > lambda) ++single;
      if (f[i] > beta * lambda && w[i] <= lambda) ++joint;
    }
    const Interval joint_ci = binomial_ci(joint, trials);
    const Interval single_ci = binomial_ci(single, trials);
    CheckResult c;
    c.name = report.theorem;
    c.threshold = lambda;
    c.bound = eps * single_ci.hi;
    c.estimate = double(joint) / double(trials);
    c.ci = joint_ci;
    c.informative = eps < 1.0;
    c.pass = !c.informative || joint_ci.lo <= eps * single_ci.hi;
    report.pass = report.pass && c.pass;
    report.checks.push_back(c);
  }
  return report;
}

// ============================================================================
// Exact norm-martingale decomposition checks for independent vector sums.
// For f_n = d_1 + ... + d_n with independent finite-support increments and a
// shift x, the decomposition
//
//   zeta_j = E_j ||f_n + x|| - E ||f_n + x||,   xi_j = zeta_j - zeta_{j-1}
//
// satisfies |xi_j| <= ||d_j|| + E||d_j|| pointwise and
// E_{j-1} xi_j^2 <= E||d_j||^2 on every conditioning atom. Everything is
// enumerated exactly; tolerances only absorb double rounding. Works in any
// norm the space carries, including the non-smooth l1 / linf kinds.
// ============================================================================

struct VectorAtom {
  std::vector<double> value;
  double prob = 0.0;
};

struct VectorDistribution {
  std::vector<VectorAtom> atoms;

  void validate(int dim) const {
    require(!atoms.empty(), "VectorDistribution: no atoms");
    double total = 0.0;
    double scale = 1.0;
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    for (const auto& a : atoms) {
      require(static_cast<int>(a.value.size()) == dim,
              "VectorDistribution: atom dimension mismatch");
      require(a.prob >= 0.0, "VectorDistribution: negative probability");
      total += a.prob;
      for (int i = 0; i < dim; ++i) {
        mean[static_cast<std::size_t>(i)] += a.prob * a.value[i];
        scale = std::max(scale, std::fabs(a.value[i]));
      }
    }
    require(std::fabs(total - 1.0) <= 1e-12,
            "VectorDistribution: probabilities must sum to 1");
    for (double m : mean)
      require(std::fabs(m) <= 1e-12 * scale,
              "VectorDistribution: increments must have mean zero");
  }
};

struct YurinskiiReport {
  bool pass = false;
  std::int64_t paths = 0;
  double mean_norm = 0.0;                 // E ||f_n + x||
  double worst_pointwise_slack = -kInf;   // max |xi| - (||d|| + E||d||)
  double worst_conditional_slack = -kInf; // max E_{j-1} xi^2 - E||d_j||^2
  double worst_telescope_error = 0.0;     // max |sum xi - (||f_n+x|| - mean)|
  double worst_limit_rel_err = 0.0;       // dim-1 only: zeta_n vs f_n
};

inline YurinskiiReport yurinskii_check(
    const SpaceSpec& space, const std::vector<VectorDistribution>& increments,
    const std::vector<double>& x) {
  space.validate();
  require(static_cast<int>(x.size()) == space.dim,
          "yurinskii_check: shift dimension mismatch");
  require(!increments.empty(), "yurinskii_check: no increments");
  std::int64_t paths = 1;
  for (const auto& inc : increments) {
    inc.validate(space.dim);
    paths *= static_cast<std::int64_t>(inc.atoms.size());
    require(paths <= 1000000,
            "yurinskii_check: support product exceeds enumeration budget");
  }
  const std::size_t n = increments.size();
  const int d = space.dim;

  // Unconditional per-step norm moments.
  std::vector<double> e_norm(n, 0.0), e_norm_sq(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& a : increments[j].atoms) {
      const double nrm = norm(space, a.value);
      e_norm[j] += a.prob * nrm;
      e_norm_sq[j] += a.prob * nrm * nrm;
    }
  }

  YurinskiiReport report;
  report.paths = paths;
  double scale = std::max(1.0, norm(space, x));
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& a : increments[j].atoms)
      scale = std::max(scale, norm(space, a.value));

  std::vector<double> f(x);  // running partial sum, shifted by x

  // Conditional means level by level, stored for the per-node and path-sum
  // checks. Level j holds one mean per length-j prefix (mixed-radix index).
  std::vector<std::vector<double>> means(n + 1);
  {
    std::vector<std::size_t> counts(n + 1, 1);
    for (std::size_t j = 0; j < n; ++j)
      counts[j + 1] = counts[j] * increments[j].atoms.size();
    for (std::size_t j = 0; j <= n; ++j)
      means[j].assign(counts[j], 0.0);
  }
  auto fill = [&](auto&& self, std::size_t depth, std::size_t index)
      -> double {
    if (depth == n) {
      const double v = norm(space, f);
      means[depth][index] = v;
      return v;
    }
    const auto& dist = increments[depth];
    double node_mean = 0.0;
    for (std::size_t a = 0; a < dist.atoms.size(); ++a) {
      for (int i = 0; i < d; ++i) f[i] += dist.atoms[a].value[i];
      node_mean += dist.atoms[a].prob *
                   self(self, depth + 1, index * dist.atoms.size() + a);
      for (int i = 0; i < d; ++i) f[i] -= dist.atoms[a].value[i];
    }
    means[depth][index] = node_mean;
    return node_mean;
  };
  fill(fill, 0, 0);
  report.mean_norm = means[0][0];

  // Inequality checks on every node, from the stored level means.
  for (std::size_t j = 0; j < n; ++j) {
    const auto& dist = increments[j];
    const std::size_t arity = dist.atoms.size();
    for (std::size_t parent = 0; parent < means[j].size(); ++parent) {
      double cond_sq = 0.0;
      for (std::size_t a = 0; a < arity; ++a) {
        const double xi = means[j + 1][parent * arity + a] - means[j][parent];
        const double jump = norm(space, dist.atoms[a].value);
        report.worst_pointwise_slack =
            std::max(report.worst_pointwise_slack,
                     std::fabs(xi) - (jump + e_norm[j]));
        cond_sq += dist.atoms[a].prob * xi * xi;
      }
      report.worst_conditional_slack =
          std::max(report.worst_conditional_slack, cond_sq - e_norm_sq[j]);
    }
  }

  // Telescoping + limit checks along every full path.
  {
    std::vector<std::size_t> digits(n, 0);
    for (std::int64_t path = 0; path < paths; ++path) {
      std::size_t rem = static_cast<std::size_t>(path);
      for (std::size_t j = n; j-- > 0;) {
        digits[j] = rem % increments[j].atoms.size();
        rem /= increments[j].atoms.size();
      }
      double zeta = 0.0;
      std::size_t index = 0;
      std::vector<double> fx(x);
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t child = index * increments[j].atoms.size() +
                                  digits[j];
        zeta += means[j + 1][child] - means[j][index];
        index = child;
        for (int i = 0; i < d; ++i)
          fx[i] += increments[j].atoms[digits[j]].value[i];
      }
      const double telescoped = norm(space, fx) - means[0][0];
      report.worst_telescope_error = std::max(
          report.worst_telescope_error, std::fabs(zeta - telescoped));
      if (d == 1) {
        const double f_n = fx[0] - x[0];
        report.worst_limit_rel_err =
            std::max(report.worst_limit_rel_err,
                     std::fabs(zeta - f_n) / std::max(1.0, std::fabs(f_n)));
      }
    }
  }

  const double tol = 1e-12 * scale * double(n + 1);
  report.pass = report.worst_pointwise_slack <= tol &&
                report.worst_conditional_slack <= tol * scale &&
                report.worst_telescope_error <= tol;
  return report;
}

// --- JSON -------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const ScalarDistribution& dist) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : dist.atoms)
    atoms.push_back({{"value", a.value}, {"prob", a.prob}});
  j = {{"atoms", atoms}};
}

inline void from_json(const nlohmann::json& j, ScalarDistribution& dist) {
  dist.atoms.clear();
  for (const auto& a : j.at("atoms"))
    dist.atoms.push_back(
        {a.at("value").get<double>(), a.at("prob").get<double>()});
}

inline void to_json(nlohmann::json& j, const MartingaleSpec& spec) {
  j = {{"family", family_name(spec.family)},
       {"space", spec.space},
       {"direction", direction_name(spec.direction)},
       {"n", spec.n}};
  switch (spec.family) {
    case Family::rademacher:
      j["u"] = spec.u;
      break;
    case Family::two_point:
      j["u"] = spec.u;
      j["q"] = spec.q;
      if (spec.target_p > 0.0) {
        j["p"] = spec.target_p;
        j["ap"] = spec.target_ap;
        j["a2"] = spec.target_a2;
      }
      break;
    case Family::cond_symmetric_scaled:
      break;
    case Family::independent_discrete:
      j["increments"] = spec.steps;
      break;
    case Family::supermartingale_drift:
      j["increments"] = spec.steps;
      j["drift"] = spec.drift;
      break;
  }
}

inline void from_json(const nlohmann::json& j, MartingaleSpec& spec) {
  spec = MartingaleSpec{};
  spec.family = family_from_name(j.at("family").get<std::string>());
  if (j.contains("space")) spec.space = j.at("space").get<SpaceSpec>();
  if (j.contains("direction"))
    spec.direction = direction_from_name(j.at("direction").get<std::string>());
  spec.n = j.at("n").get<std::int64_t>();
  switch (spec.family) {
    case Family::rademacher:
      spec.u = j.value("u", 1.0);
      break;
    case Family::two_point:
      if (j.contains("ap")) {
        const double p = j.at("p").get<double>();
        const double ap = j.at("ap").get<double>();
        const double a2 = j.at("a2").get<double>();
        const ExtremalConstruction c = build_extremal(p, spec.n, ap, a2);
        spec.u = c.u;
        spec.q = c.q;
        spec.target_p = p;
        spec.target_ap = ap;
        spec.target_a2 = a2;
      } else {
        spec.u = j.at("u").get<double>();
        spec.q = j.at("q").get<double>();
      }
      break;
    case Family::cond_symmetric_scaled:
      break;
    case Family::independent_discrete:
      spec.steps = j.at("increments").get<std::vector<ScalarDistribution>>();
      break;
    case Family::supermartingale_drift:
      spec.steps = j.at("increments").get<std::vector<ScalarDistribution>>();
      spec.drift = j.value("drift", 0.0);
      break;
  }
  spec.validate();
}

}  // namespace martbound
