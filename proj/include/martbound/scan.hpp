#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "martbound/exact_constants.hpp"
#include "martbound/moment_bounds.hpp"
#include "martbound/util.hpp"

namespace martbound {

// Grid scans comparing the three envelope forms and the 1980-style bound.
// Everything is scale-invariant in (a_p, a_2), so cells are evaluated at
// a_p = 1, a_2 = q. Cells are computed in parallel into pre-sized storage
// and serialized in (p, q) order with fixed formatting, so reruns are
// byte-identical.

inline std::vector<double> default_p_grid() {
  return {2.5, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0};
}

// Log-spaced q grid spanning the small-ratio regime e^{-2p} up to the cap
// e^2 sqrt(p) where the q <= q_p(1) branch saturates.
inline std::vector<double> q_grid_for(double p, int points = 41) {
  require(points >= 2, "q_grid_for: need at least 2 points");
  const double lo = -2.0 * p;
  const double hi = 2.0 + 0.5 * std::log(p);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::exp(lo + (hi - lo) * double(i) / double(points - 1));
  return grid;
}

struct EquivalenceRow {
  double p = 0.0, q = 0.0;
  double hat = 0.0, check = 0.0, star = 0.0, b1980 = 0.0;
  double hat_over_check = 0.0;
  double star_over_check = 0.0;
  double b1980_over_check = 0.0;
};

struct EquivalenceScan {
  std::vector<double> p_grid;
  int q_points = 41;
  std::vector<EquivalenceRow> rows;
  double max_hat_over_check = 0.0;
  double max_star_over_check = 0.0;
  double min_star_over_check = kInf;
  double max_check_over_star = 0.0;
  double max_b1980_over_check = 0.0;
};

inline EquivalenceScan equivalence_scan(std::vector<double> p_grid,
                                        int q_points = 41, int workers = 0) {
  EquivalenceScan scan;
  scan.p_grid = std::move(p_grid);
  scan.q_points = q_points;
  std::vector<std::vector<double>> q_grids;
  for (double p : scan.p_grid) {
    require(p > 2.0, "equivalence_scan: p must be > 2");
    q_grids.push_back(q_grid_for(p, q_points));
  }
  scan.rows.assign(scan.p_grid.size() * static_cast<std::size_t>(q_points),
                   EquivalenceRow{});
  parallel_for(
      scan.rows.size(),
      [&](std::size_t cell) {
        const std::size_t pi = cell / static_cast<std::size_t>(q_points);
        const std::size_t qi = cell % static_cast<std::size_t>(q_points);
        const double p = scan.p_grid[pi];
        const double q = q_grids[pi][qi];
        const BoundQuery bq{p, 1.0, q};
        EquivalenceRow row;
        row.p = p;
        row.q = q;
        row.hat = hat_B(bq).value;
        row.check = check_B(bq).value;
        row.star = star_B(bq);
        row.b1980 = b1980(p, 1.0, q).value;
        row.hat_over_check = row.hat / row.check;
        row.star_over_check = row.star / row.check;
        row.b1980_over_check = row.b1980 / row.check;
        scan.rows[cell] = row;
      },
      workers);
  for (const auto& row : scan.rows) {
    scan.max_hat_over_check =
        std::max(scan.max_hat_over_check, row.hat_over_check);
    scan.max_star_over_check =
        std::max(scan.max_star_over_check, row.star_over_check);
    scan.min_star_over_check =
        std::min(scan.min_star_over_check, row.star_over_check);
    scan.max_b1980_over_check =
        std::max(scan.max_b1980_over_check, row.b1980_over_check);
  }
  scan.max_check_over_star = 1.0 / scan.min_star_over_check;
  return scan;
}

// For each c in [1, p] the ratio q_c = sqrt(c) e^{-p/c} makes the two
// spectrum terms equal, and the envelope at that ratio is within 2e of the
// single term: no value of c is wasted.
struct MinimalityRow {
  double p = 0.0, c = 0.0, q = 0.0;
  double spectrum = 0.0, check = 0.0, ratio = 0.0;
};

struct MinimalityScan {
  std::vector<double> p_grid;
  int c_points = 41;
  std::vector<MinimalityRow> rows;
  double max_ratio = 0.0;
};

inline MinimalityScan minimality_scan(std::vector<double> p_grid,
                                      int c_points = 41, int workers = 0) {
  MinimalityScan scan;
  scan.p_grid = std::move(p_grid);
  scan.c_points = c_points;
  for (double p : scan.p_grid)
    require(p > 2.0, "minimality_scan: p must be > 2");
  scan.rows.assign(scan.p_grid.size() * static_cast<std::size_t>(c_points),
                   MinimalityRow{});
  parallel_for(
      scan.rows.size(),
      [&](std::size_t cell) {
        const std::size_t pi = cell / static_cast<std::size_t>(c_points);
        const std::size_t ci = cell % static_cast<std::size_t>(c_points);
        const double p = scan.p_grid[pi];
        const double lc =
            std::log(p) * double(ci) / double(c_points - 1);
        const double c = std::min(std::exp(lc), p);
        MinimalityRow row;
        row.p = p;
        row.c = c;
        row.q = minimality_ratio_q(p, c);
        row.spectrum = spectrum_term(BoundQuery{p, 1.0, row.q}, c);
        row.check = check_B(BoundQuery{p, 1.0, row.q}).value;
        row.ratio = row.spectrum / row.check;
        scan.rows[cell] = row;
      },
      workers);
  for (const auto& row : scan.rows)
    scan.max_ratio = std::max(scan.max_ratio, row.ratio);
  return scan;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_equivalence_csv(std::ostream& os,
                                  const EquivalenceScan& scan) {
  os << "p,q,hat,check,star,b1980,hat_over_check,star_over_check,"
        "b1980_over_check\n";
  for (const auto& r : scan.rows) {
    os << detail::fmt17(r.p) << ',' << detail::fmt17(r.q) << ','
       << detail::fmt17(r.hat) << ',' << detail::fmt17(r.check) << ','
       << detail::fmt17(r.star) << ',' << detail::fmt17(r.b1980) << ','
       << detail::fmt17(r.hat_over_check) << ','
       << detail::fmt17(r.star_over_check) << ','
       << detail::fmt17(r.b1980_over_check) << '\n';
  }
}

inline void write_minimality_csv(std::ostream& os,
                                 const MinimalityScan& scan) {
  os << "p,c,q,spectrum,check,ratio\n";
  for (const auto& r : scan.rows) {
    os << detail::fmt17(r.p) << ',' << detail::fmt17(r.c) << ','
       << detail::fmt17(r.q) << ',' << detail::fmt17(r.spectrum) << ','
       << detail::fmt17(r.check) << ',' << detail::fmt17(r.ratio) << '\n';
  }
}

inline nlohmann::json equivalence_summary(const EquivalenceScan& scan) {
  return {{"p_grid", scan.p_grid},
          {"q_points", scan.q_points},
          {"rows", scan.rows.size()},
          {"max_hat_over_check", scan.max_hat_over_check},
          {"max_star_over_check", scan.max_star_over_check},
          {"min_star_over_check", scan.min_star_over_check},
          {"max_check_over_star", scan.max_check_over_star},
          {"max_b1980_over_check", scan.max_b1980_over_check}};
}

inline nlohmann::json minimality_summary(const MinimalityScan& scan) {
  return {{"p_grid", scan.p_grid},
          {"c_points", scan.c_points},
          {"rows", scan.rows.size()},
          {"max_ratio", scan.max_ratio},
          {"budget", 2.0 * std::exp(1.0)}};
}

}  // namespace martbound
