#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "martbound/util.hpp"

namespace martbound {

struct MinResult {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search on [lo, hi] for a unimodal f. Tolerance is on x,
// relative to max(1, |x|). Non-finite f values are treated as +inf so the
// search backs away from singular endpoints.
template <typename F>
MinResult golden_section_min(F&& f, double lo, double hi,
                             double tol = 1e-12, int max_iter = 400) {
  require(lo <= hi, "golden_section_min: empty interval");
  auto eval = [&](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < max_iter; ++it) {
    if (b - a <= tol * std::max(1.0, std::abs(a) + std::abs(b))) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  double fm = eval(xm);
  MinResult best{xm, fm};
  if (f1 < best.value) best = {x1, f1};
  if (f2 < best.value) best = {x2, f2};
  return best;
}

// Bisection for f(x) = 0 given a sign change on [lo, hi]. The tolerance is
// relative to |x|; iterates until the bracket collapses.
template <typename F>
double bisect_root(F&& f, double lo, double hi, double tol = 1e-12,
                   int max_iter = 300) {
  double flo = f(lo), fhi = f(hi);
  require(std::isfinite(flo) && std::isfinite(fhi),
          "bisect_root: non-finite endpoint");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require((flo < 0.0) != (fhi < 0.0), "bisect_root: no sign change");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::max(1.0, std::abs(mid))) return mid;
    double fm = f(mid);
    if (!std::isfinite(fm)) {
      // Nudge toward the finite side; treat as sharing the sign of flo so
      // the bracket keeps shrinking.
      fm = flo;
    }
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace martbound
