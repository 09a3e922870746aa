#pragma once

// Root isolation for the transcendental characteristic equations of the
// reduced boundary problems.  Every equation is rewritten in a product form
// that is free of poles, so plain sign-change scanning plus bisection works
// on the whole half-line.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "capindex/errors.hpp"

namespace capindex {

enum class Equation {
  TanEq,         // tan x = x          ->  sin x - x cos x = 0
  CotEq,         // cot x = -x         ->  cos x + x sin x = 0
  CothEq,        // coth x = x         ->  x tanh x - 1    = 0
  FredholmCyl,   // cos x + x sin x = 0 (same locus as CotEq; kept distinct
                 //                      so the equivalence is testable)
  CatenoidBdry,  // cosh x = x sinh x  ->  cosh x - x sinh x = 0
};

struct RootSpec {
  Equation equation;
  double range_max;  // search on (0, range_max]
};

namespace detail {

inline double root_fn(Equation eq, double x) {
  switch (eq) {
    case Equation::TanEq:
      return std::sin(x) - x * std::cos(x);
    case Equation::CotEq:
    case Equation::FredholmCyl:
      return std::cos(x) + x * std::sin(x);
    case Equation::CothEq:
      return x * std::tanh(x) - 1.0;
    case Equation::CatenoidBdry:
      return std::cosh(x) - x * std::sinh(x);
  }
  return 0.0;
}

inline double root_dfn(Equation eq, double x) {
  switch (eq) {
    case Equation::TanEq:
      return x * std::sin(x);
    case Equation::CotEq:
    case Equation::FredholmCyl:
      return x * std::cos(x);
    case Equation::CothEq: {
      const double c = std::cosh(x);
      return std::tanh(x) + x / (c * c);
    }
    case Equation::CatenoidBdry:
      return -x * std::cosh(x);
  }
  return 0.0;
}

// Bisection down to a narrow bracket, then Newton steps that are rejected
// whenever they would leave the bracket.
inline double refine_root(Equation eq, double lo, double hi) {
  double flo = root_fn(eq, lo);
  double fhi = root_fn(eq, hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int it = 0; it < 200 && (hi - lo) > 1e-4 * (1.0 + lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = root_fn(eq, mid);
    if (fm == 0.0) return mid;
    if ((flo < 0.0) != (fm < 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = root_fn(eq, x);
    if (f == 0.0) return x;
    if ((flo < 0.0) != (f < 0.0)) {
      hi = x;
    } else {
      lo = x;
    }
    const double df = root_dfn(eq, x);
    double next = (df != 0.0) ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace detail

inline double root_residual(Equation eq, double x) {
  return std::abs(detail::root_fn(eq, x)) / (1.0 + std::abs(x));
}

/// All roots of the requested equation in (0, range_max], strictly increasing.
inline std::vector<double> enumerate_roots(const RootSpec& spec) {
  if (!(spec.range_max > 0.0)) throw EmptyRange("enumerate_roots: range_max must be positive");
  const Equation eq = spec.equation;
  const double step = std::min(1e-2, M_PI / 100.0);

  std::vector<double> roots;
  auto scan = [&](double lo, double hi, double dx, bool first, auto&& self) -> void {
    double a = lo;
    double fa = detail::root_fn(eq, a);
    bool prev_cell_hit = false;
    while (a < hi) {
      const double b = std::min(a + dx, hi);
      const double fb = detail::root_fn(eq, b);
      // fa == 0 at the scan origin is the high-order zero of the product
      // form at x = 0 seen through rounding, not a root of the equation
      const bool hit = (fa == 0.0 && !first) || ((fa < 0.0) != (fb < 0.0));
      if (hit) {
        if (prev_cell_hit && dx > 1e-6) {
          // two sign changes in adjacent cells: rescan both finer
          roots.pop_back();
          self(a - dx, b, dx / 100.0, false, self);
        } else {
          roots.push_back(detail::refine_root(eq, a, b));
        }
      }
      prev_cell_hit = hit;
      a = b;
      fa = fb;
      first = false;
    }
  };
  scan(std::min(step, 0.5 * spec.range_max), spec.range_max, step, true, scan);

  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double x : roots) {
    if (x <= 0.0 || x > spec.range_max) continue;
    if (!out.empty() && x - out.back() < 1e-8) continue;
    out.push_back(x);
  }
  return out;
}

/// Smallest root in (0, range_max]; NoRootInRange if the list is empty.
inline double first_root(const RootSpec& spec) {
  const auto roots = enumerate_roots(spec);
  if (roots.empty()) throw NoRootInRange("first_root: no root in (0, range_max]");
  return roots.front();
}

inline double first_root(Equation eq, double range_max = 20.0) {
  return first_root(RootSpec{eq, range_max});
}

/// Unique positive solution of coth x = x.
inline double coth_fixed_point() {
  static const double t0 = first_root(Equation::CothEq, 10.0);
  return t0;
}

/// First positive solution of cot x = -x.
inline double first_cot_root() {
  static const double t1 = first_root(Equation::CotEq, 10.0);
  return t1;
}

}  // namespace capindex
