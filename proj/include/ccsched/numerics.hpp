#pragma once

// Special functions and scalar 1-D solvers. Everything here is a template on
// the scalar type; only double is exercised by the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "ccsched/errors.hpp"

namespace ccsched {

struct Tolerance {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_iter = 200;

  void validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("Tolerance: abs_tol must be > 0");
    if (!(rel_tol >= 0.0)) throw DomainError("Tolerance: rel_tol must be >= 0");
    if (max_iter < 1) throw DomainError("Tolerance: max_iter must be >= 1");
  }
};

/// Principal branch W0 of the Lambert W function, i.e. the w >= -1 solving
/// w * exp(w) = x. Halley iteration from a log-based starting point, with the
/// branch-point series used close to x = -1/e.
template <typename Scalar>
Scalar lambert_w0(Scalar x, const Tolerance& tol = {}) {
  using std::exp;
  using std::log;
  using std::sqrt;
  tol.validate();
  const Scalar branch = -exp(Scalar(-1));
  if (!(x >= branch)) throw DomainError("lambert_w0: x must be >= -1/e");
  if (x == branch) return Scalar(-1);
  if (x == Scalar(0)) return Scalar(0);

  Scalar w;
  if (x < Scalar(-0.25)) {
    const Scalar q = Scalar(2) * (std::numbers::e_v<Scalar> * x + Scalar(1));
    const Scalar p = q > Scalar(0) ? sqrt(q) : Scalar(0);
    w = Scalar(-1) + p - p * p / Scalar(3) + Scalar(11) / Scalar(72) * p * p * p;
  } else if (x < Scalar(3)) {
    w = log(Scalar(1) + x);
    if (x > Scalar(0.5)) w *= Scalar(0.8);
  } else {
    const Scalar l1 = log(x);
    const Scalar l2 = log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < tol.max_iter; ++it) {
    const Scalar ew = exp(w);
    const Scalar f = w * ew - x;
    const Scalar wp1 = w + Scalar(1);
    if (wp1 == Scalar(0)) return w;
    const Scalar denom = ew * wp1 - (w + Scalar(2)) * f / (Scalar(2) * wp1);
    if (denom == Scalar(0)) return w;
    Scalar step = f / denom;
    Scalar next = w - step;
    if (next < Scalar(-1)) next = (w + Scalar(-1)) / Scalar(2);
    step = w - next;
    w = next;
    using std::abs;
    if (abs(step) <= tol.rel_tol * (Scalar(1) + abs(w))) return w;
  }
  throw SolverError("lambert_w0: no convergence");
}

namespace detail {

// e^x E1(x) for x >= 1 by the modified Lentz continued fraction.
template <typename Scalar>
Scalar e1_scaled_continued_fraction(Scalar x, const Tolerance& tol) {
  using std::abs;
  const Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar b = x + Scalar(1);
  Scalar c = Scalar(1) / tiny;
  Scalar d = Scalar(1) / b;
  Scalar h = d;
  const int limit = std::max(tol.max_iter, 1000);
  for (int i = 1; i <= limit; ++i) {
    const Scalar an = -Scalar(i) * Scalar(i);
    b += Scalar(2);
    d = Scalar(1) / (an * d + b);
    c = b + an / c;
    const Scalar del = c * d;
    h *= del;
    if (abs(del - Scalar(1)) <= eps) return h;
  }
  throw SolverError("exp_integral_e1: continued fraction did not converge");
}

// E1(x) for 0 < x < 1 by its power series.
template <typename Scalar>
Scalar e1_series(Scalar x) {
  using std::abs;
  using std::log;
  const Scalar euler = std::numbers::egamma_v<Scalar>;
  Scalar sum = Scalar(0);
  Scalar term = Scalar(1);
  for (int k = 1; k < 200; ++k) {
    term *= -x / Scalar(k);
    const Scalar add = term / Scalar(k);
    sum += add;
    if (abs(add) <= std::numeric_limits<Scalar>::epsilon() * abs(sum)) break;
  }
  return -euler - log(x) - sum;
}

}  // namespace detail

/// Exponential integral E1(x) = int_1^inf exp(-x t) / t dt, x > 0.
template <typename Scalar>
Scalar exp_integral_e1(Scalar x, const Tolerance& tol = {}) {
  using std::exp;
  if (!(x > Scalar(0))) throw DomainError("exp_integral_e1: x must be > 0");
  if (x < Scalar(1)) return detail::e1_series(x);
  return exp(-x) * detail::e1_scaled_continued_fraction(x, tol);
}

/// exp(x) * E1(x), evaluated without forming either factor for large x.
template <typename Scalar>
Scalar exp_integral_e1_scaled(Scalar x, const Tolerance& tol = {}) {
  using std::exp;
  if (!(x > Scalar(0))) throw DomainError("exp_integral_e1_scaled: x must be > 0");
  if (x < Scalar(1)) return exp(x) * detail::e1_series(x);
  return detail::e1_scaled_continued_fraction(x, tol);
}

template <typename Scalar>
struct Maximum {
  Scalar argmax;
  Scalar value;
};

inline constexpr int kCoarseGridPoints = 512;

/// Global maximization of f on [lo, hi]: a 512-point grid scan locates the
/// best cell, golden-section search then refines inside its two neighbours.
template <typename Scalar, typename F>
Maximum<Scalar> maximize_1d(F&& f, Scalar lo, Scalar hi, const Tolerance& tol = {}) {
  using std::abs;
  tol.validate();
  if (!(lo < hi)) throw DomainError("maximize_1d: requires lo < hi");
  const int n = kCoarseGridPoints;
  const Scalar step = (hi - lo) / Scalar(n - 1);
  int best = 0;
  Scalar best_val = -std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < n; ++i) {
    const Scalar x = i == n - 1 ? hi : lo + step * Scalar(i);
    const Scalar v = f(x);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  Maximum<Scalar> result{best == n - 1 ? hi : lo + step * Scalar(best), best_val};

  Scalar a = best == 0 ? lo : lo + step * Scalar(best - 1);
  Scalar b = best >= n - 2 ? hi : lo + step * Scalar(best + 1);
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = b - inv_phi * (b - a);
  Scalar x2 = a + inv_phi * (b - a);
  Scalar f1 = f(x1);
  Scalar f2 = f(x2);
  for (int it = 0; it < tol.max_iter; ++it) {
    if (b - a <= tol.abs_tol + tol.rel_tol * abs(a + b) * Scalar(0.5)) break;
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const std::array<std::pair<Scalar, Scalar>, 4> candidates{
      {{x1, f1}, {x2, f2}, {a, f(a)}, {b, f(b)}}};
  for (const auto& [x, v] : candidates) {
    if (v > result.value) result = {x, v};
  }
  return result;
}

/// Root of g(c) = target for g increasing on [lo, hi]. The upper end of the
/// bracket is doubled (and the lower end pushed down) up to 64 times when the
/// target is not enclosed. Illinois-modified regula falsi with bisection
/// fallback.
template <typename Scalar, typename G>
Scalar solve_increasing_root(G&& g, Scalar target, Scalar lo, Scalar hi,
                             const Tolerance& tol = {}) {
  using std::abs;
  tol.validate();
  if (!(lo < hi)) throw DomainError("solve_increasing_root: requires lo < hi");
  constexpr int kExpansionCap = 64;
  Scalar flo = g(lo) - target;
  Scalar fhi = g(hi) - target;
  for (int i = 0; fhi < Scalar(0) && i < kExpansionCap; ++i) {
    const Scalar width = hi - lo;
    lo = hi;
    flo = fhi;
    hi = lo + Scalar(2) * width;
    fhi = g(hi) - target;
  }
  for (int i = 0; flo > Scalar(0) && i < kExpansionCap; ++i) {
    const Scalar width = hi - lo;
    hi = lo;
    fhi = flo;
    lo = hi - Scalar(2) * width;
    flo = g(lo) - target;
  }
  if (!(flo <= Scalar(0) && fhi >= Scalar(0)))
    throw SolverError("solve_increasing_root: no sign change after bracket expansion");
  if (flo == Scalar(0)) return lo;
  if (fhi == Scalar(0)) return hi;

  int side = 0;
  for (int it = 0; it < tol.max_iter; ++it) {
    Scalar c = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(c > lo && c < hi)) c = Scalar(0.5) * (lo + hi);
    const Scalar fc = g(c) - target;
    if (abs(fc) <= tol.abs_tol) return c;
    if (fc < Scalar(0)) {
      lo = c;
      flo = fc;
      if (side == -1) fhi *= Scalar(0.5);
      side = -1;
    } else {
      hi = c;
      fhi = fc;
      if (side == 1) flo *= Scalar(0.5);
      side = 1;
    }
    if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * (abs(lo) + abs(hi)))
      return abs(flo) < abs(fhi) ? lo : hi;
  }
  throw SolverError("solve_increasing_root: no convergence within max_iter");
}

}  // namespace ccsched
