#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kernmem/common.hpp"

namespace kernmem {

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log C(n, k); -inf outside 0 <= k <= n.
inline double log_binomial(double n, double k) {
  if (k < 0.0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

// x^a (1-x)^b / a * CF(a, b, x) = B(x; a, b), valid for x < (a+1)/(a+b+2).
inline double incomplete_beta_lower(double x, double a, double b) {
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x));
  return front / a * beta_continued_fraction(a, b, x);
}

}  // namespace detail

// Regularized incomplete beta I_z(a, b).
inline double regularized_incomplete_beta(double z, double a, double b) {
  require(z >= 0.0 && z <= 1.0, "incomplete beta needs 0 <= z <= 1");
  require(a > 0.0 && b > 0.0, "incomplete beta needs a, b > 0");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;
  const double lb = log_beta(a, b);
  if (z < (a + 1.0) / (a + b + 2.0)) {
    return detail::incomplete_beta_lower(z, a, b) * std::exp(-lb);
  }
  return 1.0 - detail::incomplete_beta_lower(1.0 - z, b, a) * std::exp(-lb);
}

// Incomplete beta B(z; a, b) = integral_0^z t^(a-1) (1-t)^(b-1) dt.
inline double incomplete_beta(double z, double a, double b) {
  require(z >= 0.0 && z <= 1.0, "incomplete beta needs 0 <= z <= 1");
  require(a > 0.0 && b > 0.0, "incomplete beta needs a, b > 0");
  if (z == 0.0) return 0.0;
  const double complete = std::exp(log_beta(a, b));
  if (z == 1.0) return complete;
  if (z < (a + 1.0) / (a + b + 2.0)) return detail::incomplete_beta_lower(z, a, b);
  return complete - detail::incomplete_beta_lower(1.0 - z, b, a);
}

inline double erfc(double x) { return std::erfc(x); }

// Principal branch W0 of the Lambert function, x >= -1/e.
inline double lambert_w0(double x) {
  constexpr double kBranch = -0.36787944117144233;
  require(x >= kBranch - 1e-17, "lambert_w0 needs x >= -1/e");
  if (x == 0.0) return 0.0;
  if (x <= kBranch) return -1.0;
  double w;
  if (x < -0.25) {
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x);
    w *= 1.0 - std::log1p(w) / (2.0 + w);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

namespace detail {

template <class F>
double simpson_recursive(const F& f, double a, double b, double fa, double fm, double fb,
                         double whole, double tol, int depth, long& evaluations,
                         long max_evaluations) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  evaluations += 2;
  if (evaluations > max_evaluations) {
    throw ConvergenceError("adaptive Simpson exceeded " + std::to_string(max_evaluations) +
                           " subdivisions");
  }
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recursive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evaluations,
                           max_evaluations) +
         simpson_recursive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evaluations,
                           max_evaluations);
}

}  // namespace detail

// Adaptive Simpson quadrature of f on [a, b]. The interval is first split
// into `initial_panels` pieces; each piece is refined until the Richardson
// error estimate falls below its share of max(abs_tol, rel_tol * |I|),
// where |I| is a coarse estimate of the integral magnitude.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                        int initial_panels = 16, long max_evaluations = 1'000'000) {
  if (a == b) return 0.0;
  const double h = (b - a) / initial_panels;
  std::vector<double> fx(2 * initial_panels + 1);
  for (int i = 0; i <= 2 * initial_panels; ++i) fx[i] = f(a + 0.5 * h * i);
  long evaluations = 2 * initial_panels + 1;
  double coarse = 0.0;
  for (int p = 0; p < initial_panels; ++p) {
    coarse += h / 6.0 * (fx[2 * p] + 4.0 * fx[2 * p + 1] + fx[2 * p + 2]);
  }
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse)) / initial_panels;
  double total = 0.0;
  for (int p = 0; p < initial_panels; ++p) {
    const double lo = a + h * p;
    const double whole = h / 6.0 * (fx[2 * p] + 4.0 * fx[2 * p + 1] + fx[2 * p + 2]);
    total += detail::simpson_recursive(f, lo, lo + h, fx[2 * p], fx[2 * p + 1], fx[2 * p + 2],
                                       whole, tol, 50, evaluations, max_evaluations);
  }
  return total;
}

}  // namespace kernmem
