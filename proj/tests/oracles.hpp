#pragma once

// Independent reference implementations used by the tests. None of these
// call into the library's numerical code paths; they are slow, obvious
// versions of the same quantities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Fraction of all 2^n addresses within r bits of both x = (+1,..,+1) and
// y = x with the first delta bits flipped.
inline double sdm_cube_enumerate(int n, int r, int delta) {
  const std::uint32_t total = 1u << n;
  const std::uint32_t ymask = delta == 0 ? 0u : ((1u << delta) - 1u);
  std::uint64_t hits = 0;
  for (std::uint32_t z = 0; z < total; ++z) {
    // bit set = address coordinate is -1
    const int dx = __builtin_popcount(z);
    const int dy = __builtin_popcount(z ^ ymask);
    if (dx <= r && dy <= r) ++hits;
  }
  return static_cast<double>(hits) / total;
}

// Composite Simpson on a fixed fine grid.
template <class F>
double simpson(F f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Fraction of S^(n-1) in the cap {z : z.x >= b}, from the height density
// (1 - t^2)^((n-3)/2) integrated directly.
inline double cap_fraction(int n, double b) {
  const auto dens = [n](double t) { return std::pow(std::max(0.0, 1.0 - t * t), 0.5 * (n - 3)); };
  return simpson(dens, b, 1.0, 200000) / simpson(dens, -1.0, 1.0, 200000);
}

// Cap-overlap fraction by direct importance sampling with the standard
// library's generators: draw the height t from its density on [b, 1] by
// inverse-CDF on a tabulated grid, then a uniform direction orthogonal to x.
// x must be e_0 and y lie in span(e_0, e_1).
inline double cap_overlap_mc(int n, double b, double cos_xy, long samples, std::uint64_t seed,
                             double* sem) {
  const int grid = 20000;
  std::vector<double> t(grid + 1), cdf(grid + 1, 0.0);
  for (int i = 0; i <= grid; ++i) t[i] = b + (1.0 - b) * i / grid;
  for (int i = 1; i <= grid; ++i) {
    const auto d = [n](double u) { return std::pow(std::max(0.0, 1.0 - u * u), 0.5 * (n - 3)); };
    const double mid = 0.5 * (t[i - 1] + t[i]);
    cdf[i] = cdf[i - 1] + (t[i] - t[i - 1]) * (d(t[i - 1]) + 4.0 * d(mid) + d(t[i])) / 6.0;
  }
  for (double& c : cdf) c /= cdf.back();
  const double sin_xy = std::sqrt(std::max(0.0, 1.0 - cos_xy * cos_xy));
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> nrm(0.0, 1.0);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    const double u = uni(gen);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto k = std::clamp<long>(it - cdf.begin(), 1, grid);
    const double frac = (u - cdf[k - 1]) / std::max(1e-300, cdf[k] - cdf[k - 1]);
    const double h = t[k - 1] + frac * (t[k] - t[k - 1]);
    // Component of a uniform unit vector in the (n-1)-dim orthogonal
    // complement along e_1.
    double e1 = 0.0, norm2 = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double g = nrm(gen);
      if (i == 0) e1 = g;
      norm2 += g * g;
    }
    const double zy = h * cos_xy + std::sqrt(1.0 - h * h) * e1 / std::sqrt(norm2) * sin_xy;
    if (zy >= b) ++hits;
  }
  const double p = static_cast<double>(hits) / samples;
  const double cap = cap_fraction(n, b);
  if (sem) *sem = cap * std::sqrt(p * (1.0 - p) / (samples - 1));
  return cap * p;
}

// Hard-margin SVM by brute force over active sets. Without bias the optimum
// alpha >= 0 of  sum(alpha) - 1/2 alpha' Q alpha  satisfies Q_SS alpha_S = 1
// on its support S; with a bias theta (f = sum c K - theta) the support
// system gains the row y_S' alpha_S = 0. Every S is tried and the
// KKT-feasible solution with the largest objective kept. Exponential in M;
// for M <= 12 only. Returns alpha and writes theta.
inline Vec hard_margin_active_set(const Mat& k, const Vec& y, bool with_bias = false,
                                  double* theta_out = nullptr) {
  const auto m = static_cast<int>(y.size());
  const Mat q = (y * y.transpose()).cwiseProduct(k);
  Vec best = Vec::Constant(m, std::numeric_limits<double>::quiet_NaN());
  double best_obj = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1u) s.push_back(i);
    }
    const auto ns = static_cast<Eigen::Index>(s.size());
    const Eigen::Index dim = ns + (with_bias ? 1 : 0);
    Mat sys = Mat::Zero(dim, dim);
    Vec rhs = Vec::Ones(dim);
    for (Eigen::Index a = 0; a < ns; ++a) {
      for (Eigen::Index b = 0; b < ns; ++b) sys(a, b) = q(s[a], s[b]);
      if (with_bias) {
        sys(a, ns) = -y[s[a]];
        sys(ns, a) = y[s[a]];
      }
    }
    if (with_bias) rhs[ns] = 0.0;
    Eigen::FullPivLU<Mat> lu(sys);
    if (!lu.isInvertible()) continue;
    const Vec sol = lu.solve(rhs);
    if ((sol.head(ns).array() <= 0.0).any()) continue;
    Vec alpha = Vec::Zero(m);
    for (Eigen::Index a = 0; a < ns; ++a) alpha[s[a]] = sol[a];
    const double theta = with_bias ? sol[ns] : 0.0;
    const Vec g = q * alpha - theta * y;
    if ((g.array() < 1.0 - 1e-9).any()) continue;
    const double obj = alpha.sum() - 0.5 * alpha.dot(q * alpha);
    if (obj > best_obj) {
      best_obj = obj;
      best = alpha;
      if (theta_out) *theta_out = theta;
    }
  }
  return best;
}

// Moore-Penrose pseudoinverse through the normal equations on a
// full-column-rank matrix: (A'A)^-1 A'.
inline Mat pinv_full_column_rank(const Mat& a) {
  return (a.transpose() * a).ldlt().solve(a.transpose());
}

// Incomplete beta B(z; a, b) from its power series
//   z^a sum_n (1 - b)_n / n! z^n / (a + n),
// summed in long double until the terms stop mattering. Converges for z < 1.
inline double incomplete_beta_series(double z, double a, double b) {
  long double sum = 0.0L, coef = 1.0L, zn = 1.0L;
  for (int n = 0; n < 200000; ++n) {
    const long double term = coef * zn / (a + n);
    sum += term;
    if (n > 10 && std::fabs(static_cast<double>(term)) < 1e-22 * std::fabs(static_cast<double>(sum))) break;
    coef *= (n + 1 - b) / static_cast<long double>(n + 1);
    zn *= z;
  }
  return static_cast<double>(std::pow(static_cast<long double>(z), static_cast<long double>(a)) * sum);
}

}  // namespace oracle
