#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "kernmem/common.hpp"
#include "kernmem/special.hpp"

namespace kernmem {

enum class CapacityModel { GaussianExpBeta, SphereExpBeta, BipolarExpBeta, SvpLinear };

// A predicted M_max, kept as a natural log. Regime problems are attached as
// flags; only hard domain violations throw.
struct CapacityPrediction {
  CapacityModel model = CapacityModel::GaussianExpBeta;
  double n = 0.0;
  double log_value = 0.0;
  std::vector<std::string> flags;

  double value() const { return std::exp(log_value); }
  double log10_value() const { return log_value / std::numbers::ln10; }
};

inline double sigma_max_sq(double r, double n) {
  require(r >= 0.0, "radius must be >= 0");
  require(n >= 1.0, "dimension must be >= 1");
  return r * r / n;
}

inline double rho_max(double r, double n) {
  require(r >= 0.0, "radius must be >= 0");
  require(n >= 1.0, "dimension must be >= 1");
  return r * r / (4.0 * n);
}

// log of sqrt(2 sqrt(pi N) (1 - 2 s2)) exp[N (1 - 2 s2)^2 / 8].
inline CapacityPrediction capacity_bound_gaussian(double n, double s2) {
  require(n >= 1.0, "dimension must be >= 1");
  require(s2 >= 0.0 && s2 < 0.5, "Gaussian capacity bound needs 0 <= sigma_max^2 < 1/2");
  const double a = 1.0 - 2.0 * s2;
  CapacityPrediction p{CapacityModel::GaussianExpBeta, n,
                       0.5 * std::log(2.0 * std::sqrt(std::numbers::pi * n) * a) + n * a * a / 8.0,
                       {}};
  if (n < 25.0) p.flags.emplace_back("small-n");
  if (s2 == 0.0) p.flags.emplace_back("zero-noise (bound is loose)");
  return p;
}

// Same bound reached from the basin radius: sigma_max^2 = r^2 / N.
inline CapacityPrediction capacity_bound_gaussian_from_radius(double n, double r) {
  return capacity_bound_gaussian(n, sigma_max_sq(r, n));
}

// log of sqrt(sqrt(8 pi N) (1 - 2 r^2)) exp[N (1 - 2 r^2)^2 / 4].
inline CapacityPrediction capacity_bound_sphere(double n, double r) {
  require(n >= 1.0, "dimension must be >= 1");
  require(r >= 0.0 && r * r < 0.5, "sphere capacity bound needs 0 <= r^2 < 1/2");
  const double a = 1.0 - 2.0 * r * r;
  CapacityPrediction p{CapacityModel::SphereExpBeta, n,
                       0.5 * std::log(std::sqrt(8.0 * std::numbers::pi * n) * a) + n * a * a / 4.0,
                       {}};
  if (n < 25.0) p.flags.emplace_back("small-n");
  return p;
}

// With ft = 2 f (1 - f):
// log of 2 (pi N / (2 ft (1 - ft)))^(1/4) (ft - 4 rho)^(1/2) exp[N (ft - 4 rho)^2 / (4 ft (1 - ft))].
inline CapacityPrediction capacity_bound_bipolar(double n, double f, double rho) {
  require(n >= 1.0, "dimension must be >= 1");
  require(f > 0.0 && f < 1.0, "sparseness f must lie in (0, 1)");
  const double ft = 2.0 * f * (1.0 - f);
  require(rho >= 0.0 && rho < ft / 4.0, "bipolar capacity bound needs 0 <= rho_max < ft/4");
  const double a = ft - 4.0 * rho;
  const double v = ft * (1.0 - ft);
  CapacityPrediction p{CapacityModel::BipolarExpBeta, n,
                       std::log(2.0) + 0.25 * std::log(std::numbers::pi * n / (2.0 * v)) +
                           0.5 * std::log(a) + n * a * a / (4.0 * v),
                       {}};
  if (n < 25.0) p.flags.emplace_back("small-n");
  return p;
}

// N / (2 W0(N / 2)).
inline double svp_capacity(double n) {
  require(n >= 2.0, "svp_capacity needs n >= 2");
  return n / (2.0 * lambert_w0(0.5 * n));
}

struct ErfcBoundCheck {
  double exact = 0.0;  // 1 / erfc(x)
  double bound = 0.0;  // sqrt(pi) x exp(x^2)
};

inline ErfcBoundCheck erfc_inverse_bound_check(double x) {
  require(x > 0.5, "erfc bound check needs x > 0.5");
  return {1.0 / erfc(x), std::sqrt(std::numbers::pi) * x * std::exp(x * x)};
}

}  // namespace kernmem
