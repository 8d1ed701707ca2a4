#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "kernmem/common.hpp"
#include "kernmem/special.hpp"

namespace kernmem {

enum class KernelKind {
  Linear,
  PolyHomogeneous,
  PolyInhomogeneous,
  Exponential,
  ExpBeta,
  SdmCube,
  SdmSphereExact,
  SdmSphereApprox,
};

// Tagged kernel description. Only the fields relevant to `kind` are used:
//   Poly*            degree
//   ExpBeta          radius, beta
//   SdmCube          n_in, bit_threshold
//   SdmSphere*       n_in, bias
struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  int degree = 1;
  double radius = 1.0;
  double beta = 1.0;
  int n_in = 0;
  int bit_threshold = 0;
  double bias = 0.0;

  static KernelSpec linear() { return {}; }
  static KernelSpec poly(int p) {
    require(p >= 1, "polynomial degree must be >= 1");
    KernelSpec s;
    s.kind = KernelKind::PolyHomogeneous;
    s.degree = p;
    return s;
  }
  static KernelSpec ipoly(int p) {
    auto s = poly(p);
    s.kind = KernelKind::PolyInhomogeneous;
    return s;
  }
  static KernelSpec exponential() {
    KernelSpec s;
    s.kind = KernelKind::Exponential;
    return s;
  }
  static KernelSpec exp_beta(double r, double beta) {
    require(r > 0.0, "Exp-beta radius must be > 0");
    require(beta > 0.0, "Exp-beta beta must be > 0");
    KernelSpec s;
    s.kind = KernelKind::ExpBeta;
    s.radius = r;
    s.beta = beta;
    return s;
  }
  static KernelSpec sdm_cube(int n_in, int r) {
    require(n_in >= 1, "SDM input dimension must be >= 1");
    require(r >= 0 && r <= n_in, "SDM bit threshold must lie in [0, n_in]");
    KernelSpec s;
    s.kind = KernelKind::SdmCube;
    s.n_in = n_in;
    s.bit_threshold = r;
    return s;
  }
  static KernelSpec sdm_sphere(int n_in, double b, bool approx = false) {
    require(n_in >= 3, "SDM sphere kernel needs n_in >= 3");
    require(b > -1.0 && b < 1.0, "SDM sphere bias must lie in (-1, 1)");
    KernelSpec s;
    s.kind = approx ? KernelKind::SdmSphereApprox : KernelKind::SdmSphereExact;
    s.n_in = n_in;
    s.bias = b;
    return s;
  }

  // k(x.y) exists, so coordinates can be dropped from the inner product.
  bool is_inner_product() const {
    return kind == KernelKind::Linear || kind == KernelKind::PolyHomogeneous ||
           kind == KernelKind::PolyInhomogeneous || kind == KernelKind::Exponential;
  }
  bool is_distance_based() const { return kind == KernelKind::ExpBeta; }
};

namespace detail {

inline double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

// Mini-grammar: linear | poly:<p> | ipoly:<p> | exp | expbeta:<r>:<beta>
//             | sdm-cube:<nin>:<r> | sdm-sphere:<nin>:<b>[:approx]
inline std::string to_string(const KernelSpec& s) {
  using detail::format_real;
  switch (s.kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::PolyHomogeneous: return "poly:" + std::to_string(s.degree);
    case KernelKind::PolyInhomogeneous: return "ipoly:" + std::to_string(s.degree);
    case KernelKind::Exponential: return "exp";
    case KernelKind::ExpBeta: return "expbeta:" + format_real(s.radius) + ":" + format_real(s.beta);
    case KernelKind::SdmCube:
      return "sdm-cube:" + std::to_string(s.n_in) + ":" + std::to_string(s.bit_threshold);
    case KernelKind::SdmSphereExact:
      return "sdm-sphere:" + std::to_string(s.n_in) + ":" + format_real(s.bias);
    case KernelKind::SdmSphereApprox:
      return "sdm-sphere:" + std::to_string(s.n_in) + ":" + format_real(s.bias) + ":approx";
  }
  return "?";
}

inline KernelSpec parse_kernel_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  const auto bad = [&]() { return DomainError("malformed kernel spec '" + text + "'"); };
  const auto to_int = [&](const std::string& v) {
    std::size_t pos = 0;
    int out = 0;
    try {
      out = std::stoi(v, &pos);
    } catch (const std::exception&) {
      throw bad();
    }
    if (pos != v.size()) throw bad();
    return out;
  };
  const auto to_real = [&](const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &pos);
    } catch (const std::exception&) {
      throw bad();
    }
    if (pos != v.size()) throw bad();
    return out;
  };
  const auto& head = parts[0];
  const auto n = parts.size();
  if (head == "linear" && n == 1) return KernelSpec::linear();
  if (head == "exp" && n == 1) return KernelSpec::exponential();
  if (head == "poly" && n == 2) return KernelSpec::poly(to_int(parts[1]));
  if (head == "ipoly" && n == 2) return KernelSpec::ipoly(to_int(parts[1]));
  if (head == "expbeta" && n == 3) return KernelSpec::exp_beta(to_real(parts[1]), to_real(parts[2]));
  if (head == "sdm-cube" && n == 3) return KernelSpec::sdm_cube(to_int(parts[1]), to_int(parts[2]));
  if (head == "sdm-sphere" && n == 3) {
    return KernelSpec::sdm_sphere(to_int(parts[1]), to_real(parts[2]));
  }
  if (head == "sdm-sphere" && n == 4 && parts[3] == "approx") {
    return KernelSpec::sdm_sphere(to_int(parts[1]), to_real(parts[2]), true);
  }
  throw bad();
}

// SDM kernel on the hypercube: fraction of the 2^n_in addresses within
// `r` bits (inclusive) of two points that differ in `delta` bits.
//
// With i the number of agreeing positions where the address matches both
// points and j the number of differing positions where it matches the
// first point, the address lies within r of both iff i + j >= n - r and
// j <= delta - (n - r - i).
inline double sdm_cube_kernel(int n_in, int r, int delta) {
  require(n_in >= 1, "SDM input dimension must be >= 1");
  require(delta >= 0 && delta <= n_in, "bit difference must lie in [0, n_in]");
  require(r >= 0 && r <= n_in, "bit threshold must lie in [0, n_in]");
  const double log_norm = n_in * std::numbers::ln2;
  const int i_lo = std::max(0, n_in - r - delta / 2);
  const int i_hi = n_in - delta;
  double total = 0.0;
  for (int i = i_lo; i <= i_hi; ++i) {
    const int need = n_in - r - i;
    const int j_lo = std::max(0, need);
    const int j_hi = std::min(delta, delta - need);
    const double lci = log_binomial(n_in - delta, i);
    for (int j = j_lo; j <= j_hi; ++j) {
      total += std::exp(lci + log_binomial(delta, j) - log_norm);
    }
  }
  return total;
}

// SDM kernel on the hypersphere S^(n_in - 1): overlap area of the two caps
// {z : z.x >= b}, {z : z.y >= b} as a fraction of the sphere, by adaptive
// Simpson quadrature of
//   (n-2)/(2 pi) int_{ax}^{ab} sin(t)^(n-2) B[1 - tan^2(ax)/tan^2(t); (n-2)/2, 1/2] dt
// with ax = acos(x.y)/2 and ab = acos(b).
inline double sdm_sphere_kernel_exact(int n_in, double b, double cos_angle,
                                      double rel_tol = 1e-10) {
  require(n_in >= 3, "SDM sphere kernel needs n_in >= 3");
  require(b > -1.0 && b < 1.0, "SDM sphere bias must lie in (-1, 1)");
  require(cos_angle >= -1.0 - 1e-12 && cos_angle <= 1.0 + 1e-12,
          "cosine of the angle must lie in [-1, 1]");
  const double c = std::clamp(cos_angle, -1.0, 1.0);
  const double ax = 0.5 * std::acos(c);
  const double ab = std::acos(b);
  if (ax >= ab) return 0.0;
  const double a = 0.5 * (n_in - 2);
  const double tan_ax2 = std::tan(ax) * std::tan(ax);
  const auto integrand = [&](double t) {
    const double s = std::sin(t);
    if (s <= 0.0) return 0.0;
    const double tt = std::tan(t);
    double z = 1.0 - tan_ax2 / (tt * tt);
    if (!(z > 0.0)) return 0.0;
    if (z > 1.0) z = 1.0;
    return std::pow(s, n_in - 2) * incomplete_beta(z, a, 0.5);
  };
  const double integral = adaptive_simpson(integrand, ax, ab, 0.0, rel_tol);
  return (n_in - 2) / (2.0 * std::numbers::pi) * integral;
}

// Sparse-regime approximation (valid for b close to 1): overlap volume of
// the two projected (n_in - 1)-balls of radius sin(acos b) whose centres
// are 2*delta apart, delta = |x - y| / 2.
inline double sdm_sphere_kernel_approx(int n_in, double b, double delta) {
  require(n_in >= 2, "SDM sphere kernel needs n_in >= 2");
  require(b > -1.0 && b < 1.0, "SDM sphere bias must lie in (-1, 1)");
  require(delta >= 0.0, "half-distance must be >= 0");
  const double bhat = std::sin(std::acos(b));
  if (delta >= bhat) return 0.0;
  const double ratio = delta / bhat;
  return std::pow(bhat, n_in - 1) / (2.0 * std::numbers::pi) *
         incomplete_beta(1.0 - ratio * ratio, 0.5 * n_in, 0.5);
}

inline double kernel_of_inner_product(const KernelSpec& spec, double dot) {
  switch (spec.kind) {
    case KernelKind::Linear: return dot;
    case KernelKind::PolyHomogeneous: return detail::ipow(dot, spec.degree);
    case KernelKind::PolyInhomogeneous: return detail::ipow(dot + 1.0, spec.degree);
    case KernelKind::Exponential: return std::exp(dot);
    default: throw DomainError("kernel " + to_string(spec) + " is not an inner-product kernel");
  }
}

inline double kernel_of_sq_distance(const KernelSpec& spec, double sq_dist) {
  require(spec.kind == KernelKind::ExpBeta, "kernel is not distance based");
  return std::exp(-std::pow(std::sqrt(sq_dist) / spec.radius, spec.beta));
}

inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vec>& x,
                          const Eigen::Ref<const Vec>& y) {
  require(x.size() == y.size(), "kernel arguments differ in dimension");
  switch (spec.kind) {
    case KernelKind::Linear:
    case KernelKind::PolyHomogeneous:
    case KernelKind::PolyInhomogeneous:
    case KernelKind::Exponential: return kernel_of_inner_product(spec, x.dot(y));
    case KernelKind::ExpBeta: return kernel_of_sq_distance(spec, (x - y).squaredNorm());
    case KernelKind::SdmCube: {
      require(x.size() == spec.n_in, "SDM kernel dimension mismatch");
      require(is_bipolar(x) && is_bipolar(y), "SDM cube kernel needs bipolar inputs");
      int delta = 0;
      for (Eigen::Index i = 0; i < x.size(); ++i) delta += x[i] != y[i];
      return sdm_cube_kernel(spec.n_in, spec.bit_threshold, delta);
    }
    case KernelKind::SdmSphereExact:
    case KernelKind::SdmSphereApprox: {
      require(x.size() == spec.n_in, "SDM kernel dimension mismatch");
      require(std::abs(x.norm() - 1.0) <= 1e-9 && std::abs(y.norm() - 1.0) <= 1e-9,
              "SDM sphere kernel needs unit-norm inputs");
      if (spec.kind == KernelKind::SdmSphereExact) {
        return sdm_sphere_kernel_exact(spec.n_in, spec.bias, x.dot(y));
      }
      return sdm_sphere_kernel_approx(spec.n_in, spec.bias, 0.5 * (x - y).norm());
    }
  }
  throw DomainError("unknown kernel kind");
}

// Vector (K(x^mu, s))_mu over the columns of x.
inline Vec kernel_column(const KernelSpec& spec, const Mat& x, const Eigen::Ref<const Vec>& s) {
  require(x.rows() == s.size(), "kernel arguments differ in dimension");
  Vec out(x.cols());
  if (spec.is_inner_product()) {
    const Vec dots = x.transpose() * s;
    for (Eigen::Index mu = 0; mu < x.cols(); ++mu) out[mu] = kernel_of_inner_product(spec, dots[mu]);
    return out;
  }
  for (Eigen::Index mu = 0; mu < x.cols(); ++mu) out[mu] = kernel_eval(spec, x.col(mu), s);
  return out;
}

// Cross kernel matrix K(a^i, b^j), columns as points.
inline Mat kernel_matrix(const KernelSpec& spec, const Mat& a, const Mat& b) {
  require(a.rows() == b.rows(), "kernel arguments differ in dimension");
  Mat out(a.cols(), b.cols());
  if (spec.is_inner_product()) {
    const Mat g = a.transpose() * b;
    return g.unaryExpr([&](double d) { return kernel_of_inner_product(spec, d); });
  }
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) = kernel_eval(spec, a.col(i), b.col(j));
  }
  return out;
}

// Symmetric Gram matrix of the columns of x. Each entry is computed
// independently from its pair of columns; the lower triangle mirrors the
// upper one.
inline Mat kernel_matrix(const KernelSpec& spec, const Mat& x) {
  const Eigen::Index m = x.cols();
  Mat k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = kernel_eval(spec, x.col(i), x.col(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace kernmem
