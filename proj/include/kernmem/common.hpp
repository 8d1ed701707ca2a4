#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kernmem {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Precondition or domain violation in a library call (bad dimension,
// out-of-range parameter, malformed file). The CLI maps it to exit code 1.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An iterative or sampling procedure could not complete (quadrature
// subdivision limit, pattern collision budget exhausted).
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

// sgn with sgn(0) = +1.
inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

inline Vec sgn(const Vec& v) { return v.unaryExpr([](double x) { return sgn(x); }); }

inline bool is_bipolar(const Eigen::Ref<const Mat>& m) {
  return (m.array().abs() == 1.0).all();
}

inline const double kInvE = std::exp(-1.0);

}  // namespace kernmem
