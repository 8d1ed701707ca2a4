#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "kernmem/common.hpp"
#include "kernmem/kernels.hpp"
#include "kernmem/rng.hpp"
#include "kernmem/special.hpp"

namespace kernmem {

enum class FeatureKind { Identity, Pairs, Poly2, Sdm };

// Explicit feature map. Sdm carries an N_phi x N_in address matrix and a
// bias; the read-out is Theta(Z x - b) with Theta(0) = 1.
struct FeatureMap {
  FeatureKind kind = FeatureKind::Identity;
  Eigen::Index n_in = 0;
  Mat addresses;
  double bias = 0.0;

  static FeatureMap identity(Eigen::Index n) { return {FeatureKind::Identity, n, {}, 0.0}; }
  static FeatureMap pairs(Eigen::Index n) {
    require(n >= 2, "pairs feature map needs n >= 2");
    return {FeatureKind::Pairs, n, {}, 0.0};
  }
  static FeatureMap poly2(Eigen::Index n) { return {FeatureKind::Poly2, n, {}, 0.0}; }
  static FeatureMap sdm(Mat z, double b) {
    require(z.rows() >= 1 && z.cols() >= 1, "SDM address matrix must be non-empty");
    const auto n = z.cols();
    return {FeatureKind::Sdm, n, std::move(z), b};
  }

  Eigen::Index n_phi() const {
    switch (kind) {
      case FeatureKind::Identity: return n_in;
      case FeatureKind::Pairs: return n_in * (n_in - 1) / 2;
      case FeatureKind::Poly2: return 1 + 2 * n_in + n_in * (n_in - 1) / 2;
      case FeatureKind::Sdm: return addresses.rows();
    }
    return 0;
  }
};

inline std::string to_string(const FeatureMap& f) {
  switch (f.kind) {
    case FeatureKind::Identity: return "identity";
    case FeatureKind::Pairs: return "pairs";
    case FeatureKind::Poly2: return "poly2";
    case FeatureKind::Sdm: return "sdm";
  }
  return "?";
}

// Orderings:
//   Pairs  x_i x_j for i < j, lexicographic
//   Poly2  1, sqrt2 x_1..sqrt2 x_N, sqrt2 x_i x_j (i < j, lexicographic), x_1^2..x_N^2
inline Vec phi_apply(const FeatureMap& map, const Eigen::Ref<const Vec>& x) {
  require(x.size() == map.n_in, "feature map input dimension mismatch");
  const Eigen::Index n = map.n_in;
  Vec out(map.n_phi());
  switch (map.kind) {
    case FeatureKind::Identity: out = x; break;
    case FeatureKind::Pairs: {
      Eigen::Index k = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) out[k++] = x[i] * x[j];
      }
      break;
    }
    case FeatureKind::Poly2: {
      const double r2 = std::numbers::sqrt2;
      Eigen::Index k = 0;
      out[k++] = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) out[k++] = r2 * x[i];
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) out[k++] = r2 * x[i] * x[j];
      }
      for (Eigen::Index i = 0; i < n; ++i) out[k++] = x[i] * x[i];
      break;
    }
    case FeatureKind::Sdm: {
      const Vec act = map.addresses * x;
      for (Eigen::Index a = 0; a < act.size(); ++a) out[a] = act[a] - map.bias >= 0.0 ? 1.0 : 0.0;
      break;
    }
  }
  return out;
}

// N_phi x M matrix whose columns are phi of the columns of x.
inline Mat phi_matrix(const FeatureMap& map, const Mat& x) {
  Mat out(map.n_phi(), x.cols());
  for (Eigen::Index mu = 0; mu < x.cols(); ++mu) out.col(mu) = phi_apply(map, x.col(mu));
  return out;
}

// Feature-space size, kept in log space because the exponential kernel
// needs 2^n features.
struct FeatureCount {
  double log_count = 0.0;
  double count() const { return std::exp(log_count); }
  // Exact value when it fits in a double's integer range, else +inf.
  double exact() const {
    return log_count < 53.0 * std::numbers::ln2 ? std::round(count())
                                                : std::numeric_limits<double>::infinity();
  }
};

// Linear -> n; homogeneous degree p on bipolar data -> C(n, p) (monomials of
// degree exactly p; lower-parity terms collapse via x_i^2 = 1 and are not
// counted); Exponential -> 2^n.
inline FeatureCount feature_dimension(KernelKind kind, Eigen::Index n, int p = 1) {
  require(n >= 1, "feature_dimension needs n >= 1");
  switch (kind) {
    case KernelKind::Linear: return {std::log(static_cast<double>(n))};
    case KernelKind::PolyHomogeneous:
      require(p >= 1 && p <= n, "feature_dimension needs 1 <= p <= n");
      return {log_binomial(static_cast<double>(n), p)};
    case KernelKind::Exponential: return {n * std::numbers::ln2};
    default: throw DomainError("feature_dimension is defined for linear, poly and exp kernels");
  }
}

enum class AddressVariant { Cube, Sphere };

// Address row a is drawn from sub-stream derive_seed(seed, a).
inline Mat gen_sdm_addresses(AddressVariant variant, Eigen::Index n_phi, Eigen::Index n_in,
                             std::uint64_t seed) {
  require(n_phi >= 1 && n_in >= 1, "gen_sdm_addresses needs n_phi >= 1 and n_in >= 1");
  Mat z(n_phi, n_in);
  for (Eigen::Index a = 0; a < n_phi; ++a) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(a)));
    if (variant == AddressVariant::Cube) {
      for (Eigen::Index i = 0; i < n_in; ++i) z(a, i) = rng.uniform() < 0.5 ? 1.0 : -1.0;
    } else {
      double norm = 0.0;
      do {
        for (Eigen::Index i = 0; i < n_in; ++i) z(a, i) = rng.normal();
        norm = z.row(a).norm();
      } while (norm == 0.0);
      z.row(a) /= norm;
    }
  }
  return z;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double sem = 0.0;
  long samples = 0;
};

// phi_SDM(x).phi_SDM(y) / N_phi over N_phi uniform sphere addresses, drawn
// one at a time so memory stays O(n_in).
inline MonteCarloEstimate sdm_sphere_kernel_mc(const Eigen::Ref<const Vec>& x,
                                               const Eigen::Ref<const Vec>& y, double b,
                                               long n_phi, std::uint64_t seed) {
  require(x.size() == y.size() && x.size() >= 2, "sdm_sphere_kernel_mc dimension mismatch");
  require(n_phi >= 2, "sdm_sphere_kernel_mc needs at least two addresses");
  Rng rng(seed);
  Vec z(x.size());
  long hits = 0;
  for (long a = 0; a < n_phi; ++a) {
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
      norm = z.norm();
    } while (norm == 0.0);
    if (z.dot(x) >= b * norm && z.dot(y) >= b * norm) ++hits;
  }
  const double p = static_cast<double>(hits) / n_phi;
  return {p, std::sqrt(p * (1.0 - p) / (n_phi - 1)), n_phi};
}

// Same kernel by importance sampling: addresses are drawn uniformly from the
// cap around x (so every draw is active for x) and the hit rate for y is
// scaled by the cap fraction. Usable when b is close to 1, where uniform
// addresses essentially never land in a cap.
inline MonteCarloEstimate sdm_sphere_kernel_mc_conditional(const Eigen::Ref<const Vec>& x,
                                                           const Eigen::Ref<const Vec>& y,
                                                           double b, long samples,
                                                           std::uint64_t seed) {
  require(x.size() == y.size() && x.size() >= 3, "sdm_sphere_kernel_mc dimension mismatch");
  require(b >= 0.0 && b < 1.0, "conditional sampler needs 0 <= b < 1");
  require(samples >= 2, "need at least two samples");
  const auto n = x.size();
  const double a = 0.5 * static_cast<double>(n - 1);
  const double c = 1.0 - b * b;
  const double cap = 0.5 * regularized_incomplete_beta(c, a, 0.5);
  Rng rng(seed);
  Vec u(n);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    // Height t = z.x has density (1 - t^2)^((n-3)/2) on [b, 1]; sample
    // w = 1 - t^2 from w^(a-1) on [0, c] and accept with sqrt((1-c)/(1-w)).
    double w;
    do {
      w = c * std::pow(rng.uniform(), 1.0 / a);
    } while (rng.uniform() >= std::sqrt((1.0 - c) / (1.0 - w)));
    const double t = std::sqrt(1.0 - w);
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.normal();
      u -= u.dot(x) * x;
      norm = u.norm();
    } while (norm == 0.0);
    const double zy = t * x.dot(y) + std::sqrt(w) * u.dot(y) / norm;
    if (zy >= b) ++hits;
  }
  const double p = static_cast<double>(hits) / samples;
  return {cap * p, cap * std::sqrt(p * (1.0 - p) / (samples - 1)), samples};
}

}  // namespace kernmem
