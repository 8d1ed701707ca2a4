#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "kernmem/common.hpp"
#include "kernmem/features.hpp"
#include "kernmem/kernels.hpp"
#include "kernmem/parallel.hpp"
#include "kernmem/rng.hpp"

namespace kernmem {

// A network's similarity is either an analytic kernel or an explicit feature
// map (whose kernel is phi(x).phi(y)).
using Similarity = std::variant<KernelSpec, FeatureMap>;

inline std::string to_string(const Similarity& s) {
  return std::visit([](const auto& v) { return to_string(v); }, s);
}

inline Mat similarity_matrix(const Similarity& sim, const Mat& a, const Mat& b) {
  if (const auto* k = std::get_if<KernelSpec>(&sim)) return kernel_matrix(*k, a, b);
  const auto& f = std::get<FeatureMap>(sim);
  return phi_matrix(f, a).transpose() * phi_matrix(f, b);
}

inline Mat similarity_matrix(const Similarity& sim, const Mat& x) {
  if (const auto* k = std::get_if<KernelSpec>(&sim)) return kernel_matrix(*k, x);
  const Mat phi = phi_matrix(std::get<FeatureMap>(sim), x);
  return phi.transpose() * phi;
}

inline Vec similarity_column(const Similarity& sim, const Mat& x, const Eigen::Ref<const Vec>& s) {
  if (const auto* k = std::get_if<KernelSpec>(&sim)) return kernel_column(*k, x, s);
  const auto& f = std::get<FeatureMap>(sim);
  return phi_matrix(f, x).transpose() * phi_apply(f, s);
}

enum class Rule { HardMargin, KernelAdatron, Sbp, Hebbian, Pseudoinverse, GeneralizedPseudoinverse };
enum class BiasMode { FixedZero, Trained };
enum class NetworkMode { Hetero, AutoWithSelf, AutoNoSelf, ContinuousInterp };

// Lagrange: f_i(s) = sum_mu alpha_{mu i} y_{i mu} K(xi^mu, s) - theta_i
// Direct:   f_i(s) = sum_mu c_{mu i} K(xi^mu, s) - theta_i
enum class CoefficientKind { Lagrange, Direct };

inline std::string to_string(Rule r) {
  switch (r) {
    case Rule::HardMargin: return "hard-margin";
    case Rule::KernelAdatron: return "adatron";
    case Rule::Sbp: return "sbp";
    case Rule::Hebbian: return "hebbian";
    case Rule::Pseudoinverse: return "pinv";
    case Rule::GeneralizedPseudoinverse: return "gpinv";
  }
  return "?";
}

inline Rule parse_rule(const std::string& s) {
  if (s == "hard-margin") return Rule::HardMargin;
  if (s == "adatron") return Rule::KernelAdatron;
  if (s == "sbp") return Rule::Sbp;
  if (s == "hebbian") return Rule::Hebbian;
  if (s == "pinv") return Rule::Pseudoinverse;
  if (s == "gpinv") return Rule::GeneralizedPseudoinverse;
  throw DomainError("unknown learning rule '" + s + "'");
}

inline std::string to_string(NetworkMode m) {
  switch (m) {
    case NetworkMode::Hetero: return "hetero";
    case NetworkMode::AutoWithSelf: return "auto";
    case NetworkMode::AutoNoSelf: return "auto-noself";
    case NetworkMode::ContinuousInterp: return "interp";
  }
  return "?";
}

inline NetworkMode parse_mode(const std::string& s) {
  if (s == "hetero") return NetworkMode::Hetero;
  if (s == "auto") return NetworkMode::AutoWithSelf;
  if (s == "auto-noself") return NetworkMode::AutoNoSelf;
  if (s == "interp") return NetworkMode::ContinuousInterp;
  throw DomainError("unknown network mode '" + s + "'");
}

inline std::string to_string(BiasMode b) { return b == BiasMode::FixedZero ? "zero" : "trained"; }

inline BiasMode parse_bias(const std::string& s) {
  if (s == "zero") return BiasMode::FixedZero;
  if (s == "trained") return BiasMode::Trained;
  throw DomainError("unknown bias mode '" + s + "'");
}

struct SolverConfig {
  Rule rule = Rule::HardMargin;
  BiasMode bias = BiasMode::FixedZero;
  double tolerance = 1e-6;     // KKT tolerance
  double lr = 0.0;             // 0 selects the rule's default
  long max_sweeps = 0;         // 0 selects 10^4 * M
  long sbp_iterations = 2'000'000;
  int sbp_batch = 64;
  bool sbp_warm_start = false;  // start SBP from the normalized Hebbian vector
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct HardMarginResult {
  Vec alpha;
  double theta = 0.0;
  double margin = 0.0;
  bool converged = false;
  bool infeasible_suspected = false;
  long sweeps = 0;
  double kkt_violation = 0.0;
};

namespace detail {

inline void check_targets(const Mat& k, const Vec& y) {
  require(k.rows() == k.cols(), "kernel matrix must be square");
  require(k.rows() == y.size(), "kernel matrix and targets differ in size");
  require(y.size() >= 1, "at least one pattern is required");
  require(is_bipolar(y), "targets must be +-1");
}

}  // namespace detail

// Margin min_mu y_mu f(xi^mu) / |w| from signed coefficients c (w = sum c_mu phi_mu).
inline double margin_from_coefficients(const Mat& k, const Vec& c, double theta, const Vec& y) {
  require(k.rows() == c.size() && y.size() == c.size(), "margin: size mismatch");
  const Vec kc = k * c;
  const double norm2 = c.dot(kc);
  require(norm2 > 0.0, "margin undefined for a zero weight vector");
  return (y.array() * (kc.array() - theta)).minCoeff() / std::sqrt(norm2);
}

// Kernel form: w = sum alpha_mu y_mu phi_mu, |w|^2 = alpha' (yy' . K) alpha.
inline double margin_dual(const Mat& k, const Vec& alpha, double theta, const Vec& y) {
  return margin_from_coefficients(k, (alpha.array() * y.array()).matrix(), theta, y);
}

// Feature form: phi has one column per pattern.
inline double margin_primal(const Eigen::Ref<const Vec>& w, double theta, const Mat& phi,
                            const Vec& y) {
  require(phi.rows() == w.size() && phi.cols() == y.size(), "margin: size mismatch");
  const double norm = w.norm();
  require(norm > 0.0, "margin undefined for a zero weight vector");
  const Vec f = phi.transpose() * w;
  return (y.array() * (f.array() - theta)).minCoeff() / norm;
}

namespace detail {

// Coordinate ascent on the dual without equality constraint (bias fixed at 0):
// alpha_mu <- max(0, alpha_mu + lr (1 - (Q alpha)_mu)), Q = yy' . K.
inline HardMarginResult adatron(const Mat& k, const Vec& y, const SolverConfig& cfg) {
  const Eigen::Index m = k.rows();
  const Mat q = (y * y.transpose()).cwiseProduct(k);
  const double lr = cfg.lr > 0.0 ? cfg.lr : 1.0 / k.diagonal().maxCoeff();
  require(lr > 0.0 && std::isfinite(lr), "Adatron needs a positive kernel diagonal");
  const long max_sweeps = cfg.max_sweeps > 0 ? cfg.max_sweeps : 10'000L * m;
  HardMarginResult r;
  r.alpha = Vec::Zero(m);
  Vec g = Vec::Zero(m);  // (Q alpha)_mu = y_mu f(xi^mu)
  for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (Eigen::Index mu = 0; mu < m; ++mu) {
      const double next = std::max(0.0, r.alpha[mu] + lr * (1.0 - g[mu]));
      const double delta = next - r.alpha[mu];
      if (delta != 0.0) {
        r.alpha[mu] = next;
        g.noalias() += delta * q.col(mu);
      }
    }
    if (sweep % 64 == 0) g.noalias() = q * r.alpha;
    double viol = 0.0;
    for (Eigen::Index mu = 0; mu < m; ++mu) {
      viol = std::max(viol, r.alpha[mu] > 0.0 ? std::abs(1.0 - g[mu]) : std::max(0.0, 1.0 - g[mu]));
    }
    r.sweeps = sweep;
    r.kkt_violation = viol;
    if (viol <= cfg.tolerance) {
      r.converged = true;
      break;
    }
  }
  g.noalias() = q * r.alpha;
  r.infeasible_suspected = !r.converged && g.minCoeff() < 0.0;
  const double norm2 = r.alpha.dot(g);
  r.margin = norm2 > 0.0 ? g.minCoeff() / std::sqrt(norm2) : 0.0;
  return r;
}

// SMO with maximal-violating-pair selection and no upper bound on alpha
// (hard margin), for the dual with constraint sum alpha_mu y_mu = 0.
inline HardMarginResult smo(const Mat& k, const Vec& y, const SolverConfig& cfg) {
  const Eigen::Index m = k.rows();
  HardMarginResult r;
  r.alpha = Vec::Zero(m);
  bool has_pos = false, has_neg = false;
  for (Eigen::Index mu = 0; mu < m; ++mu) (y[mu] > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    // One class only: w = 0 and theta alone separates; margin is infinite.
    r.theta = has_pos ? -1.0 : 1.0;
    r.converged = true;
    r.margin = std::numeric_limits<double>::infinity();
    return r;
  }
  const Mat q = (y * y.transpose()).cwiseProduct(k);
  Vec grad = Vec::Constant(m, -1.0);  // Q alpha - 1
  const long max_iter = cfg.max_sweeps > 0 ? cfg.max_sweeps * m : 10'000L * m * m;
  constexpr double kTau = 1e-12;
  long iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    // i in I_up maximizes -y G, j in I_low minimizes -y G.
    Eigen::Index i = -1, j = -1;
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < m; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = y[t] > 0 || r.alpha[t] > 0.0;
      const bool in_low = y[t] < 0 || r.alpha[t] > 0.0;
      if (in_up && v > up) { up = v; i = t; }
      if (in_low && v < low) { low = v; j = t; }
    }
    gap = up - low;
    if (gap <= cfg.tolerance) {
      r.converged = true;
      break;
    }
    const double old_i = r.alpha[i];
    const double old_j = r.alpha[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = r.alpha[i] - r.alpha[j];
      r.alpha[i] += delta;
      r.alpha[j] += delta;
      if (diff > 0.0) {
        if (r.alpha[j] < 0.0) { r.alpha[j] = 0.0; r.alpha[i] = diff; }
      } else {
        if (r.alpha[i] < 0.0) { r.alpha[i] = 0.0; r.alpha[j] = -diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = r.alpha[i] + r.alpha[j];
      r.alpha[i] -= delta;
      r.alpha[j] += delta;
      if (r.alpha[j] < 0.0) { r.alpha[j] = 0.0; r.alpha[i] = sum; }
      if (r.alpha[i] < 0.0) { r.alpha[i] = 0.0; r.alpha[j] = sum; }
    }
    grad.noalias() += (r.alpha[i] - old_i) * q.col(i) + (r.alpha[j] - old_j) * q.col(j);
  }
  r.sweeps = (iter + m - 1) / m;
  r.kkt_violation = gap;
  // theta = y_t G_t averaged over support vectors.
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index t = 0; t < m; ++t) {
    if (r.alpha[t] > 0.0) {
      sum += y[t] * grad[t];
      ++count;
    }
  }
  r.theta = count > 0 ? sum / count : 0.0;
  const Vec c = (r.alpha.array() * y.array()).matrix();
  const Vec f = k * c;
  r.infeasible_suspected = !r.converged && (y.array() * (f.array() - r.theta)).minCoeff() < 0.0;
  const double norm2 = c.dot(f);
  r.margin = norm2 > 0.0 ? (y.array() * (f.array() - r.theta)).minCoeff() / std::sqrt(norm2) : 0.0;
  return r;
}

}  // namespace detail

// Optimal (hard-margin) single neuron from its kernel matrix and targets.
inline HardMarginResult train_neuron_hard_margin(const Mat& k, const Vec& y,
                                                 const SolverConfig& cfg = {}) {
  detail::check_targets(k, y);
  require(cfg.tolerance > 0.0, "solver tolerance must be > 0");
  require(cfg.lr >= 0.0, "learning rate must be >= 0");
  if (cfg.bias == BiasMode::FixedZero) return detail::adatron(k, y, cfg);
  return detail::smo(k, y, cfg);
}

struct SbpResult {
  Vec coefficients;  // w = sum_mu c_mu phi(xi^mu)
  double margin = 0.0;
  long iterations = 0;
};

// Stochastic batch perceptron in kernel form. Each iteration samples a batch
// (with replacement), takes its lowest-scoring example mu, moves
// w <- w + lr y_mu phi_mu and projects w back onto the unit ball. The best
// iterate (by full margin, checked every 16 iterations) is returned.
//
// w is kept as scale * sum c_mu phi_mu with h = K c cached, so an iteration
// costs O(M) regardless of the feature dimension.
inline SbpResult train_sbp_kernel(const Mat& k, const Vec& y, double lr, long iterations,
                                  std::uint64_t seed, int batch = 64, bool warm_start = false) {
  detail::check_targets(k, y);
  require(lr > 0.0, "SBP learning rate must be > 0");
  require(iterations >= 1, "SBP needs at least one iteration");
  require(batch >= 1, "SBP batch size must be >= 1");
  const Eigen::Index m = k.rows();
  Rng rng(seed);
  Vec c = Vec::Zero(m);
  Vec h = Vec::Zero(m);
  double norm2 = 0.0;  // c' K c
  double scale = 1.0;
  if (warm_start) {
    c = y;
    h.noalias() = k * c;
    norm2 = c.dot(h);
    if (norm2 > 0.0) scale = 1.0 / std::sqrt(norm2);
  }
  Vec best_c = c;
  double best_margin = -std::numeric_limits<double>::infinity();
  const auto full_margin = [&]() {
    if (norm2 <= 0.0) return -std::numeric_limits<double>::infinity();
    return (y.array() * h.array()).minCoeff() / std::sqrt(norm2);
  };
  if (warm_start) best_margin = full_margin();
  for (long it = 1; it <= iterations; ++it) {
    Eigen::Index pick = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (int b = 0; b < batch; ++b) {
      const auto mu = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
      const double score = y[mu] * h[mu];
      if (score < lowest) {
        lowest = score;
        pick = mu;
      }
    }
    const double delta = lr * y[pick] / scale;
    norm2 += 2.0 * delta * h[pick] + delta * delta * k(pick, pick);
    c[pick] += delta;
    h.noalias() += delta * k.col(pick);
    const double wnorm2 = scale * scale * norm2;
    if (wnorm2 > 1.0) scale = 1.0 / std::sqrt(norm2);
    if (it % 16 == 0 || it == iterations) {
      const double g = full_margin();
      if (g > best_margin) {
        best_margin = g;
        best_c = c;
      }
    }
    if (it % 8192 == 0) {
      // Fold the scale into c and refresh the cache against drift.
      c *= scale;
      scale = 1.0;
      h.noalias() = k * c;
      norm2 = c.dot(h);
    }
  }
  SbpResult r;
  const double n = std::sqrt(std::max(0.0, best_c.dot(k * best_c)));
  r.coefficients = n > 0.0 ? Vec(best_c / n) : best_c;
  r.margin = best_margin;
  r.iterations = iterations;
  return r;
}

// Feature-form SBP: returns the explicit weight vector.
inline Vec train_sbp(const Mat& phi, const Vec& y, double lr, long iterations, std::uint64_t seed,
                     int batch = 64, bool warm_start = false) {
  require(phi.cols() == y.size(), "feature matrix and targets differ in size");
  const Mat k = phi.transpose() * phi;
  const auto r = train_sbp_kernel(k, y, lr, iterations, seed, batch, warm_start);
  return phi * r.coefficients;
}

// Moore-Penrose pseudoinverse via SVD; singular values below
// eps * max(rows, cols) * sigma_max are treated as zero.
inline Mat pinv(const Mat& a) {
  if (a.size() == 0) return Mat(a.cols(), a.rows());
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double cutoff = std::numeric_limits<double>::epsilon() *
                        static_cast<double>(std::max(a.rows(), a.cols())) *
                        (s.size() > 0 ? s[0] : 0.0);
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

struct RowInfo {
  bool converged = true;
  bool infeasible_suspected = false;
  long sweeps = 0;
  double margin = std::numeric_limits<double>::quiet_NaN();
};

struct TrainedNetwork {
  NetworkMode mode = NetworkMode::AutoWithSelf;
  Rule rule = Rule::HardMargin;
  BiasMode bias = BiasMode::FixedZero;
  CoefficientKind coefficients = CoefficientKind::Lagrange;
  Similarity similarity = KernelSpec::linear();
  Mat alphas;  // M x N_out
  Vec thetas;  // N_out
  Mat x_in;    // N_in x M
  Mat x_out;   // N_out x M (equal to x_in for auto modes)
  double tolerance = 1e-6;
  std::string pattern_file_ref;
  std::vector<RowInfo> rows;

  Eigen::Index n_in() const { return x_in.rows(); }
  Eigen::Index n_out() const { return x_out.rows(); }
  Eigen::Index m() const { return x_in.cols(); }
  bool auto_mode() const {
    return mode == NetworkMode::AutoWithSelf || mode == NetworkMode::AutoNoSelf ||
           mode == NetworkMode::ContinuousInterp;
  }
  bool all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const RowInfo& r) { return r.converged; });
  }

  // Signed coefficients c_{mu i} so that f_i(s) = sum_mu c_{mu i} K(xi^mu, s) - theta_i.
  Mat signed_coefficients() const {
    if (coefficients == CoefficientKind::Direct) return alphas;
    return alphas.cwiseProduct(x_out.transpose());
  }
};

namespace detail {

inline const KernelSpec& inner_product_kernel(const Similarity& sim) {
  const auto* k = std::get_if<KernelSpec>(&sim);
  require(k != nullptr && k->is_inner_product(),
          "no-self-connection networks need an inner-product kernel k(x.y)");
  return *k;
}

// Gram matrix of the patterns with coordinate i removed from every inner product.
inline Mat reduced_gram(const KernelSpec& k, const Mat& x, const Mat& dots, Eigen::Index i) {
  const Vec row = x.row(i).transpose();
  const Mat reduced = dots - row * row.transpose();
  return reduced.unaryExpr([&](double d) { return kernel_of_inner_product(k, d); });
}

}  // namespace detail

// One independent solve per output neuron; row i of x_out are its targets.
// For AutoNoSelf, neuron i is trained on the reduced kernel that drops
// coordinate i (the same kernel it sees at recall).
inline TrainedNetwork train_network(const Mat& x_in, const Mat& x_out, NetworkMode mode,
                                    const Similarity& sim, const SolverConfig& cfg = {}) {
  require(x_in.cols() == x_out.cols(), "input and output pattern counts differ");
  require(x_in.cols() >= 1, "at least one pattern is required");
  if (mode != NetworkMode::Hetero) {
    require(x_in.rows() == x_out.rows() && x_in == x_out,
            "auto-associative training needs identical input and output patterns");
  }
  const bool continuous = mode == NetworkMode::ContinuousInterp;
  const bool pinv_rule = cfg.rule == Rule::Pseudoinverse || cfg.rule == Rule::GeneralizedPseudoinverse;
  if (continuous) require(pinv_rule, "continuous interpolation networks use the pseudoinverse rule");
  if (!continuous) require(is_bipolar(x_out), "output patterns must be +-1 for sign read-out");
  if (cfg.rule == Rule::Pseudoinverse) {
    const auto* k = std::get_if<KernelSpec>(&sim);
    const auto* f = std::get_if<FeatureMap>(&sim);
    require((k && k->kind == KernelKind::Linear) || (f && f->kind == FeatureKind::Identity),
            "the plain pseudoinverse rule uses the linear kernel; use gpinv otherwise");
  }
  if (mode == NetworkMode::AutoNoSelf) detail::inner_product_kernel(sim);

  const Eigen::Index m = x_in.cols();
  const Eigen::Index n_out = x_out.rows();
  TrainedNetwork net;
  net.mode = mode;
  net.rule = cfg.rule;
  net.bias = cfg.bias;
  net.similarity = sim;
  net.x_in = x_in;
  net.x_out = x_out;
  net.tolerance = cfg.tolerance;
  net.alphas = Mat::Zero(m, n_out);
  net.thetas = Vec::Zero(n_out);
  net.rows.assign(static_cast<std::size_t>(n_out), RowInfo{});
  net.coefficients = (pinv_rule || cfg.rule == Rule::Sbp) ? CoefficientKind::Direct
                                                          : CoefficientKind::Lagrange;

  const bool no_self = mode == NetworkMode::AutoNoSelf;
  Mat shared_k;
  Mat dots;
  if (no_self) {
    dots = x_in.transpose() * x_in;
  } else {
    shared_k = similarity_matrix(sim, x_in);
  }
  const auto kernel_for = [&](Eigen::Index i) -> Mat {
    if (!no_self) return shared_k;
    return detail::reduced_gram(std::get<KernelSpec>(sim), x_in, dots, i);
  };

  if (cfg.rule == Rule::Hebbian) {
    net.alphas.setOnes();
    for (Eigen::Index i = 0; i < n_out; ++i) {
      const Vec y = x_out.row(i).transpose();
      const Mat k = kernel_for(i);
      const Vec c = y;
      const double n2 = c.dot(k * c);
      net.rows[i].margin = n2 > 0.0 ? margin_from_coefficients(k, c, 0.0, y)
                                    : std::numeric_limits<double>::quiet_NaN();
    }
    return net;
  }

  if (pinv_rule) {
    if (!no_self) {
      net.alphas = pinv(shared_k) * x_out.transpose();
    }
    for (Eigen::Index i = 0; i < n_out; ++i) {
      const Mat k = kernel_for(i);
      if (no_self) net.alphas.col(i) = pinv(k) * x_out.row(i).transpose();
      if (!continuous) {
        const Vec y = x_out.row(i).transpose();
        const Vec c = net.alphas.col(i);
        const double n2 = c.dot(k * c);
        net.rows[i].margin = n2 > 0.0 ? margin_from_coefficients(k, c, 0.0, y)
                                      : std::numeric_limits<double>::quiet_NaN();
      }
    }
    return net;
  }

  parallel_for(static_cast<std::size_t>(n_out), cfg.jobs, [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const Vec y = x_out.row(i).transpose();
    const Mat k = kernel_for(i);
    auto& info = net.rows[idx];
    if (cfg.rule == Rule::Sbp) {
      const double lr = cfg.lr > 0.0 ? cfg.lr : 1e-5;
      const auto r = train_sbp_kernel(k, y, lr, cfg.sbp_iterations,
                                      derive_seed(cfg.seed, static_cast<std::uint64_t>(i)),
                                      cfg.sbp_batch, cfg.sbp_warm_start);
      net.alphas.col(i) = r.coefficients;
      info.margin = r.margin;
      info.converged = r.margin > 0.0;
      info.sweeps = r.iterations;
      return;
    }
    auto r = train_neuron_hard_margin(k, y, cfg);
    net.alphas.col(i) = r.alpha;
    net.thetas[i] = r.theta;
    info.converged = r.converged;
    info.infeasible_suspected = r.infeasible_suspected;
    info.sweeps = r.sweeps;
    info.margin = r.margin;
  });
  return net;
}

// Auto-associative shorthand.
inline TrainedNetwork train_network(const Mat& x, NetworkMode mode, const Similarity& sim,
                                    const SolverConfig& cfg = {}) {
  return train_network(x, x, mode, sim, cfg);
}

// Minimum-norm interpolation network s -> X K^+ K(X, s).
inline TrainedNetwork pseudoinverse_train(const Mat& x, const Similarity& sim,
                                          bool continuous = true) {
  SolverConfig cfg;
  const auto* k = std::get_if<KernelSpec>(&sim);
  const auto* f = std::get_if<FeatureMap>(&sim);
  const bool linear = (k && k->kind == KernelKind::Linear) || (f && f->kind == FeatureKind::Identity);
  cfg.rule = linear ? Rule::Pseudoinverse : Rule::GeneralizedPseudoinverse;
  return train_network(x, continuous ? NetworkMode::ContinuousInterp : NetworkMode::AutoWithSelf,
                       sim, cfg);
}

// Explicit weights W (N_out x N_phi) for networks with a finite feature map.
// A linear kernel is treated as the identity map. Not defined for AutoNoSelf,
// whose neurons each see a different reduced feature space.
inline Mat feature_weights(const TrainedNetwork& net) {
  require(net.mode != NetworkMode::AutoNoSelf, "feature weights are per-neuron for no-self networks");
  FeatureMap map = FeatureMap::identity(net.n_in());
  if (const auto* f = std::get_if<FeatureMap>(&net.similarity)) {
    map = *f;
  } else {
    require(std::get<KernelSpec>(net.similarity).kind == KernelKind::Linear,
            "feature weights need a feature map or the linear kernel");
  }
  const Mat phi = phi_matrix(map, net.x_in);
  return (phi * net.signed_coefficients()).transpose();
}

}  // namespace kernmem
