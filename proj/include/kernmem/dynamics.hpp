#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "kernmem/common.hpp"
#include "kernmem/kernels.hpp"
#include "kernmem/patterns.hpp"
#include "kernmem/rng.hpp"
#include "kernmem/training.hpp"

namespace kernmem {

namespace detail {

inline const KernelSpec* inner_product_spec(const TrainedNetwork& net) {
  const auto* k = std::get_if<KernelSpec>(&net.similarity);
  return (k && k->is_inner_product()) ? k : nullptr;
}

// f_i(s) for one neuron given the precomputed similarity column (with-self)
// or the raw inner products x' s (no-self).
inline double neuron_field(const TrainedNetwork& net, const Mat& coeffs, Eigen::Index i,
                           const Vec& column_or_dots, const Eigen::Ref<const Vec>& s) {
  if (net.mode == NetworkMode::AutoNoSelf) {
    const auto& k = *inner_product_spec(net);
    double f = 0.0;
    for (Eigen::Index mu = 0; mu < net.m(); ++mu) {
      f += coeffs(mu, i) *
           kernel_of_inner_product(k, column_or_dots[mu] - net.x_in(i, mu) * s[i]);
    }
    return f - net.thetas[i];
  }
  return coeffs.col(i).dot(column_or_dots) - net.thetas[i];
}

}  // namespace detail

// Pre-activations f(s) of every output neuron.
inline Vec network_field(const TrainedNetwork& net, const Eigen::Ref<const Vec>& s) {
  require(s.size() == net.n_in(), "state dimension does not match the network");
  const Mat coeffs = net.signed_coefficients();
  if (net.mode == NetworkMode::AutoNoSelf) {
    const Vec dots = net.x_in.transpose() * s;
    Vec f(net.n_out());
    for (Eigen::Index i = 0; i < net.n_out(); ++i) f[i] = detail::neuron_field(net, coeffs, i, dots, s);
    return f;
  }
  const Vec col = similarity_column(net.similarity, net.x_in, s);
  return coeffs.transpose() * col - net.thetas;
}

// One-shot read-out sgn[(A . X_out) K(X_in, s) - theta].
inline Vec hetero_recall(const TrainedNetwork& net, const Eigen::Ref<const Vec>& s_in) {
  return sgn(network_field(net, s_in));
}

// All neurons at once.
inline Vec auto_step_sync(const TrainedNetwork& net, const Eigen::Ref<const Vec>& s) {
  require(net.auto_mode() && net.mode != NetworkMode::ContinuousInterp,
          "synchronous sign update needs a bipolar auto-associative network");
  return sgn(network_field(net, s));
}

// One asynchronous sweep in a random order drawn from `order_seed`; each
// neuron sees the freshest state. Inner-product kernels update x' s
// incrementally; other similarities recompute the kernel column.
inline Vec auto_sweep_async(const TrainedNetwork& net, const Eigen::Ref<const Vec>& s0,
                            std::uint64_t order_seed) {
  require(net.auto_mode() && net.mode != NetworkMode::ContinuousInterp,
          "asynchronous sign update needs a bipolar auto-associative network");
  require(s0.size() == net.n_in(), "state dimension does not match the network");
  const Mat coeffs = net.signed_coefficients();
  Vec s = s0;
  Rng rng(order_seed);
  const auto order = rng.permutation(static_cast<std::size_t>(net.n_in()));
  const auto* ip = detail::inner_product_spec(net);
  Vec dots;
  if (ip) dots = net.x_in.transpose() * s;
  for (const auto idx : order) {
    const auto i = static_cast<Eigen::Index>(idx);
    double f;
    if (net.mode == NetworkMode::AutoNoSelf) {
      f = detail::neuron_field(net, coeffs, i, dots, s);
    } else if (ip) {
      Vec col(net.m());
      for (Eigen::Index mu = 0; mu < net.m(); ++mu) col[mu] = kernel_of_inner_product(*ip, dots[mu]);
      f = coeffs.col(i).dot(col) - net.thetas[i];
    } else {
      f = coeffs.col(i).dot(similarity_column(net.similarity, net.x_in, s)) - net.thetas[i];
    }
    const double next = sgn(f);
    if (next != s[i]) {
      if (ip) dots += net.x_in.row(i).transpose() * (next - s[i]);
      s[i] = next;
    }
  }
  return s;
}

// Continuous interpolation update X C K(X, s), C = K^+ (precomputed in the net).
inline Vec interp_step(const TrainedNetwork& net, const Eigen::Ref<const Vec>& s) {
  require(net.mode == NetworkMode::ContinuousInterp, "interp_step needs a continuous interpolation network");
  return network_field(net, s);
}

// Zero-temperature Exp-beta update X Theta(r - |X - s|) with Theta(0) = e^-1.
// Exact equality of the distance and r selects the e^-1 branch; there is no
// tolerance band.
inline Vec expbeta_zero_temp_step(const Mat& x, double r, const Eigen::Ref<const Vec>& s) {
  require(r > 0.0, "radius must be > 0");
  require(x.rows() == s.size(), "state dimension does not match the patterns");
  Vec weights(x.cols());
  for (Eigen::Index mu = 0; mu < x.cols(); ++mu) {
    const double d = (x.col(mu) - s).norm();
    const double arg = r - d;
    weights[mu] = arg > 0.0 ? 1.0 : (arg == 0.0 ? kInvE : 0.0);
  }
  return x * weights;
}

// Premise checks for the zero-temperature network; returns human-readable
// warnings (empty when all premises hold).
inline std::vector<std::string> expbeta_premise_warnings(const Mat& x, double r) {
  std::vector<std::string> out;
  if (x.cols() >= 2) {
    const double d = min_pairwise_distance(x);
    if (!(d > r)) {
      out.push_back("minimum pairwise distance " + detail::format_real(d) +
                    " does not exceed the radius " + detail::format_real(r));
    }
  }
  const double special = r / (1.0 - kInvE);
  for (Eigen::Index mu = 0; mu < x.cols(); ++mu) {
    if (std::abs(x.col(mu).norm() - special) <= 1e-12 * (1.0 + special)) {
      out.push_back("pattern " + std::to_string(mu) + " has norm r/(1 - e^-1)");
    }
  }
  return out;
}

struct SoftmaxResult {
  Vec state;
  bool tie = false;
};

// X softmax(beta X' s); beta = +inf selects the zero-temperature argmax, ties
// resolved to the lowest pattern index and flagged.
inline SoftmaxResult softmax_step(const Mat& x, double beta, const Eigen::Ref<const Vec>& s) {
  require(x.rows() == s.size(), "state dimension does not match the patterns");
  require(beta >= 0.0, "softmax beta must be >= 0");
  const Vec dots = x.transpose() * s;
  SoftmaxResult out;
  if (std::isinf(beta)) {
    Eigen::Index best = 0;
    for (Eigen::Index mu = 1; mu < dots.size(); ++mu) {
      if (dots[mu] > dots[best]) best = mu;
    }
    for (Eigen::Index mu = 0; mu < dots.size(); ++mu) {
      if (mu != best && dots[mu] == dots[best]) out.tie = true;
    }
    out.state = x.col(best);
    return out;
  }
  const double top = dots.maxCoeff();
  Vec w = (beta * (dots.array() - top)).exp().matrix();
  w /= w.sum();
  out.state = x * w;
  return out;
}

enum class UpdateKind {
  HeteroKernel,
  AutoSync,
  AutoAsync,
  InterpSync,
  ExpBetaZeroTemp,
  ExpBetaFinite,
  SoftmaxFinite,
  SoftmaxZeroTemp,
};

inline std::string to_string(UpdateKind k) {
  switch (k) {
    case UpdateKind::HeteroKernel: return "hetero";
    case UpdateKind::AutoSync: return "sync";
    case UpdateKind::AutoAsync: return "async";
    case UpdateKind::InterpSync: return "interp";
    case UpdateKind::ExpBetaZeroTemp: return "expbeta-zero";
    case UpdateKind::ExpBetaFinite: return "expbeta";
    case UpdateKind::SoftmaxFinite: return "softmax";
    case UpdateKind::SoftmaxZeroTemp: return "softmax-zero";
  }
  return "?";
}

// A recall rule bound to its parameters. Parameter-free rules carry the raw
// pattern matrix; trained rules share the network.
class UpdateRule {
public:
  static UpdateRule hetero(std::shared_ptr<const TrainedNetwork> net) {
    require(net && net->mode == NetworkMode::Hetero, "hetero rule needs a hetero network");
    return UpdateRule(UpdateKind::HeteroKernel, std::move(net));
  }
  static UpdateRule sync(std::shared_ptr<const TrainedNetwork> net) {
    require(net && net->auto_mode() && net->mode != NetworkMode::ContinuousInterp,
            "sync rule needs a bipolar auto-associative network");
    return UpdateRule(UpdateKind::AutoSync, std::move(net));
  }
  static UpdateRule async(std::shared_ptr<const TrainedNetwork> net, std::uint64_t order_seed) {
    require(net && net->auto_mode() && net->mode != NetworkMode::ContinuousInterp,
            "async rule needs a bipolar auto-associative network");
    UpdateRule u(UpdateKind::AutoAsync, std::move(net));
    u.order_seed_ = order_seed;
    return u;
  }
  static UpdateRule interp(std::shared_ptr<const TrainedNetwork> net) {
    require(net && net->mode == NetworkMode::ContinuousInterp, "interp rule needs an interpolation network");
    return UpdateRule(UpdateKind::InterpSync, std::move(net));
  }
  static UpdateRule expbeta_zero_temp(Mat x, double r) {
    require(r > 0.0, "radius must be > 0");
    UpdateRule u(UpdateKind::ExpBetaZeroTemp, nullptr);
    u.warnings_ = expbeta_premise_warnings(x, r);
    u.x_ = std::move(x);
    u.radius_ = r;
    return u;
  }
  static UpdateRule expbeta_finite(const Mat& x, double r, double beta) {
    auto net = std::make_shared<TrainedNetwork>(pseudoinverse_train(x, KernelSpec::exp_beta(r, beta)));
    UpdateRule u(UpdateKind::ExpBetaFinite, std::move(net));
    u.radius_ = r;
    u.beta_ = beta;
    return u;
  }
  static UpdateRule softmax(Mat x, double beta) {
    require(beta >= 0.0 && std::isfinite(beta), "softmax beta must be finite and >= 0");
    UpdateRule u(UpdateKind::SoftmaxFinite, nullptr);
    u.x_ = std::move(x);
    u.beta_ = beta;
    return u;
  }
  static UpdateRule softmax_zero_temp(Mat x) {
    UpdateRule u(UpdateKind::SoftmaxZeroTemp, nullptr);
    u.x_ = std::move(x);
    u.beta_ = std::numeric_limits<double>::infinity();
    return u;
  }

  UpdateKind kind() const { return kind_; }
  bool continuous() const {
    return kind_ == UpdateKind::InterpSync || kind_ == UpdateKind::ExpBetaZeroTemp ||
           kind_ == UpdateKind::ExpBetaFinite || kind_ == UpdateKind::SoftmaxFinite ||
           kind_ == UpdateKind::SoftmaxZeroTemp;
  }
  bool differentiable() const {
    return kind_ == UpdateKind::InterpSync || kind_ == UpdateKind::ExpBetaFinite ||
           kind_ == UpdateKind::SoftmaxFinite;
  }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const TrainedNetwork* network() const { return net_.get(); }
  std::uint64_t order_seed() const { return order_seed_; }
  Eigen::Index dimension() const { return net_ ? net_->n_in() : x_.rows(); }

  // Applies the rule once. `step` selects the async permutation sub-stream;
  // `tie` (if given) reports a zero-temperature softmax tie.
  Vec apply(const Eigen::Ref<const Vec>& s, std::uint64_t step = 0, bool* tie = nullptr) const {
    switch (kind_) {
      case UpdateKind::HeteroKernel: return hetero_recall(*net_, s);
      case UpdateKind::AutoSync: return auto_step_sync(*net_, s);
      case UpdateKind::AutoAsync: return auto_sweep_async(*net_, s, derive_seed(order_seed_, step));
      case UpdateKind::InterpSync:
      case UpdateKind::ExpBetaFinite: return interp_step(*net_, s);
      case UpdateKind::ExpBetaZeroTemp: return expbeta_zero_temp_step(x_, radius_, s);
      case UpdateKind::SoftmaxFinite:
      case UpdateKind::SoftmaxZeroTemp: {
        auto r = softmax_step(x_, beta_, s);
        if (tie) *tie = r.tie;
        return r.state;
      }
    }
    throw DomainError("unknown update rule");
  }

private:
  UpdateRule(UpdateKind kind, std::shared_ptr<const TrainedNetwork> net)
      : kind_(kind), net_(std::move(net)) {}

  UpdateKind kind_;
  std::shared_ptr<const TrainedNetwork> net_;
  Mat x_;
  double radius_ = 0.0;
  double beta_ = 0.0;
  std::uint64_t order_seed_ = 0;
  std::vector<std::string> warnings_;
};

enum class TraceStatus { Converged, Cycle, MaxSteps };

inline std::string to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::Converged: return "converged";
    case TraceStatus::Cycle: return "cycle";
    case TraceStatus::MaxSteps: return "max-steps";
  }
  return "?";
}

struct RecallTrace {
  std::vector<Vec> states;  // states[0] is the initial state
  TraceStatus status = TraceStatus::MaxSteps;
  long steps = 0;           // updates that changed the state
  bool tie = false;         // a zero-temperature softmax tie occurred
  bool converged() const { return status == TraceStatus::Converged; }
  const Vec& terminal() const { return states.back(); }
};

// Iterates `rule` from s0. A step that leaves the state unchanged ends the
// run as converged (exact equality for bipolar rules, max-norm 1e-12 for
// continuous ones; for async this is a full sweep without a flip). A
// synchronous bipolar state equal to the one two steps back is a 2-cycle.
inline RecallTrace run_to_fixed_point(const UpdateRule& rule, const Eigen::Ref<const Vec>& s0,
                                      long max_steps) {
  require(max_steps >= 1, "max_steps must be >= 1");
  require(s0.size() == rule.dimension(), "initial state dimension does not match the rule");
  RecallTrace trace;
  trace.states.emplace_back(s0);
  const bool cont = rule.continuous();
  const auto same = [&](const Vec& a, const Vec& b) {
    if (!cont) return a == b;
    return (a - b).cwiseAbs().maxCoeff() <= 1e-12;
  };
  for (long t = 0; t < max_steps; ++t) {
    bool tie = false;
    Vec next = rule.apply(trace.states.back(), static_cast<std::uint64_t>(t), &tie);
    trace.tie = trace.tie || tie;
    if (same(next, trace.states.back())) {
      trace.status = TraceStatus::Converged;
      return trace;
    }
    ++trace.steps;
    trace.states.push_back(std::move(next));
    if (rule.kind() == UpdateKind::AutoSync && trace.states.size() >= 3 &&
        trace.states.back() == trace.states[trace.states.size() - 3]) {
      trace.status = TraceStatus::Cycle;
      return trace;
    }
    if (rule.kind() == UpdateKind::HeteroKernel) {
      // A feed-forward read-out is a single map, not an iteration.
      trace.status = TraceStatus::Converged;
      return trace;
    }
  }
  trace.status = TraceStatus::MaxSteps;
  return trace;
}

struct AttractorCertificate {
  bool is_fixed = false;
  double residual = 0.0;
  double frobenius_norm = 0.0;
  double spectral_norm = 0.0;
};

// Central-difference Jacobian of a continuous rule at `point`.
inline Mat numeric_jacobian(const UpdateRule& rule, const Eigen::Ref<const Vec>& point) {
  require(rule.differentiable(), "Jacobian needs a differentiable (finite-temperature) rule");
  const Eigen::Index n = point.size();
  const double h = 1e-6 * (1.0 + point.norm());
  Mat j(n, n);
  Vec p = point;
  for (Eigen::Index c = 0; c < n; ++c) {
    const double keep = p[c];
    p[c] = keep + h;
    const Vec plus = rule.apply(p);
    p[c] = keep - h;
    const Vec minus = rule.apply(p);
    p[c] = keep;
    j.col(c) = (plus - minus) / (2.0 * h);
  }
  return j;
}

inline AttractorCertificate certify_attractor(const UpdateRule& rule, const Eigen::Ref<const Vec>& point) {
  const Mat j = numeric_jacobian(rule, point);
  AttractorCertificate c;
  c.residual = (rule.apply(point) - point).norm();
  c.is_fixed = c.residual < 1e-9;
  c.frobenius_norm = j.norm();
  Eigen::JacobiSVD<Mat> svd(j);
  c.spectral_norm = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  return c;
}

}  // namespace kernmem
