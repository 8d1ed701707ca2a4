#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kernmem/common.hpp"
#include "kernmem/dynamics.hpp"
#include "kernmem/features.hpp"
#include "kernmem/kernels.hpp"
#include "kernmem/parallel.hpp"
#include "kernmem/patterns.hpp"
#include "kernmem/report.hpp"
#include "kernmem/rng.hpp"
#include "kernmem/theory.hpp"
#include "kernmem/training.hpp"

namespace kernmem {

// First x where the curve reaches <= 0, linearly interpolated between the
// last positive point and the first non-positive one. NaN if it never does;
// the first x if it starts non-positive.
inline double zero_crossing(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "zero_crossing: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] <= 0.0) {
      if (i == 0) return x[0];
      const double t = y[i - 1] / (y[i - 1] - y[i]);
      return x[i - 1] + t * (x[i] - x[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Coefficient of determination of the least-squares line through (x, y).
inline double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "linear_fit_r2 needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

namespace detail {

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Vec random_signs(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? 1.0 : -1.0;
  return y;
}

inline void push_row(ExperimentReport& r, const std::string& series, double x,
                     const std::vector<double>& values, std::vector<double> extra = {}) {
  const auto ms = mean_sem(values);
  r.rows.push_back({series, x, ms.mean, ms.sem, static_cast<long>(values.size()), std::move(extra)});
}

inline double fraction(const std::vector<double>& flags) {
  if (flags.empty()) return std::nan("");
  double s = 0.0;
  for (double f : flags) s += f;
  return s / static_cast<double>(flags.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Margin versus load for one neuron with the pairs feature map.

struct MarginConfig {
  int n = 40;
  std::vector<double> loads = {0.02, 0.04, 0.06, 0.08, 0.1, 0.15, 0.2, 0.3,
                               0.4,  0.5,  0.6,  0.7,  0.8, 0.9, 1.0};
  std::vector<std::string> rules = {"hard-margin", "sbp", "hebbian-pairs", "hebbian-poly2"};
  int trials = 20;
  std::uint64_t seed = 1;
  double sbp_lr = 1e-5;
  long sbp_iterations = 0;              // fixed count if > 0
  long sbp_iterations_per_pattern = 20;  // otherwise this times M
  int sbp_batch = 64;
  long hard_margin_max_sweeps = 2000;
  double tolerance = 1e-6;
  int jobs = 1;

  nlohmann::json to_json() const {
    return {{"n", n},
            {"loads", loads},
            {"rules", rules},
            {"trials", trials},
            {"seed", seed},
            {"sbp_lr", sbp_lr},
            {"sbp_iterations", sbp_iterations},
            {"sbp_iterations_per_pattern", sbp_iterations_per_pattern},
            {"sbp_batch", sbp_batch},
            {"hard_margin_max_sweeps", hard_margin_max_sweeps},
            {"tolerance", tolerance}};
  }
};

// Rows: series = rule, x = load M/N^2, mean/sem of the margin over trials.
// Extra columns: positive_fraction, converged_fraction.
inline ExperimentReport exp_margin_vs_load(const MarginConfig& cfg) {
  require(cfg.n >= 2 && cfg.trials >= 1, "margin experiment needs n >= 2 and trials >= 1");
  for (double l : cfg.loads) require(l > 0.0, "loads must be > 0");
  for (const auto& r : cfg.rules) {
    require(r == "hard-margin" || r == "sbp" || r == "hebbian-pairs" || r == "hebbian-poly2",
            "unknown margin-experiment rule '" + r + "'");
  }
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "margin";
  rep.seed = cfg.seed;
  rep.config = cfg.to_json();
  rep.x_label = "load";
  rep.extra_columns = {"positive_fraction", "converged_fraction"};

  const std::size_t n_loads = cfg.loads.size();
  const std::size_t n_rules = cfg.rules.size();
  const auto trials = static_cast<std::size_t>(cfg.trials);
  // margins[(load * rules + rule) * trials + t]
  std::vector<double> margins(n_loads * n_rules * trials);
  std::vector<double> converged(margins.size(), 1.0);
  const auto map = FeatureMap::pairs(cfg.n);
  const double n2 = static_cast<double>(cfg.n) * cfg.n;

  parallel_for(n_loads * trials, cfg.jobs, [&](std::size_t job) {
    const std::size_t li = job / trials;
    const std::size_t t = job % trials;
    const auto m = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(cfg.loads[li] * n2)));
    const auto trial_seed = derive_seed(cfg.seed, li, t);
    const auto x = gen_patterns(Geometry::bipolar(), cfg.n, m, derive_seed(trial_seed, 0)).data();
    const Vec y = detail::random_signs(m, derive_seed(trial_seed, 1));
    const Mat phi = phi_matrix(map, x);
    const Mat k = phi.transpose() * phi;
    for (std::size_t ri = 0; ri < n_rules; ++ri) {
      const auto& rule = cfg.rules[ri];
      const std::size_t slot = (li * n_rules + ri) * trials + t;
      if (rule == "hard-margin") {
        SolverConfig sc;
        sc.tolerance = cfg.tolerance;
        sc.max_sweeps = cfg.hard_margin_max_sweeps;
        const auto r = train_neuron_hard_margin(k, y, sc);
        margins[slot] = r.margin;
        converged[slot] = r.converged ? 1.0 : 0.0;
      } else if (rule == "sbp") {
        const long iters = cfg.sbp_iterations > 0 ? cfg.sbp_iterations : cfg.sbp_iterations_per_pattern * m;
        const auto r = train_sbp_kernel(k, y, cfg.sbp_lr, std::max(1L, iters), derive_seed(trial_seed, 2),
                                        cfg.sbp_batch);
        margins[slot] = r.margin;
      } else if (rule == "hebbian-pairs") {
        margins[slot] = margin_from_coefficients(k, y, 0.0, y);
      } else {
        const Mat kp = kernel_matrix(KernelSpec::ipoly(2), x);
        margins[slot] = margin_from_coefficients(kp, y, 0.0, y);
      }
    }
  });

  for (std::size_t ri = 0; ri < n_rules; ++ri) {
    for (std::size_t li = 0; li < n_loads; ++li) {
      const auto begin = (li * n_rules + ri) * trials;
      std::vector<double> v(margins.begin() + begin, margins.begin() + begin + trials);
      std::vector<double> c(converged.begin() + begin, converged.begin() + begin + trials);
      std::vector<double> pos;
      for (double g : v) pos.push_back(g > 0.0 ? 1.0 : 0.0);
      detail::push_row(rep, cfg.rules[ri], cfg.loads[li], v, {detail::fraction(pos), detail::fraction(c)});
    }
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Sample-until-collision capacity for Gaussian patterns.

struct CapacityConfig {
  std::vector<int> n_values = {25, 50, 75, 100};
  // Radius per n: fixed r (if radius > 0) or r = sqrt(sigma2 * n).
  double radius = 0.0;
  double sigma2 = 0.25;
  int trials = 100;
  std::uint64_t seed = 1;
  long max_samples = 10'000'000;
  int jobs = 1;

  double radius_for(int n) const { return radius > 0.0 ? radius : std::sqrt(sigma2 * n); }

  nlohmann::json to_json() const {
    return {{"n_values", n_values}, {"radius", radius}, {"sigma2", sigma2}, {"trials", trials},
            {"seed", seed},         {"max_samples", max_samples}};
  }
};

// Patterns are drawn one at a time until one lies within 2r of an earlier
// one; the trial's capacity is the number drawn before it.
inline long sample_until_collision(int n, double r, long max_samples, std::uint64_t seed) {
  Rng rng(seed);
  const double limit = 4.0 * r * r;
  std::vector<double> store;
  Vec v(n);
  for (long count = 0; count < max_samples; ++count) {
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    const Eigen::Map<const Mat> prev(store.data(), n, static_cast<Eigen::Index>(count));
    if (count > 0 && ((prev.colwise() - v).colwise().squaredNorm().array() < limit).any()) return count;
    store.insert(store.end(), v.data(), v.data() + n);
  }
  throw ConvergenceError("no collision within " + std::to_string(max_samples) + " samples");
}

// Rows: series "empirical", x = n, mean/sem of capacity. Extra columns:
// radius, sigma2, log_bound, bound, log_mean.
inline ExperimentReport exp_capacity_gaussian(const CapacityConfig& cfg) {
  require(cfg.trials >= 1 && !cfg.n_values.empty(), "capacity experiment needs trials and n values");
  require(cfg.radius > 0.0 || cfg.sigma2 > 0.0, "capacity experiment needs r > 0 or sigma2 > 0");
  for (int n : cfg.n_values) require(n >= 1, "dimensions must be >= 1");
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "capacity-gaussian";
  rep.seed = cfg.seed;
  rep.config = cfg.to_json();
  rep.x_label = "n";
  rep.extra_columns = {"radius", "sigma2", "log_bound", "bound", "log_mean"};
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<double> caps(cfg.n_values.size() * trials);
  parallel_for(caps.size(), cfg.jobs, [&](std::size_t job) {
    const std::size_t ni = job / trials;
    const int n = cfg.n_values[ni];
    caps[job] = static_cast<double>(
        sample_until_collision(n, cfg.radius_for(n), cfg.max_samples, derive_seed(cfg.seed, ni, job % trials)));
  });
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    const int n = cfg.n_values[ni];
    const double r = cfg.radius_for(n);
    const double s2 = sigma_max_sq(r, n);
    double log_bound = std::nan("");
    if (s2 < 0.5) log_bound = capacity_bound_gaussian(n, s2).log_value;
    std::vector<double> v(caps.begin() + ni * trials, caps.begin() + (ni + 1) * trials);
    const auto ms = mean_sem(v);
    detail::push_row(rep, "empirical", n, v, {r, s2, log_bound, std::exp(log_bound), std::log(ms.mean)});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// One-step recovery of the zero-temperature Exp-beta network under noise.

struct NoiseConfig {
  GeometryKind geometry = GeometryKind::Gaussian;
  int n = 100;
  int m = 10;
  double r = 5.0;
  // Noise levels as multiples of the critical level (sigma^2 = r^2/N for
  // Gaussian noise, rho = r^2/4N for bit flips).
  std::vector<double> grid = {0.0, 0.5, 0.75, 1.0, 1.25, 1.5};
  int trials = 1000;
  std::uint64_t seed = 1;
  int jobs = 1;

  double critical() const { return geometry == GeometryKind::Bipolar ? rho_max(r, n) : sigma_max_sq(r, n); }

  nlohmann::json to_json() const {
    return {{"geometry", geometry_tag(geometry)}, {"n", n},           {"m", m},
            {"r", r},                              {"grid", grid},     {"trials", trials},
            {"seed", seed}};
  }
};

// Patterns whose minimum pairwise distance exceeds 2r, redrawn from
// derive_seed(seed, attempt) up to 100 times.
inline Mat screened_patterns(const Geometry& g, int n, int m, double r, std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    auto set = gen_patterns(g, n, m, derive_seed(seed, attempt));
    if (m < 2 || min_pairwise_distance(set) > 2.0 * r) return set.data();
  }
  throw ConvergenceError("no pattern set with minimum distance > 2r after 100 draws");
}

// Rows: series "recovery", x = noise level (sigma^2 or rho), mean = recovery
// rate. Extra column: multiple (of the critical level).
inline ExperimentReport exp_noise_recovery(const NoiseConfig& cfg) {
  require(cfg.n >= 1 && cfg.m >= 1 && cfg.trials >= 1, "noise experiment needs n, m, trials >= 1");
  require(cfg.r > 0.0, "radius must be > 0");
  require(cfg.geometry != GeometryKind::Hypersphere, "noise experiment supports gaussian and bipolar");
  for (double v : cfg.grid) require(v >= 0.0, "noise grid values must be >= 0");
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "noise";
  rep.seed = cfg.seed;
  rep.config = cfg.to_json();
  rep.x_label = cfg.geometry == GeometryKind::Bipolar ? "rho" : "sigma2";
  rep.extra_columns = {"multiple"};
  const Geometry g = cfg.geometry == GeometryKind::Bipolar ? Geometry::bipolar() : Geometry::gaussian();
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<double> ok(cfg.grid.size() * trials);
  const double crit = cfg.critical();
  parallel_for(ok.size(), cfg.jobs, [&](std::size_t job) {
    const std::size_t gi = job / trials;
    const std::size_t t = job % trials;
    const auto seed = derive_seed(cfg.seed, gi, t);
    const Mat x = screened_patterns(g, cfg.n, cfg.m, cfg.r, derive_seed(seed, 0));
    const auto mu = static_cast<Eigen::Index>(Rng(derive_seed(seed, 1)).below(static_cast<std::uint64_t>(cfg.m)));
    const double level = cfg.grid[gi] * crit;
    const NoiseSpec spec = cfg.geometry == GeometryKind::Bipolar ? NoiseSpec::bit_flip(std::min(1.0, level))
                                                                 : NoiseSpec::gaussian(std::sqrt(level));
    const Vec s = apply_noise(x.col(mu), spec, derive_seed(seed, 2));
    ok[job] = expbeta_zero_temp_step(x, cfg.r, s) == x.col(mu) ? 1.0 : 0.0;
  });
  for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
    std::vector<double> v(ok.begin() + gi * trials, ok.begin() + (gi + 1) * trials);
    detail::push_row(rep, "recovery", cfg.grid[gi] * crit, v, {cfg.grid[gi]});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// SDM hypersphere kernel: exact quadrature, sparse approximation, Monte Carlo.

struct SdmScanConfig {
  int n_in = 50;
  std::vector<double> b_values = {0.9, 0.95};
  // Angles between the two points as fractions of 2 acos(b), beyond which
  // the caps are disjoint.
  std::vector<double> angle_fractions = {0.0, 0.1, 0.2, 0.3, 0.4};
  long mc_samples = 1'000'000;  // 0 disables the Monte Carlo column
  std::uint64_t seed = 1;
  int jobs = 1;

  nlohmann::json to_json() const {
    return {{"n_in", n_in},         {"b_values", b_values}, {"angle_fractions", angle_fractions},
            {"mc_samples", mc_samples}, {"seed", seed}};
  }
};

// Unit vectors e_0 and cos(theta) e_0 + sin(theta) e_1.
inline std::pair<Vec, Vec> points_at_angle(int n, double theta) {
  Vec x = Vec::Zero(n), y = Vec::Zero(n);
  x[0] = 1.0;
  y[0] = std::cos(theta);
  y[1] = std::sin(theta);
  return {x, y};
}

// Rows: series "b=<b>", x = angle (radians), mean = exact kernel, sem = 0.
// Extra columns: b, approx, rel_error, mc, mc_sem.
inline ExperimentReport exp_sdm_kernel_scan(const SdmScanConfig& cfg) {
  require(cfg.n_in >= 3, "SDM scan needs n_in >= 3");
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "sdm-kernel";
  rep.seed = cfg.seed;
  rep.config = cfg.to_json();
  rep.x_label = "angle";
  rep.extra_columns = {"b", "approx", "rel_error", "mc", "mc_sem"};
  const std::size_t na = cfg.angle_fractions.size();
  struct Cell {
    double angle, exact, approx, mc, mc_sem;
  };
  std::vector<Cell> cells(cfg.b_values.size() * na);
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t job) {
    const double b = cfg.b_values[job / na];
    const double theta = 2.0 * std::acos(b) * cfg.angle_fractions[job % na];
    const auto [x, y] = points_at_angle(cfg.n_in, theta);
    Cell c{theta, sdm_sphere_kernel_exact(cfg.n_in, b, x.dot(y)),
           sdm_sphere_kernel_approx(cfg.n_in, b, 0.5 * (x - y).norm()), std::nan(""), std::nan("")};
    if (cfg.mc_samples > 0) {
      const auto est = sdm_sphere_kernel_mc_conditional(x, y, b, cfg.mc_samples, derive_seed(cfg.seed, job));
      c.mc = est.mean;
      c.mc_sem = est.sem;
    }
    cells[job] = c;
  });
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const double b = cfg.b_values[j / na];
    const auto& c = cells[j];
    const double rel = c.exact > 0.0 ? std::abs(c.approx - c.exact) / c.exact : std::nan("");
    rep.rows.push_back({"b=" + detail::format_real(b), c.angle, c.exact, 0.0, 1, {b, c.approx, rel, c.mc, c.mc_sem}});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Recurrent recall versus pattern count.

struct HopfieldConfig {
  int n = 100;
  std::vector<int> m_grid = {2, 5, 8, 10, 11, 12, 13, 14, 15, 16, 18, 20};
  std::string rule = "hebbian";  // hebbian | hard-margin | pinv
  int flip_count = 10;
  int trials = 20;
  long max_sweeps = 50;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;
  int jobs = 1;

  nlohmann::json to_json() const {
    return {{"n", n},         {"m_grid", m_grid}, {"rule", rule},           {"flip_count", flip_count},
            {"trials", trials}, {"max_sweeps", max_sweeps}, {"seed", seed}, {"tolerance", tolerance}};
  }
};

// Hebbian and hard-margin networks use the no-self-connection linear kernel
// with asynchronous sweeps; the pseudoinverse network keeps self connections.
inline TrainedNetwork hopfield_network(const Mat& x, const std::string& rule, double tolerance) {
  SolverConfig sc;
  sc.tolerance = tolerance;
  if (rule == "hebbian") {
    sc.rule = Rule::Hebbian;
    return train_network(x, NetworkMode::AutoNoSelf, KernelSpec::linear(), sc);
  }
  if (rule == "hard-margin") {
    sc.rule = Rule::HardMargin;
    return train_network(x, NetworkMode::AutoNoSelf, KernelSpec::linear(), sc);
  }
  if (rule == "pinv") {
    sc.rule = Rule::Pseudoinverse;
    return train_network(x, NetworkMode::AutoWithSelf, KernelSpec::linear(), sc);
  }
  throw DomainError("unknown hopfield rule '" + rule + "'");
}

// Rows: series = rule, x = M, mean = exact-recovery fraction over all
// (trial, pattern) probes. Extra columns: fixed_point_fraction (stored
// patterns unchanged by a sweep), constraints_fraction (trials whose every
// neuron converged with positive margin).
inline ExperimentReport exp_hopfield_capacity(const HopfieldConfig& cfg) {
  require(cfg.n >= 2 && cfg.trials >= 1, "hopfield experiment needs n >= 2 and trials >= 1");
  require(cfg.flip_count >= 0 && 2 * cfg.flip_count < cfg.n, "flip_count must be < n/2");
  for (int m : cfg.m_grid) require(m >= 1, "pattern counts must be >= 1");
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "hopfield";
  rep.seed = cfg.seed;
  rep.config = cfg.to_json();
  rep.x_label = "m";
  rep.extra_columns = {"fixed_point_fraction", "constraints_fraction"};
  const auto trials = static_cast<std::size_t>(cfg.trials);
  struct TrialOut {
    std::vector<double> recovered;
    double fixed = 0.0;
    double constraints = 0.0;
  };
  std::vector<TrialOut> out(cfg.m_grid.size() * trials);
  parallel_for(out.size(), cfg.jobs, [&](std::size_t job) {
    const std::size_t mi = job / trials;
    const int m = cfg.m_grid[mi];
    const auto seed = derive_seed(cfg.seed, mi, job % trials);
    const Mat x = gen_patterns(Geometry::bipolar(), cfg.n, m, derive_seed(seed, 0)).data();
    auto net = std::make_shared<TrainedNetwork>(hopfield_network(x, cfg.rule, cfg.tolerance));
    bool constraints = true;
    for (const auto& r : net->rows) constraints = constraints && r.converged && r.margin > 0.0;
    TrialOut& o = out[job];
    int fixed = 0;
    for (int mu = 0; mu < m; ++mu) {
      if (auto_sweep_async(*net, x.col(mu), derive_seed(seed, 2, mu)) == x.col(mu)) ++fixed;
      const Vec probe = flip_bits(x.col(mu), static_cast<std::size_t>(cfg.flip_count), derive_seed(seed, 3, mu));
      const auto probe_rule = UpdateRule::async(net, derive_seed(seed, 4, mu));
      const auto trace = run_to_fixed_point(probe_rule, probe, cfg.max_sweeps);
      o.recovered.push_back(trace.converged() && trace.terminal() == x.col(mu) ? 1.0 : 0.0);
    }
    o.fixed = static_cast<double>(fixed) / m;
    o.constraints = constraints ? 1.0 : 0.0;
  });
  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    std::vector<double> rec, fixed, cons;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& o = out[mi * trials + t];
      rec.insert(rec.end(), o.recovered.begin(), o.recovered.end());
      fixed.push_back(o.fixed);
      cons.push_back(o.constraints);
    }
    detail::push_row(rep, cfg.rule, cfg.m_grid[mi], rec, {detail::fraction(fixed), detail::fraction(cons)});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// First M whose recovery mean drops below `level`; NaN if none.
inline double collapse_point(const ExperimentReport& rep, const std::string& series, double level = 0.9) {
  for (const auto* row : rep.series(series)) {
    if (row->mean < level) return row->x;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Support-vector proliferation.

struct SvpConfig {
  int n = 200;
  std::vector<int> m_grid = {1, 10, 20, 50, 100, 200, 300};
  int trials = 50;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;
  double alpha_rel_tol = 1e-6;  // alpha_mu counts as a support vector if > this * max alpha
  int jobs = 1;

  nlohmann::json to_json() const {
    return {{"n", n}, {"m_grid", m_grid}, {"trials", trials}, {"seed", seed},
            {"tolerance", tolerance}, {"alpha_rel_tol", alpha_rel_tol}};
  }
};

// One neuron with random +-1 targets, linear kernel, zero bias.
// Rows: series "svp", x = M, mean = fraction of trials where every alpha is a
// support vector. Extra columns: mean_sv_fraction, converged_fraction,
// svp_capacity.
inline ExperimentReport exp_svp_fraction(const SvpConfig& cfg) {
  require(cfg.n >= 2 && cfg.trials >= 1, "svp experiment needs n >= 2 and trials >= 1");
  for (int m : cfg.m_grid) require(m >= 1, "pattern counts must be >= 1");
  detail::Stopwatch clock;
  ExperimentReport rep;
  rep.name = "svp";
  rep.seed = cfg.seed;
  rep.config = cfg.to_json();
  rep.x_label = "m";
  rep.extra_columns = {"mean_sv_fraction", "converged_fraction", "svp_capacity"};
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<double> all(cfg.m_grid.size() * trials), frac(all.size()), conv(all.size());
  parallel_for(all.size(), cfg.jobs, [&](std::size_t job) {
    const int m = cfg.m_grid[job / trials];
    const auto seed = derive_seed(cfg.seed, job / trials, job % trials);
    const Mat x = gen_patterns(Geometry::bipolar(), cfg.n, m, derive_seed(seed, 0)).data();
    const Vec y = detail::random_signs(m, derive_seed(seed, 1));
    SolverConfig sc;
    sc.tolerance = cfg.tolerance;
    const auto r = train_neuron_hard_margin(x.transpose() * x, y, sc);
    const double cut = cfg.alpha_rel_tol * r.alpha.maxCoeff();
    const auto svs = (r.alpha.array() > cut).count();
    all[job] = svs == m ? 1.0 : 0.0;
    frac[job] = static_cast<double>(svs) / m;
    conv[job] = r.converged ? 1.0 : 0.0;
  });
  const double cap = svp_capacity(cfg.n);
  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const auto b = all.begin() + mi * trials;
    std::vector<double> v(b, b + trials);
    std::vector<double> f(frac.begin() + mi * trials, frac.begin() + (mi + 1) * trials);
    std::vector<double> c(conv.begin() + mi * trials, conv.begin() + (mi + 1) * trials);
    detail::push_row(rep, "svp", cfg.m_grid[mi], v, {detail::fraction(f), detail::fraction(c), cap});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

}  // namespace kernmem
