// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails. Each check also enforces its wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "kernmem/kernmem.hpp"
#include "oracles.hpp"

using namespace kernmem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Criterion {
public:
  explicit Criterion(Outcome& o) : o_(o) {}
  void check(bool cond, const std::string& what) {
    if (!cond) {
      o_.ok = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& s) {
    if (!o_.detail.empty()) o_.detail += "; ";
    o_.detail += s;
  }
  ~Criterion() {
    if (!failures_.empty()) o_.detail = "failed: " + failures_ + (o_.detail.empty() ? "" : " | " + o_.detail);
  }

private:
  Outcome& o_;
  std::string failures_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

Vec bipolar_vec(Rng& rng, Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return v;
}

const int kJobs = resolve_jobs(0);

// 1 --------------------------------------------------------------------------
Outcome kernel_feature_equivalence() {
  Outcome o;
  Criterion c(o);
  Rng rng(1);
  const auto map = FeatureMap::poly2(20);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Vec x = bipolar_vec(rng, 20), y = bipolar_vec(rng, 20);
    const double d = x.dot(y);
    worst = std::max(worst, std::abs(phi_apply(map, x).dot(phi_apply(map, y)) - (d + 1) * (d + 1)));
    worst = std::max(worst, std::abs(kernel_eval(KernelSpec::ipoly(2), x, y) - (d + 1) * (d + 1)));
  }
  c.check(worst <= 1e-9, "max deviation " + fmt(worst));
  c.note("100 pairs, N=20, max |phi.phi - (x.y+1)^2| = " + fmt(worst));
  return o;
}

// 2 --------------------------------------------------------------------------
Outcome sdm_cube_oracle() {
  Outcome o;
  Criterion c(o);
  double worst = 0.0;
  int cells = 0;
  for (int n : {8, 12, 14}) {
    for (int r = 0; r <= n; ++r) {
      for (int delta = 0; delta <= n; ++delta) {
        worst = std::max(worst, std::abs(sdm_cube_kernel(n, r, delta) - oracle::sdm_cube_enumerate(n, r, delta)));
        ++cells;
      }
    }
  }
  c.check(worst <= 1e-12, "max deviation " + fmt(worst));
  c.note(std::to_string(cells) + " (N, r, delta) cells vs 2^N enumeration, max deviation " + fmt(worst));
  return o;
}

// 3 --------------------------------------------------------------------------
// Deviation in standard errors. A zero-variance estimate (coincident points:
// every conditional sample lands in both caps) must match to roundoff.
double se_distance(double mc, double exact, double sem) {
  const double d = std::abs(mc - exact);
  if (sem > 0.0) return d / sem;
  return d <= 1e-9 * std::abs(exact) ? 0.0 : std::numeric_limits<double>::infinity();
}

Outcome sdm_sphere() {
  Outcome o;
  Criterion c(o);
  SdmScanConfig cfg;  // N_in = 50, b in {0.9, 0.95}, 5 angles each, 10^6 samples
  cfg.jobs = kJobs;
  const auto rep = exp_sdm_kernel_scan(cfg);
  c.check(rep.rows.size() == 10, "expected 10 grid points");
  double worst_lib = 0.0, worst_oracle = 0.0, worst_rel = 0.0;
  std::string rels;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    const double b = rep.extra(row, "b");
    const double exact = row.mean;
    const double z_lib = se_distance(rep.extra(row, "mc"), exact, rep.extra(row, "mc_sem"));
    double sem = 0.0;
    const double mc = oracle::cap_overlap_mc(cfg.n_in, b, std::cos(row.x), cfg.mc_samples, 1000 + i, &sem);
    const double z_oracle = se_distance(mc, exact, sem);
    worst_lib = std::max(worst_lib, z_lib);
    worst_oracle = std::max(worst_oracle, z_oracle);
    const double rel = rep.extra(row, "rel_error");
    worst_rel = std::max(worst_rel, rel);
    rels += (rels.empty() ? "" : " ") + fmt(100.0 * rel, 2) + "%";
  }
  c.check(worst_oracle <= 3.0, "independent MC off by " + fmt(worst_oracle) + " SE");
  c.check(worst_lib <= 3.0, "library MC off by " + fmt(worst_lib) + " SE");
  c.check(worst_rel <= 0.10, "sparse approximation rel. error up to " + fmt(100.0 * worst_rel, 3) + "%");
  c.note("quadrature vs MC: max " + fmt(worst_oracle, 3) + " SE (test-side sampler), " + fmt(worst_lib, 3) +
         " SE (library sampler)");
  c.note("approximation rel. errors " + rels);
  return o;
}

// 4 --------------------------------------------------------------------------
Outcome zero_temperature_identity() {
  Outcome o;
  Criterion c(o);
  const auto set = gen_patterns(Geometry::gaussian(), 20, 50, 4);
  const double dmin = min_pairwise_distance(set);
  const double r = 0.99 * dmin;
  const Mat k = kernel_matrix(KernelSpec::exp_beta(r, 1e3), set.data());
  const double dev = (k - Mat::Identity(50, 50)).cwiseAbs().maxCoeff();
  c.check(dev <= 1e-6, "max |K - I| = " + fmt(dev));
  c.note("M=50, N=20, r=0.99 min distance, max |K - I| = " + fmt(dev));
  return o;
}

// 5 --------------------------------------------------------------------------
Outcome noise_landmark() {
  Outcome o;
  Criterion c(o);
  NoiseConfig g;
  g.geometry = GeometryKind::Gaussian;
  g.n = 100;
  g.m = 10;
  g.r = 5.0;
  g.grid = {1.0};
  g.trials = 1000;
  g.jobs = kJobs;
  const double rg = exp_noise_recovery(g).rows[0].mean;
  NoiseConfig b = g;
  b.geometry = GeometryKind::Bipolar;
  // Bit-flip noise moves a pattern by 2 sqrt(k): with r^2 = 26 the basin
  // boundary sits between lattice shells instead of on one.
  b.r = std::sqrt(26.0);
  const double rb = exp_noise_recovery(b).rows[0].mean;
  c.check(std::abs(rg - 0.5) <= 0.05, "gaussian recovery " + fmt(rg));
  c.check(std::abs(rb - 0.5) <= 0.05, "bipolar recovery " + fmt(rb));
  c.note("gaussian r=5, sigma^2=r^2/N: " + fmt(rg) + "; bipolar r=sqrt(26), rho=r^2/4N: " + fmt(rb));
  return o;
}

// 6 --------------------------------------------------------------------------
Outcome exponential_capacity() {
  Outcome o;
  Criterion c(o);
  CapacityConfig cfg;  // N in {25, 50, 75, 100}, sigma_max^2 = r^2/N = 0.25
  cfg.trials = 500;
  cfg.jobs = kJobs;
  const auto rep = exp_capacity_gaussian(cfg);
  std::vector<double> ns, logs;
  std::string cells;
  for (const auto& row : rep.rows) {
    const double bound = rep.extra(row, "bound");
    c.check(row.mean > bound, "N=" + fmt(row.x) + " mean " + fmt(row.mean) + " <= bound " + fmt(bound));
    ns.push_back(row.x);
    logs.push_back(std::log(row.mean));
    cells += (cells.empty() ? "" : ", ") + std::string("N=") + fmt(row.x) + ": " + fmt(row.mean) + " > " + fmt(bound);
  }
  const double r2 = linear_fit_r2(ns, logs);
  c.check(r2 > 0.98, "R^2 = " + fmt(r2));
  c.note(cells + "; R^2 = " + fmt(r2, 5));
  return o;
}

// 7 --------------------------------------------------------------------------
Outcome margin_experiment() {
  Outcome o;
  Criterion c(o);
  MarginConfig cfg;  // N = 40, 20 trials
  cfg.jobs = kJobs;
  const auto rep = exp_margin_vs_load(cfg);
  const auto hm = rep.series("hard-margin");
  const auto sbp = rep.series("sbp");
  const auto heb = rep.series("hebbian-pairs");
  std::vector<double> x, y_sbp, y_heb;
  int compared = 0;
  for (std::size_t i = 0; i < hm.size(); ++i) {
    x.push_back(hm[i]->x);
    y_sbp.push_back(sbp[i]->mean);
    y_heb.push_back(heb[i]->mean);
    if (hm[i]->mean > 0 && sbp[i]->mean > 0 && heb[i]->mean > 0) {
      ++compared;
      c.check(hm[i]->mean >= sbp[i]->mean && sbp[i]->mean >= heb[i]->mean,
              "ordering violated at load " + fmt(hm[i]->x));
    }
  }
  const double z_heb = zero_crossing(x, y_heb);
  const double z_sbp = zero_crossing(x, y_sbp);
  c.check(z_heb >= 0.02 && z_heb <= 0.10, "hebbian zero crossing " + fmt(z_heb));
  c.check(z_sbp >= 0.35 && z_sbp <= 1.0, "sbp zero crossing " + fmt(z_sbp));
  c.note("ordering checked at " + std::to_string(compared) + " loads; zero crossings hebbian " + fmt(z_heb, 3) +
         ", sbp " + fmt(z_sbp, 3));
  return o;
}

// 8 --------------------------------------------------------------------------
Outcome hopfield_regimes() {
  Outcome o;
  Criterion c(o);
  HopfieldConfig heb;
  heb.n = 100;
  heb.m_grid = {8, 9, 10, 11, 12, 13, 14, 15, 16};
  heb.rule = "hebbian";
  heb.flip_count = 10;
  heb.trials = 300;
  heb.jobs = kJobs;
  const auto rh = exp_hopfield_capacity(heb);
  const double collapse = collapse_point(rh, "hebbian", 0.9);
  c.check(collapse >= 10 && collapse <= 15, "hebbian collapse at M=" + fmt(collapse));

  HopfieldConfig pinv = heb;
  pinv.rule = "pinv";
  pinv.m_grid = {10, 50, 99};
  pinv.trials = 5;
  const auto rp = exp_hopfield_capacity(pinv);
  for (const auto& row : rp.rows) {
    c.check(rp.extra(row, "fixed_point_fraction") == 1.0, "pinv fixed points fail at M=" + fmt(row.x));
  }

  HopfieldConfig hm = heb;
  hm.rule = "hard-margin";
  hm.m_grid = {150};
  hm.trials = 5;
  const auto rm = exp_hopfield_capacity(hm);
  const double cons = rm.extra(rm.rows[0], "constraints_fraction");
  const double fixed = rm.extra(rm.rows[0], "fixed_point_fraction");
  c.check(cons == 1.0, "hard-margin constraints satisfied in " + fmt(cons) + " of trials");
  c.check(fixed == 1.0, "hard-margin fixed-point fraction " + fmt(fixed));

  std::string curve;
  for (const auto& row : rh.rows) curve += (curve.empty() ? "" : " ") + fmt(row.mean, 3);
  c.note("hebbian recovery M=8..16: " + curve + " (collapse below 0.9 at M=" + fmt(collapse) +
         "); pinv fixed points at M=10,50,99; hard-margin M=150 constraints " + fmt(cons));
  return o;
}

// 9 --------------------------------------------------------------------------
Outcome svp() {
  Outcome o;
  Criterion c(o);
  SvpConfig cfg;
  cfg.n = 200;
  cfg.m_grid = {10, 300};
  cfg.trials = 50;
  cfg.jobs = kJobs;
  const auto rep = exp_svp_fraction(cfg);
  const double low = rep.rows[0].mean, high = rep.rows[1].mean;
  c.check(low >= 0.9, "all-SV fraction at M=10 is " + fmt(low));
  c.check(high <= 0.1, "all-SV fraction at M=300 is " + fmt(high));
  c.note("all-SV fraction M=10: " + fmt(low) + ", M=300: " + fmt(high) + " (N/(2 W0(N/2)) = " +
         fmt(svp_capacity(200)) + ")");
  return o;
}

// 10 -------------------------------------------------------------------------
Outcome property_suite() {
  Outcome o;
  Criterion c(o);
  Rng rng(10);

  // Fixed points after every converged training rule.
  int networks = 0;
  for (std::uint64_t trial = 0; trial < 4; ++trial) {
    const Mat x = gen_patterns(Geometry::bipolar(), 40, 12, derive_seed(99, trial)).data();
    const std::vector<Similarity> sims = {KernelSpec::linear(), KernelSpec::poly(2), KernelSpec::ipoly(3),
                                          KernelSpec::exponential(), FeatureMap::pairs(40)};
    for (Rule rule : {Rule::HardMargin, Rule::KernelAdatron, Rule::Sbp, Rule::Hebbian, Rule::Pseudoinverse,
                      Rule::GeneralizedPseudoinverse}) {
      for (const auto& sim : sims) {
        const auto* k = std::get_if<KernelSpec>(&sim);
        const bool linear = k && k->kind == KernelKind::Linear;
        if (rule == Rule::Pseudoinverse && !linear) continue;
        if (rule == Rule::GeneralizedPseudoinverse && (linear || !k)) continue;
        for (NetworkMode mode : {NetworkMode::AutoWithSelf, NetworkMode::AutoNoSelf}) {
          if (mode == NetworkMode::AutoNoSelf && !k) continue;
          SolverConfig cfg;
          cfg.rule = rule;
          cfg.lr = rule == Rule::Sbp ? 0.05 : 0.0;
          cfg.sbp_iterations = 20000;
          cfg.seed = trial;
          const auto net = std::make_shared<TrainedNetwork>(train_network(x, mode, sim, cfg));
          bool trained = true;
          for (const auto& r : net->rows) trained = trained && r.converged && r.margin > 0.0;
          if (!trained) continue;
          ++networks;
          const auto update = mode == NetworkMode::AutoNoSelf ? UpdateRule::async(net, trial) : UpdateRule::sync(net);
          for (Eigen::Index mu = 0; mu < x.cols(); ++mu) {
            const bool fixed = update.apply(x.col(mu)) == x.col(mu);
            c.check(fixed, "pattern " + std::to_string(mu) + " not fixed under " + to_string(rule) + "/" +
                               to_string(sim) + "/" + to_string(mode));
          }
        }
      }
    }
  }

  // One-step convergence and the agnostic state of the zero-temperature rule.
  const auto g = gen_patterns(Geometry::gaussian(), 10, 20, 5);
  const double r = 0.45 * min_pairwise_distance(g);
  int inside = 0, outside = 0;
  for (int t = 0; t < 4000; ++t) {
    Vec s(10);
    if (t % 2 == 0) {
      const auto mu = static_cast<Eigen::Index>(rng.below(20));
      Vec dir(10);
      for (int i = 0; i < 10; ++i) dir[i] = rng.normal();
      s = g.col(mu) + dir / dir.norm() * (r * rng.uniform());
      const Vec out = expbeta_zero_temp_step(g.data(), r, s);
      c.check(out == g.col(mu), "one-step convergence failed");
      c.check(expbeta_zero_temp_step(g.data(), r, out) == out, "recalled pattern not fixed");
      ++inside;
    } else {
      for (int i = 0; i < 10; ++i) s[i] = 2.0 * rng.normal();
      bool near = false;
      for (Eigen::Index mu = 0; mu < 20; ++mu) near = near || (g.col(mu) - s).norm() <= r;
      if (near) continue;
      c.check(expbeta_zero_temp_step(g.data(), r, s).isZero(0.0), "agnostic state not reached");
      ++outside;
    }
  }
  c.check(expbeta_zero_temp_step(g.data(), r, Vec::Zero(10)).isZero(0.0) ||
              min_pairwise_distance(g) <= r,
          "origin not a fixed point");

  // Basin of the zero-temperature Exp-beta rule inside the softmax Voronoi
  // cell, on S^2 with 17 patterns.
  const auto sph = gen_patterns(Geometry::hypersphere(), 3, 17, 2);
  const double rs = 0.5 * min_pairwise_distance(sph);
  int basin = 0;
  for (int t = 0; t < 100000; ++t) {
    Vec s = sph.col(static_cast<Eigen::Index>(rng.below(17)));
    const double scale = 2.0 * rs * rng.uniform() / std::sqrt(3.0);
    for (int i = 0; i < 3; ++i) s[i] += scale * rng.normal();
    s /= s.norm();
    const Vec out = expbeta_zero_temp_step(sph.data(), rs, s);
    if (out.isZero(0.0)) continue;
    ++basin;
    const auto sm = softmax_step(sph.data(), std::numeric_limits<double>::infinity(), s);
    c.check(sm.state == out, "basin point outside the Voronoi cell");
  }
  c.check(basin > 10000 && basin < 100000, "basin sampling degenerate");
  c.note(std::to_string(networks) + " converged networks all fix their patterns; " + std::to_string(inside) +
         " one-step and " + std::to_string(outside) + " agnostic probes; " + std::to_string(basin) +
         " basin samples on S^2 (M=17) inside Voronoi cells");
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, "kernel-feature equivalence", 1.0, kernel_feature_equivalence},
      {2, "SDM cube kernel vs enumeration", 30.0, sdm_cube_oracle},
      {3, "SDM sphere kernels", 120.0, sdm_sphere},
      {4, "zero-temperature kernel identity", 1.0, zero_temperature_identity},
      {5, "noise robustness landmark", 60.0, noise_landmark},
      {6, "exponential capacity", 300.0, exponential_capacity},
      {7, "margin experiment", 600.0, margin_experiment},
      {8, "Hopfield regimes", 600.0, hopfield_regimes},
      {9, "support vector proliferation", 300.0, svp},
      {10, "property suite", 120.0, property_suite},
  };
  int failed = 0;
  for (const auto& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > e.budget_seconds) {
      out.ok = false;
      out.detail += "; over budget (" + fmt(secs) + " s > " + fmt(e.budget_seconds) + " s)";
    }
    if (!out.ok) ++failed;
    std::printf("[%s] %d %s: %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", e.id, e.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
