#pragma once

// Command-line front end. run_cli() holds all logic so tests can drive it
// in-process; main() only forwards argv.
//
// Exit codes: 0 success, 1 domain error (bad values, malformed files,
// failed convergence), 2 usage error (unknown flags, missing arguments).

#include <cstdint>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kernmem/kernmem.hpp"

namespace kernmem::cli {

namespace detail {

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_double(item, v)) throw DomainError("not a number in list: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    if (v != std::floor(v)) throw DomainError("expected integers, got " + format_double(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline Similarity parse_similarity(const std::string& kernel, const std::string& feature_map, Eigen::Index n) {
  if (!feature_map.empty()) {
    if (feature_map == "identity") return FeatureMap::identity(n);
    if (feature_map == "pairs") return FeatureMap::pairs(n);
    if (feature_map == "poly2") return FeatureMap::poly2(n);
    throw DomainError("unknown feature map '" + feature_map + "' (identity|pairs|poly2)");
  }
  return parse_kernel_spec(kernel);
}

inline void emit_config(std::ostream& out, const std::string& command, const nlohmann::json& config) {
  out << nlohmann::json{{"command", command}, {"config", config}}.dump() << "\n";
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kernmem: kernel memory networks"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", "kernmem 1.0");

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a random pattern set");
  std::string geometry = "bipolar";
  long gen_n = 100, gen_m = 10;
  double gen_f = 0.5;
  std::uint64_t seed = 1;
  std::string out_path;
  gen->add_option("--geometry", geometry, "bipolar | gaussian | sphere");
  gen->add_option("--n", gen_n, "Dimension N");
  gen->add_option("--m", gen_m, "Number of patterns M");
  gen->add_option("--f", gen_f, "Sparseness P(+1) for bipolar patterns");
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("--out", out_path, "Output pattern CSV")->required();

  // train -------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train a network on a pattern file");
  std::string patterns_path, targets_path, mode = "auto", kernel = "linear", feature_map,
                                            rule = "hard-margin", bias = "zero";
  double tol = 1e-6, lr = 0.0;
  long max_sweeps = 0, sbp_iterations = 0;
  int jobs = 0;
  train->add_option("--patterns", patterns_path, "Input pattern CSV")->required();
  train->add_option("--targets", targets_path, "Output pattern CSV (hetero mode)");
  train->add_option("--mode", mode, "hetero | auto | auto-noself | interp");
  train->add_option("--kernel", kernel,
                    "linear | poly:<p> | ipoly:<p> | exp | expbeta:<r>:<beta> | sdm-cube:<nin>:<r> | "
                    "sdm-sphere:<nin>:<b>[:approx]");
  train->add_option("--feature-map", feature_map, "identity | pairs | poly2 (overrides --kernel)");
  train->add_option("--rule", rule, "hard-margin | adatron | sbp | hebbian | pinv | gpinv");
  train->add_option("--bias", bias, "zero | trained");
  train->add_option("--tol", tol, "KKT tolerance");
  train->add_option("--lr", lr, "Learning rate (0 = rule default)");
  train->add_option("--max-sweeps", max_sweeps, "Solver sweep limit (0 = 10^4 M)");
  train->add_option("--sbp-iterations", sbp_iterations, "SBP iterations (0 = 20 M)");
  train->add_option("--seed", seed, "Master seed");
  train->add_option("--jobs", jobs, "Worker threads (0 = $KERNMEM_JOBS or 1)");
  train->add_option("--out", out_path, "Output network JSON")->required();

  // recall ------------------------------------------------------------------
  auto* recall = app.add_subcommand("recall", "Run recall dynamics from a query");
  std::string network_path, query_path, update = "auto";
  long query_column = 0, stored = -1, flips = 0, max_steps = 100;
  recall->add_option("--network", network_path, "Network JSON")->required();
  recall->add_option("--query", query_path, "Query pattern CSV");
  recall->add_option("--column", query_column, "Column of the query file to use");
  recall->add_option("--stored", stored, "Start from stored pattern k instead of a query file");
  recall->add_option("--flip", flips, "Flip this many bits of the start state");
  recall->add_option("--update", update, "auto | sync | async | hetero | interp");
  recall->add_option("--max-steps", max_steps, "Step limit");
  recall->add_option("--seed", seed, "Seed for async order and flips");
  recall->add_option("--out", out_path, "Output trace CSV (stdout if empty)");

  // kernel ------------------------------------------------------------------
  auto* kern = app.add_subcommand("kernel", "Evaluate a kernel");
  std::string kx, ky, kfile;
  kern->add_option("--kernel", kernel, "Kernel spec")->required();
  kern->add_option("--x", kx, "First vector, comma separated");
  kern->add_option("--y", ky, "Second vector, comma separated");
  kern->add_option("--patterns", kfile, "Pattern CSV; prints its Gram matrix as CSV");

  // experiment --------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "Run a named experiment");
  exp->require_subcommand(1);
  std::string out_dir = ".";
  int trials = 0;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--trials", trials, "Trials per grid cell (0 = experiment default)");
    sub->add_option("--jobs", jobs, "Worker threads (0 = $KERNMEM_JOBS or 1)");
    sub->add_option("--out-dir", out_dir, "Directory for <experiment>-<seed>.csv/.json");
  };

  MarginConfig margin_cfg;
  std::string loads_text, rules_text;
  auto* e_margin = exp->add_subcommand("margin", "Margin versus load for one neuron");
  common(e_margin);
  e_margin->add_option("--n", margin_cfg.n, "Input dimension");
  e_margin->add_option("--loads", loads_text, "Comma-separated loads M/N^2 (empty = default grid)");
  e_margin->add_option("--rules", rules_text, "Comma-separated: hard-margin,sbp,hebbian-pairs,hebbian-poly2");
  e_margin->add_option("--sbp-lr", margin_cfg.sbp_lr, "SBP learning rate");
  e_margin->add_option("--sbp-iterations", margin_cfg.sbp_iterations, "Fixed SBP iterations (0 = per-pattern)");
  e_margin->add_option("--sbp-iterations-per-pattern", margin_cfg.sbp_iterations_per_pattern,
                       "SBP iterations per stored pattern");
  e_margin->add_option("--max-sweeps", margin_cfg.hard_margin_max_sweeps, "Hard-margin sweep limit");

  CapacityConfig cap_cfg;
  std::string n_values_text;
  auto* e_cap = exp->add_subcommand("capacity-gaussian", "Sample-until-collision capacity");
  common(e_cap);
  e_cap->add_option("--n-values", n_values_text, "Comma-separated dimensions (empty = 25,50,75,100)");
  e_cap->add_option("--r", cap_cfg.radius, "Fixed radius (0 = use --sigma2)");
  e_cap->add_option("--sigma2", cap_cfg.sigma2, "sigma_max^2 with r = sqrt(sigma2 N)");

  NoiseConfig noise_cfg;
  std::string noise_geometry = "gaussian", sigma_grid = "auto", rho_grid = "auto";
  auto* e_noise = exp->add_subcommand("noise", "One-step recovery under noise");
  common(e_noise);
  e_noise->add_option("--geometry", noise_geometry, "gaussian | bipolar");
  e_noise->add_option("--n", noise_cfg.n, "Dimension");
  e_noise->add_option("--m", noise_cfg.m, "Stored patterns");
  e_noise->add_option("--r", noise_cfg.r, "Basin radius");
  e_noise->add_option("--sigma-grid", sigma_grid, "auto or comma-separated sigma^2 values");
  e_noise->add_option("--rho-grid", rho_grid, "auto or comma-separated flip probabilities");

  SdmScanConfig sdm_cfg;
  std::string b_text, frac_text;
  auto* e_sdm = exp->add_subcommand("sdm-kernel", "SDM hypersphere kernel scan");
  common(e_sdm);
  e_sdm->add_option("--n-in", sdm_cfg.n_in, "Input dimension");
  e_sdm->add_option("--b-values", b_text, "Comma-separated biases (empty = 0.9,0.95)");
  e_sdm->add_option("--angle-fractions", frac_text, "Angles as fractions of 2 acos(b)");
  e_sdm->add_option("--mc-samples", sdm_cfg.mc_samples, "Monte Carlo samples per point (0 = off)");

  HopfieldConfig hop_cfg;
  std::string m_grid_text;
  auto* e_hop = exp->add_subcommand("hopfield", "Recurrent recall versus pattern count");
  common(e_hop);
  e_hop->add_option("--n", hop_cfg.n, "Dimension");
  e_hop->add_option("--m-grid", m_grid_text, "Comma-separated pattern counts");
  e_hop->add_option("--rule", hop_cfg.rule, "hebbian | hard-margin | pinv");
  e_hop->add_option("--flip-count", hop_cfg.flip_count, "Bits flipped in each probe");
  e_hop->add_option("--max-sweeps", hop_cfg.max_sweeps, "Async sweep limit");

  SvpConfig svp_cfg;
  auto* e_svp = exp->add_subcommand("svp", "Support-vector proliferation");
  common(e_svp);
  e_svp->add_option("--n", svp_cfg.n, "Dimension");
  e_svp->add_option("--m-grid", m_grid_text, "Comma-separated pattern counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      Geometry g;
      g.kind = parse_geometry_tag(geometry);
      g.f = g.kind == GeometryKind::Bipolar ? gen_f : 0.0;
      const auto set = gen_patterns(g, gen_n, gen_m, seed);
      write_patterns(out_path, set);
      detail::emit_config(out, "gen",
                          {{"geometry", geometry_tag(g.kind)}, {"n", gen_n}, {"m", gen_m},
                           {"f", g.kind == GeometryKind::Bipolar ? nlohmann::json(gen_f) : nlohmann::json("na")},
                           {"seed", seed}, {"out", out_path}});
      return 0;
    }

    if (*train) {
      const auto x = read_patterns(patterns_path);
      const auto net_mode = parse_mode(mode);
      Mat x_out = x.data();
      if (net_mode == NetworkMode::Hetero) {
        if (targets_path.empty()) throw DomainError("hetero mode needs --targets");
        x_out = read_patterns(targets_path).data();
      }
      SolverConfig sc;
      sc.rule = parse_rule(rule);
      sc.bias = parse_bias(bias);
      sc.tolerance = tol;
      sc.lr = lr;
      sc.max_sweeps = max_sweeps;
      sc.sbp_iterations = sbp_iterations > 0 ? sbp_iterations : 20 * x.m();
      sc.seed = seed;
      sc.jobs = resolve_jobs(jobs);
      require(tol > 0.0, "--tol must be > 0");
      const auto sim = detail::parse_similarity(kernel, feature_map, x.n());
      auto net = train_network(x.data(), x_out, net_mode, sim, sc);
      net.pattern_file_ref = patterns_path;
      write_network(out_path, net);
      detail::emit_config(out, "train",
                          {{"patterns", patterns_path}, {"targets", targets_path}, {"mode", to_string(net_mode)},
                           {"similarity", to_string(sim)}, {"rule", to_string(sc.rule)},
                           {"bias", to_string(sc.bias)}, {"tol", tol}, {"lr", lr}, {"max_sweeps", max_sweeps},
                           {"sbp_iterations", sc.sbp_iterations}, {"seed", seed}, {"jobs", sc.jobs},
                           {"all_converged", net.all_converged()}, {"out", out_path}});
      if (!net.all_converged()) err << "warning: some neurons did not converge\n";
      return 0;
    }

    if (*recall) {
      auto net = std::make_shared<TrainedNetwork>(read_network(network_path));
      Vec s;
      if (stored >= 0) {
        require(stored < net->m(), "--stored index out of range");
        s = net->x_in.col(stored);
      } else {
        require(!query_path.empty(), "recall needs --query or --stored");
        const auto q = read_patterns(query_path);
        require(query_column >= 0 && query_column < q.m(), "--column out of range");
        s = q.data().col(query_column);
      }
      require(s.size() == net->n_in(), "query dimension does not match the network");
      if (flips > 0) s = flip_bits(s, static_cast<std::size_t>(flips), derive_seed(seed, 0));
      std::string kind = update;
      if (kind == "auto") {
        kind = net->mode == NetworkMode::Hetero             ? "hetero"
               : net->mode == NetworkMode::ContinuousInterp ? "interp"
               : net->mode == NetworkMode::AutoNoSelf       ? "async"
                                                            : "sync";
      }
      UpdateRule rule_obj = kind == "hetero"   ? UpdateRule::hetero(net)
                            : kind == "sync"   ? UpdateRule::sync(net)
                            : kind == "async"  ? UpdateRule::async(net, derive_seed(seed, 1))
                            : kind == "interp" ? UpdateRule::interp(net)
                                               : throw DomainError("unknown update '" + kind + "'");
      const auto trace = run_to_fixed_point(rule_obj, s, max_steps);
      const auto csv = trace_to_csv(trace);
      if (out_path.empty()) {
        out << csv;
      } else {
        write_file_atomic(out_path, csv);
      }
      detail::emit_config(out_path.empty() ? err : out, "recall",
                          {{"network", network_path}, {"query", query_path}, {"column", query_column},
                           {"stored", stored}, {"flip", flips}, {"update", kind}, {"max_steps", max_steps},
                           {"seed", seed}, {"status", to_string(trace.status)}, {"steps", trace.steps}});
      return 0;
    }

    if (*kern) {
      const auto spec = parse_kernel_spec(kernel);
      if (!kfile.empty()) {
        const auto x = read_patterns(kfile);
        const Mat k = kernel_matrix(spec, x.data());
        for (Eigen::Index i = 0; i < k.rows(); ++i) {
          for (Eigen::Index j = 0; j < k.cols(); ++j) out << (j ? "," : "") << format_double(k(i, j));
          out << "\n";
        }
        return 0;
      }
      require(!kx.empty() && !ky.empty(), "kernel needs --x and --y, or --patterns");
      const auto xv = detail::parse_list(kx), yv = detail::parse_list(ky);
      const Vec x = Eigen::Map<const Vec>(xv.data(), static_cast<Eigen::Index>(xv.size()));
      const Vec y = Eigen::Map<const Vec>(yv.data(), static_cast<Eigen::Index>(yv.size()));
      out << format_double(kernel_eval(spec, x, y)) << "\n";
      return 0;
    }

    if (*exp) {
      const int j = resolve_jobs(jobs);
      ExperimentReport rep;
      if (*e_margin) {
        margin_cfg.seed = seed;
        margin_cfg.jobs = j;
        if (trials > 0) margin_cfg.trials = trials;
        if (!loads_text.empty()) margin_cfg.loads = detail::parse_list(loads_text);
        if (!rules_text.empty()) {
          margin_cfg.rules.clear();
          std::stringstream ss(rules_text);
          std::string r;
          while (std::getline(ss, r, ',')) margin_cfg.rules.push_back(r);
        }
        rep = exp_margin_vs_load(margin_cfg);
      } else if (*e_cap) {
        cap_cfg.seed = seed;
        cap_cfg.jobs = j;
        if (trials > 0) cap_cfg.trials = trials;
        if (!n_values_text.empty()) cap_cfg.n_values = detail::parse_int_list(n_values_text);
        rep = exp_capacity_gaussian(cap_cfg);
      } else if (*e_noise) {
        noise_cfg.seed = seed;
        noise_cfg.jobs = j;
        if (trials > 0) noise_cfg.trials = trials;
        noise_cfg.geometry = parse_geometry_tag(noise_geometry);
        const auto& grid = noise_cfg.geometry == GeometryKind::Bipolar ? rho_grid : sigma_grid;
        if (grid != "auto") {
          const double crit = noise_cfg.critical();
          require(crit > 0.0, "critical noise level is zero");
          noise_cfg.grid.clear();
          for (double v : detail::parse_list(grid)) noise_cfg.grid.push_back(v / crit);
        }
        rep = exp_noise_recovery(noise_cfg);
      } else if (*e_sdm) {
        sdm_cfg.seed = seed;
        sdm_cfg.jobs = j;
        if (!b_text.empty()) sdm_cfg.b_values = detail::parse_list(b_text);
        if (!frac_text.empty()) sdm_cfg.angle_fractions = detail::parse_list(frac_text);
        rep = exp_sdm_kernel_scan(sdm_cfg);
      } else if (*e_hop) {
        hop_cfg.seed = seed;
        hop_cfg.jobs = j;
        if (trials > 0) hop_cfg.trials = trials;
        if (!m_grid_text.empty()) hop_cfg.m_grid = detail::parse_int_list(m_grid_text);
        rep = exp_hopfield_capacity(hop_cfg);
      } else if (*e_svp) {
        svp_cfg.seed = seed;
        svp_cfg.jobs = j;
        if (trials > 0) svp_cfg.trials = trials;
        if (!m_grid_text.empty()) svp_cfg.m_grid = detail::parse_int_list(m_grid_text);
        rep = exp_svp_fraction(svp_cfg);
      }
      auto config = rep.config;
      config["jobs"] = j;
      config["out_dir"] = out_dir;
      detail::emit_config(out, "experiment " + rep.name, config);
      const auto path = write_report(out_dir, rep);
      out << path.string() << "\n";
      return 0;
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace kernmem::cli
