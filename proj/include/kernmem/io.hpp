#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "kernmem/common.hpp"
#include "kernmem/dynamics.hpp"
#include "kernmem/features.hpp"
#include "kernmem/kernels.hpp"
#include "kernmem/patterns.hpp"
#include "kernmem/report.hpp"
#include "kernmem/training.hpp"

namespace kernmem {

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

// Whole-file atomic write: the content goes to a sibling temporary file that
// is then renamed over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw DomainError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DomainError("cannot move output into place at '" + path.string() + "'");
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Pattern CSV
//
//   # kernmem-patterns v1 geometry=<tag> n=<N> m=<M> f=<f|na>
//   N lines of M comma-separated numbers (one pattern per column)

namespace detail {

inline std::string matrix_csv_body(const Mat& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out += ',';
      out += format_double(x(i, j));
    }
    out += '\n';
  }
  return out;
}

struct MatrixFile {
  std::map<std::string, std::string> header;
  Mat data;
};

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline MatrixFile parse_matrix_file(const std::string& text, const std::string& origin) {
  const auto fail = [&](long line, const std::string& what) {
    return DomainError(origin + ": line " + std::to_string(line) + ": " + what);
  };
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  MatrixFile mf;
  if (!std::getline(in, line)) throw fail(1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto words = split(line, ' ');
  if (words.size() < 2 || words[0] != "#" || words[1] != "kernmem-patterns") {
    throw fail(lineno, "missing '# kernmem-patterns' header");
  }
  if (words.size() < 3 || words[2] != "v1") {
    throw fail(lineno, "unsupported version '" + (words.size() > 2 ? words[2] : "") + "'");
  }
  for (std::size_t w = 3; w < words.size(); ++w) {
    if (words[w].empty()) continue;
    const auto eq = words[w].find('=');
    if (eq == std::string::npos) throw fail(lineno, "malformed header field '" + words[w] + "'");
    mf.header[words[w].substr(0, eq)] = words[w].substr(eq + 1);
  }
  for (const char* key : {"geometry", "n", "m", "f"}) {
    if (!mf.header.count(key)) throw fail(lineno, std::string("header is missing '") + key + "'");
  }
  const auto parse_count = [&](const std::string& key) {
    double v = 0.0;
    if (!parse_double(mf.header[key], v) || v < 1.0 || v != std::floor(v) || v > 1e9) {
      throw fail(1, "header field " + key + " must be a positive integer");
    }
    return static_cast<Eigen::Index>(v);
  };
  const auto n = parse_count("n");
  const auto m = parse_count("m");
  mf.data.resize(n, m);
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) throw fail(lineno, "more than n=" + std::to_string(n) + " data rows");
    const auto cells = split(line, ',');
    if (static_cast<Eigen::Index>(cells.size()) != m) {
      throw fail(lineno, "expected " + std::to_string(m) + " values, found " + std::to_string(cells.size()));
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      double v = 0.0;
      if (!parse_double(cells[static_cast<std::size_t>(j)], v) || !std::isfinite(v)) {
        throw fail(lineno, "column " + std::to_string(j + 1) + ": not a finite number '" +
                               cells[static_cast<std::size_t>(j)] + "'");
      }
      mf.data(row, j) = v;
    }
    ++row;
  }
  if (row != n) throw fail(lineno, "expected " + std::to_string(n) + " data rows, found " + std::to_string(row));
  return mf;
}

}  // namespace detail

inline std::string patterns_to_csv(const PatternSet& set) {
  const auto& g = set.geometry();
  std::string out = "# kernmem-patterns v1 geometry=" + geometry_tag(g.kind) +
                    " n=" + std::to_string(set.n()) + " m=" + std::to_string(set.m()) +
                    " f=" + (g.kind == GeometryKind::Bipolar ? format_double(g.f) : std::string("na")) +
                    "\n";
  return out + detail::matrix_csv_body(set.data());
}

inline PatternSet patterns_from_csv(const std::string& text, const std::string& origin = "<patterns>") {
  auto mf = detail::parse_matrix_file(text, origin);
  const auto& tag = mf.header["geometry"];
  if (tag == "addresses") throw DomainError(origin + ": line 1: file holds SDM addresses, not patterns");
  Geometry g;
  try {
    g.kind = parse_geometry_tag(tag);
  } catch (const DomainError& e) {
    throw DomainError(origin + ": line 1: " + e.what());
  }
  if (g.kind == GeometryKind::Bipolar) {
    if (!parse_double(mf.header["f"], g.f) || !(g.f > 0.0 && g.f < 1.0)) {
      throw DomainError(origin + ": line 1: bipolar header needs 0 < f < 1");
    }
    for (Eigen::Index i = 0; i < mf.data.rows(); ++i) {
      for (Eigen::Index j = 0; j < mf.data.cols(); ++j) {
        if (std::abs(mf.data(i, j)) != 1.0) {
          throw DomainError(origin + ": line " + std::to_string(i + 2) + ": column " +
                            std::to_string(j + 1) + ": bipolar entry must be +1 or -1");
        }
      }
    }
  } else {
    g.f = 0.0;
  }
  try {
    return PatternSet(std::move(mf.data), g);
  } catch (const DomainError& e) {
    throw DomainError(origin + ": " + e.what());
  }
}

inline void write_patterns(const std::filesystem::path& path, const PatternSet& set) {
  write_file_atomic(path, patterns_to_csv(set));
}

inline PatternSet read_patterns(const std::filesystem::path& path) {
  return patterns_from_csv(read_file(path), path.string());
}

// SDM address matrices (N_phi x N_in) are stored transposed, one address per column.
inline std::string addresses_to_csv(const Mat& z) {
  std::string out = "# kernmem-patterns v1 geometry=addresses n=" + std::to_string(z.cols()) +
                    " m=" + std::to_string(z.rows()) + " f=na\n";
  return out + detail::matrix_csv_body(z.transpose());
}

inline Mat addresses_from_csv(const std::string& text, const std::string& origin = "<addresses>") {
  auto mf = detail::parse_matrix_file(text, origin);
  if (mf.header["geometry"] != "addresses") {
    throw DomainError(origin + ": line 1: expected geometry=addresses");
  }
  return mf.data.transpose();
}

// ---------------------------------------------------------------------------
// Network JSON

namespace detail {

inline nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline double json_real(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

inline nlohmann::json matrix_json(const Mat& x) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat json_matrix(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw DomainError("network JSON: '" + what + "' must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Mat x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DomainError("network JSON: '" + what + "' row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) x(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return x;
}

inline nlohmann::json similarity_json(const Similarity& sim) {
  if (const auto* k = std::get_if<KernelSpec>(&sim)) return {{"kernel", to_string(*k)}};
  const auto& f = std::get<FeatureMap>(sim);
  nlohmann::json j = {{"feature_map", to_string(f)}, {"n_in", f.n_in}};
  if (f.kind == FeatureKind::Sdm) {
    j["bias"] = f.bias;
    j["addresses"] = matrix_json(f.addresses);
  }
  return j;
}

inline Similarity json_similarity(const nlohmann::json& j) {
  if (j.contains("kernel")) return parse_kernel_spec(j.at("kernel").get<std::string>());
  const auto kind = j.at("feature_map").get<std::string>();
  const auto n = j.at("n_in").get<Eigen::Index>();
  if (kind == "identity") return FeatureMap::identity(n);
  if (kind == "pairs") return FeatureMap::pairs(n);
  if (kind == "poly2") return FeatureMap::poly2(n);
  if (kind == "sdm") return FeatureMap::sdm(json_matrix(j.at("addresses"), "addresses"), j.at("bias").get<double>());
  throw DomainError("network JSON: unknown feature map '" + kind + "'");
}

}  // namespace detail

inline nlohmann::json network_to_json(const TrainedNetwork& net) {
  using namespace detail;
  nlohmann::json rows = nlohmann::json::array();
  auto conv = nlohmann::json::array();
  auto sweeps = nlohmann::json::array();
  auto margins = nlohmann::json::array();
  auto infeasible = nlohmann::json::array();
  for (const auto& r : net.rows) {
    conv.push_back(r.converged);
    sweeps.push_back(r.sweeps);
    margins.push_back(real_json(r.margin));
    infeasible.push_back(r.infeasible_suspected);
  }
  auto thetas = nlohmann::json::array();
  for (Eigen::Index i = 0; i < net.thetas.size(); ++i) thetas.push_back(net.thetas[i]);
  return {
      {"format", "kernmem-network"},
      {"version", 1},
      {"mode", to_string(net.mode)},
      {"rule", to_string(net.rule)},
      {"bias", to_string(net.bias)},
      {"coefficients", net.coefficients == CoefficientKind::Lagrange ? "lagrange" : "direct"},
      {"similarity", similarity_json(net.similarity)},
      {"alphas", matrix_json(net.alphas)},
      {"thetas", thetas},
      {"x_in", matrix_json(net.x_in)},
      {"x_out", matrix_json(net.x_out)},
      {"pattern_file_ref", net.pattern_file_ref},
      {"solver_metadata",
       {{"converged_per_row", conv},
        {"sweeps", sweeps},
        {"margins", margins},
        {"infeasible_suspected", infeasible},
        {"tol", net.tolerance}}},
  };
}

inline TrainedNetwork network_from_json(const nlohmann::json& j) {
  using namespace detail;
  try {
    if (j.at("format").get<std::string>() != "kernmem-network") {
      throw DomainError("network JSON: wrong format tag");
    }
    if (j.at("version").get<int>() != 1) throw DomainError("network JSON: unsupported version");
    TrainedNetwork net;
    net.mode = parse_mode(j.at("mode").get<std::string>());
    net.rule = parse_rule(j.at("rule").get<std::string>());
    net.bias = parse_bias(j.at("bias").get<std::string>());
    const auto coeff = j.at("coefficients").get<std::string>();
    if (coeff != "lagrange" && coeff != "direct") throw DomainError("network JSON: bad coefficients kind");
    net.coefficients = coeff == "lagrange" ? CoefficientKind::Lagrange : CoefficientKind::Direct;
    net.similarity = json_similarity(j.at("similarity"));
    net.alphas = json_matrix(j.at("alphas"), "alphas");
    const auto& th = j.at("thetas");
    net.thetas.resize(static_cast<Eigen::Index>(th.size()));
    for (std::size_t i = 0; i < th.size(); ++i) net.thetas[static_cast<Eigen::Index>(i)] = th[i].get<double>();
    net.x_in = json_matrix(j.at("x_in"), "x_in");
    net.x_out = json_matrix(j.at("x_out"), "x_out");
    net.pattern_file_ref = j.value("pattern_file_ref", "");
    const auto& meta = j.at("solver_metadata");
    net.tolerance = meta.at("tol").get<double>();
    const auto& conv = meta.at("converged_per_row");
    for (std::size_t i = 0; i < conv.size(); ++i) {
      RowInfo r;
      r.converged = conv[i].get<bool>();
      r.sweeps = meta.at("sweeps").at(i).get<long>();
      r.margin = json_real(meta.at("margins").at(i));
      r.infeasible_suspected = meta.at("infeasible_suspected").at(i).get<bool>();
      net.rows.push_back(r);
    }
    require(net.alphas.rows() == net.m() && net.alphas.cols() == net.n_out(),
            "network JSON: alphas shape does not match the patterns");
    require(net.thetas.size() == net.n_out(), "network JSON: thetas length does not match");
    require(static_cast<Eigen::Index>(net.rows.size()) == net.n_out(),
            "network JSON: metadata length does not match");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("network JSON: ") + e.what());
  }
}

inline void write_network(const std::filesystem::path& path, const TrainedNetwork& net) {
  write_file_atomic(path, network_to_json(net).dump(2) + "\n");
}

inline TrainedNetwork read_network(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
  return network_from_json(j);
}

// ---------------------------------------------------------------------------
// Trace CSV: step,neuron_0..neuron_{N-1}, then a footer comment line.

inline std::string trace_to_csv(const RecallTrace& trace) {
  std::string out = "step";
  const auto n = trace.states.empty() ? 0 : trace.states.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out += ",neuron_" + std::to_string(i);
  out += '\n';
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    out += std::to_string(t);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + format_double(trace.states[t][i]);
    out += '\n';
  }
  out += "# status=" + to_string(trace.status) + " converged=" + (trace.converged() ? "true" : "false") +
         " steps=" + std::to_string(trace.steps) + " tie=" + (trace.tie ? "true" : "false") + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Report CSV (RFC 4180) + JSON sidecar.

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string report_to_csv(const ExperimentReport& r) {
  std::string out = "series," + csv_field(r.x_label) + ",mean,sem,n_trials";
  for (const auto& c : r.extra_columns) out += "," + csv_field(c);
  out += "\r\n";
  for (const auto& row : r.rows) {
    out += csv_field(row.series) + "," + format_double(row.x) + "," + format_double(row.mean) + "," +
           format_double(row.sem) + "," + std::to_string(row.n_trials);
    for (double v : row.extra) out += "," + format_double(v);
    out += "\r\n";
  }
  return out;
}

inline nlohmann::json report_to_json(const ExperimentReport& r) {
  return {{"experiment", r.name},
          {"seed", r.seed},
          {"config", r.config},
          {"columns", [&] {
             auto c = nlohmann::json::array({"series", r.x_label, "mean", "sem", "n_trials"});
             for (const auto& e : r.extra_columns) c.push_back(e);
             return c;
           }()},
          {"rows", r.rows.size()},
          {"runtime_seconds", r.runtime_seconds}};
}

// Writes <dir>/<experiment>-<seed>.csv and .json; returns the CSV path.
inline std::filesystem::path write_report(const std::filesystem::path& dir, const ExperimentReport& r) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto stem = r.name + "-" + std::to_string(r.seed);
  const auto csv = dir / (stem + ".csv");
  write_file_atomic(csv, report_to_csv(r));
  write_file_atomic(dir / (stem + ".json"), report_to_json(r).dump(2) + "\n");
  return csv;
}

}  // namespace kernmem
