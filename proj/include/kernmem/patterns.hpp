#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "kernmem/common.hpp"
#include "kernmem/rng.hpp"

namespace kernmem {

enum class GeometryKind { Bipolar, Gaussian, Hypersphere };

struct Geometry {
  GeometryKind kind = GeometryKind::Bipolar;
  double f = 0.5;  // P(entry = +1); Bipolar only

  static Geometry bipolar(double f = 0.5) { return {GeometryKind::Bipolar, f}; }
  static Geometry gaussian() { return {GeometryKind::Gaussian, 0.0}; }
  static Geometry hypersphere() { return {GeometryKind::Hypersphere, 0.0}; }

  bool operator==(const Geometry&) const = default;
};

inline std::string geometry_tag(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Bipolar: return "bipolar";
    case GeometryKind::Gaussian: return "gaussian";
    case GeometryKind::Hypersphere: return "sphere";
  }
  return "?";
}

inline GeometryKind parse_geometry_tag(const std::string& tag) {
  if (tag == "bipolar") return GeometryKind::Bipolar;
  if (tag == "gaussian") return GeometryKind::Gaussian;
  if (tag == "sphere" || tag == "hypersphere") return GeometryKind::Hypersphere;
  throw DomainError("unknown geometry '" + tag + "'");
}

namespace detail {

inline constexpr double kDistinctTol = 1e-12;
inline constexpr double kUnitNormTol = 1e-12;

inline std::uint64_t hash_bipolar_column(const Eigen::Ref<const Vec>& c) {
  std::uint64_t h = 0x84222325CBF29CE4ULL;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    h = splitmix64(h ^ (c[i] > 0 ? 0x9E37ULL : 0x7F4AULL) ^ static_cast<std::uint64_t>(i));
  }
  return h;
}

inline bool columns_close(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b,
                          double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

// Index of the first column that duplicates an earlier one, or -1.
// Bipolar columns are compared exactly (via hashing); continuous columns
// within kDistinctTol in max-norm (via a sort on the first coordinate).
inline Eigen::Index first_duplicate_column(const Mat& data, GeometryKind kind) {
  const Eigen::Index m = data.cols();
  if (m < 2) return -1;
  if (kind == GeometryKind::Bipolar) {
    std::unordered_multimap<std::uint64_t, Eigen::Index> seen;
    seen.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto h = hash_bipolar_column(data.col(j));
      auto [lo, hi] = seen.equal_range(h);
      for (auto it = lo; it != hi; ++it) {
        if (data.col(it->second) == data.col(j)) return j;
      }
      seen.emplace(h, j);
    }
    return -1;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return data(0, a) < data(0, b); });
  Eigen::Index worst = -1;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (data(0, order[b]) - data(0, order[a]) > kDistinctTol) break;
      if (columns_close(data.col(order[a]), data.col(order[b]), kDistinctTol)) {
        const auto later = std::max(order[a], order[b]);
        worst = worst < 0 ? later : std::min(worst, later);
      }
    }
  }
  return worst;
}

}  // namespace detail

// N x M matrix of column patterns with the geometry they were drawn from.
// Construction validates the geometry invariants and column distinctness.
class PatternSet {
public:
  PatternSet(Mat data, Geometry geometry) : data_(std::move(data)), geometry_(geometry) {
    validate();
  }

  const Mat& data() const { return data_; }
  const Geometry& geometry() const { return geometry_; }
  Eigen::Index n() const { return data_.rows(); }
  Eigen::Index m() const { return data_.cols(); }
  auto col(Eigen::Index mu) const { return data_.col(mu); }

private:
  void validate() const {
    require(data_.rows() >= 1 && data_.cols() >= 1, "pattern set must be non-empty");
    require(data_.allFinite(), "pattern set contains non-finite entries");
    switch (geometry_.kind) {
      case GeometryKind::Bipolar:
        require(geometry_.f > 0.0 && geometry_.f < 1.0, "sparseness f must lie in (0, 1)");
        require(is_bipolar(data_), "bipolar pattern set has entries other than +-1");
        break;
      case GeometryKind::Hypersphere:
        for (Eigen::Index j = 0; j < data_.cols(); ++j) {
          require(std::abs(data_.col(j).norm() - 1.0) <= detail::kUnitNormTol,
                  "hypersphere pattern " + std::to_string(j) + " is not unit norm");
        }
        break;
      case GeometryKind::Gaussian:
        break;
    }
    const auto dup = detail::first_duplicate_column(data_, geometry_.kind);
    require(dup < 0, "pattern " + std::to_string(dup) + " duplicates an earlier pattern");
  }

  Mat data_;
  Geometry geometry_;
};

namespace detail {

inline void draw_column(Eigen::Ref<Vec> out, const Geometry& g, std::uint64_t seed) {
  Rng rng(seed);
  switch (g.kind) {
    case GeometryKind::Bipolar:
      for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.uniform() < g.f ? 1.0 : -1.0;
      break;
    case GeometryKind::Gaussian:
      for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
      break;
    case GeometryKind::Hypersphere: {
      double norm = 0.0;
      do {
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
        norm = out.norm();
      } while (norm == 0.0);
      out /= norm;
      break;
    }
  }
}

}  // namespace detail

// Random pattern set. Column j is drawn from sub-stream derive_seed(seed, j);
// a column colliding with an earlier one is redrawn from
// derive_seed(seed, j, attempt) for attempt = 1..100.
inline PatternSet gen_patterns(const Geometry& geometry, Eigen::Index n, Eigen::Index m,
                               std::uint64_t seed) {
  require(n >= 1 && m >= 1, "gen_patterns needs n >= 1 and m >= 1");
  if (geometry.kind == GeometryKind::Bipolar) {
    require(geometry.f > 0.0 && geometry.f < 1.0, "sparseness f must lie in (0, 1)");
  }
  Mat data(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    detail::draw_column(data.col(j), geometry, derive_seed(seed, static_cast<std::uint64_t>(j)));
  }
  for (;;) {
    const auto dup = detail::first_duplicate_column(data, geometry.kind);
    if (dup < 0) break;
    bool fixed = false;
    for (int attempt = 1; attempt <= 100 && !fixed; ++attempt) {
      detail::draw_column(data.col(dup), geometry,
                          derive_seed(seed, static_cast<std::uint64_t>(dup),
                                      static_cast<std::uint64_t>(attempt)));
      const auto again = detail::first_duplicate_column(data.leftCols(dup + 1), geometry.kind);
      fixed = again < 0;
    }
    if (!fixed) {
      throw ConvergenceError("could not draw a distinct pattern for column " +
                             std::to_string(dup) + " after 100 attempts");
    }
  }
  return PatternSet(std::move(data), geometry);
}

struct NoiseSpec {
  enum class Kind { GaussianAdditive, BitFlip };
  Kind kind = Kind::GaussianAdditive;
  double amount = 0.0;  // sigma (std-dev) or rho (flip probability)

  static NoiseSpec gaussian(double sigma) {
    require(sigma >= 0.0, "noise sigma must be >= 0");
    return {Kind::GaussianAdditive, sigma};
  }
  static NoiseSpec bit_flip(double rho) {
    require(rho >= 0.0 && rho <= 1.0, "flip probability must lie in [0, 1]");
    return {Kind::BitFlip, rho};
  }
};

inline Vec apply_noise(const Eigen::Ref<const Vec>& pattern, const NoiseSpec& spec,
                       std::uint64_t seed) {
  Rng rng(seed);
  Vec out = pattern;
  switch (spec.kind) {
    case NoiseSpec::Kind::GaussianAdditive:
      require(spec.amount >= 0.0, "noise sigma must be >= 0");
      for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += spec.amount * rng.normal();
      break;
    case NoiseSpec::Kind::BitFlip:
      require(spec.amount >= 0.0 && spec.amount <= 1.0, "flip probability must lie in [0, 1]");
      require(is_bipolar(pattern), "bit-flip noise needs a bipolar pattern");
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (rng.bernoulli(spec.amount)) out[i] = -out[i];
      }
      break;
  }
  return out;
}

// Flip exactly `count` distinct coordinates of a bipolar vector.
inline Vec flip_bits(const Eigen::Ref<const Vec>& pattern, std::size_t count, std::uint64_t seed) {
  require(is_bipolar(pattern), "flip_bits needs a bipolar pattern");
  require(count <= static_cast<std::size_t>(pattern.size()), "cannot flip more bits than exist");
  Rng rng(seed);
  Vec out = pattern;
  for (auto i : rng.sample_without_replacement(static_cast<std::size_t>(pattern.size()), count)) {
    out[static_cast<Eigen::Index>(i)] = -out[static_cast<Eigen::Index>(i)];
  }
  return out;
}

inline double min_pairwise_distance(const Mat& x) {
  require(x.cols() >= 2, "min_pairwise_distance needs at least two patterns");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < x.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < x.cols(); ++b) {
      best = std::min(best, (x.col(a) - x.col(b)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

inline double min_pairwise_distance(const PatternSet& set) {
  return min_pairwise_distance(set.data());
}

}  // namespace kernmem
