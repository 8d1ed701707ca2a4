#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kernmem/common.hpp"

namespace kernmem {

struct ReportRow {
  std::string series;
  double x = 0.0;
  double mean = 0.0;
  double sem = 0.0;
  long n_trials = 0;
  std::vector<double> extra;  // one value per ExperimentReport::extra_columns
};

// Tabular experiment result. Everything except runtime_seconds is a pure
// function of `config`.
struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::string x_label = "x";
  std::vector<std::string> extra_columns;
  std::vector<ReportRow> rows;
  double runtime_seconds = 0.0;

  std::vector<const ReportRow*> series(const std::string& s) const {
    std::vector<const ReportRow*> out;
    for (const auto& r : rows) {
      if (r.series == s) out.push_back(&r);
    }
    return out;
  }
  double extra(const ReportRow& row, const std::string& column) const {
    for (std::size_t c = 0; c < extra_columns.size(); ++c) {
      if (extra_columns[c] == column) return row.extra.at(c);
    }
    throw DomainError("report has no column '" + column + "'");
  }
};

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

// Sample mean and standard error (sample std / sqrt(n)); sem is 0 for n < 2.
inline MeanSem mean_sem(const std::vector<double>& v) {
  MeanSem out;
  if (v.empty()) return {std::nan(""), std::nan("")};
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.sem = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
  return out;
}

}  // namespace kernmem
