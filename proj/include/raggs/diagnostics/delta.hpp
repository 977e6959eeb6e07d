#pragma once

// Relative change of the name margin between a base run and an ablated run.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/core/log.hpp"
#include "raggs/diagnostics/embedding.hpp"

namespace raggs::diag {

inline constexpr double kDeltaExclusionFloor = 0.02;

struct DeltaRow {
  std::string query_id;
  double base_name = 0.0;
  double ablated_name = 0.0;
  /// ablated - base in margin units (signed, not a percent).
  double abs_delta = 0.0;
  /// Percent change; absent when the base margin is under the floor.
  std::optional<double> percent;
};

struct DeltaSummary {
  std::vector<DeltaRow> rows;
  std::optional<double> mean_percent;
  double mean_abs_delta = 0.0;
  std::size_t included = 0;
  std::size_t below_floor = 0;
  std::size_t unmatched = 0;
};

/// Per-query (ablated - base) / base * 100 on the name margin, over the
/// queries present in both runs.
inline DeltaSummary delta_delta_percent(const std::map<std::string, MarginTriple>& base,
                                        const std::map<std::string, MarginTriple>& ablated,
                                        double exclusion_floor = kDeltaExclusionFloor) {
  if (!(exclusion_floor >= 0.0)) throw InvalidInput("exclusion_floor must be >= 0");
  DeltaSummary out;
  for (const auto& [qid, b] : base) {
    auto it = ablated.find(qid);
    if (it == ablated.end()) continue;
    DeltaRow row{qid, b.delta_name, it->second.delta_name, it->second.delta_name - b.delta_name, std::nullopt};
    if (b.delta_name >= exclusion_floor)
      row.percent = row.abs_delta / b.delta_name * 100.0;
    out.rows.push_back(row);
  }
  if (out.rows.empty()) throw InvalidInput("delta_delta_percent: base and ablated runs share no queries");
  out.unmatched = base.size() + ablated.size() - 2 * out.rows.size();
  if (out.unmatched > 0)
    log::warn("delta_delta_percent: " + std::to_string(out.unmatched) +
              " queries appear in only one run and were left out");
  double sum_pct = 0.0, sum_abs = 0.0;
  for (const auto& r : out.rows) {
    sum_abs += r.abs_delta;
    if (r.percent) {
      sum_pct += *r.percent;
      ++out.included;
    } else {
      ++out.below_floor;
    }
  }
  out.mean_abs_delta = sum_abs / static_cast<double>(out.rows.size());
  if (out.included > 0) out.mean_percent = sum_pct / static_cast<double>(out.included);
  return out;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t n = 0;
};

inline MeanSd mean_sd(std::span<const double> xs) {
  if (xs.empty()) throw InvalidInput("mean_sd of an empty sample");
  MeanSd r;
  r.n = xs.size();
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
  }
  return r;
}

}  // namespace raggs::diag
