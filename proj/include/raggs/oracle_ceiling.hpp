#pragma once

// Pool-restricted oracle ceilings (PROC).
//
// Given a fixed candidate pool (say a dense Top-100 or a hybrid Top-50), the
// ceiling is the best metric value any reordering of that pool could reach.
// Normalization always uses the full graded pool, so a candidate pool that
// misses good evidence shows up as a ceiling below 1.

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/metrics.hpp"

namespace raggs {

struct CandidatePool {
  std::string query_id;
  std::vector<std::string> doc_ids;
  std::string provenance_label;
};

enum class CeilingMetric { RaNwg, NRecall4Plus, NRecall5 };

inline const char* to_string(CeilingMetric m) {
  switch (m) {
    case CeilingMetric::RaNwg: return metric::kRaNwg;
    case CeilingMetric::NRecall4Plus: return metric::kNRecall4;
    case CeilingMetric::NRecall5: return metric::kNRecall5;
  }
  return "?";
}

namespace detail {

inline std::vector<const GradedPassage*> distinct_graded(const GradedPool& pool, const CandidatePool& candidates) {
  std::unordered_set<std::string> seen;
  std::vector<const GradedPassage*> out;
  for (const auto& d : candidates.doc_ids) {
    if (!seen.insert(d).second) continue;
    if (const auto* p = pool.find(d)) out.push_back(p);
  }
  return out;
}

}  // namespace detail

/// Best RA-nWG@K achievable by reordering only `candidates`.
inline std::optional<double> proc_ra_nwg(const GradedPool& pool, const WeightSchedule& w,
                                         const CandidatePool& candidates, std::size_t k) {
  detail::require_k(k);
  const double ideal = ideal_gain(pool, w, k);
  if (ideal <= 0.0) return std::nullopt;
  std::array<std::size_t, 6> avail{};
  for (const auto* p : detail::distinct_graded(pool, candidates)) ++avail[static_cast<std::size_t>(p->grade.value())];
  // Ungraded candidates weigh 0, so they never improve on a graded pick.
  std::array<std::size_t, 6> take{};
  std::size_t remaining = k;
  std::array<int, 5> by_weight{5, 4, 3, 2, 1};
  std::stable_sort(by_weight.begin(), by_weight.end(), [&](int a, int b) { return w[a] > w[b]; });
  for (int g : by_weight) {
    take[g] = std::min(remaining, avail[g]);
    remaining -= take[g];
  }
  return detail::histogram_gain(take, w) / ideal;
}

/// Best N-Recall@K achievable from `candidates`, over the full-pool min(K, R).
inline std::optional<double> proc_n_recall(const GradedPool& pool, const CandidatePool& candidates, std::size_t k,
                                           RecallThreshold threshold) {
  detail::require_k(k);
  const int g = threshold_grade(threshold);
  const std::size_t r = pool.count_at_least(g);
  if (r == 0) return std::nullopt;
  std::size_t available = 0;
  for (const auto* p : detail::distinct_graded(pool, candidates))
    if (p->grade.value() >= g) ++available;
  return static_cast<double>(std::min(k, available)) / static_cast<double>(std::min(k, r));
}

inline std::optional<double> proc(const GradedPool& pool, const WeightSchedule& w, const CandidatePool& candidates,
                                  std::size_t k, CeilingMetric m) {
  switch (m) {
    case CeilingMetric::RaNwg: return proc_ra_nwg(pool, w, candidates, k);
    case CeilingMetric::NRecall4Plus: return proc_n_recall(pool, candidates, k, RecallThreshold::FourPlus);
    case CeilingMetric::NRecall5: return proc_n_recall(pool, candidates, k, RecallThreshold::Five);
  }
  return std::nullopt;
}

inline constexpr double kCeilingTolerance = 1e-9;

/// Realized share of the ceiling, actual / ceiling. NA when the ceiling is 0.
inline std::optional<double> percent_proc(double actual, double ceiling) {
  if (actual < -kCeilingTolerance || ceiling < -kCeilingTolerance)
    throw InvalidInput("percent_proc: negative metric value");
  if (actual > ceiling + kCeilingTolerance)
    throw InvalidInput("percent_proc: actual " + std::to_string(actual) + " exceeds ceiling " + std::to_string(ceiling));
  if (ceiling <= 0.0) return std::nullopt;
  return std::clamp(actual / ceiling, 0.0, 1.0);
}

enum class HeadroomClass { Retrieval, Ordering, None };

inline const char* to_string(HeadroomClass h) {
  switch (h) {
    case HeadroomClass::Retrieval: return "retrieval";
    case HeadroomClass::Ordering: return "ordering";
    case HeadroomClass::None: return "none";
  }
  return "?";
}

struct HeadroomThresholds {
  double proc_threshold = 0.95;
  double realization_threshold = 0.90;

  void validate() const {
    if (!(proc_threshold > 0.0 && proc_threshold < 1.0) ||
        !(realization_threshold > 0.0 && realization_threshold < 1.0))
      throw InvalidInput("headroom thresholds must lie in (0, 1)");
  }
};

/// Low ceiling means the candidate pool is the bottleneck; a high ceiling that
/// is poorly realized points at ordering.
inline HeadroomClass headroom_classify(double ceiling, std::optional<double> realized,
                                       const HeadroomThresholds& t = {}) {
  t.validate();
  if (ceiling < t.proc_threshold) return HeadroomClass::Retrieval;
  if (realized && *realized < t.realization_threshold) return HeadroomClass::Ordering;
  return HeadroomClass::None;
}

struct CeilingRow {
  std::string query_id;
  std::string metric;
  std::size_t k = 0;
  std::optional<double> actual;
  std::optional<double> ceiling;
  std::optional<double> percent_proc;
  std::string provenance_label;
};

/// Actual vs. PROC rows for one query's ranking at each K, for RA-nWG and N-Recall.
/// The ranking must be drawn from the candidate pool for actual <= ceiling to hold.
inline std::vector<CeilingRow> ceiling_rows(const GradedPool& pool, const WeightSchedule& w,
                                            const CandidatePool& candidates, const RetrievedList& ranking,
                                            std::span<const std::size_t> ks) {
  std::vector<CeilingRow> rows;
  for (std::size_t k : ks) {
    for (auto m : {CeilingMetric::RaNwg, CeilingMetric::NRecall4Plus, CeilingMetric::NRecall5}) {
      CeilingRow row{pool.query_id(), to_string(m), k, std::nullopt, proc(pool, w, candidates, k, m), std::nullopt,
                     candidates.provenance_label};
      switch (m) {
        case CeilingMetric::RaNwg: row.actual = ra_nwg_at_k(pool, w, ranking, k); break;
        case CeilingMetric::NRecall4Plus: row.actual = n_recall_at_k(pool, ranking, k, RecallThreshold::FourPlus); break;
        case CeilingMetric::NRecall5: row.actual = n_recall_at_k(pool, ranking, k, RecallThreshold::Five); break;
      }
      if (row.actual && row.ceiling) row.percent_proc = percent_proc(*row.actual, *row.ceiling);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

/// Macro-level Actual / PROC / %PROC with headroom class, computed from
/// macro-averaged actual and ceiling values (the layout of the reference tables).
struct CeilingReport {
  std::string metric;
  std::size_t k = 0;
  std::optional<double> actual;
  std::optional<double> ceiling;
  std::optional<double> percent_proc;
  std::optional<HeadroomClass> headroom;
  std::size_t valid_count = 0;
};

inline std::vector<CeilingReport> summarize_ceilings(std::span<const CeilingRow> rows, const HeadroomThresholds& t = {}) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const CeilingRow*>> groups;
  for (const auto& r : rows) groups[{r.metric, r.k}].push_back(&r);
  std::vector<CeilingReport> out;
  for (const auto& [key, group] : groups) {
    double sa = 0.0, sc = 0.0;
    std::size_t n = 0;
    for (const auto* r : group) {
      if (!r->actual || !r->ceiling) continue;
      sa += *r->actual;
      sc += *r->ceiling;
      ++n;
    }
    CeilingReport rep{key.first, key.second, std::nullopt, std::nullopt, std::nullopt, std::nullopt, n};
    if (n > 0) {
      rep.actual = sa / static_cast<double>(n);
      rep.ceiling = sc / static_cast<double>(n);
      rep.percent_proc = percent_proc(*rep.actual, *rep.ceiling);
      rep.headroom = headroom_classify(*rep.ceiling, rep.percent_proc, t);
    }
    out.push_back(rep);
  }
  return out;
}

}  // namespace raggs
