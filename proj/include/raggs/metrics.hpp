#pragma once

// Rarity-aware set metrics over graded pools.
//
// A query's pool holds passages graded 1..5. Weights are derived from how rare
// each grade is inside that pool (capped relative to grade 5), and a retrieved
// prefix is scored by the weight it collects against the best weight any
// K-subset of the pool could collect. Everything here is order-free within the
// top-K: gains are accumulated per grade bucket, never in list order, so two
// prefixes holding the same multiset of grades produce bit-identical sums.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "raggs/core/error.hpp"

namespace raggs {

/// Utility grade on the 1..5 rubric (5 = responds clearly, 1 = not relevant).
class Grade {
 public:
  explicit constexpr Grade(int value) : value_(static_cast<std::uint8_t>(value)) {
    if (value < 1 || value > 5) throw InvalidInput("grade must be in 1..5, got " + std::to_string(value));
  }
  constexpr int value() const noexcept { return value_; }
  friend constexpr auto operator<=>(Grade, Grade) = default;

 private:
  std::uint8_t value_;
};

struct GradedPassage {
  std::string doc_id;
  Grade grade;
  std::optional<std::string> facet_key;
};

/// Per-query graded pool with grade counts. Immutable once built.
class GradedPool {
 public:
  GradedPool(std::string query_id, std::vector<GradedPassage> passages)
      : query_id_(std::move(query_id)), passages_(std::move(passages)) {
    index_.reserve(passages_.size());
    for (std::size_t i = 0; i < passages_.size(); ++i) {
      const auto& p = passages_[i];
      if (!index_.emplace(p.doc_id, i).second)
        throw InvalidInput("duplicate doc_id '" + p.doc_id + "' in pool for query '" + query_id_ + "'");
      ++counts_[static_cast<std::size_t>(p.grade.value())];
    }
  }

  const std::string& query_id() const noexcept { return query_id_; }
  std::span<const GradedPassage> passages() const noexcept { return passages_; }
  std::size_t size() const noexcept { return passages_.size(); }
  bool empty() const noexcept { return passages_.empty(); }

  /// n_g.
  std::size_t count(int grade) const { return counts_.at(static_cast<std::size_t>(grade)); }
  /// p_g = n_g / N; 0 for an empty pool.
  double prevalence(int grade) const {
    return passages_.empty() ? 0.0 : static_cast<double>(count(grade)) / static_cast<double>(size());
  }
  /// Number of passages with grade >= threshold (R_{4+} for 4, R_5 for 5).
  std::size_t count_at_least(int threshold) const {
    std::size_t r = 0;
    for (int g = threshold; g <= 5; ++g) r += count(g);
    return r;
  }

  const GradedPassage* find(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    return it == index_.end() ? nullptr : &passages_[it->second];
  }
  bool contains(const std::string& doc_id) const { return index_.contains(doc_id); }

 private:
  std::string query_id_;
  std::vector<GradedPassage> passages_;
  std::unordered_map<std::string, std::size_t> index_;
  std::array<std::size_t, 6> counts_{};
};

struct RarityParams {
  double alpha = 1.0;
  double cap4 = 1.0;
  double cap3 = 0.25;
  /// Base utilities b_1..b_5 (index 0 unused).
  std::array<double, 6> base{0.0, 0.0, 0.0, 0.1, 0.5, 1.0};

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be >= 0");
    if (!(cap3 > 0.0 && cap3 <= cap4 && cap4 <= 1.0)) throw InvalidInput("caps must satisfy 0 < cap3 <= cap4 <= 1");
    if (base[5] != 1.0) throw InvalidInput("base utility of grade 5 must be 1");
    for (int g = 1; g < 5; ++g)
      if (base[g] > base[g + 1] || base[g] < 0.0) throw InvalidInput("base utilities must be non-negative and non-decreasing in grade");
  }
};

struct WeightSchedule {
  /// w_1..w_5 (index 0 unused).
  std::array<double, 6> w{};
  bool used_fallback = false;

  double operator[](int grade) const { return w.at(static_cast<std::size_t>(grade)); }
  double operator[](Grade grade) const { return (*this)[grade.value()]; }
};

/// Rarity weights for one pool. Falls back to (1, 1, 0.2, 0, 0) iff the pool
/// has no grade-5 passage.
inline WeightSchedule compute_weights(const GradedPool& pool, const RarityParams& params = {}) {
  params.validate();
  if (pool.empty()) throw InvalidInput("cannot weight an empty pool (query '" + pool.query_id() + "')");

  WeightSchedule ws;
  ws.w[5] = 1.0;
  if (pool.count(5) == 0) {
    ws.w[4] = 1.0;
    ws.w[3] = 0.2;
    ws.used_fallback = true;
    return ws;
  }
  auto rarity = [&](int g) {
    if (pool.count(g) == 0) return 0.0;
    return params.base[g] / std::pow(pool.prevalence(g), params.alpha);
  };
  const double r5 = rarity(5);
  RAGGS_ENSURE(r5 > 0.0, "r5 must be positive when grade-5 passages exist");
  ws.w[4] = std::min(rarity(4) / r5, params.cap4);
  ws.w[3] = std::min(rarity(3) / r5, params.cap3);
  return ws;
}

/// Ranked doc ids for one query; duplicates rejected.
class RetrievedList {
 public:
  RetrievedList() = default;
  RetrievedList(std::string query_id, std::vector<std::string> ranking)
      : query_id_(std::move(query_id)), ranking_(std::move(ranking)) {
    std::unordered_set<std::string> seen;
    for (const auto& d : ranking_)
      if (!seen.insert(d).second)
        throw InvalidInput("duplicate doc_id '" + d + "' in ranking for query '" + query_id_ + "'");
  }

  const std::string& query_id() const noexcept { return query_id_; }
  std::span<const std::string> ranking() const noexcept { return ranking_; }
  std::size_t size() const noexcept { return ranking_.size(); }

  /// First min(K, size) entries.
  std::span<const std::string> top(std::size_t k) const {
    return std::span<const std::string>(ranking_).first(std::min(k, ranking_.size()));
  }

 private:
  std::string query_id_;
  std::vector<std::string> ranking_;
};

namespace detail {

inline void require_k(std::size_t k) {
  if (k < 1) throw InvalidInput("K must be >= 1");
}

/// Grade histogram of a top-K prefix; slot 0 counts ungraded doc ids.
inline std::array<std::size_t, 6> topk_histogram(const GradedPool& pool, const RetrievedList& list, std::size_t k) {
  std::array<std::size_t, 6> h{};
  for (const auto& d : list.top(k)) {
    const auto* p = pool.find(d);
    ++h[p ? static_cast<std::size_t>(p->grade.value()) : 0];
  }
  return h;
}

inline double histogram_gain(const std::array<std::size_t, 6>& h, const WeightSchedule& w) {
  double g = 0.0;
  for (int grade = 5; grade >= 1; --grade) g += static_cast<double>(h[grade]) * w[grade];
  return g;
}

}  // namespace detail

/// G_obs(K): weight collected by the first K entries. Unknown ids weigh 0.
inline double observed_gain(const GradedPool& pool, const WeightSchedule& w, const RetrievedList& list, std::size_t k) {
  detail::require_k(k);
  return detail::histogram_gain(detail::topk_histogram(pool, list, k), w);
}

/// G_ideal(K): the min(K, N) largest per-passage weights in the pool.
inline double ideal_gain(const GradedPool& pool, const WeightSchedule& w, std::size_t k) {
  detail::require_k(k);
  std::array<std::size_t, 6> take{};
  std::size_t remaining = k;
  // Weights are non-increasing in grade, so the best K-subset fills from grade 5 down.
  std::array<int, 5> by_weight{5, 4, 3, 2, 1};
  std::stable_sort(by_weight.begin(), by_weight.end(), [&](int a, int b) { return w[a] > w[b]; });
  for (int g : by_weight) {
    const std::size_t n = std::min(remaining, pool.count(g));
    take[g] = n;
    remaining -= n;
  }
  return detail::histogram_gain(take, w);
}

/// RA-nWG@K = G_obs / G_ideal; nullopt (NA) when G_ideal is 0.
inline std::optional<double> ra_nwg_at_k(const GradedPool& pool, const WeightSchedule& w, const RetrievedList& list,
                                         std::size_t k) {
  const double ideal = ideal_gain(pool, w, k);
  if (ideal <= 0.0) return std::nullopt;
  return observed_gain(pool, w, list, k) / ideal;
}

enum class RecallThreshold { FourPlus = 4, Five = 5 };

inline int threshold_grade(RecallThreshold t) { return static_cast<int>(t); }

/// Count of top-K entries with grade >= threshold.
inline std::size_t hits_at_k(const GradedPool& pool, const RetrievedList& list, std::size_t k, int threshold) {
  std::size_t hits = 0;
  for (const auto& d : list.top(k)) {
    const auto* p = pool.find(d);
    if (p && p->grade.value() >= threshold) ++hits;
  }
  return hits;
}

/// N-Recall@K = hits / min(K, R); NA when the pool has no passage at the threshold.
inline std::optional<double> n_recall_at_k(const GradedPool& pool, const RetrievedList& list, std::size_t k,
                                           RecallThreshold threshold) {
  detail::require_k(k);
  const int g = threshold_grade(threshold);
  const std::size_t r = pool.count_at_least(g);
  if (r == 0) return std::nullopt;
  return static_cast<double>(hits_at_k(pool, list, k, g)) / static_cast<double>(std::min(k, r));
}

/// Precision_{4+}@K; the denominator is K even for short rankings.
inline double precision4plus_at_k(const GradedPool& pool, const RetrievedList& list, std::size_t k) {
  detail::require_k(k);
  return static_cast<double>(hits_at_k(pool, list, k, 4)) / static_cast<double>(k);
}

/// Number of top-K entries that are not in the graded pool.
inline std::size_t ungraded_count(const GradedPool& pool, const RetrievedList& list, std::size_t k) {
  std::size_t n = 0;
  for (const auto& d : list.top(k))
    if (!pool.contains(d)) ++n;
  return n;
}

/// Harm@K: fraction of the K slots holding grade <= 2. Ungraded ids count as harmful.
inline double harm_at_k(const GradedPool& pool, const RetrievedList& list, std::size_t k) {
  detail::require_k(k);
  const auto h = detail::topk_histogram(pool, list, k);
  return static_cast<double>(h[0] + h[1] + h[2]) / static_cast<double>(k);
}

/// G_obs with repeats of a facet discounted by beta. Passages without a
/// facet key are their own facet.
inline double novelty_observed_gain(const GradedPool& pool, const WeightSchedule& w, const RetrievedList& list,
                                    std::size_t k, double beta) {
  detail::require_k(k);
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidInput("novelty beta must be in [0, 1)");
  std::unordered_set<std::string> seen;
  double gain = 0.0;
  for (const auto& d : list.top(k)) {
    const auto* p = pool.find(d);
    if (!p) continue;
    double delta = 1.0;
    if (p->facet_key && !seen.insert(*p->facet_key).second) delta = beta;
    gain += delta * w[p->grade];
  }
  return gain;
}

struct AnswerRecord {
  std::string query_id;
  std::vector<std::string> gold_evidence;
  std::optional<bool> answer_correct;
};

/// Gold evidence E(q) = passages with grade >= 4.
inline std::vector<std::string> gold_evidence(const GradedPool& pool) {
  std::vector<std::string> gold;
  for (const auto& p : pool.passages())
    if (p.grade.value() >= 4) gold.push_back(p.doc_id);
  return gold;
}

/// Hit@K = 1[E(q) is contained in the top-K]; NA for an empty gold set.
inline std::optional<bool> hit_at_k(const AnswerRecord& answer, const RetrievedList& list, std::size_t k) {
  detail::require_k(k);
  if (answer.gold_evidence.empty()) return std::nullopt;
  const auto top = list.top(k);
  const std::unordered_set<std::string> in_top(top.begin(), top.end());
  return std::all_of(answer.gold_evidence.begin(), answer.gold_evidence.end(),
                     [&](const std::string& d) { return in_top.contains(d); });
}

/// Acc|Hit@K: mean correctness over queries whose full gold set is in the top-K.
/// `lists` maps query_id to its ranking; queries without a ranking count as misses.
inline std::optional<double> acc_given_hit(std::span<const AnswerRecord> answers,
                                           const std::map<std::string, RetrievedList>& lists, std::size_t k) {
  std::size_t hits = 0;
  std::size_t correct = 0;
  const RetrievedList empty;
  for (const auto& a : answers) {
    auto it = lists.find(a.query_id);
    const auto hit = hit_at_k(a, it == lists.end() ? empty : it->second, k);
    if (!hit.value_or(false)) continue;
    if (!a.answer_correct)
      throw InvalidInput("query '" + a.query_id + "' hits at K=" + std::to_string(k) + " but has no correctness label");
    ++hits;
    if (*a.answer_correct) ++correct;
  }
  if (hits == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(hits);
}

// ---------------------------------------------------------------------------
// Per-query rows and macro aggregation

namespace metric {
inline constexpr const char* kRaNwg = "RA-nWG";
inline constexpr const char* kNRecall4 = "N-Recall4+";
inline constexpr const char* kNRecall5 = "N-Recall5";
inline constexpr const char* kPrecision4 = "Precision4+";
inline constexpr const char* kHarm = "Harm";

/// "RA-nWG@10" style key.
inline std::string key(const std::string& name, std::size_t k) { return name + "@" + std::to_string(k); }
}  // namespace metric

struct QueryMetricRow {
  std::string query_id;
  std::string metric;
  std::size_t k = 0;
  std::optional<double> value;
};

struct QueryScore {
  std::string query_id;
  std::vector<QueryMetricRow> rows;
  /// Retrieved ids (within the deepest K scored) missing from the graded pool.
  std::size_t ungraded_count = 0;
  bool used_fallback = false;
};

/// All headline metrics for one query at each cutoff.
inline QueryScore score_query(const GradedPool& pool, const WeightSchedule& w, const RetrievedList& list,
                              std::span<const std::size_t> ks) {
  QueryScore s{pool.query_id(), {}, 0, w.used_fallback};
  std::size_t deepest = 0;
  for (std::size_t k : ks) {
    deepest = std::max(deepest, k);
    const auto& q = pool.query_id();
    s.rows.push_back({q, metric::kNRecall4, k, n_recall_at_k(pool, list, k, RecallThreshold::FourPlus)});
    s.rows.push_back({q, metric::kNRecall5, k, n_recall_at_k(pool, list, k, RecallThreshold::Five)});
    s.rows.push_back({q, metric::kRaNwg, k, ra_nwg_at_k(pool, w, list, k)});
    s.rows.push_back({q, metric::kPrecision4, k, precision4plus_at_k(pool, list, k)});
    s.rows.push_back({q, metric::kHarm, k, harm_at_k(pool, list, k)});
  }
  if (deepest > 0) s.ungraded_count = ungraded_count(pool, list, deepest);
  return s;
}

struct MacroSummary {
  std::optional<double> mean;
  std::size_t valid_count = 0;
};

/// Mean over non-NA rows with the number of rows that contributed.
inline MacroSummary macro_aggregate(std::span<const QueryMetricRow> rows) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (!r.value) continue;
    sum += *r.value;
    ++n;
  }
  if (n == 0) return {std::nullopt, 0};
  return {sum / static_cast<double>(n), n};
}

using MetricGroupKey = std::pair<std::string, std::size_t>;

/// Groups rows by (metric, K) and aggregates each group.
inline std::map<MetricGroupKey, MacroSummary> macro_aggregate_grouped(std::span<const QueryMetricRow> rows) {
  std::map<MetricGroupKey, std::vector<QueryMetricRow>> groups;
  for (const auto& r : rows) groups[{r.metric, r.k}].push_back(r);
  std::map<MetricGroupKey, MacroSummary> out;
  for (const auto& [key, group] : groups) out.emplace(key, macro_aggregate(group));
  return out;
}

}  // namespace raggs
