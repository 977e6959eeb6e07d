#pragma once

// Golden-set construction: reciprocal rank fusion of per-system runs,
// grade-bucketed pruning, and near-duplicate suppression before reranking.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/core/log.hpp"
#include "raggs/core/utf8.hpp"
#include "raggs/metrics.hpp"
#include "raggs/oracle_ceiling.hpp"

namespace raggs {

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
};

/// One system's ranking for one query, stored in rank order (rank = index + 1).
struct RunList {
  std::string query_id;
  std::string system = "other";  // dense, sparse, fused, other
  std::vector<RunEntry> entries;

  void validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& e : entries)
      if (!seen.insert(e.doc_id).second)
        throw InvalidInput("duplicate doc_id '" + e.doc_id + "' in " + system + " run for query '" + query_id + "'");
  }

  RetrievedList as_retrieved() const {
    std::vector<std::string> ids;
    ids.reserve(entries.size());
    for (const auto& e : entries) ids.push_back(e.doc_id);
    return RetrievedList(query_id, std::move(ids));
  }
};

struct FusionParams {
  /// Additive constant in 1 / (constant + rank).
  double rrf_constant = 60.0;
  /// Only the first `per_list_depth` entries of each input list contribute.
  std::size_t per_list_depth = 100;

  void validate() const {
    if (!(rrf_constant > 0.0)) throw InvalidInput("rrf_constant must be > 0");
    if (per_list_depth < 1) throw InvalidInput("per_list_depth must be >= 1");
  }
};

/// Reciprocal rank fusion. Fused scores do not depend on the order of `lists`
/// (contributions are summed smallest-first); ties break on doc_id.
inline RunList rrf_merge(std::span<const RunList> lists, const FusionParams& params = {}) {
  params.validate();
  if (lists.empty()) throw InvalidInput("rrf_merge needs at least one run");
  const std::string& qid = lists.front().query_id;
  std::unordered_map<std::string, std::vector<double>> terms;
  for (const auto& list : lists) {
    if (list.query_id != qid) throw InvalidInput("rrf_merge: runs for different queries ('" + qid + "' vs '" + list.query_id + "')");
    list.validate();
    const std::size_t depth = std::min(params.per_list_depth, list.entries.size());
    for (std::size_t i = 0; i < depth; ++i)
      terms[list.entries[i].doc_id].push_back(1.0 / (params.rrf_constant + static_cast<double>(i + 1)));
  }
  RunList fused{qid, "fused", {}};
  fused.entries.reserve(terms.size());
  for (auto& [doc, t] : terms) {
    std::sort(t.begin(), t.end());
    double s = 0.0;
    for (double x : t) s += x;
    fused.entries.push_back({doc, s});
  }
  std::sort(fused.entries.begin(), fused.entries.end(), [](const RunEntry& a, const RunEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  return fused;
}

/// Per-grade retention budget; nullopt means unlimited.
using GradeBudgets = std::map<int, std::optional<std::size_t>>;

/// Keeps every grade-4/5 passage and caps grades 3/2/1 at 10/5/5.
inline GradeBudgets default_prune_budgets() {
  return {{5, std::nullopt}, {4, std::nullopt}, {3, 10}, {2, 5}, {1, 5}};
}

/// Walks the fused list and keeps the first `budget[g]` passages of each grade.
/// Ungraded ids are skipped; retained items keep their fused order.
inline CandidatePool grade_bucketed_prune(const GradedPool& pool, const RunList& fused, const GradeBudgets& budgets,
                                          std::string provenance_label = "pruned") {
  std::map<int, std::size_t> kept;
  CandidatePool out{fused.query_id, {}, std::move(provenance_label)};
  for (const auto& e : fused.entries) {
    const auto* p = pool.find(e.doc_id);
    if (!p) continue;
    const int g = p->grade.value();
    auto it = budgets.find(g);
    const std::optional<std::size_t> budget = it == budgets.end() ? std::optional<std::size_t>(0) : it->second;
    if (budget && kept[g] >= *budget) continue;
    ++kept[g];
    out.doc_ids.push_back(e.doc_id);
  }
  return out;
}

namespace detail {

/// Sorted, de-duplicated k-character shingles of a text (code points, not bytes).
/// Texts shorter than k form a single shingle.
inline std::vector<std::u32string> shingles(std::string_view text, std::size_t k) {
  const std::u32string cps = utf8::decode(text);
  std::vector<std::u32string> out;
  if (cps.size() <= k) {
    out.push_back(cps);
  } else {
    out.reserve(cps.size() - k + 1);
    for (std::size_t i = 0; i + k <= cps.size(); ++i) out.push_back(cps.substr(i, k));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline double jaccard(const std::vector<std::u32string>& a, const std::vector<std::u32string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace detail

inline constexpr std::size_t kShingleSize = 8;

/// Drops any doc whose shingle Jaccard similarity with an already retained doc
/// reaches `jaccard_threshold`. Docs without text are retained with a warning.
inline RunList near_duplicate_suppress(const RunList& fused, const std::unordered_map<std::string, std::string>& texts,
                                       double jaccard_threshold) {
  if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0))
    throw InvalidInput("jaccard_threshold must be in (0, 1]");
  RunList out{fused.query_id, fused.system, {}};
  std::vector<std::vector<std::u32string>> retained;
  for (const auto& e : fused.entries) {
    auto it = texts.find(e.doc_id);
    if (it == texts.end()) {
      log::warn("near-duplicate suppression: no text for doc '" + e.doc_id + "' (query '" + fused.query_id +
                "'), keeping it");
      out.entries.push_back(e);
      continue;
    }
    auto sh = detail::shingles(it->second, kShingleSize);
    const bool duplicate = std::any_of(retained.begin(), retained.end(), [&](const auto& r) {
      return detail::jaccard(sh, r) >= jaccard_threshold;
    });
    if (duplicate) continue;
    retained.push_back(std::move(sh));
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace raggs
