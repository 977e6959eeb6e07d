#pragma once

// Confidence-aware Plackett-Luce listwise refinement with pairwise locks.
//
// Each iteration samples a small batch (favoring rarely seen, uncertain
// items), asks a judge for a total order over it, and takes a clipped
// gradient step on the PL likelihood of that order. Fisher-style information
// accumulates per item and shrinks its confidence interval; a pair is locked
// once the winner's lower bound clears the loser's upper bound or the pair has
// been confirmed often enough. Locks form a DAG and the global order is a
// topological sort of it, ties broken by score.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/core/log.hpp"
#include "raggs/core/rng.hpp"
#include "raggs/judge.hpp"
#include "raggs/metrics.hpp"

namespace raggs {

enum class EtaDecay { None, InverseSqrt };

struct RankerConfig {
  std::size_t batch_size = 5;
  double learning_rate = 0.1;
  double clip = 0.5;
  double z = 2.0;
  double eps = 1e-6;
  int min_confirmations = 3;
  std::size_t stability_T = 3;
  std::size_t iteration_limit = 500;
  EtaDecay eta_decay = EtaDecay::None;
  std::size_t recenter_every = 10;
  std::size_t top_n = 20;
  bool require_resolved_head = true;
  /// Re-verify lock acyclicity and info floors after every iteration.
  bool check_invariants = false;

  void validate() const {
    if (batch_size < 2) throw InvalidInput("batch_size must be >= 2");
    if (!(learning_rate > 0.0)) throw InvalidInput("learning_rate must be > 0");
    if (!(clip > 0.0)) throw InvalidInput("clip must be > 0");
    if (!(z > 0.0)) throw InvalidInput("z must be > 0");
    if (!(eps > 0.0)) throw InvalidInput("eps must be > 0");
    if (stability_T < 1) throw InvalidInput("stability_T must be >= 1");
    if (min_confirmations < 1) throw InvalidInput("min_confirmations must be >= 1");
    if (top_n < 1) throw InvalidInput("top_n must be >= 1");
  }
};

/// Directed acyclic graph of committed preferences with a maintained
/// transitive closure. Edges that would close a cycle are refused.
class LockGraph {
 public:
  LockGraph() = default;
  explicit LockGraph(std::size_t n) : children_(n), reach_(n, std::vector<char>(n, 0)) {}

  std::size_t size() const noexcept { return children_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }

  /// True iff a directed path from -> to exists (from != to).
  bool reaches(std::size_t from, std::size_t to) const { return reach_[from][to] != 0; }

  /// Adds winner -> loser; false when it would create a cycle or is a self-loop.
  bool add(std::size_t winner, std::size_t loser) {
    if (winner == loser || reaches(loser, winner)) return false;
    if (std::find(children_[winner].begin(), children_[winner].end(), loser) != children_[winner].end()) return true;
    children_[winner].push_back(loser);
    ++edges_;
    const std::size_t n = size();
    std::vector<std::size_t> sources{winner};
    for (std::size_t x = 0; x < n; ++x)
      if (reach_[x][winner]) sources.push_back(x);
    std::vector<std::size_t> targets{loser};
    for (std::size_t y = 0; y < n; ++y)
      if (reach_[loser][y]) targets.push_back(y);
    for (std::size_t x : sources)
      for (std::size_t y : targets) reach_[x][y] = 1;
    return true;
  }

  std::span<const std::size_t> children(std::size_t v) const { return children_[v]; }

  /// Independent acyclicity check (Kahn's algorithm over the explicit edges).
  bool acyclic() const {
    const std::size_t n = size();
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& c : children_)
      for (std::size_t v : c) ++indeg[v];
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
      if (indeg[v] == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
      const std::size_t v = ready.back();
      ready.pop_back();
      ++seen;
      for (std::size_t c : children_[v])
        if (--indeg[c] == 0) ready.push_back(c);
    }
    return seen == n;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t v = 0; v < size(); ++v)
      for (std::size_t c : children_[v]) out.emplace_back(v, c);
    return out;
  }

 private:
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::vector<char>> reach_;
  std::size_t edges_ = 0;
};

struct RankerItem {
  std::string id;
  double score = 0.0;
  double info = 0.0;
  std::size_t exposures = 0;
};

struct RankerState {
  std::vector<RankerItem> items;
  std::unordered_map<std::string, std::size_t> index;
  LockGraph locks;
  /// Confirmations observed for "first above second", keyed by item index.
  std::map<std::pair<std::size_t, std::size_t>, int> pending;
  std::size_t iteration = 0;
  std::deque<std::vector<std::size_t>> snapshots;
  std::size_t cycle_rejections = 0;

  std::size_t size() const noexcept { return items.size(); }

  std::size_t at(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) throw InvalidInput("unknown ranker item '" + id + "'");
    return it->second;
  }

  double sigma(std::size_t i, double eps) const { return 1.0 / std::sqrt(std::max(items[i].info, eps)); }
};

namespace detail {
inline void recenter(RankerState& state) {
  if (state.items.empty()) return;
  double mean = 0.0;
  for (const auto& it : state.items) mean += it.score;
  mean /= static_cast<double>(state.items.size());
  for (auto& it : state.items) it.score -= mean;
}
}  // namespace detail

/// Items start at their grade weight, recentered to mean 0, with info = eps.
inline RankerState init_state(const GradedPool& pool, const WeightSchedule& weights, const RankerConfig& config = {}) {
  config.validate();
  if (pool.empty()) throw InvalidInput("cannot refine an empty pool (query '" + pool.query_id() + "')");
  RankerState state;
  state.items.reserve(pool.size());
  for (const auto& p : pool.passages()) {
    state.index.emplace(p.doc_id, state.items.size());
    state.items.push_back({p.doc_id, weights[p.grade], config.eps, 0});
  }
  state.locks = LockGraph(state.items.size());
  detail::recenter(state);
  return state;
}

/// Draws m distinct items with probability proportional to
/// 1/(1 + exposures) * 1/sqrt(info), without replacement.
inline std::vector<std::size_t> sample_batch(const RankerState& state, const RankerConfig& config, Rng& rng) {
  const std::size_t n = state.size();
  std::vector<std::size_t> out;
  if (n <= config.batch_size) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& it = state.items[i];
    weight[i] = 1.0 / (1.0 + static_cast<double>(it.exposures)) / std::sqrt(std::max(it.info, config.eps));
  }
  for (std::size_t draw = 0; draw < config.batch_size; ++draw) {
    double total = 0.0;
    for (double w : weight) total += w;
    double u = uniform01(rng) * total;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] <= 0.0) continue;
      pick = i;
      if (u < weight[i]) break;
      u -= weight[i];
    }
    RAGGS_ENSURE(pick < n, "sample_batch ran out of candidates");
    out.push_back(pick);
    weight[pick] = 0.0;
  }
  return out;
}

/// Raw (unclipped) score and information increments for one judged order.
struct ListwiseDeltas {
  std::vector<double> score;
  std::vector<double> info;
};

/// Suffix-wise PL gradient over `order` (item indices, best first) at the
/// current scores: for the suffix starting at position k, the winner gains
/// eta * (1 - p_winner), every other member loses eta * p_j, and every member
/// accumulates p_j * (1 - p_j). The size-1 suffix contributes nothing.
inline ListwiseDeltas listwise_deltas(const RankerState& state, std::span<const std::size_t> order, double eta) {
  ListwiseDeltas d{std::vector<double>(state.size(), 0.0), std::vector<double>(state.size(), 0.0)};
  const std::size_t m = order.size();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const auto suffix = order.subspan(k);
    double max_s = -std::numeric_limits<double>::infinity();
    for (std::size_t j : suffix) max_s = std::max(max_s, state.items[j].score);
    double z = 0.0;
    for (std::size_t j : suffix) z += std::exp(state.items[j].score - max_s);
    for (std::size_t pos = 0; pos < suffix.size(); ++pos) {
      const std::size_t j = suffix[pos];
      const double p = std::exp(state.items[j].score - max_s) / z;
      if (pos == 0)
        d.score[j] += eta * (1.0 - p);
      else
        d.score[j] -= eta * p;
      d.info[j] += p * (1.0 - p);
    }
  }
  return d;
}

inline double effective_learning_rate(const RankerConfig& config, std::size_t iteration) {
  if (config.eta_decay == EtaDecay::InverseSqrt)
    return config.learning_rate / std::sqrt(static_cast<double>(iteration) + 1.0);
  return config.learning_rate;
}

namespace detail {
inline std::vector<std::size_t> order_indices(const RankerState& state, const JudgedOrder& judged) {
  if (!judged.is_permutation()) throw JudgeError("judge returned an order that is not a permutation of its batch");
  std::vector<std::size_t> idx;
  idx.reserve(judged.order.size());
  for (const auto& id : judged.order) idx.push_back(state.at(id));
  return idx;
}
}  // namespace detail

/// Applies one judged order: clipped score step, info accumulation, exposure
/// bump, and periodic recentering. Returns the applied (clipped) score deltas.
inline std::vector<double> listwise_update(RankerState& state, const JudgedOrder& judged, const RankerConfig& config) {
  const auto order = detail::order_indices(state, judged);
  const double eta = effective_learning_rate(config, state.iteration);
  auto d = listwise_deltas(state, order, eta);
  for (std::size_t j = 0; j < state.size(); ++j) {
    d.score[j] = std::clamp(d.score[j], -config.clip, config.clip);
    state.items[j].score += d.score[j];
    state.items[j].info += d.info[j];
  }
  for (std::size_t j : order) ++state.items[j].exposures;
  ++state.iteration;
  if (config.recenter_every > 0 && state.iteration % config.recenter_every == 0) detail::recenter(state);
  return d.score;
}

struct LockOutcome {
  std::vector<std::pair<std::string, std::string>> added;
  std::size_t rejected = 0;
};

/// Records the pairwise preferences implied by `judged` and commits locks for
/// pairs whose confidence intervals separate (LCB(w) > UCB(l)) or whose net
/// confirmations reach min_confirmations. Pairs already implied by the lock
/// closure need nothing; pairs contradicting it are refused and counted.
inline LockOutcome try_lock(RankerState& state, const JudgedOrder& judged, const RankerConfig& config) {
  const auto order = detail::order_indices(state, judged);
  LockOutcome out;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::size_t w = order[a];
      const std::size_t l = order[b];
      if (state.locks.reaches(w, l)) continue;
      const double lcb = state.items[w].score - config.z * state.sigma(w, config.eps);
      const double ucb = state.items[l].score + config.z * state.sigma(l, config.eps);
      if (state.locks.reaches(l, w)) {
        if (lcb > ucb) {
          ++out.rejected;
          ++state.cycle_rejections;
          log::warn("lock " + state.items[w].id + " -> " + state.items[l].id + " refused: would close a cycle");
        }
        continue;
      }
      const int confirmations = ++state.pending[{w, l}];
      auto rev = state.pending.find({l, w});
      const int net = confirmations - (rev == state.pending.end() ? 0 : rev->second);
      if (lcb > ucb || net >= config.min_confirmations) {
        const bool added = state.locks.add(w, l);
        RAGGS_ENSURE(added, "lock refused despite passing the cycle check");
        out.added.emplace_back(state.items[w].id, state.items[l].id);
        std::erase_if(state.pending, [&](const auto& kv) {
          const auto [x, y] = kv.first;
          return state.locks.reaches(x, y) || state.locks.reaches(y, x);
        });
      }
    }
  }
  return out;
}

/// Topological order of the lock DAG; among available items the highest
/// score goes first, then the smaller id.
inline std::vector<std::size_t> global_order_indices(const RankerState& state) {
  const std::size_t n = state.size();
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t c : state.locks.children(v)) ++indeg[c];
  auto worse = [&](std::size_t a, std::size_t b) {
    const auto& x = state.items[a];
    const auto& y = state.items[b];
    if (x.score != y.score) return x.score < y.score;
    return x.id > y.id;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> ready(worse);
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<std::size_t> out;
  out.reserve(n);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    out.push_back(v);
    for (std::size_t c : state.locks.children(v))
      if (--indeg[c] == 0) ready.push(c);
  }
  if (out.size() != n) throw InvariantViolation("lock graph contains a cycle");
  return out;
}

inline std::vector<std::string> global_order(const RankerState& state) {
  std::vector<std::string> ids;
  for (std::size_t i : global_order_indices(state)) ids.push_back(state.items[i].id);
  return ids;
}

inline void verify_invariants(const RankerState& state, const RankerConfig& config) {
  if (!state.locks.acyclic()) throw InvariantViolation("lock graph is not acyclic");
  for (const auto& it : state.items)
    if (it.info < config.eps) throw InvariantViolation("info below eps for item '" + it.id + "'");
  for (const auto& [pair, count] : state.pending)
    if (count < 0) throw InvariantViolation("negative pending confirmation count");
  if (state.snapshots.size() > config.stability_T) throw InvariantViolation("snapshot ring exceeds stability_T");
}

/// True when the lock closure alone fixes the head: each head item reaches
/// its successor, and the last head item reaches every item outside the head.
inline bool head_resolved(const RankerState& state, std::span<const std::size_t> head) {
  for (std::size_t i = 0; i + 1 < head.size(); ++i)
    if (!state.locks.reaches(head[i], head[i + 1])) return false;
  if (head.empty() || head.size() == state.size()) return true;
  std::vector<char> in_head(state.size(), 0);
  for (std::size_t h : head) in_head[h] = 1;
  for (std::size_t v = 0; v < state.size(); ++v)
    if (!in_head[v] && !state.locks.reaches(head.back(), v)) return false;
  return true;
}

struct RefineResult {
  std::vector<std::string> top;
  std::vector<std::string> order;
  std::map<std::string, double> scores;
  std::size_t lock_count = 0;
  std::size_t iterations = 0;
  std::size_t cycle_rejections = 0;
  std::size_t judge_calls = 0;
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;
  RankerState state;
};

using IterationObserver = std::function<void(const RankerState&)>;

/// Runs sample -> judge -> update -> lock -> order until the top_n id sequence
/// is unchanged for stability_T consecutive iterations or the iteration limit
/// is hit. A failed judge call is retried once; a second failure aborts and
/// returns the partial state.
inline RefineResult refine(const GradedPool& pool, const WeightSchedule& weights, Judge& judge,
                           const RankerConfig& config, std::uint64_t seed,
                           const std::unordered_map<std::string, std::string>* texts = nullptr,
                           const IterationObserver& observer = {}) {
  RefineResult res;
  res.state = init_state(pool, weights, config);
  RankerState& state = res.state;
  Rng rng(seed);
  const std::size_t top_n = std::min(config.top_n, state.size());

  auto head = [&] {
    auto order = global_order_indices(state);
    order.resize(top_n);
    return order;
  };

  for (std::size_t it = 0; it < config.iteration_limit; ++it) {
    const auto batch_idx = sample_batch(state, config, rng);
    std::vector<JudgeItem> batch;
    for (std::size_t i : batch_idx) {
      const auto& id = state.items[i].id;
      std::string text;
      if (texts)
        if (auto t = texts->find(id); t != texts->end()) text = t->second;
      batch.push_back({id, std::move(text)});
    }
    JudgedOrder judged;
    for (const auto& b : batch) judged.batch.push_back(b.id);
    bool ok = false;
    std::string last_error;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
      try {
        ++res.judge_calls;
        judged.order = judge.rank(batch);
        if (!judged.is_permutation()) throw JudgeError("judge returned an order that is not a permutation of its batch");
        ok = true;
      } catch (const JudgeError& e) {
        last_error = e.what();
        log::warn("judge call failed for query '" + pool.query_id() + "' (attempt " + std::to_string(attempt + 1) +
                  "): " + last_error);
      }
    }
    if (!ok) {
      res.aborted = true;
      res.abort_reason = last_error;
      break;
    }
    listwise_update(state, judged, config);
    try_lock(state, judged, config);

    state.snapshots.push_back(head());
    if (state.snapshots.size() > config.stability_T) state.snapshots.pop_front();
    if (config.check_invariants) verify_invariants(state, config);
    if (observer) observer(state);

    if (state.snapshots.size() == config.stability_T && (!config.require_resolved_head || head_resolved(state, state.snapshots.back())) &&
        std::all_of(state.snapshots.begin(), state.snapshots.end(),
                    [&](const auto& s) { return s == state.snapshots.front(); })) {
      res.converged = true;
      break;
    }
  }

  res.iterations = state.iteration;
  res.lock_count = state.locks.edge_count();
  res.cycle_rejections = state.cycle_rejections;
  res.order = global_order(state);
  res.top.assign(res.order.begin(), res.order.begin() + static_cast<std::ptrdiff_t>(top_n));
  for (const auto& item : state.items) res.scores.emplace(item.id, item.score);
  return res;
}

}  // namespace raggs
