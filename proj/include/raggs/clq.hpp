#pragma once

// Cost, latency and quality analysis of retrieval configurations: exact
// decimal cost model, nearest-rank latency percentiles, the efficiency
// scalar, Pareto frontiers, SLO-conditioned selection, marginal gains and
// dynamic-K routing.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "raggs/core/error.hpp"

namespace raggs::clq {

/// Exact currency amount in millionths of a unit.
struct Money {
  std::int64_t micros = 0;

  static constexpr std::int64_t kScale = 1'000'000;

  /// Parses "1.25", "$0.00005", "-3". At most six decimals.
  static Money parse(std::string_view s) {
    std::string_view t = s;
    bool neg = false;
    if (!t.empty() && (t.front() == '-' || t.front() == '+')) {
      neg = t.front() == '-';
      t.remove_prefix(1);
    }
    if (!t.empty() && t.front() == '$') t.remove_prefix(1);
    const auto dot = t.find('.');
    std::string_view whole = t.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : t.substr(dot + 1);
    auto digits = [](std::string_view d) {
      return std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac) || frac.size() > 6 ||
        (dot != std::string_view::npos && frac.empty()))
      throw InvalidInput("invalid decimal amount '" + std::string(s) + "' (at most 6 decimals)");
    std::int64_t w = 0;
    if (!whole.empty()) {
      auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
      if (ec != std::errc() || w > INT64_MAX / kScale) throw InvalidInput("amount out of range '" + std::string(s) + "'");
    }
    std::int64_t f = 0;
    for (std::size_t i = 0; i < 6; ++i) f = f * 10 + (i < frac.size() ? frac[i] - '0' : 0);
    const std::int64_t v = w * kScale + f;
    return {neg ? -v : v};
  }

  static Money from_double(double units) { return {static_cast<std::int64_t>(std::llround(units * kScale))}; }

  double to_double() const { return static_cast<double>(micros) / kScale; }

  /// Fixed-point text with between `min_decimals` and 6 decimals.
  std::string str(int min_decimals = 2) const {
    const std::int64_t a = micros < 0 ? -micros : micros;
    std::string frac = std::to_string(a % kScale);
    frac.insert(0, 6 - frac.size(), '0');
    while (static_cast<int>(frac.size()) > min_decimals && frac.back() == '0') frac.pop_back();
    std::string out = (micros < 0 ? "-" : "") + std::to_string(a / kScale);
    if (!frac.empty()) out += "." + frac;
    return out;
  }

  friend auto operator<=>(const Money&, const Money&) = default;
  friend Money operator+(Money a, Money b) { return {a.micros + b.micros}; }
  friend Money operator-(Money a, Money b) { return {a.micros - b.micros}; }
};

namespace detail {

/// num / den rounded half to even; den > 0, num >= 0.
inline std::int64_t div_half_even(__int128 num, __int128 den) {
  __int128 q = num / den;
  const __int128 r = num % den;
  if (2 * r > den || (2 * r == den && (q % 2) != 0)) ++q;
  if (q > INT64_MAX) throw InvalidInput("cost overflows the money range");
  return static_cast<std::int64_t>(q);
}

inline void require_nonneg(Money m, const char* what) {
  if (m.micros < 0) throw InvalidInput(std::string(what) + " must be >= 0");
}

}  // namespace detail

/// K x tokens/1000 x price_per_1k, over `queries` queries.
inline Money rerank_cost(std::uint64_t k, std::uint64_t tokens_per_candidate, Money price_per_1k,
                         std::uint64_t queries = 1000) {
  detail::require_nonneg(price_per_1k, "price");
  const __int128 num = static_cast<__int128>(k) * tokens_per_candidate * queries * price_per_1k.micros;
  return {detail::div_half_even(num, 1000)};
}

/// K x tokens x queries x price_per_1M / 1e6.
inline Money generator_input_cost(std::uint64_t k, std::uint64_t tokens_per_chunk, Money price_per_1m,
                                  std::uint64_t queries = 1000) {
  detail::require_nonneg(price_per_1m, "price");
  const __int128 num = static_cast<__int128>(k) * tokens_per_chunk * queries * price_per_1m.micros;
  return {detail::div_half_even(num, 1'000'000)};
}

struct PriceSheet {
  std::map<std::string, Money> rerank_per_1k;
  std::map<std::string, Money> generator_input_per_1m;

  Money rerank(const std::string& tier) const {
    auto it = rerank_per_1k.find(tier);
    if (it == rerank_per_1k.end()) throw InvalidInput("no rerank price for '" + tier + "'");
    return it->second;
  }
  Money generator(const std::string& tier) const {
    auto it = generator_input_per_1m.find(tier);
    if (it == generator_input_per_1m.end()) throw InvalidInput("no generator price for '" + tier + "'");
    return it->second;
  }
};

/// Nearest-rank percentile: the ceil(q*n)-th smallest sample.
inline double percentile(std::span<const double> samples, double q) {
  if (samples.empty()) throw InvalidInput("percentile of an empty sample");
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("percentile q must lie in (0, 1)");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  // The epsilon keeps q*n that is integral in exact arithmetic from rounding up.
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, s.size());
  return s[rank - 1];
}

inline constexpr std::array<const char*, 4> kHeadlineMetrics{"N-Recall4+@10", "RA-nWG@10", "N-Recall4+@30",
                                                             "RA-nWG@30"};

inline double average_performance(const std::map<std::string, double>& quality) {
  double s = 0.0;
  for (const char* key : kHeadlineMetrics) {
    auto it = quality.find(key);
    if (it == quality.end()) throw InvalidInput(std::string("efficiency: missing quality metric ") + key);
    s += it->second;
  }
  return s / 4.0;
}

/// Average performance per second of latency.
inline double efficiency(double average_performance, double latency_ms) {
  if (!(latency_ms > 0.0)) throw InvalidInput("efficiency: latency must be > 0");
  return average_performance / (latency_ms / 1000.0);
}

inline double efficiency(const std::map<std::string, double>& quality, double latency_ms) {
  return efficiency(average_performance(quality), latency_ms);
}

struct ConfigPoint {
  std::string config_id;
  std::string model;
  int dimension = 0;
  std::string reranker;
  std::size_t k = 0;
  std::string ann;
  Money cost;  // per 1,000 queries
  std::vector<double> latency_samples;
  std::optional<double> latency_p50;
  std::optional<double> latency_p95;
  std::map<std::string, double> quality;

  double p50() const {
    if (latency_p50) return *latency_p50;
    if (latency_samples.empty()) throw InvalidInput("config '" + config_id + "' has no latency");
    return percentile(latency_samples, 0.5);
  }
  double p95() const {
    if (latency_p95) return *latency_p95;
    if (latency_samples.empty()) throw InvalidInput("config '" + config_id + "' has no latency");
    return percentile(latency_samples, 0.95);
  }
  double q(const std::string& metric) const {
    auto it = quality.find(metric);
    if (it == quality.end()) throw InvalidInput("config '" + config_id + "' lacks quality metric '" + metric + "'");
    return it->second;
  }

  void validate() const {
    if (config_id.empty()) throw InvalidInput("config point without config_id");
    for (const auto& [m, v] : quality)
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("config '" + config_id + "': quality " + m + " outside [0, 1]");
    for (double x : latency_samples)
      if (!(x >= 0.0)) throw InvalidInput("config '" + config_id + "': negative latency sample");
  }
};

/// True iff `a` is no worse than `b` on every objective (all minimized) and
/// strictly better on at least one.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

/// Indices of the non-dominated items; `objectives(item)` returns values to minimize.
template <typename T, typename Objectives>
std::vector<std::size_t> non_dominated(std::span<const T> items, Objectives&& objectives) {
  std::vector<std::vector<double>> obj;
  obj.reserve(items.size());
  for (const auto& it : items) obj.push_back(objectives(it));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < items.size() && !dominated; ++j) dominated = j != i && dominates(obj[j], obj[i]);
    if (!dominated) out.push_back(i);
  }
  return out;
}

inline std::vector<std::string> default_quality_objectives() { return {"RA-nWG@10", "RA-nWG@30"}; }

/// Objective vector: cost, p50 latency, then each quality metric negated.
inline std::vector<double> clq_objectives(const ConfigPoint& p, std::span<const std::string> quality_metrics) {
  std::vector<double> v{static_cast<double>(p.cost.micros), p.p50()};
  for (const auto& m : quality_metrics) v.push_back(-p.q(m));
  return v;
}

/// Non-dominated configurations, ordered by config_id.
inline std::vector<ConfigPoint> pareto_frontier(std::span<const ConfigPoint> points,
                                                std::span<const std::string> quality_metrics) {
  if (points.empty()) throw InvalidInput("pareto_frontier needs at least one point");
  auto idx = non_dominated(points, [&](const ConfigPoint& p) { return clq_objectives(p, quality_metrics); });
  std::vector<ConfigPoint> out;
  for (auto i : idx) out.push_back(points[i]);
  std::stable_sort(out.begin(), out.end(),
                   [](const ConfigPoint& a, const ConfigPoint& b) { return a.config_id < b.config_id; });
  return out;
}

inline std::vector<ConfigPoint> pareto_frontier(std::span<const ConfigPoint> points) {
  const auto q = default_quality_objectives();
  return pareto_frontier(points, q);
}

struct SloConstraints {
  std::optional<double> max_latency_ms;
  std::optional<Money> max_cost;
  std::map<std::string, double> min_quality;

  void validate() const {
    if (!max_latency_ms && !max_cost && min_quality.empty()) throw InvalidInput("SLO needs at least one bound");
  }
};

enum class SloRule { LatencyBound, CostBound, QualityTargeted };

inline const char* to_string(SloRule r) {
  switch (r) {
    case SloRule::LatencyBound: return "latency_bound";
    case SloRule::CostBound: return "cost_bound";
    case SloRule::QualityTargeted: return "quality_targeted";
  }
  return "?";
}

inline SloRule parse_slo_rule(std::string_view s) {
  for (auto r : {SloRule::LatencyBound, SloRule::CostBound, SloRule::QualityTargeted})
    if (s == to_string(r)) return r;
  throw InvalidInput("unknown SLO rule '" + std::string(s) + "'");
}

struct SloSelection {
  std::vector<ConfigPoint> shortlist;
  std::string diagnostic;  // set when the feasible set is empty
};

inline bool feasible(const ConfigPoint& p, const SloConstraints& slo) {
  if (slo.max_latency_ms && p.p50() > *slo.max_latency_ms) return false;
  if (slo.max_cost && p.cost > *slo.max_cost) return false;
  for (const auto& [m, t] : slo.min_quality) {
    auto it = p.quality.find(m);
    if (it == p.quality.end() || it->second < t) return false;
  }
  return true;
}

/// Every bound in `slo` filters; the rule picks the sort order. Bounds sort by
/// `quality_metric` descending, quality targets by latency then cost. Smaller
/// K breaks remaining ties, then config_id.
inline SloSelection select_under_slo(std::span<const ConfigPoint> points, const SloConstraints& slo, SloRule rule,
                                     const std::string& quality_metric = "RA-nWG@10") {
  slo.validate();
  if (rule == SloRule::LatencyBound && !slo.max_latency_ms) throw InvalidInput("latency_bound rule needs max_latency_ms");
  if (rule == SloRule::CostBound && !slo.max_cost) throw InvalidInput("cost_bound rule needs max_cost");
  if (rule == SloRule::QualityTargeted && slo.min_quality.empty())
    throw InvalidInput("quality_targeted rule needs a quality target");
  SloSelection out;
  for (const auto& p : points)
    if (feasible(p, slo)) out.shortlist.push_back(p);
  auto tail = [](const ConfigPoint& a, const ConfigPoint& b) {
    if (a.k != b.k) return a.k < b.k;
    return a.config_id < b.config_id;
  };
  if (rule == SloRule::QualityTargeted) {
    std::sort(out.shortlist.begin(), out.shortlist.end(), [&](const ConfigPoint& a, const ConfigPoint& b) {
      if (a.p50() != b.p50()) return a.p50() < b.p50();
      if (a.cost != b.cost) return a.cost < b.cost;
      return tail(a, b);
    });
  } else {
    std::sort(out.shortlist.begin(), out.shortlist.end(), [&](const ConfigPoint& a, const ConfigPoint& b) {
      const double qa = a.q(quality_metric), qb = b.q(quality_metric);
      if (qa != qb) return qa > qb;
      return tail(a, b);
    });
  }
  if (out.shortlist.empty()) out.diagnostic = "no configuration satisfies the SLO";
  return out;
}

inline constexpr double kJitterMs = 75.0;

/// Latency differences below ~75 ms are treated as noise in reports.
inline bool within_jitter(double a_ms, double b_ms, double threshold_ms = kJitterMs) {
  return std::abs(a_ms - b_ms) < threshold_ms;
}

struct MarginalStep {
  std::string from_id;
  std::string to_id;
  double delta_quality = 0.0;
  double delta_ms = 0.0;
  /// delta_quality / delta_ms; absent (unbounded) when delta_ms is 0.
  std::optional<double> per_ms;
};

/// Quality gained per extra millisecond between consecutive K within one family.
inline std::vector<MarginalStep> marginal_gain(std::span<const ConfigPoint> points, const std::string& metric) {
  if (points.size() < 2) throw InvalidInput("marginal_gain needs at least 2 points");
  std::vector<MarginalStep> out;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    if (b.k <= a.k) throw InvalidInput("marginal_gain: K must strictly increase ('" + a.config_id + "' -> '" + b.config_id + "')");
    MarginalStep s{a.config_id, b.config_id, b.q(metric) - a.q(metric), b.p50() - a.p50(), std::nullopt};
    if (s.delta_ms != 0.0) s.per_ms = s.delta_quality / s.delta_ms;
    out.push_back(s);
  }
  return out;
}

struct RoutingSignals {
  double dense_margin = 0.0;
  double reranker_entropy = 0.0;
  bool diagnostic_flag = false;
};

/// Top-1 minus top-2 of the given similarities.
inline double dense_margin(std::span<const double> cosines) {
  if (cosines.size() < 2) throw InvalidInput("dense_margin needs at least 2 scores");
  std::vector<double> s(cosines.begin(), cosines.end());
  std::partial_sort(s.begin(), s.begin() + 2, s.end(), std::greater<>());
  return s[0] - s[1];
}

/// Entropy (nats) of scores normalized to sum to 1.
inline double shannon_entropy(std::span<const double> scores) {
  double total = 0.0;
  for (double x : scores) {
    if (!(x >= 0.0)) throw InvalidInput("shannon_entropy: scores must be >= 0");
    total += x;
  }
  if (!(total > 0.0)) throw InvalidInput("shannon_entropy: scores sum to 0");
  double h = 0.0;
  for (double x : scores)
    if (x > 0.0) h -= (x / total) * std::log(x / total);
  return std::max(0.0, h);
}

struct RoutingThresholds {
  double margin = 0.02;
  double entropy = 0.0;
  std::size_t base_k = 50;
  std::size_t escalated_k = 100;

  /// Placeholder defaults: margin 0.02, entropy 0.9 ln(n_candidates).
  static RoutingThresholds defaults(std::size_t n_candidates) {
    if (n_candidates < 2) throw InvalidInput("routing needs at least 2 candidates");
    return {0.02, 0.9 * std::log(static_cast<double>(n_candidates)), 50, 100};
  }
};

inline std::size_t dynamic_k_route(const RoutingSignals& s, const RoutingThresholds& t) {
  const bool uncertain = s.dense_margin < t.margin || s.reranker_entropy > t.entropy || s.diagnostic_flag;
  return uncertain ? t.escalated_k : t.base_k;
}

}  // namespace raggs::clq
