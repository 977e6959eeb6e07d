#pragma once

// Rank agreement and bootstrap intervals over per-query values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/core/log.hpp"
#include "raggs/core/rng.hpp"

namespace raggs::diag {

/// |topK(a) ∩ topK(b)| / K.
inline double overlap_at_k(std::span<const std::string> a, std::span<const std::string> b, std::size_t k) {
  if (k < 1) throw InvalidInput("overlap_at_k: K must be >= 1");
  std::unordered_set<std::string> top_a(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(k, a.size())));
  std::size_t shared = 0;
  for (std::size_t i = 0; i < std::min(k, b.size()); ++i) shared += top_a.count(b[i]);
  return static_cast<double>(shared) / static_cast<double>(k);
}

/// Kendall's tau-a over the items present in both orders (no tie correction).
inline double kendall_tau(std::span<const std::string> a, std::span<const std::string> b) {
  std::unordered_map<std::string, std::size_t> pos_b;
  for (std::size_t i = 0; i < b.size(); ++i) pos_b.emplace(b[i], i);
  std::vector<std::size_t> seq;  // positions in b, in a's order
  for (const auto& x : a)
    if (auto it = pos_b.find(x); it != pos_b.end()) seq.push_back(it->second);
  if (seq.size() != a.size() || seq.size() != b.size())
    log::warn("kendall_tau: item sets differ, using the " + std::to_string(seq.size()) + " common items");
  const std::size_t n = seq.size();
  if (n < 2) throw InvalidInput("kendall_tau needs at least 2 common items");
  long long s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += seq[i] < seq[j] ? 1 : -1;
  return static_cast<double>(s) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap interval for the mean, resampling values with replacement.
inline Interval bootstrap_ci(std::span<const double> values, double confidence = 0.95, std::size_t resamples = 10000,
                             std::uint64_t seed = 0) {
  if (values.size() < 2) throw InvalidInput("bootstrap_ci needs at least 2 values");
  if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidInput("confidence must lie in (0, 1)");
  if (resamples < 1) throw InvalidInput("resamples must be >= 1");
  const std::size_t n = values.size();
  // Means are taken relative to the first value so constant data maps to itself exactly.
  const double x0 = values[0];
  Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[uniform_index(rng, n)] - x0;
    m = x0 + s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  const double b = static_cast<double>(resamples);
  const auto lo = static_cast<std::size_t>(std::floor(tail * b));
  auto hi = static_cast<std::size_t>(std::ceil((1.0 - tail) * b));
  hi = std::clamp<std::size_t>(hi, 1, resamples) - 1;
  return {means[std::min(lo, resamples - 1)], means[hi]};
}

}  // namespace raggs::diag
