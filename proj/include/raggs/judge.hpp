#pragma once

// Listwise judges for stage-6 refinement. A judge receives a small batch of
// items and returns a total order over it, best first.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/core/rng.hpp"

namespace raggs {

struct JudgeItem {
  std::string id;
  std::string text;
};

/// A batch and the judge's order over it.
struct JudgedOrder {
  std::vector<std::string> batch;
  std::vector<std::string> order;

  /// True iff `order` is a permutation of `batch`.
  bool is_permutation() const {
    if (batch.size() != order.size()) return false;
    auto a = batch;
    auto b = order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b && std::adjacent_find(a.begin(), a.end()) == a.end();
  }
};

class Judge {
 public:
  virtual ~Judge() = default;
  /// Total order over `batch`, best first. Throws JudgeError on failure.
  virtual std::vector<std::string> rank(std::span<const JudgeItem> batch) = 0;
};

struct SimulatedJudgeParams {
  std::map<std::string, double> true_utilities;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
};

/// Plackett-Luce sampling via Gumbel perturbation: sorts by
/// utility + noise_scale * Gumbel. noise_scale = 0 gives the exact utility
/// order with ties broken by id; the draw depends only on (seed, call_index).
inline JudgedOrder simulated_judge(std::span<const std::string> batch, const SimulatedJudgeParams& params,
                                   std::uint64_t call_index = 0) {
  if (params.noise_scale < 0.0) throw InvalidInput("noise_scale must be >= 0");
  Rng rng(mix_seed(params.seed, call_index));
  std::vector<std::pair<double, std::string>> keyed;
  keyed.reserve(batch.size());
  for (const auto& id : batch) {
    auto it = params.true_utilities.find(id);
    if (it == params.true_utilities.end()) throw JudgeError("simulated judge has no utility for item '" + id + "'");
    const double noise = params.noise_scale > 0.0 ? params.noise_scale * standard_gumbel(rng) : 0.0;
    keyed.emplace_back(it->second + noise, id);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  JudgedOrder out;
  out.batch.assign(batch.begin(), batch.end());
  for (auto& [key, id] : keyed) out.order.push_back(std::move(id));
  return out;
}

class SimulatedJudge final : public Judge {
 public:
  explicit SimulatedJudge(SimulatedJudgeParams params) : params_(std::move(params)) {}

  std::vector<std::string> rank(std::span<const JudgeItem> batch) override {
    std::vector<std::string> ids;
    ids.reserve(batch.size());
    for (const auto& item : batch) ids.push_back(item.id);
    return simulated_judge(ids, params_, calls_++).order;
  }

  std::uint64_t calls() const noexcept { return calls_; }

 private:
  SimulatedJudgeParams params_;
  std::uint64_t calls_ = 0;
};

/// Replays recorded orders in sequence. Each request must carry the same item
/// set as the next recorded batch.
class TranscriptJudge final : public Judge {
 public:
  explicit TranscriptJudge(std::vector<JudgedOrder> transcript) : transcript_(transcript.begin(), transcript.end()) {}

  std::vector<std::string> rank(std::span<const JudgeItem> batch) override {
    if (transcript_.empty()) throw JudgeError("judge transcript exhausted");
    JudgedOrder next = std::move(transcript_.front());
    transcript_.pop_front();
    std::vector<std::string> asked;
    for (const auto& item : batch) asked.push_back(item.id);
    std::sort(asked.begin(), asked.end());
    auto recorded = next.batch;
    std::sort(recorded.begin(), recorded.end());
    if (asked != recorded) throw JudgeError("judge transcript diverged: requested batch does not match recording");
    return std::move(next.order);
  }

  std::size_t remaining() const noexcept { return transcript_.size(); }

 private:
  std::deque<JudgedOrder> transcript_;
};

/// Forwards to another judge and records every successful exchange.
class RecordingJudge final : public Judge {
 public:
  explicit RecordingJudge(Judge& inner) : inner_(inner) {}

  std::vector<std::string> rank(std::span<const JudgeItem> batch) override {
    auto order = inner_.rank(batch);
    JudgedOrder rec;
    for (const auto& item : batch) rec.batch.push_back(item.id);
    rec.order = order;
    transcript_.push_back(std::move(rec));
    return order;
  }

  const std::vector<JudgedOrder>& transcript() const noexcept { return transcript_; }

 private:
  Judge& inner_;
  std::vector<JudgedOrder> transcript_;
};

}  // namespace raggs
