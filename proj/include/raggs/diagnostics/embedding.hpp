#pragma once

// Embedding providers, cosine similarity and the name/topic/both margins.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "raggs/core/digest.hpp"
#include "raggs/core/error.hpp"
#include "raggs/core/rng.hpp"
#include "raggs/core/utf8.hpp"
#include "raggs/diagnostics/bundle.hpp"

namespace raggs::diag {

using Vector = std::vector<double>;

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw InvalidInput("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " + std::to_string(v.size()) + ")");
  const double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw InvalidInput("cosine: zero-norm vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

inline Vector unit(std::span<const double> v) {
  const double n = norm(v);
  if (n == 0.0 || !std::isfinite(n)) throw InvalidInput("cannot normalize a zero or non-finite vector");
  Vector out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

struct MarginTriple {
  double delta_name = 0.0;
  double delta_topic = 0.0;
  double delta_both = 0.0;
};

struct EmbeddedBundle {
  std::string query_id;
  std::string provider;
  Vector query;
  std::array<Vector, 5> candidates;

  const Vector& operator[](Slot s) const { return candidates[static_cast<std::size_t>(s)]; }

  void validate() const {
    auto check = [&](const Vector& v, const char* what) {
      if (v.size() != query.size()) throw InvalidInput("bundle '" + query_id + "': " + what + " has a different dimension");
      if (std::abs(norm(v) - 1.0) > 1e-6) throw InvalidInput("bundle '" + query_id + "': " + what + " is not unit length");
    };
    if (query.empty()) throw InvalidInput("bundle '" + query_id + "': empty query vector");
    check(query, "query");
    for (Slot s : kSlots) check((*this)[s], to_string(s));
  }
};

inline MarginTriple margins(const EmbeddedBundle& b) {
  const auto s = [&](Slot slot) { return cosine(b.query, b[slot]); };
  const double s1 = s(Slot::C1);
  return {s1 - std::max(s(Slot::C2a), s(Slot::C2b)), s1 - s(Slot::C3), s1 - s(Slot::C4)};
}

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string label() const = 0;
  /// One vector per text, all of the same dimension.
  virtual std::vector<Vector> embed(std::span<const std::string> texts) = 0;
};

/// Deterministic bag of hashed character n-grams (n = 1..3), signed, L2-normalized.
/// Offline stand-in for a model; a pure function of the text.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dim = 256, std::uint64_t seed = 0) : dim_(dim), seed_(seed) {
    if (dim == 0) throw InvalidInput("embedding dimension must be >= 1");
  }

  std::string label() const override { return "hashing-" + std::to_string(dim_); }

  std::vector<Vector> embed(std::span<const std::string> texts) override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
  }

 private:
  Vector embed_one(const std::string& text) const {
    Vector v(dim_, 0.0);
    const auto cps = utf8::decode(text);
    for (std::size_t n = 1; n <= 3; ++n) {
      for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        const std::uint64_t h = mix_seed(seed_, fnv1a(utf8::encode(cps.substr(i, n))) + n);
        v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
      }
    }
    if (norm(v) == 0.0) v[0] = 1.0;
    return unit(v);
  }

  std::size_t dim_;
  std::uint64_t seed_;
};

inline std::string text_hash(std::string_view text) { return sha256_hex(text); }

/// Replays vectors keyed by (sha256 of text, provider label).
class RecordedVectorStore final : public EmbeddingProvider {
 public:
  explicit RecordedVectorStore(std::string provider) : provider_(std::move(provider)) {}

  void add(const std::string& hash, Vector v) {
    if (dim_ && v.size() != dim_) throw InvalidInput("recorded vector " + hash + " has dimension " + std::to_string(v.size()));
    dim_ = v.size();
    vectors_[hash] = std::move(v);
  }

  bool contains_text(const std::string& text) const { return vectors_.count(text_hash(text)) > 0; }
  std::size_t size() const noexcept { return vectors_.size(); }
  std::string label() const override { return provider_; }

  std::vector<Vector> embed(std::span<const std::string> texts) override {
    std::vector<Vector> out;
    for (const auto& t : texts) {
      auto it = vectors_.find(text_hash(t));
      if (it == vectors_.end()) throw InvalidInput("no recorded " + provider_ + " vector for text \"" + t + "\"");
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::string provider_;
  std::size_t dim_ = 0;
  std::map<std::string, Vector> vectors_;
};

/// Memoizes another provider by text hash. Safe to share across threads.
class CachingEmbedder final : public EmbeddingProvider {
 public:
  explicit CachingEmbedder(EmbeddingProvider& inner) : inner_(inner) {}

  std::string label() const override { return inner_.label(); }

  std::vector<Vector> embed(std::span<const std::string> texts) override {
    std::vector<std::string> missing;
    {
      std::lock_guard lock(mu_);
      for (const auto& t : texts)
        if (!cache_.count(text_hash(t))) missing.push_back(t);
    }
    if (!missing.empty()) {
      auto fresh = inner_.embed(missing);
      if (fresh.size() != missing.size()) throw InvalidInput("embedding provider returned the wrong number of vectors");
      std::lock_guard lock(mu_);
      for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(text_hash(missing[i]), std::move(fresh[i]));
    }
    std::lock_guard lock(mu_);
    std::vector<Vector> out;
    for (const auto& t : texts) out.push_back(cache_.at(text_hash(t)));
    return out;
  }

  std::size_t cached() const {
    std::lock_guard lock(mu_);
    return cache_.size();
  }

 private:
  EmbeddingProvider& inner_;
  mutable std::mutex mu_;
  std::map<std::string, Vector> cache_;
};

inline EmbeddedBundle embed_bundle(const ProbeBundle& b, EmbeddingProvider& provider) {
  std::vector<std::string> texts{b.query.text};
  for (Slot s : kSlots) texts.push_back(b[s].text);
  auto vecs = provider.embed(texts);
  if (vecs.size() != texts.size()) throw InvalidInput("embedding provider returned the wrong number of vectors");
  EmbeddedBundle out{b.query_id, provider.label(), unit(vecs[0]), {}};
  for (std::size_t i = 0; i < 5; ++i) out.candidates[i] = unit(vecs[i + 1]);
  out.validate();
  return out;
}

}  // namespace raggs::diag
