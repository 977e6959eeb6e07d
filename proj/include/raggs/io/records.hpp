#pragma once

// Record schemas for the line-delimited JSON files. Each record keeps any
// fields it does not know about in `extra` and writes them back unchanged.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "raggs/clq.hpp"
#include "raggs/core/error.hpp"
#include "raggs/diagnostics/bundle.hpp"
#include "raggs/diagnostics/embedding.hpp"
#include "raggs/fusion.hpp"
#include "raggs/io/jsonl.hpp"
#include "raggs/judge.hpp"
#include "raggs/metrics.hpp"
#include "raggs/oracle_ceiling.hpp"

namespace raggs::io {

namespace detail {

inline json extras(const json& j, std::initializer_list<std::string_view> known) {
  json out = json::object();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) out[it.key()] = it.value();
  return out;
}

inline void merge_extras(json& j, const json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it)
    if (!j.contains(it.key())) j[it.key()] = it.value();
}

inline const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw InvalidInput(std::string("missing field '") + key + "'");
  return *it;
}

inline std::string str(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw InvalidInput(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline double num(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw InvalidInput(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline long long integer(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) throw InvalidInput(std::string("field '") + key + "' must be an integer");
  return v.get<long long>();
}

inline std::vector<std::string> str_list(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) throw InvalidInput(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw InvalidInput(std::string("field '") + key + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

inline std::optional<std::string> opt_str(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InvalidInput(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace detail

// --- graded pool -----------------------------------------------------------

struct PoolRecord {
  std::string query_id;
  std::string doc_id;
  int grade = 1;
  std::optional<std::string> facet_key;
  json extra = json::object();

  static PoolRecord from_json(const json& j) {
    PoolRecord r;
    r.query_id = detail::str(j, "query_id");
    r.doc_id = detail::str(j, "doc_id");
    const long long g = detail::integer(j, "grade");
    if (g < 1 || g > 5) throw InvalidInput("grade must be in 1..5, got " + std::to_string(g));
    r.grade = static_cast<int>(g);
    r.facet_key = detail::opt_str(j, "facet_key");
    r.extra = detail::extras(j, {"query_id", "doc_id", "grade", "facet_key"});
    return r;
  }

  json to_json() const {
    json j{{"query_id", query_id}, {"doc_id", doc_id}, {"grade", grade}};
    if (facet_key) j["facet_key"] = *facet_key;
    detail::merge_extras(j, extra);
    return j;
  }
};

/// Loads graded pools keyed by query id. Duplicate (query_id, doc_id) pairs are
/// rejected with the offending line.
inline std::map<std::string, GradedPool> load_pools(const std::filesystem::path& path) {
  const auto lines = read_jsonl(path);
  const auto recs = parse_records<PoolRecord>(lines, path.string());
  std::map<std::string, std::vector<GradedPassage>> grouped;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    if (!seen.emplace(r.query_id, r.doc_id).second)
      throw ParseError(path.string(), lines[i].line,
                       "duplicate (query_id, doc_id) = ('" + r.query_id + "', '" + r.doc_id + "')");
    grouped[r.query_id].push_back({r.doc_id, Grade(r.grade), r.facet_key});
  }
  std::map<std::string, GradedPool> out;
  for (auto& [q, ps] : grouped) out.emplace(q, GradedPool(q, std::move(ps)));
  return out;
}

// --- runs ------------------------------------------------------------------

struct RunRecord {
  std::string query_id;
  std::string doc_id;
  long long rank = 1;
  double score = 0.0;
  std::string system = "other";
  json extra = json::object();

  static RunRecord from_json(const json& j) {
    RunRecord r;
    r.query_id = detail::str(j, "query_id");
    r.doc_id = detail::str(j, "doc_id");
    r.rank = detail::integer(j, "rank");
    if (r.rank < 1) throw InvalidInput("rank must be >= 1");
    r.score = j.contains("score") ? detail::num(j, "score") : 0.0;
    r.system = detail::opt_str(j, "system").value_or("other");
    r.extra = detail::extras(j, {"query_id", "doc_id", "rank", "score", "system"});
    return r;
  }

  json to_json() const {
    json j{{"query_id", query_id}, {"doc_id", doc_id}, {"rank", rank}, {"score", score}, {"system", system}};
    detail::merge_extras(j, extra);
    return j;
  }
};

/// Groups run records into ranked lists keyed by (system, query_id).
inline std::map<std::pair<std::string, std::string>, RunList> group_runs(const std::vector<RunRecord>& recs) {
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> grouped;
  for (const auto& r : recs) grouped[{r.system, r.query_id}].push_back(&r);
  std::map<std::pair<std::string, std::string>, RunList> out;
  for (auto& [key, rs] : grouped) {
    std::stable_sort(rs.begin(), rs.end(), [](const RunRecord* a, const RunRecord* b) { return a->rank < b->rank; });
    for (std::size_t i = 1; i < rs.size(); ++i)
      if (rs[i]->rank == rs[i - 1]->rank)
        throw InvalidInput("duplicate rank " + std::to_string(rs[i]->rank) + " in " + key.first + " run for query '" +
                           key.second + "'");
    RunList list{key.second, key.first, {}};
    for (const auto* r : rs) list.entries.push_back({r->doc_id, r->score});
    list.validate();
    out.emplace(key, std::move(list));
  }
  return out;
}

inline std::vector<RunRecord> to_records(const RunList& list) {
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < list.entries.size(); ++i)
    out.push_back({list.query_id, list.entries[i].doc_id, static_cast<long long>(i + 1), list.entries[i].score,
                   list.system, json::object()});
  return out;
}

// --- texts -----------------------------------------------------------------

struct TextRecord {
  std::string doc_id;
  std::string text;
  json extra = json::object();

  static TextRecord from_json(const json& j) {
    return {detail::str(j, "doc_id"), detail::str(j, "text"), detail::extras(j, {"doc_id", "text"})};
  }
  json to_json() const {
    json j{{"doc_id", doc_id}, {"text", text}};
    detail::merge_extras(j, extra);
    return j;
  }
};

inline std::unordered_map<std::string, std::string> load_texts(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> out;
  for (auto& r : load_records<TextRecord>(path)) out[r.doc_id] = std::move(r.text);
  return out;
}

// --- answers ---------------------------------------------------------------

struct AnswerRow {
  std::string query_id;
  std::vector<std::string> gold_doc_ids;
  std::optional<bool> correct;
  json extra = json::object();

  static AnswerRow from_json(const json& j) {
    AnswerRow r;
    r.query_id = detail::str(j, "query_id");
    r.gold_doc_ids = detail::str_list(j, "gold_doc_ids");
    if (auto it = j.find("correct"); it != j.end() && !it->is_null()) {
      if (!it->is_boolean()) throw InvalidInput("field 'correct' must be a boolean");
      r.correct = it->get<bool>();
    }
    r.extra = detail::extras(j, {"query_id", "gold_doc_ids", "correct"});
    return r;
  }
  json to_json() const {
    json j{{"query_id", query_id}, {"gold_doc_ids", gold_doc_ids}};
    if (correct) j["correct"] = *correct;
    detail::merge_extras(j, extra);
    return j;
  }
  AnswerRecord to_answer() const { return {query_id, gold_doc_ids, correct}; }
};

// --- candidate pools -------------------------------------------------------

struct CandidatePoolRecord {
  std::string query_id;
  std::vector<std::string> doc_ids;
  std::string provenance_label;
  json extra = json::object();

  static CandidatePoolRecord from_json(const json& j) {
    return {detail::str(j, "query_id"), detail::str_list(j, "doc_ids"),
            detail::opt_str(j, "provenance_label").value_or(""),
            detail::extras(j, {"query_id", "doc_ids", "provenance_label"})};
  }
  json to_json() const {
    json j{{"query_id", query_id}, {"doc_ids", doc_ids}, {"provenance_label", provenance_label}};
    detail::merge_extras(j, extra);
    return j;
  }
  CandidatePool to_pool() const { return {query_id, doc_ids, provenance_label}; }
  static CandidatePoolRecord from_pool(const CandidatePool& p) {
    return {p.query_id, p.doc_ids, p.provenance_label, json::object()};
  }
};

// --- judge transcripts -----------------------------------------------------

struct TranscriptRecord {
  std::string query_id;
  std::vector<std::string> batch;
  std::vector<std::string> order;
  json extra = json::object();

  static TranscriptRecord from_json(const json& j) {
    TranscriptRecord r{detail::str(j, "query_id"), detail::str_list(j, "batch"), detail::str_list(j, "order"),
                       detail::extras(j, {"query_id", "batch", "order"})};
    if (!JudgedOrder{r.batch, r.order}.is_permutation()) throw InvalidInput("order is not a permutation of batch");
    return r;
  }
  json to_json() const {
    json j{{"query_id", query_id}, {"batch", batch}, {"order", order}};
    detail::merge_extras(j, extra);
    return j;
  }
};

// --- probe bundles ---------------------------------------------------------

struct BundleRecord {
  diag::ProbeBundle bundle;
  json extra = json::object();

  static diag::ProbeText text_from(const json& j) {
    return {detail::str(j, "text"), detail::str(j, "author"), detail::str(j, "topic")};
  }
  static json text_to(const diag::ProbeText& t) { return {{"text", t.text}, {"author", t.author}, {"topic", t.topic}}; }

  static BundleRecord from_json(const json& j) {
    BundleRecord r;
    r.bundle.query_id = detail::str(j, "query_id");
    r.bundle.language = diag::parse_language(detail::str(j, "language"));
    r.bundle.query = text_from(detail::field(j, "query"));
    const auto& c = detail::field(j, "candidates");
    if (!c.is_object()) throw InvalidInput("field 'candidates' must be an object keyed C1..C4");
    for (auto s : diag::kSlots) {
      auto it = c.find(diag::to_string(s));
      if (it == c.end()) throw InvalidInput(std::string("missing candidate ") + diag::to_string(s));
      r.bundle[s] = text_from(*it);
    }
    diag::validate_structure(r.bundle);
    r.extra = detail::extras(j, {"query_id", "language", "query", "candidates"});
    return r;
  }

  json to_json() const {
    json c = json::object();
    for (auto s : diag::kSlots) c[diag::to_string(s)] = text_to(bundle[s]);
    json j{{"query_id", bundle.query_id},
           {"language", diag::to_string(bundle.language)},
           {"query", text_to(bundle.query)},
           {"candidates", c}};
    detail::merge_extras(j, extra);
    return j;
  }
};

// --- vectors ---------------------------------------------------------------

struct VectorRecord {
  std::string text_hash;
  std::string provider;
  std::size_t dim = 0;
  std::vector<double> values;
  json extra = json::object();

  static VectorRecord from_json(const json& j) {
    VectorRecord r;
    r.text_hash = detail::str(j, "text_hash");
    r.provider = detail::str(j, "provider");
    const long long dim = detail::integer(j, "dim");
    const auto& v = detail::field(j, "values");
    if (!v.is_array()) throw InvalidInput("field 'values' must be an array");
    for (const auto& x : v) {
      if (!x.is_number()) throw InvalidInput("field 'values' must hold numbers");
      r.values.push_back(x.get<double>());
    }
    if (dim < 1 || static_cast<std::size_t>(dim) != r.values.size())
      throw InvalidInput("dim " + std::to_string(dim) + " does not match " + std::to_string(r.values.size()) + " values");
    r.dim = static_cast<std::size_t>(dim);
    r.extra = detail::extras(j, {"text_hash", "provider", "dim", "values"});
    return r;
  }
  json to_json() const {
    json j{{"text_hash", text_hash}, {"provider", provider}, {"dim", dim}, {"values", values}};
    detail::merge_extras(j, extra);
    return j;
  }
};

/// Builds one replay store per provider label from a vector file.
inline std::map<std::string, diag::RecordedVectorStore> load_vector_stores(const std::filesystem::path& path) {
  std::map<std::string, diag::RecordedVectorStore> out;
  for (auto& r : load_records<VectorRecord>(path)) {
    auto it = out.try_emplace(r.provider, r.provider).first;
    it->second.add(r.text_hash, std::move(r.values));
  }
  return out;
}

// --- configuration points --------------------------------------------------

struct ConfigPointRecord {
  clq::ConfigPoint point;
  json extra = json::object();

  static ConfigPointRecord from_json(const json& j) {
    ConfigPointRecord r;
    auto& p = r.point;
    p.config_id = detail::str(j, "config_id");
    p.model = detail::opt_str(j, "model").value_or("");
    p.dimension = j.contains("dimension") ? static_cast<int>(detail::integer(j, "dimension")) : 0;
    p.reranker = detail::opt_str(j, "reranker").value_or("");
    p.k = j.contains("k") ? static_cast<std::size_t>(detail::integer(j, "k")) : 0;
    p.ann = detail::opt_str(j, "ann").value_or("");
    if (auto it = j.find("cost"); it != j.end()) {
      if (!it->is_string()) throw InvalidInput("field 'cost' must be a decimal string, e.g. \"1.25\"");
      p.cost = clq::Money::parse(it->get<std::string>());
    }
    if (auto it = j.find("latency_samples"); it != j.end())
      for (const auto& x : *it) p.latency_samples.push_back(x.get<double>());
    if (j.contains("latency_p50")) p.latency_p50 = detail::num(j, "latency_p50");
    if (j.contains("latency_p95")) p.latency_p95 = detail::num(j, "latency_p95");
    if (auto it = j.find("quality"); it != j.end()) {
      if (!it->is_object()) throw InvalidInput("field 'quality' must be an object");
      for (auto q = it->begin(); q != it->end(); ++q) p.quality[q.key()] = q.value().get<double>();
    }
    p.validate();
    r.extra = detail::extras(j, {"config_id", "model", "dimension", "reranker", "k", "ann", "cost", "latency_samples",
                                 "latency_p50", "latency_p95", "quality"});
    return r;
  }

  json to_json() const {
    const auto& p = point;
    json j{{"config_id", p.config_id}, {"model", p.model},       {"dimension", p.dimension},
           {"reranker", p.reranker},   {"k", p.k},               {"ann", p.ann},
           {"cost", p.cost.str()},     {"quality", p.quality}};
    if (!p.latency_samples.empty()) j["latency_samples"] = p.latency_samples;
    if (p.latency_p50) j["latency_p50"] = *p.latency_p50;
    if (p.latency_p95) j["latency_p95"] = *p.latency_p95;
    detail::merge_extras(j, extra);
    return j;
  }
};

inline std::vector<clq::ConfigPoint> load_config_points(const std::filesystem::path& path) {
  std::vector<clq::ConfigPoint> out;
  for (auto& r : load_records<ConfigPointRecord>(path)) out.push_back(std::move(r.point));
  return out;
}

}  // namespace raggs::io
