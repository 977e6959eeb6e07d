#pragma once

// Pipeline configuration (JSON). Paths are relative to the workspace root.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raggs/clq.hpp"
#include "raggs/core/error.hpp"
#include "raggs/diagnostics/ablation.hpp"
#include "raggs/fusion.hpp"
#include "raggs/io/jsonl.hpp"
#include "raggs/metrics.hpp"
#include "raggs/oracle_ceiling.hpp"
#include "raggs/pl_ranker.hpp"

namespace raggs::io {

struct InputPaths {
  std::string pools;
  std::string runs;
  std::optional<std::string> texts;
  std::optional<std::string> answers;
  std::optional<std::string> config_points;
  std::optional<std::string> price_sheet;
  std::optional<std::string> bundles;
  std::optional<std::string> vectors;
  std::optional<std::string> transcript;
};

struct RefineSettings {
  bool enabled = false;
  std::string judge = "simulated";  // simulated, transcript, http
  double noise_scale = 0.0;
  RankerConfig ranker;
};

struct ClqSettings {
  std::optional<double> slo_ms;
  std::optional<clq::Money> budget;
  std::string quality_metric = "RA-nWG@10";
  std::vector<std::string> frontier_quality = clq::default_quality_objectives();
  std::uint64_t tokens_per_candidate = 500;
};

struct DiagnoseSettings {
  bool enabled = false;
  std::string provider = "hashing";
  std::vector<diag::AblationKind> ablations{diag::kAllAblations.begin(), diag::kAllAblations.end()};
  double exclusion_floor = 0.02;
};

struct PipelineConfig {
  InputPaths inputs;
  std::uint64_t seed = 0;
  std::vector<std::size_t> ks{10, 30};
  RarityParams rarity;
  FusionParams fusion;
  std::optional<double> dedup_jaccard;
  GradeBudgets budgets = default_prune_budgets();
  RefineSettings refine;
  HeadroomThresholds headroom;
  ClqSettings clq;
  DiagnoseSettings diagnose;
  std::optional<std::string> judge_url;
  std::optional<std::string> embedding_url;

  static PipelineConfig from_json(const json& j);
  /// Canonical form with every default spelled out; the run id hashes this.
  json to_json() const;
};

namespace detail {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

template <typename T>
void get_if(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

inline const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return empty;
  if (!it->is_object()) throw InvalidInput(std::string("config section '") + key + "' must be an object");
  return *it;
}

}  // namespace detail

inline PipelineConfig PipelineConfig::from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  PipelineConfig c;
  const auto& in = detail::section(j, "inputs");
  detail::get_if(in, "pools", c.inputs.pools);
  detail::get_if(in, "runs", c.inputs.runs);
  detail::get_if(in, "texts", c.inputs.texts);
  detail::get_if(in, "answers", c.inputs.answers);
  detail::get_if(in, "config_points", c.inputs.config_points);
  detail::get_if(in, "price_sheet", c.inputs.price_sheet);
  detail::get_if(in, "bundles", c.inputs.bundles);
  detail::get_if(in, "vectors", c.inputs.vectors);
  detail::get_if(in, "transcript", c.inputs.transcript);
  if (c.inputs.pools.empty() || c.inputs.runs.empty()) throw InvalidInput("config inputs need 'pools' and 'runs'");

  detail::get_if(j, "seed", c.seed);
  detail::get_if(j, "ks", c.ks);
  if (c.ks.empty()) throw InvalidInput("config 'ks' must not be empty");
  for (auto k : c.ks)
    if (k < 1) throw InvalidInput("config 'ks' entries must be >= 1");

  const auto& r = detail::section(j, "rarity");
  detail::get_if(r, "alpha", c.rarity.alpha);
  detail::get_if(r, "cap4", c.rarity.cap4);
  detail::get_if(r, "cap3", c.rarity.cap3);
  c.rarity.validate();

  const auto& f = detail::section(j, "fusion");
  detail::get_if(f, "rrf_constant", c.fusion.rrf_constant);
  detail::get_if(f, "per_list_depth", c.fusion.per_list_depth);
  c.fusion.validate();

  const auto& d = detail::section(j, "dedup");
  detail::get_if(d, "jaccard", c.dedup_jaccard);

  const auto& p = detail::section(j, "prune");
  if (auto it = p.find("budgets"); it != p.end()) {
    c.budgets.clear();
    for (auto b = it->begin(); b != it->end(); ++b) {
      const int g = std::stoi(b.key());
      if (g < 1 || g > 5) throw InvalidInput("prune budget for grade " + b.key() + " is out of range");
      c.budgets[g] = b.value().is_null() ? std::nullopt : std::optional<std::size_t>(b.value().get<std::size_t>());
    }
  }

  const auto& rf = detail::section(j, "refine");
  detail::get_if(rf, "enabled", c.refine.enabled);
  detail::get_if(rf, "judge", c.refine.judge);
  detail::get_if(rf, "noise_scale", c.refine.noise_scale);
  if (c.refine.judge != "simulated" && c.refine.judge != "transcript" && c.refine.judge != "http")
    throw InvalidInput("refine.judge must be simulated, transcript or http");
  auto& rk = c.refine.ranker;
  const auto& rkj = detail::section(rf, "ranker");
  detail::get_if(rkj, "batch_size", rk.batch_size);
  detail::get_if(rkj, "learning_rate", rk.learning_rate);
  detail::get_if(rkj, "clip", rk.clip);
  detail::get_if(rkj, "z", rk.z);
  detail::get_if(rkj, "eps", rk.eps);
  detail::get_if(rkj, "min_confirmations", rk.min_confirmations);
  detail::get_if(rkj, "stability_T", rk.stability_T);
  detail::get_if(rkj, "iteration_limit", rk.iteration_limit);
  detail::get_if(rkj, "recenter_every", rk.recenter_every);
  detail::get_if(rkj, "top_n", rk.top_n);
  detail::get_if(rkj, "require_resolved_head", rk.require_resolved_head);
  if (auto it = rkj.find("eta_decay"); it != rkj.end()) {
    const auto s = it->get<std::string>();
    if (s == "none") rk.eta_decay = EtaDecay::None;
    else if (s == "inverse_sqrt") rk.eta_decay = EtaDecay::InverseSqrt;
    else throw InvalidInput("refine.ranker.eta_decay must be none or inverse_sqrt");
  }
  rk.validate();

  const auto& pr = detail::section(j, "proc");
  detail::get_if(pr, "proc_threshold", c.headroom.proc_threshold);
  detail::get_if(pr, "realization_threshold", c.headroom.realization_threshold);
  c.headroom.validate();

  const auto& cq = detail::section(j, "clq");
  detail::get_if(cq, "slo_ms", c.clq.slo_ms);
  if (auto it = cq.find("budget"); it != cq.end() && !it->is_null())
    c.clq.budget = clq::Money::parse(it->is_string() ? it->get<std::string>() : it->dump());
  detail::get_if(cq, "quality_metric", c.clq.quality_metric);
  detail::get_if(cq, "frontier_quality", c.clq.frontier_quality);
  detail::get_if(cq, "tokens_per_candidate", c.clq.tokens_per_candidate);

  const auto& dg = detail::section(j, "diagnose");
  detail::get_if(dg, "enabled", c.diagnose.enabled);
  detail::get_if(dg, "provider", c.diagnose.provider);
  detail::get_if(dg, "exclusion_floor", c.diagnose.exclusion_floor);
  if (auto it = dg.find("ablations"); it != dg.end()) {
    c.diagnose.ablations.clear();
    for (const auto& a : *it) c.diagnose.ablations.push_back(diag::parse_ablation(a.get<std::string>()));
  }

  const auto& ep = detail::section(j, "endpoints");
  detail::get_if(ep, "judge_url", c.judge_url);
  detail::get_if(ep, "embedding_url", c.embedding_url);
  return c;
}

inline json PipelineConfig::to_json() const {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  json budgets_j = json::object();
  for (const auto& [g, b] : budgets) budgets_j[std::to_string(g)] = opt(b);
  json abl = json::array();
  for (auto a : diagnose.ablations) abl.push_back(diag::to_string(a));
  const auto& rk = refine.ranker;
  return {
      {"inputs",
       {{"pools", inputs.pools},
        {"runs", inputs.runs},
        {"texts", opt(inputs.texts)},
        {"answers", opt(inputs.answers)},
        {"config_points", opt(inputs.config_points)},
        {"price_sheet", opt(inputs.price_sheet)},
        {"bundles", opt(inputs.bundles)},
        {"vectors", opt(inputs.vectors)},
        {"transcript", opt(inputs.transcript)}}},
      {"ks", ks},
      {"rarity", {{"alpha", rarity.alpha}, {"cap4", rarity.cap4}, {"cap3", rarity.cap3}}},
      {"fusion", {{"rrf_constant", fusion.rrf_constant}, {"per_list_depth", fusion.per_list_depth}}},
      {"dedup", {{"jaccard", opt(dedup_jaccard)}}},
      {"prune", {{"budgets", budgets_j}}},
      {"refine",
       {{"enabled", refine.enabled},
        {"judge", refine.judge},
        {"noise_scale", refine.noise_scale},
        {"ranker",
         {{"batch_size", rk.batch_size},
          {"learning_rate", rk.learning_rate},
          {"clip", rk.clip},
          {"z", rk.z},
          {"eps", rk.eps},
          {"min_confirmations", rk.min_confirmations},
          {"stability_T", rk.stability_T},
          {"iteration_limit", rk.iteration_limit},
          {"recenter_every", rk.recenter_every},
          {"top_n", rk.top_n},
          {"require_resolved_head", rk.require_resolved_head},
          {"eta_decay", rk.eta_decay == EtaDecay::None ? "none" : "inverse_sqrt"}}}}},
      {"proc",
       {{"proc_threshold", headroom.proc_threshold}, {"realization_threshold", headroom.realization_threshold}}},
      {"clq",
       {{"slo_ms", opt(clq.slo_ms)},
        {"budget", clq.budget ? json(clq.budget->str()) : json(nullptr)},
        {"quality_metric", clq.quality_metric},
        {"frontier_quality", clq.frontier_quality},
        {"tokens_per_candidate", clq.tokens_per_candidate}}},
      {"diagnose",
       {{"enabled", diagnose.enabled},
        {"provider", diagnose.provider},
        {"ablations", abl},
        {"exclusion_floor", diagnose.exclusion_floor}}},
      {"endpoints", {{"judge_url", opt(judge_url)}, {"embedding_url", opt(embedding_url)}}},
  };
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, std::string("invalid JSON: ") + e.what());
  }
  return PipelineConfig::from_json(j);
}

}  // namespace raggs::io
