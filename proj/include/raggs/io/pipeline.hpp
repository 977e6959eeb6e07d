#pragma once

// End-to-end run over a workspace:
//   merge -> prune -> refine (optional) -> score -> proc -> clq -> diagnose (optional)
// Every stage reads its inputs from files and writes its outputs under
// runs/<run_id>/<stage>/, so a stage whose cache key and output digests still
// match a previous manifest is reused instead of recomputed. A failing stage
// halts the run and the partial manifest is still written.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "raggs/clq.hpp"
#include "raggs/core/digest.hpp"
#include "raggs/core/error.hpp"
#include "raggs/core/log.hpp"
#include "raggs/core/rng.hpp"
#include "raggs/diagnostics/ablation.hpp"
#include "raggs/diagnostics/delta.hpp"
#include "raggs/diagnostics/embedding.hpp"
#include "raggs/fusion.hpp"
#include "raggs/io/config.hpp"
#include "raggs/io/http.hpp"
#include "raggs/io/manifest.hpp"
#include "raggs/io/price_sheet.hpp"
#include "raggs/io/records.hpp"
#include "raggs/judge.hpp"
#include "raggs/metrics.hpp"
#include "raggs/oracle_ceiling.hpp"
#include "raggs/pl_ranker.hpp"

namespace raggs::io {

namespace fs = std::filesystem;

inline std::uint64_t stage_seed(std::uint64_t run_seed, const std::string& stage) {
  return mix_seed(run_seed, fnv1a(stage));
}

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Ranked lists of every system in a run file, plus any extra run files.
inline std::map<std::pair<std::string, std::string>, RunList> load_lists(const fs::path& ws,
                                                                        const std::vector<std::string>& rels) {
  std::map<std::pair<std::string, std::string>, RunList> all;
  for (const auto& rel : rels) {
    auto lists = group_runs(load_records<RunRecord>(ws / rel));
    for (auto& [k, v] : lists)
      if (!all.emplace(k, std::move(v)).second)
        throw InvalidInput("system '" + k.first + "' appears in more than one run file for query '" + k.second + "'");
  }
  return all;
}

inline std::map<std::string, CandidatePool> load_candidates(const fs::path& path) {
  std::map<std::string, CandidatePool> out;
  for (const auto& r : load_records<CandidatePoolRecord>(path)) out[r.query_id] = r.to_pool();
  return out;
}

// --- stage bodies -----------------------------------------------------------
// Each returns the stage summary and fills `outputs` with relative paths.

struct StageContext {
  fs::path ws;
  std::string dir;  // runs/<id>/<stage>
  const PipelineConfig& cfg;
  std::uint64_t seed;
  std::vector<std::string> outputs;

  std::string out(const std::string& name) {
    outputs.push_back(dir + "/" + name);
    return outputs.back();
  }
};

inline json stage_merge(StageContext& c) {
  const auto lists = load_lists(c.ws, {c.cfg.inputs.runs});
  std::map<std::string, std::vector<RunList>> by_query;
  std::set<std::string> systems;
  for (const auto& [key, list] : lists) {
    if (key.first == "fused") continue;
    by_query[key.second].push_back(list);
    systems.insert(key.first);
  }
  std::unordered_map<std::string, std::string> texts;
  if (c.cfg.dedup_jaccard) {
    if (!c.cfg.inputs.texts) throw InvalidInput("dedup.jaccard is set but no texts file is configured");
    texts = load_texts(c.ws / *c.cfg.inputs.texts);
  }
  std::vector<RunRecord> recs;
  std::size_t total = 0, dropped = 0;
  for (const auto& [q, ls] : by_query) {
    RunList fused = rrf_merge(ls, c.cfg.fusion);
    if (c.cfg.dedup_jaccard) {
      const auto before = fused.entries.size();
      fused = near_duplicate_suppress(fused, texts, *c.cfg.dedup_jaccard);
      dropped += before - fused.entries.size();
    }
    total += fused.entries.size();
    for (auto& r : to_records(fused)) recs.push_back(std::move(r));
  }
  save_records(c.ws / c.out("fused.jsonl"), recs);
  return {{"queries", by_query.size()},
          {"systems", std::vector<std::string>(systems.begin(), systems.end())},
          {"fused_entries", total},
          {"near_duplicates_dropped", dropped}};
}

inline json stage_prune(StageContext& c, const std::string& fused_rel) {
  const auto pools = load_pools(c.ws / c.cfg.inputs.pools);
  const auto fused = load_lists(c.ws, {fused_rel});
  std::vector<CandidatePoolRecord> recs;
  std::size_t kept = 0, missing = 0;
  for (const auto& [key, list] : fused) {
    auto it = pools.find(key.second);
    if (it == pools.end()) {
      log::warn("prune: no graded pool for query '" + key.second + "', skipping");
      ++missing;
      continue;
    }
    auto pool = grade_bucketed_prune(it->second, list, c.cfg.budgets, "rrf-pruned");
    kept += pool.doc_ids.size();
    recs.push_back(CandidatePoolRecord::from_pool(pool));
  }
  save_records(c.ws / c.out("candidates.jsonl"), recs);
  return {{"queries", recs.size()}, {"candidates", kept}, {"queries_without_pool", missing}};
}

inline json stage_refine(StageContext& c, const std::string& candidates_rel) {
  const auto pools = load_pools(c.ws / c.cfg.inputs.pools);
  const auto candidates = load_candidates(c.ws / candidates_rel);
  std::unordered_map<std::string, std::string> texts;
  if (c.cfg.inputs.texts) texts = load_texts(c.ws / *c.cfg.inputs.texts);
  std::map<std::string, std::vector<JudgedOrder>> transcripts;
  if (c.cfg.refine.judge == "transcript") {
    if (!c.cfg.inputs.transcript) throw InvalidInput("refine.judge = transcript needs inputs.transcript");
    for (auto& t : load_records<TranscriptRecord>(c.ws / *c.cfg.inputs.transcript))
      transcripts[t.query_id].push_back({t.batch, t.order});
  }
  if (c.cfg.refine.judge == "http" && !c.cfg.judge_url) throw InvalidInput("refine.judge = http needs endpoints.judge_url");

  std::vector<RunRecord> refined;
  std::vector<TranscriptRecord> recorded;
  std::size_t converged = 0, iterations = 0, locks = 0, calls = 0;
  for (const auto& [q, cand] : candidates) {
    const auto& full = pools.at(q);
    std::vector<GradedPassage> sub;
    for (const auto& d : cand.doc_ids)
      if (const auto* p = full.find(d)) sub.push_back(*p);
    if (sub.size() < 2) continue;
    const GradedPool pool(q, std::move(sub));
    const WeightSchedule w = compute_weights(full, c.cfg.rarity);
    const std::uint64_t qseed = mix_seed(c.seed, fnv1a(q));

    std::unique_ptr<Judge> judge;
    if (c.cfg.refine.judge == "simulated") {
      // Utilities follow the stationary grades; ties resolve by doc id.
      SimulatedJudgeParams params{{}, c.cfg.refine.noise_scale, qseed};
      for (const auto& p : pool.passages()) params.true_utilities[p.doc_id] = p.grade.value();
      judge = std::make_unique<SimulatedJudge>(std::move(params));
    } else if (c.cfg.refine.judge == "transcript") {
      judge = std::make_unique<TranscriptJudge>(transcripts[q]);
    } else {
      judge = std::make_unique<HttpJudge>(*c.cfg.judge_url);
    }
    RecordingJudge rec(*judge);
    const auto res = refine(pool, w, rec, c.cfg.refine.ranker, qseed, texts.empty() ? nullptr : &texts);
    if (res.aborted) throw JudgeError("refine aborted for query '" + q + "': " + res.abort_reason);
    converged += res.converged;
    iterations += res.iterations;
    locks += res.lock_count;
    calls += res.judge_calls;
    for (std::size_t i = 0; i < res.order.size(); ++i)
      refined.push_back({q, res.order[i], static_cast<long long>(i + 1), res.scores.at(res.order[i]), "refined",
                         json::object()});
    for (const auto& t : rec.transcript()) recorded.push_back({q, t.batch, t.order, json::object()});
  }
  save_records(c.ws / c.out("refined.jsonl"), refined);
  save_records(c.ws / c.out("transcript.jsonl"), recorded);
  return {{"queries", candidates.size()}, {"converged", converged}, {"iterations", iterations},
          {"locks", locks},               {"judge_calls", calls}};
}

inline json stage_score(StageContext& c, const std::vector<std::string>& run_rels) {
  const auto pools = load_pools(c.ws / c.cfg.inputs.pools);
  const auto lists = load_lists(c.ws, run_rels);
  std::vector<AnswerRecord> answers;
  if (c.cfg.inputs.answers)
    for (const auto& a : load_records<AnswerRow>(c.ws / *c.cfg.inputs.answers)) answers.push_back(a.to_answer());

  std::vector<json> rows;
  std::map<std::string, std::vector<QueryMetricRow>> by_system;
  std::map<std::string, std::map<std::string, RetrievedList>> retrieved;
  std::size_t skipped = 0;
  for (const auto& [key, list] : lists) {
    const auto& [system, q] = key;
    auto it = pools.find(q);
    if (it == pools.end()) {
      ++skipped;
      continue;
    }
    const auto w = compute_weights(it->second, c.cfg.rarity);
    const auto rl = list.as_retrieved();
    const auto score = score_query(it->second, w, rl, c.cfg.ks);
    for (const auto& r : score.rows) {
      rows.push_back({{"system", system}, {"query_id", q}, {"metric", r.metric}, {"k", r.k}, {"value", opt_json(r.value)}});
      by_system[system].push_back(r);
    }
    retrieved[system].emplace(q, rl);
  }
  if (skipped) log::warn("score: " + std::to_string(skipped) + " ranked lists have no graded pool and were skipped");
  std::vector<json> summary;
  for (const auto& [system, rs] : by_system) {
    for (const auto& [mk, s] : macro_aggregate_grouped(rs))
      summary.push_back({{"system", system}, {"metric", mk.first}, {"k", mk.second}, {"mean", opt_json(s.mean)},
                         {"valid_count", s.valid_count}});
    if (!answers.empty())
      for (std::size_t k : c.cfg.ks) {
        std::size_t hits = 0, valid = 0;
        for (const auto& a : answers) {
          auto li = retrieved[system].find(a.query_id);
          const auto h = hit_at_k(a, li == retrieved[system].end() ? RetrievedList{} : li->second, k);
          if (!h) continue;
          ++valid;
          hits += *h;
        }
        summary.push_back({{"system", system}, {"metric", "Hit"}, {"k", k},
                           {"mean", valid ? json(static_cast<double>(hits) / static_cast<double>(valid)) : json(nullptr)},
                           {"valid_count", valid}});
        const auto acc = acc_given_hit(answers, retrieved[system], k);
        summary.push_back({{"system", system}, {"metric", "Acc|Hit"}, {"k", k}, {"mean", opt_json(acc)},
                           {"valid_count", hits}});
      }
  }
  write_file(c.ws / c.out("metrics.jsonl"), dump_jsonl(rows));
  write_file(c.ws / c.out("summary.jsonl"), dump_jsonl(summary));
  return {{"systems", by_system.size()}, {"rows", rows.size()}, {"skipped_lists", skipped}};
}

inline json stage_proc(StageContext& c, const std::vector<std::string>& run_rels,
                       const std::optional<std::pair<std::string, std::string>>& refined_over_candidates) {
  const auto pools = load_pools(c.ws / c.cfg.inputs.pools);
  const auto lists = load_lists(c.ws, run_rels);
  std::vector<json> rows, summary;
  auto emit = [&](const std::string& label, const std::vector<CeilingRow>& rs) {
    for (const auto& r : rs)
      rows.push_back({{"system", label},
                      {"query_id", r.query_id},
                      {"metric", r.metric},
                      {"k", r.k},
                      {"actual", opt_json(r.actual)},
                      {"ceiling", opt_json(r.ceiling)},
                      {"percent_proc", opt_json(r.percent_proc)},
                      {"provenance", r.provenance_label}});
  };
  std::map<std::string, std::vector<CeilingRow>> by_label;
  for (const auto& [key, list] : lists) {
    auto it = pools.find(key.second);
    if (it == pools.end()) continue;
    const auto w = compute_weights(it->second, c.cfg.rarity);
    // The candidate pool is the system's own list, at the fusion depth.
    CandidatePool cand{key.second, {}, key.first + "-top" + std::to_string(c.cfg.fusion.per_list_depth)};
    for (std::size_t i = 0; i < std::min(list.entries.size(), c.cfg.fusion.per_list_depth); ++i)
      cand.doc_ids.push_back(list.entries[i].doc_id);
    auto rs = ceiling_rows(it->second, w, cand, list.as_retrieved(), c.cfg.ks);
    emit(key.first, rs);
    auto& dst = by_label[key.first];
    dst.insert(dst.end(), rs.begin(), rs.end());
  }
  if (refined_over_candidates) {
    const auto cands = load_candidates(c.ws / refined_over_candidates->second);
    const auto refined = load_lists(c.ws, {refined_over_candidates->first});
    for (const auto& [key, list] : refined) {
      auto p = pools.find(key.second);
      auto cd = cands.find(key.second);
      if (p == pools.end() || cd == cands.end()) continue;
      auto rs = ceiling_rows(p->second, compute_weights(p->second, c.cfg.rarity), cd->second, list.as_retrieved(),
                             c.cfg.ks);
      emit("refined/pruned", rs);
      auto& dst = by_label["refined/pruned"];
      dst.insert(dst.end(), rs.begin(), rs.end());
    }
  }
  for (const auto& [label, rs] : by_label)
    for (const auto& s : summarize_ceilings(rs, c.cfg.headroom))
      summary.push_back({{"system", label},
                         {"metric", s.metric},
                         {"k", s.k},
                         {"actual", opt_json(s.actual)},
                         {"ceiling", opt_json(s.ceiling)},
                         {"percent_proc", opt_json(s.percent_proc)},
                         {"headroom", s.headroom ? json(to_string(*s.headroom)) : json(nullptr)},
                         {"valid_count", s.valid_count}});
  write_file(c.ws / c.out("rows.jsonl"), dump_jsonl(rows));
  write_file(c.ws / c.out("summary.jsonl"), dump_jsonl(summary));
  return {{"rows", rows.size()}, {"labels", by_label.size()}};
}

inline json stage_clq(StageContext& c) {
  if (!c.cfg.inputs.config_points) return {{"skipped", "no config points configured"}};
  auto points = load_config_points(c.ws / *c.cfg.inputs.config_points);
  if (points.empty()) return {{"skipped", "config point file is empty"}};
  if (c.cfg.inputs.price_sheet) {
    const auto sheet = load_price_sheet(c.ws / *c.cfg.inputs.price_sheet);
    for (auto& p : points)
      if (p.cost.micros == 0 && !p.reranker.empty() && sheet.rerank_per_1k.count(p.reranker))
        p.cost = clq::rerank_cost(p.k, c.cfg.clq.tokens_per_candidate, sheet.rerank(p.reranker));
  }
  const auto frontier = clq::pareto_frontier(points, c.cfg.clq.frontier_quality);
  std::set<std::string> on_frontier;
  for (const auto& p : frontier) on_frontier.insert(p.config_id);

  std::map<std::string, std::size_t> shortlist_rank;
  std::string diagnostic;
  if (c.cfg.clq.slo_ms || c.cfg.clq.budget) {
    clq::SloConstraints slo{c.cfg.clq.slo_ms, c.cfg.clq.budget, {}};
    const auto rule = c.cfg.clq.slo_ms ? clq::SloRule::LatencyBound : clq::SloRule::CostBound;
    const auto sel = clq::select_under_slo(points, slo, rule, c.cfg.clq.quality_metric);
    for (std::size_t i = 0; i < sel.shortlist.size(); ++i) shortlist_rank[sel.shortlist[i].config_id] = i + 1;
    diagnostic = sel.diagnostic;
  }

  std::vector<json> rows;
  for (const auto& p : points) {
    ConfigPointRecord rec{p, json::object()};
    json j = rec.to_json();
    j["latency_p50"] = p.p50();
    try {
      j["efficiency"] = clq::efficiency(p.quality, p.p50());
    } catch (const InvalidInput&) {
      j["efficiency"] = nullptr;
    }
    j["on_frontier"] = on_frontier.count(p.config_id) > 0;
    if (auto it = shortlist_rank.find(p.config_id); it != shortlist_rank.end()) j["slo_rank"] = it->second;
    rows.push_back(std::move(j));
  }
  std::sort(rows.begin(), rows.end(), [](const json& a, const json& b) { return a["config_id"] < b["config_id"]; });
  write_file(c.ws / c.out("points.jsonl"), dump_jsonl(rows));
  json out{{"points", points.size()}, {"frontier", on_frontier.size()}, {"shortlist", shortlist_rank.size()}};
  if (!diagnostic.empty()) out["diagnostic"] = diagnostic;
  return out;
}

inline json stage_diagnose(StageContext& c) {
  if (!c.cfg.inputs.bundles) throw InvalidInput("diagnose: no bundles file configured");
  const auto bundles = load_records<BundleRecord>(c.ws / *c.cfg.inputs.bundles);
  std::unique_ptr<diag::EmbeddingProvider> owned;
  std::optional<diag::RecordedVectorStore> store;
  diag::EmbeddingProvider* provider = nullptr;
  if (c.cfg.diagnose.provider == "hashing") {
    owned = std::make_unique<diag::HashingEmbedder>(256, c.seed);
  } else if (c.cfg.diagnose.provider == "http") {
    if (!c.cfg.embedding_url) throw InvalidInput("diagnose.provider = http needs endpoints.embedding_url");
    owned = std::make_unique<HttpEmbedder>("http", *c.cfg.embedding_url);
  } else {
    if (!c.cfg.inputs.vectors) throw InvalidInput("diagnose: provider '" + c.cfg.diagnose.provider + "' needs a vectors file");
    const auto vpath = c.ws / *c.cfg.inputs.vectors;
    if (!fs::exists(vpath)) throw InvalidInput("diagnose: vectors file '" + *c.cfg.inputs.vectors + "' not found");
    auto stores = load_vector_stores(vpath);
    auto it = stores.find(c.cfg.diagnose.provider);
    if (it == stores.end()) throw InvalidInput("diagnose: no vectors recorded for provider '" + c.cfg.diagnose.provider + "'");
    store.emplace(std::move(it->second));
  }
  provider = store ? static_cast<diag::EmbeddingProvider*>(&*store) : owned.get();
  diag::CachingEmbedder cache(*provider);

  std::vector<json> margin_rows, delta_rows;
  // margins[ablation][language][query]
  std::map<diag::AblationKind, std::map<diag::Language, std::map<std::string, diag::MarginTriple>>> margins;
  auto kinds = c.cfg.diagnose.ablations;
  if (std::find(kinds.begin(), kinds.end(), diag::AblationKind::Base) == kinds.end())
    kinds.insert(kinds.begin(), diag::AblationKind::Base);
  for (auto kind : kinds) {
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      const auto& b = bundles[i].bundle;
      // The casing cycle advances with the query index; everything else draws from the stage seed.
      const std::uint64_t s =
          kind == diag::AblationKind::CasePunctPerturb ? i : mix_seed(c.seed, fnv1a(b.query_id));
      const auto ablated = diag::apply_ablation(b, kind, s);
      const auto m = diag::margins(diag::embed_bundle(ablated, cache));
      margins[kind][b.language][b.query_id] = m;
      margin_rows.push_back({{"ablation", diag::to_string(kind)},
                             {"query_id", b.query_id},
                             {"language", diag::to_string(b.language)},
                             {"provider", cache.label()},
                             {"delta_name", m.delta_name},
                             {"delta_topic", m.delta_topic},
                             {"delta_both", m.delta_both}});
    }
  }
  for (auto kind : kinds) {
    if (kind == diag::AblationKind::Base) continue;
    for (const auto& [lang, base] : margins[diag::AblationKind::Base]) {
      const auto summary = diag::delta_delta_percent(base, margins[kind][lang], c.cfg.diagnose.exclusion_floor);
      delta_rows.push_back({{"ablation", diag::to_string(kind)},
                            {"language", diag::to_string(lang)},
                            {"provider", cache.label()},
                            {"mean_percent", opt_json(summary.mean_percent)},
                            {"mean_abs_delta", summary.mean_abs_delta},
                            {"included", summary.included},
                            {"below_floor", summary.below_floor}});
    }
  }
  write_file(c.ws / c.out("margins.jsonl"), dump_jsonl(margin_rows));
  write_file(c.ws / c.out("delta.jsonl"), dump_jsonl(delta_rows));
  return {{"bundles", bundles.size()}, {"ablations", kinds.size()}, {"provider", cache.label()}};
}

// --- driver -----------------------------------------------------------------

struct PipelineOptions {
  std::uint64_t seed = 0;
  /// Reuse stages from an earlier manifest of the same run when digests match.
  bool use_cache = true;
};

inline Manifest run_pipeline(const PipelineConfig& cfg, const fs::path& ws, const PipelineOptions& opt = {}) {
  Manifest m;
  m.seed = opt.seed;
  m.config = cfg.to_json();
  m.config_digest = sha256_hex(m.config.dump());

  std::vector<std::string> input_rels{cfg.inputs.pools, cfg.inputs.runs};
  for (const auto* o : {&cfg.inputs.texts, &cfg.inputs.answers, &cfg.inputs.config_points, &cfg.inputs.price_sheet,
                        &cfg.inputs.bundles, &cfg.inputs.vectors, &cfg.inputs.transcript})
    if (*o) input_rels.push_back(**o);
  for (const auto& rel : input_rels) {
    if (fs::exists(ws / rel)) {
      m.inputs.push_back(digest_file(ws, rel));
    } else if (rel == cfg.inputs.pools || rel == cfg.inputs.runs) {
      throw InvalidInput("required input '" + rel + "' not found in workspace '" + ws.string() + "'");
    }
  }
  m.run_id = make_run_id(m.config_digest, m.inputs, opt.seed);
  const std::string run_dir = "runs/" + m.run_id;

  std::optional<Manifest> prev;
  if (opt.use_cache && fs::exists(ws / manifest_rel_path(m.run_id))) {
    try {
      prev = load_manifest(ws / manifest_rel_path(m.run_id));
    } catch (const ParseError& e) {
      log::warn(std::string("ignoring unreadable previous manifest: ") + e.what());
    }
  }
  std::map<std::string, std::string> input_digest;
  for (const auto& f : m.inputs) input_digest[f.path] = f.sha256;

  // Runs one stage, or reuses it. Returns false when the stage failed.
  auto stage = [&](const std::string& name, const std::vector<std::string>& deps,
                   const std::function<json(StageContext&)>& body) {
    const std::uint64_t seed = stage_seed(opt.seed, name);
    m.seeds[name] = seed;
    Sha256 key;
    key.update(name + "|" + m.config_digest + "|" + std::to_string(seed));
    for (const auto& d : deps) {
      auto it = input_digest.find(d);
      key.update("|" + d + "=" + (it == input_digest.end() ? std::string("absent") : it->second));
    }
    const std::string cache_key = key.hex();
    if (prev)
      if (const auto* old = prev->stage(name); old && old->completed() && old->cache_key == cache_key) {
        try {
          Manifest probe;
          probe.stages.push_back(*old);
          verify_manifest(probe, ws);
          m.append(*old);
          for (const auto& f : old->outputs) input_digest[f.path] = f.sha256;
          return true;
        } catch (const IntegrityError& e) {
          log::warn("stage '" + name + "' cache invalid, recomputing: " + e.what());
        }
      }
    StageContext ctx{ws, run_dir + "/" + name, cfg, seed, {}};
    StageEntry entry{name, "completed", cache_key, seed, {}, json::object(), ""};
    try {
      entry.summary = body(ctx);
      for (const auto& rel : ctx.outputs) {
        entry.outputs.push_back(digest_file(ws, rel));
        input_digest[rel] = entry.outputs.back().sha256;
      }
      m.append(std::move(entry));
      return true;
    } catch (const std::exception& e) {
      entry.status = "failed";
      entry.error = e.what();
      entry.outputs.clear();
      m.append(std::move(entry));
      m.status = "halted";
      return false;
    }
  };

  const std::string fused = run_dir + "/merge/fused.jsonl";
  const std::string candidates = run_dir + "/prune/candidates.jsonl";
  const std::string refined = run_dir + "/refine/refined.jsonl";
  std::vector<std::string> texts_dep;
  if (cfg.inputs.texts) texts_dep.push_back(*cfg.inputs.texts);

  auto finish = [&] {
    if (m.status == "running") m.status = "completed";
    save_manifest(m, ws);
    return m;
  };

  std::vector<std::string> merge_deps{cfg.inputs.runs};
  if (cfg.dedup_jaccard) merge_deps.insert(merge_deps.end(), texts_dep.begin(), texts_dep.end());
  if (!stage("merge", merge_deps, stage_merge)) return finish();
  if (!stage("prune", {cfg.inputs.pools, fused}, [&](StageContext& c) { return stage_prune(c, fused); }))
    return finish();
  if (cfg.refine.enabled) {
    std::vector<std::string> deps{cfg.inputs.pools, candidates};
    deps.insert(deps.end(), texts_dep.begin(), texts_dep.end());
    if (cfg.inputs.transcript) deps.push_back(*cfg.inputs.transcript);
    if (!stage("refine", deps, [&](StageContext& c) { return stage_refine(c, candidates); })) return finish();
  }
  std::vector<std::string> lists{cfg.inputs.runs, fused};
  if (cfg.refine.enabled) lists.push_back(refined);
  std::vector<std::string> score_deps{cfg.inputs.pools};
  score_deps.insert(score_deps.end(), lists.begin(), lists.end());
  if (cfg.inputs.answers) score_deps.push_back(*cfg.inputs.answers);
  if (!stage("score", score_deps, [&](StageContext& c) { return stage_score(c, lists); })) return finish();

  std::vector<std::string> proc_lists{cfg.inputs.runs, fused};
  std::optional<std::pair<std::string, std::string>> rc;
  std::vector<std::string> proc_deps{cfg.inputs.pools, cfg.inputs.runs, fused};
  if (cfg.refine.enabled) {
    rc = std::make_pair(refined, candidates);
    proc_deps.push_back(refined);
    proc_deps.push_back(candidates);
  }
  if (!stage("proc", proc_deps, [&](StageContext& c) { return stage_proc(c, proc_lists, rc); })) return finish();

  std::vector<std::string> clq_deps;
  if (cfg.inputs.config_points) clq_deps.push_back(*cfg.inputs.config_points);
  if (cfg.inputs.price_sheet) clq_deps.push_back(*cfg.inputs.price_sheet);
  if (!stage("clq", clq_deps, stage_clq)) return finish();

  if (cfg.diagnose.enabled) {
    std::vector<std::string> deps;
    if (cfg.inputs.bundles) deps.push_back(*cfg.inputs.bundles);
    if (cfg.inputs.vectors) deps.push_back(*cfg.inputs.vectors);
    if (!stage("diagnose", deps, stage_diagnose)) return finish();
  }
  return finish();
}

}  // namespace raggs::io
