// raggs command-line front end.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "raggs/clq.hpp"
#include "raggs/diagnostics/ablation.hpp"
#include "raggs/diagnostics/delta.hpp"
#include "raggs/diagnostics/embedding.hpp"
#include "raggs/fusion.hpp"
#include "raggs/io/config.hpp"
#include "raggs/io/http.hpp"
#include "raggs/io/manifest.hpp"
#include "raggs/io/pipeline.hpp"
#include "raggs/io/price_sheet.hpp"
#include "raggs/io/records.hpp"
#include "raggs/io/report.hpp"
#include "raggs/metrics.hpp"
#include "raggs/oracle_ceiling.hpp"
#include "raggs/pl_ranker.hpp"

namespace fs = std::filesystem;
using namespace raggs;
using io::json;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string workspace = ".";
};

fs::path resolve(const Globals& g, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : fs::path(g.workspace) / path;
}

void emit(const io::Report& r, const std::string& format) { std::cout << io::render_report(r, io::parse_report_format(format)); }

io::ReportTable summary_table(const std::string& name, const std::vector<QueryMetricRow>& rows,
                              const std::map<std::string, std::vector<QueryMetricRow>>& by_system) {
  io::ReportTable t{name, {"system", "metric", "k", "mean", "valid_queries"}, {}};
  for (const auto& [sys, rs] : by_system)
    for (const auto& [key, s] : macro_aggregate_grouped(rs))
      t.rows.push_back({sys, key.first, key.second, s.mean ? json(*s.mean) : json(nullptr), s.valid_count});
  (void)rows;
  return t;
}

int cmd_score(const Globals& g, const std::string& pools_p, const std::string& runs_p, const std::vector<std::size_t>& ks,
              const std::string& format, bool per_query) {
  const auto pools = io::load_pools(resolve(g, pools_p));
  const auto lists = io::group_runs(io::load_records<io::RunRecord>(resolve(g, runs_p)));
  std::vector<QueryMetricRow> all;
  std::map<std::string, std::vector<QueryMetricRow>> by_system;
  io::ReportTable detail{"per_query", {"system", "query_id", "metric", "k", "value"}, {}};
  io::Report report{"", "completed", {}, {}};
  for (const auto& [key, list] : lists) {
    auto it = pools.find(key.second);
    if (it == pools.end()) {
      report.notices.push_back("query '" + key.second + "' has no graded pool; skipped");
      continue;
    }
    const auto score = score_query(it->second, compute_weights(it->second), list.as_retrieved(), ks);
    for (const auto& r : score.rows) {
      by_system[key.first].push_back(r);
      detail.rows.push_back({key.first, r.query_id, r.metric, r.k, r.value ? json(*r.value) : json(nullptr)});
    }
    if (score.ungraded_count)
      report.notices.push_back("query '" + key.second + "' (" + key.first + "): " + std::to_string(score.ungraded_count) +
                               " retrieved ids are ungraded");
  }
  report.tables.push_back(summary_table("metrics", all, by_system));
  if (per_query) report.tables.push_back(std::move(detail));
  emit(report, format);
  return 0;
}

int cmd_proc(const Globals& g, const std::string& pools_p, const std::string& runs_p, const std::string& cand_p,
             const std::vector<std::size_t>& ks, std::size_t depth, const std::string& format) {
  const auto pools = io::load_pools(resolve(g, pools_p));
  const auto lists = io::group_runs(io::load_records<io::RunRecord>(resolve(g, runs_p)));
  std::map<std::string, CandidatePool> cands;
  if (!cand_p.empty()) cands = io::load_candidates(resolve(g, cand_p));
  std::map<std::string, std::vector<CeilingRow>> by_system;
  for (const auto& [key, list] : lists) {
    auto it = pools.find(key.second);
    if (it == pools.end()) continue;
    CandidatePool pool;
    if (auto c = cands.find(key.second); c != cands.end()) {
      pool = c->second;
    } else {
      pool = {key.second, {}, key.first + "-top" + std::to_string(depth)};
      for (std::size_t i = 0; i < std::min(depth, list.entries.size()); ++i) pool.doc_ids.push_back(list.entries[i].doc_id);
    }
    auto rows = ceiling_rows(it->second, compute_weights(it->second), pool, list.as_retrieved(), ks);
    by_system[key.first].insert(by_system[key.first].end(), rows.begin(), rows.end());
  }
  io::Report report{"", "completed", {}, {}};
  io::ReportTable t{"proc", {"system", "metric", "k", "actual", "proc", "percent_proc", "headroom", "valid_queries"}, {}};
  auto j = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (const auto& [sys, rows] : by_system)
    for (const auto& s : summarize_ceilings(rows))
      t.rows.push_back({sys, s.metric, s.k, j(s.actual), j(s.ceiling), j(s.percent_proc),
                        s.headroom ? json(to_string(*s.headroom)) : json(nullptr), s.valid_count});
  report.tables.push_back(std::move(t));
  emit(report, format);
  return 0;
}

int cmd_merge(const Globals& g, const std::string& runs_p, const std::string& out_p, double k, std::size_t depth,
              const std::string& texts_p, std::optional<double> jaccard) {
  const auto lists = io::group_runs(io::load_records<io::RunRecord>(resolve(g, runs_p)));
  std::map<std::string, std::vector<RunList>> by_query;
  for (const auto& [key, list] : lists) by_query[key.second].push_back(list);
  std::unordered_map<std::string, std::string> texts;
  if (jaccard) {
    if (texts_p.empty()) throw InvalidInput("--jaccard needs --texts");
    texts = io::load_texts(resolve(g, texts_p));
  }
  std::vector<io::RunRecord> out;
  for (const auto& [q, ls] : by_query) {
    auto fused = rrf_merge(ls, FusionParams{k, depth});
    if (jaccard) fused = near_duplicate_suppress(fused, texts, *jaccard);
    for (auto& r : io::to_records(fused)) out.push_back(std::move(r));
  }
  const std::string dump = io::dump_records(out);
  if (out_p.empty()) std::cout << dump;
  else io::write_file(resolve(g, out_p), dump);
  return 0;
}

int cmd_prune(const Globals& g, const std::string& pools_p, const std::string& fused_p, const std::string& out_p,
              const std::vector<std::string>& budget_specs) {
  auto budgets = default_prune_budgets();
  for (const auto& spec : budget_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw InvalidInput("--budget expects grade=count or grade=inf, got '" + spec + "'");
    const int grade = std::stoi(spec.substr(0, eq));
    const std::string v = spec.substr(eq + 1);
    budgets[grade] = v == "inf" ? std::nullopt : std::optional<std::size_t>(std::stoul(v));
  }
  const auto pools = io::load_pools(resolve(g, pools_p));
  const auto fused = io::group_runs(io::load_records<io::RunRecord>(resolve(g, fused_p)));
  std::vector<io::CandidatePoolRecord> out;
  for (const auto& [key, list] : fused) {
    auto it = pools.find(key.second);
    if (it == pools.end()) continue;
    out.push_back(io::CandidatePoolRecord::from_pool(grade_bucketed_prune(it->second, list, budgets, key.first + "-pruned")));
  }
  const std::string dump = io::dump_records(out);
  if (out_p.empty()) std::cout << dump;
  else io::write_file(resolve(g, out_p), dump);
  return 0;
}

int cmd_refine(const Globals& g, const std::string& pools_p, const std::string& cand_p, const std::string& judge_kind,
               double noise, const std::string& transcript_p, const std::string& url, const std::string& out_p,
               const std::string& record_p, const RankerConfig& rc) {
  const auto pools = io::load_pools(resolve(g, pools_p));
  std::map<std::string, CandidatePool> cands;
  if (!cand_p.empty()) {
    cands = io::load_candidates(resolve(g, cand_p));
  } else {
    for (const auto& [q, p] : pools) {
      CandidatePool c{q, {}, "pool"};
      for (const auto& x : p.passages()) c.doc_ids.push_back(x.doc_id);
      cands[q] = c;
    }
  }
  std::map<std::string, std::vector<JudgedOrder>> transcripts;
  if (judge_kind == "transcript")
    for (auto& t : io::load_records<io::TranscriptRecord>(resolve(g, transcript_p)))
      transcripts[t.query_id].push_back({t.batch, t.order});
  std::vector<io::RunRecord> out;
  std::vector<io::TranscriptRecord> recorded;
  int status = 0;
  for (const auto& [q, cand] : cands) {
    const auto& full = pools.at(q);
    std::vector<GradedPassage> sub;
    for (const auto& d : cand.doc_ids)
      if (const auto* p = full.find(d)) sub.push_back(*p);
    if (sub.size() < 2) continue;
    const GradedPool pool(q, std::move(sub));
    const std::uint64_t qseed = mix_seed(g.seed, fnv1a(q));
    std::unique_ptr<Judge> judge;
    if (judge_kind == "simulated") {
      SimulatedJudgeParams params{{}, noise, qseed};
      for (const auto& p : pool.passages()) params.true_utilities[p.doc_id] = p.grade.value();
      judge = std::make_unique<SimulatedJudge>(std::move(params));
    } else if (judge_kind == "transcript") {
      judge = std::make_unique<TranscriptJudge>(transcripts[q]);
    } else {
      judge = std::make_unique<io::HttpJudge>(url);
    }
    RecordingJudge rec(*judge);
    const auto res = refine(pool, compute_weights(full), rec, rc, qseed);
    if (res.aborted) {
      std::cerr << "refine: query '" << q << "' aborted: " << res.abort_reason << "\n";
      status = 3;
    }
    std::cerr << q << ": iterations=" << res.iterations << " locks=" << res.lock_count
              << " converged=" << (res.converged ? "yes" : "no") << "\n";
    for (std::size_t i = 0; i < res.order.size(); ++i)
      out.push_back({q, res.order[i], static_cast<long long>(i + 1), res.scores.at(res.order[i]), "refined", json::object()});
    for (const auto& t : rec.transcript()) recorded.push_back({q, t.batch, t.order, json::object()});
  }
  const std::string dump = io::dump_records(out);
  if (out_p.empty()) std::cout << dump;
  else io::write_file(resolve(g, out_p), dump);
  if (!record_p.empty()) io::save_records(resolve(g, record_p), recorded);
  return status;
}

int cmd_diagnose(const Globals& g, const std::string& bundles_p, const std::string& vectors_p,
                 const std::string& provider_label, const std::vector<std::string>& ablations, double floor,
                 const std::string& format) {
  const auto bundles = io::load_records<io::BundleRecord>(resolve(g, bundles_p));
  std::unique_ptr<diag::EmbeddingProvider> owned;
  std::map<std::string, diag::RecordedVectorStore> stores;
  diag::EmbeddingProvider* provider = nullptr;
  if (provider_label == "hashing") {
    owned = std::make_unique<diag::HashingEmbedder>(256, g.seed);
    provider = owned.get();
  } else {
    if (vectors_p.empty()) throw InvalidInput("provider '" + provider_label + "' needs --vectors");
    stores = io::load_vector_stores(resolve(g, vectors_p));
    auto it = stores.find(provider_label);
    if (it == stores.end()) throw InvalidInput("no vectors recorded for provider '" + provider_label + "'");
    provider = &it->second;
  }
  diag::CachingEmbedder cache(*provider);
  std::vector<diag::AblationKind> kinds{diag::AblationKind::Base};
  if (ablations.empty()) {
    kinds.assign(diag::kAllAblations.begin(), diag::kAllAblations.end());
  } else {
    for (const auto& a : ablations)
      if (auto k = diag::parse_ablation(a); k != diag::AblationKind::Base) kinds.push_back(k);
  }
  std::map<diag::AblationKind, std::map<diag::Language, std::map<std::string, diag::MarginTriple>>> margins;
  io::Report report{"", "completed", {}, {}};
  io::ReportTable base_t{"base_margins", {"language", "provider", "delta_name", "delta_topic", "delta_both", "queries"}, {}};
  io::ReportTable delta_t{"delta_delta", {"ablation", "language", "delta_delta_percent", "mean_abs_delta", "included", "below_floor"}, {}};
  for (auto kind : kinds)
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      const auto& b = bundles[i].bundle;
      const std::uint64_t s = kind == diag::AblationKind::CasePunctPerturb ? i : mix_seed(g.seed, fnv1a(b.query_id));
      margins[kind][b.language][b.query_id] = diag::margins(diag::embed_bundle(diag::apply_ablation(b, kind, s), cache));
    }
  for (const auto& [lang, rows] : margins[diag::AblationKind::Base]) {
    double n = 0, t = 0, both = 0;
    for (const auto& [q, m] : rows) {
      n += m.delta_name;
      t += m.delta_topic;
      both += m.delta_both;
    }
    const double c = static_cast<double>(rows.size());
    base_t.rows.push_back({diag::to_string(lang), cache.label(), n / c, t / c, both / c, rows.size()});
  }
  for (auto kind : kinds) {
    if (kind == diag::AblationKind::Base) continue;
    for (const auto& [lang, base] : margins[diag::AblationKind::Base]) {
      const auto s = diag::delta_delta_percent(base, margins[kind][lang], floor);
      delta_t.rows.push_back({diag::to_string(kind), diag::to_string(lang),
                              s.mean_percent ? json(*s.mean_percent) : json(nullptr), s.mean_abs_delta, s.included,
                              s.below_floor});
    }
  }
  report.tables.push_back(std::move(base_t));
  report.tables.push_back(std::move(delta_t));
  emit(report, format);
  return 0;
}

std::vector<clq::ConfigPoint> load_points(const Globals& g, const std::string& points_p, const std::string& prices_p,
                                          std::uint64_t tokens) {
  auto points = io::load_config_points(resolve(g, points_p));
  if (!prices_p.empty()) {
    const auto sheet = io::load_price_sheet(resolve(g, prices_p));
    for (auto& p : points)
      if (p.cost.micros == 0 && sheet.rerank_per_1k.count(p.reranker))
        p.cost = clq::rerank_cost(p.k, tokens, sheet.rerank(p.reranker));
  }
  return points;
}

io::ReportTable points_table(const std::string& name, const std::vector<clq::ConfigPoint>& pts, const std::string& metric) {
  io::ReportTable t{name, {"config_id", "k", "cost", "latency_p50", metric, "efficiency"}, {}};
  for (const auto& p : pts) {
    json eff = nullptr;
    try {
      eff = clq::efficiency(p.quality, p.p50());
    } catch (const InvalidInput&) {
    }
    auto it = p.quality.find(metric);
    t.rows.push_back({p.config_id, p.k, p.cost.str(), p.p50(), it == p.quality.end() ? json(nullptr) : json(it->second), eff});
  }
  return t;
}

int cmd_clq(const Globals& g, const std::string& points_p, const std::string& prices_p, std::optional<double> slo_ms,
            const std::string& budget, const std::string& metric, bool frontier_only, const std::string& rule_s,
            std::uint64_t tokens, const std::string& format) {
  auto points = load_points(g, points_p, prices_p, tokens);
  io::Report report{"", "completed", {}, {}};
  const std::vector<std::string> objectives{metric};
  if (frontier_only) points = clq::pareto_frontier(points, objectives);
  clq::SloConstraints slo;
  slo.max_latency_ms = slo_ms;
  if (!budget.empty()) slo.max_cost = clq::Money::parse(budget);
  if (!slo.max_latency_ms && !slo.max_cost) {
    report.tables.push_back(points_table(frontier_only ? "frontier" : "points", points, metric));
  } else {
    const auto rule = !rule_s.empty() ? clq::parse_slo_rule(rule_s)
                                      : (slo.max_latency_ms ? clq::SloRule::LatencyBound : clq::SloRule::CostBound);
    const auto sel = clq::select_under_slo(points, slo, rule, metric);
    report.tables.push_back(points_table("shortlist", sel.shortlist, metric));
    if (!sel.diagnostic.empty()) report.notices.push_back(sel.diagnostic);
    for (std::size_t i = 1; i < sel.shortlist.size(); ++i)
      if (clq::within_jitter(sel.shortlist[0].p50(), sel.shortlist[i].p50()))
        report.notices.push_back("'" + sel.shortlist[i].config_id + "' is within latency jitter of '" +
                                 sel.shortlist[0].config_id + "'");
  }
  emit(report, format);
  return 0;
}

int cmd_pareto(const Globals& g, const std::string& points_p, const std::string& prices_p,
               std::vector<std::string> metrics, std::uint64_t tokens, const std::string& format) {
  const auto points = load_points(g, points_p, prices_p, tokens);
  if (metrics.empty()) metrics = clq::default_quality_objectives();
  const auto frontier = clq::pareto_frontier(points, metrics);
  io::Report report{"", "completed", {}, {}};
  report.tables.push_back(points_table("frontier", frontier, metrics.front()));
  report.notices.push_back(std::to_string(frontier.size()) + " of " + std::to_string(points.size()) +
                           " configurations are non-dominated");
  emit(report, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"raggs: set-based RAG evaluation, golden-set construction, diagnostics and CLQ analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline config (JSON)");
  app.add_option("--seed", g.seed, "Run-level seed")->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--workspace", g.workspace, "Workspace root")->envname("RAGGS_WORKSPACE");

  std::vector<std::size_t> ks{10, 30};
  std::string format = "table";
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  };

  auto* score = app.add_subcommand("score", "Score ranked lists against graded pools");
  std::string pools, runs, out, candidates, texts, transcript, url, record, bundles, vectors, provider = "hashing";
  bool per_query = false;
  score->add_option("--pools", pools)->required();
  score->add_option("--runs", runs)->required();
  score->add_option("--k", ks)->delimiter(',');
  score->add_flag("--per-query", per_query);
  add_format(score);

  auto* proc = app.add_subcommand("proc", "Pool-restricted oracle ceilings");
  std::size_t depth = 100;
  proc->add_option("--pools", pools)->required();
  proc->add_option("--runs", runs)->required();
  proc->add_option("--candidates", candidates, "Candidate pools (default: each list's own top-depth)");
  proc->add_option("--depth", depth);
  proc->add_option("--k", ks)->delimiter(',');
  add_format(proc);

  auto* merge = app.add_subcommand("merge", "Reciprocal rank fusion of per-system runs");
  double rrf_k = 60.0;
  std::optional<double> jaccard;
  merge->add_option("--runs", runs)->required();
  merge->add_option("--out", out);
  merge->add_option("--rrf-constant", rrf_k);
  merge->add_option("--depth", depth);
  merge->add_option("--texts", texts);
  merge->add_option("--jaccard", jaccard, "Near-duplicate threshold on 8-character shingles");

  auto* prune = app.add_subcommand("prune", "Grade-bucketed pruning of a fused run");
  std::vector<std::string> budget_specs;
  std::string fused;
  prune->add_option("--pools", pools)->required();
  prune->add_option("--fused", fused)->required();
  prune->add_option("--out", out);
  prune->add_option("--budget", budget_specs, "grade=count or grade=inf (repeatable)");

  auto* refine_cmd = app.add_subcommand("refine", "Plackett-Luce listwise refinement");
  std::string judge_kind = "simulated";
  double noise = 0.0;
  RankerConfig rc;
  refine_cmd->add_option("--pools", pools)->required();
  refine_cmd->add_option("--candidates", candidates);
  refine_cmd->add_option("--judge", judge_kind)->check(CLI::IsMember({"simulated", "transcript", "http"}));
  refine_cmd->add_option("--noise", noise);
  refine_cmd->add_option("--transcript", transcript);
  refine_cmd->add_option("--url", url);
  refine_cmd->add_option("--out", out);
  refine_cmd->add_option("--record", record, "Write the judge exchanges as a transcript");
  refine_cmd->add_option("--top-n", rc.top_n);
  refine_cmd->add_option("--iterations", rc.iteration_limit);
  refine_cmd->add_option("--batch-size", rc.batch_size);

  auto* diagnose = app.add_subcommand("diagnose", "Name/topic margins and ablation deltas over probe bundles");
  std::vector<std::string> ablations;
  double floor = diag::kDeltaExclusionFloor;
  diagnose->add_option("--bundles", bundles)->required();
  diagnose->add_option("--vectors", vectors);
  diagnose->add_option("--provider", provider, "'hashing' or a provider label in the vectors file");
  diagnose->add_option("--ablation", ablations);
  diagnose->add_option("--floor", floor);
  add_format(diagnose);

  auto* clq_cmd = app.add_subcommand("clq", "Cost/latency/quality selection");
  std::string points, prices, budget, quality_metric = "RA-nWG@10", rule;
  std::optional<double> slo_ms;
  bool frontier_only = false;
  std::uint64_t tokens = 500;
  clq_cmd->add_option("--points", points)->required();
  clq_cmd->add_option("--price-sheet", prices);
  clq_cmd->add_option("--slo-ms", slo_ms);
  clq_cmd->add_option("--budget", budget, "Max cost per 1,000 queries");
  clq_cmd->add_option("--quality-metric", quality_metric);
  clq_cmd->add_option("--rule", rule)->check(CLI::IsMember({"latency_bound", "cost_bound", "quality_targeted"}));
  clq_cmd->add_flag("--frontier-only", frontier_only);
  clq_cmd->add_option("--tokens-per-candidate", tokens);
  add_format(clq_cmd);

  auto* pareto = app.add_subcommand("pareto", "Pareto frontier of configuration points");
  std::vector<std::string> quality_metrics;
  pareto->add_option("--points", points)->required();
  pareto->add_option("--price-sheet", prices);
  pareto->add_option("--quality-metric", quality_metrics);
  pareto->add_option("--tokens-per-candidate", tokens);
  add_format(pareto);

  auto* report = app.add_subcommand("report", "Render a run manifest");
  std::string manifest, run_id;
  report->add_option("--manifest", manifest);
  report->add_option("--run-id", run_id);
  add_format(report);

  auto* run = app.add_subcommand("run", "Run the full pipeline from --config");
  bool no_cache = false;
  run->add_flag("--no-cache", no_cache);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*score) return cmd_score(g, pools, runs, ks, format, per_query);
    if (*proc) return cmd_proc(g, pools, runs, candidates, ks, depth, format);
    if (*merge) return cmd_merge(g, runs, out, rrf_k, depth, texts, jaccard);
    if (*prune) return cmd_prune(g, pools, fused, out, budget_specs);
    if (*refine_cmd) return cmd_refine(g, pools, candidates, judge_kind, noise, transcript, url, out, record, rc);
    if (*diagnose) return cmd_diagnose(g, bundles, vectors, provider, ablations, floor, format);
    if (*clq_cmd) return cmd_clq(g, points, prices, slo_ms, budget, quality_metric, frontier_only, rule, tokens, format);
    if (*pareto) return cmd_pareto(g, points, prices, quality_metrics, tokens, format);
    if (*report) {
      fs::path path;
      if (!manifest.empty()) path = resolve(g, manifest);
      else if (!run_id.empty()) path = fs::path(g.workspace) / io::manifest_rel_path(run_id);
      else throw InvalidInput("report needs --manifest or --run-id");
      const auto m = io::load_manifest(path);
      io::verify_manifest(m, g.workspace);
      std::cout << io::render_report(io::build_report(m, g.workspace), io::parse_report_format(format));
      return 0;
    }
    if (*run) {
      if (g.config.empty()) throw InvalidInput("run needs --config");
      auto cfg = io::load_config(resolve(g, g.config));
      const std::uint64_t seed = g.seed_set ? g.seed : cfg.seed;
      const auto m = io::run_pipeline(cfg, g.workspace, {seed, !no_cache});
      std::cout << "run " << m.run_id << " " << m.status << "\n";
      for (const auto& s : m.stages)
        std::cout << "  " << s.name << ": " << s.status << (s.error.empty() ? "" : " (" + s.error + ")") << "\n";
      std::cout << "manifest: " << (fs::path(g.workspace) / io::manifest_rel_path(m.run_id)).string() << "\n";
      return m.status == "completed" ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
