// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "raggs/clq.hpp"
#include "raggs/core/log.hpp"
#include "raggs/core/utf8.hpp"
#include "raggs/diagnostics/ablation.hpp"
#include "raggs/diagnostics/delta.hpp"
#include "raggs/diagnostics/embedding.hpp"
#include "raggs/diagnostics/stats.hpp"
#include "raggs/fusion.hpp"
#include "raggs/io/records.hpp"
#include "raggs/metrics.hpp"
#include "raggs/oracle_ceiling.hpp"
#include "raggs/pl_ranker.hpp"

namespace fs = std::filesystem;
using namespace raggs;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& s) {
    if (pass) detail += (detail.empty() ? "" : "; ") + s;
  }
};

std::string fmt(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

int failures = 0;

void run(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) o.fail("took " + fmt(secs, 2) + " s, limit " + fmt(budget_s, 0) + " s");
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------- 1 ---------

void cost_tables(Outcome& o) {
  using clq::Money;
  int cells = 0;
  const std::size_t ks[] = {50, 100, 150, 200};
  const char* full[] = {"1.25", "2.50", "3.75", "5.00"};
  const char* lite[] = {"0.50", "1.00", "1.50", "2.00"};
  for (int i = 0; i < 4; ++i) {
    const auto a = clq::rerank_cost(ks[i], 500, Money::parse("0.00005"));
    const auto b = clq::rerank_cost(ks[i], 500, Money::parse("0.00002"));
    if (a != Money::parse(full[i])) o.fail("rerank-2.5 K=" + std::to_string(ks[i]) + " gave " + a.str());
    if (b != Money::parse(lite[i])) o.fail("rerank-2.5-lite K=" + std::to_string(ks[i]) + " gave " + b.str());
    cells += 2;
  }
  const std::size_t gk[] = {10, 20, 30};
  const char* prices[] = {"1.25", "0.25", "0.05"};
  const char* table[3][3] = {{"6.25", "1.25", "0.25"}, {"12.50", "2.50", "0.50"}, {"18.75", "3.75", "0.75"}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const auto got = clq::generator_input_cost(gk[r], 500, Money::parse(prices[c]));
      if (got != Money::parse(table[r][c]))
        o.fail("generator K=" + std::to_string(gk[r]) + " price " + prices[c] + " gave " + got.str());
      ++cells;
    }
  o.note(std::to_string(cells) + " cells exact in micro-units");
}

// ---------------------------------------------------------------- 2 ---------

void efficiency_board(Outcome& o) {
  struct Row {
    double avg, ms, expect;
  };
  const Row rows[] = {{0.817, 332.9, 2.454}, {0.818, 337.2, 2.426}, {0.812, 338.8, 2.397},
                      {0.782, 330.9, 2.362}, {0.799, 339.5, 2.353}};
  std::vector<double> eff;
  for (std::size_t i = 0; i < 5; ++i) {
    const double e = clq::efficiency(rows[i].avg, rows[i].ms);
    eff.push_back(e);
    if (std::abs(e - rows[i].expect) > 0.001)
      o.fail("row " + std::to_string(i + 1) + ": " + fmt(rows[i].avg, 3) + "/" + fmt(rows[i].ms / 1000, 4) + " s = " +
             fmt(e, 5) + ", published " + fmt(rows[i].expect, 3) + " (off by " + fmt(std::abs(e - rows[i].expect), 5) +
             ")");
  }
  std::vector<std::size_t> idx(5);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return eff[a] > eff[b]; });
  for (std::size_t i = 0; i < 5; ++i)
    if (idx[i] != i) {
      o.fail("rank order differs from the published leaderboard");
      break;
    }
  o.note("efficiencies " + fmt(eff[0], 4) + ", " + fmt(eff[1], 4) + ", " + fmt(eff[2], 4) + ", " + fmt(eff[3], 4) +
         ", " + fmt(eff[4], 4) + "; rank order matches");
}

// ---------------------------------------------------------------- 3 ---------

void proc_table(Outcome& o) {
  const double pairs[4][3] = {{0.852, 1.000, 85.2}, {0.918, 0.988, 92.9}, {0.882, 1.000, 88.2}, {0.930, 0.985, 94.4}};
  std::string got;
  for (const auto& p : pairs) {
    const auto v = percent_proc(p[0], p[1]);
    if (!v) {
      o.fail("NA for " + fmt(p[0], 3) + "/" + fmt(p[1], 3));
      continue;
    }
    const double pct = *v * 100.0;
    got += (got.empty() ? "" : ", ") + fmt(pct, 2);
    if (std::abs(pct - p[2]) > 0.1) o.fail(fmt(p[0], 3) + "/" + fmt(p[1], 3) + " = " + fmt(pct, 3) + "%, expected " + fmt(p[2], 1));
  }
  o.note("%PROC " + got);
}

// ---------------------------------------------------------------- 4 ---------

double brute_ideal(const GradedPool& pool, const WeightSchedule& w, std::size_t k) {
  const auto ps = pool.passages();
  const std::size_t n = ps.size();
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) g += w[ps[i].grade];
    best = std::max(best, g);
  }
  return best;
}

void metric_invariants(Outcome& o) {
  std::mt19937_64 rng(20240601);
  const std::size_t instances = 12000;
  std::size_t na_seen = 0, fallback_seen = 0, checks = 0;
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (std::size_t t = 0; t < instances && o.pass; ++t) {
    const int n = uni(1, 12);
    const std::size_t k = static_cast<std::size_t>(uni(1, 5));
    std::vector<GradedPassage> ps;
    const int skew = uni(0, 3) == 0 ? uni(1, 3) : 0;  // a quarter of pools lack high grades
    for (int i = 0; i < n; ++i) ps.push_back({"d" + std::to_string(i), Grade(uni(1, 5 - skew)), std::nullopt});
    const GradedPool pool("q", ps);
    const auto w = compute_weights(pool);
    const std::string tag = "instance " + std::to_string(t);

    // weight ordering and fallback discipline
    if (w.used_fallback != (pool.count(5) == 0)) o.fail(tag + ": fallback flag disagrees with n5");
    if (w[5] != 1.0 || w[4] > 1.0 || w[3] > w[5] || w[2] != 0.0 || w[1] != 0.0) o.fail(tag + ": grade-5 dominance broken");
    fallback_seen += w.used_fallback;

    // random ranking: a subset of the pool plus occasional ungraded ids
    std::vector<std::string> ranking;
    for (const auto& p : ps)
      if (uni(0, 2)) ranking.push_back(p.doc_id);
    if (uni(0, 3) == 0) ranking.push_back("ungraded");
    std::shuffle(ranking.begin(), ranking.end(), rng);
    const RetrievedList list("q", ranking);

    const auto v = ra_nwg_at_k(pool, w, list, k);
    const double ideal = ideal_gain(pool, w, k);
    const double brute = brute_ideal(pool, w, k);
    ++checks;
    if (std::abs(ideal - brute) > 1e-12) o.fail(tag + ": ideal_gain " + fmt(ideal) + " vs brute force " + fmt(brute));
    if (v.has_value() != (brute > 0.0)) o.fail(tag + ": RA-nWG NA discipline");
    if (!v) ++na_seen;
    if (v && !(*v >= 0.0 && *v <= 1.0 + 1e-12)) o.fail(tag + ": RA-nWG outside [0,1]");

    const auto r4 = n_recall_at_k(pool, list, k, RecallThreshold::FourPlus);
    if (r4.has_value() != (pool.count_at_least(4) > 0)) o.fail(tag + ": N-Recall NA discipline");
    if (r4 && !(*r4 >= 0.0 && *r4 <= 1.0)) o.fail(tag + ": N-Recall outside [0,1]");

    // permutation invariance within the top-K
    auto top = std::vector<std::string>(list.top(k).begin(), list.top(k).end());
    auto rest = std::vector<std::string>(ranking.begin() + static_cast<std::ptrdiff_t>(top.size()), ranking.end());
    std::shuffle(top.begin(), top.end(), rng);
    std::vector<std::string> perm = top;
    perm.insert(perm.end(), rest.begin(), rest.end());
    const auto vp = ra_nwg_at_k(pool, w, RetrievedList("q", perm), k);
    if (v.has_value() != vp.has_value() || (v && std::abs(*v - *vp) > 1e-12)) o.fail(tag + ": not permutation invariant");

    // the pool's passage order must not matter either
    auto shuffled = ps;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto w2 = compute_weights(GradedPool("q", shuffled));
    for (int g = 1; g <= 5; ++g)
      if (w2[g] != w[g]) o.fail(tag + ": weights depend on pool order");

    // oracle set normalizes to exactly 1
    if (brute > 0.0) {
      auto sorted = ps;
      std::stable_sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) { return w[a.grade] > w[b.grade]; });
      std::vector<std::string> oracle;
      for (const auto& p : sorted) oracle.push_back(p.doc_id);
      const auto vo = ra_nwg_at_k(pool, w, RetrievedList("q", oracle), k);
      if (!vo || std::abs(*vo - 1.0) > 1e-12) o.fail(tag + ": oracle set does not score 1");
    }

    // monotone upgrade: swap a retrieved doc for an unretrieved doc of strictly higher weight
    if (v) {
      std::set<std::string> in_top(top.begin(), top.end());
      for (const auto& cand : ps) {
        if (in_top.count(cand.doc_id)) continue;
        for (std::size_t i = 0; i < top.size(); ++i) {
          const auto* cur = pool.find(top[i]);
          if ((cur ? w[cur->grade] : 0.0) >= w[cand.grade]) continue;
          auto up = top;
          up[i] = cand.doc_id;
          const auto vu = ra_nwg_at_k(pool, w, RetrievedList("q", up), k);
          if (!vu || *vu + 1e-12 < *v) o.fail(tag + ": upgrade lowered RA-nWG");
        }
      }
    }
  }
  // macro aggregation skips NA rows
  std::vector<QueryMetricRow> rows{{"a", "m", 1, 0.5}, {"b", "m", 1, std::nullopt}, {"c", "m", 1, 1.0}};
  const auto s = macro_aggregate(rows);
  if (!s.mean || std::abs(*s.mean - 0.75) > 1e-15 || s.valid_count != 2) o.fail("macro average does not skip NA");
  o.note(std::to_string(checks) + " instances (N<=12, K<=5), " + std::to_string(na_seen) + " NA, " +
         std::to_string(fallback_seen) + " fallback");
}

// ---------------------------------------------------------------- 5 ---------

void weight_spot_checks(Outcome& o) {
  auto pool_from = [](const std::array<int, 5>& counts) {
    std::vector<GradedPassage> ps;
    int id = 0;
    for (int g = 1; g <= 5; ++g)
      for (int i = 0; i < counts[g - 1]; ++i) ps.push_back({"d" + std::to_string(id++), Grade(g), std::nullopt});
    return GradedPool("q", ps);
  };
  const std::array<int, 5> worked{5, 5, 4, 4, 2};
  const auto w1 = compute_weights(pool_from(worked));
  RarityParams flat;
  flat.alpha = 0.0;
  const auto w0 = compute_weights(pool_from(worked), flat);
  if (std::abs(w1[4] - 0.25) > 1e-15 || std::abs(w1[3] - 0.05) > 1e-15)
    o.fail("worked example gave w4=" + fmt(w1[4]) + " w3=" + fmt(w1[3]));

  // Cross-check a spread of cases against the independent oracle script.
  io::json cases = io::json::array();
  std::mt19937_64 rng(7);
  std::vector<std::pair<std::array<int, 5>, RarityParams>> specs{{worked, {}}, {worked, flat}};
  for (double alpha : {0.0, 0.5, 1.0, 2.0})
    for (int i = 0; i < 40; ++i) {
      std::array<int, 5> c{};
      for (auto& x : c) x = std::uniform_int_distribution<int>(0, 6)(rng);
      if (std::accumulate(c.begin(), c.end(), 0) == 0) c[4] = 1;
      RarityParams p;
      p.alpha = alpha;
      p.cap4 = i % 3 == 0 ? 0.75 : 1.0;
      p.cap3 = i % 2 == 0 ? 0.25 : 0.2;
      specs.push_back({c, p});
    }
  for (const auto& [c, p] : specs) {
    const auto w = compute_weights(pool_from(c), p);
    cases.push_back({{"counts", c}, {"alpha", p.alpha}, {"cap4", p.cap4}, {"cap3", p.cap3},
                     {"w", {w[1], w[2], w[3], w[4], w[5]}}});
  }
  const fs::path file = fs::temp_directory_path() / ("raggs_weight_cases_" + std::to_string(::getpid()) + ".json");
  io::write_file(file, cases.dump());
  const std::string cmd = std::string(RAGGS_PYTHON) + " " + RAGGS_ORACLE_DIR "/weights_oracle.py check " + file.string() +
                          " > " + file.string() + ".log 2>&1";
  const int rc = std::system(cmd.c_str());
  std::string log = io::read_file(file.string() + ".log");
  while (!log.empty() && log.back() == '\n') log.pop_back();
  fs::remove(file);
  fs::remove(file.string() + ".log");
  if (rc != 0) o.fail("oracle script: " + log);
  o.note("worked example w4=" + fmt(w1[4], 4) + " w3=" + fmt(w1[3], 4) + ", alpha=0 w4=" + fmt(w0[4], 4) + " w3=" +
         fmt(w0[3], 4) + "; " + log.substr(log.rfind('\n') + 1));
}

// ---------------------------------------------------------------- 6 ---------

struct Trial {
  GradedPool pool;
  std::vector<std::string> truth;
  SimulatedJudgeParams params;
};

Trial make_trial(int n, std::uint64_t seed, double noise) {
  std::vector<GradedPassage> ps;
  Trial t{GradedPool("q", {}), {}, {}};
  t.params.seed = seed;
  t.params.noise_scale = noise;
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "d%02d", static_cast<int>((i * 7 + seed) % static_cast<std::uint64_t>(n)));
    ps.push_back({buf, Grade(5 - (i * 5) / n), std::nullopt});
    t.params.true_utilities[buf] = n - i;
    t.truth.push_back(buf);
  }
  t.pool = GradedPool("q", ps);
  return t;
}

void pl_recovery(Outcome& o) {
  std::size_t max_iter = 0;
  int exact = 0, total = 0;
  for (int n : {10, 20, 30})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto t = make_trial(n, seed, 0.0);
      SimulatedJudge judge(t.params);
      RankerConfig cfg;
      cfg.top_n = static_cast<std::size_t>(n);
      cfg.iteration_limit = 500;
      bool acyclic = true;
      const auto r = refine(t.pool, compute_weights(t.pool), judge, cfg, 1000 + seed, nullptr,
                            [&](const RankerState& s) { acyclic = acyclic && s.locks.acyclic(); });
      ++total;
      max_iter = std::max(max_iter, r.iterations);
      if (!acyclic) o.fail("lock graph cyclic (n=" + std::to_string(n) + ", seed " + std::to_string(seed) + ")");
      if (r.order == t.truth) ++exact;
      else o.fail("n=" + std::to_string(n) + " seed " + std::to_string(seed) + " order not recovered");
    }

  const double noise = 0.863;
  log::ScopedCapture quiet;
  int set_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto t = make_trial(30, seed, noise);
    SimulatedJudge judge(t.params);
    RankerConfig cfg;
    const auto r = refine(t.pool, compute_weights(t.pool), judge, cfg, 1000 + seed);
    std::set<std::string> a(r.top.begin(), r.top.end()), b(t.truth.begin(), t.truth.begin() + 20);
    set_ok += a == b;
  }
  if (set_ok < 19) o.fail("noisy top-20 set recovery " + std::to_string(set_ok) + "/20 < 95%");

  double tau_refine = 0.0, tau_single = 0.0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    auto t = make_trial(30, 500 + trial, noise);
    SimulatedJudge judge(t.params);
    RankerConfig cfg;
    const auto r = refine(t.pool, compute_weights(t.pool), judge, cfg, 9000 + trial);
    tau_refine += diag::kendall_tau(r.order, t.truth);
    auto single_params = t.params;
    single_params.seed = mix_seed(t.params.seed, 0xfeed);
    const auto single = simulated_judge(t.truth, single_params);
    tau_single += diag::kendall_tau(single.order, t.truth);
  }
  tau_refine /= 100.0;
  tau_single /= 100.0;
  if (tau_refine < tau_single)
    o.fail("mean tau refine " + fmt(tau_refine, 4) + " < single-shot " + fmt(tau_single, 4));
  o.note("noiseless exact " + std::to_string(exact) + "/" + std::to_string(total) + " (max " + std::to_string(max_iter) +
         " iterations); noisy set recovery " + std::to_string(set_ok) + "/20; mean tau refine " + fmt(tau_refine, 4) +
         " vs single-shot " + fmt(tau_single, 4) + "; " + std::to_string(quiet.messages().size()) +
         " cycle-closing locks refused");
}

// ---------------------------------------------------------------- 7 ---------

void rrf_arithmetic(Outcome& o) {
  RunList dense{"q", "dense", {{"a", 0}, {"b", 0}, {"c", 0}, {"d", 0}}};
  RunList sparse{"q", "sparse", {{"c", 0}, {"a", 0}, {"e", 0}, {"b", 0}}};
  // hand sums: a = 1/61 + 1/62, b = 1/62 + 1/64, c = 1/63 + 1/61, d = 1/64, e = 1/63
  const std::map<std::string, double> expect{{"a", 1.0 / 61 + 1.0 / 62}, {"b", 1.0 / 62 + 1.0 / 64},
                                             {"c", 1.0 / 63 + 1.0 / 61}, {"d", 1.0 / 64}, {"e", 1.0 / 63}};
  const std::vector<RunList> both{dense, sparse};
  const auto fused = rrf_merge(both);
  if (fused.entries.size() != 5) o.fail("fused list has " + std::to_string(fused.entries.size()) + " docs");
  double worst = 0.0;
  for (const auto& e : fused.entries) worst = std::max(worst, std::abs(e.score - expect.at(e.doc_id)));
  if (worst > 1e-12) o.fail("max score error " + std::to_string(worst));
  const std::vector<std::string> order{"a", "c", "b", "e", "d"};
  for (std::size_t i = 0; i < order.size() && i < fused.entries.size(); ++i)
    if (fused.entries[i].doc_id != order[i]) o.fail("fused order differs at rank " + std::to_string(i + 1));
  const std::vector<RunList> one{dense};
  const auto single = rrf_merge(one);
  for (std::size_t i = 0; i < dense.entries.size(); ++i)
    if (single.entries[i].doc_id != dense.entries[i].doc_id ||
        std::abs(single.entries[i].score - 1.0 / (60.0 + static_cast<double>(i + 1))) > 1e-15)
      o.fail("single-list identity broken at rank " + std::to_string(i + 1));
  char err[32];
  std::snprintf(err, sizeof err, "%.1e", worst);
  o.note(std::string("5-doc fixture max error ") + err + "; single-list identity holds");
}

// ---------------------------------------------------------------- 8 ---------

std::size_t dp_levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

bool icu_is(const char* form, const std::string& s) {
  UErrorCode st = U_ZERO_ERROR;
  const icu::Normalizer2* n = std::string(form) == "nfc" ? icu::Normalizer2::getNFCInstance(st)
                                                         : icu::Normalizer2::getNFDInstance(st);
  const bool ok = n->isNormalized(icu::UnicodeString::fromUTF8(s), st);
  return U_SUCCESS(st) && ok;
}

void ablation_suite(Outcome& o) {
  const fs::path dir = RAGGS_FIXTURE_DIR "/margins";
  const auto bundles = io::load_records<io::BundleRecord>(dir / "bundles.jsonl");
  auto stores = io::load_vector_stores(dir / "vectors.jsonl");
  std::size_t near_checks = 0, idem_checks = 0, norm_checks = 0;
  std::map<std::string, std::map<std::string, diag::MarginTriple>> base_m, mask_m;  // key: lang/provider
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const auto& b = bundles[i].bundle;
    const auto masked = diag::apply_ablation(b, diag::AblationKind::HardNameMask, 0);
    const auto& a1 = masked[diag::Slot::C1].author;
    if (a1 != masked[diag::Slot::C2a].author || a1 != masked[diag::Slot::C2b].author || a1 != masked.query.author)
      o.fail(b.query_id + ": masked author fields differ");
    if (masked[diag::Slot::C1].text != masked[diag::Slot::C2a].text)
      o.fail(b.query_id + ": masked C1/C2a texts differ");
    for (auto& [label, store] : stores) {
      const std::string cell = std::string(diag::to_string(b.language)) + "/" + label;
      base_m[cell][b.query_id] = diag::margins(diag::embed_bundle(b, store));
      mask_m[cell][b.query_id] = diag::margins(diag::embed_bundle(masked, store));
    }

    // near-miss distances against an independent DP
    const auto nm = diag::apply_ablation(b, diag::AblationKind::EditDistanceNearMiss, 11 + i);
    const auto truth = utf8::decode(b.query.author);
    const std::pair<diag::Slot, std::size_t> plan[] = {{diag::Slot::C2a, 1}, {diag::Slot::C2b, 2}, {diag::Slot::C4, 3}};
    for (auto [slot, d] : plan) {
      const auto got = dp_levenshtein(truth, utf8::decode(nm[slot].author));
      ++near_checks;
      if (got != d)
        o.fail(b.query_id + " " + diag::to_string(slot) + ": distance " + std::to_string(got) + ", wanted " + std::to_string(d));
      if (nm[slot].text.find(nm[slot].author) == std::string::npos) o.fail(b.query_id + ": near-miss not in text");
    }

    // idempotence
    const auto sd = diag::apply_ablation(b, diag::AblationKind::StripDiacritics, 0);
    if (diag::apply_ablation(sd, diag::AblationKind::StripDiacritics, 0) != sd) o.fail(b.query_id + ": strip_diacritics not idempotent");
    for (std::uint64_t cycle = 0; cycle < 3; ++cycle) {
      const auto cp = diag::apply_ablation(b, diag::AblationKind::CasePunctPerturb, cycle);
      if (diag::apply_ablation(cp, diag::AblationKind::CasePunctPerturb, cycle) != cp)
        o.fail(b.query_id + ": case_punct not idempotent (cycle " + std::to_string(cycle) + ")");
      ++idem_checks;
    }
    ++idem_checks;

    // normalization postconditions
    const auto us = diag::apply_ablation(b, diag::AblationKind::UnicodeNormalizationStress, 0);
    if (!icu_is("nfc", us.query.text)) o.fail(b.query_id + ": query not NFC");
    for (auto s : diag::kSlots) {
      if (!icu_is("nfd", us[s].text)) o.fail(b.query_id + " " + diag::to_string(s) + ": candidate not NFD");
      if (us[s].text.find(':') != std::string::npos && us[s].text.find("\u202F:") == std::string::npos)
        o.fail(b.query_id + ": narrow no-break space missing before ':'");
      ++norm_checks;
    }
  }
  double worst_name = 0.0;
  for (const auto& [cell, rows] : mask_m) {
    for (const auto& [q, m] : rows) worst_name = std::max(worst_name, std::abs(m.delta_name));
    const auto s = diag::delta_delta_percent(base_m.at(cell), rows);
    if (!s.mean_percent || std::abs(*s.mean_percent + 100.0) > 1e-9)
      o.fail(cell + ": hard-mask delta-delta " + (s.mean_percent ? fmt(*s.mean_percent, 3) : std::string("NA")) + "%");
  }
  if (worst_name != 0.0) o.fail("replayed hard-mask delta_name not exactly 0 (max " + fmt(worst_name, 12) + ")");
  o.note("hard mask: delta_name = 0, delta-delta = -100% in " + std::to_string(mask_m.size()) + " cells; " +
         std::to_string(near_checks) + " near-miss distances exact; " + std::to_string(idem_checks) +
         " idempotence and " + std::to_string(norm_checks) + " normalization checks");
}

// ---------------------------------------------------------------- 9 ---------

void margin_replay(Outcome& o) {
  const fs::path dir = RAGGS_FIXTURE_DIR "/margins";
  const auto bundles = io::load_records<io::BundleRecord>(dir / "bundles.jsonl");
  auto stores = io::load_vector_stores(dir / "vectors.jsonl");
  const std::map<std::string, std::array<double, 3>> targets{{"EN/openai-3-large", {0.175, 0.305, 0.486}},
                                                             {"EN/voyage-3.5", {0.160, 0.298, 0.464}},
                                                             {"FR/openai-3-large", {0.139, 0.260, 0.407}},
                                                             {"FR/voyage-3.5", {0.164, 0.277, 0.447}}};
  std::map<std::string, std::array<double, 4>> sums;
  for (const auto& rec : bundles)
    for (auto& [label, store] : stores) {
      const auto m = diag::margins(diag::embed_bundle(rec.bundle, store));
      auto& s = sums[std::string(diag::to_string(rec.bundle.language)) + "/" + label];
      s[0] += m.delta_name;
      s[1] += m.delta_topic;
      s[2] += m.delta_both;
      s[3] += 1;
    }
  std::string got;
  for (const auto& [cell, t] : targets) {
    auto it = sums.find(cell);
    if (it == sums.end()) {
      o.fail("no fixtures for " + cell);
      continue;
    }
    const auto& s = it->second;
    const double m[3] = {s[0] / s[3], s[1] / s[3], s[2] / s[3]};
    for (int i = 0; i < 3; ++i)
      if (std::abs(m[i] - t[i]) > 0.005) o.fail(cell + " margin " + std::to_string(i) + " = " + fmt(m[i], 4));
    got += (got.empty() ? "" : ", ") + cell + " " + fmt(m[0], 3) + "/" + fmt(m[1], 3) + "/" + fmt(m[2], 3);
  }
  o.note(got + " (synthesized fixtures)");
}

// ---------------------------------------------------------------- 10 --------

void pareto_checks(Outcome& o) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> metrics{"RA-nWG@10", "RA-nWG@30"};
  std::size_t total_points = 0, frontier_points = 0;
  for (int set = 0; set < 1000 && o.pass; ++set) {
    const int n = std::uniform_int_distribution<int>(1, 200)(rng);
    std::vector<clq::ConfigPoint> pts;
    for (int i = 0; i < n; ++i) {
      clq::ConfigPoint p;
      p.config_id = "c" + std::to_string(i);
      // coarse grids so ties and exact duplicates occur
      p.cost = clq::Money{std::uniform_int_distribution<int>(1, 12)(rng) * 250'000};
      p.latency_p50 = std::uniform_int_distribution<int>(30, 80)(rng) * 10.0;
      p.quality["RA-nWG@10"] = std::uniform_int_distribution<int>(60, 85)(rng) / 100.0;
      p.quality["RA-nWG@30"] = std::uniform_int_distribution<int>(60, 85)(rng) / 100.0;
      pts.push_back(p);
    }
    // brute force: minimize cost and latency, maximize both qualities
    std::set<std::string> brute;
    for (const auto& a : pts) {
      bool dominated = false;
      for (const auto& b : pts) {
        const bool no_worse = b.cost <= a.cost && *b.latency_p50 <= *a.latency_p50 &&
                              b.quality.at("RA-nWG@10") >= a.quality.at("RA-nWG@10") &&
                              b.quality.at("RA-nWG@30") >= a.quality.at("RA-nWG@30");
        const bool better = b.cost < a.cost || *b.latency_p50 < *a.latency_p50 ||
                            b.quality.at("RA-nWG@10") > a.quality.at("RA-nWG@10") ||
                            b.quality.at("RA-nWG@30") > a.quality.at("RA-nWG@30");
        if (no_worse && better) {
          dominated = true;
          break;
        }
      }
      if (!dominated) brute.insert(a.config_id);
    }
    auto ids = [](const std::vector<clq::ConfigPoint>& f) {
      std::set<std::string> s;
      for (const auto& p : f) s.insert(p.config_id);
      return s;
    };
    const auto f = clq::pareto_frontier(pts, metrics);
    if (ids(f) != brute) o.fail("set " + std::to_string(set) + ": frontier disagrees with brute force");
    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto fs2 = clq::pareto_frontier(shuffled, metrics);
    if (ids(fs2) != brute) o.fail("set " + std::to_string(set) + ": frontier depends on input order");
    for (std::size_t i = 0; i < f.size() && i < fs2.size(); ++i)
      if (f[i].config_id != fs2[i].config_id) o.fail("set " + std::to_string(set) + ": frontier order not canonical");
    auto dup = pts;
    for (const auto& p : pts) {
      auto c = p;
      c.config_id += "-dup";
      dup.push_back(c);
    }
    std::set<std::string> expect_dup = brute;
    for (const auto& id : brute) expect_dup.insert(id + "-dup");
    if (ids(clq::pareto_frontier(dup, metrics)) != expect_dup)
      o.fail("set " + std::to_string(set) + ": duplicating points changed the frontier");
    total_points += pts.size();
    frontier_points += brute.size();
  }

  struct Scenario {
    const char* id;
    std::size_t k;
    const char* cost;
    double ms, nr10, ra10, ra30;
  };
  const Scenario table[] = {{"Baseline", 50, "1.25", 332.9, 0.835, 0.804, 0.810},
                            {"Cost saver", 50, "0.50", 403.8, 0.710, 0.692, 0.732},
                            {"Quality push", 100, "2.50", 478.1, 0.815, 0.791, 0.828},
                            {"Efficient small-dim", 100, "2.50", 483.1, 0.822, 0.793, 0.824},
                            {"High-K check", 200, "5.00", 2931.1, 0.815, 0.792, 0.818}};
  std::vector<clq::ConfigPoint> scen;
  for (const auto& s : table) {
    clq::ConfigPoint p;
    p.config_id = s.id;
    p.k = s.k;
    p.cost = clq::Money::parse(s.cost);
    p.latency_p50 = s.ms;
    p.quality = {{"N-Recall4+@10", s.nr10}, {"RA-nWG@10", s.ra10}, {"RA-nWG@30", s.ra30}};
    scen.push_back(p);
  }
  clq::SloConstraints slo;
  slo.max_latency_ms = 500.0;
  const auto sel = clq::select_under_slo(scen, slo, clq::SloRule::LatencyBound);
  std::set<std::string> kept;
  for (const auto& p : sel.shortlist) kept.insert(p.config_id);
  if (kept.size() != 4 || kept.count("High-K check")) o.fail("SLA 500 ms filter kept the wrong rows");
  o.note("1000 random sets (" + std::to_string(total_points) + " points, " + std::to_string(frontier_points) +
         " non-dominated) agree with brute force; order and duplication invariant; SLA 500 ms drops only High-K (" +
         (sel.shortlist.empty() ? std::string("none") : sel.shortlist.front().config_id) + " leads)");
}

// ---------------------------------------------------------------- 11 --------

void statistics(Outcome& o) {
  std::vector<std::string> a;
  for (int i = 0; i < 25; ++i) a.push_back("x" + std::to_string(i));
  auto rev = a;
  std::reverse(rev.begin(), rev.end());
  if (diag::kendall_tau(a, a) != 1.0) o.fail("tau(a, a) != 1");
  if (diag::kendall_tau(a, rev) != -1.0) o.fail("tau(a, reverse a) != -1");

  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    auto b = a;
    std::shuffle(b.begin(), b.end(), rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    const double ov = diag::overlap_at_k(a, b, k);
    if (!(ov >= 0.0 && ov <= 1.0)) o.fail("overlap outside [0,1]");
    if (k <= a.size() && diag::overlap_at_k(a, a, k) != 1.0) o.fail("self overlap != 1");
    const double tau = diag::kendall_tau(a, b);
    if (!(tau >= -1.0 && tau <= 1.0)) o.fail("tau outside [-1,1]");
  }

  const int trials = 1000;
  int covered = 0;
  std::normal_distribution<double> nd(3.0, 2.0);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(100);
    for (auto& x : xs) x = nd(rng);
    const auto ci = diag::bootstrap_ci(xs, 0.95, 2000, 1000 + static_cast<std::uint64_t>(t));
    covered += ci.low <= 3.0 && 3.0 <= ci.high;
  }
  const double rate = 100.0 * covered / trials;
  if (std::abs(rate - 95.0) > 2.0) o.fail("bootstrap coverage " + fmt(rate, 1) + "%");
  o.note("tau endpoints exact; overlap bounds hold; bootstrap coverage " + fmt(rate, 1) + "% over 1000 trials");
}

}  // namespace

int main() {
  run(1, "cost-table reproduction", 1, cost_tables);
  run(2, "efficiency leaderboard", 0, efficiency_board);
  run(3, "%PROC reproduction", 0, proc_table);
  run(4, "metric invariant suite", 30, metric_invariants);
  run(5, "weight-schedule spot checks", 0, weight_spot_checks);
  run(6, "PL ranker recovery", 60, pl_recovery);
  run(7, "RRF arithmetic", 0, rrf_arithmetic);
  run(8, "ablation suite", 10, ablation_suite);
  run(9, "margin replay on recorded fixtures", 0, margin_replay);
  run(10, "Pareto correctness", 0, pareto_checks);
  run(11, "statistics", 0, statistics);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
