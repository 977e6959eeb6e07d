#include <gtest/gtest.h>

#include <string>
#include <unordered_map>
#include <vector>

#include "raggs/core/log.hpp"
#include "raggs/fusion.hpp"

using namespace raggs;

namespace {

RunList run(const std::string& system, const std::vector<std::string>& ids) {
  RunList r{"q", system, {}};
  double s = 1.0;
  for (const auto& d : ids) r.entries.push_back({d, s -= 0.01});
  return r;
}

std::vector<std::string> ids(const RunList& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.doc_id);
  return out;
}

}  // namespace

TEST(Rrf, HandComputedScores) {
  const std::vector<RunList> lists{run("dense", {"a", "b", "c"}), run("sparse", {"c", "a"})};
  const auto fused = rrf_merge(lists);
  EXPECT_EQ(ids(fused), (std::vector<std::string>{"a", "c", "b"}));
  EXPECT_DOUBLE_EQ(fused.entries[0].score, 1.0 / 61 + 1.0 / 62);
  EXPECT_DOUBLE_EQ(fused.entries[1].score, 1.0 / 63 + 1.0 / 61);
  EXPECT_DOUBLE_EQ(fused.entries[2].score, 1.0 / 62);
  EXPECT_EQ(fused.system, "fused");
}

TEST(Rrf, ListOrderDoesNotMatter) {
  const std::vector<RunList> ab{run("dense", {"a", "b", "c", "d"}), run("sparse", {"d", "c", "e"}),
                                run("other", {"e", "a"})};
  const std::vector<RunList> ba{ab[2], ab[0], ab[1]};
  const auto x = rrf_merge(ab), y = rrf_merge(ba);
  ASSERT_EQ(x.entries.size(), y.entries.size());
  for (std::size_t i = 0; i < x.entries.size(); ++i) {
    EXPECT_EQ(x.entries[i].doc_id, y.entries[i].doc_id);
    EXPECT_EQ(x.entries[i].score, y.entries[i].score);
  }
}

TEST(Rrf, TiesBreakOnDocId) {
  const std::vector<RunList> lists{run("dense", {"b"}), run("sparse", {"a"})};
  EXPECT_EQ(ids(rrf_merge(lists)), (std::vector<std::string>{"a", "b"}));
}

TEST(Rrf, DepthLimitsContributions) {
  FusionParams p;
  p.per_list_depth = 2;
  const std::vector<RunList> lists{run("dense", {"a", "b", "c"}), run("sparse", {"c", "d", "e"})};
  EXPECT_EQ(ids(rrf_merge(lists, p)), (std::vector<std::string>{"a", "c", "b", "d"}));
}

TEST(Rrf, RejectsBadInput) {
  EXPECT_THROW(rrf_merge({}), InvalidInput);
  std::vector<RunList> mixed{run("dense", {"a"}), run("sparse", {"b"})};
  mixed[1].query_id = "other";
  EXPECT_THROW(rrf_merge(mixed), InvalidInput);
  const std::vector<RunList> dup{run("dense", {"a", "a"})};
  EXPECT_THROW(rrf_merge(dup), InvalidInput);
  FusionParams p;
  p.rrf_constant = 0.0;
  const std::vector<RunList> one{run("dense", {"a"})};
  EXPECT_THROW(rrf_merge(one, p), InvalidInput);
}

TEST(Prune, DefaultBudgets) {
  std::vector<GradedPassage> ps;
  std::vector<std::string> order;
  // 3 of each grade, interleaved.
  for (int i = 0; i < 3; ++i)
    for (int g = 5; g >= 1; --g) {
      const std::string id = "g" + std::to_string(g) + "_" + std::to_string(i);
      ps.push_back({id, Grade(g), std::nullopt});
      order.push_back(id);
    }
  const GradedPool pool("q", ps);
  auto fused = run("fused", order);
  fused.entries.insert(fused.entries.begin(), {"ungraded", 9.0});
  GradeBudgets b = default_prune_budgets();
  b[3] = 1;
  b[1] = 0;
  const auto kept = grade_bucketed_prune(pool, fused, b);
  EXPECT_EQ(kept.doc_ids, (std::vector<std::string>{"g5_0", "g4_0", "g3_0", "g2_0", "g5_1", "g4_1", "g2_1", "g5_2",
                                                     "g4_2", "g2_2"}));
  EXPECT_EQ(kept.provenance_label, "pruned");
}

TEST(Dedup, DropsNearDuplicates) {
  const std::unordered_map<std::string, std::string> texts{
      {"a", "The committee approved the budget on Tuesday after a long debate."},
      {"b", "The committee approved the budget on Tuesday after a long debate!"},
      {"c", "Rainfall totals in the valley were well below the seasonal average."}};
  const auto fused = run("fused", {"a", "b", "c", "d"});
  log::ScopedCapture cap;
  const auto out = near_duplicate_suppress(fused, texts, 0.8);
  EXPECT_EQ(ids(out), (std::vector<std::string>{"a", "c", "d"}));
  ASSERT_EQ(cap.messages().size(), 1u);
  EXPECT_NE(cap.messages()[0].find("'d'"), std::string::npos);
  EXPECT_EQ(ids(near_duplicate_suppress(fused, texts, 1.0)).size(), 4u);
  EXPECT_THROW(near_duplicate_suppress(fused, texts, 0.0), InvalidInput);
}

TEST(Dedup, ShinglesCountCodePoints) {
  const auto s = detail::shingles("\xC3\xA9t\xC3\xA9", 2);  // "été"
  EXPECT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(detail::jaccard(s, s), 1.0);
  EXPECT_DOUBLE_EQ(detail::jaccard(detail::shingles("abc", 8), detail::shingles("xyz", 8)), 0.0);
}
