#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "raggs/clq.hpp"

using namespace raggs;
using namespace raggs::clq;

namespace {

ConfigPoint pt(std::string id, std::size_t k, const char* cost, double p50, double q10, double q30 = -1) {
  ConfigPoint p;
  p.config_id = std::move(id);
  p.k = k;
  p.cost = Money::parse(cost);
  p.latency_p50 = p50;
  p.quality["RA-nWG@10"] = q10;
  p.quality["RA-nWG@30"] = q30 < 0 ? q10 : q30;
  return p;
}

}  // namespace

TEST(MoneyTest, ParseAndFormat) {
  EXPECT_EQ(Money::parse("1.25").micros, 1'250'000);
  EXPECT_EQ(Money::parse("$0.00005").micros, 50);
  EXPECT_EQ(Money::parse("-3").micros, -3'000'000);
  EXPECT_EQ(Money::parse(".5").micros, 500'000);
  EXPECT_THROW(Money::parse("1.0000001"), InvalidInput);
  EXPECT_THROW(Money::parse("1."), InvalidInput);
  EXPECT_THROW(Money::parse("abc"), InvalidInput);
  EXPECT_THROW(Money::parse(""), InvalidInput);
  EXPECT_EQ(Money::parse("2").str(), "2.00");
  EXPECT_EQ(Money{50}.str(), "0.00005");
  EXPECT_EQ(Money{-1'500'000}.str(0), "-1.5");
  EXPECT_EQ(Money::parse("0.1") + Money::parse("0.2"), Money::parse("0.3"));
}

TEST(Costs, RerankAndGenerator) {
  // 50 candidates x 300 tokens x 1000 queries at 0.002 per 1k tokens = 30.00
  EXPECT_EQ(rerank_cost(50, 300, Money::parse("0.002")).str(), "30.00");
  // 10 chunks x 500 tokens x 1000 queries at 3.00 per 1M tokens = 15.00
  EXPECT_EQ(generator_input_cost(10, 500, Money::parse("3")).str(), "15.00");
  // 1 x 1 x 1 x 0.000001 / 1000 rounds half to even: 0.001 micro -> 0
  EXPECT_EQ(rerank_cost(1, 1, Money{1}, 1).micros, 0);
  EXPECT_EQ(rerank_cost(1, 500, Money{1}, 1).micros, 0);   // 0.5 -> 0
  EXPECT_EQ(rerank_cost(1, 1500, Money{1}, 1).micros, 2);  // 1.5 -> 2
  EXPECT_THROW(rerank_cost(1, 1, Money{-1}), InvalidInput);
}

TEST(Percentile, NearestRank) {
  const std::vector<double> s{5, 1, 4, 2, 3};
  EXPECT_EQ(percentile(s, 0.5), 3);
  EXPECT_EQ(percentile(s, 0.95), 5);
  EXPECT_EQ(percentile(s, 0.2), 1);
  EXPECT_EQ(percentile(s, 0.21), 2);
  EXPECT_THROW(percentile(std::vector<double>{}, 0.5), InvalidInput);
  EXPECT_THROW(percentile(s, 1.0), InvalidInput);
}

TEST(Efficiency, PerSecond) {
  const std::map<std::string, double> q{{"N-Recall4+@10", 0.8}, {"RA-nWG@10", 0.6}, {"N-Recall4+@30", 0.9},
                                        {"RA-nWG@30", 0.7}};
  EXPECT_DOUBLE_EQ(average_performance(q), 0.75);
  EXPECT_DOUBLE_EQ(efficiency(q, 500.0), 1.5);
  EXPECT_THROW(efficiency(q, 0.0), InvalidInput);
  EXPECT_THROW(average_performance({{"RA-nWG@10", 0.5}}), InvalidInput);
}

TEST(Pareto, Frontier) {
  const std::vector<ConfigPoint> pts{pt("a", 10, "1", 100, 0.5), pt("b", 20, "2", 200, 0.7),
                                     pt("c", 30, "2", 250, 0.6),   // dominated by b
                                     pt("d", 10, "1", 100, 0.5),   // duplicate of a
                                     pt("e", 40, "5", 900, 0.9)};
  const auto f = pareto_frontier(pts);
  std::vector<std::string> ids;
  for (const auto& p : f) ids.push_back(p.config_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"a", "b", "d", "e"}));
  EXPECT_TRUE(dominates(std::vector<double>{1, 1}, std::vector<double>{1, 2}));
  EXPECT_FALSE(dominates(std::vector<double>{1, 1}, std::vector<double>{1, 1}));
  EXPECT_THROW(pareto_frontier(std::vector<ConfigPoint>{}), InvalidInput);
}

TEST(Slo, RulesAndTies) {
  const std::vector<ConfigPoint> pts{pt("a", 10, "1", 100, 0.5), pt("b", 20, "2", 300, 0.7),
                                     pt("c", 15, "2", 290, 0.7), pt("d", 40, "5", 900, 0.9)};
  SloConstraints lat;
  lat.max_latency_ms = 400;
  const auto s = select_under_slo(pts, lat, SloRule::LatencyBound);
  ASSERT_EQ(s.shortlist.size(), 3u);
  EXPECT_EQ(s.shortlist[0].config_id, "c");  // tie on quality, smaller K
  EXPECT_EQ(s.shortlist[2].config_id, "a");

  SloConstraints cost;
  cost.max_cost = Money::parse("1.50");
  EXPECT_EQ(select_under_slo(pts, cost, SloRule::CostBound).shortlist.size(), 1u);

  SloConstraints qual;
  qual.min_quality["RA-nWG@10"] = 0.6;
  const auto t = select_under_slo(pts, qual, SloRule::QualityTargeted);
  ASSERT_EQ(t.shortlist.size(), 3u);
  EXPECT_EQ(t.shortlist[0].config_id, "c");
  EXPECT_EQ(t.shortlist[2].config_id, "d");

  SloConstraints none;
  none.max_latency_ms = 10;
  const auto empty = select_under_slo(pts, none, SloRule::LatencyBound);
  EXPECT_TRUE(empty.shortlist.empty());
  EXPECT_FALSE(empty.diagnostic.empty());

  EXPECT_THROW(select_under_slo(pts, SloConstraints{}, SloRule::LatencyBound), InvalidInput);
  EXPECT_THROW(select_under_slo(pts, cost, SloRule::LatencyBound), InvalidInput);
  EXPECT_EQ(parse_slo_rule("cost_bound"), SloRule::CostBound);
  EXPECT_THROW(parse_slo_rule("x"), InvalidInput);
}

TEST(Jitter, Threshold) {
  EXPECT_TRUE(within_jitter(100, 170));
  EXPECT_FALSE(within_jitter(100, 175));
}

TEST(MarginalGain, Steps) {
  const std::vector<ConfigPoint> pts{pt("k10", 10, "1", 100, 0.5), pt("k20", 20, "1", 150, 0.6),
                                     pt("k30", 30, "1", 150, 0.62)};
  const auto steps = marginal_gain(pts, "RA-nWG@10");
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_NEAR(*steps[0].per_ms, 0.1 / 50, 1e-15);
  EXPECT_FALSE(steps[1].per_ms.has_value());
  const std::vector<ConfigPoint> bad{pts[1], pts[0]};
  EXPECT_THROW(marginal_gain(bad, "RA-nWG@10"), InvalidInput);
}

TEST(Routing, DynamicK) {
  EXPECT_NEAR(dense_margin(std::vector<double>{0.5, 0.8, 0.78}), 0.02, 1e-12);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{1, 1, 1, 1}), std::log(4.0), 1e-12);
  EXPECT_EQ(shannon_entropy(std::vector<double>{3, 0}), 0.0);
  const auto t = RoutingThresholds::defaults(10);
  EXPECT_EQ(dynamic_k_route({0.05, 0.1, false}, t), 50u);
  EXPECT_EQ(dynamic_k_route({0.01, 0.1, false}, t), 100u);
  EXPECT_EQ(dynamic_k_route({0.05, 2.1, false}, t), 100u);
  EXPECT_EQ(dynamic_k_route({0.05, 0.1, true}, t), 100u);
  EXPECT_THROW(RoutingThresholds::defaults(1), InvalidInput);
}

TEST(ConfigPointTest, LatencyFromSamples) {
  ConfigPoint p;
  p.config_id = "x";
  p.latency_samples = {10, 30, 20, 40};
  EXPECT_EQ(p.p50(), 20);
  EXPECT_EQ(p.p95(), 40);
  p.quality["m"] = 1.5;
  EXPECT_THROW(p.validate(), InvalidInput);
  EXPECT_THROW(p.q("other"), InvalidInput);
}
