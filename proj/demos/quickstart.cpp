// Scores one hand-made query with the library API: rarity weights, RA-nWG,
// N-Recall and the PROC ceiling of the retrieved set.
#include <cstdio>
#include <vector>

#include "raggs/metrics.hpp"
#include "raggs/oracle_ceiling.hpp"

int main() {
  using namespace raggs;
  std::vector<GradedPassage> graded;
  const int grades[] = {5, 5, 4, 4, 4, 4, 3, 3, 3, 3, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1};
  for (int i = 0; i < 20; ++i) graded.push_back({"p" + std::to_string(i), Grade(grades[i]), std::nullopt});
  const GradedPool pool("demo", graded);
  const auto w = compute_weights(pool);
  std::printf("weights: w5=%.3f w4=%.3f w3=%.3f%s\n", w[5], w[4], w[3], w.used_fallback ? " (fallback)" : "");

  // A retriever that found one grade-5 passage, ranked late.
  const RetrievedList ranked("demo", {"p2", "p6", "p10", "p1", "p3", "p15", "p7", "p11", "p4", "p16"});
  const CandidatePool cands{"demo", {ranked.ranking().begin(), ranked.ranking().end()}, "retriever"};
  for (std::size_t k : {3, 5, 10}) {
    const auto actual = ra_nwg_at_k(pool, w, ranked, k);
    const auto ceiling = proc(pool, w, cands, k, CeilingMetric::RaNwg);
    std::printf("K=%-2zu RA-nWG=%.3f PROC=%.3f %%PROC=%.3f N-Recall4+=%.3f\n", k, *actual, *ceiling,
                *percent_proc(*actual, *ceiling), *n_recall_at_k(pool, ranked, k, RecallThreshold::FourPlus));
  }
  return 0;
}
