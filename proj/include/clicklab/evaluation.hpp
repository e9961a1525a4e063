#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clicklab/aggregation.hpp"
#include "clicklab/labeling.hpp"

namespace clicklab {

struct RankedItem {
  std::string url;
  double gold_label = 0.0;  // in [0, 1]
  double model_score = 0.0;
};

struct RankedQuery {
  std::string query;
  std::vector<RankedItem> items;
};

// An item counts as relevant when its gold label exceeds 0.5.
constexpr double kRelevanceThreshold = 0.5;

// Binary-gain NDCG over the top 10 by model score (ties broken by url
// ascending). 0 when the query has no relevant item.
double ndcg_at_10(const RankedQuery& rq);

// Relevant items among the top min(10, n), over a fixed denominator of 10.
double precision_at_10(const RankedQuery& rq);

// Spearman rank correlation: Pearson on average-rank transforms, so ties are
// handled exactly. Throws DegenerateInput on length < 2 or a constant side.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Two-sided paired sign-flip permutation test on the mean difference.
// p = (1 + #{samples with |mean| >= |observed|}) / (samples + 1).
// Per-sample seeds are derived from (seed, sample index), so the result is
// independent of how samples are scheduled across threads.
double mc_permutation_test(std::span<const double> per_query_a, std::span<const double> per_query_b,
                           std::uint64_t samples, std::uint64_t seed, int threads = 1);

// Mean NDCG@10 with uniformly random scores, averaged over trials.
double random_baseline(const std::vector<RankedQuery>& test_set, std::uint64_t trials,
                       std::uint64_t seed);

// Mean NDCG@10 when the model score is the gold label itself. Below 100% on
// graded labels because gains are binarized at the 0.5 threshold.
double oracle_baseline(const std::vector<RankedQuery>& test_set);

// One Spearman value per label scheme against gold labels, mirroring the
// behavior-vs-annotation correlation table.
struct SchemeCorrelation {
  std::string scheme;
  double rho = 0.0;
};

// Input is the join of aggregated pairs with gold labels.
std::vector<SchemeCorrelation> correlation_report(std::span<const AggregatedPair> pairs,
                                                  std::span<const double> gold,
                                                  const LabelConfig& base_cfg = LabelConfig{});

}  // namespace clicklab
