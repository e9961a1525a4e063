#include "clicklab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"

namespace clicklab {

namespace {

std::vector<std::size_t> order_by_score(const RankedQuery& rq) {
  std::vector<std::size_t> order(rq.items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rq.items[a].model_score != rq.items[b].model_score) {
      return rq.items[a].model_score > rq.items[b].model_score;
    }
    return rq.items[a].url < rq.items[b].url;  // deterministic tie break
  });
  return order;
}

double dcg_at_10(const std::vector<int>& gains) {
  double dcg = 0.0;
  const std::size_t depth = std::min<std::size_t>(10, gains.size());
  for (std::size_t i = 0; i < depth; ++i) {
    dcg += static_cast<double>(gains[i]) / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

}  // namespace

double ndcg_at_10(const RankedQuery& rq) {
  if (rq.items.empty()) {
    throw DataError(ErrorKind::DegenerateInput, "query '" + rq.query + "' has no items");
  }
  const auto order = order_by_score(rq);
  std::vector<int> gains;
  gains.reserve(order.size());
  for (std::size_t index : order) {
    gains.push_back(rq.items[index].gold_label > kRelevanceThreshold ? 1 : 0);
  }
  const double dcg = dcg_at_10(gains);
  std::vector<int> ideal = gains;
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  const double idcg = dcg_at_10(ideal);
  if (idcg <= 0.0) return 0.0;
  return dcg / idcg;
}

double precision_at_10(const RankedQuery& rq) {
  if (rq.items.empty()) {
    throw DataError(ErrorKind::DegenerateInput, "query '" + rq.query + "' has no items");
  }
  const auto order = order_by_score(rq);
  const std::size_t depth = std::min<std::size_t>(10, order.size());
  int relevant = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (rq.items[order[i]].gold_label > kRelevanceThreshold) ++relevant;
  }
  return static_cast<double>(relevant) / 10.0;
}

namespace {

// Average ranks, 1-based; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw DataError(ErrorKind::DegenerateInput, "constant input vector");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw DataError(ErrorKind::ShapeMismatch, "input lengths differ");
  }
  if (xs.size() < 2) {
    throw DataError(ErrorKind::DegenerateInput, "need at least 2 observations");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

double mc_permutation_test(std::span<const double> per_query_a, std::span<const double> per_query_b,
                           std::uint64_t samples, std::uint64_t seed, int threads) {
  if (per_query_a.size() != per_query_b.size()) {
    throw DataError(ErrorKind::ShapeMismatch, "paired lists must have equal length");
  }
  if (per_query_a.empty() || samples < 1) {
    throw DataError(ErrorKind::DegenerateInput, "need pairs and at least one sample");
  }
  const std::size_t n = per_query_a.size();
  std::vector<double> diffs(n);
  for (std::size_t i = 0; i < n; ++i) diffs[i] = per_query_a[i] - per_query_b[i];
  const double observed =
      std::abs(std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(n));

  const std::uint64_t perm_seed = derive_seed(seed, "mc-permutation");
  const auto count_range = [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t hits = 0;
    for (std::uint64_t s = begin; s < end; ++s) {
      Rng rng(derive_seed(perm_seed, s));
      double sum = 0.0;
      std::uint64_t bits = 0;
      int available = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (available == 0) {
          bits = rng.next_u64();
          available = 64;
        }
        sum += (bits & 1) ? diffs[i] : -diffs[i];
        bits >>= 1;
        --available;
      }
      if (std::abs(sum / static_cast<double>(n)) >= observed) ++hits;
    }
    return hits;
  };

  std::uint64_t hits = 0;
  if (threads <= 1) {
    hits = count_range(0, samples);
  } else {
    const auto workers = static_cast<std::uint64_t>(threads);
    std::vector<std::future<std::uint64_t>> futures;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = samples * w / workers;
      const std::uint64_t end = samples * (w + 1) / workers;
      futures.push_back(std::async(std::launch::async, count_range, begin, end));
    }
    for (auto& f : futures) hits += f.get();
  }
  return static_cast<double>(1 + hits) / static_cast<double>(samples + 1);
}

double random_baseline(const std::vector<RankedQuery>& test_set, std::uint64_t trials,
                       std::uint64_t seed) {
  if (test_set.empty() || trials == 0) {
    throw DataError(ErrorKind::DegenerateInput, "empty test set or zero trials");
  }
  const std::uint64_t base = derive_seed(seed, "random-baseline");
  double total = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double per_trial = 0.0;
    for (std::size_t q = 0; q < test_set.size(); ++q) {
      Rng rng(derive_seed(base, t * 0x10001ULL + q));
      RankedQuery shuffled = test_set[q];
      for (auto& item : shuffled.items) item.model_score = rng.next_double();
      per_trial += ndcg_at_10(shuffled);
    }
    total += per_trial / static_cast<double>(test_set.size());
  }
  return total / static_cast<double>(trials);
}

double oracle_baseline(const std::vector<RankedQuery>& test_set) {
  if (test_set.empty()) {
    throw DataError(ErrorKind::DegenerateInput, "empty test set");
  }
  double total = 0.0;
  for (const auto& rq : test_set) {
    RankedQuery oracle = rq;
    for (auto& item : oracle.items) item.model_score = item.gold_label;
    total += ndcg_at_10(oracle);
  }
  return total / static_cast<double>(test_set.size());
}

std::vector<SchemeCorrelation> correlation_report(std::span<const AggregatedPair> pairs,
                                                  std::span<const double> gold,
                                                  const LabelConfig& base_cfg) {
  if (pairs.size() != gold.size()) {
    throw DataError(ErrorKind::ShapeMismatch, "pairs and gold labels must align");
  }
  if (pairs.empty()) {
    throw DataError(ErrorKind::DegenerateInput, "empty join");
  }

  LabelConfig zero_cfg = base_cfg;
  zero_cfg.dwell_missing = LabelConfig::DwellMissing::Zero;
  LabelConfig mean_cfg = base_cfg;
  mean_cfg.dwell_missing = LabelConfig::DwellMissing::GlobalMean;
  mean_cfg.global_mean_dwell = corpus_mean_dwell(pairs);
  if (!mean_cfg.global_mean_dwell) mean_cfg.global_mean_dwell = 0.0;  // no dwell anywhere

  struct Scheme {
    const char* name;
    LabelFormula formula;
    const LabelConfig* cfg;
  };
  const Scheme schemes[] = {
      {"rank", LabelFormula::Rank, &base_cfg},
      {"dwell_zero", LabelFormula::Dwell, &zero_cfg},
      {"clicks", LabelFormula::Clicks, &base_cfg},
      {"dwell_mean", LabelFormula::Dwell, &mean_cfg},
      {"clickdwellrank", LabelFormula::ClickDwellRank, &base_cfg},
  };

  std::vector<SchemeCorrelation> report;
  std::vector<double> labels(pairs.size());
  for (const auto& scheme : schemes) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      labels[i] = label_for(scheme.formula, pairs[i], *scheme.cfg);
    }
    // A degenerate scheme (e.g. constant labels on an all-unclicked corpus)
    // is reported as NaN rather than aborting the other rows.
    double rho;
    try {
      rho = spearman(labels, gold);
    } catch (const DataError& e) {
      if (e.kind() != ErrorKind::DegenerateInput) throw;
      rho = std::numeric_limits<double>::quiet_NaN();
    }
    report.push_back({scheme.name, rho});
  }
  return report;
}

}  // namespace clicklab
