#include "clicklab/sampling.hpp"

#include <algorithm>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"

namespace clicklab {

std::vector<LabeledRow> sample_soft_negatives(const std::vector<std::string>& queries,
                                              const std::vector<DocEntry>& doc_pool,
                                              const NegativePolicy& policy) {
  std::vector<LabeledRow> out;
  if (policy.negatives_per_query == 0) return out;
  out.reserve(queries.size() * policy.negatives_per_query);
  const std::uint64_t base = derive_seed(policy.rng_seed, "soft-negatives");
  static const std::unordered_set<std::string> kNone;

  for (const auto& query : queries) {
    const auto it = policy.exclusion.find(query);
    const auto& observed = it == policy.exclusion.end() ? kNone : it->second;
    std::vector<std::size_t> eligible;
    eligible.reserve(doc_pool.size());
    for (std::size_t i = 0; i < doc_pool.size(); ++i) {
      if (!observed.count(doc_pool[i].url)) eligible.push_back(i);
    }
    if (eligible.size() < policy.negatives_per_query) {
      throw DataError(ErrorKind::PoolExhausted,
                      "query '" + query + "' has only " + std::to_string(eligible.size()) +
                          " eligible documents, need " +
                          std::to_string(policy.negatives_per_query));
    }
    Rng rng(derive_seed(base, fnv1a64(query)));
    // Partial Fisher-Yates: the first k slots become the sample.
    for (std::uint32_t j = 0; j < policy.negatives_per_query; ++j) {
      const std::size_t pick =
          j + static_cast<std::size_t>(rng.next_below(eligible.size() - j));
      std::swap(eligible[j], eligible[pick]);
      const DocEntry& doc = doc_pool[eligible[j]];
      out.push_back(LabeledRow{query, doc.url, doc.title, doc.bte, 0.0, 1.0});
    }
  }
  return out;
}

std::vector<Batch> build_batches(std::vector<TrainingPair> pairs, std::size_t batch_size,
                                 std::uint64_t rng_seed) {
  if (batch_size == 0) {
    throw DataError(ErrorKind::InvariantViolation, "batch size must be >= 1");
  }
  Rng rng(derive_seed(rng_seed, "batch-shuffle"));
  for (std::size_t i = pairs.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(pairs[i - 1], pairs[j]);
  }

  std::vector<Batch> batches;
  std::vector<bool> used(pairs.size(), false);
  std::size_t remaining = pairs.size();
  std::size_t cursor = 0;
  while (remaining > 0) {
    Batch batch;
    std::unordered_set<std::string> queries_in_batch;
    while (cursor < pairs.size() && used[cursor]) ++cursor;
    for (std::size_t i = cursor; i < pairs.size() && batch.size() < batch_size; ++i) {
      if (used[i]) continue;
      if (queries_in_batch.count(pairs[i].query)) continue;  // defer duplicate query
      queries_in_batch.insert(pairs[i].query);
      used[i] = true;
      --remaining;
      batch.push_back(std::move(pairs[i]));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace clicklab
