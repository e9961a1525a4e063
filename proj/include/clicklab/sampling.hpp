#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "clicklab/log_io.hpp"

namespace clicklab {

struct DocEntry {
  std::string url;
  std::string title;
  std::string bte;
};

struct NegativePolicy {
  std::uint32_t negatives_per_query = 1;
  std::uint64_t rng_seed = 0;
  // Observed (query, url) pairs; sampled negatives never collide with these.
  std::unordered_map<std::string, std::unordered_set<std::string>> exclusion;
};

// For each query, exactly k documents drawn uniformly without replacement
// from the pool minus the documents observed with that query. Output rows
// carry label 0 and weight 1. Per-query seeds are derived from
// (seed, hash(query)), so queries can be processed in any order or
// in parallel with identical results.
std::vector<LabeledRow> sample_soft_negatives(const std::vector<std::string>& queries,
                                              const std::vector<DocEntry>& doc_pool,
                                              const NegativePolicy& policy);

struct TrainingPair {
  std::string query;
  std::string doc_text;
  double label = 0.0;
  double weight = 1.0;
};

using Batch = std::vector<TrainingPair>;

// Seeded shuffle, then greedy batch fill under the constraint that all
// queries within a batch are distinct (in-batch negatives must be true
// negatives). Pairs whose query already occurs in the open batch are
// deferred to a later one; the final short batch is emitted as-is.
std::vector<Batch> build_batches(std::vector<TrainingPair> pairs, std::size_t batch_size,
                                 std::uint64_t rng_seed);

}  // namespace clicklab
