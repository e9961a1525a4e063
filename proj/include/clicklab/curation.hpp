#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clicklab/records.hpp"

namespace clicklab {

struct CurationPolicy {
  std::uint32_t min_query_chars = 10;
  bool alpha_only = true;
  std::uint32_t min_unique_requests = 5;
  std::uint32_t max_unique_requests = 15;
  std::uint32_t truncate_floor_rank = 4;  // fifth position, 0-based
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Deployment hook for language/intent/content classifiers.
using QueryPredicate = std::function<bool(std::string_view)>;

bool query_eligible(std::string_view query, const CurationPolicy& policy,
                    const QueryPredicate& extra_predicate = nullptr);

// Retains impressions with rank <= max(last-click rank, floor); rank-absent
// impressions are always retained. Throws NoRankOnClicked if a clicked
// impression has no rank.
Request truncate_request(const Request& request, const CurationPolicy& policy);

// Two-pass frequency bounds. Pass 1 observes every (query, request_id);
// pass 2 asks keep(). Selection above the cap is uniform and independent of
// input order: each request id gets a score from hash(seed, query, id) and
// the cap smallest scores win.
class FrequencyBounds {
 public:
  explicit FrequencyBounds(const CurationPolicy& policy) : policy_(policy) {}

  void observe(std::string_view query, std::string_view request_id);
  void finalize();
  bool keep(std::string_view query, std::string_view request_id) const;

  // Shard-merge support: score lists are unioned, counts added.
  void merge(const FrequencyBounds& other);

 private:
  struct QueryStats {
    std::uint64_t distinct = 0;
    std::vector<std::uint64_t> smallest;  // at most cap scores, unsorted until finalize
  };
  std::uint64_t score(std::string_view query, std::string_view request_id) const;

  CurationPolicy policy_;
  std::unordered_map<std::string, QueryStats> per_query_;
  bool finalized_ = false;
};

}  // namespace clicklab
