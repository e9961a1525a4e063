#include "clicklab/curation.hpp"

#include <algorithm>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"
#include "clicklab/text.hpp"

namespace clicklab {

void CurationPolicy::validate() const {
  if (min_query_chars < 1) {
    throw DataError(ErrorKind::InvariantViolation, "min_query_chars must be >= 1");
  }
  if (min_unique_requests == 0 || min_unique_requests > max_unique_requests) {
    throw DataError(ErrorKind::InvariantViolation,
                    "need 0 < min_unique_requests <= max_unique_requests");
  }
}

bool query_eligible(std::string_view query, const CurationPolicy& policy,
                    const QueryPredicate& extra_predicate) {
  std::size_t chars = 0;
  std::size_t offset = 0;
  while (offset < query.size()) {
    const auto cp = decode_utf8(query, offset);
    if (!cp) return false;  // not valid UTF-8, never eligible
    ++chars;
    if (policy.alpha_only && *cp != U' ' && !is_letter(*cp)) return false;
  }
  if (chars < policy.min_query_chars) return false;
  if (extra_predicate && !extra_predicate(query)) return false;
  return true;
}

Request truncate_request(const Request& request, const CurationPolicy& policy) {
  std::int64_t last_click_rank = -1;
  for (const auto& impression : request.impressions) {
    if (impression.clicks == 0) continue;
    if (!impression.rank) {
      throw DataError(ErrorKind::NoRankOnClicked,
                      "clicked impression without rank in request '" + request.request_id + "'");
    }
    last_click_rank = std::max(last_click_rank, static_cast<std::int64_t>(*impression.rank));
  }
  // With no clicks the last-click term drops out and the floor alone applies.
  const std::int64_t cutoff =
      std::max(last_click_rank, static_cast<std::int64_t>(policy.truncate_floor_rank));
  Request out;
  out.request_id = request.request_id;
  out.query = request.query;
  for (const auto& impression : request.impressions) {
    if (!impression.rank || static_cast<std::int64_t>(*impression.rank) <= cutoff) {
      out.impressions.push_back(impression);
    }
  }
  return out;
}

std::uint64_t FrequencyBounds::score(std::string_view query, std::string_view request_id) const {
  std::uint64_t h = fnv1a64(query, derive_seed(policy_.rng_seed, "frequency-bounds"));
  h = fnv1a64("\x1f", h);  // separator so (q, id) boundaries can't alias
  h = fnv1a64(request_id, h);
  return splitmix64(h);
}

void FrequencyBounds::observe(std::string_view query, std::string_view request_id) {
  auto& stats = per_query_[std::string(query)];
  ++stats.distinct;
  const std::uint64_t s = score(query, request_id);
  const std::size_t cap = policy_.max_unique_requests;
  if (stats.smallest.size() < cap) {
    stats.smallest.push_back(s);
    std::push_heap(stats.smallest.begin(), stats.smallest.end());
  } else if (s < stats.smallest.front()) {
    std::pop_heap(stats.smallest.begin(), stats.smallest.end());
    stats.smallest.back() = s;
    std::push_heap(stats.smallest.begin(), stats.smallest.end());
  }
}

void FrequencyBounds::merge(const FrequencyBounds& other) {
  for (const auto& [query, stats] : other.per_query_) {
    auto& mine = per_query_[query];
    mine.distinct += stats.distinct;
    for (std::uint64_t s : stats.smallest) {
      const std::size_t cap = policy_.max_unique_requests;
      if (mine.smallest.size() < cap) {
        mine.smallest.push_back(s);
        std::push_heap(mine.smallest.begin(), mine.smallest.end());
      } else if (s < mine.smallest.front()) {
        std::pop_heap(mine.smallest.begin(), mine.smallest.end());
        mine.smallest.back() = s;
        std::push_heap(mine.smallest.begin(), mine.smallest.end());
      }
    }
  }
}

void FrequencyBounds::finalize() {
  for (auto& [query, stats] : per_query_) {
    std::sort(stats.smallest.begin(), stats.smallest.end());
  }
  finalized_ = true;
}

bool FrequencyBounds::keep(std::string_view query, std::string_view request_id) const {
  if (!finalized_) throw InternalError("FrequencyBounds::keep before finalize");
  const auto it = per_query_.find(std::string(query));
  if (it == per_query_.end()) return false;
  const QueryStats& stats = it->second;
  if (stats.distinct < policy_.min_unique_requests) return false;
  if (stats.distinct <= policy_.max_unique_requests) return true;
  const std::uint64_t s = score(query, request_id);
  return std::binary_search(stats.smallest.begin(), stats.smallest.end(), s);
}

}  // namespace clicklab
