#include "clicklab/stats.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace clicklab {

void StatsCollector::add(const Request& request) {
  ++stats_.requests;
  ++query_requests_[request.query];
  for (const auto& imp : request.impressions) {
    ++stats_.rows;
    stats_.clicks_total += imp.clicks;
    if (imp.clicks > 0) ++stats_.clicked_rows;
    if (imp.dwell_time) {
      ++stats_.dwell_known_rows;
      stats_.dwell_sum += *imp.dwell_time;
      ++dwell_histogram_[*imp.dwell_time];
    }
    if (imp.clicks > 0 && imp.rank) {
      if (stats_.clicked_rank_histogram.size() <= *imp.rank) {
        stats_.clicked_rank_histogram.resize(*imp.rank + 1, 0);
      }
      stats_.clicked_rank_histogram[*imp.rank] += imp.clicks;
    }
    pair_clicks_[{imp.query, imp.url}] += imp.clicks;
  }
}

LogStatistics StatsCollector::finish() {
  stats_.unique_queries = query_requests_.size();
  if (stats_.dwell_known_rows > 0) {
    stats_.dwell_mean =
        static_cast<double>(stats_.dwell_sum) / static_cast<double>(stats_.dwell_known_rows);
    // Median from the value histogram (lower median for even counts).
    const std::uint64_t target = (stats_.dwell_known_rows + 1) / 2;
    std::uint64_t seen = 0;
    for (const auto& [value, count] : dwell_histogram_) {
      seen += count;
      if (seen >= target) {
        stats_.dwell_median = value;
        break;
      }
    }
  }
  std::uint64_t top3 = 0;
  std::uint64_t ranked_clicks = 0;
  for (std::size_t rank = 0; rank < stats_.clicked_rank_histogram.size(); ++rank) {
    ranked_clicks += stats_.clicked_rank_histogram[rank];
    if (rank < 3) top3 += stats_.clicked_rank_histogram[rank];
  }
  stats_.top3_click_fraction =
      ranked_clicks ? static_cast<double>(top3) / static_cast<double>(ranked_clicks) : 0.0;

  // Docs per query = distinct urls per query, from the pair map.
  std::map<std::string, std::uint64_t> urls_per_query;
  for (const auto& [key, clicks] : pair_clicks_) {
    ++urls_per_query[key.first];
    ++stats_.aggregated_pairs;
    if (clicks == 0) {
      ++stats_.unclicked_pairs;
    } else if (clicks == 1) {
      ++stats_.single_click_pairs;
    } else {
      ++stats_.multi_click_pairs;
    }
  }
  for (const auto& [query, urls] : urls_per_query) {
    ++stats_.docs_per_query_histogram[static_cast<std::uint32_t>(urls)];
  }
  std::uint64_t best = 0;
  for (const auto& [docs, count] : stats_.docs_per_query_histogram) {
    if (count > best) {
      best = count;
      stats_.modal_docs_per_query = docs;
    }
  }
  stats_.unclicked_pair_fraction =
      stats_.aggregated_pairs
          ? static_cast<double>(stats_.unclicked_pairs) / static_cast<double>(stats_.aggregated_pairs)
          : 0.0;
  return stats_;
}

std::string LogStatistics::to_json() const {
  nlohmann::json j;
  j["rows"] = rows;
  j["requests"] = requests;
  j["unique_queries"] = unique_queries;
  j["clicks_total"] = clicks_total;
  j["clicked_rows"] = clicked_rows;
  j["dwell_known_rows"] = dwell_known_rows;
  j["dwell_sum"] = dwell_sum;
  j["dwell_mean"] = dwell_mean;
  j["dwell_median"] = dwell_median;
  j["clicked_rank_histogram"] = clicked_rank_histogram;
  j["top3_click_fraction"] = top3_click_fraction;
  nlohmann::json docs = nlohmann::json::object();
  for (const auto& [k, v] : docs_per_query_histogram) docs[std::to_string(k)] = v;
  j["docs_per_query_histogram"] = docs;
  j["modal_docs_per_query"] = modal_docs_per_query;
  j["aggregated_pairs"] = aggregated_pairs;
  j["unclicked_pairs"] = unclicked_pairs;
  j["single_click_pairs"] = single_click_pairs;
  j["multi_click_pairs"] = multi_click_pairs;
  j["unclicked_pair_fraction"] = unclicked_pair_fraction;
  return j.dump(2);
}

}  // namespace clicklab
