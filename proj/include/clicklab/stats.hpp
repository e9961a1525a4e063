#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clicklab/records.hpp"

namespace clicklab {

// Descriptive statistics of a click log: the request/row/click volumes, the
// dwell distribution, the clicked-rank histogram with its page steps, plus
// pair-level figures (unclicked fraction, clicks-per-pair buckets) computed
// from an internal aggregation pass.
struct LogStatistics {
  std::uint64_t rows = 0;
  std::uint64_t requests = 0;
  std::uint64_t unique_queries = 0;
  std::uint64_t clicks_total = 0;
  std::uint64_t clicked_rows = 0;
  std::uint64_t dwell_known_rows = 0;
  std::uint64_t dwell_sum = 0;
  double dwell_mean = 0.0;
  double dwell_median = 0.0;
  std::vector<std::uint64_t> clicked_rank_histogram;  // clicks by known rank
  double top3_click_fraction = 0.0;
  std::map<std::uint32_t, std::uint64_t> docs_per_query_histogram;  // distinct urls
  std::uint32_t modal_docs_per_query = 0;

  std::uint64_t aggregated_pairs = 0;
  std::uint64_t unclicked_pairs = 0;
  std::uint64_t single_click_pairs = 0;
  std::uint64_t multi_click_pairs = 0;
  double unclicked_pair_fraction = 0.0;

  std::string to_json() const;
};

class StatsCollector {
 public:
  void add(const Request& request);
  LogStatistics finish();

 private:
  LogStatistics stats_;
  std::map<std::uint32_t, std::uint64_t> dwell_histogram_;
  std::map<std::string, std::uint64_t> query_requests_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> pair_clicks_;
};

}  // namespace clicklab
