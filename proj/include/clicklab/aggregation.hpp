#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "clicklab/records.hpp"

namespace clicklab {

// Per-(query, url) sums over all requests. The label formulas consume these
// fields; nothing downstream ever looks at individual impressions again.
struct AggregatedPair {
  std::string query;
  std::string url;
  std::string title;  // from the most recent occurrence
  std::string bte;
  std::uint64_t views = 0;
  std::uint64_t clicks_total = 0;
  std::uint64_t nonlast_clicks = 0;
  std::uint64_t last_clicks = 0;
  std::uint64_t dwell_total = 0;
  std::uint64_t dwell_known = 0;
  std::uint64_t rank_sum = 0;
  std::uint64_t rank_known = 0;
};

// Flags at most one clicked impression per request as carrying the last
// click: the unique clicked impression with absent dwell if there is exactly
// one, otherwise the clicked impression with the greatest rank (rank-absent
// sorts lowest, later input order wins ties). The dataset has no click
// timestamps; absent dwell is the published signal for the last click.
std::vector<bool> designate_last_click(const Request& request);

// Field-wise sum, keeping title/bte of the operand seen later in the input.
void merge_pair(AggregatedPair& into, const AggregatedPair& from,
                std::uint64_t into_seq, std::uint64_t from_seq);

// Memory-bounded group-by-sum. Accumulates into a hash map; when the
// approximate footprint exceeds mem_budget_bytes the map is flushed to a
// sorted spill run, and finish() merges runs. Output is sorted by
// (query, url) either way, so spilling never changes the bytes produced.
class Aggregator {
 public:
  explicit Aggregator(std::uint64_t mem_budget_bytes = 0,
                      std::filesystem::path spill_dir = std::filesystem::temp_directory_path());

  void add(const Request& request, std::uint64_t first_row_seq);
  void add_pair(const std::string& key, const AggregatedPair& pair, std::uint64_t seq);

  // Merges another aggregator's in-memory state (sharded operation).
  void merge(Aggregator&& other);

  std::vector<AggregatedPair> finish();

 private:
  struct Entry {
    AggregatedPair pair;
    std::uint64_t seq = 0;  // input position of the title/bte occurrence
  };
  void spill();
  std::uint64_t approx_bytes_ = 0;
  std::uint64_t mem_budget_ = 0;
  std::filesystem::path spill_dir_;
  std::vector<std::filesystem::path> runs_;
  std::unordered_map<std::string, Entry> map_;
};

// TSV serialization of the 12 AggregatedPair fields.
std::string format_pair_line(const AggregatedPair& pair);
AggregatedPair parse_pair_line(std::string_view line, std::uint64_t row = 0);
std::vector<AggregatedPair> read_pairs(std::istream& in);
void write_pairs(std::ostream& out, const std::vector<AggregatedPair>& pairs);

inline std::string pair_key(const AggregatedPair& pair) { return pair.query + '\t' + pair.url; }

}  // namespace clicklab
