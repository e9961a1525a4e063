#include "clicklab/aggregation.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "clicklab/errors.hpp"
#include "clicklab/log_io.hpp"
#include "clicklab/rng.hpp"
#include "clicklab/text.hpp"

namespace clicklab {

std::vector<bool> designate_last_click(const Request& request) {
  std::vector<bool> last(request.impressions.size(), false);
  std::size_t missing_dwell_clicked = std::string::npos;
  std::size_t missing_dwell_count = 0;
  std::size_t best = std::string::npos;
  std::int64_t best_rank = -2;
  for (std::size_t i = 0; i < request.impressions.size(); ++i) {
    const auto& imp = request.impressions[i];
    if (imp.clicks == 0) continue;
    if (!imp.dwell_time) {
      missing_dwell_clicked = i;
      ++missing_dwell_count;
    }
    const std::int64_t rank = imp.rank ? static_cast<std::int64_t>(*imp.rank) : -1;
    if (rank >= best_rank) {  // >= so later input order wins ties
      best_rank = rank;
      best = i;
    }
  }
  if (best == std::string::npos) return last;  // no clicks at all
  last[missing_dwell_count == 1 ? missing_dwell_clicked : best] = true;
  return last;
}

void merge_pair(AggregatedPair& into, const AggregatedPair& from,
                std::uint64_t into_seq, std::uint64_t from_seq) {
  into.views += from.views;
  into.clicks_total += from.clicks_total;
  into.nonlast_clicks += from.nonlast_clicks;
  into.last_clicks += from.last_clicks;
  into.dwell_total += from.dwell_total;
  into.dwell_known += from.dwell_known;
  into.rank_sum += from.rank_sum;
  into.rank_known += from.rank_known;
  if (from_seq >= into_seq) {
    into.title = from.title;
    into.bte = from.bte;
  }
}

Aggregator::Aggregator(std::uint64_t mem_budget_bytes, std::filesystem::path spill_dir)
    : mem_budget_(mem_budget_bytes), spill_dir_(std::move(spill_dir)) {}

void Aggregator::add(const Request& request, std::uint64_t first_row_seq) {
  const std::vector<bool> last = designate_last_click(request);
  for (std::size_t i = 0; i < request.impressions.size(); ++i) {
    const auto& imp = request.impressions[i];
    AggregatedPair delta;
    delta.query = imp.query;
    delta.url = imp.url;
    delta.title = imp.title;
    delta.bte = imp.bte;
    delta.views = 1;
    delta.clicks_total = imp.clicks;
    if (last[i]) {
      // At most one click per request can be final.
      delta.last_clicks = 1;
      delta.nonlast_clicks = imp.clicks - 1;
    } else {
      delta.nonlast_clicks = imp.clicks;
    }
    if (imp.dwell_time) {
      delta.dwell_total = *imp.dwell_time;
      delta.dwell_known = 1;
    }
    if (imp.rank) {
      delta.rank_sum = *imp.rank;
      delta.rank_known = 1;
    }
    add_pair(imp.query + '\t' + imp.url, delta, first_row_seq + i);
  }
}

void Aggregator::add_pair(const std::string& key, const AggregatedPair& pair, std::uint64_t seq) {
  auto it = map_.find(key);
  if (it == map_.end()) {
    approx_bytes_ += key.size() * 2 + pair.title.size() + pair.bte.size() + 160;
    map_.emplace(key, Entry{pair, seq});
  } else {
    merge_pair(it->second.pair, pair, it->second.seq, seq);
    it->second.seq = std::max(it->second.seq, seq);
  }
  if (mem_budget_ > 0 && approx_bytes_ > mem_budget_) spill();
}

void Aggregator::merge(Aggregator&& other) {
  for (auto& [key, entry] : other.map_) {
    auto it = map_.find(key);
    if (it == map_.end()) {
      approx_bytes_ += key.size() * 2 + entry.pair.title.size() + entry.pair.bte.size() + 160;
      map_.emplace(key, std::move(entry));
    } else {
      merge_pair(it->second.pair, entry.pair, it->second.seq, entry.seq);
      it->second.seq = std::max(it->second.seq, entry.seq);
    }
  }
  for (auto& run : other.runs_) runs_.push_back(std::move(run));
  other.map_.clear();
  other.runs_.clear();
  other.approx_bytes_ = 0;
  if (mem_budget_ > 0 && approx_bytes_ > mem_budget_) spill();
}

namespace {

std::string spill_line(const AggregatedPair& pair, std::uint64_t seq) {
  return format_pair_line(pair) + '\t' + std::to_string(seq);
}

std::pair<AggregatedPair, std::uint64_t> parse_spill_line(std::string_view line) {
  const auto tab = line.rfind('\t');
  if (tab == std::string_view::npos) throw InternalError("corrupt spill run");
  AggregatedPair pair = parse_pair_line(line.substr(0, tab));
  std::uint64_t seq = 0;
  const auto tail = line.substr(tab + 1);
  std::from_chars(tail.data(), tail.data() + tail.size(), seq);
  return {std::move(pair), seq};
}

}  // namespace

void Aggregator::spill() {
  std::vector<std::pair<std::string, const Entry*>> sorted;
  sorted.reserve(map_.size());
  for (const auto& [key, entry] : map_) sorted.emplace_back(key, &entry);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto path = spill_dir_ / ("clicklab-spill-" + std::to_string(::getpid()) + "-" +
                                  std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
                                  std::to_string(runs_.size()) + ".tsv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(ErrorKind::Io, "cannot create spill file " + path.string());
  for (const auto& [key, entry] : sorted) out << spill_line(entry->pair, entry->seq) << '\n';
  out.flush();
  if (!out) throw DataError(ErrorKind::Io, "write failed on spill file " + path.string());
  runs_.push_back(path);
  map_.clear();
  approx_bytes_ = 0;
}

std::vector<AggregatedPair> Aggregator::finish() {
  std::vector<std::pair<std::string, Entry>> sorted;
  sorted.reserve(map_.size());
  for (auto& [key, entry] : map_) sorted.emplace_back(key, std::move(entry));
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  map_.clear();
  approx_bytes_ = 0;

  if (runs_.empty()) {
    std::vector<AggregatedPair> out;
    out.reserve(sorted.size());
    for (auto& [key, entry] : sorted) out.push_back(std::move(entry.pair));
    return out;
  }

  // K-way merge of the sorted spill runs plus the residual in-memory run.
  struct Source {
    std::ifstream file;
    std::size_t mem_pos = 0;
    bool is_mem = false;
    std::optional<std::pair<AggregatedPair, std::uint64_t>> head;
    std::string head_key;
  };
  std::vector<Source> sources(runs_.size() + 1);
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    sources[i].file.open(runs_[i], std::ios::binary);
    if (!sources[i].file) throw DataError(ErrorKind::Io, "cannot reopen spill " + runs_[i].string());
  }
  sources.back().is_mem = true;

  const auto advance = [&](Source& src) {
    src.head.reset();
    if (src.is_mem) {
      if (src.mem_pos < sorted.size()) {
        auto& [key, entry] = sorted[src.mem_pos++];
        src.head = {std::move(entry.pair), entry.seq};
        src.head_key = key;
      }
    } else {
      std::string line;
      if (std::getline(src.file, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        src.head = parse_spill_line(line);
        src.head_key = pair_key(src.head->first);
      }
    }
  };
  for (auto& src : sources) advance(src);

  std::vector<AggregatedPair> out;
  for (;;) {
    const std::string* min_key = nullptr;
    for (auto& src : sources) {
      if (src.head && (!min_key || src.head_key < *min_key)) min_key = &src.head_key;
    }
    if (!min_key) break;
    const std::string key = *min_key;
    AggregatedPair merged;
    std::uint64_t merged_seq = 0;
    bool first = true;
    for (auto& src : sources) {
      while (src.head && src.head_key == key) {
        if (first) {
          merged = std::move(src.head->first);
          merged_seq = src.head->second;
          first = false;
        } else {
          merge_pair(merged, src.head->first, merged_seq, src.head->second);
          merged_seq = std::max(merged_seq, src.head->second);
        }
        advance(src);
      }
    }
    out.push_back(std::move(merged));
  }
  for (const auto& run : runs_) {
    std::error_code ec;
    std::filesystem::remove(run, ec);
  }
  runs_.clear();
  return out;
}

std::string format_pair_line(const AggregatedPair& pair) {
  std::string out;
  out.reserve(pair.query.size() + pair.url.size() + pair.title.size() + pair.bte.size() + 64);
  out += pair.query;
  out.push_back('\t');
  out += pair.url;
  out.push_back('\t');
  out += pair.title;
  out.push_back('\t');
  out += pair.bte;
  for (std::uint64_t v : {pair.views, pair.clicks_total, pair.nonlast_clicks, pair.last_clicks,
                          pair.dwell_total, pair.dwell_known, pair.rank_sum, pair.rank_known}) {
    out.push_back('\t');
    out += std::to_string(v);
  }
  return out;
}

AggregatedPair parse_pair_line(std::string_view line, std::uint64_t row) {
  const auto fields = split_tsv(line);
  if (fields.size() != 12) {
    throw DataError(ErrorKind::MalformedLine,
                    "expected 12 tab-separated fields, got " + std::to_string(fields.size()), row);
  }
  AggregatedPair pair;
  pair.query = fields[0];
  pair.url = fields[1];
  pair.title = fields[2];
  pair.bte = fields[3];
  std::uint64_t* const numeric[8] = {&pair.views,       &pair.clicks_total, &pair.nonlast_clicks,
                                     &pair.last_clicks, &pair.dwell_total,  &pair.dwell_known,
                                     &pair.rank_sum,    &pair.rank_known};
  static const char* names[8] = {"views",       "clicks_total", "nonlast_clicks", "last_clicks",
                                 "dwell_total", "dwell_known",  "rank_sum",       "rank_known"};
  for (std::size_t i = 0; i < 8; ++i) {
    const auto field = fields[4 + i];
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), *numeric[i]);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw DataError(ErrorKind::FieldParse,
                      std::string(names[i]) + " is not a non-negative integer: '" +
                          std::string(field) + "'",
                      row);
    }
  }
  if (pair.clicks_total != pair.nonlast_clicks + pair.last_clicks) {
    throw DataError(ErrorKind::InvariantViolation,
                    "clicks_total != nonlast_clicks + last_clicks", row);
  }
  if (pair.views == 0 || pair.dwell_known > pair.views || pair.rank_known > pair.views) {
    throw DataError(ErrorKind::InvariantViolation, "view counters inconsistent", row);
  }
  return pair;
}

std::vector<AggregatedPair> read_pairs(std::istream& in) {
  std::vector<AggregatedPair> pairs;
  std::string line;
  std::uint64_t row = 0;
  while (read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    pairs.push_back(parse_pair_line(line, row));
  }
  return pairs;
}

void write_pairs(std::ostream& out, const std::vector<AggregatedPair>& pairs) {
  for (const auto& pair : pairs) out << format_pair_line(pair) << '\n';
  if (!out) throw DataError(ErrorKind::Io, "write failed");
}

}  // namespace clicklab
