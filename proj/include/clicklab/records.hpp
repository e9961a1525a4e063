#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clicklab {

// One row of the click log. rank and dwell_time are optional: an absent rank
// means the document was no longer indexed, an absent dwell typically marks
// the last click of the request.
struct ImpressionRecord {
  std::string request_id;
  std::string query;
  std::string url;
  std::string title;
  std::string bte;  // body text extract, at most 230 code points
  std::optional<std::uint32_t> rank;
  std::uint32_t clicks = 0;
  std::optional<std::uint32_t> dwell_time;

  bool operator==(const ImpressionRecord&) const = default;
};

// All impressions of a single request. Impressions with known ranks are kept
// sorted ascending by rank; rank-absent impressions follow in input order.
struct Request {
  std::string request_id;
  std::string query;
  std::vector<ImpressionRecord> impressions;

  // Re-establishes the ordering invariant (stable on ties).
  void normalize();
};

struct AnnotatedPair {
  std::string query;
  std::string url;
  std::string doc_text;  // at most 230 code points
  double label = 0.0;    // in [0, 1]
};

// Column order of the log TSV. The default matches the published layout; a
// header row (detected by the literal "requestId") overrides it.
enum class LogColumn : std::uint8_t { RequestId, Query, Url, Title, Bte, Rank, Clicks, DwellTime };

constexpr std::size_t kLogColumnCount = 8;
constexpr std::size_t kBteMaxChars = 230;

struct LogSchema {
  std::array<LogColumn, kLogColumnCount> order;

  static LogSchema standard();
  // Parses a comma-separated column list, e.g. a CLI flag or a header row.
  // Throws DataError(MalformedLine) unless it is a permutation of the eight
  // known column names.
  static LogSchema from_names(std::string_view comma_separated);
  static bool looks_like_header(std::string_view line);

  std::string names() const;
};

// Parses one tab-separated log line. `row` is the 1-based line number used
// in error messages. Validates UTF-8, field invariants, and integer ranges.
ImpressionRecord parse_log_line(std::string_view line, const LogSchema& schema, std::uint64_t row = 0);

// Inverse of parse_log_line; writes fields in schema order. Optional fields
// that are absent become empty strings.
std::string format_log_line(const ImpressionRecord& record, const LogSchema& schema);

// Parses one test-set line: query <tab> url <tab> doc <tab> label.
AnnotatedPair parse_test_set_line(std::string_view line, std::uint64_t row = 0);

}  // namespace clicklab
