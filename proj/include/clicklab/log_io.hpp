#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "clicklab/records.hpp"

namespace clicklab {

// Reads log rows grouped into Requests. With pre_grouped=true (the published
// layout) this is a bounded-memory stream: only the current request is
// buffered, plus an 8-byte hash per closed request id used to detect
// GroupingViolation. With pre_grouped=false the whole input is buffered and
// regrouped by request id in first-seen order.
class LogReader {
 public:
  LogReader(std::istream& in, LogSchema schema = LogSchema::standard(), bool pre_grouped = true);

  // nullopt at end of input. Requests come out normalized (ranked
  // impressions ascending, rank-absent at the tail).
  std::optional<Request> next();

  const LogSchema& schema() const { return schema_; }
  std::uint64_t rows_read() const { return row_; }

 private:
  std::optional<ImpressionRecord> next_record();
  void buffer_all();

  std::istream& in_;
  LogSchema schema_;
  bool pre_grouped_;
  bool header_checked_ = false;
  std::uint64_t row_ = 0;
  std::optional<ImpressionRecord> pending_;
  std::unordered_set<std::uint64_t> closed_ids_;
  bool exhausted_ = false;

  std::vector<Request> buffered_;
  std::size_t buffered_pos_ = 0;
  bool buffered_ready_ = false;
};

// One labeled training row: query, document text, pseudo-label, loss weight.
struct LabeledRow {
  std::string query;
  std::string url;
  std::string title;
  std::string bte;
  double label = 0.0;
  double weight = 1.0;
};

// Emits tab-separated labeled rows, label and weight with 9 significant
// digits. Byte-deterministic for a fixed input. Returns the row count.
class LabeledWriter {
 public:
  explicit LabeledWriter(std::ostream& out) : out_(out) {}
  void write(const LabeledRow& row);
  std::uint64_t count() const { return count_; }

 private:
  std::ostream& out_;
  std::uint64_t count_ = 0;
};

std::string format_labeled_row(const LabeledRow& row);
LabeledRow parse_labeled_row(std::string_view line, std::uint64_t row = 0);

// Annotated test set grouped contiguously by query.
struct TestQuery {
  std::string query;
  std::vector<AnnotatedPair> pairs;
};

class TestSetReader {
 public:
  explicit TestSetReader(std::istream& in) : in_(in) {}
  std::optional<TestQuery> next();

 private:
  std::istream& in_;
  std::uint64_t row_ = 0;
  std::optional<AnnotatedPair> pending_;
  bool exhausted_ = false;
};

std::vector<TestQuery> read_test_set(std::istream& in);

// Reads a line with the trailing '\r' stripped; false at EOF.
bool read_line(std::istream& in, std::string& line);

}  // namespace clicklab
