#include "clicklab/log_io.hpp"

#include <istream>
#include <map>
#include <ostream>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"
#include "clicklab/text.hpp"

namespace clicklab {

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

LogReader::LogReader(std::istream& in, LogSchema schema, bool pre_grouped)
    : in_(in), schema_(schema), pre_grouped_(pre_grouped) {}

std::optional<ImpressionRecord> LogReader::next_record() {
  std::string line;
  while (read_line(in_, line)) {
    ++row_;
    if (!header_checked_) {
      header_checked_ = true;
      if (LogSchema::looks_like_header(line)) {
        schema_ = LogSchema::from_names(line);
        continue;
      }
    }
    if (line.empty()) continue;
    return parse_log_line(line, schema_, row_);
  }
  return std::nullopt;
}

void LogReader::buffer_all() {
  // Grouping by request id, first-seen order.
  std::vector<std::string> order;
  std::map<std::string, Request> groups;
  while (auto record = next_record()) {
    auto it = groups.find(record->request_id);
    if (it == groups.end()) {
      order.push_back(record->request_id);
      Request request;
      request.request_id = record->request_id;
      request.query = record->query;
      it = groups.emplace(record->request_id, std::move(request)).first;
    } else if (it->second.query != record->query) {
      throw DataError(ErrorKind::InvariantViolation,
                      "request '" + record->request_id + "' spans multiple queries", row_);
    }
    it->second.impressions.push_back(std::move(*record));
  }
  buffered_.reserve(order.size());
  for (const auto& id : order) {
    Request request = std::move(groups.at(id));
    request.normalize();
    buffered_.push_back(std::move(request));
  }
  buffered_ready_ = true;
}

std::optional<Request> LogReader::next() {
  if (!pre_grouped_) {
    if (!buffered_ready_) buffer_all();
    if (buffered_pos_ >= buffered_.size()) return std::nullopt;
    return std::move(buffered_[buffered_pos_++]);
  }
  if (exhausted_) return std::nullopt;
  if (!pending_) {
    pending_ = next_record();
    if (!pending_) {
      exhausted_ = true;
      return std::nullopt;
    }
  }
  Request request;
  request.request_id = pending_->request_id;
  request.query = pending_->query;
  const std::uint64_t id_hash = fnv1a64(request.request_id);
  if (closed_ids_.count(id_hash)) {
    throw DataError(ErrorKind::GroupingViolation,
                    "request '" + request.request_id + "' reappears after its group closed", row_);
  }
  while (pending_ && pending_->request_id == request.request_id) {
    if (pending_->query != request.query) {
      throw DataError(ErrorKind::InvariantViolation,
                      "request '" + request.request_id + "' spans multiple queries", row_);
    }
    request.impressions.push_back(std::move(*pending_));
    pending_ = next_record();
  }
  if (!pending_) exhausted_ = true;
  closed_ids_.insert(id_hash);
  request.normalize();
  return request;
}

std::string format_labeled_row(const LabeledRow& row) {
  for (const std::string* field : {&row.query, &row.url, &row.title, &row.bte}) {
    if (!field_writable(*field)) {
      throw DataError(ErrorKind::InvariantViolation, "field contains tab or newline: '" + *field + "'");
    }
  }
  if (!(row.label >= 0.0 && row.label <= 1.0)) {
    throw DataError(ErrorKind::InvariantViolation, "label outside [0,1]: " + format_sig9(row.label));
  }
  if (!(row.weight > 0.0)) {
    throw DataError(ErrorKind::InvariantViolation, "weight not positive: " + format_sig9(row.weight));
  }
  std::string out;
  out.reserve(row.query.size() + row.url.size() + row.title.size() + row.bte.size() + 32);
  out += row.query;
  out.push_back('\t');
  out += row.url;
  out.push_back('\t');
  out += row.title;
  out.push_back('\t');
  out += row.bte;
  out.push_back('\t');
  out += format_sig9(row.label);
  out.push_back('\t');
  out += format_sig9(row.weight);
  return out;
}

void LabeledWriter::write(const LabeledRow& row) {
  out_ << format_labeled_row(row) << '\n';
  if (!out_) {
    throw DataError(ErrorKind::Io, "write failed after " + std::to_string(count_) + " rows");
  }
  ++count_;
}

LabeledRow parse_labeled_row(std::string_view line, std::uint64_t row) {
  if (!valid_utf8(line)) throw DataError(ErrorKind::FieldParse, "invalid UTF-8 byte sequence", row);
  const auto fields = split_tsv(line);
  if (fields.size() != 6) {
    throw DataError(ErrorKind::MalformedLine,
                    "expected 6 tab-separated fields, got " + std::to_string(fields.size()), row);
  }
  LabeledRow out;
  out.query = fields[0];
  out.url = fields[1];
  out.title = fields[2];
  out.bte = fields[3];
  const auto parse_double = [&](std::string_view field, const char* what) {
    const std::string text(field);
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) {
      throw DataError(ErrorKind::FieldParse, std::string(what) + " is not a number: '" + text + "'", row);
    }
    return value;
  };
  out.label = parse_double(fields[4], "label");
  out.weight = parse_double(fields[5], "weight");
  if (!(out.label >= 0.0 && out.label <= 1.0)) {
    throw DataError(ErrorKind::FieldParse, "label outside [0,1]", row);
  }
  if (!(out.weight > 0.0)) {
    throw DataError(ErrorKind::FieldParse, "weight not positive", row);
  }
  return out;
}

std::optional<TestQuery> TestSetReader::next() {
  if (exhausted_) return std::nullopt;
  if (!pending_) {
    std::string line;
    while (read_line(in_, line)) {
      ++row_;
      if (line.empty()) continue;
      pending_ = parse_test_set_line(line, row_);
      break;
    }
    if (!pending_) {
      exhausted_ = true;
      return std::nullopt;
    }
  }
  TestQuery group;
  group.query = pending_->query;
  while (pending_ && pending_->query == group.query) {
    group.pairs.push_back(std::move(*pending_));
    pending_.reset();
    std::string line;
    while (read_line(in_, line)) {
      ++row_;
      if (line.empty()) continue;
      pending_ = parse_test_set_line(line, row_);
      break;
    }
  }
  if (!pending_) exhausted_ = true;
  return group;
}

std::vector<TestQuery> read_test_set(std::istream& in) {
  TestSetReader reader(in);
  std::vector<TestQuery> queries;
  while (auto group = reader.next()) queries.push_back(std::move(*group));
  return queries;
}

}  // namespace clicklab
