#include "clicklab/records.hpp"

#include <algorithm>
#include <charconv>

#include "clicklab/errors.hpp"
#include "clicklab/text.hpp"

namespace clicklab {

namespace {

constexpr std::array<std::string_view, kLogColumnCount> kColumnNames = {
    "requestId", "query", "url", "title", "bte", "rank", "clicks", "dwellTime"};

bool is_absent(std::string_view field) { return field.empty() || field == "N/A"; }

std::uint32_t parse_u32(std::string_view field, std::string_view column, std::uint64_t row) {
  std::uint32_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(ErrorKind::FieldParse,
                    "column '" + std::string(column) + "' is not a non-negative integer: '" +
                        std::string(field) + "'",
                    row);
  }
  return value;
}

}  // namespace

void Request::normalize() {
  std::stable_sort(impressions.begin(), impressions.end(),
                   [](const ImpressionRecord& a, const ImpressionRecord& b) {
                     if (a.rank.has_value() != b.rank.has_value()) return a.rank.has_value();
                     if (!a.rank.has_value()) return false;  // keep input order at the tail
                     return *a.rank < *b.rank;
                   });
}

LogSchema LogSchema::standard() {
  return LogSchema{{LogColumn::RequestId, LogColumn::Query, LogColumn::Url, LogColumn::Title,
                    LogColumn::Bte, LogColumn::Rank, LogColumn::Clicks, LogColumn::DwellTime}};
}

LogSchema LogSchema::from_names(std::string_view comma_separated) {
  std::vector<std::string_view> names;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= comma_separated.size(); ++i) {
    if (i == comma_separated.size() || comma_separated[i] == ',' || comma_separated[i] == '\t') {
      std::string_view name = comma_separated.substr(start, i - start);
      while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
      while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
      names.push_back(name);
      start = i + 1;
    }
  }
  if (names.size() != kLogColumnCount) {
    throw DataError(ErrorKind::MalformedLine,
                    "schema must list exactly 8 columns, got " + std::to_string(names.size()));
  }
  LogSchema schema{};
  std::array<bool, kLogColumnCount> seen{};
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto it = std::find(kColumnNames.begin(), kColumnNames.end(), names[i]);
    if (it == kColumnNames.end()) {
      throw DataError(ErrorKind::MalformedLine, "unknown column name '" + std::string(names[i]) + "'");
    }
    const auto index = static_cast<std::size_t>(it - kColumnNames.begin());
    if (seen[index]) {
      throw DataError(ErrorKind::MalformedLine, "duplicate column name '" + std::string(names[i]) + "'");
    }
    seen[index] = true;
    schema.order[i] = static_cast<LogColumn>(index);
  }
  return schema;
}

bool LogSchema::looks_like_header(std::string_view line) {
  return line.find("requestId") != std::string_view::npos;
}

std::string LogSchema::names() const {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out.push_back(',');
    out += kColumnNames[static_cast<std::size_t>(order[i])];
  }
  return out;
}

ImpressionRecord parse_log_line(std::string_view line, const LogSchema& schema, std::uint64_t row) {
  if (!valid_utf8(line)) {
    throw DataError(ErrorKind::FieldParse, "invalid UTF-8 byte sequence", row);
  }
  const auto fields = split_tsv(line);
  if (fields.size() != kLogColumnCount) {
    throw DataError(ErrorKind::MalformedLine,
                    "expected 8 tab-separated fields, got " + std::to_string(fields.size()), row);
  }
  ImpressionRecord record;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string_view field = fields[i];
    switch (schema.order[i]) {
      case LogColumn::RequestId:
        record.request_id = field;
        break;
      case LogColumn::Query:
        record.query = field;
        break;
      case LogColumn::Url:
        record.url = field;
        break;
      case LogColumn::Title:
        record.title = field;
        break;
      case LogColumn::Bte:
        record.bte = field;
        break;
      case LogColumn::Rank:
        if (!is_absent(field)) record.rank = parse_u32(field, "rank", row);
        break;
      case LogColumn::Clicks:
        record.clicks = parse_u32(field, "clicks", row);
        break;
      case LogColumn::DwellTime:
        if (!is_absent(field)) record.dwell_time = parse_u32(field, "dwellTime", row);
        break;
    }
  }
  if (utf8_length(record.bte) > kBteMaxChars) {
    throw DataError(ErrorKind::InvariantViolation,
                    "bte exceeds " + std::to_string(kBteMaxChars) + " characters", row);
  }
  if (record.dwell_time.has_value() && record.clicks == 0) {
    throw DataError(ErrorKind::InvariantViolation, "dwell time present without a click", row);
  }
  return record;
}

std::string format_log_line(const ImpressionRecord& record, const LogSchema& schema) {
  for (const std::string* field : {&record.request_id, &record.query, &record.url, &record.title, &record.bte}) {
    if (!field_writable(*field)) {
      throw DataError(ErrorKind::InvariantViolation, "field contains tab or newline: '" + *field + "'");
    }
  }
  std::string out;
  out.reserve(record.request_id.size() + record.query.size() + record.url.size() +
              record.title.size() + record.bte.size() + 24);
  for (std::size_t i = 0; i < schema.order.size(); ++i) {
    if (i) out.push_back('\t');
    switch (schema.order[i]) {
      case LogColumn::RequestId: out += record.request_id; break;
      case LogColumn::Query: out += record.query; break;
      case LogColumn::Url: out += record.url; break;
      case LogColumn::Title: out += record.title; break;
      case LogColumn::Bte: out += record.bte; break;
      case LogColumn::Rank:
        if (record.rank) out += std::to_string(*record.rank);
        break;
      case LogColumn::Clicks: out += std::to_string(record.clicks); break;
      case LogColumn::DwellTime:
        if (record.dwell_time) out += std::to_string(*record.dwell_time);
        break;
    }
  }
  return out;
}

AnnotatedPair parse_test_set_line(std::string_view line, std::uint64_t row) {
  if (!valid_utf8(line)) {
    throw DataError(ErrorKind::FieldParse, "invalid UTF-8 byte sequence", row);
  }
  const auto fields = split_tsv(line);
  if (fields.size() != 4) {
    throw DataError(ErrorKind::MalformedLine,
                    "expected 4 tab-separated fields, got " + std::to_string(fields.size()), row);
  }
  AnnotatedPair pair;
  pair.query = fields[0];
  pair.url = fields[1];
  pair.doc_text = fields[2];
  if (utf8_length(pair.doc_text) > kBteMaxChars) {
    throw DataError(ErrorKind::InvariantViolation,
                    "doc text exceeds " + std::to_string(kBteMaxChars) + " characters", row);
  }
  const std::string label_text(fields[3]);
  char* end = nullptr;
  pair.label = std::strtod(label_text.c_str(), &end);
  if (end != label_text.c_str() + label_text.size() || label_text.empty()) {
    throw DataError(ErrorKind::FieldParse, "label is not a number: '" + label_text + "'", row);
  }
  if (!(pair.label >= 0.0 && pair.label <= 1.0)) {
    throw DataError(ErrorKind::FieldParse, "label outside [0,1]: " + label_text, row);
  }
  return pair;
}

}  // namespace clicklab
