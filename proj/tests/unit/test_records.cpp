#include <doctest.h>

#include <sstream>

#include "clicklab/errors.hpp"
#include "clicklab/log_io.hpp"
#include "clicklab/records.hpp"
#include "clicklab/rng.hpp"
#include "clicklab/text.hpp"

using namespace clicklab;

TEST_CASE("parse_log_line reads the published example row") {
  const auto schema = LogSchema::standard();
  const auto rec = parse_log_line(
      "r1\tautomatic parking\thttp://a\tTitle\tBody text\t0\t1\t116", schema, 1);
  CHECK(rec.request_id == "r1");
  CHECK(rec.query == "automatic parking");
  CHECK(rec.url == "http://a");
  CHECK(rec.rank == 0u);
  CHECK(rec.clicks == 1u);
  CHECK(rec.dwell_time == 116u);
}

TEST_CASE("parse_log_line handles empty optional fields") {
  const auto schema = LogSchema::standard();
  const auto rec = parse_log_line("r1\tq\tu\t\t\t7\t1\t", schema, 1);
  CHECK(rec.title.empty());
  CHECK(rec.bte.empty());
  CHECK(rec.rank == 7u);
  CHECK(rec.clicks == 1u);
  CHECK_FALSE(rec.dwell_time.has_value());
}

TEST_CASE("parse_log_line accepts N/A for absent values") {
  const auto schema = LogSchema::standard();
  const auto rec = parse_log_line("r1\tq\tu\tT\tB\tN/A\t0\tN/A", schema, 1);
  CHECK_FALSE(rec.rank.has_value());
  CHECK_FALSE(rec.dwell_time.has_value());
}

TEST_CASE("parse_log_line rejects dwell without click") {
  const auto schema = LogSchema::standard();
  try {
    parse_log_line("r1\tq\tu\tT\tB\t0\t0\t5", schema, 3);
    FAIL("expected InvariantViolation");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::InvariantViolation);
    CHECK(e.row() == 3);
  }
}

TEST_CASE("parse_log_line error taxonomy") {
  const auto schema = LogSchema::standard();
  try {
    parse_log_line("r1\tq\tu", schema, 1);
    FAIL("expected MalformedLine");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::MalformedLine);
  }
  try {
    parse_log_line("r1\tq\tu\tT\tB\tzero\t0\t", schema, 1);
    FAIL("expected FieldParse");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::FieldParse);
  }
  try {
    parse_log_line("r1\tq\tu\tT\tB\t-1\t0\t", schema, 1);
    FAIL("negative rank must not parse");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::FieldParse);
  }
}

TEST_CASE("invalid UTF-8 is a hard error") {
  const auto schema = LogSchema::standard();
  std::string line = "r1\tq\xc3(uery longer\tu\tT\tB\t0\t0\t";  // truncated 2-byte seq
  CHECK_THROWS_AS(parse_log_line(line, schema, 1), DataError);
  // Czech diacritics survive intact.
  const auto rec = parse_log_line("r1\tjak uva\xc5\x99it vejce\tu\tT\tB\t0\t0\t", schema, 1);
  CHECK(rec.query == "jak uva\xc5\x99it vejce");
}

TEST_CASE("bte length limit counts code points, not bytes") {
  const auto schema = LogSchema::standard();
  std::string bte;
  for (int i = 0; i < 230; ++i) bte += "\xc5\x99";  // 460 bytes, exactly 230 chars
  CHECK(parse_log_line("r1\tq\tu\tT\t" + bte + "\t0\t0\t", schema, 1).bte.size() == 460);
  bte += "\xc5\x99";
  CHECK_THROWS_AS(parse_log_line("r1\tq\tu\tT\t" + bte + "\t0\t0\t", schema, 1), DataError);
}

TEST_CASE("schema reordering and header detection") {
  const auto schema = LogSchema::from_names("query,requestId,url,title,bte,clicks,rank,dwellTime");
  const auto rec = parse_log_line("some query\tr9\tu\tT\tB\t2\t3\t10", schema, 1);
  CHECK(rec.request_id == "r9");
  CHECK(rec.query == "some query");
  CHECK(rec.clicks == 2u);
  CHECK(rec.rank == 3u);

  CHECK(LogSchema::looks_like_header("requestId\tquery\turl\ttitle\tbte\trank\tclicks\tdwellTime"));
  CHECK_FALSE(LogSchema::looks_like_header("r1\tq\tu\tT\tB\t0\t0\t"));
  CHECK_THROWS_AS(LogSchema::from_names("a,b,c"), DataError);
  CHECK_THROWS_AS(LogSchema::from_names("query,query,url,title,bte,rank,clicks,dwellTime"),
                  DataError);
}

namespace {

ImpressionRecord random_record(Rng& rng) {
  ImpressionRecord rec;
  rec.request_id = "r" + std::to_string(rng.next_below(1000));
  const char* queries[] = {"automatic parking", "jak uva\xc5\x99it vejce", "plain query"};
  rec.query = queries[rng.next_below(3)];
  rec.url = "http://example.com/" + std::to_string(rng.next_below(100000));
  rec.title = rng.bernoulli(0.2) ? "" : "Title " + std::to_string(rng.next_u64() % 997);
  rec.bte = rng.bernoulli(0.2) ? "" : "B\xc3\xa9 text " + std::to_string(rng.next_u64() % 997);
  if (rng.bernoulli(0.8)) rec.rank = static_cast<std::uint32_t>(rng.next_below(40));
  rec.clicks = static_cast<std::uint32_t>(rng.next_below(3));
  if (rec.clicks > 0 && rng.bernoulli(0.6)) {
    rec.dwell_time = static_cast<std::uint32_t>(rng.next_below(5000));
  }
  return rec;
}

}  // namespace

TEST_CASE("round-trip: parse(format(r)) == r for fuzzed valid records") {
  const auto schema = LogSchema::standard();
  Rng rng(20240801);
  for (int i = 0; i < 2000; ++i) {
    const auto rec = random_record(rng);
    const auto back = parse_log_line(format_log_line(rec, schema), schema, 1);
    CHECK(back == rec);
  }
}

TEST_CASE("LogReader groups contiguous rows and normalizes rank order") {
  std::istringstream in(
      "requestId\tquery\turl\ttitle\tbte\trank\tclicks\tdwellTime\n"
      "r1\tq one long\tu3\tT\tB\t7\t1\t\n"
      "r1\tq one long\tu1\tT\tB\t0\t1\t116\n"
      "r1\tq one long\tu2\tT\tB\t\t0\t\n"
      "r2\tq two long\tu1\tT\tB\t0\t0\t\n");
  LogReader reader(in);
  const auto first = reader.next();
  REQUIRE(first.has_value());
  CHECK(first->request_id == "r1");
  REQUIRE(first->impressions.size() == 3);
  CHECK(first->impressions[0].rank == 0u);
  CHECK(first->impressions[1].rank == 7u);
  CHECK_FALSE(first->impressions[2].rank.has_value());  // rank-absent at the tail
  const auto second = reader.next();
  REQUIRE(second.has_value());
  CHECK(second->request_id == "r2");
  CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("LogReader reports grouping violations") {
  std::istringstream in(
      "r1\tq one long\tu1\tT\tB\t0\t0\t\n"
      "r2\tq two long\tu1\tT\tB\t0\t0\t\n"
      "r1\tq one long\tu2\tT\tB\t1\t0\t\n");
  LogReader reader(in);
  CHECK(reader.next().has_value());
  CHECK(reader.next().has_value());
  try {
    reader.next();
    FAIL("expected GroupingViolation");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::GroupingViolation);
  }
}

TEST_CASE("LogReader can buffer and regroup ungrouped input") {
  std::istringstream in(
      "r1\tq one long\tu1\tT\tB\t1\t0\t\n"
      "r2\tq two long\tu1\tT\tB\t0\t0\t\n"
      "r1\tq one long\tu2\tT\tB\t0\t0\t\n");
  LogReader reader(in, LogSchema::standard(), /*pre_grouped=*/false);
  const auto first = reader.next();
  REQUIRE(first.has_value());
  CHECK(first->request_id == "r1");
  CHECK(first->impressions.size() == 2);
  CHECK(first->impressions[0].rank == 0u);  // normalized
  const auto second = reader.next();
  CHECK(second->request_id == "r2");
  CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("labeled rows: formatting, validation, 9 significant digits") {
  LabeledRow row{"q", "u", "T", "B", 1.0 / 3.0, 2.5};
  CHECK(format_labeled_row(row) == "q\tu\tT\tB\t0.333333333\t2.5");
  row.label = 1.5;
  CHECK_THROWS_AS(format_labeled_row(row), DataError);
  row.label = 0.5;
  row.weight = 0.0;
  CHECK_THROWS_AS(format_labeled_row(row), DataError);
  row.weight = 1.0;
  row.title = "bad\ttitle";
  CHECK_THROWS_AS(format_labeled_row(row), DataError);

  const auto parsed = parse_labeled_row("q\tu\tT\tB\t0.333333333\t2.5", 1);
  CHECK(parsed.label == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(parsed.weight == 2.5);
}

TEST_CASE("write_labeled output is byte-deterministic") {
  std::vector<LabeledRow> rows;
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    rows.push_back(LabeledRow{"query " + std::to_string(i), "url", "", "", rng.next_double(),
                              1.0 + rng.next_double()});
  }
  const auto render = [&] {
    std::ostringstream out;
    LabeledWriter writer(out);
    for (const auto& row : rows) writer.write(row);
    return out.str();
  };
  CHECK(render() == render());
}

TEST_CASE("test-set reader groups by query and validates labels") {
  std::istringstream in(
      "q one\tu1\tdoc text\t0.66\n"
      "q one\tu2\tdoc text\t0\n"
      "q two\tu1\tdoc text\t1\n");
  const auto groups = read_test_set(in);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].query == "q one");
  CHECK(groups[0].pairs.size() == 2);
  CHECK(groups[0].pairs[0].label == doctest::Approx(0.66));
  CHECK(groups[1].pairs.size() == 1);

  std::istringstream bad("q\tu\tdoc\t1.2\n");
  try {
    read_test_set(bad);
    FAIL("expected FieldParse");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::FieldParse);
  }
}

TEST_CASE("median of two annotator grades equals their mean") {
  // Aggregation of grades happens upstream; this pins the convention the
  // stored labels follow: median of {0.33, 0.66} is their mean.
  const double median = (0.33 + 0.66) / 2.0;
  CHECK(median == doctest::Approx(0.495));
  std::istringstream in("q\tu\tdoc\t0.495\n");
  const auto groups = read_test_set(in);
  CHECK(groups[0].pairs[0].label == doctest::Approx(0.495));
}

TEST_CASE("streaming reader consumes large grouped input one request at a time") {
  std::string data;
  data.reserve(200000 * 30);
  for (int r = 0; r < 100000; ++r) {
    const std::string id = "r" + std::to_string(r);
    data += id + "\tsome long query\tu1\t\t\t0\t0\t\n";
    data += id + "\tsome long query\tu2\t\t\t1\t0\t\n";
  }
  std::istringstream in(data);
  LogReader reader(in);
  std::uint64_t count = 0;
  while (auto request = reader.next()) {
    CHECK(request->impressions.size() == 2);
    ++count;
  }
  CHECK(count == 100000);
}
