#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "clicklab/aggregation.hpp"
#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"

using namespace clicklab;

namespace {

Request make_request(std::string id, std::string query,
                     std::vector<std::tuple<std::string, int, std::uint32_t, int>> rows) {
  // rows: (url, rank or -1, clicks, dwell or -1)
  Request request;
  request.request_id = std::move(id);
  request.query = std::move(query);
  for (auto& [url, rank, clicks, dwell] : rows) {
    ImpressionRecord imp;
    imp.request_id = request.request_id;
    imp.query = request.query;
    imp.url = url;
    if (rank >= 0) imp.rank = static_cast<std::uint32_t>(rank);
    imp.clicks = clicks;
    if (dwell >= 0) imp.dwell_time = static_cast<std::uint32_t>(dwell);
    request.impressions.push_back(std::move(imp));
  }
  request.normalize();
  return request;
}

}  // namespace

TEST_CASE("last click designation") {
  SUBCASE("the unique clicked impression with missing dwell carries the last click") {
    const auto request = make_request(
        "r1", "q query text", {{"u1", 0, 1, 116}, {"u2", 3, 0, -1}, {"u3", 7, 1, -1}});
    const auto last = designate_last_click(request);
    REQUIRE(last.size() == 3);
    CHECK_FALSE(last[0]);
    CHECK_FALSE(last[1]);
    CHECK(last[2]);  // rank 7, dwell N/A
  }
  SUBCASE("no clicks, no flag") {
    const auto request = make_request("r1", "q query text", {{"u1", 0, 0, -1}, {"u2", 1, 0, -1}});
    const auto last = designate_last_click(request);
    CHECK(std::count(last.begin(), last.end(), true) == 0);
  }
  SUBCASE("both clicked with dwell: greater rank wins the tie-break") {
    const auto request =
        make_request("r1", "q query text", {{"u1", 0, 1, 10}, {"u2", 5, 1, 20}});
    const auto last = designate_last_click(request);
    CHECK_FALSE(last[0]);
    CHECK(last[1]);
  }
  SUBCASE("two clicked impressions without dwell: greatest rank wins") {
    const auto request = make_request(
        "r1", "q query text", {{"u1", 0, 1, -1}, {"u2", 2, 1, -1}, {"u3", 4, 1, 9}});
    const auto last = designate_last_click(request);
    CHECK_FALSE(last[0]);
    CHECK_FALSE(last[1]);
    CHECK(last[2]);  // rank 4 is the greatest clicked rank
  }
  SUBCASE("exactly one flag whenever any click exists") {
    Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<std::tuple<std::string, int, std::uint32_t, int>> rows;
      bool any_click = false;
      for (int i = 0; i < 1 + static_cast<int>(rng.next_below(8)); ++i) {
        const std::uint32_t clicks = rng.bernoulli(0.4) ? 1 + rng.next_below(2) : 0;
        any_click |= clicks > 0;
        const int dwell = clicks > 0 && rng.bernoulli(0.5)
                              ? static_cast<int>(rng.next_below(300))
                              : -1;
        rows.emplace_back("u" + std::to_string(i), i, clicks, dwell);
      }
      const auto request = make_request("r1", "q query text", rows);
      const auto last = designate_last_click(request);
      CHECK(std::count(last.begin(), last.end(), true) == (any_click ? 1 : 0));
    }
  }
}

TEST_CASE("aggregate sums a pair across requests") {
  Aggregator aggregator;
  aggregator.add(make_request("r1", "q query text", {{"u1", 0, 1, 116}}), 0);
  aggregator.add(make_request("r2", "q query text", {{"u1", 2, 0, -1}}), 1);
  const auto pairs = aggregator.finish();
  REQUIRE(pairs.size() == 1);
  const auto& pair = pairs[0];
  CHECK(pair.views == 2);
  CHECK(pair.clicks_total == 1);
  CHECK(pair.dwell_total == 116);
  CHECK(pair.dwell_known == 1);
  CHECK(pair.rank_sum == 2);
  CHECK(pair.rank_known == 2);
  // The single click has dwell, so it cannot be the "missing dwell" last
  // click; it is still the greatest-rank click of its request.
  CHECK(pair.last_clicks == 1);
  CHECK(pair.nonlast_clicks == 0);
}

TEST_CASE("rank-absent impressions leave rank sums untouched") {
  Aggregator aggregator;
  aggregator.add(make_request("r1", "q query text", {{"u1", -1, 0, -1}}), 0);
  const auto pairs = aggregator.finish();
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].views == 1);
  CHECK(pairs[0].rank_sum == 0);
  CHECK(pairs[0].rank_known == 0);
}

TEST_CASE("clicks > 1 on the last click split into one last and the rest nonlast") {
  Aggregator aggregator;
  aggregator.add(make_request("r1", "q query text", {{"u1", 0, 3, -1}}), 0);
  const auto pairs = aggregator.finish();
  CHECK(pairs[0].clicks_total == 3);
  CHECK(pairs[0].last_clicks == 1);
  CHECK(pairs[0].nonlast_clicks == 2);
}

TEST_CASE("title and bte come from the most recent occurrence") {
  Aggregator aggregator;
  auto r1 = make_request("r1", "q query text", {{"u1", 0, 0, -1}});
  r1.impressions[0].title = "old title";
  auto r2 = make_request("r2", "q query text", {{"u1", 0, 0, -1}});
  r2.impressions[0].title = "new title";
  aggregator.add(r1, 0);
  aggregator.add(r2, 1);
  CHECK(aggregator.finish()[0].title == "new title");

  // Same input via merge in either order gives the same answer.
  Aggregator a, b;
  a.add(r1, 0);
  b.add(r2, 1);
  a.merge(std::move(b));
  CHECK(a.finish()[0].title == "new title");
}

namespace {

std::vector<Request> random_requests(std::uint64_t seed, int n_requests) {
  Rng rng(seed);
  std::vector<Request> requests;
  for (int r = 0; r < n_requests; ++r) {
    const int query_no = static_cast<int>(rng.next_below(5));
    std::vector<std::tuple<std::string, int, std::uint32_t, int>> rows;
    const int docs = 1 + static_cast<int>(rng.next_below(6));
    for (int d = 0; d < docs; ++d) {
      const std::uint32_t clicks = rng.bernoulli(0.3) ? 1 + rng.next_below(2) : 0;
      rows.emplace_back("u" + std::to_string(rng.next_below(8)),
                        rng.bernoulli(0.9) ? d : -1, clicks,
                        clicks > 0 && rng.bernoulli(0.5) ? static_cast<int>(rng.next_below(200)) : -1);
    }
    requests.push_back(make_request("r" + std::to_string(r), "query number " + std::to_string(query_no), rows));
  }
  return requests;
}

struct Totals {
  std::uint64_t views = 0, clicks = 0, dwell = 0;
};

Totals input_totals(const std::vector<Request>& requests) {
  Totals t;
  for (const auto& request : requests) {
    for (const auto& imp : request.impressions) {
      ++t.views;
      t.clicks += imp.clicks;
      t.dwell += imp.dwell_time.value_or(0);
    }
  }
  return t;
}

Totals output_totals(const std::vector<AggregatedPair>& pairs) {
  Totals t;
  for (const auto& pair : pairs) {
    t.views += pair.views;
    t.clicks += pair.clicks_total;
    t.dwell += pair.dwell_total;
    CHECK(pair.clicks_total == pair.nonlast_clicks + pair.last_clicks);
    CHECK(pair.views >= 1);
    CHECK(pair.dwell_known <= pair.views);
    CHECK(pair.rank_known <= pair.views);
  }
  return t;
}

}  // namespace

TEST_CASE("mass conservation over fuzzed inputs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto requests = random_requests(seed, 200);
    Aggregator aggregator;
    std::uint64_t seq = 0;
    for (const auto& request : requests) {
      aggregator.add(request, seq);
      seq += request.impressions.size();
    }
    const auto pairs = aggregator.finish();
    const auto in = input_totals(requests);
    const auto out = output_totals(pairs);
    CHECK(in.views == out.views);
    CHECK(in.clicks == out.clicks);
    CHECK(in.dwell == out.dwell);
  }
}

TEST_CASE("aggregation is order independent") {
  auto requests = random_requests(7, 300);
  Aggregator forward;
  std::uint64_t seq = 0;
  for (const auto& request : requests) forward.add(request, seq++);
  const auto a = forward.finish();

  // Shuffle requests; per-pair counter sums cannot change. (title/bte use
  // the seq number, so keep each request's seq attached.)
  std::vector<std::pair<Request, std::uint64_t>> tagged;
  seq = 0;
  for (auto& request : requests) tagged.emplace_back(std::move(request), seq++);
  Rng rng(123);
  for (std::size_t i = tagged.size(); i > 1; --i) {
    std::swap(tagged[i - 1], tagged[rng.next_below(i)]);
  }
  Aggregator shuffled;
  for (const auto& [request, s] : tagged) shuffled.add(request, s);
  const auto b = shuffled.finish();

  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(pair_key(a[i]) == pair_key(b[i]));
    CHECK(a[i].views == b[i].views);
    CHECK(a[i].clicks_total == b[i].clicks_total);
    CHECK(a[i].nonlast_clicks == b[i].nonlast_clicks);
    CHECK(a[i].dwell_total == b[i].dwell_total);
    CHECK(a[i].rank_sum == b[i].rank_sum);
    CHECK(a[i].title == b[i].title);
  }
}

TEST_CASE("shard merge equals single pass") {
  const auto requests = random_requests(11, 400);
  Aggregator single;
  std::uint64_t seq = 0;
  for (const auto& request : requests) {
    single.add(request, seq);
    seq += request.impressions.size();
  }
  const auto a = single.finish();

  Aggregator shard0, shard1, shard2;
  Aggregator* shards[3] = {&shard0, &shard1, &shard2};
  seq = 0;
  std::size_t i = 0;
  for (const auto& request : requests) {
    shards[i++ % 3]->add(request, seq);
    seq += request.impressions.size();
  }
  shard0.merge(std::move(shard1));
  shard0.merge(std::move(shard2));
  const auto b = shard0.finish();

  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(pair_key(a[k]) == pair_key(b[k]));
    CHECK(a[k].views == b[k].views);
    CHECK(a[k].clicks_total == b[k].clicks_total);
    CHECK(a[k].dwell_total == b[k].dwell_total);
    CHECK(a[k].title == b[k].title);
    CHECK(a[k].bte == b[k].bte);
  }
}

TEST_CASE("spilling to disk does not change the output") {
  const auto requests = random_requests(13, 500);
  Aggregator in_memory;
  Aggregator spilling(1 << 10);  // 1 KiB budget forces many spills
  std::uint64_t seq = 0;
  for (const auto& request : requests) {
    in_memory.add(request, seq);
    spilling.add(request, seq);
    seq += request.impressions.size();
  }
  const auto a = in_memory.finish();
  const auto b = spilling.finish();
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(format_pair_line(a[k]) == format_pair_line(b[k]));
  }
}

TEST_CASE("pair TSV round trip and validation") {
  AggregatedPair pair;
  pair.query = "q query text";
  pair.url = "http://u";
  pair.title = "T";
  pair.bte = "B";
  pair.views = 3;
  pair.clicks_total = 2;
  pair.nonlast_clicks = 1;
  pair.last_clicks = 1;
  pair.dwell_total = 140;
  pair.dwell_known = 1;
  pair.rank_sum = 4;
  pair.rank_known = 3;
  const auto line = format_pair_line(pair);
  const auto back = parse_pair_line(line, 1);
  CHECK(format_pair_line(back) == line);

  try {
    parse_pair_line("q\tu\tT\tB\t1\t5\t1\t1\t0\t0\t0\t0", 2);  // 5 != 1 + 1
    FAIL("expected InvariantViolation");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::InvariantViolation);
  }
  try {
    parse_pair_line("q\tu\tT\tB\t0\t0\t0\t0\t0\t0\t0\t0", 2);  // views = 0
    FAIL("expected InvariantViolation");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::InvariantViolation);
  }
}
