#include "clicklab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"
#include "clicklab/text.hpp"
#include "clicklab/threading.hpp"

namespace clicklab::pipeline {

namespace {

constexpr std::size_t kBlockRequests = 4096;
const char* kLogHeader = "requestId\tquery\turl\ttitle\tbte\trank\tclicks\tdwellTime\n";

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrorKind::Io, "cannot open input file " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(ErrorKind::Io, "cannot open output file " + path);
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw DataError(ErrorKind::Io, "write failed on " + path);
}

// Reads request-aligned blocks, maps them on worker threads, and consumes
// the results in input order. Each block carries the cumulative row sequence
// of its first impression.
template <typename Out>
void process_blocks(LogReader& reader, int threads,
                    const std::function<Out(std::vector<Request>, std::uint64_t)>& map_fn,
                    const std::function<void(Out)>& consume) {
  const int workers = std::max(1, threads);
  std::uint64_t seq = 0;
  bool done = false;
  while (!done) {
    std::vector<std::pair<std::vector<Request>, std::uint64_t>> blocks;
    for (int b = 0; b < workers && !done; ++b) {
      std::vector<Request> block;
      const std::uint64_t block_seq = seq;
      while (block.size() < kBlockRequests) {
        auto request = reader.next();
        if (!request) {
          done = true;
          break;
        }
        seq += request->impressions.size();
        block.push_back(std::move(*request));
      }
      if (!block.empty()) blocks.emplace_back(std::move(block), block_seq);
    }
    if (blocks.empty()) break;
    if (blocks.size() == 1) {
      consume(map_fn(std::move(blocks[0].first), blocks[0].second));
      continue;
    }
    std::vector<std::future<Out>> futures;
    futures.reserve(blocks.size());
    for (auto& [block, block_seq] : blocks) {
      futures.push_back(std::async(std::launch::async, map_fn, std::move(block), block_seq));
    }
    for (auto& f : futures) consume(f.get());
  }
}

std::vector<std::pair<std::string, std::string>> read_query_url_rows(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::uint64_t row = 0;
  while (read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_tsv(line);
    if (fields.size() < 2) {
      throw DataError(ErrorKind::MalformedLine, "expected at least query and url columns", row);
    }
    rows.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return rows;
}

}  // namespace

CurateResult curate_file(const std::string& in_path, const std::string& out_path,
                         const CurateOptions& options) {
  options.policy.validate();
  CurateResult result;

  // Pass 1: frequency bounds over eligible queries.
  FrequencyBounds bounds(options.policy);
  {
    auto in = open_input(in_path);
    LogReader reader(in, options.schema);
    while (auto request = reader.next()) {
      ++result.requests_in;
      if (!query_eligible(request->query, options.policy)) continue;
      bounds.observe(request->query, request->request_id);
    }
  }
  bounds.finalize();

  // Pass 2: filter, truncate, write.
  auto in = open_input(in_path);
  LogReader reader(in, options.schema);
  auto out = open_output(out_path);
  out << kLogHeader;
  const LogSchema out_schema = LogSchema::standard();
  const auto& policy = options.policy;

  struct BlockOut {
    std::string text;
    std::uint64_t requests = 0;
    std::uint64_t rows = 0;
  };
  process_blocks<BlockOut>(
      reader, resolve_threads(options.threads),
      [&policy, &bounds, &out_schema](std::vector<Request> block, std::uint64_t) {
        BlockOut result;
        for (const auto& request : block) {
          if (!query_eligible(request.query, policy)) continue;
          if (!bounds.keep(request.query, request.request_id)) continue;
          const Request truncated = truncate_request(request, policy);
          for (const auto& imp : truncated.impressions) {
            result.text += format_log_line(imp, out_schema);
            result.text.push_back('\n');
          }
          ++result.requests;
          result.rows += truncated.impressions.size();
        }
        return result;
      },
      [&](BlockOut block) {
        out << block.text;
        result.requests_out += block.requests;
        result.rows_out += block.rows;
      });
  close_output(out, out_path);
  return result;
}

std::uint64_t aggregate_file(const std::string& in_path, const std::string& out_path,
                             const AggregateOptions& options) {
  auto in = open_input(in_path);
  LogReader reader(in, options.schema, options.pre_grouped);
  Aggregator aggregator(options.mem_budget_bytes);

  process_blocks<Aggregator>(
      reader, resolve_threads(options.threads),
      [](std::vector<Request> block, std::uint64_t block_seq) {
        Aggregator local;
        std::uint64_t seq = block_seq;
        for (const auto& request : block) {
          local.add(request, seq);
          seq += request.impressions.size();
        }
        return local;
      },
      [&](Aggregator local) { aggregator.merge(std::move(local)); });

  const auto pairs = aggregator.finish();
  auto out = open_output(out_path);
  write_pairs(out, pairs);
  close_output(out, out_path);
  return pairs.size();
}

std::uint64_t label_file(const std::string& in_path, const std::string& out_path,
                         const LabelOptions& options) {
  options.config.validate();
  std::vector<AggregatedPair> pairs;
  {
    auto in = open_input(in_path);
    pairs = read_pairs(in);
  }
  LabelConfig cfg = options.config;
  resolve_dwell_policy(cfg, pairs);

  const auto chunks = parallel_chunks<std::string>(
      pairs.size(), resolve_threads(options.threads), [&](std::size_t begin, std::size_t end) {
        std::string text;
        for (std::size_t i = begin; i < end; ++i) {
          LabeledRow row;
          row.query = pairs[i].query;
          row.url = pairs[i].url;
          row.title = pairs[i].title;
          row.bte = pairs[i].bte;
          // The rank formula is unbounded above; the stored label is clipped
          // like the others so the output format invariant holds.
          row.label = clip01(label_for(options.formula, pairs[i], cfg));
          row.weight = loss_weight(pairs[i], cfg);
          text += format_labeled_row(row);
          text.push_back('\n');
        }
        return text;
      });
  auto out = open_output(out_path);
  for (const auto& chunk : chunks) out << chunk;
  close_output(out, out_path);
  return pairs.size();
}

std::uint64_t negatives_file(const std::string& pairs_path, const std::string& docpool_path,
                             const std::string& out_path, const NegativeOptions& options) {
  const auto rows = read_query_url_rows(pairs_path);
  std::vector<std::string> queries;
  NegativePolicy policy;
  policy.negatives_per_query = options.k;
  policy.rng_seed = options.seed;
  for (const auto& [query, url] : rows) {
    auto [it, inserted] = policy.exclusion.try_emplace(query);
    if (inserted) queries.push_back(query);
    it->second.insert(url);
  }

  std::vector<DocEntry> pool;
  {
    auto in = open_input(docpool_path);
    std::string line;
    std::uint64_t row = 0;
    while (read_line(in, line)) {
      ++row;
      if (line.empty()) continue;
      const auto fields = split_tsv(line);
      DocEntry doc;
      doc.url = std::string(fields[0]);
      if (fields.size() > 1) doc.title = std::string(fields[1]);
      if (fields.size() > 2) doc.bte = std::string(fields[2]);
      pool.push_back(std::move(doc));
    }
  }

  const auto negatives = sample_soft_negatives(queries, pool, policy);
  auto out = open_output(out_path);
  LabeledWriter writer(out);
  for (const auto& row : negatives) writer.write(row);
  close_output(out, out_path);
  return writer.count();
}

SimCounters simulate_files(const SimConfig& cfg, const std::string& out_path,
                           const std::string& truth_path, int threads) {
  cfg.validate();
  auto out = open_output(out_path);
  out << kLogHeader;
  std::ofstream truth_out;
  const bool want_truth = !truth_path.empty();
  if (want_truth) {
    truth_out = open_output(truth_path);
  }
  const LogSchema schema = LogSchema::standard();

  struct ChunkOut {
    std::string rows;
    std::string truth;
    SimCounters counters;
  };
  const int workers = resolve_threads(threads);
  const std::uint32_t chunk = 512;
  SimCounters total;

  std::uint32_t next = 0;
  while (next < cfg.n_queries) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;
    for (int w = 0; w < workers && next < cfg.n_queries; ++w) {
      const std::uint32_t begin = next;
      const std::uint32_t end = std::min(cfg.n_queries, begin + chunk);
      ranges.emplace_back(begin, end);
      next = end;
    }
    const auto run_range = [&cfg, &schema, want_truth](std::uint32_t begin, std::uint32_t end) {
      ChunkOut chunk_out;
      SimTruth truth;
      chunk_out.counters = generate_log_range(
          cfg, begin, end,
          [&](const Request& request) {
            for (const auto& imp : request.impressions) {
              chunk_out.rows += format_log_line(imp, schema);
              chunk_out.rows.push_back('\n');
            }
          },
          want_truth ? &truth : nullptr);
      if (want_truth) {
        for (const auto& [key, relevance] : truth.relevance) {
          chunk_out.truth += key.first;
          chunk_out.truth.push_back('\t');
          chunk_out.truth += key.second;
          chunk_out.truth.push_back('\t');
          chunk_out.truth += format_sig9(relevance);
          chunk_out.truth.push_back('\n');
        }
      }
      return chunk_out;
    };
    if (ranges.size() == 1) {
      ChunkOut chunk_out = run_range(ranges[0].first, ranges[0].second);
      out << chunk_out.rows;
      if (want_truth) truth_out << chunk_out.truth;
      total.merge(chunk_out.counters);
    } else {
      std::vector<std::future<ChunkOut>> futures;
      for (const auto& [begin, end] : ranges) {
        futures.push_back(std::async(std::launch::async, run_range, begin, end));
      }
      for (auto& f : futures) {
        ChunkOut chunk_out = f.get();
        out << chunk_out.rows;
        if (want_truth) truth_out << chunk_out.truth;
        total.merge(chunk_out.counters);
      }
    }
  }
  close_output(out, out_path);
  if (want_truth) close_output(truth_out, truth_path);
  return total;
}

void apply_sim_config_line(SimConfig& cfg, const std::string& raw) {
  std::string line = raw;
  if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
  while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
  std::size_t start = 0;
  while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
  line = line.substr(start);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw DataError(ErrorKind::MalformedLine, "expected key=value, got '" + line + "'");
  }
  const std::string key = line.substr(0, eq);
  const std::string value = line.substr(eq + 1);
  const auto as_u32 = [&] { return static_cast<std::uint32_t>(std::stoul(value)); };
  const auto as_u64 = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };
  const auto as_double = [&] { return std::stod(value); };

  if (key == "n_queries") cfg.n_queries = as_u32();
  else if (key == "min_requests") cfg.min_requests = as_u32();
  else if (key == "max_requests") cfg.max_requests = as_u32();
  else if (key == "min_docs") cfg.min_docs = as_u32();
  else if (key == "max_docs") cfg.max_docs = as_u32();
  else if (key == "modal_docs") cfg.modal_docs = as_u32();
  else if (key == "page_size") cfg.page_size = as_u32();
  else if (key == "exam_start") cfg.exam_start = as_double();
  else if (key == "exam_decay") cfg.exam_decay = as_double();
  else if (key == "page_carry") cfg.page_carry = as_double();
  else if (key == "click_floor") cfg.click_floor = as_double();
  else if (key == "click_scale") cfg.click_scale = as_double();
  else if (key == "click_power") cfg.click_power = as_double();
  else if (key == "double_click_prob") cfg.double_click_prob = as_double();
  else if (key == "rel_alpha") cfg.rel_alpha = as_double();
  else if (key == "rel_beta") cfg.rel_beta = as_double();
  else if (key == "ranking_noise") cfg.ranking_noise = as_double();
  else if (key == "dwell_mu0") cfg.dwell_mu0 = as_double();
  else if (key == "dwell_mu_rel") cfg.dwell_mu_rel = as_double();
  else if (key == "dwell_sigma") cfg.dwell_sigma = as_double();
  else if (key == "last_click_dwell_missing_prob") cfg.last_click_dwell_missing_prob = as_double();
  else if (key == "rank_missing_prob") cfg.rank_missing_prob = as_double();
  else if (key == "make_text") cfg.make_text = value == "1" || value == "true";
  else if (key == "rng_seed") cfg.rng_seed = as_u64();
  else throw DataError(ErrorKind::MalformedLine, "unknown simulator key '" + key + "'");
}

SimConfig load_sim_config(const std::string& path, SimConfig base) {
  auto in = open_input(path);
  std::string line;
  while (read_line(in, line)) apply_sim_config_line(base, line);
  return base;
}

std::uint64_t score_files(const ScoreOptions& options, const std::string& pairs_path,
                          const std::string& out_path) {
  std::unordered_map<std::string, EmbeddingVector> embeddings;
  {
    auto in = open_input(options.embeddings_path);
    for (auto& [key, vec] : read_embeddings(in)) embeddings.emplace(std::move(key), std::move(vec));
  }
  std::optional<InteractionHead> head;
  if (!options.head_path.empty()) {
    auto in = open_input(options.head_path);
    head = read_head(in);
  }
  const auto lookup = [&](const std::string& key, std::uint64_t row) -> const EmbeddingVector& {
    const auto it = embeddings.find(key);
    if (it == embeddings.end()) {
      throw DataError(ErrorKind::FieldParse, "no embedding for key '" + key + "'", row);
    }
    return it->second;
  };

  const auto rows = read_query_url_rows(pairs_path);
  auto out = open_output(out_path);
  std::uint64_t row_no = 0;
  for (const auto& [query, url] : rows) {
    ++row_no;
    const auto& q = lookup(query, row_no);
    const auto& d = lookup(url, row_no);
    const double score = head ? head_forward(q, d, *head) : cosine_sim(q, d);
    out << query << '\t' << url << '\t' << format_sig9(score) << '\n';
  }
  close_output(out, out_path);
  return row_no;
}

std::uint64_t bm25_files(const std::string& corpus_path, const std::string& pairs_path,
                         const std::string& out_path, double k1, double b) {
  std::unordered_map<std::string, std::vector<std::string>> doc_tokens;
  std::vector<std::vector<std::string>> docs;
  {
    auto in = open_input(corpus_path);
    std::string line;
    std::uint64_t row = 0;
    while (read_line(in, line)) {
      ++row;
      if (line.empty()) continue;
      const auto fields = split_tsv(line);
      std::string text;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (i > 1) text.push_back(' ');
        text += fields[i];
      }
      auto tokens = tokenize(text);
      const auto [it, inserted] = doc_tokens.try_emplace(std::string(fields[0]), tokens);
      if (inserted) docs.push_back(std::move(tokens));
    }
  }
  if (docs.empty()) throw DataError(ErrorKind::EmptyCorpus, "corpus file has no documents");
  const CorpusStats stats = build_corpus_stats(docs);

  const auto rows = read_query_url_rows(pairs_path);
  auto out = open_output(out_path);
  std::uint64_t row_no = 0;
  for (const auto& [query, url] : rows) {
    ++row_no;
    const auto it = doc_tokens.find(url);
    if (it == doc_tokens.end()) {
      throw DataError(ErrorKind::FieldParse, "url '" + url + "' not in corpus", row_no);
    }
    const double score = bm25_score(tokenize(query), it->second, stats, k1, b);
    out << query << '\t' << url << '\t' << format_sig9(score) << '\n';
  }
  close_output(out, out_path);
  return row_no;
}

EvalMetric eval_metric_from_string(std::string_view name) {
  if (name == "ndcg10") return EvalMetric::Ndcg10;
  if (name == "p10") return EvalMetric::P10;
  throw UsageError("unknown metric '" + std::string(name) + "' (expected ndcg10 or p10)");
}

std::vector<RankedQuery> load_ranked_queries(const std::string& gold_path) {
  auto in = open_input(gold_path);
  std::vector<RankedQuery> queries;
  for (const auto& group : read_test_set(in)) {
    RankedQuery rq;
    rq.query = group.query;
    rq.items.reserve(group.pairs.size());
    for (const auto& pair : group.pairs) {
      rq.items.push_back(RankedItem{pair.url, pair.label, pair.label});
    }
    queries.push_back(std::move(rq));
  }
  if (queries.empty()) throw DataError(ErrorKind::DegenerateInput, "test set is empty");
  return queries;
}

EvalResult eval_files(const std::string& gold_path, const std::string& scores_path,
                      EvalMetric metric) {
  auto queries = load_ranked_queries(gold_path);
  std::unordered_map<std::string, double> scores;
  {
    auto in = open_input(scores_path);
    std::string line;
    std::uint64_t row = 0;
    while (read_line(in, line)) {
      ++row;
      if (line.empty()) continue;
      const auto fields = split_tsv(line);
      if (fields.size() < 3) {
        throw DataError(ErrorKind::MalformedLine, "expected query, url, score columns", row);
      }
      const std::string text(fields[2]);
      char* end = nullptr;
      const double value = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size()) {
        throw DataError(ErrorKind::FieldParse, "score is not a number: '" + text + "'", row);
      }
      scores[std::string(fields[0]) + '\t' + std::string(fields[1])] = value;
    }
  }
  EvalResult result;
  double total = 0.0;
  for (auto& rq : queries) {
    for (auto& item : rq.items) {
      const auto it = scores.find(rq.query + '\t' + item.url);
      if (it == scores.end()) {
        throw DataError(ErrorKind::FieldParse,
                        "no score for pair ('" + rq.query + "', '" + item.url + "')");
      }
      item.model_score = it->second;
    }
    const double value = metric == EvalMetric::Ndcg10 ? ndcg_at_10(rq) : precision_at_10(rq);
    result.per_query.emplace_back(rq.query, value);
    total += value;
  }
  result.mean = total / static_cast<double>(queries.size());
  return result;
}

SigtestResult sigtest_files(const std::string& a_path, const std::string& b_path,
                            std::uint64_t samples, std::uint64_t seed, int threads) {
  const auto read_metric_file = [](const std::string& path) {
    auto in = open_input(path);
    std::map<std::string, double> values;
    std::string line;
    std::uint64_t row = 0;
    while (read_line(in, line)) {
      ++row;
      if (line.empty()) continue;
      const auto fields = split_tsv(line);
      if (fields.size() < 2) {
        throw DataError(ErrorKind::MalformedLine, "expected query and value columns", row);
      }
      const std::string text(fields.back());
      char* end = nullptr;
      const double value = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size()) {
        throw DataError(ErrorKind::FieldParse, "value is not a number: '" + text + "'", row);
      }
      if (!values.emplace(std::string(fields[0]), value).second) {
        throw DataError(ErrorKind::InvariantViolation, "duplicate query '" + std::string(fields[0]) + "'", row);
      }
    }
    return values;
  };
  const auto a = read_metric_file(a_path);
  const auto b = read_metric_file(b_path);
  if (a.size() != b.size()) {
    throw DataError(ErrorKind::ShapeMismatch, "per-query files have different query sets");
  }
  std::vector<double> xs, ys;
  xs.reserve(a.size());
  ys.reserve(a.size());
  for (const auto& [query, value] : a) {
    const auto it = b.find(query);
    if (it == b.end()) {
      throw DataError(ErrorKind::ShapeMismatch, "query '" + query + "' missing from second file");
    }
    xs.push_back(value);
    ys.push_back(it->second);
  }
  SigtestResult result;
  result.queries = xs.size();
  result.mean_a = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  result.mean_b = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  result.p_value = mc_permutation_test(xs, ys, samples, seed, resolve_threads(threads));
  return result;
}

CorrelateResult correlate_files(const std::string& pairs_path, const std::string& gold_path) {
  std::vector<AggregatedPair> pairs;
  {
    auto in = open_input(pairs_path);
    pairs = read_pairs(in);
  }
  // Gold file: query url label (3 columns, e.g. simulator truth) or
  // query url doc label (4 columns, the annotated test-set format).
  std::unordered_map<std::string, double> gold_map;
  {
    auto in = open_input(gold_path);
    std::string line;
    std::uint64_t row = 0;
    while (read_line(in, line)) {
      ++row;
      if (line.empty()) continue;
      const auto fields = split_tsv(line);
      if (fields.size() != 3 && fields.size() != 4) {
        throw DataError(ErrorKind::MalformedLine, "expected 3 or 4 columns in gold file", row);
      }
      const std::string text(fields.back());
      char* end = nullptr;
      const double value = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size()) {
        throw DataError(ErrorKind::FieldParse, "label is not a number: '" + text + "'", row);
      }
      gold_map[std::string(fields[0]) + '\t' + std::string(fields[1])] = value;
    }
  }
  CorrelateResult result;
  std::vector<AggregatedPair> joined;
  std::vector<double> gold;
  for (auto& pair : pairs) {
    const auto it = gold_map.find(pair.query + '\t' + pair.url);
    if (it == gold_map.end()) {
      ++result.unmatched;
      continue;
    }
    joined.push_back(std::move(pair));
    gold.push_back(it->second);
  }
  result.joined = joined.size();
  result.report = correlation_report(joined, gold);
  return result;
}

LogStatistics stats_file(const std::string& log_path, LogSchema schema, bool pre_grouped) {
  auto in = open_input(log_path);
  LogReader reader(in, schema, pre_grouped);
  StatsCollector collector;
  while (auto request = reader.next()) collector.add(*request);
  return collector.finish();
}

TrainResult train_toy_file(const std::string& labeled_path, const std::string& emb_out,
                           const TrainToyOptions& options) {
  std::vector<TrainingPair> pairs;
  std::vector<std::pair<std::string, std::string>> query_keys;   // query -> query text
  std::vector<std::pair<std::string, std::string>> url_keys;     // url -> doc text
  std::unordered_map<std::string, std::size_t> url_index;
  std::unordered_map<std::string, bool> seen_query;
  {
    auto in = open_input(labeled_path);
    std::string line;
    std::uint64_t row = 0;
    while (read_line(in, line)) {
      ++row;
      if (line.empty()) continue;
      const LabeledRow labeled = parse_labeled_row(line, row);
      std::string doc_text = labeled.title;
      if (!labeled.bte.empty()) {
        if (!doc_text.empty()) doc_text.push_back(' ');
        doc_text += labeled.bte;
      }
      pairs.push_back(TrainingPair{labeled.query, doc_text, labeled.label, labeled.weight});
      if (!seen_query.count(labeled.query)) {
        seen_query.emplace(labeled.query, true);
        query_keys.emplace_back(labeled.query, labeled.query);
      }
      const auto [it, inserted] = url_index.try_emplace(labeled.url, url_keys.size());
      if (inserted) {
        url_keys.emplace_back(labeled.url, doc_text);
      } else {
        url_keys[it->second].second = doc_text;  // latest occurrence wins
      }
    }
  }
  const TrainResult result = train_toy_embedder(pairs, options.config);

  std::vector<std::pair<std::string, EmbeddingVector>> entries;
  entries.reserve(query_keys.size() + url_keys.size());
  for (const auto& [key, text] : query_keys) entries.emplace_back(key, result.embedder.embed(text));
  for (const auto& [key, text] : url_keys) entries.emplace_back(key, result.embedder.embed(text));
  {
    auto out = open_output(emb_out);
    write_embeddings(out, entries, options.config.dim);
    close_output(out, emb_out);
  }
  if (!options.head_out.empty()) {
    auto out = open_output(options.head_out);
    write_head(out, result.head);
    close_output(out, options.head_out);
  }
  return result;
}

}  // namespace clicklab::pipeline
