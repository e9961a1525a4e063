// clicklab: click-log mining pipeline as composable subcommands.
//
// Subcommands communicate through TSV files (or stdin/stdout via "-"), every
// run is reproducible from its --seed, and each file output gets a
// .manifest.json with parameter and digest records.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clicklab/errors.hpp"
#include "clicklab/manifest.hpp"
#include "clicklab/pipeline.hpp"
#include "clicklab/text.hpp"
#include "clicklab/threading.hpp"

namespace {

using namespace clicklab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

// stdin/stdout plumbing: subcommands operate on real files so that inputs
// can be read twice and manifests can digest outputs. "-" is staged through
// a temporary file.
class StdioStaging {
 public:
  ~StdioStaging() {
    for (const auto& path : cleanup_) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
  }

  std::string stage_input(const std::string& path) {
    if (path != "-") return path;
    const auto tmp = make_temp("stdin");
    std::ofstream out(tmp, std::ios::binary);
    out << std::cin.rdbuf();
    if (!out) throw DataError(ErrorKind::Io, "failed to stage stdin");
    return tmp;
  }

  std::string stage_output(const std::string& path) {
    if (path != "-") return path;
    stdout_tmp_ = make_temp("stdout");
    return stdout_tmp_;
  }

  // Streams a staged stdout file to the real stdout.
  void flush_output() {
    if (stdout_tmp_.empty()) return;
    std::ifstream in(stdout_tmp_, std::ios::binary);
    std::cout << in.rdbuf();
    std::cout.flush();
  }

  bool output_was_stdout() const { return !stdout_tmp_.empty(); }

 private:
  std::string make_temp(const char* tag) {
    const auto path = std::filesystem::temp_directory_path() /
                      ("clicklab-" + std::to_string(::getpid()) + "-" + tag + "-" +
                       std::to_string(counter_++) + ".tmp");
    cleanup_.push_back(path.string());
    return path.string();
  }
  std::vector<std::string> cleanup_;
  std::string stdout_tmp_;
  int counter_ = 0;
};

struct ManifestScope {
  RunManifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool enabled = true;

  void finish(const std::string& primary_output) {
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (enabled && primary_output != "-") manifest.write(primary_output);
  }
};

std::string json_result(std::initializer_list<std::pair<std::string, nlohmann::json>> fields) {
  nlohmann::json j;
  for (const auto& [key, value] : fields) j[key] = value;
  return j.dump(2);
}

int run(int argc, char** argv) {
  CLI::App app{"click-log mining, pseudo-labeling, and ranking evaluation toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: CLICKLAB_THREADS or hardware)")
      ->envname("CLICKLAB_THREADS");

  StdioStaging stdio;

  // ---- curate ----
  auto* curate = app.add_subcommand("curate", "enforce eligibility, anonymity and truncation rules");
  CurationPolicy policy;
  bool allow_nonalpha = false;
  std::string curate_in, curate_out, curate_schema;
  curate->add_option("--min-chars", policy.min_query_chars, "minimum query characters");
  curate->add_flag("--allow-nonalpha", allow_nonalpha, "keep queries with digits/punctuation");
  curate->add_option("--min-requests", policy.min_unique_requests, "anonymity floor");
  curate->add_option("--max-requests", policy.max_unique_requests, "variability cap");
  curate->add_option("--floor-rank", policy.truncate_floor_rank, "truncation floor rank (0-based)");
  curate->add_option("--seed", policy.rng_seed, "sampling seed");
  curate->add_option("--schema", curate_schema, "input column order (comma separated)");
  curate->add_option("in", curate_in, "input log TSV or -")->required();
  curate->add_option("out", curate_out, "output log TSV or -")->required();

  // ---- aggregate ----
  auto* aggregate = app.add_subcommand("aggregate", "collapse requests into per-pair sums");
  std::string agg_in, agg_out, agg_schema;
  std::uint64_t mem_budget = 0;
  bool agg_buffered = false;
  aggregate->add_option("--mem-budget", mem_budget, "spill to disk above this many bytes");
  aggregate->add_option("--schema", agg_schema, "input column order (comma separated)");
  aggregate->add_flag("--buffer-grouping", agg_buffered,
                      "input rows are not grouped by request id; buffer and regroup");
  aggregate->add_option("in", agg_in, "input log TSV or -")->required();
  aggregate->add_option("out", agg_out, "output pairs TSV or -")->required();

  // ---- label ----
  auto* label = app.add_subcommand("label", "compute pseudo-labels and loss weights");
  std::string label_formula = "cdr", label_in, label_out;
  std::string dwell_missing = "const:20", weight_mode = "none";
  LabelConfig label_cfg;
  label->add_option("--formula", label_formula, "clicks|dwell|rank|cdr")->capture_default_str();
  label->add_option("--alpha", label_cfg.alpha, "nonlast click weight")->capture_default_str();
  label->add_option("--beta", label_cfg.beta, "last click weight")->capture_default_str();
  label->add_option("--s", label_cfg.scale_s, "log scale factor")->capture_default_str();
  label->add_option("--c", label_cfg.rank_c, "rank constant C")->capture_default_str();
  label->add_option("--dwell-missing", dwell_missing, "zero|mean|const:V")->capture_default_str();
  label->add_option("--weights", weight_mode, "none|views|clicks")->capture_default_str();
  label->add_option("in", label_in, "input pairs TSV or -")->required();
  label->add_option("out", label_out, "output labeled TSV or -")->required();

  // ---- negatives ----
  auto* negatives = app.add_subcommand("negatives", "sample soft negative pairs");
  pipeline::NegativeOptions neg_options;
  std::string neg_pairs, neg_pool, neg_out;
  negatives->add_option("--k", neg_options.k, "negatives per query")->capture_default_str();
  negatives->add_option("--seed", neg_options.seed, "sampling seed");
  negatives->add_option("pairs", neg_pairs, "observed pairs TSV (query, url, ...)")->required();
  negatives->add_option("docpool", neg_pool, "document pool TSV (url, title, bte)")->required();
  negatives->add_option("out", neg_out, "output labeled TSV or -")->required();

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic click log with known relevance");
  SimConfig sim_cfg;
  std::string sim_out = "-", sim_truth, sim_config_file;
  std::vector<std::string> sim_overrides;
  simulate->add_option("--queries", sim_cfg.n_queries, "number of queries")->capture_default_str();
  simulate->add_option("--seed", sim_cfg.rng_seed, "generator seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "output log TSV or -")->capture_default_str();
  simulate->add_option("--truth", sim_truth, "hidden relevance TSV (query, url, relevance)");
  simulate->add_option("--config", sim_config_file, "key=value config file");
  simulate->add_option("--set", sim_overrides, "inline key=value override (repeatable)");

  // ---- score ----
  auto* score = app.add_subcommand("score", "score pairs with embeddings and the interaction head");
  pipeline::ScoreOptions score_options;
  std::string score_pairs, score_out;
  score->add_option("--head", score_options.head_path, "interaction head file (omit for cosine)");
  score->add_option("--embeddings", score_options.embeddings_path, "embedding file")->required();
  score->add_option("pairs", score_pairs, "pairs TSV (query, url, ...)")->required();
  score->add_option("out", score_out, "output scores TSV or -")->required();

  // ---- baseline-bm25 ----
  auto* bm25 = app.add_subcommand("baseline-bm25", "score pairs with the Okapi BM25 baseline");
  std::string bm25_corpus, bm25_pairs, bm25_out;
  double bm25_k1 = 1.2, bm25_b = 0.75;
  bm25->add_option("--k1", bm25_k1, "term frequency saturation")->capture_default_str();
  bm25->add_option("--b", bm25_b, "length normalization")->capture_default_str();
  bm25->add_option("corpus", bm25_corpus, "corpus TSV (url, title, bte)")->required();
  bm25->add_option("pairs", bm25_pairs, "pairs TSV (query, url, ...)")->required();
  bm25->add_option("out", bm25_out, "output scores TSV or -")->required();

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "evaluate scores against an annotated test set");
  std::string eval_metric = "ndcg10", eval_gold, eval_scores, eval_per_query;
  eval->add_option("--metric", eval_metric, "ndcg10|p10")->capture_default_str();
  eval->add_option("--per-query", eval_per_query, "write per-query values TSV");
  eval->add_option("gold", eval_gold, "test set TSV (query, url, doc, label)")->required();
  eval->add_option("scores", eval_scores, "scores TSV (query, url, score)")->required();

  // ---- sigtest ----
  auto* sigtest = app.add_subcommand("sigtest", "paired Monte Carlo permutation test");
  std::uint64_t sig_samples = 1000000, sig_seed = 0;
  std::string sig_a, sig_b;
  sigtest->add_option("--samples", sig_samples, "permutation samples")->capture_default_str();
  sigtest->add_option("--seed", sig_seed, "sampling seed");
  sigtest->add_option("a", sig_a, "per-query metric TSV for system A")->required();
  sigtest->add_option("b", sig_b, "per-query metric TSV for system B")->required();

  // ---- correlate ----
  auto* correlate = app.add_subcommand("correlate", "Spearman of label schemes against gold labels");
  std::string corr_pairs, corr_gold;
  correlate->add_option("pairs", corr_pairs, "aggregated pairs TSV")->required();
  correlate->add_option("gold", corr_gold, "gold labels TSV (query, url, [doc,] label)")->required();

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "descriptive statistics of a click log");
  std::string stats_in, stats_schema;
  stats->add_option("--schema", stats_schema, "input column order (comma separated)");
  stats->add_option("in", stats_in, "input log TSV or -")->required();

  // ---- baselines (random / oracle NDCG@10 on a test set) ----
  auto* baseline = app.add_subcommand("baseline", "random and oracle NDCG@10 baselines");
  std::string base_gold;
  std::uint64_t base_trials = 100, base_seed = 0;
  baseline->add_option("--trials", base_trials, "random orderings per query")->capture_default_str();
  baseline->add_option("--seed", base_seed, "random baseline seed");
  baseline->add_option("gold", base_gold, "test set TSV (query, url, doc, label)")->required();

  // ---- train-toy ----
  auto* train = app.add_subcommand("train-toy", "train the hashed bag-of-tokens embedder");
  pipeline::TrainToyOptions train_options;
  std::string train_in, train_emb;
  train->add_option("--dim", train_options.config.dim, "embedding dimension")->capture_default_str();
  train->add_option("--buckets", train_options.config.buckets, "hash buckets")->capture_default_str();
  train->add_option("--epochs", train_options.config.epochs, "training epochs")->capture_default_str();
  train->add_option("--lr", train_options.config.lr, "learning rate")->capture_default_str();
  train->add_option("--batch", train_options.config.batch_size, "batch size")->capture_default_str();
  train->add_option("--seed", train_options.config.seed, "shuffle and init seed");
  train->add_option("--tau", train_options.config.tau_init, "initial temperature")->capture_default_str();
  train->add_option("--mix", train_options.config.pointwise_mix,
                    "pointwise head loss mixing coefficient")->capture_default_str();
  train->add_option("--head", train_options.head_out, "write the trained head here");
  train->add_option("labeled", train_in, "labeled training TSV")->required();
  train->add_option("emb", train_emb, "output embedding file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kExitUsage;
  }

  ManifestScope scope;
  scope.manifest.parameters["threads"] = std::to_string(resolve_threads(threads));

  if (*curate) {
    policy.alpha_only = !allow_nonalpha;
    pipeline::CurateOptions options;
    options.policy = policy;
    options.threads = threads;
    if (!curate_schema.empty()) options.schema = LogSchema::from_names(curate_schema);
    const auto in = stdio.stage_input(curate_in);
    const auto out = stdio.stage_output(curate_out);
    const auto result = pipeline::curate_file(in, out, options);
    scope.manifest.subcommand = "curate";
    scope.manifest.seed = policy.rng_seed;
    scope.manifest.parameters["min_chars"] = std::to_string(policy.min_query_chars);
    scope.manifest.parameters["min_requests"] = std::to_string(policy.min_unique_requests);
    scope.manifest.parameters["max_requests"] = std::to_string(policy.max_unique_requests);
    scope.manifest.parameters["floor_rank"] = std::to_string(policy.truncate_floor_rank);
    scope.manifest.parameters["alpha_only"] = policy.alpha_only ? "true" : "false";
    scope.manifest.input_paths = {in};
    scope.manifest.output_paths = {out};
    scope.finish(stdio.output_was_stdout() ? "-" : curate_out);
    std::cerr << "curate: " << result.requests_in << " requests in, " << result.requests_out
              << " kept, " << result.rows_out << " rows out\n";
  } else if (*aggregate) {
    pipeline::AggregateOptions options;
    options.mem_budget_bytes = mem_budget;
    options.threads = threads;
    options.pre_grouped = !agg_buffered;
    if (!agg_schema.empty()) options.schema = LogSchema::from_names(agg_schema);
    const auto in = stdio.stage_input(agg_in);
    const auto out = stdio.stage_output(agg_out);
    const auto pairs = pipeline::aggregate_file(in, out, options);
    scope.manifest.subcommand = "aggregate";
    scope.manifest.parameters["mem_budget"] = std::to_string(mem_budget);
    scope.manifest.input_paths = {in};
    scope.manifest.output_paths = {out};
    scope.finish(stdio.output_was_stdout() ? "-" : agg_out);
    std::cerr << "aggregate: " << pairs << " pairs\n";
  } else if (*label) {
    pipeline::LabelOptions options;
    options.config = label_cfg;
    options.formula = label_formula_from_string(label_formula);
    options.threads = threads;
    if (dwell_missing == "zero") {
      options.config.dwell_missing = LabelConfig::DwellMissing::Zero;
    } else if (dwell_missing == "mean") {
      options.config.dwell_missing = LabelConfig::DwellMissing::GlobalMean;
    } else if (dwell_missing.rfind("const:", 0) == 0) {
      options.config.dwell_missing = LabelConfig::DwellMissing::Constant;
      options.config.dwell_missing_value = std::stod(dwell_missing.substr(6));
    } else {
      throw UsageError("--dwell-missing expects zero|mean|const:V");
    }
    if (weight_mode == "none") {
      options.config.weight_mode = LabelConfig::WeightMode::None;
    } else if (weight_mode == "views") {
      options.config.weight_mode = LabelConfig::WeightMode::Views;
    } else if (weight_mode == "clicks") {
      options.config.weight_mode = LabelConfig::WeightMode::Clicks;
    } else {
      throw UsageError("--weights expects none|views|clicks");
    }
    const auto in = stdio.stage_input(label_in);
    const auto out = stdio.stage_output(label_out);
    const auto rows = pipeline::label_file(in, out, options);
    scope.manifest.subcommand = "label";
    scope.manifest.parameters["formula"] = label_formula;
    scope.manifest.parameters["alpha"] = format_sig9(label_cfg.alpha);
    scope.manifest.parameters["beta"] = format_sig9(label_cfg.beta);
    scope.manifest.parameters["s"] = format_sig9(label_cfg.scale_s);
    scope.manifest.parameters["c"] = format_sig9(label_cfg.rank_c);
    scope.manifest.parameters["dwell_missing"] = dwell_missing;
    scope.manifest.parameters["weights"] = weight_mode;
    scope.manifest.input_paths = {in};
    scope.manifest.output_paths = {out};
    scope.finish(stdio.output_was_stdout() ? "-" : label_out);
    std::cerr << "label: " << rows << " rows\n";
  } else if (*negatives) {
    const auto out = stdio.stage_output(neg_out);
    const auto rows = pipeline::negatives_file(neg_pairs, neg_pool, out, neg_options);
    scope.manifest.subcommand = "negatives";
    scope.manifest.seed = neg_options.seed;
    scope.manifest.parameters["k"] = std::to_string(neg_options.k);
    scope.manifest.input_paths = {neg_pairs, neg_pool};
    scope.manifest.output_paths = {out};
    scope.finish(stdio.output_was_stdout() ? "-" : neg_out);
    std::cerr << "negatives: " << rows << " rows\n";
  } else if (*simulate) {
    if (!sim_config_file.empty()) sim_cfg = pipeline::load_sim_config(sim_config_file, sim_cfg);
    for (const auto& kv : sim_overrides) pipeline::apply_sim_config_line(sim_cfg, kv);
    const auto out = stdio.stage_output(sim_out);
    const auto counters = pipeline::simulate_files(sim_cfg, out, sim_truth, threads);
    scope.manifest.subcommand = "simulate";
    scope.manifest.seed = sim_cfg.rng_seed;
    scope.manifest.parameters["queries"] = std::to_string(sim_cfg.n_queries);
    scope.manifest.output_paths = {out};
    if (!sim_truth.empty()) scope.manifest.output_paths.push_back(sim_truth);
    scope.finish(stdio.output_was_stdout() ? "-" : sim_out);
    std::cerr << "simulate: " << counters.requests << " requests, " << counters.rows << " rows, "
              << counters.clicks << " clicks\n";
  } else if (*score) {
    const auto out = stdio.stage_output(score_out);
    const auto rows = pipeline::score_files(score_options, score_pairs, out);
    scope.manifest.subcommand = "score";
    scope.manifest.parameters["head"] = score_options.head_path.empty() ? "cosine" : score_options.head_path;
    scope.manifest.input_paths = {score_options.embeddings_path, score_pairs};
    if (!score_options.head_path.empty()) scope.manifest.input_paths.push_back(score_options.head_path);
    scope.manifest.output_paths = {out};
    scope.finish(stdio.output_was_stdout() ? "-" : score_out);
    std::cerr << "score: " << rows << " rows\n";
  } else if (*bm25) {
    const auto out = stdio.stage_output(bm25_out);
    const auto rows = pipeline::bm25_files(bm25_corpus, bm25_pairs, out, bm25_k1, bm25_b);
    scope.manifest.subcommand = "baseline-bm25";
    scope.manifest.parameters["k1"] = format_sig9(bm25_k1);
    scope.manifest.parameters["b"] = format_sig9(bm25_b);
    scope.manifest.input_paths = {bm25_corpus, bm25_pairs};
    scope.manifest.output_paths = {out};
    scope.finish(stdio.output_was_stdout() ? "-" : bm25_out);
    std::cerr << "baseline-bm25: " << rows << " rows\n";
  } else if (*eval) {
    const auto metric = pipeline::eval_metric_from_string(eval_metric);
    const auto result = pipeline::eval_files(eval_gold, eval_scores, metric);
    if (!eval_per_query.empty()) {
      std::ofstream out(eval_per_query, std::ios::binary);
      if (!out) throw DataError(ErrorKind::Io, "cannot open " + eval_per_query);
      for (const auto& [query, value] : result.per_query) {
        out << query << '\t' << format_sig9(value) << '\n';
      }
      if (!out) throw DataError(ErrorKind::Io, "write failed on " + eval_per_query);
      scope.manifest.output_paths.push_back(eval_per_query);
    }
    scope.manifest.subcommand = "eval";
    scope.manifest.parameters["metric"] = eval_metric;
    scope.manifest.input_paths = {eval_gold, eval_scores};
    if (!eval_per_query.empty()) scope.finish(eval_per_query);
    std::cout << json_result({{"metric", eval_metric},
                              {"mean", result.mean},
                              {"queries", result.per_query.size()}})
              << '\n';
  } else if (*sigtest) {
    const auto result = pipeline::sigtest_files(sig_a, sig_b, sig_samples, sig_seed, threads);
    std::cout << json_result({{"p_value", result.p_value},
                              {"mean_a", result.mean_a},
                              {"mean_b", result.mean_b},
                              {"mean_diff", result.mean_a - result.mean_b},
                              {"queries", result.queries},
                              {"samples", sig_samples},
                              {"seed", sig_seed}})
              << '\n';
  } else if (*correlate) {
    const auto result = pipeline::correlate_files(corr_pairs, corr_gold);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& entry : result.report) {
      nlohmann::json row;
      row["scheme"] = entry.scheme;
      if (std::isnan(entry.rho)) {
        row["spearman"] = nullptr;
      } else {
        row["spearman"] = entry.rho;
      }
      rows.push_back(row);
    }
    std::cout << json_result({{"correlations", rows},
                              {"joined_pairs", result.joined},
                              {"unmatched_pairs", result.unmatched}})
              << '\n';
  } else if (*stats) {
    const auto in = stdio.stage_input(stats_in);
    const auto schema = stats_schema.empty() ? LogSchema::standard() : LogSchema::from_names(stats_schema);
    const auto result = pipeline::stats_file(in, schema);
    std::cout << result.to_json() << '\n';
  } else if (*baseline) {
    const auto queries = pipeline::load_ranked_queries(base_gold);
    const double random = random_baseline(queries, base_trials, base_seed);
    const double oracle = oracle_baseline(queries);
    std::cout << json_result({{"random_ndcg10", random},
                              {"oracle_ndcg10", oracle},
                              {"trials", base_trials},
                              {"queries", queries.size()},
                              {"seed", base_seed}})
              << '\n';
  } else if (*train) {
    const auto result = pipeline::train_toy_file(train_in, train_emb, train_options);
    scope.manifest.subcommand = "train-toy";
    scope.manifest.seed = train_options.config.seed;
    scope.manifest.parameters["dim"] = std::to_string(train_options.config.dim);
    scope.manifest.parameters["epochs"] = std::to_string(train_options.config.epochs);
    scope.manifest.parameters["lr"] = format_sig9(train_options.config.lr);
    scope.manifest.input_paths = {train_in};
    scope.manifest.output_paths = {train_emb};
    if (!train_options.head_out.empty()) scope.manifest.output_paths.push_back(train_options.head_out);
    scope.finish(train_emb);
    std::cout << json_result({{"epoch_losses", result.epoch_losses}, {"tau", result.tau}}) << '\n';
  }

  stdio.flush_output();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const clicklab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const clicklab::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
