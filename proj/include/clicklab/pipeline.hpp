#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clicklab/aggregation.hpp"
#include "clicklab/curation.hpp"
#include "clicklab/evaluation.hpp"
#include "clicklab/labeling.hpp"
#include "clicklab/log_io.hpp"
#include "clicklab/sampling.hpp"
#include "clicklab/scoring.hpp"
#include "clicklab/simulator.hpp"
#include "clicklab/stats.hpp"

// File-level pipeline stages. The CLI wraps these with argument parsing and
// manifests; the python module exposes them directly. Every stage is
// deterministic: outputs depend only on inputs, parameters, and seeds, never
// on the worker count.
namespace clicklab::pipeline {

struct CurateOptions {
  CurationPolicy policy;
  LogSchema schema = LogSchema::standard();
  int threads = 0;
};

struct CurateResult {
  std::uint64_t requests_in = 0;
  std::uint64_t requests_out = 0;
  std::uint64_t rows_out = 0;
};

// Two passes: frequency bounds over eligible queries, then filter, truncate,
// and write. Input must be a seekable file (it is read twice).
CurateResult curate_file(const std::string& in_path, const std::string& out_path,
                         const CurateOptions& options);

struct AggregateOptions {
  std::uint64_t mem_budget_bytes = 0;  // 0 = never spill
  LogSchema schema = LogSchema::standard();
  bool pre_grouped = true;
  int threads = 0;
};

std::uint64_t aggregate_file(const std::string& in_path, const std::string& out_path,
                             const AggregateOptions& options);

struct LabelOptions {
  LabelConfig config;
  LabelFormula formula = LabelFormula::ClickDwellRank;
  int threads = 0;
};

std::uint64_t label_file(const std::string& in_path, const std::string& out_path,
                         const LabelOptions& options);

struct NegativeOptions {
  std::uint32_t k = 1;
  std::uint64_t seed = 0;
};

std::uint64_t negatives_file(const std::string& pairs_path, const std::string& docpool_path,
                             const std::string& out_path, const NegativeOptions& options);

SimCounters simulate_files(const SimConfig& cfg, const std::string& out_path,
                           const std::string& truth_path, int threads);

// key=value overrides for SimConfig, one per line; '#' starts a comment.
void apply_sim_config_line(SimConfig& cfg, const std::string& line);
SimConfig load_sim_config(const std::string& path, SimConfig base = SimConfig{});

struct ScoreOptions {
  std::string head_path;  // empty = plain cosine similarity
  std::string embeddings_path;
};

std::uint64_t score_files(const ScoreOptions& options, const std::string& pairs_path,
                          const std::string& out_path);

std::uint64_t bm25_files(const std::string& corpus_path, const std::string& pairs_path,
                         const std::string& out_path, double k1 = 1.2, double b = 0.75);

struct EvalResult {
  double mean = 0.0;
  std::vector<std::pair<std::string, double>> per_query;
};

enum class EvalMetric { Ndcg10, P10 };
EvalMetric eval_metric_from_string(std::string_view name);

EvalResult eval_files(const std::string& gold_path, const std::string& scores_path,
                      EvalMetric metric);

struct SigtestResult {
  double p_value = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t queries = 0;
};

SigtestResult sigtest_files(const std::string& a_path, const std::string& b_path,
                            std::uint64_t samples, std::uint64_t seed, int threads);

struct CorrelateResult {
  std::vector<SchemeCorrelation> report;
  std::size_t joined = 0;
  std::size_t unmatched = 0;
};

CorrelateResult correlate_files(const std::string& pairs_path, const std::string& gold_path);

LogStatistics stats_file(const std::string& log_path, LogSchema schema = LogSchema::standard(),
                         bool pre_grouped = true);

struct TrainToyOptions {
  TrainConfig config;
  std::string head_out;  // optional
};

TrainResult train_toy_file(const std::string& labeled_path, const std::string& emb_out,
                           const TrainToyOptions& options);

// Reads RankedQueries from a gold test-set file, scores taken from gold
// labels (callers overwrite model_score as needed).
std::vector<RankedQuery> load_ranked_queries(const std::string& gold_path);

}  // namespace clicklab::pipeline
