#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "clicklab/curation.hpp"
#include "clicklab/evaluation.hpp"
#include "clicklab/records.hpp"

namespace clicklab {

// Synthetic-log generator: a position-bias examination model over documents
// with hidden true relevance. The engine ranks by relevance plus noise, the
// user examines top-down with probabilities that decay within a page and
// reset partially at page boundaries, clicks depend on both examination and
// relevance, and dwell grows with relevance. The last click's dwell is
// withheld, mirroring the production logs.
struct SimConfig {
  std::uint32_t n_queries = 10000;
  std::uint32_t min_requests = 5;
  std::uint32_t max_requests = 15;

  std::uint32_t min_docs = 5;
  std::uint32_t max_docs = 15;
  std::uint32_t modal_docs = 10;  // histogram peak, the first-page size

  std::uint32_t page_size = 10;
  double exam_start = 0.98;   // examination probability at rank 0
  double exam_decay = 0.80;   // within-page decay per rank
  double page_carry = 0.50;   // carry-over examination at each page start

  double click_floor = 0.02;
  double click_scale = 0.75;
  double click_power = 2.2;   // steepness of relevance -> click probability
  double double_click_prob = 0.05;

  double rel_alpha = 1.1;     // Beta prior over true relevance
  double rel_beta = 2.4;
  double ranking_noise = 0.45;

  double dwell_mu0 = 3.4;     // lognormal location at relevance 0
  double dwell_mu_rel = 1.5;  // location gain per unit relevance
  double dwell_sigma = 1.25;

  double last_click_dwell_missing_prob = 1.0;
  double rank_missing_prob = 0.0;  // unclicked impressions only

  bool make_text = true;  // title/bte generation can be skipped for speed
  std::uint64_t rng_seed = 1;

  double examination_probability(std::uint32_t rank) const;
  void validate() const;
};

struct SimTruth {
  std::map<std::pair<std::string, std::string>, double> relevance;  // (query, url)
};

struct SimCounters {
  std::uint64_t rows = 0;
  std::uint64_t requests = 0;
  std::uint64_t examined = 0;
  std::uint64_t clicked_impressions = 0;
  std::uint64_t clicks = 0;
  std::uint64_t dwell_rows = 0;
  std::uint64_t dwell_sum = 0;
  std::uint64_t clicks_without_examination = 0;  // stays 0 by construction
  std::vector<std::uint64_t> clicks_by_rank;
  std::vector<std::uint64_t> docs_per_query_hist;

  void merge(const SimCounters& other);
};

using RequestSink = std::function<void(const Request&)>;

// Streams requests in deterministic order (queries by index, requests by
// index within query). Each query uses its own derived seed, so generation
// can be sharded by query range without changing the output.
SimCounters generate_log(const SimConfig& cfg, const RequestSink& sink, SimTruth* truth = nullptr);
SimCounters generate_log_range(const SimConfig& cfg, std::uint32_t query_begin,
                               std::uint32_t query_end, const RequestSink& sink,
                               SimTruth* truth = nullptr);

// Convenience for tests and small runs.
std::pair<std::vector<Request>, SimTruth> generate_log_vector(const SimConfig& cfg,
                                                              SimCounters* counters = nullptr);

struct FidelityReport {
  // Spearman of each label scheme against hidden relevance, ascending by
  // rho, computed after running curation and aggregation on the synthetic
  // log.
  std::vector<SchemeCorrelation> correlations;
  std::size_t pairs = 0;

  double rho(std::string_view scheme) const;
};

FidelityReport fidelity_report(const SimConfig& cfg,
                               const CurationPolicy& policy = CurationPolicy{});

}  // namespace clicklab
