#include "clicklab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clicklab/aggregation.hpp"
#include "clicklab/errors.hpp"
#include "clicklab/labeling.hpp"
#include "clicklab/rng.hpp"

namespace clicklab {

double SimConfig::examination_probability(std::uint32_t rank) const {
  const std::uint32_t page = rank / page_size;
  const std::uint32_t slot = rank % page_size;
  const double p = exam_start * std::pow(exam_decay, static_cast<double>(slot)) *
                   std::pow(page_carry, static_cast<double>(page));
  return std::clamp(p, 1e-9, 1.0);
}

void SimConfig::validate() const {
  if (n_queries == 0) throw DataError(ErrorKind::InvariantViolation, "n_queries must be > 0");
  if (min_requests == 0 || min_requests > max_requests) {
    throw DataError(ErrorKind::InvariantViolation, "need 0 < min_requests <= max_requests");
  }
  if (min_docs == 0 || min_docs > max_docs || modal_docs < min_docs || modal_docs > max_docs) {
    throw DataError(ErrorKind::InvariantViolation, "docs-per-query bounds are inconsistent");
  }
  if (!(exam_start > 0.0 && exam_start <= 1.0) || !(exam_decay > 0.0 && exam_decay <= 1.0) ||
      !(page_carry > 0.0 && page_carry <= 1.0)) {
    throw DataError(ErrorKind::InvariantViolation, "examination curve outside (0,1]");
  }
  if (!(last_click_dwell_missing_prob >= 0.0 && last_click_dwell_missing_prob <= 1.0) ||
      !(rank_missing_prob >= 0.0 && rank_missing_prob <= 1.0) ||
      !(double_click_prob >= 0.0 && double_click_prob <= 1.0)) {
    throw DataError(ErrorKind::InvariantViolation, "probability parameter outside [0,1]");
  }
  if (!(rel_alpha > 0.0 && rel_beta > 0.0)) {
    throw DataError(ErrorKind::InvariantViolation, "Beta prior parameters must be positive");
  }
}

namespace {

std::string base26(std::uint64_t value, std::size_t width) {
  std::string out(width, 'a');
  for (std::size_t i = width; i-- > 0 && value > 0; value /= 26) {
    out[i] = static_cast<char>('a' + value % 26);
  }
  return out;
}

std::string random_word(Rng& rng, std::size_t min_len = 4, std::size_t max_len = 8) {
  const auto len = min_len + static_cast<std::size_t>(rng.next_below(max_len - min_len + 1));
  std::string word(len, 'a');
  for (auto& c : word) c = static_cast<char>('a' + rng.next_below(26));
  return word;
}

// Triangular weights over [min_docs, max_docs] with the peak at modal_docs.
std::uint32_t sample_doc_count(const SimConfig& cfg, Rng& rng) {
  std::vector<double> weights;
  weights.reserve(cfg.max_docs - cfg.min_docs + 1);
  double total = 0.0;
  for (std::uint32_t n = cfg.min_docs; n <= cfg.max_docs; ++n) {
    const double span = n <= cfg.modal_docs
                            ? static_cast<double>(cfg.modal_docs - cfg.min_docs + 1)
                            : static_cast<double>(cfg.max_docs - cfg.modal_docs + 1);
    const double off = n <= cfg.modal_docs ? static_cast<double>(cfg.modal_docs - n)
                                           : static_cast<double>(n - cfg.modal_docs);
    // Peak weight 3, linear falloff, floor 0.25; the peak stays modal.
    double w = 3.0 * (1.0 - off / span);
    w = std::max(w, 0.25);
    if (n == cfg.modal_docs) w = 3.5;
    weights.push_back(w);
    total += w;
  }
  double u = rng.next_double() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u <= 0.0) return cfg.min_docs + static_cast<std::uint32_t>(i);
  }
  return cfg.max_docs;
}

struct SimDoc {
  std::string url;
  std::string title;
  std::string bte;
  double relevance = 0.0;
};

}  // namespace

void SimCounters::merge(const SimCounters& other) {
  rows += other.rows;
  requests += other.requests;
  examined += other.examined;
  clicked_impressions += other.clicked_impressions;
  clicks += other.clicks;
  dwell_rows += other.dwell_rows;
  dwell_sum += other.dwell_sum;
  clicks_without_examination += other.clicks_without_examination;
  if (clicks_by_rank.size() < other.clicks_by_rank.size()) {
    clicks_by_rank.resize(other.clicks_by_rank.size(), 0);
  }
  for (std::size_t i = 0; i < other.clicks_by_rank.size(); ++i) {
    clicks_by_rank[i] += other.clicks_by_rank[i];
  }
  if (docs_per_query_hist.size() < other.docs_per_query_hist.size()) {
    docs_per_query_hist.resize(other.docs_per_query_hist.size(), 0);
  }
  for (std::size_t i = 0; i < other.docs_per_query_hist.size(); ++i) {
    docs_per_query_hist[i] += other.docs_per_query_hist[i];
  }
}

SimCounters generate_log(const SimConfig& cfg, const RequestSink& sink, SimTruth* truth) {
  return generate_log_range(cfg, 0, cfg.n_queries, sink, truth);
}

SimCounters generate_log_range(const SimConfig& cfg, std::uint32_t query_begin,
                               std::uint32_t query_end, const RequestSink& sink, SimTruth* truth) {
  cfg.validate();
  SimCounters counters;
  counters.clicks_by_rank.assign(cfg.max_docs, 0);
  counters.docs_per_query_hist.assign(cfg.max_docs + 1, 0);

  for (std::uint32_t qidx = query_begin; qidx < query_end; ++qidx) {
    Rng rng(derive_seed(cfg.rng_seed, "sim-query", qidx));
    const std::string qtoken = "q" + base26(qidx, 5);
    std::string query = qtoken;
    if (cfg.make_text) {
      query += " " + random_word(rng) + " " + random_word(rng);
    } else {
      query += " querytext";  // stays eligible: letters and spaces, >= 10 chars
    }

    const std::uint32_t n_docs = sample_doc_count(cfg, rng);
    ++counters.docs_per_query_hist[n_docs];
    std::vector<SimDoc> docs(n_docs);
    std::vector<std::string> query_words;
    if (cfg.make_text) {
      std::size_t start = 0;
      for (std::size_t i = 0; i <= query.size(); ++i) {
        if (i == query.size() || query[i] == ' ') {
          query_words.push_back(query.substr(start, i - start));
          start = i + 1;
        }
      }
    }
    for (std::uint32_t didx = 0; didx < n_docs; ++didx) {
      SimDoc& doc = docs[didx];
      doc.relevance = rng.beta(cfg.rel_alpha, cfg.rel_beta);
      doc.url = "http://" + qtoken + "d" + base26(didx, 2) + ".example.com/";
      if (cfg.make_text) {
        // Document text shares query words more often when relevant, which
        // gives lexical scorers a learnable signal.
        const double share = 0.2 + 0.6 * doc.relevance;
        std::string title, bte;
        for (const auto& word : query_words) {
          if (rng.bernoulli(share)) {
            if (!title.empty()) title += ' ';
            title += word;
          }
        }
        for (int i = 0; i < 3; ++i) {
          if (!title.empty()) title += ' ';
          title += random_word(rng);
        }
        bte = title;
        for (int i = 0; i < 6; ++i) bte += ' ' + random_word(rng);
        doc.title = std::move(title);
        doc.bte = std::move(bte);
      }
      if (truth) truth->relevance[{query, doc.url}] = doc.relevance;
    }

    const std::uint32_t n_requests =
        cfg.min_requests +
        static_cast<std::uint32_t>(rng.next_below(cfg.max_requests - cfg.min_requests + 1));
    std::vector<std::uint32_t> order(n_docs);
    std::vector<double> engine_score(n_docs);
    for (std::uint32_t ridx = 0; ridx < n_requests; ++ridx) {
      ++counters.requests;
      Request request;
      request.request_id = qtoken + "r" + std::to_string(ridx);
      request.query = query;
      // The engine approximates relevance ranking with per-request noise.
      for (std::uint32_t d = 0; d < n_docs; ++d) {
        engine_score[d] = docs[d].relevance + cfg.ranking_noise * rng.normal();
      }
      std::iota(order.begin(), order.end(), 0u);
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (engine_score[a] != engine_score[b]) return engine_score[a] > engine_score[b];
        return a < b;
      });

      std::int64_t last_click_pos = -1;
      request.impressions.reserve(n_docs);
      for (std::uint32_t rank = 0; rank < n_docs; ++rank) {
        const SimDoc& doc = docs[order[rank]];
        ImpressionRecord imp;
        imp.request_id = request.request_id;
        imp.query = query;
        imp.url = doc.url;
        imp.title = doc.title;
        imp.bte = doc.bte;
        imp.rank = rank;
        const bool examined = rng.bernoulli(cfg.examination_probability(rank));
        if (examined) ++counters.examined;
        bool clicked = false;
        if (examined) {
          const double p_click = std::min(
              1.0, cfg.click_floor + cfg.click_scale * std::pow(doc.relevance, cfg.click_power));
          clicked = rng.bernoulli(p_click);
        }
        if (clicked) {
          ++counters.clicked_impressions;
          imp.clicks = rng.bernoulli(cfg.double_click_prob) ? 2 : 1;
          counters.clicks_by_rank[rank] += imp.clicks;
          const double dwell =
              rng.lognormal(cfg.dwell_mu0 + cfg.dwell_mu_rel * doc.relevance, cfg.dwell_sigma);
          imp.dwell_time = static_cast<std::uint32_t>(
              std::min(dwell, 86400.0));  // cap at a day, logs do not run longer
          last_click_pos = static_cast<std::int64_t>(request.impressions.size());
        } else if (cfg.rank_missing_prob > 0.0 && rng.bernoulli(cfg.rank_missing_prob)) {
          imp.rank.reset();  // document dropped from the index since logging
        }
        counters.clicks += imp.clicks;
        request.impressions.push_back(std::move(imp));
      }
      // Dwell of the final click is typically not observed: the user does
      // not come back to the results page.
      if (last_click_pos >= 0 && rng.bernoulli(cfg.last_click_dwell_missing_prob)) {
        request.impressions[static_cast<std::size_t>(last_click_pos)].dwell_time.reset();
      }
      for (const auto& imp : request.impressions) {
        if (imp.dwell_time) {
          ++counters.dwell_rows;
          counters.dwell_sum += *imp.dwell_time;
        }
      }
      counters.rows += request.impressions.size();
      request.normalize();
      sink(request);
    }
  }
  return counters;
}

std::pair<std::vector<Request>, SimTruth> generate_log_vector(const SimConfig& cfg,
                                                              SimCounters* counters) {
  std::vector<Request> requests;
  SimTruth truth;
  SimCounters c = generate_log(cfg, [&](const Request& r) { requests.push_back(r); }, &truth);
  if (counters) *counters = c;
  return {std::move(requests), std::move(truth)};
}

double FidelityReport::rho(std::string_view scheme) const {
  for (const auto& entry : correlations) {
    if (entry.scheme == scheme) return entry.rho;
  }
  throw InternalError("unknown scheme '" + std::string(scheme) + "'");
}

FidelityReport fidelity_report(const SimConfig& cfg, const CurationPolicy& policy) {
  SimConfig gen_cfg = cfg;
  gen_cfg.make_text = false;  // labels never look at text

  // Pass 1: frequency bounds over the deterministic stream.
  FrequencyBounds bounds(policy);
  SimTruth truth;
  generate_log(gen_cfg, [&](const Request& request) {
    if (!query_eligible(request.query, policy)) return;
    bounds.observe(request.query, request.request_id);
  }, &truth);
  bounds.finalize();

  // Pass 2: regenerate, curate, aggregate.
  Aggregator aggregator;
  std::uint64_t seq = 0;
  generate_log(gen_cfg, [&](const Request& request) {
    if (!query_eligible(request.query, policy)) return;
    if (!bounds.keep(request.query, request.request_id)) return;
    const Request truncated = truncate_request(request, policy);
    aggregator.add(truncated, seq);
    seq += truncated.impressions.size();
  }, nullptr);
  const std::vector<AggregatedPair> pairs = aggregator.finish();

  std::vector<double> gold;
  gold.reserve(pairs.size());
  for (const auto& pair : pairs) {
    gold.push_back(truth.relevance.at({pair.query, pair.url}));
  }
  FidelityReport report;
  report.pairs = pairs.size();
  report.correlations = correlation_report(pairs, gold);
  std::sort(report.correlations.begin(), report.correlations.end(),
            [](const SchemeCorrelation& a, const SchemeCorrelation& b) { return a.rho < b.rho; });
  return report;
}

}  // namespace clicklab
