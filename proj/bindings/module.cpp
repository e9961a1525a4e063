#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clicklab/aggregation.hpp"
#include "clicklab/curation.hpp"
#include "clicklab/errors.hpp"
#include "clicklab/evaluation.hpp"
#include "clicklab/labeling.hpp"
#include "clicklab/pipeline.hpp"
#include "clicklab/records.hpp"
#include "clicklab/sampling.hpp"
#include "clicklab/scoring.hpp"
#include "clicklab/simulator.hpp"

namespace py = pybind11;
using namespace clicklab;

namespace {

LabelConfig make_label_config(double alpha, double beta, double s, double c,
                              const std::string& dwell_missing, double dwell_constant,
                              const std::string& weights) {
  LabelConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.scale_s = s;
  cfg.rank_c = c;
  if (dwell_missing == "zero") {
    cfg.dwell_missing = LabelConfig::DwellMissing::Zero;
  } else if (dwell_missing == "mean") {
    cfg.dwell_missing = LabelConfig::DwellMissing::GlobalMean;
  } else if (dwell_missing == "const") {
    cfg.dwell_missing = LabelConfig::DwellMissing::Constant;
    cfg.dwell_missing_value = dwell_constant;
  } else {
    throw UsageError("dwell_missing expects zero|mean|const");
  }
  if (weights == "none") {
    cfg.weight_mode = LabelConfig::WeightMode::None;
  } else if (weights == "views") {
    cfg.weight_mode = LabelConfig::WeightMode::Views;
  } else if (weights == "clicks") {
    cfg.weight_mode = LabelConfig::WeightMode::Clicks;
  } else {
    throw UsageError("weights expects none|views|clicks");
  }
  cfg.validate();
  return cfg;
}

RankedQuery ranked_query_from_items(
    const std::vector<std::tuple<std::string, double, double>>& items) {
  RankedQuery rq;
  rq.query = "q";
  for (const auto& [url, gold, score] : items) {
    rq.items.push_back(RankedItem{url, gold, score});
  }
  return rq;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Click-log mining, relevance pseudo-labeling, and ranking evaluation";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<UsageError>(m, "UsageError");

  py::class_<AggregatedPair>(m, "AggregatedPair")
      .def(py::init([](std::string query, std::string url, std::uint64_t views,
                       std::uint64_t clicks_total, std::uint64_t nonlast_clicks,
                       std::uint64_t last_clicks, std::uint64_t dwell_total,
                       std::uint64_t dwell_known, std::uint64_t rank_sum,
                       std::uint64_t rank_known) {
             AggregatedPair pair;
             pair.query = std::move(query);
             pair.url = std::move(url);
             pair.views = views;
             pair.clicks_total = clicks_total;
             pair.nonlast_clicks = nonlast_clicks;
             pair.last_clicks = last_clicks;
             pair.dwell_total = dwell_total;
             pair.dwell_known = dwell_known;
             pair.rank_sum = rank_sum;
             pair.rank_known = rank_known;
             return pair;
           }),
           py::arg("query") = "", py::arg("url") = "", py::arg("views") = 1,
           py::arg("clicks_total") = 0, py::arg("nonlast_clicks") = 0, py::arg("last_clicks") = 0,
           py::arg("dwell_total") = 0, py::arg("dwell_known") = 0, py::arg("rank_sum") = 0,
           py::arg("rank_known") = 0)
      .def_readwrite("query", &AggregatedPair::query)
      .def_readwrite("url", &AggregatedPair::url)
      .def_readwrite("title", &AggregatedPair::title)
      .def_readwrite("bte", &AggregatedPair::bte)
      .def_readwrite("views", &AggregatedPair::views)
      .def_readwrite("clicks_total", &AggregatedPair::clicks_total)
      .def_readwrite("nonlast_clicks", &AggregatedPair::nonlast_clicks)
      .def_readwrite("last_clicks", &AggregatedPair::last_clicks)
      .def_readwrite("dwell_total", &AggregatedPair::dwell_total)
      .def_readwrite("dwell_known", &AggregatedPair::dwell_known)
      .def_readwrite("rank_sum", &AggregatedPair::rank_sum)
      .def_readwrite("rank_known", &AggregatedPair::rank_known);

  m.def("make_label_config", &make_label_config, py::arg("alpha") = 1.0, py::arg("beta") = 1.0,
        py::arg("s") = 1.0 / 20.0, py::arg("c") = 100.0, py::arg("dwell_missing") = "const",
        py::arg("dwell_constant") = 20.0, py::arg("weights") = "none");
  py::class_<LabelConfig>(m, "LabelConfig")
      .def_readwrite("alpha", &LabelConfig::alpha)
      .def_readwrite("beta", &LabelConfig::beta)
      .def_readwrite("scale_s", &LabelConfig::scale_s)
      .def_readwrite("rank_c", &LabelConfig::rank_c)
      .def_readwrite("global_mean_dwell", &LabelConfig::global_mean_dwell);

  m.def("clip01", &clip01);
  m.def("weighted_clicks", &weighted_clicks);
  m.def("click_label", &click_label);
  m.def("dwell_label", &dwell_label);
  m.def("rank_label", &rank_label);
  m.def("click_dwell_rank_label", &click_dwell_rank_label);
  m.def("loss_weight", &loss_weight);

  m.def(
      "ndcg_at_10",
      [](const std::vector<std::tuple<std::string, double, double>>& items) {
        return ndcg_at_10(ranked_query_from_items(items));
      },
      "items: list of (url, gold_label, model_score)");
  m.def("precision_at_10",
        [](const std::vector<std::tuple<std::string, double, double>>& items) {
          return precision_at_10(ranked_query_from_items(items));
        });
  m.def("spearman", [](const std::vector<double>& xs, const std::vector<double>& ys) {
    return spearman(xs, ys);
  });
  m.def(
      "mc_permutation_test",
      [](const std::vector<double>& a, const std::vector<double>& b, std::uint64_t samples,
         std::uint64_t seed) { return mc_permutation_test(a, b, samples, seed); },
      py::arg("a"), py::arg("b"), py::arg("samples") = 100000, py::arg("seed") = 0);

  m.def("cosine_sim", [](const std::vector<double>& q, const std::vector<double>& d) {
    return cosine_sim(q, d);
  });
  m.def(
      "contrastive_loss",
      [](const std::vector<EmbeddingVector>& qs, const std::vector<EmbeddingVector>& ds,
         double tau) {
        const auto result = contrastive_loss(qs, ds, tau);
        return py::make_tuple(result.loss, result.dq, result.dd, result.dtau);
      },
      py::arg("q_embs"), py::arg("d_embs"), py::arg("tau") = 0.07,
      "returns (loss, dq, dd, dtau)");

  py::enum_<Activation>(m, "Activation")
      .value("GELU", Activation::Gelu)
      .value("TANH", Activation::Tanh)
      .value("RELU", Activation::Relu);
  py::class_<InteractionHead>(m, "InteractionHead")
      .def_static("zeros", &InteractionHead::zeros, py::arg("dim"),
                  py::arg("activation") = Activation::Gelu)
      .def_static("random", &InteractionHead::random, py::arg("dim"), py::arg("seed"),
                  py::arg("activation") = Activation::Gelu)
      .def_readonly("dim", &InteractionHead::dim)
      .def("forward", [](const InteractionHead& head, const std::vector<double>& q,
                         const std::vector<double>& d) { return head_forward(q, d, head); });

  m.def("bm25_score",
        [](const std::vector<std::string>& query_terms, const std::vector<std::string>& doc_terms,
           const std::vector<std::vector<std::string>>& corpus, double k1, double b) {
          return bm25_score(query_terms, doc_terms, build_corpus_stats(corpus), k1, b);
        },
        py::arg("query_terms"), py::arg("doc_terms"), py::arg("corpus"), py::arg("k1") = 1.2,
        py::arg("b") = 0.75);

  // File-level pipeline stages.
  m.def(
      "simulate",
      [](const std::string& out, const std::string& truth, std::uint32_t queries,
         std::uint64_t seed, const std::vector<std::string>& overrides) {
        SimConfig cfg;
        cfg.n_queries = queries;
        cfg.rng_seed = seed;
        for (const auto& kv : overrides) pipeline::apply_sim_config_line(cfg, kv);
        const auto counters = pipeline::simulate_files(cfg, out, truth, 0);
        py::dict d;
        d["rows"] = counters.rows;
        d["requests"] = counters.requests;
        d["clicks"] = counters.clicks;
        return d;
      },
      py::arg("out"), py::arg("truth") = "", py::arg("queries") = 100, py::arg("seed") = 1,
      py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "curate",
      [](const std::string& in, const std::string& out, std::uint32_t min_chars,
         std::uint32_t min_requests, std::uint32_t max_requests, std::uint64_t seed) {
        pipeline::CurateOptions options;
        options.policy.min_query_chars = min_chars;
        options.policy.min_unique_requests = min_requests;
        options.policy.max_unique_requests = max_requests;
        options.policy.rng_seed = seed;
        const auto result = pipeline::curate_file(in, out, options);
        return py::make_tuple(result.requests_in, result.requests_out, result.rows_out);
      },
      py::arg("in_path"), py::arg("out_path"), py::arg("min_chars") = 10,
      py::arg("min_requests") = 5, py::arg("max_requests") = 15, py::arg("seed") = 0);
  m.def(
      "aggregate",
      [](const std::string& in, const std::string& out, std::uint64_t mem_budget) {
        pipeline::AggregateOptions options;
        options.mem_budget_bytes = mem_budget;
        return pipeline::aggregate_file(in, out, options);
      },
      py::arg("in_path"), py::arg("out_path"), py::arg("mem_budget") = 0);
  m.def(
      "label",
      [](const std::string& in, const std::string& out, const std::string& formula,
         const LabelConfig& cfg) {
        pipeline::LabelOptions options;
        options.formula = label_formula_from_string(formula);
        options.config = cfg;
        return pipeline::label_file(in, out, options);
      },
      py::arg("in_path"), py::arg("out_path"), py::arg("formula") = "cdr",
      py::arg("config") = LabelConfig{});
  m.def(
      "eval_files",
      [](const std::string& gold, const std::string& scores, const std::string& metric) {
        const auto result =
            pipeline::eval_files(gold, scores, pipeline::eval_metric_from_string(metric));
        return py::make_tuple(result.mean, result.per_query);
      },
      py::arg("gold"), py::arg("scores"), py::arg("metric") = "ndcg10");
  m.def("stats", [](const std::string& path) {
    return pipeline::stats_file(path).to_json();
  });
  m.def(
      "correlate",
      [](const std::string& pairs, const std::string& gold) {
        const auto result = pipeline::correlate_files(pairs, gold);
        py::dict d;
        for (const auto& entry : result.report) d[entry.scheme.c_str()] = entry.rho;
        return d;
      },
      py::arg("pairs"), py::arg("gold"));

  m.attr("__version__") = "0.1.0";
}
