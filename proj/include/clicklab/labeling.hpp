#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "clicklab/aggregation.hpp"

namespace clicklab {

// All constants of the pseudo-label formulas. log means natural log
// throughout; the scale factor absorbs the base and orderings are
// base-invariant.
struct LabelConfig {
  double alpha = 1.0;          // weight of nonlast clicks
  double beta = 1.0;           // weight of the last click
  double scale_s = 1.0 / 20.0; // chosen so desk-scale labels stay below 1
  double rank_c = 100.0;       // rank smoothing, boosts frequent documents

  enum class DwellMissing { Zero, GlobalMean, Constant };
  DwellMissing dwell_missing = DwellMissing::Constant;
  double dwell_missing_value = 20.0;
  // Mean of dwell_total over pairs with known dwell; must be precomputed
  // (set_global_mean_dwell) before labeling with the GlobalMean policy.
  std::optional<double> global_mean_dwell;

  enum class WeightMode { None, Views, Clicks };
  WeightMode weight_mode = WeightMode::None;

  void validate() const;
};

enum class LabelFormula { Clicks, Dwell, Rank, ClickDwellRank };

std::string to_string(LabelFormula formula);
LabelFormula label_formula_from_string(std::string_view name);

// max(0, min(1, x)); throws NonFinite on NaN or infinity.
double clip01(double x);

// alpha * nonlast_clicks + beta * last_clicks
double weighted_clicks(const AggregatedPair& pair, const LabelConfig& cfg);

// clip01(s * ln(1 + wclicks))
double click_label(const AggregatedPair& pair, const LabelConfig& cfg);

// clip01(s * ln(1 + D)), D = dwell_total when known, else the missing policy
// value. Throws PolicyUnresolved for GlobalMean without a precomputed mean.
double dwell_label(const AggregatedPair& pair, const LabelConfig& cfg);

// views / (rank_sum + C); reciprocal of mean rank, unclipped.
double rank_label(const AggregatedPair& pair, const LabelConfig& cfg);

// clip01(s * ln(1 + (wclicks + views/(rank_sum + C)) * max(1, dwell_total))).
// The rank term acts as a tie breaker among pairs with equal clicks and
// dwell; unclicked pairs reduce exactly to the rank term.
double click_dwell_rank_label(const AggregatedPair& pair, const LabelConfig& cfg);

double label_for(LabelFormula formula, const AggregatedPair& pair, const LabelConfig& cfg);

// none -> 1, views -> ln(2 + views), clicks -> ln(2 + clicks_total).
// Strictly positive in every mode.
double loss_weight(const AggregatedPair& pair, const LabelConfig& cfg);

// Mean of dwell_total over pairs with dwell_known > 0 (the GlobalMean
// policy's corpus statistic). nullopt when no pair has known dwell.
std::optional<double> corpus_mean_dwell(std::span<const AggregatedPair> pairs);

// Convenience: resolves GlobalMean from the corpus when required.
void resolve_dwell_policy(LabelConfig& cfg, std::span<const AggregatedPair> pairs);

}  // namespace clicklab
