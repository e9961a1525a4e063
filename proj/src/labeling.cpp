#include "clicklab/labeling.hpp"

#include <cmath>

#include "clicklab/errors.hpp"

namespace clicklab {

void LabelConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) {
    throw DataError(ErrorKind::InvariantViolation, "alpha and beta must be >= 0");
  }
  if (!(scale_s > 0.0) || !(rank_c > 0.0)) {
    throw DataError(ErrorKind::InvariantViolation, "scale s and constant C must be > 0");
  }
  if (dwell_missing == DwellMissing::Constant && !(dwell_missing_value >= 0.0)) {
    throw DataError(ErrorKind::InvariantViolation, "constant dwell fill must be >= 0");
  }
}

std::string to_string(LabelFormula formula) {
  switch (formula) {
    case LabelFormula::Clicks: return "clicks";
    case LabelFormula::Dwell: return "dwell";
    case LabelFormula::Rank: return "rank";
    case LabelFormula::ClickDwellRank: return "cdr";
  }
  return "?";
}

LabelFormula label_formula_from_string(std::string_view name) {
  if (name == "clicks") return LabelFormula::Clicks;
  if (name == "dwell") return LabelFormula::Dwell;
  if (name == "rank") return LabelFormula::Rank;
  if (name == "cdr" || name == "clickdwellrank") return LabelFormula::ClickDwellRank;
  throw UsageError("unknown label formula '" + std::string(name) + "'");
}

double clip01(double x) {
  if (!std::isfinite(x)) {
    throw DataError(ErrorKind::NonFinite, "clip01 input is not finite");
  }
  return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
}

double weighted_clicks(const AggregatedPair& pair, const LabelConfig& cfg) {
  return cfg.alpha * static_cast<double>(pair.nonlast_clicks) +
         cfg.beta * static_cast<double>(pair.last_clicks);
}

double click_label(const AggregatedPair& pair, const LabelConfig& cfg) {
  return clip01(cfg.scale_s * std::log1p(weighted_clicks(pair, cfg)));
}

double dwell_label(const AggregatedPair& pair, const LabelConfig& cfg) {
  double dwell = static_cast<double>(pair.dwell_total);
  if (pair.dwell_known == 0) {
    switch (cfg.dwell_missing) {
      case LabelConfig::DwellMissing::Zero:
        dwell = 0.0;
        break;
      case LabelConfig::DwellMissing::GlobalMean:
        if (!cfg.global_mean_dwell) {
          throw DataError(ErrorKind::PolicyUnresolved,
                          "global_mean dwell policy requires a precomputed corpus mean");
        }
        dwell = *cfg.global_mean_dwell;
        break;
      case LabelConfig::DwellMissing::Constant:
        dwell = cfg.dwell_missing_value;
        break;
    }
  }
  return clip01(cfg.scale_s * std::log1p(dwell));
}

double rank_label(const AggregatedPair& pair, const LabelConfig& cfg) {
  return static_cast<double>(pair.views) / (static_cast<double>(pair.rank_sum) + cfg.rank_c);
}

double click_dwell_rank_label(const AggregatedPair& pair, const LabelConfig& cfg) {
  const double rank_term =
      static_cast<double>(pair.views) / (static_cast<double>(pair.rank_sum) + cfg.rank_c);
  const double dwell_clipped = std::max(1.0, static_cast<double>(pair.dwell_total));
  return clip01(cfg.scale_s *
                std::log1p((weighted_clicks(pair, cfg) + rank_term) * dwell_clipped));
}

double label_for(LabelFormula formula, const AggregatedPair& pair, const LabelConfig& cfg) {
  switch (formula) {
    case LabelFormula::Clicks: return click_label(pair, cfg);
    case LabelFormula::Dwell: return dwell_label(pair, cfg);
    case LabelFormula::Rank: return rank_label(pair, cfg);
    case LabelFormula::ClickDwellRank: return click_dwell_rank_label(pair, cfg);
  }
  throw InternalError("unhandled label formula");
}

double loss_weight(const AggregatedPair& pair, const LabelConfig& cfg) {
  switch (cfg.weight_mode) {
    case LabelConfig::WeightMode::None:
      return 1.0;
    case LabelConfig::WeightMode::Views:
      return std::log(2.0 + static_cast<double>(pair.views));
    case LabelConfig::WeightMode::Clicks:
      return std::log(2.0 + static_cast<double>(pair.clicks_total));
  }
  throw InternalError("unhandled weight mode");
}

std::optional<double> corpus_mean_dwell(std::span<const AggregatedPair> pairs) {
  double sum = 0.0;
  std::uint64_t known = 0;
  for (const auto& pair : pairs) {
    if (pair.dwell_known > 0) {
      sum += static_cast<double>(pair.dwell_total);
      ++known;
    }
  }
  if (known == 0) return std::nullopt;
  return sum / static_cast<double>(known);
}

void resolve_dwell_policy(LabelConfig& cfg, std::span<const AggregatedPair> pairs) {
  if (cfg.dwell_missing == LabelConfig::DwellMissing::GlobalMean && !cfg.global_mean_dwell) {
    cfg.global_mean_dwell = corpus_mean_dwell(pairs);
    if (!cfg.global_mean_dwell) {
      throw DataError(ErrorKind::PolicyUnresolved,
                      "global_mean dwell policy: corpus has no pair with known dwell");
    }
  }
}

}  // namespace clicklab
