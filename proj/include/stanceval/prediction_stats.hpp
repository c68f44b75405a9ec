#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "stanceval/types.hpp"

namespace stanceval {

// Per (scorer, argument) summary across repetitions. The scorer is either a
// model or an ensemble pooling its members' repetitions.
struct PredictionSummary {
  std::string scorer_id;
  std::string argument_id;
  std::optional<double> mean_score;  // over non-NA repetitions; unset when all NA
  std::optional<double> score_sd;    // sample sd; unset when < 2 non-NA repetitions
  double na_probability = 0.0;       // (#NA)/n_reps
  int na_count = 0;
  int n_reps = 0;
};

struct EnsembleSpec {
  std::string ensemble_id;
  std::vector<std::string> member_model_ids;  // distinct, nonempty
};

// One summary per argument for a single scorer's records. Records must all
// carry the same model_id; the group must be nonempty.
std::vector<PredictionSummary> summarize(std::span<const PredictionRecord> records);

// Summaries for every model present in the record set, concatenated in
// model-id order.
std::vector<PredictionSummary> summarize_all(std::span<const PredictionRecord> records);

// Ensemble summaries over the pooled repetition set of all members. Every
// member must contribute at least one record.
std::vector<PredictionSummary> pool_ensemble(const EnsembleSpec& spec,
                                             std::span<const PredictionRecord> records);

// Models whose political-majority argument count strictly exceeds their
// apolitical-majority count. An argument counts as political for a model iff
// the majority of that model's repetitions produced a numeric score; an exact
// tie counts as apolitical.
std::set<std::string> select_high_confidence_models(std::span<const PredictionRecord> records,
                                                    const std::vector<std::string>& candidates);

}  // namespace stanceval
