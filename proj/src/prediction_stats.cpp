#include "stanceval/prediction_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stanceval/errors.hpp"

namespace stanceval {

namespace {

// Values are accumulated in (argument_id, model_id, repetition) order so that
// sums do not depend on input ordering or scheduling.
struct RepGroup {
  std::vector<double> scores;  // non-NA values, canonical order
  int na_count = 0;
};

PredictionSummary summarize_group(const std::string& scorer_id, const std::string& argument_id,
                                  const RepGroup& group) {
  PredictionSummary s;
  s.scorer_id = scorer_id;
  s.argument_id = argument_id;
  s.na_count = group.na_count;
  s.n_reps = group.na_count + static_cast<int>(group.scores.size());
  s.na_probability = static_cast<double>(group.na_count) / static_cast<double>(s.n_reps);
  if (!group.scores.empty()) {
    double sum = 0.0;
    for (double v : group.scores) sum += v;
    const double mean = sum / static_cast<double>(group.scores.size());
    s.mean_score = mean;
    if (group.scores.size() >= 2) {
      double sq = 0.0;
      for (double v : group.scores) sq += (v - mean) * (v - mean);
      s.score_sd = std::sqrt(sq / static_cast<double>(group.scores.size() - 1));
    }
  }
  return s;
}

std::vector<PredictionSummary> summarize_pooled(const std::string& scorer_id,
                                                std::span<const PredictionRecord> records) {
  if (records.empty()) throw ValidationError("summarize: empty record group for " + scorer_id);
  std::map<std::string, RepGroup> by_argument;
  std::vector<const PredictionRecord*> ordered;
  ordered.reserve(records.size());
  for (const auto& r : records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return std::tie(a->argument_id, a->model_id, a->repetition) <
           std::tie(b->argument_id, b->model_id, b->repetition);
  });
  for (const auto* r : ordered) {
    auto& group = by_argument[r->argument_id];
    if (r->is_na())
      ++group.na_count;
    else
      group.scores.push_back(*r->value);
  }
  std::vector<PredictionSummary> out;
  out.reserve(by_argument.size());
  for (const auto& [argument_id, group] : by_argument)
    out.push_back(summarize_group(scorer_id, argument_id, group));
  return out;
}

}  // namespace

std::vector<PredictionSummary> summarize(std::span<const PredictionRecord> records) {
  if (records.empty()) throw ValidationError("summarize: empty record group");
  const std::string& scorer = records.front().model_id;
  for (const auto& r : records)
    if (r.model_id != scorer)
      throw ValidationError("summarize: records span multiple scorers (" + scorer + ", " +
                            r.model_id + ")");
  return summarize_pooled(scorer, records);
}

std::vector<PredictionSummary> summarize_all(std::span<const PredictionRecord> records) {
  std::map<std::string, std::vector<PredictionRecord>> by_model;
  for (const auto& r : records) by_model[r.model_id].push_back(r);
  std::vector<PredictionSummary> out;
  for (const auto& [model, group] : by_model) {
    auto summaries = summarize_pooled(model, group);
    out.insert(out.end(), summaries.begin(), summaries.end());
  }
  return out;
}

std::vector<PredictionSummary> pool_ensemble(const EnsembleSpec& spec,
                                             std::span<const PredictionRecord> records) {
  if (spec.member_model_ids.empty())
    throw ValidationError("ensemble " + spec.ensemble_id + ": no members");
  std::set<std::string> members(spec.member_model_ids.begin(), spec.member_model_ids.end());
  if (members.size() != spec.member_model_ids.size())
    throw ValidationError("ensemble " + spec.ensemble_id + ": duplicate members");

  std::vector<PredictionRecord> pooled;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (members.count(r.model_id)) {
      pooled.push_back(r);
      seen.insert(r.model_id);
    }
  }
  for (const auto& m : members)
    if (!seen.count(m))
      throw ValidationError("ensemble " + spec.ensemble_id + ": member '" + m +
                            "' has no prediction records");
  return summarize_pooled(spec.ensemble_id, pooled);
}

std::set<std::string> select_high_confidence_models(std::span<const PredictionRecord> records,
                                                    const std::vector<std::string>& candidates) {
  if (candidates.empty())
    throw ValidationError("select_high_confidence_models: empty candidate set");
  std::set<std::string> candidate_set(candidates.begin(), candidates.end());

  // (model, argument) -> (numeric reps, NA reps)
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> counts;
  for (const auto& r : records) {
    if (!candidate_set.count(r.model_id)) continue;
    auto& c = counts[{r.model_id, r.argument_id}];
    if (r.is_na())
      ++c.second;
    else
      ++c.first;
  }

  std::map<std::string, std::pair<long, long>> per_model;  // political vs apolitical arguments
  for (const auto& [key, c] : counts) {
    auto& tally = per_model[key.first];
    if (c.first > c.second)
      ++tally.first;  // numeric majority: political
    else
      ++tally.second;  // NA majority or tie: apolitical
  }

  std::set<std::string> selected;
  for (const auto& m : candidate_set) {
    auto it = per_model.find(m);
    if (it == per_model.end())
      throw ValidationError("select_high_confidence_models: candidate '" + m +
                            "' has no prediction records");
    if (it->second.first > it->second.second) selected.insert(m);
  }
  return selected;
}

}  // namespace stanceval
