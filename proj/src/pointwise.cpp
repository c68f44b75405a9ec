#include "stanceval/pointwise.hpp"

#include <algorithm>

#include "stanceval/errors.hpp"
#include "stanceval/rng.hpp"

namespace stanceval {

const char* to_string(Bucket bucket) {
  switch (bucket) {
    case Bucket::h_pol: return "h_pol";
    case Bucket::low: return "low";
    case Bucket::h_apol: return "h_apol";
  }
  return "low";
}

std::optional<Bucket> assign_bucket(double pi) {
  if (!(pi >= 0.0 && pi <= 1.0))
    throw ValidationError("assign_bucket: na_probability outside [0,1]: " + std::to_string(pi));
  if (pi <= 0.05) return Bucket::h_pol;
  if (pi >= 0.95) return Bucket::h_apol;
  if (pi >= 0.45 && pi <= 0.55) return Bucket::low;
  return std::nullopt;
}

std::set<std::string> PointwiseDataset::all_ids() const {
  std::set<std::string> ids;
  for (const auto& [id, bucket] : members) ids.insert(id);
  return ids;
}

namespace {

void finalize_partition(PointwiseDataset& dataset) {
  for (const auto& [id, bucket] : dataset.members) {
    if (bucket == Bucket::low)
      dataset.ambig.insert(id);
    else
      dataset.conf.insert(id);
  }
}

}  // namespace

PointwiseDataset sample_dataset(std::span<const PredictionSummary> reference_summaries,
                                const BucketCounts& counts, std::uint64_t seed) {
  std::map<Bucket, std::vector<std::string>> pool;
  for (const auto& s : reference_summaries) {
    if (auto bucket = assign_bucket(s.na_probability)) pool[*bucket].push_back(s.argument_id);
  }
  for (auto& [bucket, ids] : pool) std::sort(ids.begin(), ids.end());

  PointwiseDataset dataset;
  dataset.seed = seed;
  const std::pair<Bucket, std::size_t> requested[] = {
      {Bucket::h_pol, counts.h_pol}, {Bucket::low, counts.low}, {Bucket::h_apol, counts.h_apol}};
  for (const auto& [bucket, count] : requested) {
    const auto& ids = pool[bucket];
    if (ids.size() < count)
      throw ValidationError(std::string("sample_dataset: bucket ") + to_string(bucket) +
                            " has only " + std::to_string(ids.size()) + " candidates, " +
                            std::to_string(count) + " requested (short by " +
                            std::to_string(count - ids.size()) + ")");
    Rng rng(seed, std::string("pointwise-bucket:") + to_string(bucket));
    for (std::size_t idx : sample_indices(ids.size(), count, rng))
      dataset.members.emplace(ids[idx], bucket);
  }
  finalize_partition(dataset);
  return dataset;
}

PointwiseDataset bucket_dataset(std::span<const PredictionSummary> reference_summaries,
                                const std::set<std::string>& ids) {
  PointwiseDataset dataset;
  for (const auto& s : reference_summaries) {
    if (!ids.count(s.argument_id)) continue;
    if (auto bucket = assign_bucket(s.na_probability)) dataset.members.emplace(s.argument_id, *bucket);
  }
  finalize_partition(dataset);
  return dataset;
}

PointwiseLabel binarize_prediction(const PredictionSummary& summary, double threshold) {
  return summary.na_probability > threshold ? PointwiseLabel::apolitical : PointwiseLabel::political;
}

ClassificationMetrics classification_metrics(const std::map<std::string, PointwiseLabel>& truth,
                                             const std::map<std::string, PointwiseLabel>& pred,
                                             const std::set<std::string>& subset) {
  if (subset.empty()) throw ValidationError("classification_metrics: empty subset");
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& id : subset) {
    auto t = truth.find(id);
    auto p = pred.find(id);
    if (t == truth.end() || p == pred.end())
      throw ValidationError("classification_metrics: id '" + id + "' missing from truth or pred");
    const bool t_pol = t->second == PointwiseLabel::political;
    const bool p_pol = p->second == PointwiseLabel::political;
    if (t_pol && p_pol) ++tp;
    else if (!t_pol && p_pol) ++fp;
    else if (t_pol && !p_pol) ++fn;
    else ++tn;
  }

  auto f1 = [](long tp_c, long fp_c, long fn_c) {
    const long denom = 2 * tp_c + fp_c + fn_c;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp_c) / static_cast<double>(denom);
  };
  auto rate = [](long num, long den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };

  ClassificationMetrics m;
  // Political is the positive class; apolitical metrics mirror the counts.
  const double f1_pol = f1(tp, fp, fn);
  const double f1_apol = f1(tn, fn, fp);
  m.macro_f1 = 0.5 * (f1_pol + f1_apol);
  m.micro_f1 = rate(tp + tn, tp + tn + fp + fn);
  m.precision = rate(tp, tp + fp);
  m.recall = rate(tp, tp + fn);
  m.balanced_accuracy = 0.5 * (rate(tp, tp + fn) + rate(tn, tn + fp));
  return m;
}

AlphaResult inter_model_alpha(
    const std::map<std::string, std::map<std::string, PointwiseLabel>>& predictions_by_model,
    const std::set<std::string>& subset) {
  if (predictions_by_model.size() < 2)
    throw ValidationError("inter_model_alpha: requires >= 2 models");
  ReliabilityGrid grid(Level::nominal);
  for (const auto& [model, labels] : predictions_by_model) {
    for (const auto& id : subset) {
      auto it = labels.find(id);
      if (it != labels.end())
        grid.set(id, model, it->second == PointwiseLabel::political ? 1 : 0);
    }
  }
  return krippendorff_alpha(grid);
}

}  // namespace stanceval
