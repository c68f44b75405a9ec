#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>

#include "stanceval/prediction_stats.hpp"
#include "stanceval/reliability.hpp"

namespace stanceval {

// Confidence buckets over the reference ensemble's NA probability:
//   h_pol  : pi <= 0.05   (high confidence, political)
//   low    : pi in [0.45, 0.55]
//   h_apol : pi >= 0.95   (high confidence, apolitical)
enum class Bucket { h_pol, low, h_apol };

const char* to_string(Bucket bucket);

// Bucket for pi, or nullopt when pi falls in the gaps between thresholds.
// Throws ValidationError for pi outside [0,1].
std::optional<Bucket> assign_bucket(double pi);

struct BucketCounts {
  std::size_t h_pol = 0;
  std::size_t low = 0;
  std::size_t h_apol = 0;
};

// Bucketed sample with its strict confidence partition:
// conf = h_pol + h_apol members, ambig = low members; the two partitions are
// disjoint and exhaustive by construction.
struct PointwiseDataset {
  std::map<std::string, Bucket> members;
  std::set<std::string> conf;
  std::set<std::string> ambig;
  std::uint64_t seed = 0;

  std::set<std::string> all_ids() const;
};

// Uniform sample without replacement per bucket, drawn from the reference
// scorer's summaries. Deterministic under (seed); each bucket uses its own
// stream so draws are independent.
PointwiseDataset sample_dataset(std::span<const PredictionSummary> reference_summaries,
                                const BucketCounts& counts, std::uint64_t seed);

// Buckets every argument in the summaries without sampling (used when the
// annotated set is given rather than drawn).
PointwiseDataset bucket_dataset(std::span<const PredictionSummary> reference_summaries,
                                const std::set<std::string>& ids);

// apolitical iff na_probability > threshold (strict).
PointwiseLabel binarize_prediction(const PredictionSummary& summary, double threshold = 0.5);

struct ClassificationMetrics {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;           // instance-level accuracy over the subset
  double precision = 0.0;          // political as positive class
  double recall = 0.0;
  double balanced_accuracy = 0.0;  // mean of per-class recalls
};

ClassificationMetrics classification_metrics(const std::map<std::string, PointwiseLabel>& truth,
                                             const std::map<std::string, PointwiseLabel>& pred,
                                             const std::set<std::string>& subset);

// Nominal alpha across >= 2 models' binary predictions over the subset.
AlphaResult inter_model_alpha(
    const std::map<std::string, std::map<std::string, PointwiseLabel>>& predictions_by_model,
    const std::set<std::string>& subset);

}  // namespace stanceval
