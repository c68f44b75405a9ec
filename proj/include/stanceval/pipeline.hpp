#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stanceval/btrank.hpp"
#include "stanceval/pointwise.hpp"
#include "stanceval/rank_eval.hpp"

namespace stanceval {

struct EnsembleConfig {
  std::string id;
  std::vector<std::string> members;   // explicit membership
  bool high_confidence_rule = false;  // membership computed from predictions
};

// One config drives the whole pipeline. Input paths resolve relative to the
// config file; the semantic hash covers everything that can change results
// (so artifacts from different configs cannot be mixed silently) but not
// file locations.
struct PipelineConfig {
  std::filesystem::path predictions_path;
  std::filesystem::path pointwise_path;
  std::filesystem::path pairwise_path;
  std::filesystem::path arguments_path;  // optional; empty when absent

  std::vector<EnsembleConfig> ensembles;
  std::string reference_ensemble;

  std::optional<BucketCounts> pointwise_counts;  // absent: bucket the annotated set
  double binarize_threshold = 0.5;

  std::size_t intra_per_bin = 44;
  std::size_t inter_per_bin_pair = 22;
  std::optional<std::size_t> max_items;

  BtSettings bt;
  double confidence_margin = 0.25;
  TieMode tie_mode = TieMode::loss;
  std::uint64_t seed = 0;

  std::filesystem::path output_dir = "out";
  bool force = false;  // skip artifact hash checks

  static PipelineConfig from_file(const std::filesystem::path& path);
  static PipelineConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

  nlohmann::json semantic_json() const;
  std::string hash() const;  // sha256 of the canonical semantic serialization
  void validate() const;
};

// Pipeline stages. Each stage reads its upstream artifacts from disk and
// writes its own into output_dir, so running stages individually composes to
// exactly what run_pipeline produces.
void stage_aggregate(const PipelineConfig& cfg);       // -> summaries.csv (model rows)
void stage_ensemble(const PipelineConfig& cfg);        // -> summaries.csv (+ ensemble rows)
void stage_pointwise_eval(const PipelineConfig& cfg);  // -> pointwise_dataset.csv, pointwise_metrics.csv
void stage_sample_pairs(const PipelineConfig& cfg);    // -> pairs.csv, pair_diagnostics.json
void stage_win_matrices(const PipelineConfig& cfg);    // -> matrices/*.matrix.csv, *.pairs.csv
void stage_fit_bt(const PipelineConfig& cfg);          // -> scales/*.json
void stage_rank_eval(const PipelineConfig& cfg);       // -> report.json, report.csv
void write_manifest(const PipelineConfig& cfg);        // -> manifest.json

// All stages in order plus the manifest. Throws on the first stage failure
// with a stage-qualified message.
void run_pipeline(const PipelineConfig& cfg);

// Ensemble membership with any high-confidence rules resolved against the
// prediction records.
std::vector<EnsembleSpec> resolve_ensembles(const PipelineConfig& cfg,
                                            const std::vector<PredictionRecord>& records);

// Shortest round-trip decimal form, used by every artifact writer.
std::string format_double(double value);

}  // namespace stanceval
