// stanceval: validate pointwise position predictions against human pointwise
// and pairwise annotations. Subcommands mirror the pipeline stages; `run`
// executes all of them from one config.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stanceval/corpus_io.hpp"
#include "stanceval/csv.hpp"
#include "stanceval/errors.hpp"
#include "stanceval/pipeline.hpp"
#include "stanceval/reliability.hpp"
#include "stanceval/version.hpp"

namespace {

using namespace stanceval;

int log_level() {
  const char* env = std::getenv("STANCEVAL_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet" || v == "error") return 0;
  if (v == "debug") return 2;
  return 1;
}

void info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "stanceval: " << msg << '\n';
}

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::string tie_mode;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--output-dir", opts.output_dir, "override the config's output directory");
  cmd->add_option("--seed", opts.seed, "override the config's seed");
  cmd->add_option("--tie-mode", opts.tie_mode,
                  "override tie handling for pairwise macro F1 (loss|randomized)")
      ->check(CLI::IsMember({"loss", "randomized"}));
  cmd->add_flag("--force", opts.force, "skip artifact config-hash checks");
}

PipelineConfig load_config(const CommonOptions& opts) {
  auto cfg = PipelineConfig::from_file(opts.config_path);
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.tie_mode.empty())
    cfg.tie_mode = opts.tie_mode == "randomized" ? TieMode::randomized : TieMode::loss;
  cfg.force = opts.force;
  return cfg;
}

int run_agreement(const std::string& input, const std::string& level_token,
                  const std::string& format, bool as_json) {
  const Level level = level_token == "ordinal" ? Level::ordinal : Level::nominal;
  std::vector<std::tuple<std::string, std::string, std::string>> entries;
  if (format == "pointwise") {
    const auto annotations = load_pointwise_annotations_file(input);
    for (const auto& a : annotations)
      entries.emplace_back(a.argument_id, a.annotator_id, to_string(a.label));
  } else {
    std::ifstream in(input);
    if (!in) throw ValidationError("cannot open file: " + input);
    const auto table = csv::read(in, input);
    const auto c_unit = table.column("unit", input);
    const auto c_rater = table.column("rater", input);
    const auto c_value = table.column("value", input);
    for (const auto& row : table.rows)
      entries.emplace_back(row[c_unit], row[c_rater], row[c_value]);
  }
  const auto grid = ReliabilityGrid::from_long(entries, level);
  const auto result = krippendorff_alpha(grid);
  const char* level_name = level == Level::ordinal ? "ordinal" : "nominal";
  if (as_json) {
    nlohmann::json doc;
    doc["level"] = level_name;
    doc["defined"] = result.defined;
    doc["alpha"] = result.defined ? nlohmann::json(result.value) : nlohmann::json(nullptr);
    doc["pairable_units"] = result.n_pairable_units;
    doc["raters"] = result.n_raters;
    doc["pairable_values"] = result.n_pairable_values;
    std::cout << doc.dump(2) << '\n';
  } else {
    if (result.defined)
      std::cout << "alpha (" << level_name << "): " << format_double(result.value) << '\n';
    else
      std::cout << "alpha (" << level_name << "): undefined (no expected disagreement)\n";
    std::cout << "pairable units: " << result.n_pairable_units
              << ", raters: " << result.n_raters
              << ", pairable values: " << result.n_pairable_values << '\n';
  }
  return 0;
}

int run_fit_bt_single(const PipelineConfig& cfg, const std::string& matrix_path,
                      const std::string& out_path, const std::string& probabilities_path) {
  std::ifstream in(matrix_path);
  if (!in) throw ValidationError("cannot open matrix file: " + matrix_path);
  const auto table = csv::read(in, matrix_path);
  if (table.header.empty() || table.header.front() != "id")
    throw ValidationError(matrix_path + ": matrix file must start with an 'id' column");
  std::vector<std::string> ids(table.header.begin() + 1, table.header.end());
  WinMatrix wm(ids);
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const double v = std::stod(table.rows[i][j + 1]);
      if (i != j && v != 0.0) wm.add_win(i, j, v);
    }
  const auto scale = fit_bt_ilsr(wm, cfg.bt);
  nlohmann::json doc;
  doc["config_hash"] = cfg.hash();
  doc["ids"] = scale.ids;
  doc["theta"] = scale.theta;
  doc["ranking"] = scale.ranking;
  doc["converged"] = scale.converged;
  doc["iterations"] = scale.iterations;
  doc["reg"] = cfg.bt.reg;
  doc["tol"] = cfg.bt.tol;
  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot write file: " + out_path);
  out << doc.dump(2) << '\n';
  if (!probabilities_path.empty()) {
    std::ofstream pout(probabilities_path);
    if (!pout) throw ValidationError("cannot write file: " + probabilities_path);
    const auto p = probability_matrix(scale);
    std::vector<std::string> header{"id"};
    header.insert(header.end(), scale.ids.begin(), scale.ids.end());
    csv::write_row(pout, header);
    for (std::size_t i = 0; i < scale.ids.size(); ++i) {
      std::vector<std::string> row{scale.ids[i]};
      for (std::size_t j = 0; j < scale.ids.size(); ++j)
        row.push_back(format_double(p[i * scale.ids.size() + j]));
      csv::write_row(pout, row);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-scale validation of position predictions"};
  app.set_version_flag("--version", stanceval::kVersion);
  app.require_subcommand(1);

  CommonOptions opts;

  auto* cmd_run = app.add_subcommand("run", "run the full pipeline");
  add_common(cmd_run, opts);
  auto* cmd_aggregate = app.add_subcommand("aggregate", "per-model summary statistics");
  add_common(cmd_aggregate, opts);
  auto* cmd_ensemble = app.add_subcommand("ensemble", "ensemble summaries from config");
  add_common(cmd_ensemble, opts);
  bool suggest_high_confidence = false;
  cmd_ensemble->add_flag("--suggest-high-confidence", suggest_high_confidence,
                         "print the models the high-confidence rule selects and exit");
  auto* cmd_pointwise = app.add_subcommand("pointwise-eval", "pointwise dataset and metrics");
  add_common(cmd_pointwise, opts);
  auto* cmd_sample = app.add_subcommand("sample-pairs", "stratified pair sample and diagnostics");
  add_common(cmd_sample, opts);
  auto* cmd_win = app.add_subcommand("win-matrix", "model and human win matrices");
  add_common(cmd_win, opts);
  auto* cmd_fit = app.add_subcommand("fit-bt", "Bradley-Terry scales from win matrices");
  add_common(cmd_fit, opts);
  std::string fit_matrix, fit_out = "scale.json", fit_probabilities;
  cmd_fit->add_option("--matrix", fit_matrix, "fit one matrix file instead of the matrices dir");
  cmd_fit->add_option("--out", fit_out, "output scale JSON for --matrix mode");
  cmd_fit->add_option("--probabilities", fit_probabilities,
                      "also write the full probability matrix CSV (--matrix mode)");
  auto* cmd_rank = app.add_subcommand("rank-eval", "ranking agreement report");
  add_common(cmd_rank, opts);

  auto* cmd_agreement = app.add_subcommand("agreement", "Krippendorff alpha for a rating grid");
  std::string agr_input, agr_level = "nominal", agr_format = "long";
  bool agr_json = false;
  cmd_agreement->add_option("--input", agr_input, "grid CSV")->required()->check(CLI::ExistingFile);
  cmd_agreement->add_option("--level", agr_level, "nominal|ordinal")
      ->check(CLI::IsMember({"nominal", "ordinal"}));
  cmd_agreement->add_option("--format", agr_format,
                            "long (unit,rater,value) or pointwise (annotator_id,argument_id,label)")
      ->check(CLI::IsMember({"long", "pointwise"}));
  cmd_agreement->add_flag("--json", agr_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_agreement->parsed()) return run_agreement(agr_input, agr_level, agr_format, agr_json);

    const auto cfg = load_config(opts);
    if (cmd_run->parsed()) {
      stanceval::run_pipeline(cfg);
      info("pipeline complete; artifacts in " + cfg.output_dir.string());
    } else if (cmd_aggregate->parsed()) {
      stanceval::stage_aggregate(cfg);
    } else if (cmd_ensemble->parsed()) {
      if (suggest_high_confidence) {
        const auto records = stanceval::load_predictions_file(cfg.predictions_path);
        std::vector<std::string> all;
        for (const auto& r : records)
          if (std::find(all.begin(), all.end(), r.model_id) == all.end())
            all.push_back(r.model_id);
        std::sort(all.begin(), all.end());
        for (const auto& m : stanceval::select_high_confidence_models(records, all))
          std::cout << m << '\n';
        return 0;
      }
      stanceval::stage_ensemble(cfg);
    } else if (cmd_pointwise->parsed()) {
      stanceval::stage_pointwise_eval(cfg);
    } else if (cmd_sample->parsed()) {
      stanceval::stage_sample_pairs(cfg);
    } else if (cmd_win->parsed()) {
      stanceval::stage_win_matrices(cfg);
    } else if (cmd_fit->parsed()) {
      if (!fit_matrix.empty()) return run_fit_bt_single(cfg, fit_matrix, fit_out, fit_probabilities);
      stanceval::stage_fit_bt(cfg);
    } else if (cmd_rank->parsed()) {
      stanceval::stage_rank_eval(cfg);
    }
    return 0;
  } catch (const stanceval::ValidationError& e) {
    std::cerr << "stanceval: " << e.what() << '\n';
    return 1;
  } catch (const stanceval::ComputationError& e) {
    std::cerr << "stanceval: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "stanceval: " << e.what() << '\n';
    return 2;
  }
}
