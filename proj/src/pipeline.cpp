#include "stanceval/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "stanceval/corpus_io.hpp"
#include "stanceval/csv.hpp"
#include "stanceval/errors.hpp"
#include "stanceval/rng.hpp"
#include "stanceval/sha256.hpp"
#include "stanceval/version.hpp"

namespace stanceval {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

constexpr const char* kSummariesFile = "summaries.csv";
constexpr const char* kDatasetFile = "pointwise_dataset.csv";
constexpr const char* kPointwiseMetricsFile = "pointwise_metrics.csv";
constexpr const char* kPairsFile = "pairs.csv";
constexpr const char* kPairDiagnosticsFile = "pair_diagnostics.json";
constexpr const char* kReportJsonFile = "report.json";
constexpr const char* kReportCsvFile = "report.csv";
constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kMatricesDir = "matrices";
constexpr const char* kScalesDir = "scales";

template <typename F>
auto run_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + ": " + e.what());
  } catch (const ComputationError& e) {
    throw ComputationError(std::string(name) + ": " + e.what());
  }
}

double json_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ValidationError(std::string("config: '") + key + "' must be a number");
  return obj[key].get<double>();
}

std::int64_t json_count(const json& obj, const char* key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ValidationError(std::string("config: '") + key + "' must be an integer");
  const std::int64_t v = obj[key].get<std::int64_t>();
  if (v < 0) throw ValidationError(std::string("config: '") + key + "' must be >= 0");
  return v;
}

fs::path json_path(const json& obj, const char* key, const fs::path& base, bool required) {
  if (!obj.contains(key) || obj[key].is_null()) {
    if (required) throw ValidationError(std::string("config: missing input path '") + key + "'");
    return {};
  }
  fs::path p = obj[key].get<std::string>();
  return p.is_absolute() ? p : base / p;
}

std::string stamp_line(const PipelineConfig& cfg) {
  return "# config_hash=" + cfg.hash() + " seed=" + std::to_string(cfg.seed);
}

void check_stamp(const std::vector<std::string>& comments, const PipelineConfig& cfg,
                 const std::string& source) {
  if (cfg.force) return;
  const std::string expected = "config_hash=" + cfg.hash();
  for (const auto& line : comments)
    if (line.find(expected) != std::string::npos) return;
  throw ValidationError(source +
                        ": artifact was produced under a different config (expected " + expected +
                        "); rerun upstream stages or pass --force");
}

void check_stamp(const json& doc, const PipelineConfig& cfg, const std::string& source) {
  if (cfg.force) return;
  if (!doc.contains("config_hash") || doc["config_hash"].get<std::string>() != cfg.hash())
    throw ValidationError(source +
                          ": artifact was produced under a different config; rerun upstream "
                          "stages or pass --force");
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

csv::Table read_artifact_csv(const fs::path& path, const PipelineConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing artifact: " + path.string() + " (run the upstream stage first)");
  auto table = csv::read(in, path.string());
  check_stamp(table.comments, cfg, path.string());
  return table;
}

json read_artifact_json(const fs::path& path, const PipelineConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing artifact: " + path.string() + " (run the upstream stage first)");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  check_stamp(doc, cfg, path.string());
  return doc;
}

void write_json_artifact(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

double parse_double_field(const std::string& raw, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || ptr != raw.data() + raw.size())
    throw ValidationError(where + ": unparseable number '" + raw + "'");
  return v;
}

// ---- summaries.csv -------------------------------------------------------

void write_summaries(const fs::path& path, const std::vector<PredictionSummary>& rows,
                     const PipelineConfig& cfg) {
  auto out = open_output(path);
  out << stamp_line(cfg) << '\n';
  csv::write_row(out, {"scorer_id", "argument_id", "mean_score", "score_sd", "na_probability",
                       "n_reps"});
  for (const auto& s : rows)
    csv::write_row(out, {s.scorer_id, s.argument_id,
                         s.mean_score ? format_double(*s.mean_score) : "",
                         s.score_sd ? format_double(*s.score_sd) : "",
                         format_double(s.na_probability), std::to_string(s.n_reps)});
}

std::vector<PredictionSummary> read_summaries(const fs::path& path, const PipelineConfig& cfg) {
  const auto table = read_artifact_csv(path, cfg);
  const std::string src = path.string();
  const auto c_scorer = table.column("scorer_id", src);
  const auto c_arg = table.column("argument_id", src);
  const auto c_mean = table.column("mean_score", src);
  const auto c_sd = table.column("score_sd", src);
  const auto c_pi = table.column("na_probability", src);
  const auto c_reps = table.column("n_reps", src);
  std::vector<PredictionSummary> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = src + " row " + std::to_string(r + 1);
    PredictionSummary s;
    s.scorer_id = row[c_scorer];
    s.argument_id = row[c_arg];
    if (!row[c_mean].empty()) s.mean_score = parse_double_field(row[c_mean], where);
    if (!row[c_sd].empty()) s.score_sd = parse_double_field(row[c_sd], where);
    s.na_probability = parse_double_field(row[c_pi], where);
    s.n_reps = static_cast<int>(parse_double_field(row[c_reps], where));
    s.na_count = static_cast<int>(s.na_probability * s.n_reps + 0.5);
    out.push_back(std::move(s));
  }
  return out;
}

// ---- pointwise_dataset.csv -----------------------------------------------

void write_dataset(const fs::path& path, const PointwiseDataset& dataset,
                   const PipelineConfig& cfg) {
  auto out = open_output(path);
  out << stamp_line(cfg) << '\n';
  csv::write_row(out, {"argument_id", "bucket", "partition"});
  for (const auto& [id, bucket] : dataset.members)
    csv::write_row(out, {id, to_string(bucket), bucket == Bucket::low ? "ambig" : "conf"});
}

PointwiseDataset read_dataset(const fs::path& path, const PipelineConfig& cfg) {
  const auto table = read_artifact_csv(path, cfg);
  const std::string src = path.string();
  const auto c_arg = table.column("argument_id", src);
  const auto c_bucket = table.column("bucket", src);
  PointwiseDataset dataset;
  dataset.seed = cfg.seed;
  for (const auto& row : table.rows) {
    Bucket bucket;
    if (row[c_bucket] == "h_pol") bucket = Bucket::h_pol;
    else if (row[c_bucket] == "low") bucket = Bucket::low;
    else if (row[c_bucket] == "h_apol") bucket = Bucket::h_apol;
    else throw ValidationError(src + ": unknown bucket token '" + row[c_bucket] + "'");
    dataset.members.emplace(row[c_arg], bucket);
    (bucket == Bucket::low ? dataset.ambig : dataset.conf).insert(row[c_arg]);
  }
  return dataset;
}

// ---- pairs.csv -------------------------------------------------------------

void write_pairs(const fs::path& path, const PairSet& pairs, const PipelineConfig& cfg) {
  auto out = open_output(path);
  out << stamp_line(cfg) << '\n';
  csv::write_row(out, {"arg_i", "arg_j", "stratum"});
  for (const auto& p : pairs.pairs) csv::write_row(out, {p.arg_i, p.arg_j, p.stratum.tag()});
}

PairSet read_pairs(const fs::path& path, const PipelineConfig& cfg) {
  const auto table = read_artifact_csv(path, cfg);
  const std::string src = path.string();
  const auto c_i = table.column("arg_i", src);
  const auto c_j = table.column("arg_j", src);
  const auto c_s = table.column("stratum", src);
  PairSet pairs;
  pairs.seed = cfg.seed;
  for (const auto& row : table.rows) {
    PairStratum stratum;
    int b1 = 0, b2 = 0;
    if (std::sscanf(row[c_s].c_str(), "intra(%d)", &b1) == 1) {
      stratum = {b1, b1};
    } else if (std::sscanf(row[c_s].c_str(), "inter(%d,%d)", &b1, &b2) == 2) {
      stratum = {b1, b2};
    } else {
      throw ValidationError(src + ": unknown stratum tag '" + row[c_s] + "'");
    }
    pairs.pairs.push_back({row[c_i], row[c_j], stratum});
  }
  return pairs;
}

// ---- win matrices -----------------------------------------------------------

void write_matrix(const fs::path& path, const WinMatrix& wm, const PipelineConfig& cfg) {
  auto out = open_output(path);
  out << stamp_line(cfg) << '\n';
  std::vector<std::string> header{"id"};
  header.insert(header.end(), wm.ids().begin(), wm.ids().end());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < wm.size(); ++i) {
    std::vector<std::string> row{wm.ids()[i]};
    for (std::size_t j = 0; j < wm.size(); ++j) row.push_back(format_double(wm.win_mass(i, j)));
    csv::write_row(out, row);
  }
}

WinMatrix read_matrix(const fs::path& path, const PipelineConfig& cfg) {
  const auto table = read_artifact_csv(path, cfg);
  const std::string src = path.string();
  if (table.header.empty() || table.header.front() != "id")
    throw ValidationError(src + ": matrix file must start with an 'id' column");
  std::vector<std::string> ids(table.header.begin() + 1, table.header.end());
  WinMatrix wm(ids);
  if (table.rows.size() != ids.size())
    throw ValidationError(src + ": matrix row count does not match header");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.front() != ids[i]) throw ValidationError(src + ": matrix rows out of order");
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const double v = parse_double_field(row[j + 1], src);
      if (v < 0.0) throw ValidationError(src + ": negative win mass");
      if (i == j) {
        if (v != 0.0) throw ValidationError(src + ": nonzero diagonal entry");
      } else if (v != 0.0) {
        wm.add_win(i, j, v);
      }
    }
  }
  return wm;
}

void write_matrix_pairs(const fs::path& path, const WinMatrix& wm,
                        const std::vector<PairKey>& keys, double margin,
                        const PipelineConfig& cfg) {
  auto out = open_output(path);
  out << stamp_line(cfg) << '\n';
  csv::write_row(out, {"arg_i", "arg_j", "w_ij", "w_ji", "m_ij", "w_hat_ij", "confident"});
  for (const auto& [lhs, rhs] : keys) {
    const std::size_t i = wm.index_of(lhs);
    const std::size_t j = wm.index_of(rhs);
    const double share = normalized_value(wm, i, j);
    csv::write_row(out, {lhs, rhs, format_double(wm.win_mass(i, j)),
                         format_double(wm.win_mass(j, i)), format_double(wm.pair_mass(i, j)),
                         format_double(share),
                         std::abs(share - 0.5) >= margin ? "1" : "0"});
  }
}

// ---- shared lookups ----------------------------------------------------------

std::vector<std::string> model_ids_in(const std::vector<PredictionRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.model_id);
  return {ids.begin(), ids.end()};
}

std::map<std::string, std::vector<PointwiseLabel>> labels_by_argument(
    const std::vector<PointwiseAnnotation>& annotations) {
  std::map<std::string, std::vector<PointwiseLabel>> out;
  for (const auto& a : annotations) out[a.argument_id].push_back(a.label);
  return out;
}

// Majority labels (and unanimity) for every annotated argument in the set.
std::map<std::string, std::pair<PointwiseLabel, bool>> human_majorities(
    const std::map<std::string, std::vector<PointwiseLabel>>& by_argument,
    const std::set<std::string>& ids) {
  std::map<std::string, std::pair<PointwiseLabel, bool>> out;
  for (const auto& id : ids) {
    auto it = by_argument.find(id);
    if (it == by_argument.end()) continue;
    out[id] = majority_label(it->second);
  }
  return out;
}

std::string tie_mode_token(TieMode mode) {
  return mode == TieMode::randomized ? "randomized" : "loss";
}

// When argument metadata is supplied, every id the other tables reference
// must exist there.
std::set<std::string> known_arguments(const PipelineConfig& cfg) {
  std::set<std::string> known;
  if (cfg.arguments_path.empty()) return known;
  for (const auto& a : load_arguments_file(cfg.arguments_path)) known.insert(a.argument_id);
  return known;
}

void require_known_arguments(const std::set<std::string>& known,
                             const std::set<std::string>& referenced, const std::string& source) {
  if (known.empty()) return;
  for (const auto& id : referenced)
    if (!known.count(id))
      throw ValidationError(source + ": argument_id '" + id +
                            "' is not present in the arguments table");
}

json alpha_json(const AlphaResult& alpha) {
  json j;
  j["defined"] = alpha.defined;
  j["value"] = alpha.defined ? json(alpha.value) : json(nullptr);
  return j;
}

}  // namespace

// ---- config -------------------------------------------------------------------

PipelineConfig PipelineConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  return from_json(doc, path.parent_path());
}

PipelineConfig PipelineConfig::from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
  PipelineConfig cfg;

  const json inputs = doc.value("inputs", json::object());
  cfg.predictions_path = json_path(inputs, "predictions", base_dir, true);
  cfg.pointwise_path = json_path(inputs, "pointwise", base_dir, true);
  cfg.pairwise_path = json_path(inputs, "pairwise", base_dir, true);
  cfg.arguments_path = json_path(inputs, "arguments", base_dir, false);

  if (!doc.contains("ensembles") || !doc["ensembles"].is_array())
    throw ValidationError("config: 'ensembles' must be an array");
  for (const auto& e : doc["ensembles"]) {
    EnsembleConfig ec;
    ec.id = e.value("id", std::string{});
    if (ec.id.empty()) throw ValidationError("config: ensemble without an id");
    if (e.contains("rule")) {
      const std::string rule = e["rule"].get<std::string>();
      if (rule != "high-confidence")
        throw ValidationError("config: unknown ensemble rule '" + rule + "'");
      ec.high_confidence_rule = true;
    }
    if (e.contains("members")) ec.members = e["members"].get<std::vector<std::string>>();
    cfg.ensembles.push_back(std::move(ec));
  }
  cfg.reference_ensemble = doc.value("reference_ensemble", std::string{});

  if (doc.contains("pointwise")) {
    const json& pw = doc["pointwise"];
    if (pw.contains("counts") && !pw["counts"].is_null()) {
      BucketCounts counts;
      counts.h_pol = static_cast<std::size_t>(json_count(pw["counts"], "h_pol", 0));
      counts.low = static_cast<std::size_t>(json_count(pw["counts"], "low", 0));
      counts.h_apol = static_cast<std::size_t>(json_count(pw["counts"], "h_apol", 0));
      cfg.pointwise_counts = counts;
    }
    cfg.binarize_threshold = json_number(pw, "binarize_threshold", 0.5);
  }

  if (doc.contains("pairs")) {
    const json& pr = doc["pairs"];
    cfg.intra_per_bin = static_cast<std::size_t>(json_count(pr, "intra_per_bin", 44));
    cfg.inter_per_bin_pair = static_cast<std::size_t>(json_count(pr, "inter_per_bin_pair", 22));
    if (pr.contains("max_items") && !pr["max_items"].is_null())
      cfg.max_items = static_cast<std::size_t>(json_count(pr, "max_items", 0));
  }

  if (doc.contains("bt")) {
    const json& bt = doc["bt"];
    cfg.bt.reg = json_number(bt, "reg", 0.01);
    cfg.bt.tol = json_number(bt, "tol", 1e-8);
    cfg.bt.max_iter = static_cast<int>(json_count(bt, "max_iter", 100));
  }

  cfg.confidence_margin = json_number(doc, "confidence_margin", 0.25);
  const std::string tie = doc.value("tie_mode", "loss");
  if (tie == "loss") cfg.tie_mode = TieMode::loss;
  else if (tie == "randomized") cfg.tie_mode = TieMode::randomized;
  else throw ValidationError("config: unknown tie_mode '" + tie + "'");

  if (!doc.contains("seed") || !doc["seed"].is_number_integer())
    throw ValidationError("config: 'seed' must be an integer");
  cfg.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("output_dir")) {
    fs::path p = doc["output_dir"].get<std::string>();
    cfg.output_dir = p.is_absolute() ? p : base_dir / p;
  }

  cfg.validate();
  return cfg;
}

void PipelineConfig::validate() const {
  if (ensembles.empty()) throw ValidationError("config: at least one ensemble must be defined");
  std::set<std::string> ids;
  for (const auto& e : ensembles) {
    if (!ids.insert(e.id).second)
      throw ValidationError("config: duplicate ensemble id '" + e.id + "'");
    if (!e.high_confidence_rule && e.members.empty())
      throw ValidationError("config: ensemble '" + e.id + "' has no members and no rule");
  }
  if (reference_ensemble.empty() || !ids.count(reference_ensemble))
    throw ValidationError("config: reference_ensemble '" + reference_ensemble +
                          "' is not a defined ensemble");
  if (!(confidence_margin > 0.0 && confidence_margin <= 0.5))
    throw ValidationError("config: confidence_margin must lie in (0, 0.5]");
  if (!(binarize_threshold >= 0.0 && binarize_threshold < 1.0))
    throw ValidationError("config: binarize_threshold must lie in [0, 1)");
  if (bt.reg < 0.0) throw ValidationError("config: bt.reg must be >= 0");
  if (!(bt.tol > 0.0)) throw ValidationError("config: bt.tol must be > 0");
  if (bt.max_iter < 1) throw ValidationError("config: bt.max_iter must be >= 1");
}

json PipelineConfig::semantic_json() const {
  json doc;
  json ens = json::array();
  auto sorted = ensembles;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& e : sorted) {
    json je;
    je["id"] = e.id;
    if (e.high_confidence_rule) je["rule"] = "high-confidence";
    auto members = e.members;
    std::sort(members.begin(), members.end());
    je["members"] = members;
    ens.push_back(je);
  }
  doc["ensembles"] = ens;
  doc["reference_ensemble"] = reference_ensemble;
  if (pointwise_counts) {
    doc["pointwise_counts"] = {{"h_pol", pointwise_counts->h_pol},
                               {"low", pointwise_counts->low},
                               {"h_apol", pointwise_counts->h_apol}};
  } else {
    doc["pointwise_counts"] = nullptr;
  }
  doc["binarize_threshold"] = binarize_threshold;
  doc["intra_per_bin"] = intra_per_bin;
  doc["inter_per_bin_pair"] = inter_per_bin_pair;
  doc["max_items"] = max_items ? json(*max_items) : json(nullptr);
  doc["bt"] = {{"reg", bt.reg}, {"tol", bt.tol}, {"max_iter", bt.max_iter}};
  doc["confidence_margin"] = confidence_margin;
  doc["tie_mode"] = tie_mode_token(tie_mode);
  doc["seed"] = seed;
  return doc;
}

std::string PipelineConfig::hash() const { return sha256_hex(semantic_json().dump()); }

std::vector<EnsembleSpec> resolve_ensembles(const PipelineConfig& cfg,
                                            const std::vector<PredictionRecord>& records) {
  std::vector<EnsembleSpec> specs;
  for (const auto& e : cfg.ensembles) {
    EnsembleSpec spec;
    spec.ensemble_id = e.id;
    if (e.high_confidence_rule) {
      const auto candidates = e.members.empty() ? model_ids_in(records) : e.members;
      const auto selected = select_high_confidence_models(records, candidates);
      if (selected.empty())
        throw ValidationError("ensemble '" + e.id + "': high-confidence rule selected no models");
      spec.member_model_ids.assign(selected.begin(), selected.end());
    } else {
      spec.member_model_ids = e.members;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

// ---- stages ----------------------------------------------------------------------

void stage_aggregate(const PipelineConfig& cfg) {
  run_stage("aggregate", [&] {
    const auto records = load_predictions_file(cfg.predictions_path);
    if (records.empty()) throw ValidationError("no prediction records in " +
                                               cfg.predictions_path.string());
    std::set<std::string> referenced;
    for (const auto& r : records) referenced.insert(r.argument_id);
    require_known_arguments(known_arguments(cfg), referenced, cfg.predictions_path.string());
    const auto summaries = summarize_all(records);
    write_summaries(cfg.output_dir / kSummariesFile, summaries, cfg);
  });
}

void stage_ensemble(const PipelineConfig& cfg) {
  run_stage("ensemble", [&] {
    const auto records = load_predictions_file(cfg.predictions_path);
    auto summaries = read_summaries(cfg.output_dir / kSummariesFile, cfg);
    const auto model_ids = model_ids_in(records);
    const std::set<std::string> models(model_ids.begin(), model_ids.end());
    // Drop any previously appended ensemble rows so the stage is idempotent.
    std::erase_if(summaries, [&](const PredictionSummary& s) { return !models.count(s.scorer_id); });
    for (const auto& spec : resolve_ensembles(cfg, records)) {
      if (models.count(spec.ensemble_id))
        throw ValidationError("ensemble id '" + spec.ensemble_id + "' collides with a model id");
      const auto pooled = pool_ensemble(spec, records);
      summaries.insert(summaries.end(), pooled.begin(), pooled.end());
    }
    write_summaries(cfg.output_dir / kSummariesFile, summaries, cfg);
  });
}

void stage_pointwise_eval(const PipelineConfig& cfg) {
  run_stage("pointwise-eval", [&] {
    const auto summaries = read_summaries(cfg.output_dir / kSummariesFile, cfg);
    const auto annotations = load_pointwise_annotations_file(cfg.pointwise_path);
    const auto by_argument = labels_by_argument(annotations);
    {
      std::set<std::string> referenced;
      for (const auto& [id, labels] : by_argument) referenced.insert(id);
      require_known_arguments(known_arguments(cfg), referenced, cfg.pointwise_path.string());
    }

    std::vector<PredictionSummary> reference;
    for (const auto& s : summaries)
      if (s.scorer_id == cfg.reference_ensemble) reference.push_back(s);
    if (reference.empty())
      throw ValidationError("no summaries for reference ensemble '" + cfg.reference_ensemble +
                            "'; run the ensemble stage first");

    PointwiseDataset dataset;
    if (cfg.pointwise_counts) {
      dataset = sample_dataset(reference, *cfg.pointwise_counts, cfg.seed);
    } else {
      std::set<std::string> annotated;
      for (const auto& [id, labels] : by_argument) annotated.insert(id);
      dataset = bucket_dataset(reference, annotated);
    }
    write_dataset(cfg.output_dir / kDatasetFile, dataset, cfg);

    const auto majorities = human_majorities(by_argument, dataset.all_ids());
    std::map<std::string, PointwiseLabel> truth;
    for (const auto& [id, lab] : majorities) truth[id] = lab.first;

    // Scorer labels over the dataset.
    std::set<std::string> scorers;
    std::map<std::string, std::map<std::string, PointwiseLabel>> predicted;
    for (const auto& s : summaries) {
      scorers.insert(s.scorer_id);
      if (dataset.members.count(s.argument_id))
        predicted[s.scorer_id][s.argument_id] = binarize_prediction(s, cfg.binarize_threshold);
    }

    const std::vector<std::pair<std::string, const std::set<std::string>*>> partitions = {
        {"full", nullptr}, {"conf", &dataset.conf}, {"ambig", &dataset.ambig}};

    auto out = open_output(cfg.output_dir / kPointwiseMetricsFile);
    out << stamp_line(cfg) << '\n';
    csv::write_row(out, {"scorer_id", "partition", "n", "macro_f1", "micro_f1", "precision",
                         "recall", "balanced_accuracy", "two_party_alpha",
                         "two_party_alpha_defined"});
    for (const auto& scorer : scorers) {
      const auto& labels = predicted[scorer];
      for (const auto& [partition_name, subset_ptr] : partitions) {
        std::set<std::string> subset;
        for (const auto& [id, lab] : truth) {
          if (!labels.count(id)) continue;
          if (subset_ptr && !subset_ptr->count(id)) continue;
          subset.insert(id);
        }
        std::vector<std::string> row{scorer, partition_name, std::to_string(subset.size())};
        if (subset.empty()) {
          row.insert(row.end(), {"", "", "", "", "", "", ""});
        } else {
          const auto m = classification_metrics(truth, labels, subset);
          std::map<std::string, PointwiseLabel> truth_subset, pred_subset;
          for (const auto& id : subset) {
            truth_subset[id] = truth.at(id);
            pred_subset[id] = labels.at(id);
          }
          AlphaResult alpha;
          try {
            alpha = two_party_alpha(truth_subset, pred_subset);
          } catch (const ValidationError&) {
            alpha.defined = false;  // fewer than 2 pairable units
          }
          row.insert(row.end(),
                     {format_double(m.macro_f1), format_double(m.micro_f1),
                      format_double(m.precision), format_double(m.recall),
                      format_double(m.balanced_accuracy),
                      alpha.defined ? format_double(alpha.value) : "",
                      alpha.defined ? "1" : "0"});
        }
        csv::write_row(out, row);
      }
    }
  });
}

void stage_sample_pairs(const PipelineConfig& cfg) {
  run_stage("sample-pairs", [&] {
    const auto summaries = read_summaries(cfg.output_dir / kSummariesFile, cfg);
    const auto dataset = read_dataset(cfg.output_dir / kDatasetFile, cfg);
    const auto annotations = load_pointwise_annotations_file(cfg.pointwise_path);
    const auto majorities = human_majorities(labels_by_argument(annotations), dataset.all_ids());

    // Items: high-confidence-political arguments the annotators unanimously
    // called political.
    std::vector<std::string> eligible;
    for (const auto& [id, bucket] : dataset.members) {
      if (bucket != Bucket::h_pol) continue;
      auto it = majorities.find(id);
      if (it == majorities.end()) continue;
      if (it->second.first == PointwiseLabel::political && it->second.second)
        eligible.push_back(id);
    }
    std::sort(eligible.begin(), eligible.end());
    if (cfg.max_items && eligible.size() > *cfg.max_items) {
      Rng rng(cfg.seed, "pair-items");
      std::vector<std::string> chosen;
      for (std::size_t idx : sample_indices(eligible.size(), *cfg.max_items, rng))
        chosen.push_back(eligible[idx]);
      eligible = std::move(chosen);
    }
    if (eligible.size() < 2)
      throw ValidationError("fewer than 2 eligible items (unanimously political, h_pol bucket)");

    std::map<std::string, double> means;
    for (const auto& s : summaries) {
      if (s.scorer_id != cfg.reference_ensemble) continue;
      if (std::find(eligible.begin(), eligible.end(), s.argument_id) == eligible.end()) continue;
      if (!s.mean_score)
        throw ValidationError("item '" + s.argument_id + "' has no defined mean score");
      means[s.argument_id] = *s.mean_score;
    }
    if (means.size() != eligible.size())
      throw ValidationError("reference ensemble is missing summaries for some items");

    const auto binning = bin_scores(means);
    const auto pairs = sample_pairs(binning, cfg.intra_per_bin, cfg.inter_per_bin_pair, cfg.seed);
    write_pairs(cfg.output_dir / kPairsFile, pairs, cfg);

    const bool connected = check_connectivity(pairs, binning.ids);
    const auto size_check = check_sample_size(pairs, binning.ids.size());
    const auto entropy = node_entropy(pairs, binning);

    json diag;
    diag["config_hash"] = cfg.hash();
    diag["seed"] = cfg.seed;
    diag["n_items"] = binning.ids.size();
    diag["n_pairs"] = pairs.pairs.size();
    diag["connected"] = connected;
    diag["sample_size_target"] = size_check.target;
    diag["sample_size_ok"] = size_check.ok;
    json bins;
    bins["k"] = binning.k;
    bins["occupied_deciles"] = binning.occupied_deciles;
    json assignment = json::object();
    for (const auto& [id, b] : binning.bin) assignment[id] = b;
    bins["assignment"] = assignment;
    diag["bins"] = bins;
    json ent;
    ent["median"] = entropy.median;
    ent["frac_in_2.2_2.8"] = entropy.frac_in_band;
    json by_item = json::object();
    for (const auto& [id, h] : entropy.by_item) by_item[id] = h;
    ent["by_item"] = by_item;
    diag["entropy"] = ent;
    write_json_artifact(cfg.output_dir / kPairDiagnosticsFile, diag);
  });
}

namespace {

// Raw decile per repetition for one scorer over the item set; NA kept as
// kNaBin. Order-preserving decile indices make bin relabeling irrelevant for
// win comparisons.
std::map<std::string, std::vector<int>> binned_reps_for(
    const std::vector<PredictionRecord>& records, const std::set<std::string>& member_models,
    const std::vector<std::string>& items) {
  std::set<std::string> item_set(items.begin(), items.end());
  std::map<std::string, std::vector<int>> out;
  for (const auto& id : items) out[id];
  for (const auto& r : records) {
    if (!member_models.count(r.model_id) || !item_set.count(r.argument_id)) continue;
    out[r.argument_id].push_back(r.is_na() ? kNaBin
                                           : PositionBinning::decile_of(*r.value) + 1);
  }
  return out;
}

std::vector<PairKey> all_item_pairs(const std::vector<std::string>& items) {
  std::vector<PairKey> keys;
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j) keys.emplace_back(items[i], items[j]);
  return keys;
}

std::vector<PairKey> pair_keys(const PairSet& pairs) {
  std::vector<PairKey> keys;
  for (const auto& p : pairs.pairs) keys.emplace_back(p.arg_i, p.arg_j);
  return keys;
}

}  // namespace

void stage_win_matrices(const PipelineConfig& cfg) {
  run_stage("win-matrix", [&] {
    const auto diag = read_artifact_json(cfg.output_dir / kPairDiagnosticsFile, cfg);
    const auto pairs = read_pairs(cfg.output_dir / kPairsFile, cfg);
    std::vector<std::string> items;
    for (const auto& [id, b] : diag.at("bins").at("assignment").items()) items.push_back(id);
    std::sort(items.begin(), items.end());

    const auto records = load_predictions_file(cfg.predictions_path);
    const fs::path dir = cfg.output_dir / kMatricesDir;
    const auto model_keys = all_item_pairs(items);

    // Individual models.
    for (const auto& model : model_ids_in(records)) {
      const auto wm = model_win_matrix(binned_reps_for(records, {model}, items), items);
      write_matrix(dir / (model + ".matrix.csv"), wm, cfg);
      write_matrix_pairs(dir / (model + ".pairs.csv"), wm, model_keys, cfg.confidence_margin, cfg);
    }
    // Ensembles pool member repetitions before comparison.
    for (const auto& spec : resolve_ensembles(cfg, records)) {
      const std::set<std::string> members(spec.member_model_ids.begin(),
                                          spec.member_model_ids.end());
      const auto wm = model_win_matrix(binned_reps_for(records, members, items), items);
      write_matrix(dir / (spec.ensemble_id + ".matrix.csv"), wm, cfg);
      write_matrix_pairs(dir / (spec.ensemble_id + ".pairs.csv"), wm, model_keys,
                         cfg.confidence_margin, cfg);
    }

    // Human matrices from annotations restricted to the sampled pairs.
    const auto annotations = load_pairwise_annotations_file(cfg.pairwise_path);
    {
      std::set<std::string> referenced;
      for (const auto& a : annotations) {
        referenced.insert(a.arg_i);
        referenced.insert(a.arg_j);
      }
      require_known_arguments(known_arguments(cfg), referenced, cfg.pairwise_path.string());
    }
    std::set<PairKey> sampled;
    for (const auto& key : pair_keys(pairs)) sampled.insert(key);
    std::vector<PairwiseAnnotation> scoped;
    for (const auto& a : annotations) {
      PairKey key{std::min(a.arg_i, a.arg_j), std::max(a.arg_i, a.arg_j)};
      if (sampled.count(key)) scoped.push_back(a);
    }
    const auto human_keys = pair_keys(pairs);
    const struct {
      const char* name;
      FramingFilter filter;
    } framings[] = {{"human_left", FramingFilter::left_only},
                    {"human_right", FramingFilter::right_only},
                    {"human_agg", FramingFilter::both}};
    for (const auto& fr : framings) {
      const auto wm = human_win_matrix(scoped, fr.filter, items);
      write_matrix(dir / (std::string(fr.name) + ".matrix.csv"), wm, cfg);
      write_matrix_pairs(dir / (std::string(fr.name) + ".pairs.csv"), wm, human_keys,
                         cfg.confidence_margin, cfg);
    }
  });
}

namespace {

std::vector<std::string> matrix_scorers(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::exists(dir)) throw ValidationError("missing artifact directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    const std::string suffix = ".matrix.csv";
    if (file.size() > suffix.size() && file.ends_with(suffix))
      names.push_back(file.substr(0, file.size() - suffix.size()));
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

void stage_fit_bt(const PipelineConfig& cfg) {
  run_stage("fit-bt", [&] {
    const fs::path dir = cfg.output_dir / kMatricesDir;
    for (const auto& name : matrix_scorers(dir)) {
      const auto wm = read_matrix(dir / (name + ".matrix.csv"), cfg);
      const auto scale = fit_bt_ilsr(wm, cfg.bt);
      json doc;
      doc["scorer"] = name;
      doc["config_hash"] = cfg.hash();
      doc["ids"] = scale.ids;
      doc["theta"] = scale.theta;
      doc["ranking"] = scale.ranking;
      doc["converged"] = scale.converged;
      doc["iterations"] = scale.iterations;
      doc["reg"] = cfg.bt.reg;
      doc["tol"] = cfg.bt.tol;
      write_json_artifact(cfg.output_dir / kScalesDir / (name + ".json"), doc);
    }
  });
}

void stage_rank_eval(const PipelineConfig& cfg) {
  run_stage("rank-eval", [&] {
    const fs::path dir = cfg.output_dir / kMatricesDir;
    EvalInputs inputs;
    inputs.pairs = read_pairs(cfg.output_dir / kPairsFile, cfg);
    for (const auto& name : matrix_scorers(dir)) {
      auto wm = read_matrix(dir / (name + ".matrix.csv"), cfg);
      if (name == "human_left") inputs.human_left = std::move(wm);
      else if (name == "human_right") inputs.human_right = std::move(wm);
      else if (name == "human_agg") inputs.human_agg = std::move(wm);
      else inputs.scorers.emplace(name, std::move(wm));
    }
    if (inputs.human_agg.size() == 0)
      throw ValidationError("human aggregate matrix missing; run the win-matrix stage first");
    inputs.model_confidence_scorer = cfg.reference_ensemble;
    inputs.margin = cfg.confidence_margin;
    inputs.bt = cfg.bt;
    inputs.tie_mode = cfg.tie_mode;
    inputs.seed = cfg.seed;
    const auto report = evaluate_scorers(inputs);

    // Pointwise section: per-scorer metric rows plus inter-model agreement.
    const auto summaries = read_summaries(cfg.output_dir / kSummariesFile, cfg);
    const auto dataset = read_dataset(cfg.output_dir / kDatasetFile, cfg);
    const auto metrics_table = read_artifact_csv(cfg.output_dir / kPointwiseMetricsFile, cfg);

    std::set<std::string> ensemble_ids;
    for (const auto& e : cfg.ensembles) ensemble_ids.insert(e.id);
    std::map<std::string, std::map<std::string, PointwiseLabel>> model_labels;
    for (const auto& s : summaries) {
      if (ensemble_ids.count(s.scorer_id)) continue;
      if (dataset.members.count(s.argument_id))
        model_labels[s.scorer_id][s.argument_id] =
            binarize_prediction(s, cfg.binarize_threshold);
    }
    json inter_model = json::object();
    const std::vector<std::pair<std::string, std::set<std::string>>> partitions = {
        {"full", dataset.all_ids()}, {"conf", dataset.conf}, {"ambig", dataset.ambig}};
    for (const auto& [name, subset] : partitions) {
      if (model_labels.size() < 2 || subset.empty()) {
        inter_model[name] = nullptr;
        continue;
      }
      try {
        inter_model[name] = alpha_json(inter_model_alpha(model_labels, subset));
      } catch (const ValidationError&) {
        inter_model[name] = nullptr;
      }
    }

    json pointwise_rows = json::array();
    for (const auto& row : metrics_table.rows) {
      json r = json::object();
      for (std::size_t c = 0; c < metrics_table.header.size(); ++c)
        r[metrics_table.header[c]] = row[c];
      pointwise_rows.push_back(r);
    }

    json doc;
    doc["meta"] = {{"version", kVersion},
                   {"config_hash", cfg.hash()},
                   {"seed", cfg.seed},
                   {"bt", {{"reg", cfg.bt.reg}, {"tol", cfg.bt.tol}, {"max_iter", cfg.bt.max_iter}}},
                   {"confidence_margin", cfg.confidence_margin},
                   {"tie_mode", tie_mode_token(cfg.tie_mode)}};
    doc["pointwise"] = {{"inter_model_alpha", inter_model}, {"metrics", pointwise_rows}};

    json table = json::array();
    json subset_sizes = json::object();
    subset_sizes["P"] = inputs.pairs.pairs.size();
    subset_sizes["P11"] = report.partition.p11.size();
    subset_sizes["P10"] = report.partition.p10.size();
    subset_sizes["P01"] = report.partition.p01.size();
    subset_sizes["P00"] = report.partition.p00.size();
    for (const auto& row : report.row_order) {
      for (const auto& subset : report.subset_order) {
        const auto& cell = report.cells.at(row).at(subset);
        json entry;
        entry["scorer"] = row;
        entry["subset"] = subset;
        entry["n_pairs"] = cell.n_pairs;
        entry["d_footrule"] = cell.footrule ? json(*cell.footrule) : json(nullptr);
        entry["d_tau"] = cell.tau ? json(*cell.tau) : json(nullptr);
        entry["alpha_o"] = cell.alpha_o ? json(*cell.alpha_o) : json(nullptr);
        entry["alpha_o_defined"] = cell.alpha_defined;
        entry["macro_f1"] = cell.macro_f1 ? json(*cell.macro_f1) : json(nullptr);
        table.push_back(entry);
      }
    }
    doc["pairwise"] = {{"n_items", inputs.human_agg.size()},
                       {"n_pairs", inputs.pairs.pairs.size()},
                       {"subset_sizes", subset_sizes},
                       {"table", table}};
    write_json_artifact(cfg.output_dir / kReportJsonFile, doc);

    // CSV mirror, rounded to 3 decimals.
    auto out = open_output(cfg.output_dir / kReportCsvFile);
    out << stamp_line(cfg) << '\n';
    csv::write_row(out, {"scorer", "subset", "n_pairs", "d_footrule", "d_tau", "alpha_o",
                         "macro_f1"});
    auto round3 = [](const std::optional<double>& v) -> std::string {
      if (!v) return "";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", *v);
      return buf;
    };
    for (const auto& row : report.row_order)
      for (const auto& subset : report.subset_order) {
        const auto& cell = report.cells.at(row).at(subset);
        csv::write_row(out, {row, subset, std::to_string(cell.n_pairs), round3(cell.footrule),
                             round3(cell.tau), round3(cell.alpha_o), round3(cell.macro_f1)});
      }
  });
}

void write_manifest(const PipelineConfig& cfg) {
  run_stage("manifest", [&] {
    json artifacts = json::object();
    auto add_file = [&](const fs::path& rel) {
      const fs::path full = cfg.output_dir / rel;
      if (fs::exists(full)) artifacts[rel.generic_string()] = sha256_hex(slurp(full));
    };
    for (const char* name : {kSummariesFile, kDatasetFile, kPointwiseMetricsFile, kPairsFile,
                             kPairDiagnosticsFile, kReportJsonFile, kReportCsvFile})
      add_file(name);
    for (const char* sub : {kMatricesDir, kScalesDir}) {
      const fs::path dir = cfg.output_dir / sub;
      if (!fs::exists(dir)) continue;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add_file(fs::path(sub) / f.filename());
    }
    json doc;
    doc["version"] = kVersion;
    doc["config_hash"] = cfg.hash();
    doc["seed"] = cfg.seed;
    doc["artifacts"] = artifacts;
    write_json_artifact(cfg.output_dir / kManifestFile, doc);
  });
}

void run_pipeline(const PipelineConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  stage_aggregate(cfg);
  stage_ensemble(cfg);
  stage_pointwise_eval(cfg);
  stage_sample_pairs(cfg);
  stage_win_matrices(cfg);
  stage_fit_bt(cfg);
  stage_rank_eval(cfg);
  write_manifest(cfg);
}

}  // namespace stanceval
