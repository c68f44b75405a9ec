#include "stanceval/corpus_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stanceval/csv.hpp"
#include "stanceval/errors.hpp"

namespace stanceval {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_na_token(const std::string& raw) { return lower(raw) == "na"; }

double parse_score(const std::string& raw, const std::string& where) {
  double value = 0.0;
  const char* begin = raw.data();
  const char* end = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError(where + ": unparseable score value '" + raw + "'");
  if (!(value >= 0.0 && value <= 100.0))
    throw ValidationError(where + ": score out of range [0,100]: " + raw);
  return value;
}

int parse_repetition(const std::string& raw, const std::string& where) {
  int rep = 0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), rep);
  if (ec != std::errc{} || ptr != raw.data() + raw.size() || rep < 1)
    throw ValidationError(where + ": repetition must be an integer >= 1, got '" + raw + "'");
  return rep;
}

PointwiseLabel parse_label(const std::string& raw, const std::string& where) {
  const std::string t = lower(raw);
  if (t == "political") return PointwiseLabel::political;
  if (t == "apolitical") return PointwiseLabel::apolitical;
  throw ValidationError(where + ": unknown label token '" + raw + "'");
}

Framing parse_framing(const std::string& raw, const std::string& where) {
  const std::string t = lower(raw);
  if (t == "left") return Framing::left;
  if (t == "right") return Framing::right;
  throw ValidationError(where + ": unknown framing token '" + raw + "'");
}

PairChoice parse_choice(const std::string& raw, const std::string& where) {
  const std::string t = lower(raw);
  if (t == "first") return PairChoice::first;
  if (t == "second") return PairChoice::second;
  if (t == "equal") return PairChoice::equal;
  throw ValidationError(where + ": unknown choice token '" + raw + "'");
}

std::string row_ref(const std::string& source, std::size_t row) {
  return source + " row " + std::to_string(row + 1);
}

void sort_predictions(std::vector<PredictionRecord>& records, const std::string& source) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.model_id, a.argument_id, a.repetition) <
           std::tie(b.model_id, b.argument_id, b.repetition);
  });
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& p = records[i - 1];
    const auto& c = records[i];
    if (p.model_id == c.model_id && p.argument_id == c.argument_id && p.repetition == c.repetition)
      throw ValidationError(source + ": duplicate prediction key (" + c.model_id + ", " +
                            c.argument_id + ", " + std::to_string(c.repetition) + ")");
  }
}

std::string score_to_field(const std::optional<double>& value) {
  if (!value) return "NA";
  std::ostringstream os;
  os.precision(17);
  os << *value;
  return os.str();
}

json load_json_array(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_array()) throw ValidationError(path.string() + ": expected a JSON array of records");
  return doc;
}

std::string json_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw ValidationError(where + ": missing string field '" + key + "'");
  return obj[key].get<std::string>();
}

template <typename T>
std::vector<T> load_csv_file(const std::filesystem::path& path,
                             std::vector<T> (*loader)(std::istream&, const std::string&)) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  return loader(in, path.string());
}

}  // namespace

const char* to_string(PointwiseLabel label) {
  return label == PointwiseLabel::political ? "political" : "apolitical";
}

const char* to_string(Framing framing) { return framing == Framing::left ? "left" : "right"; }

const char* to_string(PairChoice choice) {
  switch (choice) {
    case PairChoice::first: return "first";
    case PairChoice::second: return "second";
    case PairChoice::equal: return "equal";
  }
  return "equal";
}

std::vector<PredictionRecord> load_predictions(std::istream& in, const std::string& source) {
  const csv::Table table = csv::read(in, source);
  const std::size_t c_model = table.column("model_id", source);
  const std::size_t c_arg = table.column("argument_id", source);
  const std::size_t c_rep = table.column("repetition", source);
  const std::size_t c_val = table.column("value", source);

  std::vector<PredictionRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = row_ref(source, r);
    PredictionRecord rec;
    rec.model_id = row[c_model];
    rec.argument_id = row[c_arg];
    if (rec.model_id.empty() || rec.argument_id.empty())
      throw ValidationError(where + ": empty id field");
    rec.repetition = parse_repetition(row[c_rep], where);
    if (!is_na_token(row[c_val])) rec.value = parse_score(row[c_val], where);
    records.push_back(std::move(rec));
  }
  sort_predictions(records, source);
  return records;
}

std::vector<PointwiseAnnotation> load_pointwise_annotations(std::istream& in, const std::string& source) {
  const csv::Table table = csv::read(in, source);
  const std::size_t c_ann = table.column("annotator_id", source);
  const std::size_t c_arg = table.column("argument_id", source);
  const std::size_t c_label = table.column("label", source);

  std::vector<PointwiseAnnotation> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = row_ref(source, r);
    if (row[c_ann].empty() || row[c_arg].empty())
      throw ValidationError(where + ": empty id field");
    records.push_back({row[c_ann], row[c_arg], parse_label(row[c_label], where)});
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.argument_id, a.annotator_id, a.label) <
           std::tie(b.argument_id, b.annotator_id, b.label);
  });
  return records;
}

std::vector<PairwiseAnnotation> load_pairwise_annotations(std::istream& in, const std::string& source) {
  const csv::Table table = csv::read(in, source);
  const std::size_t c_ann = table.column("annotator_id", source);
  const std::size_t c_i = table.column("arg_i", source);
  const std::size_t c_j = table.column("arg_j", source);
  const std::size_t c_framing = table.column("framing", source);
  const std::size_t c_choice = table.column("choice", source);

  std::vector<PairwiseAnnotation> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = row_ref(source, r);
    PairwiseAnnotation rec;
    rec.annotator_id = row[c_ann];
    rec.arg_i = row[c_i];
    rec.arg_j = row[c_j];
    if (rec.annotator_id.empty() || rec.arg_i.empty() || rec.arg_j.empty())
      throw ValidationError(where + ": empty id field");
    if (rec.arg_i == rec.arg_j)
      throw ValidationError(where + ": self-pair (" + rec.arg_i + ", " + rec.arg_j + ")");
    rec.framing = parse_framing(row[c_framing], where);
    rec.choice = parse_choice(row[c_choice], where);
    records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.arg_i, a.arg_j, a.framing, a.annotator_id, a.choice) <
           std::tie(b.arg_i, b.arg_j, b.framing, b.annotator_id, b.choice);
  });
  return records;
}

std::vector<ArgumentRef> load_arguments(std::istream& in, const std::string& source) {
  const csv::Table table = csv::read(in, source);
  const std::size_t c_arg = table.column("argument_id", source);
  const std::size_t c_debate = table.column("debate_id", source);
  const std::size_t c_loc = table.column("locution", source);
  const std::size_t c_prop = table.column("proposition", source);

  std::vector<ArgumentRef> records;
  records.reserve(table.rows.size());
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = row_ref(source, r);
    if (row[c_arg].empty()) throw ValidationError(where + ": empty argument_id");
    if (!seen.insert(row[c_arg]).second)
      throw ValidationError(where + ": duplicate argument_id '" + row[c_arg] + "'");
    records.push_back({row[c_arg], row[c_debate], row[c_loc], row[c_prop]});
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.argument_id < b.argument_id; });
  return records;
}

std::vector<PredictionRecord> load_predictions_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const json doc = load_json_array(path);
    std::vector<PredictionRecord> records;
    records.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string where = path.string() + " record " + std::to_string(i);
      const json& obj = doc[i];
      PredictionRecord rec;
      rec.model_id = json_string(obj, "model_id", where);
      rec.argument_id = json_string(obj, "argument_id", where);
      if (!obj.contains("repetition") || !obj["repetition"].is_number_integer())
        throw ValidationError(where + ": missing integer field 'repetition'");
      rec.repetition = obj["repetition"].get<int>();
      if (rec.repetition < 1) throw ValidationError(where + ": repetition must be >= 1");
      if (obj.contains("value") && !obj["value"].is_null()) {
        if (obj["value"].is_string()) {
          if (!is_na_token(obj["value"].get<std::string>()))
            rec.value = parse_score(obj["value"].get<std::string>(), where);
        } else if (obj["value"].is_number()) {
          const double v = obj["value"].get<double>();
          if (!(v >= 0.0 && v <= 100.0))
            throw ValidationError(where + ": score out of range [0,100]");
          rec.value = v;
        } else {
          throw ValidationError(where + ": 'value' must be a number, \"NA\", or null");
        }
      }
      records.push_back(std::move(rec));
    }
    sort_predictions(records, path.string());
    return records;
  }
  return load_csv_file(path, &load_predictions);
}

std::vector<PointwiseAnnotation> load_pointwise_annotations_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const json doc = load_json_array(path);
    std::ostringstream csv_text;
    csv_text << "annotator_id,argument_id,label\n";
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string where = path.string() + " record " + std::to_string(i);
      csv_text << csv::escape(json_string(doc[i], "annotator_id", where)) << ','
               << csv::escape(json_string(doc[i], "argument_id", where)) << ','
               << csv::escape(json_string(doc[i], "label", where)) << '\n';
    }
    std::istringstream in(csv_text.str());
    return load_pointwise_annotations(in, path.string());
  }
  return load_csv_file(path, &load_pointwise_annotations);
}

std::vector<PairwiseAnnotation> load_pairwise_annotations_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const json doc = load_json_array(path);
    std::ostringstream csv_text;
    csv_text << "annotator_id,arg_i,arg_j,framing,choice\n";
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string where = path.string() + " record " + std::to_string(i);
      csv_text << csv::escape(json_string(doc[i], "annotator_id", where)) << ','
               << csv::escape(json_string(doc[i], "arg_i", where)) << ','
               << csv::escape(json_string(doc[i], "arg_j", where)) << ','
               << csv::escape(json_string(doc[i], "framing", where)) << ','
               << csv::escape(json_string(doc[i], "choice", where)) << '\n';
    }
    std::istringstream in(csv_text.str());
    return load_pairwise_annotations(in, path.string());
  }
  return load_csv_file(path, &load_pairwise_annotations);
}

std::vector<ArgumentRef> load_arguments_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const json doc = load_json_array(path);
    std::ostringstream csv_text;
    csv_text << "argument_id,debate_id,locution,proposition\n";
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string where = path.string() + " record " + std::to_string(i);
      const json& obj = doc[i];
      auto opt = [&](const char* key) {
        return obj.contains(key) && obj[key].is_string() ? obj[key].get<std::string>()
                                                         : std::string{};
      };
      csv_text << csv::escape(json_string(obj, "argument_id", where)) << ','
               << csv::escape(opt("debate_id")) << ',' << csv::escape(opt("locution")) << ','
               << csv::escape(opt("proposition")) << '\n';
    }
    std::istringstream in(csv_text.str());
    return load_arguments(in, path.string());
  }
  return load_csv_file(path, &load_arguments);
}

void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records) {
  csv::write_row(out, {"model_id", "argument_id", "repetition", "value"});
  for (const auto& r : records)
    csv::write_row(out, {r.model_id, r.argument_id, std::to_string(r.repetition),
                         score_to_field(r.value)});
}

void write_pointwise_annotations(std::ostream& out, const std::vector<PointwiseAnnotation>& records) {
  csv::write_row(out, {"annotator_id", "argument_id", "label"});
  for (const auto& r : records)
    csv::write_row(out, {r.annotator_id, r.argument_id, to_string(r.label)});
}

void write_pairwise_annotations(std::ostream& out, const std::vector<PairwiseAnnotation>& records) {
  csv::write_row(out, {"annotator_id", "arg_i", "arg_j", "framing", "choice"});
  for (const auto& r : records)
    csv::write_row(out, {r.annotator_id, r.arg_i, r.arg_j, to_string(r.framing), to_string(r.choice)});
}

void write_arguments(std::ostream& out, const std::vector<ArgumentRef>& records) {
  csv::write_row(out, {"argument_id", "debate_id", "locution", "proposition"});
  for (const auto& r : records)
    csv::write_row(out, {r.argument_id, r.debate_id, r.locution, r.proposition});
}

}  // namespace stanceval
