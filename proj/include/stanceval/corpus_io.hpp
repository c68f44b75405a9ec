#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "stanceval/types.hpp"

namespace stanceval {

// Loaders for the four input tables. Each accepts CSV (header row required)
// and, at the file level, a JSON array of objects carrying the same fields.
// Records are validated and returned in canonical order, so loading is
// insensitive to input row order.
//
// CSV schemas:
//   predictions.csv  model_id,argument_id,repetition,value   (value: score or NA)
//   pointwise.csv    annotator_id,argument_id,label          (political|apolitical)
//   pairwise.csv     annotator_id,arg_i,arg_j,framing,choice (left|right; first|second|equal)
//   arguments.csv    argument_id,debate_id,locution,proposition

std::vector<PredictionRecord> load_predictions(std::istream& in, const std::string& source);
std::vector<PointwiseAnnotation> load_pointwise_annotations(std::istream& in, const std::string& source);
std::vector<PairwiseAnnotation> load_pairwise_annotations(std::istream& in, const std::string& source);
std::vector<ArgumentRef> load_arguments(std::istream& in, const std::string& source);

// File-level entry points; ".json" selects the structured-object format.
std::vector<PredictionRecord> load_predictions_file(const std::filesystem::path& path);
std::vector<PointwiseAnnotation> load_pointwise_annotations_file(const std::filesystem::path& path);
std::vector<PairwiseAnnotation> load_pairwise_annotations_file(const std::filesystem::path& path);
std::vector<ArgumentRef> load_arguments_file(const std::filesystem::path& path);

// Writers emit the CSV schemas above; loading the output reproduces the
// input record set exactly.
void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records);
void write_pointwise_annotations(std::ostream& out, const std::vector<PointwiseAnnotation>& records);
void write_pairwise_annotations(std::ostream& out, const std::vector<PairwiseAnnotation>& records);
void write_arguments(std::ostream& out, const std::vector<ArgumentRef>& records);

}  // namespace stanceval
