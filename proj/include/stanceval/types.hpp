#pragma once

#include <optional>
#include <string>

namespace stanceval {

// One argument (locution-proposition pair). All computation keys off
// argument_id; the text payload is optional.
struct ArgumentRef {
  std::string argument_id;
  std::string debate_id;     // may be empty
  std::string locution;      // may be empty
  std::string proposition;   // may be empty
};

// One scorer repetition for one argument. `value` is a position score in
// [0,100], or nullopt for an apolitical ("NA") outcome.
struct PredictionRecord {
  std::string model_id;
  std::string argument_id;
  int repetition = 1;  // >= 1
  std::optional<double> value;

  bool is_na() const { return !value.has_value(); }
};

enum class PointwiseLabel { political, apolitical };

enum class Framing { left, right };

enum class PairChoice { first, second, equal };

// Pointwise human judgment: is the argument political?
struct PointwiseAnnotation {
  std::string annotator_id;
  std::string argument_id;
  PointwiseLabel label;
};

// Framed pairwise human judgment: which of (arg_i, arg_j) is more left/right
// wing (per framing), or "equal".
struct PairwiseAnnotation {
  std::string annotator_id;
  std::string arg_i;
  std::string arg_j;
  Framing framing;
  PairChoice choice;
};

const char* to_string(PointwiseLabel label);
const char* to_string(Framing framing);
const char* to_string(PairChoice choice);

}  // namespace stanceval
