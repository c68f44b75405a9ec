#include "stanceval/comparisons.hpp"

#include <algorithm>
#include <cmath>

#include "stanceval/errors.hpp"
#include "stanceval/kernels.hpp"

namespace stanceval {

WinMatrix::WinMatrix(std::vector<std::string> ids) : ids_(std::move(ids)) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second)
      throw ValidationError("win matrix: duplicate item id '" + ids_[i] + "'");
  }
  w_.assign(ids_.size() * ids_.size(), 0.0);
}

std::size_t WinMatrix::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("win matrix: unknown item '" + id + "'");
  return it->second;
}

void WinMatrix::add_win(std::size_t i, std::size_t j, double mass) {
  if (i == j) throw ValidationError("win matrix: diagonal entry must stay zero");
  w_[i * size() + j] += mass;
}

void WinMatrix::add_draw(std::size_t i, std::size_t j) {
  if (i == j) throw ValidationError("win matrix: diagonal entry must stay zero");
  w_[i * size() + j] += 0.5;
  w_[j * size() + i] += 0.5;
}

WinMatrix aggregate(const WinMatrix& a, const WinMatrix& b) {
  if (a.ids_ != b.ids_) throw ValidationError("aggregate: win matrices index different items");
  WinMatrix out(a.ids_);
  for (std::size_t i = 0; i < out.w_.size(); ++i) out.w_[i] = a.w_[i] + b.w_[i];
  return out;
}

WinMatrix WinMatrix::restricted_to(const std::vector<std::pair<std::string, std::string>>& pairs) const {
  WinMatrix out(ids_);
  for (const auto& [lhs, rhs] : pairs) {
    const std::size_t i = index_of(lhs);
    const std::size_t j = index_of(rhs);
    out.w_[i * size() + j] = w_[i * size() + j];
    out.w_[j * size() + i] = w_[j * size() + i];
  }
  return out;
}

double win_value(int x_bin, int y_bin) {
  if (x_bin > y_bin) return 1.0;
  if (x_bin == y_bin) return 0.5;
  return 0.0;
}

WinMatrix model_win_matrix(const std::map<std::string, std::vector<int>>& binned_reps,
                           const std::vector<std::string>& items) {
  WinMatrix wm(items);
  // Filter NA repetitions; bins fit in a byte for the counting kernel.
  std::vector<std::vector<std::uint8_t>> reps(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto it = binned_reps.find(items[i]);
    if (it != binned_reps.end()) {
      for (int b : it->second) {
        if (b == kNaBin) continue;
        if (b < 0 || b > 127)
          throw ValidationError("model_win_matrix: bin out of byte range for item '" + items[i] + "'");
        reps[i].push_back(static_cast<std::uint8_t>(b));
      }
    }
    if (reps[i].empty())
      throw ValidationError("model_win_matrix: item '" + items[i] +
                            "' has no valid (non-NA) repetitions");
  }

  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const auto counts = kernels::pair_win_counts(reps[i], reps[j]);
      const std::uint64_t total =
          static_cast<std::uint64_t>(reps[i].size()) * static_cast<std::uint64_t>(reps[j].size());
      const std::uint64_t less = total - counts.greater - counts.equal;
      const double half_draw = 0.5 * static_cast<double>(counts.equal);
      wm.add_win(i, j, static_cast<double>(counts.greater) + half_draw);
      wm.add_win(j, i, static_cast<double>(less) + half_draw);
    }
  }
  return wm;
}

WinMatrix human_win_matrix(std::span<const PairwiseAnnotation> annotations, FramingFilter filter,
                           const std::vector<std::string>& items) {
  if (filter == FramingFilter::both) {
    return aggregate(human_win_matrix(annotations, FramingFilter::left_only, items),
                     human_win_matrix(annotations, FramingFilter::right_only, items));
  }
  const Framing framing = filter == FramingFilter::left_only ? Framing::left : Framing::right;
  WinMatrix wm(items);
  for (const auto& a : annotations) {
    if (a.framing != framing) continue;
    std::size_t i = wm.index_of(a.arg_i);
    std::size_t j = wm.index_of(a.arg_j);
    // Left-framed tasks ask for the more left-wing argument; transposing the
    // matrix is equivalent to swapping the pair before counting the win.
    if (framing == Framing::left) std::swap(i, j);
    switch (a.choice) {
      case PairChoice::first: wm.add_win(i, j, 1.0); break;
      case PairChoice::second: wm.add_win(j, i, 1.0); break;
      case PairChoice::equal: wm.add_draw(i, j); break;
    }
  }
  return wm;
}

double normalized_value(const WinMatrix& wm, std::size_t i, std::size_t j) {
  const double mass = wm.pair_mass(i, j);
  if (mass <= 0.0)
    throw ComputationError("normalized win share undefined: no comparisons between '" +
                           wm.ids()[i] + "' and '" + wm.ids()[j] + "'");
  return wm.win_mass(i, j) / mass;
}

const std::vector<PairKey>& ConfidencePartition::subset(bool model_confident,
                                                        bool human_confident) const {
  if (model_confident) return human_confident ? p11 : p10;
  return human_confident ? p01 : p00;
}

ConfidencePartition confidence_partition(const WinMatrix& model, const WinMatrix& human,
                                         const PairSet& pairs, double margin) {
  if (!(margin > 0.0 && margin <= 0.5))
    throw ValidationError("confidence_partition: margin must lie in (0, 0.5]");
  ConfidencePartition part;
  for (const auto& p : pairs.pairs) {
    const PairKey key{p.arg_i, p.arg_j};
    const double w_model =
        normalized_value(model, model.index_of(p.arg_i), model.index_of(p.arg_j));
    const double w_human =
        normalized_value(human, human.index_of(p.arg_i), human.index_of(p.arg_j));
    ConfidenceFlags flags;
    flags.model_confident = std::abs(w_model - 0.5) >= margin;
    flags.human_confident = std::abs(w_human - 0.5) >= margin;
    part.flags.emplace(key, flags);
    if (flags.model_confident && flags.human_confident) part.p11.push_back(key);
    else if (flags.model_confident) part.p10.push_back(key);
    else if (flags.human_confident) part.p01.push_back(key);
    else part.p00.push_back(key);
  }
  return part;
}

}  // namespace stanceval
