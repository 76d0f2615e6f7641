#pragma once

#include <map>
#include <span>

#include "fusionhar/core.hpp"

namespace fusionhar {

// Decision-level fusion over one prediction per sensor model. The modal
// class wins. When several classes share the top count (for three sensors:
// all three disagree), the most confident prediction among them wins, and
// any remaining tie goes to the lowest class index.
inline ClassIndex majority_vote(std::span<const ClassIndex> predictions, std::span<const double> confidences = {}) {
  require(!predictions.empty(), ErrorKind::Argument, "majority vote needs at least one prediction");
  require(confidences.empty() || confidences.size() == predictions.size(), ErrorKind::Argument,
          "majority vote needs one confidence per prediction");
  std::map<ClassIndex, std::size_t> counts;
  for (auto p : predictions) ++counts[p];
  std::size_t top = 0;
  for (const auto& [k, c] : counts) top = std::max(top, c);
  std::vector<ClassIndex> tied;
  for (const auto& [k, c] : counts)
    if (c == top) tied.push_back(k);
  if (tied.size() == 1) return tied.front();

  require(!confidences.empty(), ErrorKind::Argument, "majority vote is tied and no confidences were supplied");
  std::optional<ClassIndex> best;
  double best_conf = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto k = predictions[i];
    if (counts[k] != top) continue;
    const double c = confidences[i];
    if (!best || c > best_conf || (c == best_conf && k < *best)) {
      best = k;
      best_conf = c;
    }
  }
  return *best;
}

inline ClassIndex majority_vote(std::initializer_list<ClassIndex> predictions,
                                std::initializer_list<double> confidences = {}) {
  return majority_vote(std::span<const ClassIndex>(predictions.begin(), predictions.size()),
                       std::span<const double>(confidences.begin(), confidences.size()));
}

}  // namespace fusionhar
