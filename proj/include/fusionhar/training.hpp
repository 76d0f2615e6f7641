#pragma once

#include <set>
#include <span>
#include <string>

#include "fusionhar/core.hpp"
#include "fusionhar/fusion.hpp"

namespace fusionhar {

// Ties resolve to the lowest index.
inline ClassIndex argmax_lowest(std::span<const double> values) {
  require(!values.empty(), ErrorKind::Argument, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

namespace detail {

inline std::size_t count_classes(std::span<const ClassIndex> y, std::size_t num_classes) {
  std::size_t k = num_classes;
  for (auto v : y) k = std::max(k, v + 1);
  return k;
}

inline void require_trainable(const FeatureMatrix& X, std::span<const ClassIndex> y, const char* who) {
  require(X.rows() == y.size(), ErrorKind::Argument, std::string(who) + ": feature rows and labels differ in length");
  require(X.rows() >= 2, ErrorKind::Argument, std::string(who) + ": need at least 2 samples");
  require(X.cols() >= 1, ErrorKind::Argument, std::string(who) + ": need at least 1 feature");
  std::set<ClassIndex> distinct(y.begin(), y.end());
  require(distinct.size() >= 2, ErrorKind::Degenerate, std::string(who) + ": training labels contain a single class");
}

}  // namespace detail

}  // namespace fusionhar
