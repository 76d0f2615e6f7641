#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fusionhar/core.hpp"
#include "fusionhar/fusion.hpp"
#include <nlohmann/json.hpp>

namespace fusionhar {

inline constexpr double kSplitTieTolerance = 1e-12;

struct TreeParams {
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0: all features at every split
};

struct TreeNode {
  // Negative for leaves.
  int feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  // Leaf payload: class for classification trees, mean target for regression.
  ClassIndex label = 0;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Binary CART tree. Samples with x[feature] <= threshold go left.
class DecisionTree {
 public:
  enum class Kind { Classification, Regression };

  DecisionTree() = default;

  Kind kind() const noexcept { return kind_; }
  std::size_t num_features() const noexcept { return num_features_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  const TreeNode& leaf_for(std::span<const double> x) const {
    require(x.size() == num_features_, ErrorKind::Argument,
            "tree expects " + std::to_string(num_features_) + " features, got " + std::to_string(x.size()));
    std::uint32_t i = 0;
    while (!nodes_[i].is_leaf())
      i = x[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    return nodes_[i];
  }

  ClassIndex predict_class(std::span<const double> x) const { return leaf_for(x).label; }
  double predict_value(std::span<const double> x) const { return leaf_for(x).value; }

  std::size_t depth() const { return nodes_.empty() ? 0 : depth_from(0); }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  // Gini-impurity classification tree over `samples` (row indices into X,
  // repeats allowed, as produced by bootstrapping).
  static DecisionTree fit_classifier(const FeatureMatrix& X, std::span<const ClassIndex> y, std::size_t num_classes,
                                     std::span<const std::size_t> samples, const TreeParams& params, Rng& rng);

  // Squared-error regression tree on real-valued targets.
  static DecisionTree fit_regressor(const FeatureMatrix& X, std::span<const double> targets,
                                    std::span<const std::size_t> samples, const TreeParams& params, Rng& rng);

  friend void to_json(nlohmann::json& j, const DecisionTree& t) {
    j = nlohmann::json{{"kind", t.kind_ == Kind::Classification ? "classification" : "regression"},
                       {"num_features", t.num_features_},
                       {"root", t.node_json(0)}};
  }

  friend void from_json(const nlohmann::json& j, DecisionTree& t) {
    const auto kind = j.at("kind").get<std::string>();
    require(kind == "classification" || kind == "regression", ErrorKind::Config, "unknown tree kind '" + kind + "'");
    t.kind_ = kind == "classification" ? Kind::Classification : Kind::Regression;
    t.num_features_ = j.at("num_features").get<std::size_t>();
    t.nodes_.clear();
    t.read_node(j.at("root"));
  }

  bool operator==(const DecisionTree&) const = default;

 private:
  std::size_t depth_from(std::uint32_t i) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }

  nlohmann::json node_json(std::uint32_t i) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      if (kind_ == Kind::Classification) return {{"class", n.label}};
      return {{"value", n.value}};
    }
    return {{"feature", n.feature}, {"threshold", n.threshold}, {"left", node_json(n.left)}, {"right", node_json(n.right)}};
  }

  std::uint32_t read_node(const nlohmann::json& j) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    if (j.contains("feature")) {
      const int f = j.at("feature").get<int>();
      require(f >= 0 && static_cast<std::size_t>(f) < num_features_, ErrorKind::Config, "tree node feature out of range");
      const double thr = j.at("threshold").get<double>();
      const auto l = read_node(j.at("left"));
      const auto r = read_node(j.at("right"));
      nodes_[index].feature = f;
      nodes_[index].threshold = thr;
      nodes_[index].left = l;
      nodes_[index].right = r;
    } else if (kind_ == Kind::Classification) {
      nodes_[index].label = j.at("class").get<ClassIndex>();
    } else {
      nodes_[index].value = j.at("value").get<double>();
    }
    return index;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
    double gap = 0.0;
  };

  struct Builder;

  Kind kind_ = Kind::Classification;
  std::size_t num_features_ = 0;
  std::vector<TreeNode> nodes_;
};

struct DecisionTree::Builder {
  const FeatureMatrix& X;
  const TreeParams& params;
  Rng& rng;
  DecisionTree tree;
  std::span<const ClassIndex> labels;
  std::span<const double> targets;
  std::size_t num_classes = 0;
  std::vector<std::size_t> work;
  std::vector<std::size_t> sorted;
  std::vector<std::size_t> feature_order;

  Builder(const FeatureMatrix& x, const TreeParams& p, Rng& r) : X(x), params(p), rng(r) {
    tree.num_features_ = X.cols();
    feature_order.resize(X.cols());
  }

  bool classification() const { return tree.kind_ == Kind::Classification; }

  void build(std::span<const std::size_t> samples) {
    require(!samples.empty(), ErrorKind::Argument, "cannot fit a tree on zero samples");
    require(X.cols() > 0, ErrorKind::Argument, "cannot fit a tree on zero features");
    work.assign(samples.begin(), samples.end());
    grow(0, work.size(), 0);
  }

  void make_leaf(std::uint32_t node, std::size_t begin, std::size_t end) {
    auto& n = tree.nodes_[node];
    n.feature = -1;
    if (classification()) {
      std::vector<std::size_t> counts(num_classes, 0);
      for (std::size_t i = begin; i < end; ++i) ++counts[labels[work[i]]];
      n.label = static_cast<ClassIndex>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    } else {
      double sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) sum += targets[work[i]];
      n.value = sum / static_cast<double>(end - begin);
    }
  }

  bool is_pure(std::size_t begin, std::size_t end) const {
    for (std::size_t i = begin + 1; i < end; ++i) {
      if (classification() ? labels[work[i]] != labels[work[begin]] : targets[work[i]] != targets[work[begin]])
        return false;
    }
    return true;
  }

  // Best threshold on one feature, scored by the quantity whose maximum
  // minimizes weighted child impurity: sum_c n_c^2 / n per side for Gini,
  // (sum y)^2 / n per side for squared error.
  void scan_feature(std::size_t f, std::size_t begin, std::size_t end, Split& best) {
    sorted.assign(work.begin() + static_cast<std::ptrdiff_t>(begin), work.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      const double xa = X(a, f), xb = X(b, f);
      return xa < xb || (xa == xb && a < b);
    });
    const std::size_t n = sorted.size();
    const std::size_t min_leaf = std::max<std::size_t>(1, params.min_samples_leaf);
    if (classification()) {
      std::vector<double> left(num_classes, 0.0), right(num_classes, 0.0);
      for (auto s : sorted) right[labels[s]] += 1.0;
      double sq_left = 0.0, sq_right = 0.0;
      for (double c : right) sq_right += c * c;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto c = labels[sorted[i]];
        sq_left += 2.0 * left[c] + 1.0;
        sq_right -= 2.0 * right[c] - 1.0;
        left[c] += 1.0;
        right[c] -= 1.0;
        consider(f, i, n, min_leaf, sq_left / static_cast<double>(i + 1) + sq_right / static_cast<double>(n - i - 1), best);
      }
    } else {
      double total = 0.0;
      for (auto s : sorted) total += targets[s];
      double sum_left = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        sum_left += targets[sorted[i]];
        const double sum_right = total - sum_left;
        const auto nl = static_cast<double>(i + 1), nr = static_cast<double>(n - i - 1);
        consider(f, i, n, min_leaf, sum_left * sum_left / nl + sum_right * sum_right / nr, best);
      }
    }
  }

  void consider(std::size_t f, std::size_t i, std::size_t n, std::size_t min_leaf, double score, Split& best) const {
    if (i + 1 < min_leaf || n - i - 1 < min_leaf) return;
    const double lo = X(sorted[i], f), hi = X(sorted[i + 1], f);
    if (!(lo < hi)) return;
    // Scores equal up to rounding count as ties; the wider gap wins.
    const double gap = hi - lo;
    if (best.feature >= 0) {
      const double tol = kSplitTieTolerance * std::max(1.0, std::abs(best.score));
      if (score < best.score - tol) return;
      if (score <= best.score + tol && !(gap > best.gap)) return;
    }
    double thr = lo + gap / 2.0;
    if (!(thr < hi)) thr = lo;
    best = {static_cast<int>(f), thr, score, gap};
  }

  std::uint32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const auto node = static_cast<std::uint32_t>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    const std::size_t n = end - begin;
    const std::size_t min_leaf = std::max<std::size_t>(1, params.min_samples_leaf);
    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
    if (depth_capped || n < 2 * min_leaf || is_pure(begin, end)) {
      make_leaf(node, begin, end);
      return node;
    }

    // Features in random order; the first max_features are searched, and
    // the rest only if none of those admits a valid split.
    std::iota(feature_order.begin(), feature_order.end(), std::size_t{0});
    const std::size_t d = feature_order.size();
    const std::size_t k = params.max_features == 0 ? d : std::min(params.max_features, d);
    if (k < d) shuffle(std::span<std::size_t>(feature_order), rng);
    Split best;
    for (std::size_t j = 0; j < d; ++j) {
      if (j >= k && best.feature >= 0) break;
      scan_feature(feature_order[j], begin, end, best);
    }
    if (best.feature < 0) {
      make_leaf(node, begin, end);
      return node;
    }

    const auto f = static_cast<std::size_t>(best.feature);
    const double thr = best.threshold;
    auto mid_it = std::stable_partition(work.begin() + static_cast<std::ptrdiff_t>(begin),
                                        work.begin() + static_cast<std::ptrdiff_t>(end),
                                        [&](std::size_t s) { return X(s, f) <= thr; });
    const auto mid = static_cast<std::size_t>(mid_it - work.begin());
    const auto left = grow(begin, mid, depth + 1);
    const auto right = grow(mid, end, depth + 1);
    auto& nd = tree.nodes_[node];
    nd.feature = best.feature;
    nd.threshold = thr;
    nd.left = left;
    nd.right = right;
    return node;
  }
};

inline DecisionTree DecisionTree::fit_classifier(const FeatureMatrix& X, std::span<const ClassIndex> y,
                                                 std::size_t num_classes, std::span<const std::size_t> samples,
                                                 const TreeParams& params, Rng& rng) {
  Builder b(X, params, rng);
  b.tree.kind_ = Kind::Classification;
  b.labels = y;
  b.num_classes = num_classes;
  b.build(samples);
  return std::move(b.tree);
}

inline DecisionTree DecisionTree::fit_regressor(const FeatureMatrix& X, std::span<const double> targets,
                                                std::span<const std::size_t> samples, const TreeParams& params,
                                                Rng& rng) {
  Builder b(X, params, rng);
  b.tree.kind_ = Kind::Regression;
  b.targets = targets;
  b.build(samples);
  return std::move(b.tree);
}

}  // namespace fusionhar
