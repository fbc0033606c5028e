#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trollmap/features.hpp"
#include "trollmap/rng.hpp"
#include "trollmap/taxonomy.hpp"

namespace trollmap {

using ClassDistribution = std::array<double, kCategoryCount>;
using ClassWeights = std::array<double, kCategoryCount>;

// Gini impurity sum_i p_i (1 - p_i) of a class-mass vector. DomainError when
// the total mass is not positive or any mass is negative.
double gini_impurity(const ClassDistribution& class_mass);

// Per-class weights n / (k' * n_c) for the k' classes present in a bootstrap
// sample; absent classes get 0.
ClassWeights balanced_subsample_weights(std::span<const Category> bootstrap_labels);

enum class ClassWeightMode : std::uint8_t { Uniform, BalancedSubsample };

std::string_view to_string(ClassWeightMode mode) noexcept;
std::optional<ClassWeightMode> parse_class_weight_mode(std::string_view name) noexcept;

struct TreeParams {
  std::size_t max_depth = 5;
  std::size_t min_samples_split = 2;
  // Features drawn per node; 0 or >= d means every feature is considered.
  std::size_t features_per_split = 0;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 5;
  std::size_t min_samples_split = 2;
  std::optional<std::size_t> features_per_split;  // unset: floor(sqrt(d))
  std::uint64_t seed = 0;
  ClassWeightMode class_weight_mode = ClassWeightMode::BalancedSubsample;

  TreeParams tree_params(std::size_t n_features) const;
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct Leaf {
  ClassDistribution distribution{};  // sums to 1
  friend bool operator==(const Leaf&, const Leaf&) = default;
};

// Samples with x[feature] <= threshold go left.
struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  friend bool operator==(const Split&, const Split&) = default;
};

using TreeNode = std::variant<Split, Leaf>;

// Binary classification tree stored as a node array; node 0 is the root and
// children always follow their parent.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  const ClassDistribution& predict_distribution(std::span<const double> x) const;
  Category predict(std::span<const double> x) const;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

// Training sample with multiplicity `count` and total weight `weight`.
struct WeightedSample {
  std::uint32_t row = 0;
  std::uint32_t count = 1;
  double weight = 1.0;
};

// CART growth on weighted samples. At each node `features_per_split` feature
// indices are drawn without replacement from `rng`; the split minimizing the
// class-mass-weighted Gini of the children is taken if it strictly lowers the
// node's impurity. Candidate thresholds are midpoints between consecutive
// distinct values; ties go to the lower feature index, then lower threshold.
// Growth stops at max_depth, on a pure node, below min_samples_split samples
// or when no split improves.
DecisionTree grow_tree(const FeatureMatrix& x, std::span<const Category> y,
                       std::span<const WeightedSample> samples, const TreeParams& params,
                       Rng& rng);

// Tree on the rows listed in `sample_indices` (duplicates allowed, as in a
// bootstrap), each weighted by its class weight.
DecisionTree train_tree(const FeatureMatrix& x, std::span<const Category> y,
                        std::span<const std::size_t> sample_indices,
                        const ClassWeights& class_weights, const TreeParams& params, Rng& rng);

// Tree on every row once.
DecisionTree train_tree(const FeatureMatrix& x, std::span<const Category> y,
                        const ClassWeights& class_weights, const TreeParams& params, Rng& rng);

struct ForestTree {
  DecisionTree tree;
  std::vector<std::uint32_t> bootstrap;  // in draw order
  ClassWeights class_weights{};
  friend bool operator==(const ForestTree&, const ForestTree&) = default;
};

struct Forest {
  ForestParams params;
  std::vector<std::string> feature_names;
  std::vector<ForestTree> trees;

  std::size_t n_features() const noexcept { return feature_names.size(); }
  friend bool operator==(const Forest&, const Forest&) = default;
};

// Tree t is grown from Rng(derive_stream(params.seed, t)) on a size-n bootstrap
// drawn from that stream, so the forest is a pure function of (x, y, params).
// Throws ValidationError for fewer than two rows or classes, ConfigError for
// bad parameters.
Forest train_forest(const FeatureMatrix& x, std::span<const Category> y,
                    const ForestParams& params);

struct Prediction {
  Category category;
  ClassDistribution distribution{};
};

// Mean of the trees' leaf distributions; argmax with canonical tie-break. The
// mean is summed in sorted order so it does not depend on tree order.
// Throws DomainError on a dimension mismatch.
Prediction predict(const Forest& forest, std::span<const double> x);
std::vector<Category> predict_all(const Forest& forest, const FeatureMatrix& x);

// Index of the largest entry, lowest index on ties.
Category argmax_category(const ClassDistribution& distribution) noexcept;

struct DepthScore {
  std::size_t depth = 0;
  double mean_weighted_f1 = 0.0;
};

// Stratified k-fold weighted-f1 of forests with each max_depth in `depths`.
std::vector<DepthScore> depth_sweep(const FeatureMatrix& x, std::span<const Category> y,
                                    std::span<const std::size_t> depths,
                                    const ForestParams& params, std::size_t folds);

// Versioned JSON model file. `meta_json`, when given, is embedded verbatim
// under "meta". Reading validates structure and throws SchemaError.
void write_forest(std::ostream& out, const Forest& forest, std::string_view meta_json = {});
Forest read_forest(std::istream& in);

}  // namespace trollmap
