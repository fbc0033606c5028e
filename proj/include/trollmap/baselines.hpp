#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "trollmap/features.hpp"
#include "trollmap/forest.hpp"
#include "trollmap/taxonomy.hpp"

namespace trollmap {

// Comparison classifiers for the forest. Fixed iteration budgets: none of
// them reports non-convergence.
enum class BaselineKind : std::uint8_t {
  NaiveBayes,
  DecisionTree,
  KNN,
  LogisticRegression,
  LinearSVM,
  AdaBoost,
};

inline constexpr std::array<BaselineKind, 6> kAllBaselines = {
    BaselineKind::NaiveBayes,         BaselineKind::DecisionTree, BaselineKind::KNN,
    BaselineKind::LogisticRegression, BaselineKind::LinearSVM,    BaselineKind::AdaBoost};

std::string_view to_string(BaselineKind kind) noexcept;
std::optional<BaselineKind> parse_baseline_kind(std::string_view name) noexcept;

struct BaselineHyperparams {
  double nb_variance_floor = 1e-9;
  std::size_t tree_max_depth = 32;
  std::size_t tree_min_samples_split = 2;
  std::size_t knn_k = 5;
  std::size_t lr_iterations = 500;
  double lr_learning_rate = 0.5;
  double lr_l2 = 1e-4;
  std::size_t svm_iterations = 500;
  double svm_learning_rate = 0.5;
  double svm_lambda = 1e-4;
  std::size_t ada_rounds = 50;
  std::uint64_t seed = 0;
};

// Per-feature z-scoring fitted on training data; constant features keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const FeatureMatrix& x);
  std::vector<double> apply(std::span<const double> row) const;
};

struct GaussianNaiveBayes {
  std::array<bool, kCategoryCount> present{};
  std::array<double, kCategoryCount> log_prior{};
  std::array<std::vector<double>, kCategoryCount> mean;
  std::array<std::vector<double>, kCategoryCount> variance;
};

struct TreeClassifier {
  DecisionTree tree;
};

struct NearestNeighbors {
  FeatureMatrix train;
  std::vector<Category> labels;
  std::size_t k = 1;
};

// Multinomial logistic regression or one-vs-rest linear SVM on standardized
// inputs. weights[c] holds d coefficients followed by the bias.
struct LinearClassifier {
  Standardizer standardizer;
  std::array<bool, kCategoryCount> present{};
  std::array<std::vector<double>, kCategoryCount> weights;
};

struct AdaBoostEnsemble {
  std::vector<std::pair<DecisionTree, double>> stumps;  // (stump, alpha)
};

struct BaselineModel {
  BaselineKind kind;
  std::variant<GaussianNaiveBayes, TreeClassifier, NearestNeighbors, LinearClassifier,
               AdaBoostEnsemble>
      model;
  std::size_t n_features = 0;
};

// Throws ValidationError on shape problems or a single class, ConfigError for
// hyperparameters that do not fit the data (e.g. knn_k > n).
BaselineModel train_baseline(BaselineKind kind, const FeatureMatrix& x,
                             std::span<const Category> y, const BaselineHyperparams& hp = {});

// Throws DomainError on a dimension mismatch.
Category predict_baseline(const BaselineModel& model, std::span<const double> x);

std::vector<Category> predict_baseline_all(const BaselineModel& model, const FeatureMatrix& x);

}  // namespace trollmap
