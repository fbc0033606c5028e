#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trollmap/taxonomy.hpp"

namespace trollmap {

struct IndexSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Per-class test counts are n_c * fraction rounded by largest remainder so
// that they add up to round(n * fraction). Rows are chosen by a seeded
// shuffle within each class. Throws ConfigError for a fraction outside (0, 1)
// and ValidationError when a present class has a single sample.
IndexSplit stratified_split(std::span<const Category> y, double test_fraction,
                            std::uint64_t seed);

// k folds; within each class, shuffled rows are dealt round-robin so per-class
// fold counts differ by at most one. Each pair's test part is one fold.
// Throws ConfigError for k < 2 and ValidationError when a present class has
// fewer than k samples.
std::vector<IndexSplit> stratified_kfold(std::span<const Category> y, std::size_t k,
                                         std::uint64_t seed);

// Rows are true categories, columns predicted ones.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kCategoryCount>, kCategoryCount> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t true_positives(Category c) const noexcept;
  std::uint64_t predicted(Category c) const noexcept;  // column sum
  std::uint64_t actual(Category c) const noexcept;     // row sum
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  // A zero denominator was replaced by 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

struct ClassificationReport {
  ConfusionMatrix confusion;
  std::array<ClassMetrics, kCategoryCount> per_class{};
  double weighted_f1 = 0.0;
  double accuracy = 0.0;

  bool zero_division() const noexcept;
};

// Throws ValidationError on a length mismatch or empty input.
ClassificationReport classification_report(std::span<const Category> y_true,
                                           std::span<const Category> y_pred);

// Reference dataset: account id -> the reference taxonomy's group name.
using ReferenceGroups = std::map<std::string, std::string>;

// Reads an id,group file. Accepted id headers: user_id, userid, handle,
// author; group headers: group, account_category.
ReferenceGroups parse_reference_file(std::istream& in, char delimiter = ',');

struct OverlapMiss {
  std::string user_id;
  Category our_category;
  std::string reference_group;
};

struct OverlapReport {
  std::size_t matched = 0;
  std::size_t total = 0;
  std::optional<double> rate;  // empty when total == 0
  std::vector<OverlapMiss> misclassified;
  std::optional<std::string> warning;
};

// Compares our `category` with the reference taxonomy's `mapped_group` over
// the ids present in both datasets. The universe counts every joined id that
// either side places in its group; matched ids are placed there by both, and
// every other id is a miss carrying our category and the reference group.
OverlapReport overlap_validation(const LabelSet& ours, Category category,
                                 const ReferenceGroups& reference, std::string_view mapped_group);

struct AgreementReport {
  std::size_t compared = 0;
  std::size_t matched = 0;
  double rate = 0.0;
  std::array<std::size_t, kCategoryCount> actual{};     // manual label counts
  std::array<std::size_t, kCategoryCount> predicted{};  // predicted label counts
  std::array<std::size_t, kCategoryCount> agreed{};     // per manual category
};

// Share of ids in both sets whose categories agree. Throws ValidationError
// when the id sets do not intersect.
AgreementReport agreement_validation(const LabelSet& manual, const LabelSet& predicted);

}  // namespace trollmap
