#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trollmap/ingest.hpp"
#include "trollmap/taxonomy.hpp"

namespace trollmap {

// Dense row-major matrix: one row per account, one named column per feature.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  // Throws ConfigError on shape mismatch, duplicate column names or an empty
  // matrix, and DomainError on non-finite values.
  FeatureMatrix(std::vector<std::string> row_ids, std::vector<std::string> column_names,
                std::vector<double> values);

  static FeatureMatrix from_profiles(std::span<const AccountProfile> profiles);

  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t cols() const noexcept { return column_names_.size(); }

  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
  const std::vector<std::string>& column_names() const noexcept { return column_names_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(values_).subspan(i * cols(), cols());
  }
  double at(std::size_t r, std::size_t c) const noexcept { return values_[r * cols() + c]; }

  std::optional<std::size_t> column_index(const std::string& name) const;

  // New matrix with the named columns, in the order given.
  FeatureMatrix select_columns(std::span<const std::string> names) const;
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::vector<std::string> row_ids_;
  std::vector<std::string> column_names_;
  std::vector<double> values_;
};

struct FeatureScore {
  std::string name;
  std::size_t column = 0;
  double score = 0.0;
};

struct FeatureScoreReport {
  std::vector<FeatureScore> scores;  // descending by score, ties by column order
};

// Chi-square score of each non-negative feature against the labels, built on
// the summed-value contingency table: observed O_c is the feature total within
// class c, expected E_c the overall total times n_c / n, and the score
// sum_c (O_c - E_c)^2 / E_c over classes with E_c > 0.
// Throws DomainError on a negative value and ValidationError on a label count
// mismatch or fewer than two classes.
FeatureScoreReport chi2_scores(const FeatureMatrix& x, std::span<const Category> y);

// First k names of the report. Throws ConfigError unless 1 <= k <= d.
std::vector<std::string> select_top_k(const FeatureScoreReport& report, std::size_t k);

// d x d Pearson correlation. Entries involving a zero-variance column are
// left empty (undefined) instead of being invented.
struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::optional<double>> values;  // row-major d x d

  std::optional<double> at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
};

CorrelationMatrix pearson_correlation_matrix(const FeatureMatrix& x);

// Divides each row by its L1 norm. Throws RowError naming every all-zero row.
FeatureMatrix l1_normalize(const FeatureMatrix& x);

}  // namespace trollmap
