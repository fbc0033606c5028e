#include "trollmap/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "trollmap/error.hpp"

namespace trollmap {

FeatureMatrix::FeatureMatrix(std::vector<std::string> row_ids,
                             std::vector<std::string> column_names, std::vector<double> values)
    : row_ids_(std::move(row_ids)),
      column_names_(std::move(column_names)),
      values_(std::move(values)) {
  if (row_ids_.empty() || column_names_.empty()) {
    throw ConfigError("feature matrix needs at least one row and one column");
  }
  if (values_.size() != row_ids_.size() * column_names_.size()) {
    throw ConfigError("feature matrix values do not match its shape");
  }
  std::set<std::string> unique(column_names_.begin(), column_names_.end());
  if (unique.size() != column_names_.size()) {
    throw ConfigError("feature matrix column names must be unique");
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) throw DomainError("feature matrix contains a non-finite value");
  }
}

FeatureMatrix FeatureMatrix::from_profiles(std::span<const AccountProfile> profiles) {
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(profiles.size());
  values.reserve(profiles.size() * kFeatureCount);
  for (const auto& p : profiles) {
    ids.push_back(p.user_id);
    values.insert(values.end(), p.features.values.begin(), p.features.values.end());
  }
  return FeatureMatrix(std::move(ids), {kFeatureNames.begin(), kFeatureNames.end()},
                       std::move(values));
}

std::optional<std::size_t> FeatureMatrix::column_index(const std::string& name) const {
  const auto it = std::find(column_names_.begin(), column_names_.end(), name);
  if (it == column_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - column_names_.begin());
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> picked;
  for (const auto& name : names) {
    const auto idx = column_index(name);
    if (!idx) throw ConfigError("unknown feature column '" + name + "'");
    picked.push_back(*idx);
  }
  std::vector<double> values;
  values.reserve(rows() * picked.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (const auto c : picked) values.push_back(at(r, c));
  }
  return FeatureMatrix(row_ids_, {names.begin(), names.end()}, std::move(values));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(indices.size());
  values.reserve(indices.size() * cols());
  for (const auto r : indices) {
    ids.push_back(row_ids_.at(r));
    const auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
  }
  return FeatureMatrix(std::move(ids), column_names_, std::move(values));
}

FeatureScoreReport chi2_scores(const FeatureMatrix& x, std::span<const Category> y) {
  if (y.size() != x.rows()) {
    throw ValidationError("chi2_scores: " + std::to_string(y.size()) + " labels for " +
                          std::to_string(x.rows()) + " rows");
  }
  for (const double v : x.values()) {
    if (v < 0.0) throw DomainError("chi2_scores: features must be non-negative");
  }
  std::array<double, kCategoryCount> class_count{};
  for (const auto c : y) class_count[index_of(c)] += 1.0;
  if (std::count_if(class_count.begin(), class_count.end(), [](double n) { return n > 0; }) < 2) {
    throw ValidationError("chi2_scores: at least two classes are required");
  }
  const double n = static_cast<double>(y.size());

  FeatureScoreReport report;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::array<double, kCategoryCount> observed{};
    for (std::size_t r = 0; r < x.rows(); ++r) observed[index_of(y[r])] += x.at(r, f);
    double total = 0.0;
    for (const double o : observed) total += o;
    double score = 0.0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      const double expected = total * class_count[c] / n;
      if (expected == 0.0) continue;
      const double diff = observed[c] - expected;
      score += diff * diff / expected;
    }
    report.scores.push_back({x.column_names()[f], f, score});
  }
  std::stable_sort(report.scores.begin(), report.scores.end(),
                   [](const FeatureScore& a, const FeatureScore& b) { return a.score > b.score; });
  return report;
}

std::vector<std::string> select_top_k(const FeatureScoreReport& report, std::size_t k) {
  if (k == 0) throw ConfigError("select_top_k: k must be positive");
  if (k > report.scores.size()) {
    throw ConfigError("select_top_k: k = " + std::to_string(k) + " exceeds " +
                      std::to_string(report.scores.size()) + " features");
  }
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t i = 0; i < k; ++i) names.push_back(report.scores[i].name);
  return names;
}

CorrelationMatrix pearson_correlation_matrix(const FeatureMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += x.at(r, c);
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      const double di = x.at(r, i) - mean[i];
      for (std::size_t j = i; j < d; ++j) cov[i * d + j] += di * (x.at(r, j) - mean[j]);
    }
  }

  CorrelationMatrix out;
  out.names = x.column_names();
  out.values.assign(d * d, std::nullopt);
  for (std::size_t i = 0; i < d; ++i) {
    if (cov[i * d + i] <= 0.0) continue;
    out.values[i * d + i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      if (cov[j * d + j] <= 0.0) continue;
      const double r =
          std::clamp(cov[i * d + j] / std::sqrt(cov[i * d + i] * cov[j * d + j]), -1.0, 1.0);
      out.values[i * d + j] = r;
      out.values[j * d + i] = r;
    }
  }
  return out;
}

FeatureMatrix l1_normalize(const FeatureMatrix& x) {
  std::vector<double> values(x.values().begin(), x.values().end());
  std::vector<std::string> zero_rows;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double norm = 0.0;
    for (const double v : x.row(r)) norm += std::abs(v);
    if (norm == 0.0) {
      zero_rows.push_back(x.row_ids()[r]);
      continue;
    }
    for (std::size_t c = 0; c < x.cols(); ++c) values[r * x.cols() + c] /= norm;
  }
  if (!zero_rows.empty()) {
    throw RowError("l1_normalize: " + std::to_string(zero_rows.size()) + " all-zero row(s)",
                   std::move(zero_rows));
  }
  return FeatureMatrix(x.row_ids(), x.column_names(), std::move(values));
}

}  // namespace trollmap
