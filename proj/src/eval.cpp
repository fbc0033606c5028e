#include "trollmap/eval.hpp"

#include <algorithm>
#include <cmath>

#include "trollmap/csv.hpp"
#include "trollmap/error.hpp"
#include "trollmap/rng.hpp"

namespace trollmap {

namespace {

std::array<std::vector<std::size_t>, kCategoryCount> rows_by_class(std::span<const Category> y) {
  std::array<std::vector<std::size_t>, kCategoryCount> rows;
  for (std::size_t i = 0; i < y.size(); ++i) rows[index_of(y[i])].push_back(i);
  return rows;
}

}  // namespace

IndexSplit stratified_split(std::span<const Category> y, double test_fraction,
                            std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie strictly between 0 and 1");
  }
  auto rows = rows_by_class(y);
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (rows[c].size() == 1) {
      throw ValidationError("stratified_split: class " + std::string(to_string(category_at(c))) +
                            " has a single sample");
    }
  }

  std::array<std::size_t, kCategoryCount> quota{};
  std::array<double, kCategoryCount> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    const double exact = static_cast<double>(rows[c].size()) * test_fraction;
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  const auto target =
      static_cast<std::size_t>(std::llround(static_cast<double>(y.size()) * test_fraction));
  std::array<std::size_t, kCategoryCount> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < target && i < kCategoryCount; ++i) {
    if (quota[order[i]] < rows[order[i]].size()) {
      ++quota[order[i]];
      ++assigned;
    }
  }

  Rng rng(seed);
  IndexSplit split;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    auto& members = rows[c];
    rng.shuffle(std::span(members));
    split.test.insert(split.test.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]),
                       members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<IndexSplit> stratified_kfold(std::span<const Category> y, std::size_t k,
                                         std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be at least 2");
  auto rows = rows_by_class(y);
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (!rows[c].empty() && rows[c].size() < k) {
      throw ValidationError("stratified_kfold: class " + std::string(to_string(category_at(c))) +
                            " has " + std::to_string(rows[c].size()) + " samples, fewer than k = " +
                            std::to_string(k));
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> fold_of(y.size());
  std::size_t offset = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    auto& members = rows[c];
    rng.shuffle(std::span(members));
    for (std::size_t i = 0; i < members.size(); ++i) fold_of[members[i]] = (offset + i) % k;
    offset = (offset + members.size()) % k;
  }

  std::vector<IndexSplit> folds(k);
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& row : counts) {
    for (const auto v : row) sum += v;
  }
  return sum;
}

std::uint64_t ConfusionMatrix::true_positives(Category c) const noexcept {
  return counts[index_of(c)][index_of(c)];
}

std::uint64_t ConfusionMatrix::predicted(Category c) const noexcept {
  std::uint64_t sum = 0;
  for (const auto& row : counts) sum += row[index_of(c)];
  return sum;
}

std::uint64_t ConfusionMatrix::actual(Category c) const noexcept {
  std::uint64_t sum = 0;
  for (const auto v : counts[index_of(c)]) sum += v;
  return sum;
}

bool ClassificationReport::zero_division() const noexcept {
  return std::any_of(per_class.begin(), per_class.end(), [](const ClassMetrics& m) {
    return m.precision_undefined || m.recall_undefined || m.f1_undefined;
  });
}

ClassificationReport classification_report(std::span<const Category> y_true,
                                           std::span<const Category> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ValidationError("classification_report: " + std::to_string(y_true.size()) +
                          " true labels vs " + std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) throw ValidationError("classification_report: no samples");

  ClassificationReport report;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++report.confusion.counts[index_of(y_true[i])][index_of(y_pred[i])];
  }

  std::uint64_t correct = 0;
  double weighted = 0.0;
  for (const Category c : kAllCategories) {
    const auto tp = report.confusion.true_positives(c);
    const auto predicted = report.confusion.predicted(c);
    const auto actual = report.confusion.actual(c);
    auto& m = report.per_class[index_of(c)];
    m.support = actual;
    correct += tp;
    if (predicted > 0) {
      m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    } else {
      m.precision_undefined = true;
    }
    if (actual > 0) {
      m.recall = static_cast<double>(tp) / static_cast<double>(actual);
    } else {
      m.recall_undefined = true;
    }
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
      m.f1_undefined = true;
    }
    weighted += static_cast<double>(m.support) * m.f1;
  }
  const auto n = static_cast<double>(y_true.size());
  report.weighted_f1 = weighted / n;
  report.accuracy = static_cast<double>(correct) / n;
  return report;
}

ReferenceGroups parse_reference_file(std::istream& in, char delimiter) {
  csv::Reader reader(in, delimiter);
  const auto header = reader.next();
  if (!header) throw SchemaError("reference file is empty (missing header)");
  std::optional<std::size_t> id_col, group_col;
  for (std::size_t i = 0; i < header->fields.size(); ++i) {
    const std::string name = csv::normalize_header(header->fields[i]);
    if (!id_col && (name == "userid" || name == "handle" || name == "author")) id_col = i;
    if (!group_col && (name == "group" || name == "accountcategory")) group_col = i;
  }
  if (!id_col) throw SchemaError("reference file is missing an id column (user_id/handle/author)");
  if (!group_col) throw SchemaError("reference file is missing a group column (group/account_category)");

  ReferenceGroups groups;
  while (auto record = reader.next()) {
    const auto& f = record->fields;
    if (f.size() <= std::max(*id_col, *group_col)) {
      throw ValidationError("reference file line " + std::to_string(record->line) +
                            ": too few fields");
    }
    const std::string id(csv::trim(f[*id_col]));
    const std::string group(csv::trim(f[*group_col]));
    if (id.empty()) continue;
    const auto [it, inserted] = groups.emplace(id, group);
    if (!inserted && it->second != group) {
      throw ValidationError("reference file: id " + id + " appears with groups " + it->second +
                            " and " + group);
    }
  }
  return groups;
}

OverlapReport overlap_validation(const LabelSet& ours, Category category,
                                 const ReferenceGroups& reference, std::string_view mapped_group) {
  OverlapReport report;
  for (const auto& [id, label] : ours) {
    const auto it = reference.find(id);
    if (it == reference.end()) continue;
    const bool ours_in = label.category == category;
    const bool theirs_in = it->second == mapped_group;
    if (!ours_in && !theirs_in) continue;
    ++report.total;
    if (ours_in && theirs_in) {
      ++report.matched;
    } else {
      report.misclassified.push_back({id, label.category, it->second});
    }
  }
  if (report.total == 0) {
    report.warning = "no shared accounts between our " + std::string(to_string(category)) +
                     " set and reference group " + std::string(mapped_group);
  } else {
    report.rate = static_cast<double>(report.matched) / static_cast<double>(report.total);
  }
  return report;
}

AgreementReport agreement_validation(const LabelSet& manual, const LabelSet& predicted) {
  AgreementReport report;
  for (const auto& [id, label] : manual) {
    const Label* other = predicted.find(id);
    if (!other) continue;
    ++report.compared;
    ++report.actual[index_of(label.category)];
    ++report.predicted[index_of(other->category)];
    if (label.category == other->category) {
      ++report.matched;
      ++report.agreed[index_of(label.category)];
    }
  }
  if (report.compared == 0) {
    throw ValidationError("agreement_validation: manual and predicted label sets share no ids");
  }
  report.rate = static_cast<double>(report.matched) / static_cast<double>(report.compared);
  return report;
}

}  // namespace trollmap
