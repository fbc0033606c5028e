#include "trollmap/taxonomy.hpp"

#include <algorithm>

#include "trollmap/csv.hpp"
#include "trollmap/error.hpp"

namespace trollmap {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "FakeNews", "Organizations", "PoliticalAffiliates", "Individuals"};

constexpr std::array<std::string_view, 3> kSourceNames = {"Manual", "HashtagPropagated",
                                                          "ModelPredicted"};

}  // namespace

std::string_view to_string(Category c) noexcept { return kCategoryNames[index_of(c)]; }

std::optional<Category> parse_category(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return category_at(i);
  }
  return std::nullopt;
}

std::string_view to_string(LabelSource s) noexcept {
  return kSourceNames[static_cast<std::size_t>(s)];
}

std::optional<LabelSource> parse_label_source(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
    if (kSourceNames[i] == name) return static_cast<LabelSource>(i);
  }
  return std::nullopt;
}

LabelSet LabelSet::from_entries(std::vector<Entry> entries) {
  LabelSet set;
  for (auto& [id, label] : entries) {
    if (id.empty()) throw ValidationError("label entry with empty user_id");
    if (!set.entries_.emplace(std::move(id), label).second) {
      throw ValidationError("duplicate user_id in label set: " + id);
    }
  }
  return set;
}

const Label* LabelSet::find(const std::string& user_id) const {
  const auto it = entries_.find(user_id);
  return it == entries_.end() ? nullptr : &it->second;
}

LabelSet LabelSet::with_category(Category category) const {
  LabelSet subset;
  for (const auto& [id, label] : entries_) {
    if (label.category == category) subset.entries_.emplace_hint(subset.entries_.end(), id, label);
  }
  return subset;
}

std::array<std::size_t, kCategoryCount> LabelSet::category_counts() const {
  std::array<std::size_t, kCategoryCount> counts{};
  for (const auto& [id, label] : entries_) ++counts[index_of(label.category)];
  return counts;
}

LabelSet parse_label_file(std::istream& in, char delimiter) {
  csv::Reader reader(in, delimiter);
  const auto header = reader.next();
  if (!header) throw SchemaError("label file is empty (missing header)");

  std::optional<std::size_t> id_col, category_col, source_col;
  for (std::size_t i = 0; i < header->fields.size(); ++i) {
    const std::string name = csv::normalize_header(header->fields[i]);
    if (name == "userid") id_col = i;
    if (name == "category") category_col = i;
    if (name == "source") source_col = i;
  }
  if (!id_col) throw SchemaError("label file is missing column 'user_id'");
  if (!category_col) throw SchemaError("label file is missing column 'category'");
  if (!source_col) throw SchemaError("label file is missing column 'source'");

  std::vector<LabelSet::Entry> entries;
  while (auto record = reader.next()) {
    const auto& f = record->fields;
    const std::size_t needed = std::max({*id_col, *category_col, *source_col}) + 1;
    if (f.size() < needed) {
      throw ValidationError("label file line " + std::to_string(record->line) +
                            ": expected at least " + std::to_string(needed) + " fields");
    }
    const std::string id(csv::trim(f[*id_col]));
    const std::string_view category_name = csv::trim(f[*category_col]);
    const std::string_view source_name = csv::trim(f[*source_col]);
    const auto category = parse_category(category_name);
    if (!category) {
      throw ValidationError("label file line " + std::to_string(record->line) +
                            ": unknown category '" + std::string(category_name) + "'");
    }
    const auto source = parse_label_source(source_name);
    if (!source) {
      throw ValidationError("label file line " + std::to_string(record->line) +
                            ": unknown label source '" + std::string(source_name) + "'");
    }
    entries.emplace_back(id, Label{*category, *source});
  }
  return LabelSet::from_entries(std::move(entries));
}

void write_label_file(std::ostream& out, const LabelSet& labels) {
  csv::write_row(out, {"user_id", "category", "source"});
  for (const auto& [id, label] : labels) {
    csv::write_row(out, {id, std::string(to_string(label.category)),
                         std::string(to_string(label.source))});
  }
}

LabelSet merge_labels(const LabelSet& base, const LabelSet& overlay) {
  std::map<std::string, Label> merged(base.begin(), base.end());
  for (const auto& [id, label] : overlay) {
    auto [it, inserted] = merged.emplace(id, label);
    if (!inserted && !outranks(it->second.source, label.source)) it->second = label;
  }
  std::vector<LabelSet::Entry> entries(merged.begin(), merged.end());
  return LabelSet::from_entries(std::move(entries));
}

}  // namespace trollmap
