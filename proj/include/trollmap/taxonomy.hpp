#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trollmap {

// Authenticity categories. The enumerator order is the canonical order used
// for every deterministic tie-break in the library.
enum class Category : std::uint8_t {
  FakeNews = 0,
  Organizations = 1,
  PoliticalAffiliates = 2,
  Individuals = 3,
};

inline constexpr std::size_t kCategoryCount = 4;

inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::FakeNews, Category::Organizations, Category::PoliticalAffiliates,
    Category::Individuals};

constexpr std::size_t index_of(Category c) noexcept { return static_cast<std::size_t>(c); }
constexpr Category category_at(std::size_t i) noexcept { return static_cast<Category>(i); }

std::string_view to_string(Category c) noexcept;

// Exact, case-sensitive match against the four enumerator names.
std::optional<Category> parse_category(std::string_view name) noexcept;

// Where a label came from. Lower rank wins when two sources disagree.
enum class LabelSource : std::uint8_t {
  Manual = 0,
  HashtagPropagated = 1,
  ModelPredicted = 2,
};

std::string_view to_string(LabelSource s) noexcept;
std::optional<LabelSource> parse_label_source(std::string_view name) noexcept;

// True when `a` takes precedence over `b` (Manual > HashtagPropagated > ModelPredicted).
constexpr bool outranks(LabelSource a, LabelSource b) noexcept {
  return static_cast<std::uint8_t>(a) < static_cast<std::uint8_t>(b);
}

struct Label {
  Category category;
  LabelSource source;

  friend bool operator==(const Label&, const Label&) = default;
};

// Immutable user_id -> Label map, ordered by user_id.
class LabelSet {
 public:
  using Entry = std::pair<std::string, Label>;
  using const_iterator = std::map<std::string, Label>::const_iterator;

  LabelSet() = default;

  // Throws ValidationError on a duplicate or empty user_id.
  static LabelSet from_entries(std::vector<Entry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains(const std::string& user_id) const { return entries_.contains(user_id); }
  const Label* find(const std::string& user_id) const;

  const_iterator begin() const noexcept { return entries_.begin(); }
  const_iterator end() const noexcept { return entries_.end(); }

  // Subset whose category equals `category`.
  LabelSet with_category(Category category) const;

  // Per-category entry counts in canonical order.
  std::array<std::size_t, kCategoryCount> category_counts() const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::map<std::string, Label> entries_;
};

// Reads a `user_id,category,source` file (header required, any column order).
// Throws SchemaError for missing columns and ValidationError for unknown
// category/source names or duplicate ids.
LabelSet parse_label_file(std::istream& in, char delimiter = ',');

void write_label_file(std::ostream& out, const LabelSet& labels);

// Union of both sets. Per id the higher-precedence source wins; on equal
// precedence the overlay entry wins.
LabelSet merge_labels(const LabelSet& base, const LabelSet& overlay);

}  // namespace trollmap
