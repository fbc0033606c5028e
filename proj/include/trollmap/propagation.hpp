#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "trollmap/hashtag.hpp"
#include "trollmap/ingest.hpp"
#include "trollmap/taxonomy.hpp"
#include "trollmap/time.hpp"

namespace trollmap {

// Half-open window [start, end) of exactly six calendar months.
struct TimeSpan {
  std::size_t index = 0;
  Timestamp start{};
  Timestamp end{};

  bool contains(Timestamp t) const noexcept { return start <= t && t < end; }

  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

inline constexpr int kSpanMonths = 6;

// Tiles [range_start, range_end) with contiguous six-month spans. Both bounds
// must fall on the first of a month at midnight and the range must be a whole
// multiple of six months; otherwise ConfigError.
std::vector<TimeSpan> partition_spans(Timestamp range_start, Timestamp range_end);

// 0/1 vector stored as the sorted positions of its ones.
class BinaryVector {
 public:
  BinaryVector() = default;

  // `ones` must be strictly increasing and < dimension (ConfigError otherwise).
  BinaryVector(std::size_t dimension, std::vector<std::uint32_t> ones);

  static BinaryVector from_dense(std::span<const std::uint8_t> bits);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t count() const noexcept { return ones_.size(); }
  std::span<const std::uint32_t> ones() const noexcept { return ones_; }
  bool at(std::size_t i) const;
  std::vector<std::uint8_t> to_dense() const;

  friend bool operator==(const BinaryVector&, const BinaryVector&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::uint32_t> ones_;
};

// Number of positions set in both vectors.
std::size_t overlap(const BinaryVector& u, const BinaryVector& v);

// (u.v) / (|u| |v|), which for 0/1 vectors is |u & v| / sqrt(|u| |v|).
// Throws DomainError on a length mismatch or a zero vector.
double cosine_similarity(const BinaryVector& u, const BinaryVector& v);

// Hashtag incidence for one span: one column per active actor over the span's
// own vocabulary. U holds uncategorized actors, V categorized ones.
struct SpanVectorSet {
  TimeSpan span;
  std::vector<std::string> vocabulary;  // sorted, unique
  std::vector<BinaryVector> u;
  std::vector<BinaryVector> v;
  std::vector<std::string> u_ids;
  std::vector<std::string> v_ids;

  // No categorized actor was active, so nothing can propagate in this span.
  bool skipped() const noexcept { return v.empty(); }
};

// Actors present in `labels` become V columns, all others U columns. Actors
// without an in-span hashtag are left out.
SpanVectorSet build_span_vectors(const TimeSpan& span, std::span<const AccountProfile> profiles,
                                 const LabelSet& labels);

struct SpanAssignment {
  std::string user_id;
  Category category;
  double score;
};

// For each U column, the category of its most similar V column. Similarities
// are compared exactly (as rationals), so ties are real ties: the majority
// category among tied columns wins, then canonical category order. Columns
// whose best similarity is 0 share no hashtag with any categorized actor and
// receive no assignment for the span.
std::vector<SpanAssignment> propagate_span(const SpanVectorSet& sv, const LabelSet& labels);

struct ImpermanentLabel {
  std::size_t span = 0;
  Category category;
  double score = 0.0;
};

struct PropagationResult {
  std::string user_id;
  std::vector<ImpermanentLabel> trail;  // sorted by span
  Category final_category;
  std::size_t mode_count = 0;  // mode frequency = mode_count / trail.size()
  bool tie_broken = false;

  double mode_frequency() const noexcept {
    return static_cast<double>(mode_count) / static_cast<double>(trail.size());
  }
};

struct ModeAggregation {
  std::vector<PropagationResult> results;  // sorted by user_id
  std::vector<std::string> unresolved;     // actors with no impermanent label
};

// Final category per actor = most frequent impermanent category. Several modes
// are resolved by the higher mean score, then canonical order (tie_broken set).
ModeAggregation aggregate_modes(const std::map<std::string, std::vector<ImpermanentLabel>>& trails);

struct SpanSummary {
  TimeSpan span;
  std::size_t vocabulary_size = 0;
  std::size_t uncategorized = 0;
  std::size_t categorized = 0;
  std::size_t assigned = 0;
  bool skipped = false;
};

struct PropagationRun {
  std::vector<SpanSummary> spans;
  ModeAggregation outcome;
};

struct PropagationOptions {
  // Restrict the uncategorized side to hashed accounts.
  bool hashed_only = true;
};

// Full pipeline over all spans. Spans run in parallel; the result does not
// depend on scheduling. Uncategorized actors that never share a hashtag with a
// categorized actor (or have no hashtags at all) end up in `unresolved`.
PropagationRun propagate_labels(std::span<const AccountProfile> profiles, const LabelSet& labels,
                                std::span<const TimeSpan> spans,
                                const PropagationOptions& options = {});

// HashtagPropagated labels for every resolved actor.
LabelSet propagated_labels(const ModeAggregation& outcome);

}  // namespace trollmap
