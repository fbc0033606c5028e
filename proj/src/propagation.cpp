#include "trollmap/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "trollmap/error.hpp"
#include "trollmap/parallel.hpp"

namespace trollmap {

std::vector<TimeSpan> partition_spans(Timestamp range_start, Timestamp range_end) {
  if (!(range_start < range_end)) {
    throw ConfigError("span range start " + format_date(range_start) +
                      " is not before end " + format_date(range_end));
  }
  if (!is_month_aligned(range_start) || !is_month_aligned(range_end)) {
    throw ConfigError("span range bounds must fall on the first day of a month");
  }
  std::vector<TimeSpan> spans;
  Timestamp cursor = range_start;
  while (cursor < range_end) {
    const Timestamp next = add_months(cursor, kSpanMonths);
    if (next > range_end) {
      throw ConfigError("span range " + format_date(range_start) + " .. " +
                        format_date(range_end) + " is not a whole multiple of six months");
    }
    spans.push_back({spans.size(), cursor, next});
    cursor = next;
  }
  return spans;
}

BinaryVector::BinaryVector(std::size_t dimension, std::vector<std::uint32_t> ones)
    : dimension_(dimension), ones_(std::move(ones)) {
  for (std::size_t i = 0; i < ones_.size(); ++i) {
    if (ones_[i] >= dimension_ || (i > 0 && ones_[i] <= ones_[i - 1])) {
      throw ConfigError("BinaryVector: positions must be strictly increasing and in range");
    }
  }
}

BinaryVector BinaryVector::from_dense(std::span<const std::uint8_t> bits) {
  std::vector<std::uint32_t> ones;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw DomainError("BinaryVector: entries must be 0 or 1");
    if (bits[i]) ones.push_back(static_cast<std::uint32_t>(i));
  }
  return BinaryVector(bits.size(), std::move(ones));
}

bool BinaryVector::at(std::size_t i) const {
  return std::binary_search(ones_.begin(), ones_.end(), static_cast<std::uint32_t>(i));
}

std::vector<std::uint8_t> BinaryVector::to_dense() const {
  std::vector<std::uint8_t> bits(dimension_, 0);
  for (const auto i : ones_) bits[i] = 1;
  return bits;
}

std::size_t overlap(const BinaryVector& u, const BinaryVector& v) {
  const auto a = u.ones();
  const auto b = v.ones();
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

namespace {

// sqrt(o^2 / (|u| |v|)): the quotient of two exact integers is correctly
// rounded, so equal similarities give equal doubles whatever the counts.
double cosine_from_counts(std::uint64_t common, std::uint64_t nu, std::uint64_t nv) {
  return std::sqrt(static_cast<double>(common * common) / static_cast<double>(nu * nv));
}

}  // namespace

double cosine_similarity(const BinaryVector& u, const BinaryVector& v) {
  if (u.dimension() != v.dimension()) {
    throw DomainError("cosine_similarity: vector lengths differ");
  }
  if (u.count() == 0 || v.count() == 0) {
    throw DomainError("cosine_similarity: undefined for a zero vector");
  }
  return cosine_from_counts(overlap(u, v), u.count(), v.count());
}

SpanVectorSet build_span_vectors(const TimeSpan& span, std::span<const AccountProfile> profiles,
                                 const LabelSet& labels) {
  SpanVectorSet sv;
  sv.span = span;

  // Per-actor in-span tag sets, then the shared vocabulary.
  std::vector<std::pair<const AccountProfile*, std::vector<std::string_view>>> active;
  for (const auto& p : profiles) {
    std::vector<std::string_view> tags;
    const auto first = std::lower_bound(
        p.hashtag_history.begin(), p.hashtag_history.end(), span.start,
        [](const HashtagUse& use, Timestamp t) { return use.time < t; });
    for (auto it = first; it != p.hashtag_history.end() && it->time < span.end; ++it) {
      tags.push_back(it->tag);
    }
    if (tags.empty()) continue;
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    active.emplace_back(&p, std::move(tags));
  }
  for (const auto& [p, tags] : active) sv.vocabulary.insert(sv.vocabulary.end(), tags.begin(), tags.end());
  std::sort(sv.vocabulary.begin(), sv.vocabulary.end());
  sv.vocabulary.erase(std::unique(sv.vocabulary.begin(), sv.vocabulary.end()), sv.vocabulary.end());

  const std::size_t m = sv.vocabulary.size();
  for (const auto& [p, tags] : active) {
    std::vector<std::uint32_t> ones;
    ones.reserve(tags.size());
    for (const auto tag : tags) {
      const auto it = std::lower_bound(sv.vocabulary.begin(), sv.vocabulary.end(), tag);
      ones.push_back(static_cast<std::uint32_t>(it - sv.vocabulary.begin()));
    }
    BinaryVector column(m, std::move(ones));
    if (labels.contains(p->user_id)) {
      sv.v.push_back(std::move(column));
      sv.v_ids.push_back(p->user_id);
    } else {
      sv.u.push_back(std::move(column));
      sv.u_ids.push_back(p->user_id);
    }
  }
  return sv;
}

std::vector<SpanAssignment> propagate_span(const SpanVectorSet& sv, const LabelSet& labels) {
  std::vector<Category> v_categories;
  v_categories.reserve(sv.v_ids.size());
  for (const auto& id : sv.v_ids) {
    const Label* label = labels.find(id);
    if (!label) throw ValidationError("propagate_span: categorized actor without label: " + id);
    v_categories.push_back(label->category);
  }

  std::vector<SpanAssignment> out;
  for (std::size_t i = 0; i < sv.u.size(); ++i) {
    const BinaryVector& u = sv.u[i];
    // Best similarity kept as the rational overlap^2 / |v|; |u| is common to all.
    std::uint64_t best_overlap = 0;
    std::uint64_t best_norm = 1;
    std::array<std::size_t, kCategoryCount> tied{};
    for (std::size_t j = 0; j < sv.v.size(); ++j) {
      const std::uint64_t common = overlap(u, sv.v[j]);
      if (common == 0) continue;
      const std::uint64_t norm = sv.v[j].count();
      const auto lhs = static_cast<unsigned __int128>(common * common) * best_norm;
      const auto rhs = static_cast<unsigned __int128>(best_overlap * best_overlap) * norm;
      if (best_overlap == 0 || lhs > rhs) {
        best_overlap = common;
        best_norm = norm;
        tied.fill(0);
        ++tied[index_of(v_categories[j])];
      } else if (lhs == rhs) {
        ++tied[index_of(v_categories[j])];
      }
    }
    if (best_overlap == 0) continue;
    const auto winner = static_cast<std::size_t>(
        std::max_element(tied.begin(), tied.end()) - tied.begin());
    const double score = cosine_from_counts(best_overlap, u.count(), best_norm);
    out.push_back({sv.u_ids[i], category_at(winner), score});
  }
  return out;
}

ModeAggregation aggregate_modes(
    const std::map<std::string, std::vector<ImpermanentLabel>>& trails) {
  ModeAggregation agg;
  for (const auto& [id, trail] : trails) {
    if (trail.empty()) {
      agg.unresolved.push_back(id);
      continue;
    }
    PropagationResult r;
    r.user_id = id;
    r.trail = trail;
    std::stable_sort(r.trail.begin(), r.trail.end(),
                     [](const ImpermanentLabel& a, const ImpermanentLabel& b) { return a.span < b.span; });

    std::array<std::size_t, kCategoryCount> counts{};
    std::array<double, kCategoryCount> score_sums{};
    for (const auto& entry : r.trail) {
      ++counts[index_of(entry.category)];
      score_sums[index_of(entry.category)] += entry.score;
    }
    const std::size_t top = *std::max_element(counts.begin(), counts.end());
    std::size_t modes = 0;
    std::size_t winner = kCategoryCount;
    double winner_mean = 0.0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      if (counts[c] != top) continue;
      ++modes;
      const double mean = score_sums[c] / static_cast<double>(counts[c]);
      if (winner == kCategoryCount || mean > winner_mean) {
        winner = c;
        winner_mean = mean;
      }
    }
    r.final_category = category_at(winner);
    r.mode_count = top;
    r.tie_broken = modes > 1;
    agg.results.push_back(std::move(r));
  }
  return agg;
}

PropagationRun propagate_labels(std::span<const AccountProfile> profiles, const LabelSet& labels,
                                std::span<const TimeSpan> spans,
                                const PropagationOptions& options) {
  std::vector<AccountProfile> eligible;
  std::map<std::string, std::vector<ImpermanentLabel>> trails;
  for (const auto& p : profiles) {
    const bool labeled = labels.contains(p.user_id);
    if (!labeled && options.hashed_only && !p.is_hashed) continue;
    eligible.push_back(p);
    if (!labeled) trails[p.user_id];
  }

  std::vector<SpanSummary> summaries(spans.size());
  std::vector<std::vector<SpanAssignment>> assignments(spans.size());
  parallel_for(spans.size(), [&](std::size_t s) {
    const SpanVectorSet sv = build_span_vectors(spans[s], eligible, labels);
    auto& summary = summaries[s];
    summary.span = spans[s];
    summary.vocabulary_size = sv.vocabulary.size();
    summary.uncategorized = sv.u.size();
    summary.categorized = sv.v.size();
    summary.skipped = sv.skipped();
    if (!sv.skipped()) assignments[s] = propagate_span(sv, labels);
    summary.assigned = assignments[s].size();
  });

  for (std::size_t s = 0; s < spans.size(); ++s) {
    for (auto& a : assignments[s]) {
      trails[a.user_id].push_back({spans[s].index, a.category, a.score});
    }
  }
  return {std::move(summaries), aggregate_modes(trails)};
}

LabelSet propagated_labels(const ModeAggregation& outcome) {
  std::vector<LabelSet::Entry> entries;
  entries.reserve(outcome.results.size());
  for (const auto& r : outcome.results) {
    entries.emplace_back(r.user_id, Label{r.final_category, LabelSource::HashtagPropagated});
  }
  return LabelSet::from_entries(std::move(entries));
}

}  // namespace trollmap
