#include "trollmap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "trollmap/error.hpp"
#include "trollmap/parallel.hpp"
#include "trollmap/propagation.hpp"
#include "trollmap/rng.hpp"

namespace trollmap {

namespace {

constexpr auto idx(Feature f) { return static_cast<std::size_t>(f); }

// Normal truncated to [0, inf) by rejection.
double draw_truncated(Rng& rng, double mean, double spread) {
  if (spread == 0.0) return mean;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double v = mean + spread * rng.normal();
    if (v >= 0.0) return v;
  }
  return 0.0;
}

void validate(const SyntheticSpec& spec) {
  std::size_t nonempty = 0;
  std::set<std::string> seen;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    const auto& cls = spec.classes[c];
    if (cls.count > 0) ++nonempty;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (!(cls.mean[f] >= 0.0) || !(cls.spread[f] >= 0.0) || !std::isfinite(cls.mean[f]) ||
          !std::isfinite(cls.spread[f])) {
        throw ConfigError("synthetic: class " + std::string(to_string(category_at(c))) +
                          " has a negative or non-finite mean/spread for " +
                          std::string(kFeatureNames[f]));
      }
    }
    const bool needs_tags = cls.count > 0 && cls.mean[idx(Feature::HashtagsCount)] > 0.0;
    if ((needs_tags || spec.contamination > 0.0) && cls.hashtag_pool.empty()) {
      throw ConfigError("synthetic: class " + std::string(to_string(category_at(c))) +
                        " has an empty hashtag pool");
    }
    for (const auto& tag : cls.hashtag_pool) {
      if (!seen.insert(tag).second) {
        throw ConfigError("synthetic: hashtag '" + tag + "' appears in more than one pool");
      }
    }
  }
  if (nonempty < 2) throw ConfigError("synthetic: at least two classes need a positive count");
  if (!(spec.contamination >= 0.0 && spec.contamination < 1.0)) {
    throw ConfigError("synthetic: contamination must lie in [0, 1)");
  }
  if (!(spec.hashed_fraction >= 0.0 && spec.hashed_fraction <= 1.0)) {
    throw ConfigError("synthetic: hashed fraction must lie in [0, 1]");
  }
  if (!(spec.activity_spread >= 0.0 && std::isfinite(spec.activity_spread))) {
    throw ConfigError("synthetic: activity spread must be finite and non-negative");
  }
  if (!(spec.span_activity > 0.0 && spec.span_activity <= 1.0)) {
    throw ConfigError("synthetic: span activity must lie in (0, 1]");
  }
}

std::string pad(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

void fill_account(SyntheticAccount& account, const SyntheticSpec& spec,
                  const std::vector<TimeSpan>& spans, Rng& rng) {
  const std::size_t c = index_of(account.category);
  const auto& cls = spec.classes[c];
  auto& fv = account.features.values;
  const double activity =
      spec.activity_spread > 0.0
          ? std::exp(spec.activity_spread * rng.normal() -
                     0.5 * spec.activity_spread * spec.activity_spread)
          : 1.0;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    fv[f] = std::round(activity * draw_truncated(rng, cls.mean[f], cls.spread[f]));
  }
  fv[idx(Feature::TweetsCount)] = std::max(1.0, fv[idx(Feature::TweetsCount)]);
  fv[idx(Feature::RetweetsCount)] =
      std::min(fv[idx(Feature::RetweetsCount)], fv[idx(Feature::TweetsCount)]);

  std::vector<std::size_t> active;
  for (std::size_t s = 0; s < spans.size(); ++s) {
    if (rng.bernoulli(spec.span_activity)) active.push_back(s);
  }
  if (active.empty()) active.push_back(rng.uniform_index(spans.size()));

  const auto n_tweets = static_cast<std::size_t>(fv[idx(Feature::TweetsCount)]);
  account.tweets.resize(n_tweets);
  for (auto& tweet : account.tweets) {
    const auto& span = spans[active[rng.uniform_index(active.size())]];
    const auto minutes = static_cast<std::uint64_t>((span.end - span.start).count());
    tweet.time = span.start + std::chrono::minutes{rng.uniform_index(minutes)};
  }
  std::sort(account.tweets.begin(), account.tweets.end(),
            [](const SyntheticTweet& a, const SyntheticTweet& b) { return a.time < b.time; });

  std::vector<std::size_t> order(n_tweets);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  const auto n_retweets = static_cast<std::size_t>(fv[idx(Feature::RetweetsCount)]);
  for (std::size_t i = 0; i < n_retweets; ++i) account.tweets[order[i]].is_retweet = true;

  const auto n_tags = static_cast<std::size_t>(fv[idx(Feature::HashtagsCount)]);
  for (std::size_t i = 0; i < n_tags; ++i) {
    std::size_t pool = c;
    if (rng.bernoulli(spec.contamination)) {
      pool = rng.uniform_index(kCategoryCount - 1);
      if (pool >= c) ++pool;
    }
    const auto& tags = spec.classes[pool].hashtag_pool;
    account.tweets[rng.uniform_index(n_tweets)].hashtags.push_back(
        tags[rng.uniform_index(tags.size())]);
  }
}

// Splits `total` into `parts` near-equal shares, larger shares first.
std::uint64_t share(std::uint64_t total, std::size_t parts, std::size_t i) {
  return total / parts + (i < total % parts ? 1 : 0);
}

}  // namespace

std::array<std::size_t, kCategoryCount> proportional_counts(
    std::size_t total, const std::array<double, kCategoryCount>& proportions) {
  const double sum = std::accumulate(proportions.begin(), proportions.end(), 0.0);
  if (!(sum > 0.0)) throw ConfigError("proportions must have a positive sum");
  std::array<std::size_t, kCategoryCount> counts{};
  std::array<double, kCategoryCount> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (proportions[c] < 0.0) throw ConfigError("proportions must be non-negative");
    const double exact = static_cast<double>(total) * proportions[c] / sum;
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  std::array<std::size_t, kCategoryCount> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % kCategoryCount) {
    ++counts[order[i]];
    ++assigned;
  }
  return counts;
}

SyntheticSpec default_synthetic_spec(std::size_t accounts, std::uint64_t seed, double scale) {
  // Columns: tweets, retweets, followers, followings, replies, likes, mentions, hashtags.
  // Means are in units of the per-feature spread; every pair of classes is at
  // least two spreads apart on some feature.
  static constexpr std::array<double, kFeatureCount> kSpread = {100, 40, 1000, 500, 30, 200, 100, 150};
  static constexpr std::array<std::array<double, kFeatureCount>, kCategoryCount> kMeans = {{
      {3.0, 1.5, 5.0, 1.5, 1.0, 4.0, 1.5, 4.0},   // FakeNews
      {2.0, 1.0, 2.5, 3.0, 4.0, 2.5, 3.0, 1.5},   // Organizations
      {2.5, 4.0, 1.5, 4.5, 2.5, 1.5, 5.0, 3.0},   // PoliticalAffiliates
      {1.5, 2.5, 0.5, 1.0, 2.0, 0.75, 2.0, 1.0},  // Individuals
  }};
  static constexpr std::array<double, kCategoryCount> kShares = {0.10, 0.05, 0.15, 0.70};

  SyntheticSpec spec;
  spec.seed = seed;
  spec.activity_spread = 0.3;
  const auto counts = proportional_counts(accounts, kShares);
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    auto& cls = spec.classes[c];
    cls.count = counts[c];
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      cls.mean[f] = kMeans[c][f] * kSpread[f] * scale;
      cls.spread[f] = kSpread[f] * scale;
    }
    std::string prefix(to_string(category_at(c)));
    std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    for (std::size_t t = 0; t < 40; ++t) cls.hashtag_pool.push_back(prefix + pad(t, 2));
  }
  return spec;
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  const auto spans = partition_spans(spec.range_start, spec.range_end);

  std::vector<Category> classes;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    classes.insert(classes.end(), spec.classes[c].count, category_at(c));
  }
  const std::size_t n = classes.size();
  Rng rng(derive_stream(spec.seed, 0));
  rng.shuffle(std::span(classes));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  const auto n_hashed =
      static_cast<std::size_t>(std::llround(spec.hashed_fraction * static_cast<double>(n)));

  SyntheticDataset data;
  data.accounts.resize(n);
  const std::size_t width = std::max<std::size_t>(4, std::to_string(n).size());
  for (std::size_t i = 0; i < n; ++i) {
    data.accounts[i].user_id = "acct" + pad(i, width);
    data.accounts[i].category = classes[i];
  }
  for (std::size_t i = 0; i < n_hashed; ++i) data.accounts[order[i]].is_hashed = true;

  parallel_for(n, [&](std::size_t i) {
    Rng account_rng(derive_stream(spec.seed, i + 1));
    fill_account(data.accounts[i], spec, spans, account_rng);
  });
  return data;
}

std::vector<Category> SyntheticDataset::truth() const {
  std::vector<Category> out;
  out.reserve(accounts.size());
  for (const auto& a : accounts) out.push_back(a.category);
  return out;
}

FeatureMatrix SyntheticDataset::matrix() const {
  const auto p = profiles();
  return FeatureMatrix::from_profiles(p);
}

std::vector<AccountProfile> SyntheticDataset::profiles() const {
  std::vector<AccountProfile> out;
  out.reserve(accounts.size());
  for (const auto& a : accounts) {
    AccountProfile p;
    p.user_id = a.user_id;
    p.is_hashed = a.is_hashed;
    p.features = a.features;
    for (const auto& tweet : a.tweets) {
      for (const auto& tag : tweet.hashtags) p.hashtag_history.push_back({tweet.time, tag});
    }
    std::sort(p.hashtag_history.begin(), p.hashtag_history.end());
    p.first_seen = a.tweets.front().time;
    p.last_seen = a.tweets.back().time;
    out.push_back(std::move(p));
  }
  return out;
}

LabelSet SyntheticDataset::manual_labels() const {
  std::vector<LabelSet::Entry> entries;
  for (const auto& a : accounts) {
    if (!a.is_hashed) entries.push_back({a.user_id, {a.category, LabelSource::Manual}});
  }
  return LabelSet::from_entries(std::move(entries));
}

std::vector<TweetRecord> SyntheticDataset::render_tweets() const {
  std::vector<TweetRecord> out;
  for (const auto& a : accounts) {
    const auto& fv = a.features;
    const std::size_t n = a.tweets.size();
    const auto total = [&](Feature f) { return static_cast<std::uint64_t>(fv[f]); };
    const std::size_t width = std::to_string(n).size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& tweet = a.tweets[i];
      TweetRecord r;
      r.tweet_id = a.user_id + "-" + pad(i, width);
      r.user_id = a.user_id;
      r.user_display_name = a.user_id;
      if (!a.is_hashed) r.user_profile_description = "profile of " + a.user_id;
      r.tweet_time = tweet.time;
      r.tweet_language = "en";
      r.is_retweet = tweet.is_retweet;
      // Earlier snapshots are proportionally smaller; the last one is final.
      r.follower_count = total(Feature::FollowersCount) * (i + 1) / n;
      r.following_count = total(Feature::FollowingsCount) * (i + 1) / n;
      r.reply_count = share(total(Feature::RepliesCount), n, i);
      r.like_count = share(total(Feature::LikesCount), n, i);
      const auto mentions = share(total(Feature::UsersMentioned), n, i);
      for (std::uint64_t m = 0; m < mentions; ++m) {
        r.user_mentions.push_back("mention" + std::to_string((i + m) % 97));
      }
      r.hashtags = tweet.hashtags;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace trollmap
