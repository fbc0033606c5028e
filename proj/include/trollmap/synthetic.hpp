#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "trollmap/features.hpp"
#include "trollmap/ingest.hpp"
#include "trollmap/taxonomy.hpp"
#include "trollmap/time.hpp"

namespace trollmap {

struct ClassSpec {
  std::size_t count = 0;
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> spread{};  // standard deviation before truncation
  std::vector<std::string> hashtag_pool;       // canonical tags
};

// Class-conditional generator for labeled account data. Features are normals
// truncated to non-negative support and rounded to counts; each account's
// hashtags_count entries are attached to its tweets and drawn from its own
// class pool with probability 1 - contamination, otherwise from a uniformly
// chosen other pool.
struct SyntheticSpec {
  std::array<ClassSpec, kCategoryCount> classes;
  double contamination = 0.0;
  double hashed_fraction = 0.0;  // share of accounts without a description
  Timestamp range_start = make_timestamp(2009, 7, 1);
  Timestamp range_end = make_timestamp(2018, 7, 1);
  double span_activity = 0.5;  // chance an account tweets in a given span
  // Log-scale spread of a per-account activity factor (mean 1) multiplying
  // every count feature. 0 keeps features independent given the class.
  double activity_spread = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticTweet {
  Timestamp time{};
  bool is_retweet = false;
  std::vector<std::string> hashtags;
  friend bool operator==(const SyntheticTweet&, const SyntheticTweet&) = default;
};

struct SyntheticAccount {
  std::string user_id;
  Category category = Category::Individuals;  // hidden truth
  bool is_hashed = false;
  FeatureVector features;
  std::vector<SyntheticTweet> tweets;  // sorted by time
  friend bool operator==(const SyntheticAccount&, const SyntheticAccount&) = default;
};

struct SyntheticDataset {
  std::vector<SyntheticAccount> accounts;  // sorted by user_id

  std::vector<Category> truth() const;
  FeatureMatrix matrix() const;
  // Equal to aggregate_accounts(render_tweets()).
  std::vector<AccountProfile> profiles() const;
  // Manual labels for every account that is not hashed.
  LabelSet manual_labels() const;
  // Tweet rows realizing the features exactly: followers/followings grow to
  // their final value on the latest tweet; replies, likes and mentions are
  // spread across tweets.
  std::vector<TweetRecord> render_tweets() const;

  friend bool operator==(const SyntheticDataset&, const SyntheticDataset&) = default;
};

// Throws ConfigError on an invalid spec: fewer than two non-empty classes,
// negative means or spreads, contamination outside [0, 1), overlapping or
// missing hashtag pools, or a span range that does not tile.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

// Splits `total` by `proportions` with largest-remainder rounding.
std::array<std::size_t, kCategoryCount> proportional_counts(
    std::size_t total, const std::array<double, kCategoryCount>& proportions);

// Default generator: 70/15/10/5 Individuals/PoliticalAffiliates/FakeNews/
// Organizations, 40 tags per class pool, activity spread 0.3, feature means and
// spreads scaled by `scale`.
SyntheticSpec default_synthetic_spec(std::size_t accounts, std::uint64_t seed, double scale = 1.0);

}  // namespace trollmap
