#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trollmap/time.hpp"

namespace trollmap {

// One row of a tweet dump.
struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  std::optional<std::string> user_display_name;
  std::optional<std::string> user_profile_description;
  Timestamp tweet_time{};
  std::string tweet_language;
  bool is_retweet = false;
  std::uint64_t follower_count = 0;
  std::uint64_t following_count = 0;
  std::uint64_t quote_count = 0;
  std::uint64_t reply_count = 0;
  std::uint64_t like_count = 0;
  std::uint64_t retweet_count = 0;
  std::vector<std::string> hashtags;
  std::vector<std::string> user_mentions;
  std::vector<std::string> urls;
  std::vector<std::string> poll_choices;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

// A row that could not be turned into a TweetRecord. `row` is the 1-based
// data row (the header is not counted); `line` the physical line it began on.
struct RejectedRow {
  std::size_t row = 0;
  std::size_t line = 0;
  std::string reason;
};

struct ParseOptions {
  char delimiter = ',';
  // When set, rows whose tweet_language differs are skipped (not rejected).
  std::optional<std::string> language;
};

struct ParseResult {
  std::vector<TweetRecord> records;
  std::vector<RejectedRow> rejects;
  std::size_t filtered = 0;  // rows skipped by the language filter
};

// Reads a header-bearing tweet dump. Header names match case-insensitively and
// ignore underscores ("tweetid" == "tweet_id"). Throws SchemaError when the
// tweet_id, user_id or tweet_time column is absent; bad rows go to `rejects`.
ParseResult parse_tweet_records(std::istream& in, const ParseOptions& options = {});

void write_tweet_records(std::ostream& out, std::span<const TweetRecord> records,
                         char delimiter = ',');

// Behavioral feature slots, in the fixed order used by every matrix.
enum class Feature : std::uint8_t {
  TweetsCount,
  RetweetsCount,
  FollowersCount,
  FollowingsCount,
  RepliesCount,
  LikesCount,
  UsersMentioned,
  HashtagsCount,
};

inline constexpr std::size_t kFeatureCount = 8;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "tweets_count",  "retweets_count", "followers_count", "followings_count",
    "replies_count", "likes_count",    "users_mentioned", "hashtags_count"};

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](Feature f) noexcept { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const noexcept { return values[static_cast<std::size_t>(f)]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct HashtagUse {
  Timestamp time{};
  std::string tag;  // canonical form

  friend auto operator<=>(const HashtagUse&, const HashtagUse&) = default;
};

struct AccountProfile {
  std::string user_id;
  bool is_hashed = false;
  FeatureVector features;
  std::vector<HashtagUse> hashtag_history;  // sorted by (time, tag)
  Timestamp first_seen{};
  Timestamp last_seen{};

  friend bool operator==(const AccountProfile&, const AccountProfile&) = default;
};

// One profile per distinct user_id, sorted by user_id. Summed features are
// permutation invariant; follower/following counts come from the record with
// the latest tweet_time (ties: lexicographically larger tweet_id). Hashtags
// that canonicalize to nothing count toward hashtags_count but are left out
// of hashtag_history. Throws EmptyInputError on empty input.
std::vector<AccountProfile> aggregate_accounts(std::span<const TweetRecord> records);

// JSON-lines profile file. A leading {"meta": {...}} line carries provenance
// and is skipped by the reader.
void write_profiles(std::ostream& out, std::span<const AccountProfile> profiles,
                    std::string_view meta_json = {});
std::vector<AccountProfile> read_profiles(std::istream& in);

}  // namespace trollmap
