#include "trollmap/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "trollmap/csv.hpp"
#include "trollmap/error.hpp"
#include "trollmap/hashtag.hpp"

namespace trollmap {

namespace {

enum class Column {
  TweetId,
  UserId,
  DisplayName,
  Description,
  TweetTime,
  Language,
  IsRetweet,
  FollowerCount,
  FollowingCount,
  QuoteCount,
  ReplyCount,
  LikeCount,
  RetweetCount,
  Hashtags,
  UserMentions,
  Urls,
  PollChoices,
};

struct ColumnSpec {
  std::string_view canonical;  // name written by write_tweet_records
  Column column;
};

constexpr std::array<ColumnSpec, 17> kColumns = {{
    {"tweet_id", Column::TweetId},
    {"user_id", Column::UserId},
    {"user_display_name", Column::DisplayName},
    {"user_profile_description", Column::Description},
    {"tweet_time", Column::TweetTime},
    {"tweet_language", Column::Language},
    {"is_retweet", Column::IsRetweet},
    {"follower_count", Column::FollowerCount},
    {"following_count", Column::FollowingCount},
    {"quote_count", Column::QuoteCount},
    {"reply_count", Column::ReplyCount},
    {"like_count", Column::LikeCount},
    {"retweet_count", Column::RetweetCount},
    {"hashtags", Column::Hashtags},
    {"user_mentions", Column::UserMentions},
    {"urls", Column::Urls},
    {"poll_choices", Column::PollChoices},
}};

enum class CountStatus { Ok, Negative, Invalid };

CountStatus parse_count(std::string_view text, std::uint64_t& out) {
  text = csv::trim(text);
  if (text.empty()) {
    out = 0;
    return CountStatus::Ok;
  }
  if (text.front() == '-') {
    std::int64_t signed_value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), signed_value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && signed_value < 0) {
      return CountStatus::Negative;
    }
    return CountStatus::Invalid;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return CountStatus::Invalid;
  return CountStatus::Ok;
}

std::optional<bool> parse_bool(std::string_view text) {
  std::string lowered;
  for (const char c : csv::trim(text)) {
    lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lowered == "true" || lowered == "1" || lowered == "t" || lowered == "yes") return true;
  if (lowered == "false" || lowered == "0" || lowered == "f" || lowered == "no" ||
      lowered.empty()) {
    return false;
  }
  return std::nullopt;
}

std::string format_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  out += "]";
  return out;
}

}  // namespace

ParseResult parse_tweet_records(std::istream& in, const ParseOptions& options) {
  csv::Reader reader(in, options.delimiter);
  const auto header = reader.next();
  if (!header) throw SchemaError("tweet file is empty (missing header)");

  std::map<Column, std::size_t> index;
  for (std::size_t i = 0; i < header->fields.size(); ++i) {
    const std::string name = csv::normalize_header(header->fields[i]);
    for (const auto& spec : kColumns) {
      if (csv::normalize_header(spec.canonical) == name && !index.contains(spec.column)) {
        index.emplace(spec.column, i);
      }
    }
  }
  for (const auto& [column, label] :
       {std::pair{Column::TweetId, "tweet_id"}, std::pair{Column::UserId, "user_id"},
        std::pair{Column::TweetTime, "tweet_time"}}) {
    if (!index.contains(column)) {
      throw SchemaError(std::string("tweet file is missing mandatory column '") + label + "'");
    }
  }

  const std::size_t width = header->fields.size();
  const auto now = std::chrono::time_point_cast<std::chrono::minutes>(
      std::chrono::system_clock::now());
  const Timestamp epoch{};

  ParseResult result;
  std::size_t row = 0;
  while (auto record = reader.next()) {
    ++row;
    const auto reject = [&](std::string reason) {
      result.rejects.push_back({row, record->line, std::move(reason)});
    };
    const auto& f = record->fields;
    if (f.size() != width) {
      reject("expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()));
      continue;
    }
    const auto cell = [&](Column c) -> std::optional<std::string_view> {
      const auto it = index.find(c);
      if (it == index.end()) return std::nullopt;
      return std::string_view(f[it->second]);
    };

    TweetRecord tweet;
    tweet.tweet_id = std::string(csv::trim(*cell(Column::TweetId)));
    tweet.user_id = std::string(csv::trim(*cell(Column::UserId)));
    if (tweet.tweet_id.empty()) {
      reject("empty tweet_id");
      continue;
    }
    if (tweet.user_id.empty()) {
      reject("empty user_id");
      continue;
    }
    const auto time = parse_timestamp(*cell(Column::TweetTime));
    if (!time) {
      reject("unparseable timestamp '" + std::string(*cell(Column::TweetTime)) + "'");
      continue;
    }
    if (*time < epoch || *time > now) {
      reject("timestamp out of range '" + std::string(*cell(Column::TweetTime)) + "'");
      continue;
    }
    tweet.tweet_time = *time;

    if (auto v = cell(Column::Language)) tweet.tweet_language = std::string(csv::trim(*v));
    if (options.language && tweet.tweet_language != *options.language) {
      ++result.filtered;
      continue;
    }
    if (auto v = cell(Column::DisplayName); v && !csv::trim(*v).empty()) {
      tweet.user_display_name = std::string(*v);
    }
    if (auto v = cell(Column::Description); v && !csv::trim(*v).empty()) {
      tweet.user_profile_description = std::string(*v);
    }
    if (auto v = cell(Column::IsRetweet)) {
      const auto flag = parse_bool(*v);
      if (!flag) {
        reject("invalid is_retweet value '" + std::string(*v) + "'");
        continue;
      }
      tweet.is_retweet = *flag;
    }

    bool bad = false;
    for (const auto& [column, target, label] :
         {std::tuple{Column::FollowerCount, &tweet.follower_count, "follower_count"},
          std::tuple{Column::FollowingCount, &tweet.following_count, "following_count"},
          std::tuple{Column::QuoteCount, &tweet.quote_count, "quote_count"},
          std::tuple{Column::ReplyCount, &tweet.reply_count, "reply_count"},
          std::tuple{Column::LikeCount, &tweet.like_count, "like_count"},
          std::tuple{Column::RetweetCount, &tweet.retweet_count, "retweet_count"}}) {
      const auto v = cell(column);
      if (!v) continue;
      switch (parse_count(*v, *target)) {
        case CountStatus::Ok:
          break;
        case CountStatus::Negative:
          reject(std::string("negative count in ") + label);
          bad = true;
          break;
        case CountStatus::Invalid:
          reject(std::string("invalid count in ") + label + " '" + std::string(*v) + "'");
          bad = true;
          break;
      }
      if (bad) break;
    }
    if (bad) continue;

    if (auto v = cell(Column::Hashtags)) tweet.hashtags = csv::parse_list_cell(*v);
    if (auto v = cell(Column::UserMentions)) tweet.user_mentions = csv::parse_list_cell(*v);
    if (auto v = cell(Column::Urls)) tweet.urls = csv::parse_list_cell(*v);
    if (auto v = cell(Column::PollChoices)) tweet.poll_choices = csv::parse_list_cell(*v);
    result.records.push_back(std::move(tweet));
  }
  return result;
}

void write_tweet_records(std::ostream& out, std::span<const TweetRecord> records,
                         char delimiter) {
  std::vector<std::string> header;
  for (const auto& spec : kColumns) header.emplace_back(spec.canonical);
  csv::write_row(out, header, delimiter);
  for (const auto& t : records) {
    csv::write_row(out,
                   {t.tweet_id, t.user_id, t.user_display_name.value_or(""),
                    t.user_profile_description.value_or(""), format_timestamp(t.tweet_time),
                    t.tweet_language, t.is_retweet ? "true" : "false",
                    std::to_string(t.follower_count), std::to_string(t.following_count),
                    std::to_string(t.quote_count), std::to_string(t.reply_count),
                    std::to_string(t.like_count), std::to_string(t.retweet_count),
                    format_list(t.hashtags), format_list(t.user_mentions), format_list(t.urls),
                    format_list(t.poll_choices)},
                   delimiter);
  }
}

std::vector<AccountProfile> aggregate_accounts(std::span<const TweetRecord> records) {
  if (records.empty()) throw EmptyInputError("aggregate_accounts: no tweet records");

  std::map<std::string_view, std::vector<const TweetRecord*>> by_user;
  for (const auto& r : records) by_user[r.user_id].push_back(&r);

  std::vector<AccountProfile> profiles;
  profiles.reserve(by_user.size());
  for (const auto& [user_id, tweets] : by_user) {
    AccountProfile p;
    p.user_id = std::string(user_id);
    p.is_hashed = true;
    p.first_seen = tweets.front()->tweet_time;
    p.last_seen = tweets.front()->tweet_time;
    const TweetRecord* latest = tweets.front();
    auto& fv = p.features;
    for (const TweetRecord* t : tweets) {
      fv[Feature::TweetsCount] += 1;
      if (t->is_retweet) fv[Feature::RetweetsCount] += 1;
      fv[Feature::RepliesCount] += static_cast<double>(t->reply_count);
      fv[Feature::LikesCount] += static_cast<double>(t->like_count);
      fv[Feature::UsersMentioned] += static_cast<double>(t->user_mentions.size());
      fv[Feature::HashtagsCount] += static_cast<double>(t->hashtags.size());
      if (t->user_profile_description && !t->user_profile_description->empty()) {
        p.is_hashed = false;
      }
      p.first_seen = std::min(p.first_seen, t->tweet_time);
      p.last_seen = std::max(p.last_seen, t->tweet_time);
      if (t->tweet_time > latest->tweet_time ||
          (t->tweet_time == latest->tweet_time && t->tweet_id > latest->tweet_id)) {
        latest = t;
      }
      for (const auto& raw : t->hashtags) {
        std::string tag = canonicalize_hashtag(raw);
        if (!tag.empty()) p.hashtag_history.push_back({t->tweet_time, std::move(tag)});
      }
    }
    fv[Feature::FollowersCount] = static_cast<double>(latest->follower_count);
    fv[Feature::FollowingsCount] = static_cast<double>(latest->following_count);
    std::sort(p.hashtag_history.begin(), p.hashtag_history.end());
    profiles.push_back(std::move(p));
  }
  return profiles;
}

void write_profiles(std::ostream& out, std::span<const AccountProfile> profiles,
                    std::string_view meta_json) {
  if (!meta_json.empty()) out << "{\"meta\":" << meta_json << "}\n";
  for (const auto& p : profiles) {
    nlohmann::ordered_json line;
    line["user_id"] = p.user_id;
    line["is_hashed"] = p.is_hashed;
    nlohmann::ordered_json features;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      features[std::string(kFeatureNames[i])] = p.features.values[i];
    }
    line["features"] = std::move(features);
    line["first_seen"] = format_timestamp(p.first_seen);
    line["last_seen"] = format_timestamp(p.last_seen);
    auto history = nlohmann::ordered_json::array();
    for (const auto& use : p.hashtag_history) {
      history.push_back({format_timestamp(use.time), use.tag});
    }
    line["hashtag_history"] = std::move(history);
    out << line.dump() << '\n';
  }
}

std::vector<AccountProfile> read_profiles(std::istream& in) {
  std::vector<AccountProfile> profiles;
  std::string line;
  std::size_t line_no = 0;
  const auto timestamp = [&](const nlohmann::json& j) {
    const auto t = parse_timestamp(j.get<std::string>());
    if (!t) throw SchemaError("profile file line " + std::to_string(line_no) + ": bad timestamp");
    return *t;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("meta")) continue;
      AccountProfile p;
      p.user_id = j.at("user_id").get<std::string>();
      p.is_hashed = j.at("is_hashed").get<bool>();
      const auto& features = j.at("features");
      for (std::size_t i = 0; i < kFeatureCount; ++i) {
        p.features.values[i] = features.at(std::string(kFeatureNames[i])).get<double>();
      }
      p.first_seen = timestamp(j.at("first_seen"));
      p.last_seen = timestamp(j.at("last_seen"));
      for (const auto& use : j.at("hashtag_history")) {
        p.hashtag_history.push_back({timestamp(use.at(0)), use.at(1).get<std::string>()});
      }
      profiles.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("profile file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return profiles;
}

}  // namespace trollmap
