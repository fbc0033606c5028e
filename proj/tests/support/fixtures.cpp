#include "fixtures.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "trollmap/propagation.hpp"

namespace trollmap::fixtures {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    char name[40];
    std::snprintf(name, sizeof name, "trollmap-test-%08x%08x", rd(), rd());
    const fs::path candidate = fs::temp_directory_path() / name;
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
  return buf;
}

}  // namespace

OverlapFixture overlap_fixture() {
  std::vector<LabelSet::Entry> ours;
  OverlapFixture f;
  for (std::size_t i = 0; i < 49; ++i) {
    ours.push_back({numbered("nf", i), {Category::FakeNews, LabelSource::Manual}});
    f.reference[numbered("nf", i)] = "NewsFeed";
  }
  for (std::size_t i = 0; i < 5; ++i) {
    ours.push_back({numbered("miss", i), {Category::Individuals, LabelSource::ModelPredicted}});
    f.reference[numbered("miss", i)] = "NewsFeed";
  }
  // Our FakeNews accounts the reference dataset does not know.
  for (std::size_t i = 0; i < 12; ++i) {
    ours.push_back({numbered("onlyours", i), {Category::FakeNews, LabelSource::HashtagPropagated}});
  }
  // Shared accounts outside both groups.
  for (std::size_t i = 0; i < 30; ++i) {
    const Category c = i % 2 ? Category::Individuals : Category::PoliticalAffiliates;
    ours.push_back({numbered("other", i), {c, LabelSource::Manual}});
    f.reference[numbered("other", i)] = i % 3 ? "RightTroll" : "LeftTroll";
  }
  // Reference accounts we never saw, NewsFeed among them.
  for (std::size_t i = 0; i < 20; ++i) {
    f.reference[numbered("onlyref", i)] = i % 2 ? "NewsFeed" : "HashtagGamer";
  }
  f.ours = LabelSet::from_entries(std::move(ours));
  return f;
}

AgreementFixture agreement_fixture() {
  constexpr std::size_t kAccounts = 1435;
  constexpr std::size_t kMatches = 1299;
  std::vector<LabelSet::Entry> manual;
  std::vector<LabelSet::Entry> predicted;
  for (std::size_t i = 0; i < kAccounts; ++i) {
    // Individuals-heavy mix, roughly 60/20/12/8.
    const std::size_t bucket = i % 25;
    const Category truth = bucket < 15   ? Category::Individuals
                           : bucket < 20 ? Category::PoliticalAffiliates
                           : bucket < 23 ? Category::FakeNews
                                         : Category::Organizations;
    // Spread the disagreements over the whole id range.
    const bool agrees = (i * (kAccounts - kMatches)) / kAccounts ==
                        ((i + 1) * (kAccounts - kMatches)) / kAccounts;
    const Category guess =
        agrees ? truth : category_at((index_of(truth) + 1 + i % 3) % kCategoryCount);
    const std::string id = numbered("ru", i);
    manual.push_back({id, {truth, LabelSource::Manual}});
    predicted.push_back({id, {guess, LabelSource::ModelPredicted}});
  }
  return {LabelSet::from_entries(std::move(manual)), LabelSet::from_entries(std::move(predicted))};
}

std::vector<TweetRecord> paper_scale_tweets() {
  constexpr std::size_t kAccounts = 2832;
  constexpr std::size_t kHashed = 1020;
  std::vector<TweetRecord> records;
  const Timestamp base = make_timestamp(2015, 1, 1);
  for (std::size_t i = 0; i < kAccounts; ++i) {
    const bool hashed = (i * kHashed) / kAccounts != ((i + 1) * kHashed) / kAccounts;
    for (std::size_t t = 0; t < 1 + i % 3; ++t) {
      TweetRecord r;
      r.tweet_id = numbered("t", i) + "-" + std::to_string(t);
      r.user_id = numbered("acct", i);
      r.user_display_name = r.user_id;
      if (!hashed) r.user_profile_description = "account " + std::to_string(i);
      r.tweet_time = base + std::chrono::minutes(i * 7 + t);
      r.tweet_language = "en";
      r.is_retweet = t == 1;
      r.follower_count = 10 + i % 50 + t;
      r.following_count = 5 + i % 20;
      r.hashtags = {"tag" + std::to_string(i % 40)};
      records.push_back(std::move(r));
    }
  }
  return records;
}

MinorityFixture minority_starved_fixture() {
  std::vector<std::string> ids;
  std::vector<double> values;
  MinorityFixture f;
  const auto add = [&](double v, Category c) {
    ids.push_back(numbered("row", ids.size()));
    values.push_back(v);
    f.y.push_back(c);
  };
  for (int i = 0; i < 200; ++i) add(i, Category::Individuals);
  for (int i = 0; i < 30; ++i) add(100.25, Category::Individuals);
  for (int i = 0; i < 8; ++i) add(100.25, MinorityFixture::kMinority);
  f.x = FeatureMatrix(std::move(ids), {"x"}, std::move(values));
  return f;
}

SyntheticSpec planted_pool_spec(double contamination, std::uint64_t seed) {
  SyntheticSpec spec = default_synthetic_spec(1000, seed);
  for (auto& c : spec.classes) {
    c.count = 250;
    c.mean[static_cast<std::size_t>(Feature::HashtagsCount)] = 60;
    c.spread[static_cast<std::size_t>(Feature::HashtagsCount)] = 10;
  }
  spec.hashed_fraction = 0.5;
  spec.contamination = contamination;
  spec.activity_spread = 0.0;
  return spec;
}

Recovery propagation_recovery(const SyntheticDataset& data) {
  const auto profiles = data.profiles();
  const auto labels = data.manual_labels();
  const auto spans = partition_spans(make_timestamp(2009, 7, 1), make_timestamp(2018, 7, 1));
  const auto run = propagate_labels(profiles, labels, spans);
  std::map<std::string, Category> got;
  for (const auto& r : run.outcome.results) got[r.user_id] = r.final_category;
  Recovery rec;
  for (const auto& a : data.accounts) {
    if (!a.is_hashed) continue;
    ++rec.total;
    const auto it = got.find(a.user_id);
    if (it != got.end() && it->second == a.category) ++rec.recovered;
  }
  return rec;
}

LabeledMatrix chi2_ranking_fixture() {
  // Class c contributes (c + 1) * weight_f per row, so every feature has the
  // same class profile and the score scales with its weight.
  const std::array<double, kFeatureCount> weight = {40, 25, 1000, 60, 5, 80, 30, 900};
  LabeledMatrix m;
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    for (std::size_t r = 0; r < 10; ++r) {
      ids.push_back(numbered("a", ids.size()));
      m.y.push_back(category_at(c));
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        values.push_back(weight[f] * static_cast<double>(c + 1) + static_cast<double>(r % 3));
      }
    }
  }
  m.x = FeatureMatrix(std::move(ids), {kFeatureNames.begin(), kFeatureNames.end()},
                      std::move(values));
  return m;
}

std::vector<Category> pick(const std::vector<Category>& y, const std::vector<std::size_t>& idx) {
  std::vector<Category> out;
  out.reserve(idx.size());
  for (const auto i : idx) out.push_back(y[i]);
  return out;
}

}  // namespace trollmap::fixtures
