#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trollmap/eval.hpp"
#include "trollmap/features.hpp"
#include "trollmap/ingest.hpp"
#include "trollmap/synthetic.hpp"
#include "trollmap/taxonomy.hpp"

namespace trollmap::fixtures {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// 54 handles shared between our FakeNews set and the reference NewsFeed group:
// 49 labeled FakeNews by us, 5 labeled Individuals. Accounts outside both
// groups and accounts missing from either side are mixed in.
struct OverlapFixture {
  LabelSet ours;
  ReferenceGroups reference;
};
OverlapFixture overlap_fixture();

// 1,435 manually labeled accounts and model predictions agreeing on 1,299.
struct AgreementFixture {
  LabelSet manual;
  LabelSet predicted;
};
AgreementFixture agreement_fixture();

// 2,832 accounts, 1,020 of them hashed (no profile description on any tweet).
std::vector<TweetRecord> paper_scale_tweets();

// One feature. Majority Individuals at x = 0..199 plus 30 rows at x = 100.25;
// minority Organizations only at x = 100.25 (8 duplicated rows). Every region
// holding the minority holds more majority rows, so uniform weighting can
// never predict it; balanced weighting gives the minority half the mass.
struct MinorityFixture {
  FeatureMatrix x;
  std::vector<Category> y;
  static constexpr Category kMinority = Category::Organizations;
};
MinorityFixture minority_starved_fixture();

// Planted-pool propagation data: 250 accounts per category, half hashed, every
// account with about 60 hashtags spread across the 18 default spans.
SyntheticSpec planted_pool_spec(double contamination, std::uint64_t seed);

// Share of hashed accounts whose propagated category equals the planted one.
// Unresolved accounts count as misses.
struct Recovery {
  std::size_t recovered = 0;
  std::size_t total = 0;
  double rate() const { return total ? static_cast<double>(recovered) / total : 0.0; }
};
Recovery propagation_recovery(const SyntheticDataset& data);

// Matrix with the eight feature names where followers_count carries the
// strongest class signal and hashtags_count the second strongest.
struct LabeledMatrix {
  FeatureMatrix x;
  std::vector<Category> y;
};
LabeledMatrix chi2_ranking_fixture();

std::vector<Category> pick(const std::vector<Category>& y, const std::vector<std::size_t>& idx);

}  // namespace trollmap::fixtures
