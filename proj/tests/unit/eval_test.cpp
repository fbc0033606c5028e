#include "trollmap/error.hpp"
#include "trollmap/eval.hpp"
#include "trollmap/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fixtures.hpp"

using namespace trollmap;

namespace {

std::vector<Category> repeated(std::initializer_list<std::pair<Category, std::size_t>> parts) {
  std::vector<Category> y;
  for (const auto& [c, n] : parts) y.insert(y.end(), n, c);
  return y;
}

std::array<std::size_t, kCategoryCount> class_counts(const std::vector<Category>& y,
                                                     const std::vector<std::size_t>& idx) {
  std::array<std::size_t, kCategoryCount> counts{};
  for (auto i : idx) ++counts[index_of(y[i])];
  return counts;
}

std::vector<Category> random_labels(Rng& rng, std::size_t n) {
  std::vector<Category> y(n);
  for (auto& c : y) c = category_at(rng.uniform_index(kCategoryCount));
  return y;
}

void expect_partition(const IndexSplit& s, std::size_t n) {
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), n);
  for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(all[i], i);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
}

LabelSet as_labels(const std::vector<Category>& cats, LabelSource source) {
  std::vector<LabelSet::Entry> entries;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    entries.push_back({"id" + std::to_string(i), {cats[i], source}});
  }
  return LabelSet::from_entries(std::move(entries));
}

}  // namespace

TEST(StratifiedSplitTest, EightyTwenty) {
  const auto y = repeated({{Category::Individuals, 80}, {Category::FakeNews, 20}});
  const auto s = stratified_split(y, 0.2, 1);
  expect_partition(s, 100);
  const auto test = class_counts(y, s.test);
  EXPECT_EQ(test[index_of(Category::Individuals)], 16u);
  EXPECT_EQ(test[index_of(Category::FakeNews)], 4u);
}

TEST(StratifiedSplitTest, HalfOfBalancedClasses) {
  const auto y = repeated({{Category::FakeNews, 10},
                           {Category::Organizations, 10},
                           {Category::PoliticalAffiliates, 10},
                           {Category::Individuals, 10}});
  const auto s = stratified_split(y, 0.5, 3);
  for (auto c : class_counts(y, s.test)) EXPECT_EQ(c, 5u);
}

TEST(StratifiedSplitTest, SameSeedSameIndices) {
  Rng rng(4);
  const auto y = random_labels(rng, 200);
  const auto a = stratified_split(y, 0.3, 77);
  const auto b = stratified_split(y, 0.3, 77);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.test, stratified_split(y, 0.3, 78).test);
}

TEST(StratifiedSplitTest, Errors) {
  const auto y = repeated({{Category::Individuals, 10}, {Category::FakeNews, 10}});
  EXPECT_THROW(stratified_split(y, 0.0, 1), ConfigError);
  EXPECT_THROW(stratified_split(y, 1.0, 1), ConfigError);
  const auto lonely = repeated({{Category::Individuals, 10}, {Category::FakeNews, 1}});
  EXPECT_THROW(stratified_split(lonely, 0.2, 1), ValidationError);
}

TEST(StratifiedSplitTest, ProportionsWithinOneOnRandomLabels) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    auto y = random_labels(rng, 8 + rng.uniform_index(300));
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      y.push_back(category_at(c));
      y.push_back(category_at(c));
    }
    const double fraction = 0.05 + 0.9 * rng.uniform01();
    const auto s = stratified_split(y, fraction, trial);
    expect_partition(s, y.size());
    const auto test = class_counts(y, s.test);
    std::array<std::size_t, kCategoryCount> total{};
    for (auto c : y) ++total[index_of(c)];
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      EXPECT_LE(std::fabs(static_cast<double>(test[c]) - total[c] * fraction), 1.0);
    }
    EXPECT_EQ(s.test.size(), static_cast<std::size_t>(std::llround(y.size() * fraction)));
  }
}

TEST(StratifiedKFoldTest, ExactDivisibility) {
  const auto y = repeated({{Category::FakeNews, 25},
                           {Category::Organizations, 25},
                           {Category::PoliticalAffiliates, 25},
                           {Category::Individuals, 25}});
  const auto folds = stratified_kfold(y, 5, 9);
  ASSERT_EQ(folds.size(), 5u);
  for (const auto& f : folds) {
    expect_partition(f, 100);
    for (auto c : class_counts(y, f.test)) EXPECT_EQ(c, 5u);
  }
}

TEST(StratifiedKFoldTest, TestFoldsPartitionIndices) {
  Rng rng(6);
  const auto y = random_labels(rng, 137);
  std::vector<std::size_t> all;
  for (const auto& f : stratified_kfold(y, 5, 2)) all.insert(all.end(), f.test.begin(), f.test.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), 137u);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

TEST(StratifiedKFoldTest, Errors) {
  const auto small = repeated({{Category::Individuals, 20}, {Category::FakeNews, 3}});
  EXPECT_THROW(stratified_kfold(small, 5, 1), ValidationError);
  EXPECT_THROW(stratified_kfold(small, 1, 1), ConfigError);
}

TEST(StratifiedKFoldTest, PerClassFoldCountsWithinOne) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(9);
    auto y = random_labels(rng, rng.uniform_index(200));
    for (std::size_t c = 0; c < kCategoryCount; ++c) y.insert(y.end(), k, category_at(c));
    const auto folds = stratified_kfold(y, k, trial);
    ASSERT_EQ(folds.size(), k);
    std::array<std::size_t, kCategoryCount> total{};
    for (auto c : y) ++total[index_of(c)];
    for (const auto& f : folds) {
      expect_partition(f, y.size());
      const auto counts = class_counts(y, f.test);
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        EXPECT_LE(std::fabs(static_cast<double>(counts[c]) - static_cast<double>(total[c]) / k), 1.0);
      }
    }
  }
}

TEST(ClassificationReportTest, PerfectPrediction) {
  const auto y = repeated({{Category::FakeNews, 3}, {Category::Individuals, 5}});
  const auto r = classification_report(y, y);
  EXPECT_EQ(r.weighted_f1, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
  for (auto c : {Category::FakeNews, Category::Individuals}) {
    EXPECT_EQ(r.per_class[index_of(c)].precision, 1.0);
    EXPECT_EQ(r.per_class[index_of(c)].recall, 1.0);
    EXPECT_EQ(r.per_class[index_of(c)].f1, 1.0);
  }
}

TEST(ClassificationReportTest, FakeNewsRowOfPublishedTable) {
  // TP / (TP + FP) = 0.94 and TP / (TP + FN) = 0.82 with TP = 47 * 41.
  std::vector<Category> truth, pred;
  const auto add = [&](Category t, Category p, std::size_t n) {
    truth.insert(truth.end(), n, t);
    pred.insert(pred.end(), n, p);
  };
  add(Category::FakeNews, Category::FakeNews, 1927);
  add(Category::Individuals, Category::FakeNews, 123);
  add(Category::FakeNews, Category::Individuals, 423);
  add(Category::Individuals, Category::Individuals, 5000);
  const auto r = classification_report(truth, pred);
  const auto& fake = r.per_class[index_of(Category::FakeNews)];
  EXPECT_NEAR(fake.precision, 0.94, 1e-12);
  EXPECT_NEAR(fake.recall, 0.82, 1e-12);
  EXPECT_NEAR(fake.f1, 2 * 0.94 * 0.82 / 1.76, 1e-12);
  EXPECT_NEAR(fake.f1, 0.8759, 5e-5);
  EXPECT_EQ(std::round(fake.f1 * 100) / 100, 0.88);
}

TEST(ClassificationReportTest, HandComputedTwoClass) {
  const std::vector<Category> truth = {Category::FakeNews, Category::FakeNews, Category::FakeNews,
                                       Category::FakeNews, Category::FakeNews, Category::Individuals};
  const std::vector<Category> pred = {Category::FakeNews,    Category::FakeNews,
                                      Category::FakeNews,    Category::Individuals,
                                      Category::Individuals, Category::FakeNews};
  const auto report = classification_report(truth, pred);
  const auto& m = report.per_class[index_of(Category::FakeNews)];
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.6);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
}

TEST(ClassificationReportTest, ZeroDivisionIsFlaggedNotNan) {
  const std::vector<Category> truth = {Category::FakeNews, Category::Individuals};
  const std::vector<Category> pred = {Category::Individuals, Category::Individuals};
  const auto r = classification_report(truth, pred);
  const auto& fake = r.per_class[index_of(Category::FakeNews)];
  EXPECT_EQ(fake.precision, 0.0);
  EXPECT_TRUE(fake.precision_undefined);
  EXPECT_EQ(fake.f1, 0.0);
  EXPECT_TRUE(r.zero_division());
}

TEST(ClassificationReportTest, Errors) {
  const std::vector<Category> one = {Category::FakeNews};
  EXPECT_THROW(classification_report(one, {}), ValidationError);
  EXPECT_THROW(classification_report({}, {}), ValidationError);
}

TEST(ClassificationReportTest, MatchesBruteForceCounting) {
  Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(60);
    const auto truth = random_labels(rng, n);
    const auto pred = random_labels(rng, n);
    const auto r = classification_report(truth, pred);
    double weighted = 0;
    std::size_t correct = 0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      std::size_t tp = 0, fp = 0, fn = 0, support = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool t = index_of(truth[i]) == c, p = index_of(pred[i]) == c;
        tp += t && p;
        fp += !t && p;
        fn += t && !p;
        support += t;
      }
      for (std::size_t j = 0; j < kCategoryCount; ++j) {
        std::size_t cell = 0;
        for (std::size_t i = 0; i < n; ++i) cell += index_of(truth[i]) == c && index_of(pred[i]) == j;
        ASSERT_EQ(r.confusion.counts[c][j], cell);
      }
      const double p = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
      const double rec = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
      const double f1 = p + rec > 0 ? 2 * p * rec / (p + rec) : 0.0;
      const auto& m = r.per_class[c];
      EXPECT_EQ(m.support, support);
      EXPECT_NEAR(m.precision, p, 1e-12);
      EXPECT_NEAR(m.recall, rec, 1e-12);
      EXPECT_NEAR(m.f1, f1, 1e-12);
      weighted += support * f1;
      correct += tp;
    }
    EXPECT_NEAR(r.weighted_f1, weighted / n, 1e-12);
    EXPECT_EQ(r.accuracy, static_cast<double>(correct) / n);
    EXPECT_EQ(r.confusion.total(), n);
  }
}

TEST(ClassificationReportTest, WeightedF1BetweenPerClassExtremes) {
  Rng rng(1001);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(80);
    const auto truth = random_labels(rng, n);
    auto pred = truth;
    for (auto& c : pred) {
      if (rng.bernoulli(0.4)) c = category_at(rng.uniform_index(kCategoryCount));
    }
    const auto r = classification_report(truth, pred);
    double lo = 1, hi = 0;
    for (const auto& m : r.per_class) {
      if (m.support == 0) continue;
      lo = std::min(lo, m.f1);
      hi = std::max(hi, m.f1);
    }
    EXPECT_GE(r.weighted_f1, lo - 1e-12);
    EXPECT_LE(r.weighted_f1, hi + 1e-12);
  }
}

TEST(OverlapTest, FiftyFourHandleFixture) {
  const auto f = fixtures::overlap_fixture();
  const auto r = overlap_validation(f.ours, Category::FakeNews, f.reference, "NewsFeed");
  EXPECT_EQ(r.matched, 49u);
  EXPECT_EQ(r.total, 54u);
  ASSERT_TRUE(r.rate);
  EXPECT_DOUBLE_EQ(*r.rate, 49.0 / 54.0);
  EXPECT_EQ(std::round(*r.rate * 1000) / 10, 90.7);
  ASSERT_EQ(r.misclassified.size(), 5u);
  for (const auto& miss : r.misclassified) {
    EXPECT_EQ(miss.our_category, Category::Individuals);
    EXPECT_EQ(miss.reference_group, "NewsFeed");
  }
}

TEST(OverlapTest, IdenticalMappingIsPerfect) {
  const auto ours = as_labels({Category::FakeNews, Category::FakeNews, Category::Individuals},
                              LabelSource::Manual);
  const ReferenceGroups reference = {{"id0", "NewsFeed"}, {"id1", "NewsFeed"}, {"id2", "LeftTroll"}};
  const auto r = overlap_validation(ours, Category::FakeNews, reference, "NewsFeed");
  EXPECT_EQ(r.total, 2u);
  EXPECT_EQ(*r.rate, 1.0);
  EXPECT_TRUE(r.misclassified.empty());
}

TEST(OverlapTest, EmptyJoinHasNoRate) {
  const auto ours = as_labels({Category::FakeNews}, LabelSource::Manual);
  const ReferenceGroups reference = {{"other", "NewsFeed"}};
  const auto r = overlap_validation(ours, Category::FakeNews, reference, "NewsFeed");
  EXPECT_EQ(r.total, 0u);
  EXPECT_FALSE(r.rate);
  EXPECT_TRUE(r.warning);
}

TEST(ReferenceFileTest, HeaderVariants) {
  std::istringstream a("author,account_category\nx,NewsFeed\ny,RightTroll\n");
  EXPECT_EQ(parse_reference_file(a), (ReferenceGroups{{"x", "NewsFeed"}, {"y", "RightTroll"}}));
  std::istringstream b("handle\tgroup\nz\tLeftTroll\n");
  EXPECT_EQ(parse_reference_file(b, '\t').at("z"), "LeftTroll");
  std::istringstream bad("name,kind\nx,y\n");
  EXPECT_THROW(parse_reference_file(bad), SchemaError);
}

TEST(AgreementTest, IdenticalSetsAgreeFully) {
  const auto a = as_labels({Category::FakeNews, Category::Individuals}, LabelSource::Manual);
  EXPECT_EQ(agreement_validation(a, a).rate, 1.0);
}

TEST(AgreementTest, RussianSetFixture) {
  // The published 90.5% on 1,435 accounts: the nearest whole count is 1,299.
  const long expected_matches = std::lround(0.905 * 1435);
  ASSERT_EQ(expected_matches, 1299);
  EXPECT_EQ(std::round(1299.0 / 1435.0 * 1000) / 10, 90.5);

  const auto f = fixtures::agreement_fixture();
  const auto r = agreement_validation(f.manual, f.predicted);
  EXPECT_EQ(r.compared, 1435u);
  EXPECT_EQ(r.matched, 1299u);
  EXPECT_DOUBLE_EQ(r.rate, 1299.0 / 1435.0);
  EXPECT_NEAR(r.rate, 0.9052, 5e-5);
  std::size_t agreed = 0, actual = 0, predicted = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    agreed += r.agreed[c];
    actual += r.actual[c];
    predicted += r.predicted[c];
    EXPECT_LE(r.agreed[c], r.actual[c]);
  }
  EXPECT_EQ(agreed, 1299u);
  EXPECT_EQ(actual, 1435u);
  EXPECT_EQ(predicted, 1435u);
}

TEST(AgreementTest, DisjointPredictionsAgreeNowhere) {
  const auto manual = as_labels({Category::FakeNews, Category::FakeNews}, LabelSource::Manual);
  const auto pred = as_labels({Category::Individuals, Category::Organizations},
                              LabelSource::ModelPredicted);
  EXPECT_EQ(agreement_validation(manual, pred).rate, 0.0);
}

TEST(AgreementTest, NoSharedIdsIsError) {
  const auto a = LabelSet::from_entries({{"a", {Category::FakeNews, LabelSource::Manual}}});
  const auto b = LabelSet::from_entries({{"b", {Category::FakeNews, LabelSource::Manual}}});
  EXPECT_THROW(agreement_validation(a, b), ValidationError);
}

TEST(AgreementTest, SymmetricInArguments) {
  Rng rng(1002);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<LabelSet::Entry> a, b;
    for (std::size_t i = 0; i < 40; ++i) {
      const std::string id = "id" + std::to_string(i);
      if (rng.bernoulli(0.8)) a.push_back({id, {category_at(rng.uniform_index(4)), LabelSource::Manual}});
      if (rng.bernoulli(0.8)) b.push_back({id, {category_at(rng.uniform_index(4)), LabelSource::ModelPredicted}});
    }
    a.push_back({"shared", {Category::FakeNews, LabelSource::Manual}});
    b.push_back({"shared", {Category::Individuals, LabelSource::ModelPredicted}});
    const auto la = LabelSet::from_entries(std::move(a));
    const auto lb = LabelSet::from_entries(std::move(b));
    const auto ab = agreement_validation(la, lb);
    const auto ba = agreement_validation(lb, la);
    EXPECT_EQ(ab.rate, ba.rate);
    EXPECT_EQ(ab.compared, ba.compared);
    EXPECT_EQ(ab.actual, ba.predicted);
  }
}
