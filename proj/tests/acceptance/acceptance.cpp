// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "trollmap/baselines.hpp"
#include "trollmap/cli/app.hpp"
#include "trollmap/eval.hpp"
#include "trollmap/features.hpp"
#include "trollmap/forest.hpp"
#include "trollmap/propagation.hpp"
#include "trollmap/rng.hpp"
#include "trollmap/synthetic.hpp"

using namespace trollmap;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

bool close_relative(long double expected, double got, long double tol) {
  if (expected == 0) return got == 0;
  return std::fabs((got - expected) / expected) <= tol;
}

std::vector<Category> random_labels(Rng& rng, std::size_t n) {
  std::vector<Category> y(n);
  for (auto& c : y) c = category_at(rng.uniform_index(kCategoryCount));
  return y;
}

// Mean weighted f1 over stratified folds for the forest and two baselines.
struct CvScores {
  double forest = 0, tree = 0, bayes = 0;
};

CvScores cross_validate(const FeatureMatrix& x, const std::vector<Category>& y, std::uint64_t seed,
                        bool with_baselines) {
  CvScores s;
  const auto folds = stratified_kfold(y, 5, seed);
  for (const auto& fold : folds) {
    const auto xtr = x.select_rows(fold.train), xte = x.select_rows(fold.test);
    const auto ytr = fixtures::pick(y, fold.train), yte = fixtures::pick(y, fold.test);
    const auto forest = train_forest(xtr, ytr, {.seed = seed});
    s.forest += classification_report(yte, predict_all(forest, xte)).weighted_f1 / folds.size();
    if (!with_baselines) continue;
    const BaselineHyperparams hp{.seed = seed};
    const auto dt = train_baseline(BaselineKind::DecisionTree, xtr, ytr, hp);
    const auto nb = train_baseline(BaselineKind::NaiveBayes, xtr, ytr, hp);
    s.tree += classification_report(yte, predict_baseline_all(dt, xte)).weighted_f1 / folds.size();
    s.bayes += classification_report(yte, predict_baseline_all(nb, xte)).weighted_f1 / folds.size();
  }
  return s;
}

// Every pair of classes differs by at least two spreads on some feature.
bool two_sigma_separated(const SyntheticSpec& spec) {
  for (std::size_t a = 0; a < kCategoryCount; ++a) {
    for (std::size_t b = a + 1; b < kCategoryCount; ++b) {
      bool separated = false;
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const double sigma = std::max(spec.classes[a].spread[f], spec.classes[b].spread[f]);
        separated |= std::fabs(spec.classes[a].mean[f] - spec.classes[b].mean[f]) >= 2 * sigma;
      }
      if (!separated) return false;
    }
  }
  return true;
}

Verdict oracle_equivalence() {
  const auto start = Clock::now();
  Rng rng(20240101);
  std::size_t failures = 0;

  for (int trial = 0; trial < 1000; ++trial) {
    ClassDistribution mass{};
    for (auto& m : mass) m = rng.bernoulli(0.25) ? 0.0 : rng.uniform01() * 50;
    mass[rng.uniform_index(4)] += 1;
    long double total = 0, g = 0;
    for (double m : mass) total += m;
    for (double m : mass) g += (m / total) * (1 - m / total);
    failures += !close_relative(g, gini_impurity(mass), 1e-10L);
  }

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + rng.uniform_index(30);
    std::vector<std::uint8_t> u(m), v(m);
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = rng.bernoulli(0.4);
      v[i] = rng.bernoulli(0.4);
    }
    u[rng.uniform_index(m)] = 1;
    v[rng.uniform_index(m)] = 1;
    long double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < m; ++i) {
      dot += u[i] * v[i];
      nu += u[i];
      nv += v[i];
    }
    const long double expected = dot / (std::sqrt(nu) * std::sqrt(nv));
    failures += !close_relative(
        expected, cosine_similarity(BinaryVector::from_dense(u), BinaryVector::from_dense(v)), 1e-10L);
  }

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(40), d = 1 + rng.uniform_index(6);
    std::vector<std::string> ids, names;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    std::vector<double> values(n * d);
    for (auto& v : values) v = static_cast<double>(rng.uniform_index(500));
    std::vector<Category> y = random_labels(rng, n);
    y[0] = Category::FakeNews;
    y[1] = Category::Individuals;
    const FeatureMatrix x(ids, names, values);
    for (const auto& s : chi2_scores(x, y).scores) {
      std::array<long double, kCategoryCount> obs{}, cnt{};
      long double tot = 0;
      for (std::size_t r = 0; r < n; ++r) {
        obs[index_of(y[r])] += x.at(r, s.column);
        cnt[index_of(y[r])] += 1;
        tot += x.at(r, s.column);
      }
      long double expected = 0;
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const long double e = tot * cnt[c] / n;
        if (e > 0) expected += (obs[c] - e) * (obs[c] - e) / e;
      }
      failures += !close_relative(expected, s.score, 1e-10L);
    }
  }

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(50);
    const auto truth = random_labels(rng, n), pred = random_labels(rng, n);
    const auto r = classification_report(truth, pred);
    double weighted = 0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      std::uint64_t tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool t = index_of(truth[i]) == c, p = index_of(pred[i]) == c;
        tp += t && p;
        fp += !t && p;
        fn += t && !p;
      }
      const double precision = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
      const double recall = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
      const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
      const auto& m = r.per_class[c];
      failures += r.confusion.true_positives(category_at(c)) != tp;
      failures += r.confusion.predicted(category_at(c)) != tp + fp;
      failures += r.confusion.actual(category_at(c)) != tp + fn;
      failures += m.support != tp + fn;
      failures += m.precision != precision || m.recall != recall || std::fabs(m.f1 - f1) > 1e-12;
      weighted += static_cast<double>(tp + fn) * f1;
    }
    failures += std::fabs(r.weighted_f1 - weighted / n) > 1e-12;
  }

  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 10.0,
          format("4 x 1000 instances, %zu mismatches, %.2fs (limit 10s)", failures, elapsed)};
}

Verdict propagation_recovery() {
  const auto start = Clock::now();
  const auto noisy_data = generate_synthetic(fixtures::planted_pool_spec(0.1, 1));
  const auto clean_data = generate_synthetic(fixtures::planted_pool_spec(0.0, 1));
  const auto noisy = fixtures::propagation_recovery(noisy_data);
  const auto clean = fixtures::propagation_recovery(clean_data);
  const double elapsed = seconds_since(start);
  const std::size_t labeled = noisy_data.manual_labels().size();
  const bool shape = labeled == 500 && noisy.total == 500 && clean.total == 500;
  return {shape && noisy.rate() >= 0.95 && clean.recovered == clean.total && elapsed < 20.0,
          format("rho=0.1 %zu/%zu (%.3f, need 0.95), rho=0 %zu/%zu, %.2fs (limit 20s)",
                 noisy.recovered, noisy.total, noisy.rate(), clean.recovered, clean.total, elapsed)};
}

Verdict classifier_quality() {
  const auto start = Clock::now();
  const auto spec = default_synthetic_spec(2400, 1);
  const auto data = generate_synthetic(spec);
  const auto y = data.truth();
  std::array<std::size_t, kCategoryCount> counts{};
  for (auto c : y) ++counts[index_of(c)];
  const bool proportions = counts == std::array<std::size_t, kCategoryCount>{240, 120, 360, 1680};
  const bool separated = two_sigma_separated(spec);
  const double f1 = cross_validate(data.matrix(), y, 1, false).forest;
  const double elapsed = seconds_since(start);
  return {proportions && separated && f1 >= 0.85 && elapsed < 60.0,
          format("5-fold weighted f1 %.4f (need 0.85), 70/15/10/5 %s, 2-sigma %s, %.2fs (limit 60s)",
                 f1, proportions ? "yes" : "no", separated ? "yes" : "no", elapsed)};
}

Verdict classifier_ranking() {
  int wins = 0;
  std::string margins;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = generate_synthetic(default_synthetic_spec(2400, seed));
    const auto s = cross_validate(data.matrix(), data.truth(), seed, true);
    wins += s.forest >= s.tree && s.forest >= s.bayes;
    margins += format(" %+.3f", std::min(s.forest - s.tree, s.forest - s.bayes));
  }
  return {wins >= 8, format("forest >= tree and bayes in %d/10 seeds (need 8); margins%s", wins,
                            margins.c_str())};
}

Verdict imbalance_handling() {
  const auto f = fixtures::minority_starved_fixture();
  const auto minority = index_of(fixtures::MinorityFixture::kMinority);
  int strict = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto recall = [&](ClassWeightMode mode) {
      const auto forest = train_forest(f.x, f.y, {.seed = seed, .class_weight_mode = mode});
      return classification_report(f.y, predict_all(forest, f.x)).per_class[minority].recall;
    };
    const double uniform = recall(ClassWeightMode::Uniform);
    const double balanced = recall(ClassWeightMode::BalancedSubsample);
    strict += balanced > uniform;
    detail += format(" %.2f>%.2f", balanced, uniform);
  }
  return {strict == 5, format("minority recall balanced>uniform on %d/5 seeds:%s", strict, detail.c_str())};
}

Verdict depth_sweep_shape() {
  std::vector<std::size_t> depths(10);
  for (std::size_t i = 0; i < depths.size(); ++i) depths[i] = i + 1;
  std::vector<double> curve(depths.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = generate_synthetic(default_synthetic_spec(2400, seed));
    const auto sweep = depth_sweep(data.matrix(), data.truth(), depths, {.seed = seed}, 5);
    for (std::size_t i = 0; i < sweep.size(); ++i) curve[i] += sweep[i].mean_weighted_f1 / 5;
  }
  const std::size_t peak = std::max_element(curve.begin(), curve.end()) - curve.begin();
  bool settles = true;
  for (std::size_t i = peak; i < curve.size(); ++i) {
    for (std::size_t j = i + 1; j < curve.size(); ++j) settles &= curve[j] <= curve[i] + 0.02;
  }
  std::string shape;
  for (double v : curve) shape += format(" %.3f", v);
  return {curve[4] > curve[0] && settles,
          format("f1(5) %.4f > f1(1) %.4f, peak at depth %zu, flat within 0.02 after: %s; curve%s",
                 curve[4], curve[0], peak + 1, settles ? "yes" : "no", shape.c_str())};
}

Verdict validation_arithmetic() {
  const auto o = fixtures::overlap_fixture();
  const auto overlap = overlap_validation(o.ours, Category::FakeNews, o.reference, "NewsFeed");
  const auto a = fixtures::agreement_fixture();
  const auto agreement = agreement_validation(a.manual, a.predicted);
  std::size_t individuals = 0;
  for (const auto& m : overlap.misclassified) individuals += m.our_category == Category::Individuals;
  const bool overlap_ok = overlap.matched == 49 && overlap.total == 54 && overlap.rate &&
                          std::round(*overlap.rate * 10000) / 10000 == 0.9074 && individuals == 5 &&
                          overlap.misclassified.size() == 5;
  const bool agreement_ok = agreement.matched == 1299 && agreement.compared == 1435 &&
                            std::round(agreement.rate * 10000) / 10000 == 0.9052;
  return {overlap_ok && agreement_ok,
          format("overlap %zu/%zu = %.4f with %zu Individuals misses; agreement %zu/%zu = %.4f",
                 overlap.matched, overlap.total, overlap.rate.value_or(0.0), individuals,
                 agreement.matched, agreement.compared, agreement.rate)};
}

Verdict stratification() {
  Rng rng(8);
  std::size_t checks = 0, violations = 0;
  const auto check = [&](const std::vector<Category>& y, const IndexSplit& s, double expected_share) {
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    bool partition = all.size() == y.size();
    for (std::size_t i = 0; partition && i < all.size(); ++i) partition = all[i] == i;
    violations += !partition;
    std::array<double, kCategoryCount> total{}, test{};
    for (auto c : y) total[index_of(c)] += 1;
    for (auto i : s.test) test[index_of(y[i])] += 1;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      ++checks;
      violations += std::fabs(test[c] - total[c] * expected_share) > 1.0;
    }
  };
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(9);
    auto y = random_labels(rng, rng.uniform_index(400));
    // Heavily skewed vectors as well as uniform ones.
    if (trial % 2) {
      for (auto& c : y) if (rng.bernoulli(0.7)) c = Category::Individuals;
    }
    for (std::size_t c = 0; c < kCategoryCount; ++c) y.insert(y.end(), k, category_at(c));
    const double fraction = 0.05 + 0.9 * rng.uniform01();
    check(y, stratified_split(y, fraction, trial), fraction);
    for (const auto& fold : stratified_kfold(y, k, trial)) check(y, fold, 1.0 / k);
  }
  return {violations == 0, format("%zu per-class checks over 2000 label vectors, %zu violations",
                                  checks, violations)};
}

std::map<std::string, std::string> run_pipeline(const fs::path& dir, std::string& error) {
  fixtures::write_file(dir / "run.ini",
                      "[run]\nout = out\nseed = 11\n"
                      "[ingest]\ntweets = out/synthetic_tweets.csv\n"
                      "[propagate]\nlabels = out/synthetic_labels.csv\n"
                      "[evaluate]\ndepth_sweep = 2, 5\n"
                      "[compare]\nseeds = 2\n"
                      "[validate]\nreference = out/synthetic_reference.csv\n"
                      "manual = out/synthetic_labels.csv\n");
  for (const char* stage : {"synth", "ingest", "propagate", "train", "evaluate", "compare", "validate"}) {
    std::ostringstream out, err;
    if (cli::run({"--config", (dir / "run.ini").string(), stage}, out, err) != 0) {
      error = std::string(stage) + ": " + err.str();
      return {};
    }
  }
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir / "out")) {
    files[entry.path().filename().string()] = fixtures::read_file(entry.path());
  }
  return files;
}

Verdict determinism() {
  fixtures::TempDir first, second;
  std::string error;
  const auto a = run_pipeline(first.path(), error);
  const auto b = error.empty() ? run_pipeline(second.path(), error) : decltype(a){};
  if (!error.empty()) return {false, "pipeline failed: " + error};
  std::size_t differing = 0;
  std::string names;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      ++differing;
      names += " " + name;
    }
  }
  const bool has_model = a.contains("model.json") && a.contains("evaluation_report.json");
  return {differing == 0 && a.size() == b.size() && has_model,
          format("%zu artifacts compared, %zu differ%s", a.size(), differing, names.c_str())};
}

Verdict sample_size_degradation() {
  constexpr std::size_t kAccounts = 600;
  constexpr std::size_t kMinority = index_of(Category::Organizations);
  double f64 = 0, f85 = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = generate_synthetic(default_synthetic_spec(kAccounts, seed));
    const auto x = data.matrix();
    const auto y = data.truth();
    // 85% of the data is the full training sample; 64% is drawn from it.
    const auto outer = stratified_split(y, 0.15, seed);
    const auto x85 = x.select_rows(outer.train);
    const auto y85 = fixtures::pick(y, outer.train);
    const auto inner = stratified_split(y85, 1.0 - 64.0 / 85.0, seed);
    const auto x64 = x85.select_rows(inner.train);
    const auto y64 = fixtures::pick(y85, inner.train);
    // Large independent test set from the same generator.
    const auto test = generate_synthetic(default_synthetic_spec(24000, seed + 1000));
    const auto xte = test.matrix();
    const auto yte = test.truth();
    const ForestParams params{.seed = seed};
    f85 += classification_report(yte, predict_all(train_forest(x85, y85, params), xte))
               .per_class[kMinority].f1 / 5;
    f64 += classification_report(yte, predict_all(train_forest(x64, y64, params), xte))
               .per_class[kMinority].f1 / 5;
  }
  return {f64 < f85, format("minority f1 at 64%% %.4f < at 85%% %.4f (5 seeds)", f64, f85)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"AC1 oracle equivalence", oracle_equivalence},
      {"AC2 propagation recovery", propagation_recovery},
      {"AC3 classifier quality", classifier_quality},
      {"AC4 classifier ranking", classifier_ranking},
      {"AC5 imbalance handling", imbalance_handling},
      {"AC6 depth sweep", depth_sweep_shape},
      {"AC7 validation arithmetic", validation_arithmetic},
      {"AC8 stratification", stratification},
      {"AC9 determinism", determinism},
      {"AC10 sample-size degradation", sample_size_degradation},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
