#include "trollmap/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "trollmap/error.hpp"

namespace trollmap {

namespace {

constexpr std::array<std::string_view, 6> kBaselineNames = {
    "NaiveBayes", "DecisionTree", "KNN", "LogisticRegression", "LinearSVM", "AdaBoost"};

std::array<bool, kCategoryCount> classes_present(std::span<const Category> y) {
  std::array<bool, kCategoryCount> present{};
  for (const auto c : y) present[index_of(c)] = true;
  return present;
}

// Argmax over present classes, canonical order on ties.
Category best_present(const std::array<double, kCategoryCount>& score,
                      const std::array<bool, kCategoryCount>& present) {
  std::size_t best = kCategoryCount;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (!present[c]) continue;
    if (best == kCategoryCount || score[c] > score[best]) best = c;
  }
  return category_at(best);
}

double dot_with_bias(const std::vector<double>& w, const std::vector<double>& x) {
  double s = w.back();
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
  return s;
}

GaussianNaiveBayes train_naive_bayes(const FeatureMatrix& x, std::span<const Category> y,
                                     const BaselineHyperparams& hp) {
  const std::size_t d = x.cols();
  GaussianNaiveBayes nb;
  nb.present = classes_present(y);
  std::array<double, kCategoryCount> count{};
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    nb.mean[c].assign(d, 0.0);
    nb.variance[c].assign(d, 0.0);
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = index_of(y[r]);
    count[c] += 1.0;
    for (std::size_t f = 0; f < d; ++f) nb.mean[c][f] += x.at(r, f);
  }
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (count[c] == 0.0) continue;
    for (auto& m : nb.mean[c]) m /= count[c];
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = index_of(y[r]);
    for (std::size_t f = 0; f < d; ++f) {
      const double diff = x.at(r, f) - nb.mean[c][f];
      nb.variance[c][f] += diff * diff;
    }
  }
  const auto n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (count[c] == 0.0) continue;
    nb.log_prior[c] = std::log(count[c] / n);
    for (auto& v : nb.variance[c]) v = std::max(v / count[c], hp.nb_variance_floor);
  }
  return nb;
}

Category predict_naive_bayes(const GaussianNaiveBayes& nb, std::span<const double> x) {
  std::array<double, kCategoryCount> score{};
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (!nb.present[c]) continue;
    double s = nb.log_prior[c];
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double v = nb.variance[c][f];
      const double diff = x[f] - nb.mean[c][f];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * v) + diff * diff / (2.0 * v);
    }
    score[c] = s;
  }
  return best_present(score, nb.present);
}

Category predict_knn(const NearestNeighbors& knn, std::span<const double> x) {
  const std::size_t n = knn.train.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    const auto row = knn.train.row(r);
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double diff = row[f] - x[f];
      s += diff * diff;
    }
    dist[r] = {s, r};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(knn.k), dist.end());
  std::array<std::size_t, kCategoryCount> votes{};
  std::array<double, kCategoryCount> nearest;
  nearest.fill(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < knn.k; ++i) {
    const auto c = index_of(knn.labels[dist[i].second]);
    ++votes[c];
    nearest[c] = std::min(nearest[c], dist[i].first);
  }
  // Most votes, then the class holding the closest neighbor, then canonical order.
  std::size_t best = 0;
  for (std::size_t c = 1; c < kCategoryCount; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && nearest[c] < nearest[best])) {
      best = c;
    }
  }
  return category_at(best);
}

LinearClassifier train_logistic(const FeatureMatrix& x, std::span<const Category> y,
                                const BaselineHyperparams& hp) {
  LinearClassifier model;
  model.standardizer = Standardizer::fit(x);
  model.present = classes_present(y);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<std::vector<double>> z(n);
  for (std::size_t r = 0; r < n; ++r) z[r] = model.standardizer.apply(x.row(r));
  for (auto& w : model.weights) w.assign(d + 1, 0.0);

  std::array<std::vector<double>, kCategoryCount> grad;
  for (std::size_t it = 0; it < hp.lr_iterations; ++it) {
    for (auto& g : grad) g.assign(d + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      std::array<double, kCategoryCount> logits{};
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        if (!model.present[c]) continue;
        logits[c] = dot_with_bias(model.weights[c], z[r]);
        top = std::max(top, logits[c]);
      }
      double norm = 0.0;
      std::array<double, kCategoryCount> prob{};
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        if (!model.present[c]) continue;
        prob[c] = std::exp(logits[c] - top);
        norm += prob[c];
      }
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        if (!model.present[c]) continue;
        const double err = prob[c] / norm - (index_of(y[r]) == c ? 1.0 : 0.0);
        for (std::size_t f = 0; f < d; ++f) grad[c][f] += err * z[r][f];
        grad[c][d] += err;
      }
    }
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      if (!model.present[c]) continue;
      for (std::size_t f = 0; f <= d; ++f) {
        double g = grad[c][f] / static_cast<double>(n);
        if (f < d) g += hp.lr_l2 * model.weights[c][f];
        model.weights[c][f] -= hp.lr_learning_rate * g;
      }
    }
  }
  return model;
}

LinearClassifier train_linear_svm(const FeatureMatrix& x, std::span<const Category> y,
                                  const BaselineHyperparams& hp) {
  LinearClassifier model;
  model.standardizer = Standardizer::fit(x);
  model.present = classes_present(y);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<std::vector<double>> z(n);
  for (std::size_t r = 0; r < n; ++r) z[r] = model.standardizer.apply(x.row(r));

  std::vector<double> grad(d + 1);
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    auto& w = model.weights[c];
    w.assign(d + 1, 0.0);
    if (!model.present[c]) continue;
    for (std::size_t it = 1; it <= hp.svm_iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        const double target = index_of(y[r]) == c ? 1.0 : -1.0;
        if (target * dot_with_bias(w, z[r]) >= 1.0) continue;
        for (std::size_t f = 0; f < d; ++f) grad[f] -= target * z[r][f];
        grad[d] -= target;
      }
      const double step = hp.svm_learning_rate / std::sqrt(static_cast<double>(it));
      for (std::size_t f = 0; f <= d; ++f) {
        double g = grad[f] / static_cast<double>(n);
        if (f < d) g += hp.svm_lambda * w[f];
        w[f] -= step * g;
      }
    }
  }
  return model;
}

Category predict_linear(const LinearClassifier& model, std::span<const double> x) {
  const auto z = model.standardizer.apply(x);
  std::array<double, kCategoryCount> score{};
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (model.present[c]) score[c] = dot_with_bias(model.weights[c], z);
  }
  return best_present(score, model.present);
}

AdaBoostEnsemble train_adaboost(const FeatureMatrix& x, std::span<const Category> y,
                                const BaselineHyperparams& hp) {
  const std::size_t n = x.rows();
  const auto present = classes_present(y);
  const auto k = static_cast<double>(std::count(present.begin(), present.end(), true));
  std::vector<double> weight(n, 1.0 / static_cast<double>(n));
  TreeParams stump_params;
  stump_params.max_depth = 1;
  stump_params.features_per_split = 0;
  Rng rng(hp.seed);

  AdaBoostEnsemble ensemble;
  for (std::size_t round = 0; round < hp.ada_rounds; ++round) {
    std::vector<WeightedSample> samples(n);
    for (std::size_t r = 0; r < n; ++r) samples[r] = {static_cast<std::uint32_t>(r), 1, weight[r]};
    DecisionTree stump = grow_tree(x, y, samples, stump_params, rng);

    double err = 0.0, total = 0.0;
    std::vector<bool> miss(n);
    for (std::size_t r = 0; r < n; ++r) {
      miss[r] = stump.predict(x.row(r)) != y[r];
      total += weight[r];
      if (miss[r]) err += weight[r];
    }
    err /= total;
    if (err >= 1.0 - 1.0 / k) {
      if (ensemble.stumps.empty()) ensemble.stumps.emplace_back(std::move(stump), 1.0);
      break;
    }
    if (err <= 0.0) {
      ensemble.stumps.emplace_back(std::move(stump), 1.0);
      break;
    }
    const double alpha = std::log((1.0 - err) / err) + std::log(k - 1.0);
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (miss[r]) weight[r] *= std::exp(alpha);
      norm += weight[r];
    }
    for (auto& w : weight) w /= norm;
    ensemble.stumps.emplace_back(std::move(stump), alpha);
  }
  return ensemble;
}

Category predict_adaboost(const AdaBoostEnsemble& ensemble, std::span<const double> x) {
  std::array<double, kCategoryCount> score{};
  for (const auto& [stump, alpha] : ensemble.stumps) score[index_of(stump.predict(x))] += alpha;
  return argmax_category(score);
}

}  // namespace

std::string_view to_string(BaselineKind kind) noexcept {
  return kBaselineNames[static_cast<std::size_t>(kind)];
}

std::optional<BaselineKind> parse_baseline_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kBaselineNames.size(); ++i) {
    if (kBaselineNames[i] == name) return static_cast<BaselineKind>(i);
  }
  return std::nullopt;
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  Standardizer s;
  const std::size_t d = x.cols();
  const auto n = static_cast<double>(x.rows());
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t f = 0; f < d; ++f) s.mean[f] += x.at(r, f);
  }
  for (auto& m : s.mean) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t f = 0; f < d; ++f) {
      const double diff = x.at(r, f) - s.mean[f];
      s.scale[f] += diff * diff;
    }
  }
  for (auto& v : s.scale) {
    v = std::sqrt(v / n);
    if (v == 0.0) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  std::vector<double> out(row.size());
  for (std::size_t f = 0; f < row.size(); ++f) out[f] = (row[f] - mean[f]) / scale[f];
  return out;
}

BaselineModel train_baseline(BaselineKind kind, const FeatureMatrix& x,
                             std::span<const Category> y, const BaselineHyperparams& hp) {
  if (y.size() != x.rows()) throw ValidationError("train_baseline: label count does not match rows");
  const auto present = classes_present(y);
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw ValidationError("train_baseline: at least two classes are required");
  }

  BaselineModel model{kind, {}, x.cols()};
  switch (kind) {
    case BaselineKind::NaiveBayes:
      model.model = train_naive_bayes(x, y, hp);
      break;
    case BaselineKind::DecisionTree: {
      TreeParams tp;
      tp.max_depth = hp.tree_max_depth;
      tp.min_samples_split = hp.tree_min_samples_split;
      tp.features_per_split = 0;
      Rng rng(hp.seed);
      ClassWeights uniform;
      uniform.fill(1.0);
      model.model = TreeClassifier{train_tree(x, y, uniform, tp, rng)};
      break;
    }
    case BaselineKind::KNN:
      if (hp.knn_k == 0 || hp.knn_k > x.rows()) {
        throw ConfigError("knn_k must be in [1, " + std::to_string(x.rows()) + "]");
      }
      model.model = NearestNeighbors{x, {y.begin(), y.end()}, hp.knn_k};
      break;
    case BaselineKind::LogisticRegression:
      model.model = train_logistic(x, y, hp);
      break;
    case BaselineKind::LinearSVM:
      model.model = train_linear_svm(x, y, hp);
      break;
    case BaselineKind::AdaBoost:
      model.model = train_adaboost(x, y, hp);
      break;
  }
  return model;
}

Category predict_baseline(const BaselineModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw DomainError("predict_baseline: expected " + std::to_string(model.n_features) +
                      " features, got " + std::to_string(x.size()));
  }
  return std::visit(
      [&](const auto& m) -> Category {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianNaiveBayes>) {
          return predict_naive_bayes(m, x);
        } else if constexpr (std::is_same_v<T, TreeClassifier>) {
          return m.tree.predict(x);
        } else if constexpr (std::is_same_v<T, NearestNeighbors>) {
          return predict_knn(m, x);
        } else if constexpr (std::is_same_v<T, LinearClassifier>) {
          return predict_linear(m, x);
        } else {
          return predict_adaboost(m, x);
        }
      },
      model.model);
}

std::vector<Category> predict_baseline_all(const BaselineModel& model, const FeatureMatrix& x) {
  std::vector<Category> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_baseline(model, x.row(r));
  return out;
}

}  // namespace trollmap
