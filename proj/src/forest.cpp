#include "trollmap/forest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "trollmap/error.hpp"
#include "trollmap/eval.hpp"
#include "trollmap/parallel.hpp"

namespace trollmap {

double gini_impurity(const ClassDistribution& class_mass) {
  double total = 0.0;
  for (const double m : class_mass) {
    if (m < 0.0 || !std::isfinite(m)) throw DomainError("gini_impurity: invalid class mass");
    total += m;
  }
  if (!(total > 0.0)) throw DomainError("gini_impurity: total class mass must be positive");
  double impurity = 0.0;
  for (const double m : class_mass) {
    const double p = m / total;
    impurity += p * (1.0 - p);
  }
  return impurity;
}

ClassWeights balanced_subsample_weights(std::span<const Category> bootstrap_labels) {
  std::array<std::size_t, kCategoryCount> counts{};
  for (const auto c : bootstrap_labels) ++counts[index_of(c)];
  const auto present = static_cast<double>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t n) { return n > 0; }));
  const auto n = static_cast<double>(bootstrap_labels.size());
  ClassWeights weights{};
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (counts[c] > 0) weights[c] = n / (present * static_cast<double>(counts[c]));
  }
  return weights;
}

std::string_view to_string(ClassWeightMode mode) noexcept {
  return mode == ClassWeightMode::Uniform ? "uniform" : "balanced_subsample";
}

std::optional<ClassWeightMode> parse_class_weight_mode(std::string_view name) noexcept {
  if (name == "uniform") return ClassWeightMode::Uniform;
  if (name == "balanced_subsample") return ClassWeightMode::BalancedSubsample;
  return std::nullopt;
}

TreeParams ForestParams::tree_params(std::size_t n_features) const {
  TreeParams tp;
  tp.max_depth = max_depth;
  tp.min_samples_split = min_samples_split;
  tp.features_per_split = features_per_split.value_or(std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))))));
  return tp;
}

// ---------------------------------------------------------------------------
// DecisionTree

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw SchemaError("decision tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (const auto* split = std::get_if<Split>(&nodes_[i])) {
      if (split->left <= i || split->right <= i || split->left >= nodes_.size() ||
          split->right >= nodes_.size()) {
        throw SchemaError("decision tree node " + std::to_string(i) + " has invalid children");
      }
    }
  }
}

const ClassDistribution& DecisionTree::predict_distribution(std::span<const double> x) const {
  std::size_t node = 0;
  while (const auto* split = std::get_if<Split>(&nodes_[node])) {
    node = x[split->feature] <= split->threshold ? split->left : split->right;
  }
  return std::get<Leaf>(nodes_[node]).distribution;
}

Category DecisionTree::predict(std::span<const double> x) const {
  return argmax_category(predict_distribution(x));
}

std::size_t DecisionTree::depth() const {
  const std::function<std::size_t(std::size_t)> walk = [&](std::size_t node) -> std::size_t {
    if (const auto* split = std::get_if<Split>(&nodes_[node])) {
      return 1 + std::max(walk(split->left), walk(split->right));
    }
    return 0;
  };
  return nodes_.empty() ? 0 : walk(0);
}

Category argmax_category(const ClassDistribution& distribution) noexcept {
  return category_at(static_cast<std::size_t>(
      std::max_element(distribution.begin(), distribution.end()) - distribution.begin()));
}

// ---------------------------------------------------------------------------
// Tree growth

namespace {

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;
};

// 1 - sum p^2, equal to sum p (1 - p) but without the per-call validation.
double gini_of(const ClassDistribution& mass, double total) {
  double sum_sq = 0.0;
  for (const double m : mass) {
    const double p = m / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& x, std::span<const Category> y, const TreeParams& params,
             Rng& rng)
      : x_(x), y_(y), params_(params), rng_(rng) {
    feature_pool_.resize(x.cols());
  }

  void grow(std::vector<WeightedSample> samples, std::size_t depth) {
    const std::size_t node = nodes_.size();
    nodes_.emplace_back(Leaf{});

    ClassDistribution mass{};
    std::size_t count = 0;
    for (const auto& s : samples) {
      mass[index_of(y_[s.row])] += s.weight;
      count += s.count;
    }
    double total = 0.0;
    for (const double m : mass) total += m;

    const auto classes_present =
        std::count_if(mass.begin(), mass.end(), [](double m) { return m > 0.0; });
    std::optional<SplitCandidate> best;
    if (total > 0.0 && classes_present > 1 && depth < params_.max_depth &&
        count >= params_.min_samples_split) {
      best = find_split(samples, mass, total);
    }
    if (!best) {
      Leaf leaf;
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        leaf.distribution[c] = total > 0.0 ? mass[c] / total : 0.0;
      }
      if (total <= 0.0) leaf.distribution.fill(1.0 / static_cast<double>(kCategoryCount));
      nodes_[node] = leaf;
      return;
    }

    std::vector<WeightedSample> left, right;
    for (const auto& s : samples) {
      (x_.at(s.row, best->feature) <= best->threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();

    Split split{best->feature, best->threshold, 0, 0};
    split.left = nodes_.size();
    grow(std::move(left), depth + 1);
    split.right = nodes_.size();
    grow(std::move(right), depth + 1);
    nodes_[node] = split;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

 private:
  std::vector<std::size_t> draw_features() {
    const std::size_t d = x_.cols();
    std::iota(feature_pool_.begin(), feature_pool_.end(), std::size_t{0});
    const std::size_t k = (params_.features_per_split == 0 || params_.features_per_split >= d)
                              ? d
                              : params_.features_per_split;
    if (k < d) {
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng_.uniform_index(d - i));
        std::swap(feature_pool_[i], feature_pool_[j]);
      }
    }
    std::vector<std::size_t> drawn(feature_pool_.begin(), feature_pool_.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(drawn.begin(), drawn.end());
    return drawn;
  }

  std::optional<SplitCandidate> find_split(const std::vector<WeightedSample>& samples,
                                           const ClassDistribution& mass, double total) {
    const double parent = gini_of(mass, total);
    std::optional<SplitCandidate> best;

    struct Point {
      double value;
      std::uint32_t row;
      std::size_t cls;
      double weight;
    };
    std::vector<Point> points(samples.size());
    for (const std::size_t f : draw_features()) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        points[i] = {x_.at(s.row, f), s.row, index_of(y_[s.row]), s.weight};
      }
      std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
        return a.value < b.value || (a.value == b.value && a.row < b.row);
      });

      ClassDistribution left{};
      double left_total = 0.0;
      for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        left[points[i].cls] += points[i].weight;
        left_total += points[i].weight;
        if (points[i].value == points[i + 1].value) continue;
        ClassDistribution right{};
        for (std::size_t c = 0; c < kCategoryCount; ++c) right[c] = mass[c] - left[c];
        const double right_total = total - left_total;
        if (left_total <= 0.0 || right_total <= 0.0) continue;
        const double impurity =
            (left_total * gini_of(left, left_total) + right_total * gini_of(right, right_total)) /
            total;
        if (!best || impurity < best->impurity) {
          double threshold = points[i].value + (points[i + 1].value - points[i].value) / 2.0;
          if (threshold >= points[i + 1].value) threshold = points[i].value;
          best = SplitCandidate{f, threshold, impurity};
        }
      }
    }
    if (best && best->impurity < parent - 1e-12) return best;
    return std::nullopt;
  }

  const FeatureMatrix& x_;
  std::span<const Category> y_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<std::size_t> feature_pool_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree grow_tree(const FeatureMatrix& x, std::span<const Category> y,
                       std::span<const WeightedSample> samples, const TreeParams& params,
                       Rng& rng) {
  if (y.size() != x.rows()) throw ValidationError("grow_tree: label count does not match rows");
  if (samples.empty()) throw EmptyInputError("grow_tree: no training samples");
  if (params.max_depth == 0) throw ConfigError("max_depth must be positive");
  TreeGrower grower(x, y, params, rng);
  grower.grow({samples.begin(), samples.end()}, 0);
  return DecisionTree(grower.take());
}

DecisionTree train_tree(const FeatureMatrix& x, std::span<const Category> y,
                        std::span<const std::size_t> sample_indices,
                        const ClassWeights& class_weights, const TreeParams& params, Rng& rng) {
  std::vector<std::uint32_t> counts(x.rows(), 0);
  for (const auto i : sample_indices) {
    if (i >= x.rows()) throw ConfigError("train_tree: sample index out of range");
    ++counts[i];
  }
  std::vector<WeightedSample> samples;
  for (std::uint32_t r = 0; r < counts.size(); ++r) {
    if (counts[r] == 0) continue;
    const double w = class_weights[index_of(y[r])] * counts[r];
    if (w > 0.0) samples.push_back({r, counts[r], w});
  }
  return grow_tree(x, y, samples, params, rng);
}

DecisionTree train_tree(const FeatureMatrix& x, std::span<const Category> y,
                        const ClassWeights& class_weights, const TreeParams& params, Rng& rng) {
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return train_tree(x, y, all, class_weights, params, rng);
}

// ---------------------------------------------------------------------------
// Forest

Forest train_forest(const FeatureMatrix& x, std::span<const Category> y,
                    const ForestParams& params) {
  if (y.size() != x.rows()) throw ValidationError("train_forest: label count does not match rows");
  if (x.rows() < 2) throw ValidationError("train_forest: at least two samples are required");
  std::array<std::size_t, kCategoryCount> counts{};
  for (const auto c : y) ++counts[index_of(c)];
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t n) { return n > 0; }) < 2) {
    throw ValidationError("train_forest: at least two classes are required");
  }
  if (params.n_trees == 0) throw ConfigError("n_trees must be positive");
  if (params.max_depth == 0) throw ConfigError("max_depth must be positive");
  if (params.min_samples_split == 0) throw ConfigError("min_samples_split must be positive");
  if (params.features_per_split &&
      (*params.features_per_split == 0 || *params.features_per_split > x.cols())) {
    throw ConfigError("features_per_split must be in [1, " + std::to_string(x.cols()) + "]");
  }

  Forest forest;
  forest.params = params;
  forest.feature_names = x.column_names();
  forest.trees.resize(params.n_trees);
  const TreeParams tree_params = params.tree_params(x.cols());
  const std::size_t n = x.rows();

  parallel_for(params.n_trees, [&](std::size_t t) {
    Rng rng(derive_stream(params.seed, t));
    ForestTree& out = forest.trees[t];
    out.bootstrap.resize(n);
    std::vector<std::size_t> indices(n);
    std::vector<Category> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<std::uint32_t>(rng.uniform_index(n));
      out.bootstrap[i] = r;
      indices[i] = r;
      labels[i] = y[r];
    }
    if (params.class_weight_mode == ClassWeightMode::BalancedSubsample) {
      out.class_weights = balanced_subsample_weights(labels);
    } else {
      out.class_weights.fill(1.0);
    }
    out.tree = train_tree(x, y, indices, out.class_weights, tree_params, rng);
  });
  return forest;
}

Prediction predict(const Forest& forest, std::span<const double> x) {
  if (x.size() != forest.n_features()) {
    throw DomainError("predict: expected " + std::to_string(forest.n_features()) +
                      " features, got " + std::to_string(x.size()));
  }
  if (forest.trees.empty()) throw DomainError("predict: forest has no trees");
  std::array<std::vector<double>, kCategoryCount> votes;
  for (auto& v : votes) v.reserve(forest.trees.size());
  for (const auto& t : forest.trees) {
    const auto& dist = t.tree.predict_distribution(x);
    for (std::size_t c = 0; c < kCategoryCount; ++c) votes[c].push_back(dist[c]);
  }
  Prediction p{};
  const auto n = static_cast<double>(forest.trees.size());
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    std::sort(votes[c].begin(), votes[c].end());
    double sum = 0.0;
    for (const double v : votes[c]) sum += v;
    p.distribution[c] = sum / n;
  }
  p.category = argmax_category(p.distribution);
  return p;
}

std::vector<Category> predict_all(const Forest& forest, const FeatureMatrix& x) {
  std::vector<Category> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(forest, x.row(r)).category;
  return out;
}

std::vector<DepthScore> depth_sweep(const FeatureMatrix& x, std::span<const Category> y,
                                    std::span<const std::size_t> depths,
                                    const ForestParams& params, std::size_t folds) {
  if (depths.empty()) throw ConfigError("depth_sweep: no depths given");
  const auto splits = stratified_kfold(y, folds, params.seed);
  std::vector<DepthScore> out;
  for (const std::size_t depth : depths) {
    ForestParams p = params;
    p.max_depth = depth;
    double sum = 0.0;
    for (std::size_t f = 0; f < splits.size(); ++f) {
      p.seed = derive_stream(params.seed, f);
      const auto& split = splits[f];
      const FeatureMatrix train_x = x.select_rows(split.train);
      const FeatureMatrix test_x = x.select_rows(split.test);
      std::vector<Category> train_y, test_y;
      for (const auto i : split.train) train_y.push_back(y[i]);
      for (const auto i : split.test) test_y.push_back(y[i]);
      const Forest forest = train_forest(train_x, train_y, p);
      sum += classification_report(test_y, predict_all(forest, test_x)).weighted_f1;
    }
    out.push_back({depth, sum / static_cast<double>(splits.size())});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kModelFormat = "trollmap-forest";
constexpr int kModelVersion = 1;

nlohmann::ordered_json node_to_json(const std::vector<TreeNode>& nodes, std::size_t i) {
  nlohmann::ordered_json j;
  if (const auto* split = std::get_if<Split>(&nodes[i])) {
    j["feature"] = split->feature;
    j["threshold"] = split->threshold;
    j["left"] = node_to_json(nodes, split->left);
    j["right"] = node_to_json(nodes, split->right);
  } else {
    j["leaf"] = std::get<Leaf>(nodes[i]).distribution;
  }
  return j;
}

void node_from_json(const nlohmann::json& j, std::vector<TreeNode>& nodes, std::size_t n_features) {
  const std::size_t index = nodes.size();
  if (j.contains("leaf")) {
    Leaf leaf;
    leaf.distribution = j.at("leaf").get<ClassDistribution>();
    nodes.emplace_back(leaf);
    return;
  }
  Split split;
  split.feature = j.at("feature").get<std::size_t>();
  if (split.feature >= n_features) throw SchemaError("model: split feature out of range");
  split.threshold = j.at("threshold").get<double>();
  nodes.emplace_back(split);
  split.left = nodes.size();
  node_from_json(j.at("left"), nodes, n_features);
  split.right = nodes.size();
  node_from_json(j.at("right"), nodes, n_features);
  nodes[index] = split;
}

}  // namespace

void write_forest(std::ostream& out, const Forest& forest, std::string_view meta_json) {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  if (!meta_json.empty()) j["meta"] = nlohmann::ordered_json::parse(meta_json);
  const auto& p = forest.params;
  nlohmann::ordered_json params;
  params["n_trees"] = p.n_trees;
  params["max_depth"] = p.max_depth;
  params["min_samples_split"] = p.min_samples_split;
  params["features_per_split"] =
      p.features_per_split ? nlohmann::ordered_json(*p.features_per_split) : nullptr;
  params["seed"] = p.seed;
  params["class_weight_mode"] = to_string(p.class_weight_mode);
  j["params"] = std::move(params);
  j["feature_names"] = forest.feature_names;
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : forest.trees) {
    nlohmann::ordered_json tj;
    tj["class_weights"] = t.class_weights;
    tj["bootstrap"] = t.bootstrap;
    tj["root"] = node_to_json(t.tree.nodes(), 0);
    trees.push_back(std::move(tj));
  }
  j["trees"] = std::move(trees);
  out << j.dump() << '\n';
}

Forest read_forest(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw SchemaError("model: not a trollmap forest file");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw SchemaError("model: unsupported version " + j.at("version").dump());
    }
    Forest forest;
    const auto& p = j.at("params");
    forest.params.n_trees = p.at("n_trees").get<std::size_t>();
    forest.params.max_depth = p.at("max_depth").get<std::size_t>();
    forest.params.min_samples_split = p.at("min_samples_split").get<std::size_t>();
    if (!p.at("features_per_split").is_null()) {
      forest.params.features_per_split = p.at("features_per_split").get<std::size_t>();
    }
    forest.params.seed = p.at("seed").get<std::uint64_t>();
    const auto mode = parse_class_weight_mode(p.at("class_weight_mode").get<std::string>());
    if (!mode) throw SchemaError("model: unknown class_weight_mode");
    forest.params.class_weight_mode = *mode;
    forest.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& tj : j.at("trees")) {
      ForestTree t;
      t.class_weights = tj.at("class_weights").get<ClassWeights>();
      t.bootstrap = tj.at("bootstrap").get<std::vector<std::uint32_t>>();
      std::vector<TreeNode> nodes;
      node_from_json(tj.at("root"), nodes, forest.feature_names.size());
      t.tree = DecisionTree(std::move(nodes));
      forest.trees.push_back(std::move(t));
    }
    if (forest.trees.size() != forest.params.n_trees) {
      throw SchemaError("model: tree count does not match n_trees");
    }
    return forest;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model: ") + e.what());
  }
}

}  // namespace trollmap
