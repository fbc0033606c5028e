#include "trollmap/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "trollmap/baselines.hpp"
#include "trollmap/cli/config.hpp"
#include "trollmap/csv.hpp"
#include "trollmap/eval.hpp"
#include "trollmap/features.hpp"
#include "trollmap/forest.hpp"
#include "trollmap/ingest.hpp"
#include "trollmap/propagation.hpp"
#include "trollmap/report.hpp"
#include "trollmap/synthetic.hpp"
#include "trollmap/taxonomy.hpp"

namespace trollmap::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kProfiles = "profiles.jsonl";
constexpr const char* kIngestReport = "ingest_report.json";
constexpr const char* kAugmented = "labels_augmented.csv";
constexpr const char* kPropagationReport = "propagation_report.json";
constexpr const char* kModel = "model.json";
constexpr const char* kSplit = "split.json";
constexpr const char* kCvReport = "cv_report.json";
constexpr const char* kFeatureScores = "feature_scores.json";
constexpr const char* kCorrelationJson = "correlation.json";
constexpr const char* kCorrelationCsv = "correlation.csv";
constexpr const char* kEvaluationJson = "evaluation_report.json";
constexpr const char* kEvaluationTxt = "evaluation_report.txt";
constexpr const char* kPredictions = "predictions.csv";
constexpr const char* kFinalLabels = "labels_final.csv";
constexpr const char* kComparisonJson = "comparison.json";
constexpr const char* kComparisonTxt = "comparison.txt";
constexpr const char* kValidationJson = "validation_report.json";
constexpr const char* kAgreementCsv = "agreement_counts.csv";

struct Context {
  RunConfig config;
  fs::path out_dir;
  bool force = false;
  std::string config_hash;
  std::ostream& log;

  fs::path out(const char* name) const { return out_dir / name; }

  Json meta(std::string_view stage) const {
    return {{"tool", "trollmap"},
            {"format_version", 1},
            {"stage", stage},
            {"config_hash", config_hash},
            {"seed", config.seed}};
  }

  // Leading comment for CSV outputs; readers skip '#' lines.
  std::string csv_banner(std::string_view stage) const {
    return "# trollmap " + std::string(stage) + " config_hash=" + config_hash +
           " seed=" + std::to_string(config.seed) + "\n";
  }
};

// Collects a stage's outputs in memory and publishes them together. Existing
// files are only replaced with --force; each file is written to a temporary
// name and renamed into place.
class Outputs {
 public:
  Outputs(const Context& ctx, const std::vector<const char*>& names) : ctx_(ctx) {
    for (const char* name : names) {
      const fs::path p = ctx.out(name);
      if (fs::exists(p) && !ctx.force) {
        throw DependencyError("output exists: " + p.string() + " (use --force to overwrite)");
      }
      files_.emplace(name, std::string{});
    }
  }

  std::ostringstream& operator[](const char* name) { return streams_[name]; }

  void commit() {
    fs::create_directories(ctx_.out_dir);
    std::vector<std::pair<fs::path, fs::path>> staged;
    for (auto& [name, text] : files_) {
      text = streams_[name.c_str()].str();
      const fs::path final_path = ctx_.out(name.c_str());
      fs::path tmp = final_path;
      tmp += ".tmp";
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << text;
      f.close();
      if (!f) throw Error("cannot write " + tmp.string());
      staged.emplace_back(tmp, final_path);
    }
    for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
  }

 private:
  const Context& ctx_;
  std::map<std::string, std::string> files_;
  std::map<std::string, std::ostringstream> streams_;
};

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

fs::path require_input(const fs::path& path, std::string_view what) {
  if (!fs::is_regular_file(path)) {
    throw DependencyError(std::string(what) + " not found: " + path.string());
  }
  return path;
}

fs::path require_stage(const Context& ctx, const char* name, std::string_view stage) {
  const fs::path p = ctx.out(name);
  if (!fs::is_regular_file(p)) {
    throw DependencyError(p.string() + " is missing; run `trollmap " + std::string(stage) +
                          "` first");
  }
  return p;
}

fs::path configured_input(const Context& ctx, const std::string& value, const char* key,
                          std::string_view what) {
  if (value.empty()) throw ConfigError(std::string(key) + " is not set");
  return require_input(ctx.config.resolve(value), what);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DependencyError("cannot open " + path.string());
  return in;
}

std::vector<AccountProfile> load_profiles(const Context& ctx) {
  auto in = open_in(require_stage(ctx, kProfiles, "ingest"));
  return read_profiles(in);
}

LabelSet load_labels(const fs::path& path) {
  auto in = open_in(path);
  return parse_label_file(in, csv::delimiter_for_path(path.string()));
}

struct LabeledData {
  FeatureMatrix x;  // every profile with a label, raw features
  std::vector<Category> y;
  std::size_t labels_without_profile = 0;
};

LabeledData join_labels(std::span<const AccountProfile> profiles, const LabelSet& labels) {
  std::vector<AccountProfile> kept;
  LabeledData data;
  for (const auto& p : profiles) {
    if (const Label* l = labels.find(p.user_id)) {
      kept.push_back(p);
      data.y.push_back(l->category);
    }
  }
  if (kept.empty()) throw ValidationError("no labeled account has a profile");
  data.labels_without_profile = labels.size() - kept.size();
  data.x = FeatureMatrix::from_profiles(kept);
  return data;
}

std::vector<Category> pick(std::span<const Category> y, std::span<const std::size_t> rows) {
  std::vector<Category> out;
  out.reserve(rows.size());
  for (const auto r : rows) out.push_back(y[r]);
  return out;
}

FeatureMatrix prepare(const FeatureMatrix& raw, std::span<const std::string> features,
                      std::string_view normalize) {
  FeatureMatrix x = raw.select_columns(features);
  return normalize == "l1" ? l1_normalize(x) : x;
}

Json class_counts(std::span<const Category> y) {
  std::array<std::size_t, kCategoryCount> counts{};
  for (const auto c : y) ++counts[index_of(c)];
  Json j = Json::object();
  for (const Category c : kAllCategories) j[std::string(to_string(c))] = counts[index_of(c)];
  return j;
}

// ---------------------------------------------------------------- stages

void cmd_ingest(Context& ctx) {
  const auto& cfg = ctx.config;
  const fs::path tweets = configured_input(ctx, cfg.tweets, "ingest.tweets", "tweet file");
  Outputs outputs(ctx, {kProfiles, kIngestReport});

  ParseOptions options;
  options.delimiter = cfg.delimiter == "tab"     ? '\t'
                      : cfg.delimiter == "comma" ? ','
                                                 : csv::delimiter_for_path(tweets.string());
  if (!cfg.language.empty()) options.language = cfg.language;
  auto in = open_in(tweets);
  const ParseResult parsed = parse_tweet_records(in, options);
  const auto profiles = aggregate_accounts(parsed.records);

  const auto hashed = static_cast<std::size_t>(
      std::count_if(profiles.begin(), profiles.end(), [](const AccountProfile& p) { return p.is_hashed; }));
  Json rejects = Json::array();
  for (const auto& r : parsed.rejects) {
    rejects.push_back({{"row", r.row}, {"line", r.line}, {"reason", r.reason}});
  }
  Json report = {{"meta", ctx.meta("ingest")},
                 {"config", cfg.to_json()},
                 {"records", parsed.records.size()},
                 {"rejected", parsed.rejects.size()},
                 {"filtered_by_language", parsed.filtered},
                 {"accounts", profiles.size()},
                 {"hashed_accounts", hashed},
                 {"hashed_fraction", static_cast<double>(hashed) / static_cast<double>(profiles.size())},
                 {"rejects", std::move(rejects)}};

  write_profiles(outputs[kProfiles], profiles, ctx.meta("ingest").dump());
  write_json(outputs[kIngestReport], report);
  outputs.commit();
  ctx.log << "ingest: " << parsed.records.size() << " records, " << parsed.rejects.size()
          << " rejected, " << profiles.size() << " accounts (" << hashed << " hashed)\n";
}

void cmd_propagate(Context& ctx) {
  const auto& cfg = ctx.config;
  const fs::path profiles_path = require_stage(ctx, kProfiles, "ingest");
  const fs::path labels_path = configured_input(ctx, cfg.labels, "propagate.labels", "label file");
  const auto start = parse_timestamp(cfg.range_start);
  const auto end = parse_timestamp(cfg.range_end);
  const auto spans = partition_spans(*start, *end);
  Outputs outputs(ctx, {kAugmented, kPropagationReport});

  auto in = open_in(profiles_path);
  const auto profiles = read_profiles(in);
  const LabelSet manual = load_labels(labels_path);
  if (manual.empty()) throw ValidationError("label file has no labeled actors; nothing to propagate from");

  PropagationOptions options;
  options.hashed_only = cfg.hashed_only;
  const PropagationRun run = propagate_labels(profiles, manual, spans, options);
  const LabelSet augmented = merge_labels(manual, propagated_labels(run.outcome));

  Json report = {{"meta", ctx.meta("propagate")}, {"config", cfg.to_json()}};
  report["labels_in"] = manual.size();
  report["labels_out"] = augmented.size();
  report.update(to_json(run));

  outputs[kAugmented] << ctx.csv_banner("propagate");
  write_label_file(outputs[kAugmented], augmented);
  write_json(outputs[kPropagationReport], report);
  outputs.commit();
  ctx.log << "propagate: " << run.outcome.results.size() << " actors labeled, "
          << run.outcome.unresolved.size() << " unresolved over " << spans.size() << " spans\n";
}

void cmd_train(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto profiles = load_profiles(ctx);
  const LabelSet labels = load_labels(require_stage(ctx, kAugmented, "propagate"));
  Outputs outputs(ctx, {kModel, kSplit, kCvReport, kFeatureScores, kCorrelationJson, kCorrelationCsv});

  const LabeledData data = join_labels(profiles, labels);
  const FeatureScoreReport scores = chi2_scores(data.x, data.y);
  const auto selected = select_top_k(scores, cfg.k);
  const CorrelationMatrix correlation = pearson_correlation_matrix(data.x.select_columns(selected));
  const FeatureMatrix x = prepare(data.x, selected, cfg.normalize);

  const IndexSplit split = stratified_split(data.y, cfg.test_fraction, cfg.seed);
  const FeatureMatrix x_train = x.select_rows(split.train);
  const auto y_train = pick(data.y, split.train);
  const ForestParams params = cfg.forest_params();
  const Forest forest = train_forest(x_train, y_train, params);

  Json folds = Json::array();
  double cv_sum = 0.0;
  const auto cv = stratified_kfold(y_train, cfg.folds, cfg.seed);
  for (std::size_t f = 0; f < cv.size(); ++f) {
    ForestParams fold_params = params;
    fold_params.seed = derive_stream(cfg.seed, f);
    const Forest fold_forest = train_forest(x_train.select_rows(cv[f].train), pick(y_train, cv[f].train), fold_params);
    const auto report = classification_report(pick(y_train, cv[f].test),
                                              predict_all(fold_forest, x_train.select_rows(cv[f].test)));
    cv_sum += report.weighted_f1;
    folds.push_back({{"fold", f}, {"test_size", cv[f].test.size()}, {"weighted_f1", report.weighted_f1}});
  }

  Json cv_report = {{"meta", ctx.meta("train")},
                    {"config", cfg.to_json()},
                    {"labeled_accounts", data.y.size()},
                    {"labels_without_profile", data.labels_without_profile},
                    {"class_counts", class_counts(data.y)},
                    {"train_size", split.train.size()},
                    {"test_size", split.test.size()},
                    {"features", selected},
                    {"folds", std::move(folds)},
                    {"cv_mean_weighted_f1", cv_sum / static_cast<double>(cv.size())}};
  if (!cfg.depth_sweep.empty()) {
    cv_report["depth_sweep"] = to_json(depth_sweep(x_train, y_train, cfg.depth_sweep, params, cfg.folds));
  }

  Json model_meta = ctx.meta("train");
  model_meta["normalize"] = cfg.normalize;
  write_forest(outputs[kModel], forest, model_meta.dump());

  Json split_json = {{"meta", ctx.meta("train")}, {"train", Json::array()}, {"test", Json::array()}};
  for (const auto r : split.train) split_json["train"].push_back(data.x.row_ids()[r]);
  for (const auto r : split.test) split_json["test"].push_back(data.x.row_ids()[r]);
  write_json(outputs[kSplit], split_json);
  write_json(outputs[kCvReport], cv_report);
  write_json(outputs[kFeatureScores],
             {{"meta", ctx.meta("train")}, {"selected", selected}, {"scores", to_json(scores)}});
  Json corr = to_json(correlation);
  corr["meta"] = ctx.meta("train");
  write_json(outputs[kCorrelationJson], corr);
  outputs[kCorrelationCsv] << ctx.csv_banner("train");
  write_correlation_csv(outputs[kCorrelationCsv], correlation);
  outputs.commit();
  ctx.log << "train: " << forest.trees.size() << " trees on " << split.train.size()
          << " accounts, cv weighted f1 " << cv_report["cv_mean_weighted_f1"].get<double>() << "\n";
}

struct LoadedModel {
  Forest forest;
  std::string normalize;
  std::string config_hash;
};

LoadedModel load_model(const Context& ctx) {
  auto in = open_in(require_stage(ctx, kModel, "train"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  LoadedModel model;
  std::istringstream model_in(text);
  model.forest = read_forest(model_in);
  const auto j = nlohmann::json::parse(text);
  model.normalize = j.at("meta").value("normalize", std::string("none"));
  model.config_hash = j.at("meta").value("config_hash", std::string());
  return model;
}

std::vector<std::string> load_test_ids(const Context& ctx) {
  auto in = open_in(require_stage(ctx, kSplit, "train"));
  const auto j = nlohmann::json::parse(in);
  return j.at("test").get<std::vector<std::string>>();
}

void cmd_evaluate(Context& ctx) {
  const auto& cfg = ctx.config;
  const LoadedModel model = load_model(ctx);
  const auto test_ids = load_test_ids(ctx);
  const auto profiles = load_profiles(ctx);
  const LabelSet labels = load_labels(require_stage(ctx, kAugmented, "propagate"));
  Outputs outputs(ctx, {kEvaluationJson, kEvaluationTxt, kPredictions, kFinalLabels});

  // Predict every account whose selected features can be prepared.
  const FeatureMatrix all = FeatureMatrix::from_profiles(profiles).select_columns(model.forest.feature_names);
  std::vector<LabelSet::Entry> predicted;
  std::map<std::string, Category> by_id;
  std::vector<std::string> unpredictable;
  for (std::size_t r = 0; r < all.rows(); ++r) {
    std::vector<double> row(all.row(r).begin(), all.row(r).end());
    if (model.normalize == "l1") {
      double sum = 0.0;
      for (const double v : row) sum += std::abs(v);
      if (sum == 0.0) {
        unpredictable.push_back(all.row_ids()[r]);
        continue;
      }
      for (double& v : row) v /= sum;
    }
    const Category c = predict(model.forest, row).category;
    by_id.emplace(all.row_ids()[r], c);
    predicted.push_back({all.row_ids()[r], {c, LabelSource::ModelPredicted}});
  }
  const LabelSet predictions = LabelSet::from_entries(std::move(predicted));

  std::vector<Category> y_true, y_pred;
  for (const auto& id : test_ids) {
    const Label* truth = labels.find(id);
    const auto it = by_id.find(id);
    if (!truth || it == by_id.end()) {
      throw ValidationError("test account " + id + " is no longer labeled or predictable; rerun train");
    }
    y_true.push_back(truth->category);
    y_pred.push_back(it->second);
  }
  const ClassificationReport report = classification_report(y_true, y_pred);
  const LabelSet final_labels = merge_labels(labels, predictions);

  Json j = {{"meta", ctx.meta("evaluate")},
            {"config", cfg.to_json()},
            {"model_config_hash", model.config_hash},
            {"test_size", y_true.size()},
            {"report", to_json(report)},
            {"predicted_accounts", predictions.size()},
            {"unpredictable", unpredictable},
            {"final_label_counts", Json::object()}};
  const auto counts = final_labels.category_counts();
  for (const Category c : kAllCategories) j["final_label_counts"][std::string(to_string(c))] = counts[index_of(c)];

  write_json(outputs[kEvaluationJson], j);
  outputs[kEvaluationTxt] << "# config_hash=" << ctx.config_hash << " seed=" << cfg.seed << "\n"
                          << classification_table(report);
  outputs[kPredictions] << ctx.csv_banner("evaluate");
  write_label_file(outputs[kPredictions], predictions);
  outputs[kFinalLabels] << ctx.csv_banner("evaluate");
  write_label_file(outputs[kFinalLabels], final_labels);
  outputs.commit();
  ctx.log << "evaluate: weighted f1 " << report.weighted_f1 << " on " << y_true.size()
          << " held-out accounts\n";
}

void cmd_compare(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto profiles = load_profiles(ctx);
  const LabelSet labels = load_labels(require_stage(ctx, kAugmented, "propagate"));
  Outputs outputs(ctx, {kComparisonJson, kComparisonTxt});

  const LabeledData data = join_labels(profiles, labels);
  const auto selected = select_top_k(chi2_scores(data.x, data.y), cfg.k);
  const FeatureMatrix x = prepare(data.x, selected, cfg.normalize);

  std::map<std::string, double> f1_sum, acc_sum;
  std::size_t forest_first = 0;
  Json runs = Json::array();
  for (std::size_t s = 0; s < cfg.compare_seeds; ++s) {
    const std::uint64_t seed = cfg.seed + s;
    const IndexSplit split = stratified_split(data.y, cfg.test_fraction, seed);
    const FeatureMatrix x_train = x.select_rows(split.train);
    const FeatureMatrix x_test = x.select_rows(split.test);
    const auto y_train = pick(data.y, split.train);
    const auto y_test = pick(data.y, split.test);

    std::vector<RankedModel> models;
    ForestParams params = cfg.forest_params();
    params.seed = seed;
    const auto rf = classification_report(y_test, predict_all(train_forest(x_train, y_train, params), x_test));
    models.push_back({"RandomForest", rf.weighted_f1, rf.accuracy});
    for (const auto kind : kAllBaselines) {
      const auto model = train_baseline(kind, x_train, y_train, cfg.baseline_params(seed));
      const auto r = classification_report(y_test, predict_baseline_all(model, x_test));
      models.push_back({std::string(to_string(kind)), r.weighted_f1, r.accuracy});
    }
    const auto ranked = rank_models(models);
    if (ranked.front().name == "RandomForest") ++forest_first;
    Json entry = {{"seed", seed}, {"ranking", Json::array()}};
    for (const auto& m : ranked) {
      f1_sum[m.name] += m.weighted_f1;
      acc_sum[m.name] += m.accuracy;
      entry["ranking"].push_back({{"classifier", m.name}, {"weighted_f1", m.weighted_f1}, {"accuracy", m.accuracy}});
    }
    runs.push_back(std::move(entry));
  }

  std::vector<RankedModel> mean;
  const auto n = static_cast<double>(cfg.compare_seeds);
  mean.push_back({"RandomForest", f1_sum["RandomForest"] / n, acc_sum["RandomForest"] / n});
  for (const auto kind : kAllBaselines) {
    const std::string name(to_string(kind));
    mean.push_back({name, f1_sum[name] / n, acc_sum[name] / n});
  }
  const auto ranked = rank_models(mean);
  Json summary = Json::array();
  for (const auto& m : ranked) {
    summary.push_back({{"classifier", m.name}, {"mean_weighted_f1", m.weighted_f1}, {"mean_accuracy", m.accuracy}});
  }
  write_json(outputs[kComparisonJson], {{"meta", ctx.meta("compare")},
                                        {"config", cfg.to_json()},
                                        {"features", selected},
                                        {"seeds", cfg.compare_seeds},
                                        {"forest_ranked_first", forest_first},
                                        {"ranking", std::move(summary)},
                                        {"runs", std::move(runs)}});
  outputs[kComparisonTxt] << "# config_hash=" << ctx.config_hash << " seed=" << cfg.seed
                          << " seeds=" << cfg.compare_seeds << "\n"
                          << ranking_table(ranked);
  outputs.commit();
  ctx.log << "compare: " << ranked.front().name << " ranks first; forest first in " << forest_first
          << "/" << cfg.compare_seeds << " seeds\n";
}

void cmd_validate(Context& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.reference.empty() && cfg.manual.empty()) {
    throw ConfigError("validate needs validate.reference and/or validate.manual");
  }
  std::optional<fs::path> reference_path, manual_path, final_path, predictions_path;
  if (!cfg.reference.empty()) {
    reference_path = configured_input(ctx, cfg.reference, "validate.reference", "reference file");
    final_path = require_stage(ctx, kFinalLabels, "evaluate");
  }
  if (!cfg.manual.empty()) {
    manual_path = configured_input(ctx, cfg.manual, "validate.manual", "manual label file");
    predictions_path = require_stage(ctx, kPredictions, "evaluate");
  }
  std::vector<const char*> names{kValidationJson};
  if (manual_path) names.push_back(kAgreementCsv);
  Outputs outputs(ctx, names);

  Json j = {{"meta", ctx.meta("validate")}, {"config", cfg.to_json()}};
  if (reference_path) {
    auto in = open_in(*reference_path);
    const auto reference = parse_reference_file(in, csv::delimiter_for_path(reference_path->string()));
    if (reference.empty()) throw ValidationError("reference file has no entries");
    const auto overlap = overlap_validation(load_labels(*final_path), *parse_category(cfg.category),
                                            reference, cfg.reference_group);
    j["overlap"] = to_json(overlap);
    j["overlap"]["category"] = cfg.category;
    j["overlap"]["reference_group"] = cfg.reference_group;
    ctx.log << "validate: overlap " << overlap.matched << "/" << overlap.total << "\n";
  }
  if (manual_path) {
    const LabelSet manual = load_labels(*manual_path);
    for (const auto& [id, label] : manual) {
      if (label.source != LabelSource::Manual) {
        throw ValidationError("manual label file has a non-Manual entry for " + id);
      }
    }
    const auto agreement = agreement_validation(manual, load_labels(*predictions_path));
    j["agreement"] = to_json(agreement);
    outputs[kAgreementCsv] << ctx.csv_banner("validate");
    write_agreement_csv(outputs[kAgreementCsv], agreement);
    ctx.log << "validate: agreement " << agreement.matched << "/" << agreement.compared << "\n";
  }
  write_json(outputs[kValidationJson], j);
  outputs.commit();
}

void cmd_synth(Context& ctx) {
  const auto& cfg = ctx.config;
  static constexpr const char* kTweets = "synthetic_tweets.csv";
  static constexpr const char* kLabels = "synthetic_labels.csv";
  static constexpr const char* kTruth = "synthetic_truth.csv";
  static constexpr const char* kReference = "synthetic_reference.csv";
  Outputs outputs(ctx, {kTweets, kLabels, kTruth, kReference});

  SyntheticSpec spec = default_synthetic_spec(cfg.synth_accounts, cfg.seed, cfg.synth_scale);
  spec.hashed_fraction = cfg.synth_hashed_fraction;
  spec.contamination = cfg.synth_contamination;
  if (const auto start = parse_timestamp(cfg.range_start)) spec.range_start = *start;
  if (const auto end = parse_timestamp(cfg.range_end)) spec.range_end = *end;
  const SyntheticDataset data = generate_synthetic(spec);
  const auto tweets = data.render_tweets();

  outputs[kTweets] << ctx.csv_banner("synth");
  write_tweet_records(outputs[kTweets], tweets);
  outputs[kLabels] << ctx.csv_banner("synth");
  write_label_file(outputs[kLabels], data.manual_labels());
  outputs[kTruth] << ctx.csv_banner("synth");
  csv::write_row(outputs[kTruth], {"user_id", "category", "hashed"});
  // Reference groups in the style of an external troll taxonomy.
  static constexpr std::array<const char*, kCategoryCount> kGroups = {"NewsFeed", "Commercial",
                                                                      "RightTroll", "LeftTroll"};
  outputs[kReference] << ctx.csv_banner("synth");
  csv::write_row(outputs[kReference], {"user_id", "group"});
  for (const auto& a : data.accounts) {
    csv::write_row(outputs[kTruth], {a.user_id, std::string(to_string(a.category)), a.is_hashed ? "true" : "false"});
    csv::write_row(outputs[kReference], {a.user_id, kGroups[index_of(a.category)]});
  }
  outputs.commit();
  ctx.log << "synth: " << data.accounts.size() << " accounts, " << tweets.size() << " tweets\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify influence-network accounts into authenticity categories."};
  app.name("trollmap");
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool force = false;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--seed", seed, "master seed (overrides run.seed)");
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  app.add_flag("--force", force, "overwrite existing outputs");

  using Command = void (*)(Context&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"ingest", "parse tweet dumps into account profiles", cmd_ingest},
      {"propagate", "label hashed accounts from hashtag similarity", cmd_propagate},
      {"train", "select features, train the forest, cross-validate", cmd_train},
      {"evaluate", "score the held-out split and label remaining accounts", cmd_evaluate},
      {"compare", "rank the forest against baseline classifiers", cmd_compare},
      {"validate", "overlap and agreement checks against external labels", cmd_validate},
      {"synth", "write a synthetic fixture dataset", cmd_synth},
  };
  Command selected = nullptr;
  for (const auto& [name, help, fn] : commands) {
    app.add_subcommand(name, help)->callback([&selected, fn = fn] { selected = fn; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) config.seed = *seed;
    fs::path out_path = out_dir.empty() ? config.resolve(config.out) : fs::absolute(out_dir);
    Context ctx{std::move(config), std::move(out_path), force, {}, out};
    ctx.config_hash = ctx.config.hash();
    selected(ctx);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "trollmap: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DependencyError& e) {
    err << "trollmap: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "trollmap: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "trollmap: unexpected error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace trollmap::cli
