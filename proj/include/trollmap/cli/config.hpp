#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trollmap/baselines.hpp"
#include "trollmap/forest.hpp"
#include "trollmap/report.hpp"

namespace trollmap::cli {

// Effective run configuration. Loaded from an INI file with one section per
// stage; every key has a default so an empty file is valid.
struct RunConfig {
  std::filesystem::path base_dir;  // relative input paths resolve against it

  // [run]
  std::string out = "out";
  std::uint64_t seed = 42;

  // [ingest]
  std::string tweets;
  std::string delimiter = "auto";  // auto | comma | tab
  std::string language;            // empty keeps every language

  // [propagate]
  std::string labels;
  std::string range_start = "2009-07-01";
  std::string range_end = "2018-07-01";
  bool hashed_only = true;

  // [features]
  std::size_t k = 8;
  std::string normalize = "l1";  // l1 | none

  // [forest]
  std::size_t n_trees = 100;
  std::size_t max_depth = 5;
  std::size_t min_samples_split = 2;
  std::size_t features_per_split = 0;  // 0: floor(sqrt(d))
  std::string class_weight = "balanced_subsample";

  // [evaluate]
  double test_fraction = 0.2;
  std::size_t folds = 5;
  std::vector<std::size_t> depth_sweep;  // empty: no sweep during train

  // [compare]
  std::size_t compare_seeds = 1;
  BaselineHyperparams baselines;

  // [validate]
  std::string reference;
  std::string category = "FakeNews";
  std::string reference_group = "NewsFeed";
  std::string manual;

  // [synth]
  std::size_t synth_accounts = 600;
  double synth_hashed_fraction = 0.36;
  double synth_contamination = 0.1;
  double synth_scale = 0.1;

  ForestParams forest_params() const;
  BaselineHyperparams baseline_params(std::uint64_t seed) const;

  // Resolves a configured input path against base_dir.
  std::filesystem::path resolve(const std::string& path) const;

  // Every setting by section, in a fixed order. run.out is left out because
  // where results go does not change them.
  Json to_json() const;

  // SHA-256 of to_json().dump(), hex encoded.
  std::string hash() const;
};

// Reads an INI file. Unknown sections or keys and malformed values throw
// ConfigError.
RunConfig load_config(const std::filesystem::path& path);

// Defaults only, with base_dir set to the working directory.
RunConfig default_config();

// Applies "section.key" = value, with the same validation as the file loader.
void set_value(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value);

}  // namespace trollmap::cli
