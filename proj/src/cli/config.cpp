#include "trollmap/cli/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <functional>

#include "trollmap/csv.hpp"
#include "trollmap/error.hpp"
#include "trollmap/taxonomy.hpp"
#include "trollmap/time.hpp"

namespace trollmap::cli {

namespace {

[[noreturn]] void bad_value(const std::string& name, const std::string& value, const char* expected) {
  throw ConfigError("config " + name + " = '" + value + "': expected " + expected);
}

std::uint64_t to_u64(const std::string& name, const std::string& value) {
  const std::string_view text = csv::trim(value);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    bad_value(name, value, "a non-negative integer");
  }
  return v;
}

std::size_t to_size(const std::string& name, const std::string& value, std::size_t min) {
  const auto v = to_u64(name, value);
  if (v < min) bad_value(name, value, min == 1 ? "a positive integer" : "a larger integer");
  return static_cast<std::size_t>(v);
}

double to_double(const std::string& name, const std::string& value) {
  const std::string trimmed(csv::trim(value));
  try {
    std::size_t used = 0;
    const double v = std::stod(trimmed, &used);
    if (used != trimmed.size() || !std::isfinite(v)) bad_value(name, value, "a finite number");
    return v;
  } catch (const std::logic_error&) {
    bad_value(name, value, "a finite number");
  }
}

double to_fraction(const std::string& name, const std::string& value, bool open_low, bool open_high) {
  const double v = to_double(name, value);
  if ((open_low ? v <= 0.0 : v < 0.0) || (open_high ? v >= 1.0 : v > 1.0)) {
    bad_value(name, value, "a fraction in range");
  }
  return v;
}

bool to_bool(const std::string& name, const std::string& value) {
  const std::string v(csv::trim(value));
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  bad_value(name, value, "true or false");
}

std::string one_of(const std::string& name, const std::string& value,
                   std::initializer_list<std::string_view> allowed) {
  const std::string v(csv::trim(value));
  for (const auto a : allowed) {
    if (v == a) return v;
  }
  bad_value(name, value, "one of the documented choices");
}

std::string date(const std::string& name, const std::string& value) {
  const std::string v(csv::trim(value));
  if (!parse_timestamp(v)) bad_value(name, value, "a date YYYY-MM-DD");
  return v;
}

std::vector<std::size_t> size_list(const std::string& name, const std::string& value) {
  std::vector<std::size_t> out;
  std::string_view rest = value;
  while (!csv::trim(rest).empty()) {
    const auto comma = rest.find(',');
    const std::string item(csv::trim(rest.substr(0, comma)));
    out.push_back(to_size(name, item, 1));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, const std::string& name, const std::string&)> set;
  std::function<Json(const RunConfig&)> get;
};

Field string_field(const char* section, const char* key, std::string RunConfig::*member) {
  return {section, key,
          [member](RunConfig& c, const std::string&, const std::string& v) {
            c.*member = std::string(csv::trim(v));
          },
          [member](const RunConfig& c) { return Json(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"run", "out", [](RunConfig& c, auto&, auto& v) { c.out = std::string(csv::trim(v)); },
       [](const RunConfig& c) { return Json(c.out); }},
      {"run", "seed", [](RunConfig& c, auto& n, auto& v) { c.seed = to_u64(n, v); },
       [](const RunConfig& c) { return Json(c.seed); }},

      string_field("ingest", "tweets", &RunConfig::tweets),
      {"ingest", "delimiter",
       [](RunConfig& c, auto& n, auto& v) { c.delimiter = one_of(n, v, {"auto", "comma", "tab"}); },
       [](const RunConfig& c) { return Json(c.delimiter); }},
      string_field("ingest", "language", &RunConfig::language),

      string_field("propagate", "labels", &RunConfig::labels),
      {"propagate", "range_start", [](RunConfig& c, auto& n, auto& v) { c.range_start = date(n, v); },
       [](const RunConfig& c) { return Json(c.range_start); }},
      {"propagate", "range_end", [](RunConfig& c, auto& n, auto& v) { c.range_end = date(n, v); },
       [](const RunConfig& c) { return Json(c.range_end); }},
      {"propagate", "hashed_only", [](RunConfig& c, auto& n, auto& v) { c.hashed_only = to_bool(n, v); },
       [](const RunConfig& c) { return Json(c.hashed_only); }},

      {"features", "k", [](RunConfig& c, auto& n, auto& v) { c.k = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.k); }},
      {"features", "normalize",
       [](RunConfig& c, auto& n, auto& v) { c.normalize = one_of(n, v, {"l1", "none"}); },
       [](const RunConfig& c) { return Json(c.normalize); }},

      {"forest", "n_trees", [](RunConfig& c, auto& n, auto& v) { c.n_trees = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.n_trees); }},
      {"forest", "max_depth", [](RunConfig& c, auto& n, auto& v) { c.max_depth = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.max_depth); }},
      {"forest", "min_samples_split",
       [](RunConfig& c, auto& n, auto& v) { c.min_samples_split = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.min_samples_split); }},
      {"forest", "features_per_split",
       [](RunConfig& c, auto& n, auto& v) { c.features_per_split = to_size(n, v, 0); },
       [](const RunConfig& c) { return Json(c.features_per_split); }},
      {"forest", "class_weight",
       [](RunConfig& c, auto& n, auto& v) {
         c.class_weight = one_of(n, v, {"balanced_subsample", "uniform"});
       },
       [](const RunConfig& c) { return Json(c.class_weight); }},

      {"evaluate", "test_fraction",
       [](RunConfig& c, auto& n, auto& v) { c.test_fraction = to_fraction(n, v, true, true); },
       [](const RunConfig& c) { return Json(c.test_fraction); }},
      {"evaluate", "folds", [](RunConfig& c, auto& n, auto& v) { c.folds = to_size(n, v, 2); },
       [](const RunConfig& c) { return Json(c.folds); }},
      {"evaluate", "depth_sweep", [](RunConfig& c, auto& n, auto& v) { c.depth_sweep = size_list(n, v); },
       [](const RunConfig& c) { return Json(c.depth_sweep); }},

      {"compare", "seeds", [](RunConfig& c, auto& n, auto& v) { c.compare_seeds = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.compare_seeds); }},
      {"compare", "nb_variance_floor",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.nb_variance_floor = to_double(n, v); },
       [](const RunConfig& c) { return Json(c.baselines.nb_variance_floor); }},
      {"compare", "tree_max_depth",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.tree_max_depth = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.baselines.tree_max_depth); }},
      {"compare", "knn_k", [](RunConfig& c, auto& n, auto& v) { c.baselines.knn_k = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.baselines.knn_k); }},
      {"compare", "lr_iterations",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.lr_iterations = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.baselines.lr_iterations); }},
      {"compare", "lr_learning_rate",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.lr_learning_rate = to_double(n, v); },
       [](const RunConfig& c) { return Json(c.baselines.lr_learning_rate); }},
      {"compare", "lr_l2", [](RunConfig& c, auto& n, auto& v) { c.baselines.lr_l2 = to_double(n, v); },
       [](const RunConfig& c) { return Json(c.baselines.lr_l2); }},
      {"compare", "svm_iterations",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.svm_iterations = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.baselines.svm_iterations); }},
      {"compare", "svm_learning_rate",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.svm_learning_rate = to_double(n, v); },
       [](const RunConfig& c) { return Json(c.baselines.svm_learning_rate); }},
      {"compare", "svm_lambda",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.svm_lambda = to_double(n, v); },
       [](const RunConfig& c) { return Json(c.baselines.svm_lambda); }},
      {"compare", "ada_rounds",
       [](RunConfig& c, auto& n, auto& v) { c.baselines.ada_rounds = to_size(n, v, 1); },
       [](const RunConfig& c) { return Json(c.baselines.ada_rounds); }},

      string_field("validate", "reference", &RunConfig::reference),
      {"validate", "category",
       [](RunConfig& c, auto& n, auto& v) {
         const std::string name(csv::trim(v));
         if (!parse_category(name)) bad_value(n, v, "a category name");
         c.category = name;
       },
       [](const RunConfig& c) { return Json(c.category); }},
      string_field("validate", "reference_group", &RunConfig::reference_group),
      string_field("validate", "manual", &RunConfig::manual),

      {"synth", "accounts", [](RunConfig& c, auto& n, auto& v) { c.synth_accounts = to_size(n, v, 4); },
       [](const RunConfig& c) { return Json(c.synth_accounts); }},
      {"synth", "hashed_fraction",
       [](RunConfig& c, auto& n, auto& v) { c.synth_hashed_fraction = to_fraction(n, v, false, false); },
       [](const RunConfig& c) { return Json(c.synth_hashed_fraction); }},
      {"synth", "contamination",
       [](RunConfig& c, auto& n, auto& v) { c.synth_contamination = to_fraction(n, v, false, true); },
       [](const RunConfig& c) { return Json(c.synth_contamination); }},
      {"synth", "scale",
       [](RunConfig& c, auto& n, auto& v) {
         c.synth_scale = to_double(n, v);
         if (!(c.synth_scale > 0.0)) bad_value(n, v, "a positive number");
       },
       [](const RunConfig& c) { return Json(c.synth_scale); }},
  };
  return table;
}

}  // namespace

ForestParams RunConfig::forest_params() const {
  ForestParams p;
  p.n_trees = n_trees;
  p.max_depth = max_depth;
  p.min_samples_split = min_samples_split;
  if (features_per_split > 0) p.features_per_split = features_per_split;
  p.seed = seed;
  p.class_weight_mode = *parse_class_weight_mode(class_weight);
  return p;
}

BaselineHyperparams RunConfig::baseline_params(std::uint64_t run_seed) const {
  BaselineHyperparams hp = baselines;
  hp.seed = run_seed;
  return hp;
}

std::filesystem::path RunConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

Json RunConfig::to_json() const {
  Json j = Json::object();
  for (const auto& f : fields()) {
    if (std::string_view(f.section) == "run" && std::string_view(f.key) == "out") continue;
    j[f.section][f.key] = f.get(*this);
  }
  return j;
}

std::string RunConfig::hash() const {
  const std::string text = to_json().dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

void set_value(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) {
      f.set(config, section + "." + key, value);
      return;
    }
  }
  throw ConfigError("unknown config key " + section + "." + key);
}

RunConfig default_config() {
  RunConfig c;
  c.base_dir = std::filesystem::current_path();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  RunConfig c;
  c.base_dir = std::filesystem::absolute(path).parent_path();
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw ConfigError("config key '" + section + "' must live inside a [section]");
    }
    for (const auto& [key, node] : entries) set_value(c, section, key, node.data());
  }
  return c;
}

}  // namespace trollmap::cli
