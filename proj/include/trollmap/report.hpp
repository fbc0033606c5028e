#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trollmap/eval.hpp"
#include "trollmap/features.hpp"
#include "trollmap/forest.hpp"
#include "trollmap/propagation.hpp"

namespace trollmap {

using Json = nlohmann::ordered_json;

Json to_json(const PropagationRun& run);
Json to_json(const FeatureScoreReport& report);
Json to_json(const CorrelationMatrix& matrix);
Json to_json(const ClassificationReport& report);
Json to_json(const OverlapReport& report);
Json to_json(const AgreementReport& report);
Json to_json(std::span<const DepthScore> sweep);

// Correlation grid with a header row and column; undefined entries are empty.
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& matrix);

// category,actual,predicted,agreed rows for bar charts.
void write_agreement_csv(std::ostream& out, const AgreementReport& report);

// Per-class precision / recall / f1 / support table with a weighted-average row.
std::string classification_table(const ClassificationReport& report);

struct RankedModel {
  std::string name;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
};

// Models sorted by weighted f1 (descending, stable), rendered as a ranking.
std::vector<RankedModel> rank_models(std::vector<RankedModel> models);
std::string ranking_table(std::span<const RankedModel> ranked);

}  // namespace trollmap
