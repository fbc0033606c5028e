#include "trollmap/report.hpp"

#include <algorithm>
#include <cstdio>

#include "trollmap/csv.hpp"
#include "trollmap/time.hpp"

namespace trollmap {

namespace {

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const PropagationRun& run) {
  Json spans = Json::array();
  for (const auto& s : run.spans) {
    spans.push_back({{"index", s.span.index},
                     {"start", format_date(s.span.start)},
                     {"end", format_date(s.span.end)},
                     {"vocabulary", s.vocabulary_size},
                     {"uncategorized", s.uncategorized},
                     {"categorized", s.categorized},
                     {"assigned", s.assigned},
                     {"skipped", s.skipped}});
  }
  Json actors = Json::array();
  std::size_t ties = 0;
  for (const auto& r : run.outcome.results) {
    Json trail = Json::array();
    for (const auto& l : r.trail) {
      trail.push_back({{"span", l.span}, {"category", to_string(l.category)}, {"score", l.score}});
    }
    if (r.tie_broken) ++ties;
    actors.push_back({{"user_id", r.user_id},
                      {"final_category", to_string(r.final_category)},
                      {"mode_frequency", std::to_string(r.mode_count) + "/" +
                                             std::to_string(r.trail.size())},
                      {"mode_frequency_value", r.mode_frequency()},
                      {"tie_broken", r.tie_broken},
                      {"trail", std::move(trail)}});
  }
  return {{"summary",
           {{"resolved", run.outcome.results.size()},
            {"unresolved", run.outcome.unresolved.size()},
            {"tie_broken", ties}}},
          {"spans", std::move(spans)},
          {"actors", std::move(actors)},
          {"unresolved", run.outcome.unresolved}};
}

Json to_json(const FeatureScoreReport& report) {
  Json scores = Json::array();
  std::size_t rank = 1;
  for (const auto& s : report.scores) {
    scores.push_back({{"rank", rank++}, {"feature", s.name}, {"column", s.column}, {"chi2", s.score}});
  }
  return scores;
}

Json to_json(const CorrelationMatrix& matrix) {
  Json rows = Json::array();
  const std::size_t d = matrix.names.size();
  for (std::size_t i = 0; i < d; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < d; ++j) row.push_back(optional_number(matrix.at(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"features", matrix.names}, {"pearson", std::move(rows)}};
}

Json to_json(const ClassificationReport& report) {
  Json classes = Json::object();
  for (const Category c : kAllCategories) {
    const auto& m = report.per_class[index_of(c)];
    Json entry = {{"precision", m.precision},
                  {"recall", m.recall},
                  {"f1", m.f1},
                  {"support", m.support}};
    Json undefined = Json::array();
    if (m.precision_undefined) undefined.push_back("precision");
    if (m.recall_undefined) undefined.push_back("recall");
    if (m.f1_undefined) undefined.push_back("f1");
    if (!undefined.empty()) entry["zero_division"] = std::move(undefined);
    classes[std::string(to_string(c))] = std::move(entry);
  }
  Json confusion = Json::array();
  for (const auto& row : report.confusion.counts) confusion.push_back(row);
  return {{"weighted_f1", report.weighted_f1},
          {"accuracy", report.accuracy},
          {"samples", report.confusion.total()},
          {"zero_division", report.zero_division()},
          {"classes", std::move(classes)},
          {"confusion_order", Json::array({"FakeNews", "Organizations", "PoliticalAffiliates",
                                           "Individuals"})},
          {"confusion", std::move(confusion)}};
}

Json to_json(const OverlapReport& report) {
  Json misses = Json::array();
  for (const auto& m : report.misclassified) {
    misses.push_back({{"user_id", m.user_id},
                      {"our_category", to_string(m.our_category)},
                      {"reference_group", m.reference_group}});
  }
  Json j = {{"matched", report.matched},
            {"total", report.total},
            {"rate", optional_number(report.rate)},
            {"misclassified", std::move(misses)}};
  if (report.warning) j["warning"] = *report.warning;
  return j;
}

Json to_json(const AgreementReport& report) {
  Json per = Json::object();
  for (const Category c : kAllCategories) {
    const auto i = index_of(c);
    per[std::string(to_string(c))] = {
        {"actual", report.actual[i]}, {"predicted", report.predicted[i]}, {"agreed", report.agreed[i]}};
  }
  return {{"compared", report.compared},
          {"matched", report.matched},
          {"rate", report.rate},
          {"categories", std::move(per)}};
}

Json to_json(std::span<const DepthScore> sweep) {
  Json rows = Json::array();
  for (const auto& s : sweep) rows.push_back({{"depth", s.depth}, {"mean_weighted_f1", s.mean_weighted_f1}});
  return rows;
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& matrix) {
  std::vector<std::string> header{""};
  header.insert(header.end(), matrix.names.begin(), matrix.names.end());
  csv::write_row(out, header);
  const std::size_t d = matrix.names.size();
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::string> row{matrix.names[i]};
    for (std::size_t j = 0; j < d; ++j) {
      const auto v = matrix.at(i, j);
      row.push_back(v ? Json(*v).dump() : "");
    }
    csv::write_row(out, row);
  }
}

void write_agreement_csv(std::ostream& out, const AgreementReport& report) {
  csv::write_row(out, {"category", "actual", "predicted", "agreed"});
  for (const Category c : kAllCategories) {
    const auto i = index_of(c);
    csv::write_row(out, {std::string(to_string(c)), std::to_string(report.actual[i]),
                         std::to_string(report.predicted[i]), std::to_string(report.agreed[i])});
  }
}

std::string classification_table(const ClassificationReport& report) {
  std::string out = pad_right("category", 22) + pad_left("precision", 10) + pad_left("recall", 10) +
                    pad_left("f1", 10) + pad_left("support", 10) + "\n";
  std::uint64_t total = 0;
  double wp = 0.0, wr = 0.0;
  for (const Category c : kAllCategories) {
    const auto& m = report.per_class[index_of(c)];
    out += pad_right(std::string(to_string(c)), 22) + pad_left(fixed(m.precision, 2), 10) +
           pad_left(fixed(m.recall, 2), 10) + pad_left(fixed(m.f1, 2), 10) +
           pad_left(std::to_string(m.support), 10) + "\n";
    total += m.support;
    wp += static_cast<double>(m.support) * m.precision;
    wr += static_cast<double>(m.support) * m.recall;
  }
  const auto n = static_cast<double>(total);
  out += pad_right("weighted avg", 22) + pad_left(fixed(wp / n, 2), 10) + pad_left(fixed(wr / n, 2), 10) +
         pad_left(fixed(report.weighted_f1, 2), 10) + pad_left(std::to_string(total), 10) + "\n";
  out += pad_right("accuracy", 22) + pad_left(fixed(report.accuracy, 2), 30) + "\n";
  return out;
}

std::vector<RankedModel> rank_models(std::vector<RankedModel> models) {
  std::stable_sort(models.begin(), models.end(), [](const RankedModel& a, const RankedModel& b) {
    return a.weighted_f1 > b.weighted_f1;
  });
  return models;
}

std::string ranking_table(std::span<const RankedModel> ranked) {
  std::string out = pad_left("rank", 4) + "  " + pad_right("classifier", 20) +
                    pad_left("weighted f1 %", 14) + pad_left("accuracy %", 12) + "\n";
  std::size_t rank = 1;
  for (const auto& m : ranked) {
    out += pad_left(std::to_string(rank++), 4) + "  " + pad_right(m.name, 20) +
           pad_left(fixed(100.0 * m.weighted_f1, 2), 14) + pad_left(fixed(100.0 * m.accuracy, 2), 12) +
           "\n";
  }
  return out;
}

}  // namespace trollmap
