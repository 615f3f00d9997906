#include "depthbench/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace depthbench::metrics {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_row(const std::string& id, const EvalResult& r) {
  return id + "," + fmt(r.rmse) + "," + fmt(r.si_rmse) + "," + fmt(r.log10) +
         "," + fmt(r.rel) + "," + std::to_string(r.n_valid) + "\n";
}

const char* aggregation_name(Aggregation a) {
  return a == Aggregation::pixel_pooled ? "pixel_pooled" : "per_image_mean";
}

nlohmann::json result_json(const EvalResult& r) {
  return {{"rmse", r.rmse},      {"si_rmse", r.si_rmse},
          {"log10", r.log10},    {"rel", r.rel},
          {"n_valid", r.n_valid}, {"n_clamped", r.n_clamped}};
}

}  // namespace

void rank_leaderboard(std::vector<LeaderboardRow>& rows, const ScoreParams& params) {
  for (auto& row : rows) row.score = final_score(row.si_rmse, row.runtime_ms, params);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const LeaderboardRow& a, const LeaderboardRow& b) {
                     return a.score > b.score;
                   });
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i].rank = static_cast<int>(i) + 1;
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "# depthbench-eval v1\n";
  out += "image_id,rmse,si_rmse,log10,rel,n_valid\n";
  for (const auto& [id, result] : report.per_image) out += csv_row(id, result);
  out += csv_row("ALL", report.aggregate);
  return out;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["schema"] = "depthbench-eval/1";
  j["aggregation"] = aggregation_name(report.aggregation);
  j["aggregate"] = result_json(report.aggregate);
  auto& images = j["per_image"] = nlohmann::json::array();
  for (const auto& [id, result] : report.per_image) {
    nlohmann::json entry = result_json(result);
    entry["image_id"] = id;
    images.push_back(std::move(entry));
  }
  return j.dump(2) + "\n";
}

}  // namespace depthbench::metrics
