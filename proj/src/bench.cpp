#include "depthbench/bench/latency.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include <json.hpp>

namespace depthbench::bench {

double percentile_nearest_rank(std::vector<double> samples, double pct) {
  if (samples.empty()) throw DomainError("percentile of an empty sample set");
  if (!(pct > 0.0) || pct > 100.0) throw DomainError("percentile must lie in (0, 100]");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  return samples[rank - 1];
}

LatencyReport time_callable(const std::function<void()>& fn, int runs, int warmup) {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (warmup < 0) throw ConfigError("warmup must be >= 0");

  using clock = std::chrono::steady_clock;
  LatencyReport report;
  report.warmup_count = warmup;
  report.samples_ms.reserve(static_cast<std::size_t>(runs));
  for (int i = 0; i < warmup + runs; ++i) {
    const auto start = clock::now();
    fn();
    const auto stop = clock::now();
    if (i < warmup) continue;
    report.samples_ms.push_back(
        std::chrono::duration<double, std::milli>(stop - start).count());
  }

  report.p50 = percentile_nearest_rank(report.samples_ms, 50.0);
  report.p90 = percentile_nearest_rank(report.samples_ms, 90.0);
  report.p99 = percentile_nearest_rank(report.samples_ms, 99.0);
  report.mean = std::accumulate(report.samples_ms.begin(), report.samples_ms.end(), 0.0) /
                static_cast<double>(report.samples_ms.size());
  report.min = *std::min_element(report.samples_ms.begin(), report.samples_ms.end());
  report.environment = host_descriptor();
  return report;
}

LatencyReport time_inference(const nn::GraphSpec& graph, const nn::WeightStore& weights,
                             const RgbImage& image, int runs, int warmup,
                             const nn::RunOptions& options) {
  graph.validate();
  const TensorF input = image.to_tensor();
  return time_callable(
      [&] {
        volatile float sink =
            nn::run_graph_tensor(graph, weights, input, options)[0];
        (void)sink;
      },
      runs, warmup);
}

double score_run(const LatencyReport& latency, const metrics::EvalResult& eval,
                 const metrics::ScoreParams& params) {
  return metrics::final_score(eval.si_rmse, latency.central(), params);
}

std::string report_to_json(const LatencyReport& report) {
  nlohmann::json j;
  j["schema"] = "depthbench-latency/1";
  j["samples_ms"] = report.samples_ms;
  j["warmup_count"] = report.warmup_count;
  j["p50_ms"] = report.p50;
  j["p90_ms"] = report.p90;
  j["p99_ms"] = report.p99;
  j["mean_ms"] = report.mean;
  j["min_ms"] = report.min;
  j["statistic"] = report.statistic;
  j["environment"] = report.environment;
  return j.dump(2) + "\n";
}

std::string host_descriptor() {
  utsname u{};
  std::string desc = "unknown";
  if (uname(&u) == 0)
    desc = std::string(u.sysname) + " " + u.release + " " + u.machine;
  desc += ", " + std::to_string(std::thread::hardware_concurrency()) + " threads";
  return desc;
}

}  // namespace depthbench::bench
