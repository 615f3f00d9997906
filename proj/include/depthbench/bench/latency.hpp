#pragma once

#include <functional>
#include <string>
#include <vector>

#include "depthbench/metrics.hpp"
#include "depthbench/nn/runner.hpp"

namespace depthbench::bench {

// Wall-time samples of repeated single-image inference. Percentiles are
// nearest-rank over the post-warmup samples only.
struct LatencyReport {
  std::vector<double> samples_ms;
  int warmup_count = 0;
  double p50 = 0.0, p90 = 0.0, p99 = 0.0;
  double mean = 0.0, min = 0.0;
  std::string environment;
  std::string statistic = "p50";  // which statistic score_run consumes

  double central() const { return statistic == "mean" ? mean : p50; }
};

// Nearest-rank percentile: the ceil(pct/100 * n)-th smallest sample.
double percentile_nearest_rank(std::vector<double> samples, double pct);

// Times `runs` invocations after `warmup` discarded ones on a monotonic
// clock. The timing loop is strictly sequential.
LatencyReport time_callable(const std::function<void()>& fn, int runs, int warmup);

// Challenge-style runtime protocol: one fixed input, reused for every run so
// the measurement covers compute only.
LatencyReport time_inference(const nn::GraphSpec& graph, const nn::WeightStore& weights,
                             const RgbImage& image, int runs, int warmup,
                             const nn::RunOptions& options = {});

// Combines a latency report's central statistic with a fidelity result.
double score_run(const LatencyReport& latency, const metrics::EvalResult& eval,
                 const metrics::ScoreParams& params);

std::string report_to_json(const LatencyReport& report);

// Free-text host descriptor recorded in reports.
std::string host_descriptor();

}  // namespace depthbench::bench
