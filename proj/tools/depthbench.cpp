// depthbench: evaluation, scoring, inference and latency toolkit for
// VGA monocular depth models.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "depthbench/bench/latency.hpp"
#include "depthbench/io/dataset.hpp"
#include "depthbench/io/png_io.hpp"
#include "depthbench/metrics.hpp"
#include "depthbench/nn/runner.hpp"
#include "depthbench/nn/tcl_tiny.hpp"

namespace fs = std::filesystem;
using namespace depthbench;

namespace {

struct CommonOptions {
  double unit_scale = kDefaultUnitScale;
  double max_depth = kMaxDepthMeters;
  double normalization_c = 0.0;  // 0 = calibrated default
  std::string data_dir;

  double c_or_default() const {
    return normalization_c > 0.0 ? normalization_c
                                 : metrics::default_normalization_c();
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Relative dataset paths resolve against --data-dir / DEPTHBENCH_DATA_DIR
// when one is configured.
fs::path resolve_data_path(const CommonOptions& common, const std::string& path) {
  if (path.empty() || common.data_dir.empty() || fs::path(path).is_absolute())
    return path;
  return fs::path(common.data_dir) / path;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write: " + path.string());
  out << content;
}

// ---------------------------------------------------------------- evaluate

std::map<std::string, fs::path> png_files_by_stem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.path().extension() == ".png") out[de.path().stem().string()] = de.path();
  return out;
}

int cmd_evaluate(const CommonOptions& common, const std::string& pred_dir,
                 const std::string& gt_dir, const std::string& manifest,
                 const std::string& out_prefix, const std::string& aggregation) {
  std::map<std::string, fs::path> gt;
  if (!manifest.empty()) {
    for (const auto& entry : io::load_manifest(resolve_data_path(common, manifest)).entries)
      gt[entry.image_id] = entry.depth_path;
  } else {
    gt = png_files_by_stem(resolve_data_path(common, gt_dir));
  }
  const auto pred = png_files_by_stem(resolve_data_path(common, pred_dir));

  std::vector<std::string> unpaired;
  for (const auto& [id, path] : gt)
    if (!pred.count(id)) unpaired.push_back(id);
  for (const auto& [id, path] : pred)
    if (!gt.count(id)) unpaired.push_back(id);
  if (!unpaired.empty()) {
    std::sort(unpaired.begin(), unpaired.end());
    for (const auto& id : unpaired)
      std::cerr << "unpaired image_id: " << id << "\n";
    return 2;
  }
  if (gt.empty()) throw FormatError("no image pairs found");

  metrics::BatchEvaluator evaluator(aggregation == "per_image_mean"
                                        ? metrics::Aggregation::per_image_mean
                                        : metrics::Aggregation::pixel_pooled);
  for (const auto& [id, gt_path] : gt) {
    const DepthMap gt_map = io::load_depth16(gt_path, common.unit_scale, common.max_depth);
    const DepthMap pred_map =
        io::load_depth16(pred.at(id), common.unit_scale, common.max_depth);
    evaluator.add(id, pred_map, gt_map);
  }
  const metrics::EvalReport report = evaluator.report();

  if (!out_prefix.empty()) {
    write_text_file(out_prefix + ".csv", metrics::report_to_csv(report));
    write_text_file(out_prefix + ".json", metrics::report_to_json(report));
  }
  const auto& a = report.aggregate;
  std::cout << "images " << report.per_image.size() << "  n_valid " << a.n_valid
            << "\nrmse " << fmt(a.rmse) << "\nsi_rmse " << fmt(a.si_rmse)
            << "\nlog10 " << fmt(a.log10) << "\nrel " << fmt(a.rel) << "\n";
  if (a.n_clamped > 0)
    std::cerr << "warning: " << a.n_clamped
              << " non-positive predictions floored for log metrics\n";
  return 0;
}

// ------------------------------------------------------------------- score

int cmd_score(const CommonOptions& common, double si_rmse, double runtime_ms) {
  const metrics::ScoreParams params{20.0, common.c_or_default()};
  const double score = metrics::final_score(si_rmse, runtime_ms, params);
  std::cout << fmt(score) << "\n";
  std::cout << "rounded " << std::llround(score) << "\n";
  return 0;
}

// ------------------------------------------------------------- leaderboard

std::vector<metrics::LeaderboardRow> read_leaderboard_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open leaderboard input: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty leaderboard input");
  if (!line.empty() && line[0] == '#') std::getline(in, line);
  if (line != "name,si_rmse,runtime_ms")
    throw FormatError("leaderboard header must be name,si_rmse,runtime_ms");
  std::vector<metrics::LeaderboardRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    metrics::LeaderboardRow row;
    std::string field;
    if (!std::getline(ss, row.name, ',')) throw FormatError("bad row: " + line);
    if (!std::getline(ss, field, ',')) throw FormatError("bad row: " + line);
    row.si_rmse = std::stod(field);
    if (!std::getline(ss, field, ',')) throw FormatError("bad row: " + line);
    row.runtime_ms = std::stod(field);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("leaderboard input has no rows");
  return rows;
}

int cmd_leaderboard(const CommonOptions& common, const std::string& input,
                    const std::string& out_csv) {
  auto rows = read_leaderboard_csv(input);
  const metrics::ScoreParams params{20.0, common.c_or_default()};
  metrics::rank_leaderboard(rows, params);

  std::size_t name_width = 4;
  for (const auto& row : rows) name_width = std::max(name_width, row.name.size());
  std::printf("%-4s %-*s %9s %11s %12s %6s\n", "rank", static_cast<int>(name_width),
              "name", "si_rmse", "runtime_ms", "score", "round");
  for (const auto& row : rows)
    std::printf("%-4d %-*s %9s %11s %12s %6lld\n", row.rank,
                static_cast<int>(name_width), row.name.c_str(),
                fmt(row.si_rmse).c_str(), fmt(row.runtime_ms).c_str(),
                fmt(row.score).c_str(), static_cast<long long>(std::llround(row.score)));

  if (!out_csv.empty()) {
    std::string csv = "# depthbench-leaderboard v1\n";
    csv += "rank,name,si_rmse,runtime_ms,score,score_rounded\n";
    for (const auto& row : rows)
      csv += std::to_string(row.rank) + "," + row.name + "," + fmt(row.si_rmse) +
             "," + fmt(row.runtime_ms) + "," + fmt(row.score) + "," +
             std::to_string(std::llround(row.score)) + "\n";
    write_text_file(out_csv, csv);
  }
  return 0;
}

// ------------------------------------------------------------------- infer

int cmd_infer(const CommonOptions& common, const std::string& graph_path,
              const std::string& weights_path, const std::string& input_path,
              const std::string& output_path, const std::string& kernel_path,
              bool no_collapse) {
  const nn::GraphSpec graph = nn::load_graph(graph_path);
  const nn::WeightStore weights = nn::load_weights(weights_path);
  const RgbImage image = io::load_rgb(input_path);

  nn::RunOptions options;
  options.path = kernel_path == "naive" ? nn::KernelPath::naive
                                        : nn::KernelPath::optimized;
  options.collapse_clbs = !no_collapse;
  options.max_depth = common.max_depth;

  const DepthMap depth = nn::run_graph(graph, weights, image, options);
  io::save_depth16(depth, output_path, common.unit_scale);

  double lo = 0.0, hi = 0.0, mean = 0.0;
  const Index n_valid = depth.valid_count();
  if (n_valid > 0) {
    lo = depth.valid.select(depth.values, depth.values.maxCoeff()).minCoeff();
    hi = depth.valid.select(depth.values, 0.0).maxCoeff();
    mean = depth.valid.select(depth.values, 0.0).sum() / static_cast<double>(n_valid);
  }
  std::cout << "depth min " << fmt(lo) << " max " << fmt(hi) << " mean " << fmt(mean)
            << " valid " << n_valid << "/" << depth.values.size() << "\n";
  return 0;
}

// ------------------------------------------------------------------- bench

RgbImage synthetic_bench_input(Index height, Index width) {
  RgbImage image(height, width);
  for (Index y = 0; y < height; ++y)
    for (Index x = 0; x < width; ++x) {
      image.at(y, x, 0) = static_cast<float>(x) / static_cast<float>(width - 1);
      image.at(y, x, 1) = static_cast<float>(y) / static_cast<float>(height - 1);
      image.at(y, x, 2) = 0.5f;
    }
  return image;
}

int cmd_bench(const CommonOptions& common, const std::string& graph_path,
              const std::string& weights_path, const std::string& input_path,
              int runs, int warmup, const std::string& out_json) {
  (void)common;
  const nn::GraphSpec graph = nn::load_graph(graph_path);
  const nn::WeightStore weights = nn::load_weights(weights_path);

  RgbImage image;
  if (!input_path.empty()) {
    image = io::load_rgb(input_path);
  } else {
    const auto& p = std::get<nn::InputParams>(
        graph.node(graph.inputs.front()).params);
    image = synthetic_bench_input(p.height, p.width);
  }

  const bench::LatencyReport report =
      bench::time_inference(graph, weights, image, runs, warmup);
  if (!out_json.empty()) write_text_file(out_json, bench::report_to_json(report));
  std::cout << "p50 " << fmt(report.p50) << " ms  p90 " << fmt(report.p90)
            << " ms  p99 " << fmt(report.p99) << " ms  mean " << fmt(report.mean)
            << " ms  min " << fmt(report.min) << " ms  (" << report.samples_ms.size()
            << " runs, " << report.warmup_count << " warmup)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depth estimation evaluation & benchmarking toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags take precedence");
  app.allow_config_extras(false);

  CommonOptions common;
  if (const char* env = std::getenv("DEPTHBENCH_DATA_DIR")) common.data_dir = env;
  app.add_option("--unit-scale", common.unit_scale,
                 "meters per raw 16-bit depth unit")
      ->capture_default_str();
  app.add_option("--max-depth", common.max_depth, "validity cap in meters")
      ->capture_default_str();
  app.add_option("--c", common.normalization_c,
                 "score normalization constant (default: calibrated)");
  app.add_option("--data-dir", common.data_dir, "dataset root")
      ->envname("DEPTHBENCH_DATA_DIR");

  auto* evaluate = app.add_subcommand("evaluate", "fidelity metrics for prediction/gt pairs");
  std::string pred_dir, gt_dir, manifest, out_prefix, aggregation = "pixel_pooled";
  evaluate->add_option("--pred", pred_dir, "directory of predicted 16-bit depth PNGs")
      ->required();
  auto* gt_opt = evaluate->add_option("--gt", gt_dir, "directory of ground-truth PNGs");
  auto* manifest_opt =
      evaluate->add_option("--manifest", manifest, "CSV manifest naming ground truth");
  gt_opt->excludes(manifest_opt);
  evaluate->add_option("--out", out_prefix, "report path prefix (.csv/.json appended)");
  evaluate->add_option("--aggregation", aggregation, "pixel_pooled | per_image_mean")
      ->check(CLI::IsMember({"pixel_pooled", "per_image_mean"}));

  auto* score = app.add_subcommand("score", "challenge score from si-RMSE and runtime");
  double si_rmse = 0.0, runtime_ms = 0.0;
  score->add_option("--si-rmse", si_rmse, "scale-invariant RMSE")->required();
  score->add_option("--runtime-ms", runtime_ms, "runtime in milliseconds")->required();

  auto* leaderboard = app.add_subcommand("leaderboard", "rank entries by challenge score");
  std::string lb_input, lb_out;
  leaderboard->add_option("--input", lb_input, "CSV: name,si_rmse,runtime_ms")->required();
  leaderboard->add_option("--out", lb_out, "ranked CSV output path");

  auto* infer = app.add_subcommand("infer", "run a graph on an RGB image");
  std::string graph_path, weights_path, input_path, output_path;
  std::string kernel_path = "optimized";
  bool no_collapse = false;
  infer->add_option("--graph", graph_path, "graph JSON")->required();
  infer->add_option("--weights", weights_path, "DBW1 weight file")->required();
  infer->add_option("--input", input_path, "input RGB PNG")->required();
  infer->add_option("--output", output_path, "output 16-bit depth PNG")->required();
  infer->add_option("--kernel-path", kernel_path, "naive | optimized")
      ->check(CLI::IsMember({"naive", "optimized"}));
  infer->add_flag("--no-collapse", no_collapse, "run collapsible blocks expanded");

  auto* bench_cmd = app.add_subcommand("bench", "latency of repeated single-image inference");
  std::string bench_graph, bench_weights, bench_input, bench_out;
  int runs = 30, warmup = 5;
  bench_cmd->add_option("--graph", bench_graph, "graph JSON")->required();
  bench_cmd->add_option("--weights", bench_weights, "DBW1 weight file")->required();
  bench_cmd->add_option("--input", bench_input, "RGB PNG (default: synthetic)");
  bench_cmd->add_option("--runs", runs, "timed runs")->capture_default_str();
  bench_cmd->add_option("--warmup", warmup, "discarded warmup runs")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "latency report JSON path");

  for (auto* sub : {evaluate, score, leaderboard, infer, bench_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (evaluate->parsed()) {
      if (gt_dir.empty() && manifest.empty())
        throw ConfigError("evaluate needs --gt or --manifest");
      return cmd_evaluate(common, pred_dir, gt_dir, manifest, out_prefix, aggregation);
    }
    if (score->parsed()) return cmd_score(common, si_rmse, runtime_ms);
    if (leaderboard->parsed()) return cmd_leaderboard(common, lb_input, lb_out);
    if (infer->parsed())
      return cmd_infer(common, graph_path, weights_path, input_path, output_path,
                       kernel_path, no_collapse);
    if (bench_cmd->parsed())
      return cmd_bench(common, bench_graph, bench_weights, bench_input, runs, warmup,
                       bench_out);
  } catch (const ValidationError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const NotCollapsibleError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
