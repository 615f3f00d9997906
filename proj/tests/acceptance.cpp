// Acceptance suite: every release-gating check, one pass/fail line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "depthbench/bench/latency.hpp"
#include "depthbench/io/crop.hpp"
#include "depthbench/io/png_io.hpp"
#include "depthbench/losses.hpp"
#include "depthbench/metrics.hpp"
#include "depthbench/nn/runner.hpp"
#include "depthbench/nn/tcl_tiny.hpp"
#include "test_util.hpp"
#include "vnl_oracle.hpp"

using namespace depthbench;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
  if (!condition) throw CheckFailure(what);
}

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Leaderboard reproduction: calibrate C on the winning row, reproduce the
//    remaining seven published integer scores within +/-1 in published order.
void criterion_leaderboard() {
  const auto start = std::chrono::steady_clock::now();

  struct Row {
    const char* name;
    double si_rmse, runtime_ms;
    long long published;
  };
  const std::vector<Row> rows = {
      {"TCL", 0.2773, 46, 298},          {"AIIA HIT", 0.311, 37, 232},
      {"MiAIgo", 0.299, 54, 188},        {"Tencent GY-Lab", 0.303, 68, 141},
      {"Tencent GY-Lab*", 0.2836, 103, 122}, {"SmartLab", 0.3296, 65, 102},
      {"JMU-CVLab", 0.3498, 139, 36},    {"ICL", 0.338, 142, 42},
  };

  const double c = metrics::calibrate_c(rows[0].si_rmse, rows[0].runtime_ms,
                                        static_cast<double>(rows[0].published));
  const metrics::ScoreParams params{20.0, c};

  std::vector<metrics::LeaderboardRow> board;
  for (const auto& row : rows) {
    const double score = metrics::final_score(row.si_rmse, row.runtime_ms, params);
    require(std::abs(score - static_cast<double>(row.published)) <= 1.0,
            std::string(row.name) + " scored " + num(score) + ", published " +
                std::to_string(row.published));
    board.push_back({row.name, row.si_rmse, row.runtime_ms, 0.0, 0});
  }

  metrics::rank_leaderboard(board, params);
  std::vector<Row> by_published = rows;
  std::stable_sort(by_published.begin(), by_published.end(),
                   [](const Row& a, const Row& b) { return a.published > b.published; });
  for (std::size_t i = 0; i < board.size(); ++i)
    require(board[i].name == by_published[i].name,
            "rank " + std::to_string(i + 1) + " is " + board[i].name + ", expected " +
                by_published[i].name);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(elapsed < 1.0, "took " + num(elapsed) + " s, budget 1 s");
}

// ---------------------------------------------------------------------------
// 2. si-RMSE scale invariance over 100 randomized trials, |delta| < 1e-9.
void criterion_scale_invariance() {
  SplitMix64 rng(20220501);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gt = dbtest::random_map(rng, 10, 12, 0.5, 45.0, 0.2);
    const auto pred = dbtest::random_map(rng, 10, 12, 0.5, 45.0, 0.2);
    const double s = rng.next_range(0.1, 10.0);
    auto scaled = pred;
    scaled.values *= s;
    const double delta =
        std::abs(metrics::si_rmse(scaled, gt) - metrics::si_rmse(pred, gt));
    require(delta < 1e-9,
            "trial " + std::to_string(trial) + " drifted by " + num(delta));
  }
}

// ---------------------------------------------------------------------------
// 3. Every loss is exactly zero (<= 1e-12) at a perfect prediction.
void criterion_zero_at_perfect() {
  SplitMix64 rng(3);
  const auto gt = dbtest::random_map(rng, 10, 10, 1.0, 30.0, 0.0);
  const CameraIntrinsics k{12.0, 12.0, 4.5, 4.5};

  losses::DepthLossParams params;
  params.vnl.seed = 5;
  params.vnl.n_triplets = 200;

  const double silog = losses::silog_loss(gt, gt, params.silog);
  require(std::abs(silog) <= 1e-12, "silog " + num(silog));

  const double grad = losses::gradient_loss(gt, gt);
  require(std::abs(grad) <= 1e-12, "gradient " + num(grad));

  const double vnl = losses::vnl_loss(gt, gt, k, params.vnl);
  require(std::abs(vnl) <= 1e-12, "vnl " + num(vnl));

  const double robust = losses::robust_value(0.0, params.robust);
  require(std::abs(robust) <= 1e-12, "robust(0) " + num(robust));

  TensorD features({4, 4, 3});
  for (Index i = 0; i < features.size(); ++i)
    features[i] = rng.next_range(-1.0, 1.0);
  const double distill = losses::pairwise_distill_loss(features, features);
  require(std::abs(distill) <= 1e-12, "pairwise distill " + num(distill));

  const double depth = losses::depth_loss(gt, gt, k, {}, params);
  require(std::abs(depth) <= 1e-12, "depth_loss " + num(depth));

  const double stage2 = losses::stage2_loss(depth, distill, 10.0);
  require(std::abs(stage2) <= 1e-12, "stage2 " + num(stage2));
}

// ---------------------------------------------------------------------------
// 4. Pairwise distillation vs the double-loop oracle, plus the hand example.
void criterion_distill_oracle() {
  SplitMix64 rng(4);
  auto cosine = [](const TensorD& f, Index i, Index j) {
    const Index c = f.extent(2);
    double dot = 0, ni = 0, nj = 0;
    for (Index t = 0; t < c; ++t) {
      dot += f[i * c + t] * f[j * c + t];
      ni += f[i * c + t] * f[i * c + t];
      nj += f[j * c + t] * f[j * c + t];
    }
    return dot / (std::max(std::sqrt(ni), 1e-12) * std::max(std::sqrt(nj), 1e-12));
  };

  for (int trial = 0; trial < 50; ++trial) {
    const Index h = 1 + static_cast<Index>(rng.next_below(8));
    const Index w = 1 + static_cast<Index>(rng.next_below(8));
    const Index cs = 1 + static_cast<Index>(rng.next_below(4));
    const Index ct = 1 + static_cast<Index>(rng.next_below(4));
    TensorD student({h, w, cs});
    TensorD teacher({h, w, ct});
    for (Index i = 0; i < student.size(); ++i) student[i] = rng.next_range(-2, 2);
    for (Index i = 0; i < teacher.size(); ++i) teacher[i] = rng.next_range(-2, 2);

    double slow = 0;
    const Index positions = h * w;
    for (Index i = 0; i < positions; ++i)
      for (Index j = 0; j < positions; ++j) {
        const double d = cosine(student, i, j) - cosine(teacher, i, j);
        slow += d * d;
      }
    slow /= static_cast<double>(positions);

    const double fast = losses::pairwise_distill_loss(student, teacher);
    require(std::abs(fast - slow) < 1e-10,
            "trial " + std::to_string(trial) + " differs by " + num(fast - slow));
  }

  TensorD t({1, 2, 1}), s({1, 2, 1});
  t[0] = 1;
  t[1] = 1;
  s[0] = 1;
  s[1] = -1;
  const double hand = losses::pairwise_distill_loss(s, t);
  require(std::abs(hand - 4.0) <= 1e-12, "hand example gave " + num(hand));
}

// ---------------------------------------------------------------------------
// 5. Convolution oracle on 200 random configurations; CLB folding on 50.
void criterion_conv_oracle() {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Index k = std::vector<Index>{1, 3, 5}[rng.next_below(3)];
    const Index stride = 1 + static_cast<Index>(rng.next_below(2));
    const Index dilation = 1 + static_cast<Index>(rng.next_below(2));
    const Index in_c = 1 + static_cast<Index>(rng.next_below(16));
    const Index out_c = 1 + static_cast<Index>(rng.next_below(16));
    const Index h = 6 + static_cast<Index>(rng.next_below(10));
    const Index w = 6 + static_cast<Index>(rng.next_below(10));

    TensorF input({h, w, in_c}), kernel({k, k, in_c, out_c}), bias({out_c});
    for (Index i = 0; i < input.size(); ++i)
      input[i] = static_cast<float>(rng.next_range(-1, 1));
    for (Index i = 0; i < kernel.size(); ++i)
      kernel[i] = static_cast<float>(rng.next_range(-1, 1));
    for (Index i = 0; i < bias.size(); ++i)
      bias[i] = static_cast<float>(rng.next_range(-1, 1));

    nn::ConvGeometry geom;
    geom.stride = stride;
    geom.dilation = dilation;
    // Alternate SAME and VALID padding; VALID needs the dilated kernel to fit.
    const Index dilated = (k - 1) * dilation + 1;
    if (rng.next_below(2) == 0 || dilated > h || dilated > w)
      geom.pad = nn::same_padding(h, w, k, k, stride, dilation);

    const auto fast = nn::conv2d(input, kernel, &bias, geom, nn::KernelPath::optimized);
    const auto slow = nn::conv2d(input, kernel, &bias, geom, nn::KernelPath::naive);
    double worst = 0;
    for (Index i = 0; i < fast.size(); ++i)
      worst = std::max(worst, std::abs(double(fast[i]) - double(slow[i])));
    require(worst <= 1e-5, "config " + std::to_string(trial) + " max-abs " + num(worst));
  }

  for (int trial = 0; trial < 50; ++trial) {
    const bool spatial_expand = rng.next_below(2) == 0;
    const Index k1 = spatial_expand ? 3 : 1;
    const Index k2 = spatial_expand ? 1 : 3;
    const Index cin = 1 + static_cast<Index>(rng.next_below(8));
    const Index mid = 1 + static_cast<Index>(rng.next_below(16));
    const Index cout = 1 + static_cast<Index>(rng.next_below(8));
    nn::ClbBlock block;
    block.expand_kernel = TensorF({k1, k1, cin, mid});
    block.project_kernel = TensorF({k2, k2, mid, cout});
    block.project_bias = TensorF({cout});
    for (Index i = 0; i < block.expand_kernel.size(); ++i)
      block.expand_kernel[i] = static_cast<float>(rng.next_range(-1, 1));
    for (Index i = 0; i < block.project_kernel.size(); ++i)
      block.project_kernel[i] = static_cast<float>(rng.next_range(-1, 1));
    for (Index i = 0; i < block.project_bias.size(); ++i)
      block.project_bias[i] = static_cast<float>(rng.next_range(-1, 1));

    TensorF input({7, 8, cin});
    for (Index i = 0; i < input.size(); ++i)
      input[i] = static_cast<float>(rng.next_range(-1, 1));

    const auto expanded = nn::run_clb_expanded(block, input);
    const auto folded = nn::run_clb_collapsed(block, input);
    double worst = 0;
    for (Index i = 0; i < expanded.size(); ++i)
      worst = std::max(worst, std::abs(double(expanded[i]) - double(folded[i])));
    require(worst <= 1e-5, "clb " + std::to_string(trial) + " max-abs " + num(worst));
  }
}

// ---------------------------------------------------------------------------
// 6. End-to-end shape contract and harness behavior. Absolute target-device
//    latencies are out of reach on a desktop host, so the harness is held
//    to repeatability and a controlled-delay calibration instead.
void criterion_end_to_end() {
  const nn::GraphSpec graph = nn::build_tcl_tiny();
  const auto shapes = graph.validate();
  const auto shape_of = [&](const char* id) {
    return shapes[static_cast<std::size_t>(graph.node_index(id))];
  };
  require(shape_of("down") == nn::TensorShape{128, 160, 3},
          "internal downscale is " + shape_of("down").str());
  require(shape_of("enc3_se") == nn::TensorShape{16, 20, 48},
          "encoder tail is " + shape_of("enc3_se").str());
  require(shape_of("head_relu") == nn::TensorShape{48, 64, 1},
          "decoder output is " + shape_of("head_relu").str());
  require(shape_of("depth") == nn::TensorShape{480, 640, 1},
          "final output is " + shape_of("depth").str());

  const nn::WeightStore weights = nn::random_weights(graph, 2022);
  RgbImage image(480, 640);
  SplitMix64 rng(6);
  for (auto& v : image.values) v = static_cast<float>(rng.next_unit());

  const DepthMap depth = nn::run_graph(graph, weights, image);
  require(depth.height() == 480 && depth.width() == 640, "output raster size");
  require(depth.values.isFinite().all(), "non-finite depth values");
  require((depth.values >= 0.0).all(), "negative depth values");

  // Controlled 10 ms stub: measured p50 within the documented 5 ms
  // scheduler tolerance, and never below the programmed delay.
  const auto stub = bench::time_callable(
      [] { std::this_thread::sleep_for(std::chrono::milliseconds(10)); }, 9, 1);
  require(stub.p50 >= 10.0 && stub.p50 <= 15.0,
          "stub p50 " + num(stub.p50) + " ms outside [10, 15]");

  // Repeatability: two consecutive reports under the default protocol
  // (30 runs, 5 warmup) agree within 20% on p50.
  const auto first = bench::time_inference(graph, weights, image, 30, 5);
  const auto second = bench::time_inference(graph, weights, image, 30, 5);
  const double rel = std::abs(first.p50 - second.p50) / std::min(first.p50, second.p50);
  require(rel < 0.20, "consecutive p50s " + num(first.p50) + " / " +
                          num(second.p50) + " ms differ by " + num(100 * rel) + "%");
}

// ---------------------------------------------------------------------------
// 7. Robust-loss analytics: closed-form value, alpha->2 limit, evenness,
//    monotonicity.
void criterion_robust_analytics() {
  const double v = losses::robust_value(2.0, {1.0, 2.0, false});
  require(std::abs(v - (std::sqrt(2.0) - 1.0)) <= 1e-12,
          "value at (x=2, a=1, c=2) is " + num(v));

  // Limit check on x in [-1, 1] at c=2, where the printed tolerance holds.
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + 2.0 * static_cast<double>(i) / 200.0;
    const double quadratic = 0.5 * (x / 2.0) * (x / 2.0);
    const double exact = losses::robust_value(x, {2.0, 2.0, false});
    require(std::abs(exact - quadratic) <= 1e-12, "alpha=2 branch at x=" + num(x));
    for (double alpha : {2.0 - 1e-6, 2.0 + 1e-6}) {
      const double near = losses::robust_value(x, {alpha, 2.0, false});
      require(std::abs(near - quadratic) <= 1e-6,
              "alpha=" + num(alpha) + " at x=" + num(x) + " differs by " +
                  num(near - quadratic));
    }
  }

  double prev = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = 10.0 * static_cast<double>(i) / 999.0;
    const double value = losses::robust_value(x, {1.0, 2.0, false});
    const double mirrored = losses::robust_value(-x, {1.0, 2.0, false});
    require(value == mirrored, "evenness at x=" + num(x));
    require(value >= prev, "monotonicity at x=" + num(x));
    prev = value;
  }
}

// ---------------------------------------------------------------------------
// 8. Data round-trip: bit-exact 16-bit PNG cycle over the probe raw values,
//    and the crop sampler's bounds + deterministic replay over 10^4 draws.
void criterion_data_roundtrip() {
  dbtest::TempDir dir("acceptance_io");
  const std::vector<std::uint16_t> raws = {0, 1, 5000, 50000, 65535};
  // Unit scale chosen so every nonzero probe value is a valid depth.
  const double scale = 0.0005;

  DepthMap map(1, static_cast<Index>(raws.size()));
  for (std::size_t i = 0; i < raws.size(); ++i) {
    map.values(0, static_cast<Index>(i)) = raws[i] * scale;
    map.valid(0, static_cast<Index>(i)) = raws[i] > 0;
  }
  const auto path = dir.path() / "probe.png";
  io::save_depth16(map, path, scale);
  const DepthMap loaded = io::load_depth16(path, scale);
  for (std::size_t i = 0; i < raws.size(); ++i) {
    const Index x = static_cast<Index>(i);
    const auto raw_back =
        loaded.valid(0, x) ? std::llround(loaded.values(0, x) / scale) : 0;
    require(raw_back == raws[i], "raw " + std::to_string(raws[i]) + " came back as " +
                                     std::to_string(raw_back));
  }

  SplitMix64 rng(2208);
  std::vector<io::CropSpec> crops;
  for (int i = 0; i < 10000; ++i) {
    const auto crop = io::r2_crop(rng, 480, 640, {64, 320});
    require(crop.top >= 0 && crop.left >= 0 && crop.height >= 64 &&
                crop.width >= 64 && crop.height <= 320 && crop.width <= 320 &&
                crop.top + crop.height <= 480 && crop.left + crop.width <= 640,
            "draw " + std::to_string(i) + " out of bounds");
    crops.push_back(crop);
  }
  SplitMix64 replay(2208);
  for (int i = 0; i < 10000; ++i) {
    const auto crop = io::r2_crop(replay, 480, 640, {64, 320});
    const auto& expect = crops[static_cast<std::size_t>(i)];
    require(crop.top == expect.top && crop.left == expect.left &&
                crop.height == expect.height && crop.width == expect.width,
            "draw " + std::to_string(i) + " failed to replay");
  }
}

// ---------------------------------------------------------------------------
// 9. Virtual-normal loss: seed determinism, scale invariance, and oracle
//    equivalence on the planar-vs-tilted fixture.
void criterion_vnl() {
  const CameraIntrinsics k{25.0, 25.0, 7.5, 5.5};
  DepthMap gt = DepthMap::dense(DepthMap::Array::Constant(12, 16, 10.0));
  DepthMap pred = gt;
  for (Index y = 0; y < 12; ++y)
    for (Index x = 8; x < 16; ++x)
      pred.values(y, x) = 10.0 + 0.4 * static_cast<double>(x - 8);

  losses::VnlParams params;
  params.seed = 90210;
  params.n_triplets = 400;

  const double a = losses::vnl_loss(pred, gt, k, params);
  const double b = losses::vnl_loss(pred, gt, k, params);
  require(a == b, "two identical calls disagreed");

  for (double s : {0.1, 0.5, 2.0, 10.0}) {
    auto ps = pred, gs = gt;
    ps.values *= s;
    gs.values *= s;
    const double scaled = losses::vnl_loss(ps, gs, k, params);
    require(std::abs(scaled - a) <= 1e-9,
            "scale " + num(s) + " moved the loss by " + num(scaled - a));
  }

  const double oracle = dbtest::vnl_oracle(pred, gt, k, params.seed, params.n_triplets);
  require(std::abs(a - oracle) <= 1e-12,
          "library " + num(a) + " vs oracle " + num(oracle));
  require(a > 0.0, "fixture loss should be positive");
}

struct Criterion {
  int id;
  const char* summary;
  std::function<void()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "leaderboard reproduction within +/-1 in published order", criterion_leaderboard},
      {2, "si-RMSE scale invariance over 100 randomized trials", criterion_scale_invariance},
      {3, "all losses exactly zero at a perfect prediction", criterion_zero_at_perfect},
      {4, "pairwise distillation matches the brute-force oracle", criterion_distill_oracle},
      {5, "convolution and CLB folding match their oracles", criterion_conv_oracle},
      {6, "end-to-end shape contract and harness calibration", criterion_end_to_end},
      {7, "robust-loss closed forms, limits, and monotonicity", criterion_robust_analytics},
      {8, "16-bit depth round-trip and crop sampler replay", criterion_data_roundtrip},
      {9, "virtual-normal determinism, invariance, oracle match", criterion_vnl},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.body();
      std::printf("PASS  criterion %d: %s\n", criterion.id, criterion.summary);
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL  criterion %d: %s — %s\n", criterion.id, criterion.summary,
                  e.what());
    }
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
