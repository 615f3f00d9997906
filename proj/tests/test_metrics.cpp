#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "depthbench/metrics.hpp"
#include "test_util.hpp"

using namespace depthbench;
using dbtest::make_map;

namespace {

struct PublishedRow {
  const char* name;
  double si_rmse;
  double runtime_ms;
  long long score;
};

// MAI 2022 final leaderboard (si-RMSE, Raspberry Pi runtime, integer score).
constexpr PublishedRow kPublishedRows[] = {
    {"TCL", 0.2773, 46, 298},          {"AIIA HIT", 0.311, 37, 232},
    {"MiAIgo", 0.299, 54, 188},        {"Tencent GY-Lab", 0.303, 68, 141},
    {"Tencent GY-Lab*", 0.2836, 103, 122}, {"SmartLab", 0.3296, 65, 102},
    {"JMU-CVLab", 0.3498, 139, 36},    {"ICL", 0.338, 142, 42},
};

}  // namespace

TEST_CASE("rmse examples") {
  auto gt = make_map(1, 2, {1.0, 3.0});
  CHECK(metrics::rmse(gt, gt) == 0.0);

  auto shifted = make_map(1, 2, {2.0, 4.0});
  CHECK(metrics::rmse(shifted, gt) == doctest::Approx(1.0));

  auto pred = make_map(1, 2, {2.0, 5.0});
  CHECK(metrics::rmse(pred, gt) == doctest::Approx(std::sqrt(2.5)));
}

TEST_CASE("si_rmse examples") {
  auto gt = make_map(1, 2, {1.0, 1.0});
  CHECK(metrics::si_rmse(gt, gt) == 0.0);

  auto scaled = make_map(1, 2, {3.7, 3.7});
  CHECK(metrics::si_rmse(scaled, gt) == doctest::Approx(0.0).epsilon(1e-12));

  // log errors (0, ln 2) -> std dev ln(2)/2
  auto pred = make_map(1, 2, {1.0, 2.0});
  CHECK(metrics::si_rmse(pred, gt) == doctest::Approx(std::log(2.0) / 2.0));

  auto zero = make_map(1, 2, {0.0, 1.0});
  CHECK_THROWS_AS(metrics::si_rmse(zero, gt), NonPositiveDepthError);
}

TEST_CASE("log10 and rel examples") {
  auto gt = make_map(1, 2, {1.0, 1.0});
  CHECK(metrics::log10_err(gt, gt) == 0.0);
  auto decade = make_map(1, 2, {10.0, 10.0});
  CHECK(metrics::log10_err(decade, gt) == doctest::Approx(1.0));
  auto split = make_map(1, 2, {10.0, 0.1});
  CHECK(metrics::log10_err(split, gt) == doctest::Approx(1.0));

  auto gt2 = make_map(1, 2, {2.0, 4.0});
  CHECK(metrics::rel_err(gt2, gt2) == 0.0);
  auto prop = make_map(1, 2, {3.0, 6.0});
  CHECK(metrics::rel_err(prop, gt2) == doctest::Approx(0.5));
  auto mixed = make_map(1, 2, {1.0, 6.0});
  CHECK(metrics::rel_err(mixed, gt2) == doctest::Approx(0.5));
}

TEST_CASE("metric symmetry") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = dbtest::random_map(rng, 6, 7, 0.5, 30.0, 0.1);
    auto b = dbtest::random_map(rng, 6, 7, 0.5, 30.0, 0.1);
    b.valid = a.valid;  // shared support
    CHECK(metrics::rmse(a, b) == doctest::Approx(metrics::rmse(b, a)).epsilon(1e-12));
    CHECK(metrics::si_rmse(a, b) ==
          doctest::Approx(metrics::si_rmse(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("si_rmse scale invariance over randomized trials") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto gt = dbtest::random_map(rng, 8, 9, 0.5, 40.0, 0.15);
    auto pred = dbtest::random_map(rng, 8, 9, 0.5, 40.0, 0.15);
    const double s = rng.next_range(0.1, 10.0);
    auto scaled = pred;
    scaled.values *= s;
    const double base = metrics::si_rmse(pred, gt);
    const double after = metrics::si_rmse(scaled, gt);
    CHECK(std::abs(after - base) < 1e-9);
  }
}

TEST_CASE("final_score examples and errors") {
  const double c = metrics::calibrate_c(0.2773, 46.0, 298.0);
  const metrics::ScoreParams params{20.0, c};

  CHECK(std::abs(metrics::final_score(0.2773, 46.0, params) - 298.0) <= 1.0);
  CHECK(std::abs(metrics::final_score(0.311, 37.0, params) - 232.0) <= 1.0);

  const metrics::ScoreParams unit{20.0, 1.0};
  CHECK(metrics::final_score(0.0, 1.0, unit) == doctest::Approx(1.0));

  CHECK_THROWS_AS(metrics::final_score(0.3, 0.0, params), DomainError);
  CHECK_THROWS_AS(metrics::final_score(0.3, -5.0, params), DomainError);
  CHECK_THROWS_AS(metrics::final_score(0.3, 10.0, metrics::ScoreParams{20.0, 0.0}),
                  DomainError);
}

TEST_CASE("calibrate_c inverts final_score") {
  const double c = metrics::calibrate_c(0.2773, 46.0, 298.0);
  CHECK(c == doctest::Approx(1.562e-6).epsilon(1e-3));

  // Round trip at 1e-9 relative.
  const double score = metrics::final_score(0.2773, 46.0, metrics::ScoreParams{20.0, c});
  CHECK(std::abs(score - 298.0) / 298.0 < 1e-9);

  // Cross-row consistency: an independently derived C agrees within 2%.
  const double c2 = metrics::calibrate_c(0.311, 37.0, 232.0);
  CHECK(std::abs(c2 - c) / c < 0.02);
}

TEST_CASE("published leaderboard reproduces within one point with exact order") {
  const metrics::ScoreParams params{20.0, metrics::default_normalization_c()};
  std::vector<metrics::LeaderboardRow> rows;
  for (const auto& row : kPublishedRows)
    rows.push_back({row.name, row.si_rmse, row.runtime_ms, 0.0, 0});
  metrics::rank_leaderboard(rows, params);

  for (const auto& row : rows) {
    const auto* published = std::find_if(
        std::begin(kPublishedRows), std::end(kPublishedRows),
        [&](const PublishedRow& p) { return row.name == p.name; });
    REQUIRE(published != std::end(kPublishedRows));
    CHECK(std::abs(row.score - static_cast<double>(published->score)) <= 1.0);
  }

  // Computed ranking must equal the ranking of the published scores.
  std::vector<PublishedRow> by_published(std::begin(kPublishedRows),
                                         std::end(kPublishedRows));
  std::stable_sort(by_published.begin(), by_published.end(),
                   [](const PublishedRow& a, const PublishedRow& b) {
                     return a.score > b.score;
                   });
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].name == by_published[i].name);
}

TEST_CASE("final_score is strictly monotonic") {
  const metrics::ScoreParams params{20.0, metrics::default_normalization_c()};
  SplitMix64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const double si = rng.next_range(0.05, 0.6);
    const double rt = rng.next_range(5.0, 200.0);
    const double d_si = rng.next_range(1e-6, 0.1);
    const double d_rt = rng.next_range(1e-3, 50.0);
    CHECK(metrics::final_score(si + d_si, rt, params) <
          metrics::final_score(si, rt, params));
    CHECK(metrics::final_score(si, rt + d_rt, params) <
          metrics::final_score(si, rt, params));
  }
}

TEST_CASE("pixel-pooled batch equals concatenated multiset") {
  SplitMix64 rng(31);
  metrics::BatchEvaluator batch;
  std::vector<double> all_pred, all_gt;
  for (int image = 0; image < 3; ++image) {
    auto gt = dbtest::random_map(rng, 5, 6, 0.5, 30.0, 0.2);
    auto pred = dbtest::random_map(rng, 5, 6, 0.5, 30.0, 0.2);
    batch.add("img" + std::to_string(image), pred, gt);
    const auto vi = validity_intersection(pred, gt);
    for (Index y = 0; y < 5; ++y)
      for (Index x = 0; x < 6; ++x)
        if (vi.mask(y, x)) {
          all_pred.push_back(pred.values(y, x));
          all_gt.push_back(gt.values(y, x));
        }
  }
  const auto n = static_cast<Index>(all_pred.size());
  const auto pooled = batch.report().aggregate;
  const auto direct_pred = make_map(1, n, all_pred);
  const auto direct_gt = make_map(1, n, all_gt);
  CHECK(pooled.rmse ==
        doctest::Approx(metrics::rmse(direct_pred, direct_gt)).epsilon(1e-12));
  CHECK(pooled.si_rmse ==
        doctest::Approx(metrics::si_rmse(direct_pred, direct_gt)).epsilon(1e-12));
  CHECK(pooled.log10 ==
        doctest::Approx(metrics::log10_err(direct_pred, direct_gt)).epsilon(1e-12));
  CHECK(pooled.rel ==
        doctest::Approx(metrics::rel_err(direct_pred, direct_gt)).epsilon(1e-12));
  CHECK(pooled.n_valid == n);
}

TEST_CASE("non-positive predictions are floored and counted") {
  auto gt = make_map(1, 3, {2.0, 2.0, 2.0});
  auto pred = make_map(1, 3, {2.0, -1.0, 0.0});
  metrics::MetricSums sums;
  sums.add(pred, gt);
  const auto result = sums.finalize();
  CHECK(result.n_clamped == 2);
  CHECK(result.n_valid == 3);
  CHECK(std::isfinite(result.si_rmse));
  // RMSE keeps the raw prediction.
  CHECK(result.rmse == doctest::Approx(std::sqrt((0.0 + 9.0 + 4.0) / 3.0)));
}

TEST_CASE("per-image-mean aggregation averages image metrics") {
  auto gt = make_map(1, 2, {1.0, 1.0});
  auto p1 = make_map(1, 2, {2.0, 2.0});  // rmse 1
  auto p2 = make_map(1, 2, {4.0, 4.0});  // rmse 3
  metrics::BatchEvaluator batch(metrics::Aggregation::per_image_mean);
  batch.add("a", p1, gt);
  batch.add("b", p2, gt);
  CHECK(batch.report().aggregate.rmse == doctest::Approx(2.0));

  metrics::BatchEvaluator pooled(metrics::Aggregation::pixel_pooled);
  pooled.add("a", p1, gt);
  pooled.add("b", p2, gt);
  CHECK(pooled.report().aggregate.rmse == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("report serialization carries schema and column order") {
  auto gt = make_map(1, 2, {1.0, 2.0});
  metrics::BatchEvaluator batch;
  batch.add("img1", gt, gt);
  const auto report = batch.report();

  const std::string csv = metrics::report_to_csv(report);
  CHECK(csv.rfind("# depthbench-eval v1\n", 0) == 0);
  CHECK(csv.find("image_id,rmse,si_rmse,log10,rel,n_valid\n") != std::string::npos);
  CHECK(csv.find("img1,0,0,0,0,2\n") != std::string::npos);
  CHECK(csv.find("ALL,0,0,0,0,2\n") != std::string::npos);

  const std::string json = metrics::report_to_json(report);
  CHECK(json.find("depthbench-eval/1") != std::string::npos);
  CHECK(json.find("pixel_pooled") != std::string::npos);
}
