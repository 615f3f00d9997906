#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "depthbench/losses.hpp"
#include "test_util.hpp"

using namespace depthbench;
using dbtest::make_map;

TEST_CASE("silog examples") {
  losses::SilogParams params;  // alpha 10, lambda 0.85
  auto gt = make_map(2, 2, {1.0, 2.0, 3.0, 4.0});
  CHECK(losses::silog_loss(gt, gt, params) == 0.0);

  // pred = e * gt makes every log error exactly 1.
  auto scaled = gt;
  scaled.values *= std::exp(1.0);
  CHECK(losses::silog_loss(scaled, gt, params) ==
        doctest::Approx(10.0 * std::sqrt(1.0 - 0.85)).epsilon(1e-9));

  SUBCASE("full scale invariance at lambda 1") {
    losses::SilogParams full{10.0, 1.0};
    for (double s : {0.2, 1.0, 3.0, 9.5}) {
      auto p = gt;
      p.values *= s;
      CHECK(std::abs(losses::silog_loss(p, gt, full)) < 1e-9);
    }
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(losses::silog_loss(gt, gt, losses::SilogParams{0.0, 0.5}),
                    ConfigError);
    CHECK_THROWS_AS(losses::silog_loss(gt, gt, losses::SilogParams{1.0, 1.5}),
                    ConfigError);
  }
  SUBCASE("non-positive depth") {
    auto bad = make_map(2, 2, {1.0, -2.0, 3.0, 4.0});
    CHECK_THROWS_AS(losses::silog_loss(bad, gt, params), NonPositiveDepthError);
  }
}

TEST_CASE("gradient loss examples") {
  auto gt = make_map(1, 3, {1.0, 2.0, 3.0});
  CHECK(losses::gradient_loss(gt, gt) == 0.0);

  auto shifted = gt;
  shifted.values += 4.2;
  CHECK(losses::gradient_loss(shifted, gt) == 0.0);

  // Forward diffs: pred (2, 0) vs gt (1, 1) -> (1 + 1) / 2.
  auto pred = make_map(1, 3, {1.0, 3.0, 3.0});
  CHECK(losses::gradient_loss(pred, gt) == doctest::Approx(1.0));

  SUBCASE("constant offset on pred alone") {
    SplitMix64 rng(5);
    auto a = dbtest::random_map(rng, 6, 6, 1.0, 20.0, 0.1);
    auto b = dbtest::random_map(rng, 6, 6, 1.0, 20.0, 0.1);
    const double base = losses::gradient_loss(a, b);
    auto lifted = a;
    lifted.values += 7.0;
    CHECK(losses::gradient_loss(lifted, b) == doctest::Approx(base).epsilon(1e-12));
  }
  SUBCASE("no computable differences") {
    auto lone = make_map(2, 2, {1, 1, 1, 1}, {true, false, false, false});
    CHECK_THROWS_AS(losses::gradient_loss(lone, lone), EmptyMaskError);
  }
  SUBCASE("mask gaps reduce the term count") {
    // Valid: (0,0), (0,2) in a 1x3 row - no adjacent pair, so no terms.
    auto gappy = make_map(1, 3, {1, 9, 2}, {true, false, true});
    CHECK_THROWS_AS(losses::gradient_loss(gappy, gappy), EmptyMaskError);
  }
}

TEST_CASE("robust loss analytics") {
  losses::RobustParams p1{1.0, 2.0, false};

  CHECK(losses::robust_value(0.0, p1) == 0.0);
  CHECK(losses::robust_value(2.0, p1) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));

  SUBCASE("alpha 2 analytic limit") {
    for (double x = -1.0; x <= 1.0; x += 0.01) {
      const double exact = losses::robust_value(x, {2.0, 2.0, false});
      CHECK(exact == doctest::Approx(0.5 * (x / 2.0) * (x / 2.0)).epsilon(1e-12));
      const double above = losses::robust_value(x, {2.0 + 1e-6, 2.0, false});
      const double below = losses::robust_value(x, {2.0 - 1e-6, 2.0, false});
      CHECK(std::abs(above - exact) < 1e-6);
      CHECK(std::abs(below - exact) < 1e-6);
    }
  }
  SUBCASE("alpha 0 analytic limit") {
    for (double x : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
      const double u = (x / 2.0) * (x / 2.0);
      CHECK(losses::robust_value(x, {0.0, 2.0, false}) ==
            doctest::Approx(std::log1p(0.5 * u)).epsilon(1e-12));
      CHECK(losses::robust_value(x, {1e-7, 2.0, false}) ==
            doctest::Approx(std::log1p(0.5 * u)).epsilon(1e-5));
    }
  }
  SUBCASE("even and non-decreasing in |x|") {
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = 10.0 * static_cast<double>(i) / 999.0;
      const double v = losses::robust_value(x, p1);
      CHECK(v == losses::robust_value(-x, p1));
      CHECK(v >= prev);
      prev = v;
    }
  }
  SUBCASE("as-printed audit mode") {
    losses::RobustParams printed{1.0, 2.0, true};
    CHECK(losses::robust_value(0.0, printed) == doctest::Approx(-1.0));
    CHECK(losses::robust_value(2.0, printed) == doctest::Approx(0.0));
    CHECK_THROWS_AS(losses::robust_value(1.0, {2.0, 2.0, true}), DomainError);
    CHECK_THROWS_AS(losses::robust_value(1.0, {0.0, 2.0, true}), DomainError);
  }
  SUBCASE("scale must be positive") {
    CHECK_THROWS_AS(losses::robust_value(1.0, {1.0, 0.0, false}), ConfigError);
  }
  SUBCASE("tensor mean") {
    TensorD residual({4});
    residual[0] = 0.0;
    residual[1] = 2.0;
    residual[2] = -2.0;
    residual[3] = 0.0;
    CHECK(losses::robust_loss(residual, p1) ==
          doctest::Approx((std::sqrt(2.0) - 1.0) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("combined depth loss") {
  SplitMix64 rng(77);
  auto gt = dbtest::random_map(rng, 8, 8, 1.0, 20.0, 0.0);
  auto pred = dbtest::random_map(rng, 8, 8, 1.0, 20.0, 0.0);
  const CameraIntrinsics k{10.0, 10.0, 3.5, 3.5};

  losses::DepthLossParams params;
  params.vnl.seed = 99;
  params.vnl.n_triplets = 200;

  SUBCASE("zero at perfect prediction") {
    CHECK(losses::depth_loss(gt, gt, k, {}, params) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("projects onto silog with unit weight") {
    losses::DepthLossWeights w{1.0, 0.0, 0.0, 0.0, 10.0};
    CHECK(losses::depth_loss(pred, gt, k, w, params) ==
          doctest::Approx(losses::silog_loss(pred, gt, params.silog)).epsilon(1e-15));
  }
  SUBCASE("default weights sum independent terms") {
    const auto terms = losses::depth_loss_terms(pred, gt, k, {}, params);
    const double expected = 1.0 * losses::silog_loss(pred, gt, params.silog) +
                            0.25 * losses::gradient_loss(pred, gt) +
                            2.5 * losses::vnl_loss(pred, gt, k, params.vnl) +
                            0.6 * losses::robust_loss(losses::log_residuals(pred, gt),
                                                      params.robust);
    CHECK(std::abs(terms.total - expected) < 1e-12);
  }
  SUBCASE("negative weights rejected") {
    losses::DepthLossWeights w;
    w.w_vnl = -1.0;
    CHECK_THROWS_AS(losses::depth_loss(pred, gt, k, w, params), ConfigError);
  }
}

TEST_CASE("stage-2 loss arithmetic") {
  CHECK(losses::stage2_loss(0.7, 0.0) == doctest::Approx(0.7));
  CHECK(losses::stage2_loss(0.5, 0.1, 10.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(losses::stage2_loss(0.5, 0.1, -1.0), ConfigError);

  SplitMix64 rng(123);
  for (int i = 0; i < 50; ++i) {
    const double depth_term = rng.next_range(0.0, 5.0);
    const double distill_term = rng.next_range(0.0, 2.0);
    const double w = rng.next_range(0.0, 20.0);
    CHECK(std::abs(losses::stage2_loss(depth_term, distill_term, w) -
                   (depth_term + w * distill_term)) < 1e-12);
  }
}

TEST_CASE("log residual extraction") {
  auto gt = make_map(1, 3, {1.0, 2.0, 4.0}, {true, false, true});
  auto pred = make_map(1, 3, {2.0, 2.0, 4.0});
  const auto residuals = losses::log_residuals(pred, gt);
  REQUIRE(residuals.size() == 2);
  CHECK(residuals[0] == doctest::Approx(std::log(2.0)));
  CHECK(residuals[1] == doctest::Approx(0.0));
}
