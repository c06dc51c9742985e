// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "gap/curve_refine.hpp"
#include "gap/errors.hpp"
#include "gap/gt_calibration.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace gap;

TEST_CASE("downsample_gt examples") {
  const GroundTruthInstance gt{12.4, 37.2, "a"};
  auto [s1, e1] = downsample_gt(gt, TemporalGrid::from_seconds(100.0, 100));
  CHECK(s1 == doctest::Approx(12.4));
  CHECK(e1 == doctest::Approx(37.2));
  const auto g25 = TemporalGrid::from_seconds(100.0, 25);
  auto [s2, e2] = downsample_gt(gt, g25);
  CHECK(s2 == doctest::Approx(3.1).epsilon(1e-15));
  CHECK(e2 == doctest::Approx(9.3).epsilon(1e-15));
  CHECK(to_seconds({s2}, g25) == doctest::Approx(12.4).epsilon(1e-15));
  auto [s3, e3] = downsample_gt({0.0, 100.0, "a"}, g25);
  CHECK(s3 == 0.0);
  CHECK(e3 == 25.0);
  CHECK_THROWS_AS(downsample_gt({5.0, 5.0, "a"}, g25), ParameterError);
  CHECK_THROWS_AS(downsample_gt({5.0, 101.0, "a"}, g25), ParameterError);
}

TEST_CASE("quantize_point") {
  for (auto m : {QuantizeMode::floor, QuantizeMode::ceil, QuantizeMode::round})
    CHECK(quantize_point(4.0, m) == 4);
  CHECK(quantize_point(4.7, QuantizeMode::floor) == 4);
  CHECK(quantize_point(4.7, QuantizeMode::ceil) == 5);
  CHECK(quantize_point(4.7, QuantizeMode::round) == 5);
  CHECK(quantize_point(3.5, QuantizeMode::round) == 4);
  CHECK(quantize_point(2.5, QuantizeMode::round) == 3);
  CHECK_THROWS_AS(quantize_point(-0.1, QuantizeMode::floor), RangeError);
}

TEST_CASE("synthesize_heatmap") {
  SUBCASE("integer centre") {
    const auto hm = synthesize_heatmap(5.0, 11, 2.0);
    CHECK(hm.values(5) == 1.0);
    for (int k = 1; k <= 5; ++k) {
      CHECK(hm.values(5 + k) == doctest::Approx(std::exp(-k * k / 8.0)).epsilon(1e-15));
      CHECK(hm.values(5 - k) == doctest::Approx(std::exp(-k * k / 8.0)).epsilon(1e-15));
    }
  }
  SUBCASE("half-integer centre is symmetric") {
    const auto hm = synthesize_heatmap(5.5, 11, 2.0);
    CHECK(hm.values(5) == hm.values(6));
    CHECK(hm.values.maxCoeff() == 1.0);
  }
  SUBCASE("wide sigma on a short grid") {
    const auto hm = synthesize_heatmap(2.2, 5, 100.0);
    Eigen::Index arg;
    hm.values.maxCoeff(&arg);
    CHECK(arg == 2);
    CHECK(hm.values.minCoeff() > 0.999);
  }
  SUBCASE("tails stay positive") {
    const auto hm = synthesize_heatmap(0.0, 400, 2.0);
    CHECK(hm.values.minCoeff() > 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(synthesize_heatmap(-0.5, 10, 1.0), RangeError);
    CHECK_THROWS_AS(synthesize_heatmap(9.5, 10, 1.0), RangeError);
    CHECK_THROWS_AS(synthesize_heatmap(3.0, 10, 0.0), ParameterError);
  }
}

TEST_CASE("make_training_targets") {
  const auto g25 = TemporalGrid::from_seconds(100.0, 25);
  SUBCASE("integer positions: both variants agree") {
    const GroundTruthInstance gt{12.0, 40.0, "a"};
    for (auto m : {QuantizeMode::floor, QuantizeMode::ceil, QuantizeMode::round}) {
      const auto a = make_training_targets(gt, g25, 2.0, true, m);
      const auto b = make_training_targets(gt, g25, 2.0, false, m);
      CHECK(a.start.values == b.start.values);
      CHECK(a.end.values == b.end.values);
      CHECK(b.start_error == 0.0);
    }
  }
  SUBCASE("floor drops the fractional part") {
    const auto t = make_training_targets({12.4, 37.2, "a"}, g25, 2.0, false, QuantizeMode::floor);
    CHECK(t.start.center == 3.0);
    CHECK(t.start_error == doctest::Approx(0.1));
  }
  SUBCASE("ceil") {
    const auto t = make_training_targets({12.4, 37.2, "a"}, g25, 2.0, false, QuantizeMode::ceil);
    CHECK(t.end.center == 10.0);
    CHECK(t.end_error == doctest::Approx(0.7));
  }
  SUBCASE("calibrated keeps the continuous centre") {
    const auto t = make_training_targets({12.4, 37.2, "a"}, g25, 2.0, true, QuantizeMode::floor);
    CHECK(t.start.center == doctest::Approx(3.1));
    CHECK(t.end.center == doctest::Approx(9.3));
    CHECK(t.start_error == 0.0);
  }
}

TEST_CASE("refining calibrated targets recovers the exact centre; quantized ones keep the offset") {
  gen::Rng rng(21);
  RefinementConfig cfg;
  cfg.smoothing_enabled = false;
  for (int i = 0; i < 1000; ++i) {
    const double duration = gen::uniform(rng, 30.0, 300.0);
    const auto grid = TemporalGrid::from_seconds(duration, 100);
    const double start = gen::uniform(rng, 0.05, 0.45) * duration;
    const double end = gen::uniform(rng, 0.55, 0.95) * duration;
    const GroundTruthInstance gt{start, end, "a"};
    const auto [s, e] = downsample_gt(gt, grid);
    const auto mode = static_cast<QuantizeMode>(gen::uniform_int(rng, 0, 2));

    const auto cal = make_training_targets(gt, grid, 2.0, true, mode);
    const auto q = make_training_targets(gt, grid, 2.0, false, mode);
    const double init = std::round(s);
    CHECK(std::abs(refine_boundary(cal.start.values, init, cfg).position - s) <= 1e-6);
    CHECK(std::abs(refine_boundary(cal.end.values, std::round(e), cfg).position - e) <= 1e-6);
    const double residual = std::abs(refine_boundary(q.start.values, init, cfg).position - s);
    CHECK(std::abs(residual - q.start_error) <= 1e-6);
  }
}

TEST_CASE("mean quantization error of uniform positions") {
  const std::size_t n = 100000;
  gen::Rng rng(22);
  double sum_round = 0.0, sum_floor = 0.0, sum_ceil = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = gen::uniform(rng, 0.0, 50.0);
    sum_round += std::abs(g - quantize_point(g, QuantizeMode::round));
    sum_floor += std::abs(g - quantize_point(g, QuantizeMode::floor));
    sum_ceil += std::abs(g - quantize_point(g, QuantizeMode::ceil));
  }
  CHECK(sum_round / n == doctest::Approx(0.25).epsilon(0.02));
  CHECK(sum_floor / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(sum_ceil / n == doctest::Approx(0.5).epsilon(0.02));
  // Cross-check against the oracle stream.
  const double mc = oracle::monte_carlo_quantization([](double x) { return std::round(x); }, n, 23);
  CHECK(sum_round / n == doctest::Approx(mc).epsilon(0.02));
}
