// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "gap/errors.hpp"
#include "gap/synth.hpp"

using namespace gap;

namespace {

double mean_error_sec(const SynthDataset& d) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : d.videos)
    for (double e : boundary_errors(v, v.predictions)) {
      sum += e * v.predictions.grid.seconds_per_snippet();
      ++n;
    }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("noiseless curves peak at the rounded boundary") {
  SynthScenario s;
  s.num_videos = 50;
  s.seed = 7;
  const auto d = generate_at(s, 100);
  REQUIRE(d.videos.size() == 50);
  for (const auto& v : d.videos) {
    const auto& p = v.predictions;
    REQUIRE(p.start_curve);
    CHECK(p.start_curve->values.size() == 100);
    CHECK(p.start_curve->values.maxCoeff() == doctest::Approx(1.0));
    for (const auto& g : v.ground_truth) {
      const auto [a, b] = downsample_gt(g, p.grid);
      const auto ia = static_cast<Eigen::Index>(std::round(a));
      const auto ib = static_cast<Eigen::Index>(std::round(b));
      CHECK(p.start_curve->values(ia) >= p.start_curve->values(ia - 1));
      CHECK(p.start_curve->values(ia) >= p.start_curve->values(ia + 1));
      CHECK(p.end_curve->values(ib) >= p.end_curve->values(ib - 1));
      CHECK(p.end_curve->values(ib) >= p.end_curve->values(ib + 1));
    }
  }
}

TEST_CASE("instances are ordered, separated and inside the video") {
  SynthScenario s;
  s.num_videos = 200;
  s.instances_per_video = {1, 4};
  s.snippet_counts = {25, 100};
  for (const auto& v : generate_at(s, 25).videos) {
    const double step = v.predictions.grid.seconds_per_snippet();
    double prev = 0.0;
    for (const auto& g : v.ground_truth) {
      CHECK(g.start_sec - prev >= 2.0 * step - 1e-9);
      CHECK(g.end_sec - g.start_sec >= 2.0 * step - 1e-9);
      prev = g.end_sec;
    }
    CHECK(v.predictions.grid.duration_sec() - prev >= 2.0 * step - 1e-9);
  }
}

TEST_CASE("same seed gives the same data; ground truth does not depend on T") {
  SynthScenario s;
  s.num_videos = 20;
  s.noise_std = 0.1;
  s.seed = 99;
  s.distractors_per_video = 3;
  const auto a = generate_at(s, 50);
  const auto b = generate_at(s, 50);
  const auto c = generate_at(s, 200);
  for (std::size_t i = 0; i < a.videos.size(); ++i) {
    CHECK(a.videos[i].predictions.start_curve->values == b.videos[i].predictions.start_curve->values);
    CHECK(a.videos[i].predictions.proposals.size() == a.videos[i].ground_truth.size() + 3);
    REQUIRE(a.videos[i].ground_truth.size() == c.videos[i].ground_truth.size());
    for (std::size_t j = 0; j < a.videos[i].ground_truth.size(); ++j) {
      CHECK(a.videos[i].ground_truth[j].start_sec == c.videos[i].ground_truth[j].start_sec);
      CHECK(a.videos[i].ground_truth[j].label == c.videos[i].ground_truth[j].label);
    }
  }
  s.seed = 100;
  CHECK(generate_at(s, 50).videos[0].ground_truth[0].start_sec !=
        a.videos[0].ground_truth[0].start_sec);
}

TEST_CASE("baseline error in seconds scales with the snippet length") {
  SynthScenario s;
  s.num_videos = 1000;
  s.seed = 3;
  s.snippet_counts = {25, 100};
  const auto sets = generate(s);
  const double coarse = mean_error_sec(sets[0]);
  const double fine = mean_error_sec(sets[1]);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("infeasible scenarios are rejected") {
  SynthScenario s;
  s.duration_range_sec = {10.0, 10.0};
  s.instances_per_video = {20, 20};
  s.snippet_counts = {25};
  CHECK_THROWS_AS(generate_at(s, 25), ConfigError);
  SynthScenario bad;
  bad.snippet_counts = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SynthScenario{};
  bad.curve_sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sweep covers every cell and GAP is exact on noiseless unsmoothed curves") {
  SynthScenario s;
  s.num_videos = 40;
  s.snippet_counts = {25, 100};
  RefinementConfig cfg;
  const auto rows = run_sweep(s, cfg);
  CHECK(rows.size() == 2 * 3 * 3);
  for (const auto& r : rows) {
    if (!r.gap) {
      CHECK(r.boundary_mae_snippets > 0.1);
    } else if (!r.smoothing) {
      CHECK(r.boundary_mae_snippets <= 1e-9);
      CHECK(r.average_map == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("to_detections converts to seconds") {
  SynthScenario s;
  s.num_videos = 3;
  const auto d = generate_at(s, 100);
  std::vector<VideoPredictions> vs;
  for (const auto& v : d.videos) vs.push_back(v.predictions);
  const auto dets = to_detections(vs);
  const auto gts = to_ground_truth(d);
  CHECK(dets.size() == 3);
  CHECK(gts.size() == 3);
  const auto& v0 = d.videos[0].predictions;
  CHECK(dets.at("synth_0").size() == v0.proposals.size());
  for (const auto& det : dets.at("synth_0")) CHECK(det.segment.end <= v0.grid.duration_sec() + 1e-9);
}
