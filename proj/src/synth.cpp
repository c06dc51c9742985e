// SPDX-License-Identifier: Apache-2.0
#include "gap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gap/errors.hpp"

namespace gap {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t video, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(video), static_cast<std::uint32_t>(video >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kGroundTruthSalt = 0x67745f7374726dULL;

std::int64_t coarsest(const SynthScenario& s) {
  return *std::min_element(s.snippet_counts.begin(), s.snippet_counts.end());
}

struct DrawnVideo {
  double duration;
  std::vector<GroundTruthInstance> instances;
  std::vector<double> scores;
  std::vector<GroundTruthInstance> distractors;  // label + normalized [0,1] extent
  std::vector<double> distractor_scores;
};

DrawnVideo draw_video(const SynthScenario& s, std::size_t index) {
  auto rng = stream(s.seed, index, kGroundTruthSalt);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(s.instances_per_video.first,
                                           s.instances_per_video.second);
  std::uniform_int_distribution<int> label(0, s.num_classes - 1);

  DrawnVideo v;
  v.duration = s.duration_range_sec.first +
               unit(rng) * (s.duration_range_sec.second - s.duration_range_sec.first);
  const int k = count(rng);
  const double step = v.duration / static_cast<double>(coarsest(s));
  const double gap = s.min_separation_snippets * step;
  const int n_bounds = 2 * k;
  const double slack = v.duration - 2.0 * gap - (n_bounds - 1) * gap;
  if (slack <= 0.0)
    throw ConfigError("video " + std::to_string(index) + " cannot fit " + std::to_string(k) +
                      " instances with the requested separation");

  // Uniform draw over the feasible boundary configurations.
  std::vector<double> u(n_bounds);
  for (double& x : u) x = unit(rng) * slack;
  std::sort(u.begin(), u.end());
  for (int j = 0; j < k; ++j) {
    const double s0 = gap + u[2 * j] + (2 * j) * gap;
    const double e0 = gap + u[2 * j + 1] + (2 * j + 1) * gap;
    v.instances.push_back({s0, e0, "c" + std::to_string(label(rng))});
    v.scores.push_back(0.5 + 0.5 * unit(rng));
  }
  for (int j = 0; j < s.distractors_per_video; ++j) {
    const double a = unit(rng);
    const double len = 0.02 + 0.2 * unit(rng);
    v.distractors.push_back({a * (1.0 - len), a * (1.0 - len) + len,
                             "c" + std::to_string(label(rng))});
    v.distractor_scores.push_back(0.5 * unit(rng));
  }
  return v;
}

Eigen::VectorXd boundary_curve(const std::vector<double>& centers, std::int64_t n, double sigma) {
  Eigen::VectorXd curve = Eigen::VectorXd::Zero(n);
  for (double c : centers) curve = curve.cwiseMax(synthesize_heatmap(c, n, sigma).values);
  return curve;
}

}  // namespace

void SynthScenario::validate() const {
  if (num_videos == 0) throw ConfigError("scenario needs at least one video");
  if (!(duration_range_sec.first > 0.0 && duration_range_sec.first <= duration_range_sec.second))
    throw ConfigError("duration range must satisfy 0 < lo <= hi");
  if (!(instances_per_video.first >= 1 && instances_per_video.first <= instances_per_video.second))
    throw ConfigError("instance range must satisfy 1 <= lo <= hi");
  if (snippet_counts.empty()) throw ConfigError("scenario needs at least one snippet count");
  for (auto t : snippet_counts)
    if (t < 3) throw ConfigError("snippet counts must be >= 3");
  if (!(curve_sigma > 0.0)) throw ConfigError("curve_sigma must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
  if (num_classes < 1) throw ConfigError("num_classes must be >= 1");
  if (distractors_per_video < 0) throw ConfigError("distractors_per_video must be >= 0");
  if (!(min_separation_snippets >= 1.0))
    throw ConfigError("min_separation_snippets must be >= 1");
}

SynthDataset generate_at(const SynthScenario& s, std::int64_t num_snippets) {
  s.validate();
  if (num_snippets < 3) throw ConfigError("snippet count must be >= 3");
  SynthDataset out{num_snippets, {}};
  out.videos.reserve(s.num_videos);

  for (std::size_t i = 0; i < s.num_videos; ++i) {
    const DrawnVideo drawn = draw_video(s, i);
    const TemporalGrid grid = TemporalGrid::from_seconds(drawn.duration, num_snippets);

    std::vector<double> starts, ends;
    for (const auto& g : drawn.instances) {
      const auto [a, b] = downsample_gt(g, grid);
      starts.push_back(a);
      ends.push_back(b);
    }

    SynthVideo video;
    video.ground_truth = drawn.instances;
    VideoPredictions& p = video.predictions;
    p.video_id = "synth_" + std::to_string(i);
    p.grid = grid;

    Eigen::VectorXd sc = boundary_curve(starts, num_snippets, s.curve_sigma);
    Eigen::VectorXd ec = boundary_curve(ends, num_snippets, s.curve_sigma);
    if (s.noise_std > 0.0) {
      auto rng = stream(s.seed, i, static_cast<std::uint64_t>(num_snippets));
      std::normal_distribution<double> noise(0.0, s.noise_std);
      for (Eigen::Index t = 0; t < num_snippets; ++t) sc(t) = std::max(0.0, sc(t) + noise(rng));
      for (Eigen::Index t = 0; t < num_snippets; ++t) ec(t) = std::max(0.0, ec(t) + noise(rng));
    }
    p.start_curve = ScoreCurve<double>{std::move(sc), BoundaryKind::start};
    p.end_curve = ScoreCurve<double>{std::move(ec), BoundaryKind::end};

    for (std::size_t j = 0; j < drawn.instances.size(); ++j) {
      Proposal q;
      q.start = {static_cast<double>(quantize_point(starts[j], s.baseline_mode))};
      q.end = {static_cast<double>(quantize_point(ends[j], s.baseline_mode))};
      q.score = drawn.scores[j];
      q.label = drawn.instances[j].label;
      q.id = j;
      p.proposals.push_back(std::move(q));
    }
    const double extent = static_cast<double>(num_snippets);
    for (std::size_t j = 0; j < drawn.distractors.size(); ++j) {
      const auto& d = drawn.distractors[j];
      Proposal q;
      q.start = {std::floor(d.start_sec * extent)};
      q.end = {std::max(q.start.value + 1.0, std::round(d.end_sec * extent))};
      q.score = drawn.distractor_scores[j];
      q.label = d.label;
      q.id = drawn.instances.size() + j;
      p.proposals.push_back(std::move(q));
    }
    out.videos.push_back(std::move(video));
  }
  return out;
}

std::vector<SynthDataset> generate(const SynthScenario& s) {
  std::vector<SynthDataset> out;
  for (auto t : s.snippet_counts) out.push_back(generate_at(s, t));
  return out;
}

std::vector<double> boundary_errors(const SynthVideo& truth, const VideoPredictions& predicted) {
  std::vector<double> errors;
  for (const Proposal& q : predicted.proposals) {
    if (q.id >= truth.ground_truth.size()) continue;
    const auto [s, e] = downsample_gt(truth.ground_truth[q.id], predicted.grid);
    errors.push_back(std::abs(q.start.value - s));
    errors.push_back(std::abs(q.end.value - e));
  }
  return errors;
}

DetectionsByVideo to_detections(const std::vector<VideoPredictions>& videos) {
  DetectionsByVideo out;
  for (const auto& v : videos) {
    auto& list = out[v.video_id];
    for (const auto& d : recover_resolution(v))
      list.push_back({{d.start_sec, d.end_sec}, d.score, d.label});
  }
  return out;
}

GroundTruthByVideo to_ground_truth(const SynthDataset& data) {
  GroundTruthByVideo out;
  for (const auto& v : data.videos) out[v.predictions.video_id] = v.ground_truth;
  return out;
}

std::vector<SweepRow> run_sweep(const SynthScenario& scenario, const RefinementConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  const auto thresholds = anet_thresholds();
  for (auto t : scenario.snippet_counts) {
    for (QuantizeMode mode : {QuantizeMode::floor, QuantizeMode::ceil, QuantizeMode::round}) {
      SynthScenario s = scenario;
      s.baseline_mode = mode;
      const SynthDataset data = generate_at(s, t);
      const GroundTruthByVideo gts = to_ground_truth(data);

      const auto measure = [&](bool gap, bool smoothing) {
        std::vector<VideoPredictions> videos;
        videos.reserve(data.videos.size());
        RefinementConfig c = cfg;
        c.smoothing_enabled = smoothing;
        for (const auto& v : data.videos)
          videos.push_back(gap ? refine_proposals(v.predictions, c).video : v.predictions);

        double err_sum = 0.0;
        std::size_t err_n = 0;
        for (std::size_t i = 0; i < videos.size(); ++i)
          for (double e : boundary_errors(data.videos[i], videos[i])) {
            err_sum += e;
            ++err_n;
          }
        const DetectionsByVideo preds = to_detections(videos);
        const auto mae = boundary_mae(matched_pairs(preds, gts, 0.5));
        rows.push_back({t, mode, gap, gap && smoothing,
                        err_n ? err_sum / static_cast<double>(err_n) : 0.0,
                        mae.value_or(std::numeric_limits<double>::quiet_NaN()),
                        mean_ap(preds, gts, thresholds).average_map});
      };
      measure(false, false);
      measure(true, false);
      measure(true, true);
    }
  }
  return rows;
}

}  // namespace gap
