// SPDX-License-Identifier: Apache-2.0
#include "gap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gap/errors.hpp"

namespace gap {

namespace {

struct RankedDetection {
  const std::string* video;
  const Detection* det;
};

// All detections of `label`, best score first; ties keep (video, index) order.
std::vector<RankedDetection> ranked_for_label(const DetectionsByVideo& preds,
                                              const std::string& label) {
  std::vector<RankedDetection> out;
  for (const auto& [video, dets] : preds)
    for (const Detection& d : dets)
      if (d.label == label) out.push_back({&video, &d});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.det->score > b.det->score;
  });
  return out;
}

std::vector<const GroundTruthInstance*> gts_for(const GroundTruthByVideo& gts,
                                                const std::string& video,
                                                const std::string& label) {
  std::vector<const GroundTruthInstance*> out;
  if (auto it = gts.find(video); it != gts.end())
    for (const auto& g : it->second)
      if (g.label == label) out.push_back(&g);
  return out;
}

Interval segment_of(const GroundTruthInstance& g) { return {g.start_sec, g.end_sec}; }

// Greedy matching for one class. Returns, per ranked detection, the matched
// ground truth or nullptr.
std::vector<const GroundTruthInstance*> match_ranked(const std::vector<RankedDetection>& ranked,
                                                     const GroundTruthByVideo& gts,
                                                     const std::string& label, double threshold) {
  std::map<std::string, std::vector<const GroundTruthInstance*>> pools;
  std::set<const GroundTruthInstance*> taken;
  std::vector<const GroundTruthInstance*> out(ranked.size(), nullptr);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto [it, inserted] = pools.try_emplace(*ranked[i].video);
    if (inserted) it->second = gts_for(gts, *ranked[i].video, label);
    const GroundTruthInstance* best = nullptr;
    double best_iou = -1.0;
    for (const GroundTruthInstance* g : it->second) {
      if (taken.count(g)) continue;
      const double iou = tiou(ranked[i].det->segment, segment_of(*g));
      if (iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best && best_iou >= threshold) {
      taken.insert(best);
      out[i] = best;
    }
  }
  return out;
}

std::set<std::string> gt_labels(const GroundTruthByVideo& gts) {
  std::set<std::string> labels;
  for (const auto& [video, list] : gts)
    for (const auto& g : list) labels.insert(g.label);
  return labels;
}

std::size_t count_label(const GroundTruthByVideo& gts, const std::string& label) {
  std::size_t n = 0;
  for (const auto& [video, list] : gts)
    n += static_cast<std::size_t>(
        std::count_if(list.begin(), list.end(), [&](const auto& g) { return g.label == label; }));
  return n;
}

std::vector<double> threshold_range(int lo_hundredths, int step_hundredths, int hi_hundredths) {
  std::vector<double> out;
  for (int t = lo_hundredths; t <= hi_hundredths; t += step_hundredths) out.push_back(t / 100.0);
  return out;
}

}  // namespace

double tiou(Interval a, Interval b) {
  if (!(a.start < a.end) || !(b.start < b.end))
    throw ParameterError("tIoU needs start < end for both intervals");
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = (a.end - a.start) + (b.end - b.start) - inter;
  return inter / uni;
}

std::vector<double> anet_thresholds() { return threshold_range(50, 5, 95); }
std::vector<double> thumos_thresholds() { return threshold_range(30, 10, 70); }

double interpolated_ap(const std::vector<bool>& hits, std::size_t num_positives) {
  if (num_positives == 0) throw ParameterError("AP undefined without positives");
  const std::size_t n = hits.size();
  std::vector<double> mprec(n + 2, 0.0);
  std::vector<double> mrec(n + 2, 0.0);
  double tp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += hits[i] ? 1.0 : 0.0;
    mprec[i + 1] = tp / static_cast<double>(i + 1);
    mrec[i + 1] = tp / static_cast<double>(num_positives);
  }
  mrec[n + 1] = 1.0;
  for (std::size_t i = n + 1; i-- > 0;) mprec[i] = std::max(mprec[i], mprec[i + 1]);
  double ap = 0.0;
  for (std::size_t i = 1; i < n + 2; ++i)
    if (mrec[i] != mrec[i - 1]) ap += (mrec[i] - mrec[i - 1]) * mprec[i];
  return ap;
}

double average_precision(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                         const std::string& label, double threshold) {
  const auto ranked = ranked_for_label(preds, label);
  const auto matches = match_ranked(ranked, gts, label, threshold);
  std::vector<bool> hits(matches.size());
  std::transform(matches.begin(), matches.end(), hits.begin(),
                 [](const auto* g) { return g != nullptr; });
  return interpolated_ap(hits, count_label(gts, label));
}

MapResult mean_ap(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                  const std::vector<double>& thresholds) {
  MapResult result;
  const auto labels = gt_labels(gts);
  if (labels.empty()) result.warnings.emplace_back("no ground truth; mAP defined as 0");

  for (double thr : thresholds) {
    double sum = 0.0;
    for (const auto& label : labels) sum += average_precision(preds, gts, label, thr);
    result.per_threshold.push_back({thr, labels.empty() ? 0.0 : sum / labels.size()});
  }
  if (!result.per_threshold.empty()) {
    double sum = 0.0;
    for (const auto& t : result.per_threshold) sum += t.map;
    result.average_map = sum / static_cast<double>(result.per_threshold.size());
  }
  return result;
}

std::vector<MatchedPair> matched_pairs(const DetectionsByVideo& preds,
                                       const GroundTruthByVideo& gts, double threshold) {
  std::vector<MatchedPair> pairs;
  for (const auto& label : gt_labels(gts)) {
    const auto ranked = ranked_for_label(preds, label);
    const auto matches = match_ranked(ranked, gts, label, threshold);
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (matches[i]) pairs.push_back({ranked[i].det->segment, segment_of(*matches[i])});
  }
  return pairs;
}

std::optional<double> boundary_mae(const std::vector<MatchedPair>& pairs) {
  if (pairs.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& p : pairs)
    sum += (std::abs(p.pred.start - p.gt.start) + std::abs(p.pred.end - p.gt.end)) / 2.0;
  return sum / static_cast<double>(pairs.size());
}

std::vector<FpBucket> fp_profile(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                                 const std::vector<int>& budget_multiples, double threshold) {
  std::vector<FpBucket> out;
  for (int k : budget_multiples) {
    if (k <= 0) throw ParameterError("profile budgets must be positive");
    FpBucket bucket{k, 0};
    for (const auto& [video, gt_list] : gts) {
      auto it = preds.find(video);
      if (it == preds.end() || gt_list.empty()) continue;

      std::vector<Detection> top = it->second;
      std::stable_sort(top.begin(), top.end(),
                       [](const auto& a, const auto& b) { return a.score > b.score; });
      top.resize(std::min(top.size(), static_cast<std::size_t>(k) * gt_list.size()));
      bucket.budget += top.size();

      const DetectionsByVideo one{{video, top}};
      const GroundTruthByVideo one_gt{{video, gt_list}};
      std::set<std::string> labels;
      for (const auto& d : top) labels.insert(d.label);
      for (const auto& label : labels) {
        const auto ranked = ranked_for_label(one, label);
        const auto matches = match_ranked(ranked, one_gt, label, threshold);
        const auto pool = gts_for(one_gt, video, label);
        for (std::size_t i = 0; i < ranked.size(); ++i) {
          if (matches[i]) {
            ++bucket.true_positive;
            continue;
          }
          double best = 0.0;
          for (const auto* g : pool) best = std::max(best, tiou(ranked[i].det->segment, segment_of(*g)));
          if (best >= 0.1)
            ++bucket.localization_error;
          else
            ++bucket.background_error;
        }
      }
    }
    out.push_back(bucket);
  }
  return out;
}

std::vector<DurationBucket> duration_breakdown(const DetectionsByVideo& preds,
                                               const GroundTruthByVideo& gts,
                                               const std::map<std::string, double>& durations,
                                               const std::vector<double>& thresholds,
                                               double short_cut, double long_cut) {
  std::vector<DurationBucket> out{{"short"}, {"medium"}, {"long"}};
  std::vector<DetectionsByVideo> bucket_preds(3);
  std::vector<GroundTruthByVideo> bucket_gts(3);
  for (const auto& [video, duration] : durations) {
    const std::size_t b = duration < short_cut ? 0 : (duration < long_cut ? 1 : 2);
    ++out[b].num_videos;
    if (auto it = preds.find(video); it != preds.end()) bucket_preds[b][video] = it->second;
    if (auto it = gts.find(video); it != gts.end()) bucket_gts[b][video] = it->second;
  }
  for (std::size_t b = 0; b < 3; ++b)
    out[b].average_map = mean_ap(bucket_preds[b], bucket_gts[b], thresholds).average_map;
  return out;
}

EvalReport evaluate(const DetectionsByVideo& preds, const GroundTruthByVideo& gts,
                    const std::vector<double>& thresholds,
                    const std::map<std::string, double>& durations) {
  EvalReport report;
  MapResult m = mean_ap(preds, gts, thresholds);
  report.per_threshold_map = std::move(m.per_threshold);
  report.average_map = m.average_map;
  report.warnings = std::move(m.warnings);
  report.boundary_mae_sec = boundary_mae(matched_pairs(preds, gts, 0.5));
  if (!report.boundary_mae_sec) report.warnings.emplace_back("no matches at tIoU 0.5; boundary MAE undefined");
  if (!durations.empty()) report.duration_buckets = duration_breakdown(preds, gts, durations, thresholds);
  return report;
}

}  // namespace gap
