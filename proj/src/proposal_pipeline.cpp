// SPDX-License-Identifier: Apache-2.0
#include "gap/proposal_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "gap/errors.hpp"
#include "gap/evaluation.hpp"

namespace gap {

RefineOutcome refine_proposals(const VideoPredictions& v, const RefinementConfig& cfg) {
  RefineOutcome out{v, RefineStatus::ok};
  if (!v.start_curve || !v.end_curve) {
    out.status = RefineStatus::missing_curves;
    return out;
  }
  const auto n = v.grid.num_snippets();
  if (v.start_curve->size() != n || v.end_curve->size() != n)
    throw ShapeError("video " + v.video_id + ": curve length does not match num_snippets " +
                     std::to_string(n));

  const BoundaryRefiner<double> starts(v.start_curve->values, cfg);
  const BoundaryRefiner<double> ends(v.end_curve->values, cfg);
  for (Proposal& p : out.video.proposals) {
    const auto s = starts.refine(p.start.value);
    const auto e = ends.refine(p.end.value);
    if (s.position >= e.position) {
      p.start_refined = p.end_refined = false;
      p.crossing = true;
      continue;
    }
    p.start = {s.position};
    p.end = {e.position};
    p.start_refined = s.refined;
    p.end_refined = e.refined;
  }
  return out;
}

std::vector<SecondsDetection> recover_resolution(const VideoPredictions& v) {
  std::vector<SecondsDetection> out;
  out.reserve(v.proposals.size());
  for (const Proposal& p : v.proposals)
    out.push_back({to_seconds(p.start, v.grid), to_seconds(p.end, v.grid), p.score, p.label, p.id});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return out;
}

std::vector<Proposal> soft_nms(std::vector<Proposal> props, const SoftNmsParams& params) {
  if (!(params.sigma > 0.0)) throw ParameterError("soft-nms sigma must be positive");
  std::vector<Proposal> kept;
  kept.reserve(std::min(props.size(), params.top_k));

  const auto better = [](const Proposal& a, const Proposal& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.start.value != b.start.value) return a.start.value < b.start.value;
    return a.id < b.id;
  };

  while (!props.empty() && kept.size() < params.top_k) {
    auto best = std::min_element(props.begin(), props.end(), better);
    Proposal chosen = std::move(*best);
    props.erase(best);
    if (chosen.score < params.score_floor) break;  // everything left is lower

    const Interval a{chosen.start.value, chosen.end.value};
    for (Proposal& p : props) {
      if (p.label != chosen.label) continue;
      const double overlap = tiou(a, {p.start.value, p.end.value});
      p.score *= std::exp(-overlap * overlap / params.sigma);
    }
    kept.push_back(std::move(chosen));
  }
  return kept;
}

}  // namespace gap
