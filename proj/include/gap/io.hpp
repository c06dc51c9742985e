// SPDX-License-Identifier: Apache-2.0
//
// Prediction dumps and annotation files (JSON). Schemas live in schemas/.
//
// Dumps are validated completely while loading and normalized to snippet
// coordinates. Fields the loader does not know are kept and written back.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gap/evaluation.hpp"
#include "gap/gt_calibration.hpp"
#include "gap/proposal_pipeline.hpp"
#include "gap/synth.hpp"

namespace gap::io {

using json = nlohmann::json;

enum class Units { snippet, second };

std::string_view to_string(Units units);

struct DumpVideo {
  VideoPredictions data;
  json extra = json::object();
  std::vector<json> proposal_extra;  // indexed by Proposal::id
};

struct PredictionDump {
  int version = 1;
  Units units = Units::snippet;  // units of the source file
  bool integer_labels = false;
  bool write_flags = false;      // emit per-proposal "refined" flags
  json extra = json::object();
  std::vector<DumpVideo> videos;  // sorted by video id
};

/// Throws ValidationError (naming video, field and line) or UnitError.
PredictionDump parse_dump(const std::string& text);
PredictionDump load_dump(const std::filesystem::path& path);

/// Proposals are written in `units`; second-valued coordinates are rounded
/// to 6 decimals. Proposals keep their current order.
json dump_to_json(const PredictionDump& dump, Units units);

struct VideoAnnotation {
  double duration_sec = 0.0;
  std::vector<GroundTruthInstance> instances;
};

using AnnotationSet = std::map<std::string, VideoAnnotation>;

/// Accepts the plain video-id map, or the same map under a "database" key
/// with "duration" instead of "duration_sec".
AnnotationSet parse_annotations(const std::string& text);
AnnotationSet load_annotations(const std::filesystem::path& path);
json annotations_to_json(const AnnotationSet& annotations);

GroundTruthByVideo ground_truth_of(const AnnotationSet& annotations);

/// Dump contents as detections in seconds.
DetectionsByVideo detections_of(const PredictionDump& dump);

json report_to_json(const EvalReport& report, const std::string& benchmark);
json profile_to_json(const std::vector<FpBucket>& profile, double threshold);
json sweep_to_json(const std::vector<SweepRow>& rows);

/// Scenario document; absent keys keep their SynthScenario defaults.
SynthScenario scenario_from_json(const json& doc);
json scenario_to_json(const SynthScenario& scenario);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory, then renames.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& doc);

}  // namespace gap::io
