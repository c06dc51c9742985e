// SPDX-License-Identifier: Apache-2.0
#include "gap/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include "gap/errors.hpp"

namespace gap::io {

namespace {

const std::vector<std::string> kTopKeys{"version", "units", "results"};
const std::vector<std::string> kVideoKeys{"duration_sec", "num_snippets", "num_frames", "units",
                                          "proposals",    "start_curve",  "end_curve"};
const std::vector<std::string> kProposalKeys{"start", "end", "score", "label", "refined"};

bool known(const std::vector<std::string>& keys, const std::string& k) {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

struct PathStep {
  std::string key;
  std::optional<std::size_t> index = std::nullopt;
};

// Position just past the first `"key"` + ':' at or after `from`.
std::size_t find_key(const std::string& text, const std::string& key, std::size_t from) {
  const std::string quoted = json(key).dump();
  for (auto pos = text.find(quoted, from); pos != std::string::npos;
       pos = text.find(quoted, pos + 1)) {
    auto after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') return after + 1;
  }
  return std::string::npos;
}

// Start of element `index` of the array that begins at or after `from`.
std::size_t find_element(const std::string& text, std::size_t from, std::size_t index) {
  auto pos = text.find('[', from);
  if (pos == std::string::npos) return pos;
  int depth = 0;
  bool in_string = false;
  std::size_t seen = 0;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (in_string) {
      if (c == '\\') ++pos;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '[' || c == '{') {
      ++depth;
      if (depth == 1) continue;
    }
    if (c == ']' || c == '}') {
      if (--depth == 0) return std::string::npos;
    }
    if (depth == 1 && c == ',') {
      if (++seen == index) return pos + 1;
    } else if (depth >= 1 && index == 0 && !std::isspace(static_cast<unsigned char>(c))) {
      return pos;
    }
  }
  return std::string::npos;
}

std::size_t locate_line(const std::string& text, const std::vector<PathStep>& path) {
  std::size_t pos = 0;
  std::size_t best = 0;
  for (const auto& step : path) {
    auto next = find_key(text, step.key, pos);
    if (next == std::string::npos) break;
    pos = best = next;
    if (step.index) {
      next = find_element(text, pos, *step.index);
      if (next == std::string::npos) break;
      pos = best = next;
    }
  }
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + best, '\n'));
}

class DumpParser {
 public:
  explicit DumpParser(const std::string& text) : text_(text) {}

  PredictionDump parse() {
    json doc;
    try {
      doc = json::parse(text_);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) top_error("", "document must be a JSON object");

    PredictionDump dump;
    if (!doc.contains("version") || !doc["version"].is_number_integer())
      top_error("version", "missing or non-integer");
    dump.version = doc["version"].get<int>();
    if (!doc.contains("units") || !doc["units"].is_string()) top_error("units", "missing");
    dump.units = parse_units(doc["units"].get<std::string>(), "units");
    if (!doc.contains("results") || !doc["results"].is_object())
      top_error("results", "missing or not an object");
    for (const auto& [k, v] : doc.items())
      if (!known(kTopKeys, k)) dump.extra[k] = v;

    std::optional<bool> integer_labels;
    for (const auto& [video_id, entry] : doc["results"].items())
      dump.videos.push_back(parse_video(video_id, entry, dump, integer_labels));
    dump.integer_labels = integer_labels.value_or(false);
    return dump;
  }

 private:
  [[noreturn]] void top_error(const std::string& field, const std::string& what) const {
    const auto line = field.empty() ? 1 : locate_line(text_, {{field}});
    throw ValidationError("field '" + field + "' (line " + std::to_string(line) + "): " + what);
  }

  [[noreturn]] void video_error(const std::string& video, const std::string& field,
                                std::optional<std::size_t> index, const std::string& sub,
                                const std::string& what) const {
    std::vector<PathStep> path{{"results"}, {video}};
    std::string name = field;
    if (!field.empty()) path.push_back({field, index});
    if (index) name += "[" + std::to_string(*index) + "]";
    if (!sub.empty()) {
      path.push_back({sub});
      name += "." + sub;
    }
    throw ValidationError("video '" + video + "', field '" + name + "' (line " +
                          std::to_string(locate_line(text_, path)) + "): " + what);
  }

  Units parse_units(const std::string& s, const std::string& field) const {
    if (s == "snippet") return Units::snippet;
    if (s == "second") return Units::second;
    top_error(field, "units must be \"snippet\" or \"second\", got \"" + s + "\"");
  }

  double number(const std::string& video, const json& obj, const std::string& field,
                std::optional<std::size_t> index = {}, const std::string& sub = {}) const {
    const std::string& key = sub.empty() ? field : sub;
    if (!obj.contains(key)) video_error(video, field, index, sub, "missing");
    if (!obj[key].is_number()) video_error(video, field, index, sub, "must be a number");
    const double x = obj[key].get<double>();
    if (!std::isfinite(x)) video_error(video, field, index, sub, "must be finite");
    return x;
  }

  std::optional<ScoreCurve<double>> curve(const std::string& video, const json& entry,
                                          const std::string& field, std::int64_t n,
                                          BoundaryKind kind) const {
    if (!entry.contains(field) || entry[field].is_null()) return std::nullopt;
    const json& arr = entry[field];
    if (!arr.is_array()) video_error(video, field, {}, {}, "must be an array");
    if (static_cast<std::int64_t>(arr.size()) != n)
      video_error(video, field, {}, {},
                  "curve length " + std::to_string(arr.size()) + " != num_snippets " +
                      std::to_string(n));
    if (n < 3) video_error(video, field, {}, {}, "curves need at least 3 samples");
    Eigen::VectorXd values(n);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) video_error(video, field, i, {}, "must be a number");
      const double x = arr[i].get<double>();
      if (!std::isfinite(x) || x < 0.0)
        video_error(video, field, i, {}, "curve values must be finite and >= 0");
      values(static_cast<Eigen::Index>(i)) = x;
    }
    return ScoreCurve<double>{std::move(values), kind};
  }

  DumpVideo parse_video(const std::string& video, const json& entry, const PredictionDump& dump,
                        std::optional<bool>& integer_labels) const {
    if (!entry.is_object()) video_error(video, "", {}, {}, "entry must be an object");
    if (entry.contains("units")) {
      if (!entry["units"].is_string()) video_error(video, "units", {}, {}, "must be a string");
      const auto s = entry["units"].get<std::string>();
      if (s != to_string(dump.units))
        throw UnitError("video '" + video + "' (line " +
                        std::to_string(locate_line(text_, {{"results"}, {video}, {"units"}})) +
                        ") declares units \"" + s + "\" but the file declares \"" +
                        std::string(to_string(dump.units)) + "\"");
    }

    const double duration = number(video, entry, "duration_sec");
    if (duration <= 0.0) video_error(video, "duration_sec", {}, {}, "must be positive");
    if (!entry.contains("num_snippets") || !entry["num_snippets"].is_number_integer())
      video_error(video, "num_snippets", {}, {}, "missing or non-integer");
    const auto n = entry["num_snippets"].get<std::int64_t>();
    if (n < 2) video_error(video, "num_snippets", {}, {}, "must be >= 2");

    DumpVideo out;
    VideoPredictions& v = out.data;
    v.video_id = video;
    if (entry.contains("num_frames")) {
      if (!entry["num_frames"].is_number_integer() || entry["num_frames"].get<std::int64_t>() < 1)
        video_error(video, "num_frames", {}, {}, "must be a positive integer");
      v.grid = TemporalGrid::from_frames(duration, entry["num_frames"].get<std::int64_t>(), n);
    } else {
      v.grid = TemporalGrid::from_seconds(duration, n);
    }
    v.start_curve = curve(video, entry, "start_curve", n, BoundaryKind::start);
    v.end_curve = curve(video, entry, "end_curve", n, BoundaryKind::end);

    for (const auto& [k, val] : entry.items())
      if (!known(kVideoKeys, k)) out.extra[k] = val;

    if (!entry.contains("proposals") || !entry["proposals"].is_array())
      video_error(video, "proposals", {}, {}, "missing or not an array");
    const json& props = entry["proposals"];
    const double upper = dump.units == Units::snippet ? static_cast<double>(n) : duration;
    for (std::size_t i = 0; i < props.size(); ++i) {
      const json& p = props[i];
      if (!p.is_object()) video_error(video, "proposals", i, {}, "must be an object");
      const double s = number(video, p, "proposals", i, "start");
      const double e = number(video, p, "proposals", i, "end");
      const double score = number(video, p, "proposals", i, "score");
      if (!(s >= 0.0 && s <= upper)) video_error(video, "proposals", i, "start", "out of range");
      if (!(e >= 0.0 && e <= upper)) video_error(video, "proposals", i, "end", "out of range");
      if (!(s < e)) video_error(video, "proposals", i, "end", "must be greater than start");
      if (!(score >= 0.0 && score <= 1.0))
        video_error(video, "proposals", i, "score", "must be in [0, 1]");
      if (!p.contains("label")) video_error(video, "proposals", i, "label", "missing");
      const json& lab = p["label"];
      bool is_int = lab.is_number_integer();
      if (!is_int && !lab.is_string())
        video_error(video, "proposals", i, "label", "must be a string or an integer");
      if (integer_labels && *integer_labels != is_int)
        video_error(video, "proposals", i, "label", "labels must be all strings or all integers");
      integer_labels = is_int;

      Proposal q;
      q.start = dump.units == Units::snippet ? SnippetCoord{s} : to_snippet(s, v.grid);
      q.end = dump.units == Units::snippet ? SnippetCoord{e} : to_snippet(e, v.grid);
      q.score = score;
      q.label = is_int ? std::to_string(lab.get<std::int64_t>()) : lab.get<std::string>();
      q.id = i;
      if (p.contains("refined")) {
        const json& r = p["refined"];
        if (!r.is_object() || !r.value("start", json()).is_boolean() ||
            !r.value("end", json()).is_boolean())
          video_error(video, "proposals", i, "refined", "must be {\"start\": bool, \"end\": bool}");
        q.start_refined = r["start"].get<bool>();
        q.end_refined = r["end"].get<bool>();
      }
      json extra = json::object();
      for (const auto& [k, val] : p.items())
        if (!known(kProposalKeys, k)) extra[k] = val;
      out.proposal_extra.push_back(std::move(extra));
      v.proposals.push_back(std::move(q));
    }
    return out;
  }

  const std::string& text_;
};

double round6(double x) { return std::round(x * 1e6) / 1e6; }

json curve_json(const ScoreCurve<double>& c) {
  return json(std::vector<double>(c.values.data(), c.values.data() + c.values.size()));
}

}  // namespace

std::string_view to_string(Units units) { return units == Units::snippet ? "snippet" : "second"; }

PredictionDump parse_dump(const std::string& text) {
  PredictionDump dump = DumpParser(text).parse();
  for (const auto& v : dump.videos)
    for (const auto& p : v.data.proposals)
      if (p.start_refined || p.end_refined) dump.write_flags = true;
  return dump;
}

PredictionDump load_dump(const std::filesystem::path& path) { return parse_dump(read_text(path)); }

json dump_to_json(const PredictionDump& dump, Units units) {
  json doc = dump.extra.is_object() ? dump.extra : json::object();
  doc["version"] = dump.version;
  doc["units"] = to_string(units);
  json& results = doc["results"] = json::object();
  for (const DumpVideo& dv : dump.videos) {
    const VideoPredictions& v = dv.data;
    json entry = dv.extra.is_object() ? dv.extra : json::object();
    entry["duration_sec"] = v.grid.duration_sec();
    entry["num_snippets"] = v.grid.num_snippets();
    if (v.grid.unit() == LambdaUnit::frames) entry["num_frames"] = v.grid.num_frames();
    if (v.start_curve) entry["start_curve"] = curve_json(*v.start_curve);
    if (v.end_curve) entry["end_curve"] = curve_json(*v.end_curve);
    json props = json::array();
    for (const Proposal& p : v.proposals) {
      json q = p.id < dv.proposal_extra.size() ? dv.proposal_extra[p.id] : json::object();
      if (units == Units::snippet) {
        q["start"] = p.start.value;
        q["end"] = p.end.value;
      } else {
        // Rounding may not push a boundary past the video end.
        const double d = v.grid.duration_sec();
        q["start"] = std::min(round6(to_seconds(p.start, v.grid)), d);
        q["end"] = std::min(round6(to_seconds(p.end, v.grid)), d);
      }
      q["score"] = p.score;
      if (dump.integer_labels)
        q["label"] = std::stoll(p.label);
      else
        q["label"] = p.label;
      if (dump.write_flags) q["refined"] = {{"start", p.start_refined}, {"end", p.end_refined}};
      props.push_back(std::move(q));
    }
    entry["proposals"] = std::move(props);
    results[v.video_id] = std::move(entry);
  }
  return doc;
}

AnnotationSet parse_annotations(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("annotation file must be a JSON object");
  const bool wrapped = doc.contains("database") && doc["database"].is_object();
  const json& db = wrapped ? doc["database"] : doc;

  AnnotationSet out;
  for (const auto& [video, entry] : db.items()) {
    const auto fail = [&](const std::string& field, const std::string& what) {
      const auto line = locate_line(text, {{video}, {field}});
      throw ValidationError("video '" + video + "', field '" + field + "' (line " +
                            std::to_string(line) + "): " + what);
    };
    if (!entry.is_object()) fail("", "entry must be an object");
    const char* dkey = entry.contains("duration_sec") ? "duration_sec" : "duration";
    if (!entry.contains(dkey) || !entry[dkey].is_number()) fail("duration_sec", "missing");
    VideoAnnotation va;
    va.duration_sec = entry[dkey].get<double>();
    if (!(va.duration_sec > 0.0) || !std::isfinite(va.duration_sec))
      fail("duration_sec", "must be positive");
    if (!entry.contains("annotations") || !entry["annotations"].is_array())
      fail("annotations", "missing or not an array");
    const json& anns = entry["annotations"];
    for (std::size_t i = 0; i < anns.size(); ++i) {
      const json& a = anns[i];
      const std::string where = "annotations[" + std::to_string(i) + "]";
      if (!a.is_object() || !a.contains("segment") || !a["segment"].is_array() ||
          a["segment"].size() != 2 || !a["segment"][0].is_number() || !a["segment"][1].is_number())
        fail("annotations", where + ".segment must be [start_sec, end_sec]");
      GroundTruthInstance g;
      g.start_sec = a["segment"][0].get<double>();
      g.end_sec = a["segment"][1].get<double>();
      if (!(g.start_sec >= 0.0 && g.start_sec < g.end_sec && g.end_sec <= va.duration_sec))
        fail("annotations", where + ".segment must satisfy 0 <= start < end <= duration");
      if (!a.contains("label")) fail("annotations", where + ".label missing");
      if (a["label"].is_string())
        g.label = a["label"].get<std::string>();
      else if (a["label"].is_number_integer())
        g.label = std::to_string(a["label"].get<std::int64_t>());
      else
        fail("annotations", where + ".label must be a string or an integer");
      va.instances.push_back(std::move(g));
    }
    out.emplace(video, std::move(va));
  }
  return out;
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_text(path));
}

json annotations_to_json(const AnnotationSet& annotations) {
  json doc = json::object();
  for (const auto& [video, va] : annotations) {
    json anns = json::array();
    for (const auto& g : va.instances)
      anns.push_back({{"segment", {round6(g.start_sec), round6(g.end_sec)}}, {"label", g.label}});
    doc[video] = {{"duration_sec", va.duration_sec}, {"annotations", std::move(anns)}};
  }
  return doc;
}

GroundTruthByVideo ground_truth_of(const AnnotationSet& annotations) {
  GroundTruthByVideo out;
  for (const auto& [video, va] : annotations) out[video] = va.instances;
  return out;
}

DetectionsByVideo detections_of(const PredictionDump& dump) {
  DetectionsByVideo out;
  for (const auto& dv : dump.videos) {
    auto& list = out[dv.data.video_id];
    for (const auto& d : recover_resolution(dv.data))
      list.push_back({{d.start_sec, d.end_sec}, d.score, d.label});
  }
  return out;
}

json report_to_json(const EvalReport& report, const std::string& benchmark) {
  json per = json::object();
  std::vector<double> thresholds;
  for (const auto& t : report.per_threshold_map) {
    std::ostringstream key;
    key.setf(std::ios::fixed);
    key.precision(2);
    key << t.threshold;
    per[key.str()] = t.map;
    thresholds.push_back(t.threshold);
  }
  json doc{{"benchmark", benchmark},
           {"thresholds", thresholds},
           {"per_threshold_map", std::move(per)},
           {"average_map", report.average_map},
           {"boundary_mae_sec", report.boundary_mae_sec ? json(*report.boundary_mae_sec) : json()},
           {"warnings", report.warnings}};
  if (!report.duration_buckets.empty()) {
    json buckets = json::array();
    for (const auto& b : report.duration_buckets)
      buckets.push_back(
          {{"name", b.name}, {"num_videos", b.num_videos}, {"average_map", b.average_map}});
    doc["duration_buckets"] = std::move(buckets);
  }
  if (!report.fp_profile.empty()) doc["fp_profile"] = profile_to_json(report.fp_profile, 0.5)["buckets"];
  return doc;
}

json profile_to_json(const std::vector<FpBucket>& profile, double threshold) {
  json buckets = json::array();
  for (const auto& b : profile)
    buckets.push_back({{"budget_multiple", b.budget_multiple},
                       {"budget", b.budget},
                       {"true_positive", b.true_positive},
                       {"localization_error", b.localization_error},
                       {"background_error", b.background_error}});
  return {{"tiou_threshold", threshold}, {"buckets", std::move(buckets)}};
}

json sweep_to_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"num_snippets", r.num_snippets},
                   {"quantize_mode", to_string(r.mode)},
                   {"gap", r.gap},
                   {"smoothing", r.smoothing},
                   {"boundary_mae_snippets", r.boundary_mae_snippets},
                   {"boundary_mae_sec", std::isnan(r.boundary_mae_sec) ? json() : json(r.boundary_mae_sec)},
                   {"average_map", r.average_map}});
  return out;
}

SynthScenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  SynthScenario s;
  try {
    s.num_videos = doc.value("num_videos", s.num_videos);
    if (doc.contains("duration_range_sec"))
      s.duration_range_sec = doc["duration_range_sec"].get<std::pair<double, double>>();
    if (doc.contains("instances_per_video"))
      s.instances_per_video = doc["instances_per_video"].get<std::pair<int, int>>();
    if (doc.contains("snippet_counts"))
      s.snippet_counts = doc["snippet_counts"].get<std::vector<std::int64_t>>();
    s.curve_sigma = doc.value("curve_sigma", s.curve_sigma);
    s.noise_std = doc.value("noise_std", s.noise_std);
    s.seed = doc.value("seed", s.seed);
    s.num_classes = doc.value("num_classes", s.num_classes);
    s.distractors_per_video = doc.value("distractors_per_video", s.distractors_per_video);
    s.min_separation_snippets = doc.value("min_separation_snippets", s.min_separation_snippets);
    if (doc.contains("baseline_mode"))
      s.baseline_mode = parse_quantize_mode(doc["baseline_mode"].get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

json scenario_to_json(const SynthScenario& s) {
  return {{"num_videos", s.num_videos},
          {"duration_range_sec", s.duration_range_sec},
          {"instances_per_video", s.instances_per_video},
          {"snippet_counts", s.snippet_counts},
          {"curve_sigma", s.curve_sigma},
          {"noise_std", s.noise_std},
          {"seed", s.seed},
          {"num_classes", s.num_classes},
          {"distractors_per_video", s.distractors_per_video},
          {"min_separation_snippets", s.min_separation_snippets},
          {"baseline_mode", to_string(s.baseline_mode)}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp);
    out << text;
    if (!out) throw std::system_error(errno, std::generic_category(), "write failed " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace gap::io
