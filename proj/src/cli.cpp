// SPDX-License-Identifier: Apache-2.0
#include "gap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "gap/errors.hpp"
#include "gap/evaluation.hpp"
#include "gap/gt_calibration.hpp"
#include "gap/io.hpp"
#include "gap/proposal_pipeline.hpp"
#include "gap/synth.hpp"

namespace gap::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  processing failed for one or more videos (nothing written)\n"
    "  2  usage error: unknown flag or invalid flag value\n"
    "  3  file error: input missing or unreadable, output not writable\n"
    "  4  validation error: input document violates its schema\n"
    "  5  unit conflict inside a dump\n"
    "  6  configuration error: bad scenario or config file\n"
    "\n"
    "Default refinement settings are read from the JSON file named by $GAP_CONFIG\n"
    "(or --config). Command-line flags take precedence.";

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  RefinementConfig refine;
  SoftNmsParams nms;
  bool soft_nms = true;
};

Settings load_settings(const std::string& explicit_path) {
  Settings s;
  std::string path = explicit_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  if (path.empty()) return s;
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  json doc;
  try {
    doc = json::parse(io::read_text(path));
    s.refine.sigma = doc.value("sigma", s.refine.sigma);
    s.refine.log_floor = doc.value("log_floor", s.refine.log_floor);
    s.refine.max_offset = doc.value("max_offset", s.refine.max_offset);
    s.refine.snap_window = doc.value("snap_window", s.refine.snap_window);
    s.refine.smoothing_enabled = doc.value("smoothing", s.refine.smoothing_enabled);
    if (doc.contains("quantize_mode"))
      s.refine.quantize_mode = parse_quantize_mode(doc["quantize_mode"].get<std::string>());
    s.soft_nms = doc.value("soft_nms", s.soft_nms);
    s.nms.sigma = doc.value("soft_nms_sigma", s.nms.sigma);
    s.nms.score_floor = doc.value("score_floor", s.nms.score_floor);
    s.nms.top_k = doc.value("top_k", s.nms.top_k);
    s.refine.validate();
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return s;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw FileError("input file not found: " + path);
}

void require_parent(const fs::path& out) {
  const auto parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw FileError("output directory does not exist: " + parent.string());
}

// Calls fn(i) for i in [0, n) on `jobs` threads. Exceptions stay inside fn.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct RefineFlags {
  std::string dump, out, config;
  std::optional<double> sigma, max_offset, log_floor, nms_sigma, score_floor;
  std::optional<int> snap_window;
  std::optional<std::size_t> top_k;
  bool no_smoothing = false;
  bool no_soft_nms = false;
  unsigned jobs = 1;
};

void add_refine_knobs(CLI::App* cmd, RefineFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file (overrides $GAP_CONFIG)");
  cmd->add_option("--sigma", f.sigma, "smoothing kernel sigma in snippets (default 1.0)");
  cmd->add_flag("--no-smoothing", f.no_smoothing, "skip temporal distribution smoothing");
  cmd->add_option("--snap-window", f.snap_window, "peak search half-width in snippets (default 2)");
  cmd->add_option("--max-offset", f.max_offset, "largest sub-snippet correction (default 0.5)");
  cmd->add_option("--log-floor", f.log_floor, "floor applied before the log (default 1e-10)");
}

Settings resolve(const RefineFlags& f) {
  Settings s = load_settings(f.config);
  if (f.sigma) s.refine.sigma = *f.sigma;
  if (f.max_offset) s.refine.max_offset = *f.max_offset;
  if (f.log_floor) s.refine.log_floor = *f.log_floor;
  if (f.snap_window) s.refine.snap_window = *f.snap_window;
  if (f.no_smoothing) s.refine.smoothing_enabled = false;
  if (f.nms_sigma) s.nms.sigma = *f.nms_sigma;
  if (f.score_floor) s.nms.score_floor = *f.score_floor;
  if (f.top_k) s.nms.top_k = *f.top_k;
  if (f.no_soft_nms) s.soft_nms = false;
  s.refine.validate();
  if (!(s.nms.sigma > 0.0)) throw ParameterError("--soft-nms-sigma must be positive");
  return s;
}

int cmd_refine(const RefineFlags& f, std::ostream& out, std::ostream& err) {
  const Settings s = resolve(f);
  require_file(f.dump);
  require_parent(f.out);
  io::PredictionDump dump = io::load_dump(f.dump);

  const std::size_t n = dump.videos.size();
  std::vector<std::string> failures(n);
  std::vector<char> passthrough(n, 0);
  parallel_for(n, f.jobs, [&](std::size_t i) {
    VideoPredictions& v = dump.videos[i].data;
    try {
      RefineOutcome r = refine_proposals(v, s.refine);
      if (r.status == RefineStatus::missing_curves) {
        passthrough[i] = 1;
      } else if (s.soft_nms) {
        r.video.proposals = soft_nms(std::move(r.video.proposals), s.nms);
      }
      std::stable_sort(r.video.proposals.begin(), r.video.proposals.end(),
                       [](const Proposal& a, const Proposal& b) { return a.score > b.score; });
      v = std::move(r.video);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  std::size_t failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i].empty()) {
      ++failed;
      err << "error: video '" << dump.videos[i].data.video_id << "': " << failures[i] << "\n";
    } else if (passthrough[i]) {
      err << "warning: video '" << dump.videos[i].data.video_id
          << "' has no start/end curves; proposals passed through unrefined\n";
    }
  }
  if (failed) {
    err << "refine: " << failed << " of " << n << " videos failed; no output written\n";
    return kProcessingError;
  }
  dump.write_flags = true;
  io::write_json(f.out, io::dump_to_json(dump, io::Units::second));
  out << "refined " << n << " videos -> " << f.out << "\n";
  return kOk;
}

struct CalibrateFlags {
  std::string annotations, out, mode = "floor", calibrated = "on";
  std::int64_t num_snippets = 100;
  double sigma = 1.0;
};

int cmd_gt_calibrate(const CalibrateFlags& f, std::ostream& out) {
  const QuantizeMode mode = parse_quantize_mode(f.mode);
  if (f.calibrated != "on" && f.calibrated != "off")
    throw ParameterError("--calibrated must be on or off");
  const bool calibrated = f.calibrated == "on";
  if (f.num_snippets < 2) throw ParameterError("--num-snippets must be >= 2");
  if (!(f.sigma > 0.0)) throw ParameterError("--sigma must be positive");
  require_file(f.annotations);
  require_parent(f.out);
  const io::AnnotationSet anns = io::load_annotations(f.annotations);

  json videos = json::object();
  for (const auto& [video, va] : anns) {
    const TemporalGrid grid = TemporalGrid::from_seconds(va.duration_sec, f.num_snippets);
    Eigen::VectorXd start = Eigen::VectorXd::Zero(f.num_snippets);
    Eigen::VectorXd end = Eigen::VectorXd::Zero(f.num_snippets);
    json instances = json::array();
    for (const auto& g : va.instances) {
      const TrainingTargets t = make_training_targets(g, grid, f.sigma, calibrated, mode);
      start = start.cwiseMax(t.start.values);
      end = end.cwiseMax(t.end.values);
      instances.push_back({{"label", g.label},
                           {"start_center", t.start.center},
                           {"end_center", t.end.center},
                           {"start_error", t.start_error},
                           {"end_error", t.end_error}});
    }
    videos[video] = {{"duration_sec", va.duration_sec},
                     {"instances", std::move(instances)},
                     {"start_heatmap", std::vector<double>(start.data(), start.data() + start.size())},
                     {"end_heatmap", std::vector<double>(end.data(), end.data() + end.size())}};
  }
  const json doc{{"num_snippets", f.num_snippets},
                 {"sigma", f.sigma},
                 {"mode", to_string(mode)},
                 {"calibrated", calibrated},
                 {"videos", std::move(videos)}};
  io::write_json(f.out, doc);
  out << "wrote targets for " << anns.size() << " videos -> " << f.out << "\n";
  return kOk;
}

struct SimulateFlags {
  std::string scenario, out_dir;
  bool sweep = false;
  RefineFlags knobs;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const Settings s = resolve(f.knobs);
  require_file(f.scenario);
  json doc;
  try {
    doc = json::parse(io::read_text(f.scenario));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  const SynthScenario scenario = io::scenario_from_json(doc);
  const std::vector<SynthDataset> sets = generate(scenario);

  io::AnnotationSet anns;
  std::vector<std::pair<std::string, json>> files;
  for (const auto& set : sets) {
    io::PredictionDump dump;
    dump.units = io::Units::snippet;
    for (const auto& v : set.videos) {
      dump.videos.push_back({v.predictions, json::object(), {}});
      anns[v.predictions.video_id] = {v.predictions.grid.duration_sec(), v.ground_truth};
    }
    files.emplace_back("predictions_T" + std::to_string(set.num_snippets) + ".json",
                       io::dump_to_json(dump, io::Units::snippet));
  }
  files.emplace_back("annotations.json", io::annotations_to_json(anns));
  files.emplace_back("scenario.json", io::scenario_to_json(scenario));
  if (f.sweep) files.emplace_back("sweep.json", io::sweep_to_json(run_sweep(scenario, s.refine)));

  std::error_code ec;
  fs::create_directories(f.out_dir, ec);
  if (ec) throw FileError("cannot create " + f.out_dir + ": " + ec.message());
  for (const auto& [name, content] : files) io::write_json(fs::path(f.out_dir) / name, content);
  out << "wrote " << files.size() << " files -> " << f.out_dir << "\n";
  return kOk;
}

struct EvalFlags {
  std::string dump, annotations, out, benchmark = "anet";
  std::vector<int> budgets{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double tiou_threshold = 0.5;
};

// Loads both inputs and keeps only predictions for annotated videos.
std::pair<DetectionsByVideo, io::AnnotationSet> load_pair(const EvalFlags& f, std::ostream& err) {
  require_file(f.dump);
  require_file(f.annotations);
  require_parent(f.out);
  const io::PredictionDump dump = io::load_dump(f.dump);
  io::AnnotationSet anns = io::load_annotations(f.annotations);
  DetectionsByVideo preds = io::detections_of(dump);
  std::size_t dropped = 0;
  for (auto it = preds.begin(); it != preds.end();) {
    if (anns.count(it->first)) {
      ++it;
    } else {
      ++dropped;
      it = preds.erase(it);
    }
  }
  if (dropped) err << "warning: ignored " << dropped << " predicted videos without annotations\n";
  return {std::move(preds), std::move(anns)};
}

int cmd_eval(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<double> thresholds;
  if (f.benchmark == "anet")
    thresholds = anet_thresholds();
  else if (f.benchmark == "thumos")
    thresholds = thumos_thresholds();
  else
    throw ParameterError("--benchmark must be anet or thumos");
  const auto [preds, anns] = load_pair(f, err);
  std::map<std::string, double> durations;
  for (const auto& [video, va] : anns) durations[video] = va.duration_sec;
  const EvalReport report = evaluate(preds, io::ground_truth_of(anns), thresholds, durations);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";

  out << std::fixed << std::setprecision(2) << std::left << std::setw(6) << "tIoU";
  for (const auto& t : report.per_threshold_map) out << std::right << std::setw(7) << t.threshold;
  out << std::right << std::setw(7) << "Avg" << "\n" << std::left << std::setw(6) << "mAP";
  for (const auto& t : report.per_threshold_map) out << std::right << std::setw(7) << 100.0 * t.map;
  out << std::right << std::setw(7) << 100.0 * report.average_map << "\n";
  out.unsetf(std::ios::floatfield);

  io::write_json(f.out, io::report_to_json(report, f.benchmark));
  return kOk;
}

int cmd_profile(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  if (!(f.tiou_threshold > 0.1 && f.tiou_threshold <= 1.0))
    throw ParameterError("--tiou-threshold must be in (0.1, 1]");
  for (int b : f.budgets)
    if (b <= 0) throw ParameterError("--budgets must be positive integers");
  const auto [preds, anns] = load_pair(f, err);
  const auto profile = fp_profile(preds, io::ground_truth_of(anns), f.budgets, f.tiou_threshold);
  for (const auto& b : profile)
    out << b.budget_multiple << "G: budget " << b.budget << "  TP " << b.true_positive
        << "  loc " << b.localization_error << "  bg " << b.background_error << "\n";
  io::write_json(f.out, io::profile_to_json(profile, f.tiou_threshold));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sub-snippet boundary refinement for temporal action detection", "gap"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  RefineFlags refine;
  auto* c_refine = app.add_subcommand("refine", "refine a prediction dump and write it in seconds");
  c_refine->add_option("--dump", refine.dump, "prediction dump (JSON)")->required();
  c_refine->add_option("--out", refine.out, "output dump path")->required();
  add_refine_knobs(c_refine, refine);
  c_refine->add_option("--soft-nms-sigma", refine.nms_sigma, "Soft-NMS Gaussian sigma (default 0.5)");
  c_refine->add_option("--score-floor", refine.score_floor, "drop proposals below this score (default 1e-4)");
  c_refine->add_option("--top-k", refine.top_k, "proposals kept per video (default 100)");
  c_refine->add_flag("--no-soft-nms", refine.no_soft_nms, "skip Soft-NMS");
  c_refine->add_option("--jobs", refine.jobs, "worker threads across videos")->check(CLI::PositiveNumber);

  CalibrateFlags cal;
  auto* c_cal = app.add_subcommand("gt-calibrate", "synthesize ground-truth boundary heatmaps");
  c_cal->add_option("--annotations", cal.annotations, "annotation file (JSON)")->required();
  c_cal->add_option("--num-snippets", cal.num_snippets, "snippets per video")->required();
  c_cal->add_option("--sigma", cal.sigma, "heatmap sigma in snippets")->required();
  c_cal->add_option("--mode", cal.mode, "quantization: floor, ceil or round")
      ->check(CLI::IsMember({"floor", "ceil", "round"}));
  c_cal->add_option("--calibrated", cal.calibrated, "on: centre at the exact position")
      ->check(CLI::IsMember({"on", "off"}));
  c_cal->add_option("--out", cal.out, "output path")->required();

  SimulateFlags sim;
  auto* c_sim = app.add_subcommand("simulate", "write a synthetic dump and annotations");
  c_sim->add_option("--scenario", sim.scenario, "scenario (JSON)")->required();
  c_sim->add_option("--out-dir", sim.out_dir, "output directory")->required();
  c_sim->add_flag("--sweep", sim.sweep, "also write sweep.json with GAP on/off metrics");
  add_refine_knobs(c_sim, sim.knobs);

  EvalFlags ev;
  auto* c_eval = app.add_subcommand("eval", "mAP report for a dump against annotations");
  c_eval->add_option("--dump", ev.dump, "prediction dump (JSON)")->required();
  c_eval->add_option("--annotations", ev.annotations, "annotation file (JSON)")->required();
  c_eval->add_option("--benchmark", ev.benchmark, "threshold set: anet or thumos")
      ->check(CLI::IsMember({"anet", "thumos"}));
  c_eval->add_option("--out", ev.out, "report path")->required();

  EvalFlags prof;
  auto* c_prof = app.add_subcommand("profile", "false-positive profile over prediction budgets");
  c_prof->add_option("--dump", prof.dump, "prediction dump (JSON)")->required();
  c_prof->add_option("--annotations", prof.annotations, "annotation file (JSON)")->required();
  c_prof->add_option("--budgets", prof.budgets, "multiples of the GT count, e.g. 1,2,3")
      ->delimiter(',');
  c_prof->add_option("--tiou-threshold", prof.tiou_threshold, "true-positive threshold");
  c_prof->add_option("--out", prof.out, "output path")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (c_refine->parsed()) return cmd_refine(refine, out, err);
    if (c_cal->parsed()) return cmd_gt_calibrate(cal, out);
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_eval->parsed()) return cmd_eval(ev, out, err);
    if (c_prof->parsed()) return cmd_profile(prof, out, err);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const UnitError& e) {
    err << "unit conflict: " << e.what() << "\n";
    return kUnitConflict;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FileError& e) {
    err << "file error: " << e.what() << "\n";
    return kFileError;
  } catch (const std::system_error& e) {
    err << "file error: " << e.what() << "\n";
    return kFileError;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kProcessingError;
  }
  return kUsageError;
}

}  // namespace gap::cli
