// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <string>

#include "gap/errors.hpp"
#include "gap/io.hpp"

using namespace gap;
using gap::io::json;

namespace {

const char* kMinimal = R"({
  "version": 1,
  "units": "snippet",
  "results": {
    "vid_a": {
      "duration_sec": 10.0,
      "num_snippets": 5,
      "start_curve": [0.1, 0.9, 0.2, 0.1, 0.0],
      "end_curve": [0.0, 0.1, 0.2, 0.8, 0.1],
      "proposals": [
        {"start": 1, "end": 3, "score": 0.7, "label": "jump"}
      ]
    }
  }
})";

std::string error_of(const std::string& text) {
  try {
    io::parse_dump(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal dump") {
  const auto d = io::parse_dump(kMinimal);
  CHECK(d.version == 1);
  CHECK(d.units == io::Units::snippet);
  REQUIRE(d.videos.size() == 1);
  const auto& v = d.videos[0].data;
  CHECK(v.video_id == "vid_a");
  CHECK(v.grid.num_snippets() == 5);
  CHECK(v.grid.seconds_per_snippet() == 2.0);
  REQUIRE(v.start_curve);
  CHECK(v.start_curve->values(1) == 0.9);
  REQUIRE(v.proposals.size() == 1);
  CHECK(v.proposals[0].start.value == 1.0);
  CHECK(v.proposals[0].label == "jump");
  CHECK_FALSE(d.integer_labels);
  CHECK_FALSE(d.write_flags);
}

TEST_CASE("curve length mismatch names the video, field and line") {
  std::string text = kMinimal;
  text.replace(text.find("[0.0, 0.1, 0.2, 0.8, 0.1]"), 25, "[0.0, 0.1, 0.2, 0.8]");
  const auto msg = error_of(text);
  CHECK(msg.find("vid_a") != std::string::npos);
  CHECK(msg.find("end_curve") != std::string::npos);
  CHECK(msg.find("line 9") != std::string::npos);
  CHECK_THROWS_AS(io::parse_dump(text), ValidationError);
}

TEST_CASE("proposal field errors point at the proposal") {
  std::string text = kMinimal;
  text.replace(text.find("0.7"), 3, "1.7");
  const auto msg = error_of(text);
  CHECK(msg.find("proposals[0].score") != std::string::npos);
  CHECK(msg.find("line 11") != std::string::npos);
}

TEST_CASE("other validation failures") {
  auto broken = [](const std::string& from, const std::string& to) {
    std::string text = kMinimal;
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  CHECK_THROWS_AS(io::parse_dump("{not json"), ValidationError);
  CHECK_THROWS_AS(io::parse_dump(broken("\"version\": 1", "\"version\": \"x\"")), ValidationError);
  CHECK_THROWS_AS(io::parse_dump(broken("\"snippet\"", "\"minute\"")), ValidationError);
  CHECK_THROWS_AS(io::parse_dump(broken("\"start\": 1", "\"start\": 4")), ValidationError);
  CHECK_THROWS_AS(io::parse_dump(broken("\"end\": 3", "\"end\": 6")), ValidationError);
  CHECK_THROWS_AS(io::parse_dump(broken("0.9, 0.2", "-0.9, 0.2")), ValidationError);
  CHECK_THROWS_AS(io::parse_dump(broken("\"duration_sec\": 10.0", "\"duration_sec\": 0")),
                  ValidationError);
  CHECK_THROWS_AS(io::parse_dump(broken("\"label\": \"jump\"", "\"label\": 1.5")), ValidationError);
}

TEST_CASE("per-video unit conflict") {
  std::string text = kMinimal;
  text.replace(text.find("\"duration_sec\""), 0, "\"units\": \"second\", ");
  CHECK_THROWS_AS(io::parse_dump(text), UnitError);
}

TEST_CASE("seconds are normalized to snippets and written back") {
  const char* text = R"({"version": 1, "units": "second", "results": {
    "v": {"duration_sec": 100.0, "num_snippets": 25,
          "proposals": [{"start": 12.4, "end": 37.2, "score": 0.5, "label": "a"}]}}})";
  const auto d = io::parse_dump(text);
  CHECK(d.videos[0].data.proposals[0].start.value == doctest::Approx(3.1).epsilon(1e-15));
  CHECK(d.videos[0].data.proposals[0].end.value == doctest::Approx(9.3).epsilon(1e-15));
  const auto out = io::dump_to_json(d, io::Units::second);
  CHECK(out["units"] == "second");
  CHECK(out["results"]["v"]["proposals"][0]["start"].get<double>() == 12.4);
  CHECK(out["results"]["v"]["proposals"][0]["end"].get<double>() == 37.2);
  const auto snip = io::dump_to_json(d, io::Units::snippet);
  CHECK(snip["results"]["v"]["proposals"][0]["start"].get<double>() == doctest::Approx(3.1));
}

TEST_CASE("frame-based grid") {
  const char* text = R"({"version": 1, "units": "snippet", "results": {
    "v": {"duration_sec": 10.0, "num_snippets": 10, "num_frames": 300, "proposals": []}}})";
  const auto d = io::parse_dump(text);
  CHECK(d.videos[0].data.grid.unit() == LambdaUnit::frames);
  CHECK(io::dump_to_json(d, io::Units::snippet)["results"]["v"]["num_frames"] == 300);
}

TEST_CASE("unknown fields survive a round trip") {
  const char* text = R"({"version": 1, "units": "snippet", "model": "bmn", "results": {
    "v": {"duration_sec": 10.0, "num_snippets": 5, "fps": 30,
          "proposals": [{"start": 1, "end": 2, "score": 0.5, "label": 3, "note": {"k": [1, 2]}}]}}})";
  const auto d = io::parse_dump(text);
  CHECK(d.integer_labels);
  const auto out = io::dump_to_json(d, io::Units::snippet);
  CHECK(out["model"] == "bmn");
  CHECK(out["results"]["v"]["fps"] == 30);
  CHECK(out["results"]["v"]["proposals"][0]["note"]["k"][1] == 2);
  CHECK(out["results"]["v"]["proposals"][0]["label"] == 3);
  CHECK(out["results"]["v"]["proposals"][0]["label"].is_number_integer());
}

TEST_CASE("mixed label types are rejected") {
  const char* text = R"({"version": 1, "units": "snippet", "results": {
    "v": {"duration_sec": 10.0, "num_snippets": 5,
          "proposals": [{"start": 1, "end": 2, "score": 0.5, "label": 3},
                        {"start": 1, "end": 2, "score": 0.5, "label": "x"}]}}})";
  CHECK(error_of(text).find("proposals[1].label") != std::string::npos);
}

TEST_CASE("load -> write -> load preserves contents") {
  const auto dir = std::filesystem::temp_directory_path() / "gap_io_roundtrip";
  std::filesystem::create_directories(dir);
  std::string text = kMinimal;
  text.replace(text.find("\"label\": \"jump\""), 0, "\"refined\": {\"start\": true, \"end\": false}, ");
  io::write_text(dir / "a.json", text);
  const auto a = io::load_dump(dir / "a.json");
  CHECK(a.write_flags);
  io::write_json(dir / "b.json", io::dump_to_json(a, io::Units::snippet));
  const auto b = io::load_dump(dir / "b.json");
  REQUIRE(b.videos.size() == 1);
  CHECK(b.videos[0].data.start_curve->values == a.videos[0].data.start_curve->values);
  CHECK(b.videos[0].data.proposals[0].start_refined);
  CHECK_FALSE(b.videos[0].data.proposals[0].end_refined);
  CHECK(io::dump_to_json(a, io::Units::snippet) == io::dump_to_json(b, io::Units::snippet));
  CHECK_FALSE(std::filesystem::exists(dir / "b.json.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(io::load_dump("/nonexistent/dump.json"), std::runtime_error);
}

TEST_SUITE("annotations") {
  TEST_CASE("plain and wrapped forms") {
    const auto plain = io::parse_annotations(
        R"({"v": {"duration_sec": 50, "annotations": [{"segment": [1.5, 9], "label": "a"}]}})");
    const auto wrapped = io::parse_annotations(
        R"({"version": "1.3", "database": {"v": {"duration": 50, "subset": "validation",
            "annotations": [{"segment": [1.5, 9], "label": "a"}]}}})");
    for (const auto* set : {&plain, &wrapped}) {
      REQUIRE(set->count("v"));
      CHECK(set->at("v").duration_sec == 50.0);
      CHECK(set->at("v").instances[0].start_sec == 1.5);
      CHECK(set->at("v").instances[0].label == "a");
    }
    CHECK(io::parse_annotations(io::annotations_to_json(plain).dump()).at("v").instances[0].end_sec ==
          9.0);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(io::parse_annotations(R"({"v": {"annotations": []}})"), ValidationError);
    CHECK_THROWS_AS(
        io::parse_annotations(R"({"v": {"duration_sec": 5, "annotations": [{"segment": [3, 2], "label": "a"}]}})"),
        ValidationError);
    CHECK_THROWS_AS(
        io::parse_annotations(R"({"v": {"duration_sec": 5, "annotations": [{"segment": [1, 9], "label": "a"}]}})"),
        ValidationError);
  }
}

TEST_CASE("scenario documents") {
  const auto s = io::scenario_from_json(json::parse(R"({"num_videos": 7, "snippet_counts": [25, 50],
      "noise_std": 0.2, "baseline_mode": "floor"})"));
  CHECK(s.num_videos == 7);
  CHECK(s.snippet_counts == std::vector<std::int64_t>{25, 50});
  CHECK(s.baseline_mode == QuantizeMode::floor);
  CHECK(s.curve_sigma == 2.0);
  const auto back = io::scenario_from_json(io::scenario_to_json(s));
  CHECK(back.noise_std == 0.2);
  CHECK(back.snippet_counts == s.snippet_counts);
}

TEST_CASE("rounded seconds stay inside the video") {
  const char* text = R"({"version": 1, "units": "snippet", "results": {
    "v": {"duration_sec": 10.0000007, "num_snippets": 5,
          "proposals": [{"start": 0, "end": 5, "score": 0.5, "label": "a"}]}}})";
  const auto out = io::dump_to_json(io::parse_dump(text), io::Units::second);
  CHECK(out["results"]["v"]["proposals"][0]["end"].get<double>() <= 10.0000007);
  CHECK_NOTHROW(io::parse_dump(out.dump()));
}
