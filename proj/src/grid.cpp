// SPDX-License-Identifier: Apache-2.0
#include "gap/grid.hpp"

#include <cmath>
#include <string>

#include "gap/errors.hpp"

namespace gap {

std::string_view to_string(QuantizeMode mode) {
  switch (mode) {
    case QuantizeMode::floor:
      return "floor";
    case QuantizeMode::ceil:
      return "ceil";
    case QuantizeMode::round:
      return "round";
  }
  return "floor";
}

QuantizeMode parse_quantize_mode(std::string_view name) {
  if (name == "floor") return QuantizeMode::floor;
  if (name == "ceil") return QuantizeMode::ceil;
  if (name == "round") return QuantizeMode::round;
  throw ParameterError("unknown quantize mode '" + std::string(name) +
                       "' (expected floor, ceil or round)");
}

TemporalGrid::TemporalGrid(double duration_sec, std::int64_t num_frames,
                           std::int64_t num_snippets, LambdaUnit unit)
    : duration_sec_(duration_sec),
      num_frames_(num_frames),
      num_snippets_(num_snippets),
      unit_(unit) {
  if (!std::isfinite(duration_sec) || duration_sec <= 0.0)
    throw ParameterError("grid duration must be positive, got " + std::to_string(duration_sec));
  if (num_snippets < 2)
    throw ParameterError("grid needs at least 2 snippets, got " + std::to_string(num_snippets));
  if (num_frames < 1)
    throw ParameterError("grid needs at least 1 frame, got " + std::to_string(num_frames));
}

TemporalGrid TemporalGrid::from_seconds(double duration_sec, std::int64_t num_snippets) {
  return {duration_sec, 1, num_snippets, LambdaUnit::seconds};
}

TemporalGrid TemporalGrid::from_frames(double duration_sec, std::int64_t num_frames,
                                       std::int64_t num_snippets) {
  return {duration_sec, num_frames, num_snippets, LambdaUnit::frames};
}

double TemporalGrid::lambda() const noexcept {
  const double t = static_cast<double>(num_snippets_);
  return unit_ == LambdaUnit::frames ? static_cast<double>(num_frames_) / t : duration_sec_ / t;
}

SnippetCoord to_snippet(double t_sec, const TemporalGrid& grid) {
  if (!(t_sec >= 0.0 && t_sec <= grid.duration_sec()))
    throw RangeError("time " + std::to_string(t_sec) + " s outside [0, " +
                     std::to_string(grid.duration_sec()) + "]");
  return {t_sec / grid.seconds_per_snippet()};
}

double to_seconds(SnippetCoord x, const TemporalGrid& grid) {
  const double extent = static_cast<double>(grid.num_snippets());
  if (!(x.value >= 0.0 && x.value <= extent))
    throw RangeError("snippet coordinate " + std::to_string(x.value) + " outside [0, " +
                     std::to_string(extent) + "]");
  return x.value * grid.seconds_per_snippet();
}

}  // namespace gap
