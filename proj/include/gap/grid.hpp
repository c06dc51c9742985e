// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

namespace gap {

/// Unit of the downsampling factor lambda: frames per snippet or seconds per snippet.
enum class LambdaUnit { frames, seconds };

/// Real-valued position on the snippet axis (0-based).
struct SnippetCoord {
  double value = 0.0;

  friend constexpr bool operator==(SnippetCoord, SnippetCoord) = default;
  friend constexpr auto operator<=>(SnippetCoord, SnippetCoord) = default;
};

/// Quantization applied when a continuous snippet coordinate is forced onto the grid.
/// `round` is half-away-from-zero.
enum class QuantizeMode { floor, ceil, round };

std::string_view to_string(QuantizeMode mode);
QuantizeMode parse_quantize_mode(std::string_view name);

/// Equidistant sampling of a video into T snippets.
///
/// Immutable. lambda() is recomputed from the stored fields, so it always
/// equals num_frames / T or duration / T according to unit().
class TemporalGrid {
 public:
  /// Grid whose lambda is expressed in seconds per snippet.
  static TemporalGrid from_seconds(double duration_sec, std::int64_t num_snippets);
  /// Grid whose lambda is expressed in frames per snippet.
  static TemporalGrid from_frames(double duration_sec, std::int64_t num_frames,
                                  std::int64_t num_snippets);

  double duration_sec() const noexcept { return duration_sec_; }
  std::int64_t num_frames() const noexcept { return num_frames_; }
  std::int64_t num_snippets() const noexcept { return num_snippets_; }
  LambdaUnit unit() const noexcept { return unit_; }

  double lambda() const noexcept;
  double seconds_per_snippet() const noexcept {
    return duration_sec_ / static_cast<double>(num_snippets_);
  }
  /// Largest index on the discrete snippet axis, T - 1.
  double last_index() const noexcept { return static_cast<double>(num_snippets_ - 1); }

  friend bool operator==(const TemporalGrid&, const TemporalGrid&) = default;

 private:
  TemporalGrid(double duration_sec, std::int64_t num_frames, std::int64_t num_snippets,
               LambdaUnit unit);

  double duration_sec_;
  std::int64_t num_frames_;
  std::int64_t num_snippets_;
  LambdaUnit unit_;
};

/// Seconds to snippet units, t / (duration / T). Accepts 0 <= t <= duration,
/// so the full video extent maps onto [0, T].
SnippetCoord to_snippet(double t_sec, const TemporalGrid& grid);

/// Inverse of to_snippet. Accepts 0 <= x <= T.
double to_seconds(SnippetCoord x, const TemporalGrid& grid);

}  // namespace gap
