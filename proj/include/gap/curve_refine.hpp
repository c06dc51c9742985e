// SPDX-License-Identifier: Apache-2.0
//
// Sub-snippet boundary refinement on 1-D score curves.
//
// A boundary score curve is modelled as a sampled Gaussian around an unseen
// continuous boundary position mu. Taking the log turns the Gaussian into a
// parabola, so one Newton step from the discrete peak x,
//
//     mu = x - D'(x) / D''(x),
//
// recovers mu exactly when the curve really is Gaussian. D' and D'' are
// unit-spacing central differences of the log curve. Real detector curves are
// ragged, so they are first smoothed with a Gaussian kernel and linearly
// rescaled back to their original peak magnitude.
//
// Everything here is templated on the scalar type and accepts any Eigen
// column-vector expression.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "gap/errors.hpp"
#include "gap/grid.hpp"

namespace gap {

template <typename Scalar>
using Curve = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class BoundaryKind { start, end };

/// Per-snippet score distribution for one boundary type.
template <typename Scalar>
struct ScoreCurve {
  Curve<Scalar> values;
  BoundaryKind kind = BoundaryKind::start;

  Eigen::Index size() const noexcept { return values.size(); }
};

/// Knobs of the refinement path. Distances are in snippets.
struct RefinementConfig {
  double sigma = 1.0;
  double log_floor = 1e-10;
  double max_offset = 0.5;
  int snap_window = 2;
  bool smoothing_enabled = true;
  QuantizeMode quantize_mode = QuantizeMode::floor;

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw ParameterError("sigma must be positive, got " + std::to_string(sigma));
    if (!(log_floor > 0.0))
      throw ParameterError("log_floor must be positive, got " + std::to_string(log_floor));
    if (!(max_offset >= 0.0) || !std::isfinite(max_offset))
      throw ParameterError("max_offset must be non-negative, got " + std::to_string(max_offset));
    if (snap_window < 0)
      throw ParameterError("snap_window must be >= 0, got " + std::to_string(snap_window));
  }
};

/// Length >= 3, finite and non-negative.
template <typename Derived>
void validate_scores(const Eigen::MatrixBase<Derived>& h) {
  if (h.size() < 3)
    throw ShapeError("score curve needs at least 3 samples, got " + std::to_string(h.size()));
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (!std::isfinite(static_cast<double>(h(i))) || h(i) < 0)
      throw ParameterError("score curve sample " + std::to_string(i) +
                           " is negative or not finite");
  }
}

/// Normalized, symmetric discrete Gaussian taps w[-radius..radius].
template <typename Scalar>
struct GaussianKernel {
  Scalar sigma;
  int radius;
  Curve<Scalar> weights;  // 2 * radius + 1 taps, weights(radius) is the centre

  Scalar operator[](int k) const { return weights(k + radius); }
};

/// Taps proportional to exp(-k^2 / (2 sigma^2)). A negative radius selects
/// the default ceil(3 sigma).
template <typename Scalar>
GaussianKernel<Scalar> build_kernel(Scalar sigma, int radius = -1) {
  using std::ceil;
  using std::exp;
  if (!(sigma > Scalar(0)) || !std::isfinite(static_cast<double>(sigma)))
    throw ParameterError("kernel sigma must be positive, got " +
                         std::to_string(static_cast<double>(sigma)));
  if (radius < 0) radius = static_cast<int>(ceil(Scalar(3) * sigma));
  Curve<Scalar> w(2 * radius + 1);
  const Scalar denom = Scalar(2) * sigma * sigma;
  for (int k = -radius; k <= radius; ++k) w(k + radius) = exp(-Scalar(k * k) / denom);
  // Sum pairwise from the tails inward so the two halves round identically.
  Scalar total = w(radius);
  for (int k = radius; k >= 1; --k) total += w(radius - k) + w(radius + k);
  w /= total;
  return {sigma, radius, std::move(w)};
}

/// h * K with edge-replicated padding. Output has the input's length.
template <typename Derived>
Curve<typename Derived::Scalar> convolve_replicate(
    const Eigen::MatrixBase<Derived>& h, const GaussianKernel<typename Derived::Scalar>& kernel) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = h.size();
  Curve<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc(0);
    for (int k = -kernel.radius; k <= kernel.radius; ++k) {
      const Eigen::Index j = std::clamp<Eigen::Index>(i - k, 0, n - 1);
      acc += kernel[k] * h(j);
    }
    out(i) = acc;
  }
  return out;
}

/// Smooths h and linearly maps the result onto [0, max h]. A curve that is
/// flat after smoothing is returned unchanged.
template <typename Derived>
Curve<typename Derived::Scalar> smooth_and_rescale(
    const Eigen::MatrixBase<Derived>& h, const GaussianKernel<typename Derived::Scalar>& kernel) {
  using Scalar = typename Derived::Scalar;
  if (h.size() < 3)
    throw ShapeError("smoothing needs at least 3 samples, got " + std::to_string(h.size()));
  Curve<Scalar> smoothed = convolve_replicate(h, kernel);
  const Scalar lo = smoothed.minCoeff();
  const Scalar hi = smoothed.maxCoeff();
  if (!(hi > lo)) return h.eval();
  smoothed = (smoothed.array() - lo) / (hi - lo) * h.maxCoeff();
  return smoothed;
}

/// Elementwise ln(max(h, floor)).
template <typename Derived>
Curve<typename Derived::Scalar> log_transform(const Eigen::MatrixBase<Derived>& h,
                                              typename Derived::Scalar log_floor) {
  if (!(log_floor > 0))
    throw ParameterError("log_floor must be positive, got " +
                         std::to_string(static_cast<double>(log_floor)));
  return h.array().max(log_floor).log().matrix();
}

template <typename Scalar>
struct TaylorStep {
  Scalar position;
  Scalar offset;
  bool refined;  // false: non-concave neighbourhood, position == x
};

/// One Newton step on a log-domain curve from integer index x.
/// Requires 1 <= x <= size - 2.
template <typename Derived>
TaylorStep<typename Derived::Scalar> taylor_refine(const Eigen::MatrixBase<Derived>& g,
                                                   Eigen::Index x,
                                                   typename Derived::Scalar max_offset = 0.5) {
  using Scalar = typename Derived::Scalar;
  if (x < 1 || x > g.size() - 2)
    throw EdgeError("taylor_refine at index " + std::to_string(x) +
                    " needs neighbours on both sides (curve length " + std::to_string(g.size()) +
                    ")");
  const Scalar left = g(x - 1);
  const Scalar centre = g(x);
  const Scalar right = g(x + 1);
  const Scalar first = (right - left) / Scalar(2);
  const Scalar second = right + left - Scalar(2) * centre;
  const Scalar base = static_cast<Scalar>(x);
  if (!(second < Scalar(0))) return {base, Scalar(0), false};
  const Scalar offset = std::clamp(-first / second, -max_offset, max_offset);
  return {base + offset, offset, true};
}

template <typename Scalar>
struct BoundaryEstimate {
  Scalar position;
  Eigen::Index peak;  // snapped integer peak, -1 when no candidate existed
  bool refined;       // false: position is the unmodified input
};

/// Refines any number of boundary guesses against one curve. The smoothed and
/// log-domain curves are computed once at construction.
template <typename Scalar>
class BoundaryRefiner {
 public:
  template <typename Derived>
  BoundaryRefiner(const Eigen::MatrixBase<Derived>& h, const RefinementConfig& cfg)
      : cfg_(cfg) {
    cfg_.validate();
    validate_scores(h);
    if (cfg_.smoothing_enabled)
      prepared_ = smooth_and_rescale(h.template cast<Scalar>(),
                                     build_kernel(static_cast<Scalar>(cfg_.sigma)));
    else
      prepared_ = h.template cast<Scalar>();
    log_ = log_transform(prepared_, static_cast<Scalar>(cfg_.log_floor));
  }

  /// Snaps x_init to the strongest sample among the integers within
  /// snap_window of it, then takes one Newton step there. With snap_window 0
  /// the nearest integer is used as is.
  BoundaryEstimate<Scalar> refine(Scalar x_init) const {
    const Eigen::Index n = prepared_.size();
    const BoundaryEstimate<Scalar> unrefined{x_init, -1, false};
    if (!std::isfinite(static_cast<double>(x_init))) return unrefined;

    Eigen::Index lo, hi;
    if (cfg_.snap_window == 0) {
      lo = hi = static_cast<Eigen::Index>(std::round(x_init));
    } else {
      lo = static_cast<Eigen::Index>(std::ceil(x_init - cfg_.snap_window));
      hi = static_cast<Eigen::Index>(std::floor(x_init + cfg_.snap_window));
    }
    lo = std::max<Eigen::Index>(lo, 0);
    hi = std::min<Eigen::Index>(hi, n - 1);
    if (lo > hi) return unrefined;

    Eigen::Index peak = lo;
    for (Eigen::Index k = lo + 1; k <= hi; ++k) {
      if (prepared_(k) > prepared_(peak) ||
          (prepared_(k) == prepared_(peak) &&
           std::abs(static_cast<Scalar>(k) - x_init) < std::abs(static_cast<Scalar>(peak) - x_init)))
        peak = k;
    }
    if (peak == 0 || peak == n - 1) return {x_init, peak, false};

    const TaylorStep<Scalar> step = taylor_refine(log_, peak, static_cast<Scalar>(cfg_.max_offset));
    if (!step.refined) return {x_init, peak, false};
    const Scalar pos = std::clamp(step.position, Scalar(0), static_cast<Scalar>(n - 1));
    return {pos, peak, true};
  }

  const Curve<Scalar>& prepared() const noexcept { return prepared_; }
  const Curve<Scalar>& log_curve() const noexcept { return log_; }
  const RefinementConfig& config() const noexcept { return cfg_; }

 private:
  RefinementConfig cfg_;
  Curve<Scalar> prepared_;
  Curve<Scalar> log_;
};

/// Single-boundary path: smooth (optional), snap, log, Newton step, clamp.
template <typename Derived>
BoundaryEstimate<typename Derived::Scalar> refine_boundary(const Eigen::MatrixBase<Derived>& h,
                                                           typename Derived::Scalar x_init,
                                                           const RefinementConfig& cfg) {
  return BoundaryRefiner<typename Derived::Scalar>(h, cfg).refine(x_init);
}

}  // namespace gap
