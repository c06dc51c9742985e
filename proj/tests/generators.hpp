// SPDX-License-Identifier: Apache-2.0
//
// Random inputs for the property tests.
#pragma once

#include <cmath>
#include <random>

#include <Eigen/Core>

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Log-domain parabola a t^2 + b t + c with a < 0 whose vertex lies within
/// +-0.5 of the interior integer `anchor`.
struct LogQuadratic {
  Eigen::VectorXd samples;
  Eigen::Index anchor;
  double vertex;
};

inline LogQuadratic log_quadratic(Rng& rng, int length = 32) {
  const double a = -uniform(rng, 0.01, 5.0);
  const auto anchor = static_cast<Eigen::Index>(uniform_int(rng, 1, length - 2));
  const double vertex = static_cast<double>(anchor) + uniform(rng, -0.5, 0.5);
  const double b = -2.0 * a * vertex;
  const double c = uniform(rng, -5.0, 5.0);
  Eigen::VectorXd g(length);
  for (int t = 0; t < length; ++t) g(t) = a * t * t + b * t + c;
  return {std::move(g), anchor, vertex};
}

/// Gaussian bump at `center` plus non-negative noise, floored at `base`.
inline Eigen::VectorXd noisy_bump(Rng& rng, int length, double center, double sigma,
                                  double noise, double base = 0.0) {
  std::normal_distribution<double> n(0.0, noise);
  Eigen::VectorXd h(length);
  for (int t = 0; t < length; ++t) {
    const double d = t - center;
    h(t) = std::max(base, std::exp(-d * d / (2 * sigma * sigma)) + (noise > 0 ? n(rng) : 0.0));
  }
  return h;
}

/// Arbitrary non-negative curve.
inline Eigen::VectorXd random_curve(Rng& rng, int length) {
  Eigen::VectorXd h(length);
  for (int t = 0; t < length; ++t) h(t) = uniform(rng, 0.0, 1.0);
  return h;
}

}  // namespace gen
