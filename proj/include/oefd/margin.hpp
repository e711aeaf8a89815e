#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "oefd/errors.hpp"
#include "oefd/types.hpp"

namespace oefd {

// Cosines are pulled into the open interval before any arccos: the arccos
// derivative diverges at +-1 and perfectly aligned features would otherwise
// produce infinite gradients.
inline constexpr Real kCosineClamp = 1e-9;

template <typename Scalar>
Scalar clamp_cosine(Scalar c) {
  const Scalar bound = Scalar(1) - Scalar(kCosineClamp);
  return std::min(std::max(c, -bound), bound);
}

// Index k of the segment [k pi/m, (k+1) pi/m] containing theta, clamped to m-1.
template <typename Scalar>
int segment_index(Scalar theta, int m) {
  if (m < 1) throw DomainError("segment_index: m must be >= 1");
  if (!(theta >= Scalar(0) && theta <= std::numbers::pi_v<Scalar>)) {
    throw DomainError("segment_index: theta outside [0, pi]");
  }
  const int k = static_cast<int>(std::floor(Scalar(m) * theta / std::numbers::pi_v<Scalar>));
  return std::min(k, m - 1);
}

// Piecewise monotone margin surrogate (-1)^k cos(m theta) - 2k. Continuous on
// [0, pi], strictly decreasing from 1 to 1 - 2m; identical to cos for m = 1.
template <typename Scalar>
Scalar psi(Scalar theta, int m) {
  const int k = segment_index(theta, m);
  const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
  return sign * std::cos(Scalar(m) * theta) - Scalar(2 * k);
}

// d psi / d cos(theta), evaluated at c = cos(theta). Equals
// (-1)^k m sin(m theta) / sin(theta); mathematically nonnegative, so roundoff
// at segment boundaries is clamped away.
template <typename Scalar>
Scalar psi_cos_slope(Scalar c, int m) {
  const Scalar cc = clamp_cosine(c);
  const Scalar theta = std::acos(cc);
  const int k = segment_index(theta, m);
  const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
  const Scalar sin_theta = std::sqrt(Scalar(1) - cc * cc);
  return std::max(sign * Scalar(m) * std::sin(Scalar(m) * theta) / sin_theta, Scalar(0));
}

struct AngularMarginConfig {
  int margin = 4;       // integer angle multiplier m
  Real scale = 32.0;    // logit scale s replacing the unit feature norm
  Real anneal_weight = 5.0;  // current blend weight a; 0 disables annealing
  Real anneal_decay = 1.0;   // per-step multiplicative decay of a

  void validate() const {
    if (margin < 1) throw ConfigError("margin: m must be an integer >= 1");
    if (!(scale > 0.0)) throw ConfigError("margin: scale must be positive");
    if (anneal_weight < 0.0) throw ConfigError("margin: anneal_weight must be >= 0");
    if (!(anneal_decay > 0.0 && anneal_decay <= 1.0)) {
      throw ConfigError("margin: anneal_decay must be in (0, 1]");
    }
  }
};

// Decay such that anneal_weight falls from w0 to w0 * 0.02 (= 0.1 for the
// default w0 = 5) after 80% of total_steps.
inline Real auto_anneal_decay(std::int64_t total_steps) {
  if (total_steps <= 0) return 1.0;
  const Real horizon = 0.8 * static_cast<Real>(total_steps);
  if (horizon < 1.0) return 1.0;
  return std::pow(0.02, 1.0 / horizon);
}

}  // namespace oefd
