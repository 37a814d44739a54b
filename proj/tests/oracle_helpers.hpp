#ifndef CRACKTIP_TESTS_ORACLE_HELPERS_HPP
#define CRACKTIP_TESTS_ORACLE_HELPERS_HPP

#include <cmath>
#include <random>

#include "cracktip/geometry.hpp"

namespace testutil {

inline double rel_err(double got, double want) {
  const double scale = std::fmax(std::fabs(want), 1e-300);
  return std::fabs(got - want) / scale;
}

inline double rel_err(const cracktip::Vec2& got, const cracktip::Vec2& want) {
  const double scale = std::fmax(want.norm(), 1e-300);
  return (got - want).norm() / scale;
}

// Random point in the annulus r in [r_lo, r_hi], with the polar angle kept
// at least `guard` away from both faces of the pm_pi branch cut.
template <class Rng>
cracktip::Vec2 safe_point(Rng& rng, double r_lo, double r_hi,
                          double guard = 0.3) {
  std::uniform_real_distribution<double> ur(r_lo, r_hi);
  std::uniform_real_distribution<double> ut(-M_PI + guard, M_PI - guard);
  const double r = ur(rng), t = ut(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace testutil

#endif
