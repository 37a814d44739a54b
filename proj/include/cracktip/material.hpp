#ifndef CRACKTIP_MATERIAL_HPP
#define CRACKTIP_MATERIAL_HPP

#include <stdexcept>

#include "cracktip/geometry.hpp"

namespace cracktip {

// Isotropic plane-strain material with Lame moduli lambda, mu.
struct Material {
  double lambda = 1.0;
  double mu = 1.0;

  Material() = default;
  Material(double lambda_, double mu_) : lambda(lambda_), mu(mu_) {
    if (!(mu > 0.0) || !(lambda + mu > 0.0))
      throw std::invalid_argument("material requires mu > 0 and lambda + mu > 0");
  }

  // Hooke's law sigma = lambda tr(e) I + 2 mu e.
  SymTensor2 stress(const SymTensor2& e) const {
    const double t = lambda * e.trace();
    return {t + 2.0 * mu * e.xx, 2.0 * mu * e.xy, t + 2.0 * mu * e.yy};
  }

  // Inverse of the planar Hooke law above:
  // e = sigma / (2 mu) - lambda tr(sigma) / (4 mu (lambda + mu)) I.
  SymTensor2 strain(const SymTensor2& s) const {
    const double a = 1.0 / (2.0 * mu);
    const double b = lambda / (4.0 * mu * (lambda + mu)) * s.trace();
    return {a * s.xx - b, a * s.xy, a * s.yy - b};
  }

  // Elastic energy density (1/2) C e : e.
  double energy_density(const SymTensor2& e) const {
    return 0.5 * stress(e).contract(e);
  }

  double young() const {
    return mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
  }
  double poisson() const { return lambda / (2.0 * (lambda + mu)); }
  // Kolosov constant 3 - 4 nu = (lambda + 3 mu) / (lambda + mu).
  double kolosov() const { return (lambda + 3.0 * mu) / (lambda + mu); }
};

}  // namespace cracktip

#endif
