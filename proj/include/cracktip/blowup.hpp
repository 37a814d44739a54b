#ifndef CRACKTIP_BLOWUP_HPP
#define CRACKTIP_BLOWUP_HPP

#include <functional>
#include <vector>

#include "cracktip/crack.hpp"
#include "cracktip/fem.hpp"

namespace cracktip {

// Rotation angle aligning the rescaled crack with the reference half line
// on the negative x axis: minimizes the Hausdorff distance over a uniform
// 4096-point angular scan followed by golden-section refinement.
double blowup_rotation(const CrackSet& g, double eps);

// Clip to B_eps, then map vertices x -> R(rot) x / eps.
CrackSet rescale_crack(const CrackSet& g, double eps, double rot);

// v(y) = R(rot) u(R(-rot) eps y) / sqrt(eps) for a discrete displacement.
Vec2 rescale_displacement(const ElasticOperator& op, const PointLocator& loc,
                          const Eigen::VectorXd& u, double eps, double rot,
                          const Vec2& y, int side = 0);

// Analogue with exponent 3/2 and no frame change, for a vertex scalar field.
double rescale_airy(const PointLocator& loc, const double* w, double eps,
                    double rot, const Vec2& y, int side = 0);

struct BlowUpFit {
  double eps = 1.0;
  double rot = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  RigidMotion rigid;        // rigid motion removed by the fit
  double residual = 0.0;    // relative L2 misfit on the sample set
  double r_in = 0.5, r_out = 1.0;
};

struct AiryFit {
  double eps = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double affine[3] = {0.0, 0.0, 0.0};  // 1, x, y coefficients removed
  double residual = 0.0;
  double r_in = 0.5, r_out = 1.0;
};

// Joint least squares over (kappa1, kappa2, rigid motion) against samples
// of `field` on a polar grid of the annulus: n_theta angles (guard band of
// one angular cell around the crack line) by n_theta/16 radii.
BlowUpFit fit_modes_field(const std::function<Vec2(const Vec2&)>& field,
                          const Material& mat, double r_in, double r_out,
                          int n_theta, AngleBranch branch);

// Same for a scalar field against r^{3/2} psi_k plus an affine function.
AiryFit fit_airy_field(const std::function<double(const Vec2&)>& field,
                       double r_in, double r_out, int n_theta,
                       AngleBranch branch);

// Fit of the rescaled discrete displacement at blow-up radius eps.
BlowUpFit fit_modes(const ElasticOperator& op, const PointLocator& loc,
                    const Eigen::VectorXd& u, double eps, double rot,
                    double r_in = 0.5, double r_out = 1.0, int n_theta = 256,
                    AngleBranch branch = AngleBranch::pm_pi);

AiryFit fit_airy_modes(const PointLocator& loc, const double* w, double eps,
                       double rot, double r_in = 0.5, double r_out = 1.0,
                       int n_theta = 256,
                       AngleBranch branch = AngleBranch::pm_pi);

// Normalized ball energies rho -> stress_sq_in_ball(rho) / rho.
std::vector<double> decay_profile(const ElasticOperator& op,
                                  const Eigen::VectorXd& u,
                                  const std::vector<double>& rhos);

// Same profile for an analytic stress sampled at element centroids.
std::vector<double> decay_profile_fn(const CrackMesh& mesh,
                                     const StressFn& sig,
                                     const std::vector<double>& rhos);

// Angular L2 mass of |sigma|^2 on the unit circle for the analytic mode
// field: the constant its decay profile equals at every radius.
double mode_stress_sq_constant(const ModeField& f);

}  // namespace cracktip

#endif
