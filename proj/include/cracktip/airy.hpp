#ifndef CRACKTIP_AIRY_HPP
#define CRACKTIP_AIRY_HPP

#include <Eigen/Dense>
#include <limits>
#include <utility>

#include "cracktip/fem.hpp"

namespace cracktip {

// Dual reconstruction from a discrete displacement field: two stress
// potentials p1, p2 with grad p1 = (s22, -s12) and grad p2 = (-s12, s11),
// then the Airy function w with grad w = (p1, p2). All three are vertex
// fields fixed by pinning one node, so they are unique up to the constants
// killed by the pin; the harmonic conjugate of the displacement potential
// is (p2, -p1). The potentials match element stresses in least squares;
// w matches the trapezoid edge increments of (p1, p2), which makes every
// reconstruction nodewise exact for constant stresses.
struct AiryRecovery {
  Eigen::VectorXd p1, p2, w;  // one value per mesh vertex
  double potential_misfit = 0.0;  // relative L2 misfit of grad p vs source
  double airy_misfit = 0.0;       // relative edge-increment misfit of w
  int pin_node = -1;
};

AiryRecovery reconstruct_airy(const ElasticOperator& op,
                              const Eigen::VectorXd& u, int pin_node = -1);

// Relative L2 misfit between the stress implied by the recovered Airy
// hessian and the element stresses of u, over elements with centroid in
// B_rho. interior_only skips elements touching the outer boundary or the
// crack, where patch recovery degrades.
double airy_hessian_misfit(const ElasticOperator& op, const Eigen::VectorXd& u,
                           const AiryRecovery& rec, bool interior_only = true,
                           double rho = std::numeric_limits<double>::infinity());

// Relative face-trace jumps of the recovered Airy function and its
// recovered gradient, aggregated over all crack arms; both vanish for a
// traction-free crack.
struct TraceJumps {
  double w_jump = 0.0;
  double grad_jump = 0.0;
};
TraceJumps airy_trace_jumps(const ElasticOperator& op, const AiryRecovery& rec);

// sup |v|^2 on the mesh ring nearest r versus pi r int |d v / ds|^2, for a
// vector field sampled at the ring nodes; returns (lhs, rhs). Valid when v
// vanishes somewhere on the ring arc.
std::pair<double, double> arc_poincare_check(const ElasticOperator& op,
                                             const Eigen::VectorXd& u,
                                             double r);

}  // namespace cracktip

#endif
