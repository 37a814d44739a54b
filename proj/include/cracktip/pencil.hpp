#ifndef CRACKTIP_PENCIL_HPP
#define CRACKTIP_PENCIL_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "cracktip/fields.hpp"

namespace cracktip {

// Quartic angular operator (d^2/dt^2 + (s-2)^2)(d^2/dt^2 + s^2) with clamped
// ends v = v' = 0 on the branch interval. Eigenvalues s are the admissible
// corner exponents; they come in the symmetric family s and 2 - s.
//
// The fundamental system below stays linearly independent for every s in the
// scan window, including s in {1, 2} where the naive {cos, sin} system
// collapses; its boundary determinant has only honest zeros, each a local
// minimum of the smallest singular value (the determinant of the naive
// system is a negative multiple of sin^2(2 pi s) and never changes sign, so
// root finding must track singular-value dips, not sign flips).
struct PencilOptions {
  double s_min = 0.4;
  double s_max = 3.6;
  double scan_step = 1e-3;
  // Accept a dip as a root when sigma_min / sigma_max falls below this.
  double accept_tol = 1e-9;
  // Singular values below rel_tol * sigma_max count toward multiplicity.
  double mult_rel_tol = 1e-8;
  // Bracket width at which the dip refinement stops.
  double root_tol = 1e-10;
  AngleBranch branch = AngleBranch::pm_pi;
};

struct PencilRoot {
  double s = 0.0;
  int multiplicity = 0;
  double sigma_min_rel = 0.0;
};

// Values and first derivatives of the regularized fundamental system at
// angle theta: u1 = cos(s t), u2 = sin(s t)/s, u3 and u4 the divided
// differences that interpolate between frequencies s and s - 2.
void pencil_basis(double s, double theta, std::array<double, 4>* val,
                  std::array<double, 4>* deriv);

// 4x4 clamped boundary matrix; rows are (value, derivative) at each face.
Eigen::Matrix4d pencil_matrix(double s, AngleBranch b);

double pencil_det(double s, AngleBranch b);
double pencil_sigma_min_rel(double s, AngleBranch b);

std::vector<PencilRoot> find_pencil_roots(const PencilOptions& opt);

// Kernel coefficient vectors (columns) at an eigenvalue, in the basis above.
std::vector<Eigen::Vector4d> pencil_kernel(double s, AngleBranch b,
                                           double rel_tol = 1e-8);

// JSON report (stable key order) on the s = 3/2 eigenspace of both
// branches: kernel dimension, kernel functions in the plain trig basis
// {cos(3t/2), sin(3t/2), cos(t/2), sin(t/2)}, and the L2 projection
// residual of each Airy partner profile family against that eigenspace.
std::string audit_exponent_eigenspace();

}  // namespace cracktip

#endif
