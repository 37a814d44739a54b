#ifndef CRACKTIP_FIELDS_HPP
#define CRACKTIP_FIELDS_HPP

#include <string>

#include "cracktip/geometry.hpp"
#include "cracktip/material.hpp"

namespace cracktip {

// Angular branch cut placement. pm_pi puts the crack faces at theta = +-pi
// (crack along the negative x-axis); zero_2pi puts them at theta = 0 and
// 2 pi (crack along the positive x-axis).
enum class AngleBranch { pm_pi, zero_2pi };

AngleBranch angle_branch_from_string(const std::string& s);
std::string to_string(AngleBranch b);

// Polar angle of x in (-pi, pi] resp. [0, 2 pi).
double branch_angle(const Vec2& x, AngleBranch b);

namespace modes {

// Historic angular profiles, kept verbatim for regression pinning. They are
// not traction-free on either branch's faces; do not build fields from them.
Vec2 legacy_phi(int mode, double theta, const Material& mat);
double legacy_psi(int mode, double theta);

// Traction-free angular displacement profiles phi_k for the given branch.
// Mode 1 opens the faces, mode 2 slides them. phi is normalized so that the
// displacement sqrt(r) phi_k carries unit mode amplitude.
Vec2 phi(int mode, double theta, const Material& mat, AngleBranch b);
Vec2 phi_dtheta(int mode, double theta, const Material& mat, AngleBranch b);

// Angular profile psi_k of the biharmonic (Airy) partner, with derivatives.
double airy_profile(int mode, double theta, AngleBranch b);
double airy_profile_d1(int mode, double theta, AngleBranch b);
double airy_profile_d2(int mode, double theta, AngleBranch b);

// Amplitude c_k such that the Airy function of the unit mode-k displacement
// field on branch b is c_k r^{3/2} psi_k(theta). The mode-1 amplitude flips
// sign between the branches; mode 2 carries the same constant on both.
double airy_amplitude(int mode, const Material& mat, AngleBranch b);

// Exact elastic energy of the unit mode-k field in B_R, linear in R.
double mode_energy_in_ball(int mode, const Material& mat, double R);

}  // namespace modes

// Two-parameter singular crack-tip field u = sqrt(r) (k1 phi_1 + k2 phi_2)
// with closed-form gradient, stress, and Airy function.
struct ModeField {
  Material mat;
  double k1 = 0.0;
  double k2 = 0.0;
  AngleBranch branch = AngleBranch::pm_pi;

  Vec2 displacement(const Vec2& x) const;
  Mat2 gradient(const Vec2& x) const;
  SymTensor2 strain(const Vec2& x) const;
  SymTensor2 stress(const Vec2& x) const;

  double airy(const Vec2& x) const;
  Mat2 airy_hessian(const Vec2& x) const;

  // Exact energy in B_R; the two modes are energy-orthogonal.
  double energy_in_ball(double R) const;
};

// Stress encoded by an Airy hessian: sigma = [[H22, -H12], [-H12, H11]].
SymTensor2 stress_from_airy_hessian(const Mat2& H);

// 3/2-homogeneous biharmonic field w = r^{3/2} (c1 psi_1 + c2 psi_2).
struct AiryModeField {
  double c1 = 0.0;
  double c2 = 0.0;
  AngleBranch branch = AngleBranch::pm_pi;

  double eval(const Vec2& x) const;
};

// Stress at the polar point (r, theta) with theta supplied explicitly,
// allowing evaluation at the face angles without the branch-cut atan2.
SymTensor2 stress_polar(const ModeField& f, double r, double theta);

// Central finite-difference divergence of f.stress at x with step h.
// Falls as O(h^2) since the field solves the homogeneous system.
Vec2 lame_residual(const ModeField& f, const Vec2& x, double h);

// Traction sigma(r, theta_face) n on face 0 (lo angle) or face 1 (hi),
// with n the counterclockwise angular unit vector at the face.
Vec2 crack_traction(const ModeField& f, double r, int face);

// Nested 5-point-Laplacian bilaplacian of w at x (13-point stencil).
double biharmonic_residual(const AiryModeField& w, const Vec2& x, double h);

// Writes the mode-profile audit (divergence, face-traction, and partner
// residuals for both profile families under both branches) as a JSON string
// with stable key order, and returns the branch selected as default.
std::string audit_mode_profiles(const Material& mat, AngleBranch* selected);

}  // namespace cracktip

#endif
