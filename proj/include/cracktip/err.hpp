#ifndef CRACKTIP_ERR_HPP
#define CRACKTIP_ERR_HPP

#include <vector>

#include "cracktip/crack.hpp"
#include "cracktip/fem.hpp"

namespace cracktip {

struct SolveOptions {
  Material mat{1.0, 1.0};
  double radius = 1.0;
  double h = 0.04;
  double grading = 0.5;
  int order = 1;
};

// Direction (radians) in which the crack continues straight through the
// tip: the travel direction of the chain arriving at the origin. Requires
// the origin to be a chain endpoint.
double collinear_direction(const CrackSet& base);

// Half the Hooke-energy difference integral between the solves with the
// increment's faces free and tied shut, on one shared mesh of
// base + increment with the same boundary data; <= 0 up to solver noise.
double compute_G(const CrackSet& base, const CrackSet& increment,
                 const SolveOptions& opt, const BoundaryFn& bd);

struct ErrCandidate {
  double angle = 0.0;  // increment direction relative to collinear
  double G = 0.0;
  double G_over_eps = 0.0;
};

struct ErrResult {
  double eps = 0.0;
  double g_eps = 0.0;        // minimum of G/eps over the family
  double best_angle = 0.0;
  double circle_bound = 0.0; // certified upper bound (circle competitor)
  std::vector<ErrCandidate> table;
};

struct FamilyOptions {
  int n_angles = 1;
  double angle_lo = 0.0;
  double angle_hi = 0.0;
  bool refine = false;  // golden refinement around the best grid angle
  int jobs = 1;
};

// Scaled infimum of G over straight increments of length eps from the tip,
// on the relative angle grid of the family; includes the circle-competitor
// certificate from the base solve.
ErrResult g_eps(const CrackSet& base, double eps, const SolveOptions& opt,
                const BoundaryFn& bd, const FamilyOptions& family);

// -(elastic energy of u in B_{eps/(2 pi + 1)}) / eps: the energy released
// by cutting loose that disk with a circular increment of total length eps.
double circle_competitor_bound(const ElasticOperator& op,
                               const Eigen::VectorXd& u, double eps);

struct LimitOptions {
  Material mat{1.0, 1.0};
  AngleBranch branch = AngleBranch::pm_pi;
  double k1 = 1.0;
  double k2 = 0.0;
  double R = 2.0;             // matching radius, increment inside B_R
  double R_out_factor = 8.0;  // truncation radius R_out = factor * R
  double h = 0.05;            // element size at r = R
  double grading = 0.5;
  int order = 1;
};

// Limit shape functional: minimum of 1/2 a(w,w) + int_{B_R} sigma* : e(w)
// - int_{ring R} (sigma* nu) . w over the mesh of B_{R_out} minus
// (half line + increment), natural outer boundary, rigid frame pinned.
// sigma* is the analytic mode stress with the given amplitudes.
double limit_functional(const CrackSet& increment, const LimitOptions& opt);

struct LimitResult {
  double F = 0.0;
  int nodes = 0;
  int tris = 0;
  int dofs = 0;
};
LimitResult limit_functional_detailed(const CrackSet& increment,
                                      const LimitOptions& opt);

// Max pairwise relative difference of limit_functional over r_list values
// of the matching radius R.
double r_independence_spread(const CrackSet& increment, LimitOptions opt,
                             const std::vector<double>& r_list);

}  // namespace cracktip

#endif
