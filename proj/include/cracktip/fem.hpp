#ifndef CRACKTIP_FEM_HPP
#define CRACKTIP_FEM_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <vector>

#include "cracktip/fields.hpp"
#include "cracktip/material.hpp"
#include "cracktip/mesh.hpp"

namespace cracktip {

using BoundaryFn = std::function<Vec2(const Vec2&)>;
using StressFn = std::function<SymTensor2(const Vec2&)>;

struct FemSolution {
  Eigen::VectorXd u;     // displacement dofs, full numbering (tied replicated)
  double energy = 0.0;   // (1/2) a(u, u)
};

// Linear elasticity on a crack mesh. Crack faces are natural (traction
// free); listed arms are tied shut instead, which also merges the origin
// copies of the sectors adjacent to each closed arm. Either the outer
// circle carries Dirichlet data or (natural mode) three dofs are pinned to
// kill rigid motions, in which case loads must be equilibrated.
class ElasticOperator {
 public:
  ElasticOperator(const CrackMesh& mesh, const Material& mat, int order = 1,
                  std::vector<int> closed_arms = {}, bool dirichlet_outer = true);

  FemSolution solve_boundary(const BoundaryFn& g) const;
  FemSolution solve_load(const Eigen::VectorXd& load) const;

  // (1/2) a(u, u) for any full dof vector.
  double energy(const Eigen::VectorXd& u) const;

  // Nodal interpolant of an analytic displacement field. P2 runs add exact
  // midedge values. Crack-face copies evaluate their own side by a small
  // inward offset along the face normal.
  Eigen::VectorXd interpolate(const BoundaryFn& f) const;

  int order() const { return order_; }
  int dof_count() const { return n_dofs_; }
  const CrackMesh& mesh() const { return mesh_; }
  const Material& material() const { return mat_; }

  // Scatter/gather between full dofs and the reduced (tied) system.
  int rep_dof(int dof) const { return rep_[dof]; }

  // Geometry of one scalar node slot: vertex nodes then edge midpoints.
  Vec2 dof_position(int scalar_node) const;
  int scalar_node_count() const { return n_scalar_; }

  // P2 edge bookkeeping (empty for P1): endpoints of each edge node.
  const std::vector<std::pair<int, int>>& edge_endpoints() const {
    return edge_nodes_;
  }
  const std::vector<std::array<int, 6>>& element_nodes() const {
    return elem_nodes_;
  }

  // Strain of the discrete field at the element centroid.
  SymTensor2 strain_at_centroid(const Eigen::VectorXd& u, int t) const;

  // Adds the element integrals of sig : e(N_i) over elements with centroid
  // inside B_rho to the full load vector (3-point quadrature).
  void accumulate_stress_volume_load(const StressFn& sig, double rho,
                                     Eigen::VectorXd* load) const;

  // Adds the edge integrals of (sig nu) . N_i over the mesh ring closest to
  // radius r, with nu the outward chord normal.
  void accumulate_ring_traction_load(const StressFn& sig, double r,
                                     Eigen::VectorXd* load) const;

 private:
  void build_dof_map(const std::vector<int>& closed_arms);
  void assemble();
  void element_matrix(int t, Eigen::Matrix<double, 12, 12>* K, int* ndof) const;

  const CrackMesh& mesh_;
  Material mat_;
  int order_ = 1;
  bool dirichlet_outer_ = true;

  int n_scalar_ = 0;  // vertex nodes + edge nodes
  int n_dofs_ = 0;    // 2 * n_scalar_
  std::vector<std::pair<int, int>> edge_nodes_;
  std::vector<std::array<int, 6>> elem_nodes_;  // vertex ids then edge slots

  std::vector<int> rep_;        // dof -> representative dof (tying)
  std::vector<int> reduced_;    // representative dof -> reduced index or -1
  std::vector<int> free_list_;  // reduced index -> representative dof
  std::vector<int> fixed_list_; // constrained representative dofs
  std::vector<char> is_fixed_;  // by representative dof

  Eigen::SparseMatrix<double> K_ff_, K_fc_;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
};

// Elastic energy of u restricted to elements whose centroid lies in B_rho.
double energy_in_ball(const ElasticOperator& op, const Eigen::VectorXd& u,
                      double rho);

// Integral of |sigma(u)|^2 over elements with centroid in B_rho.
double stress_sq_in_ball(const ElasticOperator& op, const Eigen::VectorXd& u,
                         double rho);

// Flux integral of (sigma(u) nu) . v over the mesh ring closest to radius r,
// taking stresses from the element just inside (or outside) each ring edge;
// nu points outward.
double ring_flux(const ElasticOperator& op, const Eigen::VectorXd& u, double r,
                 const BoundaryFn& v, bool inside = true);

// Residual of the annulus identity: integral of sigma(u):e(v_h) over the
// elements outside B_r plus the inward flux through the ring at r. v must
// vanish on the outer boundary. If scale is given it receives the bulk
// magnitude used for relative comparisons.
double flux_balance_check(const ElasticOperator& op, const Eigen::VectorXd& u,
                          const BoundaryFn& v, double r,
                          double* scale = nullptr);

// Pointwise evaluation of the discrete displacement (shape-function exact).
Vec2 eval_displacement(const ElasticOperator& op, const PointLocator& loc,
                       const Eigen::VectorXd& u, const Vec2& p, int side = 0);

}  // namespace cracktip

#endif
