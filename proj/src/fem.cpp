#include "cracktip/fem.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cracktip/errors.hpp"

namespace cracktip {

namespace {

int uf_find(std::vector<int>& p, int i) {
  while (p[i] != i) {
    p[i] = p[p[i]];
    i = p[i];
  }
  return i;
}

void uf_union(std::vector<int>& p, int a, int b) {
  a = uf_find(p, a);
  b = uf_find(p, b);
  if (a != b) p[std::max(a, b)] = std::min(a, b);
}

// Nudges a crack-face point into its side's material wedge by a tiny
// rotation about the tip; side 0 approaches from below (clockwise side).
Vec2 side_nudge(const Vec2& p, int side) {
  if (side < 0 || p.norm() == 0.0) return p;
  const double eps = side == 0 ? -1e-9 : 1e-9;
  return rotation(eps).apply(p);
}

struct ElementGeom {
  double area;
  Vec2 grad[3];  // gradients of the vertex barycentric functions
};

ElementGeom element_geom(const CrackMesh& m, const std::array<int, 3>& T) {
  const Vec2 a = m.nodes[T[0]], b = m.nodes[T[1]], c = m.nodes[T[2]];
  const double det = (b - a).cross(c - a);
  ElementGeom g;
  g.area = 0.5 * det;
  g.grad[0] = Vec2{b.y - c.y, c.x - b.x} / det;
  g.grad[1] = Vec2{c.y - a.y, a.x - c.x} / det;
  g.grad[2] = Vec2{a.y - b.y, b.x - a.x} / det;
  return g;
}

}  // namespace

ElasticOperator::ElasticOperator(const CrackMesh& mesh, const Material& mat,
                                 int order, std::vector<int> closed_arms,
                                 bool dirichlet_outer)
    : mesh_(mesh), mat_(mat), order_(order), dirichlet_outer_(dirichlet_outer) {
  if (order_ != 1 && order_ != 2) throw ConfigError("element order must be 1 or 2");

  const int nv = mesh_.node_count();
  elem_nodes_.resize(mesh_.tri_count());
  if (order_ == 1) {
    for (int t = 0; t < mesh_.tri_count(); ++t) {
      const auto& T = mesh_.tris[t];
      elem_nodes_[t] = {T[0], T[1], T[2], -1, -1, -1};
    }
    n_scalar_ = nv;
  } else {
    std::unordered_map<long long, int> edge_index;
    auto edge_of = [&](int a, int b) {
      if (a > b) std::swap(a, b);
      const long long key = (static_cast<long long>(a) << 32) | b;
      auto it = edge_index.find(key);
      if (it != edge_index.end()) return it->second;
      const int id = static_cast<int>(edge_nodes_.size());
      edge_index.emplace(key, id);
      edge_nodes_.push_back({a, b});
      return id;
    };
    for (int t = 0; t < mesh_.tri_count(); ++t) {
      const auto& T = mesh_.tris[t];
      // Edge slot e is opposite vertex e.
      const int e0 = edge_of(T[1], T[2]);
      const int e1 = edge_of(T[2], T[0]);
      const int e2 = edge_of(T[0], T[1]);
      elem_nodes_[t] = {T[0], T[1], T[2], nv + e0, nv + e1, nv + e2};
    }
    n_scalar_ = nv + static_cast<int>(edge_nodes_.size());
  }
  n_dofs_ = 2 * n_scalar_;

  build_dof_map(closed_arms);
  assemble();
}

Vec2 ElasticOperator::dof_position(int s) const {
  const int nv = mesh_.node_count();
  if (s < nv) return mesh_.nodes[s];
  const auto& e = edge_nodes_[s - nv];
  return (mesh_.nodes[e.first] + mesh_.nodes[e.second]) * 0.5;
}

void ElasticOperator::build_dof_map(const std::vector<int>& closed_arms) {
  std::vector<int> parent(n_scalar_);
  for (int i = 0; i < n_scalar_; ++i) parent[i] = i;

  const int A = mesh_.arm_count;
  std::vector<char> closed(A, 0);
  for (int j : closed_arms) {
    if (j < 0 || j >= A) throw ConfigError("closed arm index out of range");
    closed[j] = 1;
  }

  // Merge duplicated face nodes of closed arms.
  for (size_t p = 0; p < mesh_.face_pairs.size(); ++p)
    if (closed[mesh_.face_pair_arm[p]])
      uf_union(parent, mesh_.face_pairs[p].first, mesh_.face_pairs[p].second);

  // Closing an arm merges the origin copies of its two adjacent sectors.
  for (int s = 0; s < A; ++s) {
    const int arm = mesh_.fan_order[s];
    if (closed[arm])
      uf_union(parent, mesh_.origin_nodes[(s - 1 + A) % A],
               mesh_.origin_nodes[s]);
  }

  // P2: merge midedge nodes along closed faces.
  if (order_ == 2) {
    const int nv = mesh_.node_count();
    std::unordered_map<long long, int> edge_index;
    for (size_t e = 0; e < edge_nodes_.size(); ++e) {
      const long long key =
          (static_cast<long long>(edge_nodes_[e].first) << 32) |
          edge_nodes_[e].second;
      edge_index.emplace(key, static_cast<int>(e));
    }
    auto lookup = [&](int a, int b) {
      if (a > b) std::swap(a, b);
      auto it = edge_index.find((static_cast<long long>(a) << 32) | b);
      return it == edge_index.end() ? -1 : nv + it->second;
    };
    for (int j = 0; j < A; ++j) {
      if (!closed[j]) continue;
      const auto& tr = mesh_.faces[j];
      for (size_t i = 0; i + 1 < tr.cw_ids.size(); ++i) {
        const int ecw = lookup(tr.cw_ids[i], tr.cw_ids[i + 1]);
        const int eccw = lookup(tr.ccw_ids[i], tr.ccw_ids[i + 1]);
        if (ecw >= 0 && eccw >= 0 && ecw != eccw)
          uf_union(parent, ecw, eccw);
      }
    }
  }

  rep_.resize(n_dofs_);
  for (int s = 0; s < n_scalar_; ++s) {
    const int r = uf_find(parent, s);
    rep_[2 * s] = 2 * r;
    rep_[2 * s + 1] = 2 * r + 1;
  }

  // Constraints.
  is_fixed_.assign(n_dofs_, 0);
  if (dirichlet_outer_) {
    std::vector<char> outer(n_scalar_, 0);
    for (int v : mesh_.outer_nodes) outer[v] = 1;
    if (order_ == 2) {
      const int nv = mesh_.node_count();
      for (size_t e = 0; e < edge_nodes_.size(); ++e)
        if (outer[edge_nodes_[e].first] && outer[edge_nodes_[e].second])
          outer[nv + e] = 1;
    }
    for (int s = 0; s < n_scalar_; ++s)
      if (outer[s]) {
        is_fixed_[rep_[2 * s]] = 1;
        is_fixed_[rep_[2 * s + 1]] = 1;
      }
  } else {
    // Pin a rigid frame: both components at one boundary node, and the
    // rotational component at a second one.
    if (mesh_.outer_nodes.size() < 2)
      throw NumericalError("mesh lacks boundary nodes for rigid pinning");
    const int na = mesh_.outer_nodes.front();
    const int nb = mesh_.outer_nodes[mesh_.outer_nodes.size() / 3];
    is_fixed_[rep_[2 * na]] = 1;
    is_fixed_[rep_[2 * na + 1]] = 1;
    const Vec2 d = mesh_.nodes[nb] - mesh_.nodes[na];
    const int comp = std::fabs(d.x) >= std::fabs(d.y) ? 1 : 0;
    is_fixed_[rep_[2 * nb + comp]] = 1;
  }

  reduced_.assign(n_dofs_, -1);
  free_list_.clear();
  fixed_list_.clear();
  for (int d = 0; d < n_dofs_; ++d) {
    if (rep_[d] != d) continue;  // not a representative
    if (is_fixed_[d]) {
      reduced_[d] = -2 - static_cast<int>(fixed_list_.size());
      fixed_list_.push_back(d);
    } else {
      reduced_[d] = static_cast<int>(free_list_.size());
      free_list_.push_back(d);
    }
  }
}

void ElasticOperator::element_matrix(int t, Eigen::Matrix<double, 12, 12>* K,
                                     int* ndof) const {
  const ElementGeom g = element_geom(mesh_, mesh_.tris[t]);
  const double l = mat_.lambda, mu = mat_.mu;
  // D for strain vector (exx, eyy, gxy).
  const double d00 = l + 2.0 * mu;

  if (order_ == 1) {
    *ndof = 6;
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
      B(0, 2 * i) = g.grad[i].x;
      B(1, 2 * i + 1) = g.grad[i].y;
      B(2, 2 * i) = g.grad[i].y;
      B(2, 2 * i + 1) = g.grad[i].x;
    }
    Eigen::Matrix3d D;
    D << d00, l, 0.0, l, d00, 0.0, 0.0, 0.0, mu;
    K->topLeftCorner<6, 6>() = g.area * B.transpose() * D * B;
    return;
  }

  *ndof = 12;
  K->setZero();
  Eigen::Matrix3d D;
  D << d00, l, 0.0, l, d00, 0.0, 0.0, 0.0, mu;
  // Midedge quadrature, exact for the quadratic element's linear strains.
  static const double qp[3][3] = {
      {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  for (int q = 0; q < 3; ++q) {
    const double lam[3] = {qp[q][0], qp[q][1], qp[q][2]};
    Eigen::Matrix<double, 3, 12> B = Eigen::Matrix<double, 3, 12>::Zero();
    auto add = [&](int slot, const Vec2& gr) {
      B(0, 2 * slot) += gr.x;
      B(1, 2 * slot + 1) += gr.y;
      B(2, 2 * slot) += gr.y;
      B(2, 2 * slot + 1) += gr.x;
    };
    for (int i = 0; i < 3; ++i)
      add(i, g.grad[i] * (4.0 * lam[i] - 1.0));
    // Edge slot e is opposite vertex e; shape 4 lam_j lam_k.
    for (int e = 0; e < 3; ++e) {
      const int j = (e + 1) % 3, k = (e + 2) % 3;
      add(3 + e, g.grad[j] * (4.0 * lam[k]) + g.grad[k] * (4.0 * lam[j]));
    }
    *K += (g.area / 3.0) * B.transpose() * D * B;
  }
}

void ElasticOperator::assemble() {
  const int nf = static_cast<int>(free_list_.size());
  const int nc = static_cast<int>(fixed_list_.size());
  std::vector<Eigen::Triplet<double>> tff, tfc;
  tff.reserve(mesh_.tri_count() * 40);

  Eigen::Matrix<double, 12, 12> Ke;
  int ndof = 0;
  for (int t = 0; t < mesh_.tri_count(); ++t) {
    element_matrix(t, &Ke, &ndof);
    const auto& en = elem_nodes_[t];
    int dofs[12];
    for (int i = 0; i < ndof / 2; ++i) {
      dofs[2 * i] = 2 * en[i];
      dofs[2 * i + 1] = 2 * en[i] + 1;
    }
    for (int i = 0; i < ndof; ++i) {
      const int ri = rep_[dofs[i]];
      const int pi = reduced_[ri];
      if (pi < 0) continue;  // fixed row
      for (int j = 0; j < ndof; ++j) {
        const int rj = rep_[dofs[j]];
        const int pj = reduced_[rj];
        if (pj >= 0)
          tff.emplace_back(pi, pj, Ke(i, j));
        else
          tfc.emplace_back(pi, -2 - pj, Ke(i, j));
      }
    }
  }
  K_ff_.resize(nf, nf);
  K_ff_.setFromTriplets(tff.begin(), tff.end());
  K_fc_.resize(nf, nc);
  K_fc_.setFromTriplets(tfc.begin(), tfc.end());

  llt_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  llt_->compute(K_ff_);
  if (llt_->info() != Eigen::Success)
    throw NumericalError("stiffness factorization failed");
}

FemSolution ElasticOperator::solve_boundary(const BoundaryFn& g) const {
  if (!dirichlet_outer_)
    throw ConfigError("operator was built without a Dirichlet boundary");
  const int nc = static_cast<int>(fixed_list_.size());
  Eigen::VectorXd gc(nc);

  // Values per fixed representative, side-aware on duplicated face nodes.
  std::vector<int> side(n_scalar_, -1);
  for (int j = 0; j < mesh_.arm_count; ++j) {
    const auto& tr = mesh_.faces[j];
    for (size_t i = 0; i < tr.cw_ids.size(); ++i) {
      if (tr.cw_ids[i] != tr.ccw_ids[i]) {
        side[tr.cw_ids[i]] = 0;
        side[tr.ccw_ids[i]] = 1;
      }
    }
  }
  for (int c = 0; c < nc; ++c) {
    const int rd = fixed_list_[c];
    const int s = rd / 2;
    const Vec2 p = side_nudge(dof_position(s), side[s]);
    const Vec2 v = g(p);
    gc(c) = (rd % 2 == 0) ? v.x : v.y;
  }

  Eigen::VectorXd rhs = -(K_fc_ * gc);
  Eigen::VectorXd uf = llt_->solve(rhs);
  if (llt_->info() != Eigen::Success)
    throw NumericalError("linear solve failed");

  FemSolution sol;
  sol.u.resize(n_dofs_);
  for (int d = 0; d < n_dofs_; ++d) {
    const int rd = rep_[d];
    const int p = reduced_[rd];
    sol.u[d] = p >= 0 ? uf[p] : gc[-2 - p];
  }
  sol.energy = energy(sol.u);
  return sol;
}

FemSolution ElasticOperator::solve_load(const Eigen::VectorXd& load) const {
  if (load.size() != n_dofs_) throw ConfigError("load vector size mismatch");
  const int nf = static_cast<int>(free_list_.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for (int d = 0; d < n_dofs_; ++d) {
    const int p = reduced_[rep_[d]];
    if (p >= 0) rhs[p] += load[d];
  }
  Eigen::VectorXd uf = llt_->solve(rhs);
  if (llt_->info() != Eigen::Success)
    throw NumericalError("linear solve failed");
  FemSolution sol;
  sol.u.resize(n_dofs_);
  for (int d = 0; d < n_dofs_; ++d) {
    const int p = reduced_[rep_[d]];
    sol.u[d] = p >= 0 ? uf[p] : 0.0;
  }
  sol.energy = energy(sol.u);
  return sol;
}

double ElasticOperator::energy(const Eigen::VectorXd& u) const {
  if (u.size() != n_dofs_) throw ConfigError("dof vector size mismatch");
  double E = 0.0;
  Eigen::Matrix<double, 12, 12> Ke;
  int ndof = 0;
  Eigen::Matrix<double, 12, 1> ue;
  for (int t = 0; t < mesh_.tri_count(); ++t) {
    element_matrix(t, &Ke, &ndof);
    const auto& en = elem_nodes_[t];
    for (int i = 0; i < ndof / 2; ++i) {
      ue[2 * i] = u[2 * en[i]];
      ue[2 * i + 1] = u[2 * en[i] + 1];
    }
    E += 0.5 * ue.head(ndof).dot(Ke.topLeftCorner(ndof, ndof) * ue.head(ndof));
  }
  return E;
}

Eigen::VectorXd ElasticOperator::interpolate(const BoundaryFn& f) const {
  std::vector<int> side(n_scalar_, -1);
  for (int j = 0; j < mesh_.arm_count; ++j) {
    const auto& tr = mesh_.faces[j];
    for (size_t i = 0; i < tr.cw_ids.size(); ++i) {
      if (tr.cw_ids[i] != tr.ccw_ids[i]) {
        side[tr.cw_ids[i]] = 0;
        side[tr.ccw_ids[i]] = 1;
      }
    }
  }
  if (order_ == 2) {
    const int nv = mesh_.node_count();
    for (size_t e = 0; e < edge_nodes_.size(); ++e) {
      const int sa = side[edge_nodes_[e].first];
      const int sb = side[edge_nodes_[e].second];
      if (sa >= 0 && sa == sb) side[nv + e] = sa;
      // Mixed-side face edges only occur along a face, same side by
      // construction; tip-adjacent edges inherit the non-tip side.
      else if (sa >= 0 && sb < 0)
        side[nv + e] = -1;
    }
  }
  Eigen::VectorXd u(n_dofs_);
  for (int s = 0; s < n_scalar_; ++s) {
    const Vec2 v = f(side_nudge(dof_position(s), side[s]));
    u[2 * s] = v.x;
    u[2 * s + 1] = v.y;
  }
  return u;
}

SymTensor2 ElasticOperator::strain_at_centroid(const Eigen::VectorXd& u,
                                               int t) const {
  const ElementGeom g = element_geom(mesh_, mesh_.tris[t]);
  const auto& en = elem_nodes_[t];
  Mat2 J{};
  if (order_ == 1) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 ui{u[2 * en[i]], u[2 * en[i] + 1]};
      J.a11 += ui.x * g.grad[i].x;
      J.a12 += ui.x * g.grad[i].y;
      J.a21 += ui.y * g.grad[i].x;
      J.a22 += ui.y * g.grad[i].y;
    }
  } else {
    const double lam = 1.0 / 3.0;
    Vec2 gr[6];
    for (int i = 0; i < 3; ++i) gr[i] = g.grad[i] * (4.0 * lam - 1.0);
    for (int e = 0; e < 3; ++e) {
      const int j = (e + 1) % 3, k = (e + 2) % 3;
      gr[3 + e] = g.grad[j] * (4.0 * lam) + g.grad[k] * (4.0 * lam);
    }
    for (int i = 0; i < 6; ++i) {
      const Vec2 ui{u[2 * en[i]], u[2 * en[i] + 1]};
      J.a11 += ui.x * gr[i].x;
      J.a12 += ui.x * gr[i].y;
      J.a21 += ui.y * gr[i].x;
      J.a22 += ui.y * gr[i].y;
    }
  }
  return sym(J);
}

double energy_in_ball(const ElasticOperator& op, const Eigen::VectorXd& u,
                      double rho) {
  const CrackMesh& m = op.mesh();
  double E = 0.0;
  for (int t = 0; t < m.tri_count(); ++t) {
    if (m.tri_centroid(t).norm() >= rho) continue;
    const SymTensor2 e = op.strain_at_centroid(u, t);
    E += m.tri_area(t) * op.material().energy_density(e);
  }
  return E;
}

double stress_sq_in_ball(const ElasticOperator& op, const Eigen::VectorXd& u,
                         double rho) {
  const CrackMesh& m = op.mesh();
  double S = 0.0;
  for (int t = 0; t < m.tri_count(); ++t) {
    if (m.tri_centroid(t).norm() >= rho) continue;
    const SymTensor2 s = op.material().stress(op.strain_at_centroid(u, t));
    S += m.tri_area(t) * s.norm2();
  }
  return S;
}

double ring_flux(const ElasticOperator& op, const Eigen::VectorXd& u, double r,
                 const BoundaryFn& v, bool inside) {
  const CrackMesh& m = op.mesh();
  int best = -1;
  double bd = 1e300;
  for (size_t k = 0; k < m.rings.size(); ++k) {
    const double d = std::fabs(m.rings[k].r - r);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(k);
    }
  }
  if (best < 0) throw NumericalError("mesh has no rings");
  const auto& ring = m.rings[best];

  // Edge -> adjacent triangles.
  std::unordered_map<long long, std::pair<int, int>> adj;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | b;
  };
  for (int t = 0; t < m.tri_count(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const long long k2 = key(m.tris[t][e], m.tris[t][(e + 1) % 3]);
      auto it = adj.find(k2);
      if (it == adj.end())
        adj[k2] = {t, -1};
      else
        it->second.second = t;
    }
  }

  // Ring node ids per slot, both sides. Rebuild ccw ids from face pairs.
  std::unordered_map<int, int> ccw_of;
  for (const auto& pr : m.face_pairs) ccw_of[pr.first] = pr.second;

  const int n = static_cast<int>(ring.ids.size());
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    int a = ring.ids[t];
    const int b = ring.ids[(t + 1) % n];
    // Leaving a duplicated barrier slot counterclockwise uses its ccw copy.
    auto it = ccw_of.find(a);
    int a_ccw = it == ccw_of.end() ? a : it->second;
    long long k2 = key(a_ccw, b);
    auto at = adj.find(k2);
    if (at == adj.end()) {
      k2 = key(a, b);
      at = adj.find(k2);
      a_ccw = a;
    }
    if (at == adj.end())
      throw NumericalError("ring edge missing from the mesh");
    // Pick the adjacent triangle by centroid radius relative to the ring.
    int tri = at->second.first;
    if (at->second.second >= 0) {
      const double c1 = m.tri_centroid(at->second.first).norm();
      const double c2 = m.tri_centroid(at->second.second).norm();
      const bool first_inside = c1 < c2;
      tri = (first_inside == inside) ? at->second.first : at->second.second;
    }
    const SymTensor2 s = op.material().stress(op.strain_at_centroid(u, tri));

    const Vec2 pa = m.nodes[a_ccw], pb = m.nodes[b];
    const Vec2 tang = pb - pa;
    const double len = tang.norm();
    Vec2 nu{tang.y / len, -tang.x / len};  // outward for ccw ordering
    const Vec2 mid = (pa + pb) * 0.5;
    if (nu.dot(mid) < 0.0) nu = -nu;
    const Vec2 f = s.apply(nu);
    // Simpson along the edge; endpoints pulled inward for side safety.
    const double sshift = 1e-6;
    const Vec2 qa = pa + (mid - pa) * sshift;
    const Vec2 qb = pb + (mid - pb) * sshift;
    const Vec2 vi = v(qa) + v(qb) + v(mid) * 4.0;
    total += len * f.dot(vi) / 6.0;
  }
  return total;
}

double flux_balance_check(const ElasticOperator& op, const Eigen::VectorXd& u,
                          const BoundaryFn& v, double r, double* scale) {
  const CrackMesh& m = op.mesh();
  const Eigen::VectorXd vh = op.interpolate(v);
  double bulk = 0.0, mag = 0.0;
  for (int t = 0; t < m.tri_count(); ++t) {
    if (m.tri_centroid(t).norm() <= r) continue;
    const double area = m.tri_area(t);
    const SymTensor2 s = op.material().stress(op.strain_at_centroid(u, t));
    const SymTensor2 ev = op.strain_at_centroid(vh, t);
    bulk += area * s.contract(ev);
    mag += area * std::sqrt(s.norm2() * ev.norm2());
  }
  if (scale) *scale = mag;
  return std::fabs(bulk + ring_flux(op, u, r, v, false));
}

Vec2 eval_displacement(const ElasticOperator& op, const PointLocator& loc,
                       const Eigen::VectorXd& u, const Vec2& p, int side) {
  const PointLocator::Hit hit = loc.locate(p, side);
  const auto& en = op.element_nodes()[hit.tri];
  const double l[3] = {hit.bary[0], hit.bary[1], hit.bary[2]};
  Vec2 out{0.0, 0.0};
  if (op.order() == 1) {
    for (int i = 0; i < 3; ++i)
      out += Vec2{u[2 * en[i]], u[2 * en[i] + 1]} * l[i];
    return out;
  }
  double N[6];
  for (int i = 0; i < 3; ++i) N[i] = l[i] * (2.0 * l[i] - 1.0);
  for (int e = 0; e < 3; ++e) N[3 + e] = 4.0 * l[(e + 1) % 3] * l[(e + 2) % 3];
  for (int i = 0; i < 6; ++i)
    out += Vec2{u[2 * en[i]], u[2 * en[i] + 1]} * N[i];
  return out;
}

void ElasticOperator::accumulate_stress_volume_load(const StressFn& sig,
                                                    double rho,
                                                    Eigen::VectorXd* load) const {
  if (!load || load->size() != n_dofs_)
    throw ConfigError("load vector has the wrong size");
  static const double qp[3][3] = {
      {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  for (int t = 0; t < mesh_.tri_count(); ++t) {
    if (mesh_.tri_centroid(t).norm() >= rho) continue;
    const ElementGeom g = element_geom(mesh_, mesh_.tris[t]);
    const auto& en = elem_nodes_[t];
    const Vec2 centroid = mesh_.tri_centroid(t);
    for (int q = 0; q < 3; ++q) {
      const double lam[3] = {qp[q][0], qp[q][1], qp[q][2]};
      Vec2 x{0.0, 0.0};
      for (int i = 0; i < 3; ++i) x += mesh_.nodes[mesh_.tris[t][i]] * lam[i];
      // Crack-face quadrature points get pulled toward the centroid so the
      // analytic field is evaluated on this element's side of the cut.
      const SymTensor2 s = sig(x + (centroid - x) * 1e-9);
      const double w = g.area / 3.0;
      if (order_ == 1) {
        for (int i = 0; i < 3; ++i) {
          const Vec2 f = s.apply(g.grad[i]) * w;
          (*load)[2 * en[i]] += f.x;
          (*load)[2 * en[i] + 1] += f.y;
        }
      } else {
        for (int i = 0; i < 3; ++i) {
          const Vec2 gr = g.grad[i] * (4.0 * lam[i] - 1.0);
          const Vec2 f = s.apply(gr) * w;
          (*load)[2 * en[i]] += f.x;
          (*load)[2 * en[i] + 1] += f.y;
        }
        for (int e = 0; e < 3; ++e) {
          const int j = (e + 1) % 3, k = (e + 2) % 3;
          const Vec2 gr = g.grad[j] * (4.0 * lam[k]) + g.grad[k] * (4.0 * lam[j]);
          const Vec2 f = s.apply(gr) * w;
          (*load)[2 * en[3 + e]] += f.x;
          (*load)[2 * en[3 + e] + 1] += f.y;
        }
      }
    }
  }
}

void ElasticOperator::accumulate_ring_traction_load(const StressFn& sig,
                                                    double r,
                                                    Eigen::VectorXd* load) const {
  if (!load || load->size() != n_dofs_)
    throw ConfigError("load vector has the wrong size");
  const CrackMesh& m = mesh_;
  int best = -1;
  double bd = 1e300;
  for (size_t k = 0; k < m.rings.size(); ++k) {
    const double d = std::fabs(m.rings[k].r - r);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(k);
    }
  }
  if (best < 0) throw NumericalError("mesh has no rings");
  const auto& ring = m.rings[best];

  std::unordered_map<int, int> ccw_of;
  for (const auto& pr : m.face_pairs) ccw_of[pr.first] = pr.second;

  std::unordered_map<long long, int> edge_index;
  if (order_ == 2) {
    for (size_t e = 0; e < edge_nodes_.size(); ++e) {
      const long long key =
          (static_cast<long long>(edge_nodes_[e].first) << 32) |
          edge_nodes_[e].second;
      edge_index.emplace(key, static_cast<int>(e));
    }
  }
  const int nv = m.node_count();
  auto edge_node = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    auto it = edge_index.find((static_cast<long long>(a) << 32) | b);
    if (it == edge_index.end())
      throw NumericalError("ring edge missing a midedge node");
    return nv + it->second;
  };

  // 3-point Gauss on [0, 1].
  static const double gx[3] = {0.5 - std::sqrt(0.15), 0.5,
                               0.5 + std::sqrt(0.15)};
  static const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

  const int n = static_cast<int>(ring.ids.size());
  for (int t = 0; t < n; ++t) {
    const int a = ring.ids[t];
    const int b = ring.ids[(t + 1) % n];
    auto it = ccw_of.find(a);
    const int a_ccw = it == ccw_of.end() ? a : it->second;
    const Vec2 pa = m.nodes[a_ccw], pb = m.nodes[b];
    const Vec2 tang = pb - pa;
    const double len = tang.norm();
    if (len == 0.0) continue;
    Vec2 nu{tang.y / len, -tang.x / len};
    const Vec2 mid = (pa + pb) * 0.5;
    if (nu.dot(mid) < 0.0) nu = -nu;
    const int em = order_ == 2 ? edge_node(a_ccw, b) : -1;
    for (int q = 0; q < 3; ++q) {
      const double xi = gx[q];
      const Vec2 x = pa + tang * xi;
      const Vec2 f = sig(x).apply(nu) * (gw[q] * len);
      if (order_ == 1) {
        const double Na = 1.0 - xi, Nb = xi;
        (*load)[2 * a_ccw] += Na * f.x;
        (*load)[2 * a_ccw + 1] += Na * f.y;
        (*load)[2 * b] += Nb * f.x;
        (*load)[2 * b + 1] += Nb * f.y;
      } else {
        const double Na = (1.0 - xi) * (1.0 - 2.0 * xi);
        const double Nb = xi * (2.0 * xi - 1.0);
        const double Nm = 4.0 * xi * (1.0 - xi);
        (*load)[2 * a_ccw] += Na * f.x;
        (*load)[2 * a_ccw + 1] += Na * f.y;
        (*load)[2 * b] += Nb * f.x;
        (*load)[2 * b + 1] += Nb * f.y;
        (*load)[2 * em] += Nm * f.x;
        (*load)[2 * em + 1] += Nm * f.y;
      }
    }
  }
}

}  // namespace cracktip
