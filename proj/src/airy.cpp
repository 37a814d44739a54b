#include "cracktip/airy.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "cracktip/errors.hpp"

namespace cracktip {

namespace {

struct ScalarGeom {
  double area;
  Vec2 grad[3];
};

ScalarGeom scalar_geom(const CrackMesh& m, const std::array<int, 3>& T) {
  const Vec2 a = m.nodes[T[0]], b = m.nodes[T[1]], c = m.nodes[T[2]];
  const double det = (b - a).cross(c - a);
  ScalarGeom g;
  g.area = 0.5 * det;
  g.grad[0] = Vec2{b.y - c.y, c.x - b.x} / det;
  g.grad[1] = Vec2{c.y - a.y, a.x - c.x} / det;
  g.grad[2] = Vec2{a.y - b.y, b.x - a.x} / det;
  return g;
}

// Least-squares potential: minimizes sum_e area |grad p - g_e|^2 with one
// pinned vertex, i.e. a Poisson solve with source div g.
class PotentialSolver {
 public:
  PotentialSolver(const CrackMesh& m, int pin) : mesh_(m), pin_(pin) {
    const int n = m.node_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.tri_count() * 9);
    for (int t = 0; t < m.tri_count(); ++t) {
      const ScalarGeom g = scalar_geom(m, m.tris[t]);
      for (int i = 0; i < 3; ++i) {
        const int vi = m.tris[t][i];
        if (vi == pin_) continue;
        for (int j = 0; j < 3; ++j) {
          const int vj = m.tris[t][j];
          if (vj == pin_) continue;
          trips.emplace_back(row(vi), row(vj),
                             g.area * g.grad[i].dot(g.grad[j]));
        }
      }
    }
    K_.resize(n - 1, n - 1);
    K_.setFromTriplets(trips.begin(), trips.end());
    llt_.compute(K_);
    if (llt_.info() != Eigen::Success)
      throw NumericalError("potential factorization failed");
  }

  // g_e given per element; returns vertex potential with p[pin] = 0.
  Eigen::VectorXd solve(const std::vector<Vec2>& g_e) const {
    const int n = mesh_.node_count();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
    for (int t = 0; t < mesh_.tri_count(); ++t) {
      const ScalarGeom g = scalar_geom(mesh_, mesh_.tris[t]);
      for (int i = 0; i < 3; ++i) {
        const int vi = mesh_.tris[t][i];
        if (vi == pin_) continue;
        rhs[row(vi)] += g.area * g_e[t].dot(g.grad[i]);
      }
    }
    Eigen::VectorXd x = llt_.solve(rhs);
    if (llt_.info() != Eigen::Success)
      throw NumericalError("potential solve failed");
    Eigen::VectorXd p(n);
    for (int v = 0; v < n; ++v)
      p[v] = v == pin_ ? 0.0 : x[row(v)];
    return p;
  }

  double misfit2(const Eigen::VectorXd& p, const std::vector<Vec2>& g_e,
                 double* ref2) const {
    double num = 0.0, den = 0.0;
    for (int t = 0; t < mesh_.tri_count(); ++t) {
      const ScalarGeom g = scalar_geom(mesh_, mesh_.tris[t]);
      Vec2 gp{0.0, 0.0};
      for (int i = 0; i < 3; ++i) gp += g.grad[i] * p[mesh_.tris[t][i]];
      num += g.area * (gp - g_e[t]).norm2();
      den += g.area * g_e[t].norm2();
    }
    if (ref2) *ref2 = den;
    return num;
  }

 private:
  int row(int v) const { return v < pin_ ? v : v - 1; }
  const CrackMesh& mesh_;
  int pin_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

// Edge-increment least squares: minimizes sum over mesh edges of
// (w_b - w_a - t_e)^2 with one pinned vertex. Used for the second-stage
// potential, whose target gradient is itself a vertex field: the trapezoid
// increment of a linear gradient along a straight edge is exact, so
// quadratic potentials are recovered nodewise exactly.
class IncrementSolver {
 public:
  IncrementSolver(const CrackMesh& m, int pin) : mesh_(m), pin_(pin) {
    const int n = m.node_count();
    std::unordered_map<long long, int> seen;
    for (int t = 0; t < m.tri_count(); ++t) {
      for (int e = 0; e < 3; ++e) {
        int a = m.tris[t][e], b = m.tris[t][(e + 1) % 3];
        if (a > b) std::swap(a, b);
        const long long key = (static_cast<long long>(a) << 32) | b;
        if (seen.emplace(key, static_cast<int>(edges_.size())).second)
          edges_.push_back({a, b});
      }
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges_.size() * 4);
    for (const auto& [a, b] : edges_) {
      if (a != pin_) trips.emplace_back(row(a), row(a), 1.0);
      if (b != pin_) trips.emplace_back(row(b), row(b), 1.0);
      if (a != pin_ && b != pin_) {
        trips.emplace_back(row(a), row(b), -1.0);
        trips.emplace_back(row(b), row(a), -1.0);
      }
    }
    K_.resize(n - 1, n - 1);
    K_.setFromTriplets(trips.begin(), trips.end());
    llt_.compute(K_);
    if (llt_.info() != Eigen::Success)
      throw NumericalError("potential factorization failed");
  }

  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Edge targets t_e ordered like edges(); returns w with w[pin] = 0.
  Eigen::VectorXd solve(const std::vector<double>& t) const {
    const int n = mesh_.node_count();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
    for (size_t e = 0; e < edges_.size(); ++e) {
      const auto& [a, b] = edges_[e];
      if (a != pin_) rhs[row(a)] -= t[e];
      if (b != pin_) rhs[row(b)] += t[e];
    }
    Eigen::VectorXd x = llt_.solve(rhs);
    if (llt_.info() != Eigen::Success)
      throw NumericalError("potential solve failed");
    Eigen::VectorXd w(n);
    for (int v = 0; v < n; ++v)
      w[v] = v == pin_ ? 0.0 : x[row(v)];
    return w;
  }

 private:
  int row(int v) const { return v < pin_ ? v : v - 1; }
  const CrackMesh& mesh_;
  int pin_;
  std::vector<std::pair<int, int>> edges_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

// Nodal gradient recovery by local fits. The increment of w along a mesh
// edge samples the directional derivative exactly at the edge midpoint
// whenever w is quadratic (midpoint rule), so fitting an affine gradient
// g(x) = g_v + H (x - x_v) with symmetric H through nearby edges
// reproduces quadratic potentials exactly on any mesh. One-sided patches
// along the slit can be too small for the full fit; those are widened by
// the triangles around the neighbouring vertices (connectivity never
// crosses the slit, so the patch stays on its side). Vertices that still
// lack a well-posed fit fall back to a constant fit, then to the
// area-weighted average of adjacent element gradients.
std::vector<Vec2> recover_gradient(const CrackMesh& m,
                                   const Eigen::VectorXd& w) {
  const int n = m.node_count();
  std::vector<std::vector<int>> vt(n);
  for (int t = 0; t < m.tri_count(); ++t)
    for (int v : m.tris[t]) vt[v].push_back(t);

  std::vector<Vec2> g(n, Vec2{0.0, 0.0});
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < n; ++v) {
    auto add_patch = [&](const std::vector<int>& patch) {
      for (int t : patch) {
        for (int e = 0; e < 3; ++e) {
          int a = m.tris[t][e], b = m.tris[t][(e + 1) % 3];
          if (a > b) std::swap(a, b);
          bool dup = false;
          for (const auto& pr : edges)
            dup = dup || (pr.first == a && pr.second == b);
          if (!dup) edges.push_back({a, b});
        }
      }
    };
    const Vec2 xv = m.nodes[v];
    // Rows: tau . g + tau^T H d = (w_b - w_a)/|e|, d = midpoint - x_v.
    auto quadratic_fit = [&]() -> bool {
      const int ne = static_cast<int>(edges.size());
      if (ne < 5) return false;
      Eigen::MatrixXd A(ne, 5);
      Eigen::VectorXd rhs(ne);
      double hloc = 0.0;
      for (int e = 0; e < ne; ++e) {
        const Vec2 pa = m.nodes[edges[e].first], pb = m.nodes[edges[e].second];
        const Vec2 dl = pb - pa;
        const double len = dl.norm();
        const Vec2 tau = dl / len;
        const Vec2 d = (pa + pb) * 0.5 - xv;
        A(e, 0) = tau.x;
        A(e, 1) = tau.y;
        A(e, 2) = tau.x * d.x;
        A(e, 3) = tau.y * d.y;
        A(e, 4) = tau.x * d.y + tau.y * d.x;
        rhs[e] = (w[edges[e].second] - w[edges[e].first]) / len;
        hloc = std::fmax(hloc, len);
      }
      // Balance the hessian columns against the gradient columns.
      A.rightCols(3) /= hloc;
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      qr.setThreshold(1e-8);
      if (qr.rank() != 5) return false;
      const Eigen::VectorXd u = qr.solve(rhs);
      g[v] = {u[0], u[1]};
      return true;
    };

    edges.clear();
    add_patch(vt[v]);
    if (edges.empty()) continue;
    bool done = quadratic_fit();
    if (!done) {
      std::vector<int> nbrs;
      for (const auto& pr : edges) {
        nbrs.push_back(pr.first);
        nbrs.push_back(pr.second);
      }
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
      for (int u : nbrs) add_patch(vt[u]);
      done = quadratic_fit();
    }
    if (!done) {
      Eigen::Matrix2d N = Eigen::Matrix2d::Zero();
      Eigen::Vector2d b = Eigen::Vector2d::Zero();
      for (const auto& pr : edges) {
        const Vec2 dl = m.nodes[pr.second] - m.nodes[pr.first];
        const double len = dl.norm();
        const Eigen::Vector2d tau(dl.x / len, dl.y / len);
        N += tau * tau.transpose();
        b += tau * ((w[pr.second] - w[pr.first]) / len);
      }
      if (std::fabs(N.determinant()) > 1e-12) {
        const Eigen::Vector2d u = N.ldlt().solve(b);
        g[v] = {u[0], u[1]};
        done = true;
      }
    }
    if (!done) {
      double wt = 0.0;
      for (int t : vt[v]) {
        const ScalarGeom sg = scalar_geom(m, m.tris[t]);
        Vec2 gw{0.0, 0.0};
        for (int i = 0; i < 3; ++i) gw += sg.grad[i] * w[m.tris[t][i]];
        g[v] += gw * sg.area;
        wt += sg.area;
      }
      if (wt > 0.0) g[v] = g[v] / wt;
    }
  }
  return g;
}

}  // namespace

AiryRecovery reconstruct_airy(const ElasticOperator& op,
                              const Eigen::VectorXd& u, int pin_node) {
  const CrackMesh& m = op.mesh();
  if (pin_node < 0) pin_node = m.origin_nodes.front();
  if (pin_node >= m.node_count()) throw ConfigError("bad pin node");

  // Element stress sources.
  std::vector<Vec2> g1(m.tri_count()), g2(m.tri_count());
  for (int t = 0; t < m.tri_count(); ++t) {
    const SymTensor2 s = op.material().stress(op.strain_at_centroid(u, t));
    g1[t] = {s.yy, -s.xy};
    g2[t] = {-s.xy, s.xx};
  }

  PotentialSolver solver(m, pin_node);
  AiryRecovery rec;
  rec.pin_node = pin_node;
  rec.p1 = solver.solve(g1);
  rec.p2 = solver.solve(g2);

  double ref1 = 0.0, ref2 = 0.0;
  const double m1 = solver.misfit2(rec.p1, g1, &ref1);
  const double m2 = solver.misfit2(rec.p2, g2, &ref2);
  rec.potential_misfit =
      (ref1 + ref2) > 0.0 ? std::sqrt((m1 + m2) / (ref1 + ref2)) : 0.0;

  // The target gradient (p1, p2) is a vertex field, so w is matched along
  // edges; quadratic potentials (constant stress) come out nodewise exact.
  IncrementSolver inc(m, pin_node);
  const auto& edges = inc.edges();
  std::vector<double> t(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    const auto& [a, b] = edges[e];
    const Vec2 d = m.nodes[b] - m.nodes[a];
    t[e] = 0.5 * ((rec.p1[a] + rec.p1[b]) * d.x + (rec.p2[a] + rec.p2[b]) * d.y);
  }
  rec.w = inc.solve(t);
  double num = 0.0, den = 0.0;
  for (size_t e = 0; e < edges.size(); ++e) {
    const auto& [a, b] = edges[e];
    const double r = rec.w[b] - rec.w[a] - t[e];
    num += r * r;
    den += t[e] * t[e];
  }
  rec.airy_misfit = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return rec;
}

double airy_hessian_misfit(const ElasticOperator& op, const Eigen::VectorXd& u,
                           const AiryRecovery& rec, bool interior_only,
                           double rho) {
  const CrackMesh& m = op.mesh();
  std::vector<char> skip(m.node_count(), 0);
  if (interior_only) {
    for (int v : m.outer_nodes) skip[v] = 1;
    for (const auto& pr : m.face_pairs) skip[pr.first] = skip[pr.second] = 1;
    for (int v : m.origin_nodes) skip[v] = 1;
    for (const auto& tr : m.faces)
      for (size_t i = 0; i < tr.cw_ids.size(); ++i) {
        skip[tr.cw_ids[i]] = 1;
        skip[tr.ccw_ids[i]] = 1;
      }
  }
  const std::vector<Vec2> G = recover_gradient(m, rec.w);
  double num = 0.0, den = 0.0;
  for (int t = 0; t < m.tri_count(); ++t) {
    const auto& T = m.tris[t];
    if (interior_only && (skip[T[0]] || skip[T[1]] || skip[T[2]]))
      continue;
    if (m.tri_centroid(t).norm() > rho) continue;
    const ScalarGeom sg = scalar_geom(m, m.tris[t]);
    Mat2 H{};
    for (int i = 0; i < 3; ++i) {
      H.a11 += G[T[i]].x * sg.grad[i].x;
      H.a12 += G[T[i]].x * sg.grad[i].y;
      H.a21 += G[T[i]].y * sg.grad[i].x;
      H.a22 += G[T[i]].y * sg.grad[i].y;
    }
    const SymTensor2 implied = stress_from_airy_hessian(H);
    const SymTensor2 direct =
        op.material().stress(op.strain_at_centroid(u, t));
    num += sg.area * (implied - direct).norm2();
    den += sg.area * direct.norm2();
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

TraceJumps airy_trace_jumps(const ElasticOperator& op,
                            const AiryRecovery& rec) {
  const CrackMesh& m = op.mesh();
  const std::vector<Vec2> G = recover_gradient(m, rec.w);
  double jw = 0.0, jg = 0.0, rw = 0.0, rg = 0.0;
  for (const auto& tr : m.faces) {
    for (size_t i = 0; i + 1 < tr.radii.size(); ++i) {
      const double ds = tr.radii[i + 1] - tr.radii[i];
      for (size_t k = i; k <= i + 1; ++k) {
        const double wgt = 0.5 * ds;
        const double dwv = rec.w[tr.cw_ids[k]] - rec.w[tr.ccw_ids[k]];
        const double wavg = 0.5 * (std::fabs(rec.w[tr.cw_ids[k]]) +
                                   std::fabs(rec.w[tr.ccw_ids[k]]));
        jw += wgt * dwv * dwv;
        rw += wgt * wavg * wavg;
        const Vec2 dgv = G[tr.cw_ids[k]] - G[tr.ccw_ids[k]];
        const Vec2 ga = (G[tr.cw_ids[k]] + G[tr.ccw_ids[k]]) * 0.5;
        jg += wgt * dgv.norm2();
        rg += wgt * ga.norm2();
      }
    }
  }
  TraceJumps out;
  out.w_jump = rw > 0.0 ? std::sqrt(jw / rw) : 0.0;
  out.grad_jump = rg > 0.0 ? std::sqrt(jg / rg) : 0.0;
  return out;
}

std::pair<double, double> arc_poincare_check(const ElasticOperator& op,
                                             const Eigen::VectorXd& u,
                                             double r) {
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
  std::unordered_map<int, int> ccw_of;
  for (const auto& pr : m.face_pairs) ccw_of[pr.first] = pr.second;

  const int n = static_cast<int>(ring.ids.size());
  double sup2 = 0.0, integral = 0.0;
  for (int t = 0; t < n; ++t) {
    const int a = ring.ids[t];
    const int b = ring.ids[(t + 1) % n];
    auto it = ccw_of.find(a);
    const int a_ccw = it == ccw_of.end() ? a : it->second;
    const Vec2 va{u[2 * a_ccw], u[2 * a_ccw + 1]};
    const Vec2 vb{u[2 * b], u[2 * b + 1]};
    const double ds = (m.nodes[b] - m.nodes[a_ccw]).norm();
    if (ds > 0.0) integral += (vb - va).norm2() / ds;
    sup2 = std::fmax(sup2, std::fmax(va.norm2(), vb.norm2()));
  }
  return {sup2, M_PI * ring.r * integral};
}

}  // namespace cracktip
