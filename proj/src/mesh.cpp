#include "cracktip/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "cracktip/errors.hpp"

namespace cracktip {

double CrackMesh::tri_area(int t) const {
  const auto& T = tris[t];
  return 0.5 * (nodes[T[1]] - nodes[T[0]]).cross(nodes[T[2]] - nodes[T[0]]);
}

Vec2 CrackMesh::tri_centroid(int t) const {
  const auto& T = tris[t];
  return (nodes[T[0]] + nodes[T[1]] + nodes[T[2]]) / 3.0;
}

std::vector<std::vector<Vec2>> decompose_arms(const CrackSet& crack) {
  const double tol = 1e-12 * std::fmax(1.0, crack.max_radius());
  std::vector<std::vector<Vec2>> arms;

  auto push_arm = [&](std::vector<Vec2> a) {
    if (a.size() < 2) return;
    a.front() = Vec2{0.0, 0.0};
    // Drop a second vertex that collapsed onto the origin.
    if (a[1].norm() <= tol) a.erase(a.begin() + 1);
    if (a.size() < 2) return;
    double prev = 0.0;
    for (size_t i = 1; i < a.size(); ++i) {
      const double r = a[i].norm();
      if (r <= prev + tol)
        throw ConfigError("crack arm is not radially monotone about the tip");
      prev = r;
    }
    arms.push_back(std::move(a));
  };

  for (const auto& chain : crack.chains()) {
    int vat = -1;
    for (size_t i = 0; i < chain.size(); ++i)
      if (chain[i].norm() <= tol) {
        vat = static_cast<int>(i);
        break;
      }
    if (vat >= 0) {
      std::vector<Vec2> head(chain.begin(), chain.begin() + vat + 1);
      std::reverse(head.begin(), head.end());
      push_arm(std::move(head));
      std::vector<Vec2> tail(chain.begin() + vat, chain.end());
      push_arm(std::move(tail));
    } else {
      int seg = -1;
      for (size_t i = 0; i + 1 < chain.size(); ++i)
        if (point_segment_distance({0.0, 0.0}, chain[i], chain[i + 1]) <= tol) {
          seg = static_cast<int>(i);
          break;
        }
      if (seg < 0)
        throw ConfigError("crack chain does not pass through the tip");
      std::vector<Vec2> head(chain.begin(), chain.begin() + seg + 1);
      std::reverse(head.begin(), head.end());
      head.insert(head.begin(), Vec2{0.0, 0.0});
      push_arm(std::move(head));
      std::vector<Vec2> tail(chain.begin() + seg + 1, chain.end());
      tail.insert(tail.begin(), Vec2{0.0, 0.0});
      push_arm(std::move(tail));
    }
  }
  if (arms.empty()) throw ConfigError("crack has no usable arms");
  return arms;
}

namespace {

struct Slot {
  double angle = 0.0;  // principal angle in (-pi, pi]
  int id_cw = -1;
  int id_ccw = -1;
  int arm = -1;  // -1 for plain fill nodes
};

struct RingBuild {
  double r = 0.0;
  std::vector<Slot> slots;  // sorted by angle
  std::vector<int> barrier_slot;  // arm -> slot index or -1
};

// Point on a radially monotone arm at distance r from the origin.
Vec2 arm_point(const std::vector<Vec2>& arm, double r) {
  for (size_t i = 0; i + 1 < arm.size(); ++i) {
    const double r0 = arm[i].norm(), r1 = arm[i + 1].norm();
    if (r > r1) continue;
    const Vec2 a = arm[i], d = arm[i + 1] - a;
    const double A = d.norm2(), B = a.dot(d), C = a.norm2() - r * r;
    const double disc = std::fmax(0.0, B * B - A * C);
    const double t = (-B + std::sqrt(disc)) / A;
    return a + d * std::fmin(1.0, std::fmax(0.0, t));
    (void)r0;
  }
  return arm.back();
}

std::vector<double> ring_radii(const MeshParams& P,
                               std::vector<double> mandatory) {
  const double R = P.radius;
  const double sref = P.size_ref > 0.0 ? P.size_ref : R;
  const double beta = std::log2(1.0 / P.grading);
  auto size_at = [&](double r) { return P.h * std::pow(r / sref, beta); };

  std::sort(mandatory.begin(), mandatory.end(), std::greater<double>());
  mandatory.erase(std::unique(mandatory.begin(), mandatory.end(),
                              [&](double a, double b) {
                                return std::fabs(a - b) <= 1e-12 * R;
                              }),
                  mandatory.end());
  // Keep strictly interior targets.
  std::vector<double> mand;
  for (double m : mandatory)
    if (m > 0.0 && m < R * (1.0 - 1e-12)) mand.push_back(m);

  double r_stop = P.r0_rel * sref;
  if (!mand.empty()) r_stop = std::fmin(r_stop, 0.3 * mand.back());

  std::vector<double> radii{R};
  double r = R;
  size_t mi = 0;
  while (true) {
    const double step = std::fmax(size_at(r), 1e-6 * P.h);
    if (r - step <= r_stop || step >= 0.8 * r) {
      while (mi < mand.size()) radii.push_back(mand[mi++]);
      break;
    }
    double next = r - step;
    if (mi < mand.size() && mand[mi] >= next - 0.4 * step) {
      next = mand[mi++];
      while (mi < mand.size() && mand[mi] >= next * (1.0 - 1e-12)) ++mi;
    }
    radii.push_back(next);
    r = next;
  }
  return radii;
}

struct Chain {
  std::vector<int> ids;
  std::vector<double> angles;  // unwrapped, nondecreasing
};

void add_tri(CrackMesh& M, int a, int b, int c) {
  const Vec2 pa = M.nodes[a], pb = M.nodes[b], pc = M.nodes[c];
  double area2 = (pb - pa).cross(pc - pa);
  if (area2 < 0.0) {
    std::swap(b, c);
    area2 = -area2;
  }
  if (!(area2 > 0.0))
    throw NumericalError("mesher produced a degenerate triangle");
  M.tris.push_back({a, b, c});
}

// Merge-triangulates the strip between two angle-monotone chains.
void triangulate_strip(CrackMesh& M, const Chain& inner, const Chain& outer) {
  size_t i = 0, j = 0;
  const size_t ni = inner.ids.size(), nj = outer.ids.size();
  if (ni < 1 || nj < 1 || ni + nj < 4)
    throw NumericalError("strip chains too short");
  while (i + 1 < ni || j + 1 < nj) {
    bool adv_inner;
    if (i + 1 >= ni)
      adv_inner = false;
    else if (j + 1 >= nj)
      adv_inner = true;
    else
      adv_inner = inner.angles[i + 1] <= outer.angles[j + 1];
    if (adv_inner) {
      add_tri(M, inner.ids[i], inner.ids[i + 1], outer.ids[j]);
      ++i;
    } else {
      add_tri(M, inner.ids[i], outer.ids[j + 1], outer.ids[j]);
      ++j;
    }
  }
}

}  // namespace

CrackMesh build_mesh(const CrackSet& crack, const MeshParams& P0) {
  MeshParams P = P0;
  if (!(P.radius > 0.0) || !(P.h > 0.0) || !(P.grading > 0.0) ||
      P.grading > 1.0 || !(P.aspect > 0.2) || !(P.r0_rel > 0.0))
    throw ConfigError("bad mesh parameters");
  const double R = P.radius;
  const double tol_eq = 1e-9 * R;

  auto arms = decompose_arms(crack);
  const int A = static_cast<int>(arms.size());
  std::vector<double> rho(A);
  for (int j = 0; j < A; ++j) {
    rho[j] = arms[j].back().norm();
    if (rho[j] > R + tol_eq)
      throw ConfigError("crack extends beyond the mesh domain");
    if (rho[j] > R - tol_eq) {
      // Snap the endpoint onto the outer circle.
      arms[j].back() = arms[j].back() * (R / rho[j]);
      rho[j] = R;
    }
  }

  std::vector<double> mandatory = P.mandatory_radii;
  for (int j = 0; j < A; ++j) {
    for (size_t i = 1; i + 1 < arms[j].size(); ++i)
      mandatory.push_back(arms[j][i].norm());
    if (rho[j] < R - tol_eq) mandatory.push_back(rho[j]);
  }
  const std::vector<double> radii = ring_radii(P, mandatory);
  const int n_rings = static_cast<int>(radii.size());

  CrackMesh M;
  M.radius = R;
  M.params = P;
  M.arm_count = A;
  M.faces.resize(A);

  auto new_node = [&](const Vec2& p) {
    M.nodes.push_back(p);
    return static_cast<int>(M.nodes.size()) - 1;
  };

  const double sref = P.size_ref > 0.0 ? P.size_ref : R;
  const double beta = std::log2(1.0 / P.grading);
  auto size_at = [&](double r) { return P.h * std::pow(r / sref, beta); };

  // Per-arm face records, collected outer-to-inner then reversed.
  struct FaceRec {
    double r;
    int cw, ccw;
  };
  std::vector<std::vector<FaceRec>> face_recs(A);

  std::vector<RingBuild> rings(n_rings);
  for (int k = 0; k < n_rings; ++k) {
    RingBuild& ring = rings[k];
    ring.r = radii[k];
    ring.barrier_slot.assign(A, -1);
    std::vector<Slot> slots;

    for (int j = 0; j < A; ++j) {
      if (rho[j] < ring.r - tol_eq) continue;
      const bool endpoint = rho[j] <= ring.r + tol_eq;
      const Vec2 p = endpoint ? arms[j].back() : arm_point(arms[j], ring.r);
      const bool dup = !endpoint || k == 0;
      Slot s;
      s.angle = std::atan2(p.y, p.x);
      s.arm = j;
      s.id_cw = new_node(p);
      s.id_ccw = dup ? new_node(p) : s.id_cw;
      if (dup) face_recs[j].push_back({ring.r, s.id_cw, s.id_ccw});
      slots.push_back(s);
    }

    std::sort(slots.begin(), slots.end(),
              [](const Slot& a, const Slot& b) { return a.angle < b.angle; });

    const int nb = static_cast<int>(slots.size());
    int target =
        std::max(P.min_ring_nodes,
                 static_cast<int>(std::lround(2.0 * M_PI * ring.r /
                                              (P.aspect * size_at(ring.r)))));
    // The outer circle is an inscribed polygon; keep it well resolved no
    // matter how coarse the graded size is there.
    if (k == 0)
      target = std::max(
          target, std::max(64, static_cast<int>(std::ceil(
                                   2.0 * M_PI * R / size_at(R)))));
    std::vector<Slot> filled;
    if (nb == 0) {
      for (int t = 0; t < target; ++t) {
        Slot s;
        s.angle = -M_PI + 2.0 * M_PI * t / target;
        const Vec2 p{ring.r * std::cos(s.angle), ring.r * std::sin(s.angle)};
        s.id_cw = s.id_ccw = new_node(p);
        filled.push_back(s);
      }
    } else {
      for (int b = 0; b < nb; ++b) {
        filled.push_back(slots[b]);
        const Slot& cur = slots[b];
        const Slot& nxt = slots[(b + 1) % nb];
        double gap = nxt.angle - cur.angle;
        if (b + 1 == nb) gap += 2.0 * M_PI;
        if (gap <= 1e-12) continue;
        const int nfill =
            std::max(1, static_cast<int>(std::lround(gap / (2.0 * M_PI) *
                                                     target)));
        for (int t = 1; t < nfill; ++t) {
          Slot s;
          double ang = cur.angle + gap * t / nfill;
          if (ang > M_PI) ang -= 2.0 * M_PI;
          const Vec2 p{ring.r * std::cos(ang), ring.r * std::sin(ang)};
          s.angle = ang;
          s.id_cw = s.id_ccw = new_node(p);
          filled.push_back(s);
        }
      }
      std::sort(filled.begin(), filled.end(),
                [](const Slot& a, const Slot& b) { return a.angle < b.angle; });
    }
    ring.slots = std::move(filled);
    for (int si = 0; si < static_cast<int>(ring.slots.size()); ++si)
      if (ring.slots[si].arm >= 0) ring.barrier_slot[ring.slots[si].arm] = si;
  }

  // Chain extraction: slots from barrier a (ccw side) around to barrier b
  // (cw side); with a == b the chain sweeps the full circle.
  auto sector_chain = [&](const RingBuild& ring, int arm_a, int arm_b) {
    Chain c;
    const auto& sl = ring.slots;
    const int n = static_cast<int>(sl.size());
    const int pa = ring.barrier_slot[arm_a];
    const int pb = ring.barrier_slot[arm_b];
    if (pa < 0 || pb < 0) throw NumericalError("missing barrier slot");
    const double base = sl[pa].angle;
    c.ids.push_back(sl[pa].id_ccw);
    c.angles.push_back(base);
    int t = pa;
    while (true) {
      t = (t + 1) % n;
      double ang = sl[t].angle;
      while (ang <= c.angles.back() - 1e-12) ang += 2.0 * M_PI;
      if (t == pb) {
        c.ids.push_back(sl[t].id_cw);
        c.angles.push_back(arm_a == arm_b ? base + 2.0 * M_PI : ang);
        break;
      }
      c.ids.push_back(sl[t].id_cw);  // plain or endpoint slots: single id
      c.angles.push_back(ang);
    }
    return c;
  };

  // Closed full-circle chain starting near the given base angle.
  auto circle_chain = [&](const RingBuild& ring, double base) {
    Chain c;
    const auto& sl = ring.slots;
    const int n = static_cast<int>(sl.size());
    int start = 0;
    double best = 1e30;
    for (int t = 0; t < n; ++t) {
      double d = sl[t].angle - base;
      while (d < 0.0) d += 2.0 * M_PI;
      if (d < best) {
        best = d;
        start = t;
      }
    }
    double prev = -1e30;
    for (int t = 0; t <= n; ++t) {
      const int s = (start + t) % n;
      double ang = sl[s].angle;
      while (ang < prev - 1e-12) ang += 2.0 * M_PI;
      if (t == n) ang = c.angles.front() + 2.0 * M_PI;
      c.ids.push_back(sl[s].id_cw);
      c.angles.push_back(ang);
      prev = ang;
    }
    return c;
  };

  // Annuli.
  for (int k = 0; k + 1 < n_rings; ++k) {
    const RingBuild& outer = rings[k];
    const RingBuild& inner = rings[k + 1];
    std::vector<int> span;
    for (int j = 0; j < A; ++j)
      if (rho[j] >= outer.r - tol_eq) span.push_back(j);

    if (span.empty()) {
      const Chain ci = circle_chain(inner, inner.slots[0].angle);
      const Chain co = circle_chain(outer, inner.slots[0].angle);
      triangulate_strip(M, ci, co);
      continue;
    }
    // Order spanning arms by inner crossing angle.
    std::sort(span.begin(), span.end(), [&](int a, int b) {
      return inner.slots[inner.barrier_slot[a]].angle <
             inner.slots[inner.barrier_slot[b]].angle;
    });
    const int ns = static_cast<int>(span.size());
    for (int s = 0; s < ns; ++s) {
      const int ja = span[s], jb = span[(s + 1) % ns];
      Chain ci = sector_chain(inner, ja, jb);
      Chain co = sector_chain(outer, ja, jb);
      // Align outer unwrapping with the inner base angle.
      const double shift = co.angles.front() - ci.angles.front();
      if (shift > M_PI)
        for (auto& a : co.angles) a -= 2.0 * M_PI;
      else if (shift < -M_PI)
        for (auto& a : co.angles) a += 2.0 * M_PI;
      triangulate_strip(M, ci, co);
    }
  }

  // Tip fan. All arms reach past the innermost ring by construction.
  const RingBuild& last = rings[n_rings - 1];
  std::vector<int> order(A);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return last.slots[last.barrier_slot[a]].angle <
           last.slots[last.barrier_slot[b]].angle;
  });
  M.fan_order = order;
  for (int s = 0; s < A; ++s) {
    const int copy = new_node(Vec2{0.0, 0.0});
    M.origin_nodes.push_back(copy);
    const Chain c = sector_chain(last, order[s], order[(s + 1) % A]);
    for (size_t t = 0; t + 1 < c.ids.size(); ++t)
      add_tri(M, copy, c.ids[t], c.ids[t + 1]);
  }

  // Face pairs and traces, tip outward.
  for (int j = 0; j < A; ++j) {
    auto& rec = face_recs[j];
    std::sort(rec.begin(), rec.end(),
              [](const FaceRec& a, const FaceRec& b) { return a.r < b.r; });
    CrackMesh::FaceTrace& tr = M.faces[j];
    // Tip-side start: the origin copy of the adjacent sector on each side.
    int fan_pos = 0;
    for (int s = 0; s < A; ++s)
      if (order[s] == j) fan_pos = s;
    tr.cw_ids.push_back(M.origin_nodes[(fan_pos - 1 + A) % A]);
    tr.ccw_ids.push_back(M.origin_nodes[fan_pos]);
    tr.radii.push_back(0.0);
    for (const auto& fr : rec) {
      M.face_pairs.push_back({fr.cw, fr.ccw});
      M.face_pair_arm.push_back(j);
      tr.cw_ids.push_back(fr.cw);
      tr.ccw_ids.push_back(fr.ccw);
      tr.radii.push_back(fr.r);
    }
    if (rho[j] < R - tol_eq) {
      // Interior arm tip: single shared node on its end ring.
      for (int k = 0; k < n_rings; ++k) {
        if (std::fabs(rings[k].r - rho[j]) <= tol_eq &&
            rings[k].barrier_slot[j] >= 0) {
          const Slot& s = rings[k].slots[rings[k].barrier_slot[j]];
          tr.cw_ids.push_back(s.id_cw);
          tr.ccw_ids.push_back(s.id_cw);
          tr.radii.push_back(rho[j]);
          break;
        }
      }
    }
  }

  // Ring records and outer boundary list.
  M.rings.resize(n_rings);
  for (int k = 0; k < n_rings; ++k) {
    M.rings[k].r = rings[k].r;
    for (const Slot& s : rings[k].slots) {
      M.rings[k].ids.push_back(s.id_cw);
      M.rings[k].angles.push_back(s.angle);
    }
  }
  for (const Slot& s : rings[0].slots) {
    M.outer_nodes.push_back(s.id_cw);
    if (s.id_ccw != s.id_cw) M.outer_nodes.push_back(s.id_ccw);
  }

  validate_mesh(M);
  return M;
}

double validate_mesh(const CrackMesh& mesh) {
  double total = 0.0;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const double a = mesh.tri_area(t);
    if (!(a > 0.0)) throw NumericalError("non-positive triangle area");
    total += a;
  }
  // Each undirected node-pair edge may carry at most two triangles.
  std::unordered_map<long long, int> edge_count;
  edge_count.reserve(mesh.tris.size() * 2);
  for (const auto& T : mesh.tris) {
    for (int e = 0; e < 3; ++e) {
      int a = T[e], b = T[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      const long long key = (static_cast<long long>(a) << 32) | b;
      if (++edge_count[key] > 2)
        throw NumericalError("non-manifold mesh edge");
    }
  }
  const double disk = M_PI * mesh.radius * mesh.radius;
  if (total > disk * (1.0 + 1e-9) || total < disk * 0.9)
    throw NumericalError("mesh area out of range");
  return total;
}

PointLocator::PointLocator(const CrackMesh& mesh) : mesh_(mesh) {
  vertex_tris_.resize(mesh.node_count());
  for (int t = 0; t < mesh.tri_count(); ++t)
    for (int v : mesh.tris[t]) vertex_tris_[v].push_back(t);
}

namespace {

// Barycentric coordinates of p in triangle t; returns the smallest one.
double bary_of(const CrackMesh& m, int t, const Vec2& p,
               std::array<double, 3>* out) {
  const auto& T = m.tris[t];
  const Vec2 a = m.nodes[T[0]], b = m.nodes[T[1]], c = m.nodes[T[2]];
  const double det = (b - a).cross(c - a);
  (*out)[0] = (b - p).cross(c - p) / det;
  (*out)[1] = (c - p).cross(a - p) / det;
  (*out)[2] = 1.0 - (*out)[0] - (*out)[1];
  return std::min({(*out)[0], (*out)[1], (*out)[2]});
}

}  // namespace

PointLocator::Hit PointLocator::locate(const Vec2& p, int side) const {
  const CrackMesh& m = mesh_;
  Vec2 q = p;
  if (side != 0) q = rotation(side > 0 ? 1e-9 : -1e-9).apply(p);

  // Seed nodes: nearest-by-angle slots on the two rings bracketing |q|.
  std::vector<int> seeds;
  const double r = q.norm();
  const double ang = std::atan2(q.y, q.x);
  int lo = 0, hi = static_cast<int>(m.rings.size()) - 1;
  while (lo < hi) {  // rings are sorted by descending radius
    const int mid = (lo + hi) / 2;
    if (m.rings[mid].r >= r)
      lo = mid + 1;
    else
      hi = mid;
  }
  for (int k = std::max(0, lo - 1);
       k <= std::min(static_cast<int>(m.rings.size()) - 1, lo); ++k) {
    const auto& ring = m.rings[k];
    if (ring.ids.empty()) continue;
    auto it = std::lower_bound(ring.angles.begin(), ring.angles.end(), ang);
    const int n = static_cast<int>(ring.ids.size());
    const int at = static_cast<int>(it - ring.angles.begin());
    for (int d = -1; d <= 1; ++d) seeds.push_back(ring.ids[((at + d) % n + n) % n]);
  }
  for (int v : m.origin_nodes) seeds.push_back(v);

  Hit best;
  double best_min = -1e300;
  std::unordered_set<int> seen_tri, seen_node;
  std::queue<int> frontier;
  for (int v : seeds)
    if (seen_node.insert(v).second) frontier.push(v);
  for (int depth = 0; depth < 8 && !frontier.empty(); ++depth) {
    std::queue<int> next;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int t : vertex_tris_[v]) {
        if (!seen_tri.insert(t).second) continue;
        std::array<double, 3> bc;
        const double mn = bary_of(m, t, q, &bc);
        if (mn > best_min) {
          best_min = mn;
          best.tri = t;
          best.bary = bc;
        }
        for (int w : m.tris[t])
          if (seen_node.insert(w).second) next.push(w);
      }
    }
    if (best_min >= -1e-12) return best;
    frontier = std::move(next);
  }
  if (best_min >= -1e-12) return best;

  // Exhaustive fallback; also accepts slightly-outside queries caused by
  // the polygonal outer boundary.
  for (int t = 0; t < m.tri_count(); ++t) {
    std::array<double, 3> bc;
    const double mn = bary_of(m, t, q, &bc);
    if (mn > best_min) {
      best_min = mn;
      best.tri = t;
      best.bary = bc;
    }
  }
  if (best_min >= -1e-5) return best;
  throw NumericalError("query point outside the mesh");
}

double eval_vertex_scalar(const PointLocator& loc, const double* w,
                          const Vec2& p, int side) {
  const PointLocator::Hit h = loc.locate(p, side);
  const auto& T = loc.mesh().tris[h.tri];
  return h.bary[0] * w[T[0]] + h.bary[1] * w[T[1]] + h.bary[2] * w[T[2]];
}

}  // namespace cracktip
