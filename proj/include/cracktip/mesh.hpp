#ifndef CRACKTIP_MESH_HPP
#define CRACKTIP_MESH_HPP

#include <array>
#include <vector>

#include "cracktip/crack.hpp"
#include "cracktip/geometry.hpp"

namespace cracktip {

// Ring-graded disk mesh parameters. Element size at distance r from the tip
// follows size(r) = h * (r / size_ref)^beta with beta = log2(1 / grading),
// so grading = 0.5 gives size proportional to r and grading = 1 a uniform h.
struct MeshParams {
  double radius = 1.0;   // outer boundary radius
  double h = 0.05;       // target size at r = size_ref
  double grading = 0.5;  // in (0, 1]
  double size_ref = -1.0;  // defaults to radius
  double aspect = 1.4;   // angular spacing = aspect * size(r)
  double r0_rel = 1e-3;  // innermost ring radius relative to size_ref
  int min_ring_nodes = 8;
  std::vector<double> mandatory_radii;  // rings forced to exact radii
};

// Conforming triangulation of B_radius minus a star-shaped crack. Crack
// arms are radially monotone polylines from the origin; nodes on a crack
// arm are duplicated per side, the ring structure is preserved for flux
// and trace extraction, and the origin carries one copy per angular sector
// between consecutive arms.
struct CrackMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;  // counterclockwise

  // Ring radii (descending) with node ids ordered by unwrapped angle.
  struct Ring {
    double r = 0.0;
    std::vector<int> ids;       // one entry per slot; barrier slots use cw id
    std::vector<double> angles; // matching angles
  };
  std::vector<Ring> rings;

  std::vector<int> outer_nodes;  // ids on the outer boundary

  // Duplicated crack nodes: (cw side, ccw side) with the owning arm index,
  // ordered along each arm from the tip outward.
  std::vector<std::pair<int, int>> face_pairs;
  std::vector<int> face_pair_arm;

  // Per arm and side, node ids from the origin outward plus their radii.
  struct FaceTrace {
    std::vector<int> cw_ids, ccw_ids;
    std::vector<double> radii;
  };
  std::vector<FaceTrace> faces;

  // Origin copies, one per angular sector; sector s lies counterclockwise
  // of arm fan_order[s]. A single-arm crack has exactly one copy (the tip).
  std::vector<int> origin_nodes;
  std::vector<int> fan_order;  // arm indices sorted by angle at the tip

  int arm_count = 0;
  double radius = 0.0;
  MeshParams params;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int tri_count() const { return static_cast<int>(tris.size()); }
  double tri_area(int t) const;
  Vec2 tri_centroid(int t) const;
};

// Point location against the ring structure. Queries on a crack face are
// disambiguated by a tiny angular nudge about the tip: side > 0 moves the
// query counterclockwise, side < 0 clockwise.
class PointLocator {
 public:
  explicit PointLocator(const CrackMesh& mesh);

  struct Hit {
    int tri = -1;
    std::array<double, 3> bary{};
  };
  // Throws NumericalError when p lies outside the meshed disk.
  Hit locate(const Vec2& p, int side = 0) const;

  const CrackMesh& mesh() const { return mesh_; }

 private:
  const CrackMesh& mesh_;
  std::vector<std::vector<int>> vertex_tris_;
};

// P1 interpolation of a per-vertex scalar field (w indexed by node id).
double eval_vertex_scalar(const PointLocator& loc, const double* w,
                          const Vec2& p, int side = 0);

// Splits a crack into radially monotone arms rooted at the origin; throws
// ConfigError when the crack is not star-shaped about the tip.
std::vector<std::vector<Vec2>> decompose_arms(const CrackSet& crack);

CrackMesh build_mesh(const CrackSet& crack, const MeshParams& params);

// Sanity checks (orientation, duplication counts, ring structure); throws
// NumericalError on violation. Returns the total area for convenience.
double validate_mesh(const CrackMesh& mesh);

}  // namespace cracktip

#endif
