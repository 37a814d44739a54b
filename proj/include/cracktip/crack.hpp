#ifndef CRACKTIP_CRACK_HPP
#define CRACKTIP_CRACK_HPP

#include <vector>

#include "cracktip/geometry.hpp"

namespace cracktip {

// Compact union of polyline chains describing a crack. Chains must be
// nonempty with at least two vertices and no zero-length segments.
// Admissible problem cracks are additionally connected and pass through
// the origin (the tip); clipping to a ball can break connectivity, so
// that stronger invariant is checked by admissible() / require_admissible(),
// not by the constructor.
class CrackSet {
 public:
  CrackSet() = default;
  explicit CrackSet(std::vector<std::vector<Vec2>> chains);

  // Validates connectivity and origin containment on top of basic shape.
  static CrackSet admissible(std::vector<std::vector<Vec2>> chains);
  void require_admissible() const;

  // Straight segment from the origin, length > 0, direction angle (radians).
  static CrackSet straight(double length, double angle);

  const std::vector<std::vector<Vec2>>& chains() const { return chains_; }
  bool empty() const { return chains_.empty(); }

  double length() const;
  double max_radius() const;
  double distance_to(const Vec2& p) const;
  bool contains_origin() const;
  bool is_connected() const;

  // Intersection with the closed ball of radius rho about the origin;
  // empty when the crack misses the ball.
  CrackSet clipped(double rho) const;
  // Vertex map x -> scale * R(rot) x.
  CrackSet transformed(double scale, double rot) const;
  // Arc-length samples with spacing <= d on every segment, vertices included.
  std::vector<Vec2> sample(double d) const;

 private:
  std::vector<std::vector<Vec2>> chains_;
};

// Reference crack: segment of the negative x-axis of the given length,
// ending at the origin.
CrackSet reference_crack(double length = 1.0);

// Symmetric Hausdorff distance, accurate to tol. One side is sampled with
// spacing tol/4; distances to the other set use exact point-segment distance.
double hausdorff_distance(const CrackSet& a, const CrackSet& b, double tol);

// H^1(g intersected with B_rho) / rho.
double density_ratio(const CrackSet& g, double rho);

}  // namespace cracktip

#endif
