#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "cracktip/errors.hpp"
#include "cracktip/mesh.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace cracktip;

namespace {

// V - E + T. A slit disk counts 1 per extra origin copy and loses 1 per
// arm that ends strictly inside (its far endpoint pinches the doubled
// slit loop shut), so the expected value is
//   origin copies - arms with an interior endpoint.
int euler_characteristic(const CrackMesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.tris)
    for (int k = 0; k < 3; ++k)
      edges.insert(
          {std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])});
  return m.node_count() - static_cast<int>(edges.size()) + m.tri_count();
}

double summed_area(const CrackMesh& m) {
  double s = 0.0;
  for (int t = 0; t < m.tri_count(); ++t) s += m.tri_area(t);
  return s;
}

MeshParams coarse_params() {
  MeshParams p;
  p.radius = 1.0;
  p.h = 0.1;
  p.grading = 0.5;
  return p;
}

}  // namespace

TEST_CASE("arm decomposition") {
  SUBCASE("tip as an interior chain vertex splits the chain") {
    const CrackSet c({{{-0.5, 0.0}, {0.0, 0.0}, {1.0, 0.0}}});
    const auto arms = decompose_arms(c);
    REQUIRE(arms.size() == 2);
    for (const auto& a : arms) CHECK(a.front().norm() == 0.0);
  }
  SUBCASE("tip strictly inside a segment splits the segment") {
    const CrackSet c({{{-0.5, 0.0}, {1.0, 0.0}}});
    const auto arms = decompose_arms(c);
    REQUIRE(arms.size() == 2);
    std::set<double> ends;
    for (const auto& a : arms) ends.insert(a.back().x);
    CHECK(ends == std::set<double>{-0.5, 1.0});
  }
  SUBCASE("single arm") {
    const auto arms = decompose_arms(reference_crack(0.7));
    REQUIRE(arms.size() == 1);
    CHECK(arms[0].back().x == doctest::Approx(-0.7));
  }
  SUBCASE("non-monotone arm is rejected") {
    const CrackSet c({{{0.0, 0.0}, {0.5, 0.0}, {0.3, 0.3}}});
    CHECK_THROWS_AS(decompose_arms(c), ConfigError);
  }
  SUBCASE("chain missing the tip is rejected") {
    const CrackSet c({{{0.2, 0.0}, {1.0, 0.0}}});
    CHECK_THROWS_AS(decompose_arms(c), ConfigError);
  }
}

TEST_CASE("parameter and placement guards") {
  MeshParams p = coarse_params();
  p.h = 0.0;
  CHECK_THROWS_AS(build_mesh(reference_crack(0.5), p), ConfigError);
  p = coarse_params();
  p.grading = 1.2;
  CHECK_THROWS_AS(build_mesh(reference_crack(0.5), p), ConfigError);
  p = coarse_params();
  CHECK_THROWS_AS(build_mesh(reference_crack(1.5), p), ConfigError);
}

TEST_CASE("interior single-arm mesh structure") {
  const MeshParams p = coarse_params();
  const CrackMesh m = build_mesh(reference_crack(0.6), p);

  CHECK(m.arm_count == 1);
  const double area = validate_mesh(m);
  CHECK(area == doctest::Approx(summed_area(m)).epsilon(1e-12));
  // The outer ring is an inscribed polygon, so the area sits just below pi.
  CHECK(area < M_PI);
  CHECK(area > M_PI - 0.02);
  CHECK(euler_characteristic(m) == 0);  // one origin copy, one interior end

  // Rings: strictly descending radii, all nodes inside the disk.
  REQUIRE(m.rings.size() >= 4);
  CHECK(m.rings.front().r == doctest::Approx(1.0));
  for (size_t k = 1; k < m.rings.size(); ++k)
    CHECK(m.rings[k].r < m.rings[k - 1].r);
  for (const auto& ring : m.rings) {
    CHECK(static_cast<int>(ring.ids.size()) >= m.params.min_ring_nodes);
    CHECK(ring.ids.size() == ring.angles.size());
  }
  for (const auto& n : m.nodes) CHECK(n.norm() <= 1.0 + 1e-9);

  // One origin copy for a single arm; the arm end ring is mandatory.
  CHECK(m.origin_nodes.size() == 1);
  CHECK(m.fan_order == std::vector<int>{0});
  bool has_end_ring = false;
  for (const auto& ring : m.rings)
    if (std::fabs(ring.r - 0.6) < 1e-9) has_end_ring = true;
  CHECK(has_end_ring);

  // Face trace: radii ascend from the tip, both sides coincide in position,
  // interior crossings are honest duplicates, the interior endpoint is
  // shared between the sides.
  REQUIRE(m.faces.size() == 1);
  const auto& tr = m.faces[0];
  REQUIRE(tr.radii.size() >= 3);
  CHECK(tr.radii.front() == 0.0);
  CHECK(tr.radii.back() == doctest::Approx(0.6));
  CHECK(tr.cw_ids.size() == tr.radii.size());
  CHECK(tr.ccw_ids.size() == tr.radii.size());
  for (size_t i = 1; i < tr.radii.size(); ++i) CHECK(tr.radii[i] > tr.radii[i - 1]);
  for (size_t i = 0; i < tr.radii.size(); ++i) {
    const Vec2 a = m.nodes[tr.cw_ids[i]], b = m.nodes[tr.ccw_ids[i]];
    CHECK((a - b).norm() < 1e-12);
    CHECK(a.norm() == doctest::Approx(tr.radii[i]).epsilon(1e-9));
    CHECK(std::fabs(a.y) < 1e-12);  // reference crack lies on the axis
    const bool interior = i + 1 < tr.radii.size() && i > 0;
    CHECK((tr.cw_ids[i] != tr.ccw_ids[i]) == interior);
  }
  CHECK(m.face_pairs.size() == tr.radii.size() - 2);
  for (int a : m.face_pair_arm) CHECK(a == 0);
}

TEST_CASE("arm reaching the outer circle is duplicated there") {
  MeshParams p = coarse_params();
  const CrackMesh m = build_mesh(CrackSet::straight(1.0, 0.7), p);
  CHECK(euler_characteristic(m) == 1);
  const auto& tr = m.faces[0];
  CHECK(tr.radii.back() == doctest::Approx(1.0));
  CHECK(tr.cw_ids.back() != tr.ccw_ids.back());
  // Both boundary copies are listed as outer nodes.
  const std::set<int> outer(m.outer_nodes.begin(), m.outer_nodes.end());
  CHECK(outer.count(tr.cw_ids.back()) == 1);
  CHECK(outer.count(tr.ccw_ids.back()) == 1);
  for (int id : m.outer_nodes)
    CHECK(m.nodes[id].norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kinked two-arm crack honors mandatory radii") {
  MeshParams p = coarse_params();
  p.mandatory_radii = {0.45};
  const CrackSet c({{{-0.4, 0.0}, {0.0, 0.0}, {0.3, 0.1}, {0.55, 0.3}}});
  const CrackMesh m = build_mesh(c, p);
  CHECK(m.arm_count == 2);
  CHECK(m.origin_nodes.size() == 2);
  CHECK(euler_characteristic(m) == 0);  // two origin copies, two interior ends

  const double kink_r = std::hypot(0.3, 0.1);
  bool has_kink = false, has_mand = false;
  for (const auto& ring : m.rings) {
    if (std::fabs(ring.r - kink_r) < 1e-9) has_kink = true;
    if (std::fabs(ring.r - 0.45) < 1e-9) has_mand = true;
  }
  CHECK(has_kink);
  CHECK(has_mand);

  // Every face node sits on the crack itself.
  for (const auto& tr : m.faces)
    for (int id : tr.cw_ids) CHECK(c.distance_to(m.nodes[id]) < 1e-9);
}

TEST_CASE("point location round trips") {
  const CrackMesh m = build_mesh(reference_crack(0.6), coarse_params());
  const PointLocator loc(m);
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> ur(0.01, 0.97), ut(-M_PI, M_PI);
  int tested = 0;
  while (tested < 200) {
    const double r = ur(rng), t = ut(rng);
    const Vec2 p{r * std::cos(t), r * std::sin(t)};
    if (reference_crack(0.6).distance_to(p) < 0.01) continue;
    ++tested;
    const auto hit = loc.locate(p);
    REQUIRE(hit.tri >= 0);
    Vec2 back{0.0, 0.0};
    double bsum = 0.0;
    for (int k = 0; k < 3; ++k) {
      CHECK(hit.bary[k] >= -1e-10);
      back = back + m.nodes[m.tris[hit.tri][k]] * hit.bary[k];
      bsum += hit.bary[k];
    }
    CHECK(bsum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((back - p).norm() < 1e-10);
  }
  CHECK_THROWS_AS(loc.locate({1.2, 0.0}), NumericalError);
}

TEST_CASE("face queries resolve by side") {
  const CrackMesh m = build_mesh(reference_crack(0.6), coarse_params());
  const PointLocator loc(m);

  // Indicator of the counterclockwise face copies.
  std::vector<double> w(m.node_count(), 0.0);
  for (int id : m.faces[0].ccw_ids) w[id] = 1.0;
  for (double r : {0.13, 0.31, 0.52}) {
    const Vec2 p{-r, 0.0};
    const auto ccw = loc.locate(p, +1);
    const auto cw = loc.locate(p, -1);
    CHECK(ccw.tri != cw.tri);
    // Sided queries are nudged by a 1e-9 rotation, so the indicator picks
    // up a matching sliver of the off-face vertex.
    CHECK(std::fabs(eval_vertex_scalar(loc, w.data(), p, +1) - 1.0) < 1e-6);
    CHECK(std::fabs(eval_vertex_scalar(loc, w.data(), p, -1)) < 1e-6);
  }
}

TEST_CASE("vertex interpolation reproduces linear fields") {
  const CrackMesh m = build_mesh(reference_crack(0.6), coarse_params());
  const PointLocator loc(m);
  std::vector<double> w(m.node_count());
  for (int i = 0; i < m.node_count(); ++i)
    w[i] = 2.0 * m.nodes[i].x - 3.0 * m.nodes[i].y + 0.7;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ur(0.0, 0.95), ut(-M_PI, M_PI);
  int tested = 0;
  while (tested < 100) {
    const double r = ur(rng), t = ut(rng);
    const Vec2 p{r * std::cos(t), r * std::sin(t)};
    if (reference_crack(0.6).distance_to(p) < 1e-6) continue;
    ++tested;
    const double got = eval_vertex_scalar(loc, w.data(), p, 0);
    CHECK(std::fabs(got - (2.0 * p.x - 3.0 * p.y + 0.7)) < 1e-11);
  }
  // On the face itself the sided nudge costs O(1e-9) in position.
  for (double r : {0.2, 0.45}) {
    for (int side : {-1, +1}) {
      const Vec2 p{-r, 0.0};
      const double got = eval_vertex_scalar(loc, w.data(), p, side);
      CHECK(std::fabs(got - (2.0 * p.x + 0.7)) < 1e-7);
    }
  }
}
