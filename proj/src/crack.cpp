#include "cracktip/crack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cracktip {

double segment_segment_distance(const Vec2& a1, const Vec2& b1, const Vec2& a2,
                                const Vec2& b2) {
  const Vec2 d1 = b1 - a1, d2 = b2 - a2, r = a1 - a2;
  const double c1 = d1.cross(d2);
  if (c1 != 0.0) {
    const double t = d2.cross(r) / c1;
    const double s = d1.cross(r) / c1;
    if (t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0) return 0.0;
  }
  double d = point_segment_distance(a1, a2, b2);
  d = std::fmin(d, point_segment_distance(b1, a2, b2));
  d = std::fmin(d, point_segment_distance(a2, a1, b1));
  d = std::fmin(d, point_segment_distance(b2, a1, b1));
  return d;
}

namespace {

void check_basic_shape(const std::vector<std::vector<Vec2>>& chains) {
  if (chains.empty()) throw std::invalid_argument("crack set has no chains");
  for (const auto& c : chains) {
    if (c.size() < 2)
      throw std::invalid_argument("crack chain needs at least two vertices");
    for (size_t i = 0; i + 1 < c.size(); ++i)
      if ((c[i + 1] - c[i]).norm() == 0.0)
        throw std::invalid_argument("crack chain has a zero-length segment");
  }
}

int uf_find(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

CrackSet::CrackSet(std::vector<std::vector<Vec2>> chains)
    : chains_(std::move(chains)) {
  check_basic_shape(chains_);
}

CrackSet CrackSet::admissible(std::vector<std::vector<Vec2>> chains) {
  CrackSet g(std::move(chains));
  g.require_admissible();
  return g;
}

void CrackSet::require_admissible() const {
  if (!is_connected()) throw std::invalid_argument("crack set is not connected");
  if (!contains_origin())
    throw std::invalid_argument("crack set does not pass through the origin");
}

CrackSet CrackSet::straight(double length, double angle) {
  if (!(length > 0.0)) throw std::invalid_argument("crack length must be > 0");
  const Vec2 end{length * std::cos(angle), length * std::sin(angle)};
  return CrackSet({{Vec2{0.0, 0.0}, end}});
}

double CrackSet::length() const {
  double total = 0.0;
  for (const auto& c : chains_)
    for (size_t i = 0; i + 1 < c.size(); ++i) total += (c[i + 1] - c[i]).norm();
  return total;
}

double CrackSet::max_radius() const {
  double r = 0.0;
  for (const auto& c : chains_)
    for (const auto& p : c) r = std::fmax(r, p.norm());
  return r;
}

double CrackSet::distance_to(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : chains_)
    for (size_t i = 0; i + 1 < c.size(); ++i)
      d = std::fmin(d, point_segment_distance(p, c[i], c[i + 1]));
  return d;
}

bool CrackSet::contains_origin() const {
  const double scale = std::fmax(1.0, max_radius());
  return distance_to(Vec2{0.0, 0.0}) <= 1e-12 * scale;
}

bool CrackSet::is_connected() const {
  const int n = static_cast<int>(chains_.size());
  if (n <= 1) return true;
  const double tol = 1e-12 * std::fmax(1.0, max_radius());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d = std::numeric_limits<double>::infinity();
      for (size_t ai = 0; ai + 1 < chains_[i].size() && d > tol; ++ai)
        for (size_t bj = 0; bj + 1 < chains_[j].size() && d > tol; ++bj)
          d = std::fmin(d, segment_segment_distance(chains_[i][ai],
                                                    chains_[i][ai + 1],
                                                    chains_[j][bj],
                                                    chains_[j][bj + 1]));
      if (d <= tol) parent[uf_find(parent, i)] = uf_find(parent, j);
    }
  }
  const int root = uf_find(parent, 0);
  for (int i = 1; i < n; ++i)
    if (uf_find(parent, i) != root) return false;
  return true;
}

CrackSet CrackSet::clipped(double rho) const {
  if (!(rho > 0.0)) throw std::invalid_argument("clip radius must be > 0");
  const double rho2 = rho * rho;
  std::vector<std::vector<Vec2>> out;
  for (const auto& c : chains_) {
    std::vector<Vec2> cur;
    auto flush = [&] {
      if (cur.size() >= 2) out.push_back(cur);
      cur.clear();
    };
    for (size_t i = 0; i + 1 < c.size(); ++i) {
      const Vec2 a = c[i], b = c[i + 1];
      // Solve |a + t(b-a)|^2 = rho^2 for the kept parameter range.
      const Vec2 d = b - a;
      const double A = d.norm2(), B = a.dot(d), C = a.norm2() - rho2;
      double t0 = 0.0, t1 = 1.0;
      const bool in_a = a.norm2() <= rho2, in_b = b.norm2() <= rho2;
      if (!in_a || !in_b) {
        const double disc = B * B - A * C;
        if (disc < 0.0) {
          flush();
          continue;
        }
        const double sq = std::sqrt(disc);
        const double ra = (-B - sq) / A, rb = (-B + sq) / A;
        t0 = std::fmax(0.0, ra);
        t1 = std::fmin(1.0, rb);
        if (t0 >= t1) {
          flush();
          continue;
        }
      }
      const Vec2 p0 = a + d * t0, p1 = a + d * t1;
      if (cur.empty() || (cur.back() - p0).norm() > 1e-15 * rho) {
        flush();
        cur.push_back(p0);
      }
      if ((cur.back() - p1).norm() > 0.0) cur.push_back(p1);
      if (t1 < 1.0) flush();
    }
    flush();
  }
  if (out.empty()) return CrackSet{};
  return CrackSet(std::move(out));
}

CrackSet CrackSet::transformed(double scale, double rot) const {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be > 0");
  const Mat2 R = rotation(rot);
  std::vector<std::vector<Vec2>> out = chains_;
  for (auto& c : out)
    for (auto& p : c) p = R.apply(p) * scale;
  return CrackSet(std::move(out));
}

std::vector<Vec2> CrackSet::sample(double d) const {
  if (!(d > 0.0)) throw std::invalid_argument("sample spacing must be > 0");
  std::vector<Vec2> pts;
  for (const auto& c : chains_) {
    for (size_t i = 0; i + 1 < c.size(); ++i) {
      const Vec2 a = c[i], b = c[i + 1];
      const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / d)));
      for (int k = (i == 0 ? 0 : 1); k <= n; ++k)
        pts.push_back(a + (b - a) * (static_cast<double>(k) / n));
    }
  }
  return pts;
}

CrackSet reference_crack(double length) {
  return CrackSet({{Vec2{-length, 0.0}, Vec2{0.0, 0.0}}});
}

double hausdorff_distance(const CrackSet& a, const CrackSet& b, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("hausdorff tol must be > 0");
  const double d = tol / 4.0;
  auto one_sided = [](const std::vector<Vec2>& pts, const CrackSet& other) {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::fmax(worst, other.distance_to(p));
    return worst;
  };
  return std::fmax(one_sided(a.sample(d), b), one_sided(b.sample(d), a));
}

double density_ratio(const CrackSet& g, double rho) {
  return g.clipped(rho).length() / rho;
}

}  // namespace cracktip
