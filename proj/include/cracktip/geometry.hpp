#ifndef CRACKTIP_GEOMETRY_HPP
#define CRACKTIP_GEOMETRY_HPP

#include <array>
#include <cmath>

namespace cracktip {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  // Counterclockwise quarter turn.
  Vec2 perp() const { return {-y, x}; }
  double angle() const { return std::atan2(y, x); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  Vec2 apply(const Vec2& v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 operator+(const Mat2& o) const {
    return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
  }
  Mat2 operator-(const Mat2& o) const {
    return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
  }
  Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  double frob2() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
};

inline Mat2 rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c, -s, s, c};
}

// Symmetric 2x2 tensor (strains, stresses).
struct SymTensor2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  SymTensor2() = default;
  SymTensor2(double xx_, double xy_, double yy_) : xx(xx_), xy(xy_), yy(yy_) {}

  double trace() const { return xx + yy; }
  // Full contraction a:b, counting the off-diagonal twice.
  double contract(const SymTensor2& o) const {
    return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy;
  }
  double norm2() const { return contract(*this); }
  SymTensor2 operator+(const SymTensor2& o) const {
    return {xx + o.xx, xy + o.xy, yy + o.yy};
  }
  SymTensor2 operator-(const SymTensor2& o) const {
    return {xx - o.xx, xy - o.xy, yy - o.yy};
  }
  SymTensor2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
  Vec2 apply(const Vec2& v) const {
    return {xx * v.x + xy * v.y, xy * v.x + yy * v.y};
  }
};

// Symmetrized gradient of an affine map with jacobian J.
inline SymTensor2 sym(const Mat2& J) {
  return {J.a11, 0.5 * (J.a12 + J.a21), J.a22};
}

// Symmetrized tensor product a (.) b = (a b^T + b a^T)/2.
inline SymTensor2 sym_outer(const Vec2& a, const Vec2& b) {
  return {a.x * b.x, 0.5 * (a.x * b.y + a.y * b.x), a.y * b.y};
}

// Planar rigid motion x -> c + w x^perp.
struct RigidMotion {
  Vec2 c;
  double w = 0.0;
  Vec2 eval(const Vec2& x) const { return c + w * x.perp(); }
};

// Distance from point p to segment [a, b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.norm2();
  if (len2 == 0.0) return (p - a).norm();
  double t = (p - a).dot(d) / len2;
  t = std::fmin(1.0, std::fmax(0.0, t));
  return (p - (a + d * t)).norm();
}

// Distance between segments [a1,b1] and [a2,b2]; zero if they intersect.
double segment_segment_distance(const Vec2& a1, const Vec2& b1, const Vec2& a2,
                                const Vec2& b2);

}  // namespace cracktip

#endif
