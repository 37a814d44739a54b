#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cracktip/blowup.hpp"
#include "cracktip/errors.hpp"
#include "cracktip/fields.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace cracktip;
using testutil::rel_err;

namespace {

MeshParams params(double h) {
  MeshParams p;
  p.radius = 1.0;
  p.h = h;
  p.grading = 0.5;
  return p;
}

// Distance of an angle from 0 modulo 2 pi.
double wrap_dist(double th, double target) {
  double d = std::fmod(th - target, 2.0 * M_PI);
  if (d < 0.0) d += 2.0 * M_PI;
  return std::fmin(d, 2.0 * M_PI - d);
}

}  // namespace

TEST_CASE("rotation aligns the near-tip crack with the reference half line") {
  CHECK(wrap_dist(blowup_rotation(reference_crack(1.0), 1.0), 0.0) < 1e-4);
  CHECK(wrap_dist(blowup_rotation(CrackSet::straight(1.0, 0.0), 1.0), M_PI) <
        1e-4);
  CHECK(wrap_dist(blowup_rotation(CrackSet::straight(2.0, M_PI / 4), 0.5),
                  0.75 * M_PI) < 1e-4);

  // A small blow-up ball only sees the first leg of a kinked crack.
  const CrackSet kinked = CrackSet::admissible(
      {{{0.0, 0.0},
        {0.3, 0.0},
        {0.3 + 0.5 * std::cos(M_PI / 3), 0.5 * std::sin(M_PI / 3)}}});
  CHECK(wrap_dist(blowup_rotation(kinked, 0.2), M_PI) < 1e-4);

  CHECK_THROWS_AS(blowup_rotation(reference_crack(1.0), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(blowup_rotation(CrackSet{}, 1.0), ConfigError);
  // A crack that misses the ball entirely is rejected too.
  const CrackSet far_away({{{2.0, 0.0}, {3.0, 0.0}}});
  CHECK_THROWS_AS(blowup_rotation(far_away, 1.0), ConfigError);
}

TEST_CASE("rescaled cracks reproduce the reference geometry") {
  const CrackSet a = rescale_crack(reference_crack(2.0), 0.5, 0.0);
  CHECK(hausdorff_distance(a, reference_crack(1.0), 1e-6) < 1e-9);

  const CrackSet diag = CrackSet::straight(2.0, M_PI / 4);
  const double rot = blowup_rotation(diag, 0.5);
  const CrackSet b = rescale_crack(diag, 0.5, rot);
  CHECK(hausdorff_distance(b, reference_crack(1.0), 1e-6) < 1e-5);

  const CrackSet far_away({{{2.0, 0.0}, {3.0, 0.0}}});
  CHECK(rescale_crack(far_away, 1.0, 0.0).empty());
  CHECK_THROWS_AS(rescale_crack(reference_crack(1.0), 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("analytic mode fits are exact on fields in the span") {
  const Material mat{1.3, 0.8};
  const RigidMotion rm{{0.3, -0.2}, 0.15};
  for (AngleBranch br : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    const ModeField f{mat, 1.2, -0.7, br};
    auto field = [&](const Vec2& p) { return f.displacement(p) + rm.eval(p); };
    const BlowUpFit fit = fit_modes_field(field, mat, 0.5, 1.0, 256, br);
    CHECK(std::fabs(fit.kappa1 - 1.2) < 1e-9);
    CHECK(std::fabs(fit.kappa2 + 0.7) < 1e-9);
    CHECK((fit.rigid.c - rm.c).norm() < 1e-9);
    CHECK(std::fabs(fit.rigid.w - rm.w) < 1e-9);
    CHECK(fit.residual < 1e-10);

    // Removing the fitted part leaves nothing for a second fit to find.
    auto remainder = [&](const Vec2& p) {
      const double th = branch_angle(p, br);
      const double sq = std::sqrt(p.norm());
      const Vec2 span = (modes::phi(1, th, mat, br) * fit.kappa1 +
                         modes::phi(2, th, mat, br) * fit.kappa2) *
                            sq +
                        fit.rigid.eval(p);
      return field(p) - span;
    };
    const BlowUpFit again = fit_modes_field(remainder, mat, 0.5, 1.0, 256, br);
    CHECK(std::fabs(again.kappa1) < 1e-9);
    CHECK(std::fabs(again.kappa2) < 1e-9);
    CHECK(again.rigid.c.norm() < 1e-9);
    CHECK(std::fabs(again.rigid.w) < 1e-9);
  }

  auto airy = [](const Vec2& p) {
    const double th = branch_angle(p, AngleBranch::pm_pi);
    const double r32 = p.norm() * std::sqrt(p.norm());
    return 1.7 * r32 * modes::airy_profile(1, th, AngleBranch::pm_pi) -
           0.4 * r32 * modes::airy_profile(2, th, AngleBranch::pm_pi) + 0.3 +
           0.2 * p.x - 0.1 * p.y;
  };
  const AiryFit af = fit_airy_field(airy, 0.5, 1.0, 256, AngleBranch::pm_pi);
  CHECK(std::fabs(af.c1 - 1.7) < 1e-9);
  CHECK(std::fabs(af.c2 + 0.4) < 1e-9);
  CHECK(std::fabs(af.affine[0] - 0.3) < 1e-9);
  CHECK(std::fabs(af.affine[1] - 0.2) < 1e-9);
  CHECK(std::fabs(af.affine[2] + 0.1) < 1e-9);
  CHECK(af.residual < 1e-10);

  auto zero = [](const Vec2&) { return Vec2{0.0, 0.0}; };
  CHECK_THROWS_AS(fit_modes_field(zero, mat, 0.5, 1.0, 32, AngleBranch::pm_pi),
                  ConfigError);
  CHECK_THROWS_AS(fit_modes_field(zero, mat, 0.8, 0.5, 256, AngleBranch::pm_pi),
                  ConfigError);
}

TEST_CASE("discrete rescaling is covariant for the exact mode") {
  const Material mat{1.0, 1.0};
  const ModeField f{mat, 1.0, 0.3, AngleBranch::pm_pi};
  const CrackMesh m = build_mesh(reference_crack(1.0), params(0.05));
  const ElasticOperator op(m, mat);
  const PointLocator loc(m);
  const Eigen::VectorXd u =
      op.interpolate([&](const Vec2& x) { return f.displacement(x); });

  // eps = 1 is a plain fit of the interpolant in its own frame.
  const BlowUpFit f1 = fit_modes(op, loc, u, 1.0, 0.0);
  CHECK(std::fabs(f1.kappa1 - 1.0) < 0.01);
  CHECK(std::fabs(f1.kappa2 - 0.3) < 0.005);
  CHECK(f1.residual < 0.02);
  CHECK(f1.rigid.c.norm() < 0.01);
  CHECK(std::fabs(f1.rigid.w) < 0.02);

  // The mode is scale invariant under the blow-up, so shrinking eps keeps
  // the fitted coefficients (up to interpolation error at smaller radii).
  const BlowUpFit f2 = fit_modes(op, loc, u, 0.5, 0.0);
  CHECK(std::fabs(f2.kappa1 - 1.0) < 0.015);
  CHECK(std::fabs(f2.kappa2 - 0.3) < 0.008);
  CHECK(f2.residual < 0.03);

  for (int j = 0; j < 8; ++j) {
    const double th = -M_PI + 0.3 + j * (2.0 * M_PI - 0.6) / 7;
    const Vec2 y{0.7 * std::cos(th), 0.7 * std::sin(th)};
    const Vec2 got = rescale_displacement(op, loc, u, 0.5, 0.0, y);
    CHECK(rel_err(got, f.displacement(y)) < 0.02);
  }
}

TEST_CASE("rotation covariance maps a rotated crack onto the reference fit") {
  const Material mat{1.0, 1.0};
  const ModeField f{mat, 1.0, 0.3, AngleBranch::zero_2pi};
  const CrackSet crack = CrackSet::straight(1.0, 0.0);
  const CrackMesh m = build_mesh(crack, params(0.05));
  const ElasticOperator op(m, mat);
  const PointLocator loc(m);
  const Eigen::VectorXd u =
      op.interpolate([&](const Vec2& x) { return f.displacement(x); });

  // In its own frame the crack lies on the positive axis, which is the
  // branch cut of zero_2pi, so a rot = 0 fit works directly.
  const BlowUpFit own =
      fit_modes(op, loc, u, 1.0, 0.0, 0.5, 1.0, 256, AngleBranch::zero_2pi);
  CHECK(std::fabs(own.kappa1 - 1.0) < 0.01);
  CHECK(std::fabs(own.kappa2 - 0.3) < 0.005);
  CHECK(own.residual < 0.02);

  // Rotating into the reference frame keeps the field inside the mode
  // span; the split between the two modes may change convention, but the
  // ball energy kappa1^2 I1 + kappa2^2 I2 is frame invariant.
  const double rot = blowup_rotation(crack, 1.0);
  CHECK(wrap_dist(rot, M_PI) < 1e-4);
  const BlowUpFit ref =
      fit_modes(op, loc, u, 1.0, rot, 0.5, 1.0, 256, AngleBranch::pm_pi);
  CHECK(ref.residual < 0.03);
  const double I1 = 12.0 * M_PI, I2 = 28.0 * M_PI;
  const double e_own = own.kappa1 * own.kappa1 * I1 + own.kappa2 * own.kappa2 * I2;
  const double e_ref = ref.kappa1 * ref.kappa1 * I1 + ref.kappa2 * ref.kappa2 * I2;
  CHECK(rel_err(e_ref, e_own) < 0.02);
}

TEST_CASE("rescaled vertex scalars follow the 3/2 power") {
  const CrackMesh m = build_mesh(reference_crack(1.0), params(0.05));
  const PointLocator loc(m);
  const Material mat{1.0, 1.0};
  const double c1 = modes::airy_amplitude(1, mat, AngleBranch::pm_pi);
  std::vector<double> w(m.node_count());
  for (int v = 0; v < m.node_count(); ++v) {
    const Vec2 x = m.nodes[v];
    const double r = x.norm();
    const double th = branch_angle(x, AngleBranch::pm_pi);
    w[v] = c1 * r * std::sqrt(r) *
           modes::airy_profile(1, th, AngleBranch::pm_pi);
  }

  // w scales with eps^{3/2}, so the rescaled samples reproduce the profile.
  // The profile vanishes toward the faces, so scale errors by its peak.
  double wants[8], gots[8], wscale = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double th = -M_PI + 0.3 + j * (2.0 * M_PI - 0.6) / 7;
    const Vec2 y{0.8 * std::cos(th), 0.8 * std::sin(th)};
    wants[j] = c1 * std::pow(0.8, 1.5) *
               modes::airy_profile(1, th, AngleBranch::pm_pi);
    gots[j] = rescale_airy(loc, w.data(), 0.5, 0.0, y);
    wscale = std::fmax(wscale, std::fabs(wants[j]));
  }
  for (int j = 0; j < 8; ++j) CHECK(std::fabs(gots[j] - wants[j]) < 0.02 * wscale);

  const AiryFit af = fit_airy_modes(loc, w.data(), 0.5, 0.0);
  CHECK(rel_err(af.c1, c1) < 0.02);
  CHECK(std::fabs(af.c2) < 0.02 * std::fabs(c1));
}

TEST_CASE("decay profiles sit at the angular mass of the mode") {
  const Material m11{1.0, 1.0};
  const ModeField f{m11, 1.0, 0.3, AngleBranch::pm_pi};
  // rho |sigma|^2 has a removable radius dependence: the profile equals
  // the angular integral of |sigma(1, .)|^2, which works out to
  // kappa1^2 A1 + kappa2^2 A2 with A1 = 10 pi mu^2 (lambda + mu)^2 and
  // A2 = 18 pi mu^2 (lambda + mu)^2 (no cross term).
  const double want = (10.0 + 0.09 * 18.0) * M_PI * 4.0;
  CHECK(rel_err(mode_stress_sq_constant(f), want) < 1e-6);
  const ModeField fz{m11, 1.0, 0.3, AngleBranch::zero_2pi};
  CHECK(rel_err(mode_stress_sq_constant(fz), want) < 1e-6);

  const Material m21{2.0, 1.0};
  const ModeField g{m21, 0.7, -0.3, AngleBranch::pm_pi};
  const double want21 = (0.49 * 10.0 + 0.09 * 18.0) * M_PI * 9.0;
  CHECK(rel_err(mode_stress_sq_constant(g), want21) < 1e-6);

  const CrackMesh mesh = build_mesh(reference_crack(1.0), params(0.05));
  const std::vector<double> rhos{0.3, 0.5, 0.7, 0.9};
  const std::vector<double> prof = decay_profile_fn(
      mesh, [&](const Vec2& x) { return f.stress(x); }, rhos);
  double lo = 1e300, hi = 0.0;
  for (double v : prof) {
    CHECK(rel_err(v, want) < 0.03);
    lo = std::fmin(lo, v);
    hi = std::fmax(hi, v);
  }
  CHECK(hi / lo < 1.03);

  const ElasticOperator op(mesh, m11);
  const Eigen::VectorXd u =
      op.interpolate([&](const Vec2& x) { return f.displacement(x); });
  const std::vector<double> dprof = decay_profile(op, u, {0.4, 0.6, 0.8});
  for (double v : dprof) CHECK(rel_err(v, want) < 0.05);

  CHECK_THROWS_AS(decay_profile(op, u, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      decay_profile_fn(mesh, [&](const Vec2& x) { return f.stress(x); }, {-1.0}),
      std::invalid_argument);
}
