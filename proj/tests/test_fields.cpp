#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cracktip/fields.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace cracktip;
using testutil::rel_err;

namespace {

Vec2 polar(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

}  // namespace

TEST_CASE("material invariants") {
  CHECK_THROWS_AS(Material(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Material(-2.0, 1.0), std::invalid_argument);
  const Material m{2.0, 1.0};
  CHECK(m.kolosov() == doctest::Approx((2.0 + 3.0) / 3.0).epsilon(1e-15));
  CHECK(m.poisson() == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  // strain inverts stress.
  const SymTensor2 e{0.3, -0.1, 0.7};
  const SymTensor2 back = m.strain(m.stress(e));
  CHECK(rel_err(back.xx, e.xx) < 1e-14);
  CHECK(rel_err(back.xy, e.xy) < 1e-14);
  CHECK(rel_err(back.yy, e.yy) < 1e-14);
}

TEST_CASE("branch angle windows") {
  CHECK(branch_angle(Vec2{1, 1e-18}, AngleBranch::pm_pi) ==
        doctest::Approx(0.0));
  CHECK(branch_angle(Vec2{-1, 0}, AngleBranch::pm_pi) ==
        doctest::Approx(M_PI));
  CHECK(branch_angle(Vec2{0, -1}, AngleBranch::pm_pi) ==
        doctest::Approx(-M_PI / 2));
  CHECK(branch_angle(Vec2{0, -1}, AngleBranch::zero_2pi) ==
        doctest::Approx(1.5 * M_PI));
  CHECK(branch_angle(Vec2{-1, 0}, AngleBranch::zero_2pi) ==
        doctest::Approx(M_PI));
  CHECK(branch_angle(Vec2{1, 0}, AngleBranch::zero_2pi) ==
        doctest::Approx(0.0));
}

// Angular profile spot values frozen from an independent symbolic
// evaluation of the closed-form traction-free modes.
TEST_CASE("mode profile spot values") {
  const Material m11{1.0, 1.0};
  const Material m21{2.0, 1.0};

  Vec2 p = modes::phi(1, M_PI / 3, m11, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{2.5980762113533159403, 1.5}) < 1e-15);
  p = modes::phi(2, M_PI / 3, m11, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{4.5, -0.86602540378443864676}) < 1e-15);

  p = modes::phi(1, 2 * M_PI / 3, m21, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{3.25, 5.6291651245988512040}) < 1e-15);
  p = modes::phi(2, 2 * M_PI / 3, m21, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{8.2272413359521671443, 1.25}) < 1e-15);

  p = modes::phi(1, M_PI, m21, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{0.0, 8.0}) < 1e-15);
  p = modes::phi(2, M_PI, m21, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{8.0, 0.0}) < 1e-15);

  p = modes::phi(1, -M_PI / 2, m11, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{2.8284271247461900976, -2.8284271247461900976}) <
        1e-15);
  p = modes::phi(2, -M_PI / 2, m11, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{-5.6568542494923801952, 0.0}) < 1e-15);

  // Tip-opening normalization at theta = 0.
  p = modes::phi(1, 0.0, m21, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{2.0, 0.0}) < 1e-15);
  p = modes::phi(2, 0.0, m21, AngleBranch::pm_pi);
  CHECK(rel_err(p, Vec2{0.0, -2.0}) < 1e-15);

  CHECK_THROWS_AS(modes::phi(3, 0.0, m11, AngleBranch::pm_pi),
                  std::invalid_argument);
}

TEST_CASE("legacy profiles pinned") {
  const Material m11{1.0, 1.0};
  const Material m21{2.0, 1.0};
  CHECK(rel_err(modes::legacy_phi(1, 0.0, m21), Vec2{2.0 - 1.0, 0.0}) < 1e-15);
  CHECK(rel_err(modes::legacy_phi(2, 0.0, m21), Vec2{0.0, 2.0 + 3.0}) < 1e-15);
  CHECK(rel_err(modes::legacy_phi(1, M_PI, m21), Vec2{0.0, 8.0}) < 1e-15);
  CHECK(modes::legacy_psi(1, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(modes::legacy_psi(2, 0.0) == doctest::Approx(0.0));
  CHECK(modes::legacy_psi(1, M_PI) == doctest::Approx(0.0));

  // The legacy modes are kept only as regression pins: their face traction
  // does not vanish, unlike the validated profiles.
  const ModeField f{m11, 1.0, 0.0, AngleBranch::pm_pi};
  const double scale = stress_polar(f, 1.0, 0.0).norm2();
  (void)scale;
  const Vec2 good = crack_traction(f, 1.0, 0);
  CHECK(good.norm() < 1e-12);
}

TEST_CASE("traction-free faces on both branches") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ur(0.2, 3.0);
  for (AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    for (int mode = 1; mode <= 2; ++mode) {
      ModeField f;
      f.mat = Material{1.7, 0.8};
      f.k1 = mode == 1 ? 1.0 : 0.0;
      f.k2 = mode == 2 ? 1.0 : 0.0;
      f.branch = b;
      for (int i = 0; i < 5; ++i) {
        const double r = ur(rng);
        const double scale = std::sqrt(stress_polar(f, r, 0.5).norm2());
        CHECK(crack_traction(f, r, 0).norm() < 1e-12 * scale);
        CHECK(crack_traction(f, r, 1).norm() < 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("displacement equals sqrt(r) phi and is homogeneous") {
  const Material m{1.3, 0.9};
  const ModeField f{m, 0.8, -0.4, AngleBranch::pm_pi};
  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x = testutil::safe_point(rng, 0.05, 4.0, 1e-3);
    const double r = x.norm(), t = branch_angle(x, AngleBranch::pm_pi);
    const Vec2 want =
        std::sqrt(r) * (0.8 * modes::phi(1, t, m, AngleBranch::pm_pi) +
                        -0.4 * modes::phi(2, t, m, AngleBranch::pm_pi));
    CHECK(rel_err(f.displacement(x), want) < 1e-13);

    // sqrt homogeneity to 1e-12 (acceptance demands the same bound).
    const double s = 1.0 + 2.0 * (i % 7);
    const Vec2 scaled = f.displacement(x * s);
    CHECK(rel_err(scaled, f.displacement(x) * std::sqrt(s)) < 1e-12);
  }
}

TEST_CASE("gradient strain and stress are consistent") {
  const Material m{2.0, 1.0};
  const ModeField f{m, 1.0, 0.5, AngleBranch::pm_pi};
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = testutil::safe_point(rng, 0.3, 2.0);
    // FD gradient.
    const double h = 1e-6 * x.norm();
    Mat2 J;
    const Vec2 dx = (f.displacement({x.x + h, x.y}) -
                     f.displacement({x.x - h, x.y})) /
                    (2 * h);
    const Vec2 dy = (f.displacement({x.x, x.y + h}) -
                     f.displacement({x.x, x.y - h})) /
                    (2 * h);
    J.a11 = dx.x;
    J.a21 = dx.y;
    J.a12 = dy.x;
    J.a22 = dy.y;
    const Mat2 G = f.gradient(x);
    CHECK(std::sqrt((G - J).frob2()) < 1e-7 * std::sqrt(G.frob2()) + 1e-9);

    const SymTensor2 e = f.strain(x);
    const SymTensor2 es = sym(G);
    CHECK(rel_err(e.xx, es.xx) < 1e-13);
    const SymTensor2 s = f.stress(x);
    const SymTensor2 hooke = m.stress(e);
    CHECK(std::fabs(s.xx - hooke.xx) + std::fabs(s.xy - hooke.xy) +
              std::fabs(s.yy - hooke.yy) <
          1e-12 * std::sqrt(s.norm2()));
  }
}

// Stress spot values frozen from the same symbolic session as the
// profiles.
TEST_CASE("stress spot values") {
  {
    const ModeField f{Material{2.0, 1.0}, 1.0, 0.0, AngleBranch::pm_pi};
    const SymTensor2 s = f.stress(polar(2.0, 2 * M_PI / 3));
    CHECK(rel_err(s.xx, 2.1213203435596425732) < 1e-14);
    CHECK(rel_err(s.xy, -1.8371173070873835736) < 1e-14);
    CHECK(rel_err(s.yy, 2.1213203435596425732) < 1e-14);
  }
  {
    const ModeField f{Material{1.0, 1.0}, 0.0, 1.0, AngleBranch::pm_pi};
    const SymTensor2 s = f.stress(polar(0.5, M_PI / 4));
    CHECK(rel_err(s.xx, -5.0949356658997554187) < 1e-14);
    CHECK(rel_err(s.xy, 3.3784927944829325992) < 1e-14);
    CHECK(rel_err(s.yy, 0.76536686473017954346) < 1e-14);
  }
  {
    // sigma_yy on the prolongation line: 2 mu (lambda + mu) / sqrt(r).
    const Material m{1.6, 0.7};
    const ModeField f{m, 1.0, 0.0, AngleBranch::pm_pi};
    for (double r : {0.25, 1.0, 3.0}) {
      const SymTensor2 s = f.stress(Vec2{r, 0.0});
      CHECK(rel_err(s.yy, 2.0 * m.mu * (m.lambda + m.mu) / std::sqrt(r)) <
            1e-14);
      CHECK(std::fabs(s.xy) < 1e-14 * s.yy);
    }
  }
}

TEST_CASE("stress_polar continues to the faces") {
  const Material m{1.0, 1.0};
  const ModeField f{m, 0.3, 1.1, AngleBranch::pm_pi};
  // Interior agreement with the cartesian stress.
  for (double t : {-2.0, -0.5, 0.7, 2.9}) {
    const SymTensor2 a = stress_polar(f, 1.3, t);
    const SymTensor2 b = f.stress(polar(1.3, t));
    CHECK(std::sqrt((a - b).norm2()) < 1e-12 * std::sqrt(b.norm2()));
  }
  // Face values are finite and produce zero traction.
  const SymTensor2 top = stress_polar(f, 1.0, M_PI);
  const Vec2 tr = top.apply(Vec2{0.0, -1.0});  // angular direction at +pi
  CHECK(tr.norm() < 1e-12 * std::sqrt(top.norm2()));
}

TEST_CASE("lame residual falls at second order") {
  const Material m{2.0, 1.0};
  for (int mode = 1; mode <= 2; ++mode) {
    ModeField f;
    f.mat = m;
    f.k1 = mode == 1 ? 1.0 : 0.0;
    f.k2 = 1.0 - f.k1;
    std::mt19937 rng(17 + mode);
    for (int i = 0; i < 5; ++i) {
      const Vec2 x = testutil::safe_point(rng, 0.4, 1.8);
      const double h = 1e-4 * x.norm();
      const double r1 = lame_residual(f, x, h).norm();
      const double r2 = lame_residual(f, x, h / 2).norm();
      if (r2 > 1e-11) {
        const double slope = std::log2(r1 / r2);
        CHECK(slope > 1.5);
        CHECK(slope < 2.5);
      }
    }
  }
}

TEST_CASE("airy function of the modes") {
  const Material m{1.4, 1.1};
  const ModeField f{m, 0.6, -0.9, AngleBranch::pm_pi};

  // Hessian by finite differences of airy().
  std::mt19937 rng(23);
  for (int i = 0; i < 10; ++i) {
    const Vec2 x = testutil::safe_point(rng, 0.5, 1.5);
    const double h = 1e-4;
    const Mat2 H = f.airy_hessian(x);
    const double wxx = (f.airy({x.x + h, x.y}) - 2 * f.airy(x) +
                        f.airy({x.x - h, x.y})) /
                       (h * h);
    const double wyy = (f.airy({x.x, x.y + h}) - 2 * f.airy(x) +
                        f.airy({x.x, x.y - h})) /
                       (h * h);
    const double wxy = (f.airy({x.x + h, x.y + h}) - f.airy({x.x + h, x.y - h}) -
                        f.airy({x.x - h, x.y + h}) + f.airy({x.x - h, x.y - h})) /
                       (4 * h * h);
    CHECK(std::fabs(H.a11 - wxx) < 1e-5 * (1 + std::fabs(wxx)));
    CHECK(std::fabs(H.a22 - wyy) < 1e-5 * (1 + std::fabs(wyy)));
    CHECK(std::fabs(H.a12 - wxy) < 1e-5 * (1 + std::fabs(wxy)));

    // The Airy hessian reproduces the stress: the pair is a dual
    // description of the same field.
    const SymTensor2 s = stress_from_airy_hessian(H);
    const SymTensor2 want = f.stress(x);
    CHECK(std::sqrt((s - want).norm2()) < 1e-12 * std::sqrt(want.norm2()));
  }

  // Amplitude map; the mode-1 constant flips sign across branches.
  const double c0 = m.mu * (m.lambda + m.mu);
  CHECK(rel_err(modes::airy_amplitude(1, m, AngleBranch::pm_pi),
                8.0 / 3.0 * c0) < 1e-15);
  CHECK(rel_err(modes::airy_amplitude(1, m, AngleBranch::zero_2pi),
                -8.0 / 3.0 * c0) < 1e-15);
  CHECK(rel_err(modes::airy_amplitude(2, m, AngleBranch::pm_pi), -4.0 * c0) <
        1e-15);
  CHECK(rel_err(modes::airy_amplitude(2, m, AngleBranch::zero_2pi),
                -4.0 * c0) < 1e-15);

  // airy() equals the amplitude-weighted 3/2-homogeneous profile.
  const Vec2 x = polar(0.8, 1.2);
  const double want =
      std::pow(0.8, 1.5) *
      (0.6 * modes::airy_amplitude(1, m, AngleBranch::pm_pi) *
           modes::airy_profile(1, 1.2, AngleBranch::pm_pi) +
       -0.9 * modes::airy_amplitude(2, m, AngleBranch::pm_pi) *
           modes::airy_profile(2, 1.2, AngleBranch::pm_pi));
  CHECK(rel_err(f.airy(x), want) < 1e-13);
}

TEST_CASE("airy hessian reproduces the stress on both branches") {
  const Material m{2.0, 1.0};
  std::mt19937 rng(31);
  for (AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    const ModeField f{m, 1.0, -0.5, b};
    for (int i = 0; i < 20; ++i) {
      Vec2 x = testutil::safe_point(rng, 0.2, 2.5, 0.05);
      if (b == AngleBranch::zero_2pi) x = Vec2{-x.x, x.y};
      const SymTensor2 s = stress_from_airy_hessian(f.airy_hessian(x));
      const SymTensor2 want = f.stress(x);
      CHECK(std::sqrt((s - want).norm2()) < 1e-12 * std::sqrt(want.norm2()));
    }
  }
}

TEST_CASE("airy partner profiles are biharmonic and 3/2 homogeneous") {
  for (AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    AiryModeField w;
    w.c1 = 1.0;
    w.c2 = -0.7;
    w.branch = b;
    std::mt19937 rng(29);
    for (int i = 0; i < 10; ++i) {
      Vec2 x = testutil::safe_point(rng, 0.5, 1.5);
      if (b == AngleBranch::zero_2pi) x = Vec2{-x.x, x.y};
      // The FD bilaplacian of an exactly biharmonic field is pure
      // truncation error: it must fall at second order in the step.
      const double r1 = std::fabs(biharmonic_residual(w, x, 0.02));
      const double r2 = std::fabs(biharmonic_residual(w, x, 0.01));
      CHECK(r2 < 0.01);
      if (r2 > 1e-8) {
        const double slope = std::log2(r1 / r2);
        CHECK(slope > 1.5);
        CHECK(slope < 2.5);
      }
      const double s = 2.7;
      CHECK(rel_err(w.eval(x * s), std::pow(s, 1.5) * w.eval(x)) < 1e-12);
    }
    // Clamped profile: psi and psi' vanish on both faces.
    const double lo = b == AngleBranch::pm_pi ? -M_PI : 0.0;
    for (int mode = 1; mode <= 2; ++mode) {
      for (double t : {lo, lo + 2 * M_PI}) {
        CHECK(std::fabs(modes::airy_profile(mode, t, b)) < 1e-15);
        CHECK(std::fabs(modes::airy_profile_d1(mode, t, b)) < 1e-15);
      }
    }
  }
}

TEST_CASE("profile derivatives match finite differences") {
  const double h = 1e-5;
  for (AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    for (int mode = 1; mode <= 2; ++mode) {
      for (double t : {0.3, 1.9, 2.8}) {
        const double d1 = (modes::airy_profile(mode, t + h, b) -
                           modes::airy_profile(mode, t - h, b)) /
                          (2 * h);
        CHECK(std::fabs(modes::airy_profile_d1(mode, t, b) - d1) < 1e-9);
        const double d2 = (modes::airy_profile_d1(mode, t + h, b) -
                           modes::airy_profile_d1(mode, t - h, b)) /
                          (2 * h);
        CHECK(std::fabs(modes::airy_profile_d2(mode, t, b) - d2) < 1e-9);
      }
      const Material m{1.0, 2.0};
      for (double t : {0.4, -1.0}) {
        const Vec2 d = (modes::phi(mode, t + h, m, AngleBranch::pm_pi) -
                        modes::phi(mode, t - h, m, AngleBranch::pm_pi)) /
                       (2 * h);
        CHECK((modes::phi_dtheta(mode, t, m, AngleBranch::pm_pi) - d).norm() <
              1e-9);
      }
    }
  }
}

TEST_CASE("mode energies match the closed forms") {
  // E_k(B_R) = (R/2) I_k with I_1 = pi mu (l+mu)(l+5mu),
  // I_2 = pi mu (l+mu)(5l+9mu).
  const Material m11{1.0, 1.0};
  const Material m21{2.0, 1.0};
  CHECK(rel_err(modes::mode_energy_in_ball(1, m11, 1.0), 6.0 * M_PI) < 1e-13);
  CHECK(rel_err(modes::mode_energy_in_ball(2, m11, 1.0), 14.0 * M_PI) < 1e-13);
  CHECK(rel_err(modes::mode_energy_in_ball(1, m21, 1.0), 10.5 * M_PI) < 1e-13);
  CHECK(rel_err(modes::mode_energy_in_ball(1, m11, 3.0), 18.0 * M_PI) < 1e-13);

  // Mixed-mode energy: orthogonality of the two modes.
  const ModeField f{m11, 1.0, 0.5, AngleBranch::pm_pi};
  CHECK(rel_err(f.energy_in_ball(1.0), (12.0 + 0.25 * 28.0) * M_PI / 2.0) <
        1e-13);

  // Against a numerical quadrature of the energy density.
  const ModeField g{m21, 0.7, -0.2, AngleBranch::zero_2pi};
  const int nr = 400, nt = 400;
  double quad = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) / nr;
    for (int j = 0; j < nt; ++j) {
      const double t = 2.0 * M_PI * (j + 0.5) / nt;
      const Vec2 x = polar(r, t);
      quad += m21.energy_density(g.strain(x)) * r * (1.0 / nr) *
              (2.0 * M_PI / nt);
    }
  }
  CHECK(rel_err(g.energy_in_ball(1.0), quad) < 2e-3);
}

TEST_CASE("mode audit selects the traction-free branch") {
  AngleBranch sel = AngleBranch::zero_2pi;
  const std::string report = audit_mode_profiles(Material{1.0, 1.0}, &sel);
  CHECK(sel == AngleBranch::pm_pi);
  CHECK(report.find("theta-pm-pi") != std::string::npos);
  CHECK(report.find("legacy") != std::string::npos);

#ifdef CRACKTIP_GOLDEN_DIR
  const std::string path = std::string(CRACKTIP_GOLDEN_DIR) + "/mode_audit.json";
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK_MESSAGE(report == buf.str(), "mode audit drifted from ", path);
#endif
}
