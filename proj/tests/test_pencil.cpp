#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <fstream>
#include <sstream>

#include "cracktip/errors.hpp"
#include "cracktip/pencil.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace cracktip;

TEST_CASE("regularized basis reduces to cos and sin/s") {
  std::array<double, 4> v{}, d{};
  for (double s : {0.7, 1.3, 2.6}) {
    for (double t : {-2.0, 0.4, 3.0}) {
      pencil_basis(s, t, &v, &d);
      CHECK(v[0] == doctest::Approx(std::cos(s * t)).epsilon(1e-13));
      CHECK(v[1] == doctest::Approx(std::sin(s * t) / s).epsilon(1e-13));
      // Derivatives against finite differences.
      std::array<double, 4> vp{}, vm{}, dd{};
      const double h = 1e-6;
      pencil_basis(s, t + h, &vp, &dd);
      pencil_basis(s, t - h, &vm, &dd);
      for (int k = 0; k < 4; ++k) {
        const double fd = (vp[k] - vm[k]) / (2 * h);
        CHECK(std::fabs(d[k] - fd) < 1e-7 * (1.0 + std::fabs(fd)));
      }
    }
  }
}

TEST_CASE("basis stays regular through s = 1 and s = 2") {
  // The divided-difference members interpolate between frequencies s and
  // s - 2; they must vary continuously where the naive system degenerates.
  std::array<double, 4> a{}, b{}, d{};
  for (double s0 : {1.0, 2.0}) {
    pencil_basis(s0 - 1e-7, 1.1, &a, &d);
    pencil_basis(s0 + 1e-7, 1.1, &b, &d);
    for (int k = 0; k < 4; ++k) CHECK(std::fabs(a[k] - b[k]) < 1e-5);
  }
}

TEST_CASE("boundary matrix rows are face values and derivatives") {
  const double s = 1.7;
  const Eigen::Matrix4d M = pencil_matrix(s, AngleBranch::pm_pi);
  std::array<double, 4> v{}, d{};
  pencil_basis(s, -M_PI, &v, &d);
  for (int k = 0; k < 4; ++k) {
    CHECK(M(0, k) == doctest::Approx(v[k]).epsilon(1e-14));
    CHECK(M(1, k) == doctest::Approx(d[k]).epsilon(1e-14));
  }
  pencil_basis(s, M_PI, &v, &d);
  for (int k = 0; k < 4; ++k) {
    CHECK(M(2, k) == doctest::Approx(v[k]).epsilon(1e-14));
    CHECK(M(3, k) == doctest::Approx(d[k]).epsilon(1e-14));
  }
}

TEST_CASE("determinant symmetry about s = 1") {
  for (AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    for (double s : {0.55, 0.9, 1.25, 1.8}) {
      const double d1 = pencil_det(s, b);
      const double d2 = pencil_det(2.0 - s, b);
      CHECK(std::fabs(d1 - d2) < 1e-10 * (std::fabs(d1) + 1.0));
    }
  }
}

TEST_CASE("spectrum on the slit plane") {
  for (AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    PencilOptions opt;
    opt.branch = b;
    const auto roots = find_pencil_roots(opt);
    REQUIRE(roots.size() == 6);
    const double want[6] = {0.5, 1.5, 2.0, 2.5, 3.0, 3.5};
    for (int i = 0; i < 6; ++i) {
      CHECK(std::fabs(roots[i].s - want[i]) < 1e-8);
      CHECK(roots[i].multiplicity == (i == 2 ? 1 : 2));
      CHECK(roots[i].sigma_min_rel < 1e-9);
    }
  }
}

TEST_CASE("integers that are not eigenvalues are rejected") {
  // The naive determinant -4 sin^2(2 pi s) vanishes at every half integer
  // including s = 1, which is not an eigenvalue: the regularized system
  // must stay well-conditioned there.
  CHECK(pencil_sigma_min_rel(1.0, AngleBranch::pm_pi) > 1e-3);
  CHECK(pencil_kernel(1.0, AngleBranch::pm_pi).empty());
  PencilOptions opt;
  opt.s_min = 0.9;
  opt.s_max = 1.1;
  CHECK(find_pencil_roots(opt).empty());
}

TEST_CASE("kernel at s = 2 is the single clamped harmonic") {
  const auto ker = pencil_kernel(2.0, AngleBranch::pm_pi);
  REQUIRE(ker.size() == 1);
  // v(theta) must be proportional to 1 - cos(2 theta).
  auto eval = [&](double t) {
    std::array<double, 4> v{}, d{};
    pencil_basis(2.0, t, &v, &d);
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += ker[0][k] * v[k];
    return s;
  };
  const double c = eval(M_PI / 2) / 2.0;  // 1 - cos(pi) = 2
  REQUIRE(std::fabs(c) > 1e-12);
  for (double t : {-2.5, -1.0, 0.3, 1.4, 2.9}) {
    CHECK(eval(t) == doctest::Approx(c * (1.0 - std::cos(2 * t))).epsilon(1e-9));
  }
}

TEST_CASE("clamped boundary conditions hold on the kernel") {
  for (AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    const double lo = b == AngleBranch::pm_pi ? -M_PI : 0.0;
    for (double s : {0.5, 1.5, 2.5, 3.5}) {
      const auto ker = pencil_kernel(s, b);
      REQUIRE(ker.size() == 2);
      for (const auto& coef : ker) {
        for (double face : {lo, lo + 2 * M_PI}) {
          std::array<double, 4> v{}, d{};
          pencil_basis(s, face, &v, &d);
          double val = 0.0, der = 0.0;
          for (int k = 0; k < 4; ++k) {
            val += coef[k] * v[k];
            der += coef[k] * d[k];
          }
          CHECK(std::fabs(val) < 1e-9);
          CHECK(std::fabs(der) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("scan window validation") {
  PencilOptions opt;
  opt.s_min = 2.0;
  opt.s_max = 1.0;
  CHECK_THROWS_AS(find_pencil_roots(opt), ConfigError);
  opt.s_min = 0.4;
  opt.s_max = 3.6;
  opt.scan_step = 0.0;
  CHECK_THROWS_AS(find_pencil_roots(opt), ConfigError);
}

TEST_CASE("exponent eigenspace audit") {
  const std::string report = audit_exponent_eigenspace();
  // Validated partner profiles live in the 3/2 eigenspace on both
  // branches; the legacy profiles do not.
  CHECK(report.find("\"in_eigenspace\": true") != std::string::npos);
  std::istringstream is(report);
  std::string line;
  int in_true = 0, in_false = 0;
  bool legacy_section = false;
  while (std::getline(is, line)) {
    if (line.find("legacy_partner") != std::string::npos) legacy_section = true;
    if (line.find("\"in_eigenspace\": true") != std::string::npos) ++in_true;
    if (line.find("\"in_eigenspace\": false") != std::string::npos) ++in_false;
  }
  CHECK(legacy_section);
  CHECK(in_true == 4);   // partner_1, partner_2 on both branches
  CHECK(in_false == 4);  // legacy pair on both branches

#ifdef CRACKTIP_GOLDEN_DIR
  const std::string path =
      std::string(CRACKTIP_GOLDEN_DIR) + "/exponent_eigenspace.json";
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK_MESSAGE(report == buf.str(), "eigenspace audit drifted from ", path);
#endif
}
