#include "cracktip/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace cracktip {

AngleBranch angle_branch_from_string(const std::string& s) {
  if (s == "theta-pm-pi") return AngleBranch::pm_pi;
  if (s == "theta-0-2pi") return AngleBranch::zero_2pi;
  throw std::invalid_argument("unknown angle branch: " + s);
}

std::string to_string(AngleBranch b) {
  return b == AngleBranch::pm_pi ? "theta-pm-pi" : "theta-0-2pi";
}

double branch_angle(const Vec2& x, AngleBranch b) {
  double a = std::atan2(x.y, x.x);
  if (b == AngleBranch::zero_2pi && a < 0.0) a += 2.0 * M_PI;
  return a;
}

namespace modes {

namespace {

struct HalfAngles {
  double c05, s05, c15, s15;
  explicit HalfAngles(double theta)
      : c05(std::cos(0.5 * theta)),
        s05(std::sin(0.5 * theta)),
        c15(std::cos(1.5 * theta)),
        s15(std::sin(1.5 * theta)) {}
};

void check_mode(int mode) {
  if (mode != 1 && mode != 2) throw std::invalid_argument("mode must be 1 or 2");
}

}  // namespace

Vec2 legacy_phi(int mode, double theta, const Material& mat) {
  check_mode(mode);
  const double l = mat.lambda, m = mat.mu;
  const HalfAngles t(theta);
  const double B = 0.5 * (l + m);
  if (mode == 1)
    return {B * t.c15 + 0.5 * (l - 3.0 * m) * t.c05,
            B * t.s15 + 0.5 * (5.0 * l + 9.0 * m) * t.s05};
  return {-B * t.s15 - 0.5 * (3.0 * l + 7.0 * m) * t.s05,
          B * t.c15 + 0.5 * (l + 5.0 * m) * t.c05};
}

double legacy_psi(int mode, double theta) {
  check_mode(mode);
  const HalfAngles t(theta);
  if (mode == 1) return 1.5 * t.c05 - 0.5 * t.c15;
  return 1.5 * t.s05 + 0.5 * t.s15;
}

Vec2 phi(int mode, double theta, const Material& mat, AngleBranch b) {
  check_mode(mode);
  const double l = mat.lambda, m = mat.mu;
  const HalfAngles t(theta);
  const double B = 0.5 * (l + m);
  const double A1 = 0.5 * (l + 5.0 * m);
  const double C1 = 0.5 * (3.0 * l + 7.0 * m);
  const double C2 = 0.5 * (5.0 * l + 9.0 * m);
  const double D2 = 0.5 * (l - 3.0 * m);
  if (b == AngleBranch::pm_pi) {
    if (mode == 1) return {A1 * t.c05 - B * t.c15, C1 * t.s05 - B * t.s15};
    return {B * t.s15 + C2 * t.s05, D2 * t.c05 - B * t.c15};
  }
  if (mode == 1) return {-B * t.s15 - A1 * t.s05, B * t.c15 + C1 * t.c05};
  return {C2 * t.c05 - B * t.c15, -B * t.s15 - D2 * t.s05};
}

Vec2 phi_dtheta(int mode, double theta, const Material& mat, AngleBranch b) {
  check_mode(mode);
  const double l = mat.lambda, m = mat.mu;
  const HalfAngles t(theta);
  const double B = 0.5 * (l + m);
  const double A1 = 0.5 * (l + 5.0 * m);
  const double C1 = 0.5 * (3.0 * l + 7.0 * m);
  const double C2 = 0.5 * (5.0 * l + 9.0 * m);
  const double D2 = 0.5 * (l - 3.0 * m);
  if (b == AngleBranch::pm_pi) {
    if (mode == 1)
      return {-0.5 * A1 * t.s05 + 1.5 * B * t.s15,
              0.5 * C1 * t.c05 - 1.5 * B * t.c15};
    return {1.5 * B * t.c15 + 0.5 * C2 * t.c05,
            -0.5 * D2 * t.s05 + 1.5 * B * t.s15};
  }
  if (mode == 1)
    return {-1.5 * B * t.c15 - 0.5 * A1 * t.c05,
            -1.5 * B * t.s15 - 0.5 * C1 * t.s05};
  return {-0.5 * C2 * t.s05 + 1.5 * B * t.s15,
          -1.5 * B * t.c15 - 0.5 * D2 * t.c05};
}

double airy_profile(int mode, double theta, AngleBranch b) {
  check_mode(mode);
  const HalfAngles t(theta);
  if (b == AngleBranch::pm_pi)
    return mode == 1 ? 0.25 * (t.c15 + 3.0 * t.c05) : 0.5 * (t.s15 + t.s05);
  return mode == 1 ? 0.25 * (t.s15 - 3.0 * t.s05) : 0.5 * (t.c15 - t.c05);
}

double airy_profile_d1(int mode, double theta, AngleBranch b) {
  check_mode(mode);
  const HalfAngles t(theta);
  if (b == AngleBranch::pm_pi)
    return mode == 1 ? 0.25 * (-1.5 * t.s15 - 1.5 * t.s05)
                     : 0.5 * (1.5 * t.c15 + 0.5 * t.c05);
  return mode == 1 ? 0.25 * (1.5 * t.c15 - 1.5 * t.c05)
                   : 0.5 * (-1.5 * t.s15 + 0.5 * t.s05);
}

double airy_profile_d2(int mode, double theta, AngleBranch b) {
  check_mode(mode);
  const HalfAngles t(theta);
  if (b == AngleBranch::pm_pi)
    return mode == 1 ? 0.25 * (-2.25 * t.c15 - 0.75 * t.c05)
                     : 0.5 * (-2.25 * t.s15 - 0.25 * t.s05);
  return mode == 1 ? 0.25 * (-2.25 * t.s15 + 0.75 * t.s05)
                   : 0.5 * (-2.25 * t.c15 + 0.25 * t.c05);
}

double airy_amplitude(int mode, const Material& mat, AngleBranch b) {
  check_mode(mode);
  const double c = mat.mu * (mat.lambda + mat.mu);
  if (mode == 2) return -4.0 * c;
  return b == AngleBranch::pm_pi ? (8.0 / 3.0) * c : -(8.0 / 3.0) * c;
}

double mode_energy_in_ball(int mode, const Material& mat, double R) {
  check_mode(mode);
  const double l = mat.lambda, m = mat.mu;
  const double I = mode == 1 ? M_PI * m * (l + m) * (l + 5.0 * m)
                             : M_PI * m * (l + m) * (5.0 * l + 9.0 * m);
  return 0.5 * R * I;
}

}  // namespace modes

namespace {

// Jacobian of u = sqrt(r) g(theta) given g and g' at x.
Mat2 sqrt_r_gradient(const Vec2& x, const Vec2& g, const Vec2& gp) {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("field gradient undefined at the tip");
  const double c = x.x / r, s = x.y / r;
  const double inv_sqrt_r = 1.0 / std::sqrt(r);
  const Vec2 dx = (g * (0.5 * c) - gp * s) * inv_sqrt_r;
  const Vec2 dy = (g * (0.5 * s) + gp * c) * inv_sqrt_r;
  return {dx.x, dy.x, dx.y, dy.y};
}

}  // namespace

Vec2 ModeField::displacement(const Vec2& x) const {
  const double r = x.norm();
  const double th = branch_angle(x, branch);
  const Vec2 g = modes::phi(1, th, mat, branch) * k1 +
                 modes::phi(2, th, mat, branch) * k2;
  return g * std::sqrt(r);
}

Mat2 ModeField::gradient(const Vec2& x) const {
  const double th = branch_angle(x, branch);
  const Vec2 g = modes::phi(1, th, mat, branch) * k1 +
                 modes::phi(2, th, mat, branch) * k2;
  const Vec2 gp = modes::phi_dtheta(1, th, mat, branch) * k1 +
                  modes::phi_dtheta(2, th, mat, branch) * k2;
  return sqrt_r_gradient(x, g, gp);
}

SymTensor2 ModeField::strain(const Vec2& x) const { return sym(gradient(x)); }

SymTensor2 ModeField::stress(const Vec2& x) const {
  return mat.stress(strain(x));
}

double ModeField::airy(const Vec2& x) const {
  const double r = x.norm();
  const double th = branch_angle(x, branch);
  const double P = k1 * modes::airy_amplitude(1, mat, branch) *
                       modes::airy_profile(1, th, branch) +
                   k2 * modes::airy_amplitude(2, mat, branch) *
                       modes::airy_profile(2, th, branch);
  return P * std::pow(r, 1.5);
}

Mat2 ModeField::airy_hessian(const Vec2& x) const {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("airy hessian undefined at the tip");
  const double th = branch_angle(x, branch);
  const double a1 = k1 * modes::airy_amplitude(1, mat, branch);
  const double a2 = k2 * modes::airy_amplitude(2, mat, branch);
  const double P = a1 * modes::airy_profile(1, th, branch) +
                   a2 * modes::airy_profile(2, th, branch);
  const double P1 = a1 * modes::airy_profile_d1(1, th, branch) +
                    a2 * modes::airy_profile_d1(2, th, branch);
  const double P2 = a1 * modes::airy_profile_d2(1, th, branch) +
                    a2 * modes::airy_profile_d2(2, th, branch);
  const double p = 1.5;
  const double w = std::pow(r, p - 2.0);
  const double c = x.x / r, s = x.y / r;
  // Polar-to-Cartesian second derivatives of r^p Psi(theta).
  const double frr = p * (p - 1.0) * P;
  const double mix = (p - 1.0) * P1;
  const double ang = p * P + P2;
  const double fxx = w * (c * c * frr - 2.0 * c * s * mix + s * s * ang);
  const double fyy = w * (s * s * frr + 2.0 * c * s * mix + c * c * ang);
  const double fxy = w * (c * s * (frr - ang) + (c * c - s * s) * mix);
  return {fxx, fxy, fxy, fyy};
}

double ModeField::energy_in_ball(double R) const {
  return k1 * k1 * modes::mode_energy_in_ball(1, mat, R) +
         k2 * k2 * modes::mode_energy_in_ball(2, mat, R);
}

SymTensor2 stress_from_airy_hessian(const Mat2& H) {
  return {H.a22, -0.5 * (H.a12 + H.a21), H.a11};
}

std::string audit_mode_profiles(const Material& mat, AngleBranch* selected) {
  using json = nlohmann::ordered_json;
  const int N = 720;

  auto stress_of = [&mat](const Vec2& g, const Vec2& gp,
                          const Vec2& x) -> SymTensor2 {
    return mat.stress(sym(sqrt_r_gradient(x, g, gp)));
  };

  // Evaluates the family's angular profile and its theta-derivative.
  auto family_eval = [&mat](bool legacy, AngleBranch b, int mode, double th,
                            Vec2* g, Vec2* gp) {
    if (!legacy) {
      *g = modes::phi(mode, th, mat, b);
      *gp = modes::phi_dtheta(mode, th, mat, b);
      return;
    }
    *g = modes::legacy_phi(mode, th, mat);
    const double h = 1e-6;
    *gp = (modes::legacy_phi(mode, th + h, mat) -
           modes::legacy_phi(mode, th - h, mat)) /
          (2.0 * h);
  };

  json root;
  root["material"] = {{"lambda", mat.lambda}, {"mu", mat.mu}};
  root["samples"] = N;
  json families;

  std::string default_branch;

  for (const bool legacy : {false, true}) {
    json fam;
    for (const AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
      const double lo = b == AngleBranch::pm_pi ? -M_PI : 0.0;
      const double hi = lo + 2.0 * M_PI;
      json branch_report;
      double worst_traction = 0.0;
      for (const int mode : {1, 2}) {
        // Stress scale from interior samples at r = 1.
        double scale = 0.0;
        for (int i = 0; i < N; ++i) {
          const double th = lo + (i + 0.5) * (hi - lo) / N;
          Vec2 g, gp;
          family_eval(legacy, b, mode, th, &g, &gp);
          const Vec2 x{std::cos(th), std::sin(th)};
          scale = std::fmax(scale, std::sqrt(stress_of(g, gp, x).norm2()));
        }

        // Equilibrium: finite-difference divergence of sigma at r = 1,
        // normalized by r |sigma| so a genuine defect shows up as O(1).
        double div_res = 0.0;
        const double h = 1e-5;
        for (int i = 0; i < N; i += 8) {
          const double th = lo + (i + 0.5) * (hi - lo) / N;
          const Vec2 x{std::cos(th), std::sin(th)};
          auto sig = [&](const Vec2& y) {
            const double t2 = branch_angle(y, b);
            Vec2 g, gp;
            family_eval(legacy, b, mode, t2, &g, &gp);
            return stress_of(g, gp, y);
          };
          const SymTensor2 sxp = sig({x.x + h, x.y}), sxm = sig({x.x - h, x.y});
          const SymTensor2 syp = sig({x.x, x.y + h}), sym_ = sig({x.x, x.y - h});
          const double dx1 = (sxp.xx - sxm.xx) / (2.0 * h) +
                             (syp.xy - sym_.xy) / (2.0 * h);
          const double dx2 = (sxp.xy - sxm.xy) / (2.0 * h) +
                             (syp.yy - sym_.yy) / (2.0 * h);
          div_res = std::fmax(div_res, std::hypot(dx1, dx2) / scale);
        }

        // Face tractions at the branch cut; faces carry normals -+ e_theta.
        double trac_res = 0.0;
        for (const double face : {lo, hi}) {
          Vec2 g, gp;
          family_eval(legacy, b, mode, face, &g, &gp);
          const Vec2 x{std::cos(face), std::sin(face)};
          const SymTensor2 s = stress_of(g, gp, x);
          const Vec2 n{-std::sin(face), std::cos(face)};
          trac_res = std::fmax(trac_res, s.apply(n).norm() / scale);
        }
        worst_traction = std::fmax(worst_traction, trac_res);

        // Partner consistency: validated profiles must reproduce the stress
        // through the biharmonic partner's hessian; legacy partners are
        // checked for clamped faces instead.
        double partner_res = 0.0;
        if (!legacy) {
          ModeField f{mat, mode == 1 ? 1.0 : 0.0, mode == 2 ? 1.0 : 0.0, b};
          for (int i = 0; i < N; i += 8) {
            const double th = lo + (i + 0.5) * (hi - lo) / N;
            const Vec2 x{std::cos(th), std::sin(th)};
            const SymTensor2 d =
                stress_from_airy_hessian(f.airy_hessian(x)) - f.stress(x);
            partner_res = std::fmax(partner_res, std::sqrt(d.norm2()) / scale);
          }
        } else {
          for (const double face : {lo, hi}) {
            const double hh = 1e-6;
            const double v = modes::legacy_psi(mode, face);
            const double vp = (modes::legacy_psi(mode, face + hh) -
                               modes::legacy_psi(mode, face - hh)) /
                              (2.0 * hh);
            partner_res = std::fmax(partner_res, std::fabs(v) + std::fabs(vp));
          }
        }

        json mj;
        mj["div_residual"] = div_res;
        mj["traction_residual"] = trac_res;
        mj[legacy ? "clamp_residual" : "partner_residual"] = partner_res;
        branch_report[mode == 1 ? "mode1" : "mode2"] = mj;
      }
      branch_report["max_traction_residual"] = worst_traction;
      fam[to_string(b)] = branch_report;
      if (!legacy && worst_traction < 1e-8 && default_branch.empty())
        default_branch = to_string(b);
    }
    families[legacy ? "legacy" : "validated"] = fam;
  }

  root["families"] = families;
  root["selection_rule"] =
      "first branch whose validated profiles have traction residual < 1e-8";
  root["default_branch"] =
      default_branch.empty() ? "none" : default_branch;

  if (selected) {
    if (default_branch.empty())
      throw std::runtime_error("no branch passed the traction audit");
    *selected = angle_branch_from_string(default_branch);
  }
  return root.dump(2) + "\n";
}

double AiryModeField::eval(const Vec2& x) const {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  const double th = branch_angle(x, branch);
  return r * std::sqrt(r) *
         (c1 * modes::airy_profile(1, th, branch) +
          c2 * modes::airy_profile(2, th, branch));
}

Vec2 lame_residual(const ModeField& f, const Vec2& x, double h) {
  if (h <= 0.0) throw std::invalid_argument("step must be positive");
  const Vec2 ex{h, 0.0}, ey{0.0, h};
  const SymTensor2 sxp = f.stress(x + ex), sxm = f.stress(x - ex);
  const SymTensor2 syp = f.stress(x + ey), sym_ = f.stress(x - ey);
  const double inv = 0.5 / h;
  return {(sxp.xx - sxm.xx) * inv + (syp.xy - sym_.xy) * inv,
          (sxp.xy - sxm.xy) * inv + (syp.yy - sym_.yy) * inv};
}

SymTensor2 stress_polar(const ModeField& f, double r, double theta) {
  if (r <= 0.0) throw std::invalid_argument("radius must be positive");
  SymTensor2 s{};
  const Vec2 pos{r * std::cos(theta), r * std::sin(theta)};
  for (int mode = 1; mode <= 2; ++mode) {
    const double k = mode == 1 ? f.k1 : f.k2;
    if (k == 0.0) continue;
    const Vec2 g = modes::phi(mode, theta, f.mat, f.branch);
    const Vec2 gp = modes::phi_dtheta(mode, theta, f.mat, f.branch);
    s = s + f.mat.stress(sym(sqrt_r_gradient(pos, g, gp))) * k;
  }
  return s;
}

Vec2 crack_traction(const ModeField& f, double r, int face) {
  if (face != 0 && face != 1) throw std::invalid_argument("face must be 0 or 1");
  const double lo = f.branch == AngleBranch::pm_pi ? -M_PI : 0.0;
  const double th = face == 0 ? lo : lo + 2.0 * M_PI;
  // The angular profiles are analytic in theta, so the one-sided limit is
  // the plain evaluation at the face angle.
  const SymTensor2 s = stress_polar(f, r, th);
  const Vec2 n{-std::sin(th), std::cos(th)};
  return s.apply(n);
}

double biharmonic_residual(const AiryModeField& w, const Vec2& x, double h) {
  if (h <= 0.0) throw std::invalid_argument("step must be positive");
  const auto lap = [&](const Vec2& p) {
    return (w.eval({p.x + h, p.y}) + w.eval({p.x - h, p.y}) +
            w.eval({p.x, p.y + h}) + w.eval({p.x, p.y - h}) -
            4.0 * w.eval(p)) /
           (h * h);
  };
  return (lap({x.x + h, x.y}) + lap({x.x - h, x.y}) + lap({x.x, x.y + h}) +
          lap({x.x, x.y - h}) - 4.0 * lap(x)) /
         (h * h);
}

}  // namespace cracktip
