#include "cracktip/blowup.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "cracktip/errors.hpp"

namespace cracktip {

double blowup_rotation(const CrackSet& g, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const CrackSet near_tip = g.clipped(eps);
  if (near_tip.empty())
    throw ConfigError("crack does not meet the blow-up ball");
  const CrackSet ref = reference_crack(1.0);

  auto objective = [&](double th, double tol) {
    return hausdorff_distance(near_tip.transformed(1.0 / eps, th), ref, tol);
  };

  const int N = 4096;
  int best = 0;
  double bv = 1e300;
  for (int i = 0; i < N; ++i) {
    const double v = objective(2.0 * M_PI * i / N, 5e-3);
    if (v < bv) {
      bv = v;
      best = i;
    }
  }

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 2.0 * M_PI * (best - 8) / N;
  double b = 2.0 * M_PI * (best + 8) / N;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(c, 1e-5), fd = objective(d, 1e-5);
  while (b - a > 1e-8) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c, 1e-5);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d, 1e-5);
    }
  }
  double th = std::fmod(0.5 * (a + b), 2.0 * M_PI);
  if (th < 0.0) th += 2.0 * M_PI;
  return th;
}

CrackSet rescale_crack(const CrackSet& g, double eps, double rot) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const CrackSet near_tip = g.clipped(eps);
  if (near_tip.empty()) return near_tip;
  return near_tip.transformed(1.0 / eps, rot);
}

Vec2 rescale_displacement(const ElasticOperator& op, const PointLocator& loc,
                          const Eigen::VectorXd& u, double eps, double rot,
                          const Vec2& y, int side) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const Vec2 x = rotation(-rot).apply(y * eps);
  const Vec2 val = eval_displacement(op, loc, u, x, side);
  return rotation(rot).apply(val) / std::sqrt(eps);
}

double rescale_airy(const PointLocator& loc, const double* w, double eps,
                    double rot, const Vec2& y, int side) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const Vec2 x = rotation(-rot).apply(y * eps);
  return eval_vertex_scalar(loc, w, x, side) / (eps * std::sqrt(eps));
}

namespace {

struct PolarSamples {
  std::vector<Vec2> pts;
};

PolarSamples polar_grid(double r_in, double r_out, int n_theta,
                        AngleBranch branch) {
  if (n_theta < 64) throw ConfigError("fit needs at least 64 angular samples");
  if (!(0.0 < r_in && r_in < r_out))
    throw ConfigError("fit annulus is degenerate");
  const double lo = branch == AngleBranch::pm_pi ? -M_PI : 0.0;
  const double guard = 2.0 * M_PI / n_theta;
  const int n_r = std::max(4, n_theta / 16);
  PolarSamples s;
  s.pts.reserve(static_cast<size_t>(n_theta) * n_r);
  for (int j = 0; j < n_theta; ++j) {
    const double th =
        lo + guard + j * (2.0 * M_PI - 2.0 * guard) / (n_theta - 1);
    for (int i = 0; i < n_r; ++i) {
      const double r = r_in + (i + 0.5) * (r_out - r_in) / n_r;
      s.pts.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  return s;
}

}  // namespace

BlowUpFit fit_modes_field(const std::function<Vec2(const Vec2&)>& field,
                          const Material& mat, double r_in, double r_out,
                          int n_theta, AngleBranch branch) {
  const PolarSamples s = polar_grid(r_in, r_out, n_theta, branch);

  Eigen::Matrix<double, 5, 5> N = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 1> rhs = Eigen::Matrix<double, 5, 1>::Zero();
  double ynorm2 = 0.0;
  for (const Vec2& p : s.pts) {
    const double r = p.norm();
    const double th = branch_angle(p, branch);
    const double sq = std::sqrt(r);
    const Vec2 f1 = modes::phi(1, th, mat, branch) * sq;
    const Vec2 f2 = modes::phi(2, th, mat, branch) * sq;
    const Vec2 val = field(p);
    const double Ax[5] = {f1.x, f2.x, 1.0, 0.0, -p.y};
    const double Ay[5] = {f1.y, f2.y, 0.0, 1.0, p.x};
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) N(i, j) += Ax[i] * Ax[j] + Ay[i] * Ay[j];
      rhs(i) += Ax[i] * val.x + Ay[i] * val.y;
    }
    ynorm2 += val.norm2();
  }
  const Eigen::Matrix<double, 5, 1> c = N.ldlt().solve(rhs);
  const double r2 = std::fmax(0.0, ynorm2 - 2.0 * c.dot(rhs) + c.dot(N * c));

  BlowUpFit fit;
  fit.kappa1 = c(0);
  fit.kappa2 = c(1);
  fit.rigid.c = {c(2), c(3)};
  fit.rigid.w = c(4);
  fit.residual = ynorm2 > 0.0 ? std::sqrt(r2 / ynorm2) : 0.0;
  fit.r_in = r_in;
  fit.r_out = r_out;
  return fit;
}

AiryFit fit_airy_field(const std::function<double(const Vec2&)>& field,
                       double r_in, double r_out, int n_theta,
                       AngleBranch branch) {
  const PolarSamples s = polar_grid(r_in, r_out, n_theta, branch);

  Eigen::Matrix<double, 5, 5> N = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 1> rhs = Eigen::Matrix<double, 5, 1>::Zero();
  double ynorm2 = 0.0;
  for (const Vec2& p : s.pts) {
    const double r = p.norm();
    const double th = branch_angle(p, branch);
    const double r32 = r * std::sqrt(r);
    const double A[5] = {r32 * modes::airy_profile(1, th, branch),
                         r32 * modes::airy_profile(2, th, branch), 1.0, p.x,
                         p.y};
    const double val = field(p);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) N(i, j) += A[i] * A[j];
      rhs(i) += A[i] * val;
    }
    ynorm2 += val * val;
  }
  const Eigen::Matrix<double, 5, 1> c = N.ldlt().solve(rhs);
  const double r2 = std::fmax(0.0, ynorm2 - 2.0 * c.dot(rhs) + c.dot(N * c));

  AiryFit fit;
  fit.c1 = c(0);
  fit.c2 = c(1);
  fit.affine[0] = c(2);
  fit.affine[1] = c(3);
  fit.affine[2] = c(4);
  fit.residual = ynorm2 > 0.0 ? std::sqrt(r2 / ynorm2) : 0.0;
  fit.r_in = r_in;
  fit.r_out = r_out;
  return fit;
}

BlowUpFit fit_modes(const ElasticOperator& op, const PointLocator& loc,
                    const Eigen::VectorXd& u, double eps, double rot,
                    double r_in, double r_out, int n_theta,
                    AngleBranch branch) {
  auto field = [&](const Vec2& y) {
    return rescale_displacement(op, loc, u, eps, rot, y);
  };
  BlowUpFit fit = fit_modes_field(field, op.material(), r_in, r_out, n_theta,
                                  branch);
  fit.eps = eps;
  fit.rot = rot;
  return fit;
}

AiryFit fit_airy_modes(const PointLocator& loc, const double* w, double eps,
                       double rot, double r_in, double r_out, int n_theta,
                       AngleBranch branch) {
  auto field = [&](const Vec2& y) {
    return rescale_airy(loc, w, eps, rot, y);
  };
  AiryFit fit = fit_airy_field(field, r_in, r_out, n_theta, branch);
  fit.eps = eps;
  return fit;
}

std::vector<double> decay_profile(const ElasticOperator& op,
                                  const Eigen::VectorXd& u,
                                  const std::vector<double>& rhos) {
  std::vector<double> out;
  out.reserve(rhos.size());
  for (double rho : rhos) {
    if (!(rho > 0.0)) throw std::invalid_argument("profile radius must be > 0");
    out.push_back(stress_sq_in_ball(op, u, rho) / rho);
  }
  return out;
}

std::vector<double> decay_profile_fn(const CrackMesh& mesh,
                                     const StressFn& sig,
                                     const std::vector<double>& rhos) {
  std::vector<double> out;
  out.reserve(rhos.size());
  for (double rho : rhos) {
    if (!(rho > 0.0)) throw std::invalid_argument("profile radius must be > 0");
    double acc = 0.0;
    for (int t = 0; t < mesh.tri_count(); ++t) {
      const Vec2 c = mesh.tri_centroid(t);
      if (c.norm() < rho) acc += mesh.tri_area(t) * sig(c).norm2();
    }
    out.push_back(acc / rho);
  }
  return out;
}

double mode_stress_sq_constant(const ModeField& f) {
  const double lo = f.branch == AngleBranch::pm_pi ? -M_PI : 0.0;
  const int N = 4096;  // Simpson intervals (even)
  const double h = 2.0 * M_PI / N;
  double acc = 0.0;
  for (int j = 0; j <= N; ++j) {
    const double th = lo + j * h;
    const double v = stress_polar(f, 1.0, th).norm2();
    const double w = (j == 0 || j == N) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * v;
  }
  return acc * h / 3.0;
}

}  // namespace cracktip
