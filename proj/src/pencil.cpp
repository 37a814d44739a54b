#include "cracktip/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cracktip/errors.hpp"
#include "json.hpp"

namespace cracktip {

namespace {

// sin(a t) / a, stable through a = 0.
double sinc_scaled(double a, double t) {
  const double x = a * t;
  if (std::fabs(x) < 1e-4) {
    const double x2 = x * x;
    return t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0));
  }
  return std::sin(x) / a;
}

// Divided difference [S(n^2) - S(m^2)] / (n^2 - m^2) of S(a) = sin(sqrt(a) t)
// / sqrt(a), analytic in both frequency squares. Series branch keeps the
// value finite through n^2 = m^2 (s = 1).
double dd_sin(double m, double n, double t) {
  const double dm = n * n - m * m;
  if (std::fabs(dm) > 0.05) {
    return (sinc_scaled(n, t) - sinc_scaled(m, t)) / dm;
  }
  const double m2 = m * m, n2 = n * n, t2 = t * t;
  double sum = 0.0;
  double a = -t * t2 / 6.0;   // (-1)^k t^{2k+1} / (2k+1)! at k = 1
  double h = 1.0;             // sum_{j<k} n^{2j} m^{2(k-1-j)} at k = 1
  double npow = 1.0;          // n^{2(k-1)}
  for (int k = 1; k < 60; ++k) {
    const double term = a * h;
    sum += term;
    if (std::fabs(term) < 1e-18 * (1.0 + std::fabs(sum)) && k > 4) break;
    a *= -t2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    npow *= n2;
    h = h * m2 + npow;
  }
  return sum;
}

}  // namespace

void pencil_basis(double s, double theta, std::array<double, 4>* val,
                  std::array<double, 4>* deriv) {
  const double m = s, n = s - 2.0, p = s - 1.0;
  const double t = theta;
  const double u1 = std::cos(m * t);
  const double u2 = sinc_scaled(m, t);
  // u3 = [cos(n t) - cos(m t)] / (n^2 - m^2) = -sin(t) sin(p t) / (2 p).
  const double u3 = -0.5 * std::sin(t) * sinc_scaled(p, t);
  const double u4 = dd_sin(m, n, t);

  const double d1 = -m * std::sin(m * t);
  const double d2 = std::cos(m * t);
  const double d3 = -0.5 * (std::cos(t) * sinc_scaled(p, t) +
                            std::sin(t) * std::cos(p * t));
  const double d4 = u3;  // d/dt of the sine divided difference
  *val = {u1, u2, u3, u4};
  *deriv = {d1, d2, d3, d4};
}

Eigen::Matrix4d pencil_matrix(double s, AngleBranch b) {
  const double lo = b == AngleBranch::pm_pi ? -M_PI : 0.0;
  const double hi = lo + 2.0 * M_PI;
  std::array<double, 4> v_lo, d_lo, v_hi, d_hi;
  pencil_basis(s, lo, &v_lo, &d_lo);
  pencil_basis(s, hi, &v_hi, &d_hi);
  Eigen::Matrix4d M;
  for (int j = 0; j < 4; ++j) {
    M(0, j) = v_lo[j];
    M(1, j) = d_lo[j];
    M(2, j) = v_hi[j];
    M(3, j) = d_hi[j];
  }
  return M;
}

double pencil_det(double s, AngleBranch b) { return pencil_matrix(s, b).determinant(); }

double pencil_sigma_min_rel(double s, AngleBranch b) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(pencil_matrix(s, b));
  const auto& sv = svd.singularValues();
  return sv(3) / sv(0);
}

namespace {

// Golden-section minimization of f on [a, b] down to interval width tol.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<PencilRoot> find_pencil_roots(const PencilOptions& opt) {
  if (!(opt.s_max > opt.s_min) || !(opt.scan_step > 0.0))
    throw ConfigError("bad pencil scan window");
  const int n = static_cast<int>(std::ceil((opt.s_max - opt.s_min) / opt.scan_step));
  std::vector<double> grid(n + 1), val(n + 1);
  for (int i = 0; i <= n; ++i) {
    grid[i] = opt.s_min + (opt.s_max - opt.s_min) * i / n;
    val[i] = pencil_sigma_min_rel(grid[i], opt.branch);
  }
  auto f = [&](double s) { return pencil_sigma_min_rel(s, opt.branch); };

  std::vector<PencilRoot> roots;
  for (int i = 1; i < n; ++i) {
    if (!(val[i] <= val[i - 1] && val[i] <= val[i + 1])) continue;
    const double s_star =
        golden_min(f, grid[i - 1], grid[i + 1], std::min(opt.root_tol, 1e-10));
    const double res = f(s_star);
    if (res >= opt.accept_tol) continue;
    if (!roots.empty() && std::fabs(roots.back().s - s_star) < 1e-6) continue;
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(pencil_matrix(s_star, opt.branch));
    const auto& sv = svd.singularValues();
    int mult = 0;
    for (int k = 0; k < 4; ++k)
      if (sv(k) < opt.mult_rel_tol * sv(0)) ++mult;
    roots.push_back({s_star, mult, res});
  }
  return roots;
}

std::vector<Eigen::Vector4d> pencil_kernel(double s, AngleBranch b,
                                           double rel_tol) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(pencil_matrix(s, b),
                                        Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::Vector4d> out;
  for (int k = 0; k < 4; ++k)
    if (sv(k) < rel_tol * sv(0)) out.push_back(svd.matrixV().col(k));
  return out;
}

namespace {

double kernel_eval(const Eigen::Vector4d& c, double s, double theta) {
  std::array<double, 4> val, der;
  pencil_basis(s, theta, &val, &der);
  return c(0) * val[0] + c(1) * val[1] + c(2) * val[2] + c(3) * val[3];
}

double round_small(double v) { return std::fabs(v) < 1e-12 ? 0.0 : v; }

}  // namespace

std::string audit_exponent_eigenspace() {
  using json = nlohmann::ordered_json;
  const double s = 1.5;
  const int N = 2048;  // Simpson panels (even)

  json root;
  root["exponent"] = s;
  json branches;
  for (const AngleBranch b : {AngleBranch::pm_pi, AngleBranch::zero_2pi}) {
    const double lo = b == AngleBranch::pm_pi ? -M_PI : 0.0;
    const double hi = lo + 2.0 * M_PI;
    const double h = (hi - lo) / N;
    const auto kernel = pencil_kernel(s, b);
    const int dim = static_cast<int>(kernel.size());

    json jb;
    jb["kernel_dim"] = dim;

    // Express each kernel function in the plain trig basis by least squares;
    // the fit is exact, so tiny coefficients are roundoff and get zeroed.
    json ktrig = json::array();
    {
      const int M = 257;
      Eigen::MatrixXd A(M, 4);
      for (int i = 0; i < M; ++i) {
        const double th = lo + i * (hi - lo) / (M - 1);
        A(i, 0) = std::cos(1.5 * th);
        A(i, 1) = std::sin(1.5 * th);
        A(i, 2) = std::cos(0.5 * th);
        A(i, 3) = std::sin(0.5 * th);
      }
      const auto qr = A.colPivHouseholderQr();
      for (const auto& kv : kernel) {
        Eigen::VectorXd rhs(M);
        for (int i = 0; i < M; ++i)
          rhs(i) = kernel_eval(kv, s, lo + i * (hi - lo) / (M - 1));
        const Eigen::Vector4d c = qr.solve(rhs);
        json jc;
        jc["cos_3t2"] = round_small(c(0));
        jc["sin_3t2"] = round_small(c(1));
        jc["cos_t2"] = round_small(c(2));
        jc["sin_t2"] = round_small(c(3));
        ktrig.push_back(jc);
      }
    }
    jb["kernel_trig"] = ktrig;

    // L2 projection of each partner profile onto the eigenspace.
    const auto simpson_w = [&](int i) {
      if (i == 0 || i == N) return 1.0;
      return (i % 2 == 1) ? 4.0 : 2.0;
    };
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<std::vector<double>> ev(dim, std::vector<double>(N + 1));
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i <= N; ++i)
        ev[k][i] = kernel_eval(kernel[k], s, lo + i * h);
    for (int k = 0; k < dim; ++k)
      for (int l = k; l < dim; ++l) {
        double acc = 0.0;
        for (int i = 0; i <= N; ++i) acc += simpson_w(i) * ev[k][i] * ev[l][i];
        G(k, l) = G(l, k) = acc * h / 3.0;
      }
    const Eigen::LDLT<Eigen::MatrixXd> gldlt(G);

    json profiles;
    for (const bool legacy : {false, true}) {
      for (const int mode : {1, 2}) {
        const auto profile = [&](double th) {
          return legacy ? modes::legacy_psi(mode, th)
                        : modes::airy_profile(mode, th, b);
        };
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        double ff = 0.0;
        for (int i = 0; i <= N; ++i) {
          const double f = profile(lo + i * h);
          const double w = simpson_w(i);
          ff += w * f * f;
          for (int k = 0; k < dim; ++k) rhs(k) += w * ev[k][i] * f;
        }
        ff *= h / 3.0;
        rhs *= h / 3.0;
        const Eigen::VectorXd coef = gldlt.solve(rhs);
        // Residual integrated pointwise; the normal-equation identity
        // cancels catastrophically when the profile lies in the span.
        double res2 = 0.0;
        for (int i = 0; i <= N; ++i) {
          double d = profile(lo + i * h);
          for (int k = 0; k < dim; ++k) d -= coef(k) * ev[k][i];
          res2 += simpson_w(i) * d * d;
        }
        res2 *= h / 3.0;
        const double rel = ff > 0.0 ? std::sqrt(res2 / ff) : 0.0;
        json jp;
        jp["relative_residual"] = rel;
        jp["in_eigenspace"] = rel < 1e-8;
        profiles[(legacy ? std::string("legacy_partner_")
                         : std::string("partner_")) +
                 std::to_string(mode)] = jp;
      }
    }
    jb["profiles"] = profiles;
    branches[to_string(b)] = jb;
  }
  root["branches"] = branches;
  return root.dump(2) + "\n";
}

}  // namespace cracktip
