#include "cracktip/err.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "cracktip/errors.hpp"
#include "cracktip/fields.hpp"
#include "cracktip/mesh.hpp"

namespace cracktip {

double collinear_direction(const CrackSet& base) {
  if (base.empty()) throw ConfigError("crack has no chains");
  bool found = false;
  Vec2 dir{0.0, 0.0};
  for (const auto& chain : base.chains()) {
    if (chain.size() < 2) continue;
    Vec2 adj{0.0, 0.0};
    bool ends_here = false;
    if (chain.front().norm() == 0.0) {
      adj = chain[1];
      ends_here = true;
    } else if (chain.back().norm() == 0.0) {
      adj = chain[chain.size() - 2];
      ends_here = true;
    }
    if (!ends_here) continue;
    const Vec2 d = (-1.0 / adj.norm()) * adj;
    if (found && (d - dir).norm() > 1e-9)
      throw ConfigError("tip continuation direction is ambiguous");
    dir = d;
    found = true;
  }
  if (!found) throw ConfigError("no chain ends at the origin");
  return std::atan2(dir.y, dir.x);
}

double compute_G(const CrackSet& base, const CrackSet& increment,
                 const SolveOptions& opt, const BoundaryFn& bd) {
  if (increment.empty() || increment.length() == 0.0) return 0.0;

  auto chains = base.chains();
  for (const auto& c : increment.chains()) chains.push_back(c);
  const CrackSet whole(chains);

  MeshParams mp;
  mp.radius = opt.radius;
  mp.h = opt.h;
  mp.grading = opt.grading;
  const CrackMesh mesh = build_mesh(whole, mp);

  // The arms the increment added are the ones whose far end sits on the
  // increment but not on the base; tying them shut recovers the base body.
  const auto arms = decompose_arms(whole);
  std::vector<int> tied;
  const double tol = 1e-9 * opt.radius;
  for (int a = 0; a < static_cast<int>(arms.size()); ++a) {
    const Vec2 end = arms[a].back();
    if (increment.distance_to(end) <= tol && base.distance_to(end) > tol)
      tied.push_back(a);
  }
  if (tied.empty()) throw ConfigError("increment adds no crack arm");

  const ElasticOperator op_base(mesh, opt.mat, opt.order, tied);
  const ElasticOperator op_ext(mesh, opt.mat, opt.order);
  const double e_base = op_base.solve_boundary(bd).energy;
  const double e_ext = op_ext.solve_boundary(bd).energy;
  return e_ext - e_base;
}

double circle_competitor_bound(const ElasticOperator& op,
                               const Eigen::VectorXd& u, double eps) {
  if (eps <= 0.0) throw ConfigError("eps must be positive");
  const double rho = eps / (2.0 * M_PI + 1.0);
  return -energy_in_ball(op, u, rho) / eps;
}

namespace {

constexpr double kGolden = 0.6180339887498949;

}  // namespace

ErrResult g_eps(const CrackSet& base, double eps, const SolveOptions& opt,
                const BoundaryFn& bd, const FamilyOptions& family) {
  if (eps <= 0.0 || eps >= opt.radius)
    throw ConfigError("eps must lie in (0, radius)");
  if (family.n_angles < 1) throw ConfigError("empty increment family");
  const double dir0 = collinear_direction(base);

  std::vector<double> angles;
  if (family.n_angles == 1) {
    angles.push_back(0.5 * (family.angle_lo + family.angle_hi));
  } else {
    const double step =
        (family.angle_hi - family.angle_lo) / (family.n_angles - 1);
    for (int i = 0; i < family.n_angles; ++i)
      angles.push_back(family.angle_lo + i * step);
  }

  const auto eval = [&](double rel) {
    return compute_G(base, CrackSet::straight(eps, dir0 + rel), opt, bd);
  };

  std::vector<ErrCandidate> table(angles.size());
  {
    const int jobs = std::max(1, family.jobs);
    const auto run = [&](int first, int stride) {
      for (size_t i = first; i < angles.size(); i += stride) {
        table[i].angle = angles[i];
        table[i].G = eval(angles[i]);
        table[i].G_over_eps = table[i].G / eps;
      }
    };
    if (jobs == 1 || angles.size() == 1) {
      run(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (int j = 0; j < jobs; ++j) pool.emplace_back(run, j, jobs);
      for (auto& t : pool) t.join();
    }
  }

  size_t best = 0;
  for (size_t i = 1; i < table.size(); ++i)
    if (table[i].G < table[best].G) best = i;

  ErrResult out;
  out.eps = eps;
  out.best_angle = table[best].angle;
  out.g_eps = table[best].G_over_eps;

  if (family.refine && angles.size() >= 2) {
    // Golden-section polish between the grid neighbours of the best angle.
    double a = angles[best == 0 ? 0 : best - 1];
    double b = angles[std::min(best + 1, angles.size() - 1)];
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    table.push_back({x1, f1, f1 / eps});
    table.push_back({x2, f2, f2 / eps});
    for (int it = 0; it < 24 && (b - a) > 1e-3; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = eval(x1);
        table.push_back({x1, f1, f1 / eps});
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = eval(x2);
        table.push_back({x2, f2, f2 / eps});
      }
    }
    const double fb = std::min(f1, f2);
    if (fb < eps * out.g_eps) {
      out.g_eps = fb / eps;
      out.best_angle = f1 <= f2 ? x1 : x2;
    }
  }

  {
    MeshParams mp;
    mp.radius = opt.radius;
    mp.h = opt.h;
    mp.grading = opt.grading;
    const CrackMesh mesh = build_mesh(base, mp);
    const ElasticOperator op(mesh, opt.mat, opt.order);
    const FemSolution sol = op.solve_boundary(bd);
    out.circle_bound = circle_competitor_bound(op, sol.u, eps);
  }

  out.table = std::move(table);
  return out;
}

double limit_functional(const CrackSet& increment, const LimitOptions& opt) {
  return limit_functional_detailed(increment, opt).F;
}

LimitResult limit_functional_detailed(const CrackSet& increment,
                                      const LimitOptions& opt) {
  if (opt.R <= 0.0) throw ConfigError("matching radius must be positive");
  if (opt.R_out_factor <= 2.0)
    throw ConfigError("truncation radius too close to the matching radius");
  if (!increment.empty() && increment.max_radius() >= opt.R)
    throw ConfigError("increment must stay inside the matching ball");

  const double r_out = opt.R_out_factor * opt.R;
  // Half line out to the outer circle; the mesher opens the boundary there.
  const double dir = opt.branch == AngleBranch::pm_pi ? M_PI : 0.0;
  auto chains = increment.chains();
  chains.push_back(
      {Vec2{0.0, 0.0}, Vec2{r_out * std::cos(dir), r_out * std::sin(dir)}});
  const CrackSet whole(chains);

  MeshParams mp;
  mp.radius = r_out;
  mp.h = opt.h;
  mp.grading = opt.grading;
  mp.size_ref = opt.R;
  mp.mandatory_radii = {opt.R};
  const CrackMesh mesh = build_mesh(whole, mp);

  const ElasticOperator op(mesh, opt.mat, opt.order, {},
                           /*dirichlet_outer=*/false);

  const ModeField field{opt.mat, opt.k1, opt.k2, opt.branch};
  const StressFn sig = [&field](const Vec2& x) { return field.stress(x); };

  Eigen::VectorXd load = Eigen::VectorXd::Zero(op.dof_count());
  op.accumulate_ring_traction_load(sig, opt.R, &load);
  Eigen::VectorXd vol = Eigen::VectorXd::Zero(op.dof_count());
  op.accumulate_stress_volume_load(sig, opt.R, &vol);
  load -= vol;

  const FemSolution sol = op.solve_load(load);
  LimitResult out;
  out.F = sol.energy - load.dot(sol.u);
  out.nodes = mesh.node_count();
  out.tris = mesh.tri_count();
  out.dofs = op.dof_count();
  return out;
}

double r_independence_spread(const CrackSet& increment, LimitOptions opt,
                             const std::vector<double>& r_list) {
  if (r_list.size() < 2) throw ConfigError("need at least two radii");
  std::vector<double> vals;
  for (double r : r_list) {
    opt.R = r;
    vals.push_back(limit_functional(increment, opt));
  }
  double lo = vals[0], hi = vals[0], mag = std::abs(vals[0]);
  for (double v : vals) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mag = std::max(mag, std::abs(v));
  }
  if (mag == 0.0) return 0.0;
  return (hi - lo) / mag;
}

}  // namespace cracktip
