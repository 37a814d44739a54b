#include <algorithm>
#include <array>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cracktip/airy.hpp"
#include "cracktip/blowup.hpp"
#include "cracktip/config.hpp"
#include "cracktip/crack.hpp"
#include "cracktip/err.hpp"
#include "cracktip/errors.hpp"
#include "cracktip/fem.hpp"
#include "cracktip/fields.hpp"
#include "cracktip/io.hpp"
#include "cracktip/mesh.hpp"
#include "cracktip/pencil.hpp"
#include "json.hpp"

namespace {

using cracktip::AngleBranch;
using cracktip::BoundaryFn;
using cracktip::CrackMesh;
using cracktip::CrackSet;
using cracktip::ElasticOperator;
using cracktip::FemSolution;
using cracktip::MeshParams;
using cracktip::PointLocator;
using cracktip::ScenarioConfig;
using cracktip::Vec2;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.2.0";

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// Collects written artifacts for the manifest.
class Sink {
 public:
  explicit Sink(std::string dir) : dir_(std::move(dir)) {
    cracktip::io::ensure_directory(dir_);
  }

  void write(const std::string& rel, const std::string& bytes) {
    cracktip::io::write_file(dir_ + "/" + rel, bytes);
    entries_.emplace_back(rel, cracktip::io::fnv1a64_hex(bytes));
  }

  void write_manifest(const std::string& command, const ScenarioConfig& cfg,
                      const json& summary) {
    json m;
    m["tool"] = "cracktip";
    m["version"] = kVersion;
    json mods;
    for (const char* name : {"geometry", "fields", "spectrum", "crack", "mesh",
                             "fem", "airy", "blowup", "err", "cli"})
      mods[name] = kVersion;
    m["modules"] = mods;
    m["command"] = command;
    m["config_hash"] =
        cracktip::io::fnv1a64_hex(dump_json(canonical_json(cfg)));
    m["seed"] = cfg.seed;
    m["summary"] = summary;
    std::sort(entries_.begin(), entries_.end());
    json files = json::array();
    for (const auto& e : entries_)
      files.push_back({{"path", e.first}, {"fnv1a64", e.second}});
    m["files"] = files;
    cracktip::io::write_file(dir_ + "/manifest.json", dump_json(m));
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

// The mesh lives on the heap so the operator's reference survives moves.
struct PrimalSolve {
  std::unique_ptr<CrackMesh> mesh;
  std::unique_ptr<ElasticOperator> op;
  FemSolution sol;
};

PrimalSolve solve_primal(const ScenarioConfig& cfg) {
  PrimalSolve ps;
  MeshParams mp;
  mp.radius = cfg.mesh_radius;
  mp.h = cfg.mesh_h;
  mp.grading = cfg.mesh_grading;
  ps.mesh = std::make_unique<CrackMesh>(
      cracktip::build_mesh(crack_from_config(cfg), mp));
  ps.op = std::make_unique<ElasticOperator>(*ps.mesh, cfg.material,
                                            cfg.mesh_order);
  ps.sol = ps.op->solve_boundary(make_boundary(cfg));
  return ps;
}

std::vector<std::array<double, 2>> vtk_points(const CrackMesh& m) {
  std::vector<std::array<double, 2>> pts(m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i)
    pts[i] = {m.nodes[i].x, m.nodes[i].y};
  return pts;
}

std::vector<std::array<int, 3>> vtk_tris(const CrackMesh& m) {
  std::vector<std::array<int, 3>> tris(m.tris.size());
  for (size_t i = 0; i < m.tris.size(); ++i) tris[i] = m.tris[i];
  return tris;
}

json run_solve(const ScenarioConfig& cfg, const PrimalSolve& ps, Sink& sink) {
  const CrackMesh& m = *ps.mesh;
  std::vector<std::array<double, 2>> u(m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i)
    u[i] = {ps.sol.u[2 * i], ps.sol.u[2 * i + 1]};
  std::vector<std::array<double, 3>> sig(m.tris.size());
  for (int t = 0; t < m.tri_count(); ++t) {
    const auto s = cfg.material.stress(ps.op->strain_at_centroid(ps.sol.u, t));
    sig[t] = {s.xx, s.xy, s.yy};
  }
  sink.write("solution.vtk",
             cracktip::io::render_vtk("displacement", vtk_points(m),
                                      vtk_tris(m), {{"u", u}}, {},
                                      {{"stress", sig}}));
  json stats;
  stats["nodes"] = m.node_count();
  stats["tris"] = m.tri_count();
  stats["dofs"] = ps.op->dof_count();
  stats["energy"] = ps.sol.energy;
  sink.write("solve.json", dump_json(stats));
  return {{"energy", ps.sol.energy}};
}

json run_airy(const ScenarioConfig& cfg, const PrimalSolve& ps, Sink& sink) {
  const CrackMesh& m = *ps.mesh;
  const cracktip::AiryRecovery rec =
      cracktip::reconstruct_airy(*ps.op, ps.sol.u);
  const double hess = cracktip::airy_hessian_misfit(*ps.op, ps.sol.u, rec);
  const cracktip::TraceJumps jumps = cracktip::airy_trace_jumps(*ps.op, rec);

  std::vector<double> w(m.nodes.size()), p1(m.nodes.size()), p2(m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i) {
    w[i] = rec.w[i];
    p1[i] = rec.p1[i];
    p2[i] = rec.p2[i];
  }
  sink.write("airy.vtk",
             cracktip::io::render_vtk("airy", vtk_points(m), vtk_tris(m), {},
                                      {{"w", w}, {"p1", p1}, {"p2", p2}}, {}));

  std::vector<std::vector<double>> rows;
  for (const double rho : cfg.decay_rho)
    rows.push_back({rho, cracktip::airy_hessian_misfit(*ps.op, ps.sol.u, rec,
                                                       true, rho)});
  sink.write("airy_misfit.csv",
             cracktip::io::render_csv({"rho", "value"}, rows));

  json stats;
  stats["potential_misfit"] = rec.potential_misfit;
  stats["airy_misfit"] = rec.airy_misfit;
  stats["hessian_misfit"] = hess;
  stats["w_trace_jump"] = jumps.w_jump;
  stats["grad_trace_jump"] = jumps.grad_jump;
  sink.write("airy.json", dump_json(stats));
  return {{"hessian_misfit", hess}};
}

json run_blowup(const ScenarioConfig& cfg, const PrimalSolve& ps, Sink& sink) {
  const CrackSet crack = crack_from_config(cfg);
  const PointLocator loc(*ps.mesh);

  std::vector<std::vector<double>> rows;
  double k1 = 0.0, k2 = 0.0, spread = 0.0;
  double prev_k1 = 0.0, prev_k2 = 0.0;
  for (size_t i = 0; i < cfg.blowup_eps.size(); ++i) {
    const double eps = cfg.blowup_eps[i];
    const double rot = cracktip::blowup_rotation(crack, eps);
    const cracktip::BlowUpFit fit = cracktip::fit_modes(
        *ps.op, loc, ps.sol.u, eps, rot, cfg.fit_r_in, cfg.fit_r_out,
        cfg.fit_n_theta, cfg.branch);
    rows.push_back({eps, rot, fit.kappa1, fit.kappa2, fit.residual});
    if (i > 0) {
      const double scale =
          std::max({1e-30, std::fabs(fit.kappa1), std::fabs(fit.kappa2)});
      spread = std::max(spread, std::hypot(fit.kappa1 - prev_k1,
                                           fit.kappa2 - prev_k2) /
                                    scale);
    }
    prev_k1 = k1 = fit.kappa1;
    prev_k2 = k2 = fit.kappa2;
  }
  sink.write("blowup.csv",
             cracktip::io::render_csv(
                 {"eps", "rot", "kappa1", "kappa2", "residual"}, rows));

  const std::vector<double> prof =
      cracktip::decay_profile(*ps.op, ps.sol.u, cfg.decay_rho);
  std::vector<std::vector<double>> drows;
  for (size_t i = 0; i < prof.size(); ++i)
    drows.push_back({cfg.decay_rho[i], prof[i]});
  sink.write("decay.csv", cracktip::io::render_csv({"rho", "value"}, drows));

  const cracktip::ModeField fitted{cfg.material, k1, k2, cfg.branch};
  json stats;
  stats["kappa1"] = k1;
  stats["kappa2"] = k2;
  stats["kappa_spread"] = spread;
  stats["profile_constant"] = cracktip::mode_stress_sq_constant(fitted);
  sink.write("blowup.json", dump_json(stats));
  return stats;
}

json run_err(const ScenarioConfig& cfg, int jobs, Sink& sink) {
  const CrackSet base = crack_from_config(cfg);
  cracktip::SolveOptions so;
  so.mat = cfg.material;
  so.radius = cfg.mesh_radius;
  so.h = cfg.mesh_h;
  so.grading = cfg.mesh_grading;
  so.order = cfg.mesh_order;
  cracktip::FamilyOptions fam;
  fam.n_angles = cfg.err_n_angles;
  fam.angle_lo = cfg.err_angle_lo;
  fam.angle_hi = cfg.err_angle_hi;
  fam.refine = cfg.err_refine;
  fam.jobs = jobs;
  const BoundaryFn bd = make_boundary(cfg);

  std::vector<std::vector<double>> rows;
  json per_eps = json::array();
  for (const double eps : cfg.err_eps) {
    const cracktip::ErrResult r = cracktip::g_eps(base, eps, so, bd, fam);
    for (const auto& c : r.table)
      rows.push_back({eps, c.angle, c.G, c.G_over_eps});
    json je;
    je["eps"] = r.eps;
    je["g_eps"] = r.g_eps;
    je["best_angle"] = r.best_angle;
    je["circle_bound"] = r.circle_bound;
    je["below_circle_bound"] =
        r.g_eps <= r.circle_bound + 1e-9 * std::fabs(r.circle_bound) + 1e-12;
    per_eps.push_back(je);
  }
  sink.write("err_sweep.csv",
             cracktip::io::render_csv(
                 {"eps", "candidate_param", "G", "G_over_eps"}, rows));
  json stats;
  stats["results"] = per_eps;
  sink.write("err.json", dump_json(stats));
  json summary;
  if (!per_eps.empty()) summary["g_eps_last"] = per_eps.back()["g_eps"];
  return summary;
}

json run_limit(const ScenarioConfig& cfg, Sink& sink) {
  const CrackSet inc = crack_from_config(cfg);
  cracktip::LimitOptions lo;
  lo.mat = cfg.material;
  lo.branch = cfg.branch;
  lo.k1 = cfg.limit_k1;
  lo.k2 = cfg.limit_k2;
  lo.R = cfg.limit_r;
  lo.R_out_factor = cfg.limit_r_out_factor;
  lo.h = cfg.limit_h;
  lo.grading = cfg.limit_grading;
  lo.order = cfg.mesh_order;
  const cracktip::LimitResult lr = cracktip::limit_functional_detailed(inc, lo);

  json stats;
  stats["F"] = lr.F;
  stats["r"] = lo.R;
  stats["r_out"] = lo.R_out_factor * lo.R;
  stats["h"] = lo.h;
  stats["grading"] = lo.grading;
  stats["order"] = lo.order;
  stats["k1"] = lo.k1;
  stats["k2"] = lo.k2;
  stats["nodes"] = lr.nodes;
  stats["tris"] = lr.tris;
  stats["dofs"] = lr.dofs;
  sink.write("limit.json", dump_json(stats));
  return {{"F", lr.F}};
}

json run_spectrum(const ScenarioConfig& cfg, Sink& sink) {
  cracktip::PencilOptions po;
  po.s_min = cfg.spectrum_s_min;
  po.s_max = cfg.spectrum_s_max;
  po.scan_step = cfg.spectrum_scan_step;
  po.mult_rel_tol = cfg.spectrum_rank_tol;
  po.root_tol = cfg.spectrum_root_tol;
  po.branch = cfg.branch;
  const auto roots = cracktip::find_pencil_roots(po);

  std::vector<std::vector<double>> rows;
  json eig = json::array();
  for (const auto& r : roots) {
    rows.push_back({r.s, static_cast<double>(r.multiplicity)});
    json je;
    je["lambda"] = r.s;
    je["multiplicity"] = r.multiplicity;
    json coeffs = json::array();
    for (const auto& v :
         cracktip::pencil_kernel(r.s, po.branch, po.mult_rel_tol))
      coeffs.push_back({v(0), v(1), v(2), v(3)});
    je["coefficients"] = coeffs;
    eig.push_back(je);
  }
  sink.write("spectrum.csv",
             cracktip::io::render_csv({"lambda", "multiplicity"}, rows));
  sink.write("eigenfunctions.json", dump_json({{"roots", eig}}));

  AngleBranch selected;
  const std::string mode_audit =
      cracktip::audit_mode_profiles(cfg.material, &selected);
  sink.write("mode_audit.json", mode_audit);

  const std::string eig_audit = cracktip::audit_exponent_eigenspace();
  sink.write("profile_check.json", eig_audit);

  // Text twin of the eigenspace report.
  {
    const json a = json::parse(eig_audit);
    std::string txt = "eigenspace membership at exponent 3/2\n";
    for (const auto& [bname, jb] : a.at("branches").items()) {
      txt += "branch " + bname + ": kernel dimension " +
             std::to_string(jb.at("kernel_dim").get<int>()) + "\n";
      for (const auto& [pname, jp] : jb.at("profiles").items()) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e",
                      jp.at("relative_residual").get<double>());
        txt += "  " + pname + ": relative residual " + buf +
               (jp.at("in_eigenspace").get<bool>() ? " -> inside\n"
                                                   : " -> outside\n");
      }
    }
    sink.write("profile_check.txt", txt);
  }

  json summary;
  summary["root_count"] = static_cast<int>(roots.size());
  summary["default_branch"] = to_string(selected);
  return summary;
}

int structured_fail(const char* type, const std::string& msg, int code) {
  json e;
  e["error"] = {{"type", type}, {"message", msg}};
  std::cerr << e.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar crack-tip elasticity toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int jobs = 1;

  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"solve", "elastic solve on the cracked disk"},
      {"airy", "dual reconstruction from the elastic solve"},
      {"blowup", "rescaling limits and mode amplitude fits"},
      {"err", "energy release sweep over crack increments"},
      {"limit", "limit shape functional of an increment"},
      {"spectrum", "corner exponent scan and profile checks"},
      {"all", "run every stage into one output directory"},
      {"validate", "config diagnostics without running solvers"},
  };
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.first, c.second);
    sub->add_option("--config", config_path, "scenario config path")
        ->required();
    sub->add_option("--jobs", jobs, "worker threads for sweeps");
    sub->add_option("--out", out_override, "output directory override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return structured_fail("usage", e.what(), 2);
  }

  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    const std::string text = cracktip::io::read_file(config_path);

    if (cmd == "validate") {
      const auto diags = cracktip::validate_config_text(text);
      json out = json::array();
      for (const auto& d : diags)
        out.push_back({{"severity", d.severity},
                       {"field", d.field},
                       {"message", d.message}});
      std::cout << dump_json(out);
      return 0;
    }

    ScenarioConfig cfg = cracktip::load_config_text(text);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (jobs < 1) throw cracktip::ConfigError("--jobs must be at least 1");
    Sink sink(cfg.out_dir);
    sink.write("config_echo.json", dump_json(canonical_json(cfg)));

    json summary;
    if (cmd == "solve" || cmd == "airy" || cmd == "blowup" || cmd == "all") {
      const PrimalSolve ps = solve_primal(cfg);
      if (cmd == "solve" || cmd == "all")
        summary["solve"] = run_solve(cfg, ps, sink);
      if (cmd == "airy" || cmd == "all")
        summary["airy"] = run_airy(cfg, ps, sink);
      if (cmd == "blowup" || cmd == "all")
        summary["blowup"] = run_blowup(cfg, ps, sink);
    }
    if (cmd == "err" || cmd == "all") summary["err"] = run_err(cfg, jobs, sink);
    if (cmd == "limit" || cmd == "all") summary["limit"] = run_limit(cfg, sink);
    if (cmd == "spectrum" || cmd == "all")
      summary["spectrum"] = run_spectrum(cfg, sink);

    // Single-stage runs keep their summary flat.
    if (cmd != "all" && summary.is_object() && summary.size() == 1)
      summary = summary.begin().value();

    sink.write_manifest(cmd, cfg, summary);
    if (cmd == "solve" || cmd == "all") {
      // Convenience line for scripted callers.
      std::cout << "energy " << cracktip::io::fmt17(
                       summary.is_object() && summary.contains("solve")
                           ? summary["solve"]["energy"].get<double>()
                           : summary["energy"].get<double>())
                << "\n";
    }
    return 0;
  } catch (const cracktip::ConfigError& e) {
    return structured_fail("config", e.what(), 2);
  } catch (const cracktip::IoError& e) {
    return structured_fail("io", e.what(), 4);
  } catch (const cracktip::NumericalError& e) {
    return structured_fail("numerical", e.what(), 3);
  } catch (const std::exception& e) {
    return structured_fail("internal", e.what(), 3);
  }
}
