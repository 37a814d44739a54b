#ifndef CRACKTIP_CONFIG_HPP
#define CRACKTIP_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cracktip/crack.hpp"
#include "cracktip/fem.hpp"
#include "cracktip/fields.hpp"
#include "cracktip/material.hpp"
#include "json.hpp"

namespace cracktip {

struct Diagnostic {
  std::string severity;  // "error" or "warning"
  std::string field;
  std::string message;
};

struct BoundarySpec {
  std::string kind = "mode";  // zero | rigid | mode | table
  double k1 = 1.0;
  double k2 = 0.0;
  Vec2 shift{0.0, 0.0};  // rigid: u = shift + spin * x_perp
  double spin = 0.0;
  std::vector<double> theta, ux, uy;  // table: periodic in the angle
};

// One declarative scenario: geometry, data, and per-tool parameter blocks.
struct ScenarioConfig {
  Material material{1.0, 1.0};
  AngleBranch branch = AngleBranch::pm_pi;

  std::string crack_kind = "reference";  // none | reference | straight | chains
  double crack_length = 1.0;
  double crack_angle = 0.0;  // straight kind only
  std::vector<std::vector<Vec2>> crack_chains;

  BoundarySpec boundary;

  double mesh_radius = 1.0;
  double mesh_h = 0.02;
  double mesh_grading = 0.5;
  int mesh_order = 1;

  std::vector<double> blowup_eps{0.2, 0.1, 0.05};
  double fit_r_in = 0.5;
  double fit_r_out = 1.0;
  int fit_n_theta = 256;
  std::vector<double> decay_rho{0.05, 0.1, 0.2, 0.4};

  std::vector<double> err_eps{0.2, 0.1, 0.05, 0.025};
  int err_n_angles = 1;
  double err_angle_lo = 0.0;
  double err_angle_hi = 0.0;
  bool err_refine = false;

  double limit_r = 2.0;
  double limit_r_out_factor = 8.0;
  double limit_h = 0.05;
  double limit_grading = 0.5;
  double limit_k1 = 1.0;
  double limit_k2 = 0.0;

  double spectrum_s_min = 0.4;
  double spectrum_s_max = 3.6;
  double spectrum_scan_step = 1e-3;
  double spectrum_rank_tol = 1e-8;
  double spectrum_root_tol = 1e-10;

  std::string out_dir = "out";
  std::uint64_t seed = 0;
};

// Parses the key-value table format (or JSON when the text starts with '{')
// into a plain tree. Throws ConfigError on syntax errors.
nlohmann::ordered_json parse_config_tree(const std::string& text);

// Fills a ScenarioConfig from a parsed tree. Unknown keys and suspicious
// values become warnings, violated constraints become errors; nothing
// throws here so validate can report everything at once.
ScenarioConfig config_from_tree(const nlohmann::ordered_json& tree,
                                std::vector<Diagnostic>* diags);

// Full constraint report for a config text, parse errors included.
std::vector<Diagnostic> validate_config_text(const std::string& text);

// Parses, validates, and throws ConfigError with the first error message
// when the config is unusable.
ScenarioConfig load_config_text(const std::string& text);

// Canonical tree with every field populated; parsing it back yields an
// identical config (lossless round trip).
nlohmann::ordered_json canonical_json(const ScenarioConfig& cfg);

CrackSet crack_from_config(const ScenarioConfig& cfg);
BoundaryFn make_boundary(const ScenarioConfig& cfg);

}  // namespace cracktip

#endif
