#include "cracktip/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <utility>

#include "cracktip/errors.hpp"

namespace cracktip {

using json = nlohmann::ordered_json;

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && is_space(s[a])) ++a;
  while (b > a && is_space(s[b - 1])) --b;
  return s.substr(a, b - a);
}

// Cuts a '#' comment, honoring double-quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_str) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_str = false;
      }
    } else if (c == '"') {
      in_str = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

// Net [ ] depth outside strings; > 0 means the value continues on the
// next physical line.
int bracket_balance(const std::string& s) {
  int bal = 0;
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_str) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_str = false;
      }
    } else if (c == '"') {
      in_str = true;
    } else if (c == '[') {
      ++bal;
    } else if (c == ']') {
      --bal;
    }
  }
  return bal;
}

struct ValueParser {
  const std::string& s;
  size_t i = 0;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
  }
  void skip_ws() {
    while (i < s.size() && is_space(s[i])) ++i;
  }
  json parse() {
    skip_ws();
    if (i >= s.size()) fail("missing value");
    if (s[i] == '[') return parse_array();
    if (s[i] == '"') return parse_string();
    return parse_scalar();
  }
  json parse_array() {
    ++i;
    json arr = json::array();
    skip_ws();
    if (i < s.size() && s[i] == ']') {
      ++i;
      return arr;
    }
    while (true) {
      arr.push_back(parse());
      skip_ws();
      if (i < s.size() && s[i] == ',') {
        ++i;
        skip_ws();
        if (i < s.size() && s[i] == ']') {
          ++i;
          break;
        }
        continue;
      }
      if (i < s.size() && s[i] == ']') {
        ++i;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return arr;
  }
  json parse_string() {
    ++i;
    std::string out;
    while (i < s.size() && s[i] != '"') {
      char c = s[i++];
      if (c == '\\' && i < s.size()) {
        const char e = s[i++];
        if (e == 'n')
          out += '\n';
        else if (e == 't')
          out += '\t';
        else
          out += e;
      } else {
        out += c;
      }
    }
    if (i >= s.size()) fail("unterminated string");
    ++i;
    return json(out);
  }
  json parse_scalar() {
    size_t j = i;
    while (j < s.size() && s[j] != ',' && s[j] != ']' && !is_space(s[j])) ++j;
    const std::string tok = s.substr(i, j - i);
    i = j;
    if (tok == "true") return json(true);
    if (tok == "false") return json(false);
    bool integral = true;
    const size_t p0 = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
    if (p0 == tok.size()) integral = false;
    for (size_t p = p0; p < tok.size(); ++p)
      if (!std::isdigit(static_cast<unsigned char>(tok[p]))) {
        integral = false;
        break;
      }
    if (integral) {
      errno = 0;
      const long long n = std::strtoll(tok.c_str(), nullptr, 10);
      if (errno == 0) return json(n);
    }
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail("bad value '" + tok + "'");
    return json(v);
  }
};

}  // namespace

json parse_config_tree(const std::string& text) {
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json t = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (t.is_discarded()) throw ConfigError("invalid JSON config");
    if (!t.is_object()) throw ConfigError("JSON config must be an object");
    return t;
  }

  json root = json::object();
  json* section = &root;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    int bal = bracket_balance(line);
    while (bal > 0) {
      std::string more;
      if (!std::getline(in, more))
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated array");
      ++lineno;
      line += " " + trim(strip_comment(more));
      bal = bracket_balance(line);
    }
    if (line.empty()) continue;

    if (line.front() == '[' && line.back() == ']' &&
        line.find('=') == std::string::npos) {
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty section name");
      section = &root;
      size_t pos = 0;
      while (true) {
        const size_t dot = name.find('.', pos);
        const std::string part = trim(
            name.substr(pos, dot == std::string::npos ? dot : dot - pos));
        if (part.empty())
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": bad section name '" + name + "'");
        json& next = (*section)[part];
        if (next.is_null()) next = json::object();
        if (!next.is_object())
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": section '" + name + "' collides with a key");
        section = &next;
        if (dot == std::string::npos) break;
        pos = dot + 1;
      }
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() ||
        key.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                              "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
            std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": bad key '" + key + "'");
    const std::string val = line.substr(eq + 1);
    ValueParser vp{val, 0, lineno};
    json v = vp.parse();
    vp.skip_ws();
    if (vp.i != val.size()) vp.fail("trailing characters after value");
    (*section)[key] = std::move(v);
  }
  return root;
}

namespace {

// Typed reads from one section with unknown-key reporting.
class SectionReader {
 public:
  SectionReader(const json* sec, std::string name,
                std::vector<Diagnostic>* diags)
      : sec_(sec), name_(std::move(name)), diags_(diags) {}

  bool present() const { return sec_ != nullptr; }

  double num(const char* key, double defv) {
    const json* v = raw(key);
    if (!v) return defv;
    if (!v->is_number()) {
      err(key, "expected a number");
      return defv;
    }
    return v->get<double>();
  }

  int integer(const char* key, int defv) {
    const json* v = raw(key);
    if (!v) return defv;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
      err(key, "expected an integer");
      return defv;
    }
    return v->get<int>();
  }

  std::uint64_t u64(const char* key, std::uint64_t defv) {
    const json* v = raw(key);
    if (!v) return defv;
    if (!(v->is_number_integer() || v->is_number_unsigned()) ||
        (v->is_number_integer() && v->get<long long>() < 0)) {
      err(key, "expected a non-negative integer");
      return defv;
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const char* key, bool defv) {
    const json* v = raw(key);
    if (!v) return defv;
    if (!v->is_boolean()) {
      err(key, "expected true or false");
      return defv;
    }
    return v->get<bool>();
  }

  std::string str(const char* key, const std::string& defv) {
    const json* v = raw(key);
    if (!v) return defv;
    if (!v->is_string()) {
      err(key, "expected a string");
      return defv;
    }
    return v->get<std::string>();
  }

  std::vector<double> num_list(const char* key, std::vector<double> defv) {
    const json* v = raw(key);
    if (!v) return defv;
    if (!v->is_array()) {
      err(key, "expected an array of numbers");
      return defv;
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) {
        err(key, "expected an array of numbers");
        return defv;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json* raw(const char* key) {
    used_.insert(key);
    if (!sec_) return nullptr;
    const auto it = sec_->find(key);
    return it == sec_->end() ? nullptr : &*it;
  }

  void err(const std::string& key, const std::string& msg) {
    if (diags_) diags_->push_back({"error", name_ + "." + key, msg});
  }

  void finish() {
    if (!sec_ || !diags_) return;
    for (auto it = sec_->begin(); it != sec_->end(); ++it)
      if (!used_.count(it.key()))
        diags_->push_back(
            {"warning", name_ + "." + it.key(), "unknown key ignored"});
  }

 private:
  const json* sec_;
  std::string name_;
  std::vector<Diagnostic>* diags_;
  std::set<std::string> used_;
};

void diag(std::vector<Diagnostic>* diags, const char* severity,
          const std::string& field, const std::string& msg) {
  if (diags) diags->push_back({severity, field, msg});
}

void validate_scenario(const ScenarioConfig& c,
                       std::vector<Diagnostic>* diags) {
  const auto err = [&](const std::string& f, const std::string& m) {
    diag(diags, "error", f, m);
  };
  const auto warn = [&](const std::string& f, const std::string& m) {
    diag(diags, "warning", f, m);
  };

  if (!(c.material.mu > 0.0)) err("material.mu", "must be positive");
  if (!(c.material.lambda + c.material.mu > 0.0))
    err("material.lambda", "lambda + mu must be positive");

  const bool kind_ok = c.crack_kind == "none" || c.crack_kind == "reference" ||
                       c.crack_kind == "straight" || c.crack_kind == "chains";
  if (!kind_ok) err("crack.kind", "must be none, reference, straight, or chains");
  double crack_reach = 0.0;
  if (kind_ok && c.crack_kind != "none") {
    if (c.crack_kind == "chains") {
      if (c.crack_chains.empty()) {
        err("crack.chains", "chains kind needs a chains array");
      } else {
        try {
          crack_reach = CrackSet(c.crack_chains).max_radius();
        } catch (const std::exception& e) {
          err("crack.chains", e.what());
        }
      }
    } else {
      if (!(c.crack_length > 0.0)) err("crack.length", "must be positive");
      crack_reach = c.crack_length;
    }
  }

  const bool bkind_ok = c.boundary.kind == "zero" ||
                        c.boundary.kind == "rigid" ||
                        c.boundary.kind == "mode" || c.boundary.kind == "table";
  if (!bkind_ok) err("boundary.kind", "must be zero, rigid, mode, or table");
  if (c.boundary.kind == "table") {
    const size_t n = c.boundary.theta.size();
    if (n < 2 || c.boundary.ux.size() != n || c.boundary.uy.size() != n) {
      err("boundary.theta", "table needs matching theta/ux/uy, length >= 2");
    } else {
      bool asc = true;
      for (size_t i = 1; i < n; ++i)
        if (!(c.boundary.theta[i] > c.boundary.theta[i - 1])) asc = false;
      if (!asc) err("boundary.theta", "angles must be strictly increasing");
      if (c.boundary.theta.back() - c.boundary.theta.front() >= 2.0 * M_PI)
        err("boundary.theta", "angles must span less than one turn");
    }
  }

  if (!(c.mesh_radius > 0.0)) err("mesh.radius", "must be positive");
  if (!(c.mesh_h > 0.0))
    err("mesh.h", "must be positive");
  else if (c.mesh_h > c.mesh_radius)
    err("mesh.h", "larger than the mesh radius");
  if (!(c.mesh_grading > 0.0) || c.mesh_grading > 1.0)
    err("mesh.grading", "must lie in (0, 1]");
  if (c.mesh_order != 1 && c.mesh_order != 2)
    err("mesh.order", "must be 1 or 2");
  if (crack_reach > c.mesh_radius * (1.0 + 1e-9))
    err("crack.length", "crack leaves the mesh ball");

  if (c.blowup_eps.empty()) err("blowup.eps", "needs at least one value");
  for (const double e : c.blowup_eps)
    if (!(e > 0.0) || e > c.mesh_radius) {
      err("blowup.eps", "values must lie in (0, mesh.radius]");
      break;
    }
  if (!(c.fit_r_in > 0.0) || !(c.fit_r_out > c.fit_r_in) || c.fit_r_out > 1.0)
    err("blowup.r_out", "fit annulus must satisfy 0 < r_in < r_out <= 1");
  if (c.fit_n_theta < 64) err("blowup.n_theta", "needs at least 64 angles");
  for (const double r : c.decay_rho)
    if (!(r > 0.0) || r > c.mesh_radius) {
      err("blowup.decay_rho", "radii must lie in (0, mesh.radius]");
      break;
    }

  if (c.err_eps.empty()) err("err.eps", "needs at least one value");
  for (const double e : c.err_eps)
    if (!(e > 0.0) || e >= c.mesh_radius) {
      err("err.eps", "values must lie in (0, mesh.radius)");
      break;
    }
  if (c.err_n_angles < 1) err("err.n_angles", "must be at least 1");
  if (c.err_angle_hi < c.err_angle_lo)
    err("err.angle_hi", "must not be below err.angle_lo");
  if (std::fabs(c.err_angle_lo) >= M_PI || std::fabs(c.err_angle_hi) >= M_PI)
    err("err.angle_lo", "relative angles must stay inside (-pi, pi)");

  if (!(c.limit_r > 0.0)) err("limit.r", "must be positive");
  if (!(c.limit_r_out_factor > 2.0))
    err("limit.r_out_factor", "must exceed 2");
  else if (c.limit_r_out_factor < 8.0)
    warn("limit.r_out_factor", "below 8; truncation error may be visible");
  if (!(c.limit_h > 0.0)) err("limit.h", "must be positive");
  if (!(c.limit_grading > 0.0) || c.limit_grading > 1.0)
    err("limit.grading", "must lie in (0, 1]");
  if (c.crack_kind != "none" && kind_ok && crack_reach >= c.limit_r)
    err("limit.r", "increment is not inside the matching ball");

  if (!(c.spectrum_s_max > c.spectrum_s_min))
    err("spectrum.s_max", "window must be nonempty");
  if (!(c.spectrum_scan_step > 0.0) ||
      c.spectrum_scan_step >= c.spectrum_s_max - c.spectrum_s_min)
    err("spectrum.scan_step", "must be positive and smaller than the window");
  if (!(c.spectrum_rank_tol > 0.0))
    err("spectrum.rank_tol", "must be positive");
  if (!(c.spectrum_root_tol > 0.0))
    err("spectrum.root_tol", "must be positive");

  if (c.out_dir.empty()) err("run.out_dir", "must not be empty");
}

}  // namespace

ScenarioConfig config_from_tree(const json& tree,
                                std::vector<Diagnostic>* diags) {
  ScenarioConfig c;
  std::set<std::string> known = {"material", "field",  "crack",
                                 "boundary", "mesh",   "blowup",
                                 "err",      "limit",  "spectrum",
                                 "run"};
  for (auto it = tree.begin(); it != tree.end(); ++it) {
    if (!known.count(it.key()))
      diag(diags, "warning", it.key(), "unknown section ignored");
    else if (!it->is_object())
      diag(diags, "error", it.key(), "must be a table");
  }
  const auto section = [&](const char* name) -> const json* {
    const auto it = tree.find(name);
    return it != tree.end() && it->is_object() ? &*it : nullptr;
  };

  {
    SectionReader s(section("material"), "material", diags);
    c.material.lambda = s.num("lambda", c.material.lambda);
    c.material.mu = s.num("mu", c.material.mu);
    s.finish();
  }
  {
    SectionReader s(section("field"), "field", diags);
    const std::string b = s.str("branch", to_string(c.branch));
    if (b == "theta-pm-pi" || b == "pm_pi")
      c.branch = AngleBranch::pm_pi;
    else if (b == "theta-0-2pi" || b == "zero_2pi")
      c.branch = AngleBranch::zero_2pi;
    else
      s.err("branch", "must be theta-pm-pi or theta-0-2pi");
    s.finish();
  }
  {
    SectionReader s(section("crack"), "crack", diags);
    c.crack_kind = s.str("kind", c.crack_kind);
    c.crack_length = s.num("length", c.crack_length);
    c.crack_angle = s.num("angle", c.crack_angle);
    if (const json* ch = s.raw("chains")) {
      bool ok = ch->is_array();
      std::vector<std::vector<Vec2>> chains;
      if (ok) {
        for (const auto& jc : *ch) {
          if (!jc.is_array()) {
            ok = false;
            break;
          }
          std::vector<Vec2> chain;
          for (const auto& jp : jc) {
            if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number() ||
                !jp[1].is_number()) {
              ok = false;
              break;
            }
            chain.push_back({jp[0].get<double>(), jp[1].get<double>()});
          }
          if (!ok) break;
          chains.push_back(std::move(chain));
        }
      }
      if (ok)
        c.crack_chains = std::move(chains);
      else
        s.err("chains", "expected [[[x, y], ...], ...]");
    }
    s.finish();
  }
  {
    SectionReader s(section("boundary"), "boundary", diags);
    c.boundary.kind = s.str("kind", c.boundary.kind);
    c.boundary.k1 = s.num("k1", c.boundary.k1);
    c.boundary.k2 = s.num("k2", c.boundary.k2);
    c.boundary.spin = s.num("spin", c.boundary.spin);
    if (const json* sh = s.raw("shift")) {
      if (sh->is_array() && sh->size() == 2 && (*sh)[0].is_number() &&
          (*sh)[1].is_number())
        c.boundary.shift = {(*sh)[0].get<double>(), (*sh)[1].get<double>()};
      else
        s.err("shift", "expected [x, y]");
    }
    c.boundary.theta = s.num_list("theta", c.boundary.theta);
    c.boundary.ux = s.num_list("ux", c.boundary.ux);
    c.boundary.uy = s.num_list("uy", c.boundary.uy);
    s.finish();
  }
  {
    SectionReader s(section("mesh"), "mesh", diags);
    c.mesh_radius = s.num("radius", c.mesh_radius);
    c.mesh_h = s.num("h", c.mesh_h);
    c.mesh_grading = s.num("grading", c.mesh_grading);
    c.mesh_order = s.integer("order", c.mesh_order);
    s.finish();
  }
  {
    SectionReader s(section("blowup"), "blowup", diags);
    c.blowup_eps = s.num_list("eps", c.blowup_eps);
    c.fit_r_in = s.num("r_in", c.fit_r_in);
    c.fit_r_out = s.num("r_out", c.fit_r_out);
    c.fit_n_theta = s.integer("n_theta", c.fit_n_theta);
    c.decay_rho = s.num_list("decay_rho", c.decay_rho);
    s.finish();
  }
  {
    SectionReader s(section("err"), "err", diags);
    c.err_eps = s.num_list("eps", c.err_eps);
    c.err_n_angles = s.integer("n_angles", c.err_n_angles);
    c.err_angle_lo = s.num("angle_lo", c.err_angle_lo);
    c.err_angle_hi = s.num("angle_hi", c.err_angle_hi);
    c.err_refine = s.boolean("refine", c.err_refine);
    s.finish();
  }
  {
    SectionReader s(section("limit"), "limit", diags);
    c.limit_r = s.num("r", c.limit_r);
    c.limit_r_out_factor = s.num("r_out_factor", c.limit_r_out_factor);
    c.limit_h = s.num("h", c.limit_h);
    c.limit_grading = s.num("grading", c.limit_grading);
    c.limit_k1 = s.num("k1", c.limit_k1);
    c.limit_k2 = s.num("k2", c.limit_k2);
    s.finish();
  }
  {
    SectionReader s(section("spectrum"), "spectrum", diags);
    c.spectrum_s_min = s.num("s_min", c.spectrum_s_min);
    c.spectrum_s_max = s.num("s_max", c.spectrum_s_max);
    c.spectrum_scan_step = s.num("scan_step", c.spectrum_scan_step);
    c.spectrum_rank_tol = s.num("rank_tol", c.spectrum_rank_tol);
    c.spectrum_root_tol = s.num("root_tol", c.spectrum_root_tol);
    s.finish();
  }
  {
    SectionReader s(section("run"), "run", diags);
    c.out_dir = s.str("out_dir", c.out_dir);
    c.seed = s.u64("seed", c.seed);
    s.finish();
  }

  validate_scenario(c, diags);
  return c;
}

std::vector<Diagnostic> validate_config_text(const std::string& text) {
  std::vector<Diagnostic> diags;
  try {
    const json tree = parse_config_tree(text);
    config_from_tree(tree, &diags);
  } catch (const std::exception& e) {
    diags.push_back({"error", "config", e.what()});
  }
  return diags;
}

ScenarioConfig load_config_text(const std::string& text) {
  std::vector<Diagnostic> diags;
  const json tree = parse_config_tree(text);
  ScenarioConfig c = config_from_tree(tree, &diags);
  for (const auto& d : diags)
    if (d.severity == "error")
      throw ConfigError(d.field + ": " + d.message);
  return c;
}

json canonical_json(const ScenarioConfig& c) {
  json t;
  t["material"] = {{"lambda", c.material.lambda}, {"mu", c.material.mu}};
  t["field"] = {{"branch", to_string(c.branch)}};

  json chains = json::array();
  for (const auto& chain : c.crack_chains) {
    json jc = json::array();
    for (const auto& p : chain) jc.push_back({p.x, p.y});
    chains.push_back(jc);
  }
  t["crack"] = {{"kind", c.crack_kind},
                {"length", c.crack_length},
                {"angle", c.crack_angle},
                {"chains", chains}};

  t["boundary"] = {{"kind", c.boundary.kind},
                   {"k1", c.boundary.k1},
                   {"k2", c.boundary.k2},
                   {"shift", {c.boundary.shift.x, c.boundary.shift.y}},
                   {"spin", c.boundary.spin},
                   {"theta", c.boundary.theta},
                   {"ux", c.boundary.ux},
                   {"uy", c.boundary.uy}};

  t["mesh"] = {{"radius", c.mesh_radius},
               {"h", c.mesh_h},
               {"grading", c.mesh_grading},
               {"order", c.mesh_order}};

  t["blowup"] = {{"eps", c.blowup_eps},
                 {"r_in", c.fit_r_in},
                 {"r_out", c.fit_r_out},
                 {"n_theta", c.fit_n_theta},
                 {"decay_rho", c.decay_rho}};

  t["err"] = {{"eps", c.err_eps},
              {"n_angles", c.err_n_angles},
              {"angle_lo", c.err_angle_lo},
              {"angle_hi", c.err_angle_hi},
              {"refine", c.err_refine}};

  t["limit"] = {{"r", c.limit_r},
                {"r_out_factor", c.limit_r_out_factor},
                {"h", c.limit_h},
                {"grading", c.limit_grading},
                {"k1", c.limit_k1},
                {"k2", c.limit_k2}};

  t["spectrum"] = {{"s_min", c.spectrum_s_min},
                   {"s_max", c.spectrum_s_max},
                   {"scan_step", c.spectrum_scan_step},
                   {"rank_tol", c.spectrum_rank_tol},
                   {"root_tol", c.spectrum_root_tol}};

  t["run"] = {{"out_dir", c.out_dir}, {"seed", c.seed}};
  return t;
}

CrackSet crack_from_config(const ScenarioConfig& c) {
  if (c.crack_kind == "none") return CrackSet{};
  if (c.crack_kind == "reference") return reference_crack(c.crack_length);
  if (c.crack_kind == "straight")
    return CrackSet::straight(c.crack_length, c.crack_angle);
  if (c.crack_kind == "chains") return CrackSet(c.crack_chains);
  throw ConfigError("crack.kind: unknown kind '" + c.crack_kind + "'");
}

BoundaryFn make_boundary(const ScenarioConfig& c) {
  if (c.boundary.kind == "zero")
    return [](const Vec2&) { return Vec2{0.0, 0.0}; };
  if (c.boundary.kind == "rigid") {
    const Vec2 shift = c.boundary.shift;
    const double spin = c.boundary.spin;
    return [shift, spin](const Vec2& x) {
      return shift + spin * Vec2{-x.y, x.x};
    };
  }
  if (c.boundary.kind == "mode") {
    const ModeField f{c.material, c.boundary.k1, c.boundary.k2, c.branch};
    return [f](const Vec2& x) { return f.displacement(x); };
  }
  if (c.boundary.kind == "table") {
    const auto th = c.boundary.theta;
    const auto ux = c.boundary.ux;
    const auto uy = c.boundary.uy;
    const AngleBranch branch = c.branch;
    return [th, ux, uy, branch](const Vec2& x) {
      double a = branch_angle(x, branch);
      const double period = 2.0 * M_PI;
      while (a < th.front()) a += period;
      while (a >= th.front() + period) a -= period;
      const size_t n = th.size();
      const auto it = std::upper_bound(th.begin(), th.end(), a);
      const size_t idx = static_cast<size_t>(it - th.begin());
      double t0, t1, x0, x1, y0, y1;
      if (idx == 0 || idx >= n) {
        t0 = th.back();
        t1 = th.front() + period;
        x0 = ux.back();
        x1 = ux.front();
        y0 = uy.back();
        y1 = uy.front();
        if (idx == 0) t0 -= period, t1 -= period;
      } else {
        t0 = th[idx - 1];
        t1 = th[idx];
        x0 = ux[idx - 1];
        x1 = ux[idx];
        y0 = uy[idx - 1];
        y1 = uy[idx];
      }
      const double w = (a - t0) / (t1 - t0);
      return Vec2{(1.0 - w) * x0 + w * x1, (1.0 - w) * y0 + w * y1};
    };
  }
  throw ConfigError("boundary.kind: unknown kind '" + c.boundary.kind + "'");
}

}  // namespace cracktip
