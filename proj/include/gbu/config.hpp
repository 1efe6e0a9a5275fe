#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "gbu/error.hpp"
#include "gbu/evolution.hpp"
#include "gbu/grid.hpp"
#include "gbu/initial_data.hpp"
#include "gbu/j_functional.hpp"
#include "gbu/params.hpp"

namespace gbu {

struct PdeSpec {
  double p = 3.0;
  double q = 5.0;
  double mu = 0.1;
  bool operator==(const PdeSpec&) const = default;
};

/// Settings of the amplitude bisection.
struct CalibrationSpec {
  double a_lo = 1.0;
  double a_hi = 4.0;
  double rel_width = 0.05;
  std::size_t max_runs = 20;
  double t_end = 5e-4;
  double grad_max_factor = 1.5;
  std::size_t max_steps = 50000;
  bool operator==(const CalibrationSpec&) const = default;
};

struct GridSize {
  std::size_t nx = 151;
  std::size_t ny = 251;
  bool operator==(const GridSize&) const = default;
};

/// Parameter lists expanded into a cartesian product of runs. Empty = not swept.
struct SweepSpec {
  std::vector<double> mu;
  std::vector<double> eps;
  std::vector<double> amplitude;
  std::vector<double> k;
  std::vector<GridSize> grid;
  bool empty() const { return mu.empty() && eps.empty() && amplitude.empty() && k.empty() && grid.empty(); }
  bool operator==(const SweepSpec&) const = default;
};

struct RunSpec {
  PdeSpec pde;
  DomainSpec domain;
  GridSize grid;
  InitialDataSpec initial;
  SolverConfig solver;
  JParams j;
  bool j_monitor = false;
  CalibrationSpec calibration;
  SweepSpec sweep;
  std::string output_dir = "out";
  std::uint64_t seed = 0;  // reserved; the numerics are deterministic

  PdeParams params() const { return validate_params(pde.p, pde.q, pde.mu); }
  Grid make_grid() const { return build_grid(domain, grid.nx, grid.ny); }
  /// Solver settings with the J monitor attached when enabled.
  SolverConfig solver_config() const {
    SolverConfig c = solver;
    c.j_monitor = j_monitor ? std::optional<JParams>(j) : std::nullopt;
    return c;
  }
  bool operator==(const RunSpec&) const = default;
};

namespace detail {

enum class KeyType { Real, Count, Bool, Text, Scheme, RealList, GridList };

struct KeyDef {
  std::string section;
  std::string key;
  KeyType type;
  bool required;
  std::function<void(RunSpec&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunSpec&)> get;
  std::string full() const { return section + "." + key; }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(ConfigError::Kind::TypeMismatch, key, "expected a real number, got '" + text + "'");
  }
  return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ConfigError(ConfigError::Kind::TypeMismatch, key, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(ConfigError::Kind::TypeMismatch, key, "expected true or false, got '" + text + "'");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_real(key, s));
  return out;
}

inline std::vector<GridSize> parse_grid_list(const std::string& key, const std::string& text) {
  std::vector<GridSize> out;
  for (const auto& s : split_list(text)) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw ConfigError(ConfigError::Kind::TypeMismatch, key, "expected NXxNY, got '" + s + "'");
    out.push_back({parse_count(key, s.substr(0, x)), parse_count(key, s.substr(x + 1))});
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
  return s;
}

#define GBU_REAL(sec, name, field, req)                                                                      \
  KeyDef{sec, name, KeyType::Real, req,                                                                      \
         [](RunSpec& s, const std::string& k, const std::string& v) { s.field = parse_real(k, v); },          \
         [](const RunSpec& s) { return format_real(s.field); }}
#define GBU_COUNT(sec, name, field)                                                                          \
  KeyDef{sec, name, KeyType::Count, false,                                                                   \
         [](RunSpec& s, const std::string& k, const std::string& v) { s.field = parse_count(k, v); },         \
         [](const RunSpec& s) { return std::to_string(s.field); }}
#define GBU_REALS(sec, name, field)                                                                          \
  KeyDef{sec, name, KeyType::RealList, false,                                                                \
         [](RunSpec& s, const std::string& k, const std::string& v) { s.field = parse_real_list(k, v); },     \
         [](const RunSpec& s) { return join<double>(s.field, [](const double& d) { return format_real(d); }); }}

inline const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      GBU_REAL("pde", "p", pde.p, true),
      GBU_REAL("pde", "q", pde.q, true),
      GBU_REAL("pde", "mu", pde.mu, true),
      GBU_REAL("domain", "a", domain.half_width, false),
      GBU_REAL("domain", "b", domain.height, false),
      GBU_REAL("domain", "L1", domain.L1, false),
      GBU_REAL("domain", "L2", domain.L2, false),
      GBU_REAL("domain", "rho", domain.rho, false),
      GBU_REAL("domain", "x1", domain.x1, false),
      GBU_REAL("domain", "y1", domain.y1, false),
      GBU_COUNT("grid", "nx", grid.nx),
      GBU_COUNT("grid", "ny", grid.ny),
      GBU_REAL("initial", "eps", initial.eps, false),
      GBU_REAL("initial", "amplitude", initial.amplitude, false),
      GBU_REAL("initial", "loc_c", initial.loc_c, false),
      GBU_REAL("solver", "cfl_safety", solver.cfl_safety, false),
      GBU_REAL("solver", "dt_min", solver.dt_min, false),
      GBU_REAL("solver", "grad_max", solver.grad_max, false),
      GBU_REAL("solver", "grad_max_factor", solver.grad_max_factor, false),
      GBU_REAL("solver", "t_end", solver.t_end, false),
      GBU_REAL("solver", "snapshot_every", solver.snapshot_every, false),
      GBU_REAL("solver", "snapshot_grad_growth", solver.snapshot_grad_growth, false),
      KeyDef{"solver", "hamiltonian_scheme", KeyType::Scheme, false,
             [](RunSpec& s, const std::string& k, const std::string& v) {
               const std::string t = trim(v);
               if (t == "central") {
                 s.solver.hamiltonian_scheme = HamiltonianScheme::Central;
               } else if (t == "upwind") {
                 s.solver.hamiltonian_scheme = HamiltonianScheme::Upwind;
               } else {
                 throw ConfigError(ConfigError::Kind::TypeMismatch, k, "expected central or upwind, got '" + v + "'");
               }
             },
             [](const RunSpec& s) { return to_string(s.solver.hamiltonian_scheme); }},
      GBU_REAL("solver", "eta_reg", solver.eta_reg, false),
      GBU_COUNT("solver", "max_steps", solver.max_steps),
      GBU_REAL("j", "k", j.k, false),
      GBU_REAL("j", "alpha", j.alpha, false),
      GBU_REAL("j", "sigma", j.sigma, false),
      KeyDef{"j", "monitor", KeyType::Bool, false,
             [](RunSpec& s, const std::string& k, const std::string& v) { s.j_monitor = parse_bool(k, v); },
             [](const RunSpec& s) { return std::string(s.j_monitor ? "true" : "false"); }},
      GBU_REAL("calibration", "a_lo", calibration.a_lo, false),
      GBU_REAL("calibration", "a_hi", calibration.a_hi, false),
      GBU_REAL("calibration", "rel_width", calibration.rel_width, false),
      GBU_COUNT("calibration", "max_runs", calibration.max_runs),
      GBU_REAL("calibration", "t_end", calibration.t_end, false),
      GBU_REAL("calibration", "grad_max_factor", calibration.grad_max_factor, false),
      GBU_COUNT("calibration", "max_steps", calibration.max_steps),
      GBU_REALS("sweep", "mu", sweep.mu),
      GBU_REALS("sweep", "eps", sweep.eps),
      GBU_REALS("sweep", "amplitude", sweep.amplitude),
      GBU_REALS("sweep", "k", sweep.k),
      KeyDef{"sweep", "grid", KeyType::GridList, false,
             [](RunSpec& s, const std::string& k, const std::string& v) { s.sweep.grid = parse_grid_list(k, v); },
             [](const RunSpec& s) {
               return join<GridSize>(s.sweep.grid, [](const GridSize& g) {
                 return std::to_string(g.nx) + "x" + std::to_string(g.ny);
               });
             }},
      KeyDef{"output", "dir", KeyType::Text, false,
             [](RunSpec& s, const std::string&, const std::string& v) { s.output_dir = trim(v); },
             [](const RunSpec& s) { return s.output_dir; }},
      KeyDef{"output", "seed", KeyType::Count, false,
             [](RunSpec& s, const std::string& k, const std::string& v) { s.seed = parse_count(k, v); },
             [](const RunSpec& s) { return std::to_string(s.seed); }},
  };
  return table;
}

#undef GBU_REAL
#undef GBU_COUNT
#undef GBU_REALS

inline void violation(const std::string& key, const std::string& what) {
  throw ConfigError(ConfigError::Kind::ConstraintViolation, key, what);
}

}  // namespace detail

/// Cross-field validation; each failure names the responsible key.
inline void validate_run_spec(RunSpec& s) {
  using detail::violation;
  const auto& P = s.pde;
  if (!(P.p > 2.0)) violation("pde.p", "need p > 2");
  if (!(P.q > P.p)) violation("pde.q", "need q > p");
  if (!(P.mu >= 0.0)) violation("pde.mu", "need mu >= 0");
  const auto& D = s.domain;
  if (!(D.half_width > 0.0)) violation("domain.a", "need a > 0");
  if (!(D.height > 0.0)) violation("domain.b", "need b > 0");
  if (!(D.L1 > 0.0 && D.L1 < D.half_width)) violation("domain.L1", "need 0 < L1 < a");
  if (!(D.L2 > 0.0 && 2.0 * D.L2 < D.height)) violation("domain.L2", "need 0 < 2 L2 < b");
  if (!(D.rho > 0.0 && D.rho < D.x1)) violation("domain.rho", "need 0 < rho < x1");
  if (!(D.x1 < D.L1)) violation("domain.x1", "need x1 < L1");
  if (!(D.y1 > 0.0 && D.y1 < D.L2)) violation("domain.y1", "need 0 < y1 < L2");
  if (s.grid.nx < 5 || s.grid.nx % 2 == 0) violation("grid.nx", "need an odd nx >= 5");
  if (s.grid.ny < 5) violation("grid.ny", "need ny >= 5");
  auto& I = s.initial;
  I.mu = P.mu;
  if (!(I.eps > 0.0 && I.eps < std::min(D.L1, D.L2 / 2.0))) violation("initial.eps", "need 0 < eps < min(L1, L2/2)");
  if (!(cutoff::support * I.eps < D.half_width && I.eps + cutoff::support * D.L2 < D.height)) {
    violation("initial.eps", "bump support exits the domain");
  }
  if (!(I.amplitude > 0.0)) violation("initial.amplitude", "need amplitude > 0");
  if (!(I.loc_c > 0.0)) violation("initial.loc_c", "need loc_c > 0");
  const auto& S = s.solver;
  if (!(S.cfl_safety > 0.0 && S.cfl_safety <= 1.0)) violation("solver.cfl_safety", "need 0 < cfl_safety <= 1");
  if (!(S.dt_min > 0.0)) violation("solver.dt_min", "need dt_min > 0");
  if (!(S.grad_max >= 0.0)) violation("solver.grad_max", "need grad_max >= 0 (0 = relative threshold)");
  if (!(S.grad_max_factor > 1.0)) violation("solver.grad_max_factor", "need grad_max_factor > 1");
  if (!(S.t_end > 0.0)) violation("solver.t_end", "need t_end > 0");
  if (!(S.snapshot_every > 0.0)) violation("solver.snapshot_every", "need snapshot_every > 0");
  if (!(S.snapshot_grad_growth == 0.0 || S.snapshot_grad_growth > 1.0)) {
    violation("solver.snapshot_grad_growth", "need 0 or a factor > 1");
  }
  if (!(S.eta_reg >= 0.0)) violation("solver.eta_reg", "need eta_reg >= 0");
  auto& J = s.j;
  const double sigma_max = scaling_exponents(P.p, P.q).sigma_max;
  if (!(J.alpha > 1.0 && J.alpha < 1.0 + P.q - P.p)) violation("j.alpha", "need 1 < alpha < 1 + q - p");
  if (!(J.sigma > 0.0 && J.sigma < sigma_max)) violation("j.sigma", "need 0 < sigma < 1/(2(q-p+1))");
  if (!(J.k > 0.0)) violation("j.k", "need k > 0");
  J = JParams::make(J.k, J.alpha, J.sigma, D.x1, D.y1);
  const auto& C = s.calibration;
  if (!(C.a_lo > 0.0 && C.a_lo < C.a_hi)) violation("calibration.a_lo", "need 0 < a_lo < a_hi");
  if (!(C.rel_width > 0.0 && C.rel_width < 1.0)) violation("calibration.rel_width", "need 0 < rel_width < 1");
  if (C.max_runs < 2) violation("calibration.max_runs", "need at least 2 runs");
  if (!(C.t_end > 0.0)) violation("calibration.t_end", "need t_end > 0");
  if (!(C.grad_max_factor > 1.0)) violation("calibration.grad_max_factor", "need a factor > 1");
  for (double v : s.sweep.mu)
    if (!(v >= 0.0)) violation("sweep.mu", "need mu >= 0");
  for (double v : s.sweep.eps)
    if (!(v > 0.0)) violation("sweep.eps", "need eps > 0");
  for (double v : s.sweep.amplitude)
    if (!(v > 0.0)) violation("sweep.amplitude", "need amplitude > 0");
  for (double v : s.sweep.k)
    if (!(v > 0.0)) violation("sweep.k", "need k > 0");
  for (const auto& g : s.sweep.grid)
    if (g.nx < 5 || g.nx % 2 == 0 || g.ny < 5) violation("sweep.grid", "need odd nx >= 5 and ny >= 5");
  if (s.output_dir.empty()) violation("output.dir", "must not be empty");
}

/// Parses the sectioned key = value format. '#' starts a comment.
inline RunSpec parse_config_text(const std::string& text) {
  RunSpec spec;
  std::map<std::string, const detail::KeyDef*> by_name;
  for (const auto& d : detail::key_table()) by_name[d.full()] = &d;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(ConfigError::Kind::Syntax, where, "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(ConfigError::Kind::Syntax, where, "expected key = value");
    if (section.empty()) throw ConfigError(ConfigError::Kind::Syntax, where, "key outside any [section]");
    const std::string key = section + "." + detail::trim(line.substr(0, eq));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError(ConfigError::Kind::UnknownKey, key, "not a recognised key");
    if (!seen.insert(key).second) throw ConfigError(ConfigError::Kind::Syntax, key, "key given twice");
    it->second->set(spec, key, line.substr(eq + 1));
  }
  for (const auto& d : detail::key_table())
    if (d.required && !seen.count(d.full())) throw ConfigError(ConfigError::Kind::MissingKey, d.full(), "required");
  validate_run_spec(spec);
  return spec;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Reads a config file. A JSON manifest written by a previous run is also
/// accepted; its embedded canonical config is used.
inline RunSpec parse_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(ConfigError::Kind::Syntax, path, e.what());
    }
    if (!j.contains("config") || !j["config"].is_string()) {
      throw ConfigError(ConfigError::Kind::MissingKey, "config", "manifest has no embedded config");
    }
    return parse_config_text(j["config"].get<std::string>());
  }
  return parse_config_text(text);
}

/// Canonical text form: every key, in table order, shortest round-trip reals.
inline std::string emit_config(const RunSpec& spec) {
  std::string out;
  std::string section;
  for (const auto& d : detail::key_table()) {
    if (d.section != section) {
      if (!section.empty()) out += "\n";
      section = d.section;
      out += "[" + section + "]\n";
    }
    out += d.key + " = " + d.get(spec) + "\n";
  }
  return out;
}

/// Machine-readable export of the canonical spec.
inline nlohmann::json spec_to_json(const RunSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& d : detail::key_table()) {
    const std::string v = d.get(spec);
    nlohmann::json& slot = j[d.section][d.key];
    switch (d.type) {
      case detail::KeyType::Real: slot = detail::parse_real(d.full(), v); break;
      case detail::KeyType::Count: slot = detail::parse_count(d.full(), v); break;
      case detail::KeyType::Bool: slot = (v == "true"); break;
      case detail::KeyType::RealList: slot = detail::parse_real_list(d.full(), v); break;
      default: slot = v; break;
    }
  }
  return j;
}

}  // namespace gbu
