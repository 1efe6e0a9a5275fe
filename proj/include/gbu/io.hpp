#pragma once

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gbu/barriers.hpp"
#include "gbu/config.hpp"
#include "gbu/diagnostics.hpp"
#include "gbu/evolution.hpp"
#include "gbu/initial_data.hpp"

namespace gbu {

inline constexpr const char* version = "0.1.0";

// ---------------------------------------------------------------------------
// Runs.
// ---------------------------------------------------------------------------

struct Simulation {
  RunSpec spec;
  Grid grid;
  Field u0;
  RunResult result;
};

inline Field initial_field(const RunSpec& spec, const Grid& g) {
  return build_initial_data(spec.initial, g, spec.domain, spec.params());
}

/// Builds the initial data and integrates it. An absolute grad_max must exceed
/// the initial max gradient.
inline Simulation simulate(const RunSpec& spec) {
  Grid g = spec.make_grid();
  Field u0 = initial_field(spec, g);
  const SolverConfig cfg = spec.solver_config();
  if (cfg.grad_max > 0.0) {
    const double g0 = max_gradient_norm(gradient(u0, g));
    if (!(cfg.grad_max > g0)) {
      throw ConfigError(ConfigError::Kind::ConstraintViolation, "solver.grad_max",
                        "must exceed the initial max gradient " + detail::format_real(g0));
    }
  }
  RunResult r = run(u0, g, spec.params(), cfg);
  return {spec, std::move(g), std::move(u0), std::move(r)};
}

inline DiagnosticsReport diagnose(const Simulation& s) {
  return diagnose(DiagnoseInputs{s.result, s.u0, s.grid, s.spec.params(), s.spec.domain, s.spec.j,
                                 s.spec.solver.operator_options()});
}

// ---------------------------------------------------------------------------
// Amplitude calibration.
// ---------------------------------------------------------------------------

struct CalibrationRun {
  double amplitude = 0.0;
  RunStatus status = RunStatus::ReachedTEnd;
  double t_final = 0.0;
  std::size_t steps = 0;
  bool blew_up = false;
};

struct CalibrationResult {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double a_star = 0.0;  // bracket midpoint
  std::vector<CalibrationRun> runs;
  double rel_width() const { return (a_hi - a_lo) / a_hi; }
};

/// Solver settings of a single calibration run.
inline RunSpec calibration_run_spec(const RunSpec& spec, double amplitude) {
  RunSpec s = spec;
  s.initial.amplitude = amplitude;
  s.solver.t_end = spec.calibration.t_end;
  s.solver.grad_max = 0.0;
  s.solver.grad_max_factor = spec.calibration.grad_max_factor;
  s.solver.max_steps = spec.calibration.max_steps;
  s.solver.snapshot_every = spec.calibration.t_end;
  s.solver.snapshot_grad_growth = 0.0;
  s.j_monitor = false;
  return s;
}

inline CalibrationRun calibration_probe(const RunSpec& spec, double amplitude) {
  const Simulation sim = simulate(calibration_run_spec(spec, amplitude));
  return {amplitude, sim.result.status, sim.result.t_final, sim.result.steps, sim.result.blew_up()};
}

/// Bisection on the amplitude between a non-blowing a_lo and a blowing a_hi,
/// until (a_hi - a_lo)/a_hi <= rel_width. A run counts as blowing up when it
/// stops on the gradient threshold before the calibration horizon.
inline CalibrationResult calibrate_blowup_amplitude(
    const RunSpec& spec, const std::function<void(const CalibrationRun&)>& progress = {}) {
  const CalibrationSpec& c = spec.calibration;
  CalibrationResult res;
  auto probe = [&](double a) {
    if (res.runs.size() >= c.max_runs) throw DiagnosticError("calibration: run budget exhausted");
    res.runs.push_back(calibration_probe(spec, a));
    if (progress) progress(res.runs.back());
    return res.runs.back().blew_up;
  };
  if (!probe(c.a_hi)) {
    throw DiagnosticError("calibration: a_hi = " + detail::format_real(c.a_hi) + " does not blow up; widen the bracket");
  }
  if (probe(c.a_lo)) {
    throw DiagnosticError("calibration: a_lo = " + detail::format_real(c.a_lo) + " already blows up; lower it");
  }
  res.a_lo = c.a_lo;
  res.a_hi = c.a_hi;
  while (res.rel_width() > c.rel_width) {
    const double mid = 0.5 * (res.a_lo + res.a_hi);
    if (probe(mid)) {
      res.a_hi = mid;
    } else {
      res.a_lo = mid;
    }
  }
  res.a_star = 0.5 * (res.a_lo + res.a_hi);
  return res;
}

// ---------------------------------------------------------------------------
// JSON.
// ---------------------------------------------------------------------------

inline nlohmann::json witness_json(const Witness& w) {
  if (!w.present) return nullptr;
  return {{"i", w.i}, {"j", w.j}, {"x", w.x}, {"y", w.y}, {"t", w.t}, {"value", w.value}};
}

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline nlohmann::json report_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  j["status"] = r.status;
  j["t_num"] = finite_or_null(r.t_num);
  j["all_passed"] = r.all_passed();
  j["constants"] = {{"C1_tilde", r.c1_tilde}, {"delta0", r.delta0}};
  for (const ClaimSection& s : r.sections) {
    nlohmann::json e = {{"applicable", s.applicable},
                        {"passed", s.passed},
                        {"value", finite_or_null(s.value)},
                        {"bound", finite_or_null(s.bound)},
                        {"witness", witness_json(s.witness)}};
    if (!s.note.empty()) e["note"] = s.note;
    for (const auto& [k, v] : s.details) e["details"][k] = finite_or_null(v);
    j["sections"][s.name] = e;
  }
  j["history"] = {{"t", r.snapshot_times},
                  {"m_grad", r.m_grad_history},
                  {"m_u", r.m_u_history},
                  {"concentration_width", r.width_history},
                  {"bottom_argmax_x", r.argmax_history},
                  {"weighted_profile", r.weighted_profile_history}};
  return j;
}

inline nlohmann::json barrier_json(const BarrierBundle& b) {
  nlohmann::json props;
  for (const auto& c : b.properties.conditions) {
    props[c.name] = {{"passed", c.passed}, {"worst_margin", c.worst}, {"witness", {{"i", c.i}, {"j", c.j}, {"x", c.x}, {"y", c.y}}}};
  }
  return {{"mu0_found", b.mu0_found},
          {"eps_V", b.eps_V},
          {"min_residual", b.residual_report.min_residual},
          {"witness_node",
           {{"i", b.residual_report.i}, {"j", b.residual_report.j}, {"x", b.residual_report.x}, {"y", b.residual_report.y}}},
          {"samples", b.residual_report.samples},
          {"rho", b.rho},
          {"properties", props},
          {"solver", {{"method", b.solve_info.method},
                      {"iterations", b.solve_info.iterations},
                      {"relative_residual", b.solve_info.relative_residual}}}};
}

inline nlohmann::json nondeg_json(const NondegRegion& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) pts.push_back({{"eps0", p.eps0}, {"eta", p.eta}, {"min_residual", p.min_residual}, {"valid", p.valid}});
  return {{"nonempty", r.nonempty()},
          {"confirmed", {{"eps0", r.confirmed.eps0}, {"eta", r.confirmed.eta}, {"min_residual", r.confirmed.min_residual}}},
          {"witness", {{"x", r.confirmed_report.x}, {"y", r.confirmed_report.y}, {"t", r.confirmed_report.t}}},
          {"samples", r.confirmed_report.samples},
          {"grid", pts}};
}

inline nlohmann::json calibration_json(const CalibrationResult& c) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : c.runs)
    runs.push_back({{"amplitude", r.amplitude}, {"status", to_string(r.status)}, {"t_final", r.t_final},
                    {"steps", r.steps}, {"blew_up", r.blew_up}});
  return {{"a_star", c.a_star}, {"a_lo", c.a_lo}, {"a_hi", c.a_hi}, {"rel_width", c.rel_width()}, {"runs", runs}};
}

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream f(p);
  if (!f) throw Error("cannot open " + p.string() + " for writing");
  f << j.dump(2) << '\n';
  if (!f) throw Error("write failed: " + p.string());
}

inline std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw Error("cannot open " + p.string() + " for writing");
  f << std::setprecision(17);
  return f;
}

inline void write_series_csv(const std::filesystem::path& p, const RunResult& r) {
  auto f = open_csv(p);
  f << "# per-step monitors: state at time t reached with step dt\n" << series_columns << '\n';
  for (const SeriesRow& s : r.series) {
    f << s.t << ',' << s.dt << ',' << s.max_grad << ',' << s.argmax_x_bottom << ',' << s.min_uy << ','
      << s.max_ux_right_half << ',' << s.bernstein_grad << ',' << s.bernstein_u << ',' << s.max_J << ','
      << s.max_ut_abs << ',' << s.symmetry_defect << '\n';
  }
  if (!f) throw Error("write failed: " + p.string());
}

inline std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%04zu.csv", k);
  return buf;
}

struct OutputFiles {
  std::vector<std::string> files;
};

/// manifest.json, series.csv, snapshot_NNNN.csv, bottom_profile.csv,
/// j_series.csv (when the J monitor ran) and diagnostics.json (when given).
inline OutputFiles emit_outputs(const std::filesystem::path& dir, const Simulation& sim,
                                const DiagnosticsReport* report = nullptr) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  OutputFiles out;
  const RunResult& r = sim.result;

  write_series_csv(dir / "series.csv", r);
  out.files.push_back("series.csv");

  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const std::string name = snapshot_name(k);
    char t[64];
    std::snprintf(t, sizeof t, "%.17g", r.snapshots[k].time);
    write_snapshot_csv((dir / name).string(), sim.grid, r.snapshots[k], {"solution u at t = " + std::string(t)});
    out.files.push_back(name);
  }

  {
    auto f = open_csv(dir / "bottom_profile.csv");
    f << "# bottom-edge |u_y| per snapshot\nsnapshot,t,x,abs_uy\n";
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
      const VectorField grad = gradient(r.snapshots[k], sim.grid);
      for (std::size_t i = 0; i < sim.grid.nx(); ++i)
        f << k << ',' << r.snapshots[k].time << ',' << sim.grid.x(i) << ',' << std::abs(grad.y(i, 0)) << '\n';
    }
    out.files.push_back("bottom_profile.csv");
  }
  if (sim.spec.j_monitor) {
    auto f = open_csv(dir / "j_series.csv");
    f << "# max of J over its region per step\nt,max_J\n";
    for (const SeriesRow& s : r.series) f << s.t << ',' << s.max_J << '\n';
    out.files.push_back("j_series.csv");
  }
  if (report) {
    write_json(dir / "diagnostics.json", report_json(*report));
    out.files.push_back("diagnostics.json");
  }

  nlohmann::json m;
  m["schema"] = "gbu-manifest/1";
  m["versions"] = {{"gbu", version}, {"compiler", __VERSION__}, {"cplusplus", __cplusplus}};
  m["config"] = emit_config(sim.spec);
  m["spec"] = spec_to_json(sim.spec);
  m["result"] = {{"status", to_string(r.status)},
                 {"t_final", r.t_final},
                 {"steps", r.steps},
                 {"initial_max_grad", r.initial_max_grad},
                 {"grad_max_used", r.grad_max_used},
                 {"snapshot_count", r.snapshots.size()}};
  m["files"] = out.files;
  write_json(dir / "manifest.json", m);
  out.files.push_back("manifest.json");
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps.
// ---------------------------------------------------------------------------

/// Cartesian product of the sweep lists; unswept fields keep the base value.
inline std::vector<RunSpec> expand_sweep(const RunSpec& base) {
  std::vector<RunSpec> out{base};
  auto expand = [&out](auto values, auto apply) {
    if (values.empty()) return;
    std::vector<RunSpec> next;
    for (const RunSpec& s : out)
      for (const auto& v : values) {
        RunSpec t = s;
        apply(t, v);
        next.push_back(t);
      }
    out = std::move(next);
  };
  expand(base.sweep.mu, [](RunSpec& s, double v) { s.pde.mu = v; });
  expand(base.sweep.eps, [](RunSpec& s, double v) { s.initial.eps = v; });
  expand(base.sweep.amplitude, [](RunSpec& s, double v) { s.initial.amplitude = v; });
  expand(base.sweep.k, [](RunSpec& s, double v) { s.j.k = v; });
  expand(base.sweep.grid, [](RunSpec& s, const GridSize& g) { s.grid = g; });
  for (RunSpec& s : out) {
    s.sweep = {};
    validate_run_spec(s);
  }
  return out;
}

struct SweepRow {
  std::size_t index = 0;
  RunSpec spec;
  std::string status;
  double t_final = 0.0;
  std::size_t steps = 0;
  bool diagnostics_passed = false;
  std::string error;
};

/// Runs every expanded spec on up to `workers` threads; each run writes into
/// dir/run_NNN. Rows come back in expansion order.
inline std::vector<SweepRow> run_sweep(const RunSpec& base, const std::filesystem::path& dir, unsigned workers) {
  const std::vector<RunSpec> specs = expand_sweep(base);
  std::vector<SweepRow> rows(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      SweepRow& row = rows[k];
      row.index = k;
      row.spec = specs[k];
      try {
        const Simulation sim = simulate(specs[k]);
        const DiagnosticsReport rep = diagnose(sim);
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", k);
        emit_outputs(dir / name, sim, &rep);
        row.status = to_string(sim.result.status);
        row.t_final = sim.result.t_final;
        row.steps = sim.result.steps;
        row.diagnostics_passed = rep.all_passed();
      } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(specs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(dir);
  auto f = open_csv(dir / "sweep.csv");
  f << "# one row per expanded run\nindex,mu,eps,amplitude,k,nx,ny,status,t_final,steps,diagnostics_passed,error\n";
  for (const SweepRow& r : rows) {
    f << r.index << ',' << r.spec.pde.mu << ',' << r.spec.initial.eps << ',' << r.spec.initial.amplitude << ','
      << r.spec.j.k << ',' << r.spec.grid.nx << ',' << r.spec.grid.ny << ',' << r.status << ',' << r.t_final << ','
      << r.steps << ',' << (r.diagnostics_passed ? 1 : 0) << ",\"" << r.error << "\"\n";
  }
  return rows;
}

}  // namespace gbu
