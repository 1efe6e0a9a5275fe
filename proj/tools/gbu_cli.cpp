// Command-line front end: simulate, verify-barriers, diagnose, calibrate,
// sweep and selftest.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "gbu/gbu.hpp"

namespace {

enum Exit { kPass = 0, kDiagnosticFailure = 1, kConfigError = 2, kDiverged = 3 };

struct Options {
  std::string config;
  std::string out;
  unsigned workers = 1;
  std::optional<double> grad_max;
  std::optional<double> t_end;
};

gbu::RunSpec load(const Options& o) {
  gbu::RunSpec spec = o.config.empty() ? gbu::parse_config_text("[pde]\np = 3\nq = 5\nmu = 0.1\n")
                                       : gbu::parse_config(o.config);
  if (o.grad_max) spec.solver.grad_max = *o.grad_max;
  if (o.t_end) spec.solver.t_end = *o.t_end;
  if (!o.out.empty()) spec.output_dir = o.out;
  gbu::validate_run_spec(spec);
  return spec;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_simulate(const Options& o, bool require_pass) {
  const gbu::RunSpec spec = load(o);
  const gbu::Simulation sim = gbu::simulate(spec);
  const gbu::DiagnosticsReport rep = gbu::diagnose(sim);
  gbu::emit_outputs(spec.output_dir, sim, &rep);
  std::cerr << "status " << gbu::to_string(sim.result.status) << " t_final " << sim.result.t_final << " steps "
            << sim.result.steps << " -> " << spec.output_dir << '\n';
  if (require_pass) {
    for (const auto& s : rep.sections) {
      std::cout << (s.applicable ? (s.passed ? "PASS " : "FAIL ") : "N/A  ") << s.name << " value=" << s.value
                << " bound=" << s.bound << '\n';
    }
    return rep.all_passed() ? kPass : kDiagnosticFailure;
  }
  return kPass;
}

int cmd_verify_barriers(const Options& o) {
  const gbu::RunSpec spec = load(o);
  const gbu::PdeParams params = spec.params();
  const gbu::Grid g = spec.make_grid();
  const gbu::BarrierBundle b = gbu::build_global_barrier(g, spec.domain.rho, params);
  gbu::NondegBarrierParams bp;
  bp.beta = params.exponents().beta;
  const gbu::NondegRegion region =
      gbu::map_nondeg_region(bp, params, {1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0});
  nlohmann::json j = {{"global", gbu::barrier_json(b)}, {"nondegeneracy", gbu::nondeg_json(region)}};
  std::filesystem::create_directories(spec.output_dir);
  gbu::write_json(std::filesystem::path(spec.output_dir) / "barriers.json", j);
  print(j["global"]);
  const bool ok = b.properties.all_passed() && b.mu0_found > 0.0 && b.residual_report.min_residual >= -1e-8 &&
                  region.nonempty();
  return ok ? kPass : kDiagnosticFailure;
}

int cmd_calibrate(const Options& o) {
  const gbu::RunSpec spec = load(o);
  const gbu::CalibrationResult c = gbu::calibrate_blowup_amplitude(spec, [](const gbu::CalibrationRun& r) {
    std::cerr << "A=" << r.amplitude << " " << gbu::to_string(r.status) << " t=" << r.t_final << '\n';
  });
  const nlohmann::json j = gbu::calibration_json(c);
  std::filesystem::create_directories(spec.output_dir);
  gbu::write_json(std::filesystem::path(spec.output_dir) / "calibration.json", j);
  print(j);
  return kPass;
}

int cmd_sweep(const Options& o) {
  const gbu::RunSpec spec = load(o);
  const auto rows = gbu::run_sweep(spec, spec.output_dir, o.workers);
  bool ok = true;
  for (const auto& r : rows) {
    std::cout << r.index << ' ' << r.status << ' ' << r.t_final << (r.error.empty() ? "" : " " + r.error) << '\n';
    ok = ok && r.error.empty();
  }
  return ok ? kPass : kDiagnosticFailure;
}

int cmd_selftest() {
  bool ok = true;
  auto line = [&ok](bool pass, const std::string& what) {
    std::cout << (pass ? "PASS " : "FAIL ") << what << '\n';
    ok = ok && pass;
  };
  const gbu::Grid square(0.5, 1.0, 101, 101);
  const gbu::Field v = gbu::solve_elliptic(square, 1.0, 1.0, [](double, double) { return 0.0; });
  const double vmax = *std::max_element(v.values.begin(), v.values.end());
  line(std::abs(vmax - gbu::torsion_square_max()) <= 1e-3, "torsion maximum " + std::to_string(vmax));

  const auto conv = gbu::p_laplacian_convergence(gbu::DomainSpec{}, 3.0, 31, 51, 3);
  line(conv.min_order() >= 1.8, "p-Laplacian order " + std::to_string(conv.min_order()));

  gbu::NondegBarrierParams bp;
  const double mismatch = gbu::nondeg_jet_fd_mismatch(bp, 100);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", mismatch);
  line(mismatch <= 1e-6, std::string("barrier derivatives vs differences ") + buf);
  return ok ? kPass : kDiagnosticFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient blow-up solver and diagnostics"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Config file (key = value sections) or a run manifest");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--grad-max", o.grad_max, "Absolute blow-up threshold on max |grad u|");
    sub->add_option("--t-end", o.t_end, "Time horizon");
  };
  auto* simulate = app.add_subcommand("simulate", "Run one evolution and write its outputs");
  auto* diagnose = app.add_subcommand("diagnose", "Run, evaluate every claim, fail on any violation");
  auto* barriers = app.add_subcommand("verify-barriers", "Build and check both barriers");
  auto* calibrate = app.add_subcommand("calibrate", "Locate the blow-up amplitude threshold");
  auto* sweep = app.add_subcommand("sweep", "Expand the [sweep] lists into runs");
  auto* selftest = app.add_subcommand("selftest", "Quick solver self-checks");
  for (auto* s : {simulate, diagnose, barriers, calibrate, sweep}) common(s);
  sweep->add_option("--workers", o.workers, "Concurrent runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(o, false);
    if (*diagnose) return cmd_simulate(o, true);
    if (*barriers) return cmd_verify_barriers(o);
    if (*calibrate) return cmd_calibrate(o);
    if (*sweep) return cmd_sweep(o);
    if (*selftest) return cmd_selftest();
  } catch (const gbu::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gbu::HypothesisViolation& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gbu::GeometryError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gbu::StepDiverged& e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiagnosticFailure;
  }
  return kPass;
}
