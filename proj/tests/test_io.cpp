#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "gbu/io.hpp"

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gbu_test_io_" + name);
  fs::remove_all(p);
  return p;
}

gbu::RunSpec small_run() {
  return gbu::parse_config_text(
      "[pde]\np = 3\nq = 5\nmu = 0.1\n"
      "[grid]\nnx = 31\nny = 51\n"
      "[initial]\namplitude = 0.5\n"
      "[solver]\nt_end = 2e-4\nsnapshot_every = 5e-5\nhamiltonian_scheme = upwind\n"
      "[j]\nmonitor = true\n");
}

TEST(Io, ManifestAndFiles) {
  const fs::path dir = scratch("manifest");
  const gbu::Simulation sim = gbu::simulate(small_run());
  const gbu::DiagnosticsReport rep = gbu::diagnose(sim);
  const gbu::OutputFiles out = gbu::emit_outputs(dir, sim, &rep);
  for (const auto& f : out.files) EXPECT_TRUE(fs::exists(dir / f)) << f;

  std::ifstream in(dir / "manifest.json");
  const nlohmann::json m = nlohmann::json::parse(in);
  EXPECT_EQ(m["schema"], "gbu-manifest/1");
  EXPECT_EQ(m["result"]["status"], gbu::to_string(sim.result.status));
  EXPECT_EQ(m["result"]["snapshot_count"].get<std::size_t>(), sim.result.snapshots.size());
  std::size_t snapshots = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().rfind("snapshot_", 0) == 0) ++snapshots;
  EXPECT_EQ(snapshots, sim.result.snapshots.size());
  EXPECT_TRUE(fs::exists(dir / "j_series.csv"));
  EXPECT_TRUE(fs::exists(dir / "diagnostics.json"));
  fs::remove_all(dir);
}

TEST(Io, RerunFromManifestReproducesSeries) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  gbu::emit_outputs(a, gbu::simulate(small_run()));
  const gbu::RunSpec again = gbu::parse_config((a / "manifest.json").string());
  EXPECT_TRUE(again == small_run());
  gbu::emit_outputs(b, gbu::simulate(again));
  EXPECT_EQ(gbu::read_text_file((a / "series.csv").string()), gbu::read_text_file((b / "series.csv").string()));
  EXPECT_EQ(gbu::read_text_file((a / "snapshot_0001.csv").string()),
            gbu::read_text_file((b / "snapshot_0001.csv").string()));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Io, AbsoluteThresholdBelowInitialGradientIsRejected) {
  gbu::RunSpec s = small_run();
  s.solver.grad_max = 1e-3;
  try {
    gbu::simulate(s);
    FAIL() << "accepted a threshold below the initial gradient";
  } catch (const gbu::ConfigError& e) {
    EXPECT_EQ(e.key(), "solver.grad_max");
  }
}

TEST(Io, SweepExpansion) {
  const gbu::RunSpec s = gbu::parse_config_text(
      "[pde]\np = 3\nq = 5\nmu = 0.1\n[sweep]\nmu = 0, 0.1, 0.2\namplitude = 0.5, 1\ngrid = 31x51, 61x101\n");
  const auto runs = gbu::expand_sweep(s);
  ASSERT_EQ(runs.size(), 12u);
  EXPECT_DOUBLE_EQ(runs.front().pde.mu, 0.0);
  EXPECT_DOUBLE_EQ(runs.back().pde.mu, 0.2);
  EXPECT_EQ(runs.back().grid.nx, 61u);
  for (const auto& r : runs) {
    EXPECT_TRUE(r.sweep.empty());
    EXPECT_DOUBLE_EQ(r.initial.mu, r.pde.mu);
  }
  EXPECT_EQ(gbu::expand_sweep(small_run()).size(), 1u);
}

TEST(Io, SweepRunsWriteOneDirectoryEach) {
  const fs::path dir = scratch("sweep");
  gbu::RunSpec s = small_run();
  s.sweep.amplitude = {0.25, 0.5};
  const auto rows = gbu::run_sweep(s, dir, 2);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_TRUE(r.error.empty()) << r.error;
  EXPECT_TRUE(fs::exists(dir / "run_000" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "run_001" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "sweep.csv"));
  fs::remove_all(dir);
}

TEST(Io, CalibrationBracketsTheThreshold) {
  gbu::RunSpec s = small_run();
  s.solver.hamiltonian_scheme = gbu::HamiltonianScheme::Upwind;
  s.calibration.a_lo = 0.5;
  s.calibration.a_hi = 8.0;
  s.calibration.rel_width = 0.2;
  s.calibration.t_end = 2e-4;
  s.calibration.grad_max_factor = 1.5;
  const gbu::CalibrationResult c = gbu::calibrate_blowup_amplitude(s);
  EXPECT_LE(c.rel_width(), 0.2);
  EXPECT_GT(c.a_star, c.a_lo);
  EXPECT_LT(c.a_star, c.a_hi);
  EXPECT_TRUE(gbu::calibration_probe(s, c.a_hi).blew_up);
  EXPECT_FALSE(gbu::calibration_probe(s, c.a_lo).blew_up);
  const nlohmann::json j = gbu::calibration_json(c);
  EXPECT_EQ(j["runs"].size(), c.runs.size());
}

}  // namespace
