#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gbu/grid.hpp"
#include "gbu/j_functional.hpp"
#include "gbu/operators.hpp"
#include "gbu/params.hpp"

namespace gbu {

struct SolverConfig {
  double cfl_safety = 0.4;
  double dt_min = 1e-13;
  /// Absolute blow-up threshold; 0 means grad_max_factor * initial max |∇u|.
  double grad_max = 0.0;
  double grad_max_factor = 1e3;
  double t_end = 1.0;
  double snapshot_every = 0.05;
  /// Extra snapshot each time max |∇u| grows by this factor since the last one
  /// (0 disables). Keeps the approach to blow-up sampled.
  double snapshot_grad_growth = 1.25;
  HamiltonianScheme hamiltonian_scheme = HamiltonianScheme::Central;
  double eta_reg = 0.0;
  /// Hard cap on accepted steps; 0 = unlimited.
  std::size_t max_steps = 0;
  /// When set, max J over its region is recorded every step.
  std::optional<JParams> j_monitor;

  OperatorOptions operator_options() const { return {hamiltonian_scheme, eta_reg}; }
  bool operator==(const SolverConfig&) const = default;
};

inline void validate_solver_config(const SolverConfig& c) {
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) throw Error("solver: need 0 < cfl_safety <= 1");
  if (!(c.dt_min > 0.0)) throw Error("solver: need dt_min > 0");
  if (c.grad_max < 0.0) throw Error("solver: grad_max must be non-negative");
  if (c.grad_max == 0.0 && !(c.grad_max_factor > 1.0)) throw Error("solver: grad_max_factor must exceed 1");
  if (!(c.t_end > 0.0)) throw Error("solver: t_end must be positive");
  if (!(c.snapshot_every > 0.0)) throw Error("solver: snapshot_every must be positive");
  if (c.snapshot_grad_growth != 0.0 && !(c.snapshot_grad_growth > 1.0)) {
    throw Error("solver: snapshot_grad_growth must be 0 or > 1");
  }
}

enum class RunStatus { ReachedTEnd, GradientBlowUp, DtUnderflow, StepLimit };

inline std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ReachedTEnd: return "ReachedTEnd";
    case RunStatus::GradientBlowUp: return "GradientBlowUp";
    case RunStatus::DtUnderflow: return "DtUnderflow";
    case RunStatus::StepLimit: return "StepLimit";
  }
  return "?";
}

/// One row of the per-step monitor series (state at time t, reached with step dt).
struct SeriesRow {
  double t = 0.0;
  double dt = 0.0;
  double max_grad = 0.0;
  double argmax_x_bottom = 0.0;
  double min_uy = 0.0;
  double max_ux_right_half = 0.0;
  double bernstein_grad = 0.0;
  double bernstein_u = 0.0;
  double max_J = std::numeric_limits<double>::quiet_NaN();
  double max_ut_abs = 0.0;
  double symmetry_defect = 0.0;
  // Flat node indices of the extremal values (not part of the CSV schema).
  std::size_t min_uy_at = 0;
  std::size_t max_ux_at = 0;
  std::size_t max_ut_at = 0;
};

inline constexpr const char* series_columns =
    "t,dt,max_grad,argmax_x_bottom,min_uy,max_ux_right_half,bernstein_grad,bernstein_u,max_J,max_ut_abs,"
    "symmetry_defect";

struct RunResult {
  RunStatus status = RunStatus::ReachedTEnd;
  double t_final = 0.0;
  double initial_max_grad = 0.0;
  double grad_max_used = 0.0;
  std::size_t steps = 0;
  std::vector<Field> snapshots;
  std::vector<SeriesRow> series;

  bool blew_up() const { return status == RunStatus::GradientBlowUp; }
};

/// Raised when a step produces NaN/Inf; carries the last good state.
class RunDiverged : public StepDiverged {
 public:
  RunDiverged(const std::string& what, Field last_good)
      : StepDiverged(what), last_good_(std::make_shared<Field>(std::move(last_good))) {}
  const Field& last_good() const { return *last_good_; }

 private:
  std::shared_ptr<Field> last_good_;
};

/// CFL bound from a known max |∇u|.
inline double stable_dt_for(double max_grad, const Grid& g, const PdeParams& params, const SolverConfig& cfg) {
  const double h = std::min(g.hx(), g.hy());
  const double p = params.p(), q = params.q();
  const double mobility = std::pow(max_grad * max_grad + cfg.eta_reg, 0.5 * (p - 2.0));
  const double diffusive =
      mobility > 0.0 ? h * h / (4.0 * (p - 1.0) * mobility) : std::numeric_limits<double>::infinity();
  const double slope = std::pow(max_grad, q - 1.0);
  const double advective = slope > 0.0 ? h / (q * slope) : std::numeric_limits<double>::infinity();
  return cfg.cfl_safety * std::min(diffusive, advective);
}

inline double max_gradient_norm(const VectorField& grad) {
  double m = 0.0;
  for (std::size_t k = 0; k < grad.x.values.size(); ++k) {
    const double gx = grad.x.values[k], gy = grad.y.values[k];
    m = std::max(m, gx * gx + gy * gy);
  }
  return std::sqrt(m);
}

inline double stable_dt(const Field& u, const Grid& g, const PdeParams& params, const SolverConfig& cfg) {
  require_match(u, g, "stable_dt");
  return stable_dt_for(max_gradient_norm(gradient(u, g)), g, params, cfg);
}

/// Reset boundary nodes to mu y.
inline void impose_boundary(Field& u, const Grid& g, double mu) {
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i)
      if (g.is_boundary(i, j)) u(i, j) = mu * g.y(j);
}

/// Average mirror nodes; returns the largest mirror mismatch before averaging.
inline double symmetrize(Field& u) {
  double defect = 0.0;
  const std::size_t nx = u.nx;
  for (std::size_t j = 0; j < u.ny; ++j) {
    for (std::size_t i = 0; i < nx / 2; ++i) {
      const std::size_t m = nx - 1 - i;
      const double a = u(i, j), b = u(m, j);
      defect = std::max(defect, std::abs(a - b));
      const double avg = 0.5 * (a + b);
      u(i, j) = avg;
      u(m, j) = avg;
    }
  }
  return defect;
}

/// Forward Euler into `out`: u + dt * rate on the interior, mu y on the boundary.
inline void euler_update_into(const Field& u, const Field& rate, double dt, const Grid& g, double mu, Field& out) {
  const std::size_t nx = g.nx(), ny = g.ny();
  if (!out.matches(g)) out = Field(g);
  bool finite = true;
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    const double* src = u.values.data() + j * nx;
    const double* r = rate.values.data() + j * nx;
    double* o = out.values.data() + j * nx;
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      o[i] = src[i] + dt * r[i];
      finite &= std::isfinite(o[i]);
    }
  }
  impose_boundary(out, g, mu);
  out.time = u.time + dt;
  if (!finite) throw StepDiverged("step produced a non-finite value at t=" + std::to_string(out.time));
}

inline Field euler_update(const Field& u, const Field& rate, double dt, const Grid& g, double mu) {
  Field out(g);
  euler_update_into(u, rate, dt, g, mu, out);
  return out;
}

inline Field step(const Field& u, double dt, const Grid& g, const PdeParams& params, const SolverConfig& cfg) {
  require_match(u, g, "step");
  return euler_update(u, rhs(u, g, params, cfg.operator_options()), dt, g, params.mu());
}

namespace detail {

/// Per-step monitors of the state u with its rate and gradient.
struct MonitorContext {
  const Grid& g;
  const PdeParams& params;
  const SolverConfig& cfg;
  Field delta;
  Field delta_beta;    // δ^beta
  Field y_minus_kap;   // y^-kappa

  MonitorContext(const Grid& grid, const PdeParams& pp, const SolverConfig& c)
      : g(grid), params(pp), cfg(c), delta(boundary_distance(grid)), delta_beta(grid), y_minus_kap(grid) {
    const auto& e = pp.exponents();
    for (std::size_t k = 0; k < delta.values.size(); ++k) {
      const double d = delta.values[k];
      delta_beta.values[k] = d > 0.0 ? std::pow(d, e.beta) : 0.0;
    }
    for (std::size_t j = 1; j < grid.ny(); ++j) {
      const double w = std::pow(grid.y(j), -e.kappa);
      for (std::size_t i = 0; i < grid.nx(); ++i) y_minus_kap(i, j) = w;
    }
  }

  SeriesRow row(const Field& u, const Field& rate, const VectorField& grad, double dt, double defect) const {
    SeriesRow r;
    r.t = u.time;
    r.dt = dt;
    r.symmetry_defect = defect;
    const std::size_t nx = g.nx(), ny = g.ny(), c = g.center_column();
    double m2 = 0.0;
    r.min_uy = std::numeric_limits<double>::infinity();
    r.max_ux_right_half = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const double gx = grad.x(i, j), gy = grad.y(i, j);
        const double n2 = gx * gx + gy * gy;
        m2 = std::max(m2, n2);
        if (g.is_boundary(i, j)) continue;
        const std::size_t k = j * nx + i;
        if (gy < r.min_uy) {
          r.min_uy = gy;
          r.min_uy_at = k;
        }
        if (i >= c + 2 && gx > r.max_ux_right_half) {
          r.max_ux_right_half = gx;
          r.max_ux_at = k;
        }
        r.bernstein_grad = std::max(r.bernstein_grad, std::sqrt(n2) * delta_beta(i, j));
        r.bernstein_u = std::max(r.bernstein_u, u(i, j) * y_minus_kap(i, j));
        if (std::abs(rate(i, j)) > r.max_ut_abs) {
          r.max_ut_abs = std::abs(rate(i, j));
          r.max_ut_at = k;
        }
      }
    }
    r.max_grad = std::sqrt(m2);
    // Bottom-edge argmax of |u_y|; ties resolve towards x = 0, then x >= 0.
    double best = -1.0;
    std::size_t bi = c;
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = std::abs(grad.y(i, 0));
      const auto dist = [&](std::size_t k) { return k > c ? k - c : c - k; };
      if (v > best || (v == best && (dist(i) < dist(bi) || (dist(i) == dist(bi) && i > bi)))) {
        best = v;
        bi = i;
      }
    }
    r.argmax_x_bottom = g.x(bi);
    if (cfg.j_monitor) r.max_J = max_J(u, grad, g, *cfg.j_monitor).value;
    return r;
  }
};

}  // namespace detail

/// Integrates until t_end, max |∇u| >= grad_max, or the CFL step drops below dt_min.
inline RunResult run(const Field& u0, const Grid& g, const PdeParams& params, const SolverConfig& cfg) {
  require_match(u0, g, "run");
  validate_solver_config(cfg);
  const OperatorOptions opt = cfg.operator_options();
  detail::MonitorContext mon(g, params, cfg);
  RhsWorkspace ws;
  Field u = u0;
  Field rate(g);
  Field next(g);
  VectorField grad;
  RunResult res;

  double defect = 0.0;
  {
    Field probe = u;
    defect = symmetrize(probe);
  }
  double dt_prev = 0.0;
  double next_snapshot = 0.0;
  double last_snapshot_grad = 0.0;
  std::size_t last_snapshot_step = std::numeric_limits<std::size_t>::max();

  for (;;) {
    rhs_into(u, g, params, opt, rate, ws);
    gradient_into(u, g, grad);
    const SeriesRow row = mon.row(u, rate, grad, dt_prev, defect);
    res.series.push_back(row);
    const double G = row.max_grad;

    if (res.steps == 0) {
      res.initial_max_grad = G;
      res.grad_max_used = cfg.grad_max > 0.0 ? cfg.grad_max : cfg.grad_max_factor * G;
    }

    const bool time_due = u.time >= next_snapshot * (1.0 - 1e-12);
    const bool grad_due = cfg.snapshot_grad_growth > 0.0 && G >= last_snapshot_grad * cfg.snapshot_grad_growth;
    if (time_due || grad_due) {
      res.snapshots.push_back(u);
      last_snapshot_step = res.steps;
      last_snapshot_grad = G;
      while (next_snapshot <= u.time * (1.0 + 1e-12)) next_snapshot += cfg.snapshot_every;
    }

    std::optional<RunStatus> stop;
    double dt = 0.0;
    if (G >= res.grad_max_used) {
      stop = RunStatus::GradientBlowUp;
    } else if (u.time >= cfg.t_end * (1.0 - 1e-12)) {
      stop = RunStatus::ReachedTEnd;
    } else if (cfg.max_steps > 0 && res.steps >= cfg.max_steps) {
      stop = RunStatus::StepLimit;
    } else {
      dt = stable_dt_for(G, g, params, cfg);
      if (dt < cfg.dt_min) stop = RunStatus::DtUnderflow;
    }
    if (stop) {
      res.status = *stop;
      res.t_final = u.time;
      if (last_snapshot_step != res.steps) res.snapshots.push_back(u);
      return res;
    }

    // Land exactly on t_end and on the periodic snapshot times.
    dt = std::min(dt, cfg.t_end - u.time);
    if (next_snapshot > u.time) dt = std::min(dt, next_snapshot - u.time);
    try {
      euler_update_into(u, rate, dt, g, params.mu(), next);
    } catch (const StepDiverged& e) {
      throw RunDiverged(e.what(), u);
    }
    defect = symmetrize(next);
    std::swap(u, next);
    dt_prev = dt;
    ++res.steps;
  }
}

}  // namespace gbu
