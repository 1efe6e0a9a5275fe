#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbu/evolution.hpp"
#include "gbu/grid.hpp"
#include "gbu/j_functional.hpp"
#include "gbu/operators.hpp"
#include "gbu/params.hpp"

namespace gbu {

/// Node, time and value at which a claim is extremal.
struct Witness {
  bool present = false;
  std::size_t i = 0;
  std::size_t j = 0;
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  double value = 0.0;

  static Witness at(const Grid& g, std::size_t flat, double t, double value) {
    Witness w;
    w.present = true;
    w.i = flat % g.nx();
    w.j = flat / g.nx();
    w.x = g.x(w.i);
    w.y = g.y(w.j);
    w.t = t;
    w.value = value;
    return w;
  }
  static Witness at(const Grid& g, std::size_t i, std::size_t j, double t, double value) {
    return at(g, j * g.nx() + i, t, value);
  }
};

/// One checked claim.
struct ClaimSection {
  ClaimSection() = default;
  explicit ClaimSection(std::string n) : name(std::move(n)) {}
  std::string name;
  bool applicable = true;
  bool passed = false;
  double value = 0.0;  // the monitored quantity
  double bound = 0.0;  // what it is compared against
  std::string note;
  Witness witness;
  std::map<std::string, double> details;
};

/// Histories and constants collected alongside the claims.
struct DiagnosticsReport {
  std::string status;
  double t_num = 0.0;
  double c1_tilde = 0.0;
  double delta0 = 0.0;
  std::vector<ClaimSection> sections;
  std::vector<double> snapshot_times;
  std::vector<double> m_grad_history;
  std::vector<double> m_u_history;
  std::vector<double> width_history;
  std::vector<double> argmax_history;
  std::vector<double> weighted_profile_history;

  bool all_passed() const {
    return std::all_of(sections.begin(), sections.end(),
                       [](const ClaimSection& s) { return !s.applicable || s.passed; });
  }
  const ClaimSection& get(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return s;
    throw DiagnosticError("no diagnostics section named " + name);
  }
};

// ---------------------------------------------------------------------------
// Window helpers.
// ---------------------------------------------------------------------------

/// True when the run ended on a gradient-driven stop: the gradient threshold,
/// or the CFL step falling below dt_min (dt shrinks like |∇u|^-(q-1)).
inline bool reached_blowup_proxy(const RunResult& r) {
  return r.status == RunStatus::GradientBlowUp || r.status == RunStatus::DtUnderflow;
}

inline double numerical_blowup_time(const RunResult& r) {
  if (!reached_blowup_proxy(r)) {
    throw DiagnosticError("run did not blow up (status " + to_string(r.status) + ")");
  }
  return r.t_final;
}

inline std::size_t nearest_snapshot(const RunResult& r, double t) {
  if (r.snapshots.empty()) throw DiagnosticError("run has no snapshots");
  std::size_t best = 0;
  for (std::size_t k = 1; k < r.snapshots.size(); ++k)
    if (std::abs(r.snapshots[k].time - t) < std::abs(r.snapshots[best].time - t)) best = k;
  return best;
}

/// Indices of snapshots with t >= start.
inline std::vector<std::size_t> snapshots_from(const RunResult& r, double start) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < r.snapshots.size(); ++k)
    if (r.snapshots[k].time >= start * (1.0 - 1e-12)) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Symmetry, monotonicity, vertical slope.
// ---------------------------------------------------------------------------

struct MonotonicityTolerances {
  double symmetry = 1e-10;
  double ux = 1e-8;
  double uy_slack = 1e-6;
};

/// don3 (mirror defect), don4 (u_x <= 0 on the right half, centre band excluded),
/// don1 (u_y >= mu/2), all from the per-step series.
inline std::vector<ClaimSection> check_symmetry_monotonicity(const RunResult& r, const Grid& g, double mu,
                                                             const MonotonicityTolerances& tol = {}) {
  if (r.series.empty()) throw DiagnosticError("run has no series");
  ClaimSection sym{"don3"}, ux{"don4"}, uy{"don1"};
  sym.bound = tol.symmetry;
  ux.bound = tol.ux;
  uy.bound = 0.5 * mu - tol.uy_slack;
  sym.value = -1.0;
  ux.value = -std::numeric_limits<double>::infinity();
  uy.value = std::numeric_limits<double>::infinity();
  for (const SeriesRow& row : r.series) {
    if (row.symmetry_defect > sym.value) {
      sym.value = row.symmetry_defect;
      sym.witness.present = true;
      sym.witness.t = row.t;
      sym.witness.value = row.symmetry_defect;
    }
    if (row.max_ux_right_half > ux.value) {
      ux.value = row.max_ux_right_half;
      ux.witness = Witness::at(g, row.max_ux_at, row.t, row.max_ux_right_half);
    }
    if (row.min_uy < uy.value) {
      uy.value = row.min_uy;
      uy.witness = Witness::at(g, row.min_uy_at, row.t, row.min_uy);
    }
  }
  sym.passed = sym.value <= sym.bound;
  ux.passed = ux.value <= ux.bound;
  uy.passed = uy.value >= uy.bound;
  sym.note = "largest mirror mismatch before symmetrisation";
  // Band next to x = 0, recorded but not checked.
  double band = -std::numeric_limits<double>::infinity();
  const std::size_t c1 = g.center_column() + 1;
  for (const Field& u : r.snapshots) {
    const VectorField grad = gradient(u, g);
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) band = std::max(band, grad.x(c1, j));
  }
  ux.details["centre_band_max_ux"] = band;
  uy.details["delta0"] = 0.5 * mu;
  return {sym, ux, uy};
}

// ---------------------------------------------------------------------------
// Time-derivative bound.
// ---------------------------------------------------------------------------

/// ||Δ_p u0 + |∇u0|^q||_∞ with the run's operator options.
inline double time_derivative_constant(const Field& u0, const Grid& g, const PdeParams& params,
                                       const OperatorOptions& opt) {
  const Field rate = rhs(u0, g, params, opt);
  double m = 0.0;
  for (double v : rate.values) m = std::max(m, std::abs(v));
  return m;
}

inline ClaimSection time_derivative_bound(const RunResult& r, const Field& u0, const Grid& g, const PdeParams& params,
                                          const OperatorOptions& opt, double slack = 0.05) {
  ClaimSection s{"ut_bound"};
  const double c1 = time_derivative_constant(u0, g, params, opt);
  s.bound = c1 * (1.0 + slack);
  s.value = 0.0;
  for (const SeriesRow& row : r.series) {
    if (row.max_ut_abs >= s.value) {
      s.value = row.max_ut_abs;
      s.witness = Witness::at(g, row.max_ut_at, row.t, row.max_ut_abs);
    }
  }
  s.passed = s.value <= s.bound;
  s.details["C1_tilde"] = c1;
  return s;
}

// ---------------------------------------------------------------------------
// Bernstein profile.
// ---------------------------------------------------------------------------

struct BernsteinValues {
  double m_grad = 0.0;
  double m_u = 0.0;
};

/// m_grad = max |∇u| δ^beta, m_u = max u y^-kappa over interior nodes.
inline BernsteinValues bernstein_monitor(const Field& u, const Grid& g, const ScalingExponents& exps) {
  require_match(u, g, "bernstein_monitor");
  const VectorField grad = gradient(u, g);
  const Field delta = boundary_distance(g);
  BernsteinValues b;
  for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
    const double wy = std::pow(g.y(j), -exps.kappa);
    for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
      const double n = std::sqrt(grad.x(i, j) * grad.x(i, j) + grad.y(i, j) * grad.y(i, j));
      b.m_grad = std::max(b.m_grad, n * std::pow(delta(i, j), exps.beta));
      b.m_u = std::max(b.m_u, u(i, j) * wy);
    }
  }
  return b;
}

inline double max_gradient(const Field& u, const Grid& g) { return max_gradient_norm(gradient(u, g)); }

struct BernsteinTolerances {
  double max_ratio = 3.0;
  double min_growth = 20.0;
};

inline ClaimSection bernstein_section(const RunResult& r, const Grid& g, const ScalingExponents& exps,
                                      DiagnosticsReport* hist = nullptr, const BernsteinTolerances& tol = {}) {
  ClaimSection s{"bernstein"};
  const double T = numerical_blowup_time(r);
  const std::size_t kh = nearest_snapshot(r, 0.5 * T);
  const std::size_t kf = r.snapshots.size() - 1;
  const BernsteinValues half = bernstein_monitor(r.snapshots[kh], g, exps);
  const BernsteinValues fin = bernstein_monitor(r.snapshots[kf], g, exps);
  const double g_half = max_gradient(r.snapshots[kh], g);
  const double g_fin = max_gradient(r.snapshots[kf], g);
  const double ratio_grad = fin.m_grad / half.m_grad;
  const double ratio_u = fin.m_u / half.m_u;
  const double growth = g_fin / g_half;
  s.value = std::max(ratio_grad, ratio_u);
  s.bound = tol.max_ratio;
  s.passed = ratio_grad <= tol.max_ratio && ratio_u <= tol.max_ratio && growth >= tol.min_growth;
  s.witness.present = true;
  s.witness.t = r.snapshots[kf].time;
  s.witness.value = s.value;
  s.details = {{"m_grad_half", half.m_grad}, {"m_grad_final", fin.m_grad}, {"m_u_half", half.m_u},
               {"m_u_final", fin.m_u},       {"ratio_grad", ratio_grad},    {"ratio_u", ratio_u},
               {"grad_growth", growth},      {"t_half", r.snapshots[kh].time}};
  if (hist) {
    for (const Field& u : r.snapshots) {
      const BernsteinValues b = bernstein_monitor(u, g, exps);
      hist->m_grad_history.push_back(b.m_grad);
      hist->m_u_history.push_back(b.m_u);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Localisation on the bottom edge.
// ---------------------------------------------------------------------------

struct BottomProfile {
  std::size_t argmax = 0;  // column index
  double max_abs_uy = 0.0;
  double center_abs_uy = 0.0;
  double width = 0.0;       // smallest symmetric interval holding |u_y| >= max/2
  double off_center = 0.0;  // max |∇u| on boundary nodes away from the centre segment
};

inline BottomProfile bottom_profile(const Field& u, const Grid& g, double rho) {
  const VectorField grad = gradient(u, g);
  const std::size_t nx = g.nx(), ny = g.ny(), c = g.center_column();
  BottomProfile b;
  double best = -1.0;
  const auto dist = [c](std::size_t k) { return k > c ? k - c : c - k; };
  for (std::size_t i = 0; i < nx; ++i) {
    const double v = std::abs(grad.y(i, 0));
    if (v > best || (v == best && (dist(i) < dist(b.argmax) || (dist(i) == dist(b.argmax) && i > b.argmax)))) {
      best = v;
      b.argmax = i;
    }
  }
  b.max_abs_uy = best;
  b.center_abs_uy = std::abs(grad.y(c, 0));
  for (std::size_t i = 0; i < nx; ++i)
    if (std::abs(grad.y(i, 0)) >= 0.5 * best) b.width = std::max(b.width, 2.0 * std::abs(g.x(i)));
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (!g.is_boundary(i, j)) continue;
      if (j == 0 && std::abs(g.x(i)) < rho * (1.0 - 1e-12)) continue;
      const double n = std::sqrt(grad.x(i, j) * grad.x(i, j) + grad.y(i, j) * grad.y(i, j));
      b.off_center = std::max(b.off_center, n);
    }
  }
  return b;
}

struct LocalizationTolerances {
  std::size_t argmax_cells = 1;
  double off_center_ratio = 5.0;
  double center_growth = 50.0;
};

inline ClaimSection gbu_localization(const RunResult& r, const Grid& g, double rho, DiagnosticsReport* hist = nullptr,
                                     const LocalizationTolerances& tol = {}) {
  ClaimSection s{"localization"};
  const double T = numerical_blowup_time(r);
  const std::size_t c = g.center_column();
  std::vector<BottomProfile> prof;
  prof.reserve(r.snapshots.size());
  for (const Field& u : r.snapshots) prof.push_back(bottom_profile(u, g, rho));

  bool argmax_ok = true;
  std::size_t worst_shift = 0;
  double worst_off = 0.0;
  for (std::size_t k = 0; k < prof.size(); ++k) {
    worst_off = std::max(worst_off, prof[k].off_center);
    if (r.snapshots[k].time < 0.5 * T * (1.0 - 1e-12)) continue;
    const std::size_t a = prof[k].argmax;
    const std::size_t shift = a > c ? a - c : c - a;
    if (shift > worst_shift) {
      worst_shift = shift;
      s.witness = Witness::at(g, a, 0, r.snapshots[k].time, prof[k].max_abs_uy);
    }
    if (shift > tol.argmax_cells) argmax_ok = false;
  }
  const BottomProfile& p0 = prof.front();
  const BottomProfile& pf = prof.back();
  const std::size_t kh = nearest_snapshot(r, 0.5 * T);
  const double off_ratio = worst_off / p0.off_center;
  const double center_growth = pf.center_abs_uy / p0.center_abs_uy;
  const double global_final = max_gradient(r.snapshots.back(), g);
  const bool width_ok = pf.width <= prof[kh].width;

  s.value = center_growth;
  s.bound = tol.center_growth;
  s.passed = argmax_ok && off_ratio <= tol.off_center_ratio && center_growth >= tol.center_growth && width_ok;
  if (!s.witness.present) s.witness = Witness::at(g, pf.argmax, 0, r.snapshots.back().time, pf.max_abs_uy);
  s.details = {{"argmax_ok", argmax_ok ? 1.0 : 0.0},
               {"argmax_max_shift_cells", static_cast<double>(worst_shift)},
               {"off_center_initial", p0.off_center},
               {"off_center_max", worst_off},
               {"off_center_ratio", off_ratio},
               {"center_initial", p0.center_abs_uy},
               {"center_final", pf.center_abs_uy},
               {"center_growth", center_growth},
               {"width_half", prof[kh].width},
               {"width_final", pf.width},
               {"off_center_to_global_final", pf.off_center / global_final}};
  if (hist) {
    for (std::size_t k = 0; k < prof.size(); ++k) {
      hist->width_history.push_back(prof[k].width);
      hist->argmax_history.push_back(g.x(prof[k].argmax));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// J functional, weighted profile, corner coefficient.
// ---------------------------------------------------------------------------

/// J over the closed region, row-major in the region's own (i - i0, j - j0) indexing.
struct JField {
  JWindow window;
  std::vector<double> values;
  JMax max;
};

inline JField evaluate_J(const Field& u, const Grid& g, const JParams& jp, const PdeParams& params) {
  validate_jparams(jp, params);
  const VectorField grad = gradient(u, g);
  JField out;
  out.window = JWindow::of(g, jp.x1, jp.y1);
  for (std::size_t j = out.window.j0; j <= out.window.j1; ++j) {
    for (std::size_t i = out.window.i0; i <= out.window.i1; ++i) {
      const double J = grad.x(i, j) + j_weight(jp.k, jp.alpha, jp.gamma, g.x(i), g.y(j), u(i, j));
      out.values.push_back(J);
      if (J > out.max.value) out.max = {J, i, j};
    }
  }
  return out;
}

struct KSearchResult {
  bool found = false;
  double k = 0.0;
  double max_J = 0.0;  // at the returned k over the window
  Witness witness;
  std::vector<std::pair<double, double>> tried;  // (k, max J)
};

/// max over snapshots with t >= start of max J on the region.
inline std::pair<double, Witness> window_max_J(const RunResult& r, const std::vector<VectorField>& grads,
                                               const Grid& g, const JParams& jp, double start) {
  double best = -std::numeric_limits<double>::infinity();
  Witness w;
  for (std::size_t k : snapshots_from(r, start)) {
    const JMax m = max_J(r.snapshots[k], grads[k], g, jp);
    if (m.value > best) {
      best = m.value;
      w = Witness::at(g, m.i, m.j, r.snapshots[k].time, m.value);
    }
  }
  return {best, w};
}

struct KSearchOptions {
  double window_fraction = 0.5;
  double tolerance = 1e-6;
  double k_start = 1.0;
  double k_floor = 1e-6;
};

/// Halves k from k_start until max J <= tolerance over the window or k < k_floor.
inline KSearchResult k_search(const RunResult& r, const Grid& g, const JParams& base, const PdeParams& params,
                              const KSearchOptions& opt = {}) {
  validate_jparams(base.with_k(opt.k_start), params);
  const double T = numerical_blowup_time(r);
  std::vector<VectorField> grads;
  grads.reserve(r.snapshots.size());
  for (const Field& u : r.snapshots) grads.push_back(gradient(u, g));
  KSearchResult res;
  for (double k = opt.k_start; k >= opt.k_floor; k *= 0.5) {
    const auto [m, w] = window_max_J(r, grads, g, base.with_k(k), opt.window_fraction * T);
    res.tried.emplace_back(k, m);
    res.k = k;
    res.max_J = m;
    res.witness = w;
    if (m <= opt.tolerance) {
      res.found = true;
      break;
    }
  }
  return res;
}

/// sup over the region's interior of u x^(2/(alpha-1)) y^-(1-2 sigma).
inline double weighted_profile(const Field& u, const Grid& g, const JParams& jp) {
  const JWindow w = JWindow::of(g, jp.x1, jp.y1);
  const double ex = 2.0 / (jp.alpha - 1.0), ey = -(1.0 - 2.0 * jp.sigma);
  double s = 0.0;
  for (std::size_t j = w.j0 + 1; j <= w.j1; ++j) {
    if (!(g.y(j) < jp.y1)) continue;
    for (std::size_t i = w.i0 + 1; i <= w.i1; ++i) {
      if (!(g.x(i) < jp.x1)) continue;
      s = std::max(s, u(i, j) * std::pow(g.x(i), ex) * std::pow(g.y(j), ey));
    }
  }
  return s;
}

struct CornerValue {
  double value = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  std::size_t j = 0;
};

/// inf over the interior of (0, x1) x (0, y1) of -u_x / (x y).
inline CornerValue corner_check(const Field& u, const Grid& g, double x1, double y1) {
  const VectorField grad = gradient(u, g);
  const JWindow w = JWindow::of(g, x1, y1);
  CornerValue c;
  for (std::size_t j = w.j0 + 1; j <= w.j1; ++j) {
    if (!(g.y(j) < y1)) continue;
    for (std::size_t i = w.i0 + 1; i <= w.i1; ++i) {
      if (!(g.x(i) < x1)) continue;
      const double v = -grad.x(i, j) / (g.x(i) * g.y(j));
      if (v < c.value) c = {v, i, j};
    }
  }
  return c;
}

/// Relative change of the corner coefficient between a run and its refinement.
inline double corner_relative_change(double coarse, double fine) { return std::abs(fine - coarse) / std::abs(coarse); }

struct JTolerances {
  double weighted_ratio = 3.0;
};

/// J_sign, weighted_profile and corner sections plus window sensitivity.
inline std::vector<ClaimSection> j_sections(const RunResult& r, const Grid& g, const JParams& jp,
                                            const PdeParams& params, DiagnosticsReport* hist = nullptr,
                                            const KSearchOptions& kopt = {}, const JTolerances& tol = {}) {
  const double T = numerical_blowup_time(r);
  ClaimSection js{"J_sign"}, wp{"weighted_profile"}, cs{"corner"};

  const KSearchResult ks = k_search(r, g, jp, params, kopt);
  js.value = ks.max_J;
  js.bound = kopt.tolerance;
  js.passed = ks.found && ks.k > kopt.k_floor;
  js.note = ks.found ? "admissible k found" : "inconclusive: no admissible k above the floor";
  js.witness = ks.witness;
  js.details["k"] = ks.k;
  js.details["k_tries"] = static_cast<double>(ks.tried.size());
  std::vector<VectorField> grads;
  for (const Field& u : r.snapshots) grads.push_back(gradient(u, g));
  for (double f : {0.4, 0.5, 0.6}) {
    const auto [m, w] = window_max_J(r, grads, g, jp.with_k(ks.k), f * T);
    (void)w;
    js.details["max_J_window_" + std::to_string(static_cast<int>(std::lround(f * 10))) + "0pct"] = m;
  }

  const std::size_t kh = nearest_snapshot(r, 0.5 * T);
  const double w_half = weighted_profile(r.snapshots[kh], g, jp);
  const double w_fin = weighted_profile(r.snapshots.back(), g, jp);
  wp.value = w_fin / w_half;
  wp.bound = tol.weighted_ratio;
  wp.passed = wp.value <= wp.bound;
  wp.witness.present = true;
  wp.witness.t = r.snapshots.back().time;
  wp.witness.value = w_fin;
  wp.details = {{"half", w_half}, {"final", w_fin}};
  if (hist)
    for (const Field& u : r.snapshots) hist->weighted_profile_history.push_back(weighted_profile(u, g, jp));

  const CornerValue cv = corner_check(r.snapshots[kh], g, jp.x1, jp.y1);
  cs.value = cv.value;
  cs.bound = 0.0;
  cs.passed = cv.value > 0.0;
  cs.witness = Witness::at(g, cv.i, cv.j, r.snapshots[kh].time, cv.value);
  cs.note = "refinement stability is checked by comparing two runs";
  return {js, wp, cs};
}

// ---------------------------------------------------------------------------
// Full report.
// ---------------------------------------------------------------------------

struct DiagnoseInputs {
  const RunResult& result;
  const Field& u0;
  const Grid& grid;
  const PdeParams& params;
  const DomainSpec& domain;
  JParams jparams;
  OperatorOptions operators;
};

/// Every claim on a run; blow-up-window claims are marked not applicable when
/// the run did not reach the blow-up proxy.
inline DiagnosticsReport diagnose(const DiagnoseInputs& in) {
  DiagnosticsReport rep;
  const RunResult& r = in.result;
  rep.status = to_string(r.status);
  rep.delta0 = 0.5 * in.params.mu();
  for (const Field& u : r.snapshots) rep.snapshot_times.push_back(u.time);
  for (auto& s : check_symmetry_monotonicity(r, in.grid, in.params.mu())) rep.sections.push_back(std::move(s));
  ClaimSection ut = time_derivative_bound(r, in.u0, in.grid, in.params, in.operators);
  rep.c1_tilde = ut.details["C1_tilde"];
  rep.sections.push_back(std::move(ut));

  if (reached_blowup_proxy(r)) {
    rep.t_num = r.t_final;
    rep.sections.push_back(bernstein_section(r, in.grid, in.params.exponents(), &rep));
    rep.sections.push_back(gbu_localization(r, in.grid, in.domain.rho, &rep));
    for (auto& s : j_sections(r, in.grid, in.jparams, in.params, &rep)) rep.sections.push_back(std::move(s));
  } else {
    rep.t_num = std::numeric_limits<double>::quiet_NaN();
    for (const char* name : {"bernstein", "localization", "J_sign", "weighted_profile", "corner"}) {
      ClaimSection s{name};
      s.applicable = false;
      s.note = "run did not blow up (status " + rep.status + ")";
      rep.sections.push_back(std::move(s));
    }
  }
  return rep;
}

}  // namespace gbu
