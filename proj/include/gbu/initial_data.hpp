#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gbu/grid.hpp"
#include "gbu/operators.hpp"
#include "gbu/params.hpp"

namespace gbu {

namespace cutoff {
inline constexpr double plateau = 1.0 / 3.0;
inline constexpr double support = 2.0 / 3.0;
/// sup |phi'| of the quintic smoothstep over a transition of width 1/3: 3 * 15/8.
inline constexpr double max_slope = 45.0 / 8.0;
}  // namespace cutoff

/// Even C^2 cutoff: 1 on |s| <= 1/3, 0 on |s| >= 2/3, quintic smoothstep between.
inline double cutoff_phi(double s) {
  const double a = std::abs(s);
  if (a <= cutoff::plateau) return 1.0;
  if (a >= cutoff::support) return 0.0;
  const double t = (a - cutoff::plateau) / (cutoff::support - cutoff::plateau);
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// d/ds of cutoff_phi.
inline double cutoff_phi_prime(double s) {
  const double a = std::abs(s);
  if (a <= cutoff::plateau || a >= cutoff::support) return 0.0;
  const double w = cutoff::support - cutoff::plateau;
  const double t = (a - cutoff::plateau) / w;
  const double d = -30.0 * t * t * (1.0 - t) * (1.0 - t) / w;
  return s < 0.0 ? -d : d;
}

/// Vertical profile of the bump: phi((y-eps)/eps) below y = eps, phi((y-eps)/L2) above.
inline double psi_eps(double y, double eps, double L2) {
  if (y <= eps) return cutoff_phi((y - eps) / eps);
  return cutoff_phi((y - eps) / L2);
}

/// Bump family mu y + A eps^kappa phi(x/eps) psi_eps(y).
struct InitialDataSpec {
  double eps = 0.2;
  double amplitude = 1.0;  // A, stands in for the existential constant C1
  double mu = 0.1;
  double plateau = cutoff::plateau;
  double support = cutoff::support;
  double loc_c = 0.05;  // c of the upper envelope mu (y + c chi)

  bool operator==(const InitialDataSpec&) const = default;
};

inline void validate_initial_spec(const InitialDataSpec& s, const DomainSpec& d) {
  if (!(s.eps > 0.0)) throw GeometryError("initial data: eps must be positive");
  if (!(s.eps < std::min(d.L1, d.L2 / 2.0))) {
    throw GeometryError("initial data: need eps < min(L1, L2/2)");
  }
  if (!(s.amplitude > 0.0)) throw GeometryError("initial data: amplitude must be positive");
  if (s.mu < 0.0) throw GeometryError("initial data: mu must be non-negative");
  if (!(s.loc_c > 0.0)) throw GeometryError("initial data: loc_c must be positive");
}

inline Field build_initial_data(const InitialDataSpec& spec, const Grid& g, const DomainSpec& domain,
                                const ScalingExponents& exps) {
  validate_initial_spec(spec, domain);
  const double a = g.half_width(), b = g.height();
  // Bump support: |x| < 2 eps/3, eps/3 < y < eps + 2 L2/3.
  if (!(cutoff::support * spec.eps < a) || !(spec.eps + cutoff::support * domain.L2 < b)) {
    throw GeometryError("initial data: bump support exits the domain");
  }
  const double scale = spec.amplitude * std::pow(spec.eps, exps.kappa);
  Field u(g);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const double y = g.y(j);
    const double py = psi_eps(y, spec.eps, domain.L2);
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double base = spec.mu * y;
      if (g.is_boundary(i, j)) {
        u(i, j) = base;
        continue;
      }
      u(i, j) = base + scale * cutoff_phi(g.x(i) / spec.eps) * py;
    }
  }
  return u;
}

inline Field build_initial_data(const InitialDataSpec& spec, const Grid& g, const DomainSpec& domain,
                                const PdeParams& params) {
  return build_initial_data(spec, g, domain, params.exponents());
}

/// Outcome of one named condition with its worst node.
struct ConditionResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // signed margin at the witness (negative = violated)
  std::size_t i = 0;
  std::size_t j = 0;
  double x = 0.0;
  double y = 0.0;
  bool has_witness = false;
};

struct ValidationReport {
  std::vector<ConditionResult> conditions;

  bool all_passed() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
  }
  const ConditionResult& get(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return c;
    throw Error("no condition named " + name);
  }
};

namespace detail {

/// Tracks the smallest margin seen over a set of nodes.
struct MarginTracker {
  ConditionResult r;
  double tol;

  MarginTracker(std::string name, double tolerance) : tol(tolerance) {
    r.name = std::move(name);
    r.worst = std::numeric_limits<double>::infinity();
  }
  void see(double margin, const Grid& g, std::size_t i, std::size_t j) {
    if (margin < r.worst) {
      r.worst = margin;
      r.i = i;
      r.j = j;
      r.x = g.x(i);
      r.y = g.y(j);
      r.has_witness = true;
    }
  }
  ConditionResult finish() {
    r.passed = !r.has_witness || r.worst >= -tol;
    return r;
  }
};

}  // namespace detail

/// Checks the five well-preparedness conditions with discrete derivatives.
///
/// margins are (value - bound) with the sign chosen so that >= 0 means OK.
inline ValidationReport validate_initial_data(const Field& u0, const Grid& g, const InitialDataSpec& spec,
                                              const DomainSpec& domain, const ScalingExponents& exps) {
  require_match(u0, g, "validate_initial_data");
  const VectorField grad = gradient(u0, g);
  const std::size_t c = g.center_column();
  const double mu = spec.mu;
  const double scale = spec.amplitude * std::pow(spec.eps, exps.kappa);
  const double derivative_tol = 1e-12 * std::max(1.0, scale / std::min(g.hx(), g.hy()));

  detail::MarginTracker sym("don00", 0.0);
  detail::MarginTracker ux("don0b", derivative_tol);
  detail::MarginTracker uy("don1b", derivative_tol);
  detail::MarginTracker upper("don0b2c", 1e-14);
  detail::MarginTracker lower("don4b", 1e-14);

  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double x = g.x(i), y = g.y(j);
      sym.see(-std::abs(u0(i, j) - u0(g.mirror(i), j)), g, i, j);
      if (g.is_boundary(i, j)) continue;
      if (i > c) ux.see(-grad.x(i, j), g, i, j);
      uy.see(grad.y(i, j) - 0.5 * mu, g, i, j);
      const bool in_strip = std::abs(x) < 0.5 * domain.rho && y > 0.0 && y < domain.L2;
      upper.see(mu * (y + (in_strip ? spec.loc_c : 0.0)) - u0(i, j), g, i, j);
      const double dx = x, dy = y - spec.eps;
      if (std::sqrt(dx * dx + dy * dy) < spec.eps / 3.0) lower.see(u0(i, j) - scale, g, i, j);
    }
  }
  ValidationReport rep;
  rep.conditions = {sym.finish(), ux.finish(), uy.finish(), upper.finish()};
  ConditionResult l = lower.finish();
  if (!l.has_witness) {
    // No node resolves the ball: the condition cannot be verified.
    l.passed = false;
    l.worst = -std::numeric_limits<double>::infinity();
  }
  rep.conditions.push_back(l);
  return rep;
}

/// Closed-form sufficient condition for u_y >= mu/2:
/// A eps^kappa sup|phi'| / L2 <= mu / 2.
inline bool vertical_slope_condition(const InitialDataSpec& s, double L2, const ScalingExponents& exps) {
  return std::pow(s.eps, exps.kappa) <= s.mu * L2 / (2.0 * s.amplitude * cutoff::max_slope);
}

}  // namespace gbu
