#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gbu/grid.hpp"
#include "gbu/initial_data.hpp"
#include "gbu/operators.hpp"
#include "gbu/params.hpp"

namespace gbu {

// ---------------------------------------------------------------------------
// Anisotropic elliptic solve: -[V_xx + c V_yy] = f, V = phi on the boundary.
// ---------------------------------------------------------------------------

struct EllipticSolveInfo {
  std::string method = "conjugate-gradient";
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

struct EllipticOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 20000;
};

/// Relative residual ||b - A v|| / ||b|| of the 5-point scheme over interior
/// nodes, where b carries the source and the boundary values of v.
inline double elliptic_relative_residual(const Field& v, const Grid& g, double c, double source) {
  const double ax = 1.0 / (g.hx() * g.hx()), ay = c / (g.hy() * g.hy());
  double num = 0.0, den = 0.0;
  for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
    for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
      const double r = source - ax * (2.0 * v(i, j) - v(i - 1, j) - v(i + 1, j)) -
                       ay * (2.0 * v(i, j) - v(i, j - 1) - v(i, j + 1));
      double b = source;
      if (i == 1) b += ax * v(0, j);
      if (i + 2 == g.nx()) b += ax * v(g.nx() - 1, j);
      if (j == 1) b += ay * v(i, 0);
      if (j + 2 == g.ny()) b += ay * v(i, g.ny() - 1);
      num += r * r;
      den += b * b;
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Solves -[V_xx + c V_yy] = source with V = boundary(x, y) on the rectangle
/// boundary, by conjugate gradients on the interior unknowns.
inline Field solve_elliptic(const Grid& g, double c, double source,
                            const std::function<double(double, double)>& boundary, EllipticSolveInfo* info = nullptr,
                            const EllipticOptions& opt = {}) {
  if (!(c > 0.0)) throw SolverError("elliptic solve: anisotropy must be positive");
  const std::size_t mx = g.nx() - 2, my = g.ny() - 2, n = mx * my;
  const double ax = 1.0 / (g.hx() * g.hx()), ay = c / (g.hy() * g.hy());
  Field v(g);
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i)
      if (g.is_boundary(i, j)) v(i, j) = boundary(g.x(i), g.y(j));

  auto idx = [mx](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>((j - 1) * mx + (i - 1)); };
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * n);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
    for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
      const auto k = idx(i, j);
      double b = source;
      trips.emplace_back(k, k, 2.0 * ax + 2.0 * ay);
      auto link = [&](std::size_t ii, std::size_t jj, double w) {
        if (g.is_boundary(ii, jj)) {
          b += w * v(ii, jj);
        } else {
          trips.emplace_back(k, idx(ii, jj), -w);
        }
      };
      link(i - 1, j, ax);
      link(i + 1, j, ax);
      link(i, j - 1, ay);
      link(i, j + 1, ay);
      rhs[k] = b;
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  A.setFromTriplets(trips.begin(), trips.end());

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(opt.tolerance);
  cg.setMaxIterations(static_cast<Eigen::Index>(opt.max_iterations));
  cg.compute(A);
  const Eigen::VectorXd sol = cg.solve(rhs);
  const double rel = rhs.norm() > 0.0 ? (rhs - A * sol).norm() / rhs.norm() : (A * sol).norm();
  if (cg.info() != Eigen::Success || !(rel <= opt.tolerance)) {
    throw SolverError("elliptic solve did not converge: relative residual " + std::to_string(rel) + " after " +
                      std::to_string(cg.iterations()) + " iterations");
  }
  for (std::size_t j = 1; j + 1 < g.ny(); ++j)
    for (std::size_t i = 1; i + 1 < g.nx(); ++i) v(i, j) = sol[idx(i, j)];
  if (info) {
    info->iterations = static_cast<std::size_t>(cg.iterations());
    info->relative_residual = rel;
  }
  return v;
}

/// Bottom-edge boundary profile: 1 on |x| <= rho/2, 0 on |x| >= rho, smooth between.
inline double barrier_boundary_profile(double x, double y, double rho) {
  if (y != 0.0) return 0.0;
  return cutoff_phi(x / (1.5 * rho));
}

/// V solving -[V_xx + (p-1) V_yy] = 1 with the bottom-edge bump as boundary data.
inline Field solve_V(const Grid& g, double p, double rho, EllipticSolveInfo* info = nullptr,
                     const EllipticOptions& opt = {}) {
  if (!(rho > 0.0 && rho < g.half_width())) throw GeometryError("solve_V: need 0 < rho < a");
  return solve_elliptic(
      g, p - 1.0, 1.0, [rho](double x, double y) { return barrier_boundary_profile(x, y, rho); }, info, opt);
}

/// Maximum of the torsion function -ΔV = 1 on the unit square with zero
/// boundary data, by its double sine series (odd m, n).
inline double torsion_square_max(int terms = 399) {
  const double pi = 3.14159265358979323846;
  double s = 0.0;
  for (int m = 1; m <= terms; m += 2) {
    for (int n = 1; n <= terms; n += 2) {
      const double sm = ((m - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
      const double sn = ((n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
      s += 16.0 / (pi * pi * pi * pi * m * n * (static_cast<double>(m) * m + static_cast<double>(n) * n)) * sm * sn;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Global barrier Ū = mu (y + eps_V V).
// ---------------------------------------------------------------------------

struct ResidualReport {
  double min_residual = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  std::size_t j = 0;
  double x = 0.0;
  double y = 0.0;
  std::size_t samples = 0;
};

struct BarrierBundle {
  Field V;
  double rho = 0.0;
  double eps_V = 0.0;
  double vx_sup = 0.0;
  double vy_sup = 0.0;
  double mu0_found = 0.0;
  Field Ubar;
  ResidualReport residual_report;
  ValidationReport properties;
  EllipticSolveInfo solve_info;
};

/// Fraction of the admissible bound 1/(|V_x| + 2|V_y|) used for eps_V.
inline constexpr double barrier_eps_fraction = 0.5;

/// mu (y + eps V).
inline Field barrier_field(const Field& V, const Grid& g, double mu, double eps) {
  Field u(g);
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) u(i, j) = mu * (g.y(j) + eps * V(i, j));
  return u;
}

/// Nodewise checks U > 0 on interior ∪ Σ_ρ, U = 0 on Σ'_ρ, |U_y| <= 1/2.
inline ValidationReport check_barrier_properties(const Field& V, const Grid& g, double eps, double rho) {
  const VectorField grad = gradient(V, g);
  detail::MarginTracker pos("positive", 0.0);
  detail::MarginTracker zero("zero_outside", 0.0);
  detail::MarginTracker slope("uy_half", 1e-14);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double U = eps * V(i, j);
      const double x = g.x(i);
      const bool on_sigma = j == 0 && std::abs(x) <= 0.5 * rho;
      const bool on_sigma_prime = g.is_boundary(i, j) && !(j == 0 && std::abs(x) < rho);
      if (!g.is_boundary(i, j) || on_sigma) {
        pos.see(U > 0.0 ? U : (U == 0.0 ? -std::numeric_limits<double>::min() : U), g, i, j);
      }
      if (on_sigma_prime) zero.see(-std::abs(U), g, i, j);
      slope.see(0.5 - std::abs(eps * grad.y(i, j)), g, i, j);
    }
  }
  ValidationReport rep;
  rep.conditions = {pos.finish(), zero.finish(), slope.finish()};
  return rep;
}

/// min over interior nodes of -Δ_p Ū - |∇Ū|^q (central gradient for the power term).
inline ResidualReport verify_supersolution_static(const Field& ubar, const Grid& g, const PdeParams& params) {
  require_match(ubar, g, "verify_supersolution_static");
  const Field lap = p_laplacian(ubar, g, params.p());
  const Field ham = hamiltonian(ubar, g, params.q(), HamiltonianScheme::Central);
  ResidualReport r;
  for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
    for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
      const double res = -lap(i, j) - ham(i, j);
      ++r.samples;
      if (res < r.min_residual) {
        r.min_residual = res;
        r.i = i;
        r.j = j;
        r.x = g.x(i);
        r.y = g.y(j);
      }
    }
  }
  return r;
}

struct Mu0Search {
  double tolerance_residual = -1e-8;
  double mu_tolerance = 1e-6;
  int max_iterations = 40;
};

/// Largest mu in (0, 1] with verified static supersolution (bisection); 0 if none found.
inline double find_mu0(const Field& V, const Grid& g, double eps, const PdeParams& params,
                       const Mu0Search& s = {}) {
  auto ok = [&](double mu) {
    return verify_supersolution_static(barrier_field(V, g, mu, eps), g, params.with_mu(mu)).min_residual >=
           s.tolerance_residual;
  };
  if (ok(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < s.max_iterations && hi - lo > s.mu_tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// min over interior nodes of -Δ_p w - (eps/2)|∇w|^(p-2), w = y + eps V. A
/// nonnegative value makes mu (y + eps V) a supersolution for small mu.
inline double barrier_ellipticity_margin(const Field& V, const Grid& g, double eps, double p) {
  const Field w = barrier_field(V, g, 1.0, eps);
  const Field lap = p_laplacian(w, g, p);
  const SquarePower mob(0.5 * (p - 2.0));
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
    for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
      const double n2 = gradient_norm2(w, g, i, j, HamiltonianScheme::Central);
      m = std::min(m, -lap(i, j) - 0.5 * eps * mob(n2));
    }
  }
  return m;
}

/// eps_V: start at barrier_eps_fraction of 1/(|V_x| + 2|V_y|) (discrete sup-norms)
/// and halve until the ellipticity margin is nonnegative. Ū assembled at mu0_found.
inline BarrierBundle assemble_global_barrier(Field V, const Grid& g, double rho, const PdeParams& params,
                                             const Mu0Search& s = {}) {
  require_match(V, g, "assemble_global_barrier");
  BarrierBundle b;
  b.rho = rho;
  const VectorField grad = gradient(V, g);
  for (std::size_t k = 0; k < V.values.size(); ++k) {
    b.vx_sup = std::max(b.vx_sup, std::abs(grad.x.values[k]));
    b.vy_sup = std::max(b.vy_sup, std::abs(grad.y.values[k]));
  }
  b.eps_V = barrier_eps_fraction / (b.vx_sup + 2.0 * b.vy_sup);
  for (int k = 0; k < 30 && barrier_ellipticity_margin(V, g, b.eps_V, params.p()) < 0.0; ++k) b.eps_V *= 0.5;
  b.properties = check_barrier_properties(V, g, b.eps_V, rho);
  b.mu0_found = find_mu0(V, g, b.eps_V, params, s);
  const double mu = b.mu0_found > 0.0 ? b.mu0_found : params.mu();
  b.Ubar = barrier_field(V, g, mu, b.eps_V);
  b.residual_report = verify_supersolution_static(b.Ubar, g, params.with_mu(mu));
  b.V = std::move(V);
  return b;
}

inline BarrierBundle build_global_barrier(const Grid& g, double rho, const PdeParams& params,
                                          const Mu0Search& s = {}) {
  EllipticSolveInfo info;
  Field V = solve_V(g, params.p(), rho, &info);
  BarrierBundle b = assemble_global_barrier(std::move(V), g, rho, params, s);
  b.solve_info = info;
  return b;
}

/// Exploration only: golden-section search over eps in (0, eps_hi] maximising
/// the worst static residual at fixed mu.
inline double golden_section_barrier_eps(const Field& V, const Grid& g, double mu, const PdeParams& params,
                                         double eps_hi, int iterations = 40) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto score = [&](double e) {
    return verify_supersolution_static(barrier_field(V, g, mu, e), g, params.with_mu(mu)).min_residual;
  };
  double a = 0.0, b = eps_hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = score(c), fd = score(d);
  for (int k = 0; k < iterations; ++k) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = score(d);
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Nondegeneracy barrier v = eps y V^-beta, V = y + eta (r^2 - (x-x0)^2)(t - t0).
// ---------------------------------------------------------------------------

struct NondegBarrierParams {
  double eps0 = 0.01;
  double eta = 1e-3;
  double r = 0.25;
  double d = 0.5;
  double x0 = 0.0;
  double t0 = 0.0;
  double t_end = 1.0;  // T
  double beta = 1.0 / 3.0;

  bool operator==(const NondegBarrierParams&) const = default;
};

inline void validate_nondeg_params(const NondegBarrierParams& bp) {
  if (!(bp.eps0 > 0.0) || !(bp.eta > 0.0)) throw Error("nondeg barrier: eps0 and eta must be positive");
  if (!(bp.r > 0.0) || !(bp.d > 0.0)) throw Error("nondeg barrier: r and d must be positive");
  if (!(bp.t_end > bp.t0)) throw Error("nondeg barrier: need T > t0");
  if (!(bp.beta > 0.0 && bp.beta < 1.0)) throw Error("nondeg barrier: need 0 < beta < 1");
  if (bp.eta > bp.d / (bp.t_end * bp.r * bp.r)) throw Error("nondeg barrier: need eta <= d / (T r^2)");
}

/// Value and closed-form derivatives of v at one point.
struct NondegJet {
  double v = 0.0;
  double vt = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double vxx = 0.0;
  double vyy = 0.0;
  double vxy = 0.0;
};

inline NondegJet nondeg_jet(const NondegBarrierParams& bp, double x, double y, double t) {
  const double e = bp.eps0, b = bp.beta, eta = bp.eta;
  const double dx = x - bp.x0, s = t - bp.t0;
  const double w = bp.r * bp.r - dx * dx;
  const double V = y + eta * w * s;
  const double Vb = std::pow(V, -b);
  const double Vb1 = Vb / V;
  const double yv = y / V;
  NondegJet J;
  J.v = e * y * Vb;
  J.vt = -e * b * eta * y * w * Vb1;
  J.vx = 2.0 * e * b * eta * y * dx * s * Vb1;
  J.vy = e * Vb * (1.0 - b * yv);
  J.vxx = 2.0 * e * b * eta * s * Vb1 * (y + 2.0 * (b + 1.0) * eta * dx * dx * s * yv);
  J.vyy = e * b * Vb1 * (-2.0 + (b + 1.0) * yv);
  J.vxy = 2.0 * e * b * eta * dx * s * Vb1 * (1.0 - (b + 1.0) * yv);
  return J;
}

/// Δ_p v from the closed-form jet.
inline double p_laplacian_of_jet(const NondegJet& J, double p) {
  const double g2 = J.vx * J.vx + J.vy * J.vy;
  if (g2 == 0.0) return 0.0;
  const double lap = J.vxx + J.vyy;
  const double hess = J.vx * J.vx * J.vxx + 2.0 * J.vx * J.vy * J.vxy + J.vy * J.vy * J.vyy;
  return std::pow(g2, 0.5 * (p - 2.0)) * (lap + (p - 2.0) * hess / g2);
}

/// v_t - Δ_p v - |∇v|^q at one point.
inline double nondeg_residual(const NondegBarrierParams& bp, const PdeParams& params, double x, double y, double t) {
  const NondegJet J = nondeg_jet(bp, x, y, t);
  const double g2 = J.vx * J.vx + J.vy * J.vy;
  return J.vt - p_laplacian_of_jet(J, params.p()) - std::pow(g2, 0.5 * params.q());
}

struct NondegResidualReport {
  double min_residual = std::numeric_limits<double>::infinity();
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  std::size_t samples = 0;
};

/// min of the residual over `samples` deterministic pseudo-random points of
/// [x0-r, x0+r] x (0, d] x (t0, T]. Half of the y-samples are log-uniform on
/// [1e-6 d, d] to resolve the singular layer at y = 0.
inline NondegResidualReport verify_nondeg_barrier(const NondegBarrierParams& bp, const PdeParams& params,
                                                  std::size_t samples = 1000000, std::uint64_t seed = 20240607) {
  validate_nondeg_params(bp);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  NondegResidualReport rep;
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = bp.x0 + bp.r * (2.0 * unit(rng) - 1.0);
    const double uy = 1.0 - unit(rng);  // (0, 1]
    const double y = (k % 2 == 0) ? bp.d * uy : bp.d * std::pow(10.0, -6.0 * (1.0 - uy));
    const double t = bp.t0 + (bp.t_end - bp.t0) * (1.0 - unit(rng));
    const double res = nondeg_residual(bp, params, x, y, t);
    ++rep.samples;
    if (res < rep.min_residual) {
      rep.min_residual = res;
      rep.x = x;
      rep.y = y;
      rep.t = t;
    }
  }
  return rep;
}

struct NondegGridPoint {
  double eps0 = 0.0;
  double eta = 0.0;
  double min_residual = 0.0;
  bool valid = false;
};

struct NondegRegion {
  std::vector<NondegGridPoint> points;
  /// Best valid point re-verified with the full sample count.
  NondegGridPoint confirmed;
  NondegResidualReport confirmed_report;
  bool nonempty() const { return confirmed.valid; }
};

/// Maps the validity region over a logarithmic (eps0, eta) grid. eta runs down
/// from its admissible maximum d/(T r^2).
inline NondegRegion map_nondeg_region(NondegBarrierParams base, const PdeParams& params,
                                      const std::vector<double>& eps_values, int eta_levels = 9,
                                      std::size_t scan_samples = 20000, std::size_t confirm_samples = 1000000) {
  NondegRegion region;
  const double eta_max = base.d / (base.t_end * base.r * base.r);
  double best_margin = -std::numeric_limits<double>::infinity();
  for (double e : eps_values) {
    for (int k = 0; k < eta_levels; ++k) {
      NondegBarrierParams bp = base;
      bp.eps0 = e;
      bp.eta = eta_max * std::pow(10.0, -0.5 * k);
      const auto rep = verify_nondeg_barrier(bp, params, scan_samples);
      NondegGridPoint pt{e, bp.eta, rep.min_residual, rep.min_residual >= 0.0};
      region.points.push_back(pt);
      // Prefer interior points of the region: largest eps, then largest eta.
      if (pt.valid) {
        const double margin = std::log(e) + 1e-3 * std::log(bp.eta);
        if (margin > best_margin) {
          best_margin = margin;
          region.confirmed = pt;
        }
      }
    }
  }
  if (region.confirmed.valid) {
    NondegBarrierParams bp = base;
    bp.eps0 = region.confirmed.eps0;
    bp.eta = region.confirmed.eta;
    region.confirmed_report = verify_nondeg_barrier(bp, params, confirm_samples);
    region.confirmed.min_residual = region.confirmed_report.min_residual;
    region.confirmed.valid = region.confirmed_report.min_residual >= 0.0;
  }
  return region;
}

/// Barrier value at grid nodes inside the box closure at time t.
inline double nondeg_value(const NondegBarrierParams& bp, double x, double y, double t) {
  if (y <= 0.0) return 0.0;
  return nondeg_jet(bp, x, y, t).v;
}

/// Discrete comparison against an evolution: returns max(u - v) over interior
/// box nodes at snapshot times in [t0, T], and whether u <= v held on the
/// parabolic boundary nodes of the box.
struct NondegComparison {
  bool boundary_ordered = true;
  double boundary_excess = -std::numeric_limits<double>::infinity();
  double interior_excess = -std::numeric_limits<double>::infinity();
  std::size_t snapshots_used = 0;
};

inline NondegComparison compare_with_nondeg_barrier(const std::vector<Field>& snapshots, const Grid& g,
                                                    const NondegBarrierParams& bp) {
  NondegComparison c;
  bool first = true;
  for (const Field& u : snapshots) {
    if (u.time < bp.t0 || u.time > bp.t_end) continue;
    ++c.snapshots_used;
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double y = g.y(j);
      if (y > bp.d * (1.0 + 1e-12)) break;
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const double dx = std::abs(g.x(i) - bp.x0);
        if (dx > bp.r * (1.0 + 1e-12)) continue;
        const double diff = u(i, j) - nondeg_value(bp, g.x(i), y, u.time);
        const bool on_boundary = first || j == 0 || y >= bp.d * (1.0 - 1e-12) ||
                                 (i > 0 && std::abs(g.x(i - 1) - bp.x0) > bp.r * (1.0 + 1e-12)) ||
                                 (i + 1 < g.nx() && std::abs(g.x(i + 1) - bp.x0) > bp.r * (1.0 + 1e-12));
        if (on_boundary) {
          c.boundary_excess = std::max(c.boundary_excess, diff);
        } else {
          c.interior_excess = std::max(c.interior_excess, diff);
        }
      }
    }
    first = false;
  }
  c.boundary_ordered = c.boundary_excess <= 0.0;
  return c;
}

}  // namespace gbu
