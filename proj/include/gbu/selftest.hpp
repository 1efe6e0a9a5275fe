#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gbu/barriers.hpp"
#include "gbu/grid.hpp"
#include "gbu/operators.hpp"
#include "gbu/params.hpp"

namespace gbu {

/// Smooth test function with its first and second derivatives.
struct TestFunction {
  std::function<double(double, double)> f, fx, fy, fxx, fyy, fxy;
};

/// Δ_p f + |∇f|^q from the derivatives of f.
inline double exact_residual(const TestFunction& t, double p, double q, double x, double y) {
  const double gx = t.fx(x, y), gy = t.fy(x, y);
  const double g2 = gx * gx + gy * gy;
  const double hess = gx * gx * t.fxx(x, y) + 2.0 * gx * gy * t.fxy(x, y) + gy * gy * t.fyy(x, y);
  const double lap = std::pow(g2, 0.5 * (p - 2.0)) * (t.fxx(x, y) + t.fyy(x, y) + (p - 2.0) * hess / g2);
  return lap + std::pow(g2, 0.5 * q);
}

struct ConvergenceStudy {
  std::vector<std::size_t> nx;
  std::vector<double> h;
  std::vector<double> error;
  std::vector<double> order;  // between consecutive levels
  double min_order() const {
    return order.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::min_element(order.begin(), order.end());
  }
};

inline void fill_orders(ConvergenceStudy& s) {
  for (std::size_t k = 1; k < s.error.size(); ++k)
    s.order.push_back(std::log(s.error[k - 1] / s.error[k]) / std::log(s.h[k - 1] / s.h[k]));
}

/// Max-norm error of the discrete Δ_p of (x^2 + y^2)/2 against p r^(p-2),
/// over interior nodes with r >= r_min, on successively halved grids. The
/// gradient vanishes at the origin, where the error is only first order.
inline ConvergenceStudy p_laplacian_convergence(const DomainSpec& d, double p, std::size_t nx0 = 31,
                                                std::size_t ny0 = 51, int levels = 4, double r_min = 0.5) {
  ConvergenceStudy s;
  std::size_t nx = nx0, ny = ny0;
  for (int l = 0; l < levels; ++l) {
    const Grid g = build_grid(d, nx, ny);
    const Field u = Field::sample(g, [](double x, double y) { return 0.5 * (x * x + y * y); });
    const Field lap = p_laplacian(u, g, p);
    double e = 0.0;
    for (std::size_t j = 1; j + 1 < g.ny(); ++j)
      for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
        const double r = std::hypot(g.x(i), g.y(j));
        if (r < r_min) continue;
        e = std::max(e, std::abs(lap(i, j) - p * std::pow(r, p - 2.0)));
      }
    s.nx.push_back(nx);
    s.h.push_back(g.hx());
    s.error.push_back(e);
    nx = 2 * nx - 1;
    ny = 2 * ny - 1;
  }
  fill_orders(s);
  return s;
}

/// Discrete residual Δ_p f + |∇f|^q (central Hamiltonian) on the interior.
inline Field discrete_residual(const Field& u, const Grid& g, const PdeParams& params) {
  return rhs(u, g, params, OperatorOptions{HamiltonianScheme::Central, 0.0});
}

struct ScalingCheck {
  double eps = 0.0;
  double amplification = 0.0;  // eps^(-q/(q-p+1))
  double rescaled_error = 0.0;  // max |R_h[f_eps] - amp * R[f](pullback)|
  double budget = 0.0;          // amp * max |R_{h/eps}[f] - R[f]| on the pulled-back grid
  double order = 0.0;           // observed order of rescaled_error under one h-halving
};

/// Compares the discrete residual of f_eps(x, y) = eps^kappa f(x/eps, y/eps - 1)
/// on the rectangle with the amplified exact residual of f.
inline ScalingCheck scaling_equivariance(const TestFunction& t, const PdeParams& params, const DomainSpec& d, double eps,
                                         std::size_t nx = 61, std::size_t ny = 101) {
  const ScalingExponents e = params.exponents();
  const double amp = residual_amplification(eps, e);
  auto level = [&](std::size_t mx, std::size_t my, double& budget) {
    const Grid g = build_grid(d, mx, my);
    const Field v = Field::sample(g, [&](double x, double y) { return std::pow(eps, e.kappa) * t.f(x / eps, y / eps - 1.0); });
    const Field rv = discrete_residual(v, g, params);
    const Grid gp(d.half_width / eps, d.height / eps, mx, my);
    const Field w = Field::sample(gp, [&](double x, double y) { return t.f(x, y - 1.0); });
    const Field rw = discrete_residual(w, gp, params);
    double err = 0.0;
    budget = 0.0;
    for (std::size_t j = 1; j + 1 < g.ny(); ++j)
      for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
        const double X = gp.x(i), Y = gp.y(j) - 1.0;
        const double exact = exact_residual(t, params.p(), params.q(), X, Y);
        err = std::max(err, std::abs(rv(i, j) - amp * exact));
        budget = std::max(budget, amp * std::abs(rw(i, j) - exact));
      }
    return err;
  };
  ScalingCheck c;
  c.eps = eps;
  c.amplification = amp;
  double b_fine = 0.0;
  c.rescaled_error = level(nx, ny, c.budget);
  const double fine = level(2 * nx - 1, 2 * ny - 1, b_fine);
  c.order = std::log(c.rescaled_error / fine) / std::log(2.0);
  return c;
}

/// Largest relative mismatch between the closed-form jet of the nondegeneracy
/// barrier and central differences, at points with y >= y_min. Each error is
/// taken relative to the largest derivative of the same order at that point.
inline double nondeg_jet_fd_mismatch(const NondegBarrierParams& bp, std::size_t samples = 200, double y_min = 0.05,
                                     std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, 1.0), ut(0.05, 1.0);
  double worst = 0.0;
  auto rel = [](double a, double b, double scale) { return std::abs(a - b) / scale; };
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = bp.x0 + 0.9 * bp.r * ux(rng);
    const double y = y_min + (bp.d - y_min) * uy(rng);
    const double t = bp.t0 + (bp.t_end - bp.t0) * ut(rng);
    const NondegJet J = nondeg_jet(bp, x, y, t);
    auto v = [&](double a, double b, double c) { return nondeg_jet(bp, a, b, c).v; };
    // Fourth-order central stencils along unit direction (dx, dy, dt), with a
    // step shrinking towards the singular edge y = 0.
    const double h = std::min(1e-3, 0.01 * y);
    auto d1 = [&](double px, double py, double pt, double dx, double dy, double dt) {
      auto f = [&](double s) { return v(px + s * dx, py + s * dy, pt + s * dt); };
      return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
    };
    auto d2 = [&](double dx, double dy) {
      auto f = [&](double s) { return v(x + s * dx, y + s * dy, t); };
      return (-f(2 * h) + 16 * f(h) - 30 * J.v + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
    };
    const double vt = d1(x, y, t, 0, 0, 1);
    const double vx = d1(x, y, t, 1, 0, 0);
    const double vy = d1(x, y, t, 0, 1, 0);
    const double vxx = d2(1, 0);
    const double vyy = d2(0, 1);
    auto vx_at = [&](double s) { return d1(x, y + s, t, 1, 0, 0); };
    const double vxy = (-vx_at(2 * h) + 8 * vx_at(h) - 8 * vx_at(-h) + vx_at(-2 * h)) / (12 * h);
    const double s1 = std::max({std::abs(J.vt), std::abs(J.vx), std::abs(J.vy)});
    const double s2 = std::max({std::abs(J.vxx), std::abs(J.vyy), std::abs(J.vxy)});
    worst = std::max({worst, rel(J.vt, vt, s1), rel(J.vx, vx, s1), rel(J.vy, vy, s1), rel(J.vxx, vxx, s2),
                      rel(J.vyy, vyy, s2), rel(J.vxy, vxy, s2)});
  }
  return worst;
}

}  // namespace gbu
