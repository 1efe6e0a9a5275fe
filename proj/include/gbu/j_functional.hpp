#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "gbu/grid.hpp"
#include "gbu/operators.hpp"
#include "gbu/params.hpp"

namespace gbu {

/// Parameters of J = u_x + k x y^(-gamma) u^alpha on D = (0, x1) x (0, y1).
struct JParams {
  double k = 1.0;
  double alpha = 1.5;
  double sigma = 0.08;
  double gamma = (1.0 - 2.0 * 0.08) * (1.5 - 1.0);
  double x1 = 0.75;
  double y1 = 0.5;

  /// gamma is always derived from (alpha, sigma).
  static JParams make(double k, double alpha, double sigma, double x1, double y1) {
    JParams j;
    j.k = k;
    j.alpha = alpha;
    j.sigma = sigma;
    j.gamma = (1.0 - 2.0 * sigma) * (alpha - 1.0);
    j.x1 = x1;
    j.y1 = y1;
    return j;
  }

  JParams with_k(double kk) const {
    JParams j = *this;
    j.k = kk;
    return j;
  }

  bool operator==(const JParams&) const = default;
};

/// Throws if 1 < alpha < 1 + q - p, 0 < sigma < 1/(2(q-p+1)), gamma = (1-2 sigma)(alpha-1), k > 0 fail.
inline void validate_jparams(const JParams& jp, const PdeParams& params) {
  const double p = params.p(), q = params.q();
  if (!(jp.alpha > 1.0 && jp.alpha < 1.0 + q - p)) throw Error("JParams: need 1 < alpha < 1 + q - p");
  if (!(jp.sigma > 0.0 && jp.sigma < params.exponents().sigma_max)) {
    throw Error("JParams: need 0 < sigma < 1/(2(q-p+1))");
  }
  if (jp.gamma != (1.0 - 2.0 * jp.sigma) * (jp.alpha - 1.0)) {
    throw Error("JParams: gamma must equal (1 - 2 sigma)(alpha - 1)");
  }
  if (!(jp.k > 0.0)) throw Error("JParams: k must be positive");
  if (!(jp.x1 > 0.0 && jp.y1 > 0.0)) throw Error("JParams: region extents must be positive");
}

/// Index window of the closed region [0, x1] x [0, y1] on a grid.
struct JWindow {
  std::size_t i0 = 0, i1 = 0;  // inclusive column range, i0 = centre column
  std::size_t j0 = 0, j1 = 0;  // inclusive row range, j0 = 0

  static JWindow of(const Grid& g, double x1, double y1) {
    JWindow w;
    w.i0 = g.center_column();
    w.i1 = w.i0;
    while (w.i1 + 1 < g.nx() && g.x(w.i1 + 1) <= x1 * (1.0 + 1e-12)) ++w.i1;
    w.j0 = 0;
    w.j1 = 0;
    while (w.j1 + 1 < g.ny() && g.y(w.j1 + 1) <= y1 * (1.0 + 1e-12)) ++w.j1;
    return w;
  }
};

/// The weight term k x y^(-gamma) u^alpha, extended by 0 on y = 0.
inline double j_weight(double k, double alpha, double gamma, double x, double y, double u) {
  if (y <= 0.0 || x <= 0.0) return 0.0;
  return k * x * std::pow(y, -gamma) * std::pow(std::max(u, 0.0), alpha);
}

/// Maximum of J over the nodes of the closed region, and its location.
struct JMax {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  std::size_t j = 0;
};

inline JMax max_J(const Field& u, const VectorField& grad, const Grid& g, const JParams& jp) {
  const JWindow w = JWindow::of(g, jp.x1, jp.y1);
  JMax best;
  for (std::size_t j = w.j0; j <= w.j1; ++j) {
    for (std::size_t i = w.i0; i <= w.i1; ++i) {
      const double J = grad.x(i, j) + j_weight(jp.k, jp.alpha, jp.gamma, g.x(i), g.y(j), u(i, j));
      if (J > best.value) best = {J, i, j};
    }
  }
  return best;
}

}  // namespace gbu
