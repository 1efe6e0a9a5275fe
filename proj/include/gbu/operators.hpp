#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gbu/grid.hpp"
#include "gbu/params.hpp"

namespace gbu {

/// s^e for s >= 0. Exponents that are multiples of 1/2 (the common case
/// p, q integer) avoid std::pow, which dominates the stencil cost otherwise.
class SquarePower {
 public:
  explicit SquarePower(double e) : e_(e) {
    const double twice = 2.0 * e;
    if (twice >= 0.0 && twice <= 64.0 && twice == std::floor(twice)) {
      const int n = static_cast<int>(twice);
      whole_ = n / 2;
      half_ = (n % 2) != 0;
      fast_ = true;
    }
  }

  double operator()(double s) const noexcept {
    if (!fast_) return std::pow(s, e_);
    double r = half_ ? std::sqrt(s) : 1.0;
    double base = s;
    int k = whole_;
    while (k > 0) {
      if (k & 1) r *= base;
      base *= base;
      k >>= 1;
    }
    return r;
  }

  double exponent() const noexcept { return e_; }

 private:
  double e_;
  bool fast_ = false;
  int whole_ = 0;
  bool half_ = false;
};

enum class HamiltonianScheme { Central, Upwind };

inline std::string to_string(HamiltonianScheme s) {
  return s == HamiltonianScheme::Central ? "central" : "upwind";
}

struct OperatorOptions {
  HamiltonianScheme scheme = HamiltonianScheme::Central;
  /// Face-gradient regularisation: |∇u|^(p-2) -> (|∇u|^2 + eta_reg)^((p-2)/2).
  double eta_reg = 0.0;
};

/// Two components per node, sized like the owning grid.
struct VectorField {
  Field x;
  Field y;
};

/// Central differences in the interior, second-order one-sided differences on
/// boundary rows/columns. Writes into `out`, resizing it if needed.
inline void gradient_into(const Field& u, const Grid& g, VectorField& out) {
  const std::size_t nx = g.nx(), ny = g.ny();
  if (!out.x.matches(g)) out.x = Field(g);
  if (!out.y.matches(g)) out.y = Field(g);
  out.x.time = out.y.time = u.time;
  const double ihx = 1.0 / (2.0 * g.hx()), ihy = 1.0 / (2.0 * g.hy());
  const double* v = u.values.data();
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = v + j * nx;
    double* gx = out.x.values.data() + j * nx;
    double* gy = out.y.values.data() + j * nx;
    gx[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) * ihx;
    for (std::size_t i = 1; i + 1 < nx; ++i) gx[i] = (row[i + 1] - row[i - 1]) * ihx;
    gx[nx - 1] = (3.0 * row[nx - 1] - 4.0 * row[nx - 2] + row[nx - 3]) * ihx;
    if (j == 0) {
      for (std::size_t i = 0; i < nx; ++i) gy[i] = (-3.0 * row[i] + 4.0 * row[i + nx] - row[i + 2 * nx]) * ihy;
    } else if (j == ny - 1) {
      for (std::size_t i = 0; i < nx; ++i) gy[i] = (3.0 * row[i] - 4.0 * row[i - nx] + row[i - 2 * nx]) * ihy;
    } else {
      for (std::size_t i = 0; i < nx; ++i) gy[i] = (row[i + nx] - row[i - nx]) * ihy;
    }
  }
}

inline VectorField gradient(const Field& u, const Grid& g) {
  require_match(u, g, "gradient");
  VectorField out;
  gradient_into(u, g, out);
  return out;
}

/// Face fluxes of the p-Laplacian.
///
/// fx(i, j) lives on the face between nodes (i, j) and (i+1, j), for
/// i in [0, nx-2], j in [1, ny-2]; fy(i, j) on the face between (i, j) and
/// (i, j+1), for i in [1, nx-2], j in [0, ny-2]. Unused entries are zero.
struct FaceFluxes {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> fx;  // (nx-1) * ny, index j*(nx-1)+i
  std::vector<double> fy;  // nx * (ny-1), index j*nx+i

  double x_face(std::size_t i, std::size_t j) const noexcept { return fx[j * (nx - 1) + i]; }
  double y_face(std::size_t i, std::size_t j) const noexcept { return fy[j * nx + i]; }
};

inline void compute_face_fluxes(const Field& u, const Grid& g, double p, double eta_reg,
                                FaceFluxes& f) {
  const std::size_t nx = g.nx(), ny = g.ny();
  const double hx = g.hx(), hy = g.hy();
  const double inv_hx = 1.0 / hx, inv_4hy = 1.0 / (4.0 * hy);
  const double inv_hy = 1.0 / hy, inv_4hx = 1.0 / (4.0 * hx);
  const SquarePower mobility(0.5 * (p - 2.0));
  f.nx = nx;
  f.ny = ny;
  if (f.fx.size() != (nx - 1) * ny) f.fx.assign((nx - 1) * ny, 0.0);
  if (f.fy.size() != nx * (ny - 1)) f.fy.assign(nx * (ny - 1), 0.0);
  const double* v = u.values.data();
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    const double* row = v + j * nx;
    const double* up = row + nx;
    const double* dn = row - nx;
    double* out = f.fx.data() + j * (nx - 1);
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double gx = (row[i + 1] - row[i]) * inv_hx;
      const double gy = ((up[i] - dn[i]) + (up[i + 1] - dn[i + 1])) * inv_4hy;
      out[i] = mobility(gx * gx + gy * gy + eta_reg) * gx;
    }
  }
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    const double* row = v + j * nx;
    const double* up = row + nx;
    double* out = f.fy.data() + j * nx;
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const double gy = (up[i] - row[i]) * inv_hy;
      const double gx = ((row[i + 1] - row[i - 1]) + (up[i + 1] - up[i - 1])) * inv_4hx;
      out[i] = mobility(gx * gx + gy * gy + eta_reg) * gy;
    }
  }
}

inline FaceFluxes p_laplacian_fluxes(const Field& u, const Grid& g, double p, double eta_reg = 0.0) {
  require_match(u, g, "p_laplacian_fluxes");
  FaceFluxes f;
  compute_face_fluxes(u, g, p, eta_reg, f);
  return f;
}

/// Net outward flux through the boundary faces, i.e. the value the interior
/// sum of Δ_p u * hx * hy telescopes to.
inline double boundary_flux_total(const FaceFluxes& f, const Grid& g) {
  const std::size_t nx = g.nx(), ny = g.ny();
  double total = 0.0;
  for (std::size_t j = 1; j + 1 < ny; ++j) total += g.hy() * (f.x_face(nx - 2, j) - f.x_face(0, j));
  for (std::size_t i = 1; i + 1 < nx; ++i) total += g.hx() * (f.y_face(i, ny - 2) - f.y_face(i, 0));
  return total;
}

/// Divergence of the face fluxes; zero on boundary nodes.
inline void divergence_into(const FaceFluxes& f, const Grid& g, Field& out) {
  const std::size_t nx = g.nx(), ny = g.ny();
  const double inv_hx = 1.0 / g.hx(), inv_hy = 1.0 / g.hy();
  std::fill(out.values.begin(), out.values.begin() + nx, 0.0);
  std::fill(out.values.end() - nx, out.values.end(), 0.0);
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    const double* fx = f.fx.data() + j * (nx - 1);
    const double* fy = f.fy.data() + j * nx;
    const double* fy_dn = fy - nx;
    double* o = out.values.data() + j * nx;
    o[0] = 0.0;
    o[nx - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      o[i] = (fx[i] - fx[i - 1]) * inv_hx + (fy[i] - fy_dn[i]) * inv_hy;
    }
  }
}

/// Conservative discretisation of ∇·(|∇u|^(p-2) ∇u) on interior nodes.
inline Field p_laplacian(const Field& u, const Grid& g, double p, double eta_reg = 0.0) {
  require_match(u, g, "p_laplacian");
  FaceFluxes f;
  compute_face_fluxes(u, g, p, eta_reg, f);
  Field out(g, 0.0, u.time);
  divergence_into(f, g, out);
  return out;
}

/// |∇u|^2 at interior node (i, j) under the chosen scheme.
inline double gradient_norm2(const Field& u, const Grid& g, std::size_t i, std::size_t j,
                             HamiltonianScheme scheme) {
  const double hx = g.hx(), hy = g.hy();
  const double c = u(i, j);
  if (scheme == HamiltonianScheme::Central) {
    const double gx = (u(i + 1, j) - u(i - 1, j)) / (2.0 * hx);
    const double gy = (u(i, j + 1) - u(i, j - 1)) / (2.0 * hy);
    return gx * gx + gy * gy;
  }
  // Godunov flux for the concave Hamiltonian -|p|^q: each direction takes the
  // larger of the inflowing one-sided slopes, and zero if both point outward.
  const double bx = std::max(std::max((u(i - 1, j) - c) / hx, (u(i + 1, j) - c) / hx), 0.0);
  const double by = std::max(std::max((u(i, j - 1) - c) / hy, (u(i, j + 1) - c) / hy), 0.0);
  return bx * bx + by * by;
}

namespace detail {

/// out(i, j) (+)= |∇u|^q over the interior, row by row.
template <HamiltonianScheme S, bool Accumulate>
void hamiltonian_kernel(const Field& u, const Grid& g, double q, Field& out) {
  const std::size_t nx = g.nx(), ny = g.ny();
  const SquarePower pw(0.5 * q);
  const double* v = u.values.data();
  if constexpr (S == HamiltonianScheme::Central) {
    const double ihx = 1.0 / (2.0 * g.hx()), ihy = 1.0 / (2.0 * g.hy());
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double* row = v + j * nx;
      double* o = out.values.data() + j * nx;
      for (std::size_t i = 1; i + 1 < nx; ++i) {
        const double gx = (row[i + 1] - row[i - 1]) * ihx;
        const double gy = (row[i + nx] - row[i - nx]) * ihy;
        const double h = pw(gx * gx + gy * gy);
        if constexpr (Accumulate) o[i] += h; else o[i] = h;
      }
    }
  } else {
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double* row = v + j * nx;
      double* o = out.values.data() + j * nx;
      for (std::size_t i = 1; i + 1 < nx; ++i) {
        const double c = row[i];
        const double bx = std::max(std::max(row[i - 1] - c, row[i + 1] - c), 0.0) * ihx;
        const double by = std::max(std::max(row[i - nx] - c, row[i + nx] - c), 0.0) * ihy;
        const double h = pw(bx * bx + by * by);
        if constexpr (Accumulate) o[i] += h; else o[i] = h;
      }
    }
  }
}

template <bool Accumulate>
void hamiltonian_dispatch(const Field& u, const Grid& g, double q, HamiltonianScheme s, Field& out) {
  if (s == HamiltonianScheme::Central) {
    hamiltonian_kernel<HamiltonianScheme::Central, Accumulate>(u, g, q, out);
  } else {
    hamiltonian_kernel<HamiltonianScheme::Upwind, Accumulate>(u, g, q, out);
  }
}

}  // namespace detail

/// |∇u|^q on interior nodes, zero on the boundary.
inline Field hamiltonian(const Field& u, const Grid& g, double q,
                         HamiltonianScheme scheme = HamiltonianScheme::Central) {
  require_match(u, g, "hamiltonian");
  Field out(g, 0.0, u.time);
  detail::hamiltonian_dispatch<false>(u, g, q, scheme, out);
  return out;
}

/// Reusable buffers for the time loop.
struct RhsWorkspace {
  FaceFluxes fluxes;
};

/// Δ_p u + |∇u|^q on interior nodes; boundary nodes are held (zero rate).
inline void rhs_into(const Field& u, const Grid& g, const PdeParams& params, const OperatorOptions& opt,
                     Field& out, RhsWorkspace& ws) {
  compute_face_fluxes(u, g, params.p(), opt.eta_reg, ws.fluxes);
  if (!out.matches(g)) out = Field(g);
  out.time = u.time;
  divergence_into(ws.fluxes, g, out);
  detail::hamiltonian_dispatch<true>(u, g, params.q(), opt.scheme, out);
}

inline Field rhs(const Field& u, const Grid& g, const PdeParams& params, const OperatorOptions& opt = {}) {
  require_match(u, g, "rhs");
  Field out(g, 0.0, u.time);
  RhsWorkspace ws;
  rhs_into(u, g, params, opt, out, ws);
  return out;
}

}  // namespace gbu
