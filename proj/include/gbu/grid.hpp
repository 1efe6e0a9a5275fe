#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "gbu/error.hpp"

namespace gbu {

/// Axis-aligned computational domain (-a, a) x (0, b) plus the geometric
/// parameters the analysis refers to.
///
/// Required ordering: 0 < L1 < a, 0 < 2 L2 < b, 0 < rho < x1 < L1, 0 < y1 < L2.
struct DomainSpec {
  double half_width = 1.5;  // a
  double height = 2.5;      // b
  double L1 = 1.0;
  double L2 = 1.0;
  double rho = 0.5;
  double x1 = 0.75;
  double y1 = 0.5;

  bool operator==(const DomainSpec&) const = default;
};

/// Throws GeometryError naming the first violated inequality.
inline void validate_domain(const DomainSpec& d) {
  auto fail = [](const std::string& what) { throw GeometryError("domain: " + what); };
  if (!(d.half_width > 0.0) || !(d.height > 0.0)) fail("extents must be positive");
  if (!(d.L1 > 0.0 && d.L1 < d.half_width)) fail("need 0 < L1 < a");
  if (!(d.L2 > 0.0 && 2.0 * d.L2 < d.height)) fail("need 0 < 2 L2 < b");
  if (!(d.rho > 0.0 && d.rho < d.x1)) fail("need 0 < rho < x1");
  if (!(d.x1 < d.L1)) fail("need x1 < L1");
  if (!(d.y1 > 0.0 && d.y1 < d.L2)) fail("need 0 < y1 < L2");
}

enum class NodeKind : std::uint8_t { Interior, Bottom, Top, Left, Right };

/// Uniform node-centred grid on [-a, a] x [0, b]. Node (i, j) sits at
/// (x[i], y[j]); storage is row-major by y then x.
class Grid {
 public:
  Grid(double a, double b, std::size_t nx, std::size_t ny) : a_(a), b_(b), nx_(nx), ny_(ny) {
    if (nx < 5 || ny < 5) throw GeometryError("grid: need nx >= 5 and ny >= 5");
    if (nx % 2 == 0) throw GeometryError("grid: nx must be odd so that x = 0 is a column");
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw GeometryError("grid: degenerate extents");
    }
    hx_ = 2.0 * a / static_cast<double>(nx - 1);
    hy_ = b / static_cast<double>(ny - 1);
    x_.resize(nx);
    y_.resize(ny);
    const std::size_t c = center_column();
    // Mirror-exact abscissae: x[c+k] = -x[c-k] bitwise.
    for (std::size_t k = 0; k <= c; ++k) {
      const double v = static_cast<double>(k) * hx_;
      x_[c + k] = v;
      x_[c - k] = -v;
    }
    x_[0] = -a;
    x_[nx - 1] = a;
    for (std::size_t j = 0; j < ny; ++j) y_[j] = static_cast<double>(j) * hy_;
    y_[ny - 1] = b;
  }

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double half_width() const noexcept { return a_; }
  double height() const noexcept { return b_; }
  double x(std::size_t i) const noexcept { return x_[i]; }
  double y(std::size_t j) const noexcept { return y_[j]; }
  std::size_t center_column() const noexcept { return (nx_ - 1) / 2; }
  std::size_t mirror(std::size_t i) const noexcept { return nx_ - 1 - i; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }

  NodeKind kind(std::size_t i, std::size_t j) const noexcept {
    if (j == 0) return NodeKind::Bottom;
    if (j == ny_ - 1) return NodeKind::Top;
    if (i == 0) return NodeKind::Left;
    if (i == nx_ - 1) return NodeKind::Right;
    return NodeKind::Interior;
  }
  bool is_boundary(std::size_t i, std::size_t j) const noexcept {
    return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
  }

 private:
  double a_;
  double b_;
  std::size_t nx_;
  std::size_t ny_;
  double hx_ = 0.0;
  double hy_ = 0.0;
  std::vector<double> x_;
  std::vector<double> y_;
};

inline Grid build_grid(const DomainSpec& spec, std::size_t nx, std::size_t ny) {
  return Grid(spec.half_width, spec.height, nx, ny);
}

/// Scalar sample of a quantity at every node of a grid, at one time.
struct Field {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;
  double time = 0.0;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0, double t = 0.0)
      : nx(g.nx()), ny(g.ny()), values(g.size(), fill), time(t) {}

  double& operator()(std::size_t i, std::size_t j) noexcept { return values[j * nx + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values[j * nx + i]; }
  bool matches(const Grid& g) const noexcept { return nx == g.nx() && ny == g.ny(); }

  template <class F>
  static Field sample(const Grid& g, F&& f, double t = 0.0) {
    Field out(g, 0.0, t);
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
  }
};

inline void require_match(const Field& f, const Grid& g, const char* what) {
  if (!f.matches(g)) throw GeometryError(std::string(what) + ": field does not match grid");
}

/// Distance to the rectangle boundary, min(a - |x|, y, b - y).
inline Field boundary_distance(const Grid& g) {
  Field d(g);
  const double a = g.half_width();
  const double b = g.height();
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) {
        d(i, j) = 0.0;
        continue;
      }
      d(i, j) = std::min({a - std::abs(g.x(i)), g.y(j), b - g.y(j)});
    }
  }
  return d;
}

/// Mirror a field about x = 0.
inline Field mirror_x(const Field& f) {
  Field out = f;
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) out(i, j) = f(f.nx - 1 - i, j);
  return out;
}

/// Write "x,y,value" rows (row-major by y then x). `header` lines are emitted
/// as '#' comments before the column line.
inline void write_snapshot_csv(const std::string& path, const Grid& g, const Field& f,
                               const std::vector<std::string>& header = {}) {
  require_match(f, g, "write_snapshot_csv");
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (const auto& h : header) out << "# " << h << '\n';
  out << "x,y,value\n";
  out << std::setprecision(17);
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) out << g.x(i) << ',' << g.y(j) << ',' << f(i, j) << '\n';
  if (!out) throw Error("write failed: " + path);
}

}  // namespace gbu
