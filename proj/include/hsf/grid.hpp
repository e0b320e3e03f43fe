#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hsf/errors.hpp"

namespace hsf {

/// Uniform periodic grid on a flat torus T^n with an active-axis mask.
/// Inactive axes carry a single point and fields are constant along them;
/// their "spacing" is the full axis length so cell_volume() integrates
/// correctly over the whole torus.
struct GridSpec {
  int dim = 0;
  std::array<int, 8> sizes{};
  std::array<double, 8> h{};
  std::array<bool, 8> active{};

  static GridSpec torus(int dim, const std::vector<int>& sizes_in,
                        const std::vector<double>& lengths_in) {
    if (dim < 1 || dim > 8 || static_cast<int>(sizes_in.size()) != dim ||
        static_cast<int>(lengths_in.size()) != dim)
      throw ConfigError("GridSpec: bad dimension/sizes/lengths");
    GridSpec g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
      if (sizes_in[a] < 1 || lengths_in[a] <= 0.0) throw ConfigError("GridSpec: bad axis");
      g.sizes[a] = sizes_in[a];
      g.active[a] = sizes_in[a] > 1;
      g.h[a] = lengths_in[a] / sizes_in[a];
    }
    return g;
  }

  long points() const {
    long p = 1;
    for (int a = 0; a < dim; ++a) p *= sizes[a];
    return p;
  }

  double length(int a) const { return h[a] * sizes[a]; }

  /// Volume of one grid cell (product over all axes; inactive axes
  /// contribute their full length).
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= h[a];
    return v;
  }

  double volume() const { return cell_volume() * points(); }

  int n_active() const {
    int c = 0;
    for (int a = 0; a < dim; ++a) c += active[a] ? 1 : 0;
    return c;
  }

  /// Row-major strides, axis dim-1 fastest.
  std::array<long, 8> strides() const {
    std::array<long, 8> s{};
    long acc = 1;
    for (int a = dim - 1; a >= 0; --a) {
      s[a] = acc;
      acc *= sizes[a];
    }
    return s;
  }

  bool same_shape(const GridSpec& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
      if (sizes[a] != o.sizes[a] || h[a] != o.h[a]) return false;
    return true;
  }
};

/// Dense field of `ncomp` doubles per grid point, components fastest.
struct Field {
  GridSpec grid;
  int ncomp = 0;
  std::vector<double> v;

  Field() = default;
  Field(const GridSpec& g, int nc) : grid(g), ncomp(nc), v(g.points() * nc, 0.0) {}

  double* at(long p) { return v.data() + p * ncomp; }
  const double* at(long p) const { return v.data() + p * ncomp; }

  void fill(const double* point_value) {
    const long n = grid.points();
    for (long p = 0; p < n; ++p)
      for (int c = 0; c < ncomp; ++c) v[p * ncomp + c] = point_value[c];
  }

  void axpy(double a, const Field& x) {
    for (size_t i = 0; i < v.size(); ++i) v[i] += a * x.v[i];
  }
  void scale(double a) {
    for (double& x : v) x *= a;
  }
  bool finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

/// Incremental multi-index walker over the grid, with periodic neighbor
/// lookup along any axis. Iteration order matches the flat storage order.
class GridWalker {
 public:
  explicit GridWalker(const GridSpec& g) : g_(g), strides_(g.strides()) { coords_.fill(0); }

  long point() const { return p_; }
  const int* coords() const { return coords_.data(); }

  bool next() {
    for (int a = g_.dim - 1; a >= 0; --a) {
      if (++coords_[a] < g_.sizes[a]) {
        ++p_;
        return true;
      }
      coords_[a] = 0;
    }
    ++p_;
    return false;  // wrapped around: done
  }

  bool done() const { return p_ >= g_.points(); }

  /// Flat index of the point shifted by `step` along `axis` (periodic).
  long neighbor(int axis, int step) const {
    int c = coords_[axis] + step;
    const int sz = g_.sizes[axis];
    while (c < 0) c += sz;
    while (c >= sz) c -= sz;
    return p_ + static_cast<long>(c - coords_[axis]) * strides_[axis];
  }

 private:
  const GridSpec& g_;
  std::array<long, 8> strides_;
  std::array<int, 8> coords_{};
  long p_ = 0;
};

/// Second-order central difference along `axis` with periodic wrap.
/// Inactive axis: returns the zero field (fields are constant there).
inline Field partial(const Field& f, int axis) {
  Field out(f.grid, f.ncomp);
  if (!f.grid.active[axis]) return out;
  const double inv2h = 1.0 / (2.0 * f.grid.h[axis]);
  GridWalker w(f.grid);
  const int nc = f.ncomp;
  do {
    const double* up = f.at(w.neighbor(axis, +1));
    const double* dn = f.at(w.neighbor(axis, -1));
    double* o = out.at(w.point());
    for (int c = 0; c < nc; ++c) o[c] = (up[c] - dn[c]) * inv2h;
  } while (w.next());
  return out;
}

/// Laplacian as the composition of central differences, sum_a D_a D_a
/// (wide 5-point stencil per axis). This keeps the discrete
/// summation-by-parts identity exact, which is what makes the flows exact
/// gradient flows of the discrete energies.
inline Field laplacian(const Field& f) {
  Field out(f.grid, f.ncomp);
  const int nc = f.ncomp;
  GridWalker w(f.grid);
  do {
    double* o = out.at(w.point());
    const double* mid = f.at(w.point());
    for (int a = 0; a < f.grid.dim; ++a) {
      if (!f.grid.active[a]) continue;
      const double inv4h2 = 1.0 / (4.0 * f.grid.h[a] * f.grid.h[a]);
      const double* up = f.at(w.neighbor(a, +2));
      const double* dn = f.at(w.neighbor(a, -2));
      for (int c = 0; c < nc; ++c) o[c] += (up[c] - 2.0 * mid[c] + dn[c]) * inv4h2;
    }
  } while (w.next());
  return out;
}

/// Divergence of a VectorField (ncomp == dim): sum_a D_a v_a.
inline Field divergence(const Field& vec) {
  if (vec.ncomp != vec.grid.dim) throw DimensionMismatch("divergence: ncomp != dim");
  Field out(vec.grid, 1);
  GridWalker w(vec.grid);
  do {
    double acc = 0.0;
    for (int a = 0; a < vec.grid.dim; ++a) {
      if (!vec.grid.active[a]) continue;
      const double inv2h = 1.0 / (2.0 * vec.grid.h[a]);
      acc += (vec.at(w.neighbor(a, +1))[a] - vec.at(w.neighbor(a, -1))[a]) * inv2h;
    }
    *out.at(w.point()) = acc;
  } while (w.next());
  return out;
}

/// Midpoint quadrature of a scalar field over the torus.
inline double integrate(const Field& f) {
  if (f.ncomp != 1) throw DimensionMismatch("integrate: scalar field expected");
  double s = 0.0;
  for (double x : f.v) s += x;
  return s * f.grid.cell_volume();
}

inline double max_scalar(const Field& f) {
  double m = -1e300;
  for (double x : f.v) m = std::max(m, x);
  return m;
}

}  // namespace hsf
