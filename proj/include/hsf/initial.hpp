#pragma once

#include <string>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "hsf/flows.hpp"
#include "hsf/rng.hpp"

namespace hsf {

/// Named initial-condition generators. `component` indexes the Lie-algebra
/// generator moved along (pair basis of so(d); the e_i .| phi0 basis of
/// L2_7 for G2); `wave` is the integer wavevector of the single-mode
/// perturbation; `cutoff` band-limits the seeded random field.
struct InitialCondition {
  std::string generator = "constant";  // constant | mode | random | hopf | constant_t
  double amplitude = 0.1;
  uint64_t seed = 1;
  int component = 0;
  std::vector<int> wave;
  int cutoff = 2;
  double lambda = 0.0;  // constant-T synthetic parameter (tests/selftest)
};

namespace detail {

inline std::vector<Matrix> so_pair_basis(int d) {
  std::vector<Matrix> out;
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) {
      Matrix g = Matrix::Zero(d, d);
      g(p, q) = 1.0;
      g(q, p) = -1.0;
      out.push_back(g);
    }
  return out;
}

inline std::vector<Matrix> lambda2_7_basis() {
  std::vector<Matrix> out;
  const auto& c = G2Constants::get();
  for (int i = 0; i < 7; ++i) {
    Vector e = Vector::Zero(7);
    e[i] = 1.0;
    out.push_back(SkewMatrix::from_two_form(interior(e, c.phi0())).matrix());
  }
  return out;
}

/// Single Fourier mode sin(2 pi k.x / L) over the active axes.
inline Field mode_scalar(const GridSpec& g, const std::vector<int>& wave, double amp) {
  Field s(g, 1);
  std::vector<int> k(wave);
  if (k.empty()) {
    k.assign(g.dim, 0);
    for (int a = 0; a < g.dim; ++a)
      if (g.active[a]) {
        k[a] = 1;
        break;
      }
  }
  if (static_cast<int>(k.size()) != g.dim) throw ConfigError("mode: wave length != grid dim");
  GridWalker w(g);
  do {
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a)
      phase += 2.0 * M_PI * k[a] * w.coords()[a] / std::max(1, g.sizes[a]);
    s.v[w.point()] = amp * std::sin(phase);
  } while (w.next());
  return s;
}

/// Seeded band-limited noise, rescaled to sup-norm `amp`.
inline Field random_scalar(const GridSpec& g, int cutoff, double amp, SplitMix64& rng) {
  Field s(g, 1);
  std::vector<int> axes;
  for (int a = 0; a < g.dim; ++a)
    if (g.active[a]) axes.push_back(a);
  const int na = static_cast<int>(axes.size());
  std::vector<int> k(na, -cutoff);
  std::vector<std::pair<std::vector<int>, std::pair<double, double>>> modes;
  for (;;) {
    int first_nonzero = 0;
    bool zero = true;
    for (int i = 0; i < na; ++i)
      if (k[i] != 0) {
        first_nonzero = k[i];
        zero = false;
        break;
      }
    if (!zero && first_nonzero > 0) modes.push_back({k, {rng.next_sym(), rng.next_sym()}});
    int i = na - 1;
    for (; i >= 0; --i) {
      if (++k[i] <= cutoff) break;
      k[i] = -cutoff;
    }
    if (i < 0) break;
  }
  GridWalker w(g);
  do {
    double acc = 0.0;
    for (const auto& m : modes) {
      double phase = 0.0;
      for (int i = 0; i < na; ++i)
        phase += 2.0 * M_PI * m.first[i] * w.coords()[axes[i]] / g.sizes[axes[i]];
      acc += m.second.first * std::cos(phase) + m.second.second * std::sin(phase);
    }
    s.v[w.point()] = acc;
  } while (w.next());
  const double m = s.max_abs();
  if (m > 0.0) s.scale(amp / m);
  return s;
}

/// Pointwise rotation field R(x) = exp(sum_m s_m(x) beta_m).
inline Field rotation_field(const GridSpec& g, const std::vector<Matrix>& gens,
                            const std::vector<Field>& scalars) {
  const int d = static_cast<int>(gens[0].rows());
  Field R(g, d * d);
  const long n = g.points();
  for (long p = 0; p < n; ++p) {
    Matrix B = Matrix::Zero(d, d);
    for (size_t m = 0; m < gens.size(); ++m) B += scalars[m].v[p] * gens[m];
    Eigen::Map<Matrix>(R.at(p), d, d) = B.exp();
  }
  return R;
}

}  // namespace detail

/// Synthetic constant torsion field T = lambda * id (the nearly-G2 torsion
/// shape); feeds the div T = 0 fixed-point checks directly.
inline Field synthetic_constant_torsion(const GridSpec& g, double lambda) {
  Field T(g, 49);
  const long n = g.points();
  for (long p = 0; p < n; ++p) {
    double* t = T.at(p);
    for (int i = 0; i < 7; ++i)
      for (int a = 0; a < 7; ++a) t[i * 7 + a] = (i == a) ? lambda : 0.0;
  }
  return T;
}

inline FlowState make_initial(Kind kind, bool s3, const GridSpec& grid, const InitialCondition& ic) {
  FlowState s;
  s.kind = kind;
  s.s3 = s3;
  s.grid = grid;
  s.t = 0.0;
  const int d = (kind == Kind::Parallelism) ? 3
                : (kind == Kind::ACS)       ? (grid.dim % 2 == 0 ? grid.dim : 4)
                : (kind == Kind::ACtS)      ? (grid.dim % 2 == 1 ? grid.dim : 5)
                                            : 7;
  s.d = d;
  if (kind == Kind::ACS && grid.dim % 2 != 0) throw ConfigError("acs: grid dimension must be even");
  if (kind == Kind::ACtS && grid.dim % 2 != 1) throw ConfigError("acts: grid dimension must be odd");
  if (kind == Kind::G2 && grid.dim != 7) throw ConfigError("g2: grid dimension must be 7");
  if (kind == Kind::Parallelism && !s3 && grid.dim != 3)
    throw ConfigError("parallelism: grid dimension must be 3");

  // model structures
  Matrix J0;
  Vector xi0;
  if (kind == Kind::ACS || kind == Kind::ACtS) {
    const int m = d / 2;
    J0 = Matrix::Zero(d, d);
    for (int i = 0; i < m; ++i) {
      J0(i, m + i) = -1.0;
      J0(m + i, i) = 1.0;
    }
    if (kind == Kind::ACtS) {
      xi0 = Vector::Zero(d);
      xi0[d - 1] = 1.0;
    }
  }

  SplitMix64 rng(ic.seed);

  // rotation field R(x) moving the model structure along its orbit
  auto build_rotation = [&](const std::vector<Matrix>& gens) -> Field {
    std::vector<Field> scalars;
    if (ic.generator == "mode") {
      std::vector<Matrix> one{gens[ic.component % gens.size()]};
      scalars.push_back(detail::mode_scalar(grid, ic.wave, ic.amplitude));
      return detail::rotation_field(grid, one, scalars);
    }
    if (ic.generator == "random") {
      for (size_t m = 0; m < gens.size(); ++m) {
        SplitMix64 sub = rng.fork();
        scalars.push_back(detail::random_scalar(grid, ic.cutoff, ic.amplitude, sub));
      }
      return detail::rotation_field(grid, gens, scalars);
    }
    throw ConfigError("unknown generator '" + ic.generator + "' for this kind");
  };

  switch (kind) {
    case Kind::Parallelism: {
      s.f.emplace_back(grid, 9);
      if (s3) {
        Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
        if (ic.generator == "random") {
          Matrix B = Matrix::Zero(3, 3);
          for (const auto& g2 : detail::so_pair_basis(3)) B += ic.amplitude * rng.next_sym() * g2;
          A = B.exp();
        } else if (ic.generator != "hopf" && ic.generator != "constant") {
          throw ConfigError("s3 parallelism supports generators hopf|constant|random");
        }
        Eigen::Map<Eigen::Matrix3d>(s.f[0].at(0)) = A;
        break;
      }
      if (ic.generator == "constant" || ic.generator == "hopf") {
        Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
        s.f[0].fill(I.data());
        break;
      }
      Field R = build_rotation(detail::so_pair_basis(3));
      const long n = grid.points();
      for (long p = 0; p < n; ++p)
        Eigen::Map<Eigen::Matrix3d>(s.f[0].at(p)) = Eigen::Map<const Eigen::Matrix3d>(R.at(p));
      break;
    }
    case Kind::ACS: {
      s.f.emplace_back(grid, d * d);
      if (ic.generator == "constant") {
        s.f[0].fill(J0.data());
        break;
      }
      Field R = build_rotation(detail::so_pair_basis(d));
      const long n = grid.points();
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Matrix> Rm(R.at(p), d, d);
        Eigen::Map<Matrix>(s.f[0].at(p), d, d) = Rm * J0 * Rm.transpose();
      }
      break;
    }
    case Kind::ACtS: {
      s.f.emplace_back(grid, d);
      s.f.emplace_back(grid, d * d);
      if (ic.generator == "constant") {
        s.f[0].fill(xi0.data());
        s.f[1].fill(J0.data());
        break;
      }
      Field R = build_rotation(detail::so_pair_basis(d));
      const long n = grid.points();
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Matrix> Rm(R.at(p), d, d);
        Eigen::Map<Vector>(s.f[0].at(p), d) = Rm * xi0;
        Eigen::Map<Matrix>(s.f[1].at(p), d, d) = Rm * J0 * Rm.transpose();
      }
      break;
    }
    case Kind::G2: {
      s.f.emplace_back(grid, 35);
      const auto& c = G2Constants::get();
      if (ic.generator == "constant" || ic.generator == "constant_t") {
        // constant_t with lambda != 0 has no exact phi-realization on a flat
        // torus; the torsion-level synthetic field is what the fixed-point
        // checks consume. As a flow initial condition it degenerates to phi0.
        if (ic.generator == "constant_t" && ic.lambda != 0.0)
          throw ConfigError("constant_t: only lambda = 0 is flowable; use the torsion-level helper");
        s.f[0].fill(c.phi0().data());
        break;
      }
      Field R = build_rotation(detail::lambda2_7_basis());
      const long n = grid.points();
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Matrix> Rm(R.at(p), 7, 7);
        const AltForm phi = group_action(Rm, c.phi0());
        for (int r = 0; r < 35; ++r) s.f[0].at(p)[r] = phi[r];
      }
      break;
    }
  }
  return s;
}

}  // namespace hsf
