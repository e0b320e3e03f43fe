#pragma once

#include <Eigen/Dense>

#include "hsf/g2.hpp"
#include "hsf/grid.hpp"

namespace hsf {

/// Pointwise Hodge dual psi = *phi of a 35-component 3-form field.
inline Field hodge_field(const Field& phi) {
  Field psi(phi.grid, 35);
  const long n = phi.grid.points();
  for (long p = 0; p < n; ++p) star3_raw(phi.at(p), psi.at(p));
  return psi;
}

/// Full torsion of a G2-field on the flat torus: the 7x7 endomorphism per
/// point with D_i phi = T(e_i) .| psi, recovered row by row via
/// T(e_i) = -(1/24) (D_i phi) .| psi (full contraction). Stored ncomp = 49,
/// layout T[i*7 + a] with i the base direction.
inline Field full_torsion(const Field& phi, const Field& psi) {
  Field T(phi.grid, 49);
  const GridSpec& g = phi.grid;
  GridWalker w(g);
  double dphi[35];
  do {
    const long p = w.point();
    double* t = T.at(p);
    for (int i = 0; i < 7; ++i) {
      if (!g.active[i]) {
        for (int a = 0; a < 7; ++a) t[i * 7 + a] = 0.0;
        continue;
      }
      const double inv2h = 1.0 / (2.0 * g.h[i]);
      const double* up = phi.at(w.neighbor(i, +1));
      const double* dn = phi.at(w.neighbor(i, -1));
      for (int r = 0; r < 35; ++r) dphi[r] = (up[r] - dn[r]) * inv2h;
      torsion_row_raw(dphi, psi.at(p), t + i * 7);
    }
  } while (w.next());
  return T;
}

/// (div T)_a = sum_i D_i T_{ia}.
inline Field torsion_divergence(const Field& T) {
  Field div(T.grid, 7);
  const GridSpec& g = T.grid;
  GridWalker w(g);
  do {
    double* d = div.at(w.point());
    for (int a = 0; a < 7; ++a) d[a] = 0.0;
    for (int i = 0; i < 7; ++i) {
      if (!g.active[i]) continue;
      const double inv2h = 1.0 / (2.0 * g.h[i]);
      const double* up = T.at(w.neighbor(i, +1));
      const double* dn = T.at(w.neighbor(i, -1));
      for (int a = 0; a < 7; ++a) d[a] += (up[i * 7 + a] - dn[i * 7 + a]) * inv2h;
    }
  } while (w.next());
  return div;
}

/// Isometric-flow right side (div T) .| psi as a 3-form field.
inline Field g2_rhs_from_divergence(const Field& divT, const Field& psi) {
  Field rhs(divT.grid, 35);
  const long n = divT.grid.points();
  for (long p = 0; p < n; ++p) interior_v4_raw(divT.at(p), psi.at(p), rhs.at(p));
  return rhs;
}

/// Tension in the Lambda^2_7 representation: -(1/3) (div T) .| phi, one
/// 21-component 2-form per point.
inline Field g2_tension_m(const Field& divT, const Field& phi) {
  Field m(divT.grid, 21);
  const long n = divT.grid.points();
  double x[7];
  for (long p = 0; p < n; ++p) {
    const double* d = divT.at(p);
    for (int a = 0; a < 7; ++a) x[a] = -d[a] / 3.0;
    interior_v3_raw(x, phi.at(p), m.at(p));
  }
  return m;
}

/// Harmonic-map residual sum_{ij} T_ij (D_i T_pj - D_p T_ij), a 7-vector
/// per point; zero exactly when the section is a harmonic map.
inline Field harmonic_map_residual(const Field& T) {
  const GridSpec& g = T.grid;
  Field res(g, 7);
  GridWalker w(g);
  double DT[7][49];  // DT[b] = D_b T at the current point
  do {
    const long pt = w.point();
    for (int b = 0; b < 7; ++b) {
      if (!g.active[b]) {
        for (int c = 0; c < 49; ++c) DT[b][c] = 0.0;
        continue;
      }
      const double inv2h = 1.0 / (2.0 * g.h[b]);
      const double* up = T.at(w.neighbor(b, +1));
      const double* dn = T.at(w.neighbor(b, -1));
      for (int c = 0; c < 49; ++c) DT[b][c] = (up[c] - dn[c]) * inv2h;
    }
    const double* t = T.at(pt);
    double* r = res.at(pt);
    for (int p = 0; p < 7; ++p) {
      double acc = 0.0;
      for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) acc += t[i * 7 + j] * (DT[i][p * 7 + j] - DT[p][i * 7 + j]);
      r[p] = acc;
    }
  } while (w.next());
  return res;
}

/// max over grid of |g_phi(x) - id|_inf.
inline double metric_drift(const Field& phi, const Field& psi) {
  const long n = phi.grid.points();
  double drift = 0.0;
  Matrix g(7, 7);
  for (long p = 0; p < n; ++p) {
    metric_raw(phi.at(p), psi.at(p), g);
    const double d = (g - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff();
    drift = std::max(drift, d);
  }
  return drift;
}

/// Energy density eps = 1/3 |T|^2 (the G2 dictionary |d^V sigma|^2 = 2/3 |T|^2).
inline Field g2_eps_field(const Field& T) {
  Field eps(T.grid, 1);
  const long n = T.grid.points();
  for (long p = 0; p < n; ++p) {
    const double* t = T.at(p);
    double acc = 0.0;
    for (int c = 0; c < 49; ++c) acc += t[c] * t[c];
    eps.v[p] = acc / 3.0;
  }
  return eps;
}

/// Kinetic density kappa = 1/3 |div T|^2 (same dictionary applied to the
/// vertical velocity (div T) .| psi).
inline Field g2_kappa_field(const Field& divT) {
  Field kappa(divT.grid, 1);
  const long n = divT.grid.points();
  for (long p = 0; p < n; ++p) {
    const double* d = divT.at(p);
    double acc = 0.0;
    for (int a = 0; a < 7; ++a) acc += d[a] * d[a];
    kappa.v[p] = acc / 3.0;
  }
  return kappa;
}

}  // namespace hsf
