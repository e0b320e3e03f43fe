#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "hsf/altform.hpp"

namespace hsf {

/// The standard G2-structure on R^7 and its derived lookup tables.
///
/// Convention:  phi0 = e123 + e145 + e167 + e246 - e257 - e347 - e356,
/// psi0 = *phi0 for the Euclidean metric and standard orientation e^{1..7}.
/// With this pair the recovery constants come out as
///     ((beta.phi0) .| psi0) .| phi0 = 72 beta          (beta in L2_7)
///     (X .| psi0) .| psi0           = -24 X
///     <X .| phi0, X .| phi0>_tensor =   6 |X|^2
///     beta = X .| phi0  =>  beta.phi0 = -3 X .| psi0
/// and the operator eta -> *(phi0 ^ eta) has eigenvalue +2 on L2_7 and -1
/// on L2_14 = g2.  (The -2/+1 variant in parts of the literature belongs to
/// the opposite orientation; the constants above are what fix ours.)
class G2Constants {
 public:
  static const G2Constants& get() {
    static G2Constants c{standard_phi0()};
    return c;
  }

  /// Build from an arbitrary phi0 candidate (test hook for mutation tests).
  explicit G2Constants(const AltForm& phi) : phi0_(phi), psi0_(hodge(phi)) {}

  static AltForm standard_phi0() {
    AltForm phi(7, 3);
    auto put = [&phi](int a, int b, int c, double v) {
      int idx[3] = {a - 1, b - 1, c - 1};
      phi.set(idx, v);
    };
    put(1, 2, 3, 1.0);
    put(1, 4, 5, 1.0);
    put(1, 6, 7, 1.0);
    put(2, 4, 6, 1.0);
    put(2, 5, 7, -1.0);
    put(3, 4, 7, -1.0);
    put(3, 5, 6, -1.0);
    return phi;
  }

  const AltForm& phi0() const { return phi0_; }
  const AltForm& psi0() const { return psi0_; }

  /// Verifies the recovery constants on deterministic inputs; throws on a
  /// convention error so a wrong sign cannot propagate into a run.
  void assert_identities() const {
    Vector X(7);
    for (int i = 0; i < 7; ++i) X[i] = 0.3 + 0.1 * i * (i % 2 ? 1 : -1);
    const AltForm ixpsi = interior(X, psi0_);
    const AltForm rec = contract(ixpsi, psi0_);
    for (int i = 0; i < 7; ++i)
      if (std::abs(rec[i] + 24.0 * X[i]) > 1e-9)
        throw Error("G2Constants: (X .| psi) .| psi != -24 X; wrong convention");
    const AltForm ixphi = interior(X, phi0_);
    if (std::abs(tensor_inner(ixphi, ixphi) - 6.0 * X.squaredNorm()) > 1e-9)
      throw Error("G2Constants: <X.|phi, X.|phi> != 6|X|^2; wrong convention");
    const Matrix beta = SkewMatrix::from_two_form(ixphi).matrix();
    const AltForm act = so_action(beta, phi0_);
    const AltForm eq3 = interior(contract_vector(act, psi0_), phi0_);
    const AltForm ref = 72.0 * ixphi;
    for (long r = 0; r < eq3.size(); ++r)
      if (std::abs(eq3[r] - ref[r]) > 1e-8)
        throw Error("G2Constants: eq3 constant != 72; wrong convention");
  }

  /// Full contraction of a 3-form with a 4-form to a plain vector.
  static Vector contract_vector(const AltForm& gamma, const AltForm& psi) {
    const AltForm one = contract(gamma, psi);
    Vector v(7);
    for (int i = 0; i < 7; ++i) v[i] = one[i];
    return v;
  }

 private:
  AltForm phi0_, psi0_;
};

/// eta = part7 + part14 with part7 in L2_7 (eigenvalue +2 of *(phi0 ^ .))
/// and part14 in g2 = L2_14 (eigenvalue -1).
struct Lambda2Split {
  AltForm part7;
  AltForm part14;
};

inline Lambda2Split project_lambda2(const AltForm& eta, const AltForm& phi0) {
  if (eta.dim() != 7 || eta.degree() != 2) throw DimensionMismatch("project_lambda2: need a 2-form on R^7");
  const AltForm L = hodge(wedge(phi0, eta));
  Lambda2Split s{AltForm(7, 2), AltForm(7, 2)};
  for (long r = 0; r < eta.size(); ++r) {
    s.part7[r] = (eta[r] + L[r]) / 3.0;
    s.part14[r] = (2.0 * eta[r] - L[r]) / 3.0;
  }
  return s;
}
inline Lambda2Split project_lambda2(const AltForm& eta) {
  return project_lambda2(eta, G2Constants::get().phi0());
}

/// gamma = part1 + part7 + part27 with part1 = <gamma,phi0>/7 phi0 and
/// part7 = X .| psi0 for the recovered X; part27 is the remainder.
struct Lambda3Split {
  AltForm part1;
  AltForm part7;
  AltForm part27;
};

/// Recovers X with gamma7 = X .| psi0 via (X .| psi0) .| psi0 = -24 X.
/// On input outside L3_7 this returns the L3_7-part's vector (the other
/// components contract to zero against psi0).
inline Vector recover_vector_psi(const AltForm& gamma7, const AltForm& psi0) {
  return -G2Constants::contract_vector(gamma7, psi0) / 24.0;
}
inline Vector recover_vector_psi(const AltForm& gamma7) {
  return recover_vector_psi(gamma7, G2Constants::get().psi0());
}

inline Lambda3Split project_lambda3(const AltForm& gamma, const G2Constants& c = G2Constants::get()) {
  if (gamma.dim() != 7 || gamma.degree() != 3) throw DimensionMismatch("project_lambda3: need a 3-form on R^7");
  Lambda3Split s{AltForm(7, 3), AltForm(7, 3), AltForm(7, 3)};
  const double a1 = form_inner(gamma, c.phi0()) / 7.0;
  s.part1 = a1 * c.phi0();
  s.part7 = interior(recover_vector_psi(gamma, c.psi0()), c.psi0());
  s.part27 = gamma - s.part1 - s.part7;
  return s;
}

/// The unique beta in L2_7 with beta.phi = gamma7, via
/// beta = (1/72) (gamma7 .| psi) .| phi   (paper constant 72).
inline SkewMatrix recover_beta_72(const AltForm& gamma7, const AltForm& phi, const AltForm& psi) {
  const Vector y = G2Constants::contract_vector(gamma7, psi) / 72.0;
  return SkewMatrix::from_two_form(interior(y, phi));
}
inline SkewMatrix recover_beta_72(const AltForm& gamma7) {
  const auto& c = G2Constants::get();
  return recover_beta_72(gamma7, c.phi0(), c.psi0());
}

/// Metric induced by a positive 3-form:  B(X,Y) vol = 1/6 (X.|phi)^(Y.|phi)^phi,
/// g = det(B)^{-1/9} B.  Throws NonPositiveForm when det(B) <= 0.
inline Matrix metric_from_phi(const AltForm& phi) {
  if (phi.dim() != 7 || phi.degree() != 3) throw DimensionMismatch("metric_from_phi: need a 3-form on R^7");
  Matrix B(7, 7);
  std::array<AltForm, 7> w;
  Vector e = Vector::Zero(7);
  for (int i = 0; i < 7; ++i) {
    e[i] = 1.0;
    w[i] = interior(e, phi);
    e[i] = 0.0;
  }
  for (int x = 0; x < 7; ++x)
    for (int y = x; y < 7; ++y) {
      const AltForm top = wedge(wedge(w[x], w[y]), phi);
      B(x, y) = B(y, x) = top[0] / 6.0;
    }
  const double det = B.determinant();
  if (!(det > 0.0)) throw NonPositiveForm("metric_from_phi: det(B) <= 0");
  return std::pow(det, -1.0 / 9.0) * B;
}

// ---------------------------------------------------------------------------
// Flat sign tables for the grid pipeline (35-component 3-forms / 4-forms).
// ---------------------------------------------------------------------------

/// Precomputed index/sign tables specializing the generic contractions to the
/// (7,3)/(7,4) pairs used at every grid point.
struct G2Tables {
  struct Ent {
    int a;      // the extra vector index
    int r4;     // rank of the merged 4-subset
    double s;   // permutation sign
  };

  // hodge 3 -> 4: (*a)[dst[r]] = sign[r] * a[r]; the inverse uses the
  // transpose with the same signs (n = 7 makes ** = id).
  std::array<int, 35> star_dst{};
  std::array<double, 35> star_sign{};

  // torsion: sum_full gamma_{pqr} psi_{pqra} = 6 sum_{p<q<r}; entries keyed
  // by the 3-subset rank, sign = psign(p,q,r,a).
  std::array<std::vector<Ent>, 35> contract3{};

  // interior: (X .| psi)_{pqr} = sum_m X_m psi_{mpqr}; sign = psign(m,p,q,r).
  std::array<std::vector<Ent>, 35> interior43{};

  // interior with a 3-form: (X .| phi)_{pq} = sum_m X_m phi_{mpq}.
  struct Ent32 {
    int m, r3;
    double s;
  };
  std::array<std::vector<Ent32>, 21> interior32{};

  // wedge of two 2-forms into a 4-form, for the metric-drift monitor.
  struct EntW {
    int ia, ib, r4;
    double s;
  };
  std::vector<EntW> wedge22{};

  static const G2Tables& get() {
    static G2Tables t = build();
    return t;
  }

 private:
  static G2Tables build() {
    G2Tables t;
    const auto& t3 = SubsetTable::get(7, 3);
    const auto& t4 = SubsetTable::get(7, 4);
    const auto& t2 = SubsetTable::get(7, 2);
    for (long r = 0; r < 35; ++r) {
      const int* I = t3.subset(r);
      int seq[7], comp[4];
      bool in[7] = {};
      for (int i = 0; i < 3; ++i) in[I[i]] = true;
      int ci = 0;
      for (int v = 0; v < 7; ++v)
        if (!in[v]) comp[ci++] = v;
      for (int i = 0; i < 3; ++i) seq[i] = I[i];
      for (int i = 0; i < 4; ++i) seq[3 + i] = comp[i];
      int tmp[7];
      for (int i = 0; i < 7; ++i) tmp[i] = seq[i];
      t.star_dst[r] = static_cast<int>(t4.rank(comp));
      t.star_sign[r] = sort_sign(tmp, 7);
      // contract3 / interior43
      for (int a = 0; a < 7; ++a) {
        if (in[a]) continue;
        int m4[4] = {I[0], I[1], I[2], a};
        int sorted[4] = {I[0], I[1], I[2], a};
        const int s_end = sort_sign(sorted, 4);
        const int r4 = static_cast<int>(t4.rank(sorted));
        t.contract3[r].push_back({a, r4, static_cast<double>(s_end)});
        // psign(a, p, q, r) = (-1)^3 psign(p, q, r, a)
        t.interior43[r].push_back({a, r4, static_cast<double>(-s_end)});
        (void)m4;
      }
    }
    for (long r = 0; r < 21; ++r) {
      const int* I = t2.subset(r);
      for (int m = 0; m < 7; ++m) {
        if (m == I[0] || m == I[1]) continue;
        int sorted[3] = {m, I[0], I[1]};
        const int s = sort_sign(sorted, 3);
        t.interior32[r].push_back({m, static_cast<int>(t3.rank(sorted)), static_cast<double>(s)});
      }
    }
    for (long ia = 0; ia < 21; ++ia)
      for (long ib = 0; ib < 21; ++ib) {
        const int* I = t2.subset(ia);
        const int* J = t2.subset(ib);
        if (I[0] == J[0] || I[0] == J[1] || I[1] == J[0] || I[1] == J[1]) continue;
        int seq[4] = {I[0], I[1], J[0], J[1]};
        int sorted[4] = {I[0], I[1], J[0], J[1]};
        const int s = sort_sign(sorted, 4);
        t.wedge22.push_back({static_cast<int>(ia), static_cast<int>(ib),
                             static_cast<int>(t4.rank(sorted)), static_cast<double>(s)});
        (void)seq;
      }
    return t;
  }
};

/// psi = *phi on raw 35-component arrays.
inline void star3_raw(const double* phi, double* psi) {
  const auto& t = G2Tables::get();
  for (int r = 0; r < 35; ++r) psi[t.star_dst[r]] = t.star_sign[r] * phi[r];
}

/// T-row from a directional derivative: out_a = -(1/24) (dphi)_{pqr} psi_{pqra}
/// (full index sum).
inline void torsion_row_raw(const double* dphi, const double* psi, double* out7) {
  const auto& t = G2Tables::get();
  for (int a = 0; a < 7; ++a) out7[a] = 0.0;
  for (int r = 0; r < 35; ++r) {
    const double g = dphi[r];
    if (g == 0.0) continue;
    for (const auto& e : t.contract3[r]) out7[e.a] += e.s * g * psi[e.r4];
  }
  for (int a = 0; a < 7; ++a) out7[a] *= -6.0 / 24.0;
}

/// (X .| psi) on raw arrays (psi a 4-form, out a 3-form).
inline void interior_v4_raw(const double* X, const double* psi, double* out35) {
  const auto& t = G2Tables::get();
  for (int r = 0; r < 35; ++r) {
    double acc = 0.0;
    for (const auto& e : t.interior43[r]) acc += e.s * X[e.a] * psi[e.r4];
    out35[r] = acc;
  }
}

/// (X .| phi) on raw arrays (phi a 3-form, out a 2-form).
inline void interior_v3_raw(const double* X, const double* phi, double* out21) {
  const auto& t = G2Tables::get();
  for (int r = 0; r < 21; ++r) {
    double acc = 0.0;
    for (const auto& e : t.interior32[r]) acc += e.s * X[e.m] * phi[e.r3];
    out21[r] = acc;
  }
}

/// G2 metric from raw phi/psi: B_xy = 1/6 <(e_x .| phi) ^ (e_y .| phi), psi>_lex.
inline void metric_raw(const double* phi, const double* psi, Matrix& g_out) {
  const auto& t = G2Tables::get();
  double w[7][21];
  Vector X = Vector::Zero(7);
  for (int x = 0; x < 7; ++x) {
    double e[7] = {};
    e[x] = 1.0;
    interior_v3_raw(e, phi, w[x]);
  }
  Matrix B(7, 7);
  for (int x = 0; x < 7; ++x)
    for (int y = x; y < 7; ++y) {
      double four[35] = {};
      for (const auto& e : t.wedge22)
        if (w[x][e.ia] != 0.0) four[e.r4] += e.s * w[x][e.ia] * w[y][e.ib];
      double acc = 0.0;
      for (int r = 0; r < 35; ++r) acc += four[r] * psi[r];
      B(x, y) = B(y, x) = acc / 6.0;
    }
  const double det = B.determinant();
  if (!(det > 0.0)) throw NonPositiveForm("metric_raw: det(B) <= 0");
  g_out = std::pow(det, -1.0 / 9.0) * B;
  (void)X;
}

}  // namespace hsf
