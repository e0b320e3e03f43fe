#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "hsf/combinatorics.hpp"
#include "hsf/errors.hpp"

namespace hsf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense antisymmetric k-form on R^n (n <= 8), stored as the C(n,k)
/// coefficients over strictly-increasing multi-indices in lex order.
///
/// Inner products and contractions come in two normalizations used side by
/// side throughout the G2 identities:
///   form_inner  — sum over increasing multi-indices (<phi0,phi0> = 7),
///   contract    — full tensor-index contraction, i.e. k! times the former.
class AltForm {
 public:
  AltForm() : n_(0), k_(0) {}
  AltForm(int n, int k) : n_(n), k_(k), c_(binomial(n, k), 0.0) {
    if (n < 0 || n > kMaxDim || k < 0 || k > n)
      throw DimensionMismatch("AltForm: bad degree/dimension");
  }

  /// Basis monomial e^{i1...ik} (0-based axes, any order; sign handled).
  static AltForm basis(int n, std::initializer_list<int> axes, double coeff = 1.0) {
    AltForm a(n, static_cast<int>(axes.size()));
    int idx[kMaxDim];
    int i = 0;
    for (int v : axes) idx[i++] = v;
    a.set(idx, coeff);
    return a;
  }

  int dim() const { return n_; }
  int degree() const { return k_; }
  long size() const { return static_cast<long>(c_.size()); }

  double& operator[](long r) { return c_[r]; }
  double operator[](long r) const { return c_[r]; }
  const std::vector<double>& coeffs() const { return c_; }
  double* data() { return c_.data(); }
  const double* data() const { return c_.data(); }

  /// Component access with an arbitrary (possibly unsorted) multi-index:
  /// returns sign(permutation) * stored value, 0 on a repeated index.
  double operator()(const int* idx) const {
    int tmp[kMaxDim];
    for (int i = 0; i < k_; ++i) tmp[i] = idx[i];
    int s = sort_sign(tmp, k_);
    if (s == 0) return 0.0;
    return s * c_[SubsetTable::get(n_, k_).rank(tmp)];
  }
  double operator()(std::initializer_list<int> idx) const {
    int tmp[kMaxDim];
    int i = 0;
    for (int v : idx) tmp[i++] = v;
    return (*this)(tmp);
  }

  /// Adds `v` at an arbitrary multi-index (sign-adjusted); no-op on repeats.
  void add(const int* idx, double v) {
    int tmp[kMaxDim];
    for (int i = 0; i < k_; ++i) tmp[i] = idx[i];
    int s = sort_sign(tmp, k_);
    if (s == 0) return;
    c_[SubsetTable::get(n_, k_).rank(tmp)] += s * v;
  }
  void set(const int* idx, double v) {
    int tmp[kMaxDim];
    for (int i = 0; i < k_; ++i) tmp[i] = idx[i];
    int s = sort_sign(tmp, k_);
    if (s == 0) throw DimensionMismatch("AltForm::set: repeated index");
    c_[SubsetTable::get(n_, k_).rank(tmp)] = s * v;
  }

  AltForm& operator+=(const AltForm& o) {
    check_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  AltForm& operator-=(const AltForm& o) {
    check_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  AltForm& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }
  friend AltForm operator+(AltForm a, const AltForm& b) { return a += b; }
  friend AltForm operator-(AltForm a, const AltForm& b) { return a -= b; }
  friend AltForm operator*(double s, AltForm a) { return a *= s; }

  double max_abs() const {
    double m = 0.0;
    for (double x : c_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  void check_same(const AltForm& o) const {
    if (n_ != o.n_ || k_ != o.k_) throw DimensionMismatch("AltForm: degree/dim mismatch");
  }

  int n_, k_;
  std::vector<double> c_;
};

/// Euclidean inner product over increasing multi-indices.
inline double form_inner(const AltForm& a, const AltForm& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw DimensionMismatch("form_inner: mismatch");
  double s = 0.0;
  for (long i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Full tensor-index inner product; equals k! * form_inner.
inline double tensor_inner(const AltForm& a, const AltForm& b) {
  double f = 1.0;
  for (int i = 2; i <= a.degree(); ++i) f *= i;
  return f * form_inner(a, b);
}

inline AltForm wedge(const AltForm& a, const AltForm& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("wedge: dimension mismatch");
  const int n = a.dim(), k = a.degree(), l = b.degree();
  if (k + l > n) throw DimensionMismatch("wedge: degree overflow");
  AltForm out(n, k + l);
  const auto& ta = SubsetTable::get(n, k);
  const auto& tb = SubsetTable::get(n, l);
  int merged[kMaxDim];
  for (long ia = 0; ia < ta.count(); ++ia) {
    const double ca = a[ia];
    if (ca == 0.0) continue;
    const int* I = ta.subset(ia);
    for (long ib = 0; ib < tb.count(); ++ib) {
      const double cb = b[ib];
      if (cb == 0.0) continue;
      const int* J = tb.subset(ib);
      for (int i = 0; i < k; ++i) merged[i] = I[i];
      for (int j = 0; j < l; ++j) merged[k + j] = J[j];
      out.add(merged, ca * cb);
    }
  }
  return out;
}

/// Hodge star for the Euclidean metric and the standard orientation
/// e^{1...n}, defined by  b ^ a = <b, *a> vol  for complementary b.
/// Componentwise: (*a)_J = sign(J, J^c) a_{J^c}.
inline AltForm hodge(const AltForm& a) {
  const int n = a.dim(), k = a.degree();
  AltForm out(n, n - k);
  const auto& tout = SubsetTable::get(n, n - k);
  const auto& tin = SubsetTable::get(n, k);
  for (long r = 0; r < tout.count(); ++r) {
    const int* J = tout.subset(r);
    int seq[kMaxDim];
    bool in_J[kMaxDim] = {};
    for (int i = 0; i < n - k; ++i) {
      seq[i] = J[i];
      in_J[J[i]] = true;
    }
    int p = n - k;
    int comp[kMaxDim];
    int ci = 0;
    for (int v = 0; v < n; ++v)
      if (!in_J[v]) {
        seq[p++] = v;
        comp[ci++] = v;
      }
    int tmp[kMaxDim];
    for (int i = 0; i < n; ++i) tmp[i] = seq[i];
    const int s = sort_sign(tmp, n);
    out[r] = s * a[tin.rank(comp)];
  }
  return out;
}

/// Interior product (X .| a)(Y1..Y_{k-1}) = a(X, Y1, ..).
inline AltForm interior(const Vector& X, const AltForm& a) {
  const int n = a.dim(), k = a.degree();
  if (X.size() != n) throw DimensionMismatch("interior: dimension mismatch");
  if (k < 1) throw DimensionMismatch("interior: degree-0 input");
  AltForm out(n, k - 1);
  const auto& tout = SubsetTable::get(n, k - 1);
  int idx[kMaxDim];
  for (long r = 0; r < tout.count(); ++r) {
    const int* J = tout.subset(r);
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
      if (X[m] == 0.0) continue;
      idx[0] = m;
      for (int i = 0; i < k - 1; ++i) idx[i + 1] = J[i];
      acc += X[m] * a(idx);
    }
    out[r] = acc;
  }
  return out;
}

/// Full tensor contraction of a k-form into the first k slots of an l-form
/// (k <= l): (a . b)_{J} = a_{P} b_{P J} summed over all k-tuples P, i.e.
/// k! times the sum over increasing P. Realizes the iterated-hook
/// expressions in the G2 identities, e.g. (X .| psi) .| psi = -24 X.
inline AltForm contract(const AltForm& a, const AltForm& b) {
  const int n = a.dim(), k = a.degree(), l = b.degree();
  if (n != b.dim() || k > l) throw DimensionMismatch("contract: mismatch");
  double kfac = 1.0;
  for (int i = 2; i <= k; ++i) kfac *= i;
  AltForm out(n, l - k);
  const auto& tp = SubsetTable::get(n, k);
  const auto& tout = SubsetTable::get(n, l - k);
  int idx[kMaxDim];
  for (long r = 0; r < tout.count(); ++r) {
    const int* J = tout.subset(r);
    double acc = 0.0;
    for (long p = 0; p < tp.count(); ++p) {
      const double ca = a[p];
      if (ca == 0.0) continue;
      const int* P = tp.subset(p);
      for (int i = 0; i < k; ++i) idx[i] = P[i];
      for (int j = 0; j < l - k; ++j) idx[k + j] = J[j];
      acc += ca * b(idx);
    }
    out[r] = kfac * acc;
  }
  return out;
}

/// so(n) action on k-forms: the derivative at the identity of the pullback
/// family s -> (exp(s beta))^* a, i.e.
///     (beta.a)(X1,..,Xk) = sum_i a(X1,..,beta Xi,..,Xk),
/// with (beta v)_p = beta_{pq} v_q. The global sign is the one that makes
/// the recovery identity ((beta.phi0).|psi0).|phi0 = +72 beta hold for the
/// phi0 convention above (the opposite sign flips it to -72).
inline AltForm so_action(const Matrix& beta, const AltForm& a) {
  const int n = a.dim(), k = a.degree();
  if (beta.rows() != n || beta.cols() != n) throw DimensionMismatch("so_action: mismatch");
  AltForm out(n, k);
  const auto& t = SubsetTable::get(n, k);
  int idx[kMaxDim];
  for (long r = 0; r < t.count(); ++r) {
    const int* I = t.subset(r);
    double acc = 0.0;
    for (int slot = 0; slot < k; ++slot) {
      for (int m = 0; m < n; ++m) {
        const double bm = beta(m, I[slot]);
        if (bm == 0.0) continue;
        for (int i = 0; i < k; ++i) idx[i] = I[i];
        idx[slot] = m;
        acc += bm * a(idx);
      }
    }
    out[r] = acc;
  }
  return out;
}

/// Plain pullback (A^* a)(X1,..,Xk) = a(A X1, .., A Xk) for any A.
inline AltForm pullback(const Matrix& A, const AltForm& a) {
  const int n = a.dim(), k = a.degree();
  if (A.rows() != n || A.cols() != n) throw DimensionMismatch("pullback: mismatch");
  AltForm out(n, k);
  const auto& t = SubsetTable::get(n, k);
  Eigen::MatrixXd minor(k, k);
  for (long r = 0; r < t.count(); ++r) {
    const int* I = t.subset(r);
    double acc = 0.0;
    for (long p = 0; p < t.count(); ++p) {
      const double ca = a[p];
      if (ca == 0.0) continue;
      const int* P = t.subset(p);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) minor(i, j) = A(P[i], I[j]);
      acc += ca * minor.determinant();
    }
    out[r] = acc;
  }
  return out;
}

/// Orbit map of g in GL(n) on forms, act(g, a) := g^* a; its derivative
/// along exp(s beta) at s = 0 is so_action(beta, a).
inline AltForm group_action(const Matrix& g, const AltForm& a) { return pullback(g, a); }

/// Skew-symmetric n x n matrix; enforces A + A^T = 0 on construction.
class SkewMatrix {
 public:
  explicit SkewMatrix(int n) : m_(Matrix::Zero(n, n)) {}
  /// Skew part of an arbitrary matrix.
  static SkewMatrix from(const Matrix& a) {
    SkewMatrix s(static_cast<int>(a.rows()));
    s.m_ = 0.5 * (a - a.transpose());
    return s;
  }
  /// Identification of a 2-form with the matrix B_{pq} = eta(e_p, e_q).
  static SkewMatrix from_two_form(const AltForm& eta) {
    if (eta.degree() != 2) throw DimensionMismatch("SkewMatrix: need a 2-form");
    SkewMatrix s(eta.dim());
    const auto& t = SubsetTable::get(eta.dim(), 2);
    for (long r = 0; r < t.count(); ++r) {
      const int* I = t.subset(r);
      s.m_(I[0], I[1]) = eta[r];
      s.m_(I[1], I[0]) = -eta[r];
    }
    return s;
  }
  AltForm two_form() const {
    const int n = static_cast<int>(m_.rows());
    AltForm eta(n, 2);
    const auto& t = SubsetTable::get(n, 2);
    for (long r = 0; r < t.count(); ++r) {
      const int* I = t.subset(r);
      eta[r] = m_(I[0], I[1]);
    }
    return eta;
  }
  const Matrix& matrix() const { return m_; }
  void set_entry(int p, int q, double v) {
    m_(p, q) = v;
    m_(q, p) = -v;
  }

 private:
  Matrix m_;
};

}  // namespace hsf
