#pragma once

#include <Eigen/Dense>

#include "hsf/errors.hpp"

namespace hsf {

/// Homogeneous (constant-coefficient) frame on the round S^3: the frame is
/// sigma_i = sum_j A_ij X_j in the Hopf basis {X_1, X_2, X_3}, which obeys
/// nabla_{X_a} X_j = eps_{ajk} X_k and nabla_{X_a} X_a = 0. Every covariant
/// quantity of such a frame reduces to sums over these structure constants.
struct S3Homogeneous {
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();

  static double levi_civita(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0.0;
    return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
  }

  double orthogonality_defect() const {
    return (A.transpose() * A - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  }

  void validate(double tol = 1e-8) const {
    if (orthogonality_defect() > tol) throw Error("S3Homogeneous: non-orthogonal A");
  }

  /// Coefficients of nabla_{X_a} sigma_j in the Hopf basis.
  Eigen::Matrix3d nabla(int a) const {
    Eigen::Matrix3d out = Eigen::Matrix3d::Zero();  // out(j, q)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) out(j, q) += A(j, p) * levi_civita(a, p, q);
    return out;
  }
};

/// Vertical tension of the homogeneous frame, returned as the
/// I-representation M_ij = <sigma_i, tau(sigma_j)> (a skew 3x3 matrix).
/// Evaluates tau(sigma_j) = tr nabla^2 sigma_j + |nabla sigma_j|^2 sigma_j
/// + sum_{l != j} <nabla sigma_j, nabla sigma_l> sigma_l with the trace
/// convention nabla*nabla = tr nabla^2 (negative spectrum); the Hopf frame
/// (and any constant rotation of it) is the decisive zero of this formula.
inline Eigen::Matrix3d s3_hopf_tension(const S3Homogeneous& model) {
  model.validate();
  const Eigen::Matrix3d& A = model.A;

  Eigen::Matrix3d grad[3];
  for (int a = 0; a < 3; ++a) grad[a] = model.nabla(a);

  // tr nabla^2 sigma_j: iterate the structure relations once more.
  Eigen::Matrix3d lap = Eigen::Matrix3d::Zero();  // lap(j, r)
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j < 3; ++j)
      for (int q = 0; q < 3; ++q)
        for (int r = 0; r < 3; ++r) lap(j, r) += grad[a](j, q) * S3Homogeneous::levi_civita(a, q, r);

  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();  // <nabla sigma_i, nabla sigma_j>
  for (int a = 0; a < 3; ++a) gram += grad[a] * grad[a].transpose();

  Eigen::Matrix3d tau = Eigen::Matrix3d::Zero();  // tau(j, r) in the Hopf basis
  for (int j = 0; j < 3; ++j) {
    for (int r = 0; r < 3; ++r) {
      double acc = lap(j, r) + gram(j, j) * A(j, r);
      for (int l = 0; l < 3; ++l)
        if (l != j) acc += gram(j, l) * A(l, r);
      tau(j, r) = acc;
    }
  }

  Eigen::Matrix3d M;  // M(i, j) = <sigma_i, tau(sigma_j)>
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = A.row(i).dot(tau.row(j));
  return M;
}

/// Energy density of the homogeneous frame (constant over S^3), with the
/// same so(3) normalization as the flat-torus frame flow.
inline double s3_energy_density(const S3Homogeneous& model) {
  double acc = 0.0;
  for (int a = 0; a < 3; ++a) acc += model.nabla(a).squaredNorm();
  return 0.25 * acc;
}

inline constexpr double kVolS3 = 2.0 * 9.869604401089358;  // 2 pi^2

}  // namespace hsf
