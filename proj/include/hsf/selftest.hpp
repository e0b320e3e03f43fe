#pragma once

#include <Eigen/Eigenvalues>
#include <string>
#include <vector>

#include "hsf/g2.hpp"
#include "hsf/rng.hpp"
#include "hsf/s3.hpp"

namespace hsf {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct SelfTestReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline Vector random_vec(int n, SplitMix64& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_sym();
  return v;
}

inline AltForm random_form(int n, int k, SplitMix64& rng) {
  AltForm a(n, k);
  for (long r = 0; r < a.size(); ++r) a[r] = rng.next_sym();
  return a;
}

}  // namespace detail

/// The randomized identity suite behind `selftest` and acceptance
/// criterion 1. Deterministic given the seed; the G2Constants argument is a
/// test hook (a mutated phi0 must make the constant checks fail loudly).
inline SelfTestReport run_selftest(uint64_t seed = 7,
                                   const G2Constants& c = G2Constants::get()) {
  SelfTestReport rep;
  SplitMix64 rng(seed);
  const AltForm& phi0 = c.phi0();
  const AltForm& psi0 = c.psi0();
  auto add = [&rep](const std::string& name, double measured, double tol) {
    rep.checks.push_back({name, measured, tol, measured <= tol});
  };

  // star and pairing normalization
  {
    double dev = std::abs(form_inner(phi0, phi0) - 7.0);
    const AltForm w = wedge(phi0, psi0);
    dev = std::max(dev, std::abs(w[0] - 7.0));
    AltForm rt = hodge(hodge(phi0)) - phi0;
    dev = std::max(dev, rt.max_abs());
    add("star/pairing: <phi0,phi0> = 7, phi0^psi0 = 7 vol, ** = id", dev, 1e-12);
  }

  // eq3 recovery with constant 72 over Lambda^2_7
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vector X = detail::random_vec(7, rng);
      const AltForm beta_form = interior(X, phi0);
      const Matrix beta = SkewMatrix::from_two_form(beta_form).matrix();
      const AltForm lhs = interior(G2Constants::contract_vector(so_action(beta, phi0), psi0), phi0);
      const AltForm err = lhs - 72.0 * beta_form;
      worst = std::max(worst, err.max_abs() / std::max(1.0, 72.0 * beta_form.max_abs()));
    }
    add("eq3: ((beta.phi0).|psi0).|phi0 = 72 beta (100 random)", worst, 1e-12);
  }

  // (X .| psi0) .| psi0 = -24 X
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vector X = detail::random_vec(7, rng);
      const Vector rec = G2Constants::contract_vector(interior(X, psi0), psi0);
      worst = std::max(worst, (rec + 24.0 * X).cwiseAbs().maxCoeff() / (24.0 * X.cwiseAbs().maxCoeff()));
    }
    add("(X.|psi0).|psi0 = -24 X (100 random)", worst, 1e-12);
  }

  // <X .| phi0, X .| phi0> = 6 |X|^2
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vector X = detail::random_vec(7, rng);
      const AltForm ix = interior(X, phi0);
      worst = std::max(worst,
                       std::abs(tensor_inner(ix, ix) - 6.0 * X.squaredNorm()) / (6.0 * X.squaredNorm()));
    }
    add("<X.|phi0, X.|phi0> = 6 |X|^2 (100 random)", worst, 1e-12);
  }

  // beta.phi0 = -3 X .| psi0 on Lambda^2_7; g2-part annihilates phi0
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vector X = detail::random_vec(7, rng);
      const Matrix beta = SkewMatrix::from_two_form(interior(X, phi0)).matrix();
      AltForm err = so_action(beta, phi0) + 3.0 * interior(X, psi0);
      worst = std::max(worst, err.max_abs() / std::max(1.0, X.cwiseAbs().maxCoeff()));
    }
    for (int i = 0; i < 20; ++i) {
      const AltForm eta = detail::random_form(7, 2, rng);
      const Lambda2Split sp = project_lambda2(eta, phi0);
      const Matrix b14 = SkewMatrix::from_two_form(sp.part14).matrix();
      worst = std::max(worst, so_action(b14, phi0).max_abs());
    }
    add("Y = -3X dictionary and g2 . phi0 = 0 (randomized)", worst, 1e-12);
  }

  // Lambda^2 projector ranks 7/14 via the eigen-decomposition oracle
  {
    Eigen::MatrixXd L(21, 21);
    for (int j = 0; j < 21; ++j) {
      AltForm e(7, 2);
      e[j] = 1.0;
      const AltForm col = hodge(wedge(phi0, e));
      for (int i = 0; i < 21; ++i) L(i, j) = col[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()));
    int n7 = 0, n14 = 0;
    double dev = 0.0;
    for (int i = 0; i < 21; ++i) {
      const double ev = es.eigenvalues()[i];
      if (std::abs(ev - 2.0) < 0.5) {
        ++n7;
        dev = std::max(dev, std::abs(ev - 2.0));
      } else if (std::abs(ev + 1.0) < 0.5) {
        ++n14;
        dev = std::max(dev, std::abs(ev + 1.0));
      } else {
        dev = 1.0;
      }
    }
    if (n7 != 7 || n14 != 14) dev = 1.0;
    add("Lambda^2 eigen-oracle: ranks 7/14 (eigenvalues +2/-1)", dev, 1e-12);
  }

  // Lambda^3 projector ranks 1/7/27 via the eigen-decomposition oracle
  {
    Eigen::MatrixXd P1(35, 35), P7(35, 35), P27(35, 35);
    for (int j = 0; j < 35; ++j) {
      AltForm e(7, 3);
      e[j] = 1.0;
      const Lambda3Split sp = project_lambda3(e, c);
      for (int i = 0; i < 35; ++i) {
        P1(i, j) = sp.part1[i];
        P7(i, j) = sp.part7[i];
        P27(i, j) = sp.part27[i];
      }
    }
    double dev = 0.0;
    int ranks[3] = {0, 0, 0};
    const Eigen::MatrixXd* Ps[3] = {&P1, &P7, &P27};
    for (int m = 0; m < 3; ++m) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (*Ps[m] + Ps[m]->transpose()));
      for (int i = 0; i < 35; ++i) {
        const double ev = es.eigenvalues()[i];
        if (ev > 0.5) {
          ++ranks[m];
          dev = std::max(dev, std::abs(ev - 1.0));
        } else {
          dev = std::max(dev, std::abs(ev));
        }
      }
    }
    if (ranks[0] != 1 || ranks[1] != 7 || ranks[2] != 27) dev = 1.0;
    add("Lambda^3 eigen-oracle: ranks 1/7/27", dev, 1e-12);
  }

  // metric normalization
  {
    double dev = 0.0;
    try {
      dev = (metric_from_phi(phi0) - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff();
    } catch (const NonPositiveForm&) {
      dev = 1.0;
    }
    add("metric(phi0) = id", dev, 1e-12);
  }

  // Hopf frame is a zero of the S^3 tension
  {
    S3Homogeneous hopf;
    add("Hopf frame tension = 0", s3_hopf_tension(hopf).cwiseAbs().maxCoeff(), 1e-12);
  }

  // algebra properties on randomized inputs
  {
    double dev = 0.0;
    for (int i = 0; i < 10; ++i) {
      const AltForm a = detail::random_form(7, 2, rng);
      const AltForm b = detail::random_form(7, 3, rng);
      AltForm comm = wedge(a, b) - wedge(b, a);  // (-1)^{2*3} = +1
      dev = std::max(dev, comm.max_abs());
      const Vector X = detail::random_vec(7, rng);
      dev = std::max(dev, interior(X, interior(X, b)).max_abs());
      Matrix beta = Matrix::Zero(7, 7);
      for (int p = 0; p < 7; ++p)
        for (int q = p + 1; q < 7; ++q) {
          beta(p, q) = rng.next_sym();
          beta(q, p) = -beta(p, q);
        }
      AltForm der = so_action(beta, wedge(a, b)) - wedge(so_action(beta, a), b) -
                    wedge(a, so_action(beta, b));
      dev = std::max(dev, der.max_abs());
      dev = std::max(dev, std::abs(form_inner(hodge(b), hodge(b)) - form_inner(b, b)));
    }
    add("wedge commutativity, X.|X.| = 0, derivation, star isometry", dev, 1e-12);
  }

  return rep;
}

}  // namespace hsf
