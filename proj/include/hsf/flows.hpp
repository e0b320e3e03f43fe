#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hsf/g2_field.hpp"
#include "hsf/grid.hpp"
#include "hsf/rng.hpp"
#include "hsf/s3.hpp"

namespace hsf {

enum class Kind { Parallelism, ACS, ACtS, G2 };
enum class Scheme { Euler, RK4 };
enum class Outcome { Converged, MaxSteps, Blowup };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Parallelism: return "parallelism";
    case Kind::ACS: return "acs";
    case Kind::ACtS: return "acts";
    case Kind::G2: return "g2";
  }
  return "?";
}

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Converged: return "converged";
    case Outcome::MaxSteps: return "max_steps";
    case Outcome::Blowup: return "blowup";
  }
  return "?";
}

/// A structure field together with its flow time and cached densities.
/// Field layout per kind:
///   Parallelism: f[0] = 3x3 frame per point (row-major, frame vectors are
///                columns). The homogeneous S^3 model uses a single-point
///                grid whose cell volume is vol(S^3).
///   ACS:         f[0] = d x d matrix J per point.
///   ACtS:        f[0] = xi (d comps), f[1] = theta (d x d).
///   G2:          f[0] = 35-component 3-form phi per point.
struct FlowState {
  Kind kind = Kind::Parallelism;
  bool s3 = false;
  int d = 3;
  double t = 0.0;
  GridSpec grid;
  std::vector<Field> f;

  // caches from the last evaluation at this state
  Field eps, kappa;
  double E = 0.0, K = 0.0, eps_max = 0.0, tau_inf = 0.0;
  double drift = 0.0;
};

/// Right side tangent to the structure orbit, with the densities of the
/// evaluation state (eps = 1/2 |d^V sigma|^2, kappa = 1/2 |tau^V|^2 in the
/// per-kind normalization that makes E' = -2K exact in continuous time).
struct RhsEval {
  std::vector<Field> k;
  Field eps, kappa;
  bool has_densities = false;
};

// ---------------------------------------------------------------------------
// per-kind right sides
// ---------------------------------------------------------------------------

namespace detail {

using Eigen::Map;
using EMat = Eigen::MatrixXd;

inline void add_grad_sq(const Field& u, Field& eps, double weight) {
  for (int a = 0; a < u.grid.dim; ++a) {
    if (!u.grid.active[a]) continue;
    Field du = partial(u, a);
    const long n = u.grid.points();
    for (long p = 0; p < n; ++p) {
      const double* d = du.at(p);
      double acc = 0.0;
      for (int c = 0; c < u.ncomp; ++c) acc += d[c] * d[c];
      eps.v[p] += weight * acc;
    }
  }
}

inline RhsEval frames_rhs(const FlowState& s, bool densities) {
  const Field& sig = s.f[0];
  RhsEval out;
  out.k.emplace_back(sig.grid, 9);
  Field lap = laplacian(sig);
  const long n = sig.grid.points();
  for (long p = 0; p < n; ++p) {
    Map<const Eigen::Matrix3d> S(sig.at(p)), L(lap.at(p));
    Eigen::Matrix3d M = S.transpose() * L;
    M = 0.5 * (M - M.transpose().eval());
    Map<Eigen::Matrix3d>(out.k[0].at(p)) = S * M;
  }
  if (densities) {
    out.eps = Field(sig.grid, 1);
    add_grad_sq(sig, out.eps, 0.25);
    out.kappa = Field(sig.grid, 1);
    for (long p = 0; p < n; ++p) {
      const double* r = out.k[0].at(p);
      double acc = 0.0;
      for (int c = 0; c < 9; ++c) acc += r[c] * r[c];
      out.kappa.v[p] = 0.25 * acc;
    }
    out.has_densities = true;
  }
  return out;
}

inline RhsEval s3_rhs(const FlowState& s, bool densities) {
  S3Homogeneous model;
  model.A = Map<const Eigen::Matrix3d>(s.f[0].at(0));
  RhsEval out;
  out.k.emplace_back(s.grid, 9);
  const Eigen::Matrix3d M = s3_hopf_tension(model);
  Map<Eigen::Matrix3d>(out.k[0].at(0)) = M.transpose() * model.A;
  if (densities) {
    out.eps = Field(s.grid, 1);
    out.eps.v[0] = s3_energy_density(model);
    out.kappa = Field(s.grid, 1);
    out.kappa.v[0] = 0.25 * M.squaredNorm();
    out.has_densities = true;
  }
  return out;
}

inline RhsEval acs_rhs(const FlowState& s, bool densities) {
  const Field& J = s.f[0];
  const int d = s.d;
  RhsEval out;
  out.k.emplace_back(J.grid, d * d);
  Field lap = laplacian(J);
  const long n = J.grid.points();
  for (long p = 0; p < n; ++p) {
    Map<const EMat> Jm(J.at(p), d, d);
    Map<const EMat> Lm(lap.at(p), d, d);
    Map<EMat>(out.k[0].at(p), d, d) = 0.5 * (Lm + Jm * Lm * Jm);
  }
  if (densities) {
    out.eps = Field(J.grid, 1);
    add_grad_sq(J, out.eps, 0.125);
    out.kappa = Field(J.grid, 1);
    for (long p = 0; p < n; ++p) {
      const double* r = out.k[0].at(p);
      double acc = 0.0;
      for (int c = 0; c < d * d; ++c) acc += r[c] * r[c];
      out.kappa.v[p] = 0.125 * acc;
    }
    out.has_densities = true;
  }
  return out;
}

/// ACtS right side, assembled so that (J-part, xi-part) is the exact
/// gradient of the discrete energy with respect to the vertical metric
/// 1/4 |theta_dot|_D^2 + |xi_dot|^2. All products are pointwise and all
/// differences central, so no discrete product rule is ever invoked.
inline RhsEval acts_rhs(const FlowState& s, bool densities) {
  const Field& xi = s.f[0];
  const Field& th = s.f[1];
  const int d = s.d;
  const GridSpec& g = xi.grid;
  const long n = g.points();

  // B_a = P (D_a theta) P and u_a = P (D_a theta) xi, per active axis.
  std::vector<Field> B, Dth;
  std::vector<int> axes;
  for (int a = 0; a < g.dim; ++a)
    if (g.active[a]) axes.push_back(a);
  for (int a : axes) Dth.push_back(partial(th, a));
  B.reserve(axes.size());
  for (size_t ia = 0; ia < axes.size(); ++ia) {
    Field Ba(g, d * d);
    for (long p = 0; p < n; ++p) {
      Map<const Eigen::VectorXd> x(xi.at(p), d);
      Map<const EMat> D(Dth[ia].at(p), d, d);
      EMat P = EMat::Identity(d, d) - x * x.transpose();
      Map<EMat>(Ba.at(p), d, d) = P * D * P;
    }
    B.push_back(std::move(Ba));
  }

  // S = sum_a D_a B_a  (unsandwiched; its D-block is the rough Laplacian).
  Field S(g, d * d);
  for (size_t ia = 0; ia < axes.size(); ++ia) {
    Field dB = partial(B[ia], axes[ia]);
    S.axpy(1.0, dB);
  }
  Field lap_xi = laplacian(xi);

  RhsEval out;
  out.k.emplace_back(g, d);      // xi_dot
  out.k.emplace_back(g, d * d);  // theta_dot
  if (densities) {
    out.eps = Field(g, 1);
    out.kappa = Field(g, 1);
    add_grad_sq(xi, out.eps, 0.5);
    for (const Field& Ba : B)
      for (long p = 0; p < n; ++p) {
        const double* b = Ba.at(p);
        double acc = 0.0;
        for (int c = 0; c < d * d; ++c) acc += b[c] * b[c];
        out.eps.v[p] += 0.125 * acc;
      }
  }

  for (long p = 0; p < n; ++p) {
    Map<const Eigen::VectorXd> x(xi.at(p), d);
    Map<const EMat> Th(th.at(p), d, d);
    Map<const EMat> Sm(S.at(p), d, d);
    EMat P = EMat::Identity(d, d) - x * x.transpose();

    EMat LJ = P * Sm * P;
    EMat RJ = 0.5 * (LJ + Th * LJ * Th);

    Eigen::VectorXd xd = Map<const Eigen::VectorXd>(lap_xi.at(p), d);
    xd += 0.5 * (Th * (Sm * x));
    for (size_t ia = 0; ia < axes.size(); ++ia) {
      Map<const EMat> Ba(B[ia].at(p), d, d);
      Map<const EMat> D(Dth[ia].at(p), d, d);
      xd -= 0.5 * (Ba * (P * (D * x)));
    }
    xd = P * xd;

    Eigen::VectorXd w = -(Th * xd);
    EMat thd = RJ + w * x.transpose() - x * w.transpose();

    Map<Eigen::VectorXd>(out.k[0].at(p), d) = xd;
    Map<EMat>(out.k[1].at(p), d, d) = thd;
    if (densities) out.kappa.v[p] = 0.125 * RJ.squaredNorm() + 0.5 * xd.squaredNorm();
  }
  out.has_densities = densities;
  return out;
}

inline RhsEval g2_rhs(const FlowState& s, bool densities) {
  const Field& phi = s.f[0];
  Field psi = hodge_field(phi);
  Field T = full_torsion(phi, psi);
  Field divT = torsion_divergence(T);
  RhsEval out;
  out.k.push_back(g2_rhs_from_divergence(divT, psi));
  if (densities) {
    out.eps = g2_eps_field(T);
    out.kappa = g2_kappa_field(divT);
    out.has_densities = true;
  }
  return out;
}

}  // namespace detail

inline RhsEval flow_rhs(const FlowState& s, bool densities = true) {
  switch (s.kind) {
    case Kind::Parallelism:
      return s.s3 ? detail::s3_rhs(s, densities) : detail::frames_rhs(s, densities);
    case Kind::ACS: return detail::acs_rhs(s, densities);
    case Kind::ACtS: return detail::acts_rhs(s, densities);
    case Kind::G2: return detail::g2_rhs(s, densities);
  }
  throw Error("flow_rhs: bad kind");
}

/// Pointwise pairing of two tangents in the metric that makes the flow the
/// exact gradient flow of the discrete energy: integrate to get G(a, b).
/// For G2 both arguments are vertical 3-form fields.
inline double flow_metric_pairing(const FlowState& s, const std::vector<Field>& a,
                                  const std::vector<Field>& b) {
  const long n = s.grid.points();
  double acc = 0.0;
  switch (s.kind) {
    case Kind::Parallelism:
    case Kind::ACS: {
      const double w = (s.kind == Kind::Parallelism) ? 0.5 : 0.25;
      for (long p = 0; p < n; ++p) {
        const double* x = a[0].at(p);
        const double* y = b[0].at(p);
        double dot = 0.0;
        for (int c = 0; c < a[0].ncomp; ++c) dot += x[c] * y[c];
        acc += w * dot;
      }
      break;
    }
    case Kind::ACtS: {
      const int d = s.d;
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::VectorXd> x(s.f[0].at(p), d);
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d) - x * x.transpose();
        Eigen::Map<const Eigen::MatrixXd> A1(a[1].at(p), d, d), B1(b[1].at(p), d, d);
        const Eigen::MatrixXd Ad = P * A1 * P, Bd = P * B1 * P;
        acc += 0.25 * (Ad.array() * Bd.array()).sum();
        Eigen::Map<const Eigen::VectorXd> ax(a[0].at(p), d), bx(b[0].at(p), d);
        acc += ax.dot(bx);
      }
      break;
    }
    case Kind::G2: {
      for (long p = 0; p < n; ++p) {
        const double* x = a[0].at(p);
        const double* y = b[0].at(p);
        double dot = 0.0;
        for (int c = 0; c < 35; ++c) dot += x[c] * y[c];
        acc += dot / 6.0;
      }
      break;
    }
  }
  return acc * s.grid.cell_volume();
}

// ---------------------------------------------------------------------------
// retraction and constraint monitoring
// ---------------------------------------------------------------------------

/// Orthogonal polar factor by Newton iteration X <- (X + X^{-T})/2.
/// Quadratic convergence near the orthogonal group; preserves skewness.
template <typename Mat>
inline void polar_newton(Mat& X) {
  for (int it = 0; it < 50; ++it) {
    Mat next = 0.5 * (X + X.inverse().transpose().eval());
    const double delta = (next - X).cwiseAbs().maxCoeff();
    X = next;
    if (delta < 1e-15) break;
  }
}

/// Pre-retraction constraint violation, max over the grid.
inline double constraint_defect(const FlowState& s) {
  const long n = s.grid.points();
  double worst = 0.0;
  switch (s.kind) {
    case Kind::Parallelism: {
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::Matrix3d> S(s.f[0].at(p));
        worst = std::max(worst, (S.transpose() * S - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
      }
      break;
    }
    case Kind::ACS: {
      const int d = s.d;
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::MatrixXd> J(s.f[0].at(p), d, d);
        const double skew = (J + J.transpose()).cwiseAbs().maxCoeff();
        const double sq = (J * J + Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
        worst = std::max({worst, skew, sq});
      }
      break;
    }
    case Kind::ACtS: {
      const int d = s.d;
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::VectorXd> x(s.f[0].at(p), d);
        Eigen::Map<const Eigen::MatrixXd> Th(s.f[1].at(p), d, d);
        const double unit = std::abs(x.norm() - 1.0);
        const double kerx = (Th * x).cwiseAbs().maxCoeff();
        const double skew = (Th + Th.transpose()).cwiseAbs().maxCoeff();
        const double sq =
            (Th * Th + Eigen::MatrixXd::Identity(d, d) - x * x.transpose()).cwiseAbs().maxCoeff();
        worst = std::max({worst, unit, kerx, skew, sq});
      }
      break;
    }
    case Kind::G2:
      break;  // monitored through the induced metric instead
  }
  return worst;
}

/// Per-point projection back onto the structure constraint set.
/// Parallelism: polar projection onto SO(3). ACS: skew-symmetrize then
/// polar-normalize. ACtS: normalize xi, rebuild theta's blocks, polar on
/// the distribution. G2: no retraction (drift is monitored, not repaired).
inline void retract_state(FlowState& s) {
  const long n = s.grid.points();
  switch (s.kind) {
    case Kind::Parallelism: {
      for (long p = 0; p < n; ++p) {
        Eigen::Map<Eigen::Matrix3d> S(s.f[0].at(p));
        Eigen::Matrix3d X = S;
        polar_newton(X);
        S = X;
      }
      break;
    }
    case Kind::ACS: {
      const int d = s.d;
      for (long p = 0; p < n; ++p) {
        Eigen::Map<Eigen::MatrixXd> J(s.f[0].at(p), d, d);
        Eigen::MatrixXd X = 0.5 * (J - J.transpose().eval());
        polar_newton(X);
        J = X;
      }
      break;
    }
    case Kind::ACtS: {
      const int d = s.d;
      for (long p = 0; p < n; ++p) {
        Eigen::Map<Eigen::VectorXd> x(s.f[0].at(p), d);
        x /= x.norm();
        Eigen::Map<Eigen::MatrixXd> Th(s.f[1].at(p), d, d);
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d) - x * x.transpose();
        Eigen::MatrixXd A = P * (0.5 * (Th - Th.transpose().eval())) * P;
        Eigen::MatrixXd M = A + x * x.transpose();
        polar_newton(M);
        Th = M - x * x.transpose();
      }
      break;
    }
    case Kind::G2:
      break;
  }
}

// ---------------------------------------------------------------------------
// stepping
// ---------------------------------------------------------------------------

struct StepperConfig {
  Scheme scheme = Scheme::RK4;
  double dt = 0.0;  // 0: derive from the CFL bound
  double cfl = 0.9;
  long max_steps = 10000;
  double stop_tolerance = 1e-8;
  double repair_tol = 1e-6;
  double drift_tol = 1e-3;
  long drift_interval = 1;
  double blowup_factor = 1e6;
  long sample_interval = 10;
  long snapshot_interval = 0;
};

/// Largest wide-stencil Laplacian eigenvalue magnitude on the grid.
inline double heat_spectral_bound(const GridSpec& g) {
  double rho = 0.0;
  for (int a = 0; a < g.dim; ++a)
    if (g.active[a]) rho += 1.0 / (g.h[a] * g.h[a]);
  return rho;
}

/// Spectral bound of the linearized G2 right side at the constant phi0
/// field, normalized by the heat bound; measured once per grid by power
/// iteration and used as the diffusion constant Lambda in the CFL rule.
inline double g2_lambda_estimate(const GridSpec& g, uint64_t seed = 2024) {
  FlowState s;
  s.kind = Kind::G2;
  s.grid = g;
  s.d = 7;
  s.f.emplace_back(g, 35);
  const auto& c = G2Constants::get();
  s.f[0].fill(c.phi0().data());

  SplitMix64 rng(seed);
  Field v(g, 35);
  const long n = g.points();
  double V[7], out[35];
  for (long p = 0; p < n; ++p) {
    for (int i = 0; i < 7; ++i) V[i] = rng.next_sym();
    interior_v4_raw(V, c.psi0().data(), out);
    for (int r = 0; r < 35; ++r) v.at(p)[r] = out[r];
  }
  const double eps_lin = 1e-6;
  double rho = 0.0;
  FlowState pert = s;
  for (int it = 0; it < 25; ++it) {
    double nv = 0.0;
    for (double x : v.v) nv += x * x;
    nv = std::sqrt(nv);
    if (nv == 0.0) break;
    v.scale(1.0 / nv);
    pert.f[0] = s.f[0];
    pert.f[0].axpy(eps_lin, v);
    RhsEval r = detail::g2_rhs(pert, false);
    r.k[0].scale(1.0 / eps_lin);
    double nr = 0.0;
    for (double x : r.k[0].v) nr += x * x;
    rho = std::sqrt(nr);
    v = r.k[0];
  }
  const double heat = heat_spectral_bound(g);
  return heat > 0.0 ? rho / heat : 1.0;
}

/// dt <= cfl * h^2 / (2 n Lambda), expressed through the spectral bound so
/// that unequal spacings are handled; Lambda = 1 for frames, J, xi.
inline double cfl_bound(const GridSpec& g, double cfl, double lambda) {
  const double rho = heat_spectral_bound(g);
  if (rho == 0.0) return 1e300;  // homogeneous model: plain ODE
  return cfl / (2.0 * lambda * rho);
}

struct StepResult {
  double pre_retraction_defect = 0.0;
};

/// One explicit step from a precomputed k1 = flow_rhs(state). Advances in
/// place, checks finiteness and constraint repair, applies the retraction.
inline StepResult step(FlowState& s, const StepperConfig& cfg, double dt, const RhsEval& k1) {
  auto add_scaled = [](FlowState& dst, const std::vector<Field>& k, double a) {
    for (size_t i = 0; i < dst.f.size(); ++i) dst.f[i].axpy(a, k[i]);
  };
  if (cfg.scheme == Scheme::Euler) {
    add_scaled(s, k1.k, dt);
  } else {
    FlowState u2 = s;
    add_scaled(u2, k1.k, 0.5 * dt);
    RhsEval k2 = flow_rhs(u2, false);
    FlowState u3 = s;
    add_scaled(u3, k2.k, 0.5 * dt);
    RhsEval k3 = flow_rhs(u3, false);
    FlowState u4 = s;
    add_scaled(u4, k3.k, dt);
    RhsEval k4 = flow_rhs(u4, false);
    add_scaled(s, k1.k, dt / 6.0);
    add_scaled(s, k2.k, dt / 3.0);
    add_scaled(s, k3.k, dt / 3.0);
    add_scaled(s, k4.k, dt / 6.0);
  }
  for (const Field& f : s.f)
    if (!f.finite()) throw NonFinite("step: non-finite field values");
  StepResult r;
  r.pre_retraction_defect = constraint_defect(s);
  if (r.pre_retraction_defect > cfg.repair_tol)
    throw ConstraintBlowup("step: constraint repair " + std::to_string(r.pre_retraction_defect) +
                           " exceeds repair_tol");
  retract_state(s);
  s.t += dt;
  return r;
}

/// Refreshes the cached densities and integrals from an evaluation.
inline void update_caches(FlowState& s, const RhsEval& r) {
  s.eps = r.eps;
  s.kappa = r.kappa;
  const double vol = s.grid.cell_volume();
  double E = 0.0, K = 0.0, em = 0.0, km = 0.0;
  for (double x : r.eps.v) {
    E += x;
    em = std::max(em, x);
  }
  for (double x : r.kappa.v) {
    K += x;
    km = std::max(km, x);
  }
  s.E = E * vol;
  s.K = K * vol;
  s.eps_max = em;
  s.tau_inf = std::sqrt(2.0 * km);
}

}  // namespace hsf
