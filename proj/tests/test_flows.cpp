#include <catch2/catch_amalgamated.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "hsf/driver.hpp"
#include "hsf/flows.hpp"
#include "hsf/initial.hpp"

using namespace hsf;

namespace {

GridSpec t3(int n) { return GridSpec::torus(3, {n, n, n}, {2 * M_PI, 2 * M_PI, 2 * M_PI}); }
GridSpec t4(int n) { return GridSpec::torus(4, {n, n, n, n}, std::vector<double>(4, 2 * M_PI)); }
GridSpec t5(int n) { return GridSpec::torus(5, {n, n, n, n, n}, std::vector<double>(5, 2 * M_PI)); }
GridSpec t7_line(int n) {
  std::vector<int> sizes(7, 1);
  sizes[0] = n;
  sizes[1] = n;
  return GridSpec::torus(7, sizes, std::vector<double>(7, 2 * M_PI));
}

FlowState random_state(Kind kind, const GridSpec& g, double amp, uint64_t seed) {
  InitialCondition ic;
  ic.generator = "random";
  ic.amplitude = amp;
  ic.seed = seed;
  return make_initial(kind, false, g, ic);
}

/// Tangent direction at the state, built from a seeded random field and the
/// per-kind tangency conditions; used by the gradient-consistency oracle.
std::vector<Field> random_tangent(const FlowState& s, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Field> v;
  const long n = s.grid.points();
  switch (s.kind) {
    case Kind::Parallelism: {
      v.emplace_back(s.grid, 9);
      for (long p = 0; p < n; ++p) {
        Eigen::Matrix3d B;
        const double a = rng.next_sym(), b = rng.next_sym(), c = rng.next_sym();
        B << 0, a, b, -a, 0, c, -b, -c, 0;
        Eigen::Map<Eigen::Matrix3d>(v[0].at(p)) =
            Eigen::Map<const Eigen::Matrix3d>(s.f[0].at(p)) * B;
      }
      break;
    }
    case Kind::ACS: {
      const int d = s.d;
      v.emplace_back(s.grid, d * d);
      for (long p = 0; p < n; ++p) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = i + 1; j < d; ++j) {
            B(i, j) = rng.next_sym();
            B(j, i) = -B(i, j);
          }
        Eigen::Map<const Eigen::MatrixXd> J(s.f[0].at(p), d, d);
        Eigen::Map<Eigen::MatrixXd>(v[0].at(p), d, d) = 0.5 * (B + J * B * J);
      }
      break;
    }
    case Kind::ACtS: {
      const int d = s.d;
      v.emplace_back(s.grid, d);
      v.emplace_back(s.grid, d * d);
      for (long p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::VectorXd> x(s.f[0].at(p), d);
        Eigen::Map<const Eigen::MatrixXd> Th(s.f[1].at(p), d, d);
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d) - x * x.transpose();
        Eigen::VectorXd dx(d);
        for (int i = 0; i < d; ++i) dx[i] = rng.next_sym();
        dx = P * dx;
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = i + 1; j < d; ++j) {
            B(i, j) = rng.next_sym();
            B(j, i) = -B(i, j);
          }
        const Eigen::MatrixXd Bd = P * B * P;
        const Eigen::MatrixXd A = 0.5 * (Bd + Th * Bd * Th);
        const Eigen::VectorXd w = -(Th * dx);
        Eigen::Map<Eigen::VectorXd>(v[0].at(p), d) = dx;
        Eigen::Map<Eigen::MatrixXd>(v[1].at(p), d, d) =
            A + w * x.transpose() - x * w.transpose();
      }
      break;
    }
    case Kind::G2: {
      v.emplace_back(s.grid, 35);
      Field psi = hodge_field(s.f[0]);
      for (long p = 0; p < n; ++p) {
        double X[7];
        for (int i = 0; i < 7; ++i) X[i] = rng.next_sym();
        interior_v4_raw(X, psi.at(p), v[0].at(p));
      }
      break;
    }
  }
  return v;
}

double energy_of(const FlowState& s) {
  RhsEval r = flow_rhs(s, true);
  double E = 0.0;
  for (double x : r.eps.v) E += x;
  return E * s.grid.cell_volume();
}

/// Central-difference directional derivative of the discrete energy.
double fd_denergy(const FlowState& s, const std::vector<Field>& v, double h = 1e-5) {
  FlowState plus = s, minus = s;
  for (size_t i = 0; i < s.f.size(); ++i) {
    plus.f[i].axpy(h, v[i]);
    minus.f[i].axpy(-h, v[i]);
  }
  return (energy_of(plus) - energy_of(minus)) / (2.0 * h);
}

}  // namespace

TEST_CASE("constant structures are fixed points of every flow") {
  InitialCondition ic;
  {
    FlowState s = make_initial(Kind::Parallelism, false, t3(6), ic);
    CHECK(flow_rhs(s).k[0].max_abs() < 1e-10);
  }
  {
    FlowState s = make_initial(Kind::ACS, false, t4(4), ic);
    CHECK(flow_rhs(s).k[0].max_abs() < 1e-10);
  }
  {
    FlowState s = make_initial(Kind::ACtS, false, t5(3), ic);
    RhsEval r = flow_rhs(s);
    CHECK(r.k[0].max_abs() < 1e-10);
    CHECK(r.k[1].max_abs() < 1e-10);
  }
  {
    FlowState s = make_initial(Kind::G2, false, t7_line(6), ic);
    CHECK(flow_rhs(s).k[0].max_abs() < 1e-10);
  }
}

TEST_CASE("frame rhs is tangent to SO(3)") {
  FlowState s = random_state(Kind::Parallelism, t3(8), 0.4, 42);
  RhsEval r = flow_rhs(s);
  double worst = 0.0;
  for (long p = 0; p < s.grid.points(); ++p) {
    Eigen::Map<const Eigen::Matrix3d> S(s.f[0].at(p)), R(r.k[0].at(p));
    const Eigen::Matrix3d M = S.transpose() * R;
    worst = std::max(worst, (M + M.transpose()).cwiseAbs().maxCoeff());
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(S.col(i).dot(R.col(i))));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("acs rhs is skew and anticommutes with J") {
  FlowState s = random_state(Kind::ACS, t4(5), 0.3, 43);
  RhsEval r = flow_rhs(s);
  const int d = s.d;
  double worst = 0.0;
  for (long p = 0; p < s.grid.points(); ++p) {
    Eigen::Map<const Eigen::MatrixXd> J(s.f[0].at(p), d, d), R(r.k[0].at(p), d, d);
    worst = std::max(worst, (R + R.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (J * R + R * J).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("acts rhs tangency") {
  FlowState s = random_state(Kind::ACtS, t5(4), 0.25, 44);
  RhsEval r = flow_rhs(s);
  const int d = s.d;
  double worst = 0.0;
  for (long p = 0; p < s.grid.points(); ++p) {
    Eigen::Map<const Eigen::VectorXd> x(s.f[0].at(p), d), xd(r.k[0].at(p), d);
    Eigen::Map<const Eigen::MatrixXd> Th(s.f[1].at(p), d, d), Td(r.k[1].at(p), d, d);
    worst = std::max(worst, std::abs(x.dot(xd)));
    worst = std::max(worst, (Td + Td.transpose()).cwiseAbs().maxCoeff());
    // theta's evolution keeps theta xi = 0: theta_dot xi = -theta xi_dot
    worst = std::max(worst, (Td * x + Th * xd).cwiseAbs().maxCoeff());
    // the distribution block anticommutes with theta
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d) - x * x.transpose();
    const Eigen::MatrixXd RJ = P * Td * P;
    worst = std::max(worst, (RJ * Th + Th * RJ).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("acts decouples when xi is constant") {
  // theta varying only on the distribution of a fixed xi: the xi equation
  // right side vanishes and the J-part reduces to the acs projection.
  GridSpec g = t5(4);
  InitialCondition ic;
  FlowState s = make_initial(Kind::ACtS, false, g, ic);
  const int d = s.d;
  // rotate theta by a field of rotations that fix xi0 = e_d
  SplitMix64 rng(77);
  GridWalker w(g);
  do {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
    const double ang =
        0.3 * std::sin(2.0 * M_PI * w.coords()[0] / g.sizes[0] + 0.5 * w.coords()[1]);
    B(0, 1) = ang;
    B(1, 0) = -ang;  // rotation inside the distribution
    const Eigen::MatrixXd R = B.exp();
    Eigen::Map<Eigen::MatrixXd> Th(s.f[1].at(w.point()), d, d);
    Th = R * Th * R.transpose();
  } while (w.next());
  RhsEval r = flow_rhs(s);
  CHECK(r.k[0].max_abs() < 1e-12);
}

TEST_CASE("every rhs is the exact gradient of the discrete energy") {
  struct Case {
    Kind kind;
    GridSpec grid;
    double amp;
  };
  const Case cases[] = {
      {Kind::Parallelism, t3(6), 0.4},
      {Kind::ACS, t4(4), 0.3},
      {Kind::ACtS, t5(3), 0.3},
  };
  for (const auto& c : cases) {
    FlowState s = random_state(c.kind, c.grid, c.amp, 91 + static_cast<int>(c.kind));
    RhsEval r = flow_rhs(s);
    for (uint64_t k = 0; k < 3; ++k) {
      std::vector<Field> v = random_tangent(s, 100 + k);
      const double dE = fd_denergy(s, v);
      const double pair = flow_metric_pairing(s, r.k, v);
      CHECK(std::abs(dE + pair) < 2e-6 * std::max(1.0, std::abs(dE)));
    }
  }
}

TEST_CASE("g2 rhs matches the energy gradient at second order in h") {
  GridSpec g = t7_line(24);
  InitialCondition ic;
  ic.generator = "random";
  ic.amplitude = 0.02;
  ic.seed = 9;
  FlowState s = make_initial(Kind::G2, false, g, ic);
  RhsEval r = flow_rhs(s);
  double worst = 0.0;
  for (uint64_t k = 0; k < 3; ++k) {
    std::vector<Field> v = random_tangent(s, 300 + k);
    const double dE = fd_denergy(s, v);
    const double pair = flow_metric_pairing(s, r.k, v);
    worst = std::max(worst, std::abs(dE + pair) / std::max(1e-12, std::abs(dE)));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("retraction") {
  SECTION("feasible input unchanged") {
    FlowState s = random_state(Kind::Parallelism, t3(4), 0.5, 7);
    FlowState before = s;
    retract_state(s);
    before.f[0].axpy(-1.0, s.f[0]);
    CHECK(before.f[0].max_abs() < 1e-14);
  }
  SECTION("perturbed frame returns to SO(3), staying close") {
    FlowState s = random_state(Kind::Parallelism, t3(4), 0.5, 8);
    SplitMix64 rng(9);
    FlowState noisy = s;
    for (double& v : noisy.f[0].v) v += 1e-3 * rng.next_sym();
    FlowState repaired = noisy;
    retract_state(repaired);
    CHECK(constraint_defect(repaired) < 1e-12);
    double dist = 0.0;
    for (size_t i = 0; i < repaired.f[0].v.size(); ++i)
      dist = std::max(dist, std::abs(repaired.f[0].v[i] - noisy.f[0].v[i]));
    CHECK(dist <= 2e-3);

    // cross-check one point against the SVD polar factor
    Eigen::Map<const Eigen::Matrix3d> noisyA(noisy.f[0].at(0));
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(noisyA, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d polar = svd.matrixU() * svd.matrixV().transpose();
    Eigen::Map<const Eigen::Matrix3d> got(repaired.f[0].at(0));
    CHECK((polar - got).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("perturbed J returns to the skew-orthogonal set") {
    FlowState s = random_state(Kind::ACS, t4(3), 0.4, 10);
    SplitMix64 rng(11);
    for (double& v : s.f[0].v) v += 1e-3 * rng.next_sym();
    retract_state(s);
    CHECK(constraint_defect(s) < 1e-12);
  }
  SECTION("perturbed acts pair returns to the constraint set") {
    FlowState s = random_state(Kind::ACtS, t5(3), 0.3, 12);
    SplitMix64 rng(13);
    for (double& v : s.f[0].v) v += 1e-3 * rng.next_sym();
    for (double& v : s.f[1].v) v += 1e-3 * rng.next_sym();
    retract_state(s);
    CHECK(constraint_defect(s) < 1e-11);
  }
}

TEST_CASE("stepping") {
  StepperConfig cfg;
  SECTION("stationary input advances time only") {
    InitialCondition ic;
    FlowState s = make_initial(Kind::Parallelism, false, t3(4), ic);
    FlowState before = s;
    RhsEval k1 = flow_rhs(s);
    cfg.scheme = Scheme::Euler;
    step(s, cfg, 0.01, k1);
    CHECK(s.t == Catch::Approx(0.01));
    before.f[0].axpy(-1.0, s.f[0]);
    CHECK(before.f[0].max_abs() < 1e-13);
  }
  SECTION("euler vs rk4 differ at second order, halving dt halves the defect") {
    FlowState s0 = random_state(Kind::Parallelism, t3(6), 0.3, 21);
    auto euler_vs_rk4 = [&](double dt) {
      FlowState se = s0, sr = s0;
      StepperConfig c1;
      c1.scheme = Scheme::Euler;
      c1.repair_tol = 0.05;  // Euler drift per step is O(dt^2)
      step(se, c1, dt, flow_rhs(se));
      StepperConfig c2;
      c2.scheme = Scheme::RK4;
      step(sr, c2, dt, flow_rhs(sr));
      se.f[0].axpy(-1.0, sr.f[0]);
      return se.f[0].max_abs();
    };
    const double dt = 0.25 * cfl_bound(s0.grid, 1.0, 1.0);
    const double d1 = euler_vs_rk4(dt);
    const double d2 = euler_vs_rk4(dt / 2.0);
    CHECK(d1 / d2 == Catch::Approx(4.0).epsilon(0.2));  // defect is O(dt^2)
  }
  SECTION("one euler step under the CFL bound decreases the energy") {
    for (uint64_t seed : {31, 32, 33}) {
      FlowState s = random_state(Kind::Parallelism, t3(8), 0.5, seed);
      RhsEval k1 = flow_rhs(s);
      update_caches(s, k1);
      const double E0 = s.E;
      StepperConfig c;
      c.scheme = Scheme::Euler;
      c.repair_tol = 0.05;
      step(s, c, cfl_bound(s.grid, 0.9, 1.0), k1);
      RhsEval k2 = flow_rhs(s);
      update_caches(s, k2);
      CHECK(s.E < E0);
    }
  }
  SECTION("energy decreases for random smooth J fields") {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      FlowState s = random_state(Kind::ACS, t4(6), 0.35, seed);
      RhsEval k1 = flow_rhs(s);
      update_caches(s, k1);
      const double E0 = s.E;
      StepperConfig c;
      c.scheme = Scheme::Euler;
      c.repair_tol = 0.05;
      step(s, c, cfl_bound(s.grid, 0.9, 1.0), k1);
      RhsEval k2 = flow_rhs(s);
      update_caches(s, k2);
      CHECK(s.E < E0);
    }
  }
}

TEST_CASE("g2 diffusion constant is near one at phi0") {
  const double lam = g2_lambda_estimate(t7_line(12));
  CHECK(lam == Catch::Approx(1.0).epsilon(0.1));
}

TEST_CASE("run_flow outcomes") {
  SECTION("small frame perturbation relaxes to a constant frame") {
    InitialCondition ic;
    ic.generator = "random";
    ic.amplitude = 0.05;
    ic.seed = 3;
    FlowState s = make_initial(Kind::Parallelism, false, t3(8), ic);
    StepperConfig cfg;
    cfg.scheme = Scheme::RK4;
    cfg.max_steps = 20000;
    cfg.stop_tolerance = 1e-10;
    RunResult res = run_flow(std::move(s), cfg);
    CHECK(res.outcome == Outcome::Converged);
    CHECK(res.series.front().E > 0.0);
    CHECK(res.final_state.E < 1e-8 * res.series.front().E);
  }
  SECTION("fixed point converges at step 0") {
    InitialCondition ic;
    FlowState s = make_initial(Kind::ACS, false, t4(3), ic);
    StepperConfig cfg;
    RunResult res = run_flow(std::move(s), cfg);
    CHECK(res.outcome == Outcome::Converged);
    CHECK(res.steps == 0);
  }
  SECTION("dt above the CFL bound is rejected") {
    InitialCondition ic;
    ic.generator = "random";
    ic.amplitude = 0.1;
    FlowState s = make_initial(Kind::Parallelism, false, t3(8), ic);
    StepperConfig cfg;
    cfg.dt = 10.0 * cfl_bound(s.grid, cfg.cfl, 1.0);
    CHECK_THROWS_AS(run_flow(std::move(s), cfg), CflViolation);
  }
  SECTION("an unstable explicit step is caught as NonFinite or blowup") {
    InitialCondition ic;
    ic.generator = "random";
    ic.amplitude = 0.8;
    ic.cutoff = 3;
    FlowState s = make_initial(Kind::Parallelism, false, t3(8), ic);
    StepperConfig cfg;
    cfg.scheme = Scheme::Euler;
    cfg.cfl = 9.0;  // user override defeats the safety factor
    cfg.dt = 0.9 * cfl_bound(s.grid, 9.0, 1.0);
    cfg.max_steps = 4000;
    bool caught = false;
    try {
      RunResult res = run_flow(std::move(s), cfg);
      caught = (res.outcome == Outcome::Blowup);
    } catch (const NonFinite&) {
      caught = true;
    } catch (const ConstraintBlowup&) {
      caught = true;
    }
    CHECK(caught);
  }
}
