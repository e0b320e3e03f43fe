#pragma once

#include <functional>

#include "hsf/diagnostics.hpp"
#include "hsf/flows.hpp"

namespace hsf {

struct EntropySettings {
  bool enabled = false;
  double horizon = 1.0;
  std::vector<double> center;  // empty: domain midpoint
};

struct RunHooks {
  std::function<void(const DiagnosticsRecord&)> on_record;
  std::function<void(const FlowState&, long step)> on_snapshot;
};

struct RunResult {
  Outcome outcome = Outcome::MaxSteps;
  FlowState final_state;
  std::vector<DiagnosticsRecord> series;
  long steps = 0;
  double dt = 0.0;
  double lambda = 1.0;  // diffusion constant used in the CFL rule
};

/// Drives the harmonic section flow from `s` until convergence
/// (|tau^V|_inf < stop_tolerance), max_steps, or blow-up detection
/// (eps_max exceeding blowup_factor * initial eps_max). Emits one
/// diagnostics record per sample interval plus the initial and final states.
/// Throws CflViolation / NonFinite / ConstraintBlowup / MetricDrift.
inline RunResult run_flow(FlowState s, const StepperConfig& cfg, const EntropySettings& ent = {},
                          const RunHooks& hooks = {}) {
  RunResult res;
  res.lambda = (s.kind == Kind::G2) ? g2_lambda_estimate(s.grid) : 1.0;
  const double bound = cfl_bound(s.grid, cfg.cfl, res.lambda);
  double dt = cfg.dt;
  if (dt <= 0.0) {
    dt = std::min(bound, 0.05);
    if (s.s3) dt = 0.01;
  } else if (dt > bound) {
    throw CflViolation("run_flow: dt exceeds the CFL bound " + std::to_string(bound));
  }
  res.dt = dt;

  std::vector<double> center = ent.center;
  if (ent.enabled && center.empty()) {
    center.resize(s.grid.dim);
    for (int a = 0; a < s.grid.dim; ++a) center[a] = 0.5 * s.grid.length(a);
  }

  double eps0_bar = -1.0;
  long last_recorded = -1;

  auto record = [&](long step_no) {
    if (step_no == last_recorded) return;
    last_recorded = step_no;
    DiagnosticsRecord r;
    r.t = s.t;
    r.E = s.E;
    r.K = s.K;
    r.eps_max = s.eps_max;
    if (s.kind == Kind::G2) {
      Field psi = hodge_field(s.f[0]);
      s.drift = metric_drift(s.f[0], psi);
      Field T = full_torsion(s.f[0], psi);
      r.residual_harmonic_map = harmonic_map_residual(T).max_abs();
    } else {
      s.drift = constraint_defect(s);
    }
    r.constraint_drift = s.drift;
    if (ent.enabled && s.t < ent.horizon) r.entropy_F = entropy(s.eps, s.t, ent.horizon, center);
    res.series.push_back(r);
    if (hooks.on_record) hooks.on_record(r);
  };

  long step_no = 0;
  for (;;) {
    RhsEval k1 = flow_rhs(s, true);
    update_caches(s, k1);
    if (eps0_bar < 0.0) eps0_bar = s.eps_max;

    if (s.tau_inf < cfg.stop_tolerance) {
      record(step_no);
      res.outcome = Outcome::Converged;
      break;
    }
    if (eps0_bar > 0.0 && s.eps_max > cfg.blowup_factor * eps0_bar) {
      record(step_no);
      res.outcome = Outcome::Blowup;
      break;
    }
    if (step_no >= cfg.max_steps) {
      record(step_no);
      res.outcome = Outcome::MaxSteps;
      break;
    }
    if (cfg.sample_interval > 0 && step_no % cfg.sample_interval == 0) record(step_no);
    if (cfg.snapshot_interval > 0 && step_no % cfg.snapshot_interval == 0 && hooks.on_snapshot)
      hooks.on_snapshot(s, step_no);

    step(s, cfg, dt, k1);
    ++step_no;

    if (s.kind == Kind::G2 && cfg.drift_interval > 0 && step_no % cfg.drift_interval == 0) {
      Field psi = hodge_field(s.f[0]);
      s.drift = metric_drift(s.f[0], psi);
      if (s.drift > cfg.drift_tol)
        throw MetricDrift("run_flow: metric drift " + std::to_string(s.drift) + " exceeds drift_tol");
    }
  }
  res.steps = step_no;
  res.final_state = std::move(s);
  return res;
}

}  // namespace hsf
