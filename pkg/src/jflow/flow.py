"""Time integration of the flow and its runtime monitors.

The flow evolves a potential phi on the space of positive forms
chi = chi0 + complex_hessian(phi) by

    dphi/dt = (1/2) (1 - Lambda_chi(omega)),      phi(0) = 0,

for a background normalized so the class ratio is 1/2.  Time stepping is
classical four-stage Runge-Kutta with the step chosen from the spectral
radius of the parabolic linearization.  Positivity of chi is re-verified
at every stage; a failure aborts rather than clamps, because under the
convergence hypothesis positivity persists and a violation means either a
bad background or a numerical instability.

The run loop samples a diagnostic record at a fixed step interval and
counts violations of each monitored inequality:

  * sup and inf of dphi/dt must be monotone between samples,
  * Lambda_chi(omega) must stay inside its initial envelope,
  * chi must stay above omega / sup(Lambda_chi0(omega)),
  * the I functional must stay at zero, the J functional must not increase,
  * integral(dphi/dt * chi^2) must stay at zero.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import FlowDomainError, DecayFitError, ValidationError
from .functionals import (DiagnosticsRecord, diagnostics, fit_decay_rate,
                          gauge_residual, recipe_a, epsilon_margin)
from .grid import complex_hessian
from .hermitian import (Herm2, det, eigenvalues, h_tensor, min_eigenvalue,
                        mixed_det, positive_definite_mask)
from .model import SurfaceModel

# Slack budgets for the monitored inequalities.  The maximum-principle
# slack scales with the initial oscillation; the others are absolute.
MAX_PRINCIPLE_SLACK_FACTOR = 1e-8
ENVELOPE_SLACK = 1e-6
LOWER_BOUND_SLACK = 1e-8
I_CONSERVATION_FACTOR = 1e-8
J_MONOTONE_SLACK = 1e-10
GAUGE_TOL = 1e-9

# The step size is re-derived from the current state every this many
# steps; the linearization coefficients drift slowly.
DT_REEVAL_INTERVAL = 16

MAX_DT_HALVINGS = 10


@dataclass(frozen=True)
class FlowState:
    """Flow time, potential, and coherent caches of chi and dphi/dt."""

    t: float
    phi: np.ndarray
    chi: Herm2
    phidot: np.ndarray


def _chi_and_rhs(model: SurfaceModel, phi: np.ndarray, t=None):
    """chi field and flow right-hand side; verifies positivity of chi."""
    chi = model.chi0 + complex_hessian(phi)
    mask = positive_definite_mask(chi)
    if not np.all(mask):
        point = np.unravel_index(int(np.argmin(mask)), model.shape)
        lo, hi = eigenvalues(chi)
        lo_p = float(np.asarray(lo)[point])
        hi_p = float(np.asarray(hi)[point])
        raise FlowDomainError(
            f"chi lost positivity at grid point {point} "
            f"(eigenvalues {lo_p:.6e}, {hi_p:.6e})",
            point=point, eigenvalues=(lo_p, hi_p), t=t)
    rhs = 0.5 * (1.0 - mixed_det(model.G, chi) / det(chi))
    return chi, rhs


def flow_rhs(model: SurfaceModel, phi: np.ndarray) -> np.ndarray:
    """dphi/dt = (1/2)(1 - Lambda_chi(omega)) for the given potential."""
    if not model.normalized:
        raise ValidationError("flow requires a normalized background")
    return _chi_and_rhs(model, phi)[1]


def make_state(model: SurfaceModel, phi: np.ndarray, t: float = 0.0) -> FlowState:
    """Build a coherent state (recomputes the chi and dphi/dt caches)."""
    chi, rhs = _chi_and_rhs(model, phi, t)
    return FlowState(t=float(t), phi=phi, chi=chi, phidot=rhs)


def stable_dt(model: SurfaceModel, state: FlowState, sigma: float = 0.2) -> float:
    """Stability-limited explicit step for the parabolic linearization.

    dt = sigma * min(dx^2) / (pi^2 * max eigenvalue of chi^{-1} G chi^{-1}),
    with the maximum taken over the grid.
    """
    if not (0.0 < sigma <= 1.0):
        raise ValidationError(f"sigma must be in (0, 1], got {sigma}")
    h = h_tensor(state.chi, model.G)
    lam_max = float(np.max(eigenvalues(h)[1]))
    min_dx2 = min(1.0 / (n * n) for n in model.shape)
    return sigma * min_dx2 / (math.pi ** 2 * lam_max)


def step_rk4(model: SurfaceModel, state: FlowState, dt: float) -> FlowState:
    """One classical Runge-Kutta step; every stage re-verifies positivity."""
    if dt <= 0.0:
        raise ValidationError(f"dt must be positive, got {dt}")
    t, phi = state.t, state.phi
    k1 = state.phidot
    _, k2 = _chi_and_rhs(model, phi + (0.5 * dt) * k1, t)
    _, k3 = _chi_and_rhs(model, phi + (0.5 * dt) * k2, t)
    _, k4 = _chi_and_rhs(model, phi + dt * k3, t)
    phi_new = phi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return make_state(model, phi_new, t + dt)


@dataclass
class RunResult:
    """Final state, sampled diagnostics and a flat scalar summary."""

    state: FlowState
    records: list
    summary: dict

    @property
    def converged(self) -> bool:
        return bool(self.summary["converged"])


def run(model: SurfaceModel, cfg, *, snapshot_sink=None, quiet=True) -> RunResult:
    """Integrate from phi = 0 until sup|dphi/dt| < tol_stop or t >= t_max.

    cfg provides sigma, tol_stop, t_max, sample_interval, snapshot_interval
    and a_override (see RunConfig).  snapshot_sink, when given, is called
    as snapshot_sink(step, state) at every snapshot interval.
    """
    if not model.normalized:
        raise ValidationError("run requires a normalized background")
    if cfg.tol_stop <= 0.0:
        raise ValidationError("tol_stop must be positive")
    if cfg.t_max < 0.0:
        raise ValidationError("t_max must be non-negative")
    if cfg.sample_interval < 1:
        raise ValidationError("sample_interval must be >= 1")

    wall_start = time.perf_counter()
    eps = epsilon_margin(model)
    a_value = cfg.a_override if cfg.a_override is not None else recipe_a(model)

    state = make_state(model, np.zeros(model.shape, dtype=np.float64), 0.0)
    rec = diagnostics(model, state, a_value)
    records = [rec]

    # Baselines fixed by the initial data.
    osc0 = rec.osc_phidot
    mp_slack = MAX_PRINCIPLE_SLACK_FACTOR * osc0
    env_lo = rec.inf_lambda_chi_omega - ENVELOPE_SLACK
    env_hi = rec.sup_lambda_chi_omega + ENVELOPE_SLACK
    sup0 = rec.sup_lambda_chi_omega
    lb_shift = Herm2(model.G.a11 / sup0, model.G.a22 / sup0,
                     model.G.a12 * (1.0 / sup0 + 0j))

    counters = {
        "violations_max_principle": 0,
        "violations_envelope": 0,
        "violations_lower_bound": 0,
        "violations_i_conservation": 0,
        "violations_j_monotonicity": 0,
        "violations_gauge": 0,
    }
    lower_bound_min = math.inf
    gauge_max = 0.0

    def check_sample(prev: DiagnosticsRecord, cur: DiagnosticsRecord,
                     cur_state: FlowState) -> None:
        nonlocal lower_bound_min, gauge_max
        if prev is not None:
            if cur.sup_phidot > prev.sup_phidot + mp_slack:
                counters["violations_max_principle"] += 1
            if cur.inf_phidot < prev.inf_phidot - mp_slack:
                counters["violations_max_principle"] += 1
            if cur.J > prev.J + J_MONOTONE_SLACK:
                counters["violations_j_monotonicity"] += 1
        if cur.sup_lambda_chi_omega > env_hi or cur.inf_lambda_chi_omega < env_lo:
            counters["violations_envelope"] += 1
        lb = float(np.min(min_eigenvalue(cur_state.chi - lb_shift)))
        lower_bound_min = min(lower_bound_min, lb)
        if lb < -LOWER_BOUND_SLACK:
            counters["violations_lower_bound"] += 1
        if abs(cur.I) > I_CONSERVATION_FACTOR * (1.0 + cur.sup_abs_phi):
            counters["violations_i_conservation"] += 1
        g = abs(gauge_residual(model, cur_state))
        gauge_max = max(gauge_max, g)
        if g > GAUGE_TOL:
            counters["violations_gauge"] += 1

    check_sample(None, rec, state)
    if snapshot_sink is not None and cfg.snapshot_interval > 0:
        snapshot_sink(0, state)

    converged = float(np.max(np.abs(state.phidot))) < cfg.tol_stop
    steps = 0
    dt = None
    steps_since_reeval = 0

    while not converged and state.t < cfg.t_max:
        if dt is None or steps_since_reeval >= DT_REEVAL_INTERVAL:
            dt = stable_dt(model, state, cfg.sigma)
            steps_since_reeval = 0
        state, dt, halved = _step_with_retries(model, state, dt)
        if halved:
            steps_since_reeval = DT_REEVAL_INTERVAL  # re-derive next step
        else:
            steps_since_reeval += 1
        steps += 1

        converged = float(np.max(np.abs(state.phidot))) < cfg.tol_stop
        stopping = converged or state.t >= cfg.t_max
        if steps % cfg.sample_interval == 0 or stopping:
            cur = diagnostics(model, state, a_value)
            check_sample(records[-1], cur, state)
            records.append(cur)
        if (snapshot_sink is not None and cfg.snapshot_interval > 0
                and steps % cfg.snapshot_interval == 0):
            snapshot_sink(steps, state)
        if not quiet and steps % 2000 == 0:
            print(f"[run] t={state.t:.4f} sup|dphi/dt|="
                  f"{float(np.max(np.abs(state.phidot))):.3e}")

    try:
        eta, r_squared = fit_decay_rate(
            [(r.t, r.osc_phidot) for r in records])
    except DecayFitError:
        eta, r_squared = None, None

    early_n = max(1, math.ceil(0.1 * len(records)))
    early = records[:early_n]
    final = records[-1]
    summary = {
        "converged": converged,
        "final_t": final.t,
        "final_sup_phidot": float(np.max(np.abs(state.phidot))),
        "final_criticality": max(abs(final.sup_lambda_chi_omega - 1.0),
                                 abs(final.inf_lambda_chi_omega - 1.0)),
        "steps": steps,
        "samples": len(records),
        "eta": eta,
        "r_squared": r_squared,
        "A": a_value,
        "epsilon": eps,
        "initial_osc_phidot": osc0,
        "initial_sup_lambda_chi_omega": sup0,
        "initial_inf_lambda_chi_omega": rec.inf_lambda_chi_omega,
        "lower_bound_min_eig": lower_bound_min,
        "gauge_max": gauge_max,
        "max_sup_lambda_omega_chi": max(r.sup_lambda_omega_chi for r in records),
        "early_max_sup_lambda_omega_chi": max(r.sup_lambda_omega_chi for r in early),
        "max_sup_abs_phi": max(r.sup_abs_phi for r in records),
        "early_max_sup_abs_phi": max(r.sup_abs_phi for r in early),
        "wall_time_seconds": time.perf_counter() - wall_start,
    }
    summary.update(counters)
    return RunResult(state=state, records=records, summary=summary)


def _step_with_retries(model: SurfaceModel, state: FlowState, dt: float):
    """Attempt a step, halving dt on positivity loss (at most 10 times)."""
    halved = False
    for _ in range(MAX_DT_HALVINGS + 1):
        try:
            return step_rk4(model, state, dt), dt, halved
        except FlowDomainError as err:
            last = err
            dt *= 0.5
            halved = True
    last.state = state
    raise last
