"""Energy functionals and the per-sample diagnostic record.

Two functionals are tracked along the flow in their closed n = 2 forms:

    J(phi) = 1/2 integral( phi * omega ^ (chi0 + chi) )
    I(phi) = 1/6 integral( phi * (chi0^2 + chi ^ chi0 + chi^2) )

J is the energy the flow descends; I is the volume-type functional that
stays identically zero along the flow and fixes the additive gauge of phi.

The diagnostic record operationalizes every a-priori estimate as a
measured quantity: the extremes of the time derivative of phi and of the
trace Lambda_chi(omega) (maximum-principle envelope), the trace
Lambda_omega(chi) and the exponential test quantity
Q = log Lambda_omega(chi) - A*phi (second-order bound), the smallest
eigenvalue of chi (lower bound on the metric), and the sup norm of phi
(zero-order bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DecayFitError, HypothesisViolationError
from .grid import complex_hessian, integrate, sup_inf
from .hermitian import (Herm2, det, min_eigenvalue, mixed_det,
                        positive_definite_mask, trace_contract)
from .model import SurfaceModel

#: Fixed column order of the per-sample CSV emitted by run commands.
CSV_COLUMNS = (
    "t", "sup_phidot", "inf_phidot", "osc_phidot", "J", "I",
    "sup_lambda_chi_omega", "inf_lambda_chi_omega", "sup_lambda_omega_chi",
    "min_eig_chi", "sup_abs_phi", "sup_Q",
)

#: Oscillation samples at or below this floor are roundoff, not signal.
OSC_FLOOR = 1e-14


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One sampled row of monitored quantities along a run."""

    t: float
    sup_phidot: float
    inf_phidot: float
    osc_phidot: float
    J: float
    I: float
    sup_lambda_chi_omega: float
    inf_lambda_chi_omega: float
    sup_lambda_omega_chi: float
    min_eig_chi: float
    sup_abs_phi: float
    sup_Q: float

    def row(self):
        return tuple(getattr(self, name) for name in CSV_COLUMNS)


def j_functional(model: SurfaceModel, phi, chi: Herm2 = None) -> float:
    """Energy descended by the flow: 1/2 integral(phi * omega^(chi0+chi))."""
    if chi is None:
        chi = model.chi0 + complex_hessian(phi)
    return 0.5 * integrate(phi * mixed_det(model.G, model.chi0 + chi))


def i_functional(model: SurfaceModel, phi, chi: Herm2 = None) -> float:
    """Gauge functional, conserved (= 0) along the flow."""
    if chi is None:
        chi = model.chi0 + complex_hessian(phi)
    density = (2.0 * det(model.chi0) + mixed_det(chi, model.chi0)
               + 2.0 * det(chi))
    return integrate(phi * density) / 6.0


def epsilon_margin(model: SurfaceModel, *, tol: float = 1e-12) -> float:
    """Largest eps in (0, 1/3) with chi0 >= (1 + 3 eps) omega on the grid.

    Found by bisection on the pointwise minimum eigenvalue of
    chi0 - (1 + 3 eps) omega, mirroring how the exponent of the
    second-order bound is constructed from the initial data.
    """
    g = Herm2(model.G.a11, model.G.a22, model.G.a12 * (1.0 + 0j))

    def admissible(eps: float) -> bool:
        shifted = model.chi0 - g * (1.0 + 3.0 * eps)
        return bool(np.all(positive_definite_mask(shifted)))

    if not admissible(0.0):
        raise HypothesisViolationError(
            "chi0 - omega is not positive definite on the grid")
    hi_cap = 1.0 / 3.0 - 1e-9
    if admissible(hi_cap):
        return hi_cap
    lo, hi = 0.0, hi_cap
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def recipe_a(model: SurfaceModel) -> float:
    """Default exponent A for the Q diagnostic.

    A = C0 / eps where C0 bounds the curvature of omega from below.  The
    background here is flat, so C0 = 0 and the recipe degenerates to
    A = 0; eps is still computed so that a non-admissible background is
    rejected loudly.
    """
    epsilon_margin(model)
    curvature_bound = 0.0  # flat torus
    return curvature_bound


def diagnostics(model: SurfaceModel, state, a_value: float) -> DiagnosticsRecord:
    """Evaluate the full diagnostic record for a coherent flow state."""
    chi = state.chi
    lam_chi_omega = trace_contract(chi, model.G)
    lam_omega_chi = trace_contract(model.G, chi)
    inf_pd, sup_pd = sup_inf(state.phidot)
    inf_lco, sup_lco = sup_inf(lam_chi_omega)
    q = np.log(lam_omega_chi) - a_value * state.phi
    return DiagnosticsRecord(
        t=float(state.t),
        sup_phidot=sup_pd,
        inf_phidot=inf_pd,
        osc_phidot=sup_pd - inf_pd,
        J=j_functional(model, state.phi, chi),
        I=i_functional(model, state.phi, chi),
        sup_lambda_chi_omega=sup_lco,
        inf_lambda_chi_omega=inf_lco,
        sup_lambda_omega_chi=float(np.max(lam_omega_chi)),
        min_eig_chi=float(np.min(min_eigenvalue(chi))),
        sup_abs_phi=float(np.max(np.abs(state.phi))),
        sup_Q=float(np.max(q)),
    )


def gauge_residual(model: SurfaceModel, state) -> float:
    """integral(phidot * chi^2); identically zero along the flow."""
    return integrate(state.phidot * 2.0 * det(state.chi))


def fit_decay_rate(series):
    """Decay rate of an oscillation series by a semilog line fit.

    series is a sequence of (t, osc) pairs.  Samples with osc at the
    roundoff floor are dropped, the fit uses only the final half of the
    qualifying samples (the decay is asymptotic; early transients would
    corrupt the slope), and the returned rate is positive for decay.

    Returns (eta, r_squared).
    """
    qualifying = [(t, osc) for t, osc in series if osc > OSC_FLOOR]
    if len(qualifying) < 10:
        raise DecayFitError(
            f"need >= 10 samples above {OSC_FLOOR:g}, got {len(qualifying)}")
    tail = qualifying[len(qualifying) // 2:]
    t = np.array([p[0] for p in tail])
    y = np.log(np.array([p[1] for p in tail]))
    slope, intercept = np.polyfit(t, y, 1)
    fitted = slope * t + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    scale = max(1.0, float(np.sum(y ** 2)))
    if ss_tot <= 1e-20 * scale:
        # flat series: a perfect fit up to roundoff counts as exact
        r_squared = 1.0 if ss_res <= 1e-20 * scale else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    eta = -float(slope)
    if math.isclose(eta, 0.0, abs_tol=1e-15):
        eta = 0.0
    return eta, r_squared
