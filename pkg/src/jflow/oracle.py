"""Independent computation of the critical metric.

A critical point of the flow satisfies omega ^ chi = c chi^2.  For a
surface this quadratic equation completes the square: with
chi' = chi - omega / (2c) it becomes

    det( A0 + complex_hessian(phi) ) = det(G) / (4 c^2),
    A0 = chi0 - omega / (2c),

a complex Monge-Ampere equation for the potential.  Positivity of A0 is
exactly the convergence hypothesis divided by 2c, and the flow limit must
reproduce the solution computed here, which makes this solver the
convergence oracle for the time integrator.

The solver is a damped inexact Newton iteration.  Each linearized system
is solved by a Krylov method (the linearization is elliptic with adjugate
coefficients, hence symmetric up to aliasing) preconditioned with the
inverse of the constant-coefficient operator built from the grid average
of the coefficients, applied diagonally in Fourier space.  The Krylov
tolerance is capped at 1e-3 and tightened proportionally to the current
residual so that the terminal convergence stays quadratic.  The additive
gauge is fixed by keeping the potential mean-free; components the discrete
Hessian annihilates (the mean and pure-Nyquist modes) are pinned to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, lgmres

from .errors import (HypothesisViolationError, InconsistencyError,
                     NonConvergenceError, PositivityError, ValidationError)
from .grid import _hessian_multipliers, complex_hessian
from .hermitian import (Herm2, det, is_positive_definite, min_eigenvalue,
                        mixed_det, positive_definite_mask, trace_contract)
from .model import N_COMPLEX, SurfaceModel

LINEAR_RTOL_CAP = 1e-3
MAX_DAMPING_HALVINGS = 20


@dataclass(frozen=True)
class MAProblem:
    """Monge-Ampere data: shifted background form and right-hand side."""

    a0: Herm2           # chi0 - omega/(2c), pointwise positive definite
    target: np.ndarray  # right-hand side field, positive
    shape: tuple


@dataclass
class NewtonResult:
    phi: np.ndarray
    residuals: list     # sup-norm residual per iteration, starting at 0
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.residuals) - 1


def build_ma_problem(model: SurfaceModel) -> MAProblem:
    """Shift the background and form the constant right-hand side."""
    if not model.normalized:
        raise ValidationError("Monge-Ampere reduction requires a normalized model")
    inv2c = 1.0 / (2.0 * model.c)
    g = Herm2(model.G.a11, model.G.a22, model.G.a12 * (1.0 + 0j))
    a0 = model.chi0 - g * inv2c
    mask = positive_definite_mask(a0)
    if not np.all(mask):
        point = np.unravel_index(int(np.argmin(mask)), model.shape)
        lo = float(np.asarray(min_eigenvalue(a0))[point])
        raise HypothesisViolationError(
            "shifted background chi0 - omega/(2c) is not positive definite "
            f"at {point} (min eigenvalue {lo:.6e}); the convergence "
            "hypothesis fails")
    target_value = float(det(model.G)) * inv2c * inv2c
    target = np.full(model.shape, target_value, dtype=np.float64)
    return MAProblem(a0=a0, target=target, shape=model.shape)


def ma_residual(problem: MAProblem, phi: np.ndarray) -> np.ndarray:
    """Pointwise residual det(A0 + hessian(phi)) - target."""
    return det(problem.a0 + complex_hessian(phi)) - problem.target


def _preconditioner(shape, a_field: Herm2) -> LinearOperator:
    """Inverse constant-coefficient elliptic operator, diagonal in Fourier.

    Uses the grid average of the coefficient field.  The symbol vanishes
    at the mean and at pure-Nyquist modes; those components are projected
    out, which both fixes the gauge and removes the discrete kernel.
    """
    m11, m22, m_re, m_im = _hessian_multipliers(shape)
    a11 = float(np.mean(a_field.a11))
    a22 = float(np.mean(a_field.a22))
    a12 = complex(np.mean(a_field.a12))
    sym = a11 * m22 + a22 * m11 - 2.0 * (a12.real * m_re + a12.imag * m_im)
    inv = np.zeros_like(sym)
    nonzero = sym < 0.0
    inv[nonzero] = -1.0 / sym[nonzero]
    n = int(np.prod(shape))
    axes = (0, 1, 2, 3)

    def apply(v):
        spec = np.fft.rfftn(v.reshape(shape))
        return np.fft.irfftn(spec * inv, s=shape, axes=axes).ravel()

    return LinearOperator((n, n), matvec=apply, dtype=np.float64)


def _solve_linearized(problem: MAProblem, a_field: Herm2,
                      rhs: np.ndarray, rtol: float) -> np.ndarray:
    """Solve mixed_det(A, hessian(delta)) = -rhs for a mean-free delta."""
    shape = problem.shape
    n = int(np.prod(shape))

    def apply(v):
        delta = v.reshape(shape)
        w = mixed_det(a_field, complex_hessian(delta))
        w = w - np.mean(w)
        return -np.asarray(w).ravel()

    op = LinearOperator((n, n), matvec=apply, dtype=np.float64)
    b = (rhs - np.mean(rhs)).ravel()
    m = _preconditioner(shape, a_field)
    delta, info = lgmres(op, b, M=m, rtol=rtol, atol=0.0, maxiter=200)
    if info > 0:
        # An under-converged inner solve only slows the outer iteration;
        # the damping safeguard still guarantees progress.
        pass
    elif info < 0:
        raise NonConvergenceError(f"linear solver failed (info={info})")
    delta = delta.reshape(shape)
    return delta - np.mean(delta)


def newton_solve(problem: MAProblem, tol: float = 1e-11,
                 max_iter: int = 30, initial: np.ndarray = None,
                 quiet: bool = True) -> NewtonResult:
    """Damped inexact Newton iteration for the Monge-Ampere equation.

    Returns a mean-free potential with sup-norm residual at most tol such
    that A0 + hessian(phi) stays pointwise positive definite.  The line
    search halves the step until both positivity and a residual decrease
    hold.
    """
    if tol <= 0.0:
        raise ValidationError("tol must be positive")
    if initial is None:
        phi = np.zeros(problem.shape, dtype=np.float64)
    else:
        phi = np.asarray(initial, dtype=np.float64)
        if phi.shape != tuple(problem.shape):
            raise ValidationError(
                f"initial guess shape {phi.shape} does not match grid "
                f"{tuple(problem.shape)}")
        phi = phi - np.mean(phi)

    a = problem.a0 + complex_hessian(phi)
    if not is_positive_definite(a):
        raise PositivityError(
            "initial guess leaves the positive cone: A0 + hessian(phi) "
            "is not positive definite")
    res = det(a) - problem.target
    res_sup = float(np.max(np.abs(res)))
    history = [res_sup]

    for it in range(max_iter):
        if res_sup <= tol:
            return NewtonResult(phi=phi, residuals=history, converged=True)
        rtol = min(LINEAR_RTOL_CAP, res_sup)
        delta = _solve_linearized(problem, a, res, rtol)

        accepted = False
        alpha = 1.0
        for _ in range(MAX_DAMPING_HALVINGS + 1):
            trial = phi + alpha * delta
            trial = trial - np.mean(trial)
            a_trial = problem.a0 + complex_hessian(trial)
            if is_positive_definite(a_trial):
                res_trial = det(a_trial) - problem.target
                sup_trial = float(np.max(np.abs(res_trial)))
                if sup_trial < res_sup:
                    phi, a, res, res_sup = trial, a_trial, res_trial, sup_trial
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            raise PositivityError(
                "damped Newton step could not restore positivity and "
                f"decrease the residual (residual {res_sup:.3e})")
        history.append(res_sup)
        if not quiet:
            print(f"[newton] iter {it + 1}: residual {res_sup:.3e}")

    if res_sup <= tol:
        return NewtonResult(phi=phi, residuals=history, converged=True)
    raise NonConvergenceError(
        f"Newton did not reach tol {tol:g} in {max_iter} iterations "
        f"(residual {res_sup:.3e})", residuals=history)


def critical_chi(model: SurfaceModel, phi_ma: np.ndarray) -> Herm2:
    """Reassemble chi = chi0 + hessian(phi) and verify criticality.

    The trace residual sup|Lambda_chi(omega) - n c| must agree with the
    Monge-Ampere residual through the exact completed-square algebra; a
    mismatch means a bug in the reduction or the solver, not bad data.
    """
    chi = model.chi0 + complex_hessian(phi_ma)
    if not is_positive_definite(chi):
        raise InconsistencyError(
            "reassembled critical form is not positive definite")
    nc = N_COMPLEX * model.c
    trace_res = float(np.max(np.abs(trace_contract(chi, model.G) - nc)))

    inv2c = 1.0 / (2.0 * model.c)
    g = Herm2(model.G.a11, model.G.a22, model.G.a12 * (1.0 + 0j))
    ma_res = det(chi - g * inv2c) - float(det(model.G)) * inv2c * inv2c
    bound = (2.0 * model.c * float(np.max(np.abs(ma_res)))
             / float(np.min(det(chi))))
    if trace_res > bound * (1.0 + 1e-6) + 1e-12:
        raise InconsistencyError(
            f"criticality residual {trace_res:.3e} exceeds the bound "
            f"{bound:.3e} implied by the Monge-Ampere residual")
    return chi


def entry_differences(chi_a: Herm2, chi_b: Herm2) -> dict:
    """Per-component sup differences between two matrix fields."""
    return {
        "a11": float(np.max(np.abs(chi_a.a11 - chi_b.a11))),
        "a22": float(np.max(np.abs(chi_a.a22 - chi_b.a22))),
        "re_a12": float(np.max(np.abs(np.real(chi_a.a12 - chi_b.a12)))),
        "im_a12": float(np.max(np.abs(np.imag(chi_a.a12 - chi_b.a12)))),
    }


def compare_with_flow(chi_flow: Herm2, chi_ma: Herm2) -> float:
    """Sup over grid points of the largest entry difference.

    The two inputs are gauge-free metric fields, so no potential
    alignment is needed; identical metrics give exactly zero.
    """
    sa = np.asarray(chi_flow.a11).shape
    sb = np.asarray(chi_ma.a11).shape
    if sa != sb:
        raise ValidationError(f"grid shapes differ: {sa} vs {sb}")
    return max(
        float(np.max(np.abs(chi_flow.a11 - chi_ma.a11))),
        float(np.max(np.abs(chi_flow.a22 - chi_ma.a22))),
        float(np.max(np.abs(chi_flow.a12 - chi_ma.a12))),
    )
