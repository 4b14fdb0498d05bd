"""Pointwise linear algebra for 2x2 Hermitian matrices.

A 2x2 Hermitian matrix is stored as its upper triangle: two real diagonal
entries ``a11``, ``a22`` and one complex off-diagonal entry ``a12``.  The
conjugate lower entry is implied and never materialized, so Hermiticity is
unbreakable by construction.

Entries may be scalars or numpy arrays of a common broadcastable shape, in
which case every operation acts pointwise.  A ``Herm2`` whose entries are
grid-shaped arrays therefore doubles as a matrix field (the coordinate
matrix of a (1,1)-form sampled over a grid).

All operations are branch-free closed forms (adjugate inverse, quadratic
eigenvalue formula); nothing iterates at the point level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PositivityError

# A matrix is accepted as positive definite iff a11 > EPS_PD and
# det > EPS_PD; guards against roundoff-negative determinants near
# degeneracy.
EPS_PD = 1e-12


@dataclass(frozen=True)
class Herm2:
    """Upper triangle of a 2x2 Hermitian matrix or matrix field."""

    a11: object
    a22: object
    a12: object

    def __add__(self, other):
        if not isinstance(other, Herm2):
            return NotImplemented
        return Herm2(self.a11 + other.a11, self.a22 + other.a22,
                     self.a12 + other.a12)

    def __sub__(self, other):
        if not isinstance(other, Herm2):
            return NotImplemented
        return Herm2(self.a11 - other.a11, self.a22 - other.a22,
                     self.a12 - other.a12)

    def __mul__(self, s):
        if isinstance(s, Herm2):
            return NotImplemented
        return Herm2(self.a11 * s, self.a22 * s, self.a12 * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return Herm2(self.a11 / s, self.a22 / s, self.a12 / s)


def herm(a11, a22, a12=0j) -> Herm2:
    """Convenience constructor, mirrors Herm2(a11, a22, a12)."""
    return Herm2(a11, a22, a12)


def identity(scale=1.0) -> Herm2:
    """scale times the 2x2 identity."""
    return Herm2(scale, scale, 0j)


def _abs2(z):
    return np.real(z) ** 2 + np.imag(z) ** 2


def det(x: Herm2):
    """Determinant a11*a22 - |a12|^2 (real)."""
    return x.a11 * x.a22 - _abs2(x.a12)


def mixed_det(a: Herm2, b: Herm2):
    """Polarized determinant of two Hermitian matrices (real, symmetric).

    mixed_det(A, B) = A11*B22 + A22*B11 - A12*conj(B12) - conj(A12)*B12,
    so that mixed_det(X, X) = 2*det(X).  Under the convention that a
    (1,1)-form alpha with coordinate matrix A satisfies
    alpha ^ beta = mixed_det(A, B) * dV, this is the wedge pairing of two
    forms on a complex surface.
    """
    return (a.a11 * b.a22 + a.a22 * b.a11
            - 2.0 * np.real(np.conj(a.a12) * b.a12))


def adjugate(x: Herm2) -> Herm2:
    """2x2 adjugate: adj(X) = det(X) * X^{-1}, itself Hermitian."""
    return Herm2(x.a22, x.a11, -x.a12)


def positive_definite_mask(x: Herm2):
    """Pointwise positive-definiteness predicate (leading-minor criterion)."""
    return (np.asarray(x.a11) > EPS_PD) & (np.asarray(det(x)) > EPS_PD)


def is_positive_definite(x: Herm2) -> bool:
    """True iff x is positive definite at every point."""
    return bool(np.all(positive_definite_mask(x)))


def require_positive_definite(x: Herm2, what: str = "matrix") -> None:
    if not is_positive_definite(x):
        raise PositivityError(f"{what} is not positive definite")


def trace_contract(x: Herm2, g: Herm2):
    """Trace of X^{-1} against G, i.e. x^{ij} g_{ij} (real).

    This is the contraction Lambda_x(g) of the form with matrix G by the
    metric with matrix X.  Equals 2 when X = G.  X must be positive
    definite.
    """
    require_positive_definite(x, "trace_contract argument X")
    return mixed_det(g, x) / det(x)


def h_tensor(x: Herm2, g: Herm2) -> Herm2:
    """The matrix product X^{-1} G X^{-1}, Hermitian positive definite.

    These are the coefficients of the parabolic linearization of the flow;
    positivity of the result (for positive inputs) is what makes the flow
    equation parabolic.
    """
    require_positive_definite(x, "h_tensor argument X")
    d = det(x)
    b11, b22, b12 = x.a22, x.a11, -x.a12  # adjugate entries
    m11 = (b11 * b11 * g.a11
           + 2.0 * b11 * np.real(b12 * np.conj(g.a12))
           + _abs2(b12) * g.a22)
    m22 = (_abs2(b12) * g.a11
           + 2.0 * b22 * np.real(np.conj(b12) * g.a12)
           + b22 * b22 * g.a22)
    m12 = (b11 * g.a11 * b12 + b12 * np.conj(g.a12) * b12
           + b11 * g.a12 * b22 + b12 * g.a22 * b22)
    d2 = d * d
    return Herm2(m11 / d2, m22 / d2, m12 / d2)


def eigenvalues(x: Herm2):
    """Both real eigenvalues in ascending order (closed 2x2 formula)."""
    mean = 0.5 * (x.a11 + x.a22)
    # The discriminant is written as a sum of squares, so it is
    # non-negative in exact arithmetic and under roundoff.
    disc = np.sqrt((0.5 * (x.a11 - x.a22)) ** 2 + _abs2(x.a12))
    return mean - disc, mean + disc


def min_eigenvalue(x: Herm2):
    """Smaller eigenvalue (pointwise)."""
    return eigenvalues(x)[0]
