"""Periodic 4d real grid underlying the complex 2-torus.

Real coordinates x1..x4 each run over one unit period, sampled at
n1..n4 points.  Complex coordinates are z1 = x1 + i x2 and z2 = x3 + i x4.

Data layout is fixed once and for all: scalar fields are C-ordered float64
arrays indexed [i1, i2, i3, i4] with x^a = i_a / n_a, so the x4 index
varies fastest in memory.  Snapshot files and every other module rely on
this order.

Differentiation is spectral.  A first derivative multiplies the discrete
Fourier transform by its diagonal symbol with the Nyquist mode set to
zero (the standard convention preserving real-valuedness); second and
mixed derivatives are products of first-derivative symbols.  With that
choice the grid mean of any derivative vanishes identically, which makes
the cohomological identities of the flow exact in floating point.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .hermitian import Herm2


def validate_shape(shape) -> tuple:
    """Check a grid shape: four even integers, each >= 4."""
    dims = tuple(int(n) for n in shape)
    if len(dims) != 4:
        raise ValidationError(f"grid must have 4 dimensions, got {len(dims)}")
    for n in dims:
        if n < 4:
            raise ValidationError(f"grid dims must be >= 4, got {n}")
        if n % 2 != 0:
            raise ValidationError(f"grid dims must be even, got {n}")
    return dims


def coordinates(shape):
    """Broadcastable coordinate arrays (x1, x2, x3, x4), each in [0, 1)."""
    dims = validate_shape(shape)
    axes = []
    for a, n in enumerate(dims):
        x = np.arange(n, dtype=np.float64) / n
        idx = [None] * 4
        idx[a] = slice(None)
        axes.append(x[tuple(idx)])
    return tuple(axes)


@lru_cache(maxsize=None)
def _hessian_multipliers(shape):
    """Fourier multipliers of the four real components of the complex Hessian.

    Returns (m11, m22, m_re12, m_im12) on the rfftn frequency grid for

        H11    = (1/4)(d1^2 + d2^2) phi
        H22    = (1/4)(d3^2 + d4^2) phi
        Re H12 = (1/4)(d1 d3 + d2 d4) phi
        Im H12 = (1/4)(d1 d4 - d2 d3) phi

    where d_a is the derivative along x^a.  Every first-derivative factor
    has its Nyquist mode zeroed.
    """
    n1, n2, n3, n4 = shape

    def full_sym(n):
        t = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n)
        t[n // 2] = 0.0  # Nyquist mode of the first-derivative symbol
        return t

    t1 = full_sym(n1)[:, None, None, None]
    t2 = full_sym(n2)[None, :, None, None]
    t3 = full_sym(n3)[None, None, :, None]
    # rfftn keeps only non-negative frequencies along the last axis.
    t4 = 2.0 * np.pi * np.fft.rfftfreq(n4, d=1.0 / n4)
    t4[-1] = 0.0
    t4 = t4[None, None, None, :]

    m11 = -0.25 * (t1 * t1 + t2 * t2) + np.zeros((1, 1, 1, t4.size))
    m22 = -0.25 * (t3 * t3 + t4 * t4) + np.zeros((n1, n2, 1, 1))
    m_re = -0.25 * (t1 * t3 + t2 * t4)
    m_im = -0.25 * (t1 * t4 - t2 * t3)
    full = (n1, n2, n3, t4.size)
    return np.stack([np.broadcast_to(m, full) for m in (m11, m22, m_re, m_im)])


def complex_hessian(phi: np.ndarray) -> Herm2:
    """Matrix of second mixed complex derivatives of a real field.

    Returns the Hermitian field with entries d^2 phi / dz^i dzbar^j for the
    complex structure z1 = x1 + i x2, z2 = x3 + i x4, computed spectrally.
    The output is exactly Hermitian for real input: the diagonal entries
    are produced by real inverse transforms and carry no imaginary part.
    """
    phi = np.asarray(phi, dtype=np.float64)
    shape = phi.shape
    multipliers = _hessian_multipliers(shape)
    spec = np.fft.rfftn(phi)
    # One batched inverse transform for all four real components.
    comps = np.fft.irfftn(spec[None] * multipliers, s=shape, axes=(1, 2, 3, 4))
    return Herm2(comps[0], comps[1], comps[2] + 1j * comps[3])


def integrate(f: np.ndarray) -> float:
    """Integral over the unit-volume torus: the grid mean.

    Trapezoidal quadrature on a periodic grid reduces to the plain mean,
    which is exact for band-limited integrands.
    """
    return float(np.mean(f))


def sup_inf(f: np.ndarray):
    """(min, max) over grid samples."""
    return float(np.min(f)), float(np.max(f))


def synthesize_modes(shape, modes) -> np.ndarray:
    """Real field from a list of cosine modes.

    Each mode is (k1, k2, k3, k4, amplitude, phase) contributing
    amplitude * cos(2 pi (k . x) + phase).  Frequencies must satisfy
    |k_a| < n_a / 2 so the field is band-limited and all spectral
    derivatives are exact.
    """
    dims = validate_shape(shape)
    field = np.zeros(dims, dtype=np.float64)
    xs = coordinates(dims)
    for mode in modes:
        k1, k2, k3, k4, amp, phase = mode
        for k, n in zip((k1, k2, k3, k4), dims):
            if abs(int(k)) >= n // 2:
                raise ValidationError(
                    f"mode frequency {k} is not band-limited for dim {n} "
                    f"(need |k| < {n // 2})")
        arg = 2.0 * np.pi * (k1 * xs[0] + k2 * xs[1] + k3 * xs[2] + k4 * xs[3])
        field = field + amp * np.cos(arg + phase)
    return field
