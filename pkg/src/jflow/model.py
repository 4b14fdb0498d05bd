"""Background geometry of a flow experiment.

A surface model fixes the flat reference metric omega (constant coordinate
matrix G), the target class representative (constant matrix H), and a
band-limited perturbation potential psi0, so that

    chi0 = H + complex_hessian(psi0)

is the starting form of the flow.  The class ratio

    c = integral(omega ^ chi0) / integral(chi0^2)

depends only on the classes of omega and chi0 (exact forms integrate away,
and the spectral quadrature preserves this identically).  Backgrounds are
normalized by rescaling G so that c = 1/2, after which the convergence
hypothesis reads chi0 - omega > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import HypothesisViolationError, ValidationError
from .grid import complex_hessian, integrate, synthesize_modes, validate_shape
from .hermitian import (Herm2, det, is_positive_definite, min_eigenvalue,
                        mixed_det, positive_definite_mask)

# Complex dimension of the surface; the quadratic reduction of the critical
# equation is specific to n = 2.
N_COMPLEX = 2


@dataclass(frozen=True)
class SurfaceModel:
    """Fixed background data for a flow run or an oracle solve."""

    shape: tuple
    G: Herm2          # constant coordinate matrix of omega
    H: Herm2          # constant class representative of chi0
    psi0: np.ndarray  # perturbation potential, chi0 = H + hessian(psi0)
    chi0: Herm2       # cached chi0 field
    c: float
    normalized: bool


def compute_c(G: Herm2, H: Herm2, psi0, shape) -> float:
    """Class ratio integral(omega ^ chi0) / integral(chi0^2)."""
    dims = validate_shape(shape)
    psi0 = _as_potential(psi0, dims)
    chi0 = _chi0_field(H, psi0)
    return _c_of_field(G, chi0)


def _c_of_field(G: Herm2, chi0: Herm2) -> float:
    num = integrate(mixed_det(G, chi0))
    den = integrate(2.0 * det(chi0))
    if den <= 0.0:
        raise ValidationError(f"non-positive volume integral of chi0^2: {den}")
    c = num / den
    if c <= 0.0:
        raise ValidationError(f"class ratio c must be positive, got {c}")
    return c


def _as_potential(psi0, dims) -> np.ndarray:
    if psi0 is None:
        return np.zeros(dims, dtype=np.float64)
    psi0 = np.asarray(psi0, dtype=np.float64)
    if psi0.shape != dims:
        raise ValidationError(
            f"psi0 shape {psi0.shape} does not match grid {dims}")
    if not np.all(np.isfinite(psi0)):
        raise ValidationError("psi0 contains non-finite samples")
    return psi0


def _chi0_field(H: Herm2, psi0: np.ndarray) -> Herm2:
    return Herm2(H.a11, H.a22, H.a12 * (1.0 + 0j)) + complex_hessian(psi0)


def build_surface_model(shape, G: Herm2, H: Herm2, psi0=None, *,
                        normalize: bool = True) -> SurfaceModel:
    """Assemble and validate a surface model.

    Checks, in order: grid shape, positivity of G and of the chi0 field,
    a positive class ratio, and (after normalization when requested) the
    convergence hypothesis for both the constant class representatives and
    the pointwise chi0 field.
    """
    dims = validate_shape(shape)
    if not is_positive_definite(G):
        raise ValidationError("G is not positive definite")
    psi0 = _as_potential(psi0, dims)
    chi0 = _chi0_field(H, psi0)
    _require_field_positive(chi0, "chi0")
    c = _c_of_field(G, chi0)
    model = SurfaceModel(shape=dims, G=G, H=H, psi0=psi0, chi0=chi0, c=c,
                         normalized=False)
    if normalize:
        model = normalize_background(model)
    _check_hypothesis(model)
    return model


def normalize_background(model: SurfaceModel) -> SurfaceModel:
    """Rescale omega so the class ratio becomes c = 1/n = 1/2."""
    scale = 1.0 / (N_COMPLEX * model.c)
    G = model.G * scale
    c = _c_of_field(G, model.chi0)
    if abs(c - 0.5) > 1e-14:
        raise ValidationError(
            f"normalization failed to produce c = 1/2 (got {c!r})")
    return replace(model, G=G, c=c, normalized=True)


def _require_field_positive(x: Herm2, name: str) -> None:
    mask = positive_definite_mask(x)
    if not np.all(mask):
        point = np.unravel_index(int(np.argmin(mask)), np.asarray(mask).shape)
        lo = float(np.asarray(min_eigenvalue(x))[point])
        raise ValidationError(
            f"{name} is not positive definite at grid point {point} "
            f"(min eigenvalue {lo:.6e})")


def _check_hypothesis(model: SurfaceModel) -> None:
    """Positivity condition for convergence: n c chi0 - omega > 0.

    Checked both on the constant class representatives (the cohomological
    condition, scale-invariant) and pointwise on the grid.
    """
    nc = N_COMPLEX * model.c
    const = model.H * nc - model.G
    if not is_positive_definite(const):
        raise HypothesisViolationError(
            "background violates the positivity condition: "
            "n*c*H - G is not positive definite")
    field = model.chi0 * nc - Herm2(model.G.a11, model.G.a22,
                                    model.G.a12 * (1.0 + 0j))
    mask = positive_definite_mask(field)
    if not np.all(mask):
        point = np.unravel_index(int(np.argmin(mask)), model.shape)
        lo = float(np.asarray(min_eigenvalue(field))[point])
        raise HypothesisViolationError(
            "background violates the positivity condition pointwise: "
            f"n*c*chi0 - omega has min eigenvalue {lo:.6e} at {point}")


def model_from_values(shape, g_values, h_values, psi0_modes=()) -> SurfaceModel:
    """Build a normalized model from raw config values.

    g_values and h_values are (a11, a22, Re a12, Im a12, ...) sequences;
    only the first four entries are consumed.  psi0_modes is a list of
    (k1, k2, k3, k4, amplitude, phase) cosine modes.
    """
    G = Herm2(float(g_values[0]), float(g_values[1]),
              float(g_values[2]) + 1j * float(g_values[3]))
    H = Herm2(float(h_values[0]), float(h_values[1]),
              float(h_values[2]) + 1j * float(h_values[3]))
    dims = validate_shape(shape)
    psi0 = synthesize_modes(dims, psi0_modes) if psi0_modes else None
    return build_surface_model(dims, G, H, psi0)
