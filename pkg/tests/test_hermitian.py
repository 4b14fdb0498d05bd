import numpy as np
import pytest

from jflow import (Herm2, adjugate, det, eigenvalues, h_tensor, herm,
                   is_positive_definite, mixed_det, positive_definite_mask,
                   trace_contract)
from jflow.errors import PositivityError

from conftest import random_hermitian, random_pd

I2 = herm(1.0, 1.0)


def to_matrix(x, i=None):
    """Full 2x2 complex matrix for brute-force cross-checks."""
    pick = (lambda a: a) if i is None else (lambda a: np.asarray(a)[i])
    a11, a22, a12 = pick(x.a11), pick(x.a22), pick(x.a12)
    return np.array([[a11, a12], [np.conj(a12), a22]], dtype=complex)


class TestDet:
    def test_identity(self):
        assert det(I2) == 1.0

    def test_diagonal(self):
        assert det(herm(2.0, 3.0)) == 6.0

    def test_off_diagonal(self):
        # [[2, i], [-i, 2]] has determinant 4 - 1 = 3
        assert det(herm(2.0, 2.0, 1j)) == 3.0


class TestMixedDet:
    def test_identity_pair(self):
        assert mixed_det(I2, I2) == 2.0

    def test_diagonal_pair(self):
        assert mixed_det(I2, herm(2.0, 2.0)) == 4.0

    def test_diagonal_identity(self):
        rng = np.random.default_rng(7)
        a, b, c, d = rng.uniform(0.5, 3.0, 4)
        assert mixed_det(herm(a, b), herm(c, d)) == pytest.approx(
            a * d + b * c, rel=1e-15)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(11)
        x = random_hermitian(rng, 500)
        y = random_hermitian(rng, 500)
        # the stored expression is symmetric term by term
        assert np.array_equal(mixed_det(x, y), mixed_det(y, x))

    def test_polarization(self):
        rng = np.random.default_rng(12)
        x = random_hermitian(rng, 500)
        assert np.allclose(mixed_det(x, x), 2.0 * det(x), rtol=1e-15,
                           atol=1e-15)


class TestTraceContract:
    def test_scaled_identity(self):
        assert trace_contract(herm(2.0, 2.0), I2) == 1.0

    def test_self_trace_is_dimension(self):
        assert trace_contract(I2, I2) == 2.0

    def test_diagonal(self):
        assert trace_contract(herm(1.0, 2.0), I2) == 1.5

    def test_rejects_indefinite(self):
        with pytest.raises(PositivityError):
            trace_contract(herm(1.0, -1.0), I2)

    def test_against_brute_force(self):
        # explicit inverse multiply-and-trace on 1000 random pd pairs
        rng = np.random.default_rng(13)
        x = random_pd(rng, 1000)
        g = random_pd(rng, 1000)
        got = trace_contract(x, g)
        for i in range(1000):
            expect = np.trace(
                np.linalg.inv(to_matrix(x, i)) @ to_matrix(g, i)).real
            assert abs(got[i] - expect) <= 1e-13 * abs(expect)

    def test_positive_for_positive_input(self):
        rng = np.random.default_rng(14)
        x = random_pd(rng, 300)
        g = random_pd(rng, 300)
        assert np.all(trace_contract(x, g) > 0.0)


class TestHTensor:
    def test_scaled_identity(self):
        h = h_tensor(herm(2.0, 2.0), I2)
        assert (h.a11, h.a22, h.a12) == (0.25, 0.25, 0j)

    def test_identity_passthrough(self):
        rng = np.random.default_rng(15)
        g = random_pd(rng, 50)
        h = h_tensor(Herm2(np.ones(50), np.ones(50), np.zeros(50) * 1j), g)
        assert np.allclose(h.a11, g.a11, rtol=1e-14)
        assert np.allclose(h.a22, g.a22, rtol=1e-14)
        assert np.allclose(h.a12, g.a12, rtol=1e-14)

    def test_diagonal(self):
        h = h_tensor(herm(1.0, 2.0), I2)
        assert h.a11 == 1.0
        assert h.a22 == 0.25
        assert h.a12 == 0j

    def test_positive_definite_preserved(self):
        rng = np.random.default_rng(16)
        x = random_pd(rng, 1000)
        g = random_pd(rng, 1000)
        assert is_positive_definite(h_tensor(x, g))

    def test_matches_matrix_product(self):
        rng = np.random.default_rng(17)
        x = random_pd(rng, 200)
        g = random_pd(rng, 200)
        h = h_tensor(x, g)
        for i in range(200):
            xm = to_matrix(x, i)
            expect = np.linalg.inv(xm) @ to_matrix(g, i) @ np.linalg.inv(xm)
            got = to_matrix(h, i)
            assert np.max(np.abs(got - expect)) <= 1e-12 * np.max(np.abs(expect))

    def test_rejects_indefinite(self):
        with pytest.raises(PositivityError):
            h_tensor(herm(-1.0, 1.0), I2)


class TestEigenvalues:
    def test_identity(self):
        assert eigenvalues(I2) == (1.0, 1.0)

    def test_off_diagonal(self):
        assert eigenvalues(herm(2.0, 2.0, 1j)) == (1.0, 3.0)

    def test_diagonal_sorted(self):
        assert eigenvalues(herm(5.0, 2.0)) == (2.0, 5.0)

    def test_trace_and_det_consistency(self):
        rng = np.random.default_rng(18)
        x = random_hermitian(rng, 1000)
        lo, hi = eigenvalues(x)
        trace = x.a11 + x.a22
        assert np.allclose(lo + hi, trace, rtol=1e-13, atol=1e-13)
        assert np.allclose(lo * hi, det(x), rtol=1e-13, atol=1e-13)


class TestPredicates:
    def test_adjugate_inverse_relation(self):
        rng = np.random.default_rng(19)
        x = random_pd(rng, 100)
        adj = adjugate(x)
        # det(adj X) = det X for 2x2, and X adj(X) = det(X) I entrywise
        assert np.allclose(det(adj), det(x), rtol=1e-14)
        for i in range(100):
            xm = to_matrix(x, i)
            am = to_matrix(adj, i)
            expect = det(x)[i] * np.eye(2)
            assert np.max(np.abs(xm @ am - expect)) <= 1e-13 * det(x)[i]

    def test_mask_threshold(self):
        assert not positive_definite_mask(herm(1e-13, 1.0))
        assert positive_definite_mask(herm(1.0, 1.0))

    def test_arithmetic(self):
        x = herm(1.0, 2.0, 1j)
        y = (x + x) * 0.5 - x
        assert (y.a11, y.a22, y.a12) == (0.0, 0.0, 0j)
