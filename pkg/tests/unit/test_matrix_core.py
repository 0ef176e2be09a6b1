import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from semihilbert_radius.errors import DimensionMismatch, NonFinite, NotHermitian, NotPSD
from semihilbert_radius.estimates import Direction, Method
from semihilbert_radius.matrix_core import (
    as_cmatrix, classical_numrad, hermitian_eig, hermitian_eig_batch, psd_calculus, spectral_norm,
)

DIM = 5
entries = arrays(np.float64, (DIM, DIM), elements=st.floats(min_value=-10.0, max_value=10.0, allow_subnormal=False))


def hermitian(re, im):
    X = re + 1j * im
    return X + np.conj(X.T)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(re=entries, im=entries)
def test_hermitian_eig_matches_eigh(re, im):
    H = hermitian(re, im)
    scale = 1.0 + np.linalg.norm(H)

    w, V = hermitian_eig(H)

    assert_allclose(w, np.linalg.eigvalsh(H), atol=1e-10 * scale)
    assert_allclose(np.conj(V.T) @ V, np.eye(DIM), atol=1e-10)
    assert_allclose((V * w) @ np.conj(V.T), H, atol=1e-10 * scale)


def test_hermitian_eig_diagonal():
    w, V = hermitian_eig(np.diag([3.0, 1.0, 2.0]))

    assert_allclose(w, [1.0, 2.0, 3.0])
    assert_allclose(np.abs(V), np.eye(3)[:, [1, 2, 0]])


def test_hermitian_eig_swap():
    w, V = hermitian_eig([[0.0, 1.0], [1.0, 0.0]])

    assert_allclose(w, [-1.0, 1.0], atol=1e-14)
    assert_allclose(abs(np.vdot(V[:, 0], [1.0, -1.0])) / np.sqrt(2.0), 1.0)
    assert_allclose(abs(np.vdot(V[:, 1], [1.0, 1.0])) / np.sqrt(2.0), 1.0)


def test_batch_handles_mixed_stack(rng):
    stack = np.stack([hermitian(rng.standard_normal((4, 4)), rng.standard_normal((4, 4))) for _ in range(6)])
    stack[2] = np.diag([4.0, -1.0, 0.0, 2.0])

    w, V = hermitian_eig_batch(stack)

    for k in range(len(stack)):
        assert_allclose(w[k], np.linalg.eigvalsh(stack[k]), atol=1e-10 * (1.0 + np.linalg.norm(stack[k])))


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitian):
        hermitian_eig([[1.0, 2.0], [0.0, 1.0]])


def test_non_finite_rejected():
    with pytest.raises(NonFinite):
        as_cmatrix([[1.0, np.nan], [0.0, 1.0]])


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        as_cmatrix(np.zeros((2, 3)))


def test_psd_calculus_identity():
    calc = psd_calculus(np.eye(3))

    assert calc.rank == 3
    for M in (calc.sqrt, calc.pinv, calc.projector, calc.sqrt_pinv):
        assert_allclose(M, np.eye(3), atol=1e-14)


def test_psd_calculus_singular_diagonal():
    calc = psd_calculus(np.diag([4.0, 0.0]))

    assert calc.rank == 1
    assert not calc.zero_weight
    assert_allclose(calc.sqrt, np.diag([2.0, 0.0]), atol=1e-14)
    assert_allclose(calc.pinv, np.diag([0.25, 0.0]), atol=1e-14)
    assert_allclose(calc.projector, np.diag([1.0, 0.0]), atol=1e-14)


def test_psd_calculus_penrose_identities(rng):
    B = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    A = np.conj(B.T) @ B

    calc = psd_calculus(A)

    assert calc.rank == 3
    assert_allclose(calc.sqrt @ calc.sqrt, A, atol=1e-10 * np.linalg.norm(A))
    assert_allclose(A @ calc.pinv @ A, A, atol=1e-9 * np.linalg.norm(A))
    assert_allclose(calc.projector @ calc.projector, calc.projector, atol=1e-10)
    assert_allclose(calc.sqrt @ calc.sqrt_pinv, calc.projector, atol=1e-9)


def test_zero_weight():
    calc = psd_calculus(np.zeros((3, 3)))

    assert calc.zero_weight
    assert calc.rank == 0


def test_negative_weight_rejected():
    with pytest.raises(NotPSD):
        psd_calculus(np.diag([1.0, -0.5]))


def test_spectral_norm():
    assert spectral_norm(np.zeros((3, 3))) == 0.0
    assert_allclose(spectral_norm([[0.0, 2.0], [0.0, 0.0]]), 2.0)


def test_spectral_norm_matches_svd(make_matrix):
    M = make_matrix(6)
    assert_allclose(spectral_norm(M), np.linalg.norm(M, 2), rtol=1e-12)


def test_numrad_jordan_block():
    est = classical_numrad([[0.0, 1.0], [0.0, 0.0]])

    assert est.method == Method.THETA_SWEEP
    assert est.direction == Direction.EXACT
    assert_allclose(est.value, 0.5, rtol=1e-12)


def test_numrad_shifted_jordan_block():
    assert_allclose(classical_numrad([[1.0, 1.0], [0.0, 1.0]]).value, 1.5, rtol=1e-10)


def test_numrad_normal_matrix(rng):
    assert_allclose(classical_numrad(np.diag([1.0, 1j])).value, 1.0, rtol=1e-10)

    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    z = np.array([2.0 + 1.0j, -0.5, 0.3j, 1.0 - 1.0j])
    est = classical_numrad(Q @ np.diag(z) @ np.conj(Q.T))

    assert_allclose(est.value, np.max(np.abs(z)), rtol=1e-8)


def test_numrad_certificate_and_envelope(make_matrix):
    M = make_matrix(5)
    est = classical_numrad(M)
    y = est.certificate

    assert_allclose(np.linalg.norm(y), 1.0)
    assert_allclose(est.value, abs(np.vdot(y, M @ y)), rtol=1e-12)
    assert est.value <= est.envelope
    assert spectral_norm(M) / 2.0 <= est.value + 1e-12 <= spectral_norm(M) + 1e-12


def test_numrad_zero():
    assert classical_numrad(np.zeros((3, 3))).value == 0.0


def test_hermitian_eig_one_by_one():
    w, V = hermitian_eig([[2.0]])

    assert w.shape == (1,)
    assert V.shape == (1, 1)
    assert_allclose(w, [2.0])
    assert_allclose(np.abs(V), [[1.0]])


def test_psd_calculus_one_by_one():
    calc = psd_calculus([[4.0]])

    assert calc.rank == 1
    assert_allclose(calc.sqrt, [[2.0]])
    assert_allclose(calc.sqrt_pinv, [[0.5]])
