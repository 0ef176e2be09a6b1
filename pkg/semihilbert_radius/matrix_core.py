#!/usr/bin/env python3
"""
Dense complex matrix primitives.

Hermitian eigendecomposition by cyclic Jacobi rotations (batched over a
stack of matrices), PSD functional calculus, the spectral norm and the
classical numerical radius.
"""

import logging
from functools import lru_cache
from typing import List, NamedTuple, Tuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize_scalar

from semihilbert_radius.config import RANK_TOL, SweepConfig
from semihilbert_radius.errors import DimensionMismatch, NonFinite, NotHermitian, NotPSD
from semihilbert_radius.estimates import Method, SupEstimate

logger = logging.getLogger(__name__)

CMatrix = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-10
JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class HermEig(NamedTuple):
    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: CMatrix


class PSDCalculus(NamedTuple):
    sqrt: CMatrix
    sqrt_pinv: CMatrix
    pinv: CMatrix
    projector: CMatrix
    rank: int
    zero_weight: bool
    eig: HermEig


def as_cmatrix(M, name: str = 'matrix', square: bool = True) -> CMatrix:
    """Coerce to a 2-D complex128 array and reject NaN/Inf"""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} has non-finite entries")
    return arr


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))


def frobenius(M: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(M) ** 2)))


@lru_cache(maxsize=None)
def _rotation_rounds(d: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Round-robin pairing: each round is a set of disjoint (p, q) pivots, all pairs once per sweep"""
    m = d + (d % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = sorted((min(a, b), max(a, b))
                       for a, b in zip(players[:m // 2], reversed(players[m // 2:]))
                       if a < d and b < d)
        rounds.append((np.array([p for p, _ in pairs], dtype=np.intp),
                       np.array([q for _, q in pairs], dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi_stack(H: np.ndarray):
    """
    Cyclic Jacobi on a stack (B, d, d) of Hermitian matrices.

    Pivots follow the parallel round-robin ordering; the rotations of one
    round touch disjoint index pairs and are applied together, to the
    whole stack at once. Already-zero pivots get the identity rotation.
    """
    M = np.array(H, dtype=np.complex128, copy=True)
    batch, d, _ = M.shape
    V = np.broadcast_to(np.eye(d, dtype=np.complex128), M.shape).copy()
    if d == 1:
        return M[:, :, 0].real.copy(), V

    fro = np.sqrt(np.sum(np.abs(M) ** 2, axis=(1, 2)))
    target = JACOBI_OFF_TOL * np.maximum(fro, np.finfo(float).tiny)
    off_mask = ~np.eye(d, dtype=bool)

    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(M[:, off_mask]) ** 2, axis=1))
        if np.all(off <= target):
            break
        for P, Q in _rotation_rounds(d):
            apq = M[:, P, Q]
            r = np.abs(apq)
            active = r > 0.0
            if not np.any(active):
                continue
            safe_r = np.where(active, r, 1.0)
            e = np.where(active, np.conj(apq) / safe_r, 1.0)
            tau = (M[:, Q, Q].real - M[:, P, P].real) / (2.0 * safe_r)
            sign = np.where(tau >= 0.0, 1.0, -1.0)
            t = np.where(active, sign / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            se = s * e
            ce = c * e

            col_p = M[:, :, P]
            col_q = M[:, :, Q]
            M[:, :, P] = c[:, None, :] * col_p - se[:, None, :] * col_q
            M[:, :, Q] = s[:, None, :] * col_p + ce[:, None, :] * col_q
            row_p = M[:, P, :]
            row_q = M[:, Q, :]
            M[:, P, :] = c[:, :, None] * row_p - np.conj(se)[:, :, None] * row_q
            M[:, Q, :] = s[:, :, None] * row_p + np.conj(ce)[:, :, None] * row_q
            M[:, P, Q] = np.where(active, 0.0, M[:, P, Q])
            M[:, Q, P] = np.where(active, 0.0, M[:, Q, P])

            v_p = V[:, :, P]
            v_q = V[:, :, Q]
            V[:, :, P] = c[:, None, :] * v_p - se[:, None, :] * v_q
            V[:, :, Q] = s[:, None, :] * v_p + ce[:, None, :] * v_q
    else:
        logger.debug("Jacobi stopped after %d sweeps without reaching tolerance", JACOBI_MAX_SWEEPS)

    w = np.real(np.diagonal(M, axis1=1, axis2=2)).copy()
    order = np.argsort(w, axis=1, kind='stable')
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    return w, V


def hermitian_eig_batch(stack: np.ndarray, tol: float = HERMITIAN_TOL):
    """Eigenvalues (B, d) ascending and eigenvectors (B, d, d) of a Hermitian stack"""
    arr = np.asarray(stack, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionMismatch(f"expected a stack of square matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("stack has non-finite entries")
    skew = np.sqrt(np.sum(np.abs(arr - np.conj(np.swapaxes(arr, 1, 2))) ** 2, axis=(1, 2)))
    fro = np.sqrt(np.sum(np.abs(arr) ** 2, axis=(1, 2)))
    if np.any(skew > tol * fro):
        raise NotHermitian(f"matrix is not Hermitian: skew part {float(np.max(skew)):.3e}")
    return _jacobi_stack(hermitian_part(arr))


def hermitian_eig(M, tol: float = HERMITIAN_TOL) -> HermEig:
    M = as_cmatrix(M)
    w, V = hermitian_eig_batch(M[None, :, :], tol)
    return HermEig(w[0], V[0])


def extreme_eigenpair(M, largest: bool = True) -> Tuple[float, np.ndarray]:
    """Extreme eigenvalue and unit eigenvector of the Hermitian part of M"""
    w, V = _jacobi_stack(hermitian_part(as_cmatrix(M))[None, :, :])
    idx = -1 if largest else 0
    return float(w[0, idx]), V[0, :, idx]


def lambda_max(M) -> float:
    return extreme_eigenpair(M, largest=True)[0]


def lambda_min(M) -> float:
    return extreme_eigenpair(M, largest=False)[0]


def psd_calculus(A, rank_tol: float = RANK_TOL) -> PSDCalculus:
    """Square root, pseudoinverses and range projector of a PSD matrix"""
    A = as_cmatrix(A, 'weight')
    eig = hermitian_eig(A)
    w, V = eig
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if scale > 0.0 and w[0] < -rank_tol * scale:
        raise NotPSD(f"weight has eigenvalue {w[0]:.6g} below -rank_tol*lambda_max")

    keep = w > rank_tol * scale if scale > 0.0 else np.zeros_like(w, dtype=bool)
    rank = int(np.count_nonzero(keep))
    root = np.sqrt(np.where(keep, w, 0.0))
    inv_w = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
    Vh = np.conj(V.T)

    if rank < len(w):
        logger.debug("weight rank %d of %d after cutoff %.1e", rank, len(w), rank_tol)
    return PSDCalculus(
        sqrt=(V * root) @ Vh,
        sqrt_pinv=(V * np.sqrt(inv_w)) @ Vh,
        pinv=(V * inv_w) @ Vh,
        projector=(V * keep.astype(float)) @ Vh,
        rank=rank,
        zero_weight=rank == 0,
        eig=eig,
    )


def spectral_norm(M) -> float:
    M = as_cmatrix(M, square=False)
    if M.size == 0:
        return 0.0
    top = lambda_max(np.conj(M.T) @ M)
    return float(np.sqrt(max(top, 0.0)))


def _rotated_lambda_max(H1: CMatrix, H2: CMatrix, thetas: np.ndarray):
    """lambda_max of cos(t) H1 - sin(t) H2 = Re(e^{it} M) for each t, with top eigenvectors"""
    stack = np.cos(thetas)[:, None, None] * H1 - np.sin(thetas)[:, None, None] * H2
    w, V = _jacobi_stack(stack)
    return w[:, -1], V[:, :, -1]


def classical_numrad(M, cfg: SweepConfig = None) -> SupEstimate:
    """
    Numerical radius w(M) = max over theta of lambda_max(Re(e^{i theta} M)).

    Uniform theta grid, then golden-section refinement of the best cells.
    The value is |y* M y| at the returned certificate y, so it never
    exceeds w(M); envelope adds the Lipschitz bound of the grid.
    """
    cfg = cfg or SweepConfig()
    M = as_cmatrix(M)
    d = M.shape[0]
    norm = spectral_norm(M)
    if norm == 0.0:
        y = np.zeros(d, dtype=np.complex128)
        y[0] = 1.0
        return SupEstimate(0.0, y, Method.THETA_SWEEP, envelope=0.0)

    H1 = hermitian_part(M)
    H2 = (M - np.conj(M.T)) / 2j
    step = 2.0 * np.pi / cfg.grid_points
    thetas = step * np.arange(cfg.grid_points)
    values, vectors = _rotated_lambda_max(H1, H2, thetas)

    best_value = float(np.max(values))
    best_vec = vectors[int(np.argmax(values))]

    is_peak = (values >= np.roll(values, 1)) & (values >= np.roll(values, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(-values[peaks], kind='stable')][:cfg.refine_cells]

    for j in peaks:
        # near-diagonal in the grid eigenbasis, so each evaluation takes few sweeps
        _, basis = _jacobi_stack((np.cos(thetas[j]) * H1 - np.sin(thetas[j]) * H2)[None])
        basis = basis[0]
        B1 = np.conj(basis.T) @ H1 @ basis
        B2 = np.conj(basis.T) @ H2 @ basis

        def negated(theta):
            lam, _ = _rotated_lambda_max(B1, B2, np.array([theta]))
            return -float(lam[0])

        bracket = (thetas[j] - step, thetas[j], thetas[j] + step)
        try:
            res = minimize_scalar(negated, bracket=bracket, method='golden',
                                  options={'xtol': cfg.refine_width})
        except ValueError:
            # flat cell, the grid value stands
            continue
        if -res.fun > best_value:
            lam, vec = _rotated_lambda_max(B1, B2, np.array([res.x]))
            best_value = float(lam[0])
            best_vec = basis @ vec[0]

    y = best_vec / np.linalg.norm(best_vec)
    value = float(abs(np.vdot(y, M @ y)))
    envelope = float(np.max(values)) + norm * step / 2.0
    return SupEstimate(value, y, Method.THETA_SWEEP, lower_bound=True,
                       residual=abs(best_value - value), envelope=max(envelope, value))
