#!/usr/bin/env python3
"""
Random instance generators.

Each ensemble builds a weight A, a tuple T, a companion tuple S and
parameters (alpha, beta) whose structure matches the hypotheses of a family
of checks: commuting tuples, A-isometries, AT^2 = 0 and so on.
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from semihilbert_radius.config import INF_GRID_VALUES, RANK_TOL
from semihilbert_radius.errors import InvalidParams, UnsupportedEnsemble
from semihilbert_radius.matrix_core import CMatrix
from semihilbert_radius.radii import SeminormParams
from semihilbert_radius.semihilbert import (
    OpTuple, SpaceA, a_adjoint, build_space, lift_op, random_a_unitary,
)

logger = logging.getLogger(__name__)

MAX_DIM = 64
MAX_N = 8


@dataclass(frozen=True, eq=False)
class Instance:
    space: SpaceA
    T: OpTuple
    S: OpTuple
    params: SeminormParams
    ensemble: str
    seed: int
    unitary: Optional[CMatrix] = None

    @property
    def n(self) -> int:
        return self.T.n

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.ensemble}|{self.seed}|{self.dim}|{self.n}|".encode())
        h.update(f"{self.params.alpha!r}|{self.params.beta!r}|".encode())
        h.update(np.ascontiguousarray(self.space.A).tobytes())
        for op in (*self.T, *self.S):
            h.update(np.ascontiguousarray(op).tobytes())
        if self.unitary is not None:
            h.update(np.ascontiguousarray(self.unitary).tobytes())
        return h.hexdigest()[:16]

    def describe(self) -> dict:
        return {
            'ensemble': self.ensemble,
            'seed': self.seed,
            'dim': self.dim,
            'n': self.n,
            'rank': self.space.rank,
            'alpha': self.params.alpha,
            'beta': self.params.beta,
            'digest': self.digest,
        }


def gaussian(rng: np.random.Generator, rows: int, cols: int) -> CMatrix:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_weight(rng: np.random.Generator, dim: int, rank: int) -> CMatrix:
    """A = B*B with B of size rank x dim"""
    B = gaussian(rng, rank, dim)
    return np.conj(B.T) @ B


def a_bounded_op(space: SpaceA, rng: np.random.Generator) -> CMatrix:
    """P G1 P + (I - P) G2: any action on range(A), null(A) kept inside null(A)"""
    P = space.projP
    I = np.eye(space.dim)
    return P @ gaussian(rng, space.dim, space.dim) @ P + (I - P) @ gaussian(rng, space.dim, space.dim)


def grid_params(rng: np.random.Generator) -> SeminormParams:
    pairs = [(a, b) for a in INF_GRID_VALUES for b in INF_GRID_VALUES if (a, b) != (0.0, 0.0)]
    alpha, beta = pairs[int(rng.integers(len(pairs)))]
    return SeminormParams(alpha, beta)


def _tuple(space: SpaceA, rng: np.random.Generator, n: int) -> OpTuple:
    return OpTuple(tuple(a_bounded_op(space, rng) for _ in range(n)))


def _space(rng: np.random.Generator, dim: int, rank: int, rank_tol: float) -> SpaceA:
    return build_space(random_weight(rng, dim, rank), rank_tol)


def _generic(rng, dim, n, rank_tol):
    space = _space(rng, dim, int(rng.integers(1, dim + 1)), rank_tol)
    return space, _tuple(space, rng, n), _tuple(space, rng, n), grid_params(rng), None


def _invertible(rng, dim, n, rank_tol):
    space = _space(rng, dim, dim, rank_tol)
    return space, _tuple(space, rng, n), _tuple(space, rng, n), grid_params(rng), None


def _singular(rng, dim, n, rank_tol):
    space = _space(rng, dim, int(rng.integers(1, dim)), rank_tol)
    return space, _tuple(space, rng, n), _tuple(space, rng, n), grid_params(rng), None


def _polynomials(rng, M: CMatrix, n: int) -> OpTuple:
    """n random polynomials of degree <= 2 in M"""
    I = np.eye(M.shape[0])
    M2 = M @ M
    ops = []
    for _ in range(n):
        c = gaussian(rng, 1, 3)[0]
        ops.append(c[0] * I + c[1] * M + c[2] * M2)
    return OpTuple(tuple(ops))


def _commuting(rng, dim, n, rank_tol):
    space = _space(rng, dim, int(rng.integers(1, dim + 1)), rank_tol)
    M = a_bounded_op(space, rng)
    return space, _polynomials(rng, M, n), _polynomials(rng, M, n), grid_params(rng), None


def _a_normal_commuting(rng, dim, n, rank_tol):
    if rng.random() < 0.5:
        # A = I with simultaneously unitarily diagonalized T_k
        space = build_space(np.eye(dim), rank_tol)
        Q, _ = np.linalg.qr(gaussian(rng, dim, dim))
        diag = lambda: Q @ np.diag(gaussian(rng, 1, dim)[0]) @ np.conj(Q.T)
    else:
        weights = rng.uniform(0.5, 2.0, dim)
        weights[rng.random(dim) < 0.3] = 0.0
        if not np.any(weights):
            weights[0] = 1.0
        space = build_space(np.diag(weights), rank_tol)
        diag = lambda: np.diag(gaussian(rng, 1, dim)[0])
    T = OpTuple(tuple(diag() for _ in range(n)))
    S = OpTuple(tuple(diag() for _ in range(n)))
    return space, T, S, grid_params(rng), None


def _a_isometry(rng, dim, n, rank_tol):
    space = _space(rng, dim, int(rng.integers(1, dim + 1)), rank_tol)
    T = OpTuple(tuple(random_a_unitary(space, rng) for _ in range(n)))
    return space, T, _tuple(space, rng, n), grid_params(rng), None


def _a_unitary(rng, dim, n, rank_tol):
    space = _space(rng, dim, int(rng.integers(1, dim + 1)), rank_tol)
    U = random_a_unitary(space, rng)
    return space, _tuple(space, rng, n), _tuple(space, rng, n), grid_params(rng), U


def _nilpotent(rng, dim, n, rank_tol):
    """T = (A^{1/2})^+ N A^{1/2} + (I - P) G with N = Q1 B Q2*, Q1 and Q2 orthogonal blocks of range(A)"""
    space = _space(rng, dim, int(rng.integers(2, dim + 1)), rank_tol)
    Q = space.range_basis
    I = np.eye(dim)
    ops = []
    for _ in range(n):
        split = int(rng.integers(1, space.rank))
        Q1, Q2 = Q[:, :split], Q[:, split:]
        N = Q1 @ gaussian(rng, split, space.rank - split) @ np.conj(Q2.T)
        ops.append(lift_op(space, N) + (I - space.projP) @ gaussian(rng, dim, dim))
    return space, OpTuple(tuple(ops)), _tuple(space, rng, n), grid_params(rng), None


def _random_params(rng, dim, n, rank_tol):
    space, T, S, _, _ = _generic(rng, dim, n, rank_tol)
    while True:
        alpha, beta = rng.uniform(0.0, 4.0, 2)
        if alpha > 0.0 or beta > 0.0:
            break
    return space, T, S, SeminormParams(float(alpha), float(beta)), None


def _a_selfadjoint(rng, dim, n, rank_tol):
    """T_k = Re_A G_k for A-bounded G_k"""
    space = _space(rng, dim, int(rng.integers(1, dim + 1)), rank_tol)

    def re_a():
        G = a_bounded_op(space, rng)
        return 0.5 * (G + a_adjoint(space, G))

    T = OpTuple(tuple(re_a() for _ in range(n)))
    return space, T, _tuple(space, rng, n), grid_params(rng), None


ENSEMBLES: Dict[str, Callable] = {
    'generic': _generic,
    'invertibleA': _invertible,
    'singularA': _singular,
    'commuting': _commuting,
    'a_normal_commuting': _a_normal_commuting,
    'a_isometry': _a_isometry,
    'a_unitary': _a_unitary,
    'nilpotentA2': _nilpotent,
    'random_params': _random_params,
    'a_selfadjoint': _a_selfadjoint,
}


def gen_instance(ensemble: str, dim: int, n: int, seed: int, rank_tol: float = RANK_TOL) -> Instance:
    """Deterministic in (ensemble, dim, n, seed)"""
    builder = ENSEMBLES.get(ensemble)
    if builder is None:
        raise UnsupportedEnsemble(f"unknown ensemble {ensemble!r}; choose from {', '.join(ENSEMBLES)}")
    if not 2 <= dim <= MAX_DIM:
        raise InvalidParams(f"dim must lie in [2, {MAX_DIM}], got {dim}")
    if not 1 <= n <= MAX_N:
        raise InvalidParams(f"n must lie in [1, {MAX_N}], got {n}")
    rng = np.random.default_rng(seed)
    space, T, S, params, unitary = builder(rng, dim, n, rank_tol)
    return Instance(space, T, S, params, ensemble, int(seed), unitary)


def with_params(instance: Instance, params: SeminormParams) -> Instance:
    return Instance(instance.space, instance.T, instance.S, params,
                    instance.ensemble, instance.seed, instance.unitary)
