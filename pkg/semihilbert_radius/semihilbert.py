#!/usr/bin/env python3
"""
Semi-Hilbert context for a PSD weight A.

Everything here works on dense matrices: the A-inner product, the
A-adjoint T# = A^+ T* A, the compression T~ = A^{1/2} T (A^{1/2})^+ that
turns A-quantities into classical ones, and the operator/tuple classifiers.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Tuple

import numpy as np
from scipy.stats import unitary_group

from semihilbert_radius.config import CLASSIFY_TOL, RANK_TOL
from semihilbert_radius.errors import DimensionMismatch, NotABounded
from semihilbert_radius.matrix_core import (
    CMatrix, HermEig, as_cmatrix, frobenius, hermitian_part, lambda_min, psd_calculus,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpaceA:
    dim: int
    A: CMatrix
    eig: HermEig
    rank: int
    sqrtA: CMatrix
    sqrtA_pinv: CMatrix
    pinvA: CMatrix
    projP: CMatrix
    rank_tol: float
    range_basis: CMatrix
    null_basis: CMatrix
    scale: float

    @property
    def zero_weight(self) -> bool:
        return self.rank == 0


@dataclass(frozen=True)
class OpFlags:
    a_bounded: bool
    in_B_A: bool
    a_selfadjoint: bool
    a_positive: bool
    a_isometry: bool
    a_unitary: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


class TuplePredicates(NamedTuple):
    commuting: bool
    a_normal: bool


@dataclass(frozen=True, eq=False)
class OpTuple:
    """Ordered n-tuple of same-size square matrices"""

    ops: Tuple[CMatrix, ...]

    def __post_init__(self):
        if not self.ops:
            raise DimensionMismatch("an operator tuple needs at least one member")
        dims = {op.shape for op in self.ops}
        if len(dims) != 1:
            raise DimensionMismatch(f"tuple members have different shapes: {sorted(dims)}")

    @classmethod
    def of(cls, *mats) -> 'OpTuple':
        return cls(tuple(as_cmatrix(m, f'T{k + 1}') for k, m in enumerate(mats)))

    @classmethod
    def constant(cls, S, n: int) -> 'OpTuple':
        S = as_cmatrix(S)
        return cls(tuple(S.copy() for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def __len__(self):
        return len(self.ops)

    def __iter__(self) -> Iterator[CMatrix]:
        return iter(self.ops)

    def __getitem__(self, k: int) -> CMatrix:
        return self.ops[k]

    def stack(self) -> np.ndarray:
        return np.stack(self.ops)

    def map(self, fn: Callable[[CMatrix], CMatrix]) -> 'OpTuple':
        return OpTuple(tuple(np.asarray(fn(op), dtype=np.complex128) for op in self.ops))

    def pairwise(self, other: 'OpTuple', fn) -> 'OpTuple':
        if other.n != self.n or other.dim != self.dim:
            raise DimensionMismatch(f"tuples of shape ({self.n}, {self.dim}) and ({other.n}, {other.dim})")
        return OpTuple(tuple(fn(t, s) for t, s in zip(self.ops, other.ops)))

    def product(self, other: 'OpTuple') -> 'OpTuple':
        """Entrywise product (T_1 S_1, ..., T_n S_n)"""
        return self.pairwise(other, lambda t, s: t @ s)

    def add(self, other: 'OpTuple') -> 'OpTuple':
        return self.pairwise(other, lambda t, s: t + s)

    def scale(self, lam: complex) -> 'OpTuple':
        return self.map(lambda t: lam * t)

    def power(self, m: int) -> 'OpTuple':
        return self.map(lambda t: np.linalg.matrix_power(t, m))


def build_space(A, rank_tol: float = RANK_TOL) -> SpaceA:
    A = as_cmatrix(A, 'weight')
    calc = psd_calculus(A, rank_tol)
    w, V = calc.eig
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    keep = w > rank_tol * scale if scale > 0.0 else np.zeros_like(w, dtype=bool)
    return SpaceA(
        dim=A.shape[0],
        A=hermitian_part(A),
        eig=calc.eig,
        rank=calc.rank,
        sqrtA=calc.sqrt,
        sqrtA_pinv=calc.sqrt_pinv,
        pinvA=calc.pinv,
        projP=calc.projector,
        rank_tol=rank_tol,
        range_basis=V[:, keep],
        null_basis=V[:, ~keep],
        scale=scale,
    )


def _vector(space: SpaceA, x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (space.dim,):
        raise DimensionMismatch(f"{name} has shape {x.shape}, expected ({space.dim},)")
    return x


def check_op(space: SpaceA, T, name: str = 'operator') -> CMatrix:
    T = as_cmatrix(T, name)
    if T.shape[0] != space.dim:
        raise DimensionMismatch(f"{name} is {T.shape[0]}x{T.shape[1]}, weight is {space.dim}x{space.dim}")
    return T


def a_inner(space: SpaceA, x, y) -> complex:
    """<x, y>_A = <Ax, y>"""
    x = _vector(space, x, 'x')
    y = _vector(space, y, 'y')
    return complex(np.vdot(y, space.A @ x))


def a_norm(space: SpaceA, x) -> float:
    return float(np.sqrt(max(a_inner(space, x, x).real, 0.0)))


def reduce_op(space: SpaceA, T) -> CMatrix:
    T = check_op(space, T)
    return space.sqrtA @ T @ space.sqrtA_pinv


def compress_op(space: SpaceA, T) -> CMatrix:
    """T~ in an orthonormal basis of range(A): an r x r matrix"""
    Q = space.range_basis
    return np.conj(Q.T) @ reduce_op(space, T) @ Q


def lift_op(space: SpaceA, reduced) -> CMatrix:
    """(A^{1/2})^+ X A^{1/2}: an operator whose compression is P X P"""
    X = check_op(space, reduced, 'reduced operator')
    return space.sqrtA_pinv @ X @ space.sqrtA


def a_adjoint(space: SpaceA, T) -> CMatrix:
    T = check_op(space, T)
    return space.pinvA @ np.conj(T.T) @ space.A


def cartesian_a(space: SpaceA, T) -> Tuple[CMatrix, CMatrix]:
    """Re_A T = (T + T#)/2 and Im_A T = (T - T#)/(2i)"""
    T = check_op(space, T)
    T_sharp = a_adjoint(space, T)
    return 0.5 * (T + T_sharp), (T - T_sharp) / 2j


def _op_scale(space: SpaceA, T: CMatrix) -> float:
    return frobenius(space.A) * frobenius(T)


def _is_a_bounded(space: SpaceA, T: CMatrix, tol: float) -> bool:
    N = space.null_basis
    if N.shape[1] == 0:
        return True
    return frobenius(space.A @ T @ N) <= tol * _op_scale(space, T)


def _is_a_isometry(space: SpaceA, T: CMatrix, tol: float) -> bool:
    residual = frobenius(a_adjoint(space, T) @ T - space.projP)
    return residual <= tol * (1.0 + frobenius(space.projP))


def classify(space: SpaceA, T, tol: float = CLASSIFY_TOL) -> OpFlags:
    T = check_op(space, T)
    bound = tol * _op_scale(space, T)

    a_bounded = _is_a_bounded(space, T, tol)
    range_residual = frobenius((np.eye(space.dim) - space.projP) @ np.conj(T.T) @ space.A)
    in_b_a = range_residual <= bound
    if in_b_a != a_bounded:
        logger.warning("null-space and range membership tests disagree (residual %.3e, bound %.3e)",
                       range_residual, bound)
        in_b_a = in_b_a and a_bounded

    AT = space.A @ T
    a_selfadjoint = frobenius(AT - np.conj(AT.T)) <= bound
    a_positive = a_selfadjoint and (space.rank == 0 or lambda_min(AT) >= -bound)
    a_isometry = a_bounded and _is_a_isometry(space, T, tol)
    a_unitary = a_isometry and _is_a_isometry(space, a_adjoint(space, T), tol)
    return OpFlags(a_bounded, in_b_a, a_selfadjoint, a_positive, a_isometry, a_unitary)


def tuple_predicates(space: SpaceA, T: OpTuple, tol: float = CLASSIFY_TOL) -> TuplePredicates:
    for op in T:
        check_op(space, op)
    norms = [frobenius(op) for op in T]
    op_scale = max(norms) ** 2
    a_fro = frobenius(space.A)

    commuting = True
    a_commuting = True
    for i in range(T.n):
        for j in range(i + 1, T.n):
            comm = T[i] @ T[j] - T[j] @ T[i]
            commuting &= frobenius(comm) <= tol * op_scale
            a_commuting &= frobenius(space.A @ comm) <= tol * a_fro * op_scale

    self_normal = True
    for op in T:
        sharp = a_adjoint(space, op)
        self_normal &= frobenius(sharp @ op - op @ sharp) <= tol * frobenius(sharp) * frobenius(op)
    return TuplePredicates(bool(commuting), bool(a_commuting and self_normal))


def require_a_bounded(space: SpaceA, T: OpTuple, tol: float = CLASSIFY_TOL):
    for k, op in enumerate(T):
        check_op(space, op, f'T{k + 1}')
        if not _is_a_bounded(space, op, tol):
            raise NotABounded(f"T{k + 1} maps N(A) outside N(A); its A-seminorm is infinite")


def _haar_block(rng: np.random.Generator, k: int) -> np.ndarray:
    if k == 1:
        return np.exp(2j * np.pi * rng.random((1, 1)))
    return unitary_group.rvs(k, random_state=rng)


def random_a_unitary(space: SpaceA, rng: np.random.Generator) -> CMatrix:
    """U = (A^{1/2})^+ W A^{1/2} for a Haar unitary W that commutes with P"""
    W = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for basis in (space.range_basis, space.null_basis):
        k = basis.shape[1]
        if k:
            W += basis @ _haar_block(rng, k) @ np.conj(basis.T)
    return lift_op(space, W)


def a_adjoint_tuple(space: SpaceA, T: OpTuple) -> OpTuple:
    return T.map(lambda op: a_adjoint(space, op))
