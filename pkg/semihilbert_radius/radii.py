#!/usr/bin/env python3
"""
Norms and radii of operators and operator tuples on a semi-Hilbert space.

Every quantity is computed on the compression C = Q* T~ Q of T to range(A)
(Q an orthonormal basis of range(A)), where A-unit vectors become Euclidean
unit vectors. Certificates are returned in reduced coordinates y = A^{1/2} x
of the ambient space; pull_back maps them to A-unit vectors x.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from semihilbert_radius.config import CLASSIFY_TOL, OptConfig, SweepConfig
from semihilbert_radius.errors import InvalidParams, ZeroWeight
from semihilbert_radius.estimates import InfEstimate, Method, SupEstimate
from semihilbert_radius.matrix_core import (
    CMatrix, classical_numrad, extreme_eigenpair, hermitian_part,
)
from semihilbert_radius.optimizer import (
    ModulusObjective, QuadraticFormObjective, SphereObjective, SumObjective,
    normalize_rows, polish, sampled_maximum, sphere_maximize, sphere_minimize,
)
from semihilbert_radius.semihilbert import (
    OpTuple, SpaceA, check_op, compress_op, require_a_bounded,
)

logger = logging.getLogger(__name__)

POLISH_ROUNDS = 3
# random A-unit vectors behind a sampled estimate
SAMPLES = 100_000

TupleLike = Union[OpTuple, CMatrix]


@dataclass(frozen=True)
class SeminormParams:
    alpha: float
    beta: float

    def __post_init__(self):
        for name, value in (('alpha', self.alpha), ('beta', self.beta)):
            if not math.isfinite(value) or value < 0.0:
                raise InvalidParams(f"{name} must be a finite nonnegative number, got {value}")
        if self.alpha == 0.0 and self.beta == 0.0:
            raise InvalidParams("(alpha, beta) must not be (0, 0)")

    @property
    def total(self) -> float:
        return self.alpha + self.beta


def as_tuple(T: TupleLike) -> OpTuple:
    return T if isinstance(T, OpTuple) else OpTuple.of(T)


def _compressed(space: SpaceA, T: OpTuple, tol: float = CLASSIFY_TOL) -> np.ndarray:
    """(n, r, r) stack of compressions, after the A-boundedness check"""
    require_a_bounded(space, T, tol)
    return np.stack([compress_op(space, op) for op in T])


def _lift(space: SpaceA, u: Optional[np.ndarray]) -> Optional[np.ndarray]:
    """Compressed coordinates to reduced ambient coordinates"""
    if u is None:
        return None
    return space.range_basis @ u


def to_compressed(space: SpaceA, y) -> np.ndarray:
    return np.conj(space.range_basis.T) @ np.asarray(y, dtype=np.complex128)


def pull_back(space: SpaceA, y) -> np.ndarray:
    """A-unit vector x with A^{1/2} x = P y"""
    return space.sqrtA_pinv @ np.asarray(y, dtype=np.complex128)


def _zero_sup(space: SpaceA) -> SupEstimate:
    logger.debug("A = 0: every supremum is 0")
    return SupEstimate(0.0, None, Method.EIGEN_EXACT, envelope=0.0)


def _require_rank(space: SpaceA, what: str):
    if space.rank == 0:
        raise ZeroWeight(f"{what} is an infimum over A-unit vectors, and A = 0 has none")


def spectral_seeds(C: np.ndarray, limit: int) -> np.ndarray:
    """Top eigenvector of sum C_k*C_k, then extreme eigenvectors of Re C_k and Im C_k"""
    gram = np.einsum('kji,kjl->il', np.conj(C), C)
    seeds = [extreme_eigenpair(gram)[1]]
    for Ck in C:
        for part in (hermitian_part(Ck), (Ck - np.conj(Ck.T)) / 2j):
            seeds.append(extreme_eigenpair(part, largest=True)[1])
            seeds.append(extreme_eigenpair(part, largest=False)[1])
            if len(seeds) >= limit:
                return np.array(seeds[:limit])
    return np.array(seeds[:limit])


def a_op_seminorm(space: SpaceA, T, tol: float = CLASSIFY_TOL) -> SupEstimate:
    """||T||_A = ||T~||, the largest singular value of the compression"""
    T = check_op(space, T)
    C = _compressed(space, OpTuple.of(T), tol)[0]
    if space.rank == 0:
        return _zero_sup(space)
    top, u = extreme_eigenpair(np.conj(C.T) @ C)
    return SupEstimate(float(np.sqrt(max(top, 0.0))), _lift(space, u), Method.EIGEN_EXACT)


def a_numrad(space: SpaceA, T, sweep: Optional[SweepConfig] = None,
             tol: float = CLASSIFY_TOL) -> SupEstimate:
    T = check_op(space, T)
    C = _compressed(space, OpTuple.of(T), tol)[0]
    if space.rank == 0:
        return _zero_sup(space)
    est = classical_numrad(C, sweep)
    return SupEstimate(est.value, _lift(space, est.certificate), est.method,
                       est.lower_bound, est.residual, est.envelope)


def joint_op_norm(space: SpaceA, T: TupleLike, method: str = 'eigen',
                  opt: Optional[OptConfig] = None, tol: float = CLASSIFY_TOL) -> SupEstimate:
    """
    sup over A-unit x of sqrt(sum ||T_k x||_A^2).

    'eigen' uses ||T||_A = ||sum T_k# T_k||_A^{1/2} (the compression of
    sum T_k# T_k is sum C_k* C_k); 'sphere' maximizes the definition;
    'sampling' takes the best of opt.brute_force_samples random A-unit
    vectors (SAMPLES when that is 0).
    """
    T = as_tuple(T)
    C = _compressed(space, T, tol)
    if space.rank == 0:
        return _zero_sup(space)
    obj = QuadraticFormObjective.gram(C)
    if method == 'eigen':
        top, u = extreme_eigenpair(obj.G)
        return SupEstimate(float(np.sqrt(max(top, 0.0))), _lift(space, u), Method.EIGEN_EXACT)
    opt = opt or OptConfig()
    if method == 'sampling':
        return _root(space, sampled_maximum(obj, opt.brute_force_samples or SAMPLES, opt.seed))
    if method != 'sphere':
        raise InvalidParams(f"unknown joint norm method {method!r}")
    est = sphere_maximize(obj, opt, spectral_seeds(C, opt.seeded_starts))
    return _root(space, est)


def _root(space: SpaceA, est: SupEstimate) -> SupEstimate:
    return SupEstimate(float(np.sqrt(max(est.value, 0.0))), _lift(space, est.certificate),
                       est.method, est.lower_bound, float(np.sqrt(est.residual)))


def _polish_by_dual(C: np.ndarray, obj: ModulusObjective, u: np.ndarray, value: float,
                    opt: OptConfig, sweep: Optional[SweepConfig]):
    """
    Ascend through sup_{|lam|=1} w(sum lam_k C_k): with lam = conj(c)/|c| at
    the current u, the numerical radius certificate of sum lam_k C_k scores
    at least |c| on the tuple objective.
    """
    for _ in range(POLISH_ROUNDS):
        c = obj.forms(u)[0]
        size = np.linalg.norm(c)
        if size == 0.0:
            break
        lam = np.conj(c) / size
        combo = np.einsum('k,kij->ij', lam, C)
        candidate = classical_numrad(combo, sweep).certificate
        candidate, cand_value = polish(obj, candidate, opt)
        if cand_value <= value * (1.0 + 1e-15):
            break
        logger.debug("dual polishing raised the Euclidean radius objective %.15g -> %.15g",
                     value, cand_value)
        u, value = candidate, cand_value
    return u, value


def euclid_radius(space: SpaceA, T: TupleLike, opt: Optional[OptConfig] = None,
                  sweep: Optional[SweepConfig] = None, tol: float = CLASSIFY_TOL) -> SupEstimate:
    """sup over A-unit x of sqrt(sum |<T_k x, x>_A|^2); n = 1 is the A-numerical radius"""
    T = as_tuple(T)
    if T.n == 1:
        return a_numrad(space, T[0], sweep, tol)
    C = _compressed(space, T, tol)
    if space.rank == 0:
        return _zero_sup(space)
    opt = opt or OptConfig()
    obj = ModulusObjective(C)
    est = sphere_maximize(obj, opt, spectral_seeds(C, opt.seeded_starts))
    u, value = _polish_by_dual(C, obj, est.certificate, est.value, opt, sweep)
    return _root(space, SupEstimate(value, u, Method.SPHERE_OPT))


def joint_crawford(space: SpaceA, T: TupleLike, opt: Optional[OptConfig] = None,
                   tol: float = CLASSIFY_TOL) -> InfEstimate:
    """c_A(T): inf over A-unit x of sqrt(sum |<T_k x, x>_A|^2), an upper bound from descent"""
    T = as_tuple(T)
    C = _compressed(space, T, tol)
    _require_rank(space, 'the joint Crawford number')
    opt = opt or OptConfig()
    est = sphere_minimize(ModulusObjective(C), opt, spectral_seeds(C, opt.seeded_starts))
    return InfEstimate(float(np.sqrt(max(est.value, 0.0))), _lift(space, est.certificate),
                       est.method, True, float(np.sqrt(est.residual)))


def joint_min_modulus(space: SpaceA, T: TupleLike, tol: float = CLASSIFY_TOL) -> InfEstimate:
    """m_A(T) = sqrt(lambda_min(sum C_k* C_k)) on range(A)"""
    T = as_tuple(T)
    C = _compressed(space, T, tol)
    _require_rank(space, 'the joint minimum modulus')
    gram = np.einsum('kji,kjl->il', np.conj(C), C)
    bottom, u = extreme_eigenpair(gram, largest=False)
    return InfEstimate(float(np.sqrt(max(bottom, 0.0))), _lift(space, u), Method.EIGEN_EXACT)


def seminorm_objective(C: np.ndarray, alpha: float, beta: float) -> SphereObjective:
    """f(u) = sum_k alpha |u* C_k u|^2 + beta ||C_k u||^2"""
    return SumObjective([ModulusObjective(C), QuadraticFormObjective.gram(C)], [alpha, beta])


def alpha_beta_seminorm(space: SpaceA, T: TupleLike, params: SeminormParams,
                        opt: Optional[OptConfig] = None, sweep: Optional[SweepConfig] = None,
                        dispatch: bool = True, seeds: Optional[np.ndarray] = None,
                        tol: float = CLASSIFY_TOL) -> SupEstimate:
    """
    ||T||_{A_{alpha,beta}} = sup over A-unit x of sqrt(sum alpha |<T_k x,x>_A|^2 + beta ||T_k x||_A^2).

    With dispatch, alpha = 0 and beta = 0 reduce to the joint norm and the
    Euclidean radius. Otherwise the weights are normalized to sum 1 and the
    result rescaled by sqrt(alpha + beta). Extra seeds are reduced vectors,
    e.g. certificates of those two limits.
    """
    T = as_tuple(T)
    if dispatch and params.alpha == 0.0:
        return joint_op_norm(space, T, tol=tol).scaled(math.sqrt(params.beta))
    if dispatch and params.beta == 0.0:
        return euclid_radius(space, T, opt, sweep, tol).scaled(math.sqrt(params.alpha))

    C = _compressed(space, T, tol)
    if space.rank == 0:
        return _zero_sup(space)
    opt = opt or OptConfig()
    total = params.total
    obj = seminorm_objective(C, params.alpha / total, params.beta / total)

    start = spectral_seeds(C, opt.seeded_starts)
    if seeds is not None and len(seeds):
        extra = np.atleast_2d(np.asarray(seeds, dtype=np.complex128)) @ np.conj(space.range_basis)
        start = np.concatenate([normalize_rows(extra), start])
    est = sphere_maximize(obj, opt, start)
    return _root(space, est).scaled(math.sqrt(total))


def alpha_seminorm(space: SpaceA, T, alpha: float, opt: Optional[OptConfig] = None,
                   sweep: Optional[SweepConfig] = None, tol: float = CLASSIFY_TOL) -> SupEstimate:
    """Single-operator A_alpha-seminorm: the (alpha, 1 - alpha) case, 0 <= alpha <= 1"""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParams(f"alpha must lie in [0, 1], got {alpha}")
    return alpha_beta_seminorm(space, OpTuple.of(check_op(space, T)),
                               SeminormParams(alpha, 1.0 - alpha), opt, sweep, tol=tol)


def seminorm_at(space: SpaceA, T: TupleLike, params: SeminormParams, y) -> float:
    """The (alpha, beta) objective at a reduced unit vector, square-rooted"""
    T = as_tuple(T)
    if space.rank == 0:
        return 0.0
    C = _compressed(space, T)
    u = to_compressed(space, y)
    norm = np.linalg.norm(u)
    if norm == 0.0:
        return 0.0
    value = seminorm_objective(C, params.alpha, params.beta)(u / norm)
    return float(np.sqrt(max(value, 0.0)))
