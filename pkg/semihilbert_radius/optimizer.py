#!/usr/bin/env python3
"""
Multistart projected gradient ascent on the complex unit sphere.

All starts are advanced together as one (B, d) batch. Objectives supply
their value and Wirtinger (conjugate-coordinate) gradient for a batch of
unit vectors.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

import numpy as np

from semihilbert_radius.config import OptConfig
from semihilbert_radius.errors import DimensionMismatch, InvalidParams, NonFinite
from semihilbert_radius.estimates import InfEstimate, Method, SupEstimate

logger = logging.getLogger(__name__)

BRUTE_FORCE_CHUNK = 4096
BRUTE_FORCE_STARTS = 8
# longest tangent move tried by the line search, in radians
MAX_ARC = 0.5


def _batch(Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.complex128)
    return Y[None, :] if Y.ndim == 1 else Y


def normalize_rows(Y: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(Y, axis=-1, keepdims=True)
    return Y / np.where(norms > 0.0, norms, 1.0)


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Normalized standard complex Gaussian draws (uniform on the sphere)"""
    Z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return normalize_rows(Z)


class SphereObjective(ABC):
    """Real, phase-invariant function of a unit vector y in C^dim"""

    dim: int

    @abstractmethod
    def evaluate(self, Y) -> np.ndarray:
        """Values for a batch (B, dim) of vectors"""

    @abstractmethod
    def wirtinger_grad(self, Y) -> np.ndarray:
        """df/d(conj y) for a batch (B, dim); the real gradient is twice this"""

    def __call__(self, y) -> float:
        return float(self.evaluate(_batch(y))[0])


class QuadraticFormObjective(SphereObjective):
    """y* G y for Hermitian G (G = M*M gives ||My||^2)"""

    def __init__(self, G):
        G = np.asarray(G, dtype=np.complex128)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise DimensionMismatch(f"quadratic form needs a square matrix, got {G.shape}")
        self.G = 0.5 * (G + np.conj(G.T))
        self.dim = G.shape[0]

    @classmethod
    def gram(cls, mats) -> 'QuadraticFormObjective':
        """sum_k ||M_k y||^2"""
        mats = np.asarray(mats, dtype=np.complex128)
        return cls(np.einsum('kji,kjl->il', np.conj(mats), mats))

    def evaluate(self, Y):
        Y = _batch(Y)
        return np.real(np.einsum('bi,bi->b', np.conj(Y), Y @ self.G.T))

    def wirtinger_grad(self, Y):
        return _batch(Y) @ self.G.T


class ModulusObjective(SphereObjective):
    """sum_k |y* M_k y|^2"""

    def __init__(self, mats):
        mats = np.asarray(mats, dtype=np.complex128)
        if mats.ndim == 2:
            mats = mats[None]
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise DimensionMismatch(f"expected a stack of square matrices, got {mats.shape}")
        self.mats = mats
        self.mats_h = np.conj(np.swapaxes(mats, 1, 2))
        self.dim = mats.shape[1]

    def forms(self, Y) -> np.ndarray:
        """c_bk = y_b* M_k y_b"""
        Y = _batch(Y)
        return np.einsum('bi,kij,bj->bk', np.conj(Y), self.mats, Y)

    def evaluate(self, Y):
        return np.sum(np.abs(self.forms(Y)) ** 2, axis=1)

    def wirtinger_grad(self, Y):
        Y = _batch(Y)
        MY = np.einsum('kij,bj->bki', self.mats, Y)
        MhY = np.einsum('kij,bj->bki', self.mats_h, Y)
        c = np.einsum('bi,bki->bk', np.conj(Y), MY)
        return np.einsum('bk,bki->bi', np.conj(c), MY) + np.einsum('bk,bki->bi', c, MhY)


class SumObjective(SphereObjective):
    def __init__(self, terms: Sequence[SphereObjective], weights: Sequence[float]):
        if len(terms) != len(weights) or not terms:
            raise InvalidParams("SumObjective needs one weight per term")
        dims = {t.dim for t in terms}
        if len(dims) != 1:
            raise DimensionMismatch(f"terms have different dimensions: {sorted(dims)}")
        self.terms = list(terms)
        self.weights = [float(w) for w in weights]
        self.dim = dims.pop()

    def evaluate(self, Y):
        Y = _batch(Y)
        total = np.zeros(Y.shape[0])
        for term, weight in zip(self.terms, self.weights):
            if weight != 0.0:
                total += weight * term.evaluate(Y)
        return total

    def wirtinger_grad(self, Y):
        Y = _batch(Y)
        total = np.zeros_like(Y)
        for term, weight in zip(self.terms, self.weights):
            if weight != 0.0:
                total += weight * term.wirtinger_grad(Y)
        return total


class NegatedObjective(SphereObjective):
    def __init__(self, inner: SphereObjective):
        self.inner = inner
        self.dim = inner.dim

    def evaluate(self, Y):
        return -self.inner.evaluate(Y)

    def wirtinger_grad(self, Y):
        return -self.inner.wirtinger_grad(Y)


def tangent_gradient(obj: SphereObjective, Y: np.ndarray) -> np.ndarray:
    """Riemannian gradient: real gradient 2g minus its radial component"""
    G = 2.0 * obj.wirtinger_grad(Y)
    radial = np.real(np.einsum('bi,bi->b', np.conj(Y), G))
    return G - radial[:, None] * Y


def _check_finite(values: np.ndarray, where: str):
    if not np.all(np.isfinite(values)):
        raise NonFinite(f"objective returned a non-finite value during {where}")


def brute_force_extremum(obj: SphereObjective, samples: int, seed: int,
                         return_vectors: bool = False):
    """
    Min and max of obj over `samples` random unit vectors.

    With return_vectors the minimizing and maximizing samples come back too:
    (lo, hi, y_lo, y_hi).
    """
    if samples < 1:
        raise InvalidParams(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, -np.inf
    y_lo = y_hi = None
    remaining = samples
    while remaining > 0:
        count = min(BRUTE_FORCE_CHUNK, remaining)
        Y = random_unit_vectors(rng, count, obj.dim)
        values = obj.evaluate(Y)
        _check_finite(values, 'sampling')
        i_max = int(np.argmax(values))
        i_min = int(np.argmin(values))
        if values[i_max] > hi:
            hi, y_hi = float(values[i_max]), Y[i_max]
        if values[i_min] < lo:
            lo, y_lo = float(values[i_min]), Y[i_min]
        remaining -= count
    if return_vectors:
        return lo, hi, y_lo, y_hi
    return lo, hi


def sampled_maximum(obj: SphereObjective, samples: int, seed: int) -> SupEstimate:
    """Largest sampled value, a lower bound of the sup attained at the returned vector"""
    _, hi, _, y_hi = brute_force_extremum(obj, samples, seed, return_vectors=True)
    return SupEstimate(hi, y_hi, Method.SAMPLING, lower_bound=True)


def sampled_minimum(obj: SphereObjective, samples: int, seed: int) -> InfEstimate:
    lo, _, y_lo, _ = brute_force_extremum(obj, samples, seed, return_vectors=True)
    return InfEstimate(lo, y_lo, Method.SAMPLING, upper_bound=True)


def _top_samples(obj: SphereObjective, samples: int, seed: int, keep: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    best_vals = np.empty(0)
    best_vecs = np.empty((0, obj.dim), dtype=np.complex128)
    remaining = samples
    while remaining > 0:
        count = min(BRUTE_FORCE_CHUNK, remaining)
        Y = random_unit_vectors(rng, count, obj.dim)
        values = obj.evaluate(Y)
        _check_finite(values, 'sampling')
        best_vals = np.concatenate([best_vals, values])
        best_vecs = np.concatenate([best_vecs, Y])
        order = np.argsort(-best_vals, kind='stable')[:keep]
        best_vals, best_vecs = best_vals[order], best_vecs[order]
        remaining -= count
    return best_vecs


def initial_points(obj: SphereObjective, cfg: OptConfig,
                   seeds: Optional[np.ndarray] = None) -> np.ndarray:
    """Seeded starts first, then random starts, then the best brute-force samples"""
    blocks = []
    if seeds is not None and len(seeds):
        seeds = _batch(seeds)
        if seeds.shape[1] != obj.dim:
            raise DimensionMismatch(f"seed vectors have length {seeds.shape[1]}, objective dim {obj.dim}")
        nonzero = np.linalg.norm(seeds, axis=1) > 0.0
        blocks.append(normalize_rows(seeds[nonzero]))
    rng = np.random.default_rng(cfg.seed)
    blocks.append(random_unit_vectors(rng, cfg.starts, obj.dim))
    if cfg.brute_force_samples > 0:
        blocks.append(_top_samples(obj, cfg.brute_force_samples, cfg.seed + 7919, BRUTE_FORCE_STARTS))
    return np.concatenate(blocks, axis=0)


def _ascend(obj: SphereObjective, Y: np.ndarray, cfg: OptConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Armijo-backtracked projected gradient ascent of every row of Y; returns (Y, f, converged).

    Each row keeps its last accepted step, doubled, as the next trial step,
    capped so the tangent move ||eta G|| never exceeds MAX_ARC. A row whose
    line search fails at every halving is at a numerical extremum and stops.
    """
    f = obj.evaluate(Y)
    _check_finite(f, 'optimization')
    steps = np.full(Y.shape[0], cfg.step_init)
    converged = np.zeros(Y.shape[0], dtype=bool)
    stalled = np.zeros(Y.shape[0], dtype=bool)

    for _ in range(cfg.max_iter):
        Gt = tangent_gradient(obj, Y)
        gnorm = np.linalg.norm(Gt, axis=1)
        _check_finite(gnorm, 'optimization')
        converged = gnorm <= cfg.grad_tol * (1.0 + np.abs(f))
        pending = ~converged & ~stalled
        if not np.any(pending):
            break

        eta = np.minimum(steps, MAX_ARC / np.maximum(gnorm, np.finfo(float).tiny))
        accepted = np.zeros_like(pending)
        for _ in range(cfg.max_halvings):
            idx = np.flatnonzero(pending)
            if idx.size == 0:
                break
            trial = normalize_rows(Y[idx] + eta[idx, None] * Gt[idx])
            f_trial = obj.evaluate(trial)
            _check_finite(f_trial, 'line search')
            ok = f_trial >= f[idx] + cfg.armijo * eta[idx] * gnorm[idx] ** 2
            good = idx[ok]
            Y[good] = trial[ok]
            f[good] = f_trial[ok]
            accepted[good] = True
            pending[good] = False
            eta[idx[~ok]] *= cfg.backtrack_factor
        stalled |= pending
        steps = np.where(accepted, eta / cfg.backtrack_factor, steps)

    return Y, f, converged


def polish(obj: SphereObjective, y, cfg: Optional[OptConfig] = None) -> Tuple[np.ndarray, float]:
    """Single-start ascent from y"""
    cfg = cfg or OptConfig()
    Y, f, _ = _ascend(obj, normalize_rows(_batch(y)).copy(), cfg)
    return Y[0] / np.linalg.norm(Y[0]), float(f[0])


def sphere_maximize(obj: SphereObjective, cfg: Optional[OptConfig] = None,
                    seeds: Optional[np.ndarray] = None) -> SupEstimate:
    """Best local maximum over all starts; the value is a certified lower bound of the sup"""
    cfg = cfg or OptConfig()
    if obj.dim < 1:
        raise InvalidParams("objective dimension must be >= 1")
    Y0 = initial_points(obj, cfg, seeds)
    Y, f, converged = _ascend(obj, Y0.copy(), cfg)

    best = int(np.argmax(f))
    y = Y[best] / np.linalg.norm(Y[best])
    value = float(obj(y))
    logger.debug("sphere ascent: %d/%d starts converged, best %.12g from start %d",
                 int(np.count_nonzero(converged)), len(f), value, best)
    return SupEstimate(value, y, Method.SPHERE_OPT, lower_bound=True,
                       residual=abs(value - float(f[best])))


def sphere_minimize(obj: SphereObjective, cfg: Optional[OptConfig] = None,
                    seeds: Optional[np.ndarray] = None) -> InfEstimate:
    """Best local minimum over all starts; the value is a certified upper bound of the inf"""
    est = sphere_maximize(NegatedObjective(obj), cfg, seeds)
    return InfEstimate(-est.value, est.certificate, Method.SPHERE_OPT,
                       upper_bound=True, residual=est.residual)
