#!/usr/bin/env python3
"""
Registry of direction-aware inequality and identity checks.

A check evaluates both sides of one statement on an instance and compares
them with a relative slack. Each side is a Bound: an exact value, or a
certified lower/upper bound when it came out of the sphere optimizer. A
failing comparison that involves a non-exact side is recomputed with the
escalated optimizer budget before it is reported as a violation candidate.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import partial
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from semihilbert_radius.config import SuiteConfig
from semihilbert_radius.errors import NonFinite, NotABounded, NotHermitian, UnknownCheck, ZeroWeight
from semihilbert_radius.estimates import Direction
from semihilbert_radius.harness.ensembles import Instance
from semihilbert_radius.matrix_core import frobenius, spectral_norm
from semihilbert_radius.radii import (
    SeminormParams, alpha_beta_seminorm, euclid_radius, joint_crawford,
    joint_min_modulus, joint_op_norm, seminorm_at,
)
from semihilbert_radius.semihilbert import (
    OpTuple, a_adjoint, a_inner, a_norm, cartesian_a, classify, reduce_op, tuple_predicates,
)

logger = logging.getLogger(__name__)

SLACK_REL = 1e-6
VECTOR_TRIALS = 16

_EUCLID = SeminormParams(1.0, 0.0)


class Relation(str, Enum):
    LE = '<='
    EQ = '=='


class Verdict(str, Enum):
    PASS = 'pass'
    VIOLATION_CANDIDATE = 'violation_candidate'
    SKIPPED = 'skipped'


def _merge_directions(a: Direction, b: Direction) -> Direction:
    if a == Direction.EXACT:
        return b
    if b == Direction.EXACT or a == b:
        return a
    raise ValueError(f"cannot combine a {a.value} with a {b.value}")


@dataclass(frozen=True)
class Bound:
    """Nonnegative quantity together with the side of the true value it is known to lie on"""

    value: float
    direction: Direction = Direction.EXACT

    def _lift(self, other) -> 'Bound':
        return other if isinstance(other, Bound) else Bound(float(other))

    def __add__(self, other) -> 'Bound':
        other = self._lift(other)
        return Bound(self.value + other.value, _merge_directions(self.direction, other.direction))

    __radd__ = __add__

    def __mul__(self, other) -> 'Bound':
        other = self._lift(other)
        if other.value < 0.0 or self.value < 0.0:
            raise ValueError("bounds only scale by nonnegative factors")
        return Bound(self.value * other.value, _merge_directions(self.direction, other.direction))

    __rmul__ = __mul__

    def __pow__(self, p: float) -> 'Bound':
        return Bound(max(self.value, 0.0) ** p, self.direction)

    def sqrt(self) -> 'Bound':
        return self ** 0.5

    def improved(self, value: Optional[float]) -> 'Bound':
        """Tighten with the objective value read off at some unit vector"""
        if value is None:
            return self
        if self.direction == Direction.LOWER_BOUND:
            return Bound(max(self.value, value), self.direction)
        if self.direction == Direction.UPPER_BOUND:
            return Bound(min(self.value, value), self.direction)
        return self


def bmin(bounds: Iterable[Bound]) -> Bound:
    bounds = list(bounds)
    direction = bounds[0].direction
    for b in bounds[1:]:
        direction = _merge_directions(direction, b.direction)
    return Bound(min(b.value for b in bounds), direction)


def grid_ratios(values: Sequence[float]) -> Tuple[float, ...]:
    """Distinct alpha/(alpha + beta) over the parameter grid; the inf-form corollaries depend on nothing else"""
    ratios = {round(a / (a + b), 12) for a in values for b in values if a + b > 0.0}
    return tuple(sorted(ratios))


Outcome = Tuple[Bound, Bound]


@dataclass
class CheckResult:
    check_id: str
    relation: Relation
    lhs: float
    rhs: float
    slack_used: float
    verdict: Verdict
    lhs_direction: Direction
    rhs_direction: Direction
    instance_digest: str
    ensemble: str = ''
    seed: int = 0
    ratio: Optional[float] = None
    escalated: bool = False
    advisory: bool = False
    note: str = ''

    @property
    def slack_consumed(self) -> float:
        """Fraction of the slack eaten by lhs - rhs (negative when there is room)"""
        gap = abs(self.lhs - self.rhs) if self.relation == Relation.EQ else self.lhs - self.rhs
        return gap / self.slack_used if self.slack_used > 0.0 else 0.0

    def to_dict(self) -> dict:
        return {
            'check_id': self.check_id,
            'relation': self.relation.value,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'slack_used': self.slack_used,
            'verdict': self.verdict.value,
            'lhs_direction': self.lhs_direction.value,
            'rhs_direction': self.rhs_direction.value,
            'instance_digest': self.instance_digest,
            'ensemble': self.ensemble,
            'seed': self.seed,
            'ratio': self.ratio,
            'escalated': self.escalated,
            'advisory': self.advisory,
            'note': self.note,
        }


class Evaluator:
    """
    Memoized quantities of one instance.

    Tuples are addressed by name: 'T', 'S', 'T#', 'T#T', 'TT#', 'S#S', 'S#T',
    'TS', 'T2', 'ReT', 'kerT', 'T+S', 'UTU#', the member views 'T#T[k]'
    and the linear combinations created by combo().
    """

    def __init__(self, instance: Instance, cfg: SuiteConfig, escalated: bool = False):
        self.instance = instance
        self.space = instance.space
        self.params = instance.params
        self.n = instance.n
        self.cfg = cfg
        self.tol = cfg.classify_tol
        self.sweep = cfg.sweep
        self.escalated = escalated
        self.opt = cfg.opt.escalated() if escalated else cfg.screening_opt()
        self.scan_opt = self.opt if escalated else replace(
            self.opt, starts=max(2, self.opt.starts // 3), seeded_starts=min(self.opt.seeded_starts, 2),
            max_iter=max(50, self.opt.max_iter // 2))
        self.ratios = grid_ratios(cfg.inf_grid)
        self._tuples: Dict[str, OpTuple] = {}
        self._memo: Dict[tuple, object] = {}
        self._gates: Dict[str, bool] = {}

    # tuples

    def _sharp(self, op):
        return a_adjoint(self.space, op)

    def _build(self, name: str) -> OpTuple:
        T, S = self.instance.T, self.instance.S
        sharp = self._sharp
        space = self.space
        builders: Dict[str, Callable[[], OpTuple]] = {
            'T': lambda: T,
            'S': lambda: S,
            'T#': lambda: T.map(sharp),
            'T#T': lambda: T.map(lambda t: sharp(t) @ t),
            'TT#': lambda: T.map(lambda t: t @ sharp(t)),
            'S#S': lambda: S.map(lambda s: sharp(s) @ s),
            'S#T': lambda: S.pairwise(T, lambda s, t: sharp(s) @ t),
            'TS': lambda: T.product(S),
            'T2': lambda: T.power(2),
            'ReT': lambda: T.map(lambda t: cartesian_a(space, t)[0]),
            'kerT': lambda: T.map(lambda t: (np.eye(space.dim) - space.projP) @ t),
            'T+S': lambda: T.add(S),
            'UTU#': lambda: T.map(lambda t: self.instance.unitary @ t @ sharp(self.instance.unitary)),
        }
        if name not in builders:
            raise KeyError(f"no tuple named {name!r}")
        return builders[name]()

    def tup(self, name: str) -> OpTuple:
        if name not in self._tuples:
            self._tuples[name] = self._build(name)
        return self._tuples[name]

    def define(self, name: str, build: Callable[[], OpTuple]) -> str:
        if name not in self._tuples:
            self._tuples[name] = build()
        return name

    def member(self, name: str, k: int) -> str:
        return self.define(f'{name}[{k}]', lambda: OpTuple.of(self.tup(name)[k]))

    def combo(self, *terms: Tuple[float, str]) -> str:
        """Entrywise sum_i c_i * tuple_i; zero coefficients are dropped"""
        terms = [(float(c), name) for c, name in terms if c != 0.0]
        label = ' + '.join(f'{c!r}*{name}' for c, name in terms)

        def build():
            parts = [self.tup(name) for _, name in terms]
            return OpTuple(tuple(sum(c * p[k] for (c, _), p in zip(terms, parts))
                                 for k in range(parts[0].n)))

        return self.define(label, build)

    def square(self, name: str) -> str:
        """Entrywise square of a named tuple"""
        return self.define(f'({name})^2', lambda: self.tup(name).power(2))

    def power(self, name: str, m: int) -> str:
        return self.define(f'({name})^{m}', lambda: self.tup(name).power(m))

    # quantities

    def _cached(self, key: tuple, compute: Callable):
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def _norm_est(self, name: str):
        return self._cached(('norm', name), lambda: joint_op_norm(self.space, self.tup(name), tol=self.tol))

    def norm(self, name: str) -> Bound:
        """||.||_A of a member, joint A-operator seminorm of a tuple"""
        return Bound(self._norm_est(name).value, Direction.EXACT)

    def norm_cert(self, name: str):
        return self._norm_est(name).certificate

    def sphere_norm(self, name: str) -> Bound:
        est = self._cached(('sphere_norm', name), lambda: joint_op_norm(
            self.space, self.tup(name), method='sphere', opt=self.opt, tol=self.tol))
        return Bound(est.value, est.direction)

    def _numrad_est(self, name: str, scan: bool):
        opt = self.scan_opt if scan else self.opt
        return self._cached(('numrad', name, scan), lambda: euclid_radius(
            self.space, self.tup(name), opt, self.sweep, self.tol))

    def numrad(self, name: str, scan: bool = False, at: Iterable = ()) -> Bound:
        """A-numerical radius (n = 1) or A-Euclidean radius, tightened at the vectors in `at`"""
        est = self._numrad_est(name, scan)
        bound = Bound(est.value, est.direction)
        for y in at:
            bound = bound.improved(self.radius_at(name, y))
        return bound

    def numrad_cert(self, name: str):
        return self._numrad_est(name, False).certificate

    def crawford(self, name: str) -> Bound:
        est = self._cached(('crawford', name), lambda: joint_crawford(
            self.space, self.tup(name), self.opt, self.tol))
        return Bound(est.value, est.direction)

    def min_modulus(self, name: str) -> Bound:
        est = self._cached(('min_modulus', name), lambda: joint_min_modulus(
            self.space, self.tup(name), self.tol))
        return Bound(est.value, est.direction)

    def _seminorm_est(self, name: str, params: SeminormParams, dispatch: bool):
        def compute():
            seeds = [self.norm_cert(name)]
            known = self._memo.get(('numrad', name, False))
            if known is not None:
                seeds.append(known.certificate)
            seeds = [y for y in seeds if y is not None] if dispatch else []
            return alpha_beta_seminorm(self.space, self.tup(name), params, self.opt, self.sweep,
                                       dispatch=dispatch, seeds=np.array(seeds) if seeds else None,
                                       tol=self.tol)

        return self._cached(('seminorm', name, params.alpha, params.beta, dispatch), compute)

    def seminorm(self, name: str, params: Optional[SeminormParams] = None,
                 dispatch: bool = True, at: Iterable = ()) -> Bound:
        params = params or self.params
        est = self._seminorm_est(name, params, dispatch)
        bound = Bound(est.value, est.direction)
        for y in at:
            bound = bound.improved(self.value_at(name, y, params))
        return bound

    def seminorm_cert(self, name: str, params: Optional[SeminormParams] = None, dispatch: bool = True):
        return self._seminorm_est(name, params or self.params, dispatch).certificate

    def value_at(self, name: str, y, params: Optional[SeminormParams] = None) -> Optional[float]:
        if y is None:
            return None
        return seminorm_at(self.space, self.tup(name), params or self.params, y)

    def radius_at(self, name: str, y) -> Optional[float]:
        return self.value_at(name, y, _EUCLID)

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.instance.seed, stream])

    # structural hypotheses

    def holds(self, requirement: str) -> bool:
        if requirement not in self._gates:
            self._gates[requirement] = bool(self._test(requirement))
        return self._gates[requirement]

    def _test(self, requirement: str) -> bool:
        space, T, S, tol = self.space, self.instance.T, self.instance.S, self.tol
        if requirement == 'n>=2':
            return self.n >= 2
        if requirement == 'beta>0':
            return self.params.beta > 0.0
        if requirement == 'rank>=1':
            return space.rank >= 1
        if requirement == 'commuting':
            return tuple_predicates(space, T, tol).commuting
        if requirement == 'a_normal_commuting':
            pred = tuple_predicates(space, T, tol)
            return pred.commuting and pred.a_normal
        if requirement == 'TS=ST':
            return all(frobenius(t @ s - s @ t) <= tol * max(frobenius(t) * frobenius(s), 1.0)
                       for t, s in zip(T, S))
        if requirement == 'T_a_isometry':
            return all(classify(space, t, tol).a_isometry for t in T)
        if requirement == 'AT2=0':
            a_fro = frobenius(space.A)
            return all(frobenius(space.A @ t @ t) <= tol * max(a_fro * frobenius(t) ** 2, 1.0) for t in T)
        if requirement == 'AT!=0':
            a_fro = frobenius(space.A)
            return any(frobenius(space.A @ t) > tol * max(a_fro * frobenius(t), 1.0) for t in T)
        if requirement == 'unitary':
            U = self.instance.unitary
            return U is not None and classify(space, U, tol).a_unitary
        raise KeyError(f"unknown requirement {requirement!r}")


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    relation: Relation
    statement: str
    fn: Callable
    requires: Tuple[str, ...] = ()
    members: bool = False
    advisory: bool = False


REGISTRY: Dict[str, CheckSpec] = {}


def register(check_id: str, statement: str, fn: Callable, relation: Relation = Relation.LE,
             requires: Sequence[str] = (), members: bool = False, advisory: bool = False):
    if check_id in REGISTRY:
        raise ValueError(f"duplicate check id {check_id}")
    REGISTRY[check_id] = CheckSpec(check_id, relation, statement, fn, tuple(requires), members, advisory)


def check(check_id: str, statement: str, **kwargs):
    def decorate(fn):
        register(check_id, statement, fn, **kwargs)
        return fn
    return decorate


def _sqrt_n(ev: Evaluator) -> float:
    return math.sqrt(ev.n)


# ---------------------------------------------------------------- classical facts, one operator at a time


@check('INEQ-00-lower', '||T||_A / 2 <= w_A(T)', members=True)
def _ineq00_lower(ev, k):
    t = ev.member('T', k)
    return 0.5 * ev.norm(t), ev.numrad(t)


@check('INEQ-00-upper', 'w_A(T) <= ||T||_A', members=True)
def _ineq00_upper(ev, k):
    t = ev.member('T', k)
    return ev.numrad(t), ev.norm(t)


@check('EQ-SA', 'w_A(R) = ||R||_A for the A-selfadjoint R = Re_A(T)', relation=Relation.EQ, members=True)
def _eq_sa(ev, k):
    r = ev.member('ReT', k)
    return ev.numrad(r), ev.norm(r)


@check('EQ-NILP', 'AT^2 = 0 implies w_A(T) = ||T||_A / 2', relation=Relation.EQ,
       requires=('AT2=0',), members=True)
def _eq_nilp(ev, k):
    t = ev.member('T', k)
    return ev.numrad(t), 0.5 * ev.norm(t)


@check('INEQ-Z1', 'w_A(T)^2 <= ||T#T + TT#||_A / 2', members=True)
def _ineq_z1(ev, k):
    return ev.numrad(ev.member('T', k)) ** 2, 0.5 * ev.norm(ev.member(ev.combo((1.0, 'T#T'), (1.0, 'TT#')), k))


@check('INEQ-Z2', 'w_A(T)^2 <= ||T#T + TT#||_A / 4 + w_A(T^2) / 2', members=True)
def _ineq_z2(ev, k):
    both = ev.member(ev.combo((1.0, 'T#T'), (1.0, 'TT#')), k)
    return ev.numrad(ev.member('T', k)) ** 2, 0.25 * ev.norm(both) + 0.5 * ev.numrad(ev.member('T2', k))


def _ineq_g1(ev, k, m):
    tt = ev.member(ev.power('T#T', m), k)
    tts = ev.member(ev.power('TT#', m), k)
    return ev.numrad(ev.member('T', k)) ** (2 * m), 0.5 * ev.norm(ev.combo((1.0, tt), (1.0, tts)))


def _ineq_g2(ev, k, m):
    tt = ev.member(ev.power('T#T', m), k)
    ss = ev.member(ev.power('S#S', m), k)
    return ev.numrad(ev.member('S#T', k)) ** m, 0.5 * ev.norm(ev.combo((1.0, tt), (1.0, ss)))


for _m in (1, 2, 3):
    register(f'INEQ-G1-m{_m}', f'w_A(T)^{2 * _m} <= ||(T#T)^{_m} + (TT#)^{_m}||_A / 2',
             partial(_ineq_g1, m=_m), members=True)
    register(f'INEQ-G2-m{_m}', f'w_A(S#T)^{_m} <= ||(T#T)^{_m} + (S#S)^{_m}||_A / 2',
             partial(_ineq_g2, m=_m), members=True)


@check('INEQ-G3', 'w_A(S#T) <= ||T#T + S#S||_A / 2', members=True)
def _ineq_g3(ev, k):
    both = ev.member(ev.combo((1.0, 'T#T'), (1.0, 'S#S')), k)
    return ev.numrad(ev.member('S#T', k)), 0.5 * ev.norm(both)


def _random_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def _a_unit(space, v) -> Optional[np.ndarray]:
    size = a_norm(space, v)
    return v / size if size > 0.0 else None


def _worst(outcomes: List[Outcome], relation: Relation = Relation.LE) -> Outcome:
    return max(outcomes, key=lambda o: _excess(relation, o[0], o[1]))


@check('LEM-L1', '|<x,z>_A <z,y>_A| <= (||x||_A ||y||_A + |<x,y>_A|) / 2 for ||z||_A = 1',
       requires=('rank>=1',))
def _buzano(ev):
    space = ev.space
    rng = ev.rng(1)
    outcomes = []
    while len(outcomes) < VECTOR_TRIALS:
        x = _random_vector(rng, space.dim)
        y = _random_vector(rng, space.dim)
        x_hat, y_hat = _a_unit(space, x), _a_unit(space, y)
        if x_hat is None or y_hat is None:
            continue
        rhs = 0.5 * (a_norm(space, x) * a_norm(space, y) + abs(a_inner(space, x, y)))
        # random z, and the bisector of x and the phase-aligned y where equality holds
        phase = np.exp(1j * np.angle(a_inner(space, x_hat, y_hat)))
        for w in (_random_vector(rng, space.dim), x_hat + phase * y_hat):
            z = _a_unit(space, w)
            if z is not None:
                lhs = abs(a_inner(space, x, z) * a_inner(space, z, y))
                outcomes.append((Bound(lhs), Bound(rhs)))
    return _worst(outcomes)


def _mixed_power(ev, k, m):
    """<Px,x>_A^m <= <P^m x,x>_A for the A-positive P = T#T and A-unit x"""
    space = ev.space
    P = ev.tup('T#T')[k]
    Pm = np.linalg.matrix_power(P, m)
    rng = ev.rng(2 + k)
    candidates = [_random_vector(rng, space.dim) for _ in range(VECTOR_TRIALS)]
    candidates += [space.sqrtA_pinv @ space.range_basis[:, j] for j in range(space.rank)]
    outcomes = []
    for v in candidates:
        x = _a_unit(space, v)
        if x is None:
            continue
        lhs = max(a_inner(space, P @ x, x).real, 0.0) ** m
        rhs = a_inner(space, Pm @ x, x).real
        outcomes.append((Bound(lhs), Bound(max(rhs, 0.0))))
    return _worst(outcomes)


for _m in (2, 3):
    register(f'LEM-L2-m{_m}', f'<Px,x>_A^{_m} <= <P^{_m} x,x>_A for A-positive P and ||x||_A = 1',
             partial(_mixed_power, m=_m), requires=('rank>=1',), members=True)


# ---------------------------------------------------------------- tuples


@check('LEM-L4-lower', '||T||_A / (2 sqrt(n)) <= w_A(T)')
def _lem_l4_lower(ev):
    return ev.norm('T') * (1.0 / (2.0 * _sqrt_n(ev))), ev.numrad('T', at=[ev.norm_cert('T')])


@check('LEM-L4-upper', 'w_A(T) <= ||T||_A')
def _lem_l4_upper(ev):
    return ev.numrad('T'), ev.norm('T')


@check('LEM-L004', 'commuting A-normal T implies ||T||_A = w_A(T)', relation=Relation.EQ,
       requires=('a_normal_commuting',))
def _lem_l004(ev):
    return ev.norm('T'), ev.numrad('T', at=[ev.norm_cert('T')])


@check('LEM-L05', 'sup over ||x||_A = 1 of (sum ||T_k x||_A^2)^(1/2) = ||sum T_k# T_k||_A^(1/2)',
       relation=Relation.EQ)
def _lem_l05(ev):
    return ev.sphere_norm('T'), ev.norm(_sum_member(ev, 'T#T')).sqrt()


@check('LEM-L5', '||TS||_A <= ||T||_A ||S||_A')
def _lem_l5(ev):
    return ev.norm('TS'), ev.norm('T') * ev.norm('S')


@check('LEM-L6', 'w_A(TS) <= 4n w_A(T) w_A(S)')
def _lem_l6(ev):
    return ev.numrad('TS'), 4.0 * ev.n * ev.numrad('T') * ev.numrad('S')


@check('LEM-L66', 'TS = ST implies w_A(TS) <= 2 sqrt(n) w_A(T) w_A(S)', requires=('TS=ST',))
def _lem_l66(ev):
    return ev.numrad('TS'), 2.0 * _sqrt_n(ev) * ev.numrad('T') * ev.numrad('S')


@check('LEM-L7-numrad', 'A-isometries T_k imply w_A(TS) <= ||S||_A', requires=('T_a_isometry',))
def _lem_l7_numrad(ev):
    return ev.numrad('TS'), ev.norm('S')


@check('LEM-L7-norm', 'A-isometries T_k imply ||TS||_A <= ||S||_A', requires=('T_a_isometry',))
def _lem_l7_norm(ev):
    return ev.norm('TS'), ev.norm('S')


# ---------------------------------------------------------------- the (alpha, beta) seminorm


@check('PROP-P1a', '||K||_{a,b} = 0 for the kernel tuple K_k = (I - P) T_k', relation=Relation.EQ)
def _kernel(ev):
    return ev.seminorm('kerT'), Bound(0.0)


@check('PROP-P1b', '||lam T||_{a,b} = |lam| ||T||_{a,b}', relation=Relation.EQ)
def _homogeneity(ev):
    rng = ev.rng(11)
    lam = rng.uniform(0.25, 4.0) * np.exp(2j * np.pi * rng.random())
    scaled = ev.define('lamT', lambda: ev.tup('T').scale(lam))
    lhs = ev.seminorm(scaled, at=[ev.seminorm_cert('T')])
    rhs = abs(lam) * ev.seminorm('T', at=[ev.seminorm_cert(scaled)])
    return lhs, rhs


@check('PROP-P1c', '||T + S||_{a,b} <= ||T||_{a,b} + ||S||_{a,b}')
def _triangle(ev):
    y = ev.seminorm_cert('T+S')
    return ev.seminorm('T+S'), ev.seminorm('T', at=[y]) + ev.seminorm('S', at=[y])


@check('PROP-P1d', 'AT_k != 0 for some k implies ||T||_{a,b} >= c max_k ||AT_k|| / ||A|| > 0,'
       ' c = max(sqrt(b), sqrt(a) / (2 sqrt(n)))', requires=('AT!=0',))
def _definite(ev):
    A = ev.space.A
    c = max(math.sqrt(ev.params.beta), math.sqrt(ev.params.alpha) / (2.0 * _sqrt_n(ev)))
    floor = max(spectral_norm(A @ t) for t in ev.tup('T')) / spectral_norm(A)
    return Bound(c * floor), ev.seminorm('T', at=[ev.norm_cert('T')])


@check('PROP-P2', 'constant tuple (S,...,S), beta = 1 - alpha: ||.||_{a,b} = sqrt(n) ||S||_{a,b}',
       relation=Relation.EQ, requires=('n>=2',))
def _constant_tuple(ev):
    alpha = ev.params.alpha / ev.params.total
    params = SeminormParams(alpha, 1.0 - alpha)
    single = ev.member('T', 0)
    const = ev.define('const T1', lambda: OpTuple.constant(ev.tup('T')[0], ev.n))
    lhs = ev.seminorm(const, params, at=[ev.seminorm_cert(single, params)])
    rhs = _sqrt_n(ev) * ev.seminorm(single, params, at=[ev.seminorm_cert(const, params)])
    return lhs, rhs


@check('REMARK-ALPHA0', 'general optimizer at (0, 1) equals the joint A-operator seminorm', relation=Relation.EQ)
def _remark_alpha0(ev):
    return ev.seminorm('T', SeminormParams(0.0, 1.0), dispatch=False), ev.norm('T')


@check('REMARK-BETA0', 'general optimizer at (1, 0) equals the A-Euclidean radius', relation=Relation.EQ)
def _remark_beta0(ev):
    return ev.seminorm('T', SeminormParams(1.0, 0.0), dispatch=False), ev.numrad('T')


@check('TH1-i-lower', 'sqrt(a + b) w_A(T) <= ||T||_{a,b}')
def _th1_i_lower(ev):
    lhs = math.sqrt(ev.params.total) * ev.numrad('T')
    return lhs, ev.seminorm('T', at=[ev.numrad_cert('T')])


@check('TH1-i-upper', '||T||_{a,b} <= sqrt(a + 4bn) w_A(T)')
def _th1_i_upper(ev):
    p = ev.params
    lhs = ev.seminorm('T')
    return lhs, math.sqrt(p.alpha + 4.0 * p.beta * ev.n) * ev.numrad('T', at=[ev.seminorm_cert('T')])


@check('TH1-ii-lower', 'max{sqrt(b), sqrt((a + b)/n) / 2} ||T||_A <= ||T||_{a,b}')
def _th1_ii_lower(ev):
    p = ev.params
    factor = max(math.sqrt(p.beta), 0.5 * math.sqrt(p.total / ev.n))
    return factor * ev.norm('T'), ev.seminorm('T', at=[ev.norm_cert('T')])


@check('TH1-ii-upper', '||T||_{a,b} <= sqrt(a + b) ||T||_A')
def _th1_ii_upper(ev):
    return ev.seminorm('T'), math.sqrt(ev.params.total) * ev.norm('T')


@check('PROP-UNIT', '||U T U#||_{a,b} = ||T||_{a,b} for A-unitary U', relation=Relation.EQ,
       requires=('unitary',))
def _unitary_invariance(ev):
    U = reduce_op(ev.space, ev.instance.unitary)
    y_t = ev.seminorm_cert('T')
    y_u = ev.seminorm_cert('UTU#')
    lhs = ev.seminorm('UTU#', at=[None if y_t is None else U @ y_t])
    rhs = ev.seminorm('T', at=[None if y_u is None else np.conj(U.T) @ y_u])
    return lhs, rhs


def _th2_factor(alpha: float, beta: float, n: int) -> float:
    total = alpha + beta
    return min(2.0 * math.sqrt(n / beta), math.sqrt(total) / beta, 4.0 * n / math.sqrt(total))


@check('TH2', '||TS||_{a,b} <= min{2 sqrt(n/b), sqrt(a+b)/b, 4n/sqrt(a+b)} ||T||_{a,b} ||S||_{a,b}',
       requires=('beta>0',))
def _th2(ev):
    p = ev.params
    return ev.seminorm('TS'), _th2_factor(p.alpha, p.beta, ev.n) * ev.seminorm('T') * ev.seminorm('S')


@check('TH2-n1', '||T_k S_k||_{a,b} <= min{2/sqrt(b), sqrt(a+b)/b, 4/sqrt(a+b)} ||T_k||_{a,b} ||S_k||_{a,b}',
       requires=('beta>0',), members=True)
def _th2_n1(ev, k):
    p = ev.params
    factor = _th2_factor(p.alpha, p.beta, 1)
    return ev.seminorm(ev.member('TS', k)), factor * ev.seminorm(ev.member('T', k)) * ev.seminorm(ev.member('S', k))


@check('TH3-i', 'TS = ST implies ||TS||_{a,b} <= sqrt(4an/(a+b)^2 + 1/b) ||T||_{a,b} ||S||_{a,b}',
       requires=('beta>0', 'TS=ST'))
def _th3_i(ev):
    p = ev.params
    factor = math.sqrt(4.0 * p.alpha * ev.n / p.total ** 2 + 1.0 / p.beta)
    return ev.seminorm('TS'), factor * ev.seminorm('T') * ev.seminorm('S')


@check('TH3-ii', 'A-isometries T_k imply ||TS||_{a,b} <= sqrt(4an/(a+b) + 1) ||S||_{a,b}',
       requires=('T_a_isometry',))
def _th3_ii(ev):
    p = ev.params
    factor = math.sqrt(4.0 * p.alpha * ev.n / p.total + 1.0)
    return ev.seminorm('TS'), factor * ev.seminorm('S', at=[ev.seminorm_cert('TS')])


@check('TH-LOW-omega', 'sqrt(a w_A(T)^2 + b m_A(T)^2) <= ||T||_{a,b}', requires=('rank>=1',))
def _th_low_omega(ev):
    p = ev.params
    lhs = (p.alpha * ev.numrad('T') ** 2 + p.beta * ev.min_modulus('T') ** 2).sqrt()
    return lhs, ev.seminorm('T', at=[ev.numrad_cert('T')])


@check('TH-LOW-crawford', 'sqrt(a c_A(T)^2 + b ||T||_A^2) <= ||T||_{a,b}', requires=('rank>=1',))
def _th_low_crawford(ev):
    p = ev.params
    lhs = (p.alpha * ev.crawford('T') ** 2 + p.beta * ev.norm('T') ** 2).sqrt()
    return lhs, ev.seminorm('T', at=[ev.norm_cert('T')])


def _sum_member(ev, name: str) -> str:
    """The single operator sum_k X_k of a named tuple"""
    return ev.define(f'sum {name}', lambda: OpTuple.of(sum(ev.tup(name))))


@check('TH-P1', 'commuting T: ||sum(a/8 T T# + (a/8 + b/2) T# T)||_A <= ||T||_{a,b}^2', requires=('commuting',))
def _th_p1(ev):
    p = ev.params
    inner = _sum_member(ev, ev.combo((p.alpha / 8.0, 'TT#'), (p.alpha / 8.0 + p.beta / 2.0, 'T#T')))
    return ev.norm(inner), ev.seminorm('T', at=[ev.norm_cert(inner)]) ** 2


@check('COR-CL', '||a/8 TT# + (a/8 + b/2) T#T||_A <= ||T||_{a,b}^2', members=True)
def _cor_cl(ev, k):
    p = ev.params
    inner = ev.member(ev.combo((p.alpha / 8.0, 'TT#'), (p.alpha / 8.0 + p.beta / 2.0, 'T#T')), k)
    t = ev.member('T', k)
    return ev.norm(inner), ev.seminorm(t, at=[ev.norm_cert(inner)]) ** 2


# ---------------------------------------------------------------- upper bounds through T#T and TT#


@check('TH5', '||T||_{a,b}^2 <= sqrt(n) w_A(a TT# + b T#T)')
def _th5(ev):
    p = ev.params
    combo = ev.combo((p.alpha, 'TT#'), (p.beta, 'T#T'))
    return ev.seminorm('T') ** 2, _sqrt_n(ev) * ev.numrad(combo, at=[ev.seminorm_cert('T')])


@check('TH5-swapped', '||T||_{a,b}^2 <= sqrt(n) w_A(a T#T + b TT#)', advisory=True)
def _th5_swapped(ev):
    p = ev.params
    combo = ev.combo((p.alpha, 'T#T'), (p.beta, 'TT#'))
    return ev.seminorm('T') ** 2, _sqrt_n(ev) * ev.numrad(combo, at=[ev.seminorm_cert('T')])


def _grid_min(ev, term: Callable[[float], Bound]) -> Bound:
    return bmin(term(t) for t in ev.ratios)


@check('COR-TH5', 'w_A(T)^2 <= inf over (a, b) of sqrt(n)/(a + b) w_A(a T#T + b TT#)')
def _cor_th5(ev):
    y = ev.numrad_cert('T')
    rhs = _grid_min(ev, lambda t: _sqrt_n(ev) * ev.numrad(
        ev.combo((t, 'T#T'), (1.0 - t, 'TT#')), scan=True, at=[y]))
    return ev.numrad('T') ** 2, rhs


def _th5_n1_inf(ev, k) -> Bound:
    return _grid_min(ev, lambda t: ev.norm(ev.member(ev.combo((t, 'T#T'), (1.0 - t, 'TT#')), k)))


@check('COR-TH5-n1', 'w_A(T)^2 <= inf over (a, b) of ||a T#T + b TT#||_A / (a + b)', members=True)
def _cor_th5_n1(ev, k):
    return ev.numrad(ev.member('T', k)) ** 2, _th5_n1_inf(ev, k)


@check('REFINE-TH5-n1', 'inf over (a, b) of ||a T#T + b TT#||_A / (a + b) <= ||T#T + TT#||_A / 2',
       members=True)
def _refine_th5_n1(ev, k):
    return _th5_n1_inf(ev, k), 0.5 * ev.norm(ev.member(ev.combo((1.0, 'T#T'), (1.0, 'TT#')), k))


def _th6_sum(ev, t: float) -> str:
    """sum_k ((t/2 + 1 - t) T#T + t/2 TT#), the (a, b) = (t, 1 - t) operator"""
    return _sum_member(ev, ev.combo((0.5 * t + 1.0 - t, 'T#T'), (0.5 * t, 'TT#')))


@check('TH6', '||T||_{a,b}^2 <= ||sum((a/2 + b) T#T + a/2 TT#)||_A')
def _th6(ev):
    p = ev.params
    inner = _sum_member(ev, ev.combo((0.5 * p.alpha + p.beta, 'T#T'), (0.5 * p.alpha, 'TT#')))
    return ev.seminorm('T') ** 2, ev.norm(inner)


@check('COR-TH6', 'w_A(T) <= inf over (a, b) of ||sum((a/2 + b) T#T + a/2 TT#)||_A^(1/2) / sqrt(a + b)')
def _cor_th6(ev):
    return ev.numrad('T'), _grid_min(ev, lambda t: ev.norm(_th6_sum(ev, t)).sqrt())


@check('REFINE-TH6', 'inf over (a, b) of ||sum(...)||_A^(1/2) / sqrt(a + b) <= ||sum(T#T + TT#)||_A^(1/2) / sqrt(2)')
def _refine_th6(ev):
    both = _sum_member(ev, ev.combo((1.0, 'T#T'), (1.0, 'TT#')))
    return _grid_min(ev, lambda t: ev.norm(_th6_sum(ev, t)).sqrt()), (0.5 * ev.norm(both)).sqrt()


def _th6_n1_inf(ev, k) -> Bound:
    return _grid_min(ev, lambda t: ev.norm(ev.member(ev.combo((0.5 * t + 1.0 - t, 'T#T'), (0.5 * t, 'TT#')), k)))


@check('COR-TH6-n1', 'w_A(T)^2 <= inf over (a, b) of ||(a/2 + b) T#T + a/2 TT#||_A / (a + b)', members=True)
def _cor_th6_n1(ev, k):
    return ev.numrad(ev.member('T', k)) ** 2, _th6_n1_inf(ev, k)


@check('REFINE-TH6-n1', 'inf over (a, b) of ||(a/2 + b) T#T + a/2 TT#||_A / (a + b) <= ||T#T + TT#||_A / 2',
       members=True)
def _refine_th6_n1(ev, k):
    return _th6_n1_inf(ev, k), 0.5 * ev.norm(ev.member(ev.combo((1.0, 'T#T'), (1.0, 'TT#')), k))


@check('TH7', '||T||_{a,b}^2 <= sqrt(n) (w_A((a/4 + b) T#T + a/4 TT#) + a/2 w_A(T^2))')
def _th7(ev):
    p = ev.params
    y = ev.seminorm_cert('T')
    combo = ev.combo((0.25 * p.alpha + p.beta, 'T#T'), (0.25 * p.alpha, 'TT#'))
    rhs = _sqrt_n(ev) * (ev.numrad(combo, at=[y]) + 0.5 * p.alpha * ev.numrad('T2', at=[y]))
    return ev.seminorm('T') ** 2, rhs


def _ccc_term(ev, t: float, y) -> Bound:
    combo = ev.combo((0.25 * t + 1.0 - t, 'T#T'), (0.25 * t, 'TT#'))
    return _sqrt_n(ev) * (ev.numrad(combo, scan=True, at=[y]) + 0.5 * t * ev.numrad('T2', at=[y]))


@check('COR-CCC', 'w_A(T)^2 <= inf over (a, b) of sqrt(n)/(a + b) (w_A((a/4 + b) T#T + a/4 TT#) + a/2 w_A(T^2))')
def _cor_ccc(ev):
    y = ev.numrad_cert('T')
    return ev.numrad('T') ** 2, _grid_min(ev, lambda t: _ccc_term(ev, t, y))


@check('REFINE-CCC', 'inf-form of the TH7 consequence <= sqrt(n) (w_A(T#T + TT#)/4 + w_A(T^2)/2)')
def _refine_ccc(ev):
    y = ev.numrad_cert('T')
    both = ev.combo((1.0, 'T#T'), (1.0, 'TT#'))
    rhs = _sqrt_n(ev) * (0.25 * ev.numrad(both, at=[y]) + 0.5 * ev.numrad('T2', at=[y]))
    return _grid_min(ev, lambda t: _ccc_term(ev, t, y)), rhs


@check('COR-CCC-NILP', 'AT^2 = 0 implies w_A(T)^2 <= sqrt(n)/4 w_A(T#T + TT#)', requires=('AT2=0',))
def _cor_ccc_nilp(ev):
    both = ev.combo((1.0, 'T#T'), (1.0, 'TT#'))
    return ev.numrad('T') ** 2, 0.25 * _sqrt_n(ev) * ev.numrad(both, at=[ev.numrad_cert('T')])


def _cx_inf(ev, k) -> Bound:
    square = ev.numrad(ev.member('T2', k))
    return _grid_min(ev, lambda t: ev.norm(ev.member(
        ev.combo((0.25 * t + 1.0 - t, 'T#T'), (0.25 * t, 'TT#')), k)) + 0.5 * t * square)


@check('COR-CX', 'w_A(T)^2 <= inf over (a, b) of (||(a/4 + b) T#T + a/4 TT#||_A + a/2 w_A(T^2)) / (a + b)',
       members=True)
def _cor_cx(ev, k):
    return ev.numrad(ev.member('T', k)) ** 2, _cx_inf(ev, k)


@check('REFINE-CX', 'inf-form of COR-CX <= ||T#T + TT#||_A / 4 + w_A(T^2) / 2', members=True)
def _refine_cx(ev, k):
    both = ev.member(ev.combo((1.0, 'T#T'), (1.0, 'TT#')), k)
    return _cx_inf(ev, k), 0.25 * ev.norm(both) + 0.5 * ev.numrad(ev.member('T2', k))


# ---------------------------------------------------------------- products S#T


def _squares_sum(ev) -> str:
    """sum_k ((T_k# T_k)^2 + (S_k# S_k)^2)"""
    return _sum_member(ev, ev.combo((1.0, ev.square('T#T')), (1.0, ev.square('S#S'))))


def _product_norms(ev) -> Bound:
    total = Bound(0.0)
    for k in range(ev.n):
        total = total + ev.norm(ev.member('S#T', k)) ** 2
    return total


@check('TH-TTTT', '||S#T||_{a,b}^2 <= a/2 ||sum((T#T)^2 + (S#S)^2)||_A + b sum ||S_k# T_k||_A^2')
def _th_tttt(ev):
    p = ev.params
    return ev.seminorm('S#T') ** 2, 0.5 * p.alpha * ev.norm(_squares_sum(ev)) + p.beta * _product_norms(ev)


def _cw_inf(ev) -> Bound:
    squares = ev.norm(_squares_sum(ev))
    products = _product_norms(ev)
    return _grid_min(ev, lambda t: 0.5 * t * squares + (1.0 - t) * products)


@check('COR-CW', 'w_A(S#T)^2 <= inf over (a, b) of (a/2 ||sum(...)||_A + b sum ||S_k# T_k||_A^2) / (a + b)')
def _cor_cw(ev):
    return ev.numrad('S#T') ** 2, _cw_inf(ev)


@check('REFINE-CW', 'inf-form of COR-CW <= ||sum((T#T)^2 + (S#S)^2)||_A / 2')
def _refine_cw(ev):
    return _cw_inf(ev), 0.5 * ev.norm(_squares_sum(ev))


def _squares_member(ev, k) -> str:
    return ev.member(ev.combo((1.0, ev.square('T#T')), (1.0, ev.square('S#S'))), k)


@check('COR-TTTT-n1', '||S#T||_{a,b}^2 <= a/2 ||(T#T)^2 + (S#S)^2||_A + b ||S#T||_A^2', members=True)
def _cor_tttt_n1(ev, k):
    p = ev.params
    product = ev.member('S#T', k)
    rhs = 0.5 * p.alpha * ev.norm(_squares_member(ev, k)) + p.beta * ev.norm(product) ** 2
    return ev.seminorm(product) ** 2, rhs


def _cw_n1_inf(ev, k) -> Bound:
    squares = ev.norm(_squares_member(ev, k))
    product = ev.norm(ev.member('S#T', k)) ** 2
    return _grid_min(ev, lambda t: 0.5 * t * squares + (1.0 - t) * product)


@check('COR-CW-n1', 'w_A(S#T)^2 <= inf over (a, b) of (a/2 ||(T#T)^2 + (S#S)^2||_A + b ||S#T||_A^2) / (a + b)',
       members=True)
def _cor_cw_n1(ev, k):
    return ev.numrad(ev.member('S#T', k)) ** 2, _cw_n1_inf(ev, k)


@check('REFINE-CW-n1', 'inf-form of COR-CW-n1 <= ||(T#T)^2 + (S#S)^2||_A / 2', members=True)
def _refine_cw_n1(ev, k):
    return _cw_n1_inf(ev, k), 0.5 * ev.norm(_squares_member(ev, k))


# ---------------------------------------------------------------- A-adjoint identities


@check('ID-ADJ-NORM-sharp', '||T#||_A = ||T||_A', relation=Relation.EQ, members=True)
def _adj_norm(ev, k):
    return ev.norm(ev.member('T#', k)), ev.norm(ev.member('T', k))


@check('ID-ADJ-NORM-sharp-product', '||T#T||_A^(1/2) = ||T||_A', relation=Relation.EQ, members=True)
def _adj_norm_left(ev, k):
    return ev.norm(ev.member('T#T', k)).sqrt(), ev.norm(ev.member('T', k))


@check('ID-ADJ-NORM-product', '||TT#||_A^(1/2) = ||T||_A', relation=Relation.EQ, members=True)
def _adj_norm_right(ev, k):
    return ev.norm(ev.member('TT#', k)).sqrt(), ev.norm(ev.member('T', k))


@check('ID-ADJ-NUMRAD', 'w_A(T#) = w_A(T)', relation=Relation.EQ, members=True)
def _adj_numrad(ev, k):
    return ev.numrad(ev.member('T#', k)), ev.numrad(ev.member('T', k))


# ---------------------------------------------------------------- running


def _excess(relation: Relation, lhs: Bound, rhs: Bound) -> float:
    scale = 1.0 + abs(lhs.value) + abs(rhs.value)
    gap = abs(lhs.value - rhs.value) if relation == Relation.EQ else lhs.value - rhs.value
    return gap / scale


def _evaluate(spec: CheckSpec, ev: Evaluator, member: Optional[int] = None) -> Tuple[Outcome, Optional[int]]:
    if not spec.members:
        return spec.fn(ev), None
    if member is not None:
        return spec.fn(ev, member), member
    outcomes = [(spec.fn(ev, k), k) for k in range(ev.n)]
    return max(outcomes, key=lambda o: _excess(spec.relation, *o[0]))


def _tighter(first: Bound, second: Bound) -> Bound:
    """Merge two evaluations of the same side"""
    if first.direction != second.direction:
        return first if first.direction == Direction.EXACT else second
    if first.direction == Direction.LOWER_BOUND:
        return first if first.value >= second.value else second
    if first.direction == Direction.UPPER_BOUND:
        return first if first.value <= second.value else second
    return first


def _slack(cfg: SuiteConfig, lhs: Bound, rhs: Bound) -> float:
    return cfg.slack_scale * SLACK_REL * (1.0 + abs(lhs.value) + abs(rhs.value))


def _holds(relation: Relation, lhs: Bound, rhs: Bound, slack: float) -> bool:
    if relation == Relation.EQ:
        return abs(lhs.value - rhs.value) <= slack
    return lhs.value <= rhs.value + slack


def _skipped(spec: CheckSpec, instance: Instance, note: str) -> CheckResult:
    return CheckResult(spec.check_id, spec.relation, 0.0, 0.0, 0.0, Verdict.SKIPPED,
                       Direction.EXACT, Direction.EXACT, instance.digest, instance.ensemble,
                       instance.seed, None, False, spec.advisory, note)


def get_check(check_id: str) -> CheckSpec:
    spec = REGISTRY.get(check_id)
    if spec is None:
        raise UnknownCheck(f"unknown check id {check_id!r}")
    return spec


def run_check(check_id: str, instance: Instance, cfg: Optional[SuiteConfig] = None,
              evaluator: Optional[Evaluator] = None) -> CheckResult:
    """
    Evaluate one registry check on an instance.

    Unmet hypotheses and numerical preconditions give a skipped verdict; a
    failing comparison is never an exception. Pass `evaluator` to share
    memoized quantities between checks on the same instance.
    """
    spec = get_check(check_id)
    cfg = cfg or SuiteConfig()
    ev = evaluator or Evaluator(instance, cfg)

    for requirement in spec.requires:
        if not ev.holds(requirement):
            logger.debug("%s skipped on %s: requires %s", check_id, instance.digest, requirement)
            return _skipped(spec, instance, f"requires {requirement}")

    try:
        (lhs, rhs), member = _evaluate(spec, ev)
    except (NotABounded, ZeroWeight, NotHermitian, NonFinite) as exc:
        logger.info("%s skipped on %s: %s", check_id, instance.digest, exc)
        return _skipped(spec, instance, f"{type(exc).__name__}: {exc}")

    slack = _slack(cfg, lhs, rhs)
    escalated = False
    exact = lhs.direction == Direction.EXACT and rhs.direction == Direction.EXACT
    if not _holds(spec.relation, lhs, rhs, slack) and not exact:
        logger.info("%s on %s: lhs %.12g rhs %.12g, escalating the optimizer budget",
                    check_id, instance.digest, lhs.value, rhs.value)
        (lhs2, rhs2), _ = _evaluate(spec, Evaluator(instance, cfg, escalated=True), member)
        lhs, rhs = _tighter(lhs, lhs2), _tighter(rhs, rhs2)
        slack = _slack(cfg, lhs, rhs)
        escalated = True

    ok = _holds(spec.relation, lhs, rhs, slack)
    verdict = Verdict.PASS if ok else Verdict.VIOLATION_CANDIDATE
    if not ok:
        logger.warning("%s violation candidate on %s (%s seed %d): lhs %.15g rhs %.15g slack %.3e",
                       check_id, instance.digest, instance.ensemble, instance.seed,
                       lhs.value, rhs.value, slack)
    ratio = lhs.value / rhs.value if rhs.value > 0.0 else None
    return CheckResult(spec.check_id, spec.relation, lhs.value, rhs.value, slack, verdict,
                       lhs.direction, rhs.direction, instance.digest, instance.ensemble,
                       instance.seed, ratio, escalated, spec.advisory)


def select_checks(filters: Optional[Sequence[str]] = None) -> List[str]:
    """Atomic ids matching the filters: equal to a filter or prefixed by '<filter>-'"""
    if not filters:
        return list(REGISTRY)
    selected = []
    for f in filters:
        matched = [cid for cid in REGISTRY
                   if cid == f or cid.startswith(f + '-')
                   or (cid.startswith(f) and cid[len(f):] in ('a', 'b', 'c', 'd'))]
        if not matched:
            raise UnknownCheck(f"no check matches {f!r}")
        selected.extend(cid for cid in matched if cid not in selected)
    return [cid for cid in REGISTRY if cid in selected]
