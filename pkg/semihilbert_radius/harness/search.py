#!/usr/bin/env python3
"""
Tightness search: look for instances where a check's lhs/rhs approaches 1.

Random search over the ensembles that satisfy the check's hypotheses,
optionally followed by hill-climbing on the entries of the best tuple.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from semihilbert_radius.config import SearchConfig, SuiteConfig
from semihilbert_radius.errors import ToolkitError, UnsupportedEnsemble
from semihilbert_radius.harness.checks import CheckResult, Verdict, get_check, run_check
from semihilbert_radius.harness.ensembles import (
    ENSEMBLES, Instance, a_bounded_op, gen_instance, with_params,
)
from semihilbert_radius.harness.suite import draw_shape
from semihilbert_radius.radii import SeminormParams
from semihilbert_radius.semihilbert import OpTuple

logger = logging.getLogger(__name__)

# ensembles whose instances meet a structural requirement
HYPOTHESIS_ENSEMBLES = {
    'AT2=0': ('nilpotentA2',),
    'a_normal_commuting': ('a_normal_commuting',),
    'commuting': ('commuting', 'a_normal_commuting'),
    'TS=ST': ('commuting', 'a_normal_commuting'),
    'T_a_isometry': ('a_isometry',),
    'unitary': ('a_unitary',),
}

CLIMB_SCALE = 0.1


@dataclass
class SearchResult:
    check_id: str
    ratio: Optional[float]
    instance: Optional[Instance]
    result: Optional[CheckResult]
    evaluated: int
    usable: int

    def to_dict(self) -> dict:
        return {
            'check_id': self.check_id,
            'ratio': self.ratio,
            'evaluated': self.evaluated,
            'usable': self.usable,
            'instance': self.instance.describe() if self.instance is not None else None,
            'result': self.result.to_dict() if self.result is not None else None,
        }


def candidate_ensembles(requires: Sequence[str], chosen: Optional[Sequence[str]] = None):
    if chosen:
        for name in chosen:
            if name not in ENSEMBLES:
                raise UnsupportedEnsemble(f"unknown ensemble {name!r}; choose from {', '.join(ENSEMBLES)}")
        return tuple(chosen)
    for requirement in requires:
        if requirement in HYPOTHESIS_ENSEMBLES:
            return HYPOTHESIS_ENSEMBLES[requirement]
    return tuple(ENSEMBLES)


def _suite_config(cfg: SearchConfig) -> SuiteConfig:
    return SuiteConfig(dim_min=cfg.dim_min, dim_max=cfg.dim_max, n_min=cfg.n_min, n_max=cfg.n_max,
                       seed=cfg.seed, rank_tol=cfg.rank_tol, slack_scale=cfg.slack_scale,
                       opt=cfg.opt, sweep=cfg.sweep, screen=cfg.opt)


def _better(result: CheckResult, best: Optional[CheckResult]) -> bool:
    if result.verdict != Verdict.PASS or result.ratio is None:
        return False
    return best is None or result.ratio > best.ratio


def _perturbed(instance: Instance, rng: np.random.Generator, scale: float) -> Instance:
    """Add an A-bounded perturbation of relative size `scale` to every member of T"""
    space = instance.space
    ops = []
    for op in instance.T:
        size = np.linalg.norm(op) / np.sqrt(space.dim)
        ops.append(op + scale * max(size, 1.0) * a_bounded_op(space, rng))
    return Instance(space, OpTuple(tuple(ops)), instance.S, instance.params,
                    instance.ensemble, instance.seed, instance.unitary)


def tightness_search(check_id: str, cfg: Optional[SearchConfig] = None) -> SearchResult:
    """
    Largest passing lhs/rhs ratio found for one atomic check id.

    Only passing results count, so the reported ratio never exceeds
    1 + slack. Instances are drawn from SeedSequence([seed, i]).
    """
    cfg = cfg or SearchConfig()
    spec = get_check(check_id)
    suite_cfg = _suite_config(cfg)
    ensembles = candidate_ensembles(spec.requires, cfg.ensembles)
    params = None if cfg.alpha is None else SeminormParams(cfg.alpha, cfg.beta)

    best: Optional[CheckResult] = None
    best_instance: Optional[Instance] = None
    usable = 0
    for i in range(cfg.budget):
        seed = int(np.random.SeedSequence([cfg.seed, i]).generate_state(1)[0])
        rng = np.random.default_rng([seed, 2])
        ensemble = ensembles[int(rng.integers(len(ensembles)))]
        dim, n = draw_shape(seed, cfg.dim_min, cfg.dim_max, cfg.n_min, cfg.n_max)
        instance = gen_instance(ensemble, dim, n, seed, cfg.rank_tol)
        if params is not None:
            instance = with_params(instance, params)
        result = run_check(check_id, instance, suite_cfg)
        if result.verdict != Verdict.SKIPPED:
            usable += 1
        if _better(result, best):
            best, best_instance = result, instance
            logger.info("%s: ratio %.12g at sample %d (%s, dim %d, n %d)",
                        check_id, result.ratio, i, ensemble, dim, n)

    if best_instance is not None and cfg.climb_steps > 0:
        rng = np.random.default_rng([cfg.seed, cfg.budget])
        scale = CLIMB_SCALE
        for step in range(cfg.climb_steps):
            try:
                candidate = _perturbed(best_instance, rng, scale)
                result = run_check(check_id, candidate, suite_cfg)
            except ToolkitError as exc:
                logger.debug("climb step %d rejected: %s", step, exc)
                continue
            if _better(result, best):
                best, best_instance = result, candidate
                logger.info("%s: climb step %d raised the ratio to %.12g", check_id, step, result.ratio)
            else:
                scale *= 0.7

    if best is None:
        logger.warning("%s: no passing instance among %d samples", check_id, cfg.budget)
    return SearchResult(check_id, best.ratio if best else None, best_instance, best, cfg.budget, usable)
