#!/usr/bin/env python3
"""
Certification suite: every selected check over every selected ensemble.

The report is a pure function of the configuration. Per-instance seeds come
from SeedSequence([seed, ensemble index, sample index]), so restricting the
ensemble or check filter does not change the instances that remain.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from semihilbert_radius.config import SuiteConfig
from semihilbert_radius.errors import UnsupportedEnsemble
from semihilbert_radius.harness.checks import (
    REGISTRY, CheckResult, Evaluator, Verdict, run_check, select_checks,
)
from semihilbert_radius.harness.ensembles import ENSEMBLES, gen_instance

logger = logging.getLogger(__name__)

RATIO_QUANTILES = (0.0, 0.5, 0.9, 0.99, 1.0)


def instance_seed(base_seed: int, ensemble_index: int, sample: int) -> int:
    return int(np.random.SeedSequence([base_seed, ensemble_index, sample]).generate_state(1)[0])


def draw_shape(seed: int, dim_min: int, dim_max: int, n_min: int, n_max: int):
    """(dim, n) of the instance with this seed"""
    rng = np.random.default_rng([seed, 1])
    return int(rng.integers(dim_min, dim_max + 1)), int(rng.integers(n_min, n_max + 1))


@dataclass
class CheckSummary:
    check_id: str
    statement: str
    advisory: bool
    samples: int = 0
    passes: int = 0
    candidates: int = 0
    skipped: int = 0
    escalations: int = 0
    max_slack_consumed: Optional[float] = None
    ratios: List[float] = field(default_factory=list)

    def add(self, result: CheckResult):
        if result.verdict == Verdict.SKIPPED:
            self.skipped += 1
            return
        self.samples += 1
        if result.verdict == Verdict.PASS:
            self.passes += 1
        else:
            self.candidates += 1
        self.escalations += int(result.escalated)
        consumed = result.slack_consumed
        if self.max_slack_consumed is None or consumed > self.max_slack_consumed:
            self.max_slack_consumed = consumed
        if result.ratio is not None:
            self.ratios.append(result.ratio)

    @property
    def max_ratio(self) -> Optional[float]:
        return max(self.ratios) if self.ratios else None

    def to_dict(self) -> dict:
        quantiles = None
        if self.ratios:
            values = np.quantile(np.array(self.ratios), RATIO_QUANTILES)
            quantiles = {f'q{int(q * 100)}': float(v) for q, v in zip(RATIO_QUANTILES, values)}
        return {
            'check_id': self.check_id,
            'statement': self.statement,
            'advisory': self.advisory,
            'samples': self.samples,
            'passes': self.passes,
            'violation_candidates': self.candidates,
            'skipped': self.skipped,
            'escalations': self.escalations,
            'max_slack_consumed': self.max_slack_consumed,
            'ratio_quantiles': quantiles,
        }


@dataclass
class Report:
    config: dict
    summaries: Dict[str, CheckSummary]
    candidates: List[CheckResult] = field(default_factory=list)
    instances: int = 0

    def add(self, result: CheckResult):
        self.summaries[result.check_id].add(result)
        if result.verdict == Verdict.VIOLATION_CANDIDATE:
            self.candidates.append(result)

    @property
    def blocking_candidates(self) -> int:
        """Violation candidates of non-advisory checks; these decide the exit status"""
        return sum(1 for r in self.candidates if not r.advisory)

    @property
    def ok(self) -> bool:
        return self.blocking_candidates == 0

    def to_document(self) -> dict:
        body = {
            'config': self.config,
            'instances': self.instances,
            'checks': [s.to_dict() for s in self.summaries.values()],
            'violation_candidates': [r.to_dict() for r in self.candidates],
            'blocking_candidates': self.blocking_candidates,
        }
        body['digest'] = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
        return body

    def summary_table(self) -> str:
        width = max([len('check_id')] + [len(cid) for cid in self.summaries])
        header = f"{'check_id':<{width}}  {'samples':>7}  {'passes':>7}  {'cands':>5}  {'skipped':>7}  {'max_ratio':>10}"
        lines = [header, '-' * len(header)]
        for s in self.summaries.values():
            ratio = f'{s.max_ratio:10.6f}' if s.max_ratio is not None else f"{'-':>10}"
            flag = '  (advisory)' if s.advisory else ''
            lines.append(f"{s.check_id:<{width}}  {s.samples:>7d}  {s.passes:>7d}  {s.candidates:>5d}  "
                         f"{s.skipped:>7d}  {ratio}{flag}")
        lines.append('-' * len(header))
        lines.append(f"{self.instances} instances, {self.blocking_candidates} violation candidates")
        return '\n'.join(lines)


def _config_document(cfg: SuiteConfig, ensembles, check_ids) -> dict:
    doc = asdict(cfg)
    doc['ensembles'] = list(ensembles)
    doc['checks'] = list(check_ids)
    doc['inf_grid'] = list(cfg.inf_grid)
    doc['screen'] = asdict(cfg.screening_opt())
    return doc


def run_suite(cfg: Optional[SuiteConfig] = None) -> Report:
    cfg = cfg or SuiteConfig()
    names = list(ENSEMBLES)
    ensembles = list(cfg.ensembles) if cfg.ensembles else names
    for ensemble in ensembles:
        if ensemble not in ENSEMBLES:
            raise UnsupportedEnsemble(f"unknown ensemble {ensemble!r}; choose from {', '.join(names)}")
    check_ids = select_checks(cfg.checks)

    report = Report(
        config=_config_document(cfg, ensembles, check_ids),
        summaries={cid: CheckSummary(cid, REGISTRY[cid].statement, REGISTRY[cid].advisory) for cid in check_ids},
    )
    for ensemble in ensembles:
        index = names.index(ensemble)
        logger.info("ensemble %s: %d samples, %d checks", ensemble, cfg.samples, len(check_ids))
        for sample in range(cfg.samples):
            seed = instance_seed(cfg.seed, index, sample)
            dim, n = draw_shape(seed, cfg.dim_min, cfg.dim_max, cfg.n_min, cfg.n_max)
            instance = gen_instance(ensemble, dim, n, seed, cfg.rank_tol)
            evaluator = Evaluator(instance, cfg)
            for cid in check_ids:
                report.add(run_check(cid, instance, cfg, evaluator))
            report.instances += 1
        logger.info("ensemble %s done, %d violation candidates so far", ensemble, len(report.candidates))
    return report
