#!/usr/bin/env python3
"""
Certification API
Runs the inequality registry over random ensembles and stores the
structured report and the fixed-width summary
"""

import json
import logging
from dataclasses import replace
from typing import Dict

from lib.report_store import ReportStore
from semihilbert_radius.config import OptConfig, SuiteConfig
from semihilbert_radius.errors import ToolkitError
from semihilbert_radius.harness.suite import run_suite

logger = logging.getLogger(__name__)

REPORT_NAME = 'certify_report.json'
SUMMARY_NAME = 'certify_summary.txt'

# exit status of a run that produced violation candidates
CANDIDATES_STATUS = 5

_SUITE_FIELDS = ('dim_min', 'dim_max', 'n_min', 'n_max', 'samples', 'seed', 'rank_tol', 'slack_scale')


def suite_config(request_data: Dict) -> SuiteConfig:
    overrides = {k: request_data[k] for k in _SUITE_FIELDS if request_data.get(k) is not None}
    if request_data.get('checks'):
        overrides['checks'] = tuple(request_data['checks'])
    if request_data.get('ensembles'):
        overrides['ensembles'] = tuple(request_data['ensembles'])
    opt = OptConfig()
    if request_data.get('opt_starts') is not None:
        opt = replace(opt, starts=request_data['opt_starts'])
    if request_data.get('opt_max_iter') is not None:
        opt = replace(opt, max_iter=request_data['opt_max_iter'])
    if request_data.get('seed') is not None:
        opt = replace(opt, seed=request_data['seed'])
    # an explicit budget applies to the first pass too
    if request_data.get('opt_starts') is not None or request_data.get('opt_max_iter') is not None:
        overrides['screen'] = opt
    return SuiteConfig(opt=opt, **overrides)


class CertificationRunner:
    def __init__(self, out_dir=None):
        self.store = ReportStore(out_dir)

    def certify(self, cfg: SuiteConfig) -> Dict:
        report = run_suite(cfg)
        document = report.to_document()
        summary = report.summary_table()
        report_path = self.store.write_json(REPORT_NAME, document)
        summary_path = self.store.write_text(SUMMARY_NAME, summary + '\n')
        return {
            'ok': report.ok,
            'instances': report.instances,
            'violation_candidates': report.blocking_candidates,
            'advisory_candidates': len(report.candidates) - report.blocking_candidates,
            'digest': document['digest'],
            'report_path': str(report_path),
            'summary_path': str(summary_path),
            'summary': summary,
        }


def handle_certify(request_data: Dict) -> Dict:
    """Main handler for certification runs"""
    try:
        cfg = suite_config(request_data)
        result = CertificationRunner(request_data.get('out')).certify(cfg)
    except ToolkitError as e:
        logger.debug("certify failed: %s", e)
        return {'success': False, 'error': str(e), 'status': e.exit_code}

    return {
        'success': True,
        'data': result,
        'status': 0 if result['ok'] else CANDIDATES_STATUS,
    }


# Example usage
if __name__ == "__main__":
    result = handle_certify({'samples': 2, 'checks': ['INEQ-00'], 'out': 'reports'})
    print(json.dumps(result, indent=2))
