#!/usr/bin/env python3
"""
Tightness Search API
Searches random instances for the largest passing lhs/rhs ratio of one
check and stores the best instance as MatrixFile documents
"""

import json
import logging
from dataclasses import replace
from typing import Dict

from lib.report_store import ReportStore
from semihilbert_radius.config import OptConfig, SearchConfig
from semihilbert_radius.errors import InvalidParams, ToolkitError
from semihilbert_radius.harness.search import tightness_search

logger = logging.getLogger(__name__)

_SEARCH_FIELDS = ('budget', 'climb_steps', 'seed', 'dim_min', 'dim_max', 'n_min', 'n_max',
                  'alpha', 'beta', 'rank_tol', 'slack_scale')


def search_config(request_data: Dict) -> SearchConfig:
    overrides = {k: request_data[k] for k in _SEARCH_FIELDS if request_data.get(k) is not None}
    if request_data.get('ensembles'):
        overrides['ensembles'] = tuple(request_data['ensembles'])
    opt = OptConfig()
    if request_data.get('opt_starts') is not None:
        opt = replace(opt, starts=request_data['opt_starts'])
    return SearchConfig(opt=opt, **overrides)


class TightnessSearcher:
    def __init__(self, out_dir=None):
        self.store = ReportStore(out_dir)

    def search(self, check_id: str, cfg: SearchConfig) -> Dict:
        found = tightness_search(check_id, cfg)
        result = found.to_dict()
        result['path'] = None
        if found.instance is not None:
            path = self.store.write_instance(f'search_{check_id}', found.instance,
                                             {'check_id': check_id, 'ratio': found.ratio})
            result['path'] = str(path)
        return result


def handle_search(request_data: Dict) -> Dict:
    """Main handler for tightness searches"""
    check_id = request_data.get('check', '')
    if not check_id:
        return {'success': False, 'error': 'check is required', 'status': InvalidParams.exit_code}

    try:
        cfg = search_config(request_data)
        result = TightnessSearcher(request_data.get('out')).search(check_id, cfg)
    except ToolkitError as e:
        logger.debug("search failed: %s", e)
        return {'success': False, 'error': str(e), 'status': e.exit_code}

    return {'success': True, 'data': result}


# Example usage
if __name__ == "__main__":
    result = handle_search({'check': 'INEQ-00-upper', 'budget': 8, 'out': 'reports'})
    print(json.dumps(result, indent=2))
