#!/usr/bin/env python3
"""
A-Adjoint API
Returns the A-adjoint T# = A^+ T* A, the reduced operator A^{1/2} T (A^{1/2})^+
and the classifier flags of one operator
"""

import json
import logging
from typing import Dict, List

import numpy as np

from api.evaluate.route import as_matrix
from semihilbert_radius.config import CLASSIFY_TOL, RANK_TOL
from semihilbert_radius.errors import ToolkitError
from semihilbert_radius.matrix_core import frobenius
from semihilbert_radius.semihilbert import a_adjoint, build_space, check_op, classify, reduce_op

logger = logging.getLogger(__name__)


def matrix_pairs(M: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


class AdjointHandler:
    def __init__(self, rank_tol: float = RANK_TOL, classify_tol: float = CLASSIFY_TOL):
        self.rank_tol = rank_tol
        self.classify_tol = classify_tol

    def describe(self, space_source, op_source) -> Dict:
        space = build_space(as_matrix(space_source, 'space'), self.rank_tol)
        T = check_op(space, as_matrix(op_source, 'op'), 'T')
        sharp = a_adjoint(space, T)
        # (T#)# = P T P
        double = a_adjoint(space, sharp)
        target = space.projP @ T @ space.projP
        return {
            'a_adjoint': matrix_pairs(sharp),
            'reduced': matrix_pairs(reduce_op(space, T)),
            'flags': classify(space, T, self.classify_tol).as_dict(),
            'rank': space.rank,
            'double_adjoint_residual': frobenius(double - target),
        }


def handle_adjoint(request_data: Dict) -> Dict:
    """Main handler for A-adjoint requests"""
    try:
        handler = AdjointHandler(rank_tol=request_data.get('rank_tol', RANK_TOL))
        result = handler.describe(request_data.get('space'), request_data.get('op'))
    except ToolkitError as e:
        logger.debug("adjoint failed: %s", e)
        return {'success': False, 'error': str(e), 'status': e.exit_code}

    return {'success': True, 'data': result}


# Example usage
if __name__ == "__main__":
    result = handle_adjoint({
        'space': [[1, 0], [0, 0]],
        'op': [[1 + 2j, 3], [4, 5]],
    })
    print(json.dumps(result, indent=2))
