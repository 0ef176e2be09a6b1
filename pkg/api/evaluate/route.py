#!/usr/bin/env python3
"""
Quantity Evaluation API
Computes one norm or radius of a user-supplied operator tuple on a
semi-Hilbert space, with its certificate and the classifier flags
"""

import json
import logging
from typing import Dict, List, Optional

import numpy as np

from lib.matrix_io import load_matrix
from semihilbert_radius.config import CLASSIFY_TOL, RANK_TOL, OptConfig, SweepConfig
from semihilbert_radius.errors import InvalidParams, ToolkitError
from semihilbert_radius.radii import (
    SeminormParams, a_numrad, a_op_seminorm, alpha_beta_seminorm, euclid_radius,
    joint_crawford, joint_min_modulus, joint_op_norm, pull_back,
)
from semihilbert_radius.semihilbert import OpTuple, build_space, check_op, classify, tuple_predicates

logger = logging.getLogger(__name__)

QUANTITIES = ('op_seminorm', 'numrad', 'joint_norm', 'euclid_radius', 'crawford', 'min_modulus', 'alpha_beta')
SINGLE_OPERATOR = ('op_seminorm', 'numrad')


def as_matrix(value, name: str) -> np.ndarray:
    """A MatrixFile path or an in-memory matrix"""
    if isinstance(value, str):
        return load_matrix(value)
    if value is None:
        raise InvalidParams(f"{name} is required")
    return np.asarray(value, dtype=np.complex128)


def vector_pairs(v: Optional[np.ndarray]) -> Optional[List[List[float]]]:
    if v is None:
        return None
    return [[float(z.real), float(z.imag)] for z in v]


class QuantityEvaluator:
    def __init__(self, rank_tol: float = RANK_TOL, classify_tol: float = CLASSIFY_TOL,
                 opt: Optional[OptConfig] = None, sweep: Optional[SweepConfig] = None):
        self.rank_tol = rank_tol
        self.classify_tol = classify_tol
        self.opt = opt or OptConfig()
        self.sweep = sweep or SweepConfig()

    def load(self, space_source, op_sources):
        space = build_space(as_matrix(space_source, 'space'), self.rank_tol)
        if not op_sources:
            raise InvalidParams("at least one operator is required")
        ops = [check_op(space, as_matrix(src, f'op {k + 1}'), f'T{k + 1}') for k, src in enumerate(op_sources)]
        return space, OpTuple(tuple(ops))

    def estimate(self, space, T: OpTuple, quantity: str, params: Optional[SeminormParams]):
        tol = self.classify_tol
        if quantity in SINGLE_OPERATOR and T.n != 1:
            raise InvalidParams(f"{quantity} takes exactly one operator, got {T.n}")
        if quantity == 'op_seminorm':
            return a_op_seminorm(space, T[0], tol)
        if quantity == 'numrad':
            return a_numrad(space, T[0], self.sweep, tol)
        if quantity == 'joint_norm':
            return joint_op_norm(space, T, tol=tol)
        if quantity == 'euclid_radius':
            return euclid_radius(space, T, self.opt, self.sweep, tol)
        if quantity == 'crawford':
            return joint_crawford(space, T, self.opt, tol)
        if quantity == 'min_modulus':
            return joint_min_modulus(space, T, tol)
        return alpha_beta_seminorm(space, T, params, self.opt, self.sweep, tol=tol)

    def evaluate(self, space_source, op_sources, quantity: str,
                 alpha: Optional[float] = None, beta: Optional[float] = None) -> Dict:
        if quantity not in QUANTITIES:
            raise InvalidParams(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
        given = alpha is not None or beta is not None
        if quantity == 'alpha_beta' and (alpha is None or beta is None):
            raise InvalidParams("alpha_beta needs both alpha and beta")
        if quantity != 'alpha_beta' and given:
            raise InvalidParams("alpha and beta only apply to the alpha_beta quantity")
        params = SeminormParams(float(alpha), float(beta)) if quantity == 'alpha_beta' else None

        space, T = self.load(space_source, op_sources)
        flags = [classify(space, op, self.classify_tol).as_dict() for op in T]
        est = self.estimate(space, T, quantity, params)
        predicates = tuple_predicates(space, T, self.classify_tol)
        certificate = est.certificate
        return {
            'quantity': quantity,
            'value': est.value,
            'method': est.method.value,
            'direction': est.direction.value,
            'residual': est.residual,
            'envelope': getattr(est, 'envelope', None),
            'certificate': vector_pairs(certificate),
            'a_unit_vector': vector_pairs(None if certificate is None else pull_back(space, certificate)),
            'rank': space.rank,
            'flags': flags,
            'tuple': {'n': T.n, 'commuting': predicates.commuting, 'a_normal': predicates.a_normal},
            'params': None if params is None else {'alpha': params.alpha, 'beta': params.beta},
        }


def handle_evaluate(request_data: Dict) -> Dict:
    """Main handler for quantity evaluation"""
    quantity = request_data.get('quantity', '')
    if not quantity:
        return {'success': False, 'error': 'quantity is required', 'status': InvalidParams.exit_code}

    try:
        handler = QuantityEvaluator(
            rank_tol=request_data.get('rank_tol', RANK_TOL),
            opt=request_data.get('opt'),
            sweep=request_data.get('sweep'),
        )
        result = handler.evaluate(request_data.get('space'), request_data.get('ops', []), quantity,
                                  request_data.get('alpha'), request_data.get('beta'))
    except ToolkitError as e:
        logger.debug("evaluate failed: %s", e)
        return {'success': False, 'error': str(e), 'status': e.exit_code}

    return {'success': True, 'data': result}


# Example usage for testing
if __name__ == "__main__":
    test_request = {
        'space': [[1, 0], [0, 1]],
        'ops': [[[0, 1], [0, 0]]],
        'quantity': 'numrad',
    }
    print(json.dumps(handle_evaluate(test_request), indent=2))
