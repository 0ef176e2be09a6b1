#!/usr/bin/env python3
"""
Extremum estimates returned by the spectral and optimization routines
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt


class Method(str, Enum):
    EIGEN_EXACT = 'eigen_exact'
    THETA_SWEEP = 'theta_sweep'
    SPHERE_OPT = 'sphere_opt'
    SAMPLING = 'sampling'


class Direction(str, Enum):
    """Which side of the true extremum a reported value is known to lie on"""

    EXACT = 'exact'
    LOWER_BOUND = 'lower_bound'
    UPPER_BOUND = 'upper_bound'


_EXACT_METHODS = (Method.EIGEN_EXACT, Method.THETA_SWEEP)


@dataclass(frozen=True, eq=False)
class SupEstimate:
    """
    Value of a supremum with the unit vector attaining it.

    lower_bound is True when the value never exceeds the true supremum
    (it was read off at the certificate). envelope, when set, is a proven
    upper bound.
    """

    value: float
    certificate: Optional[npt.NDArray[np.complex128]]
    method: Method
    lower_bound: bool = True
    residual: float = 0.0
    envelope: Optional[float] = None

    @property
    def direction(self) -> Direction:
        if self.method in _EXACT_METHODS:
            return Direction.EXACT
        return Direction.LOWER_BOUND

    def scaled(self, factor: float) -> 'SupEstimate':
        """Same certificate, value multiplied by a nonnegative factor"""
        envelope = None if self.envelope is None else self.envelope * factor
        return SupEstimate(self.value * factor, self.certificate, self.method,
                           self.lower_bound, self.residual * factor, envelope)


@dataclass(frozen=True, eq=False)
class InfEstimate:
    value: float
    certificate: Optional[npt.NDArray[np.complex128]]
    method: Method
    upper_bound: bool = True
    residual: float = 0.0

    @property
    def direction(self) -> Direction:
        if self.method in _EXACT_METHODS:
            return Direction.EXACT
        return Direction.UPPER_BOUND
