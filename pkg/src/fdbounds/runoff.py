"""Geometric run-off factors.

The expected life assurance provision decays as ``l_t^h = 2**(-t/h)`` and the
unrealized gains as ``l_t^d = 2**(-t/d)``; both are forced to zero at the
horizon ``T``.  Declared bonuses ramp up linearly to the fraction ``sigma``
over the first ``h`` years, and a bonus declared in year ``k`` is paid out in
year ``s+1`` with fraction ``mu_k^{s+1} = (l_s^h - l_{s+1}^h) / l_k^h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np


class RunoffError(ValueError):
    pass


@dataclass(frozen=True)
class RunoffParams:
    h: float = 10
    d: float = 8
    T: int = 50
    sigma: float = 0.2
    allow_fractional: bool = False

    def __post_init__(self) -> None:
        if not self.allow_fractional:
            for name in ("h", "d"):
                if not float(getattr(self, name)).is_integer():
                    raise RunoffError(f"{name} must be an integer number of years")
        if not 1 <= self.h < self.T:
            raise RunoffError(f"need 1 <= h < T, got h={self.h}, T={self.T}")
        if not 1 < self.d < self.T:
            raise RunoffError(f"need 1 < d < T, got d={self.d}, T={self.T}")
        if not 0.0 <= self.sigma <= 1.0:
            raise RunoffError(f"sigma must lie in [0, 1], got {self.sigma}")

    def l_array(self, basis: Literal["h", "d"] = "h") -> np.ndarray:
        """``l_t`` for ``t = 0..T`` on the chosen basis."""
        half = self._half(basis)
        # Same arithmetic as l_factor so scalar and array values agree bit for bit.
        out = np.array([2.0 ** (-t / half) for t in range(self.T + 1)])
        out[self.T] = 0.0
        return out

    def sigma_array(self) -> np.ndarray:
        """``sigma_t`` for ``t = 0..T``."""
        t = np.arange(self.T + 1, dtype=float)
        return np.minimum(t * self.sigma / self.h, self.sigma)

    def _half(self, basis: str) -> float:
        if basis == "h":
            return float(self.h)
        if basis == "d":
            return float(self.d)
        raise RunoffError(f"unknown basis {basis!r}; use 'h' or 'd'")


def _check_t(params: RunoffParams, t: int) -> None:
    if not 0 <= t <= params.T:
        raise RunoffError(f"t={t} outside 0..{params.T}")


def l_factor(params: RunoffParams, t: int, basis: Literal["h", "d"] = "h") -> float:
    _check_t(params, t)
    half = params._half(basis)
    if t == params.T:
        return 0.0
    return 2.0 ** (-t / half)


def sigma_t(params: RunoffParams, t: int) -> float:
    _check_t(params, t)
    if t <= params.h:
        return t * params.sigma / params.h
    return params.sigma


def mu(params: RunoffParams, k: int, s_plus_1: int) -> float:
    """Fraction of the year-``k`` declaration paid out in year ``s_plus_1``."""
    s = s_plus_1 - 1
    if not 1 <= k <= s < params.T:
        raise RunoffError(f"need 1 <= k <= s < T, got k={k}, s+1={s_plus_1}")
    return (l_factor(params, s) - l_factor(params, s + 1)) / l_factor(params, k)
