"""One-factor normal model for the one-year forward rate.

``F_t = m_t + vol * (Z_1 + ... + Z_t)`` for ``t >= 1`` with ``F_0`` read off the
initial curve.  The deterministic drift ``m_t`` is solved year by year so that
the sample mean of ``1 / B_{t+1}`` on an independent calibration sample equals
``P(0, t+1)``.  The validation sample never sees its own drift fit, so the
martingale check on it is a genuine test.

Random numbers are counter based: the normal for path ``i`` and year ``j`` is
``ndtri`` of uniform number ``i*T + j`` of a Philox stream keyed by
``(seed, stream)``.  A path's draws therefore do not depend on how many other
paths are generated or in which order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtri

from ..curves import DiscountCurve

VALIDATION_STREAM = 0
CALIBRATION_STREAM = 1


class RateModelError(ValueError):
    pass


@dataclass(frozen=True)
class RateModel:
    curve: DiscountCurve
    vol: float
    seed: int = 0
    paths: int = 10_000
    calibration_paths: int = 40_000

    def __post_init__(self) -> None:
        if self.vol < 0:
            raise RateModelError("vol must be non-negative")
        if self.paths < 1 or self.calibration_paths < 1:
            raise RateModelError("path counts must be positive")
        if not 0 <= self.seed < 2**63:
            raise RateModelError("seed must be a non-negative 63-bit integer")


def normals(seed: int, stream: int, paths: int, steps: int, first_path: int = 0) -> np.ndarray:
    """Standard normals of shape ``(paths, steps)`` for paths ``first_path...``."""
    bitgen = np.random.Philox(key=(seed << 1) | stream)
    if first_path:
        # Each Philox block yields four 64-bit words.
        start = first_path * steps
        bitgen.advance(start // 4)
        skip = start % 4
    else:
        skip = 0
    raw = bitgen.random_raw(paths * steps + skip)[skip:]
    u = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53 + 2.0**-54
    return ndtri(u).reshape(paths, steps)


@dataclass(frozen=True)
class RatePaths:
    """Forwards ``F[:, t]`` for ``t = 0..T-1`` and deflators ``Binv[:, t] = 1/B_t`` for ``t = 0..T``.

    ``Z[:, t-1]`` is the shock revealed at year ``t`` (``t = 1..T``).
    """

    F: np.ndarray
    Binv: np.ndarray
    Z: np.ndarray
    vol: float = 0.0
    drift: np.ndarray | None = field(default=None, repr=False)

    @property
    def paths(self) -> int:
        return self.F.shape[0]


def _levels(Z: np.ndarray, vol: float, T: int) -> np.ndarray:
    W = np.zeros((Z.shape[0], T))
    W[:, 1:] = np.cumsum(Z[:, : T - 1], axis=1)
    return vol * W


def calibrate_drift(model: RateModel, T: int) -> np.ndarray:
    """Drift ``m_t`` for ``t = 0..T-1`` (``m_0 = F_0``)."""
    P = model.curve.array(T)
    Z = normals(model.seed, CALIBRATION_STREAM, model.calibration_paths, T)
    shock = _levels(Z, model.vol, T)
    drift = np.empty(T)
    drift[0] = P[0] / P[1] - 1.0
    binv = np.full(Z.shape[0], 1.0 / (1.0 + drift[0]))
    for t in range(1, T):
        x = shock[:, t]
        target = P[t + 1]

        def gap(m: float) -> float:
            return float(np.mean(binv / (1.0 + m + x))) - target

        guess = P[t] / P[t + 1] - 1.0
        lo_bound = -1.0 - float(x.min()) + 1e-9
        lo, hi = max(guess - 0.05, lo_bound), guess + 0.05
        while gap(lo) < 0:
            lo = max(lo - 0.05, lo_bound)
        while gap(hi) > 0:
            hi += 0.05
        drift[t] = brentq(gap, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        binv = binv / (1.0 + drift[t] + x)
    return drift


def simulate_rates(model: RateModel, T: int) -> RatePaths:
    if model.curve.horizon < T:
        raise RateModelError(f"curve horizon {model.curve.horizon} shorter than T={T}")
    drift = calibrate_drift(model, T) if model.vol > 0 else _deterministic_drift(model.curve, T)
    Z = normals(model.seed, VALIDATION_STREAM, model.paths, T)
    F = drift[None, :] + _levels(Z, model.vol, T)
    if np.any(F <= -1.0):
        raise RateModelError("simulated forward at or below -100%; reduce vol")
    Binv = np.ones((model.paths, T + 1))
    Binv[:, 1:] = 1.0 / np.cumprod(1.0 + F, axis=1)
    return RatePaths(F=F, Binv=Binv, Z=Z, vol=model.vol, drift=drift)


def _deterministic_drift(curve: DiscountCurve, T: int) -> np.ndarray:
    P = curve.array(T)
    return P[:-1] / P[1:] - 1.0


def deterministic_rates(curve: DiscountCurve, T: int) -> RatePaths:
    """A single path whose forwards are the curve's simple forwards."""
    F = _deterministic_drift(curve, T)[None, :]
    Binv = np.ones((1, T + 1))
    Binv[:, 1:] = 1.0 / np.cumprod(1.0 + F, axis=1)
    return RatePaths(F=F, Binv=Binv, Z=np.zeros((1, T)), vol=0.0, drift=F[0].copy())
