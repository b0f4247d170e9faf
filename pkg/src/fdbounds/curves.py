"""Discount and implied-volatility curves.

A :class:`DiscountCurve` holds annual zero-coupon prices ``P(0, t)`` for
``t = 0..horizon`` with ``P(0, 0) = 1``.  A :class:`VolCurve` holds caplet
normal volatilities at integer pillars, stored as absolute decimals
(``0.0050`` is 50 bp).

Curve files are small delimiter-separated tables::

    t,P            t,vol,unit
    1,1.003        1,10,bp
    2,1.004        21,50,bp
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from os import PathLike
from typing import IO, Iterable, Sequence, Union

import numpy as np

Source = Union[str, PathLike, IO[str]]

_VOL_UNITS = {"bp": 1e-4, "abs": 1.0}


class CurveError(ValueError):
    """Raised for malformed curve data or out-of-range queries."""


@dataclass(frozen=True)
class DiscountCurve:
    prices: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.prices) < 2:
            raise CurveError("a discount curve needs at least P(0,1)")
        if self.prices[0] != 1.0:
            raise CurveError(f"P(0,0) must be exactly 1, got {self.prices[0]!r}")
        for t, p in enumerate(self.prices):
            if not (p > 0.0 and math.isfinite(p)):
                raise CurveError(f"non-positive or non-finite price P(0,{t}) = {p!r}")

    @classmethod
    def from_prices(cls, prices: Iterable[float]) -> "DiscountCurve":
        """Build a curve from ``P(0,1), P(0,2), ...``; ``P(0,0) = 1`` is prepended."""
        return cls((1.0, *(float(p) for p in prices)))

    @classmethod
    def flat(cls, horizon: int, price: float = 1.0) -> "DiscountCurve":
        return cls.from_prices([price] * horizon)

    @property
    def horizon(self) -> int:
        return len(self.prices) - 1

    def P(self, t: int) -> float:
        if not 0 <= t <= self.horizon:
            raise CurveError(f"maturity {t} outside 0..{self.horizon}")
        return self.prices[t]

    def array(self, horizon: int | None = None) -> np.ndarray:
        """Prices ``P(0, 0..horizon)`` as a float array."""
        horizon = self.horizon if horizon is None else horizon
        if horizon > self.horizon:
            raise CurveError(f"horizon {horizon} exceeds curve horizon {self.horizon}")
        return np.asarray(self.prices[: horizon + 1], dtype=float)

    def scaled_rates(self, factor: float) -> "DiscountCurve":
        """Curve whose simple one-year forwards are multiplied by ``factor``."""
        p = np.asarray(self.prices)
        fwd = p[:-1] / p[1:] - 1.0
        out = np.cumprod(1.0 / (1.0 + factor * fwd))
        return DiscountCurve.from_prices(out)


@dataclass(frozen=True)
class VolCurve:
    pillars: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        if not self.pillars:
            raise CurveError("a vol curve needs at least one pillar")
        mats = [t for t, _ in self.pillars]
        if any(b <= a for a, b in zip(mats, mats[1:])):
            raise CurveError("vol pillar maturities must be strictly increasing")
        if any(v < 0 or not math.isfinite(v) for _, v in self.pillars):
            raise CurveError("vols must be finite and non-negative")

    @property
    def extrapolation_level(self) -> float:
        return self.pillars[-1][1]

    @classmethod
    def flat(cls, vol: float) -> "VolCurve":
        return cls(((1, float(vol)),))

    def scaled(self, factor: float) -> "VolCurve":
        return VolCurve(tuple((t, v * factor) for t, v in self.pillars))

    def array(self, horizon: int) -> np.ndarray:
        """Vols for ``t = 1..horizon`` (index 0 of the result is ``t = 1``)."""
        mats = np.array([t for t, _ in self.pillars], dtype=float)
        vols = np.array([v for _, v in self.pillars], dtype=float)
        return np.interp(np.arange(1, horizon + 1, dtype=float), mats, vols)


def _rows(source: Source) -> list[list[str]]:
    if isinstance(source, (str, PathLike)):
        with open(source, newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    sample = text[:1024]
    try:
        dialect = csv.Sniffer().sniff(sample, delimiters=",;\t ")
    except csv.Error:
        dialect = csv.excel
    rows = [r for r in csv.reader(io.StringIO(text), dialect) if any(c.strip() for c in r)]
    return [[c.strip() for c in r if c.strip() != ""] for r in rows]


def _header(rows: list[list[str]], expected: Sequence[str]) -> list[list[str]]:
    if not rows or [c.lower() for c in rows[0]] != list(expected):
        raise CurveError(f"expected header {','.join(expected)}")
    return rows[1:]


def load_curve(source: Source) -> DiscountCurve:
    """Read a ``t,P`` table with rows for ``t = 1..T`` and no gaps."""
    body = _header(_rows(source), ["t", "p"])
    prices: list[float] = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 2:
            raise CurveError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            t, p = int(row[0]), float(row[1])
        except ValueError as exc:
            raise CurveError(f"line {lineno}: {exc}") from None
        expected = len(prices) + 1
        if t != expected:
            kind = "duplicate" if t < expected else "gap"
            raise CurveError(f"line {lineno}: {kind} in maturities at t={expected}")
        if not p > 0:
            raise CurveError(f"line {lineno}: non-positive price {p}")
        prices.append(p)
    if not prices:
        raise CurveError("curve file has no data rows")
    return DiscountCurve.from_prices(prices)


def load_vols(source: Source) -> VolCurve:
    """Read a ``t,vol,unit`` table; ``unit`` is ``bp`` or ``abs``."""
    body = _header(_rows(source), ["t", "vol", "unit"])
    pillars = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 3:
            raise CurveError(f"line {lineno}: expected 3 fields, got {len(row)}")
        unit = row[2].lower()
        if unit not in _VOL_UNITS:
            raise CurveError(f"line {lineno}: unknown vol unit {row[2]!r}")
        try:
            pillars.append((int(row[0]), float(row[1]) * _VOL_UNITS[unit]))
        except ValueError as exc:
            raise CurveError(f"line {lineno}: {exc}") from None
    return VolCurve(tuple(pillars))


def bundled_curve(year: int) -> DiscountCurve:
    """EIOPA risk-free curve at 31 December of ``year`` (2017, 2018 or 2019)."""
    name = f"eiopa_{year}.csv"
    ref = resources.files("fdbounds.data") / name
    if not ref.is_file():
        raise CurveError(f"no bundled curve for {year}")
    with ref.open("r") as fh:
        return load_curve(fh)


def bundled_vols(name: str = "vols_base.csv") -> VolCurve:
    with (resources.files("fdbounds.data") / name).open("r") as fh:
        return load_vols(fh)


def stated_formula_vols(horizon: int = 60) -> VolCurve:
    """Vol curve from the closed form ``10 + 50(t-1)/21`` bp up to t = 21, 50 bp after.

    Every integer year is a pillar, so :func:`vol_at` returns the closed form
    exactly.  The bundled base case instead interpolates between the pillars
    (1, 10 bp) and (21, 50 bp); see the README for why.
    """
    pts = [(t, (10 + 50 * (t - 1) / 21) * 1e-4 if t <= 21 else 50e-4) for t in range(1, horizon + 1)]
    return VolCurve(tuple(pts))


def _check_s(curve: DiscountCurve, s: int) -> None:
    if not 1 <= s <= curve.horizon:
        raise CurveError(f"s={s} outside 1..{curve.horizon}")


def forward_diff(curve: DiscountCurve, s: int) -> float:
    """Price difference ``P(0,s-1) - P(0,s)``."""
    _check_s(curve, s)
    return curve.P(s - 1) - curve.P(s)


def forward_simple(curve: DiscountCurve, s: int) -> float:
    """Simple one-year forward rate ``P(0,s-1)/P(0,s) - 1``."""
    _check_s(curve, s)
    return curve.P(s - 1) / curve.P(s) - 1.0


def forward_discount(curve: DiscountCurve, s: int, t: int) -> float:
    """Implied forward zero price ``P(0,t)/P(0,s)`` for ``s <= t``."""
    if s > t:
        raise CurveError(f"forward_discount needs s <= t, got s={s}, t={t}")
    return curve.P(t) / curve.P(s)


def vol_at(vols: VolCurve, t: int) -> float:
    if t < 1:
        raise CurveError(f"vol_at needs t >= 1, got {t}")
    mats = [p for p, _ in vols.pillars]
    return float(np.interp(float(t), mats, [v for _, v in vols.pillars]))
