"""Upper bounds on the number of inverses from the modified graph of a density.

The modified graph fills every jump of the density, including the jumps to
zero at the support edges, with a vertical segment. A horizontal line at
height ``y`` meets it in ``C(y)`` components, and the number of solutions of
``G(z) = zeta`` is at most ``ceil(sup_y C(y) / 2)``. Since ``C`` only changes
at the one-sided limit values of the pieces, the supremum is attained at a
band midpoint between consecutive such values.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .measure import Measure

INCREASING, DECREASING, CONSTANT = "increasing", "decreasing", "constant"
DIRECTIONS = (INCREASING, DECREASING, CONSTANT)


@dataclass(frozen=True)
class Piece:
    """A monotone run of the density on ``interval``, or a jump when zero width."""

    interval: tuple
    direction: str
    left_limit: float
    right_limit: float

    def __post_init__(self):
        object.__setattr__(self, "interval", (float(self.interval[0]), float(self.interval[1])))
        lo, hi = self.interval
        if not lo <= hi:
            raise ValidationError(f"piece interval [{lo}, {hi}] is reversed", ["interval"])
        if self.direction not in DIRECTIONS:
            raise ValidationError(f"unknown direction {self.direction!r}", ["direction"])
        L, R = self.left_limit, self.right_limit
        if min(L, R) < 0 or math.isnan(L) or math.isnan(R):
            raise ValidationError("density limits must be nonnegative", ["limits"])
        if lo < hi:
            ok = {INCREASING: L <= R, DECREASING: L >= R, CONSTANT: L == R}[self.direction]
            if not ok:
                raise ValidationError(f"limits {L}, {R} contradict {self.direction} piece",
                                      ["direction"])

    @property
    def is_jump(self) -> bool:
        return self.interval[0] == self.interval[1]


@dataclass(frozen=True)
class PiecewiseMonotoneDensity:
    pieces: tuple

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda p: p.interval))
        for p, q in zip(pieces, pieces[1:]):
            if q.interval[0] < p.interval[1]:
                raise ValidationError("density pieces overlap", ["overlap"])
        object.__setattr__(self, "pieces", pieces)

    def value_chain(self) -> list:
        """Density values met walking left to right along the modified graph.

        The chain starts and ends at 0 and passes through 0 in every gap, so
        consecutive entries are joined either by a monotone piece or by a
        vertical jump segment.
        """
        chain = [0.0]
        last_end = None
        for p in self.pieces:
            if last_end is not None and p.interval[0] > last_end:
                chain.append(0.0)
            chain.extend((p.left_limit, p.right_limit))
            last_end = p.interval[1]
        chain.append(0.0)
        return chain

    def critical_values(self) -> list:
        return sorted({v for v in self.value_chain() if math.isfinite(v)})

    def to_dict(self) -> dict:
        return {"pieces": [{"interval": list(p.interval), "direction": p.direction,
                            "left_limit": p.left_limit, "right_limit": p.right_limit}
                           for p in self.pieces]}

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseMonotoneDensity":
        try:
            pieces = [Piece(tuple(d["interval"]), d["direction"], float(d["left_limit"]),
                            float(d["right_limit"])) for d in data["pieces"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed density description: {exc}", ["schema"]) from exc
        return cls(tuple(pieces))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class BoundReport:
    N: float
    critical_values: list = field(default_factory=list)
    witness_y: float = math.nan
    max_count: int = 0


def _crossings(chain, y):
    return sum(1 for u, v in zip(chain, chain[1:]) if min(u, v) < y < max(u, v))


def level_component_count(density: PiecewiseMonotoneDensity, y: float) -> int:
    """Number of components of the level set ``{x : (x, y) in modified graph}``."""
    if not y > 0:
        raise DomainError("level must be positive")
    if y in set(density.value_chain()):
        raise DomainError(f"y = {y} is a critical value; perturb it")
    return _crossings(density.value_chain(), y)


def _probe_levels(critical):
    pos = [c for c in critical if c > 0]
    levels = []
    prev = 0.0
    for c in pos:
        levels.append(0.5 * (prev + c))
        prev = c
    levels.append(2 * prev + 1.0)
    return levels


def inverse_count_bound(density: PiecewiseMonotoneDensity) -> BoundReport:
    chain = density.value_chain()
    critical = density.critical_values()
    best, witness = 0, math.nan
    for y in _probe_levels(critical):
        count = _crossings(chain, y)
        if count > best:
            best, witness = count, y
    return BoundReport(int(math.ceil(best / 2)), critical, witness, best)


def bound_from_samples(xs, ys) -> BoundReport:
    """Heuristic bound from pointwise samples of a density.

    Successive differences split the samples into monotone runs; flat runs
    become constant pieces. The result is an estimate that is exact only when
    the grid resolves every monotone piece.
    """
    return inverse_count_bound(density_from_samples(xs, ys))


def density_from_samples(xs, ys, left_limit=None, right_limit=None) -> PiecewiseMonotoneDensity:
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if len(xs) < 2 or len(xs) != len(ys):
        raise DomainError("need at least two samples of matching length")
    if np.any(np.diff(xs) <= 0):
        raise DomainError("sample abscissae must be strictly increasing")
    if np.any(ys < 0):
        raise DomainError("density samples must be nonnegative")
    vals = ys.copy()
    if left_limit is not None:
        vals[0] = left_limit
    if right_limit is not None:
        vals[-1] = right_limit
    return PiecewiseMonotoneDensity(tuple(_monotone_runs(xs, vals)))


def _monotone_runs(xs, ys):
    sign = np.sign(np.diff(np.where(np.isfinite(ys), ys, np.finfo(float).max)))
    pieces = []
    start = 0
    for i in range(1, len(sign) + 1):
        if i == len(sign) or sign[i] != sign[start]:
            d = {1: INCREASING, -1: DECREASING, 0: CONSTANT}[int(sign[start])]
            pieces.append(Piece((xs[start], xs[i]), d, ys[start], ys[i]))
            start = i
    return pieces


def density_profile(measure: Measure, n: int = 4001) -> PiecewiseMonotoneDensity:
    """Monotone decomposition of a measure's density sampled on each component.

    Each component is sampled on ``n`` Chebyshev points; infinite one-sided
    limits are inserted where an exponent is negative. Atoms become zero-width
    pieces with both limits infinite.
    """
    pieces = []
    for comp in measure.components:
        t = -np.cos(np.pi * np.arange(n) / (n - 1))
        x = comp.to_global(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = comp.density(x)
        y[0] = _edge_limit(comp, -1.0)
        y[-1] = _edge_limit(comp, 1.0)
        y = np.maximum(y, 0.0)
        pieces.extend(_monotone_runs(x, y))
    for at in measure.atoms:
        pieces.append(Piece((at.location, at.location), CONSTANT, math.inf, math.inf))
    return PiecewiseMonotoneDensity(tuple(pieces))


def _edge_limit(comp, t):
    exponent = comp.alpha if t > 0 else comp.beta
    if exponent > 0:
        return 0.0
    rt = float(comp.series(np.array(t)))
    if exponent < 0:
        return math.inf if rt > 0 else 0.0
    other = comp.beta if t > 0 else comp.alpha
    return max(0.0, 2.0**other * rt / comp.Z)


def measure_bound(measure: Measure, n: int = 4001) -> BoundReport:
    return inverse_count_bound(density_profile(measure, n))
