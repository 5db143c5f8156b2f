"""All solutions of ``G(z) = zeta`` via root finding under conformal charts.

Two chart families cover the plane minus the support:

* exterior: ``z = M(J(r w))`` over the support hull ``[a, b]``, which maps the
  unit disc onto the outside of an ellipse around the hull. ``w = 0`` maps to
  infinity, where ``G`` has a removable zero, so ``G(z(w)) - zeta`` is
  holomorphic in the disc.
* gap: ``z = M(r w)`` over a gap ``(c, d)`` of the support, a disc spanning
  the gap.

Contour samples of ``G`` depend only on the measure and the chart, so they are
cached and reused for every ``zeta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import contour
from .bounds import BoundReport, PiecewiseMonotoneDensity, inverse_count_bound, measure_bound
from .errors import DomainError, ValidationError
from .measure import CHEBYSHEV_U, ACComponent, Measure, check, support_gaps, support_hull
from .parallel import parallel_map
from .transforms import (affine, joukowski, joukowski_inv_disc, stieltjes,
                         stieltjes_derivative, winding_number, CurveSamples)

EXTERIOR, GAP = "exterior", "gap"
DEFAULT_R = 0.99
DEFAULT_K = 1024
DEFAULT_K_SINGULAR = 4096
RESIDUAL_TOL = 1e-8
DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class ChartSpec:
    kind: str
    r: float = DEFAULT_R
    K: int = DEFAULT_K
    M: int = 8
    interval: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in (EXTERIOR, GAP):
            raise ValidationError(f"unknown chart kind {self.kind!r}", ["kind"])
        if not 0 < self.r < 1:
            raise ValidationError(f"chart radius must lie in (0, 1), got {self.r}", ["r"])
        if self.K < 2 * self.M:
            raise ValidationError(f"K = {self.K} must be at least 2M = {2 * self.M}", ["K"])
        if self.interval is not None:
            object.__setattr__(self, "interval", (float(self.interval[0]),
                                                  float(self.interval[1])))

    @property
    def label(self) -> str:
        if self.kind == EXTERIOR:
            return EXTERIOR
        return f"gap({self.interval[0]:g}, {self.interval[1]:g})"

    def to_plane(self, w):
        """Chart point for disc coordinate ``w`` (unit disc = chart region)."""
        w = np.asarray(w, dtype=complex)
        if self.kind == EXTERIOR:
            return affine(self.interval, joukowski(self.r * w))
        return affine(self.interval, self.r * w)

    def dz_dw(self, w):
        w = np.asarray(w, dtype=complex)
        half = 0.5 * (self.interval[1] - self.interval[0])
        if self.kind == EXTERIOR:
            u = self.r * w
            return half * self.r * 0.5 * (1 - 1 / u**2)
        return half * self.r * np.ones_like(w)

    def from_plane(self, z):
        """Disc coordinate of ``z`` (exterior charts use the inverse Joukowski branch)."""
        a, b = self.interval
        t = (2 * np.asarray(z, dtype=complex) - (a + b)) / (b - a)
        if self.kind == EXTERIOR:
            return joukowski_inv_disc(t, strict=False) / self.r
        return t / self.r


@dataclass
class InverseRoot:
    z: complex
    multiplicity: int
    residual: float
    chart: str
    w: complex = complex("nan")
    flagged: bool = False

    def to_dict(self) -> dict:
        return {"re": self.z.real, "im": self.z.imag, "multiplicity": self.multiplicity,
                "residual": self.residual, "chart": self.chart}


@dataclass
class RootReport:
    zeta: complex
    roots: list = field(default_factory=list)
    bound: Optional[int] = None
    winding_check: Optional[int] = None
    rejected: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    @property
    def points(self) -> np.ndarray:
        return np.array([r.z for r in self.roots], dtype=complex)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.roots), default=0.0)

    def to_dict(self) -> dict:
        out = {"zeta": {"re": self.zeta.real, "im": self.zeta.imag},
               "count": self.count, "roots": [r.to_dict() for r in self.roots],
               "rejected": [r.to_dict() for r in self.rejected]}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.winding_check is not None:
            out["winding"] = self.winding_check
        return out


# -- chart sampling --------------------------------------------------------

@lru_cache(maxsize=128)
def chart_samples(measure: Measure, chart: ChartSpec) -> np.ndarray:
    """``G`` at the K contour nodes of ``chart`` (cached per measure and chart)."""
    vals = stieltjes(measure, chart.to_plane(contour.unit_nodes(chart.K)))
    vals.flags.writeable = False
    return vals


def _chart_functions(measure, chart, zeta, deflate=False):
    def f(w):
        g = stieltjes(measure, chart.to_plane(w)) - zeta
        return g / w if deflate else g

    def fprime(w):
        z = chart.to_plane(w)
        d = stieltjes_derivative(measure, z) * chart.dz_dw(w)
        if deflate:
            return d / w - (stieltjes(measure, z) - zeta) / w**2
        return d

    return f, fprime


def _solve_chart(measure, zeta, chart, residual_tol, rank_tol, check_count, deflate=False,
                 refine=True):
    f, fprime = _chart_functions(measure, chart, zeta, deflate)
    fvals = chart_samples(measure, chart) - zeta
    if deflate:
        fvals = fvals / contour.unit_nodes(chart.K)
    info = {}
    clusters = contour.find_roots_from_samples(f, fvals, chart.M, fprime, rank_tol=rank_tol,
                                               check_count=check_count, do_refine=refine,
                                               info=info)
    accepted, rejected = [], []
    for c in clusters:
        z = complex(chart.to_plane(c.center))
        res = abs(stieltjes(measure, z) - zeta)
        root = InverseRoot(z, c.multiplicity, res, chart.label, c.center, c.flagged)
        (accepted if res < residual_tol and not c.flagged else rejected).append(root)
    return accepted, rejected, info


def _default_K(measure: Measure) -> int:
    return DEFAULT_K_SINGULAR if measure.has_unbounded_density else DEFAULT_K


@lru_cache(maxsize=64)
def _cached_bound(measure: Measure) -> BoundReport:
    return measure_bound(measure)


def inverses_exterior(measure: Measure, zeta: complex, chart: Optional[ChartSpec] = None,
                      residual_tol: float = RESIDUAL_TOL, rank_tol: float = contour.RANK_TOL,
                      check_count: bool = True):
    """Inverses outside the ellipse ``M(J(r * circle))`` around the support hull."""
    zeta = complex(zeta)
    if zeta == 0:
        raise DomainError("zeta = 0 has no finite preimage in the exterior chart")
    chart = chart or ChartSpec(EXTERIOR, K=_default_K(measure))
    if chart.kind != EXTERIOR:
        raise ValidationError("expected an exterior chart", ["kind"])
    if chart.interval is None:
        chart = _with_interval(chart, _hull(measure))
    return _solve_chart(measure, zeta, chart, residual_tol, rank_tol, check_count)[0]


def inverses_gap(measure: Measure, zeta: complex, chart: ChartSpec,
                 residual_tol: float = RESIDUAL_TOL, rank_tol: float = contour.RANK_TOL,
                 check_count: bool = True):
    """Inverses inside the disc spanning a support gap."""
    if chart.kind != GAP or chart.interval is None:
        raise ValidationError("expected a gap chart with an interval", ["kind"])
    c, d = chart.interval
    if not any(g0 <= c and d <= g1 for g0, g1 in support_gaps(measure)):
        raise DomainError(f"chart interval ({c}, {d}) is not inside a support gap")
    return _solve_chart(measure, complex(zeta), chart, residual_tol, rank_tol, check_count)[0]


def _hull(measure):
    a, b = support_hull(measure)
    if a == b:
        a, b = a - 1.0, b + 1.0
    return a, b


def _with_interval(chart, interval):
    return ChartSpec(chart.kind, chart.r, chart.K, chart.M, interval)


def charts_for(measure: Measure, r: float = DEFAULT_R, K: Optional[int] = None,
               M: Optional[int] = None, gap_r: Optional[float] = None) -> list:
    """Exterior chart plus one gap chart per support gap."""
    K = K or _default_K(measure)
    if M is None:
        M = max(_cached_bound(measure).N + 2, 6)
    M = min(M, K // 2)
    charts = [ChartSpec(EXTERIOR, r, K, M, _hull(measure))]
    for gap in support_gaps(measure):
        charts.append(ChartSpec(GAP, gap_r or r, K, M, gap))
    return charts


def all_inverses(measure: Measure, zeta: complex, r: float = DEFAULT_R,
                 K: Optional[int] = None, M: Optional[int] = None,
                 bound=None, winding: bool = False, residual_tol: float = RESIDUAL_TOL,
                 dedup_tol: float = DEDUP_TOL, rank_tol: float = contour.RANK_TOL,
                 check_count: bool = True, gap_r: Optional[float] = None,
                 refine: bool = True, validate: bool = True) -> RootReport:
    """Every solution of ``G(z) = zeta`` outside the chart exclusion regions.

    ``bound`` may be a :class:`PiecewiseMonotoneDensity`, a :class:`BoundReport`,
    an integer, or ``True`` to derive one from the measure's own density.
    With ``winding=True`` the exterior root count is compared with the
    winding number of ``gamma_r`` around ``zeta``.
    """
    zeta = complex(zeta)
    if validate:
        check(measure)
    if len(measure.atoms) == 1 and not measure.components:
        roots = inverses_pure_point(measure, zeta, residual_tol)
        return RootReport(zeta, roots, _resolve_bound(measure, bound))
    charts = charts_for(measure, r, K, M, gap_r)
    deflate = zeta == 0

    def run(chart):
        return _solve_chart(measure, zeta, chart, residual_tol, rank_tol, check_count,
                            deflate=deflate and chart.kind == EXTERIOR, refine=refine)

    results = parallel_map(run, charts)
    report = RootReport(zeta, bound=_resolve_bound(measure, bound))
    for chart, (acc, rej, info) in zip(charts, results):
        report.rejected.extend(rej)
        report.diagnostics[chart.label] = {"rank": info.get("rank"),
                                           "argument_count": info.get("winding"),
                                           "warnings": info.get("warnings", [])}
        for root in acc:
            _merge(report.roots, root, dedup_tol)
    if winding:
        ext = charts[0]
        curve = CurveSamples(ext.r, 2 * np.pi * np.arange(ext.K) / ext.K,
                             np.asarray(chart_samples(measure, ext)))
        report.winding_check = winding_number(curve, zeta)
        found = sum(rt.multiplicity for rt in report.roots if rt.chart == EXTERIOR)
        if not deflate and found != report.winding_check:
            raise contour.InconsistencyError(
                f"{found} exterior roots but gamma_r winds {report.winding_check} times; "
                "increase K")
    report.roots.sort(key=lambda rt: (rt.z.real, rt.z.imag))
    return report


def _merge(roots, new, tol):
    for i, old in enumerate(roots):
        if abs(old.z - new.z) < tol:
            if new.residual < old.residual:
                roots[i] = new
            return
    roots.append(new)


def _resolve_bound(measure, bound):
    if bound is None or bound is False:
        return None
    if bound is True:
        return _cached_bound(measure).N
    if isinstance(bound, PiecewiseMonotoneDensity):
        return inverse_count_bound(bound).N
    if isinstance(bound, BoundReport):
        return bound.N
    return int(bound)


# -- fast paths ------------------------------------------------------------

def inverses_pure_point(measure: Measure, zeta: complex,
                        residual_tol: float = RESIDUAL_TOL) -> list:
    """Roots of ``zeta prod (z - x_j) - sum_i a_i prod_{j != i} (z - x_j)``."""
    if measure.components or not measure.atoms:
        raise ValidationError("pure-point path needs a measure made of atoms only", ["atoms"])
    zeta = complex(zeta)
    x, a = measure.atom_locations, measure.atom_weights
    if zeta == 0 and len(x) == 1:
        raise DomainError("a single atom has no inverse at zeta = 0")
    poly = zeta * np.poly(x).astype(complex)
    for i in range(len(x)):
        poly[1:] -= a[i] * np.poly(np.delete(x, i))
    roots = np.roots(poly) if np.any(poly) else np.empty(0)
    out = []
    for z in roots:
        z = _newton_plane(measure, complex(z), zeta)
        res = abs(stieltjes(measure, z) - zeta)
        if res < residual_tol:
            out.append(InverseRoot(z, 1, res, "pure_point"))
    return sorted(out, key=lambda rt: (rt.z.real, rt.z.imag))


def inverses_sqrt_single(component, zeta: complex,
                         residual_tol: float = RESIDUAL_TOL) -> list:
    """Roots of ``sum_n phi_n pi w^(n+1) / Z = zeta`` in the unit disc, mapped back."""
    if isinstance(component, Measure):
        if component.atoms or len(component.components) != 1:
            raise ValidationError("square-root path needs a single component", ["components"])
        component = component.components[0]
    if component.basis != CHEBYSHEV_U:
        raise ValidationError("square-root path needs a Chebyshev-U component", ["basis"])
    phi = component.phi
    if not np.any(phi):
        raise DomainError("all coefficients are zero")
    zeta = complex(zeta)
    # highest power first: pi/Z * phi_m w^(m+1) + ... + pi/Z * phi_0 w - zeta
    poly = np.concatenate([math.pi * phi[::-1] / component.Z, [-zeta]]).astype(complex)
    while abs(poly[0]) == 0:
        poly = poly[1:]
    ws = np.roots(poly)
    measure = Measure((), (component,))
    out = []
    for w in ws:
        if abs(w) >= 1 or w == 0:
            continue
        z = complex(affine(component.interval, joukowski(w)))
        res = abs(stieltjes(measure, z) - zeta)
        if res < residual_tol:
            out.append(InverseRoot(z, 1, res, "sqrt_single", complex(w)))
    return sorted(out, key=lambda rt: (rt.z.real, rt.z.imag))


def _newton_plane(measure, z, zeta, steps=3):
    for _ in range(steps):
        g = stieltjes(measure, z) - zeta
        d = stieltjes_derivative(measure, z)
        if d == 0 or not np.isfinite(d):
            break
        z_new = z - g / d
        if not np.isfinite(z_new):
            break
        if abs(stieltjes(measure, z_new) - zeta) >= abs(g):
            break
        z = z_new
    return z
