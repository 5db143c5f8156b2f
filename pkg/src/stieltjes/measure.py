"""Compactly supported probability measures.

A measure is a finite list of atoms plus absolutely continuous components.
Each component lives on an interval ``[a, b]`` and, in the local variable
``t = (2x - a - b) / (b - a)``, has density

    rho(x) = (1/Z) * (1 - t)**alpha * (1 + t)**beta * sum_n phi_n p_n(t)

where ``p_n`` are orthogonal polynomials given by a three-term recurrence
with ``p_0 = 1``::

    t p_0 = a_0 p_0 + b_0 p_1
    t p_n = c_{n-1} p_{n-1} + a_n p_n + b_n p_{n+1}

The ``chebyshevU`` basis is the special case ``alpha = beta = 1/2`` with the
Chebyshev polynomials of the second kind (``a_n = 0, b_n = c_n = 1/2``).
All objects are frozen; derived arrays are cached on first use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import betaln

from .errors import DomainError, ValidationError
from .quadrature import gauss_jacobi, jacobi_recurrence

CHEBYSHEV_U = "chebyshevU"
GENERAL_OP = "generalOP"
BASES = (CHEBYSHEV_U, GENERAL_OP)

MASS_TOL = 1e-10
COEFF_TRUNCATION = 1e-16


@dataclass(frozen=True)
class Atom:
    location: float
    weight: float


@dataclass(frozen=True)
class ACComponent:
    """One interval of absolutely continuous support."""

    interval: tuple
    alpha: float
    beta: float
    basis: str
    coeffs: tuple
    Z: float = 1.0
    recurrence: Optional[tuple] = None
    moment0: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        object.__setattr__(self, "coeffs", tuple(float(v) for v in self.coeffs))
        if self.recurrence is not None:
            rec = tuple(tuple(float(v) for v in row) for row in self.recurrence)
            object.__setattr__(self, "recurrence", rec)

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    @property
    def half_width(self) -> float:
        return 0.5 * (self.b - self.a)

    @classmethod
    def chebyshev_u(cls, interval, coeffs, Z=1.0) -> "ACComponent":
        return cls(interval, 0.5, 0.5, CHEBYSHEV_U, tuple(coeffs), Z)

    @classmethod
    def jacobi(cls, interval, alpha, beta, coeffs, Z=1.0) -> "ACComponent":
        """General-OP component in the orthonormal Jacobi basis for its own weight."""
        rec = jacobi_recurrence(alpha, beta, max(len(coeffs), 1))
        return cls(interval, alpha, beta, GENERAL_OP, tuple(coeffs), Z,
                   recurrence=tuple(map(tuple, rec)))

    @cached_property
    def phi(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    @cached_property
    def recurrence_arrays(self):
        """``(a_n, b_n, c_n)`` as three arrays (empty recurrence -> length 0)."""
        if self.basis == CHEBYSHEV_U:
            n = max(len(self.coeffs), 1)
            return np.zeros(n), np.full(n, 0.5), np.full(n, 0.5)
        if self.recurrence is None:
            raise ValidationError("generalOP component needs recurrence coefficients",
                                  ["missing-recurrence"])
        rec = np.asarray(self.recurrence, dtype=float).reshape(-1, 3)
        return rec[:, 0], rec[:, 1], rec[:, 2]

    @cached_property
    def weight_moment(self) -> float:
        """Integral of the weight over [-1, 1]."""
        if self.moment0 is not None:
            return float(self.moment0)
        return math.exp((self.alpha + self.beta + 1) * math.log(2.0)
                        + betaln(self.alpha + 1, self.beta + 1))

    def to_local(self, x):
        return (2.0 * np.asarray(x) - (self.a + self.b)) / (self.b - self.a)

    def to_global(self, t):
        return 0.5 * (self.a + self.b) + self.half_width * np.asarray(t)

    def weight(self, t):
        t = np.asarray(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (1.0 - t) ** self.alpha * (1.0 + t) ** self.beta

    def series(self, t):
        """Evaluate ``sum_n phi_n p_n(t)`` (real or complex ``t``)."""
        return eval_series(self.phi, *self.recurrence_arrays, t)

    def density(self, x):
        """Density in the global variable; zero outside the interval."""
        x = np.asarray(x, dtype=float)
        t = self.to_local(x)
        inside = (t >= -1.0) & (t <= 1.0)
        tc = np.where(inside, t, 0.0)
        val = self.weight(tc) * self.series(tc) / self.Z
        return np.where(inside, val, 0.0)

    def mass(self) -> float:
        if self.basis == CHEBYSHEV_U:
            return self.half_width * self.phi[0] * (math.pi / 2) / self.Z
        n = len(self.coeffs) + 2
        nodes, weights = gauss_jacobi(n, self.alpha, self.beta)
        integral = weights @ self.series(nodes)
        if self.moment0 is not None:
            integral *= self.moment0 / weights.sum()
        return float(self.half_width * integral / self.Z)

    def normalized(self, mass: float = 1.0) -> "ACComponent":
        """Copy with ``Z`` rescaled so the component carries ``mass``."""
        current = self.mass()
        return replace(self, Z=self.Z * current / mass)


@dataclass(frozen=True)
class Measure:
    atoms: tuple = ()
    components: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def is_pure_point(self) -> bool:
        return bool(self.atoms) and not self.components

    def total_mass(self) -> float:
        return sum(at.weight for at in self.atoms) + sum(c.mass() for c in self.components)

    def first_moment(self) -> float:
        """Mean location; exact for the polynomial series by Gauss-Jacobi."""
        total = sum(at.weight * at.location for at in self.atoms)
        for comp in self.components:
            t, w = gauss_jacobi(max(len(comp.coeffs) + 2, 32), comp.alpha, comp.beta)
            total += comp.half_width * float(w @ (comp.series(t) * comp.to_global(t))) / comp.Z
        return total

    @cached_property
    def atom_locations(self) -> np.ndarray:
        return np.array([at.location for at in self.atoms], dtype=float)

    @cached_property
    def atom_weights(self) -> np.ndarray:
        return np.array([at.weight for at in self.atoms], dtype=float)

    @property
    def has_unbounded_density(self) -> bool:
        return any(c.alpha < 0 or c.beta < 0 for c in self.components)


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""

    def __str__(self):
        return f"{self.code}: {self.detail}" if self.detail else self.code


def eval_series(phi, a, b, c, t):
    """Sum ``phi_n p_n(t)`` with ``p_0 = 1`` by forward recurrence."""
    t = np.asarray(t)
    if len(phi) == 0:
        return np.zeros_like(t, dtype=float)
    p_prev = np.zeros_like(t, dtype=np.result_type(t, float))
    p = np.ones_like(p_prev)
    total = phi[0] * p
    for n in range(1, len(phi)):
        lower = c[n - 2] * p_prev if n >= 2 else 0.0
        p_prev, p = p, ((t - a[n - 1]) * p - lower) / b[n - 1]
        total = total + phi[n] * p
    return total


def _gauss_u(n):
    j = np.arange(1, n + 1)
    theta = j * np.pi / (n + 1)
    return np.cos(theta), np.pi / (n + 1) * np.sin(theta) ** 2


def expand_component(interval, alpha: float, beta: float, r: Callable, m: int,
                     n_quad: Optional[int] = None, mass: Optional[float] = None,
                     rtol: float = 0.0) -> ACComponent:
    """Project the bounded factor ``r(x)`` onto the basis for the given weight.

    ``alpha = beta = 1/2`` selects the Chebyshev-U basis, anything else the
    orthonormal Jacobi basis. If ``mass`` is given, ``Z`` is chosen so that the
    component carries that mass. Trailing coefficients below
    ``rtol * max|phi|`` are dropped.
    """
    n_quad = n_quad or max(2 * m + 2, 64)
    lo, hi = float(interval[0]), float(interval[1])

    def r_local(t):
        return np.asarray(r(0.5 * (lo + hi) + 0.5 * (hi - lo) * t), dtype=float)

    if alpha == 0.5 and beta == 0.5:
        t, w = _gauss_u(n_quad)
        a, b, c = np.zeros(m + 1), np.full(m + 1, 0.5), np.full(m + 1, 0.5)
    else:
        t, w = gauss_jacobi(n_quad, alpha, beta)
        a, b, c = jacobi_recurrence(alpha, beta, m + 1).T
    vals = r_local(t) * w
    phi = np.empty(m + 1)
    p_prev, p = np.zeros_like(t), np.ones_like(t)
    for k in range(m + 1):
        phi[k] = (vals @ p) / (w @ (p * p))
        lower = c[k - 1] * p_prev if k >= 1 else 0.0
        p_prev, p = p, ((t - a[k]) * p - lower) / b[k]
    phi = _trim(phi, rtol)
    if alpha == 0.5 and beta == 0.5:
        comp = ACComponent.chebyshev_u((lo, hi), phi)
    else:
        comp = ACComponent.jacobi((lo, hi), alpha, beta, phi)
    return comp.normalized(mass) if mass is not None else comp


def _trim(phi, rtol):
    phi = np.asarray(phi, dtype=float)
    if rtol > 0:
        keep = np.nonzero(np.abs(phi) >= rtol * np.abs(phi).max())[0]
    else:
        keep = np.nonzero(phi)[0]
    return phi[: keep[-1] + 1] if len(keep) else phi[:1]


def validate(measure: Measure, mass_tol: float = MASS_TOL) -> list:
    """Return the list of violated invariants (empty when the measure is valid)."""
    out = []
    if not measure.atoms and not measure.components:
        return [Violation("empty-measure")]
    locs = [at.location for at in measure.atoms]
    for at in measure.atoms:
        if not (math.isfinite(at.location) and math.isfinite(at.weight)):
            out.append(Violation("nonfinite-atom", f"at {at.location}"))
        elif at.weight <= 0:
            out.append(Violation("nonpositive-weight", f"atom at {at.location}"))
    if len(set(locs)) != len(locs):
        out.append(Violation("duplicate-location", "atoms share a location"))
    for i, comp in enumerate(measure.components):
        out.extend(_component_violations(i, comp))
    spans = sorted(c.interval for c in measure.components)
    for (a1, b1), (a2, b2) in zip(spans, spans[1:]):
        if a2 <= b1:
            out.append(Violation("overlapping-components", f"[{a1}, {b1}] and [{a2}, {b2}]"))
    for x in locs:
        for a, b in spans:
            if a <= x <= b:
                out.append(Violation("atom-in-component", f"atom at {x} inside [{a}, {b}]"))
    if not out:
        total = measure.total_mass()
        if abs(total - 1.0) > mass_tol:
            out.append(Violation("mass", f"total mass {total!r} != 1"))
    return out


def _component_violations(i, comp):
    out = []
    tag = f"component {i}"
    a, b = comp.interval
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        out.append(Violation("bad-interval", f"{tag}: [{a}, {b}]"))
    if comp.alpha <= -1 or comp.beta <= -1:
        out.append(Violation("bad-exponents", f"{tag}: alpha={comp.alpha}, beta={comp.beta}"))
    if comp.basis not in BASES:
        out.append(Violation("unknown-basis", f"{tag}: {comp.basis!r}"))
    elif comp.basis == CHEBYSHEV_U and (comp.alpha, comp.beta) != (0.5, 0.5):
        out.append(Violation("basis-exponents", f"{tag}: chebyshevU needs alpha = beta = 1/2"))
    elif comp.basis == GENERAL_OP:
        if comp.recurrence is None:
            out.append(Violation("missing-recurrence", tag))
        elif len(comp.recurrence) < len(comp.coeffs) - 1:
            out.append(Violation("short-recurrence", f"{tag}: {len(comp.recurrence)} rows"))
    if not comp.coeffs:
        out.append(Violation("empty-coeffs", tag))
    elif not all(math.isfinite(v) for v in comp.coeffs):
        out.append(Violation("nonfinite-coeffs", tag))
    elif comp.coeffs[-1] == 0.0:
        out.append(Violation("zero-last-coeff", tag))
    if not comp.Z > 0:
        out.append(Violation("nonpositive-normalization", f"{tag}: Z={comp.Z}"))
    return out


def check(measure: Measure) -> Measure:
    """Raise :class:`ValidationError` unless ``measure`` is valid."""
    bad = validate(measure)
    if bad:
        raise ValidationError("invalid measure: " + "; ".join(map(str, bad)), bad)
    return measure


def density_eval(measure: Measure, x: float) -> float:
    """Density of the absolutely continuous part at ``x``."""
    if measure.atoms and np.any(measure.atom_locations == x):
        raise DomainError(f"x = {x} is an atom location")
    return float(sum(comp.density(x) for comp in measure.components))


def support_hull(measure: Measure) -> tuple:
    pts = [at.location for at in measure.atoms]
    for comp in measure.components:
        pts.extend(comp.interval)
    if not pts:
        raise DomainError("empty measure has no support")
    return min(pts), max(pts)


def support_pieces(measure: Measure) -> list:
    """Closed pieces of the support, sorted; atoms are degenerate intervals."""
    pieces = [(at.location, at.location) for at in measure.atoms]
    pieces += [comp.interval for comp in measure.components]
    if not pieces:
        raise DomainError("empty measure has no support")
    return sorted(pieces)


def support_gaps(measure: Measure) -> list:
    """Maximal open intervals of the hull that carry no mass."""
    gaps = []
    pieces = support_pieces(measure)
    reach = pieces[0][1]
    for lo, hi in pieces[1:]:
        if lo > reach:
            gaps.append((reach, lo))
        reach = max(reach, hi)
    return gaps


def mp_measure(c: float, tol: float = COEFF_TRUNCATION) -> Measure:
    """Marchenko-Pastur law whose free cumulants all equal ``c``.

    For ``c < 1`` the law has an atom of mass ``1 - c`` at the origin. The
    continuous part on ``[(1 - sqrt c)^2, (1 + sqrt c)^2]`` is stored in the
    Chebyshev-U basis with ``phi_k = -(-q)^(k+1) / pi`` where
    ``q = min(sqrt c, 1/sqrt c)``; the series is cut once ``|phi_k| < tol``.
    ``c = 1`` has an inverse square-root edge at 0 and is stored as a Jacobi
    component instead.
    """
    if not c > 0:
        raise DomainError(f"Marchenko-Pastur parameter must be positive, got {c}")
    sc = math.sqrt(c)
    lo, hi = (1 - sc) ** 2, (1 + sc) ** 2
    if c == 1.0:
        comp = ACComponent.jacobi((0.0, 4.0), 0.5, -0.5, [1 / (2 * math.pi)])
        return Measure((), (comp,))
    q = sc if c < 1 else 1 / sc
    k_max = max(1, int(math.ceil(math.log(tol * math.pi) / math.log(q))))
    k = np.arange(k_max + 1)
    phi = -((-q) ** (k + 1)) / math.pi
    phi = phi[: np.nonzero(np.abs(phi) >= tol)[0][-1] + 1]
    comp = ACComponent.chebyshev_u((lo, hi), phi)
    atoms = (Atom(0.0, 1.0 - c),) if c < 1 else ()
    return Measure(atoms, (comp,))


# -- JSON ------------------------------------------------------------------

def measure_to_dict(measure: Measure) -> dict:
    comps = []
    for comp in measure.components:
        d = {"interval": list(comp.interval), "alpha": comp.alpha, "beta": comp.beta,
             "basis": comp.basis, "coeffs": list(comp.coeffs)}
        if comp.Z != 1.0:
            d["Z"] = comp.Z
        if comp.basis == GENERAL_OP and comp.recurrence is not None:
            d["recurrence"] = [list(row) for row in comp.recurrence]
        if comp.moment0 is not None:
            d["moment0"] = comp.moment0
        comps.append(d)
    return {"atoms": [{"x": at.location, "w": at.weight} for at in measure.atoms],
            "components": comps}


def measure_from_dict(data: dict) -> Measure:
    """Inverse of :func:`measure_to_dict`.

    ``"recurrence": "jacobi"`` is accepted as shorthand for the closed-form
    Jacobi recurrence of the component's own exponents. A top-level
    ``{"builtin": "marchenko_pastur", "c": ...}`` builds that law directly.
    """
    if "builtin" in data:
        return _builtin(data)
    try:
        atoms = tuple(Atom(float(a["x"]), float(a["w"])) for a in data.get("atoms", []))
        comps = []
        for d in data.get("components", []):
            basis = d.get("basis", CHEBYSHEV_U)
            alpha = float(d.get("alpha", 0.5))
            beta = float(d.get("beta", 0.5))
            rec = d.get("recurrence")
            if rec == "jacobi":
                rec = jacobi_recurrence(alpha, beta, max(len(d["coeffs"]), 1)).tolist()
            comps.append(ACComponent(tuple(d["interval"]), alpha, beta, basis,
                                     tuple(d["coeffs"]), float(d.get("Z", 1.0)),
                                     None if rec is None else tuple(map(tuple, rec)),
                                     d.get("moment0")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed measure description: {exc}", ["schema"]) from exc
    return Measure(atoms, tuple(comps))


def _builtin(data):
    from . import catalog

    name = data["builtin"]
    if name in ("marchenko_pastur", "mp"):
        return mp_measure(float(data["c"]))
    if name == "semicircle":
        return catalog.semicircle(float(data.get("radius", 2.0)))
    if name == "uniform":
        return catalog.uniform(*data.get("interval", (-1.0, 1.0)))
    if name == "point_masses":
        return catalog.point_masses(data["x"], data.get("w"))
    raise ValidationError(f"unknown builtin measure {name!r}", ["schema"])


def translate(measure: Measure, shift: float) -> Measure:
    """The measure pushed forward by ``x -> x + shift``."""
    shift = float(shift)
    atoms = tuple(Atom(a.location + shift, a.weight) for a in measure.atoms)
    comps = tuple(replace(c, interval=(c.interval[0] + shift, c.interval[1] + shift))
                  for c in measure.components)
    return Measure(atoms, comps)


def point_measure(locations: Sequence[float], weights: Optional[Sequence[float]] = None) -> Measure:
    locations = [float(x) for x in locations]
    if weights is None:
        weights = [1.0 / len(locations)] * len(locations)
    return Measure(tuple(Atom(x, float(w)) for x, w in zip(locations, weights)), ())
