"""Stieltjes transforms, conformal maps, boundary curves and winding numbers."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SupportError
from .measure import CHEBYSHEV_U, ACComponent, Measure, support_hull
from .quadrature import cauchy_integral

SUPPORT_TOL = 1e-13


# -- conformal maps --------------------------------------------------------

def joukowski(w):
    """``J(w) = (w + 1/w) / 2``."""
    w = np.asarray(w, dtype=complex)
    return 0.5 * (w + 1.0 / w)


def joukowski_inv_disc(z, strict: bool = True):
    """Preimage of ``z`` under :func:`joukowski` inside the unit disc.

    Uses ``w = 1 / (z + sqrt(z - 1) sqrt(z + 1))`` with principal roots, whose
    branch cut is exactly [-1, 1]. Points on the cut raise
    :class:`DomainError` unless ``strict`` is false, in which case they map to
    the unit circle (the limit from below).
    """
    z = np.asarray(z, dtype=complex)
    if strict and np.any((z.imag == 0) & (np.abs(z.real) <= 1)):
        raise DomainError("joukowski_inv_disc is undefined on [-1, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1.0 / (z + np.sqrt(z - 1) * np.sqrt(z + 1))


def affine(interval, z):
    """``M(z) = (b + a)/2 + (b - a) z / 2``, sending [-1, 1] onto ``[a, b]``."""
    a, b = _check_interval(interval)
    return 0.5 * (b + a) + 0.5 * (b - a) * np.asarray(z)


def affine_inv(interval, z):
    a, b = _check_interval(interval)
    return (2.0 * np.asarray(z) - (b + a)) / (b - a)


def _check_interval(interval):
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise DomainError(f"degenerate interval [{a}, {b}]")
    return a, b


# -- transforms ------------------------------------------------------------

def _component_local(comp: ACComponent, z):
    zl = comp.to_local(z)
    near = (np.abs(zl.imag) * comp.half_width < SUPPORT_TOL) & (np.abs(zl.real) <= 1.0)
    if np.any(near):
        raise SupportError(f"evaluation point on the support [{comp.a}, {comp.b}]")
    return zl


def component_stieltjes(comp: ACComponent, z, derivative: bool = False):
    """Transform of a single component (mass as stored, not renormalised)."""
    zl = _component_local(comp, z)
    if comp.basis == CHEBYSHEV_U:
        w = joukowski_inv_disc(zl, strict=False)
        phi = comp.phi
        n = np.arange(len(phi))
        if not derivative:
            # sum_n phi_n pi w^(n+1) by Horner in w
            return math.pi * w * np.polyval(phi[::-1], w) / comp.Z
        dseries = np.polyval((phi * (n + 1))[::-1], w)
        dw_dz = 2 * w**2 / (w**2 - 1) / comp.half_width
        return math.pi * dseries * dw_dz / comp.Z
    if derivative:
        val = -cauchy_integral(zl, comp.alpha, comp.beta, comp.series, power=2,
                               degree=len(comp.coeffs))
        return val / (comp.Z * comp.half_width)
    val = cauchy_integral(zl, comp.alpha, comp.beta, comp.series, power=1,
                          degree=len(comp.coeffs))
    return val / comp.Z


def _atom_terms(measure: Measure, z, derivative: bool):
    if not measure.atoms:
        return 0.0
    diff = z[..., None] - measure.atom_locations
    if np.any(np.abs(diff) < SUPPORT_TOL):
        raise SupportError("evaluation point on an atom")
    if derivative:
        return -np.sum(measure.atom_weights / diff**2, axis=-1)
    return np.sum(measure.atom_weights / diff, axis=-1)


def stieltjes(measure: Measure, z):
    """``G(z) = int dmu(x) / (z - x)`` for scalar or array ``z`` off the support."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    total = np.zeros(z.shape, dtype=complex) + _atom_terms(measure, z, False)
    for comp in measure.components:
        total = total + component_stieltjes(comp, z)
    return complex(total[0]) if scalar else total


def stieltjes_derivative(measure: Measure, z):
    """``G'(z) = -int dmu(x) / (z - x)^2``."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    total = np.zeros(z.shape, dtype=complex) + _atom_terms(measure, z, True)
    for comp in measure.components:
        total = total + component_stieltjes(comp, z, derivative=True)
    return complex(total[0]) if scalar else total


# -- boundary curves -------------------------------------------------------

@dataclass(frozen=True)
class CurveSamples:
    r: float
    t: np.ndarray
    points: np.ndarray

    def __len__(self):
        return len(self.points)

    def to_csv(self, header: str = "") -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "re", "im"])
        for t, p in zip(self.t, self.points):
            writer.writerow([repr(float(t)), repr(float(p.real)), repr(float(p.imag))])
        return buf.getvalue()


def ellipse_points(hull, r: float, K: int):
    """``M(J(r e^{it}))`` at ``t_j = 2 pi j / K``."""
    t = 2 * np.pi * np.arange(K) / K
    return t, affine(hull, joukowski(r * np.exp(1j * t)))


def gamma_curve(measure: Measure, r: float, K: int) -> CurveSamples:
    """Samples of ``gamma_r(t) = G(M(J(r e^{it})))`` over the support hull.

    ``r = 1`` is allowed only for a single Chebyshev-U component, where the
    boundary values are the Chebyshev series on the unit circle.
    """
    if K < 16:
        raise DomainError("a curve needs at least 16 samples")
    if not 0 < r <= 1:
        raise DomainError(f"curve radius must lie in (0, 1], got {r}")
    hull = support_hull(measure)
    if r == 1:
        if measure.atoms or len(measure.components) != 1 \
                or measure.components[0].basis != CHEBYSHEV_U:
            raise DomainError("r = 1 needs a single Chebyshev-U component")
        comp = measure.components[0]
        t = 2 * np.pi * np.arange(K) / K
        w = np.exp(1j * t)
        vals = math.pi * w * np.polyval(comp.phi[::-1], w) / comp.Z
        return CurveSamples(1.0, t, vals)
    if hull[0] == hull[1]:
        hull = (hull[0] - 1.0, hull[1] + 1.0)
    t, z = ellipse_points(hull, r, K)
    return CurveSamples(float(r), t, stieltjes(measure, z))


def winding_number(curve, zeta: complex, max_step: float = math.pi) -> int:
    """Winding number of a closed sampled curve around ``zeta``.

    Sums principal argument increments. Any increment of magnitude at least
    ``max_step`` means the curve is under-sampled and raises
    :class:`DomainError`, as does a rounding residual above 0.1.
    """
    pts = curve.points if isinstance(curve, CurveSamples) else np.asarray(curve)
    d = np.asarray(pts, dtype=complex) - zeta
    if np.min(np.abs(d)) == 0:
        raise DomainError("point lies on the curve")
    steps = np.angle(np.roll(d, -1) / d)
    if np.max(np.abs(steps)) >= max_step:
        raise DomainError("curve is under-sampled around this point")
    total = steps.sum() / (2 * np.pi)
    n = int(round(total))
    if abs(total - n) > 0.1:
        raise DomainError(f"winding sum {total:.3f} is not close to an integer")
    return n
