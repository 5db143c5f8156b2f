"""Ready-made measures used in examples, tests and the command line."""
from __future__ import annotations

import math

import numpy as np

from .measure import ACComponent, Measure, expand_component, mp_measure, point_measure

__all__ = ["semicircle", "uniform", "arcsine", "jacobi_weight", "bimodal_jacobi",
           "two_cut", "jacobi_pair", "point_masses", "marchenko_pastur", "bimodal_chebyshev"]


def semicircle(radius: float = 2.0) -> Measure:
    """Wigner semicircle on ``[-radius, radius]``."""
    comp = ACComponent.chebyshev_u((-radius, radius), [2.0 / (math.pi * radius)])
    return Measure((), (comp,))


def uniform(a: float = -1.0, b: float = 1.0) -> Measure:
    return Measure((), (ACComponent.jacobi((a, b), 0.0, 0.0, [1.0]).normalized(),))


def jacobi_weight(alpha: float, beta: float, interval=(-1.0, 1.0)) -> Measure:
    """Normalised weight ``(1-t)^alpha (1+t)^beta`` on ``interval``."""
    return Measure((), (ACComponent.jacobi(interval, alpha, beta, [1.0]).normalized(),))


def arcsine(a: float = -1.0, b: float = 1.0) -> Measure:
    return jacobi_weight(-0.5, -0.5, (a, b))


def bimodal_jacobi() -> Measure:
    """``rho(x) = (5/16)(1 + 14 x^2)(1 - x^2)^2`` on [-1, 1]."""
    comp = expand_component((-1.0, 1.0), 2.0, 2.0, lambda x: 5 / 16 * (1 + 14 * x**2), 2,
                            n_quad=8, rtol=1e-14)
    return Measure((), (comp,))


def two_cut(m: int = 40) -> Measure:
    """Equal mixture of a doubly singular weight on [-3, -1] and a smooth
    square-root bump ``(2 + sin x) sqrt((x - 1)(3 - x))`` on [1, 3]."""
    left = ACComponent.jacobi((-3.0, -1.0), -2 / 3, -1 / 3, [1.0]).normalized(0.5)
    right = expand_component((1.0, 3.0), 0.5, 0.5, lambda x: 2 + np.sin(x), m,
                             mass=0.5, rtol=1e-17)
    return Measure((), (left, right))


def jacobi_pair(m: int = 40):
    """Two univalent Jacobi-type measures on [-1, 1] with one singular edge each.

    ``rho_1 ~ (2 - sin x)(1 + x)^(1/2)(1 - x)^(-1/2)`` and
    ``rho_2 ~ (3 + exp(-x/4))(1 + x)^(-2/3)(1 - x)^(1/3)``.
    """
    mu1 = expand_component((-1.0, 1.0), -0.5, 0.5, lambda x: 2 - np.sin(x), m,
                           mass=1.0, rtol=1e-17)
    mu2 = expand_component((-1.0, 1.0), 1 / 3, -2 / 3, lambda x: 3 + np.exp(-x / 4), m,
                           mass=1.0, rtol=1e-17)
    return Measure((), (mu1,)), Measure((), (mu2,))


def point_masses(locations, weights=None) -> Measure:
    return point_measure(locations, weights)


marchenko_pastur = mp_measure


def bimodal_chebyshev(m: int, n_quad: int = 8192) -> Measure:
    """The bimodal density above written as ``sqrt(1 - x^2) r(x)`` and expanded
    in Chebyshev-U polynomials up to degree ``m``.

    ``r(x) = (5/16)(1 + 14 x^2)(1 - x^2)^(3/2)`` is not analytic at the edges,
    so the coefficients decay only algebraically; truncations at different
    ``m`` give genuinely different measures.
    """
    comp = expand_component((-1.0, 1.0), 0.5, 0.5,
                            lambda x: 5 / 16 * (1 + 14 * x**2) * np.clip(1 - x**2, 0, None) ** 1.5,
                            m, n_quad=n_quad)
    return Measure((), (comp,))
