"""Cauchy integrals of Jacobi-weighted series on [-1, 1].

For a component with weight ``w(t) = (1-t)^alpha (1+t)^beta`` and bounded
factor ``r(t)`` this module evaluates

    I_p(z) = int_{-1}^{1} w(t) r(t) / (z - t)^p dt,    p in {1, 2},

for complex ``z`` off the interval. Points well away from the interval use a
single Gauss-Jacobi rule whose size is picked from the Bernstein ellipse
through ``z``. Points close to the interval use a composite rule: [-1, 1] is
bisected until every panel is at least one panel-width away from ``z`` and
from any singular endpoint, interior panels get Gauss-Legendre nodes, and
panels touching an endpoint get Gauss-Jacobi nodes carrying that endpoint's
exponent. Both rules converge geometrically, so the composite rule only
needs a few hundred nodes even at distance 1e-10.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln, roots_jacobi, roots_legendre

from .errors import QuadratureError

PANEL_NODES = 20
MAX_GAUSS_NODES = 1024
MIN_GAUSS_NODES = 16
MAX_PANELS = 4000
TARGET_DIGITS = 17.0


def jacobi_recurrence(alpha: float, beta: float, n: int) -> np.ndarray:
    """Recurrence rows ``(a_k, b_k, c_k)``, k < n, of the orthonormal Jacobi family.

    Scaling every ``p_k`` by the same constant leaves the recurrence unchanged,
    so these rows also generate the family normalised to ``p_0 = 1``.
    """
    al, be = float(alpha), float(beta)
    k = np.arange(n, dtype=float)
    s = 2 * k + al + be
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (be**2 - al**2) / (s * (s + 2))
        b = (2 / (s + 2)) * np.sqrt((k + 1) * (k + 1 + al) * (k + 1 + be) * (k + 1 + al + be)
                                    / ((s + 1) * (s + 3)))
    if n:
        a[0] = (be - al) / (al + be + 2)
        b[0] = (2 / (al + be + 2)) * math.sqrt((al + 1) * (be + 1) / (al + be + 3))
    return np.column_stack([a, b, b])


@lru_cache(maxsize=None)
def gauss_jacobi(n: int, alpha: float, beta: float):
    """Gauss rule for ``(1-t)^alpha (1+t)^beta`` on [-1, 1].

    scipy's rule is used for integer exponents. Otherwise its weights drift by
    up to 1e-10 for a few hundred nodes, so the rule comes from the
    eigen-decomposition of the Jacobi matrix instead.
    """
    if float(alpha).is_integer() and float(beta).is_integer():
        t, w = roots_jacobi(n, alpha, beta)
    else:
        rec = jacobi_recurrence(alpha, beta, n)
        t, vec = eigh_tridiagonal(rec[:, 0], rec[:-1, 1])
        mu0 = math.exp((alpha + beta + 1) * math.log(2.0) + betaln(alpha + 1, beta + 1))
        w = mu0 * vec[0] ** 2
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    t, w = roots_legendre(n)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def bernstein_radius(z):
    """``|z + sqrt(z - 1) sqrt(z + 1)|``, the ellipse parameter through ``z``."""
    z = np.asarray(z, dtype=complex)
    return np.abs(z + np.sqrt(z - 1) * np.sqrt(z + 1))


def gauss_size(z, degree: int = 0):
    """Nodes needed for a Gauss rule on [-1, 1] to resolve ``1/(z - t)``."""
    rho = np.maximum(bernstein_radius(z), 1.0 + 1e-300)
    n = TARGET_DIGITS * math.log(10) / (2 * np.log(rho)) + degree / 2 + 8
    return np.ceil(n)


def _singular(e: float) -> bool:
    return not (e >= 0 and float(e).is_integer())


def _panels(z: complex, alpha: float, beta: float):
    """Bisect [-1, 1] until every panel is well separated from the singularities."""
    sing_left, sing_right = _singular(beta), _singular(alpha)
    done, todo = [], [(-1.0, 1.0)]
    while todo:
        u, v = todo.pop()
        width = v - u
        x = min(max(z.real, u), v)
        ok = abs(complex(x, 0.0) - z) >= width
        if ok and sing_left and u > -1.0:
            ok = u + 1.0 >= width
        if ok and sing_right and v < 1.0:
            ok = 1.0 - v >= width
        if ok:
            done.append((u, v))
        else:
            mid = 0.5 * (u + v)
            todo.extend(((u, mid), (mid, v)))
        if len(done) + len(todo) > MAX_PANELS:
            raise QuadratureError(f"composite rule needs more than {MAX_PANELS} panels at z={z}")
    return done


def composite_rule(z: complex, alpha: float, beta: float, n: int = PANEL_NODES):
    """Nodes and weights (weight function included) adapted to the point ``z``."""
    ts, ws = [], []
    gl_t, gl_w = gauss_legendre(n)
    for u, v in _panels(z, alpha, beta):
        half = 0.5 * (v - u)
        if u == -1.0 and v == 1.0:
            t, w = gauss_jacobi(n, alpha, beta)
            ts.append(np.asarray(t))
            ws.append(np.asarray(w))
        elif v == 1.0:
            s, w = gauss_jacobi(n, alpha, 0.0)
            t = u + half * (1 + s)
            ts.append(t)
            ws.append(w * half ** (alpha + 1) * (1 + t) ** beta)
        elif u == -1.0:
            s, w = gauss_jacobi(n, 0.0, beta)
            t = u + half * (1 + s)
            ts.append(t)
            ws.append(w * half ** (beta + 1) * (1 - t) ** alpha)
        else:
            t = u + half * (1 + gl_t)
            ts.append(t)
            ws.append(gl_w * half * (1 - t) ** alpha * (1 + t) ** beta)
    return np.concatenate(ts), np.concatenate(ws)


def cauchy_integral(z, alpha: float, beta: float, r, power: int = 1, degree: int = 0):
    """Evaluate ``int w(t) r(t) / (z - t)^power dt`` for an array of points.

    ``r`` is a vectorised callable on real nodes; ``degree`` is the polynomial
    degree of ``r`` and only enlarges the single-rule node count.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=complex)
    flat_z, flat_out = z.ravel(), out.reshape(-1)
    need = gauss_size(flat_z, degree)
    direct = need <= MAX_GAUSS_NODES
    if np.any(direct):
        sizes = np.maximum(MIN_GAUSS_NODES, 2 ** np.ceil(np.log2(need[direct]))).astype(int)
        idx_direct = np.nonzero(direct)[0]
        for n in np.unique(sizes):
            idx = idx_direct[sizes == n]
            t, w = gauss_jacobi(int(n), alpha, beta)
            vals = w * r(np.asarray(t))
            kern = 1.0 / (flat_z[idx, None] - t[None, :]) ** power
            flat_out[idx] = kern @ vals
    for i in np.nonzero(~direct)[0]:
        t, w = composite_rule(complex(flat_z[i]), alpha, beta)
        flat_out[i] = np.sum(w * r(t) / (flat_z[i] - t) ** power)
    return out
