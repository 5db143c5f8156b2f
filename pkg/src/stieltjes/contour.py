"""Zeros of a holomorphic function inside the unit circle from contour moments.

With ``omega_j = exp(2 pi i j / K)`` the trapezium rule gives

    s_n ~ (1/K) sum_j omega_j^(n+1) / f(omega_j) = (1/2 pi i) oint z^n / f(z) dz,

which is the sum of residues of ``z^n / f`` inside the circle. For simple
zeros ``z_k`` the Hankel matrices ``H0[i, j] = s_{i+j}`` and
``H1[i, j] = s_{i+j+1}`` factor through a Vandermonde matrix and the zeros are
the eigenvalues of the pencil ``H1 - lambda H0``. Extra rows beyond the number
of zeros are removed by truncating the singular value decomposition of
``H0``. The argument principle, applied to the same samples, counts zeros with
multiplicity and is used as an independent consistency check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InconsistencyError, RootFindingError

RANK_TOL = 1e-10
CLUSTER_TOL = 1e-6
MIN_ABS_F = 1e-14
COND_WARN = 1e12


@dataclass(frozen=True)
class MomentSequence:
    values: np.ndarray
    K: int
    radius: float = 1.0
    scale: float = 1.0          # mean |1/f| on the circle, the natural size of the moments
    winding: Optional[int] = None

    @property
    def M(self) -> int:
        return len(self.values) // 2


@dataclass(frozen=True)
class HankelPencil:
    H0: np.ndarray
    H1: np.ndarray
    scale: float = 1.0


@dataclass
class RootCluster:
    center: complex
    multiplicity: int
    members: list = field(default_factory=list)
    residual: float = math.nan
    flagged: bool = False


def unit_nodes(K: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(K) / K)


def sample_winding(values) -> Optional[int]:
    """Argument-principle count from closed-curve samples, or None if under-sampled."""
    v = np.asarray(values, dtype=complex)
    steps = np.angle(np.roll(v, -1) / v)
    if np.max(np.abs(steps)) >= 0.5 * math.pi:
        return None
    return int(round(steps.sum() / (2 * math.pi)))


def moments_from_samples(fvals, M: int) -> MomentSequence:
    """Moments ``s_0 .. s_{2M-1}`` from ``f`` sampled at the K unit-circle nodes."""
    fvals = np.asarray(fvals, dtype=complex)
    K = len(fvals)
    if M < 1:
        raise RootFindingError("need at least one pencil row")
    if K < 2 * M:
        raise RootFindingError(f"K = {K} nodes cannot support M = {M} (need K >= 2M)")
    if not np.all(np.isfinite(fvals)):
        raise RootFindingError("f is not finite on the contour")
    if np.min(np.abs(fvals)) < MIN_ABS_F:
        raise RootFindingError("f nearly vanishes at a contour node; change the radius")
    omega = unit_nodes(K)
    inv = 1.0 / fvals
    powers = omega[None, :] ** np.arange(1, 2 * M + 1)[:, None]
    values = powers @ inv / K
    return MomentSequence(values, K, 1.0, float(np.mean(np.abs(inv))), sample_winding(fvals))


def moments(f: Callable, K: int, M: int) -> MomentSequence:
    """Trapezium-rule moments of ``1/f`` on the unit circle; ``f`` is vectorised."""
    return moments_from_samples(f(unit_nodes(K)), M)


def hankel_pencil(m: MomentSequence) -> HankelPencil:
    s = np.asarray(m.values if isinstance(m, MomentSequence) else m, dtype=complex)
    M = len(s) // 2
    idx = np.arange(M)[:, None] + np.arange(M)[None, :]
    scale = m.scale if isinstance(m, MomentSequence) else 1.0
    return HankelPencil(s[idx], s[idx + 1], scale)


def estimate_root_count(p: HankelPencil, rank_tol: float = RANK_TOL) -> int:
    """Numerical rank of ``H0``; singular values are compared to ``rank_tol``
    times the larger of the top singular value and the moment scale."""
    sv = np.linalg.svd(p.H0, compute_uv=False)
    if len(sv) == 0:
        return 0
    ref = max(sv[0], p.scale)
    if ref == 0:
        return 0
    return int(np.sum(sv > rank_tol * ref))


def pencil_roots(p: HankelPencil, N: int, diagnostics: Optional[list] = None):
    """Eigenvalues of the rank-``N`` compression of the pencil."""
    if N == 0:
        return np.empty(0, dtype=complex)
    M = p.H0.shape[0]
    if N > M:
        raise RootFindingError(f"rank {N} exceeds pencil size {M}")
    U, s, Vh = np.linalg.svd(p.H0)
    cond = s[0] / s[N - 1] if s[N - 1] > 0 else math.inf
    if cond > COND_WARN:
        msg = f"ill-conditioned compression (cond {cond:.2e})"
        if diagnostics is not None:
            diagnostics.append(msg)
        else:
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    A = (U[:, :N].conj().T @ p.H1 @ Vh[:N].conj().T) / s[:N, None]
    return np.linalg.eigvals(A)


def refine(f: Callable, z0: complex, fprime: Optional[Callable] = None, maxiter: int = 20,
           tol: float = 1e-13, radius: float = 1.0, margin: float = 0.05):
    """Newton polish of ``z0``.

    Returns ``(z, |f(z)|, flagged)``. The best iterate is kept; a run that
    leaves the disc of radius ``radius + margin`` returns ``z0`` flagged.
    """
    def fval(z):
        return complex(np.asarray(f(np.array([z])))[0])

    def dval(z):
        if fprime is not None:
            return complex(np.asarray(fprime(np.array([z])))[0])
        h = 1e-7 * max(1.0, abs(z))
        return (fval(z + h) - fval(z - h)) / (2 * h)

    z = complex(z0)
    fz = fval(z)
    best, best_res = z, abs(fz)
    res0 = best_res
    for _ in range(maxiter):
        if best_res < tol:
            break
        d = dval(z)
        if d == 0 or not np.isfinite(d):
            break
        z = z - fz / d
        if abs(z) > radius + margin:
            return complex(z0), res0, True
        fz = fval(z)
        if not np.isfinite(fz):
            break
        if abs(fz) < best_res:
            best, best_res = z, abs(fz)
        elif abs(fz) > 10 * best_res:
            break
    return best, best_res, False


def cluster_roots(points, residuals=None, cluster_tol: float = CLUSTER_TOL) -> list:
    """Greedy single-link clustering of nearby roots."""
    pts = [complex(p) for p in points]
    res = list(residuals) if residuals is not None else [math.nan] * len(pts)
    clusters = []
    for z, r in sorted(zip(pts, res), key=lambda t: (t[0].real, t[0].imag)):
        for c in clusters:
            if any(abs(z - m) < cluster_tol for m in c.members):
                c.members.append(z)
                c.multiplicity += 1
                c.center = complex(np.mean(c.members))
                c.residual = min(c.residual, r) if not math.isnan(c.residual) else r
                break
        else:
            clusters.append(RootCluster(z, 1, [z], r))
    return clusters


def find_roots_from_samples(f: Callable, fvals, M: int, fprime: Optional[Callable] = None,
                            rank_tol: float = RANK_TOL, cluster_tol: float = CLUSTER_TOL,
                            do_refine: bool = True, check_count: bool = True,
                            info: Optional[dict] = None) -> list:
    """Core of :func:`find_roots_unit_disc` once ``f`` has been sampled on the circle."""
    ms = moments_from_samples(fvals, M)
    pencil = hankel_pencil(ms)
    rank = estimate_root_count(pencil, rank_tol)
    # the argument principle is immune to the quadrature noise floor that can
    # lift trailing singular values above the rank threshold
    N = ms.winding if ms.winding is not None and 0 <= ms.winding <= ms.M else rank
    msgs = []
    if N != rank:
        msgs.append(f"singular-value rank {rank} overridden by argument count {N}")
    raw = pencil_roots(pencil, N, msgs)
    refined, residuals, flags = [], [], []
    for z0 in raw:
        if do_refine:
            z, res, flag = refine(f, z0, fprime)
        else:
            z, res, flag = complex(z0), abs(complex(np.asarray(f(np.array([z0])))[0])), False
        refined.append(z)
        residuals.append(res)
        flags.append(flag)
    clusters = cluster_roots(refined, residuals, cluster_tol)
    for c in clusters:
        c.flagged = any(fl for z, fl in zip(refined, flags) if z in c.members)
    inside = [c for c in clusters if abs(c.center) < 1.0]
    if info is not None:
        info.update(rank=N, sv_rank=rank, winding=ms.winding, raw=raw, warnings=msgs,
                    singular_values=np.linalg.svd(pencil.H0, compute_uv=False))
    if check_count and ms.winding is not None:
        total = sum(c.multiplicity for c in inside)
        if total != ms.winding:
            raise InconsistencyError(
                f"found {total} zeros but the argument principle counts {ms.winding}; "
                "increase K")
    return inside


def find_roots_unit_disc(f: Callable, K: int, M: int, fprime: Optional[Callable] = None,
                         **opts) -> list:
    """All zeros of ``f`` in the open unit disc, clustered by multiplicity."""
    return find_roots_from_samples(f, f(unit_nodes(K)), M, fprime, **opts)
