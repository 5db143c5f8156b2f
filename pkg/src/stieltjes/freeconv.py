"""Free additive convolution through the inverse-transform identity.

Near the origin the inverse transforms satisfy

    G_{a+b}^{-1}(zeta) = G_a^{-1}(zeta) + G_b^{-1}(zeta) - 1/zeta =: h(zeta).

When the output is a single-interval square-root measure on ``[alpha, beta]``
its transform is ``sum_k phi_k pi w^(k+1)`` in the disc coordinate
``w = J^{-1}(M^{-1}(z))``. The edges are the real critical points of ``h``.
Pairs ``(w_j, zeta_j)`` with ``h(zeta_j) = M(J(w_j))`` then give the
coefficients by least squares.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BranchTrackingError, DomainError, EndpointError, RecoveryError
from .inverse import all_inverses
from .measure import ACComponent, Measure, check, measure_to_dict, translate
from .transforms import (affine, affine_inv, joukowski, joukowski_inv_disc, stieltjes,
                         stieltjes_derivative)

BRANCH_RESIDUAL = 1e-10
COND_LIMIT = 1e12
IMAG_TOL = 1e-8
SCAN_START = 1e-6
SCAN_RATIO = 1.1
SCAN_MAX = 1e3
BISECT_TOL = 1e-13


@dataclass
class InverseBranch:
    """One continuously tracked branch of ``G^{-1}`` for an operand measure."""

    measure: Measure
    r: float = 0.95
    K: int = 1000
    M: Optional[int] = None
    last: Optional[tuple] = None
    mean: float = field(init=False)

    def __post_init__(self):
        check(self.measure)
        self.mean = self.measure.first_moment()

    def reset(self):
        self.last = None

    def candidates(self, zeta: complex) -> np.ndarray:
        rep = all_inverses(self.measure, zeta, r=self.r, K=self.K, M=self.M,
                           residual_tol=BRANCH_RESIDUAL, validate=False)
        return rep.points

    def seed(self, zeta: complex, steps: int = 60):
        """Walk along the ray from ``SCAN_START * zeta/|zeta|`` out to ``zeta``."""
        self.reset()
        zeta = complex(zeta)
        if abs(zeta) <= SCAN_START:
            return inverse_branch_eval(self, zeta)
        for s in np.geomspace(SCAN_START / abs(zeta), 1.0, steps):
            z = inverse_branch_eval(self, zeta * s)
        return z


def inverse_branch_eval(branch: InverseBranch, zeta: complex) -> complex:
    """Branch-consistent solution of ``G(z) = zeta``.

    Without history the root nearest ``1/zeta + mean`` is taken (the
    behaviour of every inverse near ``zeta = 0``). Afterwards a Newton
    predictor from the last accepted pair selects the root.
    """
    zeta = complex(zeta)
    if zeta == 0:
        raise DomainError("the inverse transform is singular at zeta = 0")
    roots = branch.candidates(zeta)
    if branch.last is None:
        pred, step = 1.0 / zeta + branch.mean, math.inf
    else:
        zeta0, z0 = branch.last
        d = stieltjes_derivative(branch.measure, z0)
        step = abs((zeta - zeta0) / d)
        pred = z0 + (zeta - zeta0) / d
    if len(roots) == 0:
        raise BranchTrackingError(f"no inverse found at zeta = {zeta}")
    dist = np.abs(roots - pred)
    k = int(np.argmin(dist))
    if dist[k] > 10 * step + 1e-8 * (1 + abs(pred)):
        raise BranchTrackingError(
            f"nearest inverse at zeta = {zeta} is {dist[k]:.3g} from the prediction")
    z = complex(roots[k])
    branch.last = (zeta, z)
    return z


def h_eval(branch_a: InverseBranch, branch_b: InverseBranch, zeta: complex) -> complex:
    zeta = complex(zeta)
    return inverse_branch_eval(branch_a, zeta) + inverse_branch_eval(branch_b, zeta) - 1 / zeta


def h_deriv(branch_a: InverseBranch, branch_b: InverseBranch, zeta: complex) -> complex:
    """``h'(zeta)`` by the inverse-function rule at the branch values."""
    zeta = complex(zeta)
    za = inverse_branch_eval(branch_a, zeta)
    zb = inverse_branch_eval(branch_b, zeta)
    return (1 / stieltjes_derivative(branch_a.measure, za)
            + 1 / stieltjes_derivative(branch_b.measure, zb) + 1 / zeta**2)


def _h_and_deriv(ba, bb, zeta):
    za = inverse_branch_eval(ba, zeta)
    zb = inverse_branch_eval(bb, zeta)
    h = za + zb - 1 / zeta
    dh = 1 / stieltjes_derivative(ba.measure, za) + 1 / stieltjes_derivative(bb.measure, zb) \
        + 1 / zeta**2
    return h, dh


def _edge(ba, bb, sign):
    """Real critical point of ``h`` on the ray ``sign * [SCAN_START, SCAN_MAX]``.

    The scan shortens its step when a branch is lost, since an operand's real
    inverse can cease to exist just beyond the output edge.
    """
    ba.reset()
    bb.reset()
    prev_x = prev_d = None
    x, ratio = SCAN_START, SCAN_RATIO
    while x <= SCAN_MAX:
        try:
            d = _h_and_deriv(ba, bb, sign * x)[1].real
        except BranchTrackingError as exc:
            if prev_x is None or ratio - 1 < 1e-12:
                raise EndpointError(f"branch lost at zeta = {sign * x:.6g} before h' "
                                    f"vanished: {exc}") from exc
            ratio = math.sqrt(ratio)
            x = prev_x * ratio
            continue
        if prev_d is not None and np.sign(d) != np.sign(prev_d):
            return _bisect(ba, bb, sign, prev_x, x, prev_d)
        prev_x, prev_d = x, d
        x *= ratio
    raise EndpointError("h' has no sign change: the output is not a single-interval "
                        "square-root measure")


def _bisect(ba, bb, sign, lo, hi, d_lo):
    while hi - lo > BISECT_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        d = _h_and_deriv(ba, bb, sign * mid)[1].real
        if np.sign(d) == np.sign(d_lo):
            lo, d_lo = mid, d
        else:
            hi = mid
    return sign * 0.5 * (lo + hi)


def support_endpoints(branch_a: InverseBranch, branch_b: InverseBranch):
    """``(alpha, beta, zeta_minus, zeta_plus)`` from the real critical points of ``h``."""
    zp = _edge(branch_a, branch_b, 1.0)
    beta = h_eval(branch_a, branch_b, zp).real
    zm = _edge(branch_a, branch_b, -1.0)
    alpha = h_eval(branch_a, branch_b, zm).real
    if not alpha < beta:
        raise EndpointError(f"endpoints out of order: {alpha} >= {beta}")
    return alpha, beta, zm, zp


@dataclass
class Recovery:
    coeffs: np.ndarray
    condition: float
    residual: float
    max_imag: float


def recover_coefficients(pairs, m: int, cond_limit: float = COND_LIMIT) -> Recovery:
    """Least-squares fit of ``sum_k phi_k pi w^(k+1) = zeta`` for ``phi_0..phi_m``."""
    w = np.asarray([p[0] for p in pairs], dtype=complex)
    zeta = np.asarray([p[1] for p in pairs], dtype=complex)
    if len(w) < m + 1:
        raise RecoveryError(f"{len(w)} pairs cannot determine {m + 1} coefficients")
    if np.any(np.abs(w) >= 1):
        raise RecoveryError("sample points must lie inside the unit disc")
    A = math.pi * w[:, None] ** np.arange(1, m + 2)[None, :]
    sv = np.linalg.svd(A, compute_uv=False)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else math.inf
    if cond > cond_limit:
        raise RecoveryError(f"Vandermonde condition number {cond:.2e} exceeds {cond_limit:.0e}; "
                            "use fewer coefficients or a larger sampling radius")
    phi, *_ = np.linalg.lstsq(A, zeta, rcond=None)
    resid = float(np.max(np.abs(A @ phi - zeta)))
    max_imag = float(np.max(np.abs(phi.imag)))
    if max_imag > IMAG_TOL:
        raise RecoveryError(f"recovered coefficients have imaginary parts up to {max_imag:.2e}")
    return Recovery(phi.real.copy(), cond, resid, max_imag)


@dataclass
class ConvolutionResult:
    endpoints: tuple
    coeffs: np.ndarray
    measure: Measure
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = measure_to_dict(self.measure)
        out["diagnostics"] = {k: v for k, v in self.diagnostics.items()}
        return out

    def error_csv(self, reference_coeffs) -> str:
        ref = np.zeros(len(self.coeffs))
        n = min(len(ref), len(reference_coeffs))
        ref[:n] = np.asarray(reference_coeffs, dtype=float)[:n]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "phi", "reference", "abs_error"])
        for k, (a, b) in enumerate(zip(self.coeffs, ref)):
            writer.writerow([k, repr(float(a)), repr(float(b)), repr(float(abs(a - b)))])
        return buf.getvalue()


def _solve_h(ba, bb, target, guess, maxiter=30, tol=1e-14):
    """Newton for ``h(zeta) = target`` starting at ``guess``."""
    zeta = complex(guess)
    for _ in range(maxiter):
        h, dh = _h_and_deriv(ba, bb, zeta)
        step = (h - target) / dh
        zeta -= step
        if abs(step) < tol * max(1.0, abs(zeta)):
            break
    h = _h_and_deriv(ba, bb, zeta)[0]
    return zeta, abs(h - target)


def _disc_samples(ba, bb, interval, n, radius, zp):
    """Pairs on the circle ``|w| = radius`` in the output disc coordinate.

    Only the closed upper half is solved; the rest follows from conjugation.
    Continuation runs from ``w = radius`` (real, right of the support).
    """
    half = n // 2
    theta = 2 * np.pi * np.arange(half + 1) / n
    ws = radius * np.exp(1j * theta)
    targets = affine(interval, joukowski(ws))
    # start on the real axis: h decreases from +inf to beta on (0, zeta_plus)
    ba.reset()
    bb.reset()
    zeta = complex(min(1.0 / (targets[0].real - ba.mean - bb.mean), 0.5 * zp.real))
    ba.seed(zeta)
    bb.seed(zeta)
    zetas, resid = [], 0.0
    prev_target, prev_dh = None, None
    for tgt in targets:
        if prev_target is not None:
            zeta = zeta + (tgt - prev_target) / prev_dh
        zeta, res = _solve_h(ba, bb, tgt, zeta)
        resid = max(resid, res)
        prev_dh = _h_and_deriv(ba, bb, zeta)[1]
        prev_target = tgt
        zetas.append(zeta)
    zetas = np.array(zetas)
    zetas[0] = zetas[0].real
    if n % 2 == 0:
        zetas[-1] = zetas[-1].real
    full_w = np.concatenate([ws, np.conj(ws[1:half + (n % 2)])[::-1]])
    full_z = np.concatenate([zetas, np.conj(zetas[1:half + (n % 2)])[::-1]])
    return full_w, full_z, resid, targets


def _zeta_samples(ba, bb, interval, n, radius):
    """Pairs from a circle ``|zeta| = radius`` mapped through ``h``."""
    theta = 2 * np.pi * np.arange(n) / n
    zetas = radius * np.exp(1j * theta)
    ba.reset()
    bb.reset()
    ba.seed(zetas[0])
    bb.seed(zetas[0])
    z = np.array([h_eval(ba, bb, zt) for zt in zetas])
    ws = joukowski_inv_disc(affine_inv(interval, z), strict=False)
    return ws, zetas, 0.0, z


@dataclass
class SamplePairs:
    """Disc/transform pairs of the output measure, reusable for any ``m``."""

    endpoints: tuple
    zeta_minus: float
    zeta_plus: float
    w: np.ndarray
    zeta: np.ndarray
    sampling: str
    radius: float
    solve_residual: float


def sample_pairs(mu_a: Measure, mu_b: Measure, n_samples: int, sampling: str = "disc",
                 disc_radius: float = 0.9, zeta_radius: Optional[float] = None,
                 r: float = 0.95, K: int = 1000) -> SamplePairs:
    """Endpoints plus ``n_samples`` pairs ``(w_j, zeta_j)`` of the output transform.

    ``sampling="disc"`` places samples on ``|w| = disc_radius`` in the
    output's disc coordinate and solves ``h(zeta_j) = M(J(w_j))``;
    ``sampling="zeta"`` maps a circle ``|zeta| = zeta_radius`` through ``h``
    instead (radius default ``0.9 min(|zeta_-|, |zeta_+|)``). Operand
    inverses use charts of radius ``r`` with ``K`` nodes.
    """
    ba, bb = InverseBranch(mu_a, r, K), InverseBranch(mu_b, r, K)
    alpha, beta, zm, zp = support_endpoints(ba, bb)
    interval = (alpha, beta)
    if sampling == "disc":
        ws, zetas, solve_res, zs = _disc_samples(ba, bb, interval, n_samples, disc_radius, zp)
        radius = disc_radius
    elif sampling == "zeta":
        radius = zeta_radius or 0.9 * min(abs(zm), abs(zp))
        ws, zetas, solve_res, zs = _zeta_samples(ba, bb, interval, n_samples, radius)
    else:
        raise DomainError(f"unknown sampling mode {sampling!r}")
    _check_half_planes(zs, zetas[: len(zs)])
    return SamplePairs(interval, zm.real, zp.real, ws, zetas, sampling, radius, float(solve_res))


def convolution_from_pairs(pairs: SamplePairs, m: int,
                           cond_limit: float = COND_LIMIT) -> ConvolutionResult:
    """Recover ``phi_0..phi_m`` from precomputed pairs and validate the measure."""
    if len(pairs.w) < 2 * (m + 1):
        raise DomainError(f"need at least {2 * (m + 1)} samples for {m + 1} coefficients")
    rec = recover_coefficients(list(zip(pairs.w, pairs.zeta)), m, cond_limit)
    comp = ACComponent.chebyshev_u(pairs.endpoints, _trim_zero(rec.coeffs))
    measure = Measure((), (comp,))
    mass = comp.mass()
    probes = np.cos(np.pi * (np.arange(100) + 0.5) / 100)
    min_density = float(np.min(comp.density(comp.to_global(probes))))
    diagnostics = {"endpoints": list(pairs.endpoints), "zeta_minus": pairs.zeta_minus,
                   "zeta_plus": pairs.zeta_plus, "sampling": pairs.sampling,
                   "sampling_radius": pairs.radius, "n_samples": len(pairs.w), "m": int(m),
                   "condition": float(rec.condition), "fit_residual": rec.residual,
                   "solve_residual": pairs.solve_residual, "max_imag": rec.max_imag,
                   "mass": float(mass), "min_density": min_density}
    if abs(mass - 1) > 1e-8:
        raise RecoveryError(f"recovered mass {mass!r} differs from 1")
    if min_density < -1e-8:
        raise RecoveryError(f"recovered density is negative ({min_density:.2e})")
    return ConvolutionResult(tuple(pairs.endpoints), rec.coeffs, measure, diagnostics)


def free_convolve(mu_a: Measure, mu_b: Measure, m: int = 80, n_samples: Optional[int] = None,
                  sampling: str = "disc", disc_radius: float = 0.9,
                  zeta_radius: Optional[float] = None, r: float = 0.95, K: int = 1000,
                  cond_limit: float = COND_LIMIT) -> ConvolutionResult:
    """Free additive convolution of two measures with a square-root output.

    See :func:`sample_pairs` for the sampling options; ``n_samples`` defaults
    to ``4 (m + 1)`` and must be at least ``2 (m + 1)``.
    """
    n_samples = n_samples or 4 * (m + 1)
    if n_samples < 2 * (m + 1):
        raise DomainError(f"need at least {2 * (m + 1)} samples for {m + 1} coefficients")
    shifted = _translation(mu_a, mu_b, m)
    if shifted is not None:
        return shifted
    pairs = sample_pairs(mu_a, mu_b, n_samples, sampling, disc_radius, zeta_radius, r, K)
    return convolution_from_pairs(pairs, m, cond_limit)


def _translation(mu_a, mu_b, m):
    """Exact result when one operand is a unit atom and the other a U-series.

    Convolving with a point mass only translates, and the output edges then sit
    on the operand edges where no chart of radius below one can reach.
    """
    for atom_side, other in ((mu_a, mu_b), (mu_b, mu_a)):
        if len(atom_side.atoms) == 1 and not atom_side.components:
            break
    else:
        return None
    if other.atoms or len(other.components) != 1 or other.components[0].basis != "chebyshevU":
        return None
    s = atom_side.atoms[0].location
    measure = translate(other, s)
    comp = measure.components[0]
    coeffs = np.zeros(m + 1)
    n = min(m + 1, len(comp.coeffs))
    coeffs[:n] = np.asarray(comp.coeffs, dtype=float)[:n] / comp.Z
    diagnostics = {"endpoints": list(comp.interval), "method": "translation", "shift": s,
                   "m": int(m), "mass": float(comp.mass())}
    return ConvolutionResult(tuple(comp.interval), coeffs, measure, diagnostics)


def _trim_zero(phi):
    phi = np.asarray(phi, dtype=float)
    nz = np.nonzero(phi)[0]
    return phi[: nz[-1] + 1] if len(nz) else phi[:1]


def _check_half_planes(zs, zetas):
    """The identity holds only where ``h`` maps each half-plane to the opposite one."""
    zs, zetas = np.asarray(zs), np.asarray(zetas)
    scale = np.maximum(np.abs(zetas), 1e-300)
    off_axis = np.abs(zetas.imag) > 1e-10 * scale
    bad = off_axis & (np.sign(zs.imag) == np.sign(zetas.imag))
    if np.any(bad):
        raise RecoveryError(f"{int(bad.sum())} samples violate the half-plane condition; "
                            "the inverse identity does not hold there")
