import warnings

import numpy as np
import pytest

from stieltjes.contour import (HankelPencil, cluster_roots, estimate_root_count,
                               find_roots_unit_disc, hankel_pencil, moments, pencil_roots, refine,
                               sample_winding)
from stieltjes.errors import InconsistencyError, RootFindingError


def residue_moments(roots, count):
    """``(1/2 pi i) oint z^n / prod (z - r_k) dz`` for simple roots, by residues."""
    roots = np.asarray(roots, dtype=complex)
    out = np.zeros(count, dtype=complex)
    for k, r in enumerate(roots):
        out += r ** np.arange(count) / np.prod(r - np.delete(roots, k))
    return out


def poly(roots):
    coeffs = np.poly(roots)
    return lambda z: np.polyval(coeffs, z)


def sorted_c(values):
    return np.array(sorted(np.asarray(values, dtype=complex), key=lambda z: (z.real, z.imag)))


# -- moments ---------------------------------------------------------------

def test_single_root_moments():
    m = moments(lambda z: z - 0.3, 64, 2)
    assert np.allclose(m.values, [1, 0.3, 0.09, 0.027], atol=1e-14)
    assert m.winding == 1


def test_two_root_moments_match_residues():
    roots = [0.2, 0.5j]
    m = moments(poly(roots), 128, 2)
    assert np.allclose(m.values, residue_moments(roots, 4), atol=1e-13)


def test_double_root_moments():
    # z^n / z^2 has residue 1 only for n = 1
    m = moments(lambda z: z**2, 64, 2)
    assert np.allclose(m.values, [0, 1, 0, 0], atol=1e-14)
    assert m.winding == 2


def test_exterior_pole_only():
    m = moments(lambda z: 1 / (z - 2), 64, 3)
    assert np.allclose(m.values, 0, atol=1e-14)
    assert estimate_root_count(hankel_pencil(m)) == 0
    assert m.winding == 0


def test_moment_errors():
    with pytest.raises(RootFindingError):
        moments(lambda z: z - 1, 64, 2)
    with pytest.raises(RootFindingError):
        moments(lambda z: z - 0.3, 8, 5)
    with pytest.raises(RootFindingError):
        moments(lambda z: z * np.nan, 16, 2)


# -- pencil ----------------------------------------------------------------

def test_hankel_structure():
    a = 0.7
    p = hankel_pencil(np.array([1, a, a**2, a**3]))
    assert np.allclose(p.H0, [[1, a], [a, a**2]])
    assert np.allclose(p.H1, [[a, a**2], [a**2, a**3]])


def test_single_root_eigenvalue():
    p = hankel_pencil(np.array([1.0, 0.4]))
    assert np.allclose(pencil_roots(p, 1), [0.4])


def test_exact_moments_two_roots():
    roots = [0.2, 0.5j]
    p = hankel_pencil(residue_moments(roots, 4))
    assert estimate_root_count(p) == 2
    assert np.allclose(sorted_c(pencil_roots(p, 2)), sorted_c(roots), atol=1e-12)


def test_rank_with_spare_rows():
    roots = [0.2, 0.5j]
    p = hankel_pencil(residue_moments(roots, 8))
    assert estimate_root_count(p) == 2
    assert estimate_root_count(hankel_pencil(residue_moments([0.1], 2))) == 1


def test_zero_rank_returns_nothing():
    assert pencil_roots(HankelPencil(np.zeros((2, 2)), np.zeros((2, 2))), 0).size == 0


def test_rank_exceeding_size():
    with pytest.raises(RootFindingError):
        pencil_roots(hankel_pencil(np.ones(4)), 3)


def test_ill_conditioned_compression_warns():
    p = HankelPencil(np.diag([1.0, 1e-14]), np.diag([0.5, 0.3e-14]))
    diag = []
    pencil_roots(p, 2, diag)
    assert diag and "ill-conditioned" in diag[0]
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        pencil_roots(p, 2)
    assert rec


# -- refine and clustering -------------------------------------------------

def test_refine_examples():
    z, res, flag = refine(lambda z: z**2 - 0.25, 0.49)
    assert abs(z - 0.5) < 1e-14 and not flag
    z, _, _ = refine(lambda z: z - 0.3 + 1e-9, 0.3, fprime=lambda z: np.ones_like(z))
    assert abs(z - (0.3 - 1e-9)) < 1e-16


def test_refine_leaving_disc_is_flagged():
    z, _, flag = refine(lambda z: z - 3.0, 0.9)
    assert flag and z == 0.9


def test_cluster_merges_close_points():
    clusters = cluster_roots([0.4, 0.4 + 1e-8, -0.2])
    assert sorted(c.multiplicity for c in clusters) == [1, 2]


# -- full solver -----------------------------------------------------------

def test_cube_roots():
    found = find_roots_unit_disc(lambda z: z**3 - 0.1, 64, 4)
    ref = 0.1 ** (1 / 3) * np.exp(2j * np.pi * np.arange(3) / 3)
    assert all(c.multiplicity == 1 for c in found)
    assert np.allclose(sorted_c([c.center for c in found]), sorted_c(ref), atol=1e-13)


def test_sine_with_zeros_on_circle_is_rejected():
    # sin(pi z) vanishes at z = +-1, which lie on the contour
    with pytest.raises(RootFindingError):
        find_roots_unit_disc(lambda z: np.sin(np.pi * z), 64, 4)


def test_sine_inside():
    found = find_roots_unit_disc(lambda z: np.sin(0.9 * np.pi * z), 64, 4)
    assert len(found) == 1 and abs(found[0].center) < 1e-14


def test_double_root_cluster():
    found = find_roots_unit_disc(lambda z: (z - 0.4) ** 2, 64, 4)
    assert len(found) == 1
    assert found[0].multiplicity == 2
    assert abs(found[0].center - 0.4) < 1e-6


def test_roots_outside_are_dropped():
    found = find_roots_unit_disc(poly([0.5, 1.5, -3.0]), 128, 4)
    assert [c.multiplicity for c in found] == [1]
    assert abs(found[0].center - 0.5) < 1e-13


def test_inconsistent_count_raises():
    # three roots but only two pencil rows: the compression cannot hold them
    f = poly([0.1, -0.5, 0.3j])
    with pytest.raises((InconsistencyError, RootFindingError)):
        find_roots_unit_disc(f, 64, 1)


def test_geometric_convergence():
    """Error shrinks geometrically in K for a function with a pole at radius 1.25."""
    roots = np.array([0.3 + 0.2j, -0.4, 0.1 - 0.5j])

    def f(z):
        return np.polyval(np.poly(roots), z) / (z - 1.25)

    errs = []
    for K in (16, 24, 32, 40, 48, 56, 64):
        found = find_roots_unit_disc(f, K, 4, do_refine=False, check_count=False)
        got = sorted_c([c.center for c in found])
        errs.append(np.max(np.abs(got - sorted_c(roots))) if len(got) == 3 else np.inf)
    for a, b in zip(errs, errs[1:]):
        assert b < a or b < 1e-12


def test_doubling_invariance():
    f = poly([0.3 + 0.2j, -0.4, 0.1 - 0.5j, 0.6])
    a = sorted_c([c.center for c in find_roots_unit_disc(f, 64, 6)])
    b = sorted_c([c.center for c in find_roots_unit_disc(f, 128, 6)])
    assert np.allclose(a, b, atol=1e-10)


def test_winding_guard():
    assert sample_winding(np.exp(2j * np.pi * np.arange(64) / 64)) == 1
    assert sample_winding(np.exp(2j * np.pi * np.arange(3) / 3)) is None


def test_info_reports_rank():
    info = {}
    find_roots_unit_disc(poly([0.2, -0.3]), 64, 4, info=info)
    assert info["rank"] == 2 and info["winding"] == 2
