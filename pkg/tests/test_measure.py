import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from stieltjes import catalog
from stieltjes.errors import DomainError, ValidationError
from stieltjes.measure import (ACComponent, Atom, Measure, check, density_eval,
                               expand_component, jacobi_recurrence, measure_from_dict,
                               measure_to_dict, mp_measure, point_measure, support_gaps,
                               support_hull, translate, validate)


def codes(measure):
    return [v.code for v in validate(measure)]


# -- validation ------------------------------------------------------------

def test_single_atom_is_valid():
    assert validate(point_measure([0.0])) == []


def test_duplicate_atoms_reported():
    m = Measure((Atom(0.0, 0.5), Atom(0.0, 0.5)), ())
    assert "duplicate-location" in codes(m)


def test_half_mass_semicircle_reported():
    comp = ACComponent.chebyshev_u((-2, 2), [1 / math.pi], Z=2.0)
    assert codes(Measure((), (comp,))) == ["mass"]


@pytest.mark.parametrize("measure, code", [
    (Measure((), ()), "empty-measure"),
    (Measure((Atom(0.0, -1.0), Atom(1.0, 2.0)), ()), "nonpositive-weight"),
    (Measure((Atom(math.nan, 1.0),), ()), "nonfinite-atom"),
    (Measure((), (ACComponent.chebyshev_u((1, -1), [1.0]),)), "bad-interval"),
    (Measure((), (ACComponent.chebyshev_u((-1, 1), [1.0, 0.0]),)), "zero-last-coeff"),
    (Measure((), (ACComponent.chebyshev_u((-1, 1), []),)), "empty-coeffs"),
    (Measure((), (ACComponent.chebyshev_u((-1, 1), [math.inf]),)), "nonfinite-coeffs"),
    (Measure((), (ACComponent.chebyshev_u((-1, 1), [1.0], Z=0.0),)), "nonpositive-normalization"),
    (Measure((), (ACComponent((-1, 1), -1.5, 0.0, "generalOP", (1.0,), recurrence=((0, 1, 1),)),)),
     "bad-exponents"),
    (Measure((), (ACComponent((-1, 1), 0.0, 0.0, "legendre", (1.0,)),)), "unknown-basis"),
    (Measure((), (ACComponent((-1, 1), 0.0, 0.0, "generalOP", (1.0,)),)), "missing-recurrence"),
    (Measure((), (ACComponent((-1, 1), 0.0, 0.0, "chebyshevU", (1.0,)),)), "basis-exponents"),
])
def test_violation_codes(measure, code):
    assert code in codes(measure)


def test_overlap_and_atom_inside():
    u = ACComponent.jacobi((-1, 1), 0, 0, [0.25])
    v = ACComponent.jacobi((0, 2), 0, 0, [0.25])
    assert "overlapping-components" in codes(Measure((), (u, v)))
    assert "atom-in-component" in codes(Measure((Atom(0.0, 0.5),), (u,)))


def test_check_raises_with_violations():
    with pytest.raises(ValidationError) as exc:
        check(Measure((Atom(0.0, 0.5), Atom(0.0, 0.5)), ()))
    assert [v.code for v in exc.value.violations] == ["duplicate-location"]


@pytest.mark.parametrize("measure", [
    catalog.semicircle(), catalog.uniform(), catalog.arcsine(), catalog.bimodal_jacobi(),
    catalog.two_cut(), mp_measure(0.5), mp_measure(1.0), mp_measure(4.0), *catalog.jacobi_pair(),
])
def test_catalog_measures_are_probability_measures(measure):
    assert validate(measure) == []
    assert abs(measure.total_mass() - 1) < 1e-10


# -- densities and support -------------------------------------------------

def test_semicircle_density_at_zero():
    assert density_eval(catalog.semicircle(), 0.0) == pytest.approx(1 / math.pi, rel=1e-14)


def test_semicircle_density_closed_form():
    xs = np.linspace(-1.99, 1.99, 41)
    got = catalog.semicircle().components[0].density(xs)
    assert np.allclose(got, np.sqrt(4 - xs**2) / (2 * math.pi), rtol=1e-13)


def test_bimodal_density_at_zero(bimodal):
    assert density_eval(bimodal, 0.0) == pytest.approx(0.3125, rel=1e-13)


def test_bimodal_density_closed_form(bimodal):
    xs = np.linspace(-0.99, 0.99, 37)
    ref = 5 / 16 * (1 + 14 * xs**2) * (1 - xs**2) ** 2
    assert np.allclose(bimodal.components[0].density(xs), ref, rtol=1e-13, atol=1e-15)


def test_density_outside_support_is_zero(two_cut):
    assert density_eval(two_cut, 0.0) == 0.0
    assert density_eval(two_cut, 7.0) == 0.0


def test_density_at_atom_raises():
    with pytest.raises(DomainError):
        density_eval(mp_measure(0.5), 0.0)


def test_two_cut_support(two_cut):
    assert support_hull(two_cut) == (-3.0, 3.0)
    assert support_gaps(two_cut) == [(-1.0, 1.0)]


def test_single_interval_has_no_gaps():
    assert support_gaps(catalog.uniform()) == []


def test_atoms_and_component_gaps():
    m = Measure((Atom(0.0, 0.25), Atom(2.0, 0.25)),
                (ACComponent.jacobi((3, 4), 0, 0, [1.0]).normalized(0.5),))
    assert support_hull(m) == (0.0, 4.0)
    assert support_gaps(m) == [(0.0, 2.0), (2.0, 3.0)]


def test_two_cut_component_mass_split(two_cut):
    left, right = two_cut.components
    assert left.mass() == pytest.approx(0.5, abs=1e-14)
    assert right.mass() == pytest.approx(0.5, abs=1e-14)


def test_two_cut_density_matches_definition(two_cut):
    right = two_cut.components[1]
    xs = np.linspace(1.01, 2.99, 23)
    raw = np.sqrt((xs - 1) * (3 - xs)) * (2 + np.sin(xs))
    z2 = quad(lambda x: 2 + math.sin(x), 1, 3, weight="alg", wvar=(0.5, 0.5))[0]
    assert np.allclose(right.density(xs), raw / (2 * z2), rtol=1e-12)


# -- Jacobi recurrence -----------------------------------------------------

@pytest.mark.parametrize("alpha, beta", [(0.0, 0.0), (2.0, 2.0), (-2 / 3, -1 / 3), (0.5, -0.5)])
def test_jacobi_recurrence_is_orthonormal(alpha, beta):
    """Gram matrix of the recurrence polynomials under adaptive quadrature is the identity."""
    n = 6
    a, b, c = jacobi_recurrence(alpha, beta, n).T

    def polys(t):
        p = [1.0, (t - a[0]) / b[0]]
        for k in range(1, n - 1):
            p.append(((t - a[k]) * p[k] - c[k - 1] * p[k - 1]) / b[k])
        return p

    mu0 = quad(lambda t: 1.0, -1, 1, weight="alg", wvar=(beta, alpha))[0]
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            gram[i, j] = quad(lambda t: polys(t)[i] * polys(t)[j], -1, 1,
                              weight="alg", wvar=(beta, alpha), limit=200)[0] / mu0
    assert np.allclose(gram, np.eye(n), atol=1e-10)


# -- expansion -------------------------------------------------------------

def test_expand_reproduces_polynomial_factor():
    comp = expand_component((-1, 1), 2.0, 2.0, lambda x: 1 + x + x**3, 5, n_quad=16,
                            rtol=1e-14)
    t = np.linspace(-1, 1, 11)
    assert np.allclose(comp.series(t), 1 + t + t**3, atol=1e-14)
    assert len(comp.coeffs) == 4


def test_expand_chebyshev_u_of_constant():
    comp = expand_component((-2, 2), 0.5, 0.5, lambda x: np.ones_like(x), 4, mass=1.0, rtol=1e-15)
    assert comp.basis == "chebyshevU"
    assert np.allclose(comp.phi / comp.Z, [1 / math.pi], atol=1e-15)


# -- Marchenko-Pastur ------------------------------------------------------

def test_mp4_leading_coefficients():
    phi = mp_measure(4.0).components[0].phi
    assert phi[0] == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert phi[1] == pytest.approx(-1 / (4 * math.pi), rel=1e-15)


def test_mp_half_has_atom():
    m = mp_measure(0.5)
    assert m.atoms == (Atom(0.0, 0.5),)


def test_mp_support():
    a, b = mp_measure(2.5).components[0].interval
    assert a == pytest.approx(0.33772, abs=1e-5)
    assert b == pytest.approx(6.66228, abs=1e-5)


@pytest.mark.parametrize("c", [0.3, 0.5, 2.0, 2.5, 4.0])
def test_mp_recurrence_invariant(c):
    phi = mp_measure(c).components[0].phi
    k = np.arange(2, min(len(phi), 30))
    lhs = phi[k]
    rhs = -((1 + c) / math.sqrt(c)) * phi[k - 1] - phi[k - 2]
    assert np.allclose(lhs, rhs, atol=1e-15 * (1 + c))


@pytest.mark.parametrize("c", [0.25, 0.5, 0.8])
def test_mp_small_c_coefficients_match_quadrature(c):
    """Chebyshev-U projection of the continuous part, computed by adaptive quadrature."""
    lo, hi = (1 - math.sqrt(c)) ** 2, (1 + math.sqrt(c)) ** 2
    half = 0.5 * (hi - lo)

    def rho(x):
        return math.sqrt(max((x - lo) * (hi - x), 0.0)) / (2 * math.pi * x)

    comp = mp_measure(c).components[0]
    for k in range(6):
        # phi_k = (2/pi) int rho(x(t)) / sqrt(1 - t^2) U_k(t) dt in the local variable
        val = quad(lambda th: rho(lo + half * (1 + math.cos(th))) * math.sin((k + 1) * th),
                   0, math.pi, epsabs=1e-14, epsrel=1e-12, limit=200)[0] * 2 / math.pi
        assert comp.phi[k] / comp.Z == pytest.approx(val, abs=1e-12)


def test_mp_one_has_inverse_sqrt_edge():
    comp = mp_measure(1.0).components[0]
    xs = np.array([0.01, 1.0, 3.9])
    ref = np.sqrt((4 - xs) * xs) / (2 * math.pi * xs)
    assert np.allclose(comp.density(xs), ref, rtol=1e-13)


def test_mp_rejects_nonpositive():
    with pytest.raises(DomainError):
        mp_measure(0.0)


# -- JSON ------------------------------------------------------------------

@pytest.mark.parametrize("measure", [catalog.two_cut(), mp_measure(0.5), point_measure([0, 1])])
def test_json_round_trip(measure):
    text = json.dumps(measure_to_dict(measure))
    back = measure_from_dict(json.loads(text))
    assert back == measure


def test_json_jacobi_shorthand_and_builtin():
    m = measure_from_dict({"components": [{"interval": [-1, 1], "alpha": 0, "beta": 0,
                                           "basis": "generalOP", "recurrence": "jacobi",
                                           "coeffs": [0.5]}]})
    assert validate(m) == []
    assert measure_from_dict({"builtin": "marchenko_pastur", "c": 4}) == mp_measure(4.0)


def test_json_malformed():
    with pytest.raises(ValidationError):
        measure_from_dict({"components": [{"coeffs": [1]}]})


def test_translate_moves_support_and_mean():
    m = mp_measure(0.5)
    moved = translate(m, 1.25)
    assert moved.atoms[0].location == pytest.approx(1.25)
    assert moved.components[0].interval == pytest.approx(np.array(m.components[0].interval) + 1.25)
    assert moved.first_moment() == pytest.approx(m.first_moment() + 1.25, abs=1e-13)
    assert moved.total_mass() == pytest.approx(1, abs=1e-12)


def test_first_moment_examples():
    assert mp_measure(2.0).first_moment() == pytest.approx(2.0, abs=1e-13)
    assert catalog.semicircle().first_moment() == pytest.approx(0.0, abs=1e-15)
    assert point_measure([0, 3], [0.25, 0.75]).first_moment() == pytest.approx(2.25)
