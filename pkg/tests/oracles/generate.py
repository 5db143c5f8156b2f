"""Regenerate the frozen reference values in ``tests/oracle_values.py``.

Every value comes from mpmath quadrature of the defining integrals at 30
digits, independent of the package's own evaluation paths. Run with
``python3 tests/oracles/generate.py > tests/oracle_values.py``.
"""
import mpmath as mp

mp.mp.dps = 30


def bimodal_density(x):
    return mp.mpf(5) / 16 * (1 + 14 * x**2) * (1 - x**2) ** 2


def cauchy(density, a, b, z, breaks=()):
    pts = [a] + sorted(p for p in breaks if a < p < b) + [b]
    return mp.quad(lambda x: density(x) / (z - x), pts)


def _left_integral(g, breaks=()):
    """Integral of ``(x + 3)^(-1/3) (-1 - x)^(-2/3) g(x)`` over [-3, -1].

    The endpoint singularities are removed with ``x = -3 + u^3`` on [-3, -2]
    and ``x = -1 - v^3`` on [-2, -1]; breakpoints are mapped accordingly.
    """
    third = mp.mpf(1) / 3
    ub = [0] + sorted(mp.cbrt(p + 3) for p in breaks if -3 < p < -2) + [1]
    vb = [0] + sorted(mp.cbrt(-1 - p) for p in breaks if -2 < p < -1) + [1]
    a = mp.quad(lambda u: 3 * u * (2 - u**3) ** (-2 * third) * g(-3 + u**3), ub)
    b = mp.quad(lambda v: 3 * (2 - v**3) ** (-third) * g(-1 - v**3), vb)
    return a + b


def _right_integral(g, breaks=()):
    """Integral of ``sqrt((x - 1)(3 - x)) g(x)`` over [1, 3] with ``x = 2 + cos t``."""
    tb = [0] + sorted(mp.acos(p - 2) for p in breaks if 1 < p < 3) + [mp.pi]
    return mp.quad(lambda t: mp.sin(t) ** 2 * g(2 + mp.cos(t)), tb)


def two_cut_G(z):
    br = [mp.re(z)]
    z1 = _left_integral(lambda x: 1)
    z2 = _right_integral(lambda x: 2 + mp.sin(x))
    left = _left_integral(lambda x: 1 / (z - x), br) / (2 * z1)
    right = _right_integral(lambda x: (2 + mp.sin(x)) / (z - x), br) / (2 * z2)
    return left + right


def bimodal_G(z):
    return cauchy(bimodal_density, -1, 1, z, [mp.re(z)])


def fmt(v):
    v = mp.mpc(v)
    return f"complex({mp.nstr(v.real, 20)}, {mp.nstr(v.imag, 20)})"


def main():
    print('"""Frozen reference values produced by tests/oracles/generate.py (mpmath, 30 digits)."""')
    pts = [0.3 + 0.5j, 2 + 0.1j, 0.99 + 1e-4j, 1.00001, 5j, -0.2 - 0.05j]
    print("BIMODAL_G = {")
    for z in pts:
        print(f"    {z!r}: {fmt(bimodal_G(mp.mpc(z)))},")
    print("}")
    pts = [0.1 + 0.2j, -2 + 0.01j, 2 + 0.001j, 0.5, -0.5 + 0.65j, 4 - 1j]
    print("TWO_CUT_G = {")
    for z in pts:
        print(f"    {z!r}: {fmt(two_cut_G(mp.mpc(z)))},")
    print("}")
    # inverses located by mpmath's secant solver from coarse starting guesses
    starts = {0.1 + 1.6j: [-0.27 - 0.09j, 0.32 - 0.15j], -0.3 - 1.5j: [-0.38 + 0.24j, 0.22 + 0.04j],
              -2 + 0.5j: [-0.9 - 0.02j], 0.2 + 0.4j: [1.06 - 1.89j]}
    print("BIMODAL_INVERSES = {")
    for zeta, guesses in starts.items():
        roots = [mp.findroot(lambda z: bimodal_G(z) - zeta, mp.mpc(g)) for g in guesses]
        print(f"    {zeta!r}: [{', '.join(fmt(r) for r in roots)}],")
    print("}")
    starts = {-0.5 + 0.65j: [-2.92 - 0.006j, -1.447 - 0.022j, 1.26 - 0.074j], 1.2: [-0.85 + 0j]}
    print("TWO_CUT_INVERSES = {")
    for zeta, guesses in starts.items():
        roots = [mp.findroot(lambda z: two_cut_G(z) - zeta, mp.mpc(g)) for g in guesses]
        print(f"    {zeta!r}: [{', '.join(fmt(r) for r in roots)}],")
    print("}")


if __name__ == "__main__":
    main()
