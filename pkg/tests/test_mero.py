import cmath

import numpy as np
import numpy.testing as npt
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from cmc1.algebra import INF
from cmc1.mero import (
    ConstantInput,
    Differential,
    NonMeromorphicPoint,
    Poly,
    PowerProduct,
    RationalFn,
    frobenius_log_term,
    hopf_from_gauss_maps,
    integrate_power_product,
    laurent_expand,
    order_at,
    residue_at,
    schwarzian,
)

mus = st.floats(-0.95, -0.05)


class TestPoly:
    def test_trailing_zeros_stripped(self):
        assert Poly([1, 2, 0, 0]).degree == 1
        assert Poly([0, 0]).is_zero()
        assert Poly([]).coeff_list() == []

    def test_roots_with_multiplicity(self):
        p = Poly.from_roots([(1.0, 2), (-2.0, 1)])
        roots = sorted(p.roots(), key=lambda rm: rm[0].real)
        npt.assert_allclose([r for r, _ in roots], [-2, 1], atol=1e-9)
        assert [m for _, m in roots] == [1, 2]


class TestRational:
    def test_common_factor_cancelled(self):
        f = RationalFn(Poly.from_roots([1, 2]), Poly.from_roots([1, 3]))
        assert f.den.degree == 1
        npt.assert_allclose(f(0.5), (0.5 - 2) / (0.5 - 3))

    def test_denominator_monic(self):
        f = RationalFn(Poly([1.0]), Poly([2.0, 4.0]))
        npt.assert_allclose(f.den.lead, 1.0)

    @given(st.floats(-2, 2), st.floats(-2, 2))
    def test_derivative_matches_finite_difference(self, x, y):
        f = RationalFn(Poly([1, -2, 0.5]), Poly.from_roots([(0.3, 2), (-1.1, 1)]))
        z = complex(x, y)
        if min(abs(z - 0.3), abs(z + 1.1)) < 0.2:
            return
        h = 1e-5
        fd = (f(z + h) - f(z - h)) / (2 * h)
        npt.assert_allclose(f.deriv()(z), fd, rtol=1e-6)


class TestOrders:
    def test_double_pole_order(self):
        assert order_at(Differential(2, RationalFn(Poly([1]), Poly([0, 0, 1]))), 0) == -2

    def test_trinoid_q_at_infinity(self):
        c1, c2, c3 = 0.375, 0.375, 0.375
        Q = Differential(2, RationalFn(Poly([c1, c2 - c1 - c3, c3]) * 0.5, Poly([0, 0, 1, -2, 1])))
        assert order_at(Q, INF) == -2

    def test_constant_has_order_zero(self):
        assert order_at(RationalFn.const(3.0), 1.7) == 0


class TestResidues:
    def test_simple_pole(self):
        npt.assert_allclose(residue_at(RationalFn(Poly([1]), Poly([0, 1])), 0), 1.0)

    @given(mus)
    def test_o2m4_residues_vanish(self, mu):
        a2 = (mu + 1) / (mu - 1)
        dg = PowerProduct.make(1.0, [(0j, mu)], RationalFn(Poly([-a2, 0, 1]), Poly.from_roots([(1, 2), (-1, 2)])))
        assert abs(residue_at(dg, 1.0)) < 1e-10
        assert abs(residue_at(dg, -1.0)) < 1e-10

    def test_non_integer_exponent_rejected(self):
        dg = PowerProduct.make(1.0, [(0j, -0.5)])
        with pytest.raises(NonMeromorphicPoint):
            residue_at(dg, 0.0)

    @given(st.floats(-0.9, -0.1), st.integers(2, 5))
    def test_o122_residue_at_a_vanishes(self, mu, m):
        a = -(m + mu + 2) / (m - mu - 2)
        p = (a * mu + a - a * a) / (a * mu + a - 1)
        dg = PowerProduct.make(1.0, [(1 + 0j, mu), (complex(p), -mu - 2)], RationalFn(Poly([0, 1]), Poly.from_roots([(a, 2)])))
        r0 = abs(residue_at(dg, a))
        assert r0 < 1e-9
        # a different p breaks it
        dg2 = PowerProduct.make(1.0, [(1 + 0j, mu), (complex(p + 0.3), -mu - 2)], RationalFn(Poly([0, 1]), Poly.from_roots([(a, 2)])))
        assert abs(residue_at(dg2, a)) > 100 * max(r0, 1e-13)


class TestSchwarzian:
    def test_mobius_annihilated(self):
        h = RationalFn(Poly([1, 2]), Poly([3, 1]))
        S = schwarzian(h).coefficient
        assert abs(S(0.7 + 0.2j)) < 1e-12

    def test_constant_rejected(self):
        with pytest.raises(ConstantInput):
            schwarzian(RationalFn.const(2.0))

    @given(st.floats(0.1, 3.0).filter(lambda l: abs(l - 1) > 1e-3))
    def test_power_against_symbolic_oracle(self, l):
        z, k = sp.symbols("z k")
        h = z**k
        u = sp.diff(h, z, 2) / sp.diff(h, z)
        S_sym = sp.lambdify((z, k), sp.simplify(sp.diff(u, z) - u**2 / 2))
        S = schwarzian(PowerProduct.make(1.0, [(0j, l)])).coefficient
        for w in (0.4 + 0.1j, -1.2 + 0.8j):
            npt.assert_allclose(S(w), S_sym(w, l), rtol=1e-9)
            npt.assert_allclose(S(w), (1 - l * l) / (2 * w * w), rtol=1e-12)

    def test_equal_maps_give_zero(self):
        g = RationalFn(Poly([0, 0, 1]), Poly([1, 1]))
        Q = hopf_from_gauss_maps(g, g)
        assert abs(Q.coefficient(0.3 + 0.4j)) < 1e-12

    @given(st.floats(0.1, 2.5).filter(lambda l: abs(l - round(l)) > 1e-3), st.integers(1, 3))
    def test_catenoid_pair(self, l, delta):
        g = PowerProduct.make((delta**2 - l * l) / (4 * l), [(0j, l)])
        G = RationalFn(Poly([0] * delta + [1]))
        Q = hopf_from_gauss_maps(g, G).coefficient
        for w in (0.5 + 0.5j, 2.0 - 1j):
            npt.assert_allclose(Q(w), (delta**2 - l * l) / (4 * w * w), rtol=1e-10)


class TestLaurent:
    def test_geometric_series(self):
        f = RationalFn(Poly([1]), Poly([0, -1, 1]))
        s = laurent_expand(f, 0, 5)
        for k, v in ((-1, -1), (0, -1), (1, -1), (2, -1)):
            npt.assert_allclose(s.coeff(k), v, atol=1e-12)

    def test_trinoid_leading_coefficient(self):
        c1, c2, c3 = 0.375, 0.2, -0.1
        Qc = RationalFn(Poly([c1, c2 - c1 - c3, c3]) * 0.5, Poly([0, 0, 1, -2, 1]))
        s = laurent_expand(Qc, 0, 3)
        npt.assert_allclose(s.coeff(-2), c1 / 2, atol=1e-12)

    def test_entire_function(self):
        f = RationalFn(Poly([1, 2, 3]))
        s = laurent_expand(f, 0.5, 3)
        assert s.normalized().k0 >= 0
        assert s.coeff(-1) == 0 and s.coeff(-2) == 0
        npt.assert_allclose(s.coeff(0), f(0.5))
        npt.assert_allclose(s.coeff(1), f.deriv()(0.5))


class TestIntegratePowerProduct:
    @given(st.floats(-0.95, -0.05), st.integers(2, 4))
    def test_derivative_round_trip(self, mu, m):
        a = -(m + mu + 2) / (m - mu - 2)
        p = (a * mu + a - a * a) / (a * mu + a - 1)
        dg = PowerProduct.make(1.0, [(1 + 0j, mu), (complex(p), -mu - 2)], RationalFn(Poly([0, 1]), Poly.from_roots([(a, 2)])))
        g = integrate_power_product(dg)
        gd = g.deriv()
        for w in (0.31 + 0.7j, -0.4 + 0.2j):
            npt.assert_allclose(gd(w), dg(w), rtol=1e-8)


class TestFrobenius:
    @given(mus)
    def test_a14_log_term(self, mu):
        from cmc1.verify import a14_frobenius_obstruction, a14_roots

        res = a14_frobenius_obstruction(mu, *a14_roots(mu))
        npt.assert_allclose(res, -(mu + 2) / 3, rtol=1e-8)

    def test_regular_point_has_no_log(self):
        omega = Differential(1, RationalFn.const(1.0))
        Q = Differential(2, RationalFn(Poly([0.25]), Poly([0, 0, 1])))
        res = frobenius_log_term(omega, Q, 1.0)
        assert not res.resonant or abs(res.log_coefficient) < 1e-12
