import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmc1 import catalog
from cmc1.algebra import INF
from cmc1.errors import ValidationError
from cmc1.geometry import (
    FOUR_PI,
    IrregularEnd,
    branch_orders,
    curvature_report,
    flux,
    flux_balance,
    flux_quadrature,
    inequality_report,
    numeric_spherical_area,
    single_end_flags,
)
from cmc1.mero import Poly, RationalFn


def _checks(report):
    return {c.name: c for c in inequality_report(report)}


class TestEnds:
    @pytest.mark.parametrize("l", [0.3, 0.8, 2.0])
    def test_catenoid(self, l):
        for e in branch_orders(catalog.catenoid_cousin(l)):
            assert e.d == -2
            npt.assert_allclose([e.mu, e.mu_sharp], [l - 1, 0.0], atol=1e-12)
            assert e.regular and e.embedded

    def test_trinoid_dual_orders(self):
        ends = branch_orders(catalog.trinoid(-0.7, -0.5, -0.3))
        npt.assert_allclose([e.mu for e in ends], [-0.7, -0.5, -0.3], atol=1e-12)
        npt.assert_allclose([e.mu_sharp for e in ends], 0.0, atol=1e-12)

    def test_enneper_end_irregular(self):
        (e,) = branch_orders(catalog.enneper_cousin())
        assert e.d == -4 and not e.regular and math.isinf(e.mu_sharp)

    def test_end_record_json(self):
        js = branch_orders(catalog.enneper_cousin())[0].to_json()
        assert js["mu_sharp"] == "inf" and js["point"] == "inf"


class TestTotalCurvature:
    def test_horosphere(self):
        r = curvature_report(catalog.horosphere())
        assert r.ta == 0.0 and r.ta_dual == 0.0

    def test_enneper(self):
        r = curvature_report(catalog.enneper_cousin())
        npt.assert_allclose(r.ta, FOUR_PI)
        assert math.isinf(r.ta_dual)
        assert r.to_json()["ta_dual"]["value"] == "inf"

    @pytest.mark.parametrize("l", [0.3, 0.8, 1.7])
    def test_catenoid(self, l):
        r = curvature_report(catalog.catenoid_cousin(l))
        npt.assert_allclose(r.ta, FOUR_PI * l, rtol=1e-12)
        npt.assert_allclose(r.ta_dual, FOUR_PI, rtol=1e-12)

    def test_catenoid_integer_l_uses_degree(self):
        r = curvature_report(catalog.catenoid_cousin(2.0, 1, 0.5))
        npt.assert_allclose([r.ta, r.ta_degree], FOUR_PI * 2)

    @pytest.mark.parametrize("mus", [(-0.5, -0.5, -0.5), (-0.7, -0.5, -0.3)])
    def test_trinoid(self, mus):
        r = curvature_report(catalog.trinoid(*mus))
        npt.assert_allclose(r.ta, 2 * math.pi * (4 + sum(mus)), rtol=1e-12)
        npt.assert_allclose(r.ta, r.ta_gauss_bonnet, rtol=1e-12)
        npt.assert_allclose(r.ta_dual, 2 * FOUR_PI)
        assert [xi for _, xi in r.umbilics] == [1, 1]

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-0.66, -0.01))
    def test_equal_mu_trinoid_above_4pi(self, mu):
        r = curvature_report(catalog.trinoid(mu, mu, mu))
        assert r.ta > FOUR_PI
        npt.assert_allclose(r.ta, 2 * math.pi * (4 + 3 * mu), rtol=1e-12)

    def test_equal_mu_limit(self):
        r = curvature_report(catalog.trinoid(-2 / 3 + 1e-9, -2 / 3 + 1e-9, -2 / 3 + 1e-9))
        npt.assert_allclose(r.ta, FOUR_PI, rtol=1e-8)


class TestSphericalArea:
    def test_identity_map(self):
        npt.assert_allclose(numeric_spherical_area(RationalFn(Poly([0, 1]))), FOUR_PI, rtol=1e-4)

    def test_degree_three(self):
        h = RationalFn(Poly([0.2, 0, 0, 1]), Poly([1, 0.5]))
        npt.assert_allclose(numeric_spherical_area(h), 3 * FOUR_PI, rtol=1e-3)

    def test_trinoid_hyperbolic_gauss_map(self):
        G = catalog.trinoid(-0.5, -0.5, -0.5).gauss.G
        npt.assert_allclose(numeric_spherical_area(G), 2 * FOUR_PI, rtol=1e-2)


class TestFlux:
    @pytest.mark.parametrize("data", [catalog.catenoid_cousin(0.8), catalog.trinoid(-0.7, -0.5, -0.3)])
    def test_balanced_and_matches_quadrature(self, data):
        bal = flux_balance(data)
        assert bal.residual < 1e-9
        for p, F in bal.fluxes:
            npt.assert_allclose(F, flux_quadrature(data, p), atol=1e-9)

    def test_regular_point_has_zero_flux(self):
        npt.assert_allclose(flux(catalog.trinoid(), 2.0), 0, atol=1e-14)

    def test_irregular_end_rejected(self):
        with pytest.raises(IrregularEnd):
            flux(catalog.enneper_cousin(), INF)

    def test_needs_gauss_data(self):
        with pytest.raises(ValidationError):
            flux_balance(catalog.horosphere())

    def test_single_end_flags_quiet_for_multi_end(self):
        assert single_end_flags(catalog.trinoid()) == []
        assert single_end_flags(catalog.enneper_cousin()) == []


class TestInequalities:
    @pytest.mark.parametrize("data", [catalog.catenoid_cousin(0.8), catalog.trinoid(-0.7, -0.5, -0.3)])
    def test_all_hold(self, data):
        checks = _checks(curvature_report(data))
        assert all(c.holds for c in checks.values())

    def test_osserman_equality_for_embedded_ends(self):
        checks = _checks(curvature_report(catalog.trinoid()))
        assert checks["osserman"].equality
        assert checks["cohn_vossen"].holds

    def test_overridden_embeddedness_breaks_equality_match(self):
        data = catalog.catenoid_cousin(0.8)
        checks = {c.name: c for c in inequality_report(curvature_report(data, embedded=[False, None]))}
        assert not checks["osserman_equality_embedded"].holds
