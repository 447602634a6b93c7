import math

import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmc1 import catalog
from cmc1.catalog import FAMILIES, ParamOutOfRange, make, trinoid_constraints
from cmc1.errors import ValidationError
from cmc1.geometry import FOUR_PI, curvature_report, numeric_spherical_area
from cmc1.surface import end_orders


@pytest.mark.parametrize("name", sorted(set(FAMILIES) - {"o2220"}))
def test_annotations_match_computed_curvature(name):
    data = make(name)
    rep = curvature_report(data)
    ann = data.annotations
    assert data.family == name
    npt.assert_allclose(rep.ta / FOUR_PI, ann["ta_over_4pi"], rtol=1e-9)
    if ann["ta_dual_over_4pi"] is not None:
        npt.assert_allclose(rep.ta_dual / FOUR_PI, ann["ta_dual_over_4pi"], rtol=1e-9)


@pytest.mark.parametrize("mu", [-0.7, -0.5, -0.2])
def test_o2m4_curvature_from_area(mu):
    data = catalog.o2m4(mu)
    assert data.annotations["ta_over_4pi"] == 2
    npt.assert_allclose(data.annotations["ta_over_4pi_printed"], mu + 2)
    g = data.weierstrass.g
    npt.assert_allclose(numeric_spherical_area(g), 2 * FOUR_PI, rtol=1e-3)


def test_o2m5_curvature_from_area():
    data = catalog.o2m5(-0.5)
    assert data.annotations["ta_over_4pi"] == 3
    npt.assert_allclose(numeric_spherical_area(data.weierstrass.g), 3 * FOUR_PI, rtol=1e-3)


@pytest.mark.parametrize("mu", [-0.9, -0.7, -0.55])
def test_o2220_obstructed(mu):
    with pytest.raises(ParamOutOfRange, match="g\\(1\\) = g\\(-1\\)"):
        catalog.o2220(mu)


class TestTrinoidConstraints:
    @settings(max_examples=60, deadline=None)
    @given(st.floats(-0.999, 0.999).filter(lambda m: min(abs(m + 2 / 3), abs(m - 2 / 3)) > 1e-6 and abs(m) > 1e-3))
    def test_equal_mu_inequality(self, mu):
        # with c = cos B the inequality reads (c + 1)^2 (2c - 1) < 0
        tc = trinoid_constraints(mu, mu, mu)
        assert tc.ineq42 == (-2 / 3 < mu < 2 / 3)

    @pytest.mark.parametrize("mu", [0.0, 1.0, 2.0, 3.0])
    def test_integer_mu_fails(self, mu):
        assert not trinoid_constraints(mu, mu, mu).ineq42
        with pytest.raises(ParamOutOfRange):
            catalog.trinoid(mu, mu, mu)

    def test_conjugate_roots(self):
        tc = trinoid_constraints(-0.5, -0.5, -0.5)
        npt.assert_allclose(tc.q1, tc.q2.conjugate())

    def test_mu_below_minus_one(self):
        with pytest.raises(ParamOutOfRange):
            trinoid_constraints(-1.2, -0.5, -0.5)

    def test_signature_annotation(self):
        assert catalog.trinoid(-0.5, -0.5, -0.5).annotations["signature"] == "+++"


def test_catenoid_integer_l():
    rep = curvature_report(catalog.catenoid_cousin(2.0, 1, 0.5))
    npt.assert_allclose(rep.ta, 2 * FOUR_PI)


def test_catenoid_end_orders():
    ends = end_orders(catalog.catenoid_cousin(0.8))
    assert [e["d"] for e in ends] == [-2, -2]


def test_make_rejects_unknowns():
    with pytest.raises(ValidationError, match="unknown family"):
        make("helicoid")
    with pytest.raises(ValidationError, match="unknown parameter"):
        make("trinoid", mu4=0.1)


def test_make_coerces_strings():
    data = make("catenoid_cousin", l="0.6", delta="1")
    assert data.params["l"] == 0.6
    assert math.isclose(curvature_report(data).ta, 0.6 * FOUR_PI)


def test_fournoid_parameter_checks():
    with pytest.raises(ParamOutOfRange):
        catalog.fournoid(-0.5, 1.2, 1.4)
    with pytest.raises(ParamOutOfRange):
        catalog.fournoid(-0.5, 0.8, 1.0)
