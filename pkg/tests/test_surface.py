import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmc1 import catalog
from cmc1.algebra import INF
from cmc1.errors import ValidationError
from cmc1.mero import Differential, Poly, RationalFn
from cmc1.surface import (
    SurfaceData,
    SurfaceType,
    UnsupportedGenus,
    WeierstrassSpec,
    compatibility_check,
    pseudometric_divisor,
    surface_type,
)


@pytest.mark.parametrize(
    "data, expected",
    [
        (catalog.horosphere(), "O(0)"),
        (catalog.enneper_cousin(), "O(-4)"),
        (catalog.trinoid(-0.5, -0.5, -0.5), "O(-2,-2,-2)"),
        (catalog.catenoid_cousin(0.8), "O(-2,-2)"),
        (catalog.o022(-0.5, 1), "O(0,-2,-2)"),
        (catalog.o122(-0.5, 2), "O(-1,-2,-2)"),
    ],
)
def test_surface_type(data, expected):
    assert str(surface_type(data)) == expected
    assert SurfaceType.parse(expected) == surface_type(data)


def test_type_labels_sort_orders():
    assert str(SurfaceType(1, (-4,))) == "I(-4)"
    assert str(SurfaceType(0, (-2, 0, -2))) == "O(0,-2,-2)"


def test_genus_other_than_zero_rejected():
    w = WeierstrassSpec(RationalFn.z(), Differential(1, RationalFn.const(1.0)))
    with pytest.raises(UnsupportedGenus):
        SurfaceData([INF], weierstrass=w, genus=1)


def test_duplicate_punctures_rejected():
    w = WeierstrassSpec(RationalFn.z(), Differential(1, RationalFn.const(1.0)))
    with pytest.raises(ValidationError):
        SurfaceData([0j, 0j], weierstrass=w)


def test_trinoid_compatibility_branching_at_umbilics():
    d = catalog.trinoid(-0.5, -0.5, -0.5)
    rep = compatibility_check(d.gauss.G, d.gauss.Q, d.punctures)
    assert rep.ok
    umbilics = [c for c in rep.checks if c.kind == "umbilic"]
    assert len(umbilics) == 2
    for c in umbilics:
        assert c.ord_Q == 1 and c.branch_G == 1


def test_compatibility_violation():
    rep = compatibility_check(RationalFn.z(), Differential(2, RationalFn(Poly([0, 1]))), [INF])
    assert not rep.ok
    npt.assert_allclose(complex(rep.first_violation.point), 0)


def test_case1_pair_compatible():
    d = catalog.o122_eq8pi(1, 3, -0.5)
    assert compatibility_check(d.gauss.G, d.gauss.Q, d.punctures).ok


@given(st.floats(0.05, 0.95))
def test_catenoid_divisor(l):
    div = pseudometric_divisor(catalog.catenoid_cousin(l))
    npt.assert_allclose(div.at(0j), l - 1, atol=1e-9)
    npt.assert_allclose(div.at(INF), l - 1, atol=1e-9)
    assert div.orders("umbilic") == []


def test_trinoid_divisor():
    mus = (-0.7, -0.5, -0.3)
    d = catalog.trinoid(*mus)
    div = pseudometric_divisor(d)
    for p, mu in zip((0j, 1 + 0j, INF), mus):
        npt.assert_allclose(div.at(p), mu, atol=1e-9)
    npt.assert_allclose(sorted(div.orders("umbilic")), [1, 1])


def test_serialization_round_trip():
    d = catalog.o122(-0.5, 3)
    d2 = SurfaceData.from_json(d.to_json())
    assert str(surface_type(d2)) == "O(-1,-2,-2)"
    for z in (0.3 + 0.4j, -1.2 + 0.1j):
        npt.assert_allclose(d2.gauss.G(z), d.gauss.G(z), rtol=1e-12)
        npt.assert_allclose(d2.weierstrass.g(z), d.weierstrass.g(z), rtol=1e-12)
