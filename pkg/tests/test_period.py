import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmc1 import catalog
from cmc1.algebra import random_su2
from cmc1.errors import ValidationError
from cmc1.integrate import full_representation
from cmc1.period import (
    ReducibilityClass,
    Verdict,
    conjugated,
    max_su2_defect,
    period_solve,
    reducibility,
    reducible_deformation,
    scan_defect,
    unitarizability,
)


@given(st.integers(0, 2**31))
def test_su2_generators_unitarizable(seed):
    rng = np.random.default_rng(seed)
    Ms = [random_su2(rng) for _ in range(3)]
    rep = unitarizability(Ms)
    assert rep.verdict is Verdict.UNITARIZABLE
    assert rep.defect < 1e-12
    assert max_su2_defect(Ms, rep.P) < 1e-9


@given(st.integers(0, 2**31))
def test_conjugated_su2_recovered(seed):
    rng = np.random.default_rng(seed)
    A = np.array([[1.3, 0.4 - 0.2j], [0.1j, 1.0]])
    A = A / np.sqrt(np.linalg.det(A))
    Ms = [A @ random_su2(rng) @ np.linalg.inv(A) for _ in range(3)]
    rep = unitarizability(Ms)
    assert rep.verdict is Verdict.UNITARIZABLE
    for M in conjugated(Ms, rep.P):
        npt.assert_allclose(M @ M.conj().T, np.eye(2), atol=1e-8)


def test_hyperbolic_generator_rejected():
    rep = unitarizability([np.diag([2.0, 0.5])])
    assert rep.verdict is Verdict.NOT_UNITARIZABLE
    assert not rep.trace_filter


@pytest.mark.parametrize("l", [0.3, 0.8, 1.5])
def test_catenoid_h1(l):
    rep = full_representation(catalog.catenoid_cousin(l))
    assert reducibility(rep) is ReducibilityClass.H1_REDUCIBLE
    assert unitarizability(rep).verdict is Verdict.UNITARIZABLE


def test_warped_catenoid_h3():
    assert reducibility(full_representation(catalog.catenoid_cousin(2.0, 1, 0.5))) is ReducibilityClass.H3_REDUCIBLE


def test_trinoid_irreducible_and_unitarizable():
    rep = full_representation(catalog.trinoid(-0.5, -0.5, -0.5))
    assert reducibility(rep) is ReducibilityClass.IRREDUCIBLE
    assert unitarizability(rep).verdict is Verdict.UNITARIZABLE


def test_fournoid_root_unitarizable():
    rep = full_representation(catalog.fournoid(-0.5, 0.8, 1.3931040461487108))
    u = unitarizability(rep)
    assert u.verdict is Verdict.UNITARIZABLE and u.definite


def test_fournoid_off_root_not_unitarizable():
    u = unitarizability(full_representation(catalog.fournoid(-0.5, 0.8, 1.7)))
    assert u.verdict is not Verdict.UNITARIZABLE


def _catenoid(l):
    return catalog.catenoid_cousin(l)


def test_catenoid_scan_defect_zero():
    defects = scan_defect(_catenoid, [0.2, 0.45, 0.7, 0.9])
    assert max(defects) < 1e-8


def test_trinoid_degenerate_precondition():
    # mu1 = mu2 = mu3 = 0 makes every c_j vanish and q1 = q2
    with pytest.raises(ValidationError):
        catalog.trinoid(0.0, 0.0, 0.0)


def test_reducible_deformation():
    g = catalog.catenoid_cousin(0.7).weierstrass.g
    npt.assert_allclose(reducible_deformation(g, 1.0)(0.3 + 0.1j), g(0.3 + 0.1j))
    with pytest.raises(ValidationError):
        reducible_deformation(g, 0.0)


@given(st.floats(0.2, 5.0))
def test_deformation_keeps_catenoid_traces(t):
    base = catalog.catenoid_cousin(0.7)
    traces0 = [np.trace(M) for _, M in full_representation(base).generators]
    g = reducible_deformation(base.weierstrass.g, t)
    om = base.weierstrass.omega.coefficient
    from cmc1.mero import Differential
    from cmc1.surface import SurfaceData, WeierstrassSpec

    d = SurfaceData(base.punctures, weierstrass=WeierstrassSpec(g, Differential(1, om / t)))
    traces = [np.trace(M) for _, M in full_representation(d).generators]
    npt.assert_allclose(traces, traces0, atol=1e-9)


def _fournoid(p):
    return catalog.fournoid(-0.5, 0.8, p)


def test_period_solve_coarse_scan():
    res = period_solve(_fournoid, 1.2, 1.6, points=9)
    assert len(res.roots) == 1
    assert abs(res.roots[0].value - 1.3931) < 1e-3
    assert math.isclose(res.roots[0].value, 1.3931040461487108, abs_tol=1e-6)
