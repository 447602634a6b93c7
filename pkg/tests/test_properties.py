"""Randomized property suites.

Each suite runs at least 100 hypothesis examples and can be run on its own:
``pytest tests/test_properties.py``.
"""

import cmath

import numpy as np
import numpy.testing as npt
from hypothesis import given, settings
from hypothesis import strategies as st

from cmc1 import catalog
from cmc1.algebra import INF, is_inf, star_action
from cmc1.integrate import PathSpec, Segment, build_system, integrate_lift
from cmc1.mero import Poly, RationalFn, residue_at, schwarzian

N_CASES = 100

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False, allow_subnormal=False)
cplx = st.builds(complex, finite, finite)


def sl2(entries):
    a, b, c, d = entries
    M = np.array([[a, b], [c, d]], dtype=complex)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) < 1e-2:
        M[0, 0] += 1.0
        M[1, 1] += 1.0
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) < 1e-2:
        M = np.eye(2, dtype=complex)
        det = 1.0
    return M / cmath.sqrt(det)


sl2_matrices = st.tuples(cplx, cplx, cplx, cplx).map(sl2)


def compose_mobius(P: Poly, Q: Poly, M: np.ndarray) -> RationalFn:
    """``(P/Q)`` precomposed with the Moebius map of ``M``."""
    k = max(P.degree, Q.degree)
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    top, bot = Poly([b, a]), Poly([d, c])

    def lift(R):
        out = Poly()
        for j, coef in enumerate(R.coeff_list()):
            out = out + (top**j) * (bot ** (k - j)) * coef
        return out

    return RationalFn(lift(P), lift(Q))


def mobius_after(M: np.ndarray, h: RationalFn) -> RationalFn:
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    return (h * a + b) / (h * c + d)


@st.composite
def rational_maps(draw):
    """Degree-2 rational maps with well separated coefficients."""
    num = [draw(cplx) for _ in range(3)]
    den = [draw(cplx) for _ in range(2)] + [1.0]
    P, Q = Poly(num), Poly(den)
    h = RationalFn(P, Q)
    if h.is_const() or h.degree < 2:
        num = [0.3, 1.0, 1.0]
        den = [0.7, 0.0, 1.0]
        P, Q = Poly(num), Poly(den)
        h = RationalFn(P, Q)
    return P, Q, h


def _sample_points(h, count=4):
    rng = np.random.default_rng(7)
    pts = []
    bad = [r for r, _ in h.den.roots()] + [r for r, _ in h.deriv().num.roots()]
    while len(pts) < count:
        z = complex(*rng.uniform(-1.5, 1.5, 2))
        if all(abs(z - b) > 0.2 for b in bad):
            pts.append(z)
    return pts


class TestSchwarzianCocycle:
    @settings(max_examples=N_CASES)
    @given(rational_maps(), sl2_matrices)
    def test_post_composition_invariance(self, hh, M):
        _, _, h = hh
        Sh = schwarzian(h).coefficient
        Smh = schwarzian(mobius_after(M, h)).coefficient
        for z in _sample_points(h):
            npt.assert_allclose(Smh(z), Sh(z), rtol=1e-6, atol=1e-6)

    @settings(max_examples=N_CASES)
    @given(rational_maps(), sl2_matrices)
    def test_pre_composition_cocycle(self, hh, M):
        P, Q, h = hh
        hM = compose_mobius(P, Q, M)
        a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
        Sh = schwarzian(h).coefficient
        ShM = schwarzian(hM).coefficient
        checked = 0
        for z in _sample_points(hM, 12):
            den = c * z + d
            if abs(den) < 0.2:
                continue
            w = (a * z + b) / den
            if any(abs(w - r) < 0.2 for r, _ in h.den.roots()) or any(abs(w - r) < 0.2 for r, _ in h.deriv().num.roots()):
                continue
            dM = 1.0 / den**2
            npt.assert_allclose(ShM(z), Sh(w) * dM**2, rtol=1e-5, atol=1e-6)
            checked += 1
        assert checked > 0


class TestStarAction:
    @settings(max_examples=N_CASES)
    @given(sl2_matrices, sl2_matrices, cplx)
    def test_composition(self, a, b, w):
        lhs = star_action(a, star_action(b, w))
        rhs = star_action(a @ b, w)
        if is_inf(lhs) or is_inf(rhs) or abs(lhs) > 1e6 or abs(rhs) > 1e6:
            # compare on the sphere through the inverse chart
            li = 0 if is_inf(lhs) else 1 / lhs
            ri = 0 if is_inf(rhs) else 1 / rhs
            assert abs(li - ri) < 1e-6
        else:
            npt.assert_allclose(lhs, rhs, rtol=1e-8, atol=1e-8)

    @settings(max_examples=N_CASES)
    @given(sl2_matrices)
    def test_infinity_and_identity(self, a):
        w = star_action(a, INF)
        expected = INF if a[1, 0] == 0 else a[0, 0] / a[1, 0]
        assert (is_inf(w) and is_inf(expected)) or abs(w - expected) < 1e-12
        assert star_action(np.eye(2), 0.5 + 0.25j) == 0.5 + 0.25j


@st.composite
def partial_fractions(draw):
    n = draw(st.integers(1, 4))
    poles = []
    while len(poles) < n:
        p = draw(cplx)
        if all(abs(p - q) > 0.3 for q in poles):
            poles.append(p)
        elif len(poles) == 0:
            poles.append(p)
        else:
            break
    terms = [(p, draw(st.integers(1, 3)), draw(cplx)) for p in poles]
    return terms


class TestResidueContour:
    @settings(max_examples=N_CASES)
    @given(partial_fractions(), cplx)
    def test_residue_matches_contour(self, terms, shift):
        f = RationalFn(Poly([shift, 0.5]))
        for p, k, c in terms:
            f = f + RationalFn(Poly([c + 0.1]), Poly.from_roots([(p, k)]))
        poles = [p for p, _, _ in terms]
        for p in poles:
            others = [q for q in poles if q != p]
            r = 0.3 * min([abs(p - q) for q in others] + [1.0])
            # trapezoid rule on a circle is spectrally accurate
            t = 2 * np.pi * np.arange(256) / 256
            zs = p + r * np.exp(1j * t)
            contour = np.mean([f(z) * (z - p) for z in zs])
            npt.assert_allclose(residue_at(f, p), contour, rtol=1e-8, atol=1e-8)


right_half = st.builds(complex, st.floats(0.3, 2.0), st.floats(-1.5, 1.5))


class TestHomotopyInvariance:
    @settings(max_examples=N_CASES)
    @given(st.floats(0.1, 0.9), right_half, right_half, right_half)
    def test_detour_inside_convex_region(self, l, a, b, c):
        # 0 is the only finite singular point; the half plane Re z > 0.3 is
        # convex, so the straight path and the detour through c are homotopic
        system = build_system(catalog.catenoid_cousin(l), form="right")
        direct = integrate_lift(system, PathSpec.straight(a, b))
        legs = [Segment.line(u, v) for u, v in ((a, c), (c, b)) if abs(v - u) > 1e-9] or [Segment.line(a, b)]
        detour = integrate_lift(system, PathSpec(legs))
        npt.assert_allclose(detour.F, direct.F, rtol=1e-8, atol=1e-8)
        npt.assert_allclose(detour.branch_logs, direct.branch_logs, atol=1e-10)
