"""Constructors for explicit genus-0 CMC-1 families.

Every constructor validates its parameters, builds the Gauss data
``(G, Q)`` and/or Weierstrass data ``(g, omega)`` and attaches the expected
curvature values as annotations.  Developing maps given through their
derivatives are integrated in closed form by
:func:`cmc1.mero.integrate_power_product`, which also enforces the
vanishing-residue conditions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import INF
from .errors import ResidueConditionFailed, ValidationError
from .mero import (
    Differential,
    Poly,
    PowerProduct,
    RationalFn,
    as_power_product,
    integrate_power_product,
    simplify_coefficient,
)
from .surface import GaussSpec, SurfaceData, WeierstrassSpec, compatibility_check


class ParamOutOfRange(ValidationError):
    pass


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParamOutOfRange(message)


def _is_int(x: float) -> bool:
    return abs(x - round(x)) < 1e-12


def _annot(ta_over_4pi, ta_dual_over_4pi, type_str: str, **extra) -> dict:
    d = {"ta_over_4pi": ta_over_4pi, "ta_dual_over_4pi": ta_dual_over_4pi, "type": type_str}
    d.update(extra)
    return d


def _omega_from(Qc, dg) -> Differential:
    """``omega = Q / dg`` as a single coefficient."""
    q = as_power_product(Qc) / as_power_product(dg)
    return Differential(1, simplify_coefficient(q))


def _check_gauss(data: SurfaceData) -> SurfaceData:
    if data.gauss is not None:
        compatibility_check(data.gauss.G, data.gauss.Q, data.punctures).raise_if_failed()
    return data


# ---------------------------------------------------------------------------
# classical families
# ---------------------------------------------------------------------------


def horosphere(a: complex = 1.0) -> SurfaceData:
    _require(a != 0, "a must be nonzero")
    w = WeierstrassSpec(RationalFn.const(0.0), Differential(1, RationalFn.const(complex(a))))
    return SurfaceData([INF], weierstrass=w, family="horosphere", params={"a": a}, annotations=_annot(0, 0, "O(0)"))


def enneper_cousin(a: complex = 1.0) -> SurfaceData:
    _require(a != 0, "a must be nonzero")
    w = WeierstrassSpec(RationalFn.z(), Differential(1, RationalFn.const(complex(a))))
    return SurfaceData(
        [INF], weierstrass=w, family="enneper_cousin", params={"a": a}, annotations=_annot(1, math.inf, "O(-4)")
    )


def enneper_dual(a: complex = 1.0) -> SurfaceData:
    """The dual of the Enneper cousin, represented through the duality flag."""
    d = enneper_cousin(a)
    d.dual = True
    d.family = "enneper_dual"
    d.annotations = _annot(math.inf, 1, "O(-4)")
    return d


def catenoid_cousin(l: float = 0.8, delta: int = 1, b: float = 0.0) -> SurfaceData:
    """``g = ((delta^2 - l^2)/(4l)) z^l + b``, ``omega = z^(-l-1) dz``,
    ``G = z^delta``, ``Q = (delta^2 - l^2)/(4 z^2) dz^2``."""
    _require(l > 0, "l must be positive")
    _require(_is_int(delta) and delta >= 1, "delta must be a positive integer")
    delta = int(round(delta))
    _require(abs(l - delta) > 1e-12, "l must differ from delta")
    _require(b >= 0, "b must be nonnegative")
    _require(b == 0 or _is_int(l), "b > 0 requires an integer l")
    c = (delta * delta - l * l) / (4 * l)
    if _is_int(l):
        li = int(round(l))
        g = RationalFn(Poly([b] + [0] * (li - 1) + [c]) if li >= 1 else Poly([c + b]))
        omega = Differential(1, RationalFn(Poly([1.0]), Poly([0] * (li + 1) + [1])))
    else:
        g = PowerProduct.make(c, [(0j, l)])
        omega = Differential(1, PowerProduct.make(1.0, [(0j, -l - 1)]))
    G = RationalFn(Poly([0] * delta + [1]))
    Q = Differential(2, RationalFn(Poly([(delta * delta - l * l) / 4]), Poly([0, 0, 1])))
    data = SurfaceData(
        [0j, INF],
        gauss=GaussSpec(G, Q),
        weierstrass=WeierstrassSpec(g, omega),
        family="catenoid_cousin",
        params={"l": l, "delta": delta, "b": b},
        annotations=_annot(l, delta, "O(-2,-2)"),
    )
    return _check_gauss(data)


@dataclass
class TrinoidConstraints:
    ineq42: bool
    cond43: bool
    q1: complex
    q2: complex
    lhs42: float
    disc43: float


def trinoid_constraints(mu1: float, mu2: float, mu3: float) -> TrinoidConstraints:
    for m in (mu1, mu2, mu3):
        _require(m > -1, "every mu_j must exceed -1")
    B = [math.pi * (m + 1) for m in (mu1, mu2, mu3)]
    cs = [math.cos(b) for b in B]
    lhs = cs[0] ** 2 + cs[1] ** 2 + cs[2] ** 2 + 2 * cs[0] * cs[1] * cs[2]
    c1, c2, c3 = (-m * (m + 2) / 2 for m in (mu1, mu2, mu3))
    disc = c1 * c1 + c2 * c2 + c3 * c3 - 2 * (c1 * c2 + c2 * c3 + c3 * c1)
    # (c2 - c1 - c3)^2 - 4 c1 c3 equals disc, so q1 = q2 exactly when disc = 0
    if abs(c3) > 1e-14:
        r = cmath.sqrt(disc)
        q1 = (-(c2 - c1 - c3) + r) / (2 * c3)
        q2 = (-(c2 - c1 - c3) - r) / (2 * c3)
    else:
        q1 = -c1 / (c2 - c1) if abs(c2 - c1) > 1e-14 else complex("nan")
        q2 = complex("inf")
    return TrinoidConstraints(lhs < 1 - 1e-12, abs(disc) > 1e-12, complex(q1), complex(q2), lhs, disc)


def trinoid(mu1: float = -0.5, mu2: float = -0.5, mu3: float = -0.5) -> SurfaceData:
    tc = trinoid_constraints(mu1, mu2, mu3)
    _require(tc.ineq42, "cos^2 B1 + cos^2 B2 + cos^2 B3 + 2 cos B1 cos B2 cos B3 < 1 fails")
    _require(tc.cond43, "c1^2 + c2^2 + c3^2 - 2(c1c2 + c2c3 + c3c1) must be nonzero")
    c1, c2, c3 = (-m * (m + 2) / 2 for m in (mu1, mu2, mu3))
    Q = Differential(2, RationalFn(Poly([c1, c2 - c1 - c3, c3]) * 0.5, Poly([0, 0, 1, -2, 1])))
    q1, q2 = tc.q1, tc.q2
    G = RationalFn.z() + RationalFn(Poly([(q1 - q2) ** 2]), Poly([-2 * (q1 + q2), 4]))
    signs = "".join("+" if c > 0 else "-" for c in (c1, c2, c3))
    data = SurfaceData(
        [0j, 1 + 0j, INF],
        gauss=GaussSpec(G, Q),
        family="trinoid",
        params={"mu1": mu1, "mu2": mu2, "mu3": mu3},
        annotations=_annot((4 + mu1 + mu2 + mu3) / 2, 2, "O(-2,-2,-2)", signature=signs),
    )
    return _check_gauss(data)


def fournoid(mu: float = -0.5, a: float = 0.8, p: float = 1.4) -> SurfaceData:
    _require(mu > -1, "mu must exceed -1")
    _require(0 < a < 1, "a must lie in (0, 1)")
    _require(p != 0 and p != 1, "p must differ from 0 and 1")
    den0 = p * a**4 - (3 * p * p - 1) * a * a + p
    _require(abs(den0) > 1e-12, "p a^4 - (3p^2 - 1) a^2 + p must be nonzero")
    G = RationalFn(Poly([0, -1, 0, p]), Poly([-p, 0, 1]))
    pref = -mu * (mu + 2) * a * a * (a * a - a**-2) ** 2 / den0
    num = Poly([p, 0, -(3 * p * p - 1), 0, p]) * pref
    den = Poly.from_roots([(a, 2), (-a, 2), (1 / a, 2), (-1 / a, 2)])
    Q = Differential(2, RationalFn(num, den))
    data = SurfaceData(
        [a + 0j, -a + 0j, 1 / a + 0j, -1 / a + 0j],
        gauss=GaussSpec(G, Q),
        family="fournoid",
        params={"mu": mu, "a": a, "p": p},
        annotations=_annot(2 * mu + 3, 3, "O(-2,-2,-2,-2)", note="TA holds once the periods close"),
    )
    return _check_gauss(data)


# ---------------------------------------------------------------------------
# families with a reducible representation
# ---------------------------------------------------------------------------


def _mu_open(mu: float) -> None:
    _require(-1 < mu < 0, "mu must lie in (-1, 0)")


def o2m4(mu: float = -0.5, t: float = 1.0) -> SurfaceData:
    """Type O(-2,-4): ``dg = t z^mu (z^2-a^2)/(z^2-1)^2``, ``Q = theta (z^2-a^2)/z^2``."""
    _mu_open(mu)
    _require(t > 0, "t must be positive")
    a2 = (mu + 1) / (mu - 1)
    theta = mu * (mu + 2) * (mu - 1) / (4 * (mu + 1))
    dg = PowerProduct.make(t, [(0j, mu)], RationalFn(Poly([-a2, 0, 1]), Poly.from_roots([(1, 2), (-1, 2)])))
    g = integrate_power_product(dg)
    Qc = RationalFn(Poly([-a2, 0, 1]) * theta, Poly([0, 0, 1]))
    return SurfaceData(
        [0j, INF],
        weierstrass=WeierstrassSpec(g, _omega_from(Qc, dg)),
        family="o2m4",
        params={"mu": mu, "t": t},
        # the image of g covers the sphere twice for every mu in (-1, 0); the
        # printed value mu + 2 is kept alongside for comparison
        annotations=_annot(2, math.inf, "O(-2,-4)", ta_over_4pi_printed=mu + 2),
    )


def o2m5(mu: float = -0.5, t: float = 1.0) -> SurfaceData:
    """Type O(-2,-5): ``dg = t z^mu (z^3-a^3)/(z^3-1)^2``, ``Q = theta (z^3-a^3)/z^2``."""
    _mu_open(mu)
    _require(t > 0, "t must be positive")
    a3 = (mu + 1) / (mu - 2)
    theta = mu * (mu * mu - 4) / (4 * (mu + 1))
    roots = [cmath.exp(2j * math.pi * k / 3) for k in range(3)]
    dg = PowerProduct.make(t, [(0j, mu)], RationalFn(Poly([-a3, 0, 0, 1]), Poly.from_roots([(r, 2) for r in roots])))
    g = integrate_power_product(dg)
    Qc = RationalFn(Poly([-a3, 0, 0, 1]) * theta, Poly([0, 0, 1]))
    return SurfaceData(
        [0j, INF],
        weierstrass=WeierstrassSpec(g, _omega_from(Qc, dg)),
        family="o2m5",
        params={"mu": mu, "t": t},
        # g ~ w^(2 - mu) at infinity, so the end there has order 1 - mu and the
        # image of g covers the sphere three times; the printed value is 2
        annotations=_annot(3, math.inf, "O(-2,-5)", ta_over_4pi_printed=2),
    )


def o022(mu: float = -0.5, m: int = 1, t: float = 1.0) -> SurfaceData:
    """Type O(0,-2,-2) from an explicit pair of Gauss maps."""
    _mu_open(mu)
    _require(_is_int(m) and m >= 1, "m must be a positive integer")
    _require(t > 0, "t must be positive")
    m = int(round(m))
    G = RationalFn(Poly([0] * (m + 1) + [-(m + 2), m]), Poly([-m, m + 2]))
    g = PowerProduct.make(t, [(0j, mu + 1)], RationalFn(Poly([-(mu + 2), mu]), Poly([-mu, mu + 2])))
    Qc = RationalFn(Poly([(m * (m + 2) - mu * (mu + 2)) / 4]), Poly([0, 0, 1]))
    omega = _omega_from(Qc, g.deriv())
    data = SurfaceData(
        [1 + 0j, 0j, INF],
        gauss=GaussSpec(G, Differential(2, Qc)),
        weierstrass=WeierstrassSpec(g, omega),
        family="o022",
        params={"mu": mu, "m": m, "t": t},
        annotations=_annot(mu + 2, m + 2, "O(0,-2,-2)"),
    )
    return _check_gauss(data)


def o122(mu: float = -0.5, m: int = 2, t: float = 1.0) -> SurfaceData:
    """Type O(-1,-2,-2) with TA in (4 pi, 8 pi)."""
    _mu_open(mu)
    _require(_is_int(m) and m >= 2, "m must be an integer >= 2")
    _require(t > 0, "t must be positive")
    m = int(round(m))
    a = -(m + mu + 2) / (m - mu - 2)
    p = (a * mu + a - a * a) / (a * mu + a - 1)
    dG = RationalFn(Poly.from_roots([(0, 1), (p, m - 2)]), Poly.from_roots([(1, m + 2)]))
    G = integrate_power_product(dG)
    dg = PowerProduct.make(t, [(1 + 0j, mu), (complex(p), -mu - 2)], RationalFn(Poly([0, 1]), Poly.from_roots([(a, 2)])))
    g = integrate_power_product(dg)
    theta = 4 * m * m * (m * (m + 2) - mu * (mu + 2)) / ((m + mu) ** 2 * (2 - m + mu) ** 2)
    Qc = RationalFn(Poly([theta]), Poly.from_roots([(0, 1), (1, 2), (p, 2)]))
    data = SurfaceData(
        [0j, 1 + 0j, complex(p)],
        gauss=GaussSpec(G, Differential(2, Qc)),
        weierstrass=WeierstrassSpec(g, _omega_from(Qc, dg)),
        family="o122",
        params={"mu": mu, "m": m, "t": t, "a": a, "p": p},
        annotations=_annot(mu + 2, m + 1, "O(-1,-2,-2)"),
    )
    return _check_gauss(data)


def o122_eq8pi_params(case: int, m: int, mu: float, sign: int = 0) -> dict:
    """``p``, ``theta`` (and ``a`` with its sign for case 2)."""
    if case == 1:
        p = (m * (m + 2) - mu * (mu + 2)) / ((m - 2) ** 2 - mu * mu)
        theta = (mu - 3 * m + 2) ** 2 * (m * (m + 2) - mu * (mu + 2)) / ((m - 2) ** 2 - mu * mu) ** 2
        return {"p": p, "theta": theta}
    p = (mu + m + 2) / (mu + m)
    theta = (m - mu) * (mu + m + 2) / (m + mu) ** 2
    root = math.sqrt(9 * (m - mu) ** 2 + 16 * m * (mu + 1) + 16 * mu * (m + 1))
    out = {"p": p, "theta": theta}
    for s in (+1, -1):
        out[f"a{'+' if s > 0 else '-'}"] = (m - mu + s * root) / (2 * (mu + m))
    return out


def o122_eq8pi(case: int = 1, m: int = 3, mu: float = -0.5, sign: int = 0) -> SurfaceData:
    """Type O(-1,-2,-2) with TA = 8 pi.

    For the second case ``sign`` picks the root for ``a``; ``0`` tries both
    and keeps the one for which ``dG`` has vanishing residues.
    """
    _mu_open(mu)
    _require(case in (1, 2), "case must be 1 or 2")
    _require(_is_int(m), "m must be an integer")
    m = int(round(m))
    _require(m >= (3 if case == 1 else 1), f"case {case} needs m >= {3 if case == 1 else 1}")
    prm = o122_eq8pi_params(case, m, mu)
    p, theta = prm["p"], prm["theta"]
    if case == 1:
        dG = RationalFn(Poly.from_roots([(0, 2), (p, m - 3)]), Poly.from_roots([(1, m + 2)]))
        G = integrate_power_product(dG)
        a = None
    else:
        choices = [+1, -1] if sign == 0 else [int(math.copysign(1, sign))]
        G = None
        last = None
        for s in choices:
            a = prm["a+" if s > 0 else "a-"]
            dG = RationalFn(Poly.from_roots([(0, 2), (p, m - 1)]), Poly.from_roots([(1, m + 2), (a, 2)]))
            try:
                G = integrate_power_product(dG)
                sign = s
                break
            except ResidueConditionFailed as exc:
                last = exc
        if G is None:
            raise ParamOutOfRange(f"no admissible root a: {last}")
    Qc = RationalFn(Poly([theta]), Poly.from_roots([(0, 1), (1, 2), (p, 2)]))
    params = {"case": case, "m": m, "mu": mu, "p": p, "theta": theta}
    if a is not None:
        params.update({"a": a, "sign": sign})
    data = SurfaceData(
        [0j, 1 + 0j, complex(p)],
        gauss=GaussSpec(G, Differential(2, Qc)),
        family="o122_eq8pi",
        params=params,
        annotations=_annot(2, m + 1 if case == 1 else m + 2, "O(-1,-2,-2)"),
    )
    return _check_gauss(data)


def o2220_residue(mu: float, a2: complex, q2: complex) -> complex:
    """``2 mu a/(a^2-1) + 2a/(a^2-q^2) + 1/a``, multiplied through by ``a``."""
    return 2 * mu * a2 / (a2 - 1) + 2 * a2 / (a2 - q2) + 1.0


def o2220_a2(mu: float, q2: complex) -> complex:
    return -(1 - mu - q2) / (3 + mu - 3 * q2)


def o2220_solve_q2(mu: float) -> list[float]:
    """Real ``q^2 > 0`` where the residue identity holds with the ``a^2`` coupling.

    Clearing denominators turns the identity into
    ``(3 mu + 6) s^2 + (2 mu^2 - 4 mu) s - (mu - 1)(mu - 3)(mu + 2) = 0``
    in ``s = q^2``.
    """
    coeffs = [3 * mu + 6, 2 * mu * mu - 4 * mu, -(mu - 1) * (mu - 3) * (mu + 2)]
    out = []
    for r in np.roots(coeffs):
        if abs(r.imag) < 1e-12 and r.real > 0:
            out.append(float(r.real))
    return sorted(out)


def o2220_obstruction(mu: float, q: complex) -> complex:
    """``g(1) - g(-1)``, i.e. the integral of ``dg`` along the upper unit half circle.

    ``g`` has unitary monodromy only if ``g(1) = g(-1)``: the local monodromy
    of ``g`` around ``+-1`` is a rotation about ``g(+-1)`` fixing infinity.
    """
    from scipy.integrate import quad

    q2 = complex(q) ** 2
    a2 = o2220_a2(mu, q2)

    # on the circle z^2 - 1 = 2 sin(th) e^{i(th + pi/2)}; the continuous branch
    # avoids the principal cut at th = pi/2, and the factor (th (pi - th))^mu
    # is handed to quad as an algebraic weight
    def f(th):
        z = cmath.exp(1j * th)
        s = 2 * math.sin(th) / (th * (math.pi - th)) if 0 < th < math.pi else 2.0 / math.pi
        branch = s**mu * cmath.exp(1j * mu * (th + math.pi / 2))
        return branch * (z * z - q2) * z * z / (z * z - a2) ** 2 * 1j * z

    opts = dict(weight="alg", wvar=(mu, mu), limit=400)
    re = quad(lambda t: f(t).real, 0.0, math.pi, **opts)[0]
    im = quad(lambda t: f(t).imag, 0.0, math.pi, **opts)[0]
    return -(re + 1j * im)


def o2220(mu: float = -0.7, q: complex | None = None) -> SurfaceData:
    """Type O(-2,-2,-2,0) from ``dg = (z^2-1)^mu (z^2-q^2) z^2/(z^2-a^2)^2 dz``.

    ``q`` defaults to the positive root of the residue identity; an explicit
    ``q`` is accepted only if the identity holds for it.  Even then ``g``
    must take the same value at both ends ``+-1``, and no ``(mu, q)`` in the
    admissible range achieves that (the ``z^2`` factor forces the
    antiderivative to be nonzero at 0), so construction raises
    :class:`ParamOutOfRange` reporting ``g(1) - g(-1)``.
    """
    _require(-1 < mu < -0.5, "mu must lie in (-1, -1/2)")
    if q is None:
        sols = o2220_solve_q2(mu)
        _require(bool(sols), "no positive q^2 solves the residue identity")
        q = math.sqrt(sols[0])
    q = complex(q)
    q2 = q * q
    a2 = o2220_a2(mu, q2)
    _require(abs(o2220_residue(mu, a2, q2)) < 1e-8, "residue identity 2 mu a/(a^2-1) + 2a/(a^2-q^2) + 1/a = 0 fails")
    a = cmath.sqrt(a2)
    _require(abs(a) > 1e-12 and abs(a2 - 1) > 1e-12 and abs(a2 - q2) > 1e-12, "a must avoid 0, +-1, +-q")
    dg = PowerProduct.make(
        1.0,
        [(1 + 0j, mu), (-1 + 0j, mu)],
        RationalFn(Poly([-q2, 0, 1]) * Poly([0, 0, 1]), Poly.from_roots([(a, 2), (-a, 2)])),
    )
    try:
        g = integrate_power_product(dg)
    except ResidueConditionFailed:
        gap = o2220_obstruction(mu, q)
        raise ParamOutOfRange(f"g(1) = g(-1) fails (g(1) - g(-1) = {gap:.6g}); the monodromy of g is not unitary")
    Qc = RationalFn(Poly([-q2, 0, 1]) * (-mu * (mu + 2) / (q2 - 1)), Poly.from_roots([(1, 2), (-1, 2)]))
    return SurfaceData(
        [1 + 0j, -1 + 0j, INF, 0j],
        weierstrass=WeierstrassSpec(g, _omega_from(Qc, dg)),
        family="o2220",
        params={"mu": mu, "q": q, "a": a},
        annotations=_annot(2, None, "O(-2,-2,-2,0)"),
    )


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

FAMILIES: dict[str, Callable[..., SurfaceData]] = {
    "horosphere": horosphere,
    "enneper_cousin": enneper_cousin,
    "enneper_dual": enneper_dual,
    "catenoid_cousin": catenoid_cousin,
    "trinoid": trinoid,
    "fournoid": fournoid,
    "o2m4": o2m4,
    "o2m5": o2m5,
    "o022": o022,
    "o122": o122,
    "o122_eq8pi": o122_eq8pi,
    "o2220": o2220,
}

_INT_PARAMS = {"delta", "m", "case", "sign"}


def make(name: str, **params) -> SurfaceData:
    """Build a family by name; unknown names or parameters are rejected."""
    if name not in FAMILIES:
        raise ValidationError(f"unknown family {name!r}; choose from {', '.join(sorted(FAMILIES))}")
    fn = FAMILIES[name]
    import inspect

    allowed = set(inspect.signature(fn).parameters)
    extra = set(params) - allowed
    if extra:
        raise ValidationError(f"unknown parameter(s) for {name}: {', '.join(sorted(extra))}")
    coerced = {}
    for k, v in params.items():
        if isinstance(v, str):
            v = complex(v.replace("i", "j")) if ("j" in v or "i" in v) else float(v)
        if k in _INT_PARAMS:
            v = int(round(float(v.real if isinstance(v, complex) else v)))
        elif isinstance(v, complex) and v.imag == 0:
            v = v.real
        coerced[k] = v
    return fn(**coerced)
