"""Surface data on punctured spheres and the bookkeeping attached to it.

A surface is given either by its hyperbolic Gauss map and Hopf differential
(:class:`GaussSpec`) or by Weierstrass data ``(g, omega)``
(:class:`WeierstrassSpec`); catalog entries often carry both.  From either
description we read off the type ``O(d_1, ..., d_n)``, the divisor of the
pseudometric ``d sigma^2`` and the umbilic points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import INF, complex_from_json, complex_to_json, is_inf
from .errors import CompatibilityViolation, ValidationError
from .mero import (
    Coefficient,
    Differential,
    PowerProduct,
    RationalFn,
    coefficient_from_json,
    laurent_expand,
    order_at,
    simplify_coefficient,
)

POINT_TOL = 1e-6


class UnsupportedGenus(ValidationError):
    pass


class MissingHopf(ValidationError):
    pass


class InvalidOrder(ValidationError):
    pass


def same_point(a, b, tol: float = POINT_TOL) -> bool:
    if is_inf(a) or is_inf(b):
        return is_inf(a) and is_inf(b)
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(a), abs(b))


def point_to_str(p) -> str:
    if is_inf(p):
        return "inf"
    p = complex(p)
    if abs(p.imag) < 1e-12:
        return f"{p.real:.6g}"
    return f"{p.real:.6g}{p.imag:+.6g}i"


@dataclass
class GaussSpec:
    G: RationalFn
    Q: Differential

    def to_json(self) -> dict:
        return {"G": self.G.to_json(), "Q": self.Q.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "GaussSpec":
        return cls(RationalFn.from_json(d["G"]), Differential.from_json(d["Q"]))


@dataclass
class WeierstrassSpec:
    g: Coefficient
    omega: Differential

    def hopf(self) -> Differential:
        """``Q = omega * dg``."""
        gp = self.g.deriv()
        c = self.omega.coefficient
        if isinstance(c, RationalFn) and isinstance(gp, RationalFn):
            return Differential(2, c * gp)
        prod = _as_pp(c) * _as_pp(gp)
        q = simplify_coefficient(prod)
        if isinstance(q, PowerProduct):
            raise ValidationError("omega * dg is not single-valued")
        return Differential(2, q)

    def to_json(self) -> dict:
        return {"g": self.g.to_json(), "omega": self.omega.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "WeierstrassSpec":
        return cls(coefficient_from_json(d["g"]), Differential.from_json(d["omega"]))


def _as_pp(c) -> PowerProduct:
    if isinstance(c, PowerProduct):
        return c
    if isinstance(c, RationalFn):
        return PowerProduct.from_rational(c)
    raise TypeError(type(c))


@dataclass
class SurfaceData:
    """A CMC-1 surface on a punctured sphere.

    ``dual`` marks the dual surface ``f#`` of the described data (its Hopf
    differential is ``-Q`` and the roles of the two Gauss maps swap).
    ``params`` records the family parameters; ``annotations`` holds
    expected values quoted for the family (used only by checks).
    """

    punctures: list
    gauss: Optional[GaussSpec] = None
    weierstrass: Optional[WeierstrassSpec] = None
    genus: int = 0
    label: str = ""
    family: str = ""
    params: dict = field(default_factory=dict)
    annotations: dict = field(default_factory=dict)
    dual: bool = False

    def __post_init__(self):
        if self.genus != 0:
            raise UnsupportedGenus("only genus-0 surfaces can be constructed")
        if self.gauss is None and self.weierstrass is None:
            raise MissingHopf("surface needs a Gauss or Weierstrass specification")
        pts = list(self.punctures)
        for i in range(len(pts)):
            for j in range(i):
                if same_point(pts[i], pts[j], 1e-12):
                    raise ValidationError("punctures must be distinct")
        self.punctures = pts

    @property
    def n_ends(self) -> int:
        return len(self.punctures)

    def hopf(self) -> Differential:
        """The Hopf differential of the underlying (non-dual) data."""
        if self.gauss is not None:
            return self.gauss.Q
        if self.weierstrass is not None:
            return self.weierstrass.hopf()
        raise MissingHopf("no route to Q")

    def finite_punctures(self) -> list[complex]:
        return [complex(p) for p in self.punctures if not is_inf(p)]

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        d = {
            "genus": self.genus,
            "punctures": [complex_to_json(p) for p in self.punctures],
            "label": self.label,
            "family": self.family,
            "params": _jsonable(self.params),
            "dual": self.dual,
        }
        if self.gauss is not None:
            d["gauss"] = self.gauss.to_json()
        if self.weierstrass is not None:
            d["weierstrass"] = self.weierstrass.to_json()
        if self.annotations:
            d["annotations"] = _jsonable(self.annotations)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SurfaceData":
        try:
            return cls(
                punctures=[complex_from_json(p) for p in d["punctures"]],
                gauss=GaussSpec.from_json(d["gauss"]) if d.get("gauss") else None,
                weierstrass=WeierstrassSpec.from_json(d["weierstrass"]) if d.get("weierstrass") else None,
                genus=int(d.get("genus", 0)),
                label=d.get("label", ""),
                family=d.get("family", ""),
                params=dict(d.get("params", {})),
                annotations=dict(d.get("annotations", {})),
                dual=bool(d.get("dual", False)),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"malformed surface document: {exc}") from exc


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, complex):
        return complex_to_json(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if x is INF:
        return "inf"
    return x


# ---------------------------------------------------------------------------
# surface types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceType:
    genus: int
    orders: tuple

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(sorted((int(d) for d in self.orders), reverse=True)))
        if len(self.orders) < 1:
            raise ValidationError("a surface type needs at least one end")

    def __str__(self) -> str:
        letter = {0: "O", 1: "I"}.get(self.genus, f"G{self.genus}")
        return f"{letter}({','.join(str(d) for d in self.orders)})"

    @classmethod
    def parse(cls, s: str) -> "SurfaceType":
        s = s.strip().replace("−", "-")
        letter, rest = s[0], s[1:].strip()
        genus = {"O": 0, "I": 1}[letter]
        inner = rest.strip("()")
        return cls(genus, tuple(int(x) for x in inner.split(",") if x.strip()))


def is_totally_umbilic(data: SurfaceData) -> bool:
    return data.hopf().is_zero()


def surface_type(data: SurfaceData) -> SurfaceType:
    """Type ``O(d_1,...,d_n)`` with ``d_j`` the order of ``Q`` at each end.

    The totally umbilic horosphere has ``Q = 0``; by convention its single
    end is recorded with order 0.
    """
    Q = data.hopf()
    if Q.is_zero():
        return SurfaceType(data.genus, tuple(0 for _ in data.punctures))
    return SurfaceType(data.genus, tuple(int(round(order_at(Q, p))) for p in data.punctures))


def umbilic_points(Q: Differential, punctures) -> list[tuple[object, int]]:
    """Zeros of ``Q`` away from the punctures, with their orders."""
    if Q.is_zero():
        return []
    coef = Q.coefficient
    if isinstance(coef, PowerProduct):
        coef = coef.as_rational()
    out = []
    for r, m in coef.zeros():
        if not any(same_point(r, p) for p in punctures):
            out.append((complex(r), int(m)))
    if not any(is_inf(p) for p in punctures):
        o = order_at(Q, INF)
        if o > 0:
            out.append((INF, int(round(o))))
        elif o < 0:
            raise ValidationError("Q has a pole at infinity, which is not a puncture")
    return out


# ---------------------------------------------------------------------------
# branching orders
# ---------------------------------------------------------------------------


def branching_order(h: Coefficient, p) -> float:
    """Order of the pull-back metric ``4|dh|^2/(1+|h|^2)^2`` at ``p``.

    For rational ``h`` this is the ramification index minus one; at a branch
    point of a power product it is ``|nu| - 1`` with ``nu`` the local exponent.
    """
    og = order_at(h, p)
    dh = h.deriv()
    if is_inf(p):
        odg = -dh.degree - 2 if not _is_zero_coef(dh) else math.inf
    else:
        odg = order_at(dh, p)
    if og >= -1e-12:
        return float(odg)
    return float(odg - 2 * og)


def _is_zero_coef(c) -> bool:
    return isinstance(c, RationalFn) and c.is_zero()


# ---------------------------------------------------------------------------
# compatibility of (G, Q)
# ---------------------------------------------------------------------------


@dataclass
class PointCheck:
    point: object
    kind: str  # "umbilic" | "end"
    ord_Q: float
    branch_G: float
    passed: bool


@dataclass
class CompatibilityReport:
    ok: bool
    checks: list
    first_violation: Optional[PointCheck] = None

    def raise_if_failed(self):
        if not self.ok:
            v = self.first_violation
            raise CompatibilityViolation(
                f"at {point_to_str(v.point)} ({v.kind}): ord Q = {v.ord_Q}, branching of G = {v.branch_G}"
            )


def compatibility_check(G: RationalFn, Q: Differential, punctures) -> CompatibilityReport:
    """Check that umbilic orders equal the branching of ``G`` away from the
    ends, and that ``branching(G) - d_j >= 2`` at every end."""
    if G.is_const():
        raise ValidationError("G must be nonconstant")
    coef = Q.coefficient
    if isinstance(coef, PowerProduct):
        coef = coef.as_rational()
    candidates: list = []

    def add(pt):
        if any(same_point(pt, c) for c in candidates):
            return
        candidates.append(pt)

    if not coef.is_zero():
        for r, _ in coef.zeros() + coef.poles():
            add(complex(r))
    Gp = G.deriv()
    for r, _ in Gp.zeros():
        add(complex(r))
    for r, m in G.poles():
        if m > 1:
            add(complex(r))
    add(INF)
    checks = []
    first = None
    for pt in candidates:
        if any(same_point(pt, p) for p in punctures):
            continue
        oq = order_at(Q, pt) if not coef.is_zero() else math.inf
        bg = branching_order(G, pt)
        passed = oq == bg
        c = PointCheck(pt, "umbilic", oq, bg, passed)
        checks.append(c)
        if not passed and first is None:
            first = c
    for p in punctures:
        d = order_at(Q, p) if not coef.is_zero() else 0
        bg = branching_order(G, p)
        passed = bg - d >= 2
        c = PointCheck(p, "end", d, bg, passed)
        checks.append(c)
        if not passed and first is None:
            first = c
    return CompatibilityReport(first is None, checks, first)


# ---------------------------------------------------------------------------
# the divisor of d sigma^2
# ---------------------------------------------------------------------------


@dataclass
class Divisor:
    entries: list  # (point, order, kind) with kind "end" or "umbilic"

    def orders(self, kind: str | None = None) -> list[float]:
        return [o for _, o, k in self.entries if kind is None or k == kind]

    def at(self, p) -> float:
        for q, o, _ in self.entries:
            if same_point(q, p):
                return o
        return 0.0

    def __str__(self) -> str:
        return " + ".join(f"{o:.6g}*[{point_to_str(p)}]" for p, o, _ in self.entries)


def mu_from_coefficient(c: float) -> float:
    """The root ``mu > -1`` of ``c = -mu(mu+2)/2``."""
    disc = 1.0 - 2.0 * c
    if disc < -1e-12:
        raise InvalidOrder(f"c = {c} gives complex cone angle")
    return -1.0 + math.sqrt(max(disc, 0.0))


def coefficient_from_mu(mu: float) -> float:
    return -0.5 * mu * (mu + 2.0)


def quadratic_coefficient(Q: Differential, p) -> complex:
    """Coefficient of ``(z-p)^-2`` of ``Q`` in the local chart at ``p``."""
    s = laurent_expand(Q, p, 4)
    return s.coeff(-2)


def end_orders(data: SurfaceData) -> list[dict]:
    """Per-end data: ``d``, ``mu`` (order of d sigma^2) and ``mu#``.

    ``mu#`` is the branching order of the hyperbolic Gauss map ``G``; it is
    infinite at an irregular end (``d <= -3``).
    """
    Q = data.hopf()
    umbilic = Q.is_zero()
    out = []
    for p in data.punctures:
        d = 0 if umbilic else int(round(order_at(Q, p)))
        info = {"point": p, "d": d}
        if umbilic:
            # the horosphere: both Gauss maps constant, no cone data
            info["mu"] = info["mu_sharp"] = math.nan
            out.append(info)
            continue
        mu = mu_sharp = None
        if data.weierstrass is not None:
            mu = branching_order(data.weierstrass.g, p)
        if data.gauss is not None:
            mu_sharp = branching_order(data.gauss.G, p)
        if not umbilic and d == -2:
            coef = quadratic_coefficient(Q, p).real
            if mu is None:
                mu = mu_from_coefficient(2.0 * coef + coefficient_from_mu(mu_sharp))
            if mu_sharp is None:
                mu_sharp = mu_from_coefficient(coefficient_from_mu(mu) - 2.0 * coef)
        elif d >= -1:
            if mu is None:
                mu = mu_sharp
            if mu_sharp is None:
                mu_sharp = mu
        else:
            if mu_sharp is None:
                mu_sharp = math.inf
            if mu is None:
                raise InvalidOrder("irregular end: the order of d sigma^2 needs the secondary Gauss map")
        if data.dual:
            mu, mu_sharp = mu_sharp, mu
        info["mu"] = float(mu)
        info["mu_sharp"] = float(mu_sharp)
        out.append(info)
    return out


def pseudometric_divisor(data: SurfaceData) -> Divisor:
    """``mu_1 p_1 + ... + mu_n p_n + xi_1 q_1 + ... + xi_m q_m``."""
    entries = []
    for info in end_orders(data):
        mu = info["mu"]
        if math.isnan(mu):
            continue
        if mu <= -1:
            raise InvalidOrder(f"order {mu} <= -1 at {point_to_str(info['point'])}")
        entries.append((info["point"], mu, "end"))
    Q = data.hopf()
    for q, xi in umbilic_points(Q, data.punctures):
        entries.append((q, float(xi), "umbilic"))
    return Divisor(entries)
