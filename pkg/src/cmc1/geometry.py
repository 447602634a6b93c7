"""Curvature and flux.

Total absolute curvature comes from divisor accounting:

    TA(f)/2pi  = 2*gamma - 2 + sum_j (mu_j - d_j)
               = (2 - 2*gamma) + sum_j mu_j + sum_k xi_k        (Gauss-Bonnet)
    TA(f#)/2pi = (2 - 2*gamma) + sum_j mu#_j + sum_k xi_k  = 2 deg G

The two expressions for TA(f) differ by the degree of the divisor of Q,
``sum d_j + sum xi_k = 4 gamma - 4``, so they agree on valid data and are
used as a cross-check.  :func:`numeric_spherical_area` integrates the
pulled-back sphere metric as an independent check.

Flux matrices are residues of the entries of ``[[G, -G^2], [1, -G]] Q/dG``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import INF, is_inf, matrix_to_json, complex_to_json
from .errors import QuadratureNotConverged, ValidationError
from .mero import PowerProduct, RationalFn, as_power_product
from .surface import (
    SurfaceData,
    coefficient_from_mu,
    end_orders,
    point_to_str,
    same_point,
    umbilic_points,
)

FOUR_PI = 4.0 * math.pi


class InconsistentOrders(ValidationError):
    pass


class IrregularEnd(ValidationError):
    pass


# ---------------------------------------------------------------------------
# branch orders and curvature
# ---------------------------------------------------------------------------


@dataclass
class EndRecord:
    point: object
    d: int
    mu: float
    mu_sharp: float
    c: float
    c_sharp: float
    regular: bool
    embedded: Optional[bool]

    def to_json(self) -> dict:
        def num(x):
            if x is None or (isinstance(x, float) and math.isnan(x)):
                return None
            if isinstance(x, float) and math.isinf(x):
                return "inf"
            return x

        return {
            "point": complex_to_json(self.point),
            "d": self.d,
            "mu": num(self.mu),
            "mu_sharp": num(self.mu_sharp),
            "c": num(self.c),
            "c_sharp": num(self.c_sharp),
            "regular": self.regular,
            "embedded": self.embedded,
        }


def branch_orders(data: SurfaceData, embedded: Sequence[Optional[bool]] | None = None, check: bool = True) -> list[EndRecord]:
    """Per-end ``(d, mu, mu#)`` with the derived quantities.

    Embeddedness defaults to the criterion ``mu# - d = 2``; pass
    ``embedded`` to override it end by end.
    """
    out = []
    for k, info in enumerate(end_orders(data)):
        d, mu, mus = info["d"], info["mu"], info["mu_sharp"]
        regular = not math.isinf(mus)
        c = coefficient_from_mu(mu) if not math.isnan(mu) else math.nan
        cs = coefficient_from_mu(mus) if regular and not math.isnan(mus) else math.nan
        if embedded is not None and embedded[k] is not None:
            emb = bool(embedded[k])
        elif regular and not math.isnan(mus):
            emb = abs(mus - d - 2) < 1e-9
        else:
            emb = None if not regular else True
        rec = EndRecord(info["point"], d, mu, mus, c, cs, regular, emb)
        if check:
            _check_end(rec)
        out.append(rec)
    return out


def _check_end(r: EndRecord) -> None:
    if math.isnan(r.mu):
        return
    where = point_to_str(r.point)
    if not r.mu > -1 + 1e-12:
        raise InconsistentOrders(f"mu = {r.mu} <= -1 at {where}")
    if not r.mu - r.d > 1 - 1e-9:
        raise InconsistentOrders(f"mu - d = {r.mu - r.d} <= 1 at {where}")
    if r.d >= -1 and r.regular and abs(r.mu - r.mu_sharp) > 1e-6:
        raise InconsistentOrders(f"mu != mu# at {where} although d >= -1")
    if r.regular and r.mu_sharp - r.d < 2 - 1e-9:
        raise InconsistentOrders(f"mu# - d = {r.mu_sharp - r.d} < 2 at regular end {where}")


def umbilic_orders(data: SurfaceData) -> list[tuple[object, int]]:
    Q = data.hopf()
    return umbilic_points(Q, data.punctures)


def _rational_secondary(data: SurfaceData) -> Optional[RationalFn]:
    """The secondary Gauss map of the described surface when it is rational."""
    if data.dual:
        return data.gauss.G if data.gauss is not None else None
    if data.weierstrass is None:
        return None
    g = data.weierstrass.g
    if isinstance(g, RationalFn):
        return g
    pp = as_power_product(g)
    return pp.as_rational() if pp.is_rational() else None


def _rational_hyperbolic(data: SurfaceData) -> Optional[RationalFn]:
    """The hyperbolic Gauss map of the described surface when it is rational."""
    if data.dual:
        return _rational_secondary(SurfaceData(data.punctures, data.gauss, data.weierstrass))
    return data.gauss.G if data.gauss is not None else None


@dataclass
class CurvatureReport:
    ta: float
    ta_dual: float
    ends: list
    umbilics: list
    ta_gauss_bonnet: float = math.nan
    ta_degree: float = math.nan
    ta_dual_degree: float = math.nan

    @staticmethod
    def _value(x: float) -> dict:
        if math.isinf(x):
            return {"value": "inf", "over_4pi": "inf", "integer_multiple": False}
        q = x / FOUR_PI
        return {"value": x, "over_4pi": q, "integer_multiple": abs(q - round(q)) < 1e-6}

    def to_json(self) -> dict:
        return {
            "ta": self._value(self.ta),
            "ta_dual": self._value(self.ta_dual),
            "ta_gauss_bonnet": self._value(self.ta_gauss_bonnet) if not math.isnan(self.ta_gauss_bonnet) else None,
            "ends": [e.to_json() for e in self.ends],
            "umbilics": [{"point": complex_to_json(q), "xi": xi} for q, xi in self.umbilics],
        }


def total_curvature(data: SurfaceData, ends: list[EndRecord] | None = None) -> float:
    """TA(f) from the end orders; horosphere-like data gives 0."""
    if data.hopf().is_zero():
        return 0.0
    ends = branch_orders(data) if ends is None else ends
    s = 2 * data.genus - 2 + sum(e.mu - e.d for e in ends)
    return 2 * math.pi * s


def gauss_bonnet_curvature(data: SurfaceData, ends: list[EndRecord] | None = None, dual: bool = False) -> float:
    """The Gauss-Bonnet form with Euler characteristic ``2 - 2 gamma``."""
    if data.hopf().is_zero():
        return 0.0
    ends = branch_orders(data) if ends is None else ends
    xi = sum(x for _, x in umbilic_orders(data))
    mus = [e.mu_sharp if dual else e.mu for e in ends]
    if any(math.isinf(m) for m in mus):
        return math.inf
    return 2 * math.pi * (2 - 2 * data.genus + sum(mus) + xi)


def dual_total_curvature(data: SurfaceData, ends: list[EndRecord] | None = None) -> float:
    """TA(f#) = 4 pi deg G, or +inf when some end is irregular."""
    if data.hopf().is_zero():
        return 0.0
    ends = branch_orders(data) if ends is None else ends
    if any(not e.regular for e in ends):
        return math.inf
    G = _rational_hyperbolic(data)
    if G is not None:
        return FOUR_PI * G.mapping_degree
    return gauss_bonnet_curvature(data, ends, dual=True)


def curvature_report(data: SurfaceData, embedded=None) -> CurvatureReport:
    ends = branch_orders(data, embedded)
    ta = total_curvature(data, ends)
    rep = CurvatureReport(ta, dual_total_curvature(data, ends), ends, umbilic_orders(data))
    rep.ta_gauss_bonnet = gauss_bonnet_curvature(data, ends)
    g = _rational_secondary(data)
    if g is not None:
        rep.ta_degree = FOUR_PI * g.mapping_degree
    G = _rational_hyperbolic(data)
    if G is not None:
        rep.ta_dual_degree = FOUR_PI * G.mapping_degree
    return rep


# ---------------------------------------------------------------------------
# numeric spherical area
# ---------------------------------------------------------------------------


def _bump(x: np.ndarray) -> np.ndarray:
    """Smooth cut-off: 1 on [0, 1/2], 0 on [1, inf)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x <= 0.5] = 1.0
    mid = (x > 0.5) & (x < 1.0)
    t = (x[mid] - 0.5) * 2.0

    def e(s):
        return np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)

    a, b = e(1.0 - t), e(t)
    out[mid] = a / (a + b)
    return out


def _density(h, dh, z: np.ndarray) -> np.ndarray:
    hv = np.abs(h(z))
    dv = np.abs(dh(z))
    with np.errstate(over="ignore", invalid="ignore"):
        out = 4.0 * dv**2 / (1.0 + hv**2) ** 2
        # large |h|: use the inverted form to avoid overflow
        big = hv > 1e150
        if np.any(big):
            out[big] = 4.0 * (dv[big] / hv[big] ** 2) ** 2
    return np.nan_to_num(out, nan=0.0, posinf=0.0)


def _gauss_log_disk(f, center: complex, rho: float, r0: float, n_r: int, n_t: int) -> float:
    """Integral over ``r0 < |z - center| < rho`` in log-polar coordinates."""
    x, w = np.polynomial.legendre.leggauss(n_r)
    a, b = math.log(r0), math.log(rho)
    s = 0.5 * (b - a) * x + 0.5 * (b + a)
    ws = 0.5 * (b - a) * w
    th = 2 * math.pi * (np.arange(n_t) + 0.5) / n_t
    r = np.exp(s)
    Z = center + r[:, None] * np.exp(1j * th[None, :])
    vals = f(Z) * (r**2)[:, None]
    return float(np.sum(ws[:, None] * vals) * 2 * math.pi / n_t)


def _aitken(a0: float, a1: float, a2: float) -> float:
    d1, d2 = a1 - a0, a2 - a1
    den = d2 - d1
    if abs(den) < 1e-300 or abs(d2) > abs(d1):
        return a2
    return a2 - d2 * d2 / den


def numeric_spherical_area(
    h,
    singular: Sequence[complex] | None = None,
    n: int = 96,
    rtol: float = 1e-4,
    max_level: int = 4,
) -> float:
    """Area of the image of ``h`` counted with multiplicity.

    The sphere is split by a smooth partition of unity into log-polar disks
    around each branch point, a disk around infinity (in the chart
    ``w = 1/z``) and a smooth remainder.  The inner radius of the log-polar
    disks is pushed to zero with Aitken extrapolation.  Resolution is
    doubled until two levels agree to ``rtol``.
    """
    if isinstance(h, PowerProduct) and h.is_rational():
        h = h.as_rational()
    dh = h.deriv()
    pts = list(singular) if singular is not None else []
    if isinstance(h, PowerProduct):
        for p in h.branch_points:
            if not any(abs(p - q) < 1e-12 for q in pts):
                pts.append(p)
    pts = [complex(p) for p in pts if not is_inf(p)]
    scale = max([abs(p) for p in pts] + [1.0])
    R = 2.0 * scale
    rhos = []
    for i, p in enumerate(pts):
        others = [abs(p - q) for j, q in enumerate(pts) if j != i]
        rhos.append(0.45 * min(others + [R - abs(p)]))

    def density(Z):
        return _density(h, dh, Z)

    # chart at infinity: w = 1/z, weight 1 for |z| >= 2R, 0 for |z| <= R
    def w_inf(Z):
        return _bump((1.0 / np.maximum(np.abs(Z), 1e-300)) * R)

    def w_pts(Z):
        tot = np.zeros(Z.shape)
        for p, rho in zip(pts, rhos):
            tot = tot + _bump(np.abs(Z - p) / rho)
        return tot

    def level(nn: int) -> float:
        total = 0.0
        # disks at the singular points
        for p, rho in zip(pts, rhos):

            def f(Z, p=p, rho=rho):
                return density(Z) * _bump(np.abs(Z - p) / rho)

            vals = [_gauss_log_disk(f, p, rho, rho * 10.0 ** (-k), nn, nn) for k in (8, 12, 16)]
            total += _aitken(*vals)

        # infinity: integrate over |w| < 1/R, density pulled back by w -> 1/w
        def finf(W):
            Z = 1.0 / W
            return density(Z) * np.abs(Z) ** 4 * w_inf(Z)

        vals = [_gauss_log_disk(finf, 0j, 1.0 / R, (1.0 / R) * 10.0 ** (-k), nn, nn) for k in (8, 12, 16)]
        total += _aitken(*vals)

        # smooth remainder on |z| < 2R
        x, w = np.polynomial.legendre.leggauss(2 * nn)
        r = R * (x + 1.0)
        wr = R * w
        th = 2 * math.pi * np.arange(2 * nn) / (2 * nn)
        Z = r[:, None] * np.exp(1j * th[None, :])
        rem = density(Z) * (1.0 - w_pts(Z) - w_inf(Z))
        total += float(np.sum((wr * r)[:, None] * rem) * 2 * math.pi / (2 * nn))
        return total

    prev = level(n)
    for _ in range(max_level):
        n *= 2
        cur = level(n)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureNotConverged(f"spherical area did not settle: last change {abs(cur - prev):.3e}")


# ---------------------------------------------------------------------------
# flux
# ---------------------------------------------------------------------------


def flux_integrand(data: SurfaceData) -> tuple[RationalFn, RationalFn, RationalFn, RationalFn]:
    """Entries of ``[[G, -G^2], [1, -G]] Q/dG`` with common factors cancelled."""
    if data.gauss is None:
        raise ValidationError("flux needs (G, Q) data")
    G, Q = data.gauss.G, data.gauss.Q
    Qc = Q.coefficient if isinstance(Q.coefficient, RationalFn) else Q.coefficient.as_rational()
    R = Qc / G.deriv()
    GR = G * R
    return (GR, -(G * GR), R, -GR)


def _residue_at_infinity(f: RationalFn) -> complex:
    """Residue of ``f dz`` at infinity (clockwise in z)."""
    # coefficient of 1/z at infinity: -(lead num / lead den) when deg f = -1
    s = 0j
    for p, _ in f.poles():
        s += f.residue(p)
    return -s


def flux(data: SurfaceData, end) -> np.ndarray:
    """Flux matrix at one end, by exact residues."""
    for info in branch_orders(data, check=False):
        if same_point(info.point, end) and not info.regular:
            raise IrregularEnd(f"end {point_to_str(end)} is irregular")
    entries = flux_integrand(data)
    vals = []
    for f in entries:
        if is_inf(end):
            vals.append(_residue_at_infinity(f))
        else:
            p = complex(end)
            v = 0j
            # poles of the cancelled coefficient at this end
            for q, _ in f.poles():
                if abs(q - p) < 1e-9 * max(1.0, abs(p)):
                    v += f.residue(q)
            vals.append(v)
    return np.array([[vals[0], vals[1]], [vals[2], vals[3]]])


def flux_quadrature(data: SurfaceData, end, radius: float | None = None, nodes: int = 512) -> np.ndarray:
    """Flux by the trapezoid rule on a circle (test oracle)."""
    entries = flux_integrand(data)
    ev = [f.scalar_evaluator() for f in entries]
    others = [complex(p) for p in data.punctures if not is_inf(p) and not same_point(p, end)]
    poles = []
    for f in entries:
        poles.extend(q for q, _ in f.poles())
    th = 2 * math.pi * np.arange(nodes) / nodes
    if is_inf(end):
        R = radius or 2.0 * max([abs(q) for q in poles + others] + [1.0])
        zs = R * np.exp(1j * th)
        # clockwise circle in z: -(1/N) sum f(z) z
        vals = [-sum(e(z) * z for z in zs) / nodes for e in ev]
    else:
        p = complex(end)
        dists = [abs(q - p) for q in poles + others if abs(q - p) > 1e-9]
        r = radius or 0.5 * min(dists + [1.0])
        zs = p + r * np.exp(1j * th)
        vals = [sum(e(z) * (z - p) for z in zs) / nodes for e in ev]
    return np.array([[vals[0], vals[1]], [vals[2], vals[3]]])


@dataclass
class FluxBalance:
    fluxes: list
    total: np.ndarray
    residual: float
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "fluxes": [{"end": complex_to_json(p), "matrix": matrix_to_json(F)} for p, F in self.fluxes],
            "sum": matrix_to_json(self.total),
            "residual": self.residual,
            "flags": self.flags,
        }


def single_end_flags(data: SurfaceData) -> list[str]:
    """Predicates excluding one-ended regular surfaces with nonzero flux."""
    flags = []
    if len(data.punctures) == 1:
        ends = branch_orders(data, check=False)
        e = ends[0]
        if e.regular and e.d == -2:
            flags.append("impossible: single regular end with ord Q = -2")
        elif e.regular and e.d < 0 and e.embedded:
            flags.append("impossible: single regular embedded end with ord Q < 0")
    return flags


def flux_balance(data: SurfaceData) -> FluxBalance:
    fl = [(p, flux(data, p)) for p in data.punctures]
    total = sum((F for _, F in fl), np.zeros((2, 2), dtype=complex))
    return FluxBalance(fl, total, float(np.linalg.norm(total)), single_end_flags(data))


# ---------------------------------------------------------------------------
# inequalities
# ---------------------------------------------------------------------------


@dataclass
class InequalityCheck:
    name: str
    holds: bool
    detail: str
    equality: Optional[bool] = None


def inequality_report(report: CurvatureReport, genus: int = 0) -> list[InequalityCheck]:
    n = len(report.ends)
    chi_M = 2 - 2 * genus - n
    out = []
    ta = report.ta / (2 * math.pi)
    out.append(InequalityCheck("cohn_vossen", ta > -chi_M + 1e-12, f"TA/2pi = {ta:.12g} > {-chi_M}"))
    if math.isfinite(report.ta_dual):
        tad = report.ta_dual / (2 * math.pi)
        all_emb = all(e.embedded for e in report.ends)
        eq = abs(tad - (-chi_M + n)) < 1e-9
        out.append(
            InequalityCheck(
                "osserman", tad >= -chi_M + n - 1e-9, f"TA#/2pi = {tad:.12g} >= {-chi_M + n}; equality iff all ends embedded", eq
            )
        )
        out.append(InequalityCheck("osserman_equality_embedded", eq == all_emb, f"equality={eq}, all embedded={all_emb}"))
    if genus == 0 and n % 2 == 1:
        m = (n - 1) // 2
        out.append(InequalityCheck("odd_end_bound", report.ta >= FOUR_PI * m - 1e-9, f"TA >= 4pi*{m}"))
    out.append(InequalityCheck("ends_bound", report.ta > 2 * math.pi * (n - 2) - 1e-12 if genus == 0 else True, f"TA > 2pi({n}-2)"))
    for e in report.ends:
        if math.isnan(e.mu):
            continue
        w = point_to_str(e.point)
        out.append(InequalityCheck(f"mu_minus_d[{w}]", e.mu - e.d > 1 - 1e-9, f"mu - d = {e.mu - e.d:.12g} > 1"))
        out.append(InequalityCheck(f"mu_gt_minus1[{w}]", e.mu > -1, f"mu = {e.mu:.12g} > -1"))
        if e.regular:
            out.append(
                InequalityCheck(
                    f"mu_sharp_minus_d[{w}]", e.mu_sharp - e.d >= 2 - 1e-9, f"mu# - d = {e.mu_sharp - e.d:.12g} >= 2", abs(e.mu_sharp - e.d - 2) < 1e-9
                )
            )
    return out
