"""Path integration of the SL(2,C) lift.

Two forms of the lift equation are supported:

* ``"right"``: ``dF = F [[g, -g^2], [1, -g]] omega`` from Weierstrass data;
* ``"left"``:  ``dF = [[G, -G^2], [1, -G]] (Q/dG) F`` from ``(G, Q)``.

Paths are concatenations of line segments and circular arcs.  The stepper
is Dormand-Prince 5(4) with a PI step-size controller; after every accepted
step ``F`` is divided by a square root of its determinant.  For multivalued
Weierstrass data the logarithms ``log(z - p_j)`` of every branch point are
continued step by step, which is what makes monodromy of power-product data
come out right.

The 2x2 products are written out on Python complex scalars; numpy call
overhead dominates for arrays this small.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import INF, det2, inv2, is_inf
from .config import IntegratorConfig
from .errors import DetDrift, SingularApproach, StepUnderflow, ValidationError
from .mero import PowerProduct, RationalFn, as_power_product
from .surface import SurfaceData, same_point


class IndeterminateQuotient(ValidationError):
    pass


class RelationViolated(ValidationError):
    pass


class SingularPoint(ValidationError):
    pass


# ---------------------------------------------------------------------------
# coefficient matrices
# ---------------------------------------------------------------------------


def _entry_evaluator(c, branch_points: list[complex]):
    """Scalar evaluator ``f(z, logs)`` with logs indexed by ``branch_points``."""
    if isinstance(c, RationalFn):
        if c.is_zero():
            return lambda z, logs: 0j
        f = c.scalar_evaluator()
        return lambda z, logs: f(z)
    pp: PowerProduct = c
    if pp.is_rational():
        f = pp.as_rational().scalar_evaluator()
        return lambda z, logs: f(z)
    idx = []
    for p, _ in pp.factors:
        for k, q in enumerate(branch_points):
            if abs(p - q) <= 1e-12 * max(1.0, abs(q)):
                idx.append(k)
                break
        else:
            raise ValueError("branch point missing from the global list")
    alphas = pp.exponents
    tail = pp.tail.scalar_evaluator()
    t = pp.t
    pts = pp.branch_points

    def f(z, logs):
        s = 0j
        if logs is None:
            for p, a in zip(pts, alphas):
                s += a * cmath.log(z - p)
        else:
            for k, a in zip(idx, alphas):
                s += a * logs[k]
        return t * tail(z) * cmath.exp(s)

    return f


@dataclass
class LiftSystem:
    """Everything the stepper needs: the form, four entry evaluators, the
    branch points whose logarithms are continued, and the singular set."""

    form: str  # "left" or "right"
    entries: tuple
    branch_points: list
    singular_points: list
    g_eval: Optional[Callable] = None
    Q_eval: Optional[Callable] = None
    data: Optional[SurfaceData] = None

    def coefficient(self, z: complex, logs=None) -> tuple:
        e = self.entries
        return (e[0](z, logs), e[1](z, logs), e[2](z, logs), e[3](z, logs))

    def initial_logs(self, z: complex) -> list:
        return [cmath.log(z - p) for p in self.branch_points]

    def nearest_singular_distance(self, z: complex) -> float:
        if not self.singular_points:
            return math.inf
        return min(abs(z - p) for p in self.singular_points)


def _finite_poles(c) -> list[complex]:
    if isinstance(c, RationalFn):
        return [r for r, _ in c.poles()]
    pp = as_power_product(c)
    return [r for r, _ in pp.tail.poles()] + [p for p, a in pp.factors if a < 0]


def build_system(data: SurfaceData, form: str | None = None) -> LiftSystem:
    """Lift system for ``data``; ``form`` picks the Gauss ("left") or
    Weierstrass ("right") description when both are present."""
    if form is None:
        form = "left" if data.gauss is not None else "right"
    sing: list[complex] = [complex(p) for p in data.punctures if not is_inf(p)]
    if form == "left":
        if data.gauss is None:
            raise ValidationError("no (G, Q) data for the left form")
        G, Q = data.gauss.G, data.gauss.Q
        Qc = Q.coefficient if isinstance(Q.coefficient, RationalFn) else Q.coefficient.as_rational()
        R = Qc / G.deriv()
        GR = G * R
        entries_c = (GR, -(G * GR), R, -GR)
        branch: list[complex] = []
        Qeval = Qc.scalar_evaluator()
        g_eval = None
    elif form == "right":
        if data.weierstrass is None:
            raise ValidationError("no (g, omega) data for the right form")
        g, om = data.weierstrass.g, data.weierstrass.omega.coefficient
        if isinstance(g, RationalFn) and isinstance(om, RationalFn):
            entries_c = (g * om, -(g * g * om), om, -(g * om))
        else:
            gp, op = as_power_product(g), as_power_product(om)
            entries_c = (gp * op, -(gp * gp * op), op, -(gp * op))
        branch = []
        for c in list(entries_c) + [g]:
            if isinstance(c, PowerProduct):
                for p in c.branch_points:
                    if not any(abs(p - q) <= 1e-12 * max(1.0, abs(q)) for q in branch):
                        branch.append(p)
        Q = data.weierstrass.hopf()
        Qeval = Q.coefficient.scalar_evaluator()
        g_eval = _entry_evaluator(g, branch) if not (isinstance(g, RationalFn) and g.is_zero()) else (lambda z, logs: 0j)
    else:
        raise ValueError(f"unknown form {form!r}")
    for c in entries_c:
        for p in _finite_poles(c):
            if not any(abs(p - q) < 1e-9 * max(1.0, abs(q)) for q in sing):
                sing.append(p)
    for p in branch:
        if not any(abs(p - q) < 1e-9 * max(1.0, abs(q)) for q in sing):
            sing.append(p)
    entries = tuple(_entry_evaluator(c, branch) for c in entries_c)
    return LiftSystem(form, entries, branch, sing, g_eval, lambda z: Qeval(z), data)


def coefficient_matrix(data_or_system, z: complex, logs=None) -> np.ndarray:
    """The traceless coefficient matrix at ``z`` (numpy array)."""
    sysm = data_or_system if isinstance(data_or_system, LiftSystem) else build_system(data_or_system)
    if sysm.nearest_singular_distance(z) == 0:
        raise SingularPoint(f"{z} is singular")
    a = sysm.coefficient(complex(z), logs)
    return np.array([[a[0], a[1]], [a[2], a[3]]])


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    kind: str  # "line" or "arc"
    a: complex = 0j  # line start, or arc center
    b: complex = 0j  # line end
    radius: float = 0.0
    theta0: float = 0.0
    dtheta: float = 0.0

    @classmethod
    def line(cls, a, b) -> "Segment":
        return cls("line", complex(a), complex(b))

    @classmethod
    def arc(cls, center, radius, theta0, dtheta) -> "Segment":
        return cls("arc", complex(center), 0j, float(radius), float(theta0), float(dtheta))

    def point(self, s: float) -> complex:
        if self.kind == "line":
            return self.a + s * (self.b - self.a)
        return self.a + self.radius * cmath.exp(1j * (self.theta0 + s * self.dtheta))

    def velocity(self, s: float) -> complex:
        if self.kind == "line":
            return self.b - self.a
        return 1j * self.dtheta * self.radius * cmath.exp(1j * (self.theta0 + s * self.dtheta))

    @property
    def speed(self) -> float:
        if self.kind == "line":
            return abs(self.b - self.a)
        return abs(self.dtheta) * self.radius

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    def to_json(self) -> dict:
        if self.kind == "line":
            return {"line": [[self.a.real, self.a.imag], [self.b.real, self.b.imag]]}
        return {"arc": {"center": [self.a.real, self.a.imag], "radius": self.radius,
                        "theta0": self.theta0, "dtheta": self.dtheta}}


@dataclass
class PathSpec:
    segments: list
    clearance: float = 1e-6

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @classmethod
    def straight(cls, a, b) -> "PathSpec":
        return cls([Segment.line(a, b)])

    @property
    def length(self) -> float:
        return sum(s.speed for s in self.segments)

    def to_json(self) -> list:
        return [s.to_json() for s in self.segments]

    def min_clearance(self, points: Sequence[complex], samples: int = 400) -> float:
        best = math.inf
        for seg in self.segments:
            for p in points:
                if seg.kind == "line":
                    d = _point_segment_distance(p, seg.a, seg.b)
                else:
                    ss = np.linspace(0, 1, samples)
                    zz = seg.a + seg.radius * np.exp(1j * (seg.theta0 + ss * seg.dtheta))
                    d = float(np.min(np.abs(zz - p)))
                best = min(best, d)
        return best


def _point_segment_distance(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    L2 = abs(ab) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


# ---------------------------------------------------------------------------
# the stepper
# ---------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


@dataclass
class LiftState:
    z: complex
    F: np.ndarray
    branch_logs: list
    g_value: Optional[complex] = None
    steps: int = 0
    rejected: int = 0
    max_det_drift: float = 0.0


def _mul_left(A, F):
    a11, a12, a21, a22 = A
    f11, f12, f21, f22 = F
    return (a11 * f11 + a12 * f21, a11 * f12 + a12 * f22, a21 * f11 + a22 * f21, a21 * f12 + a22 * f22)


def _mul_right(A, F):
    a11, a12, a21, a22 = A
    f11, f12, f21, f22 = F
    return (f11 * a11 + f12 * a21, f11 * a12 + f12 * a22, f21 * a11 + f22 * a21, f21 * a12 + f22 * a22)


def _integrate_segment(system: LiftSystem, seg: Segment, F: tuple, logs: list, cfg: IntegratorConfig, stats: dict):
    mul = _mul_left if system.form == "left" else _mul_right
    coef = system.coefficient
    branch = system.branch_points
    speed = seg.speed
    if speed == 0:
        return F, logs
    atol, rtol = cfg.atol, cfg.rtol
    s = 0.0
    z0 = seg.point(0.0)
    h = min(1.0, cfg.h_init / max(speed, 1e-300) * 10)
    err_prev = 1e-4
    k1 = None
    while s < 1.0 - 1e-15:
        dist = system.nearest_singular_distance(z0)
        h_cap = cfg.clearance_fraction * dist / speed
        h = min(h, h_cap, 1.0 - s)
        if h < cfg.h_min:
            raise StepUnderflow(f"step {h:.3e} below minimum at z = {z0}")
        if branch:
            base_logs = logs
            zbase = z0

            def logs_at(z):
                return [L + cmath.log((z - p) / (zbase - p)) for L, p in zip(base_logs, branch)]
        else:

            def logs_at(z):
                return None

        def rhs(sv, y):
            z = seg.point(sv)
            v = seg.velocity(sv)
            A = coef(z, logs_at(z))
            d = mul(A, y)
            return (d[0] * v, d[1] * v, d[2] * v, d[3] * v)

        if k1 is None:
            k1 = rhs(s, F)
        ks = [k1]
        for i in range(1, 7):
            ai = _A[i]
            y = list(F)
            for j, aij in enumerate(ai):
                if aij:
                    kj = ks[j]
                    for q in range(4):
                        y[q] += h * aij * kj[q]
            ks.append(rhs(s + _C[i] * h, tuple(y)))
        ynew = list(F)
        err = [0j, 0j, 0j, 0j]
        for i in range(7):
            bi, ei = _B[i], _E[i]
            ki = ks[i]
            for q in range(4):
                if bi:
                    ynew[q] += h * bi * ki[q]
                if ei:
                    err[q] += h * ei * ki[q]
        en = 0.0
        for q in range(4):
            sc = atol + rtol * max(abs(F[q]), abs(ynew[q]))
            en = max(en, abs(err[q]) / sc)
        if en <= 1.0 or h <= cfg.h_min * 1.0001:
            # accept
            s_new = s + h
            z1 = seg.point(s_new)
            if branch:
                logs = [L + cmath.log((z1 - p) / (z0 - p)) for L, p in zip(logs, branch)]
            det = ynew[0] * ynew[3] - ynew[1] * ynew[2]
            drift = abs(det - 1)
            stats["max_det_drift"] = max(stats["max_det_drift"], drift)
            if drift > 1e-4:
                raise DetDrift(f"|det F - 1| = {drift:.3e}")
            k7 = ks[6]
            if cfg.renormalize:
                r = cmath.sqrt(det)
                if abs(r - 1) > abs(r + 1):
                    r = -r
                ynew = [x / r for x in ynew]
                k7 = tuple(x / r for x in k7)
            F = tuple(ynew)
            k1 = k7
            s = s_new
            z0 = z1
            stats["steps"] += 1
            en = max(en, 1e-10)
            fac = cfg.safety * en ** (-0.17) * err_prev ** 0.04
            fac = min(5.0, max(0.2, fac))
            err_prev = en
            h = h * fac
            if stats["steps"] > cfg.max_steps:
                raise StepUnderflow("maximum number of steps exceeded")
        else:
            stats["rejected"] += 1
            fac = max(0.2, cfg.safety * en ** (-0.2))
            h = h * fac
    return F, logs


def integrate_lift(
    data_or_system,
    path: PathSpec,
    F0=None,
    logs0=None,
    cfg: IntegratorConfig | None = None,
    form: str | None = None,
    check_clearance: bool = True,
) -> LiftState:
    """Integrate the lift along ``path`` starting from ``F0`` (identity default)."""
    system = data_or_system if isinstance(data_or_system, LiftSystem) else build_system(data_or_system, form)
    cfg = cfg or IntegratorConfig()
    F0 = np.eye(2, dtype=complex) if F0 is None else np.asarray(F0, dtype=complex)
    if abs(det2(F0) - 1) > cfg.det_tol:
        from .errors import NonUnimodular

        raise NonUnimodular("initial value is not unimodular")
    if check_clearance and system.singular_points:
        c = path.min_clearance(system.singular_points)
        if c < path.clearance:
            raise SingularApproach(f"path passes within {c:.3e} of a singular point")
    logs = list(logs0) if logs0 is not None else system.initial_logs(path.start)
    F = (complex(F0[0, 0]), complex(F0[0, 1]), complex(F0[1, 0]), complex(F0[1, 1]))
    stats = {"steps": 0, "rejected": 0, "max_det_drift": 0.0}
    for seg in path.segments:
        F, logs = _integrate_segment(system, seg, F, logs, cfg, stats)
    z = path.end
    Fm = np.array([[F[0], F[1]], [F[2], F[3]]])
    g_val = system.g_eval(z, logs) if system.g_eval is not None else None
    return LiftState(z, Fm, logs, g_val, stats["steps"], stats["rejected"], stats["max_det_drift"])


def dual_lift(F: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """``F^-1``, the lift of the dual surface."""
    if abs(det2(F) - 1) > tol:
        from .errors import NonUnimodular

        raise NonUnimodular("dual lift needs det F = 1")
    return inv2(F)


def lift_derivative(system: LiftSystem, z: complex, F: np.ndarray, logs=None) -> np.ndarray:
    """``dF/dz`` at ``z`` straight from the ODE."""
    A = coefficient_matrix(system, z, logs)
    return A @ F if system.form == "left" else F @ A


def gauss_maps_from_lift(system: LiftSystem, z: complex, F: np.ndarray, logs=None, tol: float = 1e-8) -> dict:
    """Recover ``g`` and ``G`` at ``z`` from the exact derivative of ``F``.

    Both quotient pairs are computed; their relative disagreement is
    returned as ``g_mismatch`` / ``G_mismatch``.
    """
    dF = lift_derivative(system, z, F, logs)
    out = {}
    if abs(dF[0, 0]) < 1e-300 and abs(dF[1, 0]) < 1e-300:
        raise IndeterminateQuotient("first column of dF vanishes")
    g1 = -dF[0, 1] / dF[0, 0] if dF[0, 0] != 0 else INF
    g2 = -dF[1, 1] / dF[1, 0] if dF[1, 0] != 0 else INF
    G1 = dF[0, 0] / dF[1, 0] if dF[1, 0] != 0 else INF
    G2 = dF[0, 1] / dF[1, 1] if dF[1, 1] != 0 else INF
    # report the quotient with the larger denominator first
    if abs(dF[1, 0]) > abs(dF[0, 0]):
        g1, g2 = g2, g1
    if abs(dF[1, 1]) > abs(dF[1, 0]):
        G1, G2 = G2, G1
    out["g"], out["g_alt"] = g1, g2
    out["G"], out["G_alt"] = G1, G2
    out["g_mismatch"] = _rel_mismatch(g1, g2)
    out["G_mismatch"] = _rel_mismatch(G1, G2)
    return out


def _rel_mismatch(a, b) -> float:
    if a is INF or b is INF:
        return 0.0 if (a is INF and b is INF) else math.inf
    return abs(a - b) / max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# monodromy
# ---------------------------------------------------------------------------


@dataclass
class MonodromyRep:
    basepoint: complex
    generators: list  # (puncture, 2x2 matrix)
    form: str = "right"
    relation_defect: float = math.nan

    def matrices(self) -> list[np.ndarray]:
        return [M for _, M in self.generators]


def loop_path(system: LiftSystem, puncture, basepoint: complex) -> PathSpec:
    """The standard loop around ``puncture`` based at ``basepoint``."""
    b = complex(basepoint)
    others = [q for q in system.singular_points]
    if is_inf(puncture):
        R = 2.0 * max([abs(q) for q in others] + [abs(b), 0.5]) + 1.0
        u = b / abs(b) if abs(b) > 0 else 1.0
        c0 = R * u
        th = cmath.phase(u)
        # counterclockwise around infinity is clockwise in z
        return PathSpec([Segment.line(b, c0), Segment.arc(0, R, th, -2 * math.pi), Segment.line(c0, b)])
    p = complex(puncture)
    rest = [q for q in others if abs(q - p) > 1e-12 * max(1.0, abs(p))]
    r = 0.5 * min([abs(q - p) for q in rest] + [math.inf])
    dbp = abs(b - p)
    if not math.isfinite(r):
        r = 0.5 * dbp
    r = min(r, 0.5 * dbp)
    u = (b - p) / dbp
    c0 = p + r * u
    th = cmath.phase(u)
    return PathSpec([Segment.line(b, c0), Segment.arc(p, r, th, 2 * math.pi), Segment.line(c0, b)])


def monodromy(data_or_system, puncture, basepoint: complex, cfg: IntegratorConfig | None = None, form: str | None = None) -> np.ndarray:
    """``M = F(end)`` around the standard loop, starting from ``F = id``."""
    system = data_or_system if isinstance(data_or_system, LiftSystem) else build_system(data_or_system, form)
    path = loop_path(system, puncture, basepoint)
    st = integrate_lift(system, path, None, None, cfg)
    return st.F


def _ray_angle(puncture, b: complex) -> float:
    if is_inf(puncture):
        u = b / abs(b) if abs(b) > 0 else 1.0
        return cmath.phase(u)
    return cmath.phase(complex(puncture) - b)


def choose_basepoint(system: LiftSystem, punctures) -> complex:
    """A basepoint whose loop rays keep a comfortable distance from every
    singular point."""
    pts = system.singular_points
    scale = max([abs(q) for q in pts] + [1.0])
    best, best_score = None, -1.0
    for ring in (0.37, 0.61, 0.83, 1.17):
        for k in range(24):
            b = scale * ring * cmath.exp(1j * (2 * math.pi * k / 24 + 0.2137))
            if min(abs(b - q) for q in pts) < 0.05 * scale:
                continue
            score = math.inf
            for p in punctures:
                if is_inf(p):
                    continue
                p = complex(p)
                for q in pts:
                    if abs(q - p) < 1e-12:
                        continue
                    score = min(score, _point_segment_distance(q, b, p))
            score = min(score, min(abs(b - q) for q in pts))
            if score > best_score:
                best, best_score = b, score
    return best


def full_representation(
    data_or_system,
    basepoint: complex | None = None,
    cfg: IntegratorConfig | None = None,
    form: str | None = None,
    tol: float = 1e-7,
    check_relation: bool = True,
) -> MonodromyRep:
    """Monodromy generators for every puncture, ordered by ray argument.

    The product taken in reverse loop order must be +/- identity.
    """
    system = data_or_system if isinstance(data_or_system, LiftSystem) else build_system(data_or_system, form)
    data = system.data
    punctures = data.punctures if data is not None else []
    b = choose_basepoint(system, punctures) if basepoint is None else complex(basepoint)
    gens = []
    for p in punctures:
        gens.append((p, monodromy(system, p, b, cfg)))
    gens.sort(key=lambda pm: _ray_angle(pm[0], b))
    prod = np.eye(2, dtype=complex)
    for _, M in gens:
        # F(end) along a composite loop is the product in reverse loop order
        # for both forms, since the true lift satisfies F o tau = F rho(tau)
        prod = M @ prod
    defect = min(np.linalg.norm(prod - np.eye(2)), np.linalg.norm(prod + np.eye(2)))
    rep = MonodromyRep(b, gens, system.form, float(defect))
    if check_relation and defect > tol:
        raise RelationViolated(f"ordered product deviates from +/-id by {defect:.3e}")
    return rep
