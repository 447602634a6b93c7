"""Period problem: unitarizability and reducibility of monodromy
representations, one-parameter period scans, and the reducible deformation
``g -> t g``.

A representation is conjugate into SU(2) exactly when its generators share
a positive definite invariant Hermitian form ``H``: ``M_j* H M_j = H``.
Over the real four-dimensional space of Hermitian matrices these equations
are a homogeneous linear system; its smallest singular value is the defect
used everywhere below.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .algebra import I2, adjoint, det2, su2_defect
from .config import IntegratorConfig
from .errors import CMC1Error, ValidationError
from .integrate import MonodromyRep, full_representation
from .mero import PowerProduct, RationalFn

UNITARY_THRESHOLD = 1e-6
BORDERLINE_THRESHOLD = 1e-4
MAX_CONDITION = 1e6


class NoRootFound(CMC1Error):
    def __init__(self, message: str, result: "PeriodScanResult | None" = None):
        super().__init__(message)
        self.result = result


class Verdict(str, Enum):
    UNITARIZABLE = "unitarizable"
    NOT_UNITARIZABLE = "not_unitarizable"
    BORDERLINE = "borderline"


class ReducibilityClass(str, Enum):
    IRREDUCIBLE = "irreducible"
    H1_REDUCIBLE = "H1_reducible"
    H3_REDUCIBLE = "H3_reducible"


@dataclass
class UnitarizabilityReport:
    defect: float
    H: Optional[np.ndarray]
    definite: bool
    P: Optional[np.ndarray]
    verdict: Verdict
    trace_filter: bool = True
    condition: float = math.inf
    route: str = "linear"

    def to_json(self) -> dict:
        from .algebra import matrix_to_json

        return {
            "defect": self.defect,
            "verdict": self.verdict.value,
            "definite": self.definite,
            "trace_filter": self.trace_filter,
            "condition": self.condition if math.isfinite(self.condition) else None,
            "route": self.route,
            "H": matrix_to_json(self.H) if self.H is not None else None,
            "P": matrix_to_json(self.P) if self.P is not None else None,
        }


_HERM_BASIS = (
    np.array([[1, 0], [0, 0]], dtype=complex),
    np.array([[0, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, 1j], [-1j, 0]], dtype=complex),
)


def _generators(rep) -> list[np.ndarray]:
    if isinstance(rep, MonodromyRep):
        return [np.asarray(M, dtype=complex) for M in rep.matrices()]
    return [np.asarray(M, dtype=complex) for M in rep]


def _is_pm_identity(M: np.ndarray, tol: float) -> bool:
    return min(np.linalg.norm(M - I2), np.linalg.norm(M + I2)) <= tol


def _common_eigenbasis(Ms: Sequence[np.ndarray], tol: float) -> Optional[np.ndarray]:
    """Columns of a basis diagonalizing every ``M``, or None."""
    for i in range(len(Ms)):
        for j in range(i):
            A, B = Ms[i], Ms[j]
            scale = max(1.0, np.linalg.norm(A) * np.linalg.norm(B))
            if np.linalg.norm(A @ B - B @ A) > tol * scale:
                return None
    pivot = None
    for M in Ms:
        if not _is_pm_identity(M, tol):
            pivot = M
            break
    if pivot is None:
        return np.eye(2, dtype=complex)
    w, V = np.linalg.eig(pivot)
    if abs(w[0] - w[1]) <= math.sqrt(tol) * max(1.0, abs(w[0])):
        return None  # parabolic or scalar-like: not diagonalizable
    Vi = np.linalg.inv(V)
    for M in Ms:
        D = Vi @ M @ V
        if abs(D[0, 1]) + abs(D[1, 0]) > tol * max(1.0, np.linalg.norm(M)) * np.linalg.cond(V):
            return None
    return V


def reducibility(rep, tol: float = 1e-7) -> ReducibilityClass:
    Ms = _generators(rep)
    if all(_is_pm_identity(M, tol) for M in Ms):
        return ReducibilityClass.H3_REDUCIBLE
    if _common_eigenbasis(Ms, tol) is not None:
        return ReducibilityClass.H1_REDUCIBLE
    return ReducibilityClass.IRREDUCIBLE


def _trace_filter(Ms, tol: float) -> bool:
    for M in Ms:
        tr = np.trace(M)
        if abs(tr.imag) > tol * max(1.0, abs(tr)) or abs(tr.real) > 2 + tol:
            return False
    return True


def hermitian_system(Ms: Sequence[np.ndarray]) -> np.ndarray:
    """Real ``(8k, 4)`` matrix of the equations ``M* H M - H = 0``."""
    blocks = []
    for M in Ms:
        cols = []
        for B in _HERM_BASIS:
            E = adjoint(M) @ B @ M - B
            cols.append(np.concatenate([E.real.ravel(), E.imag.ravel()]))
        blocks.append(np.array(cols).T)
    return np.vstack(blocks)


def _sqrt_pd(H: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    R = V @ np.diag(np.sqrt(w)) @ adjoint(V)
    # det R = sqrt(det H); rescale to determinant one
    return R / np.prod(w) ** 0.25


def _verdict(defect: float, definite: bool, cond: float, filt: bool) -> Verdict:
    if definite and filt and cond < MAX_CONDITION:
        if defect < UNITARY_THRESHOLD:
            return Verdict.UNITARIZABLE
        if defect < BORDERLINE_THRESHOLD:
            return Verdict.BORDERLINE
    return Verdict.NOT_UNITARIZABLE


def unitarizability(rep, tol: float = 1e-7) -> UnitarizabilityReport:
    """Decide whether the generators are simultaneously conjugate into SU(2).

    Reducible representations go through their diagonalizing basis, since
    their invariant forms are not unique; everything else uses the
    smallest singular vector of :func:`hermitian_system`.
    """
    Ms = _generators(rep)
    filt = _trace_filter(Ms, 1e-6)
    cls = reducibility(Ms, tol)
    if cls is ReducibilityClass.H3_REDUCIBLE:
        return UnitarizabilityReport(0.0, I2.copy(), True, I2.copy(), Verdict.UNITARIZABLE, filt, 1.0, "trivial")
    if cls is ReducibilityClass.H1_REDUCIBLE:
        V = _common_eigenbasis(Ms, tol)
        Vi = np.linalg.inv(V)
        defect = 0.0
        for M in Ms:
            D = Vi @ M @ V
            defect = max(defect, abs(abs(D[0, 0]) - 1.0), abs(abs(D[1, 1]) - 1.0))
        P = Vi / np.sqrt(det2(Vi))
        H = adjoint(P) @ P
        cond = float(np.linalg.cond(H))
        return UnitarizabilityReport(defect, H, True, P, _verdict(defect, True, cond, filt), filt, cond, "diagonal")
    A = hermitian_system(Ms)
    _, s, vt = np.linalg.svd(A)
    defect = float(s[-1])
    h = vt[-1]
    H = sum(c * B for c, B in zip(h, _HERM_BASIS))
    H = 0.5 * (H + adjoint(H))
    if np.trace(H).real < 0:
        H = -H
    w = np.linalg.eigvalsh(H)
    definite = bool(w[0] > 0)
    cond = float(w[-1] / w[0]) if definite else math.inf
    P = _sqrt_pd(H) if definite else None
    return UnitarizabilityReport(defect, H, definite, P, _verdict(defect, definite, cond, filt), filt, cond, "linear")


def conjugated(rep, P: np.ndarray) -> list[np.ndarray]:
    Pi = np.linalg.inv(P)
    return [P @ M @ Pi for M in _generators(rep)]


def max_su2_defect(rep, P: np.ndarray) -> float:
    return max(su2_defect(M) for M in conjugated(rep, P))


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------


@dataclass
class PeriodRoot:
    value: float
    defect: float
    definite: bool
    verdict: str


@dataclass
class PeriodScanResult:
    parameter: str
    values: list
    defects: list
    minima: list = field(default_factory=list)  # PeriodRoot for every refined minimum
    roots: list = field(default_factory=list)  # refined minima that pass

    def to_json(self) -> dict:
        return {
            "parameter": self.parameter,
            "values": list(self.values),
            "defects": [None if not math.isfinite(d) else d for d in self.defects],
            "minima": [r.__dict__ for r in self.minima],
            "roots": [r.__dict__ for r in self.roots],
        }

    def table(self) -> str:
        """Two-column delimited table followed by a root list."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.parameter, "defect"])
        for v, d in zip(self.values, self.defects):
            w.writerow([repr(float(v)), repr(float(d))])
        buf.write("# roots: " + ", ".join(f"{r.value:.10g}" for r in self.roots) + "\n")
        return buf.getvalue()


@dataclass
class _Evaluator:
    """Picklable ``parameter -> unitarizability report`` for worker pools."""

    builder: Callable
    cfg: Optional[IntegratorConfig] = None

    def report(self, x: float) -> Optional[UnitarizabilityReport]:
        try:
            data = self.builder(x)
            rep = full_representation(data, cfg=self.cfg, check_relation=False)
            if rep.relation_defect > 1e-6:
                return None
            return unitarizability(rep)
        except CMC1Error:
            return None

    def __call__(self, x: float) -> float:
        r = self.report(x)
        return math.inf if r is None else r.defect


def scan_defect(builder: Callable, values: Sequence[float], workers: int = 1, cfg: IntegratorConfig | None = None) -> list[float]:
    ev = _Evaluator(builder, cfg)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(ev, values))
    return [ev(v) for v in values]


def period_solve(
    builder: Callable,
    lo: float,
    hi: float,
    step: float | None = None,
    points: int | None = None,
    parameter: str = "p",
    workers: int = 1,
    threshold: float = UNITARY_THRESHOLD,
    xtol: float = 1e-9,
    cfg: IntegratorConfig | None = None,
    raise_on_empty: bool = False,
) -> PeriodScanResult:
    """Scan the unitarizability defect over ``[lo, hi]`` and refine minima.

    Local minima of the grid are bracketed by their neighbours and refined
    by golden-section search.  A refined minimum is a root when its defect
    is below ``threshold`` and the invariant form is positive definite and
    well conditioned (a nearly degenerate form signals a fixed point on
    the ideal boundary, not an SU(2) conjugate).
    """
    if points is None:
        step = step if step is not None else (hi - lo) / 100
        points = int(round((hi - lo) / step)) + 1
    values = list(np.linspace(lo, hi, points))
    defects = scan_defect(builder, values, workers, cfg)
    ev = _Evaluator(builder, cfg)
    result = PeriodScanResult(parameter, values, defects)
    d = np.array(defects)
    for i in range(1, len(values) - 1):
        if not (np.isfinite(d[i - 1]) and np.isfinite(d[i]) and np.isfinite(d[i + 1])):
            continue
        if d[i] <= d[i - 1] and d[i] < d[i + 1]:
            a, b, c = values[i - 1], values[i], values[i + 1]
            res = minimize_scalar(ev, bracket=(a, b, c), method="golden", tol=xtol)
            x = float(res.x)
            if not (a <= x <= c):
                continue
            rep = ev.report(x)
            if rep is None:
                continue
            root = PeriodRoot(x, rep.defect, rep.definite, rep.verdict.value)
            result.minima.append(root)
            if rep.defect < threshold and rep.definite and rep.condition < MAX_CONDITION and rep.trace_filter:
                result.roots.append(root)
    if raise_on_empty and not result.roots:
        raise NoRootFound("no unitarizable parameter found on the scan", result)
    return result


def reducible_deformation(g, t: float):
    """``t g``; the monodromy representation of the lift is unchanged."""
    if not t > 0:
        raise ValidationError("deformation parameter must be positive")
    if isinstance(g, (RationalFn, PowerProduct)):
        return g * float(t)
    raise TypeError(type(g))
