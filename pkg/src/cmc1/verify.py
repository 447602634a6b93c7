"""Executable checks for the finite-total-curvature case analyses.

Two kinds of routine live here:

* :func:`enumerate_types` lists the end-order tuples ``(d_1, ..., d_n)`` that
  survive the curvature bookkeeping for a given budget ``TA <= 2 pi rho``,
  optionally followed by named nonexistence results.
* ``verify_*`` routines recompute the algebra behind individual
  nonexistence arguments on parameter grids and return a
  :class:`CaseReport` whose verdict is backed by the quantities it stores.

Nothing here is a symbolic proof: every report states that it was
verified on a grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError
from .mero import Differential, Poly, PowerProduct, RationalFn, frobenius_log_term


class PreconditionViolated(ValidationError):
    pass


# The odd-sum bound on conical metrics is used but not re-derived here.
ODD_SUM_AXIOM = (
    "odd-sum bound: on the sphere, if the integer orders of a conical metric with "
    "exactly two non-integer orders sum to an odd number, the two non-integer orders sum to at least -1"
)


@dataclass
class CaseReport:
    case: str
    quantities: dict
    finding: str
    verdict: str
    grid: Optional[str] = None
    axioms: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict in ("confirmed", "consistent")

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "verdict": self.verdict,
            "finding": self.finding,
            "grid": self.grid,
            "axioms": list(self.axioms),
            "quantities": _jsonable(self.quantities),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        return x.real if x.imag == 0 else [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def mu_grid(points: int = 101) -> np.ndarray:
    """``points`` values strictly inside ``(-1, 0)``."""
    return np.linspace(-1.0, 0.0, points + 2)[1:-1]


# ---------------------------------------------------------------------------
# type enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeCandidate:
    genus: int
    ends: tuple
    constraints: tuple
    ta_min_over_2pi: float
    ta_min_strict: bool
    ta_max_over_2pi: float

    @property
    def label(self) -> str:
        return type_label(self.genus, self.ends)

    def to_json(self) -> dict:
        return {
            "type": self.label,
            "genus": self.genus,
            "ends": list(self.ends),
            "constraints": list(self.constraints),
            "ta_window_over_2pi": [self.ta_min_over_2pi, self.ta_max_over_2pi],
            "lower_bound_strict": self.ta_min_strict,
        }


def type_label(genus: int, ends) -> str:
    letter = "O" if genus == 0 else ("I" if genus == 1 else f"G{genus}")
    return f"{letter}({','.join(str(int(d)) for d in ends)})"


def normalize_type(genus: int, ends) -> tuple:
    return (int(genus), tuple(sorted((int(d) for d in ends), reverse=True)))


def _int_mu_floor(d: int) -> int:
    """Smallest admissible integer ``mu`` at an end of order ``d``.

    Integer ``mu`` is nonnegative, and ``mu - d >= 2``.
    """
    return max(0, d + 2)


def _noninteger_inf(d: int) -> float:
    """Infimum of ``mu - d`` over non-integer ``mu`` (never attained).

    Needs ``mu > -1`` and ``mu - d > 1``.
    """
    return float(max(1, -1 - d))


def _min_cost(genus: int, ends: tuple, rho: float):
    """Smallest achievable ``TA / 2 pi`` and whether it is a strict bound.

    Ends with ``d >= -1`` carry integer ``mu``.  On the sphere exactly one
    non-integer order is impossible, and when every order is an integer the
    secondary Gauss map is rational: ``TA / 2 pi = 2 deg g`` and every branch
    order is at most ``deg g - 1``.
    Returns ``None`` when nothing fits under ``rho``.
    """
    n = len(ends)
    optional = [j for j, d in enumerate(ends) if d <= -2]
    best = None
    for k in range(len(optional) + 1):
        if genus == 0 and k == 1:
            continue
        for S in itertools.combinations(optional, k):
            if k:
                cost = 2 * genus - 2 + sum(
                    _noninteger_inf(ends[j]) if j in S else _int_mu_floor(ends[j]) - ends[j] for j in range(n)
                )
                if cost < rho and (best is None or cost < best[0]):
                    best = (cost, True)
                continue
            if genus == 0:
                lo = sum(_int_mu_floor(d) for d in ends)
                for D in range(1, int(math.floor(rho / 2)) + 1):
                    target = 2 * D + 2 + sum(ends)
                    if lo <= target <= n * (D - 1) and all(_int_mu_floor(d) <= D - 1 for d in ends):
                        if best is None or 2 * D < best[0] or (2 * D == best[0] and best[1]):
                            best = (float(2 * D), False)
                        break
            else:
                cost = 2 * genus - 2 + sum(_int_mu_floor(d) - d for d in ends)
                if 0 < cost <= rho and (best is None or cost < best[0]):
                    best = (float(cost), False)
    return best


def _lemma_filters(genus: int, ends: tuple, rho: float) -> Optional[list]:
    """Single-end, forcing and genus-two filters; ``None`` if the tuple fails."""
    n = len(ends)
    used = ["euler_bound: 2 genus < rho + 1 and n < rho - 2 genus + 2"]
    if 4 * genus - 4 - sum(ends) < 0:
        return None
    used.append("umbilic_count: sum of umbilic orders = 4 genus - 4 - sum d >= 0")
    if n == 1:
        d = ends[0]
        if not (2 * genus - rho - 3 < d <= 4 * genus - 4):
            return None
        if d == -2:
            return None
        used.append("single_end: 2 genus - rho - 3 < d <= 4 genus - 4 and d != -2 (zero flux)")
        if genus == 1:
            if not (-rho - 1 < d <= -3):
                return None
            used.append("genus_one_single_end: -rho - 1 < d <= -3")
        if float(n) == rho + 1 - 2 * genus:
            if d < 0:
                return None
            used.append("extremal_single_end: d >= 0 and mu = d + 2")
    if n >= 2 and float(n) == rho + 1 - 2 * genus:
        if any(d != -2 for d in ends):
            return None
        used.append("extremal_end_count: all d = -2")
    if genus == 2 and n == 1 and rho <= 4:
        # a regular end with d >= 0 would need deg G <= 2 on genus two,
        # so mu# <= 1 and d <= mu# - 2 < 0
        return None
    return used


# Nonexistence results from the individual case analyses, valid under TA <= 8 pi.
def _excl_o_m1m3_m2m3(g, e):
    return g == 0 and e in ((-1, -3), (-2, -3))


def _excl_genus1_two_ends(g, e):
    if g != 1 or len(e) != 2:
        return False
    d1, d2 = e
    if d1 >= -2 and d2 >= -2 and (-2 in e) and e != (-2, -2):
        return True
    if d1 >= -1 and d2 >= -1 and (d1 >= 0) != (d2 >= 0):
        return True
    return e == (0, 0)


NONEXISTENCE_RULES: list[tuple[str, Callable[[int, tuple], bool], str]] = [
    (
        "two_ends_one_irregular",
        _excl_o_m1m3_m2m3,
        "O(-1,-3) and O(-2,-3): with mu_1 integer the dual classification leaves nothing; otherwise d_1 + d_2 = -5 is impossible",
    ),
    ("O(0,-2,-3)", lambda g, e: g == 0 and e == (0, -2, -3), "residue system and log term force a = b (see verify_A13)"),
    ("O(1,-2,-3)", lambda g, e: g == 0 and e == (1, -2, -3), "log term equals -(mu+2)/3 != 0 (see verify_A14)"),
    ("O(2,-2,-2,-2)", lambda g, e: g == 0 and e == (2, -2, -2, -2), "phi > 1 on the open domain (see verify_A18)"),
    (
        "genus_one_two_ends",
        _excl_genus1_two_ends,
        "a d = -2 end pairs only with another; zero flux iff d >= 0 for embedded ends; I(0,0) gives G only two branch points",
    ),
]

# Surfaces with TA <= 4 pi: horosphere, Enneper cousins and catenoid cousins.
SMALL_BUDGET_TYPES = {(0, (0,)), (0, (-4,)), (0, (-2, -2))}


def enumerate_types(rho: float, case_analyses: bool = True, max_abs_d: Optional[int] = None) -> list[TypeCandidate]:
    """End-order tuples compatible with ``TA <= 2 pi rho``.

    With ``case_analyses`` the named nonexistence results (valid for
    ``rho <= 4``) and the classification for ``rho <= 2`` are applied on top.
    The horosphere ``O(0)`` is always present.
    """
    if rho <= 0:
        raise ValidationError("rho must be positive")
    out: dict = {}
    horo = TypeCandidate(0, (0,), ("totally_umbilic",), 0.0, False, float(rho))
    out[(0, (0,))] = horo
    genus = 0
    while 2 * genus < rho + 1:
        n = 1
        while n < rho - 2 * genus + 2:
            top = 4 * genus + 2 * n
            bottom = -int(math.floor(rho)) - 3 if max_abs_d is None else -max_abs_d
            for ends in itertools.combinations_with_replacement(range(top, bottom - 1, -1), n):
                used = _lemma_filters(genus, ends, rho)
                if used is None:
                    continue
                best = _min_cost(genus, ends, rho)
                if best is None:
                    continue
                used = used + ["per_end: mu > -1, mu - d > 1, integer mu needs mu - d >= 2, d >= -1 forces integer mu"]
                out[(genus, ends)] = TypeCandidate(genus, ends, tuple(used), best[0], best[1], float(rho))
            n += 1
        genus += 1
    cands = list(out.values())
    if case_analyses:
        if rho <= 4:
            cands = [c for c in cands if not any(rule(c.genus, c.ends) for _, rule, _ in NONEXISTENCE_RULES)]
        if rho <= 2:
            cands = [c for c in cands if (c.genus, c.ends) in SMALL_BUDGET_TYPES]
    cands.sort(key=lambda c: (c.genus, len(c.ends), tuple(-d for d in c.ends)))
    return cands


def excluded_types(rho: float) -> list[tuple[str, str]]:
    """Tuples removed by the nonexistence rules, with the rule name."""
    base = enumerate_types(rho, case_analyses=False)
    out = []
    for c in base:
        for name, rule, _ in NONEXISTENCE_RULES:
            if rho <= 4 and rule(c.genus, c.ends):
                out.append((c.label, name))
    return out


# Type column of the classification table for TA <= 8 pi (normalized tuples).
CLASSIFICATION_TABLE_TYPES = frozenset(
    {
        (0, (0,)),
        (0, (-4,)),
        (0, (-5,)),
        (0, (-6,)),
        (0, (-2, -2)),
        (0, (-1, -4)),
        (0, (-2, -4)),
        (0, (-2, -5)),
        (0, (-3, -3)),
        (0, (-3, -4)),
        (0, (0, -2, -2)),
        (0, (-1, -2, -3)),
        (0, (-1, -1, -2)),
        (0, (-1, -2, -2)),
        (0, (-2, -2, -2)),
        (0, (-2, -2, -3)),
        (0, (-2, -2, -4)),
        (0, (-2, -3, -3)),
        (0, (-2, -2, -2, -2)),
        (0, (0, -2, -2, -2)),
        (0, (-2, -2, -2, -3)),
        (0, (-1, -2, -2, -2)),
        (0, (1, -2, -2, -2)),
        (0, (-2, -2, -2, -2, -2)),
        (1, (-3,)),
        (1, (-4,)),
        (1, (-1, -1)),
        (1, (-2, -2)),
        (1, (-2, -3)),
        (1, (-2, -2, -2)),
    }
)


TABLE_RHO = 4.0


def table_comparison(rho: float = TABLE_RHO) -> CaseReport:
    """Compare the enumerator with the classification table.

    The table lists the types for ``rho = 4``; below that budget the
    enumerated set must be a subset of it, above it there is no reference.
    """
    got = {normalize_type(c.genus, c.ends) for c in enumerate_types(rho)}
    extra = sorted(got - CLASSIFICATION_TABLE_TYPES)
    missing = sorted(CLASSIFICATION_TABLE_TYPES - got)
    if rho > TABLE_RHO:
        scope, ok = "none", True
        finding, verdict = "no reference table above rho = 4; enumerated set reported only", "unchecked"
    elif rho < TABLE_RHO:
        scope, ok = "subset", not extra
        finding = "enumerated type set lies inside the table" if ok else "enumerated types outside the table"
        verdict = "consistent" if ok else "mismatch"
    else:
        scope, ok = "equal", not extra and not missing
        finding = "enumerated type set equals the classification table" if ok else "enumerated type set differs from the table"
        verdict = "confirmed" if ok else "mismatch"
    return CaseReport(
        "enumerate",
        {
            "rho": rho,
            "table_scope": scope,
            "count": len(got),
            "extra": [type_label(g, e) for g, e in extra],
            "missing": [type_label(g, e) for g, e in missing] if scope == "equal" else [],
            "types": [type_label(g, e) for g, e in sorted(got)],
            "excluded": excluded_types(rho),
        },
        finding,
        verdict,
    )


# ---------------------------------------------------------------------------
# O(0,-2,-3)
# ---------------------------------------------------------------------------


def a13_residue_equations(mu: float, a: complex, b: complex, q: complex) -> tuple[complex, complex]:
    """Vanishing residues of ``z^2 (z-1)^mu (z-q)/((z-a)^2 (z-b)^2)`` at ``a`` and ``b``."""
    ra = 2 / a + mu / (a - 1) + 1 / (a - q) - 2 / (a - b)
    rb = 2 / b + mu / (b - 1) + 1 / (b - q) - 2 / (b - a)
    return ra, rb


def a13_symmetric_system(mu: float, a: complex, b: complex, q: complex) -> tuple[complex, complex]:
    """The residue conditions rewritten in ``a + b`` and ``ab`` (valid for ``a != b``)."""
    s, p = a + b, a * b
    e1 = (mu + 1) * (a * a + b * b) - (mu * q + 1) * s - 2 * p + 2 * q
    e2 = (mu + 1) * s * p - 2 * (mu * q + q + 2) * p + 2 * q * s
    return e1, e2


def a13_log_condition(mu: float, a: complex, b: complex) -> complex:
    return mu + 2 - 2 / a - 2 / b


def a13_solve(mu: float) -> list[dict]:
    """All ``(a, b, q)`` with ``ab != 0`` solving the symmetric system and the log condition.

    The log condition gives ``a + b = (mu+2) ab / 2``; the second symmetric
    equation (divided by ``ab``) then fixes ``ab`` linearly in ``q`` and the
    first becomes a quadratic in ``q``.
    """
    k = (mu + 1) * (mu + 2)
    # p = ab = 2 (mu q + 4) / k  and  s = (mu + 2) p / 2, both affine in q
    p_c = np.array([8.0 / k, 2.0 * mu / k])  # [const, q]
    s_c = (mu + 2) / 2 * p_c
    P = np.polynomial.Polynomial
    p_poly, s_poly, q_poly = P(p_c), P(s_c), P([0.0, 1.0])
    e1 = (mu + 1) * (s_poly**2 - 2 * p_poly) - (mu * q_poly + 1) * s_poly - 2 * p_poly + 2 * q_poly
    # the q^2 terms cancel up to rounding; drop them before root finding
    e1 = e1.trim(tol=1e-12 * float(np.max(np.abs(e1.coef))))
    sols = []
    for q in e1.roots():
        q = complex(q)
        p = complex(p_poly(q))
        s = complex(s_poly(q))
        d2 = complex(s * s - 4 * p)
        disc = 0j if abs(d2) < 1e-12 * max(1.0, abs(s) ** 2) else np.sqrt(d2)
        a, b = (s + disc) / 2, (s - disc) / 2
        if abs(p) < 1e-12:
            continue
        sols.append({"q": q, "a": a, "b": b})
    return sols


def verify_A13(points: int = 101, log_samples: int = 3, seed: int = 0) -> CaseReport:
    """Nonexistence for O(0,-2,-3) with ``TA <= 8 pi``, checked on a mu-grid."""
    grid = mu_grid(points)
    rng = np.random.default_rng(seed)
    max_dev = 0.0
    min_branch2 = math.inf
    max_log_mismatch = 0.0
    all_degenerate = True
    rows = []
    for mu in grid:
        target = 4 / (mu + 2)
        sols = a13_solve(mu)
        dev = max(max(abs(s["a"] - target), abs(s["b"] - target), abs(s["q"] - target)) for s in sols)
        degenerate = all(abs(s["a"] - s["b"]) < 1e-6 for s in sols)
        all_degenerate &= degenerate and bool(sols)
        max_dev = max(max_dev, dev)
        # the second branch: residue condition at q evaluated on q = 4/(mu+2)
        r2 = (mu + 2) * (mu + 1) * target**2 - 4 * (mu + 1) * target + 2
        min_branch2 = min(min_branch2, abs(r2))
        rows.append({"mu": float(mu), "solutions": len(sols), "deviation": dev, "branch2_residual": r2})
    # log-term reproduction at random (a, b, q): the Frobenius obstruction at 0
    # equals -(mu + 2 - 2/a - 2/b)
    for mu in grid[:: max(1, len(grid) // 10)]:
        for _ in range(log_samples):
            a, b, q = (complex(*rng.uniform(-2, 2, 2)) + 3 for _ in range(3))
            obs = a13_frobenius_obstruction(mu, a, b, q)
            max_log_mismatch = max(max_log_mismatch, abs(obs + a13_log_condition(mu, a, b)))
    ok = all_degenerate and max_dev < 1e-8 and min_branch2 > 1e-6 and max_log_mismatch < 1e-8
    return CaseReport(
        "A13",
        {
            "max_deviation_from_4_over_mu_plus_2": max_dev,
            "min_abs_branch2_residual": min_branch2,
            "max_log_term_mismatch": max_log_mismatch,
            "rows": rows,
        },
        "every solution of the residue system with the log condition has a = b = q = 4/(mu+2), "
        "contradicting a != b; the single-pole branch leaves residual 2 at q = 4/(mu+2)",
        "confirmed" if ok else "not confirmed",
        grid=f"mu in (-1, 0), {points} points",
    )


def a13_frobenius_obstruction(mu: float, a: complex, b: complex, q: complex, theta: complex = 1.0, t: complex = 1.0):
    """Log-term obstruction at 0 for ``omega = Q/dg`` with the two-pole data."""
    dg = PowerProduct.make(t, [(1 + 0j, mu)], RationalFn(Poly.from_roots([(0, 2), (q, 1)]), Poly.from_roots([(a, 2), (b, 2)])))
    Qc = RationalFn(Poly.from_roots([q]) * theta, Poly.from_roots([(1, 2)]))
    omega = PowerProduct.from_rational(Qc) / dg
    res = frobenius_log_term(Differential(1, omega), Differential(2, Qc), 0.0)
    if res.resonance != 1:
        raise ValidationError(f"unexpected indicial roots {res.roots}")
    return res.log_coefficient


# ---------------------------------------------------------------------------
# O(1,-2,-3)
# ---------------------------------------------------------------------------


def a14_roots(mu: float) -> tuple[float, float]:
    r = math.sqrt(2) * math.sqrt(2 - mu - mu * mu)
    den = (mu + 1) * (mu + 2)
    base = -2 + mu + mu * mu
    return (base + r) / den, (base - r) / den


def a14_residues(mu: float, a: complex, b: complex) -> tuple[complex, complex]:
    return (mu / a + 3 / (a - 1) - 2 / (a - b), mu / b + 3 / (b - 1) - 2 / (b - a))


def a14_frobenius_obstruction(mu: float, a: complex, b: complex, theta: complex = 1.0, t: complex = 1.0):
    dg = PowerProduct.make(t, [(0j, mu)], RationalFn(Poly.from_roots([(1, 3)]), Poly.from_roots([(a, 2), (b, 2)])))
    Qc = RationalFn(Poly.from_roots([1.0]) * theta, Poly.from_roots([(0, 2)]))
    omega = PowerProduct.from_rational(Qc) / dg
    res = frobenius_log_term(Differential(1, omega), Differential(2, Qc), 1.0)
    if res.resonance != 1:
        raise ValidationError(f"unexpected indicial roots {res.roots}")
    return res.log_coefficient


def verify_A14(points: int = 101) -> CaseReport:
    """Nonexistence for O(1,-2,-3): the log term at the order-one end never vanishes."""
    grid = mu_grid(points)
    max_res = 0.0
    max_identity = 0.0
    max_frob = 0.0
    min_log = math.inf
    rows = []
    for mu in grid:
        a, b = a14_roots(mu)
        ra, rb = a14_residues(mu, a, b)
        max_res = max(max_res, abs(ra), abs(rb))
        log_val = mu + 2 - 2 / (1 - a) - 2 / (1 - b)
        max_identity = max(max_identity, abs(log_val + (mu + 2) / 3))
        obs = a14_frobenius_obstruction(mu, a, b)
        max_frob = max(max_frob, abs(obs - log_val))
        min_log = min(min_log, abs(log_val))
        rows.append({"mu": float(mu), "a": a, "b": b, "log_term": log_val})
    ok = max_res < 1e-10 and max_identity < 1e-9 and max_frob < 1e-8 and min_log > 0
    return CaseReport(
        "A14",
        {
            "max_residue": max_res,
            "max_identity_error": max_identity,
            "max_frobenius_mismatch": max_frob,
            "min_abs_log_term": min_log,
            "rows": rows,
        },
        "the residues vanish at the closed-form a, b and the log term equals -(mu+2)/3, which is nonzero for mu > -1",
        "confirmed" if ok else "not confirmed",
        grid=f"mu in (-1, 0), {points} points",
    )


# ---------------------------------------------------------------------------
# O(2,-2,-2,-2)
# ---------------------------------------------------------------------------


def a18_admissible(m2: int, m3: int, m4: int) -> bool:
    return min(m2, m3, m4) >= 1 and m2 <= m4 and m3 <= m4 and m2 + m3 != m4


def a18_phi(m2, m3, m4, al2, al3):
    """The three-root sum; arguments are clipped at 0 so boundary points survive rounding."""
    return (
        np.sqrt(np.maximum(m2 * m2 - 8 * al2 * al2, 0.0))
        + np.sqrt(np.maximum(m3 * m3 - 8 * al3 * al3, 0.0))
        + np.sqrt(np.maximum(m4 * m4 - 8 * (al2 + al3) ** 2, 0.0))
    )


def a18_predicted_minimum(m2: int, m3: int, m4: int) -> float:
    if m2 + m3 < m4:
        return math.sqrt(m4 * m4 - (m2 + m3) ** 2)
    c = m3 + m2 - m4
    return min(math.sqrt(c * (m3 + m4 - m2)), math.sqrt(c * (m2 + m4 - m3)))


def _a18_grid(m2, m3, m4, n):
    s8 = math.sqrt(8.0)
    a2 = np.linspace(0.0, m2 / s8, n)
    a3 = np.linspace(0.0, m3 / s8, n)
    A2, A3 = np.meshgrid(a2, a3, indexing="ij")
    inside = A2 + A3 <= m4 / s8 * (1 + 1e-15)
    return A2, A3, inside


def _a18_closure_min(m2, m3, m4, n):
    """Minimum of phi over the closed domain, grid plus the slanted edge."""
    s8 = math.sqrt(8.0)
    A2, A3, inside = _a18_grid(m2, m3, m4, n)
    phi = np.where(inside, a18_phi(m2, m3, m4, A2, A3), np.inf)
    k = np.unravel_index(np.argmin(phi), phi.shape)
    best, loc = float(phi[k]), (float(A2[k]), float(A3[k]))
    if m2 + m3 > m4:
        lo = (m4 - m3) / s8
        edge = np.linspace(max(lo, 0.0), m2 / s8, n)
        vals = a18_phi(m2, m3, m4, edge, m4 / s8 - edge)
        j = int(np.nanargmin(vals))
        if vals[j] < best:
            best, loc = float(vals[j]), (float(edge[j]), float(m4 / s8 - edge[j]))
    return best, loc


def verify_A18(m2: int, m3: int, m4: int, n: int = 500) -> CaseReport:
    """``phi > 1`` on the open domain, with the minimum on the boundary."""
    if not a18_admissible(m2, m3, m4):
        raise PreconditionViolated("need m2, m3 <= m4 and m2 + m3 != m4 with positive integers")
    A2, A3, inside = _a18_grid(m2, m3, m4, n)
    s8 = math.sqrt(8.0)
    interior = inside & (A2 > 0) & (A3 > 0) & (A2 < m2 / s8) & (A3 < m3 / s8) & (A2 + A3 < m4 / s8 * (1 - 1e-12))
    with np.errstate(invalid="ignore", divide="ignore"):
        r2 = np.sqrt(m2 * m2 - 8 * A2**2)
        r3 = np.sqrt(m3 * m3 - 8 * A3**2)
        r4 = np.sqrt(m4 * m4 - 8 * (A2 + A3) ** 2)
        d3 = -8 * A3 / r3 - 8 * (A2 + A3) / r4
        d2 = -8 * A2 / r2 - 8 * (A2 + A3) / r4
    partials_negative = bool(np.all(d3[interior] < 0) and np.all(d2[interior] < 0))
    phi = a18_phi(m2, m3, m4, A2, A3)
    open_min = float(np.min(phi[interior])) if np.any(interior) else math.inf
    closure_min, loc = _a18_closure_min(m2, m3, m4, n)
    predicted = a18_predicted_minimum(m2, m3, m4)
    ok = partials_negative and open_min > 1 and closure_min >= 1 - 1e-12 and abs(closure_min - predicted) < 1e-6 * max(1, predicted) + 1e-9
    return CaseReport(
        "A18",
        {
            "m": (m2, m3, m4),
            "partials_negative": partials_negative,
            "open_domain_grid_min": open_min,
            "closure_min": closure_min,
            "closure_argmin": loc,
            "predicted_min": predicted,
        },
        "phi decreases in both variables inside the domain, so its minimum sits on the boundary where it is >= 1; "
        "the equation phi = 1 has no interior solution",
        "confirmed" if ok else "not confirmed",
        grid=f"{n} x {n}",
    )


def a18_triples(limit: int = 5) -> list[tuple[int, int, int]]:
    return [
        (m2, m3, m4)
        for m2, m3, m4 in itertools.product(range(1, limit + 1), repeat=3)
        if a18_admissible(m2, m3, m4)
    ]


def verify_A18_all(limit: int = 5, n: int = 500) -> CaseReport:
    reports = [verify_A18(*t, n=n) for t in a18_triples(limit)]
    ok = all(r.ok for r in reports)
    return CaseReport(
        "A18_all",
        {"triples": len(reports), "failures": [r.quantities["m"] for r in reports if not r.ok],
         "min_open_domain": min(r.quantities["open_domain_grid_min"] for r in reports)},
        f"phi > 1 on the open domain for all {len(reports)} admissible triples with entries <= {limit}",
        "confirmed" if ok else "not confirmed",
        grid=f"{n} x {n}",
    )


def a18_argmin_stability(m2: int, m3: int, m4: int, coarse: int = 200, fine: int = 800) -> float:
    """Relative shift of the closure argmin between two grid resolutions."""
    _, l1 = _a18_closure_min(m2, m3, m4, coarse)
    _, l2 = _a18_closure_min(m2, m3, m4, fine)
    scale = max(m2, m3, m4) / math.sqrt(8.0)
    return math.hypot(l1[0] - l2[0], l1[1] - l2[1]) / scale


# ---------------------------------------------------------------------------
# parity bounds
# ---------------------------------------------------------------------------


def parity_chain(ends: tuple, integer_mu: Optional[dict] = None) -> dict:
    """Lower bound on ``TA / 2 pi`` from the odd-sum bound, for genus 0.

    ``integer_mu`` maps end indices to their (integer) ``mu``; the remaining
    two ends are the non-integer ones.  Umbilic orders sum to ``-4 - sum d``.
    """
    integer_mu = dict(integer_mu or {})
    xi = -4 - sum(ends)
    nonint = [j for j in range(len(ends)) if j not in integer_mu]
    int_sum = sum(integer_mu.values()) + xi
    out = {"ends": list(ends), "umbilic_sum": xi, "integer_order_sum": int_sum, "noninteger_ends": nonint}
    if len(nonint) != 2 or int_sum % 2 == 0:
        out.update({"applies": False, "ta_lower_over_2pi": None})
        return out
    # TA / 2pi = -2 + sum (mu_j - d_j), with mu_a + mu_b >= -1 for the pair
    bound = -2 + sum(integer_mu.values()) - 1 - sum(ends)
    out.update({"applies": True, "ta_lower_over_2pi": bound})
    return out


def verify_parity_bounds() -> CaseReport:
    cases = {
        "O(-3,-4)": parity_chain((-3, -4)),
        "O(-2,-5)": parity_chain((-2, -5)),
        "O(-3,-3)": parity_chain((-3, -3)),
    }
    for d in (-1, 0, 1):
        cases[f"O({d},-2,-3)"] = parity_chain((d, -2, -3), {0: d + 2})
    expected_bound = [k for k in cases if k != "O(-3,-3)"]
    ok = all(cases[k]["applies"] and cases[k]["ta_lower_over_2pi"] >= 4 for k in expected_bound)
    ok &= not cases["O(-3,-3)"]["applies"]
    cross = None
    try:
        from .catalog import o2m5
        from .geometry import curvature_report

        cross = curvature_report(o2m5(-0.5)).ta / (2 * math.pi)
    except Exception as exc:  # geometry cross-check is informative only
        cross = f"unavailable: {exc}"
    cases["o2m5_cross_check_ta_over_2pi"] = cross
    return CaseReport(
        "parity",
        cases,
        "odd integer-order sums give TA >= 8 pi for O(-3,-4), O(-2,-5) and O(d,-2,-3) with d >= -1; "
        "O(-3,-3) has an even sum and no conclusion",
        "confirmed" if ok else "not confirmed",
        axioms=[ODD_SUM_AXIOM],
    )


CASES = {
    "enumerate": lambda **kw: table_comparison(float(kw.get("rho", TABLE_RHO))),
    "A13": lambda **kw: verify_A13(int(kw.get("points", 101))),
    "A14": lambda **kw: verify_A14(int(kw.get("points", 101))),
    "A18": lambda **kw: (
        verify_A18(int(kw["m2"]), int(kw["m3"]), int(kw["m4"]), n=int(kw.get("n", 500)))
        if "m2" in kw
        else verify_A18_all(int(kw.get("limit", 5)), n=int(kw.get("n", 500)))
    ),
    "parity": lambda **kw: verify_parity_bounds(),
}


def run_case(name: str, **kwargs) -> CaseReport:
    if name not in CASES:
        raise ValidationError(f"unknown case {name!r}; choose from {', '.join(CASES)}")
    return CASES[name](**kwargs)
