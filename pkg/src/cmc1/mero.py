"""Meromorphic calculus on the Riemann sphere.

Three kinds of objects live here:

* :class:`Poly` -- complex polynomials with ascending coefficients.  A
  polynomial built from its roots remembers them, so multiplicities survive
  arithmetic exactly instead of being re-discovered by a root finder.
* :class:`RationalFn` -- ``num / den`` kept in lowest terms with a monic
  denominator.
* :class:`PowerProduct` -- ``t * prod (z - p_j)^alpha_j * tail(z)`` with real,
  non-integer exponents and a rational tail.  These describe multivalued
  developing maps and their derivatives.

On top of them sit orders and Laurent expansions (with the chart ``w = 1/z``
at infinity), residues, Schwarzian derivatives, the Frobenius log-term test
for regular singular points, and :func:`integrate_power_product`, which
recovers ``g`` from ``dg`` when the residues vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import binom

from .algebra import INF, complex_from_json, complex_to_json
from .errors import ResidueConditionFailed, ValidationError

ROOT_MATCH_TOL = 1e-8
_CLUSTER_TOL = 1e-4
_TRIM_REL = 1e-14


class NonMeromorphicPoint(ValidationError):
    """The local behaviour at a point is a non-integer power."""


class ConstantInput(ValidationError):
    pass


class IrregularSingularPoint(ValidationError):
    pass


def _close(a: complex, b: complex, tol: float = ROOT_MATCH_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _is_int(x: float, tol: float = 1e-9) -> bool:
    return abs(x - round(x)) <= tol


def _merge_roots(roots: Iterable[tuple[complex, int]]) -> list[tuple[complex, int]]:
    out: list[list] = []
    for r, m in roots:
        if m == 0:
            continue
        for item in out:
            if _close(item[0], r, 1e-12):
                item[1] += m
                break
        else:
            out.append([complex(r), int(m)])
    return [(r, m) for r, m in out if m != 0]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Complex polynomial, coefficients in ascending degree.

    The zero polynomial has an empty coefficient array.  ``roots`` (if known)
    is a list of ``(root, multiplicity)`` pairs whose multiplicities add up to
    the degree.
    """

    __slots__ = ("c", "_roots", "_clist")

    def __init__(self, coeffs: Sequence[complex] = (), roots=None):
        c = np.asarray(coeffs, dtype=complex).ravel()
        if c.size:
            scale = np.max(np.abs(c))
            n = c.size
            while n and (c[n - 1] == 0 or abs(c[n - 1]) <= _TRIM_REL * scale):
                n -= 1
            c = c[:n]
        self.c = c
        self._roots = roots if (roots is not None and c.size) else None
        self._clist = None

    # construction ---------------------------------------------------------
    @classmethod
    def from_roots(cls, roots: Iterable, lead: complex = 1.0) -> "Poly":
        pairs = []
        for r in roots:
            if isinstance(r, tuple):
                pairs.append((complex(r[0]), int(r[1])))
            else:
                pairs.append((complex(r), 1))
        pairs = _merge_roots(pairs)
        c = np.array([lead], dtype=complex)
        for r, m in pairs:
            for _ in range(m):
                c = np.convolve(c, np.array([-r, 1.0]))
        return cls(c, roots=pairs)

    @classmethod
    def const(cls, a: complex) -> "Poly":
        return cls([a], roots=[])

    @classmethod
    def z(cls) -> "Poly":
        return cls([0, 1], roots=[(0j, 1)])

    # basic properties -----------------------------------------------------
    @property
    def degree(self) -> int:
        return self.c.size - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return self.c.size == 0

    @property
    def lead(self) -> complex:
        return complex(self.c[-1]) if self.c.size else 0j

    def __repr__(self) -> str:
        return f"Poly({np.array2string(self.c, precision=6)})"

    def coeff_list(self) -> list:
        if self._clist is None:
            self._clist = [complex(x) for x in self.c]
        return self._clist

    def __call__(self, z):
        if self.c.size == 0:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        if np.ndim(z) == 0:
            acc = 0j
            cl = self.coeff_list()
            z = complex(z)
            for a in reversed(cl):
                acc = acc * z + a
            return acc
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.c)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        other = _as_poly(other)
        n = max(self.c.size, other.c.size)
        a = np.zeros(n, complex)
        a[: self.c.size] += self.c
        a[: other.c.size] += other.c
        return Poly(a)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-self.c, roots=self._roots)

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, float, complex, np.number)):
            if other == 0:
                return Poly()
            return Poly(self.c * other, roots=self._roots)
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        roots = None
        if self._roots is not None and other._roots is not None:
            roots = _merge_roots(list(self._roots) + list(other._roots))
        return Poly(np.convolve(self.c, other.c), roots=roots)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def deriv(self) -> "Poly":
        if self.c.size <= 1:
            return Poly()
        return Poly(self.c[1:] * np.arange(1, self.c.size))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        q, r = np.polynomial.polynomial.polydiv(self.c, other.c)
        return Poly(q), Poly(r)

    def deflate(self, r: complex, m: int = 1) -> "Poly":
        """Divide by ``(z - r)^m`` with synthetic division (remainder dropped)."""
        c = self.c.copy()
        for _ in range(m):
            n = c.size - 1
            if n < 1:
                break
            q = np.zeros(n, complex)
            acc = c[-1]
            q[-1] = acc
            for k in range(n - 1, 0, -1):
                acc = c[k] + r * acc
                q[k - 1] = acc
            c = q
        roots = None
        if self._roots is not None:
            roots = [list(x) for x in self._roots]
            for item in roots:
                if _close(item[0], r) and item[1] >= m:
                    item[1] -= m
                    break
            else:
                roots = None
            if roots is not None:
                roots = [(x, k) for x, k in roots if k]
        return Poly(c, roots=roots)

    def taylor(self, p: complex, count: int | None = None) -> np.ndarray:
        """Coefficients of the expansion in powers of ``(z - p)``."""
        n = self.c.size
        if n == 0:
            return np.zeros(count or 1, complex)
        c = self.c.copy().astype(complex)
        out = np.zeros(n, complex)
        # repeated synthetic division by (z - p)
        for k in range(n):
            acc = 0j
            m = c.size
            q = np.zeros(max(m - 1, 0), complex)
            for j in range(m - 1, -1, -1):
                acc = acc * p + c[j]
                if j > 0:
                    q[j - 1] = acc
            out[k] = acc
            c = q
            if c.size == 0:
                break
        if count is not None:
            if count <= n:
                return out[:count]
            return np.concatenate([out, np.zeros(count - n, complex)])
        return out

    def reversed(self, degree: int | None = None) -> "Poly":
        d = self.degree if degree is None else degree
        c = np.zeros(d + 1, complex)
        c[: self.c.size] = self.c
        return Poly(c[::-1])

    # roots ----------------------------------------------------------------
    def roots(self) -> list[tuple[complex, int]]:
        """Distinct roots with multiplicities."""
        if self._roots is not None:
            return list(self._roots)
        if self.degree <= 0:
            self._roots = []
            return []
        raw = np.roots(self.c[::-1])
        self._roots = _cluster_and_refine(self, raw)
        return list(self._roots)

    def multiplicity(self, p: complex, tol: float = ROOT_MATCH_TOL) -> int:
        for r, m in self.roots():
            if _close(r, p, tol):
                return m
        return 0

    def is_gaussian_integer(self) -> bool:
        if self.c.size == 0:
            return True
        re, im = self.c.real, self.c.imag
        return bool(np.all(re == np.round(re)) and np.all(im == np.round(im)) and np.max(np.abs(self.c)) < 1e12)


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(complex(x))


def _cluster_and_refine(poly: Poly, raw: np.ndarray) -> list[tuple[complex, int]]:
    clusters: list[list[complex]] = []
    for r in sorted(raw, key=lambda x: (x.real, x.imag)):
        for cl in clusters:
            ref = np.mean(cl)
            if abs(r - ref) <= _CLUSTER_TOL * max(1.0, abs(ref)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    out = []
    derivs = [poly]
    for cl in clusters:
        m = len(cl)
        while len(derivs) < m:
            derivs.append(derivs[-1].deriv())
        r = complex(np.mean(cl))
        if m > 1:
            f, fp = derivs[m - 1], derivs[m - 1].deriv()
            for _ in range(4):
                d = fp(r)
                if d == 0:
                    break
                step = f(r) / d
                r -= step
                if abs(step) < 1e-16 * max(1.0, abs(r)):
                    break
        out.append((r, m))
    return out


def _poly_gcd_cofactors_exact(a: Poly, b: Poly):
    """Exact cancellation over the Gaussian rationals using sympy."""
    import sympy as sp

    z = sp.Symbol("z")

    def to_sp(p: Poly):
        coeffs = [sp.Integer(int(round(x.real))) + sp.I * sp.Integer(int(round(x.imag))) for x in p.c[::-1]]
        return sp.Poly(coeffs, z, domain=sp.QQ_I)

    pa, pb = to_sp(a), to_sp(b)
    g = pa.gcd(pb)
    if g.degree() <= 0:
        return None
    qa = pa.exquo(g)
    qb = pb.exquo(g)

    def back(p):
        return Poly([complex(sp.re(c), sp.im(c)) for c in reversed(p.all_coeffs())])

    return back(qa), back(qb)


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RationalFn:
    """A rational function ``num / den`` in lowest terms, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce: bool = True):
        num = _as_poly(num)
        den = Poly.const(1.0) if den is None else _as_poly(den)
        if den.is_zero():
            raise ValidationError("zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly.const(1.0)
            return
        if reduce and den.degree > 0 and num.degree > 0:
            num, den = _cancel(num, den)
        lead = den.lead
        if lead != 1:
            num = num * (1.0 / lead)
            den = den * (1.0 / lead)
        self.num, self.den = num, den

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, a: complex) -> "RationalFn":
        return cls(Poly.const(a))

    @classmethod
    def z(cls) -> "RationalFn":
        return cls(Poly.z())

    @classmethod
    def from_roots(cls, zeros=(), poles=(), lead: complex = 1.0) -> "RationalFn":
        return cls(Poly.from_roots(zeros, lead), Poly.from_roots(poles))

    @classmethod
    def from_coeffs(cls, num: Sequence[complex], den: Sequence[complex] = (1,)) -> "RationalFn":
        return cls(Poly(num), Poly(den))

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    @property
    def degree(self) -> int:
        """Asymptotic degree ``deg num - deg den``."""
        if self.is_zero():
            raise ValidationError("degree of the zero function")
        return self.num.degree - self.den.degree

    @property
    def mapping_degree(self) -> int:
        """Degree as a map of the sphere, ``max(deg num, deg den)``."""
        return max(self.num.degree, self.den.degree)

    def __repr__(self) -> str:
        return f"RationalFn({self.num!r} / {self.den!r})"

    # evaluation -----------------------------------------------------------
    def __call__(self, z):
        if z is INF:
            d = self.degree if not self.is_zero() else -1
            if d > 0:
                return INF
            if d < 0:
                return 0j
            return self.num.lead / self.den.lead
        return self.num(z) / self.den(z)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "RationalFn":
        other = _as_rational(other)
        if _same_poly(self.den, other.den):
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den, reduce=False)

    def __sub__(self, other) -> "RationalFn":
        return self + (-_as_rational(other))

    def __rsub__(self, other) -> "RationalFn":
        return _as_rational(other) - self

    def __mul__(self, other) -> "RationalFn":
        if isinstance(other, PowerProduct):
            return NotImplemented
        if isinstance(other, (int, float, complex, np.number)):
            return RationalFn(self.num * complex(other), self.den, reduce=False)
        other = _as_rational(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        if isinstance(other, PowerProduct):
            return NotImplemented
        other = _as_rational(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFn":
        return _as_rational(other) / self

    def __pow__(self, k: int) -> "RationalFn":
        k = int(k)
        if k < 0:
            return RationalFn(self.den ** (-k), self.num ** (-k))
        return RationalFn(self.num**k, self.den**k, reduce=False)

    def deriv(self) -> "RationalFn":
        n, d = self.num, self.den
        if d.degree == 0:
            return RationalFn(n.deriv() * (1.0 / d.lead), Poly.const(1.0), reduce=False)
        # d'/d = S/dred with dred the squarefree part, so the quotient rule
        # needs only one extra copy of each pole; this keeps high-order poles
        # from leaving spurious near-cancelling roots in the numerator
        roots = d.roots()
        dred = Poly.from_roots([r for r, _ in roots])
        S = Poly()
        for j, (r, m) in enumerate(roots):
            S = S + Poly.from_roots([q for i, (q, _) in enumerate(roots) if i != j]) * m
        num = n.deriv() * dred - n * S
        den = Poly.from_roots([(r, m + 1) for r, m in roots])
        return RationalFn(num, den, reduce=False)

    def log_derivative(self) -> "RationalFn":
        """``f'/f`` as a rational function with simple poles."""
        if self.is_zero():
            raise ValidationError("log derivative of zero")
        terms = _simple_pole_sum(
            [(r, m) for r, m in self.num.roots()] + [(r, -m) for r, m in self.den.roots()]
        )
        return terms

    # zeros, poles, orders -------------------------------------------------
    def zeros(self) -> list[tuple[complex, int]]:
        return self.num.roots()

    def poles(self) -> list[tuple[complex, int]]:
        return self.den.roots()

    def order_at(self, p) -> int:
        if self.is_zero():
            raise ValidationError("order of the zero function")
        if p is INF:
            return -self.degree
        p = complex(p)
        return self.num.multiplicity(p) - self.den.multiplicity(p)

    def laurent(self, p, count: int) -> "LaurentSeries":
        if self.is_zero():
            return LaurentSeries(p, 0, np.zeros(count, complex))
        if p is INF:
            dn, dd = self.num.degree, self.den.degree
            n_rev = self.num.reversed()
            d_rev = self.den.reversed()
            # f(1/w) = w^(dd - dn) * n_rev(w) / d_rev(w)
            sub = RationalFn(n_rev, d_rev, reduce=False)
            s = sub.laurent(0j, count)
            return LaurentSeries(INF, s.k0 + (dd - dn), s.coeffs)
        p = complex(p)
        mn = self.num.multiplicity(p)
        md = self.den.multiplicity(p)
        n1 = self.num.deflate(p, mn) if mn else self.num
        d1 = self.den.deflate(p, md) if md else self.den
        a = n1.taylor(p, count)
        b = d1.taylor(p, count)
        return LaurentSeries(p, mn - md, _series_div(a, b, count))

    def residue(self, p: complex) -> complex:
        s = self.laurent(p, max(1, -self.order_at(p)) + 1)
        return s.coeff(-1)

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "num": [complex_to_json(x) for x in self.num.c],
            "den": [complex_to_json(x) for x in self.den.c],
        }

    @classmethod
    def from_json(cls, d: dict) -> "RationalFn":
        num = [complex_from_json(x) for x in d["num"]]
        den = [complex_from_json(x) for x in d.get("den", [[1, 0]])]
        return cls(Poly(num), Poly(den))

    def scalar_evaluator(self):
        """A fast closure for scalar complex evaluation (pure Python Horner)."""
        nc = self.num.coeff_list()[::-1]
        dc = self.den.coeff_list()[::-1]

        def f(z: complex) -> complex:
            a = 0j
            for c in nc:
                a = a * z + c
            b = 0j
            for c in dc:
                b = b * z + c
            return a / b

        return f


def _same_poly(a: Poly, b: Poly) -> bool:
    return a.c.size == b.c.size and np.array_equal(a.c, b.c)


def _as_rational(x) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, Poly):
        return RationalFn(x)
    return RationalFn.const(complex(x))


def _cancel(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_gaussian_integer() and den.is_gaussian_integer() and num._roots is None and den._roots is None:
        res = _poly_gcd_cofactors_exact(num, den)
        if res is None:
            return num, den
        return res
    zn = num.roots()
    zd = den.roots()
    zn_left = [list(x) for x in zn]
    zd_left = [list(x) for x in zd]
    cancelled = False
    for item_n in zn_left:
        for item_d in zd_left:
            if item_d[1] and item_n[1] and _close(item_n[0], item_d[0]):
                k = min(item_n[1], item_d[1])
                item_n[1] -= k
                item_d[1] -= k
                cancelled = True
    if not cancelled:
        return num, den
    new_num = Poly.from_roots([(r, m) for r, m in zn_left if m], num.lead)
    new_den = Poly.from_roots([(r, m) for r, m in zd_left if m], den.lead)
    return new_num, new_den


def _simple_pole_sum(pairs: Iterable[tuple[complex, float]]) -> RationalFn:
    """``sum_j a_j / (z - p_j)`` as a single rational function."""
    pairs = [(complex(p), a) for p, a in pairs if a != 0]
    if not pairs:
        return RationalFn(Poly())
    den = Poly.from_roots([p for p, _ in pairs])
    num = Poly()
    for j, (p, a) in enumerate(pairs):
        others = Poly.from_roots([q for i, (q, _) in enumerate(pairs) if i != j])
        num = num + others * complex(a)
    return RationalFn(num, den, reduce=False)


def _series_div(a: np.ndarray, b: np.ndarray, count: int) -> np.ndarray:
    c = np.zeros(count, complex)
    b0 = b[0]
    for k in range(count):
        acc = a[k] if k < a.size else 0j
        for j in range(1, min(k, b.size - 1) + 1):
            acc -= b[j] * c[k - j]
        c[k] = acc / b0
    return c


def _series_mul(a: np.ndarray, b: np.ndarray, count: int) -> np.ndarray:
    return np.convolve(a, b)[:count]


# ---------------------------------------------------------------------------
# Laurent series
# ---------------------------------------------------------------------------


@dataclass
class LaurentSeries:
    """``sum_k coeffs[k] * (z - point)^(k0 + k)``; at infinity ``w = 1/z``."""

    point: object
    k0: int
    coeffs: np.ndarray

    def coeff(self, order: int) -> complex:
        i = order - self.k0
        if i < 0:
            return 0j
        if i >= self.coeffs.size:
            raise IndexError("series not expanded far enough")
        return complex(self.coeffs[i])

    def normalized(self) -> "LaurentSeries":
        """Drop numerically zero leading coefficients."""
        c = self.coeffs
        scale = np.max(np.abs(c)) if c.size else 0.0
        i = 0
        while i < c.size - 1 and abs(c[i]) <= 1e-13 * scale:
            i += 1
        return LaurentSeries(self.point, self.k0 + i, c[i:])


# ---------------------------------------------------------------------------
# power products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerProduct:
    """``t * prod_j (z - p_j)^alpha_j * tail(z)`` on the principal branches.

    Use :meth:`make` to build normalized instances: integer exponents are
    absorbed into the tail, tail zeros or poles at branch points are moved
    into the exponents, and the scale is made positive.
    """

    t: float
    factors: tuple
    tail: RationalFn = field(compare=False)

    @classmethod
    def make(cls, t: complex, factors: Iterable[tuple[complex, float]], tail: RationalFn | None = None) -> "PowerProduct":
        tail = RationalFn.const(1.0) if tail is None else _as_rational(tail)
        if t == 0:
            raise ValidationError("power product with zero scale")
        merged: list[list] = []
        for p, a in factors:
            p = complex(p)
            for item in merged:
                if _close(item[0], p, 1e-12):
                    item[1] += float(a)
                    break
            else:
                merged.append([p, float(a)])
        zeros_extra, poles_extra = [], []
        kept = []
        for p, a in merged:
            k = tail.order_at(p)
            a_tot = a + k
            if k:
                # remove (z-p)^k from the tail
                if k > 0:
                    tail = RationalFn(tail.num.deflate(p, k), tail.den)
                else:
                    tail = RationalFn(tail.num, tail.den.deflate(p, -k))
            if abs(a_tot) < 1e-12:
                continue
            if _is_int(a_tot, 1e-12):
                ki = int(round(a_tot))
                (zeros_extra if ki > 0 else poles_extra).append((p, abs(ki)))
                continue
            kept.append((p, a_tot))
        if zeros_extra or poles_extra:
            tail = tail * RationalFn.from_roots(zeros_extra, poles_extra)
        t = complex(t)
        if abs(t.imag) > 0 or t.real < 0:
            tail = tail * (t / abs(t))
            t = abs(t)
        return cls(float(abs(t)), tuple(kept), tail)

    @classmethod
    def from_rational(cls, r: RationalFn) -> "PowerProduct":
        return cls.make(1.0, (), r)

    @property
    def branch_points(self) -> list[complex]:
        return [p for p, _ in self.factors]

    @property
    def exponents(self) -> list[float]:
        return [a for _, a in self.factors]

    def is_rational(self) -> bool:
        return not self.factors

    def as_rational(self) -> RationalFn:
        if self.factors:
            raise NonMeromorphicPoint("power product has non-integer exponents")
        return self.tail * self.t

    @property
    def degree(self) -> float:
        """Asymptotic exponent at infinity, ``sum alpha_j + deg tail``."""
        return float(sum(self.exponents)) + self.tail.degree

    def __call__(self, z, logs=None):
        """Evaluate; ``logs`` optionally supplies continued ``log(z - p_j)``."""
        val = self.t * self.tail(z)
        if not self.factors:
            return val
        z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
        expo = 0j
        for j, (p, a) in enumerate(self.factors):
            L = np.log(z - p) if logs is None else logs[j]
            expo = expo + a * L
        return val * np.exp(expo)

    def scalar_evaluator(self):
        """Closure ``f(z, logs)`` for fast scalar evaluation."""
        tail = self.tail.scalar_evaluator()
        t = self.t
        alphas = self.exponents
        pts = self.branch_points
        import cmath

        def f(z: complex, logs=None) -> complex:
            s = 0j
            if logs is None:
                for p, a in zip(pts, alphas):
                    s += a * cmath.log(z - p)
            else:
                for L, a in zip(logs, alphas):
                    s += a * L
            return t * tail(z) * cmath.exp(s)

        return f

    def __mul__(self, other) -> "PowerProduct":
        if isinstance(other, (int, float, complex, np.number)):
            return PowerProduct.make(self.t * complex(other), self.factors, self.tail)
        if isinstance(other, RationalFn):
            other = PowerProduct.from_rational(other)
        return PowerProduct.make(self.t * other.t, list(self.factors) + list(other.factors), self.tail * other.tail)

    def __rmul__(self, other) -> "PowerProduct":
        return self.__mul__(other)

    def __neg__(self) -> "PowerProduct":
        return self * -1.0

    def inverse(self) -> "PowerProduct":
        return PowerProduct.make(1.0 / self.t, [(p, -a) for p, a in self.factors], 1 / self.tail)

    def __truediv__(self, other) -> "PowerProduct":
        if isinstance(other, (int, float, complex, np.number)):
            return self * (1.0 / complex(other))
        if isinstance(other, RationalFn):
            other = PowerProduct.from_rational(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "PowerProduct":
        if isinstance(other, (int, float, complex, np.number)):
            other = RationalFn.const(complex(other))
        return PowerProduct.from_rational(_as_rational(other)) * self.inverse()

    def __pow__(self, k: int) -> "PowerProduct":
        return PowerProduct.make(self.t**k, [(p, a * k) for p, a in self.factors], self.tail**k)

    def log_derivative(self) -> RationalFn:
        """``h'/h`` as a rational function (no finite differences)."""
        out = _simple_pole_sum(self.factors)
        if not self.tail.is_const():
            out = out + self.tail.log_derivative()
        return out

    def deriv(self) -> "PowerProduct":
        """``h'`` as a power product: exponents drop by one."""
        if not self.factors:
            return PowerProduct.from_rational(self.tail.deriv() * self.t)
        P = Poly.from_roots(self.branch_points)
        PL = Poly()
        for j, (p, a) in enumerate(self.factors):
            others = Poly.from_roots([q for i, q in enumerate(self.branch_points) if i != j])
            PL = PL + others * a
        new_tail = self.tail * RationalFn(PL) + self.tail.deriv() * RationalFn(P)
        return PowerProduct.make(self.t, [(p, a - 1) for p, a in self.factors], new_tail)

    def order_at(self, p) -> float:
        if p is INF:
            return -self.degree
        p = complex(p)
        for q, a in self.factors:
            if _close(q, p, 1e-12):
                return a
        return self.tail.order_at(p)

    def laurent(self, p, count: int, logs=None) -> LaurentSeries:
        """Expansion at a point where the product is single-valued."""
        if p is INF:
            if not _is_int(self.degree):
                raise NonMeromorphicPoint("non-integer exponent at infinity")
            if self.factors:
                raise NonMeromorphicPoint("expansion at infinity of a branched product is not implemented")
            return (self.tail * self.t).laurent(INF, count)
        p = complex(p)
        for q, a in self.factors:
            if _close(q, p, 1e-12):
                raise NonMeromorphicPoint(f"branch point {p} with exponent {a}")
        s = self.tail.laurent(p, count)
        coeffs = s.coeffs * self.t
        for j, (q, a) in enumerate(self.factors):
            L = np.log(p - q) if logs is None else logs[j]
            base = np.exp(a * L)
            k = np.arange(count)
            tay = base * binom(a, k) * (1.0 / (p - q)) ** k
            coeffs = _series_mul(coeffs, tay, count)
        return LaurentSeries(p, s.k0, coeffs)

    def residue(self, p: complex) -> complex:
        k = int(round(-self.tail.order_at(p)))
        s = self.laurent(p, max(k, 1) + 1)
        return s.coeff(-1)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "factors": [{"p": complex_to_json(p), "alpha": a} for p, a in self.factors],
            "tail": self.tail.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "PowerProduct":
        facs = [(complex_from_json(f["p"]), float(f["alpha"])) for f in d.get("factors", [])]
        tail = RationalFn.from_json(d["tail"]) if "tail" in d else None
        return cls.make(float(d.get("t", 1.0)), facs, tail)


Coefficient = Union[RationalFn, PowerProduct]


def as_power_product(c: Coefficient) -> PowerProduct:
    return c if isinstance(c, PowerProduct) else PowerProduct.from_rational(c)


def simplify_coefficient(c: Coefficient) -> Coefficient:
    """Return a rational function when a power product has no branch factors."""
    if isinstance(c, PowerProduct) and c.is_rational():
        return c.as_rational()
    return c


def coefficient_from_json(d: dict) -> Coefficient:
    if "factors" in d or "t" in d:
        return simplify_coefficient(PowerProduct.from_json(d))
    return RationalFn.from_json(d)


# ---------------------------------------------------------------------------
# differentials
# ---------------------------------------------------------------------------


@dataclass
class Differential:
    """``coefficient(z) dz^weight``."""

    weight: int
    coefficient: Coefficient

    def is_zero(self) -> bool:
        return isinstance(self.coefficient, RationalFn) and self.coefficient.is_zero()

    def __call__(self, z, logs=None):
        if isinstance(self.coefficient, PowerProduct):
            return self.coefficient(z, logs)
        return self.coefficient(z)

    def order_at(self, p) -> float:
        return order_at(self, p)

    def to_json(self) -> dict:
        return {"weight": self.weight, "coefficient": self.coefficient.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "Differential":
        return cls(int(d["weight"]), coefficient_from_json(d["coefficient"]))


def order_at(d, p) -> float:
    """Order of a function or differential at ``p`` (``INF`` allowed).

    At infinity a weight-k differential has order
    ``-(asymptotic degree of its coefficient) - 2k``.
    """
    if isinstance(d, Differential):
        o = d.coefficient.order_at(p)
        if p is INF:
            o -= 2 * d.weight
        return o
    return d.order_at(p)


def laurent_expand(f, p, count: int) -> LaurentSeries:
    """First ``count`` Laurent coefficients of ``f`` at ``p``.

    For a differential at infinity the coefficient is expressed in the chart
    ``w = 1/z`` including the factor ``(-1/w^2)^weight``.
    """
    if isinstance(f, Differential):
        s = f.coefficient.laurent(p, count)
        if p is INF:
            sign = (-1) ** f.weight
            return LaurentSeries(INF, s.k0 - 2 * f.weight, s.coeffs * sign)
        return s
    return f.laurent(p, count)


def residue_at(w, p: complex) -> complex:
    """Coefficient of ``(z - p)^-1`` of a 1-form (or of a coefficient)."""
    c = w.coefficient if isinstance(w, Differential) else w
    if isinstance(w, Differential) and w.weight != 1:
        raise ValidationError("residues are defined for 1-forms")
    if p is INF:
        raise ValidationError("residue at infinity: use the sum of finite residues")
    return c.residue(complex(p))


# ---------------------------------------------------------------------------
# Schwarzian derivative
# ---------------------------------------------------------------------------


def _schwarzian_from_log_derivative(u: RationalFn) -> RationalFn:
    # u = h''/h' = A/B  ->  S = u' - u^2/2 = (2(A'B - AB') - A^2) / (2 B^2)
    A, B = u.num, u.den
    num = (A.deriv() * B - A * B.deriv()) * 2.0 - A * A
    return RationalFn(num, B * B * 2.0)


def schwarzian_of_derivative(dh: Coefficient) -> Differential:
    """Schwarzian of ``h`` given only ``h'`` (rational or power product)."""
    if isinstance(dh, RationalFn):
        if dh.is_zero():
            raise ConstantInput("Schwarzian of a constant")
        u = dh.log_derivative()
    else:
        u = dh.log_derivative()
    return Differential(2, _schwarzian_from_log_derivative(u))


def schwarzian(h: Coefficient) -> Differential:
    """``S(h) = (h''/h')' - (h''/h')^2 / 2`` as a rational 2-differential."""
    if isinstance(h, RationalFn):
        if h.is_const():
            raise ConstantInput("Schwarzian of a constant")
        return schwarzian_of_derivative(h.deriv())
    return schwarzian_of_derivative(h.deriv())


def hopf_from_gauss_maps(g, G, dg: bool = False, dG: bool = False) -> Differential:
    """``Q = (S(g) - S(G)) / 2``; pass ``dg=True``/``dG=True`` for derivatives."""
    Sg = schwarzian_of_derivative(g) if dg else schwarzian(g)
    SG = schwarzian_of_derivative(G) if dG else schwarzian(G)
    return Differential(2, (Sg.coefficient - SG.coefficient) * 0.5)


# ---------------------------------------------------------------------------
# developing maps from their derivatives
# ---------------------------------------------------------------------------


def integrate_power_product(dg: Coefficient, rtol: float = 1e-8) -> Coefficient:
    """Antiderivative of ``dg`` in closed form, assuming zero residues.

    For ``dg = t prod (z-p_j)^alpha_j T(z)`` the antiderivative is sought as
    ``t prod (z-p_j)^(alpha_j+1) N(z)/A(z)`` where ``A`` collects the poles
    of ``T`` with order lowered by one.  ``N`` solves a linear system; a
    non-negligible residual means some residue is nonzero and raises
    :class:`ResidueConditionFailed`.  For rational input the additive constant
    is fixed by taking the minimum-norm solution.
    """
    pp = as_power_product(dg)
    T = pp.tail
    nus = [a + 1.0 for a in pp.exponents]
    if any(abs(n) < 1e-12 for n in nus):
        raise ResidueConditionFailed("exponent -1 produces a logarithm")
    n = len(nus)
    P = Poly.from_roots(pp.branch_points) if n else Poly.const(1.0)
    PL = Poly()
    for j in range(n):
        PL = PL + Poly.from_roots([q for i, q in enumerate(pp.branch_points) if i != j]) * nus[j]
    poles = T.den.roots()
    if any(m == 1 for _, m in poles):
        raise ResidueConditionFailed("simple pole of dg has nonzero residue")
    A = Poly.from_roots([(r, m - 1) for r, m in poles])
    tau = T.degree
    deg = tau + 1 - n + A.degree
    # when the antiderivative tends to a nonzero constant at infinity its
    # leading term is invisible in dg, so the numerator may be one degree larger
    total = sum(nus)
    if _is_int(total):
        deg = max(deg, A.degree - int(round(total)))
    if deg < 0:
        raise ResidueConditionFailed("no antiderivative of the required form")
    Ap = A.deriv()
    Td, Tn = T.den, T.num
    rhs = (Tn * A * A).c
    cols = []
    for k in range(deg + 1):
        zk = Poly([0] * k + [1])
        col = ((PL * zk * A) + (P * zk.deriv() * A) - (P * zk * Ap)) * Td
        cols.append(col.c)
    rows = max(max(c.size for c in cols), rhs.size)
    M = np.zeros((rows, deg + 1), complex)
    for k, col in enumerate(cols):
        M[: col.size, k] = col
    b = np.zeros(rows, complex)
    b[: rhs.size] = rhs
    # column scaling keeps the least-squares problem well conditioned
    scale = np.linalg.norm(M, axis=0)
    scale[scale == 0] = 1.0
    sol, *_ = np.linalg.lstsq(M / scale, b, rcond=None)
    sol = sol / scale
    resid = np.linalg.norm(M @ sol - b)
    if resid > rtol * max(1.0, np.linalg.norm(b)):
        raise ResidueConditionFailed(f"residues do not vanish (relative residual {resid / max(1.0, np.linalg.norm(b)):.2e})")
    r = RationalFn(Poly(sol), A)
    if n == 0:
        return r * pp.t
    return simplify_coefficient(PowerProduct.make(pp.t, list(zip(pp.branch_points, nus)), r))


# ---------------------------------------------------------------------------
# Frobenius analysis at a regular singular point
# ---------------------------------------------------------------------------


@dataclass
class FrobeniusResult:
    """Indicial roots and the log-term obstruction at a regular singular point.

    ``log_coefficient`` is None when the roots do not differ by a
    non-negative integer.  For a double root the log term is unavoidable and
    ``always_logarithmic`` is set.
    """

    roots: tuple[complex, complex]
    resonance: int | None
    log_coefficient: complex | None
    always_logarithmic: bool = False

    @property
    def resonant(self) -> bool:
        return self.resonance is not None


def frobenius_log_term(omega, Q, p: complex, sign: int = -1, count: int | None = None) -> FrobeniusResult:
    """Log-term test for ``X'' - (log w)' X' + sign * Q X = 0`` at ``p``.

    ``omega`` supplies ``w`` (its coefficient may be a power product), ``Q``
    a rational 2-differential.  The recursion starts from the smaller
    indicial root with leading coefficient 1 and stops at the resonance
    index, where the obstruction is returned.
    """
    w = omega.coefficient if isinstance(omega, Differential) else omega
    q = Q.coefficient if isinstance(Q, Differential) else Q
    if isinstance(q, PowerProduct):
        q = q.as_rational()
    P = -as_power_product(w).log_derivative()
    R = q * float(sign)
    p = complex(p)
    oP = P.order_at(p) if not P.is_zero() else 10**6
    oR = R.order_at(p) if not R.is_zero() else 10**6
    if oP < -1 or oR < -2:
        raise IrregularSingularPoint(f"orders {oP}, {oR} at {p}")
    if count is None:
        count = 12
    pc = _shifted_coeffs(P, p, -1, count)
    qc = _shifted_coeffs(R, p, -2, count)
    p0, q0 = pc[0], qc[0]
    # r^2 + (p0 - 1) r + q0 = 0
    disc = np.sqrt(complex((p0 - 1) ** 2 - 4 * q0))
    r_a = (-(p0 - 1) + disc) / 2
    r_b = (-(p0 - 1) - disc) / 2
    r1, r2 = (r_a, r_b) if r_a.real >= r_b.real else (r_b, r_a)
    diff = r1 - r2
    if abs(diff.imag) > 1e-9 or not _is_int(diff.real, 1e-9) or diff.real < -1e-9:
        return FrobeniusResult((r1, r2), None, None)
    N = int(round(diff.real))
    if N == 0:
        return FrobeniusResult((r1, r2), 0, None, always_logarithmic=True)
    if N >= count:
        pc = _shifted_coeffs(P, p, -1, N + 2)
        qc = _shifted_coeffs(R, p, -2, N + 2)

    def indicial(r):
        return r * (r - 1) + p0 * r + q0

    a = [1.0 + 0j]
    obstruction = 0j
    for k in range(1, N + 1):
        rhs = 0j
        for j in range(k):
            rhs -= a[j] * (pc[k - j] * (r2 + j) + qc[k - j])
        if k == N:
            obstruction = rhs
            break
        a.append(rhs / indicial(r2 + k))
    return FrobeniusResult((r1, r2), N, complex(obstruction))


def _shifted_coeffs(f: RationalFn, p: complex, start: int, count: int) -> np.ndarray:
    """Coefficients of ``(z-p)^(start + k)`` for ``k = 0..count-1``."""
    if f.is_zero():
        return np.zeros(count, complex)
    s = f.laurent(p, count + 4)
    return np.array([s.coeff(start + k) if start + k - s.k0 < s.coeffs.size else 0j for k in range(count)])
