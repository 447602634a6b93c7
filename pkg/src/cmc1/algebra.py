"""2x2 complex matrix algebra and the two models of hyperbolic 3-space.

Matrices are plain ``numpy`` arrays of shape ``(2, 2)`` and dtype complex.
Points of H^3 are Hermitian positive definite matrices of determinant one;
:func:`hermitian_to_ball` sends them to the Poincare ball.

The Riemann sphere uses a tagged infinity, :data:`INF`, rather than a float
``inf`` so that Moebius arithmetic at the point at infinity stays exact.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from .config import default_tol
from .errors import NonUnimodular


class _Infinity:
    """The point at infinity on the Riemann sphere (a singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

ExtComplex = Union[complex, _Infinity]


def is_inf(w) -> bool:
    return w is INF


def as_ext(w) -> ExtComplex:
    """Coerce numbers (and the strings "inf"/"infinity") to extended complex."""
    if w is INF:
        return INF
    if isinstance(w, str) and w.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return complex(w)


I2 = np.eye(2, dtype=complex)
SIGMA2 = np.array([[1j, 0], [0, -1j]])
SIGMA3 = np.array([[0, 1j], [1j, 0]])


def mat(a11, a12, a21, a22) -> np.ndarray:
    return np.array([[a11, a12], [a21, a22]], dtype=complex)


def det2(m: np.ndarray) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def inv2(m: np.ndarray) -> np.ndarray:
    d = det2(m)
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / d


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def is_unimodular(m: np.ndarray, tol: float | None = None) -> bool:
    tol = default_tol() if tol is None else tol
    return abs(det2(m) - 1.0) <= tol


def star_action(a: np.ndarray, w: ExtComplex) -> ExtComplex:
    """Moebius action ``(a11 w + a12) / (a21 w + a22)`` on the Riemann sphere."""
    a11, a12, a21, a22 = a[0, 0], a[0, 1], a[1, 0], a[1, 1]
    if w is INF:
        if a21 == 0:
            return INF
        return complex(a11 / a21)
    w = complex(w)
    den = a21 * w + a22
    if den == 0:
        return INF
    return complex((a11 * w + a12) / den)


def to_hyperbolic(F: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Point ``F F*`` of H^3 for a unimodular lift ``F``."""
    tol = default_tol() if tol is None else tol
    if not is_unimodular(F, tol):
        raise NonUnimodular(f"|det F - 1| = {abs(det2(F) - 1):.3e} exceeds {tol:g}")
    return F @ adjoint(F)


def hermitian_to_ball(X: np.ndarray) -> np.ndarray:
    """Poincare-ball coordinates of a Hermitian point of H^3.

    With ``X = [[x0+x3, x1+i x2], [x1-i x2, x0-x3]]`` the ball point is
    ``(x1, x2, x3) / (1 + x0)``.
    """
    x0 = 0.5 * (X[0, 0] + X[1, 1]).real
    x3 = 0.5 * (X[0, 0] - X[1, 1]).real
    x1 = 0.5 * (X[0, 1] + X[1, 0]).real
    x2 = 0.5 * (X[0, 1] - X[1, 0]).imag
    return np.array([x1, x2, x3]) / (1.0 + x0)


def ball_to_hermitian(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hermitian_to_ball`."""
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    if r2 >= 1.0:
        raise ValueError("point is not inside the unit ball")
    x0 = (1.0 + r2) / (1.0 - r2)
    x1, x2, x3 = 2.0 * x / (1.0 - r2)
    return np.array([[x0 + x3, x1 + 1j * x2], [x1 - 1j * x2, x0 - x3]])


def hyperbolic_distance(X: np.ndarray, Y: np.ndarray) -> float:
    """Distance between two Hermitian points: ``cosh d = tr(X Y^-1) / 2``."""
    c = 0.5 * np.trace(X @ inv2(Y)).real
    return float(np.arccosh(max(c, 1.0)))


def su2_defect(M: np.ndarray) -> float:
    """``||M* M - I||_F + |det M - 1|``; zero exactly on SU(2)."""
    return float(np.linalg.norm(adjoint(M) @ M - I2) + abs(det2(M) - 1.0))


def normalize_det(M: np.ndarray) -> np.ndarray:
    """Divide by a square root of the determinant, picking the root near 1."""
    d = complex(det2(M))
    s = np.sqrt(d)
    if abs(s - 1) > abs(-s - 1):
        s = -s
    return M / s


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(2, 2)) * scale + 1j * rng.normal(size=(2, 2)) * scale
    m = m + I2
    return normalize_det(m)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    a = q[0] + 1j * q[1]
    b = q[2] + 1j * q[3]
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


# -- serialization -----------------------------------------------------------


def complex_to_json(w) -> list | str:
    if w is INF:
        return "inf"
    w = complex(w)
    return [w.real, w.imag]


def complex_from_json(v) -> ExtComplex:
    if isinstance(v, str):
        return as_ext(v)
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def matrix_to_json(M: np.ndarray) -> list:
    return [complex_to_json(M[i, j]) for i in range(2) for j in range(2)]


def matrix_from_json(v) -> np.ndarray:
    vals = [complex_from_json(x) for x in v]
    return np.array(vals, dtype=complex).reshape(2, 2)
