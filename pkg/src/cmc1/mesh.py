"""Sample a surface over a chart grid and export it in the Poincare ball.

The lift is continued along a spanning tree of grid edges, so every vertex
is reached exactly once and branch logarithms stay consistent.  When the
chart is not simply connected the lift is conjugated by the unitarizing
matrix of its monodromy, so the image ``F F*`` closes up across the seam.
"""

from __future__ import annotations

import cmath
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import adjoint, hermitian_to_ball, hyperbolic_distance, inv2
from .config import IntegratorConfig
from .errors import ValidationError
from .integrate import LiftSystem, PathSpec, Segment, build_system, full_representation, integrate_lift
from .period import Verdict, unitarizability

BALL_LIMIT = 1.0 - 1e-6


class PeriodsOpenWarning(UserWarning):
    """The chart is not simply connected and the monodromy is not unitary."""


@dataclass
class MeshGrid:
    """Chart grid.

    ``kind`` is ``"annulus"`` (radii ``r0 < r1`` with log-radial spacing),
    ``"disk"`` (radius ``r1`` with a center vertex) or ``"rectangle"``
    (``x0, x1, y0, y1``).  ``nr``/``nt`` count radial and angular vertices;
    for rectangles they count vertices along x and y.
    """

    kind: str = "annulus"
    center: complex = 0j
    r0: float = 0.1
    r1: float = 1.0
    nr: int = 10
    nt: int = 32
    x0: float = -1.0
    x1: float = 1.0
    y0: float = -1.0
    y1: float = 1.0
    tree: str = "rays"  # "rays"/"rings" for polar charts, "columns"/"rows" for rectangles
    clearance: float = 1e-6

    @classmethod
    def parse(cls, text: str, **kw) -> "MeshGrid":
        """Parse ``annulus:r0,r1,nr,nt``, ``disk:r,nr,nt`` or
        ``rectangle:x0,x1,y0,y1,nx,ny``."""
        try:
            kind, _, rest = text.partition(":")
            vals = [v.strip() for v in rest.split(",")] if rest else []
            if kind == "annulus":
                r0, r1, nr, nt = vals
                return cls("annulus", r0=float(r0), r1=float(r1), nr=int(nr), nt=int(nt), **kw)
            if kind == "disk":
                r1, nr, nt = vals
                return cls("disk", r0=0.0, r1=float(r1), nr=int(nr), nt=int(nt), **kw)
            if kind in ("rectangle", "rect"):
                x0, x1, y0, y1, nx, ny = vals
                return cls("rectangle", x0=float(x0), x1=float(x1), y0=float(y0), y1=float(y1), nr=int(nx), nt=int(ny), **kw)
        except ValueError as exc:
            raise ValidationError(f"bad grid specification {text!r}: {exc}") from None
        raise ValidationError(f"unknown grid kind in {text!r}")

    def validate(self) -> None:
        if self.kind == "annulus":
            if not (0 < self.r0 < self.r1):
                raise ValidationError("annulus needs 0 < r0 < r1")
            if self.nr < 2 or self.nt < 3:
                raise ValidationError("annulus needs nr >= 2 and nt >= 3")
        elif self.kind == "disk":
            if not self.r1 > 0 or self.nr < 1 or self.nt < 3:
                raise ValidationError("disk needs r > 0, nr >= 1 and nt >= 3")
        elif self.kind == "rectangle":
            if not (self.x0 < self.x1 and self.y0 < self.y1):
                raise ValidationError("rectangle needs x0 < x1 and y0 < y1")
            if self.nr < 2 or self.nt < 2:
                raise ValidationError("rectangle needs at least 2 x 2 vertices")
        else:
            raise ValidationError(f"unknown grid kind {self.kind!r}")

    @property
    def simply_connected(self) -> bool:
        return self.kind != "annulus"

    def radii(self) -> np.ndarray:
        if self.kind == "annulus":
            return np.geomspace(self.r0, self.r1, self.nr)
        return np.linspace(0.0, self.r1, self.nr + 1)[1:]

    def angles(self) -> np.ndarray:
        return 2 * math.pi * np.arange(self.nt) / self.nt


@dataclass
class _Topology:
    points: list  # chart coordinates
    faces: list  # index tuples
    edges: dict  # (i, j) -> Segment from vertex i to vertex j
    root: int


def _polar_topology(grid: MeshGrid) -> _Topology:
    c = complex(grid.center)
    radii, angles = grid.radii(), grid.angles()
    nt = grid.nt
    pts, idx = [], {}
    offset = 0
    if grid.kind == "disk":
        pts.append(c)
        offset = 1
    for i, r in enumerate(radii):
        for k, t in enumerate(angles):
            idx[i, k] = len(pts)
            pts.append(c + r * cmath.exp(1j * t))
    step = 2 * math.pi / nt
    edges = {}

    def add(a, b, seg):
        edges[a, b] = seg

    for i, r in enumerate(radii):
        for k in range(nt):
            a, b = idx[i, k], idx[i, (k + 1) % nt]
            add(a, b, Segment.arc(c, r, angles[k], step))
            add(b, a, Segment.arc(c, r, angles[k] + step, -step))
            if i + 1 < len(radii):
                a2 = idx[i + 1, k]
                add(a, a2, Segment.line(pts[a], pts[a2]))
                add(a2, a, Segment.line(pts[a2], pts[a]))
    faces = []
    if grid.kind == "disk":
        for k in range(nt):
            a, b = idx[0, k], idx[0, (k + 1) % nt]
            add(0, a, Segment.line(c, pts[a]))
            add(a, 0, Segment.line(pts[a], c))
            faces.append((0, a, b))
    for i in range(len(radii) - 1):
        for k in range(nt):
            k2 = (k + 1) % nt
            faces.append((idx[i, k], idx[i, k2], idx[i + 1, k2], idx[i + 1, k]))
    root = 0 if grid.kind == "disk" else idx[len(radii) // 2, 0]
    del offset
    return _Topology(pts, faces, edges, root)


def _rect_topology(grid: MeshGrid) -> _Topology:
    xs = np.linspace(grid.x0, grid.x1, grid.nr)
    ys = np.linspace(grid.y0, grid.y1, grid.nt)
    c = complex(grid.center)
    pts, idx = [], {}
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            idx[i, j] = len(pts)
            pts.append(c + complex(x, y))
    edges = {}
    for j in range(len(ys)):
        for i in range(len(xs)):
            a = idx[i, j]
            for di, dj in ((1, 0), (0, 1)):
                if (i + di, j + dj) in idx:
                    b = idx[i + di, j + dj]
                    edges[a, b] = Segment.line(pts[a], pts[b])
                    edges[b, a] = Segment.line(pts[b], pts[a])
    faces = [
        (idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]) for j in range(len(ys) - 1) for i in range(len(xs) - 1)
    ]
    root = idx[len(xs) // 2, len(ys) // 2]
    return _Topology(pts, faces, edges, root)


def _spanning_tree(top: _Topology, order: str) -> list[tuple[int, int]]:
    """Parent/child pairs in BFS order.  ``order`` decides which edge
    direction is explored first, which gives genuinely different trees."""
    nbrs: dict[int, list[int]] = {}
    for a, b in top.edges:
        nbrs.setdefault(a, []).append(b)
    pts = top.points

    def key(a, b):
        d = pts[b] - pts[a]
        radial = abs(abs(pts[b]) - abs(pts[a])) > 0.5 * abs(d) if order in ("rays", "rings") else abs(d.real) > abs(d.imag)
        first = order in ("rays", "columns")
        return (0 if radial == first else 1, b)

    seen = {top.root}
    out = []
    queue = deque([top.root])
    while queue:
        a = queue.popleft()
        for b in sorted(nbrs.get(a, []), key=lambda b: key(a, b)):
            if b not in seen:
                seen.add(b)
                out.append((a, b))
                queue.append(b)
    return out


@dataclass
class Mesh:
    vertices: np.ndarray  # (N, 3) ball coordinates
    faces: list
    z: np.ndarray  # chart coordinate of each vertex
    hermitian: np.ndarray  # (N, 2, 2) points F F*
    conformal_factor: np.ndarray  # ds^2 = conformal_factor |dz|^2
    dsigma_factor: np.ndarray  # dsigma^2 = dsigma_factor |dz|^2
    K: np.ndarray
    Q_abs2: np.ndarray  # |Q|^2 from the data
    grid: Optional[MeshGrid] = None
    dual: bool = False
    clipped: list = field(default_factory=list)
    unitarizer: Optional[np.ndarray] = None
    periods_closed: bool = True

    @property
    def kept(self) -> np.ndarray:
        mask = np.ones(len(self.vertices), dtype=bool)
        mask[list(self.clipped)] = False
        return mask


def _coeff(system: LiftSystem, z: complex, logs) -> np.ndarray:
    a = system.coefficient(z, logs)
    return np.array([[a[0], a[1]], [a[2], a[3]]])


def _coeff_derivative(system: LiftSystem, z: complex, logs) -> np.ndarray:
    """Five-point complex difference of the holomorphic coefficient."""
    h = 1e-3 * min(1.0, system.nearest_singular_distance(z))
    bp = system.branch_points

    def at(s):
        w = z + s * h
        lg = None if logs is None else [lj + cmath.log(1 + s * h / (z - p)) for lj, p in zip(logs, bp)]
        return _coeff(system, w, lg)

    return (8 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12 * h)


def _alpha_and_derivative(system: LiftSystem, z, F, logs, dual: bool):
    """``alpha = F^-1 F'`` and ``alpha'`` for the lift or for its dual."""
    A = _coeff(system, z, logs)
    Ap = _coeff_derivative(system, z, logs)
    if system.form == "left":
        F1 = A @ F
        F2 = Ap @ F + A @ F1
    else:
        F1 = F @ A
        F2 = F1 @ A + F @ Ap
    Fi = inv2(F)
    if not dual:
        return Fi @ F1, -Fi @ F1 @ Fi @ F1 + Fi @ F2
    # the dual lift is F^-1, whose alpha is -F' F^-1
    B = F1 @ Fi
    Bp = F2 @ Fi - F1 @ Fi @ F1 @ Fi
    return -B, -Bp


def _metric_at(alpha, alpha_p):
    """Conformal factors of ds^2 and dsigma^2 from ``alpha = [[g, -g^2], [1, -g]] w``."""
    w = alpha[1, 0]
    wp = alpha_p[1, 0]
    g = alpha[0, 0] / w
    gp = (alpha_p[0, 0] * w - alpha[0, 0] * wp) / (w * w)
    s = 1.0 + abs(g) ** 2
    return s * s * abs(w) ** 2, 4 * abs(gp) ** 2 / (s * s), w * gp


def _unitarizer(system: LiftSystem, grid: MeshGrid, cfg):
    """Lift value at the tree root in the basis of the monodromy computation,
    and the unitarizing matrix ``P`` (identity when not needed)."""
    data = system.data
    if grid.simply_connected or data is None or not data.punctures:
        return None, np.eye(2, dtype=complex), True
    rep = full_representation(system, cfg=cfg, check_relation=False)
    rep_report = unitarizability(rep)
    closed = rep_report.verdict is Verdict.UNITARIZABLE and rep_report.P is not None
    if not closed:
        warnings.warn(
            PeriodsOpenWarning(f"monodromy is not unitarizable (defect {rep_report.defect:.3e}); mesh covers the universal-cover chart")
        )
        return None, np.eye(2, dtype=complex), False
    return rep.basepoint, rep_report.P, True


def sample_surface(data, grid: MeshGrid, dual: bool = False, cfg: IntegratorConfig | None = None, form: str | None = None) -> Mesh:
    """Integrate the lift over ``grid`` and map every vertex to the ball."""
    grid.validate()
    cfg = cfg or IntegratorConfig()
    system = data if isinstance(data, LiftSystem) else build_system(data, form)
    top = _polar_topology(grid) if grid.kind in ("annulus", "disk") else _rect_topology(grid)
    sing = system.singular_points
    for z in top.points:
        if sing and min(abs(z - p) for p in sing) < grid.clearance:
            raise ValidationError(f"grid vertex {z} lies within {grid.clearance:g} of a singular point")

    base, P, closed = _unitarizer(system, grid, cfg)
    root_z = top.points[top.root]
    if base is not None:
        st = integrate_lift(system, PathSpec.straight(base, root_z), cfg=cfg)
        F_root, logs_root = st.F, st.branch_logs
    else:
        F_root, logs_root = np.eye(2, dtype=complex), system.initial_logs(root_z)
    Pi = inv2(P)

    n = len(top.points)
    Fs: list = [None] * n
    logs_all: list = [None] * n
    Fs[top.root], logs_all[top.root] = F_root, logs_root
    # tree construction is serial and deterministic; each edge is a short
    # independent integration continued from its parent
    for a, b in _spanning_tree(top, grid.tree):
        st = integrate_lift(system, PathSpec([top.edges[a, b]], clearance=grid.clearance), F0=Fs[a], logs0=logs_all[a], cfg=cfg)
        Fs[b], logs_all[b] = st.F, st.branch_logs

    verts = np.zeros((n, 3))
    herm = np.zeros((n, 2, 2), dtype=complex)
    cf = np.zeros(n)
    sf = np.zeros(n)
    K = np.zeros(n)
    q2 = np.zeros(n)
    for v in range(n):
        z, F, logs = top.points[v], Fs[v], logs_all[v]
        Ft = F @ Pi
        if dual:
            Ft = inv2(Ft)
        X = Ft @ adjoint(Ft)
        herm[v] = X
        verts[v] = hermitian_to_ball(X)
        alpha, alpha_p = _alpha_and_derivative(system, z, F, logs, dual)
        cf[v], sf[v], _ = _metric_at(alpha, alpha_p)
        K[v] = -sf[v] / cf[v] if cf[v] > 0 else math.nan
        q2[v] = abs(system.Q_eval(z)) ** 2
    clipped = [int(v) for v in np.nonzero(np.linalg.norm(verts, axis=1) > BALL_LIMIT)[0]]
    return Mesh(verts, top.faces, np.array(top.points), herm, cf, sf, K, q2, grid, dual, clipped, P, closed)


@dataclass
class MetricReport:
    max_identity_error: float
    max_K: float
    vertices: int
    tol: float
    ok: bool

    def to_json(self) -> dict:
        return {
            "max_identity_error": self.max_identity_error,
            "max_K": self.max_K,
            "vertices": self.vertices,
            "tol": self.tol,
            "ok": self.ok,
        }


def metric_checks(data, mesh: Mesh, tol: float = 1e-7) -> MetricReport:
    """Check ``ds^2 dsigma^2 = 4|Q|^2`` and ``K <= 0`` at every vertex.

    The left side comes from the integrated lift; ``|Q|^2`` comes from the
    data.  Errors are relative to ``4|Q|^2`` with an absolute floor of one,
    which keeps flat pieces (``Q = 0``) meaningful.
    """
    lhs = mesh.conformal_factor * mesh.dsigma_factor
    rhs = 4 * mesh.Q_abs2
    err = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1.0)
    Kmax = float(np.nanmax(mesh.K)) if len(mesh.K) else 0.0
    worst = float(np.max(err)) if len(err) else 0.0
    ok = worst <= tol and Kmax <= tol
    return MetricReport(worst, Kmax, len(lhs), tol, bool(ok))


def rotation_defect(mesh: Mesh, shift: int, rings: Optional[list] = None) -> float:
    """Largest change in pairwise hyperbolic distance when every vertex of a
    polar grid is moved ``shift`` steps in angle.  Zero iff the angular shift
    is realized by an isometry (for point sets in general position)."""
    g = mesh.grid
    if g is None or g.kind != "annulus":
        raise ValidationError("rotation_defect needs an annulus mesh")
    nt = g.nt
    rings = list(range(g.nr)) if rings is None else rings
    sel = [(i, k) for i in rings for k in range(0, nt, max(1, nt // 8))]
    X = mesh.hermitian

    def vid(i, k):
        return i * nt + (k % nt)

    worst = 0.0
    for a in range(len(sel)):
        for b in range(a + 1, len(sel)):
            (i1, k1), (i2, k2) = sel[a], sel[b]
            d0 = hyperbolic_distance(X[vid(i1, k1)], X[vid(i2, k2)])
            d1 = hyperbolic_distance(X[vid(i1, k1 + shift)], X[vid(i2, k2 + shift)])
            worst = max(worst, abs(d0 - d1))
    return worst


def _fmt(x: float) -> str:
    s = f"{x:.12f}"
    return "0.000000000000" if s.lstrip("-").strip("0.") == "" else s


def export_obj(mesh: Mesh, path, k_path=None) -> dict:
    """Write an OBJ file and a CSV of per-vertex curvature.

    Vertices outside radius ``1 - 1e-6`` are dropped along with the faces
    that use them; the return value reports how many.
    """
    keep = mesh.kept
    new_index = np.cumsum(keep) - 1
    lines = []
    for v in np.nonzero(keep)[0]:
        x, y, z = mesh.vertices[v]
        lines.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
    nf = 0
    for f in mesh.faces:
        if all(keep[i] for i in f):
            lines.append("f " + " ".join(str(int(new_index[i]) + 1) for i in f))
            nf += 1
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    k_path = k_path if k_path is not None else str(path) + ".K.csv"
    with open(k_path, "w", newline="\n") as fh:
        fh.write("index,re_z,im_z,K\n")
        for j, v in enumerate(np.nonzero(keep)[0]):
            z = mesh.z[v]
            fh.write(f"{j + 1},{_fmt(z.real)},{_fmt(z.imag)},{_fmt(mesh.K[v])}\n")
    return {"obj": str(path), "curvature": str(k_path), "vertices": int(keep.sum()), "faces": nf, "dropped": len(mesh.clipped)}


def read_obj(path) -> tuple[np.ndarray, list]:
    """Parse the ``v``/``f`` lines of an OBJ file."""
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(t) for t in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(t.split("/")[0]) for t in parts[1:]])
    return np.array(verts), faces
