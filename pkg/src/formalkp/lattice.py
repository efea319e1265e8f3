"""Parallel transport of polynomial connections on planar triangulations.

Transport along a path ``gamma`` solves ``h' = -theta(gamma') h`` with
``h(0) = 1``; ``T(p -> q)`` is the endpoint.  Under a gauge change ``g`` the form
``g^{-1} dg + g^{-1} theta g`` transports by ``g(q)^{-1} T(p -> q) g(p)``.

The holonomy PC matrix of a set of nodes uses ``a_ij = T(s_j -> s_i)``, so that a
flat connection gives ``a_ij a_jk = a_ik`` and a gauge change acts by
``a_ij -> g_i^{-1} a_ij g_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
import scipy.stats

from .groups import GL
from .pc import PCMatrix

__all__ = [
    "PolyForm",
    "transport",
    "simplex_holonomy",
    "Triangulation",
    "EdgeField",
    "discretize_connection",
    "loop_holonomy",
    "curvature_estimate",
    "refine",
    "refinement_sweep",
    "SweepResult",
]


class PolyForm:
    """Matrix-valued polynomial 1-form ``P(x, y) dx + Q(x, y) dy``.

    ``P`` and ``Q`` map exponent pairs ``(a, b)`` (for ``x^a y^b``) to ``dim x dim`` matrices.
    """

    def __init__(self, P: Mapping | None = None, Q: Mapping | None = None, dim: int = 1):
        self.dim = dim
        self.P = {tuple(k): np.asarray(v, dtype=complex).reshape(dim, dim) for k, v in (P or {}).items()}
        self.Q = {tuple(k): np.asarray(v, dtype=complex).reshape(dim, dim) for k, v in (Q or {}).items()}

    @staticmethod
    def _eval(poly, x, y, dim):
        out = np.zeros((dim, dim), dtype=complex)
        for (a, b), c in poly.items():
            out = out + c * (x ** a) * (y ** b)
        return out

    def components(self, x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
        return self._eval(self.P, x, y, self.dim), self._eval(self.Q, x, y, self.dim)

    def __call__(self, x: float, y: float, vx: float, vy: float) -> np.ndarray:
        p, q = self.components(x, y)
        return p * vx + q * vy

    def degree(self) -> int:
        return max((a + b for a, b in list(self.P) + list(self.Q)), default=0)

    def is_abelian(self) -> bool:
        """All coefficient matrices commute pairwise."""
        mats = list(self.P.values()) + list(self.Q.values())
        return all(np.allclose(a @ b, b @ a) for a in mats for b in mats)

    def curvature(self, x: float, y: float) -> np.ndarray:
        """``F_xy = d_x Q - d_y P + [P, Q]``."""
        dQ = np.zeros((self.dim, self.dim), dtype=complex)
        dP = np.zeros((self.dim, self.dim), dtype=complex)
        for (a, b), c in self.Q.items():
            if a:
                dQ = dQ + c * a * x ** (a - 1) * y ** b
        for (a, b), c in self.P.items():
            if b:
                dP = dP + c * b * x ** a * y ** (b - 1)
        p, q = self.components(x, y)
        return dQ - dP + p @ q - q @ p

    def to_json(self) -> dict:
        def enc(poly):
            return [{"exp": list(k), "coeff": [[[float(z.real), float(z.imag)] for z in row] for row in v]}
                    for k, v in sorted(poly.items())]
        return {"dim": self.dim, "P": enc(self.P), "Q": enc(self.Q)}

    @classmethod
    def from_json(cls, obj: dict) -> "PolyForm":
        dim = int(obj.get("dim", 1))

        def dec(items):
            out = {}
            for e in items:
                arr = np.asarray(e["coeff"], dtype=float)
                if arr.ndim == 3:
                    arr = arr[..., 0] + 1j * arr[..., 1]
                out[tuple(e["exp"])] = arr.reshape(dim, dim)
            return out
        return cls(dec(obj.get("P", [])), dec(obj.get("Q", [])), dim)


def _rk4(theta: PolyForm, p, q, steps: int) -> np.ndarray:
    v = np.subtract(q, p)
    h = np.eye(theta.dim, dtype=complex)
    dt = 1.0 / steps

    def f(t, y):
        x = p[0] + t * v[0]
        z = p[1] + t * v[1]
        return -theta(x, z, v[0], v[1]) @ y

    for k in range(steps):
        t = k * dt
        k1 = f(t, h)
        k2 = f(t + dt / 2, h + dt / 2 * k1)
        k3 = f(t + dt / 2, h + dt / 2 * k2)
        k4 = f(t + dt, h + dt * k3)
        h = h + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return h


def transport(theta: PolyForm, p: Sequence[float], q: Sequence[float], tol: float = 1e-8,
              max_steps: int = 1 << 14, abelian: bool | None = None) -> np.ndarray:
    """``T(p -> q)`` along the straight segment.

    Abelian forms use ``exp(-int theta)`` with Gauss-Legendre quadrature exact
    for the polynomial degree.  Otherwise RK4 with step halving until two
    successive results agree to ``tol`` (Richardson-corrected).
    """
    abelian = theta.is_abelian() if abelian is None else abelian
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if abelian:
        deg = theta.degree()
        nodes, weights = np.polynomial.legendre.leggauss(deg // 2 + 1)
        t = (nodes + 1) / 2
        v = q - p
        integral = sum(w / 2 * theta(*(p + ti * v), *v) for ti, w in zip(t, weights))
        return scipy.linalg.expm(-integral)
    steps = 8
    prev = _rk4(theta, p, q, steps)
    while steps < max_steps:
        steps *= 2
        cur = _rk4(theta, p, q, steps)
        err = np.max(np.abs(cur - prev)) / 15
        if err <= tol:
            return cur + (cur - prev) / 15
        prev = cur
    raise RuntimeError(f"transport did not reach tolerance {tol} within {max_steps} steps")


def _real_if_close(m):
    return np.real_if_close(m, tol=1e6)


def simplex_holonomy(theta: PolyForm, vertices: Sequence[Sequence[float]], tol: float = 1e-8) -> PCMatrix:
    """PC matrix ``a_ij = T(s_j -> s_i)`` over ``GL(dim)``."""
    n = len(vertices)
    G = GL(theta.dim, tol=max(tol * 10, 1e-12))
    e = [[None] * n for _ in range(n)]
    for i in range(n):
        e[i][i] = np.eye(theta.dim)
        for j in range(i + 1, n):
            T = transport(theta, vertices[j], vertices[i], tol)
            e[i][j] = _real_if_close(T)
            e[j][i] = _real_if_close(np.linalg.inv(T))
    return PCMatrix(G, e)


# ---------------------------------------------------------------------- triangulations
@dataclass
class Triangulation:
    nodes: np.ndarray
    simplices: list

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.simplices = [tuple(int(v) for v in s) for s in self.simplices]
        for s in self.simplices:
            if len(s) != 3 or len(set(s)) != 3:
                raise ValueError(f"simplex {s} is not a triangle")
            if abs(self.signed_area(s)) <= 0:
                raise ValueError(f"simplex {s} is degenerate")

    def signed_area(self, s) -> float:
        a, b, c = (self.nodes[i] for i in s)
        return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))

    def edges(self) -> list[tuple[int, int]]:
        out = set()
        for s in self.simplices:
            for i in range(3):
                a, b = s[i], s[(i + 1) % 3]
                out.add((min(a, b), max(a, b)))
        return sorted(out)

    def neighbors(self) -> dict[int, set]:
        nb: dict[int, set] = {i: set() for i in range(len(self.nodes))}
        for a, b in self.edges():
            nb[a].add(b)
            nb[b].add(a)
        return nb

    def to_json(self) -> dict:
        return {"nodes": self.nodes.tolist(), "simplices": [list(s) for s in self.simplices]}

    @classmethod
    def from_json(cls, obj) -> "Triangulation":
        return cls(obj["nodes"], obj["simplices"])


@dataclass
class EdgeField:
    """Frames ``h_i`` (transport from the basepoint along the tree) and frame-corrected edges.

    ``g[(i, j)] = h_j^{-1} T(i -> j) h_i``; tree edges carry the identity.
    """

    order: list
    parent: dict
    frames: dict
    g: dict
    tree_edges: set = field(default_factory=set)

    def edge(self, i: int, j: int) -> np.ndarray:
        if (i, j) in self.g:
            return self.g[(i, j)]
        return np.linalg.inv(self.g[(j, i)])


def discretize_connection(tri: Triangulation, theta: PolyForm, basepoint: int = 0,
                          tol: float = 1e-8) -> EdgeField:
    """Spanning-tree gauge: visit nodes outward, each attached to its lowest-ranked visited neighbour."""
    nb = tri.neighbors()
    if not nb:
        raise ValueError("empty triangulation")
    rank = {basepoint: 0}
    order = [basepoint]
    parent: dict = {}
    frontier = set(nb[basepoint])
    while frontier:
        # the next node is the unvisited neighbour whose star contains the lowest-ranked visited node
        cand = min(frontier, key=lambda v: (min(rank[u] for u in nb[v] if u in rank), v))
        parent[cand] = min((u for u in nb[cand] if u in rank), key=lambda u: rank[u])
        rank[cand] = len(order)
        order.append(cand)
        frontier.discard(cand)
        frontier |= {w for w in nb[cand] if w not in rank}
    if len(order) != len(tri.nodes):
        raise ValueError("triangulation is not connected")
    pts = tri.nodes
    T = {}
    for a, b in tri.edges():
        T[(a, b)] = transport(theta, pts[a], pts[b], tol)
        T[(b, a)] = np.linalg.inv(T[(a, b)])
    frames = {basepoint: np.eye(theta.dim, dtype=complex)}
    for v in order[1:]:
        frames[v] = T[(parent[v], v)] @ frames[parent[v]]
    g = {}
    tree = {(parent[v], v) for v in order[1:]} | {(v, parent[v]) for v in order[1:]}
    for a, b in tri.edges():
        g[(a, b)] = np.linalg.inv(frames[b]) @ T[(a, b)] @ frames[a]
    return EdgeField(order, parent, frames, g, tree)


def loop_holonomy(field: EdgeField, simplex: Sequence[int]) -> np.ndarray:
    """``g_ca g_bc g_ab`` for the triangle ``(a, b, c)``, in the frame at ``a``."""
    a, b, c = simplex
    return field.edge(c, a) @ field.edge(b, c) @ field.edge(a, b)


def curvature_estimate(field: EdgeField, tri: Triangulation, simplex: Sequence[int]) -> np.ndarray:
    """``(Hol(boundary) - 1) / area`` with the triangle oriented counter-clockwise.

    For ``h' = -theta h`` this approximates ``-F_xy`` in the frame at the first vertex.
    """
    s = tuple(simplex)
    area = tri.signed_area(s)
    if area < 0:
        s = (s[0], s[2], s[1])
        area = -area
    H = loop_holonomy(field, s)
    return (H - np.eye(H.shape[0])) / area


def refine(tri: Triangulation) -> Triangulation:
    """Split every triangle into four through edge midpoints."""
    nodes = [tuple(p) for p in tri.nodes]
    index = {p: i for i, p in enumerate(nodes)}

    def mid(a, b):
        p = tuple((np.asarray(nodes[a]) + np.asarray(nodes[b])) / 2)
        if p not in index:
            index[p] = len(nodes)
            nodes.append(p)
        return index[p]

    simp = []
    for a, b, c in tri.simplices:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        simp += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    return Triangulation(np.array(nodes), simp)


@dataclass
class SweepResult:
    """Refinement table and the fitted model ``error = C h^order``."""

    h: list
    errors: list
    order: float
    order_stderr: float
    C: float
    C_interval: tuple

    def to_rows(self) -> list[dict]:
        return [{"level": k, "h": h, "max_error": e} for k, (h, e) in enumerate(zip(self.h, self.errors))]


def refinement_sweep(tri: Triangulation, theta: PolyForm, levels: int = 3, tol: float = 1e-10,
                     exact_curvature=None) -> SweepResult:
    """Max error of :func:`curvature_estimate` against ``-F_xy`` at triangle centroids.

    Both sides are compared in the frame at the first vertex for non-abelian
    forms (``F`` is conjugated by the frame).
    """
    hs, errs = [], []
    cur = tri
    for _ in range(levels):
        cur = refine(cur)
        field = discretize_connection(cur, theta, tol=tol)
        worst = 0.0
        for s in cur.simplices:
            est = curvature_estimate(field, cur, s)
            c = cur.nodes[list(s)].mean(axis=0)
            F = theta.curvature(*c) if exact_curvature is None else exact_curvature(*c)
            fr = field.frames[s[0]]
            target = -np.linalg.inv(fr) @ F @ fr
            worst = max(worst, float(np.max(np.abs(est - target))))
        hmax = max(np.linalg.norm(cur.nodes[a] - cur.nodes[b]) for a, b in cur.edges())
        hs.append(float(hmax))
        errs.append(worst)
    lh, le = np.log(hs), np.log(np.maximum(errs, 1e-300))
    fit = scipy.stats.linregress(lh, le)
    tcrit = scipy.stats.t.ppf(0.975, max(len(hs) - 2, 1))
    C = math.exp(fit.intercept)
    ci = (math.exp(fit.intercept - tcrit * fit.intercept_stderr), math.exp(fit.intercept + tcrit * fit.intercept_stderr))
    return SweepResult(hs, errs, float(fit.slope), float(fit.stderr), C, ci)
