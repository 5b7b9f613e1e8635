"""Oriented simplicial complexes (nodes, edges, triangles) and their boundary maps.

Vertices are labelled ``1..n_nodes``. Every simplex is stored as an ascending
tuple of vertex labels, which is also its reference orientation. Edge and
triangle *column* indices are 0-based positions in :attr:`SimplicialComplex.edges`
and :attr:`SimplicialComplex.triangles`.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

Edge = tuple[int, int]
Triangle = tuple[int, int, int]


class ComplexError(ValueError):
    """Invalid simplices, geometry or construction parameters."""


@dataclass(frozen=True)
class SimplicialComplex:
    n_nodes: int
    edges: tuple[Edge, ...]
    triangles: tuple[Triangle, ...]
    edge_index: dict[Edge, int] = field(repr=False, compare=False)
    triangle_index: dict[Triangle, int] = field(repr=False, compare=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        """``(N0, N1, N2)``."""
        return self.n_nodes, len(self.edges), len(self.triangles)

    @property
    def euler_characteristic(self) -> int:
        n0, n1, n2 = self.shape
        return n0 - n1 + n2

    @cached_property
    def boundary_1(self) -> sp.csc_matrix:
        return boundary_1(self)

    @cached_property
    def boundary_2(self) -> sp.csc_matrix:
        return boundary_2(self)

    def neighbors(self) -> list[list[int]]:
        """Adjacency lists of the 1-skeleton, 1-based labels, index 0 unused."""
        adj: list[list[int]] = [[] for _ in range(self.n_nodes + 1)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for a in adj:
            a.sort()
        return adj

    def is_connected(self) -> bool:
        if self.n_nodes <= 1:
            return True
        adj = self.neighbors()
        seen = {1}
        queue = deque([1])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n_nodes

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "edges": [list(e) for e in self.edges],
            "triangles": [list(t) for t in self.triangles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimplicialComplex":
        return from_simplices(data["n_nodes"], data.get("edges", []), data.get("triangles", []))


@dataclass(frozen=True)
class Geometry:
    """Planar node positions; row ``i`` holds the position of node ``i + 1``."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ComplexError(f"positions must have shape (N0, 2), got {pos.shape}")
        object.__setattr__(self, "positions", pos)

    def __len__(self) -> int:
        return len(self.positions)

    def check(self, X: SimplicialComplex) -> None:
        if len(self) != X.n_nodes:
            raise ComplexError(f"geometry has {len(self)} positions for {X.n_nodes} nodes")


def _canonical(simplex, n_nodes: int, size: int) -> tuple[int, ...]:
    verts = tuple(sorted(int(v) for v in simplex))
    if len(verts) != size:
        raise ComplexError(f"expected a {size}-vertex simplex, got {list(simplex)}")
    if len(set(verts)) != size:
        raise ComplexError(f"degenerate simplex with repeated vertex: {list(simplex)}")
    for v in verts:
        if not 1 <= v <= n_nodes:
            raise ComplexError(f"vertex {v} out of range [1, {n_nodes}]")
    return verts


def from_simplices(n_nodes: int, edges=(), triangles=()) -> SimplicialComplex:
    """Build a complex, adding the missing edges of every triangle.

    Simplices may be given in any vertex order; duplicates are merged.
    """
    if n_nodes < 0:
        raise ComplexError("n_nodes must be nonnegative")
    tris = {_canonical(t, n_nodes, 3) for t in triangles}
    eds = {_canonical(e, n_nodes, 2) for e in edges}
    for i, j, k in tris:
        eds.update(((i, j), (j, k), (i, k)))
    edges_sorted = tuple(sorted(eds))
    tris_sorted = tuple(sorted(tris))
    return SimplicialComplex(
        n_nodes=n_nodes,
        edges=edges_sorted,
        triangles=tris_sorted,
        edge_index={e: c for c, e in enumerate(edges_sorted)},
        triangle_index={t: c for c, t in enumerate(tris_sorted)},
    )


def boundary_1(X: SimplicialComplex) -> sp.csc_matrix:
    """Node-edge incidence: column ``[i, j]`` is ``e_j - e_i``."""
    n1 = len(X.edges)
    if n1 == 0:
        return sp.csc_matrix((X.n_nodes, 0), dtype=np.int64)
    e = np.asarray(X.edges, dtype=np.int64) - 1
    rows = e.ravel()
    cols = np.repeat(np.arange(n1), 2)
    vals = np.tile(np.array([-1, 1], dtype=np.int64), n1)
    return sp.csc_matrix((vals, (rows, cols)), shape=(X.n_nodes, n1), dtype=np.int64)


def boundary_2(X: SimplicialComplex) -> sp.csc_matrix:
    """Edge-triangle incidence: ``[i,j,k] -> [i,j] + [j,k] - [i,k]``."""
    n1, n2 = len(X.edges), len(X.triangles)
    if n2 == 0:
        return sp.csc_matrix((n1, 0), dtype=np.int64)
    rows, cols, vals = [], [], []
    for c, (i, j, k) in enumerate(X.triangles):
        rows += [X.edge_index[(i, j)], X.edge_index[(j, k)], X.edge_index[(i, k)]]
        cols += [c, c, c]
        vals += [1, 1, -1]
    return sp.csc_matrix((vals, (rows, cols)), shape=(n1, n2), dtype=np.int64)


# --------------------------------------------------------------------------
# Delaunay triangulation (Bowyer-Watson with ghost triangles)

_GHOST = -1
INCIRCLE_TOL = 1e-12


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _incircle(a, b, c, d) -> float:
    """Positive iff ``d`` lies inside the circumcircle of the ccw triangle ``abc``."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    return (
        adx * (bdy * cd - bd * cdy)
        - ady * (bdx * cd - bd * cdx)
        + ad * (bdx * cdy - bdy * cdx)
    )


class _Mesh:
    """Triangles keyed by their three directed edges; ghost vertex is ``-1``."""

    def __init__(self, pts: np.ndarray):
        self.pts = pts
        self.by_edge: dict[tuple[int, int], tuple[int, int, int]] = {}

    def add(self, t):
        a, b, c = t
        self.by_edge[(a, b)] = t
        self.by_edge[(b, c)] = t
        self.by_edge[(c, a)] = t

    def remove(self, t):
        a, b, c = t
        for e in ((a, b), (b, c), (c, a)):
            if self.by_edge.get(e) == t:
                del self.by_edge[e]

    def triangles(self):
        return set(self.by_edge.values())

    def in_circumcircle(self, t, p: int) -> bool:
        a, b, c = t
        P = self.pts
        if c == _GHOST:
            o = _orient(P[a], P[b], P[p])
            if o > INCIRCLE_TOL:
                return True
            if o < -INCIRCLE_TOL:
                return False
            # collinear with the hull edge: inside only strictly within the segment
            d = P[b] - P[a]
            s = np.dot(P[p] - P[a], d) / np.dot(d, d)
            return 0.0 < s < 1.0
        return _incircle(P[a], P[b], P[c], P[p]) > INCIRCLE_TOL

    def contains(self, t, p: int) -> bool:
        a, b, c = t
        P = self.pts
        if c == _GHOST:
            return _orient(P[a], P[b], P[p]) > 0.0
        q = P[p]
        return (_orient(P[a], P[b], q) >= 0.0 and _orient(P[b], P[c], q) >= 0.0
                and _orient(P[c], P[a], q) >= 0.0)

    def insert(self, p: int) -> None:
        tris = self.triangles()
        real = sorted(t for t in tris if _GHOST not in t)
        ghost = sorted(t for t in tris if _GHOST in t)
        seed = next((t for t in real if self.contains(t, p)), None)
        if seed is None:
            seed = next((t for t in ghost if self.contains(t, p)), None)
        if seed is None:
            seed = next((t for t in real + ghost if self.in_circumcircle(t, p)), None)
        if seed is None:  # pragma: no cover - duplicate point
            raise ComplexError("point could not be inserted (duplicate?)")
        bad = {seed}
        queue = deque([seed])
        boundary = []
        while queue:
            t = queue.popleft()
            a, b, c = t
            for e in ((a, b), (b, c), (c, a)):
                nb = self.by_edge.get((e[1], e[0]))
                if nb is not None and nb not in bad and self.in_circumcircle(nb, p):
                    bad.add(nb)
                    queue.append(nb)
        for t in bad:
            a, b, c = t
            for e in ((a, b), (b, c), (c, a)):
                if self.by_edge.get((e[1], e[0])) not in bad:
                    boundary.append(e)
        for t in bad:
            self.remove(t)
        for a, b in boundary:
            if a == _GHOST:
                self.add((b, p, _GHOST))
            elif b == _GHOST:
                self.add((p, a, _GHOST))
            else:
                self.add((a, b, p))


def _lawson_pass(mesh: _Mesh) -> int:
    """One sweep of illegal-edge and co-circular lexicographic flips."""
    P = mesh.pts
    flips = 0
    for t in sorted(mesh.triangles()):
        if _GHOST in t or mesh.by_edge.get((t[0], t[1])) != t:
            continue
        a, b, c = t
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            other = mesh.by_edge.get((v, u))
            if other is None or _GHOST in other:
                continue
            d = next(x for x in other if x not in (u, v))
            det = _incircle(P[u], P[v], P[w], P[d])
            flip = det > INCIRCLE_TOL
            if not flip and abs(det) <= INCIRCLE_TOL:
                flip = (min(w, d), max(w, d)) < (min(u, v), max(u, v))
            # new triangles (u, d, w) and (d, v, w) must both be ccw
            if flip and _orient(P[u], P[d], P[w]) > 0 and _orient(P[d], P[v], P[w]) > 0:
                mesh.remove(t)
                mesh.remove(other)
                mesh.add((u, d, w))
                mesh.add((d, v, w))
                flips += 1
                break
    return flips


def delaunay(points) -> tuple[SimplicialComplex, Geometry]:
    """Delaunay triangulation of planar points; node ``i + 1`` is ``points[i]``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ComplexError("points must have shape (n, 2)")
    n = len(pts)
    if n < 3:
        raise ComplexError(f"need at least 3 points, got {n}")
    if len({tuple(p) for p in pts.tolist()}) != n:
        raise ComplexError("duplicate points")
    lo = pts.min(axis=0)
    scale = float((pts.max(axis=0) - lo).max())
    unit = (pts - lo) / scale

    third = next((k for k in range(2, n) if abs(_orient(unit[0], unit[1], unit[k])) > INCIRCLE_TOL), None)
    if third is None:
        raise ComplexError("all points are collinear")
    a, b, c = 0, 1, third
    if _orient(unit[a], unit[b], unit[c]) < 0:
        a, b = b, a
    mesh = _Mesh(unit)
    mesh.add((a, b, c))
    mesh.add((b, a, _GHOST))
    mesh.add((c, b, _GHOST))
    mesh.add((a, c, _GHOST))
    for p in range(2, n):
        if p != third:
            mesh.insert(p)
    for _ in range(10 * n):
        if _lawson_pass(mesh) == 0:
            break
    tris = [tuple(v + 1 for v in t) for t in mesh.triangles() if _GHOST not in t]
    return from_simplices(n, [], tris), Geometry(pts)


def circumcenter(a, b, c) -> np.ndarray:
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    d = 2.0 * _orient(a, b, c)
    if d == 0.0:
        raise ComplexError("degenerate triangle has no circumcenter")
    ba, ca = b - a, c - a
    bl, cl = ba @ ba, ca @ ca
    ux = (ca[1] * bl - ba[1] * cl) / d
    uy = (ba[0] * cl - ca[0] * bl) / d
    return a + np.array([ux, uy])


def is_delaunay(X: SimplicialComplex, geom: Geometry, tol: float = INCIRCLE_TOL) -> bool:
    """Brute-force empty-circumcircle check in the unit-normalized frame."""
    pts = geom.positions
    lo = pts.min(axis=0)
    unit = (pts - lo) / float((pts.max(axis=0) - lo).max())
    for t in X.triangles:
        i, j, k = (v - 1 for v in t)
        if _orient(unit[i], unit[j], unit[k]) < 0:
            j, k = k, j
        for p in range(len(unit)):
            if p in (i, j, k):
                continue
            if _incircle(unit[i], unit[j], unit[k], unit[p]) > tol:
                return False
    return True


# --------------------------------------------------------------------------
# derived complexes


def restrict(X: SimplicialComplex, geom: Geometry | None, keep_edges, keep_triangles):
    """Sub-complex on the given simplices, dropping isolated nodes and relabelling."""
    used = sorted({v for e in keep_edges for v in e} | {v for t in keep_triangles for v in t})
    relabel = {old: new for new, old in enumerate(used, start=1)}
    Y = from_simplices(
        len(used),
        [tuple(relabel[v] for v in e) for e in keep_edges],
        [tuple(relabel[v] for v in t) for t in keep_triangles],
    )
    if geom is None:
        return Y, None
    return Y, Geometry(geom.positions[np.asarray(used, dtype=int) - 1])


def punch_hole(X: SimplicialComplex, center, radius: float, geom: Geometry) -> tuple[SimplicialComplex, Geometry]:
    """Remove the triangles whose circumcenter lies strictly within ``radius`` of ``center``.

    Edges interior to the removed region (faces of two removed triangles) go
    too, as do nodes left without edges. Boundary edges of the region stay, so
    each removed disc of triangles leaves one unfilled cycle.
    """
    geom.check(X)
    if radius < 0:
        raise ComplexError("radius must be nonnegative")
    center = np.asarray(center, dtype=float)
    P = geom.positions
    removed = []
    kept = []
    for t in X.triangles:
        cc = circumcenter(*(P[v - 1] for v in t))
        (removed if np.linalg.norm(cc - center) < radius else kept).append(t)
    if not removed:
        return X, geom
    hits: dict[Edge, int] = {}
    for i, j, k in removed:
        for e in ((i, j), (j, k), (i, k)):
            hits[e] = hits.get(e, 0) + 1
    in_kept = {e for i, j, k in kept for e in ((i, j), (j, k), (i, k))}
    edges = [e for e in X.edges if e in in_kept or hits.get(e, 0) < 2]
    Y, G = restrict(X, geom, edges, kept)
    if not Y.is_connected():
        raise ComplexError("hole disconnects the complex")
    return Y, G


@dataclass(frozen=True)
class HexMeta:
    """Per-edge shared-side data for a hexagon complex (arrays indexed by edge column)."""

    circumradius: float
    midpoints: np.ndarray
    lengths: np.ndarray
    normals: np.ndarray


def hex_complex(bounds, circumradius: float, origin=None) -> tuple[SimplicialComplex, Geometry, HexMeta]:
    """Pointy-top hexagonal tiling of ``bounds = (xmin, xmax, ymin, ymax)`` as a complex.

    Hexagon centers strictly inside the bounds become nodes; hexagons sharing a
    side are joined by an edge and every corner-sharing triple is a triangle.
    The lattice has a hexagon center at ``origin`` (default: middle of bounds).
    Nodes are numbered by ascending ``(y, x)`` of their centers.
    """
    xmin, xmax, ymin, ymax = map(float, bounds)
    r = float(circumradius)
    if r <= 0 or xmax <= xmin or ymax <= ymin:
        raise ComplexError("need positive circumradius and nonempty bounds")
    ox, oy = ((xmin + xmax) / 2, (ymin + ymax) / 2) if origin is None else map(float, origin)
    w = np.sqrt(3.0) * r
    row_lo = int(np.floor((ymin - oy) / (1.5 * r))) - 1
    row_hi = int(np.ceil((ymax - oy) / (1.5 * r))) + 1
    cells = []
    for row in range(row_lo, row_hi + 1):
        y = oy + 1.5 * r * row
        if not ymin < y < ymax:
            continue
        q_lo = int(np.floor((xmin - ox) / w - row / 2)) - 1
        q_hi = int(np.ceil((xmax - ox) / w - row / 2)) + 1
        for q in range(q_lo, q_hi + 1):
            x = ox + w * (q + row / 2)
            if xmin < x < xmax:
                cells.append((y, x, q, row))
    if not cells:
        raise ComplexError("no hexagon center falls inside the bounds")
    cells.sort()
    label = {(q, row): n for n, (_, _, q, row) in enumerate(cells, start=1)}
    pos = np.array([[x, y] for y, x, _, _ in cells])
    axial = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
    edges = set()
    for (q, row), i in label.items():
        for dq, dr in axial:
            j = label.get((q + dq, row + dr))
            if j is not None and i < j:
                edges.add((i, j))
    tris = set()
    for (q, row), i in label.items():
        for (dq1, dr1), (dq2, dr2) in zip(axial, axial[1:] + axial[:1]):
            j = label.get((q + dq1, row + dr1))
            k = label.get((q + dq2, row + dr2))
            if j is not None and k is not None:
                tris.add(tuple(sorted((i, j, k))))
    X = from_simplices(len(cells), edges, tris)
    e = np.asarray(X.edges, dtype=int) - 1 if X.edges else np.zeros((0, 2), dtype=int)
    a, b = pos[e[:, 0]], pos[e[:, 1]]
    d = b - a
    normals = d / np.linalg.norm(d, axis=1, keepdims=True) if len(d) else d
    meta = HexMeta(r, (a + b) / 2, np.full(len(e), r), normals)
    return X, Geometry(pos), meta


def hex_complex_for_target(bounds, target_nodes: int, origin=None):
    """Choose the circumradius whose tiling has node count closest to ``target_nodes``.

    Ties go to the larger radius; the scan covers radii on a fine geometric grid.
    """
    xmin, xmax, ymin, ymax = map(float, bounds)
    area = (xmax - xmin) * (ymax - ymin)
    r0 = np.sqrt(2 * area / (3 * np.sqrt(3) * target_nodes))
    best = None
    for r in r0 * np.geomspace(0.8, 1.25, 401)[::-1]:
        try:
            n = hex_complex(bounds, r, origin)[0].n_nodes
        except ComplexError:
            continue
        gap = abs(n - target_nodes)
        if best is None or gap < best[0]:
            best = (gap, float(r))
    if best is None:
        raise ComplexError("no hexagon fits the bounds")
    return hex_complex(bounds, best[1], origin)


def random_complex(rng: np.random.Generator, n_nodes: int, p_edge: float = 0.5, p_tri: float = 0.5) -> SimplicialComplex:
    """Random flag-like complex: G(n, p) edges, each 3-clique filled with probability ``p_tri``."""
    edges = [e for e in itertools.combinations(range(1, n_nodes + 1), 2) if rng.random() < p_edge]
    es = set(edges)
    tris = [
        (i, j, k)
        for i, j, k in itertools.combinations(range(1, n_nodes + 1), 3)
        if (i, j) in es and (j, k) in es and (i, k) in es and rng.random() < p_tri
    ]
    return from_simplices(n_nodes, edges, tris)
