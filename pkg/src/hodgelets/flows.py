"""Edge flows from vector fields and trajectories."""

from __future__ import annotations

import csv
import io
import logging
from collections import deque
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Iterable

import numpy as np

from .complex import ComplexError, Geometry, HexMeta, SimplicialComplex

log = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0


class FlowError(ValueError):
    pass


@dataclass(frozen=True)
class VectorField:
    rule: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        fx, fy = self.rule(x, y)
        return np.stack(np.broadcast_arrays(fx, fy), axis=-1)


def paper_field(radius: float = 0.7) -> VectorField:
    """``[cos(x + y), sin(x - y)]`` on two closed discs centred at ``+-(pi/4, pi/4)``, zero elsewhere."""
    c = np.pi / 4

    def rule(x, y):
        inside = (np.hypot(x - c, y - c) <= radius) | (np.hypot(x + c, y + c) <= radius)
        return np.where(inside, np.cos(x + y), 0.0), np.where(inside, np.sin(x - y), 0.0)

    return VectorField(rule)


def constant_field(fx: float, fy: float) -> VectorField:
    return VectorField(lambda x, y: (np.full_like(x, fx), np.full_like(y, fy)))


def discretize_field(field: VectorField, X: SimplicialComplex, geom: Geometry, meta: HexMeta | None) -> np.ndarray:
    """Flux across each shared hexagon side, by midpoint rule, along the edge orientation."""
    if meta is None:
        raise FlowError("discretization needs the hexagon side metadata")
    geom.check(X)
    if len(meta.lengths) != len(X.edges):
        raise FlowError("hexagon metadata does not match the complex")
    if not len(X.edges):
        return np.zeros(0)
    F = field(meta.midpoints[:, 0], meta.midpoints[:, 1])
    return np.einsum("ij,ij->i", F, meta.normals) * meta.lengths


# --------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    id: str
    points: np.ndarray  # (n, 2) planar coordinates, or (lon, lat) before projection
    times: np.ndarray | None = None
    nodes: tuple[int, ...] | None = None

    def __len__(self) -> int:
        return len(self.points)


def _parse_time(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        pass
    stamp = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.timestamp()


def parse_trajectories(source) -> list[Trajectory]:
    """Read ``id,time,lat,lon`` rows into one time-sorted trajectory per id.

    ``source`` is a path or an open text file. Points are stored as ``(lon, lat)``.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return parse_trajectories(fh)
    reader = csv.DictReader(source)
    header = [h.strip() for h in (reader.fieldnames or [])]
    if not {"id", "time", "lat", "lon"} <= set(header):
        raise FlowError(f"expected header id,time,lat,lon; got {header}")
    reader.fieldnames = header
    samples: dict[str, list[tuple[float, float, float]]] = {}
    skipped = 0
    for row in reader:
        try:
            tid = (row["id"] or "").strip()
            if not tid:
                raise ValueError("missing id")
            t = _parse_time(row["time"])
            lat, lon = float(row["lat"]), float(row["lon"])
        except (TypeError, ValueError, KeyError):
            skipped += 1
            continue
        samples.setdefault(tid, []).append((t, lon, lat))
    if skipped:
        log.warning("skipped %d malformed trajectory rows", skipped)
    if not samples:
        raise FlowError("no valid trajectory rows")
    out = []
    for tid in sorted(samples):
        rows = sorted(samples[tid])
        arr = np.array(rows, dtype=float)
        out.append(Trajectory(tid, arr[:, 1:3], arr[:, 0]))
    return out


def trajectories_csv(trajectories: Iterable[Trajectory]) -> str:
    """Inverse of :func:`parse_trajectories` for (lon, lat) points and epoch times."""
    buf = io.StringIO()
    buf.write("id,time,lat,lon\n")
    for tr in trajectories:
        times = tr.times if tr.times is not None else np.arange(len(tr), dtype=float)
        for t, (lon, lat) in zip(times, tr.points):
            buf.write(f"{tr.id},{float(t)!r},{float(lat)!r},{float(lon)!r}\n")
    return buf.getvalue()


def equirectangular(lonlat: np.ndarray, origin) -> np.ndarray:
    """Project ``(lon, lat)`` degrees to kilometres about ``origin = (lon0, lat0)``."""
    lonlat = np.asarray(lonlat, dtype=float)
    lon0, lat0 = origin
    x = np.radians(lonlat[..., 0] - lon0) * np.cos(np.radians(lat0)) * EARTH_RADIUS_KM
    y = np.radians(lonlat[..., 1] - lat0) * EARTH_RADIUS_KM
    return np.stack([x, y], axis=-1)


class EdgeRouter:
    """Shortest edge paths on the 1-skeleton with deterministic tie-breaking."""

    def __init__(self, X: SimplicialComplex):
        self.X = X
        self.adj = X.neighbors()
        self._dist: dict[tuple[int, ...], np.ndarray] = {}

    def distances(self, sources: Iterable[int]) -> np.ndarray:
        """Hop distance to the nearest source; ``-1`` where unreachable (index 0 unused)."""
        key = tuple(sorted(set(sources)))
        if key not in self._dist:
            d = np.full(self.X.n_nodes + 1, -1, dtype=int)
            queue = deque(key)
            for s in key:
                d[s] = 0
            while queue:
                u = queue.popleft()
                for v in self.adj[u]:
                    if d[v] < 0:
                        d[v] = d[u] + 1
                        queue.append(v)
            self._dist[key] = d
        return self._dist[key]

    def path(self, a: int, b: int) -> list[int]:
        """Lexicographically smallest among the shortest node sequences from ``a`` to ``b``."""
        d = self.distances([b])
        if d[a] < 0:
            raise FlowError(f"nodes {a} and {b} are disconnected")
        seq = [a]
        while seq[-1] != b:
            u = seq[-1]
            seq.append(next(v for v in self.adj[u] if d[v] == d[u] - 1))
        return seq


def snap(points: np.ndarray, geom: Geometry) -> np.ndarray:
    """Nearest node label (1-based) for each point; ties go to the lowest label."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d2 = ((pts[:, None, :] - geom.positions[None, :, :]) ** 2).sum(axis=-1)
    return np.argmin(d2, axis=1) + 1


def node_walk_cochain(nodes: Iterable[int], X: SimplicialComplex, router: EdgeRouter | None = None) -> np.ndarray:
    """Signed edge counts of the walk joining consecutive nodes by shortest paths."""
    router = router or EdgeRouter(X)
    f = np.zeros(len(X.edges))
    seq = [int(v) for v in nodes]
    seq = [v for k, v in enumerate(seq) if k == 0 or v != seq[k - 1]]
    for a, b in zip(seq, seq[1:]):
        if (min(a, b), max(a, b)) in X.edge_index:
            hops = [a, b]
        else:
            hops = router.path(a, b)
        for u, v in zip(hops, hops[1:]):
            f[X.edge_index[(min(u, v), max(u, v))]] += 1.0 if u < v else -1.0
    return f


def lift_trajectory(traj: Trajectory, X: SimplicialComplex, geom: Geometry, router: EdgeRouter | None = None) -> np.ndarray:
    """Snap samples to nodes and sum the oriented edges of the connecting shortest paths."""
    geom.check(X)
    nodes = traj.nodes if traj.nodes is not None else snap(traj.points, geom)
    return node_walk_cochain(nodes, X, router)


def nodes_in_disc(geom: Geometry, center, radius: float) -> list[int]:
    d = np.linalg.norm(geom.positions - np.asarray(center, dtype=float), axis=1)
    return [int(i) + 1 for i in np.flatnonzero(d <= radius)]


def synthetic_trajectories(
    X: SimplicialComplex,
    geom: Geometry,
    classes: list[tuple[Iterable[int], Iterable[int]]],
    count_per_class: int,
    noise: float,
    seed: int,
    max_steps: int | None = None,
) -> list[tuple[Trajectory, int]]:
    """Biased random walks from a start region to an end region, one label per class.

    At every step the walk moves, with probability ``1 - noise``, to the
    neighbour closest (in hops) to the end region (lowest label on ties), and
    otherwise to a uniformly chosen neighbour.
    """
    if not 0.0 <= noise <= 1.0:
        raise FlowError("noise must lie in [0, 1]")
    geom.check(X)
    rng = np.random.default_rng(seed)
    router = EdgeRouter(X)
    adj = router.adj
    max_steps = max_steps or 10 * X.n_nodes
    out = []
    for label, (start, end) in enumerate(classes):
        start = sorted(set(int(v) for v in start))
        end_set = set(int(v) for v in end)
        if not start or not end_set:
            raise FlowError("empty start or end region")
        d = router.distances(end_set)
        if any(d[s] < 0 for s in start):
            raise ComplexError("end region unreachable from start region")
        for c in range(count_per_class):
            u = start[int(rng.integers(len(start)))]
            walk = [u]
            while u not in end_set and len(walk) <= max_steps:
                nbrs = adj[u]
                if rng.random() < 1.0 - noise:
                    u = min(nbrs, key=lambda v: (d[v], v))
                else:
                    u = nbrs[int(rng.integers(len(nbrs)))]
                walk.append(u)
            pts = geom.positions[np.asarray(walk) - 1]
            traj = Trajectory(f"c{label}-{c:04d}", pts, np.arange(len(walk), dtype=float), tuple(walk))
            out.append((traj, label))
    return out


def cochain_csv(f, X: SimplicialComplex) -> str:
    lines = ["edge,value"]
    lines += [f"{i}-{j},{float(v)!r}" for (i, j), v in zip(X.edges, np.asarray(f, dtype=float))]
    return "\n".join(lines) + "\n"


def read_cochain_csv(text: str, X: SimplicialComplex) -> np.ndarray:
    f = np.zeros(len(X.edges))
    for row in csv.DictReader(io.StringIO(text)):
        i, j = (int(v) for v in row["edge"].split("-"))
        f[X.edge_index[(i, j)]] = float(row["value"])
    return f
