"""Command line: build complexes, run the two experiments, report frame bounds.

Settings come from flags, then a JSON ``--config`` file, then built-in defaults.
Exit status is 0 on success, 1 on usage or input errors and 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .clustering import ClusteringError, scores_csv
from .complex import (
    ComplexError,
    Geometry,
    SimplicialComplex,
    delaunay,
    hex_complex,
    hex_complex_for_target,
    punch_hole,
)
from .dictionary import DegenerateFrameError, DictionaryError
from .experiments import (
    TrajectoryFixture,
    cluster_scores,
    field_experiment,
    frame_report,
    lift_all,
    spectra,
    trajectory_representations,
)
from .flows import FlowError, discretize_field, equirectangular, paper_field, parse_trajectories
from .kernels import KernelError
from .sparse import NotConvergedError, SparseError, curve_csv, log_epsilons
from .spectral import SpectralError, betti_1
from .svg import flow_svg

log = logging.getLogger("hodgelets")

NUMERICAL = (SpectralError, NotConvergedError, SparseError, DegenerateFrameError, KernelError, ArithmeticError)
USAGE = (ComplexError, FlowError, ClusteringError, DictionaryError, OSError, ValueError, KeyError)

DEFAULTS = {
    "common": {"seed": 0, "tol": 1e-8, "overlap": 3, "normalize": True},
    "build": {
        "n": 40, "points": None, "file": None, "hole": None, "bounds": [-2.0, 2.0, -2.0, 2.0],
        "target_nodes": 225, "circumradius": None, "out": "complex",
    },
    "experiment-field": {
        "bounds": [-2.0, 2.0, -2.0, 2.0], "target_nodes": 64, "circumradius": None, "kernels": 4,
        "n_eps": 25, "eps_min": 1e-3, "out_csv": "sparsity.csv", "out_svg": "field.svg",
    },
    "experiment-trajectories": {
        "input": None, "manifest": None, "complex": None, "geometry": None, "n_points": 80, "kernels": 16,
        "K": 2, "s": None, "s_factor": 0.25, "ratio": 0.75, "out": "scores.csv", "write_manifest": None,
    },
    "frame-report": {
        "complex": None, "target_nodes": 64, "bounds": [-2.0, 2.0, -2.0, 2.0], "kernels": 4, "bank": "hann",
        "out": "frames.json",
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of settings (keys as long flag names, '_' for '-')")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, help="relative zero-eigenvalue tolerance")
    p.add_argument("--overlap", type=int, help="kernel overlap R")
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, help="rescale banks to a tight frame")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hodgelets", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="construct a complex and write JSON plus node CSV")
    b.add_argument("kind", choices=["simplices", "delaunay", "hex"])
    b.add_argument("--file", help="complex JSON (simplices)")
    b.add_argument("--points", help="CSV with x,y columns (delaunay); random points if omitted")
    b.add_argument("--n", type=int, help="number of random points (delaunay)")
    b.add_argument("--hole", type=float, nargs=3, metavar=("X", "Y", "R"))
    b.add_argument("--bounds", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    b.add_argument("--target-nodes", type=int)
    b.add_argument("--circumradius", type=float)
    b.add_argument("--out", help="output prefix: PREFIX.json and PREFIX.nodes.csv")
    _common(b)

    f = sub.add_parser("experiment-field", help="sparsity curves of the two-disc field on a hex complex")
    f.add_argument("--bounds", type=float, nargs=4)
    f.add_argument("--target-nodes", type=int)
    f.add_argument("--circumradius", type=float)
    f.add_argument("--kernels", type=int, help="M = M_U = M_L")
    f.add_argument("--n-eps", type=int, help="number of log-spaced relative tolerances")
    f.add_argument("--eps-min", type=float)
    f.add_argument("--out-csv")
    f.add_argument("--out-svg")
    _common(f)

    t = sub.add_parser("experiment-trajectories", help="sparse k-means alignment scores per representation")
    t.add_argument("--input", help="trajectory CSV with id,time,lat,lon")
    t.add_argument("--manifest", help="JSON parameters of the synthetic fixture")
    t.add_argument("--complex", help="complex JSON to lift onto (with --geometry)")
    t.add_argument("--geometry", help="node CSV node,x,y in projected kilometres")
    t.add_argument("--n-points", type=int, help="random Delaunay nodes when no complex is given")
    t.add_argument("--kernels", type=int)
    t.add_argument("--K", type=int)
    t.add_argument("--s", type=float, help="l1 budget for every representation")
    t.add_argument("--s-factor", type=float, help="budget as a multiple of sqrt(D)")
    t.add_argument("--ratio", type=float)
    t.add_argument("--out")
    t.add_argument("--write-manifest")
    _common(t)

    r = sub.add_parser("frame-report", help="analytic and empirical frame bounds")
    r.add_argument("--complex", help="complex JSON; a hex complex is built otherwise")
    r.add_argument("--target-nodes", type=int)
    r.add_argument("--bounds", type=float, nargs=4)
    r.add_argument("--kernels", type=int)
    r.add_argument("--bank", choices=["hann", "linear"])
    r.add_argument("--out")
    _common(r)
    return p


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (highest precedence last)."""
    cfg = {**DEFAULTS["common"], **DEFAULTS[args.command]}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    cfg.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config",)})
    for key in ("kernels", "overlap"):
        if key in cfg and int(cfg[key]) < 2:
            raise UsageError(f"--{key} must be at least 2")
    if cfg.get("K") is not None and int(cfg["K"]) < 1:
        raise UsageError("--K must be positive")
    return cfg


# --------------------------------------------------------------------------
# file helpers


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def geometry_csv(geom: Geometry) -> str:
    lines = ["node,x,y"] + [f"{i},{float(x)!r},{float(y)!r}" for i, (x, y) in enumerate(geom.positions, 1)]
    return "\n".join(lines) + "\n"


def read_points(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"x", "y"} <= set(rows[0]):
        raise UsageError(f"{path}: expected x,y columns")
    if "node" in rows[0]:
        rows.sort(key=lambda r: int(r["node"]))
    return np.array([[float(r["x"]), float(r["y"])] for r in rows])


def read_complex(path) -> SimplicialComplex:
    with open(path) as fh:
        return SimplicialComplex.from_dict(json.load(fh))


def _hex(cfg):
    if cfg["circumradius"] is not None:
        return hex_complex(cfg["bounds"], cfg["circumradius"])
    return hex_complex_for_target(cfg["bounds"], cfg["target_nodes"])


def _summary(X: SimplicialComplex) -> dict:
    n0, n1, n2 = X.shape
    return {"N0": n0, "N1": n1, "N2": n2, "euler": X.euler_characteristic, "harmonic_dim": betti_1(X)}


# --------------------------------------------------------------------------
# commands


def cmd_build(cfg: dict) -> dict:
    geom = None
    if cfg["kind"] == "simplices":
        if not cfg["file"]:
            raise UsageError("build simplices needs --file")
        X = read_complex(cfg["file"])
    elif cfg["kind"] == "delaunay":
        pts = read_points(cfg["points"]) if cfg["points"] else np.random.default_rng(cfg["seed"]).random((cfg["n"], 2))
        X, geom = delaunay(pts)
    else:
        X, geom, _ = _hex(cfg)
    if cfg["hole"] is not None:
        if geom is None:
            raise UsageError("--hole needs node positions")
        x, y, r = cfg["hole"]
        X, geom = punch_hole(X, (x, y), r, geom)
    out = cfg["out"]
    _write(f"{out}.json", _dump(X.to_dict()))
    if geom is not None:
        _write(f"{out}.nodes.csv", geometry_csv(geom))
    summary = _summary(X)
    print(json.dumps(summary, sort_keys=True))
    return summary


def cmd_experiment_field(cfg: dict) -> list[dict]:
    X, geom, meta = _hex(cfg)
    f = discretize_field(paper_field(), X, geom, meta)
    rows = field_experiment(
        X, f, cfg["kernels"], cfg["overlap"], cfg["normalize"], log_epsilons(cfg["n_eps"], cfg["eps_min"]), cfg["tol"]
    )
    _write(cfg["out_csv"], curve_csv(rows))
    if cfg["out_svg"]:
        _write(cfg["out_svg"], flow_svg(X, geom, f))
    print(json.dumps(_summary(X), sort_keys=True))
    return rows


def _trajectory_flows(cfg: dict):
    if cfg["input"]:
        trajs = parse_trajectories(cfg["input"])
        allpts = np.vstack([t.points for t in trajs])
        origin = tuple(allpts.mean(axis=0))
        trajs = [type(t)(t.id, equirectangular(t.points, origin), t.times) for t in trajs]
        if cfg["complex"]:
            if not cfg["geometry"]:
                raise UsageError("--complex needs --geometry")
            X, geom = read_complex(cfg["complex"]), Geometry(read_points(cfg["geometry"]))
        else:
            pts = np.vstack([t.points for t in trajs])
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            rng = np.random.default_rng(cfg["seed"])
            X, geom = delaunay(lo + (hi - lo) * rng.random((cfg["n_points"], 2)))
        return X, geom, trajs, None
    fixture = TrajectoryFixture()
    if cfg["manifest"]:
        with open(cfg["manifest"]) as fh:
            fixture = TrajectoryFixture.from_dict(json.load(fh))
    if cfg["write_manifest"]:
        _write(cfg["write_manifest"], _dump(fixture.to_dict()))
    X, geom, trajs, labels = fixture.build()
    return X, geom, trajs, labels


def cmd_experiment_trajectories(cfg: dict) -> dict[str, float]:
    X, geom, trajs, _ = _trajectory_flows(cfg)
    F = lift_all(trajs, X, geom)
    S = spectra(X, cfg["tol"])
    reps = trajectory_representations(X, S, cfg["kernels"], cfg["overlap"], cfg["normalize"])
    scores, _ = cluster_scores(F, reps, cfg["K"], cfg["s_factor"], cfg["s"], cfg["seed"], cfg["ratio"])
    _write(cfg["out"], scores_csv(scores))
    return scores


def cmd_frame_report(cfg: dict) -> dict:
    X = read_complex(cfg["complex"]) if cfg["complex"] else _hex({**cfg, "circumradius": None})[0]
    report = frame_report(X, cfg["kernels"], cfg["overlap"], cfg["bank"], cfg["tol"])
    _write(cfg["out"], _dump(report))
    return report


COMMANDS = {
    "build": cmd_build,
    "experiment-field": cmd_experiment_field,
    "experiment-trajectories": cmd_experiment_trajectories,
    "frame-report": cmd_frame_report,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve(args)
        COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except USAGE as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
