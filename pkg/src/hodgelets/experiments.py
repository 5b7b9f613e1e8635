"""Experiment pipelines shared by the command line and the acceptance suite."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .clustering import ClusterModel, alignment_score, sparse_kmeans, train_test_split
from .complex import Geometry, SimplicialComplex, delaunay, punch_hole
from .dictionary import (
    Dictionary,
    analyze,
    fourier_dictionary,
    frame_bounds_empirical,
    frame_bounds_joint,
    frame_bounds_separate,
    joint_dictionary,
    separate_dictionary,
    standard_dictionary,
)
from .flows import EdgeRouter, Trajectory, lift_trajectory, nodes_in_disc, synthetic_trajectories
from .kernels import FunctionBank, KernelBank, UncoveredEigenvalueError, hann_bank, normalize_on_spectrum
from .spectral import (
    ZERO_TOL_FACTOR,
    HodgeSpectra,
    SpectralDecomposition,
    eigendecompose,
    hodge_operators,
    linegraph_laplacian,
)
from .sparse import sparsity_curve


def spectra(X: SimplicialComplex, rel_tol: float = ZERO_TOL_FACTOR) -> HodgeSpectra:
    """Spectra of ``L1``, ``L1U``, ``L1L`` with zero threshold ``rel_tol * lambda_max`` each."""
    ops = hodge_operators(X)
    return HodgeSpectra(*(_eig(A, rel_tol) for A in (ops.L1, ops.L1U, ops.L1L)))


def _eig(A: np.ndarray, rel_tol: float) -> SpectralDecomposition:
    spec = eigendecompose(A, tol=0.0)
    lam_max = float(np.abs(spec.eigenvalues).max(initial=0.0))
    tol = rel_tol * lam_max if lam_max > 0 else rel_tol
    return SpectralDecomposition(spec.eigenvalues, spec.eigenvectors, tol)


def hann_bank_for(spec: SpectralDecomposition, M: int, R: int = 3, normalize: bool = True) -> KernelBank:
    """Log-Hann bank spanning ``spec``; rescaled to a tight frame on it when ``normalize``.

    An all-zero spectrum (e.g. no triangles) gets a bank on ``[0, 1]``; only its
    value at 0 is ever used.
    """
    lam = np.where(spec.nonzero, spec.eigenvalues, 0.0)
    lam_max = float(lam.max(initial=0.0))
    bank = hann_bank(lam_max, M, R, lam) if lam_max > 0 else hann_bank(1.0, M, R)
    return normalize_on_spectrum(bank, lam) if normalize else bank


def linear_bank() -> KernelBank:
    """The single kernel ``g(lambda) = lambda``; degenerate on any harmonic space."""
    return FunctionBank([lambda lam: lam])


# --------------------------------------------------------------------------
# sparse field representation


def field_dictionaries(
    X: SimplicialComplex, S: HodgeSpectra, M: int = 4, R: int = 3, normalize: bool = True,
    rel_tol: float = ZERO_TOL_FACTOR,
) -> dict[str, Dictionary]:
    """The five dictionaries compared on a single flow, keyed by curve column name."""
    LG = _eig(linegraph_laplacian(X), rel_tol)
    return {
        "fourier": fourier_dictionary(S.full),
        "linegraph_fourier": fourier_dictionary(LG, "linegraph-fourier"),
        "linegraph_wavelet": joint_dictionary(LG, hann_bank_for(LG, M, R, normalize), "linegraph-wavelet"),
        "joint": joint_dictionary(S.full, hann_bank_for(S.full, M, R, normalize)),
        "separate": separate_dictionary(
            S.upper, S.lower, hann_bank_for(S.upper, M, R, normalize), hann_bank_for(S.lower, M, R, normalize)
        ),
    }


def field_experiment(X, f, M=4, R=3, normalize=True, epsilons=None, rel_tol=ZERO_TOL_FACTOR) -> list[dict]:
    S = spectra(X, rel_tol)
    eps = np.geomspace(1e-2, 1.0, 21) if epsilons is None else np.asarray(epsilons, dtype=float)
    return sparsity_curve(field_dictionaries(X, S, M, R, normalize, rel_tol), f, eps)


# --------------------------------------------------------------------------
# trajectory clustering


@dataclass
class TrajectoryFixture:
    """Seeded two-corridor trajectory set on a holed Delaunay complex of the unit square.

    Each class is a pair of discs ``(x, y, r)``: walks start in the first and end in the second.
    """

    n_points: int = 80
    hole: tuple[float, float, float] = (0.5, 0.5, 0.18)
    classes: list = field(
        default_factory=lambda: [
            [[0.05, 0.85, 0.15], [0.95, 0.85, 0.15]],
            [[0.05, 0.15, 0.15], [0.95, 0.15, 0.15]],
        ]
    )
    count_per_class: int = 60
    noise: float = 0.2
    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hole"] = list(self.hole)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrajectoryFixture":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        if "hole" in known:
            known["hole"] = tuple(known["hole"])
        return cls(**known)

    def build(self) -> tuple[SimplicialComplex, Geometry, list[Trajectory], np.ndarray]:
        rng = np.random.default_rng(self.seed)
        X, G = delaunay(rng.random((self.n_points, 2)))
        if self.hole is not None:
            x, y, r = self.hole
            X, G = punch_hole(X, (x, y), r, G)
        regions = [
            (nodes_in_disc(G, a[:2], a[2]), nodes_in_disc(G, b[:2], b[2])) for a, b in self.classes
        ]
        data = synthetic_trajectories(X, G, regions, self.count_per_class, self.noise, self.seed)
        return X, G, [t for t, _ in data], np.array([lab for _, lab in data], dtype=int)


def lift_all(trajectories, X: SimplicialComplex, geom: Geometry) -> np.ndarray:
    """Lifted flows as rows, ``(P, N1)``."""
    router = EdgeRouter(X)
    rows = [lift_trajectory(t, X, geom, router) for t in trajectories]
    return np.array(rows).reshape(len(rows), len(X.edges))


def trajectory_representations(
    X: SimplicialComplex, S: HodgeSpectra, M: int = 16, R: int = 3, normalize: bool = True
) -> dict[str, Dictionary]:
    return {
        "standard": standard_dictionary(len(X.edges)),
        "fourier": fourier_dictionary(S.full),
        "joint": joint_dictionary(S.full, hann_bank_for(S.full, M, R, normalize)),
        "separate": separate_dictionary(
            S.upper, S.lower, hann_bank_for(S.upper, M, R, normalize), hann_bank_for(S.lower, M, R, normalize)
        ),
    }


def single_cluster_model(features: np.ndarray, seed: int) -> ClusterModel:
    """``K = 1``: one centroid (the mean) and uniform weights."""
    P, D = features.shape
    w = np.full(D, 1.0 / np.sqrt(D))
    return ClusterModel(1, float(np.sqrt(D)), w, features.mean(axis=0, keepdims=True), np.zeros(P, int), seed)


def cluster_scores(
    flows: np.ndarray,
    representations: dict[str, Dictionary],
    K: int = 2,
    s_factor: float = 0.25,
    s: float | None = None,
    seed: int = 0,
    ratio: float = 0.75,
) -> tuple[dict[str, float], dict[str, ClusterModel]]:
    """Train sparse k-means per representation and score the held-out flows.

    The budget is ``s`` when given, else ``s_factor * sqrt(D)`` for each representation.
    """
    train, test = train_test_split(len(flows), ratio, seed)
    scores, models = {}, {}
    for name, D in representations.items():
        C = analyze(D, flows[train].T).T
        if K == 1:
            model = single_cluster_model(C, seed)
        else:
            budget = s if s is not None else s_factor * np.sqrt(C.shape[1])
            model = sparse_kmeans(C, K, budget, seed)
        scores[name] = alignment_score(model, flows[test], D)
        models[name] = model
    return scores, models


# --------------------------------------------------------------------------
# frame bounds


def _bounds_entry(analytic, D: Dictionary) -> dict:
    emp = frame_bounds_empirical(D)
    return {"analytic": analytic.to_dict(), "empirical": emp.to_dict()}


def frame_report(X: SimplicialComplex, M: int = 4, R: int = 3, bank: str = "hann", rel_tol: float = ZERO_TOL_FACTOR) -> dict:
    """Analytic and empirical bounds for joint and separate dictionaries, raw and normalized."""
    S = spectra(X, rel_tol)
    report = {"complex": {"N0": X.shape[0], "N1": X.shape[1], "N2": X.shape[2]}, "bank": bank, "M": M, "R": R}
    std = frame_bounds_empirical(standard_dictionary(len(X.edges)))
    report["standard"] = {"empirical": std.to_dict()}
    for variant in ("raw", "normalized"):
        normalize = variant == "normalized"
        if bank == "hann":
            banks = {k: hann_bank_for(sp, M, R, normalize) for k, sp in
                     (("full", S.full), ("upper", S.upper), ("lower", S.lower))}
        else:
            base = linear_bank()
            banks = {}
            try:
                for k, sp in (("full", S.full), ("upper", S.upper), ("lower", S.lower)):
                    lam = np.where(sp.nonzero, sp.eigenvalues, 0.0)
                    banks[k] = normalize_on_spectrum(base, lam) if normalize else base
            except UncoveredEigenvalueError as exc:
                report[variant] = {"error": str(exc)}
                continue
        J = joint_dictionary(S.full, banks["full"])
        Sep = separate_dictionary(S.upper, S.lower, banks["upper"], banks["lower"])
        report[variant] = {
            "joint": _bounds_entry(frame_bounds_joint(banks["full"], S.full), J),
            "separate": _bounds_entry(
                frame_bounds_separate(banks["upper"], banks["lower"], S.upper, S.lower), Sep
            ),
        }
    return report
