"""Hodgelet dictionaries (joint and separate), baselines, and frame bounds.

Atoms are stored as dense columns of :attr:`Dictionary.atoms`. The ordering is
part, then kernel index ``m``, then edge index ``j``; ``m`` and ``j`` are
recorded 1-based as in the edge labelling of the complex.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .kernels import KernelBank
from .spectral import HodgeSpectra, SpectralDecomposition, ZERO_TOL_FACTOR


class DictionaryError(ValueError):
    pass


class DegenerateFrameError(ArithmeticError):
    """The frame operator is (numerically) singular."""


@dataclass(frozen=True)
class Atom:
    vector: np.ndarray
    j: int
    m: int
    part: str


@dataclass(frozen=True)
class Dictionary:
    atoms: np.ndarray  # (N1, K)
    parts: np.ndarray  # (K,) of str
    m: np.ndarray
    j: np.ndarray
    kind: str

    def __len__(self) -> int:
        return self.atoms.shape[1]

    @property
    def dim(self) -> int:
        return self.atoms.shape[0]

    def atom(self, k: int) -> Atom:
        return Atom(self.atoms[:, k], int(self.j[k]), int(self.m[k]), str(self.parts[k]))

    def select(self, part: str) -> np.ndarray:
        return np.flatnonzero(self.parts == part)


def _stack(blocks: list[tuple[str, int, np.ndarray]], kind: str) -> Dictionary:
    n = blocks[0][2].shape[0]
    return Dictionary(
        atoms=np.hstack([b for _, _, b in blocks]),
        parts=np.concatenate([np.full(b.shape[1], p) for p, _, b in blocks]),
        m=np.concatenate([np.full(b.shape[1], m, dtype=int) for _, m, b in blocks]),
        j=np.concatenate([np.arange(1, b.shape[1] + 1) for _, _, b in blocks]) if n else np.zeros(0, int),
        kind=kind,
    )


def _kernel_blocks(spec: SpectralDecomposition, bank: KernelBank, part: str):
    lam = np.where(spec.nonzero, spec.eigenvalues, 0.0)
    vals = bank.evaluate(lam)  # (M, N)
    V = spec.eigenvectors
    return [(part, m + 1, (V * vals[m]) @ V.T) for m in range(bank.M)]


def joint_dictionary(spec: SpectralDecomposition, bank: KernelBank, kind: str = "joint") -> Dictionary:
    """Atoms ``g_m(L) e_j`` for every kernel and edge."""
    if len(spec) == 0:
        raise DictionaryError("empty spectrum")
    return _stack(_kernel_blocks(spec, bank, "joint"), kind)


def separate_dictionary(
    spec_upper: SpectralDecomposition,
    spec_lower: SpectralDecomposition,
    bank_upper: KernelBank,
    bank_lower: KernelBank,
) -> Dictionary:
    """Upper atoms ``g^U_m(L1U) e_j`` followed by lower atoms ``g^L_m(L1L) e_j``."""
    if len(spec_upper) != len(spec_lower):
        raise DictionaryError("upper and lower spectra live on different edge sets")
    blocks = _kernel_blocks(spec_upper, bank_upper, "upper") + _kernel_blocks(spec_lower, bank_lower, "lower")
    return _stack(blocks, "separate")


def basis_dictionary(vectors: np.ndarray, kind: str) -> Dictionary:
    """Dictionary whose atoms are the given columns (``m = 1``)."""
    vectors = np.asarray(vectors, dtype=float)
    return _stack([(kind, 1, vectors)], kind)


def standard_dictionary(n_edges: int) -> Dictionary:
    return basis_dictionary(np.eye(n_edges), "standard")


def fourier_dictionary(spec: SpectralDecomposition, kind: str = "fourier") -> Dictionary:
    return basis_dictionary(spec.eigenvectors, kind)


def analyze(D: Dictionary, f) -> np.ndarray:
    """Analysis coefficients ``<psi_k, f>``; ``f`` may hold flows as columns."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != D.dim:
        raise DictionaryError(f"flow length {f.shape[0]} != dictionary dimension {D.dim}")
    return D.atoms.T @ f


def frame_operator(D: Dictionary) -> np.ndarray:
    return D.atoms @ D.atoms.T


def dual_reconstruct(D: Dictionary, coefficients, rtol: float = 1e-10) -> np.ndarray:
    """Canonical dual synthesis ``S^{-1} sum_k c_k psi_k``."""
    c = np.asarray(coefficients, dtype=float)
    if c.shape[0] != len(D):
        raise DictionaryError(f"{c.shape[0]} coefficients for {len(D)} atoms")
    S = frame_operator(D)
    w, V = np.linalg.eigh(S)
    if w.size == 0 or w[0] <= rtol * max(w[-1], 0.0) or w[-1] <= 0:
        raise DegenerateFrameError("frame operator is singular (lower frame bound ~ 0)")
    y = V.T @ (D.atoms @ c)
    return V @ (y / (w[:, None] if y.ndim == 2 else w))


@dataclass(frozen=True)
class FrameBounds:
    A: float
    B: float
    method: str = "analytic"

    def __post_init__(self):
        if not 0 <= self.A <= self.B < np.inf:
            raise ValueError(f"invalid frame bounds A={self.A}, B={self.B}")

    def is_tight(self, rtol: float = 1e-9) -> bool:
        return self.A > 0 and self.B / self.A - 1.0 <= rtol

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "tight": self.is_tight(), "method": self.method}


def _distinct(spectrum) -> np.ndarray:
    """Distinct eigenvalues with numerical zeros mapped to exactly 0."""
    if isinstance(spectrum, SpectralDecomposition):
        return spectrum.distinct()
    lam = np.asarray(spectrum, dtype=float)
    if lam.size == 0:
        raise DictionaryError("empty spectrum")
    tol = ZERO_TOL_FACTOR * float(np.abs(lam).max())
    return np.unique(np.where(lam > tol, lam, 0.0))


def frame_bounds_joint(bank: KernelBank, spectrum) -> FrameBounds:
    """``A, B = min, max of G`` over the spectrum of the joint operator."""
    G = np.atleast_1d(bank.g_sum(_distinct(spectrum)))
    return FrameBounds(float(G.min()), float(G.max()))


def frame_bounds_separate(bank_upper: KernelBank, bank_lower: KernelBank, spectrum_upper, spectrum_lower) -> FrameBounds:
    """Bounds from ``G(mu, 0)`` over the upper spectrum and ``G(0, nu)`` over the lower one."""
    mu = _distinct(spectrum_upper)
    nu = _distinct(spectrum_lower)
    g_up = np.atleast_1d(bank_upper.g_sum(mu)) + bank_lower.g_sum(0.0)
    g_low = bank_upper.g_sum(0.0) + np.atleast_1d(bank_lower.g_sum(nu))
    G = np.concatenate([g_up, g_low])
    return FrameBounds(float(G.min()), float(G.max()))


def frame_bounds_empirical(D: Dictionary) -> FrameBounds:
    """Extreme eigenvalues of the frame operator ``S = sum psi psi^T``."""
    if len(D) == 0:
        raise DictionaryError("empty dictionary")
    w = np.linalg.eigvalsh(frame_operator(D))
    return FrameBounds(max(float(w[0]), 0.0), max(float(w[-1]), 0.0), method="empirical")


def subspace_residual(atom: Atom, spectra: HodgeSpectra) -> float:
    """Norm of the part of an upper (lower) atom outside ``Im d2`` (``Im d1^T``)."""
    if atom.part == "upper":
        basis = spectra.upper.range_basis
    elif atom.part == "lower":
        basis = spectra.lower.range_basis
    else:
        raise DictionaryError(f"subspace membership is defined for upper/lower atoms, not {atom.part!r}")
    psi = np.asarray(atom.vector, dtype=float)
    return float(np.linalg.norm(psi - basis @ (basis.T @ psi)))


def coefficients_csv(D: Dictionary, coefficients) -> str:
    buf = io.StringIO()
    buf.write("part,m,j,coefficient\n")
    for p, m, j, c in zip(D.parts, D.m, D.j, np.asarray(coefficients, dtype=float)):
        buf.write(f"{p},{m},{j},{float(c)!r}\n")
    return buf.getvalue()


def frame_report_json(bounds: FrameBounds) -> str:
    return json.dumps(bounds.to_dict(), indent=2, sort_keys=True)
