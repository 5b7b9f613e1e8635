"""Hodge Laplacians, symmetric eigendecomposition and the Hodge decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .complex import SimplicialComplex

ZERO_TOL_FACTOR = 1e-8


class SpectralError(ArithmeticError):
    pass


class ConvergenceError(SpectralError):
    pass


@dataclass(frozen=True)
class HodgeOperators:
    """Dense ``L1 = L1U + L1L`` together with ``L0``; built from integer boundaries."""

    L1: np.ndarray
    L1U: np.ndarray
    L1L: np.ndarray
    L0: np.ndarray


def hodge_operators(X: SimplicialComplex) -> HodgeOperators:
    B1 = X.boundary_1
    B2 = X.boundary_2
    up = (B2 @ B2.T).toarray()
    low = (B1.T @ B1).toarray()
    L0 = (B1 @ B1.T).toarray()
    return HodgeOperators(
        L1=(up + low).astype(float),
        L1U=up.astype(float),
        L1L=low.astype(float),
        L0=L0.astype(float),
    )


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    tol: float

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def nonzero(self) -> np.ndarray:
        return self.eigenvalues > self.tol

    @property
    def null_basis(self) -> np.ndarray:
        return self.eigenvectors[:, ~self.nonzero]

    @property
    def range_basis(self) -> np.ndarray:
        return self.eigenvectors[:, self.nonzero]

    def distinct(self) -> np.ndarray:
        """Eigenvalues with clusters (gap <= tol) merged; exact zeros for the null space."""
        lam = np.where(self.nonzero, self.eigenvalues, 0.0)
        return cluster_values(lam, self.tol)

    def apply(self, g) -> np.ndarray:
        """Dense matrix ``g(A) = V diag(g(lambda)) V^T``, with ``g`` vectorized."""
        lam = np.where(self.nonzero, self.eigenvalues, 0.0)
        V = self.eigenvectors
        return (V * g(lam)) @ V.T


def cluster_values(values, tol: float) -> np.ndarray:
    """Sorted representatives of values grouped by consecutive gaps <= ``tol``."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return v
    out = [v[0]]
    for x in v[1:]:
        if x - out[-1] > tol:
            out.append(x)
    return np.array(out)


def _fix_signs(V: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry is positive (ties: lowest index)."""
    if V.size == 0:
        return V
    mag = np.abs(V)
    top = mag.max(axis=0)
    idx = np.argmax(mag >= top - 1e-12 * np.maximum(top, 1.0), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _check_symmetric(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A.toarray() if sp.issparse(A) else A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if np.abs(A - A.T).max(initial=0.0) > 1e-12 * scale:
        raise SpectralError("matrix is not symmetric")
    return (A + A.T) / 2


def jacobi_eigh(A: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for dense symmetric matrices.

    Converged when the off-diagonal Frobenius norm drops below ``1e-12 * ||A||_F``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    stop = 1e-12 * np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= stop:
            order = np.argsort(np.diag(A), kind="stable")
            return np.diag(A)[order], V[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def eigendecompose(A, tol: float | None = None, method: str = "lapack") -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix with ascending eigenvalues.

    ``tol`` separates numerically zero eigenvalues from the rest; it defaults to
    ``1e-8 * lambda_max``. ``method`` is ``"lapack"`` or ``"jacobi"``.
    """
    A = _check_symmetric(A)
    if method == "lapack":
        try:
            lam, V = np.linalg.eigh(A)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ConvergenceError(str(exc)) from exc
    elif method == "jacobi":
        lam, V = jacobi_eigh(A)
    else:
        raise ValueError(f"unknown method {method!r}")
    if tol is None:
        lam_max = float(np.abs(lam).max(initial=0.0))
        tol = ZERO_TOL_FACTOR * lam_max
    return SpectralDecomposition(lam, _fix_signs(V), float(tol))


@dataclass(frozen=True)
class HodgeSpectra:
    """Eigendecompositions of ``L1``, ``L1U`` and ``L1L`` for one complex."""

    full: SpectralDecomposition
    upper: SpectralDecomposition
    lower: SpectralDecomposition


def hodge_spectra(ops: HodgeOperators) -> HodgeSpectra:
    return HodgeSpectra(eigendecompose(ops.L1), eigendecompose(ops.L1U), eigendecompose(ops.L1L))


@dataclass(frozen=True)
class HodgeComponents:
    gradient: np.ndarray
    curl: np.ndarray
    harmonic: np.ndarray


def _project(basis: np.ndarray, f: np.ndarray) -> np.ndarray:
    return basis @ (basis.T @ f)


def hodge_decompose(f, spectra: HodgeSpectra) -> HodgeComponents:
    """Split an edge flow into gradient, curl and harmonic parts by eigenprojection."""
    f = np.asarray(f, dtype=float)
    if f.shape != (len(spectra.full),):
        raise SpectralError(f"flow has shape {f.shape}, expected ({len(spectra.full)},)")
    return HodgeComponents(
        gradient=_project(spectra.lower.range_basis, f),
        curl=_project(spectra.upper.range_basis, f),
        harmonic=_project(spectra.full.null_basis, f),
    )


def sft(f, spec: SpectralDecomposition) -> np.ndarray:
    """Simplicial Fourier coefficients ``<v_i, f>`` in ascending-eigenvalue order."""
    f = np.asarray(f, dtype=float)
    if f.shape != (len(spec),):
        raise SpectralError(f"flow has shape {f.shape}, expected ({len(spec)},)")
    return spec.eigenvectors.T @ f


def linegraph_laplacian(X: SimplicialComplex) -> np.ndarray:
    """Graph Laplacian of the line graph (edges adjacent iff they share a node)."""
    B = abs(X.boundary_1).astype(np.int64)
    A = (B.T @ B).toarray()
    np.fill_diagonal(A, 0)
    A = (A > 0).astype(float)
    return np.diag(A.sum(axis=1)) - A


def betti_1(X: SimplicialComplex) -> int:
    """``N1 - rank d1 - rank d2``, i.e. the dimension of the harmonic space."""
    n1 = len(X.edges)
    r1 = np.linalg.matrix_rank(X.boundary_1.toarray()) if n1 else 0
    r2 = np.linalg.matrix_rank(X.boundary_2.toarray()) if X.triangles else 0
    return int(n1 - r1 - r2)


def spectrum_csv(spec: SpectralDecomposition) -> str:
    lines = ["index,eigenvalue"]
    lines += [f"{i + 1},{float(v)!r}" for i, v in enumerate(spec.eigenvalues)]
    return "\n".join(lines) + "\n"
