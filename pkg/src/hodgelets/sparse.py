"""Orthogonal matching pursuit and sparsity-versus-error curves."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .dictionary import Dictionary

STAGNATION = 1e-12


class SparseError(ValueError):
    pass


@dataclass
class SparseApproximation:
    support: list[int]
    coefficients: np.ndarray
    residual_norm: float
    epsilon: float
    converged: bool = True
    # residual norm after 0, 1, ..., len(support) selections
    path: list[float] = field(default_factory=list, repr=False)

    def approximation(self, D: Dictionary) -> np.ndarray:
        return D.atoms[:, self.support] @ self.coefficients


class NotConvergedError(RuntimeError):
    """``max_atoms`` (or stagnation) reached before the tolerance; ``.result`` holds the partial fit."""

    def __init__(self, message: str, result: SparseApproximation):
        super().__init__(message)
        self.result = result


def _greedy(atoms: np.ndarray, f: np.ndarray, epsilon: float, max_atoms: int):
    norms = np.linalg.norm(atoms, axis=0)
    top = norms.max(initial=0.0)
    if top == 0.0:
        raise SparseError("dictionary has no nonzero atom")
    usable = norms > 1e-12 * top
    unit = np.zeros_like(atoms)
    unit[:, usable] = atoms[:, usable] / norms[usable]

    n = atoms.shape[0]
    Q = np.zeros((n, min(max_atoms, n)))
    support: list[int] = []
    r = f.copy()
    rnorm = float(np.linalg.norm(r))
    path = [rnorm]
    while rnorm > epsilon and len(support) < max_atoms and len(support) < n:
        corr = np.abs(unit.T @ r)
        corr[~usable] = -1.0
        corr[support] = -1.0
        k = int(np.argmax(corr))
        if corr[k] <= 0.0:
            break
        Qk = Q[:, : len(support)]
        q = atoms[:, k].copy()
        for _ in range(2):
            q -= Qk @ (Qk.T @ q)
        qn = np.linalg.norm(q)
        if qn <= 1e-12 * norms[k]:
            break
        q /= qn
        Q[:, len(support)] = q
        Qs = Q[:, : len(support) + 1]
        r_new = f - Qs @ (Qs.T @ f)
        new = float(np.linalg.norm(r_new))
        if rnorm - new < STAGNATION * rnorm:
            break
        support.append(k)
        r, rnorm = r_new, new
        path.append(rnorm)
    return support, path


def omp(D: Dictionary, f, epsilon: float, max_atoms: int | None = None) -> SparseApproximation:
    """Greedy sparse fit ``||f_hat - f|| <= epsilon`` with a least-squares refit per step.

    Selection maximizes ``|<psi, r>| / ||psi||``; the lowest index wins ties and
    zero atoms are never selected. Residuals below ``1e-12 * ||f||`` count as zero. Raises :class:`NotConvergedError` when the
    tolerance is not met.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (D.dim,):
        raise SparseError(f"flow has shape {f.shape}, expected ({D.dim},)")
    if epsilon < 0:
        raise SparseError("epsilon must be nonnegative")
    max_atoms = D.dim if max_atoms is None else int(max_atoms)
    # residuals at rounding level count as exact
    tol = max(float(epsilon), STAGNATION * float(np.linalg.norm(f)))
    support, path = _greedy(D.atoms, f, tol, max_atoms)
    if support:
        coef, *_ = np.linalg.lstsq(D.atoms[:, support], f, rcond=None)
        resid = float(np.linalg.norm(f - D.atoms[:, support] @ coef))
    else:
        coef, resid = np.zeros(0), float(np.linalg.norm(f))
    result = SparseApproximation(support, coef, resid, float(epsilon), path[-1] <= tol, path)
    if not result.converged:
        raise NotConvergedError(
            f"residual {path[-1]:.3e} > epsilon {epsilon:.3e} after {len(support)} atoms", result
        )
    return result


def atoms_needed(path, epsilon: float) -> int:
    """Smallest number of greedy selections whose residual is within ``epsilon``."""
    for k, r in enumerate(path):
        if r <= epsilon:
            return k
    raise SparseError(f"tolerance {epsilon:.3e} is not reached along the path")


def sparsity_curve(dictionaries: dict[str, Dictionary], f, epsilons) -> list[dict]:
    """Atom counts per dictionary for each relative tolerance in ``epsilons``.

    One greedy run per dictionary serves every tolerance, since the selections
    do not depend on where the run stops.
    """
    f = np.asarray(f, dtype=float)
    eps = np.asarray(epsilons, dtype=float)
    if np.any(eps <= 0) or np.any(eps > 1):
        raise SparseError("relative tolerances must lie in (0, 1]")
    fn = float(np.linalg.norm(f))
    paths = {}
    for name, D in dictionaries.items():
        paths[name] = omp(D, f, eps.min() * fn).path
    rows = []
    for e in eps:
        row = {"epsilon_rel": float(e)}
        for name, path in paths.items():
            row[name] = atoms_needed(path, e * fn)
        rows.append(row)
    return rows


def log_epsilons(n: int = 25, smallest: float = 1e-3) -> np.ndarray:
    """Log-spaced relative tolerances from ``smallest`` to 1 (inclusive)."""
    return np.geomspace(smallest, 1.0, n)


CURVE_COLUMNS = ["fourier", "linegraph_fourier", "linegraph_wavelet", "joint", "separate"]


def curve_csv(rows: list[dict], columns=CURVE_COLUMNS) -> str:
    buf = io.StringIO()
    buf.write(",".join(["epsilon_rel", *columns]) + "\n")
    for row in rows:
        buf.write(",".join([repr(row["epsilon_rel"]), *(str(row[c]) for c in columns)]) + "\n")
    return buf.getvalue()
