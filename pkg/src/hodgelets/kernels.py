"""Spectral kernel banks: log-warped Hann translates with a low-pass DC kernel.

Band-pass kernels ``m = 2..M`` are Hann windows ``h(t) = 0.5 + 0.5 cos(2 pi t)``
of width ``R * delta`` on the warped axis ``omega = log(lambda / lambda_floor)``,
centred ``delta`` apart. The first band-pass centre sits at ``R * delta / 2`` so
every band-pass kernel vanishes for ``lambda <= lambda_floor`` (in particular at 0).
The low-pass kernel collects the windows of the lattice that would lie below the
first centre, so ``sum_m g_m^2 = 3R/8`` on ``[0, lambda_max]`` for ``R >= 3``.
"""

from __future__ import annotations

import json
from typing import Callable, Sequence

import numpy as np



class KernelError(ValueError):
    pass


class UncoveredEigenvalueError(KernelError):
    """Some eigenvalue has ``G(lambda) = 0``; the frame would be degenerate."""


def hann(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.where(np.abs(t) <= 0.5, 0.5 + 0.5 * np.cos(2.0 * np.pi * t), 0.0)


class KernelBank:
    """Base class; subclasses provide ``_raw(lam) -> (M, n)``."""

    M: int
    target: float
    includes_dc: bool = False

    def __init__(self):
        # (lo, hi, scale) per cluster of normalized eigenvalues
        self.normalization: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        self.match_tol = 0.0

    def _raw(self, lam: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _scales(self, lam: np.ndarray) -> np.ndarray:
        scale = np.ones_like(lam)
        if self.normalization is None:
            return scale
        lo, hi, s = self.normalization
        k = np.clip(np.searchsorted(lo, lam, side="right") - 1, 0, len(lo) - 1)
        hit = (lam >= lo[k] - self.match_tol) & (lam <= hi[k] + self.match_tol)
        # the neighbouring cluster above may be the closer match
        k2 = np.minimum(k + 1, len(lo) - 1)
        hit2 = (lam >= lo[k2] - self.match_tol) & (lam <= hi[k2] + self.match_tol)
        scale = np.where(hit, s[k], scale)
        return np.where(~hit & hit2, s[k2], scale)

    def evaluate(self, lam) -> np.ndarray:
        """Kernel values; shape ``(M,)`` for a scalar, ``(M, n)`` for an array."""
        arr = np.asarray(lam, dtype=float)
        if np.any(arr < 0):
            raise KernelError("kernels are evaluated at nonnegative eigenvalues only")
        flat = np.atleast_1d(arr).ravel()
        out = self._raw(flat) * self._scales(flat)[None, :]
        return out[:, 0] if arr.ndim == 0 else out

    __call__ = evaluate

    def g_sum(self, lam) -> np.ndarray | float:
        """``G(lambda) = sum_m |g_m(lambda)|^2``."""
        vals = self.evaluate(lam)
        out = np.sum(vals**2, axis=0)
        return float(out) if np.ndim(lam) == 0 else out


class HannBank(KernelBank):
    def __init__(self, lam_max: float, M: int, R: int = 3, lam_floor: float | None = None):
        super().__init__()
        if not lam_max > 0:
            raise KernelError("lambda_max must be positive")
        if M < 2:
            raise KernelError("need at least M = 2 kernels")
        if R < 2:
            raise KernelError("overlap R must be at least 2")
        if lam_floor is None or not 0 < lam_floor < lam_max:
            lam_floor = 1e-4 * lam_max if lam_floor is None else lam_max / 2.0
        self.M = int(M)
        self.R = int(R)
        self.lam_max = float(lam_max)
        self.lam_floor = float(lam_floor)
        self.delta = np.log(self.lam_max / self.lam_floor) / (self.M - 1)
        self.width = self.R * self.delta
        self.centers = (self.R / 2.0 + np.arange(self.M - 1)) * self.delta
        # lattice windows below the first centre that reach omega >= 0
        self.low_centers = (self.R / 2.0 + np.arange(1 - self.R, 0)) * self.delta
        self.target = 3.0 * self.R / 8.0
        self.includes_dc = True

    def warp(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return np.log(np.maximum(lam, self.lam_floor) / self.lam_floor)

    def _raw(self, lam: np.ndarray) -> np.ndarray:
        w = self.warp(lam)
        band = hann((w[None, :] - self.centers[:, None]) / self.width)
        low = np.sqrt(np.sum(hann((w[None, :] - self.low_centers[:, None]) / self.width) ** 2, axis=0))
        return np.vstack([low[None, :], band])

    def to_dict(self) -> dict:
        d = {
            "kind": "log-hann",
            "M": self.M,
            "R": self.R,
            "lambda_max": self.lam_max,
            "lambda_floor": self.lam_floor,
            "delta": self.delta,
            "width": self.width,
            "centers": self.centers.tolist(),
            "target": self.target,
            "normalization": None,
        }
        if self.normalization is not None:
            lo, hi, s = self.normalization
            d["normalization"] = {
                "lo": lo.tolist(), "hi": hi.tolist(), "scale": s.tolist(), "match_tol": self.match_tol,
            }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "HannBank":
        bank = cls(d["lambda_max"], d["M"], d["R"], d["lambda_floor"])
        norm = d.get("normalization")
        if norm:
            bank.normalization = (np.array(norm["lo"]), np.array(norm["hi"]), np.array(norm["scale"]))
            bank.match_tol = norm["match_tol"]
        return bank


class FunctionBank(KernelBank):
    """Bank of arbitrary vectorized kernels, mostly for tests and baselines."""

    def __init__(self, funcs: Sequence[Callable], target: float = 1.0, includes_dc: bool = False):
        super().__init__()
        if not funcs:
            raise KernelError("empty bank")
        self.funcs = list(funcs)
        self.M = len(self.funcs)
        self.target = float(target)
        self.includes_dc = includes_dc

    def _raw(self, lam: np.ndarray) -> np.ndarray:
        rows = [np.broadcast_to(np.asarray(f(lam), dtype=float), lam.shape) for f in self.funcs]
        out = np.vstack(rows)
        if np.any(out < 0):
            raise KernelError("kernel values must be nonnegative")
        return out


def smallest_nonzero(eigenvalues, rel_tol: float = 1e-8) -> float | None:
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        return None
    pos = lam[lam > rel_tol * np.abs(lam).max()]
    return float(pos.min()) if pos.size else None


def hann_bank(lambda_max: float, M: int, R: int = 3, spectrum_for_floor=None) -> HannBank:
    """Log-warped Hann bank whose warp floor is the smallest nonzero eigenvalue given."""
    floor = smallest_nonzero(spectrum_for_floor) if spectrum_for_floor is not None else None
    return HannBank(lambda_max, M, R, floor)


def normalize_on_spectrum(bank: KernelBank, eigenvalues) -> KernelBank:
    """Copy of ``bank`` rescaled so that ``G == bank.target`` on every given eigenvalue."""
    import copy

    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    if lam.size == 0:
        raise KernelError("empty spectrum")
    tol = 1e-10 * max(1.0, float(np.abs(lam).max()))
    lam = np.where(np.abs(lam) <= tol, 0.0, lam)
    lo, hi = [lam[0]], [lam[0]]
    for x in lam[1:]:
        if x - hi[-1] > tol:
            lo.append(x)
            hi.append(x)
        else:
            hi[-1] = x
    lo, hi = np.array(lo), np.array(hi)
    raw = copy.copy(bank)
    raw.normalization = None
    G = raw.g_sum(lo)
    if np.any(G <= 0):
        bad = lo[G <= 0]
        raise UncoveredEigenvalueError(f"G vanishes at eigenvalue(s) {bad.tolist()}")
    out = copy.copy(bank)
    out.normalization = (lo, hi, np.sqrt(bank.target / G))
    out.match_tol = tol
    return out
