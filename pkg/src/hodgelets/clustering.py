"""Sparse k-means (lasso-weighted features) and the centroid alignment score."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dictionary import Dictionary, analyze


class ClusteringError(ValueError):
    pass


@dataclass
class ClusterModel:
    K: int
    s: float
    weights: np.ndarray
    centroids: np.ndarray  # (K, D) in unscaled feature space
    assignments: np.ndarray
    seed: int
    objective: list[float] = field(default_factory=list, repr=False)
    n_iter: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "K": self.K,
                "s": self.s,
                "seed": self.seed,
                "weights": self.weights.tolist(),
                "centroids": self.centroids.tolist(),
            },
            indent=1,
        )


def _kmeans_pp(Z: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    P = len(Z)
    idx = [int(rng.integers(P))]
    d2 = ((Z - Z[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total <= 0:
            nxt = next(i for i in range(P) if i not in idx)
        else:
            nxt = int(rng.choice(P, p=d2 / total))
        idx.append(nxt)
        d2 = np.minimum(d2, ((Z - Z[nxt]) ** 2).sum(axis=1))
    return Z[idx].copy()


def _lloyd(Z: np.ndarray, centers: np.ndarray, max_iter: int = 100) -> tuple[np.ndarray, np.ndarray, float]:
    K = len(centers)
    labels = None
    for _ in range(max_iter):
        d2 = ((Z[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
        new = np.argmin(d2, axis=1)
        # refill empty clusters from the point farthest from its centre,
        # never emptying another cluster
        own = d2[np.arange(len(Z)), new]
        for k in range(K):
            if not np.any(new == k):
                sizes = np.bincount(new, minlength=K)
                cand = np.where(sizes[new] > 1, own, -np.inf)
                far = int(np.argmax(cand))
                new[far] = k
                own[far] = -np.inf
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.stack([Z[labels == k].mean(axis=0) for k in range(K)])
    wcss = float(((Z - centers[labels]) ** 2).sum())
    return labels, centers, wcss


def bcss_per_feature(X: np.ndarray, labels: np.ndarray, K: int) -> np.ndarray:
    """Between-cluster sum of squares for each column: total minus within-cluster."""
    tss = ((X - X.mean(axis=0)) ** 2).sum(axis=0)
    wcss = np.zeros(X.shape[1])
    for k in range(K):
        Xk = X[labels == k]
        if len(Xk):
            wcss += ((Xk - Xk.mean(axis=0)) ** 2).sum(axis=0)
    return tss - wcss


def _soft(a: np.ndarray, delta: float) -> np.ndarray:
    return np.maximum(a - delta, 0.0)


def update_weights(a: np.ndarray, s: float, n_bisect: int = 30) -> np.ndarray:
    """Maximize ``w . a`` subject to ``||w||_2 <= 1``, ``||w||_1 <= s``, ``w >= 0``."""
    a = np.maximum(np.asarray(a, dtype=float), 0.0)
    if not np.any(a > 0):
        return np.full(a.shape, 1.0 / np.sqrt(a.size))

    def unit(delta):
        w = _soft(a, delta)
        n = np.linalg.norm(w)
        return w / n if n > 0 else w

    w = unit(0.0)
    if w.sum() <= s:
        return w
    lo, hi = 0.0, float(a.max())
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        if unit(mid).sum() > s:
            lo = mid
        else:
            hi = mid
    # hi always satisfies the l1 budget
    return unit(hi)


def sparse_kmeans(
    features,
    K: int,
    s: float | None = None,
    seed: int = 0,
    max_iters: int = 20,
    n_init: int = 10,
) -> ClusterModel:
    """Alternate weighted k-means and lasso weight updates.

    Each k-means step runs on the columns with positive weight, scaled by
    ``sqrt(w)``, warm-started from the previous partition after the first pass.
    """
    Xf = np.asarray(features, dtype=float)
    if Xf.ndim != 2:
        raise ClusteringError("features must be a P x D matrix")
    P, D = Xf.shape
    if not 1 < K <= P:
        raise ClusteringError(f"need 1 < K <= P, got K={K}, P={P}")
    s = np.sqrt(D) / 4 if s is None else float(s)
    if not 1.0 <= s <= np.sqrt(D) + 1e-12:
        raise ClusteringError(f"l1 budget s={s} outside [1, sqrt(D)={np.sqrt(D):.3g}]")
    rng = np.random.default_rng(seed)

    w = np.full(D, 1.0 / np.sqrt(D))
    labels = None
    objective = []
    it = 0
    for it in range(1, max_iters + 1):
        active = w > 0
        Z = Xf[:, active] * np.sqrt(w[active])
        if labels is None:
            best = None
            for _ in range(n_init):
                cand = _lloyd(Z, _kmeans_pp(Z, K, rng))
                if best is None or cand[2] < best[2]:
                    best = cand
            labels = best[0]
        else:
            start = np.stack([Z[labels == k].mean(axis=0) for k in range(K)])
            labels = _lloyd(Z, start)[0]
        a = bcss_per_feature(Xf, labels, K)
        w_new = update_weights(a, s)
        objective.append(float(w_new @ a))
        change = np.abs(w_new - w).sum()
        w = w_new
        if change < 1e-6:
            break
    centroids = np.stack([Xf[labels == k].mean(axis=0) for k in range(K)])
    return ClusterModel(K, s, w, centroids, labels, seed, objective, it)


def weighted_cosines(F: np.ndarray, C: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Matrix of ``<f, c>_w / (||f||_w ||c||_w)``; zero where a norm vanishes."""
    ip = (F * w) @ C.T
    nf = np.sqrt(((F**2) * w).sum(axis=1))
    nc = np.sqrt(((C**2) * w).sum(axis=1))
    denom = np.outer(nf, nc)
    out = np.zeros_like(ip)
    ok = denom > 0
    out[ok] = ip[ok] / denom[ok]
    return out


def alignment_score(model: ClusterModel, test_flows, D: Dictionary) -> float:
    """Mean over test flows of the best weighted cosine to any centroid."""
    F = np.asarray(test_flows, dtype=float)
    if F.ndim == 1:
        F = F[None, :]
    if len(F) == 0:
        raise ClusteringError("empty test set")
    coef = analyze(D, F.T).T
    if coef.shape[1] != model.centroids.shape[1]:
        raise ClusteringError("centroids do not live in this dictionary's coefficient space")
    return float(weighted_cosines(coef, model.centroids, model.weights).max(axis=1).mean())


def train_test_split(P: int, ratio: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle; the training part has ``floor(ratio * P)`` items, at least one."""
    if P < 2:
        raise ClusteringError("need at least two items to split")
    if not 0 < ratio < 1:
        raise ClusteringError("ratio must lie in (0, 1)")
    n_train = int(np.floor(ratio * P + 1e-9))
    n_train = min(max(n_train, 1), P - 1)
    perm = np.random.default_rng(seed).permutation(P)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def scores_csv(scores: dict[str, float]) -> str:
    lines = ["representation,L"] + [f"{k},{float(v)!r}" for k, v in scores.items()]
    return "\n".join(lines) + "\n"
