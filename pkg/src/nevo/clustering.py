"""DTW distances over event-count series and silhouette-guided clustering.

Nodes are described by how many events they undergo per interval; the
pairwise dynamic-time-warping distance between those count series feeds
an agglomerative clustering, and the dendrogram cut is chosen by the
average silhouette width.

DTW here is the classic unconstrained recursion with absolute-difference
cell cost and match/insert/delete steps. It is symmetric, non-negative
and zero on identical series, but it is not a metric (the triangle
inequality can fail), which is why the clustering works from the full
distance matrix rather than from point coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from .errors import ContractError

LINKAGES = ("average", "single", "complete")


def _series_values(x) -> list[float]:
    values = getattr(x, "counts", x)
    return [float(v) for v in values]


def dtw_distance(x, y, window: int | None = None) -> float:
    """Dynamic-time-warping distance between two numeric series.

    ``window`` optionally restricts the alignment to the Sakoe-Chiba band
    ``|i - j| <= window`` (widened to the length difference when needed);
    by default the warping is unconstrained.
    """
    xs = _series_values(x)
    ys = _series_values(y)
    n, m = len(xs), len(ys)
    if n == 0 or m == 0:
        raise ContractError("DTW is undefined for empty series")
    if window is not None:
        window = max(int(window), abs(n - m))
    inf = float("inf")
    prev = [inf] * (m + 1)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur = [inf] * (m + 1)
        xi = xs[i - 1]
        lo = 1 if window is None else max(1, i - window)
        hi = m if window is None else min(m, i + window)
        for j in range(lo, hi + 1):
            c = abs(xi - ys[j - 1])
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = c + best
        prev = cur
    return prev[m]


def distance_matrix(series, window: int | None = None, threads: int = 1) -> np.ndarray:
    """Symmetric matrix of pairwise DTW distances (each pair computed once)."""
    values = [_series_values(s) for s in series]
    if not values:
        return np.zeros((0, 0))
    length = len(values[0])
    if any(len(v) != length for v in values):
        raise ContractError("all series must have the same length")
    n = len(values)
    d = np.zeros((n, n))

    def _row(i):
        return [dtw_distance(values[i], values[j], window=window) for j in range(i + 1, n)]

    if threads > 1 and n > 2:
        rows = Parallel(n_jobs=threads)(delayed(_row)(i) for i in range(n - 1))
    else:
        rows = [_row(i) for i in range(n - 1)]
    for i, row in enumerate(rows):
        for k, val in enumerate(row):
            j = i + 1 + k
            d[i, j] = d[j, i] = val
    return d


def _check_distance_matrix(d: np.ndarray) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ContractError("distance matrix must be square")
    if np.any(np.diag(d) != 0.0):
        raise ContractError("distance matrix must have a zero diagonal")
    if not np.array_equal(d, d.T):
        raise ContractError("distance matrix must be symmetric")
    if np.any(d < 0.0):
        raise ContractError("distances must be non-negative")
    return d


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history: (cluster_a, cluster_b, height) triples.

    Leaves are 0..n-1; the merge at step s creates cluster id n+s, as in
    the usual linkage-matrix convention.
    """

    n_leaves: int
    merges: tuple[tuple[int, int, float], ...]

    def cut(self, k: int) -> np.ndarray:
        """Cluster labels after stopping at ``k`` clusters.

        Labels are 0..k-1, numbered by each cluster's smallest leaf.
        """
        n = self.n_leaves
        if not 1 <= k <= n:
            raise ContractError(f"cut size must lie in [1, {n}]; got {k}")
        parent = list(range(n + len(self.merges)))

        def root(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for step in range(n - k):
            a, b, _ = self.merges[step]
            new = n + step
            parent[root(a)] = new
            parent[root(b)] = new
        roots = [root(v) for v in range(n)]
        first_leaf: dict[int, int] = {}
        for v, r in enumerate(roots):
            first_leaf.setdefault(r, v)
        order = {r: rank for rank, r in enumerate(sorted(first_leaf, key=first_leaf.get))}
        return np.array([order[r] for r in roots], dtype=np.int64)

    def to_text(self) -> str:
        """Nested-parenthesis rendering with merge heights, e.g. ``((0,1):1,(2,3):1):10``."""
        text = {v: str(v) for v in range(self.n_leaves)}
        node = self.n_leaves
        for a, b, h in self.merges:
            text[node] = f"({text.pop(a)},{text.pop(b)}):{h:.17g}"
            node += 1
        return ",".join(text[i] for i in sorted(text)) + "\n"


def agglomerate(d: np.ndarray, linkage: str = "average") -> Dendrogram:
    """Bottom-up clustering of a distance matrix.

    ``average`` (the default) merges the pair of clusters with the least
    mean inter-cluster distance; ``single`` and ``complete`` use the
    minimum and maximum. Ties break on the smallest leaf ids, making the
    merge order deterministic. Average-linkage sums are accumulated
    exactly (no incremental averaging), so integer inputs produce exact
    heights.
    """
    if linkage not in LINKAGES:
        raise ContractError(f"linkage must be one of {LINKAGES}; got {linkage!r}")
    d = _check_distance_matrix(d)
    n = d.shape[0]
    if n == 0:
        raise ContractError("cannot cluster an empty matrix")
    if n == 1:
        return Dendrogram(n_leaves=1, merges=())

    work = d.astype(float).copy()  # pair sums for average, plain distances otherwise
    size = np.ones(n)
    minleaf = np.arange(n)
    cid = np.arange(n)
    alive = np.ones(n, dtype=bool)

    if linkage == "average":
        cur = work / np.outer(size, size)
    else:
        cur = work.copy()
    np.fill_diagonal(cur, np.inf)
    merges = []
    for step in range(n - 1):
        best = cur.min()
        ties = np.argwhere(cur == best)
        pairs = []
        for i, j in ties:
            if i < j:
                a, b = (i, j) if minleaf[i] < minleaf[j] else (j, i)
                pairs.append((minleaf[a], minleaf[b], a, b))
        _, _, a, b = min(pairs)
        merges.append((int(cid[a]), int(cid[b]), float(cur[a, b])))

        # fold b into slot a
        if linkage == "average":
            work[a, :] += work[b, :]
            work[:, a] += work[:, b]
        elif linkage == "single":
            work[a, :] = np.minimum(work[a, :], work[b, :])
            work[:, a] = work[a, :]
        else:
            work[a, :] = np.maximum(work[a, :], work[b, :])
            work[:, a] = work[a, :]
        size[a] += size[b]
        minleaf[a] = min(minleaf[a], minleaf[b])
        cid[a] = n + step
        alive[b] = False

        if linkage == "average":
            cur[a, :] = work[a, :] / (size[a] * size)
            cur[:, a] = cur[a, :]
        else:
            cur[a, :] = work[a, :]
            cur[:, a] = work[a, :]
        cur[a, ~alive] = np.inf
        cur[~alive, a] = np.inf
        cur[a, a] = np.inf
        cur[b, :] = np.inf
        cur[:, b] = np.inf
    return Dendrogram(n_leaves=n, merges=tuple(merges))


@dataclass(frozen=True)
class SilhouetteReport:
    """Per-node widths, per-cluster means, and the overall average width."""

    widths: np.ndarray
    cluster_means: dict[int, float]
    asw: float


def silhouette(d: np.ndarray, labels) -> SilhouetteReport:
    """Silhouette widths of a partition under a precomputed distance matrix.

    ``s(i) = (b(i) - a(i)) / max(a(i), b(i))`` with ``a`` the mean
    intra-cluster distance (self excluded) and ``b`` the smallest mean
    distance to another cluster. Singletons get width 0 by convention.
    """
    d = _check_distance_matrix(d)
    labels = np.asarray(labels)
    n = d.shape[0]
    if labels.shape != (n,):
        raise ContractError("labels must cover every node exactly once")
    clusters = np.unique(labels)
    if len(clusters) < 2:
        raise ContractError("silhouette needs at least 2 clusters")
    members = {c: np.flatnonzero(labels == c) for c in clusters}
    widths = np.zeros(n)
    for i in range(n):
        own = members[labels[i]]
        if len(own) == 1:
            widths[i] = 0.0
            continue
        a = d[i, own].sum() / (len(own) - 1)
        b = min(d[i, members[c]].mean() for c in clusters if c != labels[i])
        denom = max(a, b)
        widths[i] = 0.0 if denom == 0.0 else (b - a) / denom
    cluster_means = {int(c): float(widths[members[c]].mean()) for c in clusters}
    return SilhouetteReport(widths=widths, cluster_means=cluster_means, asw=float(widths.mean()))


class BestCut(NamedTuple):
    k: int
    labels: np.ndarray
    asw: float
    curve: list[tuple[int, float]]


def select_best_cut(dendrogram: Dendrogram, d: np.ndarray, k_max: int = 15) -> BestCut:
    """Evaluate cuts at k = 2..min(k_max, n-1) and return the ASW argmax.

    Ties pick the smallest k. For a 2-node input the only possible cut
    (two singletons, ASW 0 by the singleton convention) is returned.
    """
    if k_max < 2:
        raise ContractError("k_max must be >= 2")
    n = dendrogram.n_leaves
    if n < 2:
        raise ContractError("need at least 2 nodes to cut")
    if n == 2:
        labels = dendrogram.cut(2)
        return BestCut(k=2, labels=labels, asw=0.0, curve=[(2, 0.0)])
    curve = []
    best_k = None
    best_asw = -np.inf
    best_labels = None
    for k in range(2, min(k_max, n - 1) + 1):
        labels = dendrogram.cut(k)
        asw = silhouette(d, labels).asw
        curve.append((k, asw))
        if asw > best_asw:
            best_k, best_asw, best_labels = k, asw, labels
    return BestCut(k=best_k, labels=best_labels, asw=float(best_asw), curve=curve)


def write_clusters_csv(labels, widths, f) -> None:
    """CSV export ``node,cluster,silhouette`` with 17-significant-digit floats."""
    f.write("node,cluster,silhouette\n")
    for v, (c, s) in enumerate(zip(labels, widths)):
        f.write(f"{v},{int(c)},{float(s):.17g}\n")


def write_asw_curve_csv(curve, f) -> None:
    f.write("k,asw\n")
    for k, asw in curve:
        f.write(f"{k},{asw:.17g}\n")
