"""Shared test utilities: generators and independent reference oracles.

The oracles here intentionally avoid the library's algorithms: event
detection uses union-find and double-loop set intersections, subsequence
matching enumerates every embedding, pattern counting expands per-node
powersets, clustering and silhouette recompute averages from scratch,
and DTW fills the full quadratic table.
"""

import random
from collections import Counter
from itertools import combinations

import numpy as np

from nevo import DynamicNetwork, EventKind
from nevo.sequence_db import NodeSequence, SequenceDatabase

KINDS = "BDMSEC"


def random_network(rng: random.Random, n=None, theta=None, p=None) -> DynamicNetwork:
    n = n if n is not None else rng.randint(2, 40)
    theta = theta if theta is not None else rng.randint(2, 8)
    p = p if p is not None else rng.uniform(0.02, 0.35)
    slices = []
    for _ in range(theta):
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        slices.append(edges)
    return DynamicNetwork.from_slices(slices, n=n)


def reversed_network(net: DynamicNetwork) -> DynamicNetwork:
    slices = [list(sl.edges()) for sl in net.slices]
    return DynamicNetwork.from_slices(reversed(slices), n=net.n, labels=net.labels)


def record_tuples(records):
    return sorted((r.node, r.interval, r.kind.letter, r.component, r.size) for r in records)


def naive_event_records(net: DynamicNetwork):
    """Reference event detection: edge scans, union-find, plain set algebra."""
    out = []
    edges_per_slice = [list(sl.edges()) for sl in net.slices]
    for v in range(net.n):
        partitions = []
        for t in range(net.theta):
            nb = set()
            for u, w in edges_per_slice[t]:
                if u == v:
                    nb.add(w)
                elif w == v:
                    nb.add(u)
            parent = {u: u for u in nb}

            def find(x):
                while parent[x] != x:
                    x = parent[x]
                return x

            for u, w in edges_per_slice[t]:
                if u != v and w != v and u in parent and w in parent:
                    ru, rw = find(u), find(w)
                    if ru != rw:
                        parent[ru] = rw
            groups = {}
            for u in nb:
                groups.setdefault(find(u), set()).add(u)
            partitions.append(sorted(groups.values(), key=min))
        for t in range(net.theta - 1):
            prev, nxt = partitions[t], partitions[t + 1]
            inter = [[len(a & b) for b in nxt] for a in prev]
            for j, b in enumerate(nxt):
                col = [inter[i][j] for i in range(len(prev))]
                if sum(col) == 0:
                    out.append((v, t, "B", j, len(b)))
                if sum(1 for c in col if c) >= 2:
                    out.append((v, t, "M", j, len(b)))
                if 0 < sum(col) < len(b):
                    out.append((v, t, "E", j, len(b)))
            for i, a in enumerate(prev):
                row = inter[i]
                if sum(row) == 0:
                    out.append((v, t, "D", i, len(a)))
                if sum(1 for c in row if c) >= 2:
                    out.append((v, t, "S", i, len(a)))
                if 0 < sum(row) < len(a):
                    out.append((v, t, "C", i, len(a)))
    return sorted(out)


# -- sequence databases --------------------------------------------------------

def make_db(rows, n_total=None) -> SequenceDatabase:
    """Rows are per-node lists of itemset strings, e.g. [["B", "DE"], ["B"]]."""
    sequences = {}
    for v, row in enumerate(rows):
        entries = tuple(
            (t, frozenset(EventKind(KINDS.index(c)) for c in letters))
            for t, letters in enumerate(row)
            if letters
        )
        sequences[v] = NodeSequence(node=v, entries=entries)
    return SequenceDatabase(n_total=n_total or len(rows), sequences=sequences)


def random_sequence_db(rng: random.Random, max_nodes=10, max_intervals=6,
                       item_weights=(0.62, 0.3, 0.08)) -> SequenceDatabase:
    n = rng.randint(1, max_nodes)
    intervals = rng.randint(1, max_intervals)
    rows = []
    for _ in range(n):
        row = []
        for _ in range(intervals):
            if rng.random() < 0.6:
                size = rng.choices((1, 2, 3), item_weights)[0]
                row.append("".join(sorted(rng.sample(KINDS, size), key=KINDS.index)))
            else:
                row.append("")
        rows.append(row)
    return make_db(rows)


def exhaustive_embedding(a, b) -> bool:
    """Subsequence test by trying every index combination (no greediness)."""
    a = [frozenset(h) for h in a]
    b = [frozenset(h) for h in b]
    if len(a) > len(b):
        return False
    for positions in combinations(range(len(b)), len(a)):
        if all(ai <= b[p] for ai, p in zip(a, positions)):
            return True
    return len(a) == 0


def enumerate_pattern_counts(db: SequenceDatabase) -> Counter:
    """Support of every distinct subsequence, via per-node powerset expansion."""
    counts = Counter()
    for ns in db.sequences.values():
        itemsets = ns.itemsets()
        found = set()

        def expand(i, acc):
            if i == len(itemsets):
                if acc:
                    found.add(tuple(acc))
                return
            expand(i + 1, acc)
            items = sorted(itemsets[i])
            for r in range(1, len(items) + 1):
                for combo in combinations(items, r):
                    expand(i + 1, acc + [frozenset(combo)])

        expand(0, [])
        counts.update(found)
    return counts


# -- clustering references -----------------------------------------------------

def dtw_reference(x, y) -> float:
    """Full-table DTW dynamic program."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n, m = len(x), len(y)
    table = np.full((n + 1, m + 1), np.inf)
    table[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = abs(x[i - 1] - y[j - 1])
            table[i, j] = cost + min(table[i - 1, j], table[i, j - 1], table[i - 1, j - 1])
    return float(table[n, m])


def naive_agglomerate(d, linkage="average"):
    """From-scratch hierarchical merges with the smallest-leaf tie rule."""
    n = d.shape[0]
    clusters = {i: [i] for i in range(n)}
    next_id = n
    merges = []
    while len(clusters) > 1:
        candidates = []
        ids = sorted(clusters)
        for ai in range(len(ids)):
            for bi in range(ai + 1, len(ids)):
                a, b = ids[ai], ids[bi]
                pts = [d[x, y] for x in clusters[a] for y in clusters[b]]
                if linkage == "average":
                    val = sum(pts) / len(pts)
                elif linkage == "single":
                    val = min(pts)
                else:
                    val = max(pts)
                la, lb = min(clusters[a]), min(clusters[b])
                if la > lb:
                    a, b, la, lb = b, a, lb, la
                candidates.append((val, la, lb, a, b))
        val, _, _, a, b = min(candidates)
        merges.append((a, b, val))
        clusters[next_id] = clusters.pop(a) + clusters.pop(b)
        next_id += 1
    return merges


def naive_silhouette_widths(d, labels):
    n = len(labels)
    widths = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            widths.append(0.0)
            continue
        a = sum(d[i, j] for j in own) / len(own)
        b = min(
            sum(d[i, j] for j in range(n) if labels[j] == c) / sum(1 for j in range(n) if labels[j] == c)
            for c in set(labels) - {labels[i]}
        )
        widths.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return widths


def random_distance_matrix(rng: random.Random, n: int, integer=False) -> np.ndarray:
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            val = float(rng.randint(1, 12)) if integer else rng.uniform(0.1, 10.0)
            d[i, j] = d[j, i] = val
    return d


def planted_two_classes(rng: random.Random, n_stable=40, n_active=10, length=10):
    """Count series mimicking a large quiet class and a small busy class."""
    series = []
    for _ in range(n_stable):
        series.append(np.array([1.0 if rng.random() < 0.15 else 0.0 for _ in range(length)]))
    for _ in range(n_active):
        series.append(np.array([float(rng.randint(5, 12)) for _ in range(length)]))
    truth = np.array([0] * n_stable + [1] * n_active)
    return series, truth
