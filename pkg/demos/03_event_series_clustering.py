#!/usr/bin/env python3
"""Cluster nodes by the rhythm of their neighborhood changes.

Each node is reduced to a count series (events per interval). DTW
distances between the series feed an average-linkage clustering; the
average silhouette width picks the cut. On a population with a large
stable class and a small active class, the silhouette peaks at two
clusters.
"""

import random

import numpy as np

from nevo import agglomerate, distance_matrix, dtw_distance, select_best_cut, silhouette

rng = random.Random(7)

# 40 stable nodes: rarely more than one event per interval.
series = [np.array([1.0 if rng.random() < 0.15 else 0.0 for _ in range(10)])
          for _ in range(40)]
# 10 active nodes: busy at every interval.
series += [np.array([float(rng.randint(5, 12)) for _ in range(10)])
           for _ in range(10)]

print("example DTW distances:")
print(f"  stable vs stable: {dtw_distance(series[0], series[1]):6.1f}")
print(f"  active vs active: {dtw_distance(series[-1], series[-2]):6.1f}")
print(f"  stable vs active: {dtw_distance(series[0], series[-1]):6.1f}")

d = distance_matrix(series)
dend = agglomerate(d, linkage="average")
best = select_best_cut(dend, d, k_max=15)

print("\naverage silhouette width by number of clusters:")
for k, asw in best.curve:
    marker = "  <- selected" if k == best.k else ""
    print(f"  k={k:<3} ASW={asw:+.3f}{marker}")

labels = best.labels
sizes = np.bincount(labels)
print(f"\nchosen cut: k={best.k}, cluster sizes: {sizes.tolist()}")

report = silhouette(d, labels)
for c, mean in sorted(report.cluster_means.items()):
    members = np.flatnonzero(labels == c)
    level = np.mean([series[i].mean() for i in members])
    print(f"  cluster {c}: {len(members):>2} nodes, mean silhouette {mean:+.3f}, "
          f"mean events/interval {level:.2f}")
