"""Neighborhood partitions, event matrices and the six evolution events.

For a node ``v`` at slice ``t``, the neighborhood partition is the set of
connected components ("ego-components") of the subgraph induced on
``v``'s neighbors after removing ``v`` itself. Comparing the partitions
of two consecutive slices through a confusion matrix of intersection
sizes exposes six kinds of change:

===========  ====================================================
Birth        a column of zeros: the component is entirely new
Death        a row of zeros: the component vanished
Merge        a column with two or more non-zero cells
Split        a row with two or more non-zero cells
Expansion    a positive column sum smaller than the component size
Contraction  a positive row sum smaller than the component size
===========  ====================================================

A component may undergo several events in the same interval. The
positivity clause keeps Birth/Expansion (and Death/Contraction)
mutually exclusive on the same component.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from .errors import ContractError
from .temporal_graph import DynamicNetwork

KIND_LETTERS = "BDMSEC"


class EventKind(IntEnum):
    """The six neighborhood events, in canonical output order."""

    BIRTH = 0
    DEATH = 1
    MERGE = 2
    SPLIT = 3
    EXPANSION = 4
    CONTRACTION = 5

    @property
    def letter(self) -> str:
        return KIND_LETTERS[self]

    @property
    def dual(self) -> "EventKind":
        """Time-reversal counterpart: B<->D, M<->S, E<->C."""
        return EventKind(self.value ^ 1)


def kinds_from_letters(letters: str) -> frozenset[EventKind]:
    return frozenset(EventKind(KIND_LETTERS.index(c)) for c in letters)


def letters_from_kinds(kinds) -> str:
    return "".join(k.letter for k in sorted(kinds))


@dataclass(frozen=True)
class NeighborhoodPartition:
    """Ego-components of one node at one slice, in canonical order.

    Components are pairwise disjoint, their union is the neighborhood,
    and they are ordered by their smallest member id so that matrix rows
    and columns are reproducible.
    """

    node: int
    slice: int
    components: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.components)

    @property
    def neighborhood(self) -> frozenset[int]:
        out: set[int] = set()
        for c in self.components:
            out.update(c)
        return frozenset(out)


@dataclass(frozen=True)
class EventMatrix:
    """Confusion matrix between two consecutive neighborhood partitions."""

    m: np.ndarray
    row_partition: NeighborhoodPartition
    col_partition: NeighborhoodPartition

    @property
    def node(self) -> int:
        return self.row_partition.node

    @property
    def interval(self) -> int:
        return self.row_partition.slice


class EventRecord(NamedTuple):
    """One event of one component at one interval.

    ``component`` indexes the next-slice partition for Birth/Merge/
    Expansion and the previous-slice partition for Death/Split/
    Contraction; ``size`` is that component's size.
    """

    node: int
    interval: int
    kind: EventKind
    component: int
    size: int

    @property
    def side(self) -> str:
        return "next" if self.kind in (EventKind.BIRTH, EventKind.MERGE, EventKind.EXPANSION) else "prev"


def ego_components(net: DynamicNetwork, v: int, t: int) -> NeighborhoodPartition:
    """Connected components of the neighborhood of ``v`` at slice ``t``.

    The component search runs directly on adjacency sets intersected
    with the neighborhood; no explicit subgraph is materialized.
    """
    nb = net.neighborhood(v, t)
    if not nb:
        return NeighborhoodPartition(node=v, slice=t, components=())
    adj = net.slices[t].adj
    seen: set[int] = set()
    comps: list[frozenset[int]] = []
    for s in nb:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for w in adj[u] & nb:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    comps.sort(key=min)
    return NeighborhoodPartition(node=v, slice=t, components=tuple(comps))


def event_matrix(p_t: NeighborhoodPartition, p_t1: NeighborhoodPartition) -> EventMatrix:
    """Intersection-cardinality matrix between consecutive partitions."""
    if p_t.node != p_t1.node:
        raise ContractError(f"partitions belong to different nodes ({p_t.node} vs {p_t1.node})")
    if p_t1.slice != p_t.slice + 1:
        raise ContractError(
            f"partitions are not consecutive (slices {p_t.slice} and {p_t1.slice})"
        )
    m = np.zeros((len(p_t), len(p_t1)), dtype=np.int64)
    col_of = {u: j for j, comp in enumerate(p_t1.components) for u in comp}
    for i, comp in enumerate(p_t.components):
        for u in comp:
            j = col_of.get(u)
            if j is not None:
                m[i, j] += 1
    return EventMatrix(m=m, row_partition=p_t, col_partition=p_t1)


def partitions_identical(mat: EventMatrix) -> bool:
    """True iff every row and column has exactly one non-zero cell and the
    total mass equals the size of the union of the two neighborhoods."""
    m = mat.m
    if not (np.all((m != 0).sum(axis=1) == 1) and np.all((m != 0).sum(axis=0) == 1)):
        return False
    union = mat.row_partition.neighborhood | mat.col_partition.neighborhood
    return int(m.sum()) == len(union)


def detect_events(mat: EventMatrix) -> list[EventRecord]:
    """All events implied by one event matrix, in canonical record order."""
    m = mat.m
    node = mat.node
    t = mat.interval
    row_sizes = np.array([len(c) for c in mat.row_partition.components], dtype=np.int64)
    col_sizes = np.array([len(c) for c in mat.col_partition.components], dtype=np.int64)
    row_sums = m.sum(axis=1)
    col_sums = m.sum(axis=0)
    row_nnz = (m != 0).sum(axis=1)
    col_nnz = (m != 0).sum(axis=0)

    records: list[EventRecord] = []

    def emit(kind, indices, sizes):
        for i in indices:
            records.append(EventRecord(node, t, kind, int(i), int(sizes[i])))

    emit(EventKind.BIRTH, np.flatnonzero(col_sums == 0), col_sizes)
    emit(EventKind.DEATH, np.flatnonzero(row_sums == 0), row_sizes)
    emit(EventKind.MERGE, np.flatnonzero(col_nnz >= 2), col_sizes)
    emit(EventKind.SPLIT, np.flatnonzero(row_nnz >= 2), row_sizes)
    emit(EventKind.EXPANSION, np.flatnonzero((col_sums > 0) & (col_sums < col_sizes)), col_sizes)
    emit(EventKind.CONTRACTION, np.flatnonzero((row_sums > 0) & (row_sums < row_sizes)), row_sizes)
    return records


@dataclass(frozen=True)
class EventDatabase:
    """Every event record of a network plus per-(node, interval) caches.

    ``counts[v, t]`` is the number of records of node ``v`` at interval
    ``t``; ``kind_masks[v, t]`` is a bitmask over :class:`EventKind`
    values marking which kinds occurred. Records are sorted by
    (node, interval, kind, component).
    """

    n: int
    theta: int
    records: tuple[EventRecord, ...]
    counts: np.ndarray
    kind_masks: np.ndarray
    _node_offsets: np.ndarray

    def records_for(self, v: int) -> tuple[EventRecord, ...]:
        return self.records[self._node_offsets[v]:self._node_offsets[v + 1]]

    def itemset(self, v: int, t: int) -> frozenset[EventKind]:
        mask = int(self.kind_masks[v, t])
        return frozenset(k for k in EventKind if mask & (1 << k))

    @property
    def total_records(self) -> int:
        return len(self.records)


def _node_records(net: DynamicNetwork, nodes) -> list[EventRecord]:
    out: list[EventRecord] = []
    for v in nodes:
        parts = [ego_components(net, v, t) for t in range(net.theta)]
        for t in range(net.theta - 1):
            out.extend(detect_events(event_matrix(parts[t], parts[t + 1])))
    return out


def build_event_db(net: DynamicNetwork, threads: int = 1) -> EventDatabase:
    """Detect every neighborhood event of every node over all intervals.

    Detection is independent per (node, interval) pair, so with
    ``threads > 1`` the node range is split into contiguous chunks
    handled by worker processes; chunk results are concatenated in node
    order, making the output identical to the serial run.
    """
    if net.theta < 2:
        raise ContractError(f"event analysis needs at least 2 slices (got {net.theta})")
    if threads <= 1 or net.n == 0:
        records = _node_records(net, range(net.n))
    else:
        chunks = np.array_split(np.arange(net.n), min(threads, net.n))
        parts = Parallel(n_jobs=threads)(
            delayed(_node_records)(net, chunk.tolist()) for chunk in chunks
        )
        records = [r for part in parts for r in part]

    counts = np.zeros((net.n, net.theta - 1), dtype=np.int64)
    masks = np.zeros((net.n, net.theta - 1), dtype=np.uint8)
    offsets = np.zeros(net.n + 1, dtype=np.int64)
    for r in records:
        counts[r.node, r.interval] += 1
        masks[r.node, r.interval] |= 1 << r.kind
        offsets[r.node + 1] += 1
    np.cumsum(offsets, out=offsets)
    return EventDatabase(
        n=net.n,
        theta=net.theta,
        records=tuple(records),
        counts=counts,
        kind_masks=masks,
        _node_offsets=offsets,
    )


EVENTS_CSV_HEADER = ["node", "interval", "kind", "component_side", "component_index", "component_size"]


def write_events_csv(db: EventDatabase, f) -> None:
    """CSV export, one row per event record, sorted like ``db.records``."""
    w = csv.writer(f, lineterminator="\n")
    w.writerow(EVENTS_CSV_HEADER)
    for r in db.records:
        w.writerow([r.node, r.interval, r.kind.letter, r.side, r.component, r.size])


def write_events_jsonl(db: EventDatabase, f) -> None:
    """JSON-lines export, one object per (node, interval) that has events."""
    for v in range(db.n):
        for t in range(db.theta - 1):
            mask = int(db.kind_masks[v, t])
            if not mask:
                continue
            letters = "".join(KIND_LETTERS[k] for k in range(6) if mask & (1 << k))
            f.write(json.dumps(
                {"node": v, "interval": t, "itemset": letters, "count": int(db.counts[v, t])}
            ))
            f.write("\n")
