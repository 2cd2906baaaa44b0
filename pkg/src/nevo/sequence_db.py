"""Event sequences per node: itemsets, sub-sequence matching and support.

Each node gets a chronologically ordered sequence of itemsets, one per
interval that saw at least one of its events; an itemset is the set of
event kinds observed there (multiplicities collapse to presence).
Event-free intervals are omitted from the entries, but event-free nodes
still count in support denominators.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .ego_events import EventDatabase, EventKind, letters_from_kinds
from .errors import ContractError

Itemset = frozenset  # of EventKind


@dataclass(frozen=True)
class NodeSequence:
    """Ordered (interval, itemset) entries of one node; itemsets non-empty."""

    node: int
    entries: tuple[tuple[int, frozenset[EventKind]], ...]

    def itemsets(self) -> tuple[frozenset[EventKind], ...]:
        return tuple(h for _, h in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SequenceDatabase:
    """Node sequences keyed by node id, plus the support denominator.

    ``n_total`` includes nodes whose sequence is empty; a restricted
    database (see :func:`restrict`) keeps only the chosen nodes and uses
    their count as denominator.
    """

    n_total: int
    sequences: dict[int, NodeSequence]


@dataclass(frozen=True)
class CountSeries:
    """Per-interval event-record counts of one node (zeros kept)."""

    node: int
    counts: np.ndarray


class Support(NamedTuple):
    count: int
    rate: float


def to_sequence_db(events: EventDatabase, n: int | None = None) -> SequenceDatabase:
    """Collapse an event database into per-node itemset sequences."""
    if n is None:
        n = events.n
    elif n != events.n:
        raise ContractError(f"node count {n} does not match the event database ({events.n})")
    sequences: dict[int, NodeSequence] = {}
    for v in range(n):
        entries = []
        for t in range(events.theta - 1):
            mask = int(events.kind_masks[v, t])
            if mask:
                entries.append((t, frozenset(k for k in EventKind if mask & (1 << k))))
        sequences[v] = NodeSequence(node=v, entries=tuple(entries))
    return SequenceDatabase(n_total=n, sequences=sequences)


def restrict(db: SequenceDatabase, nodes: Iterable[int]) -> SequenceDatabase:
    """Sub-database over ``nodes``; the denominator becomes their count."""
    nodes = sorted(set(nodes))
    missing = [v for v in nodes if v not in db.sequences]
    if missing:
        raise ContractError(f"nodes not in database: {missing[:5]}")
    return SequenceDatabase(n_total=len(nodes), sequences={v: db.sequences[v] for v in nodes})


def _check_itemsets(seq) -> tuple[frozenset, ...]:
    out = tuple(frozenset(h) for h in seq)
    for h in out:
        if not h:
            raise ContractError("itemsets in a pattern must be non-empty")
    return out


def is_subsequence(a, b) -> bool:
    """Order-preserving embedding test with itemset containment.

    ``a`` embeds in ``b`` iff there are strictly increasing positions of
    ``b`` whose itemsets contain ``a``'s, element by element. Greedy
    earliest matching is exact here because containment is monotone.
    """
    a = _check_itemsets(a)
    b = _check_itemsets(b)
    pos = 0
    for h in a:
        while pos < len(b) and not h <= b[pos]:
            pos += 1
        if pos == len(b):
            return False
        pos += 1
    return True


def support(db: SequenceDatabase, pattern) -> Support:
    """Number and fraction of nodes whose sequence embeds ``pattern``."""
    pat = _check_itemsets(pattern)
    if not pat:
        raise ContractError("pattern must contain at least one itemset")
    count = sum(1 for s in db.sequences.values() if is_subsequence(pat, s.itemsets()))
    return Support(count, count / db.n_total)


def growth_rate(db: SequenceDatabase, pattern, cluster: Iterable[int]) -> float:
    """Ratio of the in-cluster support rate to the complement support rate.

    Returns ``math.inf`` when the pattern is absent outside the cluster
    but present inside; a pattern absent everywhere has no defined
    growth rate and raises.
    """
    pat = _check_itemsets(pattern)
    cluster = set(cluster)
    if not cluster or not cluster <= set(db.sequences):
        raise ContractError("cluster must be a non-empty subset of the database nodes")
    n_in = len(cluster)
    n_out = db.n_total - n_in
    if n_out == 0:
        raise ContractError("cluster must be a strict subset of the database nodes")
    c_in = c_out = 0
    for v, s in db.sequences.items():
        if is_subsequence(pat, s.itemsets()):
            if v in cluster:
                c_in += 1
            else:
                c_out += 1
    if c_in == 0 and c_out == 0:
        raise ContractError("pattern is supported nowhere; growth rate undefined")
    rate_in = c_in / n_in
    rate_out = c_out / n_out
    if rate_out == 0.0:
        return math.inf
    return rate_in / rate_out


def event_count_series(events: EventDatabase, v: int) -> CountSeries:
    """Event-record counts of node ``v`` per interval, zeros included."""
    if not 0 <= v < events.n:
        raise IndexError(f"node id {v} out of range [0, {events.n})")
    return CountSeries(node=v, counts=events.counts[v].copy())


def all_count_series(events: EventDatabase) -> list[CountSeries]:
    return [event_count_series(events, v) for v in range(events.n)]


def write_sequences_jsonl(db: SequenceDatabase, f) -> None:
    """One JSON object per node: ``{"node": v, "entries": [[t, "BD"], ...]}``."""
    for v in sorted(db.sequences):
        entries = [[t, letters_from_kinds(h)] for t, h in db.sequences[v].entries]
        f.write(json.dumps({"node": v, "entries": entries}))
        f.write("\n")
