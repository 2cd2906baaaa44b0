#!/usr/bin/env python3
"""Mine sequential patterns from node event sequences.

Each node's history becomes a sequence of itemsets (the event kinds it
saw per interval). Closed frequent sequences describe population-wide
trends; top-k longest sequences surface long trajectories; growth rates
tell which patterns are specific to a group of nodes.
"""

import random

from nevo import (
    EventKind,
    attach_growth_rates,
    format_pattern,
    mine_closed,
    mine_topk_longest,
    min_sup_scan,
    restrict,
    support,
)
from nevo.sequence_db import NodeSequence, SequenceDatabase

KINDS = "BDMSEC"


def seq_of(*itemset_strings):
    entries = tuple(
        (t, frozenset(EventKind(KINDS.index(c)) for c in s))
        for t, s in enumerate(itemset_strings) if s
    )
    return entries


# A synthetic population: most nodes only gain and lose single neighbors
# (births and deaths), a small group goes through a grow-then-shrink arc.
rng = random.Random(1)
sequences = {}
for v in range(120):
    sequences[v] = NodeSequence(v, seq_of(*["B" if rng.random() < 0.7 else "",
                                            "D" if rng.random() < 0.6 else "",
                                            "B" if rng.random() < 0.3 else ""]))
for v in range(120, 135):
    sequences[v] = NodeSequence(v, seq_of("B", "BE", "E", "EC", "C"))
db = SequenceDatabase(n_total=135, sequences=sequences)

print("closed frequent sequences, scanning the support threshold downwards:")
for threshold, patterns in min_sup_scan(db):
    print(f"  min_sup={threshold:.1f}: {len(patterns)} patterns")
    for p in patterns[:5]:
        print(f"    {format_pattern(p.itemsets):<18} count={p.support_count:<4} rate={p.support_rate:.3f}")

print("\ntop-5 longest supported sequences (min length 3):")
for p in mine_topk_longest(db, k=5, min_length=3):
    print(f"  {format_pattern(p.itemsets):<22} count={p.support_count:<4} rate={p.support_rate:.3f}")

# Mining inside a cluster: the busy group's arc is invisible globally but
# dominates its own cluster, which the growth rate makes explicit.
cluster = set(range(120, 135))
scoped = mine_closed(restrict(db, cluster), min_sup=1.0)
annotated = attach_growth_rates(scoped, db, cluster)
print("\npatterns of the active cluster (support 1.0 inside), with growth rates:")
for p in annotated[:6]:
    growth = "inf" if p.growth == float("inf") else f"{p.growth:.2f}"
    print(f"  {format_pattern(p.itemsets):<22} growth={growth}")

probe = [frozenset({EventKind.BIRTH})]
print(f"\nglobal support of (B): {support(db, probe)}")
