"""Sequential pattern mining over node event sequences.

Two mining modes are provided. ``mine_closed`` returns the closed
frequent sequences: patterns whose support rate clears a threshold and
that have no super-sequence of equal support. ``mine_topk_longest``
returns the k most supported patterns of at least a given length,
which surfaces long behavioral trends.

Both use depth-first prefix growth: a pattern grows either by opening a
new itemset (sequence extension, any of the six kinds) or by adding a
kind above the largest one already in the last itemset (itemset
extension). That generation order produces each pattern exactly once.
Support lists shrink monotonically along a branch, so branches below
the frequency floor (or below the current k-th best support) are cut.

``brute_force_patterns`` / ``brute_force_topk`` recompute both modes by
exhaustive enumeration of every distinct subsequence in the database.
They are deliberately independent of the prefix-growth machinery and
act as reference semantics; a size guard keeps them at toy scale.
"""

from __future__ import annotations

import bisect
import json
import math
from collections import Counter
from dataclasses import dataclass, replace

from .ego_events import EventKind
from .errors import ContractError
from .sequence_db import SequenceDatabase, growth_rate

_N_KINDS = 6


@dataclass(frozen=True)
class SequentialPattern:
    """An ordered list of itemsets with its support at emission time."""

    itemsets: tuple[frozenset[EventKind], ...]
    support_count: int
    support_rate: float
    growth: float | None = None

    @property
    def length(self) -> int:
        return len(self.itemsets)

    def __str__(self) -> str:
        return format_pattern(self.itemsets)


@dataclass(frozen=True)
class MiningConfig:
    """One mining invocation: exactly one of the two modes is active."""

    mode: str  # "closed" | "topk"
    min_sup: float = 0.5
    k: int = 10
    min_length: int = 2
    scan_step: float = 0.1

    def __post_init__(self):
        if self.mode not in ("closed", "topk"):
            raise ContractError(f"unknown mining mode {self.mode!r}")
        if not 0.0 < self.min_sup <= 1.0:
            raise ContractError("min_sup must lie in (0, 1]")
        if self.k < 1 or self.min_length < 1:
            raise ContractError("k and min_length must be positive")
        if not 0.0 < self.scan_step < 1.0:
            raise ContractError("scan_step must lie in (0, 1)")


def format_pattern(itemsets) -> str:
    """Canonical text form, e.g. ``(B,D)(E)``; kinds in B,D,M,S,E,C order."""
    return "".join("(" + ",".join(k.letter for k in sorted(h)) + ")" for h in itemsets)


# -- bitmask plumbing ---------------------------------------------------------

def _mask(itemset) -> int:
    m = 0
    for k in itemset:
        m |= 1 << int(k)
    return m


def _unmask(mask: int) -> frozenset[EventKind]:
    return frozenset(EventKind(i) for i in range(_N_KINDS) if mask & (1 << i))


def _canon(pattern: tuple[int, ...]):
    """Sort key implementing the canonical (lexicographic) pattern order."""
    return tuple(tuple(i for i in range(_N_KINDS) if m & (1 << i)) for m in pattern)


def _contains(seq: tuple[int, ...], pattern: tuple[int, ...]) -> bool:
    pos = 0
    n = len(seq)
    for m in pattern:
        while pos < n and (seq[pos] & m) != m:
            pos += 1
        if pos == n:
            return False
        pos += 1
    return True


def _mask_db(db: SequenceDatabase) -> list[tuple[int, ...]]:
    """Non-empty node sequences as mask tuples (order irrelevant to support)."""
    seqs = []
    for v in sorted(db.sequences):
        entries = db.sequences[v].entries
        if entries:
            seqs.append(tuple(_mask(h) for _, h in entries))
    return seqs


def _min_count(min_sup: float, n: int) -> int:
    if not 0.0 < min_sup <= 1.0:
        raise ContractError("min_sup must lie in (0, 1]")
    return max(1, math.ceil(min_sup * n - 1e-9))


def _to_patterns(items, n_total: int) -> list[SequentialPattern]:
    return [
        SequentialPattern(itemsets=tuple(_unmask(m) for m in pat), support_count=c,
                          support_rate=c / n_total)
        for pat, c in items
    ]


# The number of frequent sequences is exponential in the worst case
# (many long, nearly identical sequences at a low threshold), so the
# searches below carry a budget and fail loudly instead of hanging.
DEFAULT_SEARCH_BUDGET = 1_000_000


# -- prefix growth ------------------------------------------------------------

def _frequent(seqs, min_count: int, budget: int | None) -> dict[tuple[int, ...], int]:
    """Every pattern with support >= min_count, by canonical prefix growth."""
    freq: dict[tuple[int, ...], int] = {}

    def grow(pattern, holders):
        if budget is not None and len(freq) >= budget:
            raise ContractError(
                f"pattern search exceeded {budget} frequent sequences; "
                "raise min_sup or pass a larger search budget"
            )
        freq[pattern] = len(holders)
        last = pattern[-1]
        for item in range(last.bit_length(), _N_KINDS):  # itemset extensions
            cand = pattern[:-1] + (last | (1 << item),)
            sub = [i for i in holders if _contains(seqs[i], cand)]
            if len(sub) >= min_count:
                grow(cand, sub)
        for item in range(_N_KINDS):  # sequence extensions
            cand = pattern + (1 << item,)
            sub = [i for i in holders if _contains(seqs[i], cand)]
            if len(sub) >= min_count:
                grow(cand, sub)

    everyone = list(range(len(seqs)))
    for item in range(_N_KINDS):
        pattern = ((1 << item),)
        holders = [i for i in everyone if _contains(seqs[i], pattern)]
        if len(holders) >= min_count:
            grow(pattern, holders)
    return freq


def _single_supersets(pattern: tuple[int, ...]):
    """All patterns obtained by adding exactly one item to ``pattern``."""
    out = set()
    for pos, m in enumerate(pattern):
        for item in range(_N_KINDS):
            bit = 1 << item
            if not m & bit:
                out.add(pattern[:pos] + (m | bit,) + pattern[pos + 1:])
    for gap in range(len(pattern) + 1):
        for item in range(_N_KINDS):
            out.add(pattern[:gap] + ((1 << item),) + pattern[gap:])
    return out


def _closed_only(freq: dict[tuple[int, ...], int]) -> list[tuple[tuple[int, ...], int]]:
    # A pattern with an equal-support proper super-sequence also has an
    # equal-support single-item extension (support is anti-monotone along
    # any extension chain), so checking one-item supersets suffices.
    out = []
    for pat, c in freq.items():
        if not any(freq.get(q) == c for q in _single_supersets(pat)):
            out.append((pat, c))
    return out


def mine_closed(db: SequenceDatabase, min_sup: float,
                budget: int | None = DEFAULT_SEARCH_BUDGET) -> list[SequentialPattern]:
    """Closed frequent sequential patterns at support rate >= ``min_sup``.

    Output is ordered by descending support, then ascending length, then
    canonical pattern order. ``budget`` caps the number of frequent
    sequences the search may enumerate (the space is exponential for
    homogeneous databases at low thresholds); pass ``None`` to disable.
    """
    n = db.n_total
    min_count = _min_count(min_sup, n)
    freq = _frequent(_mask_db(db), min_count, budget)
    closed = _closed_only(freq)
    closed.sort(key=lambda pc: (-pc[1], len(pc[0]), _canon(pc[0])))
    return _to_patterns(closed, n)


def mine_topk_longest(db: SequenceDatabase, k: int, min_length: int,
                      budget: int | None = DEFAULT_SEARCH_BUDGET) -> list[SequentialPattern]:
    """The ``k`` most supported patterns of length >= ``min_length``.

    Ties on support prefer the longer pattern, then canonical order.
    Fewer than ``k`` patterns are returned when the database is
    exhausted. The search prunes branches whose support falls strictly
    below the current k-th best, which is exact because extensions never
    gain support; ``budget`` caps the number of visited patterns as in
    :func:`mine_closed`.
    """
    if k < 1:
        raise ContractError("k must be >= 1")
    if min_length < 1:
        raise ContractError("min_length must be >= 1")
    seqs = _mask_db(db)
    best: list[tuple] = []  # (-count, -length, canon, pattern) ascending = best first
    visited = 0

    def floor() -> int:
        return -best[-1][0] if len(best) == k else 1

    def offer(pattern, count):
        if len(pattern) < min_length:
            return
        entry = (-count, -len(pattern), _canon(pattern), pattern)
        if len(best) == k and entry >= best[-1]:
            return
        bisect.insort(best, entry)
        if len(best) > k:
            best.pop()

    def grow(pattern, holders):
        nonlocal visited
        visited += 1
        if budget is not None and visited > budget:
            raise ContractError(
                f"pattern search exceeded {budget} visited sequences; "
                "tighten min_length/k or pass a larger search budget"
            )
        offer(pattern, len(holders))
        exts = []
        last = pattern[-1]
        for item in range(last.bit_length(), _N_KINDS):
            cand = pattern[:-1] + (last | (1 << item),)
            sub = [i for i in holders if _contains(seqs[i], cand)]
            if sub:
                exts.append((cand, sub))
        for item in range(_N_KINDS):
            cand = pattern + (1 << item,)
            sub = [i for i in holders if _contains(seqs[i], cand)]
            if sub:
                exts.append((cand, sub))
        # visiting high-support extensions first raises the floor sooner
        exts.sort(key=lambda e: (-len(e[1]), _canon(e[0])))
        for cand, sub in exts:
            if len(sub) >= floor():
                grow(cand, sub)

    everyone = list(range(len(seqs)))
    roots = []
    for item in range(_N_KINDS):
        pattern = ((1 << item),)
        holders = [i for i in everyone if _contains(seqs[i], pattern)]
        if holders:
            roots.append((pattern, holders))
    roots.sort(key=lambda e: (-len(e[1]), _canon(e[0])))
    for pattern, holders in roots:
        if len(holders) >= floor():
            grow(pattern, holders)

    return _to_patterns([(e[3], -e[0]) for e in best], db.n_total)


def min_sup_scan(db: SequenceDatabase, scan_step: float = 0.1,
                 budget: int | None = DEFAULT_SEARCH_BUDGET):
    """Run ``mine_closed`` at decreasing thresholds until patterns appear.

    Thresholds start at 1.0 and decrease by ``scan_step``; the scan stops
    at the first non-empty result, or at the 0.1 floor. Every attempted
    (threshold, result) pair is returned, the last one carrying the
    non-empty set when one was found.
    """
    if not 0.0 < scan_step < 1.0:
        raise ContractError("scan_step must lie in (0, 1)")
    results = []
    i = 0
    while True:
        threshold = round(1.0 - i * scan_step, 12)
        if threshold < 0.1 - 1e-9:
            break
        patterns = mine_closed(db, threshold, budget=budget)
        results.append((threshold, patterns))
        if patterns:
            break
        i += 1
    return results


def attach_growth_rates(patterns, full_db: SequenceDatabase, cluster) -> list[SequentialPattern]:
    """Annotate cluster-mined patterns with their growth rates.

    ``full_db`` must be the whole-network database; ``cluster`` the node
    set the patterns were mined in.
    """
    out = []
    for p in patterns:
        out.append(replace(p, growth=growth_rate(full_db, p.itemsets, cluster)))
    return out


# -- exhaustive reference -----------------------------------------------------

_GUARD_NODES = 12
_GUARD_ENTRIES = 8
_GUARD_COMBOS = 1 << 20


def _submasks(mask: int):
    # non-empty submasks, standard descending enumeration
    s = mask
    while s:
        yield s
        s = (s - 1) & mask


def _node_subsequences(seq: tuple[int, ...]) -> set[tuple[int, ...]]:
    """Every distinct non-empty subsequence of one mask sequence."""
    suffixes: set[tuple[int, ...]] = {()}
    for mask in reversed(seq):
        grown = set(suffixes)
        for sub in _submasks(mask):
            for rest in suffixes:
                grown.add((sub,) + rest)
        suffixes = grown
    suffixes.discard(())
    return suffixes


def _enumerate_support(db: SequenceDatabase) -> Counter:
    """Support counts of every subsequence occurring in the database.

    Guarded: refuses databases beyond toy scale, since the enumeration
    is exponential in itemset sizes.
    """
    seqs = _mask_db(db)
    if len(seqs) > _GUARD_NODES:
        raise ContractError(
            f"brute-force oracle limited to {_GUARD_NODES} non-empty sequences (got {len(seqs)})"
        )
    counts: Counter = Counter()
    for seq in seqs:
        if len(seq) > _GUARD_ENTRIES:
            raise ContractError(
                f"brute-force oracle limited to {_GUARD_ENTRIES} itemsets per sequence (got {len(seq)})"
            )
        combos = 1
        for m in seq:
            combos *= 1 << bin(m).count("1")
        if combos > _GUARD_COMBOS:
            raise ContractError(
                f"brute-force oracle limited to {_GUARD_COMBOS} subsequence combinations per node"
            )
        counts.update(_node_subsequences(seq))
    return counts


def brute_force_patterns(db: SequenceDatabase, min_sup: float) -> list[SequentialPattern]:
    """Reference semantics for :func:`mine_closed` by exhaustive enumeration."""
    n = db.n_total
    min_count = _min_count(min_sup, n)
    counts = _enumerate_support(db)
    freq = {pat: c for pat, c in counts.items() if c >= min_count}
    closed = []
    for pat, c in freq.items():
        if not any(counts.get(q) == c for q in _single_supersets(pat)):
            closed.append((pat, c))
    closed.sort(key=lambda pc: (-pc[1], len(pc[0]), _canon(pc[0])))
    return _to_patterns(closed, n)


def brute_force_topk(db: SequenceDatabase, k: int, min_length: int) -> list[SequentialPattern]:
    """Reference semantics for :func:`mine_topk_longest` by exhaustive enumeration."""
    if k < 1 or min_length < 1:
        raise ContractError("k and min_length must be positive")
    counts = _enumerate_support(db)
    ranked = sorted(
        ((pat, c) for pat, c in counts.items() if len(pat) >= min_length),
        key=lambda pc: (-pc[1], -len(pc[0]), _canon(pc[0])),
    )
    return _to_patterns(ranked[:k], db.n_total)


def write_patterns_json(patterns, f) -> None:
    """JSON export; growth_rate is null unless cluster-scoped, "inf" when infinite."""
    rows = []
    for p in patterns:
        growth = p.growth
        if growth is not None and math.isinf(growth):
            growth = "inf"
        rows.append({
            "pattern": format_pattern(p.itemsets),
            "count": p.support_count,
            "rate": p.support_rate,
            "growth_rate": growth,
        })
    json.dump(rows, f, indent=2)
    f.write("\n")
