"""Time-sliced dynamic network model, parsers and serializers.

A dynamic network is a fixed node universe observed through an ordered
series of time slices, each slice being an undirected simple graph over
that universe. Node labels are interned to dense 0-based ids on load;
every other module works with ids only and looks labels up on output.

Two plain-text formats are supported:

* temporal edge list, one ``<src> <dst> <timestamp>`` event per line,
  ``#`` comments allowed;
* pre-sliced edge list, one ``<slice> <src> <dst>`` edge per line.

Serialization emits the pre-sliced format sorted by slice then by the
two endpoint labels, which makes a serialize/load round trip bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import ContractError, ParseError


class ParsedEdges(NamedTuple):
    """Temporal edge events plus the number of self-loop rows dropped."""

    events: list[tuple[str, str, int]]
    self_loops_dropped: int


@dataclass(frozen=True)
class SliceConfig:
    """Windowing parameters mapping raw timestamps to slice indices.

    Slice ``t`` covers the half-open window
    ``[origin + t*(length-overlap), origin + t*(length-overlap) + length)``.
    ``count`` optionally caps the number of slices; events falling after
    the last window are dropped.
    """

    length: int
    overlap: int = 0
    origin: int = 0
    count: int | None = None

    def __post_init__(self):
        if self.length <= 0:
            raise ContractError("slice length must be positive")
        if not 0 <= self.overlap < self.length:
            raise ContractError(
                f"overlap must lie in [0, length); got overlap={self.overlap}, length={self.length}"
            )
        if self.count is not None and self.count < 1:
            raise ContractError("slice count cap must be >= 1")

    @property
    def stride(self) -> int:
        return self.length - self.overlap

    def window(self, t: int) -> tuple[int, int]:
        start = self.origin + t * self.stride
        return start, start + self.length

    def slices_containing(self, timestamp: int) -> range:
        """All slice indices whose window contains ``timestamp`` (closed form)."""
        rel = timestamp - self.origin
        if rel < 0:
            return range(0)
        hi = rel // self.stride
        lo = max(0, (rel - self.length) // self.stride + 1)
        return range(lo, hi + 1)


@dataclass(frozen=True)
class TimeSlice:
    """One static snapshot: adjacency sets indexed by node id."""

    index: int
    adj: tuple[frozenset[int], ...]

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj) // 2

    def edges(self):
        """Yield edges as (u, v) id pairs with u < v, ascending."""
        for u, nbrs in enumerate(self.adj):
            for v in sorted(nbrs):
                if u < v:
                    yield u, v


@dataclass(frozen=True)
class DynamicNetwork:
    """Fixed node universe plus chronologically ordered time slices.

    Immutable after construction and safe to share across workers.
    """

    labels: tuple[str, ...]
    slices: tuple[TimeSlice, ...]
    index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            object.__setattr__(self, "index", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def theta(self) -> int:
        return len(self.slices)

    def neighborhood(self, v: int, t: int) -> frozenset[int]:
        """First-order neighborhood of node ``v`` at slice ``t`` (``v`` excluded)."""
        if not 0 <= t < self.theta:
            raise IndexError(f"slice index {t} out of range [0, {self.theta})")
        if not 0 <= v < self.n:
            raise IndexError(f"node id {v} out of range [0, {self.n})")
        return self.slices[t].adj[v]

    def id_of(self, label: str) -> int:
        return self.index[label]

    @classmethod
    def from_slices(cls, edges_per_slice, n: int | None = None, labels=None) -> "DynamicNetwork":
        """Build a network from per-slice iterables of integer (u, v) pairs.

        Self-loops and duplicates are dropped. ``n`` defaults to one past
        the largest endpoint; ``labels`` default to the decimal ids.
        """
        edge_lists = [list(es) for es in edges_per_slice]
        if n is None:
            n = 1 + max((max(u, v) for es in edge_lists for u, v in es), default=-1)
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(labels)
            if len(labels) != n:
                raise ContractError("labels length must equal node count")
        slices = []
        for t, es in enumerate(edge_lists):
            adj = [set() for _ in range(n)]
            for u, v in es:
                if u == v:
                    continue
                if not (0 <= u < n and 0 <= v < n):
                    raise ContractError(f"edge ({u},{v}) outside node range [0, {n})")
                adj[u].add(v)
                adj[v].add(u)
            slices.append(TimeSlice(index=t, adj=tuple(frozenset(s) for s in adj)))
        return cls(labels=labels, slices=tuple(slices))


def _read_text(stream) -> str:
    return stream.read() if hasattr(stream, "read") else stream


def parse_temporal_edges(stream) -> ParsedEdges:
    """Parse a temporal edge list into (source, target, timestamp) events.

    Lines starting with ``#`` and blank lines are skipped. Each data line
    needs at least three whitespace-separated fields; extra fields are
    ignored. Self-loop rows are dropped and counted.
    """
    events: list[tuple[str, str, int]] = []
    dropped = 0
    for lineno, raw in enumerate(_read_text(stream).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ParseError(f"expected 'src dst timestamp', got {raw!r}", line=lineno)
        u, v, ts = parts[0], parts[1], parts[2]
        try:
            t = int(ts)
        except ValueError:
            raise ParseError(f"timestamp is not an integer: {ts!r}", line=lineno) from None
        if u == v:
            dropped += 1
            continue
        events.append((u, v, t))
    return ParsedEdges(events, dropped)


def serialize_temporal_edges(events: Iterable[tuple[str, str, int]]) -> str:
    """Inverse of :func:`parse_temporal_edges`, preserving event order."""
    return "".join(f"{u} {v} {t}\n" for u, v, t in events)


def build_slices(events, cfg: SliceConfig) -> DynamicNetwork:
    """Aggregate temporal edge events into a dynamic network.

    An event at time ``t`` lands in every slice whose window contains
    ``t`` (several, when windows overlap). The node universe is the set
    of all endpoints in ``events``, interned in first-seen order.
    """
    events = list(events)
    if not events:
        raise ContractError("no edge events given")
    index: dict[str, int] = {}
    for u, v, _ in events:
        for lab in (u, v):
            if lab not in index:
                index[lab] = len(index)
    n = len(index)

    in_range = [ts for _, _, ts in events if ts >= cfg.origin]
    if not in_range:
        raise ContractError("empty network: every timestamp precedes the window origin")
    theta = max(cfg.slices_containing(ts)[-1] for ts in in_range) + 1
    if cfg.count is not None:
        theta = min(theta, cfg.count)

    adj = [[set() for _ in range(n)] for _ in range(theta)]
    for u, v, ts in events:
        ui, vi = index[u], index[v]
        for t in cfg.slices_containing(ts):
            if t >= theta:
                break
            adj[t][ui].add(vi)
            adj[t][vi].add(ui)
    labels = tuple(sorted(index, key=index.get))
    slices = tuple(
        TimeSlice(index=t, adj=tuple(frozenset(s) for s in adj[t])) for t in range(theta)
    )
    return DynamicNetwork(labels=labels, slices=slices)


def load_presliced(stream) -> DynamicNetwork:
    """Load a pre-sliced edge list (``<slice> <src> <dst>`` per line).

    Slice indices are shifted so the smallest becomes 0 and must then be
    contiguous; a gap is a load error naming the missing index. Labels
    are interned in first-seen order. Duplicate edges are deduplicated
    and self-loop lines dropped (undirected simple graphs only).
    """
    rows: list[tuple[int, str, str]] = []
    index: dict[str, int] = {}
    for lineno, raw in enumerate(_read_text(stream).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ParseError(f"expected 'slice src dst', got {raw!r}", line=lineno)
        try:
            t = int(parts[0])
        except ValueError:
            raise ParseError(f"slice index is not an integer: {parts[0]!r}", line=lineno) from None
        if t < 0:
            raise ParseError(f"negative slice index {t}", line=lineno)
        u, v = parts[1], parts[2]
        rows.append((t, u, v))
        for lab in (u, v):
            if lab not in index:
                index[lab] = len(index)
    if not rows:
        raise ParseError("no edges in pre-sliced input")

    lo = min(t for t, _, _ in rows)
    seen = {t - lo for t, _, _ in rows}
    theta = max(seen) + 1
    for t in range(theta):
        if t not in seen:
            raise ParseError(f"pre-sliced input is missing slice {t + lo}")

    n = len(index)
    adj = [[set() for _ in range(n)] for _ in range(theta)]
    for t, u, v in rows:
        if u == v:
            continue
        ui, vi = index[u], index[v]
        adj[t - lo][ui].add(vi)
        adj[t - lo][vi].add(ui)
    labels = tuple(sorted(index, key=index.get))
    slices = tuple(
        TimeSlice(index=t, adj=tuple(frozenset(s) for s in adj[t])) for t in range(theta)
    )
    return DynamicNetwork(labels=labels, slices=slices)


def serialize_presliced(net: DynamicNetwork) -> str:
    """Canonical pre-sliced text: rows sorted by slice, then by endpoint labels.

    Sorting on labels (not ids) makes the output independent of interning
    order, so ``load_presliced(serialize_presliced(net))`` round-trips
    bit-exactly. Nodes without any edge are not representable in this
    format and are dropped from the universe on reload.
    """
    out = []
    for sl in net.slices:
        lines = []
        for u, v in sl.edges():
            a, b = net.labels[u], net.labels[v]
            if b < a:
                a, b = b, a
            lines.append((a, b))
        for a, b in sorted(lines):
            out.append(f"{sl.index} {a} {b}\n")
    return "".join(out)
