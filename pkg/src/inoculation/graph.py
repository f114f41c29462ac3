"""Undirected simple graphs, the generators used in the experiments, and attack components."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Malformed edge-list input."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1`` with sorted adjacency tuples."""

    node_count: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.node_count < 1 or len(self.adjacency) != self.node_count:
            raise ValueError("adjacency must have one entry per node")
        for u, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ValueError(f"node {u}: neighbours must be sorted and distinct")
            for v in nbrs:
                if v == u:
                    raise ValueError(f"self-loop at node {u}")
                if not 0 <= v < self.node_count:
                    raise ValueError(f"node {u}: neighbour {v} out of range")
                if u not in self.adjacency[v]:
                    raise ValueError(f"edge {{{u},{v}}} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges) -> Graph:
        nbrs = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def n(self) -> int:
        return self.node_count

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` int64 arrays for the kernels."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in self.adjacency])
        indices = np.fromiter((v for a in self.adjacency for v in a), dtype=np.int64,
                              count=int(indptr[-1]))
        return indptr, indices

    def is_cycle(self) -> bool:
        if self.node_count < 3 or any(len(a) != 2 for a in self.adjacency):
            return False
        return len(_bfs_order(self, 0)) == self.node_count

    def is_connected(self) -> bool:
        return len(_bfs_order(self, 0)) == self.node_count


def _bfs_order(g: Graph, s: int) -> list[int]:
    seen = {s}
    order = [s]
    for u in order:
        for v in g.adjacency[u]:
            if v not in seen:
                seen.add(v)
                order.append(v)
    return order


def make_complete(n: int) -> Graph:
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    return Graph(n, tuple(tuple(v for v in range(n) if v != u) for u in range(n)))


def make_star(n: int) -> Graph:
    """Star with center 0 and leaves ``1..n-1``."""
    if n < 2:
        raise ValueError("star needs n >= 2")
    return Graph.from_edges(n, [(0, v) for v in range(1, n)])


def make_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def make_path(n: int) -> Graph:
    if n < 2:
        raise ValueError("path needs n >= 2")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


# ---------------------------------------------------------------------------
# Kleinberg small world on a torus

@dataclass(frozen=True)
class KleinbergParams:
    side: int = 10
    long_range_per_node: int = 1
    clustering_exponent: float = 2.0
    seed: int = 0
    max_attempts: int = field(default=100, compare=False)

    def __post_init__(self):
        if self.side < 2:
            raise ValueError("side must be >= 2")
        if self.long_range_per_node < 1:
            raise ValueError("long_range_per_node must be >= 1")
        if self.clustering_exponent < 0:
            raise ValueError("clustering exponent must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def torus_distance(side: int, u: int, v: int) -> int:
    ux, uy = divmod(u, side)
    vx, vy = divmod(v, side)
    dx = abs(ux - vx)
    dy = abs(uy - vy)
    return min(dx, side - dx) + min(dy, side - dy)


def long_range_offsets(side: int, alpha: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Candidate offsets ``(dx, dy)`` with torus distance >= 2 and their probabilities.

    Returns ``(offsets, distances, probs)``; the distribution is the same for
    every node by translation invariance.
    """
    offsets = []
    dists = []
    for dx in range(side):
        for dy in range(side):
            d = min(dx, side - dx) + min(dy, side - dy)
            if d >= 2:
                offsets.append((dx, dy))
                dists.append(d)
    dists = np.asarray(dists, dtype=np.int64)
    if len(dists) == 0:
        return np.zeros((0, 2), dtype=np.int64), dists, np.zeros(0)
    w = dists.astype(float) ** (-float(alpha))
    return np.asarray(offsets, dtype=np.int64), dists, w / w.sum()


def sample_long_range_distances(side: int, alpha: float, size: int, seed: int) -> np.ndarray:
    """Draw ``size`` long-range contact distances from the generator's sampler."""
    _, dists, probs = long_range_offsets(side, alpha)
    cdf = _cdf(probs)
    rng = np.random.default_rng(seed)
    k = np.searchsorted(cdf, rng.random(size), side="right")
    return dists[np.minimum(k, len(dists) - 1)]


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return cdf


@dataclass
class KleinbergStats:
    skipped_draws: int = 0


def make_kleinberg(params: KleinbergParams, stats: KleinbergStats | None = None) -> Graph:
    side = params.side
    n = side * side
    nbrs = [set() for _ in range(n)]
    for u in range(n):
        x, y = divmod(u, side)
        for v in (((x + 1) % side) * side + y, x * side + (y + 1) % side):
            if v != u:
                nbrs[u].add(v)
                nbrs[v].add(u)

    offsets, _, probs = long_range_offsets(side, params.clustering_exponent)
    rng = np.random.default_rng(params.seed)
    skipped = 0
    if len(offsets):
        cdf = _cdf(probs)
        for u in range(n):
            x, y = divmod(u, side)
            for _ in range(params.long_range_per_node):
                for _attempt in range(params.max_attempts):
                    k = int(np.searchsorted(cdf, rng.random(), side="right"))
                    dx, dy = offsets[min(k, len(offsets) - 1)]
                    v = int(((x + dx) % side) * side + (y + dy) % side)
                    if v != u and v not in nbrs[u]:
                        nbrs[u].add(v)
                        nbrs[v].add(u)
                        break
                else:
                    skipped += 1
    else:
        skipped = n * params.long_range_per_node
    if skipped:
        log.debug("kleinberg side=%d: %d long-range draws skipped", side, skipped)
    if stats is not None:
        stats.skipped_draws += skipped
    return Graph(n, tuple(tuple(sorted(s)) for s in nbrs))


def make_random(n: int, p: float, seed: int, connected: bool = True) -> Graph:
    """Erdos-Renyi G(n, p); with ``connected`` resample until connected."""
    rng = np.random.default_rng(seed)
    while True:
        upper = np.triu(rng.random((n, n)) < p, k=1)
        us, vs = np.nonzero(upper)
        g = Graph.from_edges(n, zip(us.tolist(), vs.tolist()))
        if not connected or g.is_connected():
            return g


# ---------------------------------------------------------------------------
# Attack components

@dataclass(frozen=True)
class ComponentView:
    """Connected components of the subgraph induced by insecure players.

    ``component_id[i]`` is ``None`` for secure players.
    """

    component_id: tuple[int | None, ...]
    component_size: tuple[int, ...]

    def size_of(self, i: int) -> int:
        c = self.component_id[i]
        if c is None:
            raise ValueError(f"node {i} is secure")
        return self.component_size[c]

    def members(self, c: int) -> list[int]:
        return [i for i, ci in enumerate(self.component_id) if ci == c]


def _bits(profile) -> tuple[bool, ...]:
    return tuple(getattr(profile, "bits", profile))


def attack_components(g: Graph, profile) -> ComponentView:
    bits = _bits(profile)
    if len(bits) != g.node_count:
        raise ValueError("profile length does not match graph")
    comp: list[int | None] = [None] * g.node_count
    sizes = []
    for s in range(g.node_count):
        if bits[s] or comp[s] is not None:
            continue
        c = len(sizes)
        comp[s] = c
        stack = [s]
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for v in g.adjacency[u]:
                if not bits[v] and comp[v] is None:
                    comp[v] = c
                    stack.append(v)
        sizes.append(size)
    return ComponentView(tuple(comp), tuple(sizes))


def hypothetical_component_size(g: Graph, profile, i: int, view: ComponentView | None = None) -> int:
    """Size of the attack component ``i`` would sit in if it were insecure.

    For an insecure node this is simply its current component size.
    """
    view = view or attack_components(g, profile)
    if view.component_id[i] is not None:
        return view.component_size[view.component_id[i]]
    touching = {view.component_id[j] for j in g.adjacency[i]} - {None}
    return 1 + sum(view.component_size[c] for c in touching)


# ---------------------------------------------------------------------------
# Edge-list text format

def dumps_edgelist(g: Graph) -> str:
    lines = [f"n {g.node_count}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def loads_edgelist(text: str) -> Graph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GraphFormatError("line 1: empty input, expected 'n <count>'")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n" or not head[1].isdigit() or int(head[1]) < 1:
        raise GraphFormatError(f"line 1: expected 'n <count>', got {lines[0]!r}")
    n = int(head[1])
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at node {u}")
        if u > v:
            raise GraphFormatError(f"line {lineno}: edge must be written with u < v")
        if v >= n:
            raise GraphFormatError(f"line {lineno}: node {v} out of range for n={n}")
        if (u, v) in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add((u, v))
    return Graph.from_edges(n, seen)


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_text(dumps_edgelist(g), encoding="ascii", newline="\n")


def read_edgelist(path) -> Graph:
    try:
        text = Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise GraphFormatError(f"{path}: not ASCII") from exc
    try:
        return loads_edgelist(text)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from None
