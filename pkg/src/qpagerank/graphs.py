"""Directed-graph model, edge-list I/O, and the benchmark graph generators.

Node ids are 0-based everywhere in the API; all text I/O (edge-list files,
reports) uses 1-based ids. Graphs are immutable once constructed and safe
to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ResourceLimitError

# Dense edge-space objects scale as n**2, so graph size is capped. Raise
# this knowingly; nothing below degrades silently.
MAX_NODES = 256


@dataclass(frozen=True)
class Digraph:
    """A directed graph: node count plus an out-edge list per node.

    ``out_edges[j]`` is an ordered tuple of distinct target ids. Self-loops
    are legal. Nodes with an empty out-list are dangling.
    """

    n: int
    out_edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"node count must be positive, got {self.n}")
        if self.n > MAX_NODES:
            raise ResourceLimitError(
                f"graph has {self.n} nodes, exceeding the cap of {MAX_NODES} "
                f"(qpagerank.graphs.MAX_NODES)"
            )
        out = tuple(tuple(targets) for targets in self.out_edges)
        if len(out) != self.n:
            raise ValueError(
                f"out_edges has {len(out)} entries for {self.n} nodes"
            )
        for j, targets in enumerate(out):
            if len(set(targets)) != len(targets):
                raise ValueError(f"duplicate edges in out-list of node {j}")
            for k in targets:
                if not 0 <= k < self.n:
                    raise ValueError(
                        f"edge {j}->{k} has target outside [0, {self.n})"
                    )
        object.__setattr__(self, "out_edges", out)

    @property
    def edge_count(self) -> int:
        return sum(len(t) for t in self.out_edges)

    def out_degree(self, j: int) -> int:
        return len(self.out_edges[j])

    def dangling_nodes(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if not self.out_edges[j])

    def canonicalized(self) -> "Digraph":
        """Copy with each out-list sorted ascending."""
        return Digraph(self.n, tuple(tuple(sorted(t)) for t in self.out_edges))


def parse_edge_list(text: str) -> Digraph:
    """Parse the edge-list format into a :class:`Digraph`.

    Format: the first directive line is ``nodes <N>``; every following
    line is ``<src> <dst>`` with 1-based ids. ``#`` starts a comment,
    blank lines are skipped. Duplicate edges are dropped keeping the
    first occurrence; nodes never mentioned stay as isolated (dangling)
    nodes.
    """
    n = None
    edges: list[list[int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "nodes":
                raise ParseError(
                    f"expected 'nodes <N>' directive, got {line!r}", line=lineno
                )
            try:
                n = int(fields[1])
            except ValueError:
                raise ParseError(
                    f"node count is not an integer: {fields[1]!r}", line=lineno
                ) from None
            if n <= 0:
                raise ParseError(f"node count must be positive, got {n}", line=lineno)
            edges = [[] for _ in range(n)]
            continue
        if len(fields) != 2:
            raise ParseError(
                f"expected '<src> <dst>', got {line!r}", line=lineno
            )
        try:
            src, dst = (int(f) for f in fields)
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", line=lineno) from None
        if not 1 <= src <= n or not 1 <= dst <= n:
            raise ParseError(
                f"edge {src} {dst} outside node range 1..{n}", line=lineno
            )
        if (src, dst) not in seen:
            seen.add((src, dst))
            edges[src - 1].append(dst - 1)
    if n is None:
        raise ParseError("missing 'nodes <N>' directive")
    return Digraph(n, tuple(tuple(t) for t in edges))


def serialize_edge_list(g: Digraph) -> str:
    """Inverse of :func:`parse_edge_list` (up to out-list ordering)."""
    lines = [f"nodes {g.n}"]
    for j, targets in enumerate(g.out_edges):
        for k in targets:
            lines.append(f"{j + 1} {k + 1}")
    return "\n".join(lines) + "\n"


def gen_cycle(n: int) -> Digraph:
    """Directed n-cycle: node i points to (i+1) mod n. Needs n >= 2."""
    if n < 2:
        raise ValueError(f"cycle needs at least 2 nodes, got {n}")
    return Digraph(n, tuple(((i + 1) % n,) for i in range(n)))


def gen_reducible_example() -> Digraph:
    """The 4-node graph whose patched matrix is reducible.

    Nodes 3 and 4 (1-based) form a closed 2-cycle that drains all
    importance from nodes 1 and 2 under power iteration.
    """
    return Digraph(4, ((1, 2, 3), (0, 3), (3,), (2,)))


def gen_binary_tree_up(levels: int) -> Digraph:
    """Complete binary tree with 2**levels - 1 nodes, edges child -> parent.

    Node 0 is the root and has no out-edges (dangling until patched).
    The upward orientation is deliberate: it is the one that makes the
    root the top-ranked page, modelling an intranet whose internal pages
    all link back to the home page.
    """
    if levels < 1:
        raise ValueError(f"tree needs at least 1 level, got {levels}")
    n = 2 ** levels - 1
    out = [()] + [((i - 1) // 2,) for i in range(1, n)]
    return Digraph(n, tuple(out))


def gen_dangling_pair() -> Digraph:
    """Two nodes, single edge 1 -> 2; node 2 is dangling."""
    return Digraph(2, ((1,), ()))


def gen_random(n: int, p: float, seed=None) -> Digraph:
    """Erdos-Renyi style digraph: each ordered pair i != j is an edge
    with probability ``p``. Deterministic for a fixed ``seed``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    return Digraph(n, tuple(tuple(np.flatnonzero(row).tolist()) for row in mask))


def strongly_connected(g: Digraph) -> bool:
    """True iff every node reaches every other along directed paths."""
    if g.n == 1:
        return True
    rev: list[list[int]] = [[] for _ in range(g.n)]
    for j, targets in enumerate(g.out_edges):
        for k in targets:
            rev[k].append(j)

    def reaches_all(adjacency) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            for k in adjacency[stack.pop()]:
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
        return len(seen) == g.n

    return reaches_all(g.out_edges) and reaches_all(rev)


def node_labels(g: Digraph, overrides: dict[int, str] | None = None) -> dict[int, str]:
    """Display labels per node, defaulting to 1-based integers."""
    labels = {i: str(i + 1) for i in range(g.n)}
    if overrides:
        for i, label in overrides.items():
            if not 0 <= i < g.n:
                raise ValueError(f"label key {i} outside [0, {g.n})")
            labels[i] = label
        if len(set(labels.values())) != g.n:
            raise ValueError("node labels must be unique")
    return labels
