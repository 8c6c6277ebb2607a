"""Construction, validation and export of the stacked Double-Riffle-Graph.

A block has ``2g + 1`` rows of ``N = 2**g`` nodes.  Every row is a chain
(``v[r][i-1] -> v[r][i]``), consecutive rows are joined by a wrap edge
(``v[r][N-1] -> v[r+1][0]``), and the ``2g`` layers between rows carry the
riffle edges.  Upper layer ``l < g`` sends column ``s`` to ``pi(s)`` and
``pibar(s)`` for traced word ``l``; lower layer ``g + m`` is the edge-reversed
copy of upper layer ``g - 1 - m``.  ``lam`` blocks are stacked by sharing the
last row of one block with the first row of the next.

Node ids are ``(row, col)`` tuples; rows run over ``0 .. 2*lam*g``.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

from .errors import UsageError
from .permute import BitWord, Permutation, riffle_permutation
from .trajectory import binary_representation, trace_trajectories

NodeId = tuple[int, int]

_NONE = -1


class RiffleGraph:
    """Immutable stacked Double-Riffle-Graph.

    ``layers[l]`` holds, for each target column of layer ``l``, up to two
    source columns in the previous row (``lo <= hi``; ``-1`` marks a missing
    edge).  The layers are shared by every stacked block.
    """

    __slots__ = ("g", "lam", "words", "_lo", "_hi")

    def __init__(self, g: int, lam: int, words: Sequence[BitWord],
                 layers: Sequence[Sequence[Sequence[int]]]):
        if g < 1 or lam < 1:
            raise UsageError(f"need g >= 1 and lambda >= 1, got g={g}, lambda={lam}")
        n = 1 << g
        if len(layers) != 2 * g:
            raise UsageError(f"expected {2 * g} layers, got {len(layers)}")
        self.g = g
        self.lam = lam
        self.words = tuple(words)
        lo_all, hi_all = [], []
        for layer in layers:
            if len(layer) != n:
                raise UsageError(f"layer has {len(layer)} targets, expected {n}")
            lo, hi = array("i", [_NONE]) * n, array("i", [_NONE]) * n
            for t, srcs in enumerate(layer):
                srcs = sorted(set(srcs))
                if len(srcs) > 2 or any(not 0 <= s < n for s in srcs):
                    raise UsageError(f"bad sources {srcs} for target {t}")
                if srcs:
                    lo[t] = srcs[0]
                if len(srcs) == 2:
                    hi[t] = srcs[1]
            lo_all.append(lo)
            hi_all.append(hi)
        self._lo = tuple(lo_all)
        self._hi = tuple(hi_all)

    @classmethod
    def _from_arrays(cls, g: int, lam: int, words: Sequence[BitWord],
                     lo: Sequence[array], hi: Sequence[array]) -> RiffleGraph:
        graph = cls.__new__(cls)
        graph.g, graph.lam, graph.words = g, lam, tuple(words)
        graph._lo, graph._hi = tuple(lo), tuple(hi)
        return graph

    # -- shape ---------------------------------------------------------------

    @property
    def width(self) -> int:
        return 1 << self.g

    @property
    def rows(self) -> int:
        return 2 * self.lam * self.g + 1

    @property
    def node_count(self) -> int:
        return self.width * self.rows

    @property
    def sink(self) -> NodeId:
        return (self.rows - 1, self.width - 1)

    def nodes(self) -> Iterator[NodeId]:
        """All nodes in (row, col) order, which is a topological order."""
        n = self.width
        for r in range(self.rows):
            for c in range(n):
                yield (r, c)

    def index(self, node: NodeId) -> int:
        r, c = node
        return r * self.width + c

    def __contains__(self, node: object) -> bool:
        try:
            r, c = node  # type: ignore[misc]
        except (TypeError, ValueError):
            return False
        return isinstance(r, int) and isinstance(c, int) and 0 <= r < self.rows and 0 <= c < self.width

    # -- edges ---------------------------------------------------------------

    def layer_of_row(self, row: int) -> int:
        """Index of the layer whose edges end in ``row`` (``row >= 1``)."""
        return (row - 1) % (2 * self.g)

    def layer_sources(self, layer: int, col: int) -> tuple[int, ...]:
        lo, hi = self._lo[layer][col], self._hi[layer][col]
        if lo == _NONE:
            return ()
        return (lo,) if hi == _NONE else (lo, hi)

    def layer_arrays(self, layer: int) -> tuple[array, array]:
        return self._lo[layer], self._hi[layer]

    def layer_edges(self, layer: int) -> set[tuple[int, int]]:
        """Column pairs ``(source, target)`` of one layer."""
        return {(s, t) for t in range(self.width) for s in self.layer_sources(layer, t)}

    def parents(self, node: NodeId) -> list[NodeId]:
        """Parents in canonical order.

        The same-row predecessor comes first, then the previous-row parents
        (riffle sources and, for column 0, the wrap source) by ascending
        column.  Coinciding edges appear once.
        """
        if node not in self:
            raise UsageError(f"unknown node {node!r}")
        r, c = node
        if r == 0:
            return [] if c == 0 else [(0, c - 1)]
        prev = set(self.layer_sources(self.layer_of_row(r), c))
        if c == 0:
            prev.add(self.width - 1)
            return [(r - 1, x) for x in sorted(prev)]
        return [(r, c - 1)] + [(r - 1, x) for x in sorted(prev)]

    def parent_table(self) -> list[list[NodeId]]:
        return [self.parents(v) for v in self.nodes()]

    def edges(self, inter_layer_only: bool = False) -> Iterator[tuple[NodeId, NodeId]]:
        if not inter_layer_only:
            for v in self.nodes():
                for p in self.parents(v):
                    yield p, v
            return
        for r in range(1, self.rows):
            layer = self.layer_of_row(r)
            for c in range(self.width):
                for s in self.layer_sources(layer, c):
                    yield (r - 1, s), (r, c)

    def children_table(self) -> list[list[int]]:
        """Children by node index, each list ascending."""
        kids: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges():
            kids[self.index(u)].append(self.index(v))
        for k in kids:
            k.sort()
        return kids

    # -- derived graphs --------------------------------------------------------

    def with_layer(self, layer: int, sources: Sequence[Sequence[int]]) -> RiffleGraph:
        layers = [[self.layer_sources(l, t) for t in range(self.width)] for l in range(2 * self.g)]
        layers[layer] = [tuple(s) for s in sources]
        return RiffleGraph(self.g, self.lam, self.words, layers)

    def without_edge(self, layer: int, source: int, target: int) -> RiffleGraph:
        """Copy with one riffle edge (column pair) of ``layer`` deleted."""
        srcs = [list(self.layer_sources(layer, t)) for t in range(self.width)]
        if source not in srcs[target]:
            raise UsageError(f"layer {layer} has no edge {source} -> {target}")
        srcs[target].remove(source)
        return self.with_layer(layer, srcs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RiffleGraph):
            return NotImplemented
        return (self.g, self.lam, self.words, self._lo, self._hi) == (
            other.g, other.lam, other.words, other._lo, other._hi)

    def __hash__(self) -> int:
        return hash((self.g, self.lam, self.words, tuple(bytes(a) for a in self._lo)))

    def __repr__(self) -> str:
        return f"RiffleGraph(g={self.g}, lam={self.lam}, nodes={self.node_count})"

    def __getstate__(self):
        return (self.g, self.lam, self.words, [a.tobytes() for a in self._lo],
                [a.tobytes() for a in self._hi])

    def __setstate__(self, state) -> None:
        g, lam, words, lo, hi = state
        self.g, self.lam, self.words = g, lam, words
        self._lo = tuple(array("i", b) for b in lo)
        self._hi = tuple(array("i", b) for b in hi)


def graph_from_words(g: int, words: Sequence[BitWord], lam: int = 1) -> RiffleGraph:
    """Build the graph straight from the ``g`` traced layer words."""
    if len(words) != g or any(len(w) != 1 << g for w in words):
        raise UsageError(f"need {g} words of length {1 << g}")
    n = 1 << g
    fwd, inv = [], []
    for w in words:
        p = riffle_permutation(w).mapping
        q = riffle_permutation(w.complement()).mapping
        fwd.append((p, q))
        pi, qi = [0] * n, [0] * n
        for s in range(n):
            pi[p[s]] = s
            qi[q[s]] = s
        inv.append((pi, qi))
    lo_all, hi_all = [], []
    for layer in range(2 * g):
        if layer < g:
            a, b = inv[layer]
        else:
            a, b = fwd[2 * g - 1 - layer]
        lo = array("i", (min(x, y) for x, y in zip(a, b)))
        hi = array("i", (max(x, y) if x != y else _NONE for x, y in zip(a, b)))
        lo_all.append(lo)
        hi_all.append(hi)
    return RiffleGraph._from_arrays(g, lam, words, lo_all, hi_all)


def gen_graph(g: int, sigma: Permutation | Sequence[int], lam: int = 1,
              cumulative: bool = False) -> RiffleGraph:
    """Graph for ``sigma``.  ``cumulative`` selects the alternative trace rule
    (see ``trace_trajectories``); the hash always uses the default."""
    if g < 1 or lam < 1:
        raise UsageError(f"need g >= 1 and lambda >= 1, got g={g}, lambda={lam}")
    if not isinstance(sigma, Permutation):
        sigma = Permutation(tuple(sigma))
    if len(sigma) != 1 << g:
        raise UsageError(f"sigma has {len(sigma)} elements, expected {1 << g}")
    traced = trace_trajectories(binary_representation(sigma, g), cumulative)
    return graph_from_words(g, traced.columns, lam)


def parents(graph: RiffleGraph, node: NodeId) -> list[NodeId]:
    return graph.parents(node)


@dataclass
class StructureReport:
    g: int
    lam: int
    node_count: int
    expected_node_count: int
    edge_count: int
    horizontal_edges: int
    expected_horizontal_edges: int
    wrap_edges: int
    expected_wrap_edges: int
    max_indegree: int
    sources: list[NodeId]
    sinks: list[NodeId]
    row0_indegree_ok: bool
    topological_order_ok: bool
    mirror_symmetry_ok: bool
    failures: list[str] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        d = asdict(self)
        d["all_pass"] = self.all_pass
        return d


def validate_structure(graph: RiffleGraph) -> StructureReport:
    g, lam, n = graph.g, graph.lam, graph.width
    last_row = graph.rows - 1
    indeg = {}
    has_child = set()
    edge_count = horizontal = wrap = 0
    topo_ok = True
    for v in graph.nodes():
        ps = graph.parents(v)
        indeg[v] = len(ps)
        for p in ps:
            edge_count += 1
            has_child.add(p)
            if p >= v:
                topo_ok = False
            if p[0] == v[0] and p[1] == v[1] - 1:
                horizontal += 1
            elif v[1] == 0 and p == (v[0] - 1, n - 1):
                wrap += 1
    sources = [v for v, d in indeg.items() if d == 0]
    sinks = [v for v in graph.nodes() if v not in has_child]
    row0_ok = all(indeg[(0, c)] == 1 for c in range(1, n))

    mirror_ok = True
    for block in range(lam):
        base = 2 * g * block
        for m in range(g):
            upper = _row_layer_edges(graph, base + g - m)
            lower = _row_layer_edges(graph, base + g + m + 1)
            if lower != {(t, s) for s, t in upper}:
                mirror_ok = False

    report = StructureReport(
        g=g, lam=lam,
        node_count=graph.node_count,
        expected_node_count=n * (2 * lam * g + 1),
        edge_count=edge_count,
        horizontal_edges=horizontal,
        expected_horizontal_edges=(2 * lam * g + 1) * (n - 1),
        wrap_edges=wrap,
        expected_wrap_edges=2 * lam * g,
        max_indegree=max(indeg.values()),
        sources=sources,
        sinks=sinks,
        row0_indegree_ok=row0_ok,
        topological_order_ok=topo_ok,
        mirror_symmetry_ok=mirror_ok,
    )
    f = report.failures
    if report.node_count != report.expected_node_count:
        f.append("node count")
    if report.max_indegree > 3:
        f.append("indegree above 3")
    if sources != [(0, 0)]:
        f.append(f"sources {sources}")
    if sinks != [(last_row, n - 1)]:
        f.append(f"sinks {sinks}")
    if not row0_ok:
        f.append("row 0 indegree")
    if not topo_ok:
        f.append("(row, col) order is not topological")
    if horizontal != report.expected_horizontal_edges:
        f.append("horizontal edge count")
    if wrap != report.expected_wrap_edges:
        f.append("wrap edge count")
    if not mirror_ok:
        f.append("mirror symmetry")
    return report


def _row_layer_edges(graph: RiffleGraph, row: int) -> set[tuple[int, int]]:
    """Riffle edges ending in ``row`` as (source, target) column pairs."""
    return graph.layer_edges(graph.layer_of_row(row))


def node_name(node: NodeId) -> str:
    r, c = node
    return f"v_{c}^{r}"


def export_graph(graph: RiffleGraph, format: str = "json") -> bytes:
    if format == "dot":
        lines = [f"digraph riffle_g{graph.g}_l{graph.lam} {{"]
        for v in graph.nodes():
            lines.append(f'  "{node_name(v)}";')
        for u, v in graph.edges():
            lines.append(f'  "{node_name(u)}" -> "{node_name(v)}";')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("ascii")
    if format in ("json", "adjacency-json"):
        doc = {
            "g": graph.g,
            "lambda": graph.lam,
            "words": [str(w) for w in graph.words],
            "parents": [[list(p) for p in ps] for ps in graph.parent_table()],
        }
        return json.dumps(doc, separators=(",", ":")).encode("ascii")
    raise UsageError(f"unsupported export format {format!r}")


def import_graph(data: bytes | str) -> RiffleGraph:
    """Rebuild a graph from its adjacency JSON, checking the table against the words."""
    try:
        doc = json.loads(data)
        g, lam = int(doc["g"]), int(doc["lambda"])
        words = tuple(BitWord.from_string(w) for w in doc["words"])
        table = [[tuple(p) for p in ps] for ps in doc["parents"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed graph JSON: {exc}") from exc
    try:
        graph = graph_from_words(g, words, lam)
    except UsageError as exc:
        raise UsageError(f"graph JSON does not describe a valid graph: {exc}") from exc
    if graph.parent_table() != table:
        raise UsageError("parent table does not match the graph built from its words")
    return graph
