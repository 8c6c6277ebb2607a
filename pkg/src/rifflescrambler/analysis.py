"""Empirical checks of the graph's structural claims and a pebbling simulator.

The superconcentrator and dispersion checks reduce to vertex-disjoint path
counting, done by unit-capacity max-flow on the node-split graph.  The
pebbling simulator produces legal sequential pebblings: an honest row-by-row
schedule and a greedy schedule under a pebble budget.  The greedy strategy
only gives upper bounds on attack cost; optimal pebbling is intractable.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
from bisect import bisect_left
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional

from .errors import UsageError
from .flow import FlowNetwork
from .graph import NodeId, RiffleGraph

EXHAUSTIVE_MAX_G = 3
DEFAULT_MAX_PLACEMENTS = 1_000_000
EDGE_FILTERS = ("all", "inter-layer-only")


@lru_cache(maxsize=16)
def flow_network(graph: RiffleGraph, edge_filter: str = "all") -> FlowNetwork:
    if edge_filter not in EDGE_FILTERS:
        raise UsageError(f"edge_filter must be one of {EDGE_FILTERS}")
    edges = graph.edges(inter_layer_only=edge_filter == "inter-layer-only")
    return FlowNetwork(graph.node_count, ((graph.index(u), graph.index(v)) for u, v in edges))


def max_vertex_disjoint_paths(graph: RiffleGraph, sources: Iterable[NodeId],
                              sinks: Iterable[NodeId], edge_filter: str = "all") -> int:
    sources, sinks = set(map(tuple, sources)), set(map(tuple, sinks))
    if not sources or not sinks:
        raise UsageError("terminal sets must be non-empty")
    if sources & sinks:
        raise UsageError("sources and sinks must be disjoint")
    for v in sources | sinks:
        if v not in graph:
            raise UsageError(f"unknown node {v!r}")
    net = flow_network(graph, edge_filter)
    return net.max_flow([graph.index(v) for v in sources], [graph.index(v) for v in sinks])


@dataclass
class CheckReport:
    check: str
    params: dict
    trials: int = 0
    failures: list[dict] = field(default_factory=list)
    failure_count: int = 0

    max_witnesses = 20

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def add_failure(self, witness: dict) -> None:
        self.failure_count += 1
        if len(self.failures) < self.max_witnesses:
            self.failures.append(witness)

    def to_dict(self) -> dict:
        return {"check": self.check, "params": self.params, "trials": self.trials,
                "failures": self.failures, "failure_count": self.failure_count,
                "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _flow_batch(graph: RiffleGraph, edge_filter: str, in_row: int, out_row: int,
                cases: list[tuple[tuple[int, ...], tuple[int, ...]]]) -> list[dict]:
    net = flow_network(graph, edge_filter)
    n = graph.width
    failures = []
    for ins, outs in cases:
        value = net.max_flow([in_row * n + c for c in ins], [out_row * n + c for c in outs])
        if value < len(ins):
            failures.append({"k": len(ins), "inputs": list(ins), "outputs": list(outs), "flow": value})
    return failures


def _run_cases(report: CheckReport, graph: RiffleGraph, edge_filter: str, in_row: int,
               out_row: int, cases: list, jobs: int) -> CheckReport:
    report.trials = len(cases)
    if jobs > 1 and len(cases) > 1:
        chunk = -(-len(cases) // (4 * jobs))
        batches = [cases[i:i + chunk] for i in range(0, len(cases), chunk)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_flow_batch, itertools.repeat(graph), itertools.repeat(edge_filter),
                               itertools.repeat(in_row), itertools.repeat(out_row), batches)
            for failures in results:
                for w in failures:
                    report.add_failure(w)
    else:
        for w in _flow_batch(graph, edge_filter, in_row, out_row, cases):
            report.add_failure(w)
    return report


def _random_subset_pair(rng: random.Random, n: int, k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(sorted(rng.sample(range(n), k))), tuple(sorted(rng.sample(range(n), k)))


def check_superconcentrator(graph: RiffleGraph, mode: str = "sampled", samples: int = 1000,
                            seed: int = 0, jobs: int = 1) -> CheckReport:
    """Check k vertex-disjoint paths between every (or sampled) k-subset pair.

    Inputs are row 0 and outputs row ``2g`` of a single-block graph.
    """
    if graph.lam != 1:
        raise UsageError("superconcentrator check expects a single block (lambda = 1)")
    n, out_row = graph.width, 2 * graph.g
    report = CheckReport("superconcentrator", {"g": graph.g, "mode": mode})
    if mode == "exhaustive":
        if graph.g > EXHAUSTIVE_MAX_G:
            raise UsageError(f"exhaustive check refused for g > {EXHAUSTIVE_MAX_G}; use sampled mode")
        cases = [(a, b) for k in range(1, n + 1)
                 for a in itertools.combinations(range(n), k)
                 for b in itertools.combinations(range(n), k)]
    elif mode == "sampled":
        if samples < 1:
            raise UsageError("samples must be positive")
        report.params.update(samples=samples, seed=seed)
        rng = random.Random(seed)
        cases = [_random_subset_pair(rng, n, rng.randint(1, n)) for _ in range(samples)]
    else:
        raise UsageError(f"unknown mode {mode!r}")
    return _run_cases(report, graph, "all", 0, out_row, cases, jobs)


def dispersion_report(graph: RiffleGraph, block: int, h: int, trials: int,
                      seed: int = 0, jobs: int = 1) -> CheckReport:
    n = graph.width
    if not 1 <= h <= n:
        raise UsageError(f"h must be in [1, {n}]")
    if not 0 <= block < graph.lam:
        raise UsageError(f"block must be in [0, {graph.lam})")
    if trials < 1:
        raise UsageError("trials must be positive")
    rng = random.Random(seed)
    cases = [_random_subset_pair(rng, n, h) for _ in range(trials)]
    report = CheckReport("layer_dispersion",
                         {"g": graph.g, "block": block, "h": h, "seed": seed})
    in_row = 2 * graph.g * block
    return _run_cases(report, graph, "inter-layer-only", in_row, in_row + 2 * graph.g, cases, jobs)


def check_layer_dispersion(graph: RiffleGraph, block: int, h: int, trials: int,
                           seed: int = 0) -> bool:
    """h disjoint riffle-edge-only paths (each of length 2g) across a block."""
    return dispersion_report(graph, block, h, trials, seed).passed


def identity_control(graph: RiffleGraph) -> RiffleGraph:
    """Negative control: every riffle layer replaced by straight edges t -> t."""
    straight = [(t,) for t in range(graph.width)]
    layers = [straight] * (2 * graph.g)
    return RiffleGraph(graph.g, graph.lam, graph.words, layers)


def graph_depth(graph: RiffleGraph, removed: Iterable[NodeId] = ()) -> int:
    """Longest path (in edges) after deleting ``removed``; 0 if nothing is left."""
    gone = {graph.index(tuple(v)) for v in removed}
    depth = [0] * graph.node_count
    best = 0
    for v in graph.nodes():
        i = graph.index(v)
        if i in gone:
            continue
        d = 0
        for p in graph.parents(v):
            j = graph.index(p)
            if j not in gone and depth[j] + 1 > d:
                d = depth[j] + 1
        depth[i] = d
        best = max(best, d)
    return best


# -- pebbling ------------------------------------------------------------------

@dataclass
class PebbleTrace:
    """A sequential pebbling as a list of moves.

    Step ``i`` places ``moves[i][0]`` and simultaneously drops the pebbles in
    ``moves[i][1]``, so ``P_i = (P_{i-1} - removed) | {placed}``.
    """

    strategy: str
    budget: Optional[int]
    target: NodeId
    moves: list[tuple[NodeId, tuple[NodeId, ...]]] = field(default_factory=list)
    legal: bool = False
    failure: Optional[str] = None
    blocking_node: Optional[NodeId] = None

    @property
    def placements(self) -> int:
        return len(self.moves)

    def configs(self) -> Iterator[frozenset[NodeId]]:
        """Yield ``P_0, P_1, ..., P_t``."""
        current: set[NodeId] = set()
        yield frozenset()
        for placed, removed in self.moves:
            current.difference_update(removed)
            current.add(placed)
            yield frozenset(current)

    def sizes(self) -> Iterator[int]:
        size = 0
        for _, removed in self.moves:
            size += 1 - len(removed)
            yield size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "placements", "pebbles"])
        for step, size in enumerate(self.sizes(), start=1):
            w.writerow([step, step, size])
        return buf.getvalue()


def check_pebbling(graph: RiffleGraph, trace: PebbleTrace, require_target: bool = True) -> Optional[str]:
    """Return None for a legal sequential pebbling of ``trace.target``, else the reason.

    With ``require_target=False`` only the moves themselves are checked, which
    suits the partial trace of a failed run.
    """
    pebbled: set[NodeId] = set()
    hit = False
    for step, (placed, removed) in enumerate(trace.moves, start=1):
        if placed in pebbled:
            return f"step {step}: {placed} already pebbled"
        missing = [p for p in graph.parents(placed) if p not in pebbled]
        if missing:
            return f"step {step}: parents {missing} of {placed} not pebbled"
        if placed in removed or any(r not in pebbled for r in removed):
            return f"step {step}: bad removal {removed}"
        pebbled.difference_update(removed)
        pebbled.add(placed)
        hit = hit or placed == trace.target
    if require_target and not hit:
        return f"target {trace.target} never pebbled"
    return None


def simulate_pebbling(graph: RiffleGraph, strategy: str = "honest-rowwise",
                      pebble_budget: Optional[int] = None,
                      max_placements: int = DEFAULT_MAX_PLACEMENTS) -> PebbleTrace:
    if strategy in ("honest", "honest-rowwise"):
        trace = _honest(graph)
    elif strategy in ("greedy", "greedy-budget"):
        trace = _greedy(graph, pebble_budget, max_placements)
    else:
        raise UsageError(f"unknown strategy {strategy!r}")
    if trace.failure is None:
        reason = check_pebbling(graph, trace)
        trace.legal = reason is None
        trace.failure = reason
    return trace


def _honest(graph: RiffleGraph) -> PebbleTrace:
    """Pebble in evaluation order, dropping a pebble once its last child is placed."""
    nodes = list(graph.nodes())
    kids = graph.children_table()
    last_use = [k[-1] if k else None for k in kids]
    expiring: dict[int, list[int]] = {}
    for u, last in enumerate(last_use):
        if last is not None:
            expiring.setdefault(last, []).append(u)
    trace = PebbleTrace("honest-rowwise", None, graph.sink)
    dead: list[int] = []
    for i, v in enumerate(nodes):
        trace.moves.append((v, tuple(nodes[u] for u in dead)))
        dead = expiring.get(i, [])
    return trace


def _greedy(graph: RiffleGraph, budget: Optional[int], max_placements: int) -> PebbleTrace:
    """Evaluation order with recomputation under a pebble budget.

    Missing parents are rebuilt depth-first.  Parents of nodes still waiting
    on the stack are pinned; everything else may be dropped in the same step
    as a placement, dead pebbles first, then by furthest next use in
    evaluation order.  Fails with the blocking node when every pebble is
    pinned.
    """
    trace = PebbleTrace("greedy-budget", budget, graph.sink)
    nodes = list(graph.nodes())
    parents = [[graph.index(p) for p in graph.parents(v)] for v in nodes]
    kids = graph.children_table()
    sink = graph.index(graph.sink)
    max_indeg = max(len(p) for p in parents)
    if budget is not None and budget < max_indeg + 1:
        trace.failure = f"budget {budget} below max indegree + 1 = {max_indeg + 1}"
        trace.blocking_node = next(nodes[i] for i, p in enumerate(parents) if len(p) == max_indeg)
        return trace

    inf = len(nodes)
    pebbled: set[int] = set()
    wanted: Counter[int] = Counter()  # pins held by frames on the stack
    cursor = 0

    def next_use(u: int) -> int:
        k = kids[u]
        j = bisect_left(k, cursor)
        return k[j] if j < len(k) else inf

    def place(x: int) -> bool:
        for p in parents[x]:
            wanted[p] -= 1
        removed = [u for u in pebbled if not wanted[u] and u != sink and next_use(u) == inf]
        pebbled.difference_update(removed)
        if budget is not None and len(pebbled) >= budget:
            free = [u for u in pebbled if not wanted[u] and u != sink]
            if not free:
                trace.failure = f"budget {budget} exhausted by pinned pebbles"
                trace.blocking_node = nodes[x]
                return False
            victim = max(free, key=lambda u: (next_use(u), u))
            pebbled.discard(victim)
            removed.append(victim)
        pebbled.add(x)
        trace.moves.append((nodes[x], tuple(nodes[u] for u in removed)))
        return True

    def pin(x: int) -> None:
        for p in parents[x]:
            wanted[p] += 1

    # a frame pins its parents only once its row predecessor is pebbled, so
    # walking back along a row holds no pebbles
    for cursor in range(len(nodes)):
        stack = [[cursor, False]]
        while stack:
            if len(trace.moves) >= max_placements:
                trace.failure = f"placement cap {max_placements} reached"
                trace.blocking_node = nodes[stack[-1][0]]
                return trace
            frame = stack[-1]
            x = frame[0]
            if not frame[1]:
                if nodes[x][1] and x - 1 not in pebbled:
                    stack.append([x - 1, False])
                    continue
                pin(x)
                frame[1] = True
            missing = [p for p in parents[x] if p not in pebbled]
            if missing:
                stack.append([max(missing), False])
                continue
            stack.pop()
            if not place(x):
                return trace
    return trace


@dataclass(frozen=True)
class ComplexityReport:
    time: int
    space: int
    space_time: int
    cumulative: int

    def to_dict(self) -> dict:
        return {"time": self.time, "space": self.space, "space_time": self.space_time,
                "cumulative": self.cumulative}


def pebble_metrics(trace: PebbleTrace) -> ComplexityReport:
    if not trace.legal:
        raise UsageError(f"metrics need a legal trace ({trace.failure})")
    t = space = total = 0
    for size in trace.sizes():
        t += 1
        space = max(space, size)
        total += size
    return ComplexityReport(time=t, space=space, space_time=t * space, cumulative=total)


def superconcentrator_tradeoff_bound(width: int, lam: int, space: int) -> Optional[float]:
    """Placements any pebbling with ``space <= width / 20`` pebbles must make.

    Returns None outside that range, where the bound says nothing.
    """
    if space < 1 or 20 * space > width:
        return None
    return width * (lam * width / (64 * space)) ** lam
