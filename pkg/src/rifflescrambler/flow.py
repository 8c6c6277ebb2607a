"""Unit-capacity max-flow on a node-split network (Dinic).

Every vertex ``v`` becomes ``in(v) = 2v`` and ``out(v) = 2v + 1`` joined by a
capacity-1 arc, so the flow value between two vertex sets equals the maximum
number of vertex-disjoint paths between them (Menger).  Terminals are split
as well: each source or sink carries at most one path.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable


class FlowNetwork:
    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]]):
        self.vertex_count = vertex_count
        self._size = 2 * vertex_count
        self._to: list[int] = []
        self._cap: list[int] = []
        self._adj: list[list[int]] = [[] for _ in range(self._size)]
        for v in range(vertex_count):
            self._add(2 * v, 2 * v + 1)
        for u, v in edges:
            self._add(2 * u + 1, 2 * v)

    def _add(self, u: int, v: int, adj: list[list[int]] | None = None) -> None:
        adj = self._adj if adj is None else adj
        adj[u].append(len(self._to))
        self._to.append(v)
        self._cap.append(1)
        adj[v].append(len(self._to))
        self._to.append(u)
        self._cap.append(0)

    def max_flow(self, sources: Iterable[int], sinks: Iterable[int]) -> int:
        """Maximum number of vertex-disjoint paths from ``sources`` to ``sinks``."""
        base = len(self._to)
        s, t = self._size, self._size + 1
        adj = list(self._adj) + [[], []]
        to, cap = self._to, self._cap
        try:
            for v in set(sources):
                adj[2 * v] = adj[2 * v] + [len(to) + 1]
                adj[s].append(len(to))
                to.extend((2 * v, s))
                cap.extend((1, 0))
            for v in set(sinks):
                adj[2 * v + 1] = adj[2 * v + 1] + [len(to)]
                adj[t].append(len(to) + 1)
                to.extend((t, 2 * v + 1))
                cap.extend((1, 0))
            residual = cap[:]
            return _dinic(adj, to, residual, s, t)
        finally:
            del to[base:]
            del cap[base:]


def _dinic(adj: list[list[int]], to: list[int], cap: list[int], s: int, t: int) -> int:
    n = len(adj)
    flow = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in adj[u]:
                v = to[a]
                if cap[a] and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[t] < 0:
            return flow
        ptr = [0] * n
        while True:
            stack = [s]
            arcs: list[int] = []
            while stack:
                u = stack[-1]
                if u == t:
                    break
                edges = adj[u]
                i = ptr[u]
                while i < len(edges):
                    a = edges[i]
                    v = to[a]
                    if cap[a] and level[v] == level[u] + 1:
                        break
                    i += 1
                ptr[u] = i
                if i == len(edges):
                    level[u] = -1
                    stack.pop()
                    if arcs:
                        arcs.pop()
                        ptr[stack[-1]] += 1
                    continue
                stack.append(v)
                arcs.append(a)
            if not stack:
                break
            for a in arcs:
                cap[a] -= 1
                cap[a ^ 1] += 1
            flow += 1
