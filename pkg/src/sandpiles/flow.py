"""Integer max-flow (Edmonds-Karp) for the small networks used by the SR checker."""

from __future__ import annotations

from collections import deque


class FlowNetwork:
    def __init__(self, size: int):
        self.size = size
        self.adj: list[list[int]] = [[] for _ in range(size)]
        # parallel arrays indexed by arc id; arc ^ 1 is the reverse arc
        self.head: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        """Add ``u -> v`` with capacity ``cap`` and return its arc id."""
        arc = len(self.head)
        self.head += [v, u]
        self.cap += [cap, 0]
        self.adj[u].append(arc)
        self.adj[v].append(arc + 1)
        return arc

    def flow_on(self, arc: int) -> int:
        return self.cap[arc ^ 1]

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while True:
            parent = [-1] * self.size
            parent[s] = -2
            queue = deque([s])
            while queue and parent[t] == -1:
                u = queue.popleft()
                for arc in self.adj[u]:
                    v = self.head[arc]
                    if parent[v] == -1 and self.cap[arc] > 0:
                        parent[v] = arc
                        queue.append(v)
            if parent[t] == -1:
                return total
            push = None
            v = t
            while v != s:
                arc = parent[v]
                push = self.cap[arc] if push is None else min(push, self.cap[arc])
                v = self.head[arc ^ 1]
            v = t
            while v != s:
                arc = parent[v]
                self.cap[arc] -= push
                self.cap[arc ^ 1] += push
                v = self.head[arc ^ 1]
            total += push

    def reachable(self, s: int) -> set[int]:
        """Nodes reachable from ``s`` in the residual network (min-cut source side)."""
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for arc in self.adj[u]:
                v = self.head[arc]
                if v not in seen and self.cap[arc] > 0:
                    seen.add(v)
                    queue.append(v)
        return seen
