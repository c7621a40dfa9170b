"""Multigraph utilities: iterated low-degree peeling and binocular search.

Loops count twice toward degrees; parallel edges are kept apart by index.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .instances import BudgetExceededError, InputError


@dataclass
class Multigraph:
    n: int
    edge_list: list[tuple[int, int]] = field(default_factory=list)
    weights: Optional[list[Fraction]] = None

    def __post_init__(self):
        for u, v in self.edge_list:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u},{v}) out of range")

    def add_edge(self, u: int, v: int) -> int:
        self.edge_list.append((u, v))
        return len(self.edge_list) - 1

    def degree_within(self, keep: set[int]) -> dict[int, int]:
        deg = {v: 0 for v in keep}
        for u, v in self.edge_list:
            if u in keep and v in keep:
                deg[u] += 1
                deg[v] += 1
        return deg

    def incident_indices(self) -> dict[int, list[int]]:
        inc: dict[int, list[int]] = {v: [] for v in range(self.n)}
        for i, (u, v) in enumerate(self.edge_list):
            inc[u].append(i)
            if v != u:
                inc[v].append(i)
        return inc


@dataclass
class Subgraph:
    """Edge-index subgraph of a multigraph, with its vertex support."""

    graph: Multigraph
    edge_indices: tuple[int, ...]

    def support(self) -> set[int]:
        vs: set[int] = set()
        for i in self.edge_indices:
            u, v = self.graph.edge_list[i]
            vs.add(u)
            vs.add(v)
        return vs

    def degrees(self) -> dict[int, int]:
        deg: dict[int, int] = {}
        for i in self.edge_indices:
            u, v = self.graph.edge_list[i]
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        return deg

    def is_improving(self) -> bool:
        deg = self.degrees()
        return bool(deg) and min(deg.values()) >= 2 and len(self.edge_indices) > len(deg)


def bad_vertex_deletion(mg: Multigraph, x_set: Iterable[int], y_set: Iterable[int]) -> set[int]:
    """Peel vertices of induced degree at most 2 out of X, rounds at a time.

    Y is discarded up front; every survivor has degree at least 3 in the
    subgraph induced on the survivors. The fixed point is independent of
    the peeling order.
    """
    xs, ys = set(x_set), set(y_set)
    if xs & ys:
        raise InputError("X and Y must be disjoint")
    current = set(xs)
    while True:
        deg = mg.degree_within(current)
        drop = {v for v in current if deg[v] <= 2}
        if not drop:
            return current
        current -= drop


def _components(mg: Multigraph) -> list[list[int]]:
    inc = mg.incident_indices()
    seen: set[int] = set()
    comps = []
    for start in range(mg.n):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for ei in inc[v]:
                a, b = mg.edge_list[ei]
                for nxt in (a, b):
                    if nxt not in seen:
                        seen.add(nxt)
                        comp.append(nxt)
                        queue.append(nxt)
        comps.append(sorted(comp))
    return comps


def _shortest_cycle_in(mg: Multigraph, vertices: Sequence[int], budget: list[int]) -> Optional[tuple[list[int], list[int]]]:
    """A short simple cycle (vertex order, edge indices) or None.

    Loops give length-1, parallel pairs length-2 cycles; otherwise per-root
    BFS with lowest-common-ancestor trimming returns a candidate no longer
    than the shortest through that root.
    """
    vset = set(vertices)
    inc = mg.incident_indices()
    for v in vertices:
        for ei in inc[v]:
            a, b = mg.edge_list[ei]
            if a == b == v:
                return [v], [ei]
    seen_pairs: dict[frozenset[int], int] = {}
    for v in vertices:
        for ei in sorted(inc[v]):
            a, b = mg.edge_list[ei]
            if a not in vset or b not in vset or a == b:
                continue
            key = frozenset((a, b))
            if key in seen_pairs and seen_pairs[key] != ei:
                ej = seen_pairs[key]
                return [a, b], [min(ei, ej), max(ei, ej)]
            seen_pairs.setdefault(key, ei)

    best: Optional[tuple[list[int], list[int]]] = None
    for root in vertices:
        dist = {root: 0}
        par_edge: dict[int, int] = {}
        par_vert: dict[int, int] = {}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            if best is not None and 2 * dist[x] + 1 >= len(best[1]):
                break
            for ei in inc[x]:
                budget[0] -= 1
                if budget[0] < 0:
                    raise BudgetExceededError("cycle search budget exhausted")
                a, b = mg.edge_list[ei]
                y = b if a == x else a
                if y not in vset or ei == par_edge.get(x):
                    continue
                if y not in dist:
                    dist[y] = dist[x] + 1
                    par_edge[y] = ei
                    par_vert[y] = x
                    queue.append(y)
                    continue
                cand = _close_cycle(x, y, ei, par_vert, par_edge)
                if best is None or len(cand[1]) < len(best[1]):
                    best = cand
    return best


def _close_cycle(x, y, ei, par_vert, par_edge) -> tuple[list[int], list[int]]:
    px, pex = _path_to_root(x, par_vert, par_edge)
    py, pey = _path_to_root(y, par_vert, par_edge)
    # Trim the common tail (toward the root) so the cycle is simple.
    while len(px) >= 2 and len(py) >= 2 and px[-1] == py[-1] and px[-2] == py[-2]:
        px.pop(); pex.pop()
        py.pop(); pey.pop()
    # Meeting vertex is the last entry of both paths.
    vorder = px[:-1] + list(reversed(py))
    eorder = pex + list(reversed(pey))
    return list(reversed(vorder)), list(reversed(eorder)) + [ei]


def _path_to_root(v, par_vert, par_edge) -> tuple[list[int], list[int]]:
    verts, edges = [v], []
    while v in par_vert:
        edges.append(par_edge[v])
        v = par_vert[v]
        verts.append(v)
    return verts, edges


def find_improving_subgraph(mg: Multigraph, budget: int = 5_000_000) -> Optional[Subgraph]:
    """A connected subgraph with minimum degree 2 and exactly |V|+1 edges.

    Finds a short cycle, then grows a breadth-first ear from it over the
    remaining edges; the first closure yields a theta, dumbbell, or
    figure-eight with the exact edge excess of one. Returns None when every
    component has cycle-space dimension at most 1.
    """
    budget_box = [budget]
    inc = mg.incident_indices()
    for comp in _components(mg):
        cyc = _shortest_cycle_in(mg, comp, budget_box)
        if cyc is None:
            continue
        cyc_vs, cyc_es = cyc
        used = set(cyc_es)
        label: dict[int, int] = {v: v for v in cyc_vs}
        par_edge: dict[int, int] = {}
        par_vert: dict[int, int] = {}
        queue = deque(cyc_vs)
        closure = None
        while queue and closure is None:
            x = queue.popleft()
            for ei in sorted(inc[x]):
                budget_box[0] -= 1
                if budget_box[0] < 0:
                    raise BudgetExceededError("ear search budget exhausted")
                if ei in used or ei == par_edge.get(x):
                    continue
                a, b = mg.edge_list[ei]
                y = b if a == x else a
                if y not in label:
                    label[y] = label[x]
                    par_edge[y] = ei
                    par_vert[y] = x
                    queue.append(y)
                    continue
                closure = (x, y, ei)
                break
        if closure is None:
            continue
        x, y, ei = closure
        _, pex = _path_to_root(x, par_vert, par_edge)
        _, pey = _path_to_root(y, par_vert, par_edge)
        # Shared tree edges (a common tail toward one root) stay in: they are
        # the connecting path of a dumbbell; the union has edge excess one.
        ear_edges = set(pex) | set(pey) | {ei}
        sub = Subgraph(mg, tuple(cyc_es) + tuple(sorted(ear_edges)))
        if not sub.is_improving():
            raise RuntimeError("binocular construction produced an invalid subgraph")
        return sub
    return None
