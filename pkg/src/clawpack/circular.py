"""Cycle-backed local improvements of the squared weight function.

Pipeline: anchor maps over the current solution, a lazily restricted
auxiliary multigraph whose edges certify a per-edge squared-weight
inequality, then cycle detection. Cycles of length 2 (parallel edges) are
scanned directly; longer cycles are found either by an exhaustive DFS
(complete, deterministic) or by randomized color coding over the packing
universe with a colorful-cycle dynamic program.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .instances import (
    BudgetExceededError,
    Circular,
    ConflictGraph,
    ContractError,
    Improvement,
    InputError,
    PackingInstance,
    Solution,
    neighborhood,
)


class SearchIncompleteError(BudgetExceededError):
    """The auxiliary-graph or cycle search hit a cap; absence not certified."""


@dataclass
class AnchorMaps:
    """Per outside vertex: its heaviest solution neighbor, and the second one.

    `heaviest` is total over V minus A (requires A maximal); `second` is
    defined where the vertex has at least two solution neighbors. Ties break
    to the lowest id. `a_neighbors` caches N(u, A) for reuse.
    """

    heaviest: dict[int, int]
    second: dict[int, int]
    a_neighbors: dict[int, tuple[int, ...]]


def build_anchor_maps(g: ConflictGraph, a: Solution) -> AnchorMaps:
    heaviest: dict[int, int] = {}
    second: dict[int, int] = {}
    a_nbrs: dict[int, tuple[int, ...]] = {}
    members = a.members
    for u in range(g.n):
        if u in members:
            continue
        nu = tuple(v for v in g.adj[u] if v in members)
        if not nu:
            raise ContractError(f"vertex {u} has no solution neighbor; solution not maximal")
        a_nbrs[u] = nu
        best = max(nu, key=lambda v: (g.weights[v], -v))
        heaviest[u] = best
        rest = [v for v in nu if v != best]
        if rest:
            second[u] = max(rest, key=lambda v: (g.weights[v], -v))
    return AnchorMaps(heaviest, second, a_nbrs)


def charge_to_anchor(g: ConflictGraph, maps: AnchorMaps, u: int) -> Fraction:
    """w(u) - w(N(u,A))/2, the charge u would send to its heaviest anchor."""
    return g.weights[u] - g.weight_of(maps.a_neighbors[u]) / 2


def aux_edge_check(
    u: int,
    y1: Iterable[int],
    y2: Iterable[int],
    g: ConflictGraph,
    a: Solution,
    maps: AnchorMaps,
) -> bool:
    """Exact per-edge inequality certifying that a cycle through this edge improves w^2.

    y1 must be anchored at the heaviest neighbor of u, y2 at the second one;
    disjointness and independence of {u} | y1 | y2 are the caller's promise.
    """
    v1 = maps.heaviest[u]
    v2 = maps.second[u]
    w = g.weights
    lhs = w[u] ** 2 + Fraction(1, 2) * (g.squared_weight_of(y1) + g.squared_weight_of(y2))
    rhs = (w[v1] ** 2 + w[v2] ** 2) / 2
    rhs += sum((w[x] ** 2 for x in maps.a_neighbors[u] if x != v1 and x != v2), Fraction(0))
    for x in y1:
        rhs += Fraction(1, 2) * sum((w[z] ** 2 for z in maps.a_neighbors[x] if z != v1), Fraction(0))
    for x in y2:
        rhs += Fraction(1, 2) * sum((w[z] ** 2 for z in maps.a_neighbors[x] if z != v2), Fraction(0))
    return lhs > rhs


def trial_success_bound(t: int, m: int) -> Fraction:
    """Lower bound on one random coloring being injective on m fixed elements."""
    if m > t:
        return Fraction(0)
    p = Fraction(1)
    for i in range(m):
        p *= Fraction(t - i, t)
    return p


def repetitions_for(t: int, m: int, failure_prob: Fraction = Fraction(1, 1000)) -> int:
    """Repetitions so that all of them missing has probability <= failure_prob."""
    p = trial_success_bound(t, m)
    if p <= 0:
        raise InputError(f"support size {m} exceeds color count {t}")
    if p == 1:
        return 1
    reps = math.ceil(math.log(1 / float(failure_prob)) / -math.log1p(-float(p)))
    return max(1, reps)


def max_cycle_len_for(n: int) -> int:
    """Largest L with 2**L <= n**4, the cycle-length bound at graph size n."""
    if n <= 1:
        return 2
    L = 2
    while 2 ** (L + 1) <= n ** 4:
        L += 1
    return L


@dataclass
class ColorCodingParams:
    """Knobs for the circular search.

    mode "exhaustive" runs the complete DFS (the only option for inputs
    without set structure); mode "rand" draws `repetitions` uniform
    colorings of the universe into `t` colors and runs the colorful-cycle
    dynamic program per coloring.
    """

    t: int
    repetitions: int
    max_cycle_len: int
    mode: str = "exhaustive"
    y_cap: int = 3
    max_aux_vertices: int = 200_000
    max_aux_edge_checks: int = 2_000_000
    max_dp_states: int = 2_000_000
    max_dfs_nodes: int = 2_000_000

    def __post_init__(self):
        if self.t < 1 or self.max_cycle_len < 2 or self.repetitions < 1:
            raise InputError("need t >= 1, max_cycle_len >= 2, repetitions >= 1")
        if self.mode not in ("rand", "exhaustive"):
            raise InputError(f"unknown circular-search mode {self.mode!r}")

    @staticmethod
    def defaults(
        g: ConflictGraph,
        inst: Optional[PackingInstance] = None,
        mode: str = "exhaustive",
        failure_prob: Fraction = Fraction(1, 1000),
    ) -> "ColorCodingParams":
        n = max(2, g.n)
        L = max_cycle_len_for(g.n)
        if inst is None:
            return ColorCodingParams(t=1, repetitions=1, max_cycle_len=L, mode="exhaustive")
        k = inst.k
        in_use = len(set().union(*inst.sets)) if inst.sets else 1
        t = 4 * (k + 1) * k * math.ceil(math.log2(n))
        t = max(1, min(t, in_use))
        # Support of a short planted cycle: about six k-sets.
        m = min(t, 6 * k)
        reps = min(10_000, repetitions_for(t, m, failure_prob))
        return ColorCodingParams(t=t, repetitions=reps, max_cycle_len=L, mode=mode)


@dataclass(frozen=True)
class AuxVertex:
    anchor: int
    y: tuple[int, ...]


@dataclass(frozen=True)
class AuxEdge:
    """Edge induced by `inducer`; endpoint a sits at its heaviest anchor."""

    a: int
    b: int
    inducer: int


@dataclass
class AuxGraph:
    vertices: list[AuxVertex] = field(default_factory=list)
    edges: list[AuxEdge] = field(default_factory=list)
    incident: dict[int, list[int]] = field(default_factory=dict)
    elements_v: Optional[list[frozenset[int]]] = None
    elements_e: Optional[list[frozenset[int]]] = None
    notes: tuple[str, ...] = ()

    def add_vertex(self, v: AuxVertex, elements: Optional[frozenset[int]] = None) -> int:
        idx = len(self.vertices)
        self.vertices.append(v)
        self.incident[idx] = []
        if elements is not None:
            if self.elements_v is None:
                self.elements_v = []
            self.elements_v.append(elements)
        return idx

    def add_edge(self, a: int, b: int, inducer: int, elements: Optional[frozenset[int]] = None) -> int:
        idx = len(self.edges)
        self.edges.append(AuxEdge(a, b, inducer))
        self.incident[a].append(idx)
        self.incident[b].append(idx)
        if elements is not None:
            if self.elements_e is None:
                self.elements_e = []
            self.elements_e.append(elements)
        return idx

    def parallel_groups(self) -> dict[frozenset[int], list[int]]:
        groups: dict[frozenset[int], list[int]] = {}
        for i, e in enumerate(self.edges):
            groups.setdefault(frozenset((e.a, e.b)), []).append(i)
        return groups


def _independent_subsets(g: ConflictGraph, cands: Sequence[int], cap: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]

    def extend(start: int, chosen: list[int]):
        for i in range(start, len(cands)):
            v = cands[i]
            if any(g.has_edge(v, u) for u in chosen):
                continue
            chosen.append(v)
            out.append(tuple(chosen))
            if len(chosen) < cap:
                extend(i + 1, chosen)
            chosen.pop()

    if cap >= 1:
        extend(0, [])
    return out


def build_aux_graph(
    g: ConflictGraph,
    a: Solution,
    maps: AnchorMaps,
    params: ColorCodingParams,
    inst: Optional[PackingInstance] = None,
    d: Optional[int] = None,
) -> AuxGraph:
    """Materialize the restricted auxiliary multigraph.

    Companion-set candidates at each anchor are the outside vertices mapped
    there that send strictly positive charge; the full vertex set over all
    independent companion sets is infeasible, and the restriction preserves
    the improvements the fixed-point analysis constructs.
    """
    d_eff = d if d is not None else (g.d if g.d is not None else g.n + 1)
    y_cap = min(params.y_cap, d_eff - 1)
    notes = []
    if y_cap < d_eff - 1:
        notes.append(f"aux companion sets capped at {y_cap} (claw bound allows {d_eff - 1})")

    anchored: dict[int, list[int]] = {}
    for u in sorted(maps.heaviest):
        if charge_to_anchor(g, maps, u) > 0:
            anchored.setdefault(maps.heaviest[u], []).append(u)

    h = AuxGraph(notes=tuple(notes))
    with_elements = inst is not None
    vid_by_anchor: dict[int, list[int]] = {}
    for v in sorted(a.members):
        subsets = _independent_subsets(g, anchored.get(v, []), y_cap)
        subsets.sort(key=lambda y: (-len(y), y))
        ids = []
        for y in subsets:
            if len(h.vertices) >= params.max_aux_vertices:
                raise SearchIncompleteError(
                    f"aux graph exceeded {params.max_aux_vertices} vertices"
                )
            elems = None
            if with_elements:
                elems = frozenset(e for x in y for e in inst.sets[x])
            ids.append(h.add_vertex(AuxVertex(v, y), elems))
        vid_by_anchor[v] = ids

    checks = 0
    for u in sorted(maps.second):
        v1 = maps.heaviest[u]
        v2 = maps.second[u]
        for ia in vid_by_anchor.get(v1, []):
            y1 = h.vertices[ia].y
            if u in y1 or any(g.has_edge(u, x) for x in y1):
                continue
            for ib in vid_by_anchor.get(v2, []):
                y2 = h.vertices[ib].y
                if u in y2 or any(g.has_edge(u, x) for x in y2):
                    continue
                if any(g.has_edge(x, z) for x in y1 for z in y2):
                    continue
                checks += 1
                if checks > params.max_aux_edge_checks:
                    raise SearchIncompleteError(
                        f"aux graph exceeded {params.max_aux_edge_checks} edge checks"
                    )
                if aux_edge_check(u, y1, y2, g, a, maps):
                    elems = frozenset(inst.sets[u]) if with_elements else None
                    h.add_edge(ia, ib, u, elems)
    return h


def _supports_compatible(g: ConflictGraph, support: set[int], new: Iterable[int]) -> bool:
    for x in new:
        if x in support or (g.adj_sets[x] & support):
            return False
    return True


def _assemble(
    g: ConflictGraph,
    a: Solution,
    h: AuxGraph,
    vertex_order: Sequence[int],
    edge_order: Sequence[int],
) -> Improvement:
    u_order = tuple(h.edges[e].inducer for e in edge_order)
    anchors = tuple(h.vertices[i].anchor for i in vertex_order)
    ys = tuple((h.vertices[i].anchor, h.vertices[i].y) for i in vertex_order)
    x = set(u_order)
    for _, y in ys:
        x.update(y)
    removed = neighborhood(x, a.members, g)
    return Improvement(
        frozenset(x),
        frozenset(removed),
        Circular(u=u_order, cycle_vertices=anchors, y=ys),
    )


def _two_cycle_candidates(g: ConflictGraph, h: AuxGraph) -> Iterator[tuple[list[int], list[int]]]:
    for pair in sorted(h.parallel_groups().values(), key=lambda idxs: idxs[0]):
        for i in range(len(pair)):
            for j in range(i + 1, len(pair)):
                e1, e2 = h.edges[pair[i]], h.edges[pair[j]]
                support = set(h.vertices[e1.a].y) | set(h.vertices[e1.b].y) | {e1.inducer}
                if not _supports_compatible(g, support, [e2.inducer]):
                    continue
                yield [e1.a, e1.b], [pair[i], pair[j]]


def _dfs_cycles(
    g: ConflictGraph,
    h: AuxGraph,
    max_len: int,
    budget: int,
) -> Iterator[tuple[list[int], list[int]]]:
    """Enumerate simple cycles of length 3..max_len with pairwise-compatible supports.

    H-vertices on a cycle must carry distinct anchors, and the union of the
    inducing vertices and companion sets must stay independent; both are
    checked incrementally so pruned prefixes cannot extend to valid cycles.
    """
    nodes = 0

    def walk(start: int, current: int, vseq: list[int], eseq: list[int],
             anchors: set[int], support: set[int]) -> Iterator[tuple[list[int], list[int]]]:
        nonlocal nodes
        for ei in h.incident[current]:
            nodes += 1
            if nodes > budget:
                raise SearchIncompleteError(f"cycle DFS exceeded {budget} nodes")
            e = h.edges[ei]
            nxt = e.b if e.a == current else e.a
            if ei in eseq:
                continue
            if nxt == start:
                if len(eseq) >= 2 and _supports_compatible(g, support, [e.inducer]):
                    yield vseq[:], eseq + [ei]
                continue
            if nxt < start or nxt in vseq:
                continue
            av = h.vertices[nxt]
            if av.anchor in anchors:
                continue
            new = [e.inducer] + [x for x in av.y]
            if not _supports_compatible_seq(g, support, new):
                continue
            if len(eseq) + 1 >= max_len:
                continue
            anchors.add(av.anchor)
            support.update(new)
            yield from walk(start, nxt, vseq + [nxt], eseq + [ei], anchors, support)
            anchors.remove(av.anchor)
            support.difference_update(new)

    for s in range(len(h.vertices)):
        av = h.vertices[s]
        yield from walk(s, s, [s], [], {av.anchor}, set(av.y))


def _supports_compatible_seq(g: ConflictGraph, support: set[int], new: Sequence[int]) -> bool:
    for i, x in enumerate(new):
        if x in support or (g.adj_sets[x] & support):
            return False
        for z in new[i + 1:]:
            if z == x or g.has_edge(x, z):
                return False
    return True


def _color_mask(coloring: Sequence[int], elements: frozenset[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << coloring[e]
    return mask


def _colorful_candidates(
    h: AuxGraph,
    vmask: Sequence[int],
    emask: Sequence[int],
    max_len: int,
    state_budget: int,
) -> Iterator[tuple[list[int], list[int]]]:
    """Sparse table of colorful-path states, yielding closed candidates.

    Path(s, t, C, i) is reachable iff a walk of i edges from s to t exists
    whose vertex and edge color sets are pairwise disjoint with union C;
    backlinks recover the walk. Candidates are emitted when a closing edge
    with fresh colors exists, then reduced to simple cycles by the caller.
    """
    alive = [
        i
        for i, e in enumerate(h.edges)
        if not (emask[i] & vmask[e.a]) and not (emask[i] & vmask[e.b])
        and not (vmask[e.a] & vmask[e.b])
    ]
    by_endpoint: dict[frozenset[int], list[int]] = {}
    incident: dict[int, list[int]] = {i: [] for i in range(len(h.vertices))}
    for ei in alive:
        e = h.edges[ei]
        by_endpoint.setdefault(frozenset((e.a, e.b)), []).append(ei)
        incident[e.a].append(ei)
        incident[e.b].append(ei)

    # states[(s, t, mask)] = (edge to next vertex, next vertex, previous mask)
    layer: dict[tuple[int, int, int], tuple[Optional[int], Optional[int], int]] = {}
    for v in range(len(h.vertices)):
        layer[(v, v, vmask[v])] = (None, None, 0)
    states = 0
    all_layers = [layer]

    def recover(s: int, t: int, mask: int, i: int) -> tuple[list[int], list[int]]:
        vseq, eseq = [s], []
        cur, cmask = s, mask
        for lvl in range(i, 0, -1):
            ei, nxt, pmask = all_layers[lvl][(cur, t, cmask)]
            eseq.append(ei)
            vseq.append(nxt)
            cur, cmask = nxt, pmask
        return vseq, eseq

    for i in range(1, max_len):
        newlayer: dict[tuple[int, int, int], tuple[int, int, int]] = {}
        for (v, t, cmask) in all_layers[i - 1]:
            for ei in incident[v]:
                e = h.edges[ei]
                s = e.b if e.a == v else e.a
                add = emask[ei] | vmask[s]
                if add & cmask:
                    continue
                key = (s, t, cmask | add)
                if key in newlayer:
                    continue
                states += 1
                if states > state_budget:
                    raise SearchIncompleteError(f"colorful DP exceeded {state_budget} states")
                newlayer[key] = (ei, v, cmask)
        all_layers.append(newlayer)
        for (s, t, cmask) in newlayer:
            if i < 2 or s == t:
                continue
            for ej in by_endpoint.get(frozenset((s, t)), []):
                if emask[ej] & cmask:
                    continue
                vseq, eseq = recover(s, t, cmask, i)
                yield vseq, eseq + [ej]
        if not newlayer:
            break


def _reduce_to_simple_cycle(
    vseq: list[int], eseq: list[int]
) -> tuple[list[int], list[int]]:
    """Cut a closed walk with distinct edges down to a simple cycle."""
    while True:
        seen = {}
        cut = None
        for pos, v in enumerate(vseq):
            if v in seen:
                cut = (seen[v], pos)
                break
            seen[v] = pos
        if cut is None:
            return vseq, eseq
        p, q = cut
        vseq = vseq[p:q]
        eseq = eseq[p:q]


def colorful_cycle_dp(
    h: AuxGraph,
    coloring: Sequence[int],
    max_len: int,
    state_budget: int = 2_000_000,
) -> Optional[tuple[list[int], list[int]]]:
    """Find a colorful cycle of length 3..max_len in H under the coloring.

    Returns (vertex order, edge order) or None. Parallel-edge 2-cycles are
    the caller's separate scan; candidates that collapse to one are skipped
    here and the sweep continues, so completeness for lengths 3..max_len is
    unaffected.
    """
    if h.elements_v is None or h.elements_e is None:
        raise InputError("aux graph carries no element sets; colorful search unavailable")
    vmask = [_color_mask(coloring, els) for els in h.elements_v]
    emask = [_color_mask(coloring, els) for els in h.elements_e]
    for vseq, eseq in _colorful_candidates(h, vmask, emask, max_len, state_budget):
        cvseq, ceseq = _reduce_to_simple_cycle(vseq, eseq)
        if 3 <= len(ceseq) <= max_len:
            return cvseq, ceseq
    return None


def run_color_coding(
    g: ConflictGraph,
    a: Solution,
    maps: AnchorMaps,
    params: ColorCodingParams,
    inst: PackingInstance,
    rng: random.Random,
    h: Optional[AuxGraph] = None,
) -> Optional[Improvement]:
    """Randomized circular search: repeat (color universe, run the cycle DP).

    Sound in every trial; finds an existing improvement with probability at
    least the injectivity bound per trial, amplified over repetitions.
    """
    if inst is None:
        raise InputError("randomized circular search needs the packing instance")
    if h is None:
        h = build_aux_graph(g, a, maps, params, inst=inst)
    if not h.edges:
        return None
    max_len = min(params.max_cycle_len, max_cycle_len_for(g.n))
    vmask_src = h.elements_v
    emask_src = h.elements_e
    if vmask_src is None or emask_src is None:
        raise InputError("aux graph carries no element sets; colorful search unavailable")
    for _ in range(params.repetitions):
        coloring = [rng.randrange(params.t) for _ in range(inst.universe_size)]
        vmask = [_color_mask(coloring, els) for els in vmask_src]
        emask = [_color_mask(coloring, els) for els in emask_src]
        for vseq, eseq in _colorful_candidates(h, vmask, emask, max_len, params.max_dp_states):
            cvseq, ceseq = _reduce_to_simple_cycle(vseq, eseq)
            if not 3 <= len(ceseq) <= max_len:
                continue
            imp = _assemble(g, a, h, cvseq, ceseq)
            if validate_circular(g, a, maps, imp, d=g.d):
                return imp
    return None


def find_circular_improvement(
    g: ConflictGraph,
    a: Solution,
    maps: AnchorMaps,
    params: ColorCodingParams,
    inst: Optional[PackingInstance] = None,
    rng: Optional[random.Random] = None,
    d: Optional[int] = None,
) -> Optional[Improvement]:
    """Search for a circular improvement of w^2(A).

    Requires that no claw-shaped improvement exists (the anchor maps are
    then total). Parallel-edge 2-cycles are scanned first; longer cycles go
    through the exhaustive DFS or the color-coding search depending on
    params.mode. Every returned improvement is re-validated field by field.
    """
    h = build_aux_graph(g, a, maps, params, inst=inst, d=d)
    max_len = min(params.max_cycle_len, max_cycle_len_for(g.n))
    for vorder, eorder in _two_cycle_candidates(g, h):
        imp = _assemble(g, a, h, vorder, eorder)
        if validate_circular(g, a, maps, imp, d=d if d is not None else g.d):
            return imp
    if params.mode == "rand":
        if inst is None:
            raise InputError("randomized circular search needs the packing instance")
        return run_color_coding(g, a, maps, params, inst, rng or random.Random(0), h=h)
    for vorder, eorder in _dfs_cycles(g, h, max_len, params.max_dfs_nodes):
        imp = _assemble(g, a, h, vorder, eorder)
        if validate_circular(g, a, maps, imp, d=d if d is not None else g.d):
            return imp
    return None


def validate_circular(
    g: ConflictGraph,
    a: Solution,
    maps: AnchorMaps,
    imp: Improvement,
    d: Optional[int] = None,
) -> bool:
    """Re-validate a circular improvement field by field.

    Checks the cycle structure over distinct solution vertices, the
    companion-set decomposition and size bounds, the per-edge inequality,
    and the strict squared-weight gain.
    """
    kind = imp.kind
    if not isinstance(kind, Circular):
        return False
    x = imp.x
    if not x or (x & a.members) or not g.is_independent(x):
        return False
    if set(imp.removed) != neighborhood(x, a.members, g):
        return False
    u_list = list(kind.u)
    if len(u_list) < 2 or len(set(u_list)) != len(u_list):
        return False
    if 2 ** len(u_list) > max(2, g.n) ** 4:
        return False
    if not set(u_list) <= x:
        return False
    for u in u_list:
        if u not in maps.second:
            return False
    # The induced edges must trace the recorded cycle.
    cyc = list(kind.cycle_vertices)
    if len(cyc) != len(u_list) or len(set(cyc)) != len(cyc):
        return False
    deg: dict[int, int] = {}
    for u in u_list:
        for v in (maps.heaviest[u], maps.second[u]):
            deg[v] = deg.get(v, 0) + 1
    if set(deg) != set(cyc) or any(c != 2 for c in deg.values()):
        return False
    for i, u in enumerate(u_list):
        ends = {cyc[i], cyc[(i + 1) % len(cyc)]}
        if {maps.heaviest[u], maps.second[u]} != ends:
            return False
    # Companion decomposition: X = U | union of recorded Y over cycle vertices.
    y_map = kind.y_map()
    if set(y_map) != set(cyc):
        return False
    d_eff = d if d is not None else (g.d if g.d is not None else g.n + 1)
    rest = x - set(u_list)
    for v, ys in y_map.items():
        if len(ys) > d_eff - 1:
            return False
        if any(x_ not in rest or maps.heaviest[x_] != v for x_ in ys):
            return False
    y_union = set().union(*y_map.values()) if y_map else set()
    if y_union != rest:
        return False
    for u in u_list:
        if not aux_edge_check(u, y_map[maps.heaviest[u]], y_map[maps.second[u]], g, a, maps):
            return False
    return g.squared_weight_of(x) > g.squared_weight_of(imp.removed)
