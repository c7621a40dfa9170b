"""Instance families: the tight bipartite example, alternating cycles, the
incidence lower-bound construction over high-girth regular graphs, and
seeded random packing instances.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .instances import (
    BudgetExceededError,
    ConflictGraph,
    InputError,
    PackingInstance,
    Solution,
    build_conflict_graph,
)


def berman_tight_instance(d: int) -> PackingInstance:
    """Packing form of the tight example: one set per element of the small
    side, one per singleton/pair on the big side, with fresh tag elements so
    the conflict graph is exactly the bipartite incidence pattern.

    Ids: 0..d-2 are the small side (elements 1..d-1), then the singletons in
    element order, then the pairs in lexicographic order. Unit weights.
    """
    if d < 3:
        raise InputError("need d >= 3")
    elems = list(range(1, d))
    b_labels: list[tuple[int, ...]] = [(i,) for i in elems]
    b_labels += [(i, j) for i in elems for j in elems if i < j]
    tags: dict[tuple[int, int], int] = {}
    for b_idx, label in enumerate(b_labels):
        for a in label:
            tags[(a, b_idx)] = len(tags)
    a_sets = [[tags[(a, b_idx)] for b_idx, label in enumerate(b_labels) if a in label] for a in elems]
    b_sets = [[tags[(a, b_idx)] for a in label] for b_idx, label in enumerate(b_labels)]
    sets = a_sets + b_sets
    return PackingInstance.build(len(tags), sets, [Fraction(1)] * len(sets), k=d - 1)


def gen_berman_tight(d: int) -> tuple[ConflictGraph, Solution, Solution]:
    """The tight instance's conflict graph with both sides as solutions."""
    inst = berman_tight_instance(d)
    g = build_conflict_graph(inst)
    a = Solution.of(g, range(d - 1))
    b = Solution.of(g, range(d - 1, g.n))
    return g, a, b


def gen_alternating_cycle(n_pairs: int, d: int, eps: Fraction) -> tuple[ConflictGraph, Solution, Solution]:
    """Even cycle with weights alternating between 2/(d-1-eps) and 1.

    Returns (graph, light side, heavy side); the weight ratio between the
    sides is exactly (d-1-eps)/2.
    """
    eps = Fraction(eps)
    if n_pairs < 2 or d < 4 or not 0 < eps < 1:
        raise InputError("need n_pairs >= 2, d >= 4, 0 < eps < 1")
    n = 2 * n_pairs
    light = Fraction(2) / (d - 1 - eps)
    weights = [light if v % 2 == 0 else Fraction(1) for v in range(n)]
    edges = [(v, (v + 1) % n) for v in range(n)]
    g = ConflictGraph.from_edges(n, edges, weights, d=d)
    a = Solution.of(g, range(0, n, 2))
    astar = Solution.of(g, range(1, n, 2))
    return g, a, astar


def girth(g: ConflictGraph) -> float:
    """Length of a shortest cycle via per-root breadth-first search;
    math.inf for forests."""
    best = math.inf
    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        queue = [root]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            if 2 * dist[x] + 1 >= best:
                break
            for y in g.adj[x]:
                if y == parent[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
    return best


def _unit_graph(n: int, edges) -> ConflictGraph:
    return ConflictGraph.from_edges(n, edges, [Fraction(1)] * n)


def petersen_graph() -> ConflictGraph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return _unit_graph(10, edges)


def complete_graph(n: int) -> ConflictGraph:
    return _unit_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(k: int) -> ConflictGraph:
    return _unit_graph(2 * k, [(i, k + j) for i in range(k) for j in range(k)])


def projective_plane_incidence(q: int) -> ConflictGraph:
    """Point-line incidence graph of the projective plane of prime order q:
    (q+1)-regular, girth 6, 2(q^2+q+1) vertices. q=2 gives the Heawood graph."""
    for p in range(2, q):
        if q % p == 0:
            raise InputError(f"order {q} is not prime")
    reps = [(1, y, z) for y in range(q) for z in range(q)]
    reps += [(0, 1, z) for z in range(q)]
    reps += [(0, 0, 1)]
    npts = len(reps)
    edges = []
    for i, pt in enumerate(reps):
        for j, ln in enumerate(reps):
            if sum(a * b for a, b in zip(pt, ln)) % q == 0:
                edges.append((i, npts + j))
    return _unit_graph(2 * npts, edges)


def heawood_graph() -> ConflictGraph:
    return projective_plane_incidence(2)


def _is_regular(g: ConflictGraph, k: int) -> bool:
    return all(g.degree(v) == k for v in range(g.n))


def _random_regular(n: int, k: int, rng: random.Random) -> Optional[ConflictGraph]:
    """One pairing-model draw; None when it produces loops or parallels."""
    stubs = [v for v in range(n) for _ in range(k)]
    rng.shuffle(stubs)
    edges = set()
    for i in range(0, len(stubs), 2):
        u, v = stubs[i], stubs[i + 1]
        if u == v:
            return None
        key = (min(u, v), max(u, v))
        if key in edges:
            return None
        edges.add(key)
    return _unit_graph(n, sorted(edges))


def gen_high_girth_regular(
    k: int, l: int, seed: int = 0, budget: int = 20_000, catalog: bool = True
) -> ConflictGraph:
    """A simple k-regular graph of girth at least l.

    Catalog first (complete, complete bipartite, Petersen, projective-plane
    incidence for prime k-1), then seeded pairing-model rejection. The
    result is re-verified for regularity and girth before returning.
    """
    if k < 3:
        raise InputError("need k >= 3")
    if l < 3:
        l = 3
    g: Optional[ConflictGraph] = None
    if not catalog:
        pass
    elif l == 3:
        g = complete_graph(k + 1)
    elif l == 4:
        g = complete_bipartite(k)
    elif l == 5 and k == 3:
        g = petersen_graph()
    elif l <= 6 and _is_prime(k - 1):
        g = projective_plane_incidence(k - 1)
    if g is None:
        rng = random.Random(seed)
        n = max(l + 1, 4 * k)
        if n * k % 2:
            n += 1
        for attempt in range(budget):
            cand = _random_regular(n, k, rng)
            if cand is not None and girth(cand) >= l:
                g = cand
                break
            if attempt and attempt % 2000 == 0:
                n += 2  # slightly larger graphs keep the expected cycle counts flat
        if g is None:
            raise BudgetExceededError(f"no {k}-regular graph of girth >= {l} within {budget} draws")
    if not _is_regular(g, k) or girth(g) < l:
        raise RuntimeError("generator postcondition failed")
    return g


def _is_prime(x: int) -> bool:
    if x < 2:
        return False
    return all(x % p for p in range(2, int(math.isqrt(x)) + 1))


@dataclass(frozen=True)
class LowerBoundParams:
    """Parameters of the incidence lower-bound family.

    eps_d, when omitted, becomes the largest value at most
    1 - (1 - eps/(d-1))**alpha whose reciprocal is an integer.
    """

    d: int
    alpha: Fraction
    eps: Fraction
    target_girth: int
    eps_d: Optional[Fraction] = None

    def __post_init__(self):
        if self.d < 3:
            raise InputError("need d >= 3")
        if not 0 < self.eps < 1:
            raise InputError("need 0 < eps < 1")
        if Fraction(self.alpha) <= 0:
            raise InputError("the incidence construction needs alpha > 0")

    def eps_prime_d(self) -> Fraction:
        """1 - (1 - eps/(d-1))**alpha, or an exact rational lower bound on it."""
        base = 1 - self.eps / (self.d - 1)
        alpha = Fraction(self.alpha)
        if alpha.denominator == 1:
            return 1 - base ** alpha.numerator
        with mpmath.workprec(200):
            val = 1 - mpmath.power(
                mpmath.mpf(base.numerator) / base.denominator,
                mpmath.mpf(alpha.numerator) / alpha.denominator,
            )
            lo = Fraction(int(mpmath.floor(val * 2 ** 80)), 2 ** 80)
        return lo

    def eps_d_value(self) -> Fraction:
        if self.eps_d is not None:
            e = Fraction(self.eps_d)
            if e <= 0 or (Fraction(1) / e).denominator != 1:
                raise InputError("1/eps_d must be a positive integer")
            if e > self.eps_prime_d():
                raise InputError("eps_d exceeds 1 - (1 - eps/(d-1))**alpha")
            return e
        ep = self.eps_prime_d()
        if ep <= 0:
            raise InputError("derived eps'_d is non-positive")
        return Fraction(1, math.ceil(Fraction(1) / ep))


def edge_side_weight(params: LowerBoundParams) -> Fraction:
    """(1 - eps_d)**(1/alpha): exact when 1/alpha is an integer, otherwise a
    high-precision rational approximation (documented, 2**-60 accurate)."""
    base = 1 - params.eps_d_value()
    inv = Fraction(1) / Fraction(params.alpha)
    if inv.denominator == 1:
        return base ** inv.numerator
    with mpmath.workprec(200):
        val = mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                           mpmath.mpf(inv.numerator) / inv.denominator)
        return Fraction(int(mpmath.floor(val * 2 ** 60)), 2 ** 60)


def gen_incidence_lowerbound(
    params: LowerBoundParams, h: ConflictGraph
) -> tuple[ConflictGraph, Solution, Solution]:
    """Incidence conflict graph of a (d-1)-regular graph of girth >= target.

    Vertices 0..n-1 mirror the vertices of h (weight 1); vertices n.. mirror
    its edges (weight (1-eps_d)**(1/alpha)); each edge vertex joins its two
    endpoints. Returns (graph, vertex side, edge side).
    """
    k = params.d - 1
    if not _is_regular(h, k):
        raise InputError(f"base graph is not {k}-regular")
    if girth(h) < params.target_girth:
        raise InputError(f"base graph has girth below {params.target_girth}")
    w_edge = edge_side_weight(params)
    h_edges = h.edges()
    n = h.n
    edges = []
    for idx, (u, v) in enumerate(h_edges):
        edges.append((u, n + idx))
        edges.append((v, n + idx))
    weights = [Fraction(1)] * n + [w_edge] * len(h_edges)
    g = ConflictGraph.from_edges(n + len(h_edges), edges, weights, d=params.d)
    a = Solution.of(g, range(n))
    astar = Solution.of(g, range(n, n + len(h_edges)))
    return g, a, astar


def gen_random_packing(
    n_sets: int,
    k: int,
    universe: int,
    weight_dist: tuple[str, object] = ("uniform", 10),
    seed: int = 0,
) -> PackingInstance:
    """Seeded random instance; sets are sampled without internal duplicates.

    weight_dist: ("uniform", W) draws integers 1..W; ("near-unit", eta)
    draws 1 + eta*j/100 for j in -100..100 with eta in (0,1).
    """
    if n_sets < 1 or k < 1 or universe < k:
        raise InputError("need n_sets >= 1 and universe >= k >= 1")
    kind, param = weight_dist
    rng = random.Random(seed)
    sets = []
    weights = []
    for _ in range(n_sets):
        size = rng.randint(1, k)
        sets.append(sorted(rng.sample(range(universe), size)))
        if kind == "uniform":
            weights.append(Fraction(rng.randint(1, int(param))))
        elif kind == "near-unit":
            eta = Fraction(param)
            if not 0 < eta < 1:
                raise InputError("near-unit eta must lie in (0,1)")
            weights.append(1 + eta * Fraction(rng.randint(-100, 100), 100))
        else:
            raise InputError(f"unknown weight distribution {kind!r}")
    return PackingInstance.build(universe, sets, weights, k)
