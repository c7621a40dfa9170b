"""Shared fixtures and independent brute-force oracles for the test suite.

The oracles here deliberately avoid the package's search code paths: plain
subset enumeration over bitmasks or recursive walks, so that expected values
are computed by a second route.
"""

from fractions import Fraction
from itertools import combinations

import pytest

from clawpack.instances import ConflictGraph


def brute_force_mwis(g: ConflictGraph) -> tuple[Fraction, frozenset[int]]:
    """Best independent set by full subset enumeration (n <= 20)."""
    assert g.n <= 20
    best_w, best = Fraction(0), frozenset()
    adj_masks = [0] * g.n
    for u in range(g.n):
        for v in g.adj[u]:
            adj_masks[u] |= 1 << v
    for mask in range(1 << g.n):
        ok = True
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            if adj_masks[v] & mask:
                ok = False
                break
            m &= m - 1
        if not ok:
            continue
        w = sum((g.weights[v] for v in range(g.n) if mask >> v & 1), Fraction(0))
        if w > best_w:
            best_w = w
            best = frozenset(v for v in range(g.n) if mask >> v & 1)
    return best_w, best


def brute_force_improvement_exists(g: ConflictGraph, members: set[int], alpha: int, cap: int) -> bool:
    """Any independent X outside `members`, |X| <= cap, with
    w^alpha(X) > w^alpha(N(X, members))? Exact integer-exponent arithmetic."""
    outside = [v for v in range(g.n) if v not in members]

    def power(v):
        return g.weights[v] ** alpha

    for size in range(1, cap + 1):
        for combo in combinations(outside, size):
            if not g.is_independent(combo):
                continue
            removed = set()
            for x in combo:
                removed |= g.adj_sets[x] & members
            if sum(map(power, combo), Fraction(0)) > sum(map(power, removed), Fraction(0)):
                return True
    return False


def enumerate_colorful_cycles(h, vmask, emask, max_len):
    """All simple cycles of length 2..max_len in an aux graph whose vertex and
    edge color masks are pairwise disjoint. Returns a list of edge-index tuples."""
    found = []
    n = len(h.vertices)
    incident = h.incident

    def ok_to_add(used_mask, add):
        return not (used_mask & add)

    def walk(start, current, vseq, eseq, used_mask):
        for ei in incident[current]:
            if ei in eseq:
                continue
            e = h.edges[ei]
            nxt = e.b if e.a == current else e.a
            if nxt == start:
                if len(eseq) >= 1 and ok_to_add(used_mask, emask[ei]):
                    cyc = tuple(eseq + [ei])
                    if 2 <= len(cyc) <= max_len:
                        found.append(cyc)
                continue
            if nxt < start or nxt in vseq:
                continue
            add_e, add_v = emask[ei], vmask[nxt]
            # pairwise disjointness, not just union-disjointness
            if (used_mask & add_e) or (used_mask & add_v) or (add_e & add_v):
                continue
            if len(eseq) + 1 >= max_len:
                continue
            walk(start, nxt, vseq + [nxt], eseq + [ei], used_mask | add_e | add_v)

    for s in range(n):
        walk(s, s, [s], [], vmask[s])
    return found


def circular_improvement_exists_bruteforce(g, a, maps, d, positive_only=False, y_cap=None) -> bool:
    """Decide by full enumeration whether any cycle-decomposable improvement
    exists: try every independent X outside the solution and every subset U
    of X as the cycle-inducing set, checking the decomposition directly.

    positive_only/y_cap mirror the solver's companion-candidate restriction,
    for exact completeness comparisons against the restricted search."""
    from clawpack.circular import aux_edge_check, charge_to_anchor, max_cycle_len_for

    members = a.members
    outside = [v for v in range(g.n) if v not in members]
    max_u = max_cycle_len_for(g.n)
    y_limit = d - 1 if y_cap is None else min(d - 1, y_cap)

    def is_cycle(u_set):
        deg = {}
        for u in u_set:
            for v in (maps.heaviest[u], maps.second[u]):
                deg[v] = deg.get(v, 0) + 1
        if any(c != 2 for c in deg.values()):
            return None
        # connectivity of the edge multiset
        verts = sorted(deg)
        adj = {v: [] for v in verts}
        for u in u_set:
            a1, a2 = maps.heaviest[u], maps.second[u]
            adj[a1].append(a2)
            adj[a2].append(a1)
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return verts if len(seen) == len(verts) else None

    for size in range(2, len(outside) + 1):
        for x_tuple in combinations(outside, size):
            if not g.is_independent(x_tuple):
                continue
            x = set(x_tuple)
            if g.squared_weight_of(x) <= g.squared_weight_of(
                set().union(*(g.adj_sets[v] & members for v in x))
            ):
                continue
            cands = [u for u in x_tuple if u in maps.second]
            for u_size in range(2, min(len(cands), max_u) + 1):
                for u_set in combinations(cands, u_size):
                    cyc = is_cycle(u_set)
                    if cyc is None:
                        continue
                    y_map = {v: frozenset() for v in cyc}
                    ok = True
                    for v in x - set(u_set):
                        anchor = maps.heaviest[v]
                        if anchor not in y_map:
                            ok = False
                            break
                        if positive_only and charge_to_anchor(g, maps, v) <= 0:
                            ok = False
                            break
                        y_map[anchor] |= {v}
                    if not ok or any(len(ys) > y_limit for ys in y_map.values()):
                        continue
                    if all(
                        aux_edge_check(u, y_map[maps.heaviest[u]], y_map[maps.second[u]], g, a, maps)
                        for u in u_set
                    ):
                        return True
    return False


@pytest.fixture
def unit_path3():
    # path a-b-c with unit weights
    return ConflictGraph.from_edges(3, [(0, 1), (1, 2)], [1, 1, 1], d=3)
