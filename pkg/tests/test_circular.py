import random
from fractions import Fraction

import pytest

from conftest import enumerate_colorful_cycles

from clawpack.circular import (
    AuxGraph,
    AuxVertex,
    ColorCodingParams,
    aux_edge_check,
    build_anchor_maps,
    colorful_cycle_dp,
    find_circular_improvement,
    max_cycle_len_for,
    repetitions_for,
    run_color_coding,
    trial_success_bound,
    validate_circular,
)
from clawpack.generators import berman_tight_instance, gen_berman_tight
from clawpack.instances import (
    ConflictGraph,
    ContractError,
    InputError,
    PackingInstance,
    Solution,
    build_conflict_graph,
)
from clawpack.oracle import exhaustive_improvement_search


def berman_setup(d=4):
    inst = berman_tight_instance(d)
    g = build_conflict_graph(inst)
    a = Solution.of(g, range(d - 1))
    return inst, g, a


def test_anchor_maps_weighted():
    g = ConflictGraph.from_edges(3, [(2, 0), (2, 1)], [5, 3, 1], d=3)
    a = Solution.of(g, {0, 1})
    maps = build_anchor_maps(g, a)
    assert maps.heaviest[2] == 0 and maps.second[2] == 1


def test_anchor_maps_tie_to_lowest_id():
    g = ConflictGraph.from_edges(3, [(2, 0), (2, 1)], [5, 5, 1], d=3)
    a = Solution.of(g, {0, 1})
    maps = build_anchor_maps(g, a)
    assert maps.heaviest[2] == 0 and maps.second[2] == 1


def test_anchor_maps_berman_pair():
    _, g, a = berman_setup(4)
    maps = build_anchor_maps(g, a)
    # first pair-set vertex (elements 1,2) anchors at element vertices 0 then 1
    assert maps.heaviest[6] == 0 and maps.second[6] == 1


def test_anchor_maps_require_maximal():
    g = ConflictGraph.from_edges(2, [], [1, 1], d=3)
    a = Solution.of(g, {0})
    with pytest.raises(ContractError):
        build_anchor_maps(g, a)


def test_aux_edge_check_berman_values():
    _, g, a = berman_setup(4)
    maps = build_anchor_maps(g, a)
    # pair {1,2} with both singleton companions: 1 + 1 > 1
    assert aux_edge_check(6, (3,), (4,), g, a, maps)
    # empty companions: 1 > 1 fails
    assert not aux_edge_check(6, (), (), g, a, maps)


def test_aux_edge_check_dominated():
    g = ConflictGraph.from_edges(3, [(2, 0), (2, 1)], [10, 10, 1], d=3)
    a = Solution.of(g, {0, 1})
    maps = build_anchor_maps(g, a)
    assert not aux_edge_check(2, (), (), g, a, maps)


def test_aux_edge_check_plain_arithmetic():
    g = ConflictGraph.from_edges(3, [(2, 0), (2, 1)], [2, 2, 3], d=3)
    a = Solution.of(g, {0, 1})
    maps = build_anchor_maps(g, a)
    # 9 > (4+4)/2 = 4
    assert aux_edge_check(2, (), (), g, a, maps)


def test_find_circular_berman_full_swap():
    _, g, a = berman_setup(4)
    maps = build_anchor_maps(g, a)
    imp = find_circular_improvement(g, a, maps, ColorCodingParams.defaults(g))
    assert imp is not None
    assert imp.x == frozenset(range(3, 9))
    assert imp.removed == frozenset(range(3))
    assert validate_circular(g, a, maps, imp, d=4)
    # cross-check against the complete generic search
    assert exhaustive_improvement_search(g, a, Fraction(2), 6) is not None


def test_forest_aux_graph_no_cycle():
    # two stars: aux graph has no cycles, search must return None (complete)
    g = ConflictGraph.from_edges(
        6, [(2, 0), (2, 1), (3, 0), (4, 1), (5, 0)], [1, 1, 1, 1, 1, 1], d=4
    )
    a = Solution.of(g, {0, 1})
    maps = build_anchor_maps(g, a)
    assert find_circular_improvement(g, a, maps, ColorCodingParams.defaults(g)) is None


def test_parallel_edges_two_cycle():
    # universe {0,1,2,3}: solution sets a1={0,2}, a2={1,3}; heavy disjoint
    # u1={0,1}, u2={2,3} each meeting both -> parallel aux edges -> 2-cycle
    inst = PackingInstance.build(
        4, [[0, 2], [1, 3], [0, 1], [2, 3]], [2, 2, 3, 3], k=2
    )
    g = build_conflict_graph(inst)
    a = Solution.of(g, {0, 1})
    maps = build_anchor_maps(g, a)
    imp = find_circular_improvement(g, a, maps, ColorCodingParams.defaults(g), inst=inst)
    assert imp is not None
    assert imp.x == frozenset({2, 3})
    assert len(imp.kind.u) == 2
    assert validate_circular(g, a, maps, imp, d=g.d)
    assert exhaustive_improvement_search(g, a, Fraction(2), 2) is not None


def synthetic_aux(n_vertices, edges, v_elems, e_elems):
    h = AuxGraph()
    for i in range(n_vertices):
        h.add_vertex(AuxVertex(anchor=i, y=()), elements=frozenset(v_elems[i]))
    for (a, b), els in zip(edges, e_elems):
        h.add_edge(a, b, inducer=100 + len(h.edges), elements=frozenset(els))
    return h


def test_dp_triangle_disjoint_colors():
    h = synthetic_aux(
        3,
        [(0, 1), (1, 2), (2, 0)],
        v_elems=[{0}, {1}, {2}],
        e_elems=[{3}, {4}, {5}],
    )
    coloring = list(range(6))
    got = colorful_cycle_dp(h, coloring, max_len=6)
    assert got is not None
    vs, es = got
    assert sorted(es) == [0, 1, 2]


def test_dp_shared_color_blocks():
    h = synthetic_aux(
        3,
        [(0, 1), (1, 2), (2, 0)],
        v_elems=[{0}, {1}, {2}],
        e_elems=[{3}, {4}, {3}],  # two edges share an element
    )
    coloring = list(range(5))
    assert colorful_cycle_dp(h, coloring, max_len=6) is None


def test_dp_skips_degenerate_walks_over_parallel_edges():
    # four parallel edges with pairwise fresh colors admit colorful closed
    # walks of length 4 but no simple cycle of length >= 3; the DP must not
    # report those walks (parallel pairs are the separate 2-cycle scan's job)
    h = synthetic_aux(
        2,
        [(0, 1), (0, 1), (0, 1), (0, 1)],
        v_elems=[set(), set()],
        e_elems=[{0}, {1}, {2}, {3}],
    )
    assert colorful_cycle_dp(h, [0, 1, 2, 3], max_len=8) is None


def test_dp_agrees_with_enumeration_on_planted_cycles():
    rng = random.Random(7)
    agreements = 0
    for trial in range(60):
        n = rng.randint(4, 12)
        elems_per = 2
        v_elems = []
        e_elems = []
        next_el = 0
        for _ in range(n):
            v_elems.append(set(range(next_el, next_el + rng.randint(0, elems_per))))
            next_el += len(v_elems[-1])
        edges = []
        # plant a cycle over a random subset, plus noise edges
        cyc = rng.sample(range(n), rng.randint(3, min(6, n)))
        for i in range(len(cyc)):
            edges.append((cyc[i], cyc[(i + 1) % len(cyc)]))
        for _ in range(rng.randint(0, 4)):
            a, b = rng.randrange(n), rng.randrange(n)
            if a != b:
                edges.append((a, b))
        for _ in edges:
            e_elems.append(set(range(next_el, next_el + rng.randint(1, elems_per))))
            next_el += elems_per
        h = synthetic_aux(n, edges, v_elems, e_elems)
        t = max(1, next_el)
        coloring = [rng.randrange(t) for _ in range(next_el)]
        vmask = [_mask(coloring, h.elements_v[i]) for i in range(n)]
        emask = [_mask(coloring, h.elements_e[i]) for i in range(len(edges))]
        expect = [c for c in enumerate_colorful_cycles(h, vmask, emask, 8) if len(c) >= 3]
        got = colorful_cycle_dp(h, coloring, max_len=8)
        assert (got is not None) == bool(expect)
        if got is not None:
            vs, es = got
            used = 0
            for i, v in enumerate(vs):
                assert used & vmask[v] == 0
                used |= vmask[v]
            for e in es:
                assert used & emask[e] == 0
                used |= emask[e]
        agreements += 1
    assert agreements == 60


def _mask(coloring, els):
    m = 0
    for e in els:
        m |= 1 << coloring[e]
    return m


def test_run_color_coding_finds_planted_improvement():
    inst, g, a = berman_setup(4)
    maps = build_anchor_maps(g, a)
    params = ColorCodingParams(t=32, repetitions=64, max_cycle_len=12, mode="rand")
    wins = 0
    for trial in range(30):
        imp = run_color_coding(g, a, maps, params, inst, random.Random(trial))
        if imp is not None:
            assert validate_circular(g, a, maps, imp, d=4)
            wins += 1
    assert wins == 30


def test_run_color_coding_soundness_no_improvement():
    inst, g, _ = berman_setup(4)
    b = Solution.of(g, range(3, 9))
    maps = build_anchor_maps(g, b)
    params = ColorCodingParams(t=16, repetitions=20, max_cycle_len=12, mode="rand")
    assert run_color_coding(g, b, maps, params, inst, random.Random(1)) is None


def test_randomized_mode_unavailable_without_sets():
    g, a, _ = gen_berman_tight(4)
    maps = build_anchor_maps(g, a)
    params = ColorCodingParams(t=8, repetitions=4, max_cycle_len=8, mode="rand")
    with pytest.raises(InputError):
        find_circular_improvement(g, a, maps, params, inst=None)


def test_exhaustive_agrees_with_randomized_positive():
    inst, g, a = berman_setup(5)
    maps = build_anchor_maps(g, a)
    ex = find_circular_improvement(g, a, maps, ColorCodingParams.defaults(g), inst=inst)
    rparams = ColorCodingParams(t=32, repetitions=64, max_cycle_len=12, mode="rand")
    rd = run_color_coding(g, a, maps, rparams, inst, random.Random(5))
    assert ex is not None and rd is not None


def test_trial_bound_and_repetitions():
    p = trial_success_bound(32, 8)
    assert p == Fraction(828316125, 2 ** 31)
    assert 0.38 < float(p) < 0.39
    assert repetitions_for(32, 8, Fraction(1, 1000)) <= 64
    assert trial_success_bound(4, 5) == 0
    with pytest.raises(InputError):
        repetitions_for(4, 5)


def test_max_cycle_len_formula():
    assert max_cycle_len_for(9) == 12  # 2^12 <= 9^4 < 2^13
    assert max_cycle_len_for(2) == 4
    assert max_cycle_len_for(1) == 2


def test_improvement_chain_recomputed_term_by_term():
    # the per-edge inequalities must sum to the strict overall gain:
    # w2(X) > w2(cycle vertices) + spill terms >= w2(N(X,A))
    _, g, a = berman_setup(4)
    maps = build_anchor_maps(g, a)
    imp = find_circular_improvement(g, a, maps, ColorCodingParams.defaults(g))
    k = imp.kind
    y = k.y_map()
    # every cycle vertex occurs exactly twice among the anchor pairs
    occurrences = {}
    for u in k.u:
        for v in (maps.heaviest[u], maps.second[u]):
            occurrences[v] = occurrences.get(v, 0) + 1
    assert occurrences == {v: 2 for v in k.cycle_vertices}
    mid = g.squared_weight_of(k.cycle_vertices)
    for u in k.u:
        mid += g.squared_weight_of(
            x for x in maps.a_neighbors[u] if x not in (maps.heaviest[u], maps.second[u])
        )
    for v, ys in y.items():
        for x in ys:
            mid += g.squared_weight_of(z for z in maps.a_neighbors[x] if z != v)
    assert g.squared_weight_of(imp.x) > mid >= g.squared_weight_of(imp.removed)


@pytest.mark.parametrize("fixture", ["berman4", "berman5", "parallel", "forest"])
def test_exhaustive_mode_matches_bruteforce_existence(fixture):
    from conftest import circular_improvement_exists_bruteforce

    if fixture in ("berman4", "berman5"):
        _, g, a = berman_setup(4 if fixture == "berman4" else 5)
    elif fixture == "parallel":
        inst = PackingInstance.build(4, [[0, 2], [1, 3], [0, 1], [2, 3]], [2, 2, 3, 3], k=2)
        g = build_conflict_graph(inst)
        a = Solution.of(g, {0, 1})
    else:
        g = ConflictGraph.from_edges(
            6, [(2, 0), (2, 1), (3, 0), (4, 1), (5, 0)], [1, 1, 1, 1, 1, 1], d=4
        )
        a = Solution.of(g, {0, 1})
    maps = build_anchor_maps(g, a)
    got = find_circular_improvement(g, a, maps, ColorCodingParams.defaults(g))
    expect = circular_improvement_exists_bruteforce(g, a, maps, d=g.d or 4)
    assert (got is not None) == expect


def test_params_validation():
    with pytest.raises(InputError):
        ColorCodingParams(t=0, repetitions=1, max_cycle_len=4)
    with pytest.raises(InputError):
        ColorCodingParams(t=1, repetitions=0, max_cycle_len=4)
    with pytest.raises(InputError):
        ColorCodingParams(t=1, repetitions=1, max_cycle_len=1)
    with pytest.raises(InputError):
        ColorCodingParams(t=1, repetitions=1, max_cycle_len=4, mode="nope")


def test_aux_budget_raises_search_incomplete():
    from clawpack.circular import SearchIncompleteError

    _, g, a = berman_setup(6)
    maps = build_anchor_maps(g, a)
    params = ColorCodingParams(
        t=1, repetitions=1, max_cycle_len=8, max_aux_vertices=2
    )
    with pytest.raises(SearchIncompleteError):
        find_circular_improvement(g, a, maps, params)


def test_soundness_revalidation_fields():
    _, g, a = berman_setup(6)
    maps = build_anchor_maps(g, a)
    imp = find_circular_improvement(g, a, maps, ColorCodingParams.defaults(g))
    assert imp is not None
    k = imp.kind
    assert len(k.u) <= max_cycle_len_for(g.n)
    y = k.y_map()
    assert all(len(ys) <= 5 for ys in y.values())
    for u in k.u:
        assert aux_edge_check(u, y[maps.heaviest[u]], y[maps.second[u]], g, a, maps)
    assert g.squared_weight_of(imp.x) > g.squared_weight_of(imp.removed)
