import random

import pytest

from clawpack.instances import InputError
from clawpack.multigraph import Multigraph, bad_vertex_deletion, find_improving_subgraph


def path_graph(n):
    return Multigraph(n, [(i, i + 1) for i in range(n - 1)])


def k4():
    return Multigraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def test_peel_path_to_empty():
    mg = path_graph(5)
    assert bad_vertex_deletion(mg, range(5), []) == set()


def test_peel_k4_survives():
    assert bad_vertex_deletion(k4(), range(4), []) == {0, 1, 2, 3}


def test_peel_pendant_then_stable():
    mg = Multigraph(5, k4().edge_list + [(3, 4)])
    assert bad_vertex_deletion(mg, range(5), []) == {0, 1, 2, 3}


def test_peel_ignores_y_side():
    # X = K4 plus a vertex tied only to Y: the Y edges never count
    edges = k4().edge_list + [(4, 5), (4, 6), (4, 7)]
    mg = Multigraph(8, edges)
    assert bad_vertex_deletion(mg, range(5), [5, 6, 7]) == {0, 1, 2, 3}


def test_peel_loops_count_twice():
    # degrees are taken in the subgraph induced on the surviving X side:
    # one loop gives degree 2 (peeled), two loops give 4 (kept)
    assert bad_vertex_deletion(Multigraph(2, [(0, 0), (0, 1)]), [0], [1]) == set()
    assert bad_vertex_deletion(Multigraph(1, [(0, 0), (0, 0)]), [0], []) == {0}


def test_peel_rejects_overlap():
    with pytest.raises(InputError):
        bad_vertex_deletion(path_graph(3), [0, 1], [1, 2])


def test_peel_order_independent():
    rng = random.Random(3)
    for trial in range(20):
        n = rng.randint(4, 12)
        edges = [
            (rng.randrange(n), rng.randrange(n))
            for _ in range(rng.randint(n, 3 * n))
        ]
        mg = Multigraph(n, edges)
        simultaneous = bad_vertex_deletion(mg, range(n), [])
        # peel one vertex at a time in a random order
        current = set(range(n))
        while True:
            deg = mg.degree_within(current)
            low = [v for v in current if deg[v] <= 2]
            if not low:
                break
            current.discard(rng.choice(low))
        assert current == simultaneous


def test_improving_two_triangles_whole():
    mg = Multigraph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    sub = find_improving_subgraph(mg)
    assert sub is not None
    assert len(sub.edge_indices) == 6 and len(sub.support()) == 5
    assert sub.is_improving()


def test_improving_single_cycle_none():
    mg = Multigraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert find_improving_subgraph(mg) is None


def test_improving_k4_counts():
    sub = find_improving_subgraph(k4())
    assert sub is not None
    assert len(sub.support()) == 4 and len(sub.edge_indices) == 5
    assert sub.is_improving()


def test_improving_handles_parallel_and_loops():
    mg = Multigraph(2, [(0, 1), (0, 1), (0, 1)])
    sub = find_improving_subgraph(mg)
    assert sub is not None and sub.is_improving()
    mg2 = Multigraph(1, [(0, 0), (0, 0)])
    sub2 = find_improving_subgraph(mg2)
    assert sub2 is not None and len(sub2.edge_indices) == 2


def test_improving_found_in_second_component():
    # first component is a bare cycle, second holds the binocular
    edges = [(0, 1), (1, 2), (2, 0)]
    edges += [(u + 3, v + 3) for u, v in k4().edge_list]
    mg = Multigraph(7, edges)
    sub = find_improving_subgraph(mg)
    assert sub is not None
    assert sub.support() <= {3, 4, 5, 6}


def test_improving_random_dense_graphs_valid_and_small():
    import math

    rng = random.Random(11)
    for trial in range(15):
        n = rng.randint(6, 24)
        # random 3-out multigraph: min degree >= 3
        edges = []
        for v in range(n):
            for _ in range(3):
                w = rng.randrange(n)
                edges.append((v, w))
        mg = Multigraph(n, edges)
        sub = find_improving_subgraph(mg)
        assert sub is not None
        assert sub.is_improving()
        assert len(sub.edge_indices) <= 32 * max(1.0, math.log2(n))


def test_improving_connectivity():
    sub = find_improving_subgraph(k4())
    support = sub.support()
    # walk the subgraph edges from one support vertex
    adj = {}
    for i in sub.edge_indices:
        u, v = sub.graph.edge_list[i]
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    seen = set()
    stack = [next(iter(support))]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(adj.get(x, ()))
    assert seen == support
