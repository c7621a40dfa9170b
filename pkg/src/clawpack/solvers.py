"""Local-search solvers: greedy, squared-weight claw search, the cycle-extended
variant, the parametrized w**alpha search, and the scaling/truncation wrapper.

Every applied improvement strictly increases w^2(A) (or w^alpha(A) in
parametrized mode) in exact arithmetic; fixed points certify that no
improvement of the searched shape remains.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .circular import (
    ColorCodingParams,
    build_anchor_maps,
    find_circular_improvement,
)
from .instances import (
    BudgetExceededError,
    ClawShaped,
    ConflictGraph,
    Generic,
    Improvement,
    InputError,
    PackingInstance,
    Solution,
    neighborhood,
)
from .oracle import exhaustive_improvement_search, power_weight_gain

MODES = ("greedy", "squareimp", "logimp", "parametrized")


@dataclass
class SolverConfig:
    mode: str = "squareimp"
    alpha: Optional[Fraction] = None
    size_cap_factor: Fraction = Fraction(4)
    scaling_n: Optional[Fraction] = None
    rng_seed: int = 0
    circular: Optional[ColorCodingParams] = None
    d: Optional[int] = None
    log_base: int = 2
    claw_budget: int = 50_000_000
    improvement_budget: int = 100_000_000

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}")
        if self.scaling_n is not None and Fraction(self.scaling_n) <= 1:
            raise InputError("scaling constant must exceed 1")
        if Fraction(self.size_cap_factor) <= 0:
            raise InputError("size cap factor must be positive")
        if self.mode == "parametrized":
            if self.alpha is None:
                raise InputError("parametrized mode needs alpha")
            if Fraction(self.alpha) == 0:
                raise InputError("alpha=0 is rejected; use unit weights explicitly instead")
        if self.log_base < 2:
            raise InputError("log base must be >= 2")


@dataclass
class ImprovementRecord:
    """One applied swap: its shape, |X|, and the gain in the objective the
    run optimizes (w^2 for claw-shaped/circular and alpha=2 searches, w^alpha
    for other exponents; the wire field name stays delta_w2)."""

    kind: str
    size: int
    delta_w2: Fraction


@dataclass
class RunTrace:
    iterations: int
    improvements: list[ImprovementRecord]
    final: Solution
    scaled: bool = False
    wall_time: float = 0.0
    notes: tuple[str, ...] = ()
    iteration_bound: Optional[Fraction] = None

    def to_json_obj(self) -> dict:
        return {
            "iterations": self.iterations,
            "improvements": [
                {"kind": r.kind, "size": r.size, "delta_w2": f"{r.delta_w2.numerator}/{r.delta_w2.denominator}"}
                for r in self.improvements
            ],
            "final_members": sorted(self.final.members),
            "final_weight": f"{self.final.total_w.numerator}/{self.final.total_w.denominator}",
        }


def _resolve_d(g: ConflictGraph, cfg_d: Optional[int]) -> int:
    d = cfg_d if cfg_d is not None else g.d
    if d is None:
        raise InputError("claw bound d is needed; set it on the graph or the config")
    if d < 2:
        raise InputError("claw bound d must be >= 2")
    return d


def greedy(g: ConflictGraph) -> Solution:
    """Pick the maximum-weight remaining vertex (ties to the lowest id) and
    delete its closed neighborhood, until nothing remains."""
    alive = set(range(g.n))
    chosen: set[int] = set()
    while alive:
        v = max(alive, key=lambda u: (g.weights[u], -u))
        chosen.add(v)
        alive.discard(v)
        alive -= g.adj_sets[v]
    return Solution.of(g, chosen)


def find_claw_improvement(
    g: ConflictGraph,
    a: Solution,
    d: Optional[int] = None,
    budget: int = 50_000_000,
) -> Optional[Improvement]:
    """First claw-shaped improvement of w^2(A) under deterministic order, or None.

    Scans free vertices first (every one is the talon of an improving
    0-claw), then for each center in A, in ascending id order, the
    independent talon sets among the center's neighbors in lexicographic
    order, up to d-1 talons.
    """
    d_eff = _resolve_d(g, d)
    members = a.members
    for v in range(g.n):
        if v in members:
            continue
        if not (g.adj_sets[v] & members):
            return Improvement(frozenset((v,)), frozenset(), ClawShaped(center=None))

    nodes = 0
    w2 = [w * w for w in g.weights]

    def talons(center: int) -> Optional[frozenset[int]]:
        nonlocal nodes
        cands = [u for u in g.adj[center] if u not in members]
        removed_w2: dict[int, Fraction] = {}

        def extend(start: int, chosen: list[int], t_w2: Fraction, removed: set[int], r_w2: Fraction):
            nonlocal nodes
            for i in range(start, len(cands)):
                u = cands[i]
                if any(g.has_edge(u, x) for x in chosen):
                    continue
                nodes += 1
                if nodes > budget:
                    raise BudgetExceededError(f"claw search exceeded {budget} nodes")
                new_removed = (g.adj_sets[u] & members) - removed
                nt = t_w2 + w2[u]
                nr = r_w2 + sum((w2[x] for x in new_removed), Fraction(0))
                chosen.append(u)
                if nt > nr:
                    return list(chosen)
                if len(chosen) < d_eff - 1:
                    removed |= new_removed
                    found = extend(i + 1, chosen, nt, removed, nr)
                    if found is not None:
                        return found
                    removed -= new_removed
                chosen.pop()
            return None

        got = extend(0, [], Fraction(0), set(), Fraction(0))
        return frozenset(got) if got else None

    for c in sorted(members):
        got = talons(c)
        if got:
            removed = neighborhood(got, members, g)
            return Improvement(got, frozenset(removed), ClawShaped(center=c))
    return None


def _loop(
    g: ConflictGraph,
    start: Optional[Solution],
    step: Callable[[Solution], Optional[Improvement]],
    keep_partial_on_budget: bool = False,
) -> RunTrace:
    a = start.copy() if start is not None else Solution.empty()
    records: list[ImprovementRecord] = []
    notes: tuple[str, ...] = ()
    t0 = time.perf_counter()
    while True:
        try:
            imp = step(a)
        except BudgetExceededError as exc:
            if not keep_partial_on_budget:
                raise
            notes = (f"aborted on budget: {exc}",)
            break
        if imp is None:
            break
        if isinstance(imp.kind, Generic) and imp.kind.alpha != 2:
            delta = power_weight_gain(g, imp.kind.alpha, imp.x, imp.removed)
        else:
            delta = imp.delta_w2(g)
        if delta <= 0:
            raise RuntimeError(f"non-improving step {imp!r}")
        a.apply(g, imp)
        records.append(ImprovementRecord(imp.kind_name(), imp.size, delta))
    return RunTrace(
        iterations=len(records),
        improvements=records,
        final=a,
        wall_time=time.perf_counter() - t0,
        notes=notes,
    )


def squareimp(g: ConflictGraph, cfg: SolverConfig, start: Optional[Solution] = None) -> RunTrace:
    """Iterate the claw search to a fixed point, starting from the empty set
    (or an injected start solution, used to reproduce tight instances)."""
    d = _resolve_d(g, cfg.d)
    return _loop(g, start, lambda a: find_claw_improvement(g, a, d, cfg.claw_budget))


def logimp(
    g: ConflictGraph,
    cfg: SolverConfig,
    start: Optional[Solution] = None,
    inst: Optional[PackingInstance] = None,
) -> RunTrace:
    """Claw search first; at claw fixed points, search for a circular
    improvement and continue until neither kind exists."""
    d = _resolve_d(g, cfg.d)
    params = cfg.circular if cfg.circular is not None else ColorCodingParams.defaults(g, inst)
    rng = random.Random(cfg.rng_seed)
    notes: set[str] = set()

    def step(a: Solution) -> Optional[Improvement]:
        imp = find_claw_improvement(g, a, d, cfg.claw_budget)
        if imp is not None:
            return imp
        maps = build_anchor_maps(g, a)
        return find_circular_improvement(g, a, maps, params, inst=inst, rng=rng, d=d)

    trace = _loop(g, start, step)
    if params.y_cap < d - 1:
        notes.add(f"aux companion sets capped at {params.y_cap} (claw bound allows {d - 1})")
    trace.notes = tuple(sorted(notes))
    return trace


def parametrized_local_search(
    g: ConflictGraph,
    cfg: SolverConfig,
    start: Optional[Solution] = None,
) -> RunTrace:
    """Iterate the exhaustive w**alpha improvement search to a fixed point.

    The size cap is floor(C * log(n)) in the configured log base, floored
    at 1 so singleton insertions stay available on tiny instances.
    """
    alpha = Fraction(cfg.alpha)
    cap = max(1, math.floor(float(cfg.size_cap_factor) * math.log(max(2, g.n), cfg.log_base)))
    return _loop(
        g,
        start,
        lambda a: exhaustive_improvement_search(g, a, alpha, cap, cfg.improvement_budget),
        keep_partial_on_budget=True,
    )


def scale_truncate_run(
    g: ConflictGraph,
    cfg: SolverConfig,
    inner: Callable[[ConflictGraph, SolverConfig, Optional[PackingInstance]], RunTrace],
    inst: Optional[PackingInstance] = None,
) -> RunTrace:
    """Rescale weights so the greedy solution weighs N*|V|, truncate to
    integers, drop floor-zero vertices, run the inner solver, map back.

    The integer squared weight of any solution is then at most
    (d-1)^2 * N^2 * |V|^2, which bounds the iteration count. When the graph
    came from a packing instance, the surviving sets are passed through so
    the randomized circular search stays available.
    """
    if cfg.scaling_n is None:
        raise InputError("scale_truncate_run needs cfg.scaling_n > 1")
    n_const = Fraction(cfg.scaling_n)
    d = _resolve_d(g, cfg.d)
    if g.n == 0:
        return RunTrace(0, [], Solution.empty(), scaled=True)
    a_prime = greedy(g)
    factor = n_const * g.n / a_prime.total_w
    floored = [math.floor(w * factor) for w in g.weights]
    keep = [v for v in range(g.n) if floored[v] >= 1]
    back = {i: v for i, v in enumerate(keep)}
    fwd = {v: i for i, v in enumerate(keep)}
    sub_edges = [(fwd[u], fwd[v]) for u, v in g.edges() if u in fwd and v in fwd]
    sub = ConflictGraph.from_edges(
        len(keep), sub_edges, [Fraction(floored[v]) for v in keep], d=g.d
    )
    sub_inst = None
    if inst is not None:
        sub_inst = PackingInstance.build(
            inst.universe_size,
            [sorted(inst.sets[v]) for v in keep],
            [Fraction(floored[v]) for v in keep],
            inst.k,
        )
    t0 = time.perf_counter()
    trace = inner(sub, cfg, sub_inst)
    bound = (d - 1) ** 2 * n_const ** 2 * Fraction(g.n) ** 2
    if trace.iterations > bound:
        raise RuntimeError(f"iteration count {trace.iterations} exceeds scaling bound {bound}")
    final = Solution.of(g, {back[i] for i in trace.final.members})
    return RunTrace(
        iterations=trace.iterations,
        improvements=trace.improvements,
        final=final,
        scaled=True,
        wall_time=time.perf_counter() - t0,
        notes=trace.notes + (f"scaled by {factor} and truncated; {g.n - len(keep)} vertices dropped",),
        iteration_bound=bound,
    )


def solve(
    g: ConflictGraph,
    cfg: SolverConfig,
    inst: Optional[PackingInstance] = None,
    start: Optional[Solution] = None,
) -> RunTrace:
    """Dispatch on cfg.mode, wrapping in scaling/truncation when configured.

    Start-solution injection is a test hook for unscaled runs only.
    """

    def run(graph: ConflictGraph, config: SolverConfig, instance: Optional[PackingInstance]) -> RunTrace:
        unscaled = graph is g
        if config.mode == "greedy":
            t0 = time.perf_counter()
            final = greedy(graph)
            return RunTrace(0, [], final, wall_time=time.perf_counter() - t0)
        if config.mode == "squareimp":
            return squareimp(graph, config, start=start if unscaled else None)
        if config.mode == "logimp":
            return logimp(graph, config, start=start if unscaled else None, inst=instance)
        return parametrized_local_search(graph, config, start=start if unscaled else None)

    if cfg.scaling_n is not None and cfg.mode != "greedy":
        return scale_truncate_run(g, cfg, run, inst=inst)
    return run(g, cfg, inst)
