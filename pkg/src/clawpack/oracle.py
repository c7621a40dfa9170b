"""Exact maximum-weight independent set and exhaustive improvement search.

Ground truth for approximation ratios on desk-scale instances. Both searches
are complete within their explicit node budgets and deterministic under the
documented tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import mpmath

from .instances import (
    BudgetExceededError,
    ConflictGraph,
    Generic,
    Improvement,
    InputError,
    Solution,
    neighborhood,
)

DEFAULT_SIZE_LIMIT = 40
DEFAULT_NODE_BUDGET = 100_000_000

# Relative tolerance for w**alpha comparisons with non-integer alpha; ties
# within tolerance count as non-improving.
ALPHA_REL_TOL = Fraction(1, 2 ** 40)
_MP_PREC = 140


@dataclass
class OracleResult:
    best: Solution
    optimum_w: Fraction
    nodes_explored: int
    optimal: bool = True


def exact_mwis(
    g: ConflictGraph,
    budget: int = DEFAULT_NODE_BUDGET,
    size_limit: int = DEFAULT_SIZE_LIMIT,
    force: bool = False,
) -> OracleResult:
    """Branch and bound for the maximum-weight independent set.

    Branches on a remaining vertex of maximum degree (ties to the lowest
    id), include-branch first; the bound adds all remaining weights. Only
    strict improvements replace the incumbent, so the returned set is
    deterministic.
    """
    if g.n > size_limit and not force:
        raise InputError(f"n={g.n} exceeds oracle size limit {size_limit}; pass force=True")

    nodes = 0
    best_set: set[int] = set()
    best_w = Fraction(0)

    def search(cands: list[int], cur: set[int], cur_w: Fraction):
        nonlocal nodes, best_set, best_w
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError(
                f"oracle exceeded {budget} nodes",
                partial=OracleResult(Solution.of(g, best_set), best_w, nodes, optimal=False),
            )
        if cur_w > best_w:
            best_w = cur_w
            best_set = set(cur)
        if not cands:
            return
        if cur_w + g.weight_of(cands) <= best_w:
            return
        cand_set = set(cands)
        pick = max(cands, key=lambda v: (len(g.adj_sets[v] & cand_set), -v))
        # include pick
        rest_in = [v for v in cands if v != pick and not g.has_edge(v, pick)]
        cur.add(pick)
        search(rest_in, cur, cur_w + g.weights[pick])
        cur.remove(pick)
        # exclude pick
        rest_out = [v for v in cands if v != pick]
        search(rest_out, cur, cur_w)

    search(list(range(g.n)), set(), Fraction(0))
    return OracleResult(Solution.of(g, best_set), best_w, nodes)


def _alpha_power_exact(w: Fraction, alpha_int: int) -> Fraction:
    return w ** alpha_int


def power_weight_improves(g: ConflictGraph, alpha: Fraction, x: Iterable[int], nx: Iterable[int]) -> bool:
    """Decide w^alpha(x) > w^alpha(nx).

    Exact for integer alpha; non-integer rational exponents are compared in
    high-precision floating point with ALPHA_REL_TOL slack, counting ties as
    non-improving.
    """
    alpha = Fraction(alpha)
    if alpha == 0:
        raise InputError("alpha=0 is rejected; use unit weights explicitly instead")
    if alpha.denominator == 1:
        a = alpha.numerator
        lhs = sum((_alpha_power_exact(g.weights[v], a) for v in x), Fraction(0))
        rhs = sum((_alpha_power_exact(g.weights[v], a) for v in nx), Fraction(0))
        return lhs > rhs
    with mpmath.workprec(_MP_PREC):
        af = mpmath.mpf(alpha.numerator) / alpha.denominator

        def term(v):
            w = g.weights[v]
            return mpmath.power(mpmath.mpf(w.numerator) / w.denominator, af)

        lhs = mpmath.fsum(term(v) for v in x)
        rhs = mpmath.fsum(term(v) for v in nx)
        tol = mpmath.mpf(ALPHA_REL_TOL.numerator) / ALPHA_REL_TOL.denominator
        return lhs - rhs > tol * max(abs(lhs), abs(rhs))


def power_weight_gain(g: ConflictGraph, alpha: Fraction, x: Iterable[int], nx: Iterable[int]) -> Fraction:
    """w^alpha(x) - w^alpha(nx) as an exact rational for integer alpha, or a
    high-precision rational rendering of the difference otherwise."""
    alpha = Fraction(alpha)
    if alpha.denominator == 1:
        a = alpha.numerator
        return sum((g.weights[v] ** a for v in x), Fraction(0)) - sum(
            (g.weights[v] ** a for v in nx), Fraction(0)
        )
    with mpmath.workprec(_MP_PREC):
        af = mpmath.mpf(alpha.numerator) / alpha.denominator

        def term(v):
            w = g.weights[v]
            return mpmath.power(mpmath.mpf(w.numerator) / w.denominator, af)

        diff = mpmath.fsum(term(v) for v in x) - mpmath.fsum(term(v) for v in nx)
        return Fraction(diff)


def exhaustive_improvement_search(
    g: ConflictGraph,
    a: Solution,
    alpha: Fraction,
    size_cap: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Optional[Improvement]:
    """Complete search for an independent X outside A with w^alpha(X) > w^alpha(N(X,A)).

    Enumerates independent subsets of V minus A of size at most size_cap in
    lexicographic id order and returns the first improving one, or None.
    An improving X containing solution vertices always shrinks to an
    improving X outside A, so restricting the enumeration loses nothing.
    """
    alpha = Fraction(alpha)
    if alpha == 0:
        raise InputError("alpha=0 is rejected; use unit weights explicitly instead")
    if size_cap < 1:
        return None
    outside = [v for v in range(g.n) if v not in a.members]
    nodes = 0

    def extend(start: int, chosen: list[int]) -> Optional[Improvement]:
        nonlocal nodes
        for i in range(start, len(outside)):
            v = outside[i]
            if any(g.has_edge(v, u) for u in chosen):
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(f"improvement search exceeded {budget} nodes")
            chosen.append(v)
            removed = neighborhood(chosen, a.members, g)
            if power_weight_improves(g, alpha, chosen, removed):
                return Improvement(frozenset(chosen), frozenset(removed), Generic(alpha))
            if len(chosen) < size_cap:
                found = extend(i + 1, chosen)
                if found is not None:
                    return found
            chosen.pop()
        return None

    return extend(0, [])
