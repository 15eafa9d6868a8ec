"""Network-design solvers: width-reduction LP, its rounding, the unit-weight
special case, and the SDP minimax for the restricted max cut.

All plans are expressed as per-edge weight reductions on the original graph.
The LP/rounding pair runs in exact rational arithmetic whenever the input
weights allow it, so the additive guarantee of the rounding is testable with
zero tolerance.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right, insort
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .errors import CapacityError, ContractError, GraphError
from .graph import (
    Bag,
    Crusade,
    WeightedGraph,
    as_bag,
    crusade_width,
    cut_size,
)
from .simplex import EXACT_DENOMINATOR_LIMIT, solve_lp
from .sdp import SdpDiagnostics, solve_reduction_sdp


class PlanMode(enum.Enum):
    FRACTIONAL = "fractional"
    INTEGRAL = "integral"
    UNWEIGHTED = "unweighted"
    SDP_MINIMAX = "sdp-minimax"


@dataclass
class ReductionPlan:
    """Per-edge weight reductions with a certified width or max-cut bound."""

    deltas: dict
    total_cost: Fraction
    certified_bound: object
    mode: PlanMode
    diagnostics: Optional[SdpDiagnostics] = None

    def delta(self, u: int, v: int) -> Fraction:
        return self.deltas.get((min(u, v), max(u, v)), Fraction(0))

    def apply(self, g: WeightedGraph) -> WeightedGraph:
        """The reduced graph with weights w - delta."""
        edges = []
        for u, v, w in g.edges:
            d = self.delta(u, v)
            if not 0 <= d <= w:
                raise ContractError(f"delta for edge ({u},{v}) outside [0, w]")
            edges.append((u, v, w - d))
        return WeightedGraph(g.node_count, edges)


def _check_crusade(g, a, p: Crusade) -> Bag:
    bag = as_bag(g, a)
    if p.start != bag or p.terminal != frozenset():
        raise GraphError("crusade must run from the bag to the empty set")
    return bag


def _crossing(g, members) -> list[int]:
    members = set(members)
    return [i for i, (u, v, _) in enumerate(g.edges) if (u in members) != (v in members)]


def solve_width_lp(g: WeightedGraph, a, p: Crusade, b) -> ReductionPlan:
    """Optimal fractional reductions making every cut of the crusade <= b.

    One covering constraint per bag whose cut exceeds b; always feasible
    since deleting everything zeroes every cut.
    """
    _check_crusade(g, a, p)
    b = Fraction(b)
    if b < 0:
        raise GraphError("width threshold must be nonnegative")
    m = g.edge_count
    rows, rhs = [], []
    for bagset in p.bags:
        c = cut_size(g, bagset)
        if c <= b:
            continue
        crossing = set(_crossing(g, bagset))
        rows.append([1 if e in crossing else 0 for e in range(m)])
        rhs.append(c - b)
    exact = all(w.denominator <= EXACT_DENOMINATOR_LIMIT for _, _, w in g.edges) \
        and b.denominator <= EXACT_DENOMINATOR_LIMIT
    res = solve_lp([1] * m, rows, [">="] * len(rows), rhs,
                   [w for _, _, w in g.edges], exact=exact)
    assert res.status == "optimal"
    deltas = {}
    for e, x in enumerate(res.x):
        if x != 0:
            u, v, _ = g.edges[e]
            deltas[(u, v)] = Fraction(x)
    plan = ReductionPlan(deltas, Fraction(res.objective), b, PlanMode.FRACTIONAL)
    assert crusade_width(plan.apply(g), p) <= b
    return plan


def width_opt_rounding(g: WeightedGraph, a, p: Crusade,
                       lp: ReductionPlan) -> ReductionPlan:
    """Round a fractional width plan to all-or-nothing deletions.

    Walks the removal order; for each node, its forward edge list (sorted by
    non-increasing position of the far endpoint) is deleted greedily until
    the accumulated weight reaches the fractional mass on that list.  The
    result keeps every cut within the certified bound and costs at most the
    fractional total plus the crusade length.
    """
    if lp.mode is not PlanMode.FRACTIONAL:
        raise ContractError("rounding requires a fractional plan")
    bag = _check_crusade(g, a, p)
    order = p.removal_order
    k = len(order)
    label = {v: i + 1 for i, v in enumerate(order)}
    for j, v in enumerate(sorted(set(g.nodes()) - bag)):
        label[v] = k + 1 + j

    deltas = {}
    for i, v in enumerate(order, start=1):
        forward = [(label[u], u) for u, _ in g.adjacency[v].items() if label[u] > i]
        forward.sort(key=lambda t: -t[0])
        mass = sum((lp.delta(v, u) for _, u in forward), Fraction(0))
        x = Fraction(0)
        for _, u in forward:
            if not x < mass:
                break
            w = g.weight(v, u)
            x += w
            deltas[(min(v, u), max(v, u))] = w

    cost = sum(deltas.values(), Fraction(0))
    plan = ReductionPlan(deltas, cost, lp.certified_bound, PlanMode.INTEGRAL)
    reduced = plan.apply(g)
    assert crusade_width(reduced, p) <= lp.certified_bound
    assert cost <= lp.total_cost + k
    return plan


def _crossing_interval(label, k, u, v):
    """Range of crusade positions whose cut the edge (u,v) crosses, or None."""
    lo, hi = sorted((label[u], label[v]))
    if hi <= k:
        return (lo, hi)
    if lo <= k:
        return (0, lo)
    return None


def uwcmp_solve(g: WeightedGraph, a, p: Crusade, b) -> ReductionPlan:
    """Optimal whole-edge deletions on a unit-weight graph, every cut <= b.

    Edges become intervals over crusade positions; keeping a set of edges is
    feasible exactly when their intervals fit on b machines, so the greedy
    finish-time interval scheduler (optimal for machine-count maximization)
    yields the minimum number of deletions.
    """
    bag = _check_crusade(g, a, p)
    if any(w != 1 for _, _, w in g.edges):
        raise GraphError("unit-weight solver requires every edge weight to be 1")
    b = Fraction(b)
    if b < 0 or b.denominator != 1:
        raise GraphError("threshold must be a nonnegative integer")
    machines_count = int(b)
    order = p.removal_order
    k = len(order)
    label = {v: i + 1 for i, v in enumerate(order)}
    for j, v in enumerate(sorted(set(g.nodes()) - bag)):
        label[v] = k + 1 + j

    intervals = []
    kept = set()
    for e, (u, v, _) in enumerate(g.edges):
        span = _crossing_interval(label, k, u, v)
        if span is None:
            kept.add(e)  # never crosses a cut of the crusade
        else:
            intervals.append((span[1], span[0], e))
    intervals.sort()

    # Greedy by finish time, assigning to the latest-finishing free machine.
    finish_times: list = []
    for fin, start, e in intervals:
        slot = bisect_right(finish_times, start) - 1
        if slot >= 0:
            finish_times.pop(slot)
        elif len(finish_times) >= machines_count:
            continue
        insort(finish_times, fin)
        kept.add(e)

    deltas = {}
    for e, (u, v, w) in enumerate(g.edges):
        if e not in kept:
            deltas[(u, v)] = w
    cost = Fraction(len(deltas))
    plan = ReductionPlan(deltas, cost, b, PlanMode.UNWEIGHTED)
    assert crusade_width(plan.apply(g), p) <= b
    return plan


def contracted_graph(g: WeightedGraph, a) -> tuple[WeightedGraph, tuple[int, ...]]:
    """Collapse the bag's complement into one super node.

    Returns the contracted graph and the node order: bag nodes sorted get
    ids 0..|a|-1 and the super node is the last id.  Super-node edges with
    zero aggregate weight are omitted.
    """
    bag = as_bag(g, a)
    nodes = sorted(bag)
    index = {v: i for i, v in enumerate(nodes)}
    s = len(nodes)
    super_weight = {}
    edges = []
    for u, v, w in g.edges:
        if u in bag and v in bag:
            edges.append((index[u], index[v], w))
        elif u in bag or v in bag:
            inner = index[u] if u in bag else index[v]
            super_weight[inner] = super_weight.get(inner, Fraction(0)) + w
    for inner, w in sorted(super_weight.items()):
        if w > 0:
            edges.append((inner, s, w))
    # Aggregate super-edge weights may exceed 1, so bypass the [0,1] check.
    gh = WeightedGraph.__new__(WeightedGraph)
    adj = [dict() for _ in range(s + 1)]
    stored = []
    for u, v, w in edges:
        if u > v:
            u, v = v, u
        adj[u][v] = w
        adj[v][u] = w
        stored.append((u, v, Fraction(w)))
    stored.sort(key=lambda e: (e[0], e[1]))
    gh.node_count = s + 1
    gh.edges = tuple(stored)
    gh.adjacency = tuple(adj)
    gh.parent_nodes = tuple(nodes) + (-1,)
    return gh, tuple(nodes)


def minimax_sdp(g: WeightedGraph, a, budget, *, gap_tol: float = 1e-6,
                max_newton: int = 500) -> ReductionPlan:
    """Reductions minimizing the max-cut relaxation bound of the bag.

    Solves the convex dual program on the contracted graph by the barrier
    method, then maps super-edge reductions back to original edges greedily.
    The certified bound upper-bounds the restricted max cut of the reduced
    graph and is within the relaxation constant 1.14 of the best achievable
    value at the same budget.
    """
    bag = as_bag(g, a)
    budget = Fraction(budget)
    if budget < 0:
        raise GraphError("budget must be nonnegative")
    gh, nodes = contracted_graph(g, a)
    hat_edges = [(u, v) for u, v, _ in gh.edges]
    hat_weights = [w for _, _, w in gh.edges]
    delta_hat, _, objective, diag = solve_reduction_sdp(
        gh.node_count, hat_edges, [float(w) for w in hat_weights],
        float(budget), gap_tol=gap_tol, max_newton=max_newton)

    s = len(nodes)
    deltas = {}
    for (u, v), w_hat, d in zip(hat_edges, hat_weights, delta_hat):
        d = min(Fraction(float(d)), w_hat)
        if d <= 0:
            continue
        if v < s:
            a_, b_ = nodes[u], nodes[v]
            deltas[(min(a_, b_), max(a_, b_))] = min(d, g.weight(a_, b_))
        else:
            inner = nodes[u]
            remaining = d
            for far, w in sorted(g.adjacency[inner].items()):
                if far in bag or remaining <= 0:
                    continue
                take = min(w, remaining)
                if take > 0:
                    deltas[(min(inner, far), max(inner, far))] = take
                    remaining -= take
    cost = sum(deltas.values(), Fraction(0))
    return ReductionPlan(deltas, cost, float(objective), PlanMode.SDP_MINIMAX,
                         diagnostics=diag)


def minimax_exact(g: WeightedGraph, a, budget, *, limit: int = 12) -> ReductionPlan:
    """Exact minimax reductions for the restricted max cut (test oracle).

    Solves the epigraph LP with one constraint per subset of the bag by lazy
    constraint generation: float separation over all subsets per round, then
    a final exact pass over every subset proves optimality.
    """
    bag = as_bag(g, a)
    k = len(bag)
    if k > limit:
        raise CapacityError(f"bag size {k} exceeds exact-minimax limit {limit}")
    budget = Fraction(budget)
    if budget < 0:
        raise GraphError("budget must be nonnegative")
    nodes = sorted(bag)
    pos = {v: i for i, v in enumerate(nodes)}
    incident = [e for e, (u, v, _) in enumerate(g.edges) if u in bag or v in bag]
    mi = len(incident)
    weights = [g.edges[e][2] for e in incident]

    # crossing matrix over all subsets: column per incident edge
    size = 1 << k
    bits = ((np.arange(size)[:, None] >> np.arange(k)) & 1).astype(bool)
    cols = []
    for e in incident:
        u, v, _ = g.edges[e]
        if u in bag and v in bag:
            cols.append(bits[:, pos[u]] ^ bits[:, pos[v]])
        else:
            inner = u if u in bag else v
            cols.append(bits[:, pos[inner]])
    crossing = np.stack(cols, axis=1) if cols else np.zeros((size, 0), dtype=bool)
    w_float = np.array([float(w) for w in weights])

    def exact_cut(mask, delta):
        total = Fraction(0)
        for j in range(mi):
            if crossing[mask, j]:
                total += weights[j] - delta[j]
        return total

    pool = [size - 1] if k else []
    while True:
        rows = [[1] * mi + [0]]
        senses = ["<="]
        rhs = [budget]
        for mask in pool:
            row = [1 if crossing[mask, j] else 0 for j in range(mi)] + [1]
            rows.append(row)
            senses.append(">=")
            rhs.append(exact_cut(mask, [Fraction(0)] * mi))
        res = solve_lp([0] * mi + [1], rows, senses, rhs,
                       [w for w in weights] + [None])
        assert res.status == "optimal"
        delta = res.x[:mi]
        z = res.x[mi]
        reduced = w_float - np.array([float(d) for d in delta])
        values = crossing @ reduced
        worst = int(values.argmax())
        if values[worst] > float(z) + 1e-9 and worst not in pool:
            pool.append(worst)
            continue
        # exact verification over every subset
        violated = None
        for mask in range(size):
            if exact_cut(mask, delta) > z:
                violated = mask
                break
        if violated is None or violated in pool:
            break
        pool.append(violated)

    deltas = {}
    for j, e in enumerate(incident):
        if delta[j] != 0:
            u, v, _ = g.edges[e]
            deltas[(u, v)] = Fraction(delta[j])
    cost = sum(deltas.values(), Fraction(0))
    return ReductionPlan(deltas, cost, Fraction(z), PlanMode.FRACTIONAL)


def budget_search(g: WeightedGraph, a, target, eps, *,
                  gap_tol: float = 1e-6) -> tuple[float, ReductionPlan]:
    """Smallest budget (within eps) whose SDP bound meets the target.

    Bisection over [0, total incident weight]; the high end always works
    because full deletion zeroes every cut of the bag.
    """
    target = float(target)
    eps = float(eps)
    if target < 0:
        raise GraphError("target must be nonnegative")
    if eps <= 0:
        raise GraphError("eps must be positive")
    bag = as_bag(g, a)
    plan0 = minimax_sdp(g, a, 0, gap_tol=gap_tol)
    if plan0.certified_bound <= target:
        return 0.0, plan0
    hi = float(sum((w for u, v, w in g.edges if u in bag or v in bag), Fraction(0)))
    lo = 0.0
    best = minimax_sdp(g, a, hi, gap_tol=gap_tol)
    while hi - lo > eps:
        mid = (hi + lo) / 2.0
        plan = minimax_sdp(g, a, mid, gap_tol=gap_tol)
        if plan.certified_bound <= target:
            hi, best = mid, plan
        else:
            lo = mid
    return hi, best
