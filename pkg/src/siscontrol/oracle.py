"""Independent ground-truth oracles and the oracle-suite harness.

Everything here recomputes answers from first principles (exhaustive search
over orderings, subsets, or delete-sets) so the approximation algorithms and
solvers have something honest to be compared against.  None of it shares a
recurrence with the code under test.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CapacityError
from .graph import (
    Crusade,
    FairnessSpec,
    WeightedGraph,
    as_bag,
    crusade_width,
    cut_size,
    is_gamma_fair,
    _cut_table,
    _mask_tables,
)

DEFAULT_WEIGHT_CHOICES = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def min_width_over_orderings(g: WeightedGraph, a: Iterable[int], *,
                             limit: int = 12) -> Fraction:
    """Minimum crusade width over all |a|! removal orderings.

    Exhaustive depth-first search over orderings; a branch is skipped only
    when its prefix already reaches the incumbent width (sound, since width
    is a maximum over prefix cuts).  Cross-checked against unpruned
    permutation enumeration in the test suite.
    """
    bag = as_bag(g, a)
    k = len(bag)
    if k > limit:
        raise CapacityError(f"bag size {k} exceeds ordering-enumeration limit {limit}")
    if k == 0:
        return Fraction(0)
    nodes = sorted(bag)
    deg, adj, scale = _mask_tables(g, nodes)
    cut = _cut_table(deg, adj, k)
    full = (1 << k) - 1
    best = None

    def search(mask, width):
        nonlocal best
        if best is not None and width >= best:
            return
        if mask == 0:
            best = width
            return
        m = mask
        while m:
            low = m & -m
            sub = mask ^ low
            search(sub, max(width, cut[sub]))
            m ^= low

    search(full, cut[full])
    return Fraction(best) / scale


def fair_min_width_over_orderings(g: WeightedGraph, a: Iterable[int],
                                  spec: FairnessSpec, *, limit: int = 8):
    """Minimum width over all orderings whose crusade passes the fairness test.

    Plain permutation enumeration; returns math.inf when no ordering is fair.
    """
    bag = as_bag(g, a)
    if len(bag) > limit:
        raise CapacityError(f"bag size {len(bag)} exceeds permutation limit {limit}")
    best = math.inf
    for perm in itertools.permutations(sorted(bag)):
        p = Crusade.from_removal_order(bag, perm)
        if not is_gamma_fair(p, spec):
            continue
        w = crusade_width(g, p)
        if w < best:
            best = w
    return best


def random_connected_graph(rng: random.Random, n: int, *,
                           weight_choices: Sequence[Fraction] = DEFAULT_WEIGHT_CHOICES,
                           edge_prob: float = 0.5) -> WeightedGraph:
    """Random connected graph: a random spanning tree plus Bernoulli extras."""
    edges = {}
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u = order[i]
        v = order[rng.randrange(i)]
        edges[(min(u, v), max(u, v))] = rng.choice(weight_choices)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < edge_prob:
                edges[(u, v)] = rng.choice(weight_choices)
    return WeightedGraph(n, [(u, v, w) for (u, v), w in edges.items()])


def random_groups(rng: random.Random, n: int, groups: int = 2) -> tuple[int, ...]:
    """Random group assignment with every group nonempty (requires n >= groups)."""
    labels = [h % groups for h in range(n)]
    rng.shuffle(labels)
    return tuple(labels)


def _crossing_edges(g: WeightedGraph, bag) -> list[int]:
    out = []
    for idx, (u, v, _) in enumerate(g.edges):
        if (u in bag) != (v in bag):
            out.append(idx)
    return out


def exhaustive_integral_width_cost(g: WeightedGraph, a, p: Crusade, b: Fraction, *,
                                   limit: int = 16) -> Fraction:
    """Optimal all-or-nothing deletion cost keeping every crusade cut <= b.

    Enumerates all delete-sets over the edges that cross at least one bag of
    the crusade (deleting any other edge is never optimal), vectorized over
    integer-scaled weights so feasibility checks stay exact.
    """
    b = Fraction(b)
    scale = 1
    for w in [w for _, _, w in g.edges] + [b]:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    relevant = sorted({e for bagset in p.bags for e in _crossing_edges(g, bagset)})
    m = len(relevant)
    if m > limit:
        raise CapacityError(f"{m} crossing edges exceed delete-set enumeration limit {limit}")
    weights = np.array([int(g.edges[e][2] * scale) for e in relevant], dtype=np.int64)
    b_scaled = int(b * scale)

    masks = np.arange(1 << m, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)) & 1).astype(np.int64)
    total_deleted = bits @ weights
    cut_totals = []
    cut_cols = []
    for bagset in p.bags:
        crossing = set(_crossing_edges(g, bagset))
        cut_totals.append(int(cut_size(g, bagset) * scale))
        cut_cols.append(weights * np.array([e in crossing for e in relevant], dtype=np.int64))
    per_cut_deleted = bits @ np.stack(cut_cols, axis=1)
    feasible = (np.array(cut_totals)[None, :] - per_cut_deleted <= b_scaled).all(axis=1)
    best = int(total_deleted[feasible].min())
    return Fraction(best, scale)


def exhaustive_minimax_value(g: WeightedGraph, a, budget, step: Fraction = Fraction(1, 100)):
    """Grid search helper: min over gridded reductions of the exact max cut.

    Only used to sanity-check small instances; the grid includes the box
    corners of every edge.
    """
    from .graph import restricted_max_cut_exact

    bag = as_bag(g, a)
    budget = Fraction(budget)
    incident = [i for i, (u, v, _) in enumerate(g.edges) if u in bag or v in bag]
    if len(incident) > 3:
        raise CapacityError("grid search supports at most 3 incident edges")
    axes = []
    for i in incident:
        w = g.edges[i][2]
        ticks = [Fraction(j) * step for j in range(int(w / step) + 1)]
        if ticks[-1] != w:
            ticks.append(w)
        axes.append(ticks)
    best = None
    for combo in itertools.product(*axes):
        if sum(combo, Fraction(0)) > budget:
            continue
        edges = list(g.edges)
        for i, d in zip(incident, combo):
            u, v, w = edges[i]
            edges[i] = (u, v, w - d)
        h = WeightedGraph(g.node_count, edges)
        phi, _ = restricted_max_cut_exact(h, bag)
        if best is None or phi < best:
            best = phi
    return best
