"""Approximation algorithms for impedance and gamma-fair impedance.

`appr_impe` orders a bag by recursive balanced cuts; `fair_appr_impe` first
carves fair inter-checkpoint batches with a dynamic program on a
decomposition tree, then orders each batch the same way.

The tree here is a single hierarchy built from recursive balanced cuts.  It
stands in for the cut-preserving tree *collection* the formal analysis
embeds into: partitions found on this tree are always checked against the
fairness predicate directly, but the logarithmic width factor is only
guaranteed under the full embedding, not under this single-tree substitute.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .balanced_cut import StrategyLike, balanced_cut
from .errors import GraphError
from .graph import (
    INFEASIBLE,
    Bag,
    Crusade,
    FairnessSpec,
    WeightedGraph,
    as_bag,
    cut_size,
    group_quota_ok,
    subgraph,
)

MAX_GROUPS_FOR_DP = 4


def appr_impe(g: WeightedGraph, a: Iterable[int],
              strategy: StrategyLike = "auto") -> Crusade:
    """Crusade from the bag to the empty set via recursive balanced cuts.

    The first side of each balanced cut is ordered first, with the second
    side appended to every one of its bags; then the second side follows.
    """
    bag = as_bag(g, a)
    if not bag:
        raise GraphError("appr_impe needs a nonempty bag")
    order = _appr_order(g, bag, strategy)
    return Crusade.from_removal_order(bag, order)


def _appr_order(g: WeightedGraph, bag: Bag, strategy: StrategyLike) -> list[int]:
    if len(bag) == 1:
        return [next(iter(bag))]
    result = balanced_cut(g, bag, strategy)
    return (_appr_order(g, result.side_one, strategy)
            + _appr_order(g, result.side_two, strategy))


@dataclass(frozen=True)
class DecompositionTree:
    """Binary hierarchy over a bag from recursive balanced cuts.

    Each node holds the bag of leaves beneath it; `parent_edge_weight` is the
    cut of that bag measured inside the subgraph induced on the root bag
    (None at the root).  Leaves are single nodes.
    """

    bag: Bag
    parent_edge_weight: Optional[Fraction]
    children: tuple["DecompositionTree", ...]

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def leaf(self) -> int:
        (v,) = self.bag
        return v

    def leaves(self) -> list[int]:
        if self.is_leaf:
            return [self.leaf]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out


def build_decomposition_tree(g: WeightedGraph, a: Iterable[int],
                             strategy: StrategyLike = "auto") -> DecompositionTree:
    """Recursive balanced-cut hierarchy over the bag."""
    root_bag = as_bag(g, a)
    if not root_bag:
        raise GraphError("decomposition tree needs a nonempty bag")
    root_graph = subgraph(g, root_bag)
    index = {v: i for i, v in enumerate(root_graph.parent_nodes)}

    def grow(bag: Bag, weight: Optional[Fraction]) -> DecompositionTree:
        if len(bag) == 1:
            return DecompositionTree(bag, weight, ())
        result = balanced_cut(g, bag, strategy)
        kids = []
        for side in (result.side_one, result.side_two):
            w = cut_size(root_graph, [index[v] for v in side])
            kids.append(grow(side, w))
        return DecompositionTree(bag, weight, tuple(kids))

    return grow(root_bag, None)


def fair_partition_dp(tree: DecompositionTree, spec: FairnessSpec,
                      target_size: int, *,
                      quota_bag: Optional[Iterable[int]] = None):
    """Minimum tree cut splitting the leaves into a fair (part0, part1) pair.

    Bottom-up table over (node, side label, per-group counts assigned to
    part0); combining children pays the parent-edge weight of every child
    whose label differs.  At the root, only entries whose part0 has exactly
    `target_size` leaves and whose both parts satisfy the quota rule are
    admitted; quota shares default to the tree's own leaf bag but can be
    anchored elsewhere via `quota_bag`.  Ties prefer part0 counts closest to
    exact proportionality (L1), then lexicographic order.

    Returns (cut_value, part0_bag), or (INFEASIBLE, None) when no fair
    configuration exists.
    """
    leaves = tree.leaves()
    k = len(leaves)
    if not 1 <= target_size <= k - 1:
        raise GraphError(f"target_size {target_size} not in [1, {k - 1}]")
    if spec.group_count > MAX_GROUPS_FOR_DP:
        raise GraphError(f"fair partition DP supports at most {MAX_GROUPS_FOR_DP} groups")
    quota_members = list(tree.bag if quota_bag is None else quota_bag)
    quota_counts = spec.counts_of(quota_members)
    quota_total = len(quota_members)

    # tables[id(node)]: {(label, counts): (cost, choice)} where choice holds
    # the children's (label, counts) keys for reconstruction.
    tables: dict = {}

    def solve(node: DecompositionTree) -> dict:
        if node.is_leaf:
            h = spec.groups[node.leaf]
            one = tuple(1 if i == h else 0 for i in range(spec.group_count))
            zero = tuple([0] * spec.group_count)
            table = {(0, one): (Fraction(0), None), (1, zero): (Fraction(0), None)}
        else:
            left, right = node.children
            tl, tr = solve(left), solve(right)
            table = {}
            for (ll, cl), (vl, _) in sorted(tl.items()):
                for (lr, cr), (vr, _) in sorted(tr.items()):
                    counts = tuple(x + y for x, y in zip(cl, cr))
                    for label in (0, 1):
                        cost = vl + vr
                        if label != ll:
                            cost += left.parent_edge_weight
                        if label != lr:
                            cost += right.parent_edge_weight
                        key = (label, counts)
                        if key not in table or cost < table[key][0]:
                            table[key] = (cost, ((ll, cl), (lr, cr)))
        tables[id(node)] = table
        return table

    root_table = solve(tree)
    total_counts = spec.counts_of(leaves)
    ideal = [Fraction(quota_counts[h], quota_total) * target_size
             for h in range(spec.group_count)]
    best_key, best_rank = None, None
    for (label, counts), (cost, _) in sorted(root_table.items()):
        if sum(counts) != target_size:
            continue
        rest = tuple(t - c for t, c in zip(total_counts, counts))
        if not group_quota_ok(counts, target_size, spec.gamma, quota_counts, quota_total):
            continue
        if not group_quota_ok(rest, k - target_size, spec.gamma, quota_counts, quota_total):
            continue
        l1 = sum(abs(Fraction(c) - ideal[h]) for h, c in enumerate(counts))
        rank = (cost, l1, counts, label)
        if best_rank is None or rank < best_rank:
            best_rank, best_key = rank, (label, counts)
    if best_key is None:
        return INFEASIBLE, None

    part0: set[int] = set()

    def collect(node: DecompositionTree, key):
        if node.is_leaf:
            if key[0] == 0:
                part0.add(node.leaf)
            return
        _, choice = tables[id(node)][key]
        left, right = node.children
        collect(left, choice[0])
        collect(right, choice[1])

    collect(tree, best_key)
    return best_rank[0], frozenset(part0)


def verify_doubling_condition(spec: FairnessSpec) -> bool:
    """Whether consecutive checkpoint gaps grow at least geometrically."""
    cps = spec.checkpoints
    return all(b - a >= a for a, b in zip(cps, cps[1:]))


def fair_appr_impe(g: WeightedGraph, a: Iterable[int], spec: FairnessSpec,
                   strategy: StrategyLike = "auto") -> Optional[Crusade]:
    """Fair crusade from the bag to empty, or None when none is found.

    At each checkpoint the next batch is carved by `fair_partition_dp` on a
    fresh decomposition tree of the remaining nodes (quota shares stay
    anchored to the original bag) and ordered by `appr_impe`; the remainder
    is processed recursively.  At checkpoints after the first, an infeasible
    search is retried with gamma doubled, matching the guarantee available
    under the doubling-checkpoint condition.
    """
    bag = as_bag(g, a)
    if not bag:
        raise GraphError("fair_appr_impe needs a nonempty bag")
    k = len(bag)
    spec.validate_length(k)
    if not spec.checkpoints:
        return appr_impe(g, bag, strategy)

    order: list[int] = []
    remaining = bag
    prev = 0
    for idx, tau in enumerate(spec.checkpoints):
        seg = tau - prev
        tree = build_decomposition_tree(g, remaining, strategy)
        _, part = fair_partition_dp(tree, spec, seg, quota_bag=bag)
        if part is None and idx > 0:
            _, part = fair_partition_dp(tree, spec.with_gamma(2 * spec.gamma),
                                        seg, quota_bag=bag)
        if part is None:
            return None
        order.extend(_appr_order(g, part, strategy))
        remaining = remaining - part
        prev = tau
    order.extend(_appr_order(g, remaining, strategy))
    return Crusade.from_removal_order(bag, order)
