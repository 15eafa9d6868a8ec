"""Graph representation, cut computations, and exact exponential-time oracles.

Everything here runs on exact rational arithmetic (`fractions.Fraction`), so
cut comparisons and the strict fairness inequality never depend on floating
rounding.  The exponential oracles (`restricted_max_cut_exact`,
`impedance_exact`, `fair_impedance_exact`) are capacity-limited ground truth
for the approximation algorithms in the other modules, not scalable solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import CapacityError, CrusadeStructureError, GraphError

Bag = frozenset
WeightLike = Union[Fraction, int, float, str]

#: Returned by the fair oracles when no fair crusade/partition exists.
INFEASIBLE = math.inf

# Integer-scaled arithmetic is used inside the bitmask DPs whenever the lcm of
# weight denominators stays below this bound; above it we fall back to
# Fractions (still exact, just slower).
_MAX_SCALE = 10**6


def _as_weight(w: WeightLike) -> Fraction:
    if isinstance(w, float):
        f = Fraction(w)  # floats are exact binary rationals
    else:
        f = Fraction(w)
    if not 0 <= f <= 1:
        raise GraphError(f"edge weight {w!r} outside [0, 1]")
    return f


class WeightedGraph:
    """Undirected graph with rational edge weights in [0, 1].

    Node ids are dense 0..n-1.  Each edge is stored once with u < v; parallel
    edges and self-loops are rejected.  `parent_nodes` records the original
    ids when the graph was produced by `subgraph`.
    """

    __slots__ = ("node_count", "edges", "adjacency", "parent_nodes")

    def __init__(self, node_count: int,
                 edges: Iterable[tuple[int, int, WeightLike]],
                 parent_nodes: Optional[tuple[int, ...]] = None):
        if node_count < 0:
            raise GraphError("node_count must be nonnegative")
        self.node_count = int(node_count)
        adj: list[dict[int, Fraction]] = [dict() for _ in range(self.node_count)]
        stored = []
        for u, v, w in edges:
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise GraphError(f"edge ({u},{v}) references a node id out of range")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if u > v:
                u, v = v, u
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u},{v})")
            wf = _as_weight(w)
            adj[u][v] = wf
            adj[v][u] = wf
            stored.append((u, v, wf))
        stored.sort(key=lambda e: (e[0], e[1]))
        self.edges: tuple[tuple[int, int, Fraction], ...] = tuple(stored)
        self.adjacency: tuple[dict[int, Fraction], ...] = tuple(adj)
        self.parent_nodes = parent_nodes

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def nodes(self) -> range:
        return range(self.node_count)

    def weight(self, u: int, v: int) -> Fraction:
        """Weight of edge (u,v), zero if absent."""
        return self.adjacency[u].get(v, Fraction(0))

    def degree(self, u: int) -> Fraction:
        return sum(self.adjacency[u].values(), Fraction(0))

    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.edges), Fraction(0))

    def neighbors(self, u: int):
        return self.adjacency[u].items()

    def __eq__(self, other):
        return (isinstance(other, WeightedGraph)
                and self.node_count == other.node_count
                and self.edges == other.edges)

    def __hash__(self):
        return hash((self.node_count, self.edges))

    def __repr__(self):
        return f"WeightedGraph(n={self.node_count}, m={self.edge_count})"


def as_bag(g: WeightedGraph, members: Iterable[int]) -> Bag:
    """Validate node ids against `g` and return them as a frozenset."""
    bag = frozenset(members)
    for u in bag:
        if not (isinstance(u, int) and 0 <= u < g.node_count):
            raise GraphError(f"node id {u!r} out of range for graph with n={g.node_count}")
    return bag


def cut_size(g: WeightedGraph, a: Iterable[int]) -> Fraction:
    """Total weight of edges with exactly one endpoint in the bag."""
    bag = as_bag(g, a)
    total = Fraction(0)
    for u in bag:
        for v, w in g.adjacency[u].items():
            if v not in bag:
                total += w
    return total


def subgraph(g: WeightedGraph, a: Iterable[int]) -> WeightedGraph:
    """Induced subgraph on the bag, node ids relabeled densely.

    The mapping new-id -> original-id is recoverable from `parent_nodes` of
    the returned graph.
    """
    bag = as_bag(g, a)
    order = tuple(sorted(bag))
    index = {u: i for i, u in enumerate(order)}
    edges = [(index[u], index[v], w) for u, v, w in g.edges if u in bag and v in bag]
    return WeightedGraph(len(order), edges, parent_nodes=order)


def max_degree(g: WeightedGraph) -> Fraction:
    """Largest summed incident weight over all nodes (0 for edgeless graphs)."""
    if g.node_count == 0:
        return Fraction(0)
    return max(g.degree(u) for u in g.nodes())


class Crusade:
    """A nested sequence of bags shrinking by exactly one node per step."""

    __slots__ = ("bags",)

    def __init__(self, bags: Sequence[Iterable[int]]):
        if not bags:
            raise CrusadeStructureError("a crusade needs at least one bag")
        frozen = tuple(frozenset(b) for b in bags)
        for prev, cur in zip(frozen, frozen[1:]):
            if not cur <= prev or len(prev) - len(cur) != 1:
                raise CrusadeStructureError(
                    "each bag must drop exactly one node of its predecessor")
        self.bags = frozen

    @classmethod
    def from_removal_order(cls, start: Iterable[int], order: Sequence[int],
                           terminal: Iterable[int] = ()) -> "Crusade":
        bags = [frozenset(start)]
        for v in order:
            bags.append(bags[-1] - {v})
        if bags[-1] != frozenset(terminal):
            raise CrusadeStructureError("removal order does not reach the declared terminal bag")
        return cls(bags)

    @property
    def removal_order(self) -> tuple[int, ...]:
        out = []
        for prev, cur in zip(self.bags, self.bags[1:]):
            (v,) = prev - cur
            out.append(v)
        return tuple(out)

    @property
    def start(self) -> Bag:
        return self.bags[0]

    @property
    def terminal(self) -> Bag:
        return self.bags[-1]

    def __len__(self):
        return len(self.bags) - 1

    def __eq__(self, other):
        return isinstance(other, Crusade) and self.bags == other.bags

    def __hash__(self):
        return hash(self.bags)

    def __repr__(self):
        return f"Crusade(order={list(self.removal_order)})"


def crusade_width(g: WeightedGraph, p: Crusade) -> Fraction:
    """Maximum cut over all bags of the crusade, start and terminal included."""
    return max(cut_size(g, bag) for bag in p.bags)


# ---------------------------------------------------------------------------
# Bitmask machinery shared by the exponential oracles.
# ---------------------------------------------------------------------------

def _scale_for(values: Iterable[Fraction]) -> Optional[int]:
    scale = 1
    for v in values:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
        if scale > _MAX_SCALE:
            return None
    return scale


def _mask_tables(g: WeightedGraph, nodes: Sequence[int]):
    """Per-node data for incremental cut updates over subsets of `nodes`.

    Returns (deg, adj, scale): full-graph degrees and within-bag adjacency as
    (position, weight) lists, all multiplied by `scale` (ints) when a common
    denominator is small, otherwise kept as Fractions with scale 1.
    """
    pos = {v: i for i, v in enumerate(nodes)}
    weights = [w for _, _, w in g.edges] or [Fraction(0)]
    scale = _scale_for(weights)
    if scale is None:
        conv = lambda f: f
        scale = 1
    else:
        conv = lambda f: int(f * scale)
    deg = [conv(g.degree(v)) for v in nodes]
    adj = [[(pos[u], conv(w)) for u, w in g.adjacency[v].items() if u in pos]
           for v in nodes]
    return deg, adj, scale


def _cut_table(deg, adj, k):
    """cut[mask] for every subset of the k bag nodes, in scaled units."""
    cut = [0] * (1 << k)
    for mask in range(1, 1 << k):
        low = (mask & -mask).bit_length() - 1
        prev = mask ^ (1 << low)
        inside = sum(w for p, w in adj[low] if prev >> p & 1)
        cut[mask] = cut[prev] + deg[low] - 2 * inside
    return cut


def restricted_max_cut_exact(g: WeightedGraph, a: Iterable[int], *,
                             limit: int = 20) -> tuple[Fraction, Bag]:
    """Exact maximum of cut_size(g, q) over all q subseteq a, by enumeration.

    Returns the maximum value and the first maximizing subset in ascending
    bitmask order over the sorted bag.
    """
    bag = as_bag(g, a)
    k = len(bag)
    if k > limit:
        raise CapacityError(f"bag size {k} exceeds enumeration limit {limit}")
    if k == 0:
        return Fraction(0), frozenset()
    nodes = sorted(bag)
    deg, adj, scale = _mask_tables(g, nodes)
    cut = _cut_table(deg, adj, k)
    best_mask = max(range(1 << k), key=lambda m: (cut[m], -m))
    best = frozenset(nodes[i] for i in range(k) if best_mask >> i & 1)
    return Fraction(cut[best_mask]) / scale, best


def impedance_exact(g: WeightedGraph, a: Iterable[int], *,
                    limit: int = 20) -> tuple[Fraction, Crusade]:
    """Minimum crusade width from the bag to the empty set, by subset DP.

    Recurrence: width(S) = max(cut(S), min over u in S of width(S - u)),
    width(empty) = 0.  Reconstruction breaks ties toward the lowest node id.
    """
    bag = as_bag(g, a)
    k = len(bag)
    if k > limit:
        raise CapacityError(f"bag size {k} exceeds subset-DP limit {limit}")
    if k == 0:
        return Fraction(0), Crusade([frozenset()])
    nodes = sorted(bag)
    deg, adj, scale = _mask_tables(g, nodes)
    cut = _cut_table(deg, adj, k)
    imp = [0] * (1 << k)
    for mask in range(1, 1 << k):
        m = mask
        best = None
        while m:
            low = m & -m
            sub = imp[mask ^ low]
            if best is None or sub < best:
                best = sub
            m ^= low
        imp[mask] = best if best > cut[mask] else cut[mask]
    order = []
    mask = (1 << k) - 1
    while mask:
        m = mask
        while m:
            low = m & -m
            if imp[mask ^ low] <= imp[mask]:
                order.append(nodes[low.bit_length() - 1])
                mask ^= low
                break
            m ^= low
    return Fraction(imp[-1]) / scale, Crusade.from_removal_order(bag, order)


# ---------------------------------------------------------------------------
# Fairness.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FairnessSpec:
    """Group assignment, checkpoint set, and fairness factor gamma.

    `groups[u]` is the demographic group of node u.  A crusade is fair when,
    for every batch of nodes removed between consecutive checkpoints and for
    every group, the group's share of the batch stays strictly below gamma
    times its share of the crusade's starting bag, plus one node.  The batch
    after the last checkpoint is included unless `check_final` is False.
    """

    groups: tuple[int, ...]
    checkpoints: tuple[int, ...] = ()
    gamma: Fraction = Fraction(1)
    check_final: bool = True

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(int(h) for h in self.groups))
        object.__setattr__(self, "checkpoints", tuple(int(t) for t in self.checkpoints))
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if any(h < 0 for h in self.groups):
            raise GraphError("group labels must be nonnegative")
        if self.gamma < 1:
            raise GraphError("gamma must be at least 1")
        cps = self.checkpoints
        if any(t <= 0 for t in cps) or any(b <= a for a, b in zip(cps, cps[1:])):
            raise GraphError("checkpoints must be strictly increasing and positive")

    @property
    def group_count(self) -> int:
        return max(self.groups) + 1 if self.groups else 0

    def counts_of(self, members: Iterable[int]) -> tuple[int, ...]:
        counts = [0] * self.group_count
        for u in members:
            counts[self.groups[u]] += 1
        return tuple(counts)

    def with_gamma(self, gamma) -> "FairnessSpec":
        return replace(self, gamma=Fraction(gamma))

    def validate_length(self, k: int) -> None:
        """Check the checkpoint range against a crusade of length k."""
        if self.checkpoints and self.checkpoints[-1] >= k:
            raise GraphError(
                f"checkpoint {self.checkpoints[-1]} not strictly inside (0, {k})")


def group_quota_ok(counts: Sequence[int], seg_len: int, gamma: Fraction,
                   quota_counts: Sequence[int], quota_total: int) -> bool:
    """Strict fairness inequality for one removed batch.

    `counts` are the batch's per-group sizes; the quota share of group h is
    quota_counts[h] / quota_total (the starting bag's composition).
    """
    for h, c in enumerate(counts):
        if c >= gamma * Fraction(quota_counts[h], quota_total) * seg_len + 1:
            return False
    return True


def _segments(p: Crusade, checkpoints: Sequence[int], check_final: bool):
    """(removed set, length) for every inter-checkpoint batch of the crusade."""
    k = len(p)
    marks = list(checkpoints)
    if check_final and (not marks or marks[-1] != k):
        marks = marks + [k]
    out = []
    prev = 0
    for t in marks:
        out.append((p.bags[prev] - p.bags[t], t - prev))
        prev = t
    return out


def is_gamma_fair(p: Crusade, spec: FairnessSpec) -> bool:
    """Whether every inter-checkpoint removed batch satisfies the quota rule.

    Vacuously true when the spec has no checkpoints.  Evaluated in exact
    rational arithmetic with a strict inequality.
    """
    k = len(p)
    if len(spec.groups) <= max(p.start, default=-1):
        raise GraphError("fairness spec does not cover all crusade nodes")
    spec.validate_length(k)
    if not spec.checkpoints:
        return True
    quota_counts = spec.counts_of(p.start)
    total = len(p.start)
    for removed, seg_len in _segments(p, spec.checkpoints, spec.check_final):
        if not group_quota_ok(spec.counts_of(removed), seg_len, spec.gamma,
                              quota_counts, total):
            return False
    return True


def fair_impedance_exact(g: WeightedGraph, a: Iterable[int], spec: FairnessSpec, *,
                         limit: int = 14):
    """Minimum width over fair crusades from the bag to empty, by layered DP.

    Between checkpoints the plain impedance recurrence runs; a transition
    crossing a checkpoint is admitted only when the batch removed since the
    previous checkpoint satisfies the quota rule.  The group-count vector at
    the previous checkpoint is part of the DP state.  Returns
    (INFEASIBLE, None) when no fair crusade exists.
    """
    bag = as_bag(g, a)
    k = len(bag)
    if k > limit:
        raise CapacityError(f"bag size {k} exceeds fair-DP limit {limit}")
    spec.validate_length(k)
    if not spec.checkpoints or k == 0:
        return impedance_exact(g, a)
    if len(spec.groups) < g.node_count:
        raise GraphError("fairness spec does not cover all graph nodes")

    nodes = sorted(bag)
    deg, adj, scale = _mask_tables(g, nodes)
    cut = _cut_table(deg, adj, k)
    ngroups = spec.group_count
    node_group = [spec.groups[v] for v in nodes]
    quota_counts = spec.counts_of(bag)

    boundaries = {}  # position -> segment length ending there
    prev = 0
    for t in spec.checkpoints:
        boundaries[t] = t - prev
        prev = t
    if spec.check_final:
        boundaries[k] = k - prev

    def counts(mask):
        c = [0] * ngroups
        m = mask
        while m:
            low = m & -m
            c[node_group[low.bit_length() - 1]] += 1
            m ^= low
        return tuple(c)

    full = (1 << k) - 1
    memo = {}

    def value(mask, prev_counts):
        if mask == 0:
            return 0
        key = (mask, prev_counts)
        hit = memo.get(key)
        if hit is not None:
            return hit
        position = k - bin(mask).count("1") + 1
        seg = boundaries.get(position)
        best = INFEASIBLE
        m = mask
        while m:
            low = m & -m
            sub = mask ^ low
            if seg is None:
                child = value(sub, prev_counts)
            else:
                new_counts = counts(sub)
                removed = tuple(p - n for p, n in zip(prev_counts, new_counts))
                if not group_quota_ok(removed, seg, spec.gamma, quota_counts, k):
                    m ^= low
                    continue
                child = value(sub, new_counts)
            if child < best:
                best = child
            m ^= low
        result = best if best == INFEASIBLE or best > cut[mask] else cut[mask]
        memo[key] = result
        return result

    top = value(full, counts(full))
    if top == INFEASIBLE:
        return INFEASIBLE, None

    order = []
    mask, prev_counts = full, counts(full)
    while mask:
        target = value(mask, prev_counts)
        position = k - bin(mask).count("1") + 1
        seg = boundaries.get(position)
        m = mask
        while m:
            low = m & -m
            sub = mask ^ low
            if seg is None:
                child_counts = prev_counts
                ok = True
            else:
                child_counts = counts(sub)
                removed = tuple(p - n for p, n in zip(prev_counts, child_counts))
                ok = group_quota_ok(removed, seg, spec.gamma, quota_counts, k)
            if ok and value(sub, child_counts) <= target:
                order.append(nodes[low.bit_length() - 1])
                mask, prev_counts = sub, child_counts
                break
            m ^= low
        else:  # pragma: no cover - reconstruction always finds a witness
            raise AssertionError("fair DP reconstruction failed")
    return Fraction(top) / scale, Crusade.from_removal_order(bag, order)
