"""Crusade approximation: appr_impe, decomposition trees, and the fair DP."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from siscontrol import (
    Crusade,
    FairnessSpec,
    GraphError,
    INFEASIBLE,
    WeightedGraph,
    crusade_width,
    cut_size,
    fair_impedance_exact,
    impedance_exact,
    is_gamma_fair,
    subgraph,
)
from siscontrol.crusade import (
    appr_impe,
    build_decomposition_tree,
    fair_appr_impe,
    fair_partition_dp,
    verify_doubling_condition,
)
from siscontrol.oracle import random_connected_graph, random_groups


def tree_cut_of_leaf_subset(tree, part0):
    """Oracle: minimum tree-cut weight separating part0 from the rest.

    Enumerates all side labelings of the internal nodes and pays every tree
    edge whose endpoints get different labels.
    """
    nodes = []

    def walk(t):
        nodes.append(t)
        for c in t.children:
            walk(c)

    walk(tree)
    internal = [t for t in nodes if not t.is_leaf]
    best = None
    for labels in itertools.product((0, 1), repeat=len(internal)):
        label_of = {id(t): l for t, l in zip(internal, labels)}
        for t in nodes:
            if t.is_leaf:
                label_of[id(t)] = 0 if t.leaf in part0 else 1
        cost = Fraction(0)

        def pay(t):
            nonlocal cost
            for c in t.children:
                if label_of[id(c)] != label_of[id(t)]:
                    cost += c.parent_edge_weight
                pay(c)

        pay(tree)
        if best is None or cost < best:
            best = cost
    return best


class TestApprImpe:
    def test_singleton(self):
        g = WeightedGraph(2, [(0, 1, 1)])
        p = appr_impe(g, {1})
        assert p.bags == (frozenset({1}), frozenset())

    def test_two_disjoint_edges(self):
        g = WeightedGraph(4, [(0, 1, 1), (2, 3, 1)])
        p = appr_impe(g, range(4), "exact")
        assert crusade_width(g, p) == 1
        assert impedance_exact(g, range(4))[0] == 1

    def test_path4(self):
        g = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        p = appr_impe(g, range(4), "exact")
        assert 1 <= crusade_width(g, p) <= 2
        assert impedance_exact(g, range(4))[0] == 1

    def test_empty_bag_rejected(self):
        with pytest.raises(GraphError):
            appr_impe(WeightedGraph(2, [(0, 1, 1)]), set())

    @pytest.mark.parametrize("strategy", ["exact", "spectral"])
    def test_valid_and_sound_on_random_graphs(self, strategy):
        rng = random.Random(19)
        for _ in range(25):
            n = rng.randint(2, 9)
            g = random_connected_graph(rng, n)
            bag = frozenset(g.nodes())
            p = appr_impe(g, bag, strategy)
            assert p.start == bag and p.terminal == frozenset()
            assert crusade_width(g, p) >= impedance_exact(g, bag)[0]

    def test_deterministic(self):
        g = random_connected_graph(random.Random(4), 8)
        assert appr_impe(g, g.nodes()) == appr_impe(g, g.nodes())


class TestDecompositionTree:
    def test_singleton(self):
        g = WeightedGraph(2, [(0, 1, 1)])
        t = build_decomposition_tree(g, {0})
        assert t.is_leaf and t.leaf == 0 and t.parent_edge_weight is None

    def test_two_disjoint_edges_split_components(self):
        g = WeightedGraph(4, [(0, 1, 1), (2, 3, 1)])
        t = build_decomposition_tree(g, range(4), "exact")
        assert {c.parent_edge_weight for c in t.children} == {0}

    def test_triangle_child_weights(self):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        t = build_decomposition_tree(g, range(3), "exact")
        assert sorted(len(c.bag) for c in t.children) == [1, 2]
        assert [c.parent_edge_weight for c in t.children] == [2, 2]

    def test_binary_and_leaf_bijection(self):
        rng = random.Random(29)
        for _ in range(15):
            g = random_connected_graph(rng, rng.randint(2, 9))
            bag = frozenset(g.nodes())
            t = build_decomposition_tree(g, bag)
            assert frozenset(t.leaves()) == bag
            assert len(t.leaves()) == len(bag)

            def check(node):
                if node.is_leaf:
                    return
                assert len(node.children) == 2
                # sibling-separation weight equals the bag's cut in G[root bag]
                sub = subgraph(g, bag)
                idx = {v: i for i, v in enumerate(sub.parent_nodes)}
                for c in node.children:
                    assert c.parent_edge_weight == cut_size(sub, [idx[v] for v in c.bag])
                    check(c)

            check(t)


class TestFairPartitionDp:
    def two_group_spec(self, groups, gamma=1):
        return FairnessSpec(groups=groups, checkpoints=(1,), gamma=gamma)

    def test_single_edge_tree(self):
        g = WeightedGraph(2, [(0, 1, Fraction(3, 4))])
        t = build_decomposition_tree(g, range(2), "exact")
        spec = self.two_group_spec((0, 1), gamma=4)
        value, part = fair_partition_dp(t, spec, 1)
        assert value == Fraction(3, 4)  # the split pays exactly the edge weight
        assert len(part) == 1

    def test_target_bounds(self):
        g = WeightedGraph(2, [(0, 1, 1)])
        t = build_decomposition_tree(g, range(2), "exact")
        spec = self.two_group_spec((0, 1))
        with pytest.raises(GraphError):
            fair_partition_dp(t, spec, 0)
        with pytest.raises(GraphError):
            fair_partition_dp(t, spec, 2)

    def test_four_leaf_tree_never_hogs_a_group(self):
        g = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)])
        t = build_decomposition_tree(g, range(4), "exact")
        spec = FairnessSpec(groups=(0, 0, 1, 1), checkpoints=(2,), gamma=1)
        value, part = fair_partition_dp(t, spec, 2)
        counts = spec.counts_of(part)
        assert counts == (1, 1)
        # oracle: no 2-subset with both members of one group is admissible
        for pair in itertools.combinations(range(4), 2):
            c = spec.counts_of(pair)
            if max(c) == 2:
                assert set(pair) != set(part)

    def test_matches_leaf_subset_enumeration(self):
        rng = random.Random(37)
        for _ in range(12):
            n = rng.randint(3, 8)
            g = random_connected_graph(rng, n)
            groups = random_groups(rng, n)
            spec = FairnessSpec(groups=groups, checkpoints=(1,),
                                gamma=Fraction(rng.choice([1, 2])))
            t = build_decomposition_tree(g, range(n), "exact")
            target = rng.randint(1, n - 1)
            value, part = fair_partition_dp(t, spec, target)
            # oracle: enumerate every fair leaf subset of the right size
            best = None
            quota = spec.counts_of(range(n))
            from siscontrol.graph import group_quota_ok
            for subset in itertools.combinations(range(n), target):
                c = spec.counts_of(subset)
                rest = tuple(q - x for q, x in zip(quota, c))
                if not group_quota_ok(c, target, spec.gamma, quota, n):
                    continue
                if not group_quota_ok(rest, n - target, spec.gamma, quota, n):
                    continue
                cost = tree_cut_of_leaf_subset(t, set(subset))
                if best is None or cost < best:
                    best = cost
            if best is None:
                assert value == INFEASIBLE and part is None
            else:
                assert value == best
                assert tree_cut_of_leaf_subset(t, set(part)) == value

    def test_infeasible_with_external_quota(self):
        # remaining pool all one group, quotas anchored to a balanced bag:
        # any size-2 part has two group-0 nodes, quota is 1*(1/2)*2+1 = 2,
        # and the strict inequality 2 < 2 fails for every candidate.
        g = WeightedGraph(8, [(i, i + 1, 1) for i in range(7)])
        spec = FairnessSpec(groups=(0, 0, 0, 0, 1, 1, 1, 1), checkpoints=(2,), gamma=1)
        t = build_decomposition_tree(g, {0, 1, 2, 3}, "exact")
        value, part = fair_partition_dp(t, spec, 2, quota_bag=range(8))
        assert value == INFEASIBLE and part is None
        # the same search with its own-bag quotas is feasible
        value2, part2 = fair_partition_dp(t, spec, 2)
        assert value2 != INFEASIBLE and len(part2) == 2


class TestVerifyDoubling:
    def test_exact_doubling(self):
        assert verify_doubling_condition(FairnessSpec(groups=(0,), checkpoints=(1, 2, 4, 8)))

    def test_violation(self):
        assert not verify_doubling_condition(FairnessSpec(groups=(0,), checkpoints=(2, 3)))

    def test_single_checkpoint(self):
        assert verify_doubling_condition(FairnessSpec(groups=(0,), checkpoints=(5,)))


class TestFairApprImpe:
    def test_no_checkpoints_falls_through(self):
        g = random_connected_graph(random.Random(8), 6)
        spec = FairnessSpec(groups=random_groups(random.Random(9), 6))
        assert fair_appr_impe(g, g.nodes(), spec, "exact") == appr_impe(g, g.nodes(), "exact")

    def test_path4_alternating_groups(self):
        g = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        spec = FairnessSpec(groups=(0, 1, 0, 1), checkpoints=(2,), gamma=2)
        p = fair_appr_impe(g, range(4), spec, "exact")
        assert p is not None
        assert is_gamma_fair(p, spec)

    def test_single_checkpoint_is_fair_and_compares_to_oracle(self):
        rng = random.Random(43)
        ratios = []
        for _ in range(15):
            n = rng.randint(3, 8)
            g = random_connected_graph(rng, n)
            spec = FairnessSpec(groups=random_groups(rng, n),
                                checkpoints=(rng.randint(1, n - 1),),
                                gamma=Fraction(rng.choice([1, 2])))
            p = fair_appr_impe(g, range(n), spec, "exact")
            exact, _ = fair_impedance_exact(g, range(n), spec)
            assert exact != INFEASIBLE  # single checkpoint, own quotas
            assert p is not None
            assert is_gamma_fair(p, spec)
            ratios.append(crusade_width(g, p) / exact)
        assert all(r >= 1 for r in ratios)

    def test_doubling_checkpoints_pass_at_two_gamma(self):
        rng = random.Random(47)
        for _ in range(10):
            n = rng.randint(6, 10)
            g = random_connected_graph(rng, n)
            spec = FairnessSpec(groups=random_groups(rng, n),
                                checkpoints=(1, 2, 4), gamma=Fraction(3, 2))
            assert verify_doubling_condition(spec)
            p = fair_appr_impe(g, range(n), spec, "exact")
            if p is not None:
                assert is_gamma_fair(p, spec.with_gamma(2 * spec.gamma))
