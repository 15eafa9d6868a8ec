"""Graph core: cuts, crusades, and the exact exponential oracles."""

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siscontrol import (
    CapacityError,
    Crusade,
    CrusadeStructureError,
    FairnessSpec,
    GraphError,
    INFEASIBLE,
    WeightedGraph,
    crusade_width,
    cut_size,
    fair_impedance_exact,
    impedance_exact,
    is_gamma_fair,
    max_degree,
    restricted_max_cut_exact,
    subgraph,
)
from siscontrol.oracle import min_width_over_orderings, random_connected_graph


def path3():
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 1)])


def star13():
    return WeightedGraph(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])


def triangle():
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])


small_graphs = st.integers(min_value=2, max_value=6).flatmap(
    lambda n: st.builds(
        WeightedGraph,
        st.just(n),
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                      st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1)])
                      ).filter(lambda e: e[0] != e[1]),
            max_size=8,
            unique_by=lambda e: (min(e[0], e[1]), max(e[0], e[1])),
        ),
    )
)


class TestWeightedGraph:
    def test_rejects_out_of_range_weight(self):
        with pytest.raises(GraphError):
            WeightedGraph(2, [(0, 1, Fraction(3, 2))])

    def test_rejects_self_loop_and_duplicates(self):
        with pytest.raises(GraphError):
            WeightedGraph(2, [(1, 1, 1)])
        with pytest.raises(GraphError):
            WeightedGraph(2, [(0, 1, 1), (1, 0, 1)])

    def test_weights_are_exact(self):
        g = WeightedGraph(2, [(0, 1, "0.25")])
        assert g.edges[0][2] == Fraction(1, 4)


class TestCutSize:
    def test_path_middle_node(self):
        assert cut_size(path3(), {1}) == 2

    def test_empty_bag(self):
        assert cut_size(path3(), set()) == 0

    def test_path_end_node(self):
        assert cut_size(path3(), {0}) == 1

    def test_out_of_range_id(self):
        with pytest.raises(GraphError):
            cut_size(path3(), {7})

    @given(small_graphs, st.sets(st.integers(0, 5)))
    @settings(max_examples=60, deadline=None)
    def test_complement_symmetry(self, g, members):
        bag = {u for u in members if u < g.node_count}
        comp = set(g.nodes()) - bag
        assert cut_size(g, bag) == cut_size(g, comp)


class TestSubgraph:
    def test_triangle_two_nodes(self):
        sub = subgraph(triangle(), {0, 2})
        assert sub.node_count == 2
        assert sub.edges == ((0, 1, Fraction(1)),)
        assert sub.parent_nodes == (0, 2)

    def test_all_nodes_is_identity(self):
        g = path3()
        sub = subgraph(g, {0, 1, 2})
        assert sub.edges == g.edges

    def test_singleton(self):
        sub = subgraph(path3(), {1})
        assert sub.node_count == 1 and sub.edge_count == 0


class TestMaxDegree:
    def test_edgeless(self):
        assert max_degree(WeightedGraph(3, [])) == 0

    def test_star(self):
        assert max_degree(star13()) == 3

    def test_single_light_edge(self):
        assert max_degree(WeightedGraph(2, [(0, 1, "0.4")])) == Fraction(2, 5)


class TestCrusade:
    def test_width_path(self):
        p = Crusade.from_removal_order({0, 1, 2}, [0, 1, 2])
        g = path3()
        # direct evaluation of the cut of every bag: (0, 1, 1, 0)
        assert [cut_size(g, b) for b in p.bags] == [0, 1, 1, 0]
        assert crusade_width(g, p) == 1

    def test_width_empty_crusade(self):
        assert crusade_width(path3(), Crusade([frozenset()])) == 0

    def test_width_star(self):
        p = Crusade.from_removal_order({0, 1, 2, 3}, [1, 2, 0, 3])
        assert crusade_width(star13(), p) == 2

    def test_invalid_nesting(self):
        with pytest.raises(CrusadeStructureError):
            Crusade([frozenset({0, 1}), frozenset({0, 1})])
        with pytest.raises(CrusadeStructureError):
            Crusade.from_removal_order({0, 1}, [0], terminal={9})

    def test_removal_order_roundtrip(self):
        p = Crusade.from_removal_order({0, 1, 2, 3}, [2, 0, 3, 1])
        assert p.removal_order == (2, 0, 3, 1)


class TestRestrictedMaxCut:
    def test_triangle_full_bag(self):
        # oracle: enumerate all 8 subsets directly
        g = triangle()
        expected = max(cut_size(g, q)
                       for r in range(4)
                       for q in itertools.combinations(range(3), r))
        value, witness = restricted_max_cut_exact(g, {0, 1, 2})
        assert value == expected == 2
        assert cut_size(g, witness) == value

    def test_empty_bag(self):
        assert restricted_max_cut_exact(triangle(), set())[0] == 0

    def test_single_node_of_degree_two(self):
        value, _ = restricted_max_cut_exact(path3(), {1})
        assert value == 2

    def test_capacity_error(self):
        g = WeightedGraph(25, [])
        with pytest.raises(CapacityError):
            restricted_max_cut_exact(g, range(25), limit=20)

    @given(small_graphs)
    @settings(max_examples=40, deadline=None)
    def test_full_bag_equals_classic_max_cut(self, g):
        n = g.node_count
        classic = max(cut_size(g, q)
                      for r in range(n + 1)
                      for q in itertools.combinations(range(n), r))
        assert restricted_max_cut_exact(g, range(n))[0] == classic


class TestImpedance:
    def test_path(self):
        value, p = impedance_exact(path3(), {0, 1, 2})
        assert value == 1
        assert crusade_width(path3(), p) == value

    def test_star(self):
        value, p = impedance_exact(star13(), {0, 1, 2, 3})
        assert value == 2
        assert crusade_width(star13(), p) == value

    def test_singleton_bag(self):
        value, p = impedance_exact(path3(), {1})
        assert value == 2
        assert p.bags == (frozenset({1}), frozenset())

    def test_lower_bounded_by_cut(self):
        rng = random.Random(5)
        for _ in range(20):
            g = random_connected_graph(rng, rng.randint(2, 7))
            bag = {u for u in g.nodes() if rng.random() < 0.7}
            value, p = impedance_exact(g, bag)
            assert value >= cut_size(g, bag)
            assert crusade_width(g, p) == value

    def test_matches_plain_permutation_enumeration(self):
        rng = random.Random(11)
        for _ in range(15):
            g = random_connected_graph(rng, rng.randint(2, 6))
            bag = frozenset(g.nodes())
            brute = min(
                crusade_width(g, Crusade.from_removal_order(bag, perm))
                for perm in itertools.permutations(sorted(bag)))
            assert impedance_exact(g, bag)[0] == brute
            assert min_width_over_orderings(g, bag) == brute


class TestFairness:
    def spec(self, **kw):
        defaults = dict(groups=(0, 0, 1, 1), checkpoints=(2,), gamma=1)
        defaults.update(kw)
        return FairnessSpec(**defaults)

    def test_one_group_hogs_first_segment(self):
        p = Crusade.from_removal_order({0, 1, 2, 3}, [0, 1, 2, 3])
        assert not is_gamma_fair(p, self.spec())

    def test_balanced_segments_pass(self):
        p = Crusade.from_removal_order({0, 1, 2, 3}, [0, 2, 1, 3])
        assert is_gamma_fair(p, self.spec())

    def test_no_checkpoints_vacuous(self):
        p = Crusade.from_removal_order({0, 1, 2, 3}, [0, 1, 2, 3])
        assert is_gamma_fair(p, self.spec(checkpoints=()))

    def test_checkpoint_out_of_range(self):
        p = Crusade.from_removal_order({0, 1}, [0, 1])
        with pytest.raises(GraphError):
            is_gamma_fair(p, FairnessSpec(groups=(0, 1), checkpoints=(2,)))

    def test_monotone_in_gamma(self):
        rng = random.Random(3)
        for _ in range(40):
            n = rng.randint(3, 6)
            order = list(range(n))
            rng.shuffle(order)
            p = Crusade.from_removal_order(range(n), order)
            groups = tuple(rng.randint(0, 1) for _ in range(n))
            tau = rng.randint(1, n - 1)
            lo = FairnessSpec(groups=groups, checkpoints=(tau,), gamma=1)
            hi = FairnessSpec(groups=groups, checkpoints=(tau,), gamma=Fraction(7, 4))
            if is_gamma_fair(p, lo):
                assert is_gamma_fair(p, hi)

    def test_gamma_below_one_rejected(self):
        with pytest.raises(GraphError):
            FairnessSpec(groups=(0, 1), gamma=Fraction(1, 2))


class TestFairImpedance:
    def test_no_checkpoints_equals_impedance(self):
        g = random_connected_graph(random.Random(2), 6)
        spec = FairnessSpec(groups=(0, 1, 0, 1, 0, 1))
        assert fair_impedance_exact(g, range(6), spec)[0] == impedance_exact(g, range(6))[0]

    def test_path4_matches_ordering_enumeration(self):
        g = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        spec = FairnessSpec(groups=(0, 0, 1, 1), checkpoints=(2,), gamma=1)
        bag = frozenset(range(4))
        # oracle: all 24 orderings, fairness-filtered
        brute = min(
            (crusade_width(g, Crusade.from_removal_order(bag, perm))
             for perm in itertools.permutations(range(4))
             if is_gamma_fair(Crusade.from_removal_order(bag, perm), spec)),
            default=math.inf)
        value, p = fair_impedance_exact(g, bag, spec)
        assert value == brute
        assert is_gamma_fair(p, spec)
        assert crusade_width(g, p) == value

    def test_random_instances_match_enumeration(self):
        rng = random.Random(17)
        for _ in range(12):
            n = rng.randint(3, 6)
            g = random_connected_graph(rng, n)
            groups = tuple(rng.randint(0, 1) for _ in range(n))
            taus = sorted(rng.sample(range(1, n), rng.randint(1, min(2, n - 1))))
            spec = FairnessSpec(groups=groups, checkpoints=tuple(taus),
                                gamma=Fraction(rng.choice([1, 2])))
            bag = frozenset(range(n))
            brute = min(
                (crusade_width(g, Crusade.from_removal_order(bag, perm))
                 for perm in itertools.permutations(range(n))
                 if is_gamma_fair(Crusade.from_removal_order(bag, perm), spec)),
                default=math.inf)
            value, p = fair_impedance_exact(g, bag, spec)
            assert value == brute
            if value != INFEASIBLE:
                assert is_gamma_fair(p, spec)

    def test_fair_crusade_always_exists_single_checkpoint(self):
        # proportional apportionment argument: own-bag quotas are satisfiable
        rng = random.Random(23)
        for _ in range(20):
            n = rng.randint(3, 7)
            g = random_connected_graph(rng, n)
            groups = tuple(rng.randint(0, 2) for _ in range(n))
            spec = FairnessSpec(groups=groups, checkpoints=(rng.randint(1, n - 1),))
            value, p = fair_impedance_exact(g, range(n), spec)
            assert value != INFEASIBLE
