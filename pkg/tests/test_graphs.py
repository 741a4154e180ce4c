import pytest
from hypothesis import given
from hypothesis import strategies as st

from bnselect.graphio import load_fixture
from bnselect.graphs import (
    ConditionalDag,
    CycleError,
    Dag,
    GraphError,
    JoinTree,
    NotChordalError,
    Pdag,
    UnknownNodeError,
    ancestors,
    descendants,
    fix,
    induced_subgraph,
    is_chordal,
    join_tree,
    maximal_cliques,
    skeleton,
    unshielded_colliders,
    unshielded_undirected_path_tree,
)
from oracles import chordal_by_definition, maximal_cliques_by_definition
from randgen import random_chordal, random_dag

seeds = st.integers(min_value=0, max_value=10_000)


def undirected(*pairs):
    names = sorted({v for pair in pairs for v in pair})
    return Pdag(names, (), pairs)


class TestDag:
    def test_basic_accessors(self):
        g = Dag(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert g.nodes == ("a", "b", "c")
        assert g.parents_of("b") == frozenset({"a"})
        assert g.children_of("b") == frozenset({"c"})
        assert g.adjacent_to("b") == frozenset({"a", "c"})
        assert g.has_link("a", "b") and g.has_link("b", "a")
        assert not g.has_link("a", "c")

    def test_rejects_unknown_edge_endpoint(self):
        with pytest.raises(UnknownNodeError):
            Dag(["a"], [("a", "b")])

    def test_rejects_duplicate_node(self):
        with pytest.raises(GraphError):
            Dag(["a", "a"], [])

    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            Dag(["a"], [("a", "a")])

    def test_rejects_both_orientations(self):
        with pytest.raises(GraphError):
            Dag(["a", "b"], [("a", "b"), ("b", "a")])

    def test_rejects_cycle(self):
        with pytest.raises(CycleError):
            Dag(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])

    def test_rejects_bad_name(self):
        with pytest.raises(GraphError):
            Dag(["a b"], [])

    def test_equality_ignores_node_order(self):
        g = Dag(["a", "b"], [("a", "b")])
        h = Dag(["b", "a"], [("a", "b")])
        assert g == h and hash(g) == hash(h)

    def test_topological_order_is_lexicographic_among_ready(self):
        g = Dag(["c", "a", "b"], [("a", "c"), ("b", "c")])
        assert g.topological_order() == ("a", "b", "c")

    @given(seeds)
    def test_topological_order_respects_edges(self, seed):
        g = random_dag(seed, max_nodes=7)
        position = {v: i for i, v in enumerate(g.topological_order())}
        assert all(position[a] < position[b] for a, b in g.edges)


class TestPdag:
    def test_undirected_edges_are_canonical(self):
        p = Pdag(["a", "b"], (), [("b", "a")])
        assert p.undirected_edges == frozenset({("a", "b")})
        assert p.neighbors_of("a") == frozenset({"b"})

    def test_neighbors_exclude_directed(self):
        p = Pdag(["a", "b", "c"], [("a", "b")], [("b", "c")])
        assert p.neighbors_of("b") == frozenset({"c"})
        assert p.parents_of("b") == frozenset({"a"})
        assert p.adjacent_to("b") == frozenset({"a", "c"})

    def test_rejects_edge_in_both_parts(self):
        with pytest.raises(GraphError):
            Pdag(["a", "b"], [("a", "b")], [("a", "b")])

    def test_rejects_directed_cycle(self):
        with pytest.raises(CycleError):
            Pdag(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")], ())


class TestConditionalDag:
    def test_fixed_nodes_must_be_sources(self):
        with pytest.raises(GraphError):
            ConditionalDag(["a"], ["f"], [("a", "f")])

    def test_node_order_random_then_fixed(self):
        g = ConditionalDag(["a", "b"], ["f"], [("f", "a"), ("a", "b")])
        assert g.nodes == ("a", "b", "f")
        assert g.random_nodes == ("a", "b")
        assert g.parents_of("a") == frozenset({"f"})


class TestReachability:
    def test_ancestors_are_reflexive(self):
        g = Dag(["a", "b"], [("a", "b")])
        assert ancestors(g, ["b"]) == {"a", "b"}
        assert ancestors(g, ["a"]) == {"a"}

    def test_fixture_ancestor_sets(self):
        g = load_fixture("fig3a").to_dag()
        assert ancestors(g, ["S"]) == {"O1", "O2", "O3", "O4", "S"}
        assert descendants(g, ["O4"]) == {"O1", "O2", "O3", "O4", "O5", "S"}

    def test_unknown_target_rejected(self):
        with pytest.raises(UnknownNodeError):
            ancestors(Dag(["a"], []), ["zzz"])

    def test_pdag_ancestors_ignore_undirected(self):
        p = Pdag(["a", "b", "c"], [("a", "b")], [("b", "c")])
        assert ancestors(p, ["c"]) == {"c"}
        assert ancestors(p, ["b"]) == {"a", "b"}

    @given(seeds)
    def test_ancestors_closed_under_parents(self, seed):
        g = random_dag(seed)
        target = g.nodes[0]
        anc = ancestors(g, [target])
        assert all(g.parents_of(v) <= anc for v in anc)


class TestSurgery:
    def test_fix_removes_incoming_edges(self):
        g = Dag(["a", "b", "c"], [("a", "b"), ("b", "c")])
        h = fix(g, ["b"])
        assert h.fixed_nodes == ("b",)
        assert h.edges == frozenset({("b", "c")})
        assert h.parents_of("b") == frozenset()

    def test_induced_subgraph_dag(self):
        g = Dag(["a", "b", "c"], [("a", "b"), ("b", "c")])
        h = induced_subgraph(g, ["a", "c"])
        assert h.nodes == ("a", "c") and h.edges == frozenset()

    def test_induced_subgraph_pdag(self):
        p = Pdag(["a", "b", "c"], [("a", "b")], [("b", "c")])
        q = induced_subgraph(p, ["b", "c"])
        assert q.undirected_edges == frozenset({("b", "c")})
        assert q.directed_edges == frozenset()

    def test_skeleton_drops_directions(self):
        g = Dag(["a", "b"], [("b", "a")])
        assert skeleton(g).undirected_edges == frozenset({("a", "b")})


class TestColliders:
    def test_diamond_fixture(self):
        g = load_fixture("fig2").to_dag()
        assert unshielded_colliders(g) == {("O2", "S", "O3")}

    def test_shielded_chain_fixture(self):
        g = load_fixture("fig4").to_dag()
        assert unshielded_colliders(g) == {("O1", "O4", "O3")}

    def test_shielding_suppresses_triple(self):
        g = Dag(["a", "b", "c"], [("a", "c"), ("b", "c"), ("a", "b")])
        assert unshielded_colliders(g) == frozenset()


class TestChordality:
    def test_square_is_not_chordal(self):
        p = undirected(("a", "b"), ("b", "c"), ("c", "d"), ("a", "d"))
        assert not is_chordal(p)

    def test_square_with_chord_is_chordal(self):
        p = undirected(("a", "b"), ("b", "c"), ("c", "d"), ("a", "d"),
                       ("a", "c"))
        assert is_chordal(p)

    def test_trees_and_triangles_are_chordal(self):
        assert is_chordal(undirected(("a", "b"), ("b", "c")))
        assert is_chordal(undirected(("a", "b"), ("b", "c"), ("a", "c")))

    def test_rejects_directed_part(self):
        with pytest.raises(GraphError):
            is_chordal(Pdag(["a", "b"], [("a", "b")], ()))

    @given(seeds)
    def test_matches_cycle_oracle(self, seed):
        p = random_chordal(seed, max_nodes=7)
        assert is_chordal(p)
        assert chordal_by_definition(p)

    @given(st.integers(min_value=4, max_value=8))
    def test_plain_cycles_fail(self, n):
        names = [f"v{i}" for i in range(n)]
        p = Pdag(names, (),
                 [(names[i], names[(i + 1) % n]) for i in range(n)])
        assert not is_chordal(p)
        assert not chordal_by_definition(p)


class TestCliques:
    def test_triangle_with_pendant(self):
        p = undirected(("a", "b"), ("b", "c"), ("a", "c"), ("c", "d"))
        assert maximal_cliques(p) == [frozenset({"a", "b", "c"}),
                                      frozenset({"c", "d"})]

    def test_empty_graph(self):
        assert maximal_cliques(Pdag([], (), ())) == []

    def test_isolated_nodes_are_cliques(self):
        p = Pdag(["a", "b"], (), ())
        assert maximal_cliques(p) == [frozenset({"a"}), frozenset({"b"})]

    @given(seeds)
    def test_matches_brute_force(self, seed):
        p = random_chordal(seed, max_nodes=7)
        assert maximal_cliques(p) == maximal_cliques_by_definition(p)


class TestJoinTree:
    def test_square_raises(self):
        p = undirected(("a", "b"), ("b", "c"), ("c", "d"), ("a", "d"))
        with pytest.raises(NotChordalError):
            join_tree(p)

    def test_path_graph(self):
        p = undirected(("a", "b"), ("b", "c"))
        jt = join_tree(p)
        assert set(jt.cliques) == {frozenset({"a", "b"}),
                                   frozenset({"b", "c"})}
        assert len(jt.tree_edges) == 1

    def test_tree_validation(self):
        cliques = [frozenset({"a", "b"}), frozenset({"b", "c"})]
        with pytest.raises(GraphError):
            JoinTree(cliques, [])
        with pytest.raises(GraphError):
            JoinTree(cliques, [(0, 0)])
        with pytest.raises(GraphError):
            JoinTree(cliques, [(0, 2)])

    def test_running_intersection_validation(self):
        cliques = [frozenset({"a", "b"}), frozenset({"c", "d"}),
                   frozenset({"a", "d"})]
        # b. . .a edge skips the clique holding a and d jointly
        with pytest.raises(GraphError):
            JoinTree(cliques, [(0, 1), (1, 2)])

    @given(seeds)
    def test_random_chordal_round_trip(self, seed):
        p = random_chordal(seed, max_nodes=7)
        jt = join_tree(p)
        assert set(jt.cliques) == set(maximal_cliques(p))
        covered = set()
        for c in jt.cliques:
            covered |= c
        assert covered == set(p.nodes)


class TestPathTree:
    def test_chain_gives_chain(self):
        p = undirected(("a", "b"), ("b", "c"), ("c", "d"))
        t = unshielded_undirected_path_tree(p, "a")
        assert t.undirected_edges == frozenset(
            {("a", "b"), ("b", "c"), ("c", "d")})

    def test_star_reaches_all_leaves(self):
        p = undirected(("hub", "a"), ("hub", "b"), ("hub", "c"))
        t = unshielded_undirected_path_tree(p, "a")
        assert t.undirected_edges == frozenset(
            {("a", "hub"), ("b", "hub"), ("c", "hub")})

    def test_triangle_paths_stop_at_shield(self):
        p = undirected(("a", "b"), ("b", "c"), ("a", "c"))
        t = unshielded_undirected_path_tree(p, "a")
        # b and c are adjacent to a, and the b..c step is shielded by a
        assert t.undirected_edges == frozenset({("a", "b"), ("a", "c")})

    def test_plain_square_is_rejected(self):
        p = undirected(("a", "b"), ("b", "c"), ("c", "d"), ("a", "d"))
        with pytest.raises(GraphError):
            unshielded_undirected_path_tree(p, "a")

    def test_merging_walks_keep_first_arrival(self):
        # two triangles glued along b. .c; both a-b-d and a-c-d are
        # unshielded, so d is reachable twice and parents to b
        p = undirected(("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"),
                       ("c", "d"))
        t = unshielded_undirected_path_tree(p, "a")
        assert t.undirected_edges == frozenset(
            {("a", "b"), ("a", "c"), ("b", "d")})

    @given(seeds)
    def test_chordal_graphs_give_trees(self, seed):
        p = random_chordal(seed, max_nodes=8)
        for root in p.nodes:
            t = unshielded_undirected_path_tree(p, root)
            assert len(t.undirected_edges) == len(t.nodes) - 1
            assert root in t.nodes
