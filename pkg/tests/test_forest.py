from shiqcq.engine import sat
from shiqcq.forest import (
    CompletionForest, blocking, dump, has_clash, init_forest, n_tree_iso, n_tree_nodes, r_connected, s_neighbours,
)
from shiqcq.kb import AtMost, Atom, Not, Or, Role, RoleBox
from shiqcq.syntax import parse_kb

A, B = Atom("A"), Atom("B")
R, S = Role("R"), Role("S")


def test_initial_forest_roots_labels_edges_and_inequalities():
    kb = parse_kb("axiom A <= B.\nassert A(a).\nassert R(a, b).\nassert a != b.\n")
    f = init_forest(kb)
    gc = Or(Not(A), B)
    assert f.roots == {"a": 0, "b": 1}
    assert f.labels[0] == {A, gc}
    assert f.labels[1] == {gc}
    assert f.edge(0, 1) == {R}
    assert f.are_neq(0, 1)


def test_neighbours_follow_inverses_and_role_inclusions():
    f = CompletionForest(RoleBox(((R, S),), ()))
    a = f.add_root("a", [A])
    x = f.add_child(a, [R], [B])
    y = f.add_child(x, [R.inv()], [B])
    assert s_neighbours(f, a, S) == [x]
    assert s_neighbours(f, x, R.inv()) == [a, y]
    assert s_neighbours(f, x, R) == []
    assert s_neighbours(f, y, S) == [x]
    assert s_neighbours(f, a, S.inv()) == []


def test_transitive_chains_connect_distant_nodes():
    f = CompletionForest(RoleBox(((R, S),), ("R",)))
    a = f.add_root("a", [])
    x = f.add_child(a, [R], [A])
    y = f.add_child(x, [R], [A])
    assert r_connected(f, a, y, S)
    assert r_connected(f, y, a, S.inv())
    assert not r_connected(f, y, a, S)
    assert not r_connected(f, a, y, S, within={a, y})


def test_chain_is_blocked_by_the_root_at_depth_one():
    # every A needs an R-successor in A: three tree nodes, the last one blocked
    kb = parse_kb("axiom A <= (some R A).\nassert A(a).\n")
    f = sat(kb, 1).forest
    status = blocking(f, 1)
    assert sorted(status) == [0, 1, 2, 3]
    assert [status[x].kind for x in (0, 1, 2)] == ["unblocked"] * 3
    assert status[3].direct
    assert (status[3].witness, status[3].tree_root) == (0, 2)
    assert dict(status[3].iso) == {2: 0, 3: 1}


def test_n_trees_and_isomorphisms():
    f = CompletionForest(RoleBox())
    a = f.add_root("a", [A])
    x = f.add_child(a, [R], [A])
    y = f.add_child(x, [R], [A])
    assert n_tree_nodes(f, a, 1) == [a, x]
    assert n_tree_iso(f, x, a, 1) == {x: a, y: x}
    assert n_tree_iso(f, y, a, 1) is None
    assert n_tree_iso(f, y, a, 0) == {y: a}


def test_empty_edge_makes_the_subtree_indirectly_blocked():
    f = CompletionForest(RoleBox())
    a = f.add_root("a", [A])
    x = f.add_child(a, [R], [A])
    y = f.add_child(x, [R], [A])
    f.edges[(a, x)] = frozenset()
    status = blocking(f, 2)
    assert status[x].indirect and status[y].indirect


def test_clashes():
    f = CompletionForest(RoleBox())
    a = f.add_root("a", [A, Not(A)])
    assert "A" in has_clash(f)
    g = CompletionForest(RoleBox())
    a = g.add_root("a", [AtMost(1, R, B)])
    x = g.add_child(a, [R], [B])
    y = g.add_child(a, [R], [B])
    assert has_clash(g) is None
    g.set_neq(x, y)
    assert "distinct" in has_clash(g)


def test_dump_is_deterministic_and_copies_are_independent():
    kb = parse_kb("axiom A <= (some R A).\nassert A(a).\n")
    f = sat(kb, 1).forest
    g = f.copy()
    assert dump(f, 1) == dump(g, 1)
    g.add_label(0, [B])
    assert B not in f.labels[0]
    assert dump(f) != dump(g)
    assert "status=direct(witness=0,tree=2)" in dump(f, 1)
