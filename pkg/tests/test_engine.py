from itertools import islice

import pytest

from shiqcq.engine import (
    BlockedForest, Budget, BudgetExceeded, InapplicableRule, RuleInstance, applicable_rule_instances, apply_rule,
    expand, materialize_model, sat,
)
from shiqcq.forest import dump, init_forest
from shiqcq.kb import All, AtLeast, Atom, Not, Or, Role, Some
from shiqcq.oracle.semantics import is_model_kb
from shiqcq.syntax import parse_kb

A, B, C, D = Atom("A"), Atom("B"), Atom("C"), Atom("D")
R = Role("R")


def first(f, kb, rule, n=1):
    return next(i for i in applicable_rule_instances(f, kb, n) if i.rule == rule)


def test_and_rule_adds_both_conjuncts():
    kb = parse_kb("assert (and A B)(a).\n")
    f = init_forest(kb)
    (g,) = apply_rule(f, first(f, kb, "and"), kb)
    assert {A, B} <= g.labels[0]
    assert A not in f.labels[0]


def test_or_rule_branches_in_order():
    kb = parse_kb("assert (or A B)(a).\n")
    f = init_forest(kb)
    left, right = apply_rule(f, first(f, kb, "or"), kb)
    assert A in left.labels[0] and B not in left.labels[0]
    assert B in right.labels[0]


def test_exists_rule_seeds_the_child_with_global_constraints():
    kb = parse_kb("axiom A <= B.\nassert (some R C)(a).\n")
    f = init_forest(kb)
    (g,) = apply_rule(f, first(f, kb, "exists"), kb)
    assert g.labels[1] == {C, Or(Not(A), B)}
    assert g.edge(0, 1) == {R}


def test_atleast_rule_creates_pairwise_distinct_children():
    kb = parse_kb("assert (atleast 3 R A)(a).\n")
    f = init_forest(kb)
    (g,) = apply_rule(f, first(f, kb, "atleast"), kb)
    kids = g.children[0]
    assert len(kids) == 3
    assert all(g.are_neq(x, y) for x in kids for y in kids if x != y)


def test_forall_and_forall_plus():
    kb = parse_kb("trans R.\nassert (all R B)(a).\nassert R(a, b).\n")
    f = init_forest(kb)
    rules = {i.rule for i in applicable_rule_instances(f, kb, 1)}
    assert rules == {"forall", "forall-plus"}
    (g,) = apply_rule(f, first(f, kb, "forall"), kb)
    assert B in g.labels[1]
    (h,) = apply_rule(f, first(f, kb, "forall-plus"), kb)
    assert All(R, B) in h.labels[1]


def test_choose_rule_offers_filler_and_its_negation():
    kb = parse_kb("assert (atmost 1 R (some R A))(a).\nassert R(a, b).\n")
    f = init_forest(kb)
    inst = first(f, kb, "choose")
    assert inst.target == 1
    yes, no = apply_rule(f, inst, kb)
    assert Some(R, A) in yes.labels[1]
    assert All(R, Not(A)) in no.labels[1]


def test_atmost_merges_a_tree_child_into_a_sibling():
    kb = parse_kb("assert (some R (and B C))(a).\nassert (some R (and B D))(a).\nassert (atmost 1 R B)(a).\n")
    f = sat(kb, 1).forest
    y, z = f.children[0]
    # the first alternative merges the older child; it keeps its label behind an empty edge
    assert f.edge(0, y) == frozenset()
    assert f.edge(0, z) == {R}
    assert {B, C, D} <= f.labels[z]
    assert C in f.labels[y]


def test_atmost_merges_into_the_parent_through_an_inverse_role():
    kb = parse_kb(
        "axiom C <= (and (some (inv R) (and D E)) (atmost 1 (inv R) D)).\nassert (some R C)(a).\nassert D(a).\n"
    )
    res = sat(kb, 1)
    assert res.satisfiable
    f = res.forest
    (x,) = f.children[0]
    (y,) = f.children[x]
    assert f.edge(x, y) == frozenset()
    assert Atom("E") in f.labels[0]
    assert f.edge(0, x) == {R}


def test_root_merge_retires_the_higher_id():
    kb = parse_kb("assert R(a, b).\nassert R(a, c).\nassert B(b).\nassert B(c).\nassert (atmost 1 R B)(a).\n")
    f = init_forest(kb)
    inst = first(f, kb, "atmost-root")
    assert inst.alternatives == ((2, 1),)
    (g,) = apply_rule(f, inst, kb)
    assert g.merged == {2: 1}
    assert g.node_of("c") == 1
    assert g.edge(0, 1) == {R}
    assert (0, 2) not in g.edges


def test_stale_instances_are_rejected():
    kb = parse_kb("assert (and A B)(a).\n")
    f = init_forest(kb)
    inst = first(f, kb, "and")
    (g,) = apply_rule(f, inst, kb)
    with pytest.raises(InapplicableRule):
        apply_rule(g, inst, kb)
    with pytest.raises(InapplicableRule):
        apply_rule(f, RuleInstance("exists", 0, Some(R, A), 1), kb)


def test_priority_puts_deterministic_rules_before_branching_and_generating():
    kb = parse_kb("assert (and A B)(a).\nassert (or A B)(a).\nassert (some R A)(a).\n")
    rules = [i.rule for i in applicable_rule_instances(init_forest(kb), kb, 1)]
    assert rules == ["and", "or", "exists"]


def test_unsatisfiable_kb(corpus):
    kb = parse_kb((corpus / "unsat.shiq").read_text())
    res = sat(kb)
    assert not res.satisfiable
    assert res.stats.clashed >= 1


def test_budget_abort_reports_statistics():
    kb = parse_kb("axiom A <= (some R A).\naxiom A <= (or B C).\nassert A(a).\n")
    with pytest.raises(BudgetExceeded) as err:
        sat(kb, 3, Budget(max_forests=2))
    assert err.value.reason == "max_forests"
    assert "budget_hit=true" in err.value.stats.report()
    with pytest.raises(BudgetExceeded) as err:
        sat(kb, 3, Budget(max_nodes=2))
    assert err.value.reason == "max_nodes"


def test_search_is_deterministic():
    # thousands of complete forests: every node picks B or C, so only a prefix is compared
    kb = parse_kb("axiom A <= (or B C).\naxiom B <= (some R A).\nassert A(a).\nassert (atleast 2 R C)(a).\n")
    runs = [[dump(f, 2) for f in islice(expand(kb, 2).ccf(), 20)] for _ in range(2)]
    assert runs[0] == runs[1]
    assert len(set(runs[0])) == 20


def test_materialized_model_of_an_unblocked_forest():
    kb = parse_kb("axiom A <= (or B C).\nassert A(a).\nassert (atleast 2 R A)(a).\n")
    for f in expand(kb, 1).ccf():
        i = materialize_model(f, kb)
        assert is_model_kb(i, kb)


def test_blocked_forest_has_no_finite_canonical_model():
    kb = parse_kb("axiom A <= (some R A).\nassert A(a).\n")
    with pytest.raises(BlockedForest):
        materialize_model(sat(kb, 1).forest, kb)


def test_clashing_forest_is_rejected():
    kb = parse_kb("assert A(a).\nassert (not A)(a).\n", validate=True)
    with pytest.raises(ValueError):
        materialize_model(init_forest(kb), kb)


def test_atleast_zero_never_fires():
    kb = parse_kb("assert (atleast 0 R A)(a).\n")
    assert not [i for i in applicable_rule_instances(init_forest(kb), kb, 1) if i.rule == "atleast"]
    assert AtLeast(0, R, A) in init_forest(kb).labels[0]
