import pytest

from shiqcq.engine import sat
from shiqcq.forest import init_forest
from shiqcq.query import ConceptAtom, EntailmentConfig, Query, RoleAtom, blocking_depth, entails, maps_into
from shiqcq.kb import Role
from shiqcq.syntax import parse_kb, parse_query

R = Role("R")


def load(corpus, name):
    kb = parse_kb((corpus / f"{name}.shiq").read_text())
    return kb, parse_query((corpus / f"{name}.cq").read_text(), kb)


def test_query_needs_atoms():
    with pytest.raises(ValueError):
        Query(())


@pytest.mark.parametrize("name, expected", [("e1", True), ("e2", False), ("e3", True), ("chain", True)])
def test_worked_examples(corpus, name, expected):
    kb, q = load(corpus, name)
    verdict = entails(kb, q)
    assert verdict.entailed is expected
    assert verdict.params.complete


def test_not_entailed_comes_with_a_witness_and_countermodel(corpus):
    kb, q = load(corpus, "e2")
    verdict = entails(kb, q)
    assert verdict.label == "not_entailed"
    assert maps_into(verdict.witness, q) is None
    assert verdict.countermodel.concepts["B"] == frozenset()


def test_unsatisfiable_kb_entails_everything(corpus):
    kb = parse_kb((corpus / "unsat.shiq").read_text())
    verdict = entails(kb, parse_query("Z(a)"))
    assert verdict.entailed and verdict.forests == 0
    assert "unsatisfiable" in verdict.note


def test_blocking_depth_derivations(corpus):
    kb, q = load(corpus, "e1")
    params = blocking_depth(kb, q)
    assert (params.depth, params.derivation, params.complete) == (2, "n_Q", True)
    kb, q = load(corpus, "chain")
    params = blocking_depth(kb, q)
    assert (params.depth, params.derivation) == (4, "D*n_Q")
    low = blocking_depth(kb, q, 2)
    assert not low.complete and "below" in low.warning
    assert blocking_depth(kb, q, 9).complete
    with pytest.raises(ValueError):
        blocking_depth(kb, q, 0)


def test_incomplete_depth_downgrades_a_negative_verdict():
    kb = parse_kb("trans R.\naxiom A <= (or B C).\nassert A(a).\n")
    verdict = entails(kb, parse_query("B(a)"), EntailmentConfig(blocking_depth=1))
    assert verdict.label == "incomplete-blocking"
    assert "complete=false" in verdict.line()


def test_unknown_individuals_are_rejected(corpus):
    kb, _ = load(corpus, "e1")
    with pytest.raises(ValueError):
        entails(kb, parse_query("B(zz)"))


def test_mapping_returns_the_assignment(corpus):
    kb, q = load(corpus, "e3")
    f = sat(kb).forest
    assert maps_into(f, q) == {"a": 0, "?y": 1}


def test_mapping_through_inverse_roles():
    kb = parse_kb("assert R(a, b).\nassert B(a).\n")
    f = init_forest(kb)
    q = Query((RoleAtom(R.inv(), "b", "?x"), ConceptAtom("B", "?x")))
    assert maps_into(f, q) == {"b": 1, "?x": 0}
    assert maps_into(f, Query((RoleAtom(R, "b", "?x"),))) is None


def test_mapping_into_tree_nodes_and_shared_variables():
    kb = parse_kb("axiom A <= (some R B).\nassert A(a).\n")
    f = sat(kb).forest
    assert maps_into(f, parse_query("R(?x, ?y), B(?y), A(?x)")) is not None
    assert maps_into(f, parse_query("R(?x, ?x)")) is None


def test_mapping_ignores_nodes_behind_empty_edges():
    kb = parse_kb("assert (some R (and B C))(a).\nassert (some R (and B D))(a).\nassert (atmost 1 R B)(a).\n")
    f = sat(kb).forest
    # the merged-away child still carries C, but only through the survivor is it reachable
    assert maps_into(f, parse_query("R(a, ?y), C(?y), D(?y)")) is not None
    assert maps_into(f, parse_query("C(?y), R(?z, ?y)")) is not None
    f.labels[f.children[0][1]] = frozenset()
    assert maps_into(f, parse_query("C(?y)")) is None


def test_mapping_unknown_constant():
    kb = parse_kb("assert A(a).\n")
    with pytest.raises(KeyError):
        maps_into(init_forest(kb), parse_query("A(b)"))
