import random
from itertools import product

import pytest

from generators import random_concept, random_kb, random_query
from shiqcq.engine import applicable_rule_instances, apply_rule
from shiqcq.forest import init_forest
from shiqcq.kb import All, AtLeast, AtMost, Atom, Not, Or, Role, Some
from shiqcq.oracle import kernels
from shiqcq.oracle.compile import OracleLimit, Signature, restricted_growth
from shiqcq.oracle.search import (
    concept_equivalence, countermodel_search, initial_forest_comparison, preservation,
)
from shiqcq.oracle.semantics import (
    Interpretation, UnknownName, eval_concept, is_model_forest, is_model_kb, query_matches, satisfies_query,
)
from shiqcq.syntax import parse_kb, parse_query

A, B = Atom("A"), Atom("B")
R = Role("R")


def small():
    return Interpretation((1, 2, 3), {"A": frozenset({2, 3}), "B": frozenset({2})},
                          {"R": frozenset({(1, 2), (1, 3), (2, 3)})}, {"a": 1})


@pytest.mark.parametrize(
    "concept, ext",
    [
        (Some(R, B), {1}),
        (All(R, A), {1, 2, 3}),
        (All(R, B), {3}),
        (AtLeast(2, R, A), {1}),
        (AtMost(0, R, A), {3}),
        (Some(R.inv(), A), {3}),
        (Not(Or(A, B)), {1}),
    ],
)
def test_eval_concept(concept, ext):
    assert eval_concept(small(), concept) == ext


def test_query_satisfaction_by_enumeration():
    i = Interpretation((1, 2), {"B": frozenset({2})}, {"R": frozenset({(1, 2)})}, {"a": 1})
    q = parse_query("R(a, ?y), B(?y)")
    assert satisfies_query(i, q)
    assert query_matches(i, q) == [{"?y": 2}]
    assert not satisfies_query(i, parse_query("B(a)"))
    with pytest.raises(UnknownName):
        satisfies_query(i, parse_query("B(b)"))


def test_role_box_respected():
    kb = parse_kb("trans R.\nassert R(a, b).\n")
    i = Interpretation((0, 1, 2), {}, {"R": frozenset({(0, 1), (1, 2)})}, {"a": 0, "b": 1})
    assert not is_model_kb(i, kb)
    i.roles["R"] = frozenset({(0, 1), (1, 2), (0, 2)})
    assert is_model_kb(i, kb)


def test_forest_models_need_labels_and_inequalities():
    kb = parse_kb("axiom A <= B.\nassert A(a).\nassert a != b.\nassert R(a, b).\n")
    f = init_forest(kb)
    i = Interpretation((0, 1), {"A": frozenset({0}), "B": frozenset({0})}, {"R": frozenset({(0, 1)})},
                       {"a": 0, "b": 1})
    assert is_model_forest(i, f, kb, {0: 0, 1: 1})
    f.add_label(1, [A])
    assert not is_model_forest(i, f, kb, {0: 0, 1: 1})
    i.individuals["b"] = 0
    assert not is_model_forest(i, f, kb, {0: 0, 1: 0})


def test_countermodel_examples(corpus):
    kb = parse_kb((corpus / "e2.shiq").read_text())
    cm = countermodel_search(kb, parse_query("B(a)", kb), 1)
    assert cm is not None and cm.concepts["B"] == frozenset()
    kb = parse_kb((corpus / "e1.shiq").read_text())
    assert countermodel_search(kb, parse_query((corpus / "e1.cq").read_text(), kb), 3) is None
    kb = parse_kb((corpus / "unsat.shiq").read_text())
    assert countermodel_search(kb, parse_query("Z(a)"), 3) is None


def test_restricted_growth_strings():
    assert list(restricted_growth(0, 3)) == [()]
    assert list(restricted_growth(2, 1)) == [(0, 0)]
    assert len(list(restricted_growth(4, 4))) == 15
    assert len(list(restricted_growth(4, 3))) == 14


def test_signature_limits():
    with pytest.raises(OracleLimit):
        Signature(tuple("ABCDEF"), ()).check(3)
    with pytest.raises(OracleLimit):
        Signature((), ("R", "S", "T")).check(3)
    Signature(("A", "B"), ("R", "S")).check(3)


def brute_force_disagreements(c1, c2, d):
    sig = Signature.collect(concepts=(c1, c2))
    pairs = list(product(range(d), repeat=2))
    count = 0
    for bits in product((0, 1), repeat=len(sig.concepts) * d):
        concepts = {n: frozenset(e for e in range(d) if bits[k * d + e]) for k, n in enumerate(sig.concepts)}
        for rbits in product((0, 1), repeat=len(sig.roles) * d * d):
            roles = {n: frozenset(p for j, p in enumerate(pairs) if rbits[k * d * d + j])
                     for k, n in enumerate(sig.roles)}
            i = Interpretation(tuple(range(d)), concepts, roles, {})
            count += eval_concept(i, c1) != eval_concept(i, c2)
    return count


def unsymmetric(run):
    def go(*args):
        return run(*args[:-1], False)
    return go


def test_kernel_counts_match_set_semantics(backend):
    rng = random.Random(11)
    for _ in range(25):
        c1, c2 = random_concept(rng, 3, roles=("R",)), random_concept(rng, 3, roles=("R",))
        for d in (1, 2):
            assert concept_equivalence(c1, c2, d, unsymmetric(backend)).bad == brute_force_disagreements(c1, c2, d)


@pytest.mark.skipif(kernels.compiled_run is None, reason="compiled kernel not built")
def test_backends_agree_on_random_problems():
    rng = random.Random(12)
    py, cy = kernels.python_run, kernels.compiled_run
    for _ in range(15):
        kb = random_kb(rng, transitive=True)
        for d in (1, 2):
            assert initial_forest_comparison(kb, d, py) == initial_forest_comparison(kb, d, cy)
        q = random_query(rng, kb)
        a, b = countermodel_search(kb, q, 2, backend=py), countermodel_search(kb, q, 2, backend=cy)
        assert a == b
        f = init_forest(kb)
        for inst in applicable_rule_instances(f, kb, 1)[:3]:
            succ = apply_rule(f, inst, kb)
            assert preservation(kb, f, succ, 2, py) == preservation(kb, f, succ, 2, cy)


def test_symmetry_pruning_keeps_the_verdicts():
    rng = random.Random(13)
    for _ in range(20):
        kb = random_kb(rng)
        q = random_query(rng, kb)
        with_sym = countermodel_search(kb, q, 2)
        without = countermodel_search(kb, q, 2, symmetric=False)
        assert (with_sym is None) == (without is None)


def test_discrepancies_are_detected():
    cmp = concept_equivalence(Some(R, A), All(R, A), 2)
    assert not cmp.equal
    assert eval_concept(cmp.first, Some(R, A)) != eval_concept(cmp.first, All(R, A))


def test_preservation_notices_a_dropped_branch():
    kb = parse_kb("assert (or A B)(a).\n")
    f = init_forest(kb)
    (inst,) = applicable_rule_instances(f, kb, 1)
    left, right = apply_rule(f, inst, kb)
    assert preservation(kb, f, [left, right], 1).preserved
    lost = preservation(kb, f, [left], 1)
    assert not lost.preserved
    assert lost.first.concepts["A"] == frozenset()


def test_preservation_of_new_successors_and_root_merges():
    kb = parse_kb("assert (atleast 2 R A)(a).\n")
    f = init_forest(kb)
    (inst,) = applicable_rule_instances(f, kb, 1)
    assert preservation(kb, f, apply_rule(f, inst, kb), 3).preserved
    assert preservation(kb, f, apply_rule(f, inst, kb), 1).models == 0
    kb = parse_kb("assert R(a, b).\nassert R(a, c).\nassert B(b).\nassert B(c).\nassert (atmost 1 R B)(a).\n")
    f = init_forest(kb)
    (inst,) = [i for i in applicable_rule_instances(f, kb, 1) if i.rule == "atmost-root"]
    assert preservation(kb, f, apply_rule(f, inst, kb), 3).preserved


def test_environment_forces_the_pure_python_kernel():
    import os
    import subprocess
    import sys
    env = dict(os.environ, SHIQCQ_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from shiqcq.oracle import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
