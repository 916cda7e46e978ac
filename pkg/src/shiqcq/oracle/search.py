"""Brute-force questions answered by the enumeration kernels."""
from __future__ import annotations

from dataclasses import dataclass

from ..forest import init_forest
from ..kb import Concept, KnowledgeBase
from ._opcodes import COMPARE, FIND, PRESERVE
from .compile import Constraints, Problem, Program, Signature, add_query, decode
from .semantics import Interpretation, is_model_kb, satisfies_query


@dataclass(frozen=True)
class Comparison:
    """Outcome of comparing two model sets lane by lane.

    ``bad`` counts (role assignment, term map, lane) triples on which the sets
    disagree, ``models`` and ``other`` the sizes of the two sets (modulo symmetry).
    """

    bad: int
    models: int
    other: int
    first: Interpretation | None = None

    @property
    def equal(self) -> bool:
        return self.bad == 0


def _individual_terms(kb: KnowledgeBase) -> dict[str, int]:
    return {name: i for i, name in enumerate(kb.individuals)}


def countermodel_search(kb: KnowledgeBase, q, max_domain: int, symmetric: bool = True,
                        backend=None) -> Interpretation | None:
    """First model of ``kb`` (domain sizes 1..max_domain) in which ``q`` has no match.

    Finding none is not evidence of entailment beyond the sizes searched.
    """
    from ..query import prepare

    kb = prepare(kb, q)
    term_of = _individual_terms(kb)
    sig = Signature.collect(kb, query=q)
    for d in range(1, max_domain + 1):
        prog = Program(sig)
        problem = Problem(prog, [Constraints(prog).kb(kb, term_of)], len(term_of))
        add_query(problem, q, term_of)
        found, maps = problem.run(FIND, d, kb, symmetric=symmetric, backend=backend)
        if found is None:
            continue
        raw, mi, lane = found
        m = maps[mi]
        i = decode(sig, d, raw, lane, {name: m[t] for name, t in term_of.items()})
        if not is_model_kb(i, kb) or satisfies_query(i, q):
            raise AssertionError("kernel returned an interpretation that is not a countermodel")
        return i
    return None


def concept_equivalence(c1: Concept, c2: Concept, d: int, backend=None) -> Comparison:
    """Compare the extensions of two concepts in every interpretation of size ``d``."""
    sig = Signature.collect(concepts=(c1, c2))
    prog = Program(sig)
    same = Constraints(prog)
    same.subsumed(c1, c2)
    same.subsumed(c2, c1)
    problem = Problem(prog, [same, Constraints(prog)], 0)
    (bad, models, other, first), _ = problem.run(COMPARE, d, None, backend=backend)
    i = decode(sig, d, first[0], first[2], {}) if first else None
    return Comparison(bad, models, other, i)


def initial_forest_comparison(kb: KnowledgeBase, d: int, backend=None) -> Comparison:
    """Models of ``kb`` against models of its initial forest (roots pinned to their individuals)."""
    f = init_forest(kb)
    term_of = _individual_terms(kb)
    node_term = {f.roots[name]: t for name, t in term_of.items()}
    sig = Signature.collect(kb, concepts=[c for x in f.alive_nodes() for c in f.labels[x]])
    prog = Program(sig)
    plain = Constraints(prog).kb(kb, term_of)
    forest = Constraints(prog).kb(kb, term_of).forest(f, node_term)
    problem = Problem(prog, [plain, forest], len(term_of))
    (bad, models, other, first), maps = problem.run(COMPARE, d, kb, backend=backend)
    i = None
    if first:
        m = maps[first[1]]
        i = decode(sig, d, first[0], first[2], {name: m[t] for name, t in term_of.items()})
    return Comparison(bad, models, other, i)


@dataclass(frozen=True)
class Preservation:
    """Parent-forest models (``models``) and how many of them no successor forest admits (``lost``)."""

    lost: int
    models: int
    first: Interpretation | None = None

    @property
    def preserved(self) -> bool:
        return self.lost == 0


def preservation(kb: KnowledgeBase, f, successors, d: int, backend=None) -> Preservation:
    """Check that every size-``d`` model of forest ``f`` is a model of some forest in ``successors``.

    Nodes of ``f`` keep their element in every successor; nodes a successor
    adds are existentially quantified over the domain.
    """
    parent_nodes = f.alive_nodes()
    term = {x: i for i, x in enumerate(parent_nodes)}
    labels = [c for g in (f, *successors) for x in g.alive_nodes() for c in g.labels[x]]
    sig = Signature.collect(kb, concepts=labels)
    prog = Program(sig)
    ind_term = {name: term[f.node_of(name)] for name in kb.individuals}
    sets = [Constraints(prog).kb(kb, ind_term).forest(f, term)]
    exts = []
    for g in successors:
        g_term = dict(term)
        fresh = [x for x in g.alive_nodes() if x not in term]
        for k, x in enumerate(fresh):
            g_term[x] = len(term) + k
        cons = Constraints(prog)
        cons.kb(kb, {name: g_term[g.node_of(name)] for name in kb.individuals})
        cons.forest(g, g_term)
        for x in parent_nodes:
            if not g.is_alive(x):
                cons.eq(term[x], g_term[g.resolve(x)])
        sets.append(cons)
        exts.append(len(fresh))
    problem = Problem(prog, sets, len(term), exts=exts)
    (lost, models, _, first), maps = problem.run(PRESERVE, d, kb, backend=backend)
    i = None
    if first:
        m = maps[first[1]]
        i = decode(sig, d, first[0], first[2], {name: m[t] for name, t in ind_term.items()})
    return Preservation(lost, models, i)
