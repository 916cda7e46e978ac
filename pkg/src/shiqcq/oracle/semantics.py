"""Set-based semantics of concepts, knowledge bases, forests and queries over finite interpretations."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterator, Mapping

from ..kb import (
    All, And, AtLeast, AtMost, Atom, Concept, ConceptAssertion, Inequality, KnowledgeBase, Not,
    Or, Role, RoleAssertion, RoleBox, Some,
)


class UnknownName(KeyError):
    pass


@dataclass
class Interpretation:
    domain: tuple
    concepts: dict[str, frozenset] = field(default_factory=dict)
    roles: dict[str, frozenset] = field(default_factory=dict)
    individuals: dict[str, Hashable] = field(default_factory=dict)

    def concept_ext(self, name: str, strict: bool = False) -> frozenset:
        if name in self.concepts:
            return self.concepts[name]
        if strict:
            raise UnknownName(name)
        return frozenset()

    def role_ext(self, r: Role, strict: bool = False) -> frozenset:
        if r.name in self.roles:
            pairs = self.roles[r.name]
        elif strict:
            raise UnknownName(r.name)
        else:
            pairs = frozenset()
        if r.inverted:
            return frozenset((b, a) for a, b in pairs)
        return pairs

    def successors(self, r: Role, x) -> list:
        return [b for a, b in self.role_ext(r) if a == x]

    def respects(self, rbox: RoleBox) -> bool:
        """Transitive roles are transitively closed and role inclusions hold."""
        for sub, sup in rbox.inclusions:
            if not self.role_ext(sub) <= self.role_ext(sup):
                return False
        for name in rbox.transitive:
            rel = self.role_ext(Role(name))
            if any((a, d) not in rel for a, b in rel for c, d in rel if b == c):
                return False
        return True

    def render(self) -> str:
        lines = ["domain: " + " ".join(str(e) for e in self.domain)]
        for name in sorted(self.concepts):
            lines.append(f"concept {name}: " + " ".join(str(e) for e in sorted(self.concepts[name])))
        for name in sorted(self.roles):
            pairs = sorted(self.roles[name])
            lines.append(f"role {name}: " + " ".join(f"({a},{b})" for a, b in pairs))
        for name in sorted(self.individuals):
            lines.append(f"individual {name} = {self.individuals[name]}")
        return "\n".join(lines) + "\n"


def eval_concept(i: Interpretation, c: Concept, strict: bool = False) -> frozenset:
    """Extension of ``c`` in ``i``; raw (non-NNF) concepts are accepted too."""
    dom = frozenset(i.domain)
    if isinstance(c, Atom):
        return i.concept_ext(c.name, strict) & dom
    if isinstance(c, Not):
        return dom - eval_concept(i, c.operand, strict)
    if isinstance(c, And):
        return eval_concept(i, c.left, strict) & eval_concept(i, c.right, strict)
    if isinstance(c, Or):
        return eval_concept(i, c.left, strict) | eval_concept(i, c.right, strict)
    filler = eval_concept(i, c.filler, strict)
    rel = i.role_ext(c.role, strict)
    counts = {x: 0 for x in dom}
    related = {x: 0 for x in dom}
    for a, b in rel:
        related[a] += 1
        if b in filler:
            counts[a] += 1
    if isinstance(c, Some):
        return frozenset(x for x in dom if counts[x] > 0)
    if isinstance(c, All):
        return frozenset(x for x in dom if counts[x] == related[x])
    if isinstance(c, AtLeast):
        return frozenset(x for x in dom if counts[x] >= c.count)
    if isinstance(c, AtMost):
        return frozenset(x for x in dom if counts[x] <= c.count)
    raise TypeError(f"not a concept: {c!r}")


def is_model_kb(i: Interpretation, kb: KnowledgeBase) -> bool:
    if not i.domain or not i.respects(kb.rbox):
        return False
    ind = i.individuals
    if any(name not in ind for name in kb.individuals):
        return False
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            if ind[a.individual] not in eval_concept(i, a.concept):
                return False
        elif isinstance(a, RoleAssertion):
            if (ind[a.subject], ind[a.object]) not in i.role_ext(a.role):
                return False
        elif isinstance(a, Inequality):
            if ind[a.left] == ind[a.right]:
                return False
    return all(eval_concept(i, g.sub) <= eval_concept(i, g.sup) for g in kb.tbox)


def is_model_forest(i: Interpretation, f, kb: KnowledgeBase, node_map: Mapping[int, Hashable]) -> bool:
    """Model of ``kb`` that also satisfies every node label, edge label and inequality of ``f``."""
    if not is_model_kb(i, kb):
        return False
    for name in kb.individuals:
        if i.individuals[name] != node_map[f.node_of(name)]:
            return False
    cache: dict[Concept, frozenset] = {}
    for x in f.alive_nodes():
        for c in f.labels[x]:
            if c not in cache:
                cache[c] = eval_concept(i, c)
            if node_map[x] not in cache[c]:
                return False
    for (x, y), roles in f.edges.items():
        for r in roles:
            if (node_map[x], node_map[y]) not in i.role_ext(r):
                return False
    return all(node_map[a] != node_map[b] for a, b in (tuple(p) for p in f.neq))


def _matches(i: Interpretation, q) -> Iterator[dict]:
    from ..query import ConceptAtom

    ind = i.individuals
    for const in q.constants:
        if const not in ind:
            raise UnknownName(const)
    variables = q.variables
    for values in product(i.domain, repeat=len(variables)):
        sigma = dict(zip(variables, values))

        def val(t):
            return sigma[t] if t in sigma else ind[t]

        if all(
            val(a.term) in i.concept_ext(a.name)
            if isinstance(a, ConceptAtom)
            else (val(a.subject), val(a.object)) in i.role_ext(a.role)
            for a in q.atoms
        ):
            yield sigma


def query_matches(i: Interpretation, q) -> list[dict]:
    """Every variable assignment that satisfies ``q`` in ``i``."""
    return list(_matches(i, q))


def satisfies_query(i: Interpretation, q) -> bool:
    return next(_matches(i, q), None) is not None
