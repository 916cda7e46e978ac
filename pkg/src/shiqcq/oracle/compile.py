"""Translate knowledge bases, forests and queries into flat kernel problems."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from ..kb import (
    All, And, AtLeast, AtMost, Atom, Concept, ConceptAssertion, Inequality, KnowledgeBase, Not,
    Or, Role, RoleAssertion, Some, atomic_names, roles_in, subconcepts,
)
from . import kernels
from ._opcodes import (
    ALL, AND, ATLEAST, ATMOST, ATOM, C_EDGE, C_EQ, C_GLOBAL, C_MEMBER, C_NEQ, C_SUBSUMED, NATOM,
    NOT, OR, Q_CONCEPT, Q_ROLE, SOME,
)
from .semantics import Interpretation

#: Largest number of concept bits per domain (lanes = 2 ** this).
MAX_LANE_BITS = 16
#: Largest number of role bits per domain (role assignments = 2 ** this).
MAX_ROLE_BITS = 24


class OracleLimit(ValueError):
    """The signature is too large to enumerate at the requested domain size."""


@dataclass(frozen=True)
class Signature:
    concepts: tuple[str, ...]
    roles: tuple[str, ...]

    @classmethod
    def collect(cls, kb: KnowledgeBase | None = None, concepts: Iterable[Concept] = (), query=None):
        names: dict[str, None] = {}
        roles: dict[str, None] = {}
        if kb is not None:
            names.update(dict.fromkeys(sorted(kb.concept_names)))
            roles.update(dict.fromkeys(sorted(kb.role_names)))
        for c in concepts:
            names.update(dict.fromkeys(sorted(atomic_names(c))))
            roles.update(dict.fromkeys(sorted(r.name for r in roles_in(c))))
        if query is not None:
            names.update(dict.fromkeys(query.concept_names))
            roles.update(dict.fromkeys(query.role_names))
        return cls(tuple(names), tuple(roles))

    def check(self, d: int) -> None:
        if len(self.concepts) * d > MAX_LANE_BITS:
            raise OracleLimit(f"{len(self.concepts)} concept names at domain size {d}")
        if len(self.roles) * d * d > MAX_ROLE_BITS:
            raise OracleLimit(f"{len(self.roles)} role names at domain size {d}")


_ORDER = {C_NEQ: 0, C_EQ: 0, C_EDGE: 1, C_MEMBER: 2, C_GLOBAL: 3, C_SUBSUMED: 3}


class Program:
    """Concept registers shared by every constraint set of one problem."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.ops: list[int] = []
        self.memo: dict[Concept, int] = {}
        self.cidx = {n: i for i, n in enumerate(sig.concepts)}
        self.ridx = {n: i for i, n in enumerate(sig.roles)}

    def slot(self, r: Role) -> int:
        return 2 * self.ridx[r.name] + int(r.inverted)

    def _emit(self, code: int, x: int = 0, y: int = 0, z: int = 0) -> int:
        self.ops.extend((code, x, y, z))
        return len(self.ops) // 4 - 1

    def reg(self, c: Concept) -> int:
        got = self.memo.get(c)
        if got is not None:
            return got
        if isinstance(c, Atom):
            got = self._emit(ATOM, self.cidx[c.name])
        elif isinstance(c, Not) and isinstance(c.operand, Atom):
            got = self._emit(NATOM, self.cidx[c.operand.name])
        elif isinstance(c, Not):
            got = self._emit(NOT, self.reg(c.operand))
        elif isinstance(c, (And, Or)):
            left, right = self.reg(c.left), self.reg(c.right)
            got = self._emit(AND if isinstance(c, And) else OR, left, right)
        elif isinstance(c, (Some, All)):
            filler = self.reg(c.filler)
            got = self._emit(SOME if isinstance(c, Some) else ALL, self.slot(c.role), filler)
        elif isinstance(c, (AtLeast, AtMost)):
            filler = self.reg(c.filler)
            got = self._emit(ATLEAST if isinstance(c, AtLeast) else ATMOST, c.count, self.slot(c.role), filler)
        else:
            raise TypeError(f"not a concept: {c!r}")
        self.memo[c] = got
        return got


class Constraints:
    """A conjunction of constraint records over numbered terms."""

    def __init__(self, prog: Program):
        self.prog = prog
        self.records: dict[tuple[int, int, int, int], None] = {}

    def add(self, kind: int, x: int = 0, y: int = 0, z: int = 0) -> None:
        self.records.setdefault((kind, x, y, z))

    def member(self, c: Concept, term: int) -> None:
        self.add(C_MEMBER, self.prog.reg(c), term)

    def edge(self, r: Role, t1: int, t2: int) -> None:
        self.add(C_EDGE, self.prog.slot(r), t1, t2)

    def neq(self, t1: int, t2: int) -> None:
        self.add(C_NEQ, t1, t2)

    def eq(self, t1: int, t2: int) -> None:
        if t1 != t2:
            self.add(C_EQ, t1, t2)

    def subsumed(self, c: Concept, d: Concept) -> None:
        self.add(C_SUBSUMED, self.prog.reg(c), self.prog.reg(d))

    def everywhere(self, c: Concept) -> None:
        self.add(C_GLOBAL, self.prog.reg(c))

    def kb(self, kb: KnowledgeBase, term_of: dict[str, int]) -> Constraints:
        for g in kb.tbox:
            self.subsumed(g.sub, g.sup)
        for a in kb.abox:
            if isinstance(a, ConceptAssertion):
                self.member(a.concept, term_of[a.individual])
            elif isinstance(a, RoleAssertion):
                self.edge(a.role, term_of[a.subject], term_of[a.object])
            elif isinstance(a, Inequality):
                self.neq(term_of[a.left], term_of[a.right])
        return self

    def forest(self, f, term_of_node: dict[int, int]) -> Constraints:
        for x in f.alive_nodes():
            for c in sorted(f.labels[x]):
                self.member(c, term_of_node[x])
        for (x, y), roles in f.edges.items():
            for r in sorted(roles):
                self.edge(r, term_of_node[x], term_of_node[y])
        for pair in f.neq:
            a, b = sorted(pair)
            self.neq(term_of_node[a], term_of_node[b])
        return self

    def flat(self) -> list[int]:
        out: list[int] = []
        for rec in sorted(self.records, key=lambda r: _ORDER[r[0]]):
            out.extend(rec)
        return out


def restricted_growth(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """Maps of ``n`` terms onto elements ``0..d-1``, one per partition shape (elements used in order)."""
    def go(prefix: tuple[int, ...], used: int):
        if len(prefix) == n:
            yield prefix
            return
        for v in range(min(used + 1, d)):
            yield from go(prefix + (v,), max(used, v + 1))
    yield from go((), 0)


@dataclass
class Problem:
    prog: Program
    sets: list[Constraints]
    nterms: int
    exts: list[int] = field(default_factory=list)
    qatoms: list[int] = field(default_factory=list)
    nvars: int = 0

    @property
    def sig(self) -> Signature:
        return self.prog.sig

    def role_box(self, kb: KnowledgeBase | None):
        incl: list[int] = []
        trans: list[int] = []
        if kb is not None:
            for sub, sup in kb.rbox.inclusions:
                incl.extend((self.prog.slot(sub), self.prog.slot(sup)))
            trans = [self.prog.ridx[n] for n in kb.rbox.transitive if n in self.prog.ridx]
        return incl, trans

    def run(self, mode: int, d: int, kb: KnowledgeBase | None, maps: list[tuple[int, ...]] | None = None,
            symmetric: bool = True, backend=None):
        self.sig.check(d)
        if maps is None:
            maps = list(restricted_growth(self.nterms, d))
        flat_maps = [v for m in maps for v in m]
        incl, trans = self.role_box(kb)
        run = backend or kernels.run
        result = run(mode, d, len(self.sig.concepts), len(self.sig.roles), list(self.prog.ops), incl, trans,
                     [s.flat() for s in self.sets], list(self.exts), self.nterms, flat_maps,
                     list(self.qatoms), self.nvars, symmetric)
        return result, maps


def add_query(problem: Problem, q, term_of: dict[str, int]) -> None:
    from ..query import ConceptAtom

    prog = problem.prog
    var_index = {v: i for i, v in enumerate(q.variables)}

    def term(t: str) -> int:
        return -1 - var_index[t] if t in var_index else term_of[t]

    atoms: list[int] = []
    for a in q.atoms:
        if isinstance(a, ConceptAtom):
            atoms.extend((Q_CONCEPT, prog.reg(Atom(a.name)), term(a.term), 0))
        else:
            atoms.extend((Q_ROLE, prog.slot(a.role), term(a.subject), term(a.object)))
    problem.qatoms = atoms
    problem.nvars = len(var_index)


def decode(sig: Signature, d: int, raw: int, lane: int, individuals: dict[str, int]) -> Interpretation:
    concepts = {
        name: frozenset(e for e in range(d) if (lane >> (c * d + e)) & 1)
        for c, name in enumerate(sig.concepts)
    }
    roles = {
        name: frozenset((a, b) for a in range(d) for b in range(d) if (raw >> (r * d * d + a * d + b)) & 1)
        for r, name in enumerate(sig.roles)
    }
    return Interpretation(tuple(range(d)), concepts, roles, dict(individuals))


def concept_signature(*cs: Concept) -> Signature:
    return Signature.collect(concepts=[s for c in cs for s in subconcepts(c)])
