"""Concept and role algebra for SHIQ knowledge bases.

Concepts are immutable syntax trees. ``Not`` may wrap any concept in raw
input; after :func:`nnf` it only ever wraps an :class:`Atom`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

#: Reserved atomic name used to encode the empty concept (``_bottom AND NOT _bottom``).
BOTTOM_NAME = "_bottom"


@dataclass(frozen=True, order=True)
class Role:
    """A role name, possibly inverted. ``Inv(Inv(R))`` is ``R`` by construction."""

    name: str
    inverted: bool = False

    def inv(self) -> Role:
        return Role(self.name, not self.inverted)

    def __str__(self) -> str:
        return f"(inv {self.name})" if self.inverted else self.name


class Concept:
    """Base class for concept syntax trees.

    Subclasses are frozen dataclasses with ``eq=False``; equality and the
    (cached) hash are structural and defined here.
    """

    def _fields(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__dataclass_fields__)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(other) is not type(self):
            return NotImplemented
        return hash(self) == hash(other) and self._fields() == other._fields()

    def __hash__(self) -> int:
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__,) + self._fields())
            self.__dict__["_hash"] = h
            return h

    def children(self) -> tuple[Concept, ...]:
        return ()

    @cached_property
    def sexpr(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.sexpr

    def __repr__(self) -> str:
        return f"<{self.sexpr}>"

    def __lt__(self, other: Concept) -> bool:
        return self.sexpr < other.sexpr


@dataclass(frozen=True, eq=False, repr=False)
class Atom(Concept):
    name: str

    @cached_property
    def sexpr(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False, repr=False)
class Not(Concept):
    operand: Concept

    def children(self):
        return (self.operand,)

    @cached_property
    def sexpr(self) -> str:
        return f"(not {self.operand.sexpr})"


@dataclass(frozen=True, eq=False, repr=False)
class And(Concept):
    left: Concept
    right: Concept

    def children(self):
        return (self.left, self.right)

    @cached_property
    def sexpr(self) -> str:
        return f"(and {self.left.sexpr} {self.right.sexpr})"


@dataclass(frozen=True, eq=False, repr=False)
class Or(Concept):
    left: Concept
    right: Concept

    def children(self):
        return (self.left, self.right)

    @cached_property
    def sexpr(self) -> str:
        return f"(or {self.left.sexpr} {self.right.sexpr})"


@dataclass(frozen=True, eq=False, repr=False)
class All(Concept):
    role: Role
    filler: Concept

    def children(self):
        return (self.filler,)

    @cached_property
    def sexpr(self) -> str:
        return f"(all {self.role} {self.filler.sexpr})"


@dataclass(frozen=True, eq=False, repr=False)
class Some(Concept):
    role: Role
    filler: Concept

    def children(self):
        return (self.filler,)

    @cached_property
    def sexpr(self) -> str:
        return f"(some {self.role} {self.filler.sexpr})"


@dataclass(frozen=True, eq=False, repr=False)
class AtLeast(Concept):
    count: int
    role: Role
    filler: Concept

    def children(self):
        return (self.filler,)

    @cached_property
    def sexpr(self) -> str:
        return f"(atleast {self.count} {self.role} {self.filler.sexpr})"


@dataclass(frozen=True, eq=False, repr=False)
class AtMost(Concept):
    count: int
    role: Role
    filler: Concept

    def children(self):
        return (self.filler,)

    @cached_property
    def sexpr(self) -> str:
        return f"(atmost {self.count} {self.role} {self.filler.sexpr})"


BOTTOM = And(Atom(BOTTOM_NAME), Not(Atom(BOTTOM_NAME)))

Restriction = Union[All, Some, AtLeast, AtMost]


def is_negated_atom(c: Concept) -> bool:
    return isinstance(c, Not) and isinstance(c.operand, Atom)


def is_literal(c: Concept) -> bool:
    return isinstance(c, Atom) or is_negated_atom(c)


def is_nnf(c: Concept) -> bool:
    if isinstance(c, Not):
        return isinstance(c.operand, Atom)
    return all(is_nnf(child) for child in c.children())


def nnf(c: Concept) -> Concept:
    """Push negation inwards until it only sits on concept names."""
    if isinstance(c, Atom):
        return c
    if isinstance(c, Not):
        return _negated_nnf(c.operand)
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, All):
        return All(c.role, nnf(c.filler))
    if isinstance(c, Some):
        return Some(c.role, nnf(c.filler))
    if isinstance(c, AtLeast):
        return AtLeast(c.count, c.role, nnf(c.filler))
    if isinstance(c, AtMost):
        return AtMost(c.count, c.role, nnf(c.filler))
    raise TypeError(f"not a concept: {c!r}")


def _negated_nnf(c: Concept) -> Concept:
    # NNF of (not c)
    if isinstance(c, Atom):
        return Not(c)
    if isinstance(c, Not):
        return nnf(c.operand)
    if isinstance(c, And):
        return Or(_negated_nnf(c.left), _negated_nnf(c.right))
    if isinstance(c, Or):
        return And(_negated_nnf(c.left), _negated_nnf(c.right))
    if isinstance(c, All):
        return Some(c.role, _negated_nnf(c.filler))
    if isinstance(c, Some):
        return All(c.role, _negated_nnf(c.filler))
    if isinstance(c, AtMost):
        return AtLeast(c.count + 1, c.role, nnf(c.filler))
    if isinstance(c, AtLeast):
        if c.count == 0:
            return BOTTOM
        return AtMost(c.count - 1, c.role, nnf(c.filler))
    raise TypeError(f"not a concept: {c!r}")


def negate_nnf(c: Concept) -> Concept:
    """Return ``nnf(Not(c))``."""
    return _negated_nnf(c)


def size(c: Concept) -> int:
    return 1 + sum(size(child) for child in c.children())


def subconcepts(c: Concept) -> Iterator[Concept]:
    yield c
    for child in c.children():
        yield from subconcepts(child)


def atomic_names(c: Concept) -> set[str]:
    return {s.name for s in subconcepts(c) if isinstance(s, Atom)}


def roles_in(c: Concept) -> set[Role]:
    return {s.role for s in subconcepts(c) if isinstance(s, (All, Some, AtLeast, AtMost))}


@dataclass(frozen=True)
class RoleBox:
    """Role inclusions plus the names of transitive roles."""

    inclusions: tuple[tuple[Role, Role], ...] = ()
    transitive: tuple[str, ...] = ()

    @cached_property
    def _supers(self) -> dict[Role, frozenset[Role]]:
        graph: dict[Role, set[Role]] = {}
        for sub, sup in self.inclusions:
            graph.setdefault(sub, set()).add(sup)
            graph.setdefault(sub.inv(), set()).add(sup.inv())
        closure = {}
        for start in graph:
            seen = {start}
            queue = deque([start])
            while queue:
                for nxt in graph.get(queue.popleft(), ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
            closure[start] = frozenset(seen)
        return closure

    def subrole_of(self, r: Role, s: Role) -> bool:
        """Reflexive-transitive role inclusion, closed under inverses."""
        return r == s or s in self._supers.get(r, ())

    def supers(self, r: Role) -> frozenset[Role]:
        return self._supers.get(r, frozenset((r,)))

    def is_transitive(self, r: Role) -> bool:
        return r.name in self.transitive

    def role_names(self) -> set[str]:
        names = set(self.transitive)
        for sub, sup in self.inclusions:
            names.update((sub.name, sup.name))
        return names

    def sub_roles(self, s: Role, candidates: Iterable[Role]) -> list[Role]:
        return [r for r in candidates if self.subrole_of(r, s)]

    def is_simple(self, r: Role) -> bool:
        for name in self.transitive:
            for t in (Role(name), Role(name, True)):
                if self.subrole_of(t, r):
                    return False
        return True

    def cycles(self) -> list[tuple[Role, Role]]:
        """Pairs of distinct roles that are sub-roles of each other."""
        found = []
        for r, sups in self._supers.items():
            for s in sups:
                if s != r and r < s and self.subrole_of(s, r):
                    found.append((r, s))
        return sorted(set(found))


def subrole_of(r: Role, s: Role, rbox: RoleBox) -> bool:
    return rbox.subrole_of(r, s)


def is_simple(r: Role, rbox: RoleBox) -> bool:
    return rbox.is_simple(r)


@dataclass(frozen=True)
class ConceptAssertion:
    concept: Concept
    individual: str


@dataclass(frozen=True)
class RoleAssertion:
    role: Role
    subject: str
    object: str


@dataclass(frozen=True)
class Inequality:
    left: str
    right: str


Assertion = Union[ConceptAssertion, RoleAssertion, Inequality]


@dataclass(frozen=True)
class Inclusion:
    """A general concept inclusion ``sub <= sup``."""

    sub: Concept
    sup: Concept


@dataclass(frozen=True)
class KnowledgeBase:
    abox: tuple[Assertion, ...] = ()
    rbox: RoleBox = field(default_factory=RoleBox)
    tbox: tuple[Inclusion, ...] = ()
    distinguished: tuple[str, ...] = ()

    @cached_property
    def individuals(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                seen.setdefault(a.individual)
            elif isinstance(a, RoleAssertion):
                seen.setdefault(a.subject)
                seen.setdefault(a.object)
            else:
                seen.setdefault(a.left)
                seen.setdefault(a.right)
        return tuple(seen)

    def concepts(self) -> Iterator[Concept]:
        """Every concept stated in the A-Box or T-Box."""
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                yield a.concept
        for gci in self.tbox:
            yield gci.sub
            yield gci.sup

    @cached_property
    def role_names(self) -> frozenset[str]:
        names = set(self.rbox.role_names())
        for a in self.abox:
            if isinstance(a, RoleAssertion):
                names.add(a.role.name)
        for c in self.concepts():
            names.update(r.name for r in roles_in(c))
        return frozenset(names)

    @cached_property
    def roles(self) -> tuple[Role, ...]:
        """roles(K): every role name in K in both polarities."""
        return tuple(Role(n, inv) for n in sorted(self.role_names) for inv in (False, True))

    @cached_property
    def concept_names(self) -> frozenset[str]:
        names = set(self.distinguished)
        for c in self.concepts():
            names |= atomic_names(c)
        return frozenset(names)

    @cached_property
    def transitive_roles(self) -> tuple[Role, ...]:
        return tuple(r for r in self.roles if self.rbox.is_transitive(r))

    def with_distinguished(self, names: Iterable[str]) -> KnowledgeBase:
        extra = tuple(n for n in dict.fromkeys(names) if n not in self.distinguished)
        if not extra:
            return self
        return KnowledgeBase(self.abox, self.rbox, self.tbox, self.distinguished + extra)

    def normalized(self) -> KnowledgeBase:
        abox = tuple(
            ConceptAssertion(nnf(a.concept), a.individual) if isinstance(a, ConceptAssertion) else a
            for a in self.abox
        )
        tbox = tuple(Inclusion(nnf(g.sub), nnf(g.sup)) for g in self.tbox)
        return KnowledgeBase(abox, self.rbox, tbox, self.distinguished)

    def __hash__(self) -> int:
        return hash((self.abox, self.rbox, self.tbox, self.distinguished))


def global_constraints(kb: KnowledgeBase) -> tuple[Concept, ...]:
    """The concepts every node label starts with: one per GCI and per distinguished name."""
    out: dict[Concept, None] = {}
    for gci in kb.tbox:
        out.setdefault(Or(negate_nnf(gci.sub), nnf(gci.sup)))
    for name in kb.distinguished:
        out.setdefault(Or(Atom(name), Not(Atom(name))))
    return tuple(out)


def closure(kb: KnowledgeBase) -> frozenset[Concept]:
    """Concepts of the A-Box and global constraints, closed under subconcepts and negation.

    For every ``(all S C)`` in the set and every transitive ``R`` with
    ``R <=* S`` the set also holds ``(all R C)``: the forall-plus rule puts it in labels.
    """
    transitive = kb.transitive_roles
    todo = [a.concept for a in kb.abox if isinstance(a, ConceptAssertion)]
    todo.extend(global_constraints(kb))
    result: set[Concept] = set()
    while todo:
        c = todo.pop()
        if c in result:
            continue
        result.add(c)
        todo.extend(c.children())
        todo.append(negate_nnf(c))
        if isinstance(c, All):
            todo.extend(All(r, c.filler) for r in transitive if kb.rbox.subrole_of(r, c.role))
    return frozenset(result)


@dataclass(frozen=True)
class Issue:
    """One validation problem; ``where`` is e.g. ``("tbox", 2)`` or ``("rbox", 0)``."""

    message: str
    where: tuple[str, int] = ("kb", 0)

    def __str__(self) -> str:
        return f"{self.where[0]}[{self.where[1]}]: {self.message}"


class InvalidKnowledgeBase(ValueError):
    def __init__(self, issues: list[Issue]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))


def _restriction_issues(c: Concept, rbox: RoleBox, where) -> Iterator[Issue]:
    for s in subconcepts(c):
        if isinstance(s, (AtLeast, AtMost)):
            if s.count < 0:
                yield Issue(f"negative count in {s}", where)
            if not rbox.is_simple(s.role):
                yield Issue(f"non-simple role {s.role} in number restriction {s}", where)


def validate_kb(kb: KnowledgeBase) -> list[Issue]:
    issues: list[Issue] = []
    for r, s in kb.rbox.cycles():
        names = {r.name, s.name}
        at = next(
            (i for i, (a, b) in enumerate(kb.rbox.inclusions) if {a.name, b.name} <= names or a.name in names),
            0,
        )
        issues.append(Issue(f"role cycle: {r} and {s} are sub-roles of each other", ("rbox", at)))
    for i, a in enumerate(kb.abox):
        if isinstance(a, ConceptAssertion):
            if not is_nnf(a.concept):
                issues.append(Issue(f"concept not in NNF: {a.concept}", ("abox", i)))
            issues.extend(_restriction_issues(a.concept, kb.rbox, ("abox", i)))
        elif isinstance(a, Inequality) and a.left == a.right:
            issues.append(Issue(f"individual {a.left} asserted unequal to itself", ("abox", i)))
    for i, gci in enumerate(kb.tbox):
        for c in (gci.sub, gci.sup):
            if not is_nnf(c):
                issues.append(Issue(f"concept not in NNF: {c}", ("tbox", i)))
            issues.extend(_restriction_issues(c, kb.rbox, ("tbox", i)))
    if not kb.individuals:
        issues.append(Issue("A-Box mentions no individuals", ("abox", 0)))
    return issues


def require_valid(kb: KnowledgeBase) -> None:
    issues = validate_kb(kb)
    if issues:
        raise InvalidKnowledgeBase(issues)


@dataclass(frozen=True)
class KbMetrics:
    conccard: int
    rolecard: int
    maxnumrest: int
    abox_size: int


def metrics(kb: KnowledgeBase) -> KbMetrics:
    clos = closure(kb) | {Atom(n) for n in kb.distinguished}
    counts = [c.count for c in clos if isinstance(c, (AtLeast, AtMost))]
    return KbMetrics(
        conccard=len(clos),
        rolecard=len(kb.roles),
        maxnumrest=max(counts, default=0),
        abox_size=len(kb.abox),
    )
