"""Boolean conjunctive queries: blocking depth, mapping into forests, and entailment."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

from .engine import DEFAULT_PRIORITY, BlockedForest, expand, materialize_model, structural_status
from .forest import r_connected
from .kb import Atom, KnowledgeBase, Role, metrics


@dataclass(frozen=True)
class ConceptAtom:
    name: str
    term: str

    @property
    def terms(self) -> tuple[str, ...]:
        return (self.term,)


@dataclass(frozen=True)
class RoleAtom:
    role: Role
    subject: str
    object: str

    @property
    def terms(self) -> tuple[str, ...]:
        return (self.subject, self.object)


QueryAtom = Union[ConceptAtom, RoleAtom]


def is_variable(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class Query:
    """A conjunction of atoms; terms starting with ``?`` are variables, the rest constants."""

    atoms: tuple[QueryAtom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a query needs at least one atom")

    @cached_property
    def variables(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(t for a in self.atoms for t in a.terms if is_variable(t)))

    @cached_property
    def constants(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(t for a in self.atoms for t in a.terms if not is_variable(t)))

    @property
    def n_q(self) -> int:
        return len(self.atoms)

    @cached_property
    def concept_names(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(a.name for a in self.atoms if isinstance(a, ConceptAtom)))

    @cached_property
    def role_names(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(a.role.name for a in self.atoms if isinstance(a, RoleAtom)))

    def __hash__(self) -> int:
        return hash(self.atoms)


def query_issues(kb: KnowledgeBase, q: Query) -> list[str]:
    issues = [f"unknown individual {c}" for c in q.constants if c not in kb.individuals]
    issues += [f"unknown role {r}" for r in q.role_names if r not in kb.role_names]
    return issues


def prepare(kb: KnowledgeBase, q: Query) -> KnowledgeBase:
    """``kb`` with the query's concept names added to the distinguished names."""
    issues = query_issues(kb, q)
    if issues:
        raise ValueError("; ".join(issues))
    return kb.with_distinguished(q.concept_names)


# -- blocking depth -----------------------------------------------------------


def blocking_bound(conccard: int, rolecard: int) -> int:
    """D = 2 ** (2 * conccard + rolecard)."""
    return 2 ** (2 * conccard + rolecard)


@dataclass(frozen=True)
class BlockingParams:
    depth: int
    derivation: str  # "n_Q", "D*n_Q" or "override"
    complete: bool
    bound: int
    warning: str | None = None


def blocking_depth(kb: KnowledgeBase, q: Query, override: int | None = None) -> BlockingParams:
    """Blocking depth sufficient for ``q``: n_Q without transitive roles, D*n_Q with them.

    An ``override`` is honoured; below the bound it clears the ``complete`` flag.
    """
    kb = prepare(kb, q)
    if kb.rbox.transitive:
        m = metrics(kb)
        bound = max(1, blocking_bound(m.conccard, m.rolecard) * q.n_q)
        derivation = "D*n_Q"
    else:
        bound = max(1, q.n_q)
        derivation = "n_Q"
    if override is None:
        return BlockingParams(bound, derivation, True, bound)
    if override < 1:
        raise ValueError("blocking depth must be at least 1")
    complete = override >= bound
    warning = None if complete else f"blocking depth {override} is below the sufficient bound {bound}"
    return BlockingParams(override, "override", complete, bound, warning)


# -- mapping into forests -----------------------------------------------------


def candidate_nodes(f) -> list[int]:
    """Nodes a query variable may be mapped to: alive and not cut off behind an empty edge."""
    status = structural_status(f)
    return [x for x in f.alive_nodes() if not status[x].indirect]


def _check_atom(f, atom, sigma, within) -> bool | None:
    """Truth of ``atom`` under partial ``sigma``; ``None`` while a term is unassigned."""
    if isinstance(atom, ConceptAtom):
        x = sigma.get(atom.term)
        if x is None:
            return None
        return Atom(atom.name) in f.labels[x]
    x, y = sigma.get(atom.subject), sigma.get(atom.object)
    if x is None or y is None:
        return None
    return r_connected(f, x, y, atom.role, within)


def maps_into(f, q: Query, kb: KnowledgeBase | None = None) -> dict[str, int] | None:
    """A mapping of the query terms into ``f``, or ``None`` if there is none.

    Constants map to their (merge-resolved) roots. Variables are assigned
    most-constrained first and every atom is checked as soon as its terms are bound.
    """
    sigma: dict[str, int] = {}
    for c in q.constants:
        if c not in f.roots:
            raise KeyError(f"unknown constant {c}")
        sigma[c] = f.node_of(c)
    nodes = candidate_nodes(f)
    within = set(nodes)
    for atom in q.atoms:
        if all(t in sigma for t in atom.terms) and not _check_atom(f, atom, sigma, within):
            return None
    domains: dict[str, list[int]] = {}
    for v in q.variables:
        needed = [Atom(a.name) for a in q.atoms if isinstance(a, ConceptAtom) and a.term == v]
        domains[v] = [x for x in nodes if all(c in f.labels[x] for c in needed)]
        if not domains[v]:
            return None
    atoms_of = {v: [a for a in q.atoms if v in a.terms] for v in q.variables}

    def search(remaining: list[str]) -> bool:
        if not remaining:
            return True
        # most constrained: fewest candidates, ties broken by most atoms touching bound terms
        v = min(remaining, key=lambda u: (len(domains[u]), -sum(
            all(t in sigma or t == u for t in a.terms) for a in atoms_of[u]), remaining.index(u)))
        rest = [u for u in remaining if u != v]
        for x in domains[v]:
            sigma[v] = x
            if all(_check_atom(f, a, sigma, within) is not False for a in atoms_of[v]):
                if search(rest):
                    return True
            del sigma[v]
        return False

    if search(list(q.variables)):
        return dict(sigma)
    return None


# -- entailment ---------------------------------------------------------------


@dataclass(frozen=True)
class EntailmentConfig:
    blocking_depth: int | None = None
    budget: object | None = None
    priority: Sequence[Sequence[str]] | None = None


@dataclass
class EntailmentVerdict:
    entailed: bool
    params: BlockingParams
    forests: int
    stats: object
    witness: object | None = None
    countermodel: object | None = None
    note: str | None = None
    mappings: list = field(default_factory=list)

    @property
    def label(self) -> str:
        if self.entailed:
            return "entailed"
        return "not_entailed" if self.params.complete else "incomplete-blocking"

    def line(self) -> str:
        return (f"verdict={'entailed' if self.entailed else 'not_entailed'} "
                f"blocking={self.params.depth} complete={str(self.params.complete).lower()} "
                f"forests={self.forests}")


def entails(kb: KnowledgeBase, q: Query, config: EntailmentConfig | None = None) -> EntailmentVerdict:
    """Decide ``kb |= q`` by mapping ``q`` into every complete clash-free forest.

    A verdict of entailed is sound at any blocking depth; not entailed is only
    conclusive when ``params.complete`` holds.
    """
    config = config or EntailmentConfig()
    kb = prepare(kb, q)
    params = blocking_depth(kb, q, config.blocking_depth)
    run = expand(kb, params.depth, config.budget, config.priority or DEFAULT_PRIORITY)
    checked = 0
    mappings = []
    for f in run.ccf():
        checked += 1
        sigma = maps_into(f, q, kb)
        if sigma is None:
            try:
                model = materialize_model(f, kb)
            except BlockedForest:
                model = None
            return EntailmentVerdict(False, params, checked, run.stats, f, model, params.warning)
        mappings.append(sigma)
    note = "knowledge base is unsatisfiable; entailment holds vacuously" if checked == 0 else params.warning
    return EntailmentVerdict(True, params, checked, run.stats, note=note, mappings=mappings)
