"""Expansion rules and the depth-first search over completion forests."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .forest import (
    INDIRECT, UNBLOCKED, CompletionForest, blocking, forest_key, has_clash, init_forest,
    s_neighbours,
)
from .kb import (
    All, And, Atom, AtLeast, AtMost, Concept, KnowledgeBase, Or, Role, Some, global_constraints,
    negate_nnf, require_valid,
)
from .oracle.semantics import Interpretation

RULES = ("and", "or", "exists", "forall", "forall-plus", "choose", "atleast", "atmost", "atmost-root")

DEFAULT_PRIORITY: tuple[tuple[str, ...], ...] = (
    ("atmost-root",),
    ("and", "forall", "forall-plus"),
    ("or", "choose", "atmost"),
    ("exists", "atleast"),
)

NONDETERMINISTIC = frozenset({"or", "choose", "atmost", "atmost-root"})


@dataclass(frozen=True)
class RuleInstance:
    """One applicable rule.

    ``target`` is the neighbour a forall, forall-plus or choose rule writes to;
    ``role`` is the transitive sub-role of a forall-plus rule. ``alternatives``
    lists the concepts of an or/choose rule or the ``(y, z)`` merge pairs
    (``y`` merged into ``z``) of an atmost/atmost-root rule.
    """

    rule: str
    node: int
    concept: Concept
    n: int
    target: int | None = None
    role: Role | None = None
    alternatives: tuple = ()

    def sort_key(self):
        return (self.node, self.concept.sexpr, RULES.index(self.rule), self.target if self.target is not None else -1,
                str(self.role), self.alternatives)

    def __str__(self) -> str:
        extra = f" -> {self.target}" if self.target is not None else ""
        return f"{self.rule}@{self.node} {self.concept}{extra}"


class InapplicableRule(ValueError):
    """The instance's guard no longer holds on the forest it is applied to."""


def _has_distinct(f: CompletionForest, ys: list[int], k: int) -> bool:
    """Are there ``k`` pairwise-unequal nodes among ``ys``?"""
    if k <= 1:
        return len(ys) >= k
    return any(all(f.are_neq(a, b) for a, b in combinations(group, 2)) for group in combinations(ys, k))


def node_instances(f: CompletionForest, x: int, c: Concept, status, n: int) -> list[RuleInstance]:
    """Instances triggered by concept ``c`` in the label of ``x``."""
    st = status[x]
    if st.indirect:
        return []
    out: list[RuleInstance] = []
    label = f.labels[x]
    if isinstance(c, And):
        if c.left not in label or c.right not in label:
            out.append(RuleInstance("and", x, c, n))
    elif isinstance(c, Or):
        if c.left not in label and c.right not in label:
            out.append(RuleInstance("or", x, c, n, alternatives=tuple(dict.fromkeys((c.left, c.right)))))
    elif isinstance(c, Some):
        if not st.blocked and not any(c.filler in f.labels[y] for y in s_neighbours(f, x, c.role)):
            out.append(RuleInstance("exists", x, c, n))
    elif isinstance(c, All):
        for y in s_neighbours(f, x, c.role):
            if c.filler not in f.labels[y]:
                out.append(RuleInstance("forall", x, c, n, target=y))
        for r in _transitive_subroles(f, c.role):
            carried = All(r, c.filler)
            for y in s_neighbours(f, x, r):
                if carried not in f.labels[y]:
                    out.append(RuleInstance("forall-plus", x, c, n, target=y, role=r))
    elif isinstance(c, (AtLeast, AtMost)):
        neg = negate_nnf(c.filler)
        ys = s_neighbours(f, x, c.role)
        for y in ys:
            if c.filler not in f.labels[y] and neg not in f.labels[y]:
                out.append(RuleInstance("choose", x, c, n, target=y, alternatives=(c.filler, neg)))
        holders = [y for y in ys if c.filler in f.labels[y]]
        if isinstance(c, AtLeast):
            if c.count > 0 and not st.blocked and not _has_distinct(f, holders, c.count):
                out.append(RuleInstance("atleast", x, c, n))
        elif len(holders) > c.count:
            pairs = []
            root_pairs = []
            for y in holders:
                for z in holders:
                    if y == z or f.are_neq(y, z):
                        continue
                    if f.is_root(y) and f.is_root(z):
                        if y > z:
                            root_pairs.append((y, z))
                    elif not f.is_root(y) and not f.is_ancestor(y, z):
                        pairs.append((y, z))
            if pairs:
                out.append(RuleInstance("atmost", x, c, n, alternatives=tuple(pairs)))
            if root_pairs:
                out.append(RuleInstance("atmost-root", x, c, n, alternatives=tuple(sorted(root_pairs))))
    return out


def _transitive_subroles(f: CompletionForest, s: Role) -> list[Role]:
    rbox = f.rbox
    return [r for name in rbox.transitive for r in (Role(name), Role(name, True)) if rbox.subrole_of(r, s)]


def _tier_of(priority: Sequence[Sequence[str]]) -> dict[str, int]:
    return {rule: i for i, tier in enumerate(priority) for rule in tier}


def applicable_rule_instances(
    f: CompletionForest,
    kb: KnowledgeBase,
    n: int,
    priority: Sequence[Sequence[str]] = DEFAULT_PRIORITY,
    status=None,
) -> list[RuleInstance]:
    """Every applicable instance, ordered by priority tier, node id, then concept."""
    status = status if status is not None else blocking(f, n)
    tier = _tier_of(priority)
    found = [
        inst
        for x in f.alive_nodes()
        for c in f.labels[x]
        for inst in node_instances(f, x, c, status, n)
    ]
    found.sort(key=lambda i: (tier[i.rule], i.sort_key()))
    return found


def _first_instance(f, n, status, tier) -> RuleInstance | None:
    best = None
    best_key = None
    for x in f.alive_nodes():
        for c in f.labels[x]:
            for inst in node_instances(f, x, c, status, n):
                key = (tier[inst.rule], inst.sort_key())
                if best_key is None or key < best_key:
                    best, best_key = inst, key
    return best


# -- rule actions -----------------------------------------------------------


def _remove_edge(f: CompletionForest, a: int, b: int) -> None:
    del f.edges[(a, b)]
    if (b, a) not in f.edges:
        f.adj[a] = f.adj[a] - {b}
        f.adj[b] = f.adj[b] - {a}


def merge_tree_node(f: CompletionForest, x: int, y: int, z: int) -> None:
    """Merge the tree child ``y`` of ``x`` into ``z``; ``y`` is cut off behind an empty edge."""
    assert f.parent[y] == x, "the merged node is always a tree child of the focus node"
    f.add_label(z, f.labels[y])
    roles = f.edges[(x, y)]
    if f.parent[x] == z:
        f.add_edge(z, x, {r.inv() for r in roles})
    else:
        f.add_edge(x, z, roles)
    f.edges[(x, y)] = frozenset()
    for pair in list(f.neq):
        if y in pair:
            (u,) = pair - {y}
            f.set_neq(u, z)


def merge_roots(f: CompletionForest, y: int, z: int) -> None:
    """Merge root ``y`` into root ``z`` and retire ``y``."""
    f.add_label(z, f.labels[y])
    f.labels[y] = frozenset()
    for (a, b), roles in list(f.edges.items()):
        if y not in (a, b):
            continue
        _remove_edge(f, a, b)
        a2 = z if a == y else a
        b2 = z if b == y else b
        f.add_edge(a2, b2, roles)
    for c in f.children[y]:
        f.parent[c] = z
    f.children[z] += f.children[y]
    f.children[y] = ()
    for pair in list(f.neq):
        if y in pair:
            f.neq.discard(pair)
            (u,) = pair - {y}
            f.set_neq(u, z)
    f.merged[y] = z


def _act(f: CompletionForest, inst: RuleInstance, gc: tuple[Concept, ...]) -> list[CompletionForest]:
    x, c = inst.node, inst.concept
    if inst.rule in ("or", "choose"):
        where = x if inst.rule == "or" else inst.target
        outs = []
        for alt in inst.alternatives:
            g = f.copy()
            g.add_label(where, (alt,))
            outs.append(g)
        return outs
    if inst.rule in ("atmost", "atmost-root"):
        outs = []
        for y, z in inst.alternatives:
            g = f.copy()
            if inst.rule == "atmost":
                merge_tree_node(g, x, y, z)
            else:
                merge_roots(g, y, z)
            outs.append(g)
        return outs
    g = f.copy()
    if inst.rule == "and":
        g.add_label(x, (c.left, c.right))
    elif inst.rule == "forall":
        g.add_label(inst.target, (c.filler,))
    elif inst.rule == "forall-plus":
        g.add_label(inst.target, (All(inst.role, c.filler),))
    elif inst.rule == "exists":
        g.add_child(x, (c.role,), (c.filler,) + gc)
    elif inst.rule == "atleast":
        fresh = [g.add_child(x, (c.role,), (c.filler,) + gc) for _ in range(c.count)]
        for a, b in combinations(fresh, 2):
            g.set_neq(a, b)
    else:
        raise ValueError(f"unknown rule {inst.rule}")
    return [g]


def apply_rule(f: CompletionForest, inst: RuleInstance, kb: KnowledgeBase) -> list[CompletionForest]:
    """Successor forests of one rule application; ``f`` itself is left untouched."""
    if not f.is_alive(inst.node) or inst.concept not in f.labels[inst.node]:
        raise InapplicableRule(str(inst))
    if inst not in node_instances(f, inst.node, inst.concept, blocking(f, inst.n), inst.n):
        raise InapplicableRule(str(inst))
    return _act(f, inst, global_constraints(kb))


# -- search -------------------------------------------------------------------


@dataclass(frozen=True)
class Budget:
    max_forests: int | None = None
    max_nodes: int | None = None
    timeout_ms: int | None = None


@dataclass
class ExpansionStats:
    forests_explored: int = 0
    ccf_count: int = 0
    clashed: int = 0
    max_nodes: int = 0
    rule_applications: int = 0
    budget_hit: bool = False

    def report(self) -> str:
        return "\n".join(
            f"{k}={str(v).lower() if isinstance(v, bool) else v}"
            for k, v in (
                ("forests_explored", self.forests_explored),
                ("ccf_count", self.ccf_count),
                ("max_nodes", self.max_nodes),
                ("rule_applications", self.rule_applications),
                ("budget_hit", self.budget_hit),
            )
        )


class BudgetExceeded(RuntimeError):
    def __init__(self, reason: str, stats: ExpansionStats):
        self.reason = reason
        self.stats = stats
        super().__init__(f"budget exceeded: {reason}")


@dataclass(frozen=True)
class Leaf:
    """A search leaf: a complete clash-free forest (``clash is None``) or a pruned clashed one."""

    forest: CompletionForest
    clash: str | None

    @property
    def clash_free(self) -> bool:
        return self.clash is None


class Expansion:
    """Lazy depth-first enumeration of the search leaves for ``kb`` under n-blocking.

    Clashes never disappear once present, so a clashed forest is a leaf.
    Iteration raises :class:`BudgetExceeded` when a limit is crossed.
    """

    def __init__(self, kb: KnowledgeBase, n: int, budget: Budget | None = None,
                 priority: Sequence[Sequence[str]] = DEFAULT_PRIORITY):
        if n < 1:
            raise ValueError("blocking depth must be at least 1")
        require_valid(kb)
        self.kb = kb
        self.n = n
        self.budget = budget or Budget()
        self.priority = priority
        self.stats = ExpansionStats()

    def _exceeded(self, reason: str):
        self.stats.budget_hit = True
        return BudgetExceeded(reason, self.stats)

    def __iter__(self) -> Iterator[Leaf]:
        kb, n, budget, stats = self.kb, self.n, self.budget, self.stats
        gc = global_constraints(kb)
        tier = _tier_of(self.priority)
        deadline = None
        if budget.timeout_ms is not None:
            deadline = time.monotonic() + budget.timeout_ms / 1000
        seen: set[str] = set()
        stack: list[tuple[CompletionForest, bool]] = [(init_forest(kb), True)]
        while stack:
            f, check = stack.pop()
            if check:
                key = forest_key(f)
                if key in seen:
                    continue
                seen.add(key)
            stats.forests_explored += 1
            stats.max_nodes = max(stats.max_nodes, f.size())
            if budget.max_forests is not None and stats.forests_explored > budget.max_forests:
                raise self._exceeded("max_forests")
            if budget.max_nodes is not None and f.size() > budget.max_nodes:
                raise self._exceeded("max_nodes")
            if deadline is not None and time.monotonic() > deadline:
                raise self._exceeded("timeout")
            clash = has_clash(f)
            if clash is not None:
                stats.clashed += 1
                yield Leaf(f, clash)
                continue
            inst = _first_instance(f, n, blocking(f, n), tier)
            if inst is None:
                stats.ccf_count += 1
                yield Leaf(f, None)
                continue
            stats.rule_applications += 1
            outs = _act(f, inst, gc)
            branching = inst.rule in NONDETERMINISTIC
            stack.extend((g, branching) for g in reversed(outs))

    def ccf(self) -> Iterator[CompletionForest]:
        for leaf in self:
            if leaf.clash_free:
                yield leaf.forest


def expand(kb: KnowledgeBase, n: int, budget: Budget | None = None,
           priority: Sequence[Sequence[str]] = DEFAULT_PRIORITY) -> Expansion:
    return Expansion(kb, n, budget, priority)


@dataclass
class SatResult:
    satisfiable: bool
    forest: CompletionForest | None
    stats: ExpansionStats = field(default_factory=ExpansionStats)


def sat(kb: KnowledgeBase, n: int = 1, budget: Budget | None = None,
        priority: Sequence[Sequence[str]] = DEFAULT_PRIORITY) -> SatResult:
    """Satisfiability: stops at the first complete clash-free forest."""
    run = expand(kb, n, budget, priority)
    for f in run.ccf():
        return SatResult(True, f, run.stats)
    return SatResult(False, None, run.stats)


# -- canonical model ------------------------------------------------------------


class BlockedForest(ValueError):
    """The forest only looks complete because of blocking; its canonical model would be infinite."""


def structural_status(f: CompletionForest) -> dict:
    """Statuses with tree blocking switched off: only nodes cut off behind empty edges are blocked."""
    status = {}
    for x in f.alive_nodes():
        p = f.parent[x]
        cut = p is not None and (status[p].indirect or not f.edges.get((p, x)))
        status[x] = INDIRECT if cut else UNBLOCKED
    return status


def is_unblocked_complete(f: CompletionForest) -> bool:
    """No rule applies even when every node is treated as unblocked."""
    status = structural_status(f)
    return not any(
        node_instances(f, x, c, status, 1) for x in f.alive_nodes() for c in f.labels[x]
    )


def role_extensions(kb: KnowledgeBase, pairs: dict[Role, set[tuple]]) -> dict[str, frozenset]:
    """Least extension of every role name containing ``pairs`` that respects the role box."""
    names = sorted(kb.role_names | {r.name for r in pairs})
    ext: dict[str, set] = {name: set() for name in names}
    for r, ps in pairs.items():
        ext[r.name] |= {(b, a) for a, b in ps} if r.inverted else set(ps)
    rbox = kb.rbox
    changed = True
    while changed:
        changed = False
        for sub, sup in rbox.inclusions:
            src = ext.setdefault(sub.name, set())
            if sub.inverted != sup.inverted:
                src = {(b, a) for a, b in src}
            dst = ext.setdefault(sup.name, set())
            if not src <= dst:
                dst |= src
                changed = True
        for name in rbox.transitive:
            rel = ext.setdefault(name, set())
            extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
            if extra:
                rel |= extra
                changed = True
    return {k: frozenset(v) for k, v in ext.items()}


def materialize_model(f: CompletionForest, kb: KnowledgeBase) -> Interpretation:
    """Read the canonical finite model off a complete, clash-free forest without direct blocking."""
    if has_clash(f) is not None:
        raise ValueError("forest has a clash")
    if not is_unblocked_complete(f):
        raise BlockedForest("forest is not complete without blocking")
    status = structural_status(f)
    domain = [x for x in f.alive_nodes() if not status[x].indirect]
    members = set(domain)
    concepts: dict[str, set] = {name: set() for name in kb.concept_names}
    for x in domain:
        for c in f.labels[x]:
            if isinstance(c, Atom):
                concepts.setdefault(c.name, set()).add(x)
    pairs: dict[Role, set] = {}
    for (a, b), roles in f.edges.items():
        if a in members and b in members:
            for r in roles:
                pairs.setdefault(r, set()).add((a, b))
    return Interpretation(
        domain=tuple(domain),
        concepts={k: frozenset(v) for k, v in concepts.items()},
        roles=role_extensions(kb, pairs),
        individuals={name: f.node_of(name) for name in kb.individuals},
    )
