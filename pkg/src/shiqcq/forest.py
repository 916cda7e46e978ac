"""Completion forests: a labelled graph over individuals with trees grown below them."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .kb import (
    AtMost, Atom, Concept, ConceptAssertion, Inequality, KnowledgeBase, Not, Role,
    RoleAssertion, RoleBox, global_constraints,
)

ROOT = "root"
TREE = "tree"


class CompletionForest:
    """Mutable forest value; :meth:`copy` gives an independent forest.

    Node ids are creation-ordered ints. A root retired by a root merge keeps its
    id in ``merged`` (pointing at the survivor) and loses its label and edges.
    """

    __slots__ = (
        "rbox", "labels", "kind", "parent", "depth", "children", "edges", "adj",
        "neq", "merged", "roots", "names", "counter",
    )

    def __init__(self, rbox: RoleBox):
        self.rbox = rbox
        self.labels: dict[int, frozenset[Concept]] = {}
        self.kind: dict[int, str] = {}
        self.parent: dict[int, int | None] = {}
        self.depth: dict[int, int] = {}
        self.children: dict[int, tuple[int, ...]] = {}
        self.edges: dict[tuple[int, int], frozenset[Role]] = {}
        self.adj: dict[int, frozenset[int]] = {}
        self.neq: set[frozenset[int]] = set()
        self.merged: dict[int, int] = {}
        self.roots: dict[str, int] = {}
        self.names: dict[int, str] = {}
        self.counter = 0

    def copy(self) -> CompletionForest:
        f = CompletionForest.__new__(CompletionForest)
        f.rbox = self.rbox
        f.labels = dict(self.labels)
        f.kind = dict(self.kind)
        f.parent = dict(self.parent)
        f.depth = dict(self.depth)
        f.children = dict(self.children)
        f.edges = dict(self.edges)
        f.adj = dict(self.adj)
        f.neq = set(self.neq)
        f.merged = dict(self.merged)
        f.roots = dict(self.roots)
        f.names = dict(self.names)
        f.counter = self.counter
        return f

    # -- construction -----------------------------------------------------

    def _new_node(self, kind: str, label: Iterable[Concept], parent: int | None) -> int:
        x = self.counter
        self.counter += 1
        self.kind[x] = kind
        self.labels[x] = frozenset(label)
        self.parent[x] = parent
        self.depth[x] = 0 if parent is None else self.depth[parent] + 1
        self.children[x] = ()
        self.adj[x] = frozenset()
        if parent is not None:
            self.children[parent] += (x,)
        return x

    def add_root(self, name: str, label: Iterable[Concept]) -> int:
        x = self._new_node(ROOT, label, None)
        self.roots[name] = x
        self.names[x] = name
        return x

    def add_child(self, parent: int, roles: Iterable[Role], label: Iterable[Concept]) -> int:
        y = self._new_node(TREE, label, parent)
        self.add_edge(parent, y, roles)
        return y

    def add_edge(self, x: int, y: int, roles: Iterable[Role]) -> None:
        roles = frozenset(roles)
        old = self.edges.get((x, y))
        if old is None:
            self.edges[(x, y)] = roles
            self.adj[x] = self.adj[x] | {y}
            self.adj[y] = self.adj[y] | {x}
        elif not roles <= old:
            self.edges[(x, y)] = old | roles

    def add_label(self, x: int, concepts: Iterable[Concept]) -> None:
        self.labels[x] = self.labels[x] | frozenset(concepts)

    def set_neq(self, x: int, y: int) -> None:
        if x != y:
            self.neq.add(frozenset((x, y)))

    # -- queries ----------------------------------------------------------

    def is_root(self, x: int) -> bool:
        return self.kind[x] == ROOT

    def is_alive(self, x: int) -> bool:
        return x not in self.merged

    def alive_nodes(self) -> list[int]:
        return [x for x in self.labels if x not in self.merged]

    def resolve(self, x: int) -> int:
        while x in self.merged:
            x = self.merged[x]
        return x

    def node_of(self, individual: str) -> int:
        return self.resolve(self.roots[individual])

    def edge(self, x: int, y: int) -> frozenset[Role]:
        return self.edges.get((x, y), frozenset())

    def are_neq(self, x: int, y: int) -> bool:
        return frozenset((x, y)) in self.neq

    def ancestors(self, x: int) -> Iterator[int]:
        p = self.parent[x]
        while p is not None:
            yield p
            p = self.parent[p]

    def is_ancestor(self, a: int, x: int) -> bool:
        return any(p == a for p in self.ancestors(x))

    def successor_children(self, x: int) -> tuple[int, ...]:
        """Tree children reached through a non-empty edge."""
        return tuple(c for c in self.children[x] if self.edges.get((x, c)))

    def size(self) -> int:
        return len(self.labels) - len(self.merged)

    def __len__(self) -> int:
        return self.size()


def init_forest(kb: KnowledgeBase) -> CompletionForest:
    """The initial forest: one root per individual, labelled by its assertions plus the global constraints."""
    f = CompletionForest(kb.rbox)
    gc = global_constraints(kb)
    asserted: dict[str, list[Concept]] = {a: [] for a in kb.individuals}
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            asserted[a.individual].append(a.concept)
    for name in kb.individuals:
        f.add_root(name, list(asserted[name]) + list(gc))
    for a in kb.abox:
        if isinstance(a, RoleAssertion):
            f.add_edge(f.roots[a.subject], f.roots[a.object], (a.role,))
        elif isinstance(a, Inequality):
            f.set_neq(f.roots[a.left], f.roots[a.right])
    return f


def _carries(rbox: RoleBox, roles: frozenset[Role], s: Role) -> bool:
    return any(rbox.subrole_of(r, s) for r in roles)


def is_s_neighbour(f: CompletionForest, x: int, y: int, s: Role) -> bool:
    return _carries(f.rbox, f.edge(x, y), s) or _carries(f.rbox, f.edge(y, x), s.inv())


def s_neighbours(f: CompletionForest, x: int, s: Role) -> list[int]:
    """Nodes ``y`` with an edge x->y carrying a sub-role of ``s`` or y->x carrying a sub-role of ``Inv(s)``."""
    return sorted(y for y in f.adj[x] if is_s_neighbour(f, x, y, s))


def r_connected(f: CompletionForest, x: int, y: int, r: Role, within: set[int] | None = None) -> bool:
    """Whether every model of ``f`` puts ``(x, y)`` in ``r``.

    True for a one-step ``r``-neighbour, or for a chain of ``S``-neighbour steps
    where ``S`` is transitive and ``S <=* r``.
    """
    if is_s_neighbour(f, x, y, r):
        return True
    rbox = f.rbox
    for name in rbox.transitive:
        for s in (Role(name), Role(name, True)):
            if not rbox.subrole_of(s, r):
                continue
            seen = {x}
            stack = [x]
            while stack:
                u = stack.pop()
                for v in f.adj[u]:
                    if within is not None and v not in within:
                        continue
                    if is_s_neighbour(f, u, v, s):
                        if v == y:
                            return True
                        if v not in seen:
                            seen.add(v)
                            stack.append(v)
    return False


# -- n-trees and blocking ---------------------------------------------------


class _TreeCodes:
    """Interned codes of depth-bounded subtrees; equal codes mean isomorphic n-trees."""

    def __init__(self, f: CompletionForest):
        self.f = f
        self.table: dict[tuple, int] = {}
        self.memo: dict[tuple[int, int], int] = {}
        self.heights: dict[int, int] = {}

    def intern(self, key) -> int:
        return self.table.setdefault(key, len(self.table))

    def height(self, x: int) -> int:
        h = self.heights.get(x)
        if h is None:
            kids = self.f.successor_children(x)
            h = 1 + max(self.height(c) for c in kids) if kids else 0
            self.heights[x] = h
        return h

    def code(self, x: int, k: int) -> int:
        k = min(k, self.height(x))
        got = self.memo.get((x, k))
        if got is not None:
            return got
        f = self.f
        label = self.intern(("L", f.labels[x]))
        if k == 0:
            kids: tuple = ()
        else:
            kids = tuple(sorted(
                (self.intern(("E", f.edges[(x, c)])), self.code(c, k - 1))
                for c in f.successor_children(x)
            ))
        got = self.intern((label, kids))
        self.memo[(x, k)] = got
        return got

    def children_by_code(self, x: int, k: int) -> list[tuple[tuple[int, int], int]]:
        f = self.f
        return sorted(
            ((self.intern(("E", f.edges[(x, c)])), self.code(c, k - 1)), c)
            for c in f.successor_children(x)
        )

    def iso(self, v: int, w: int, n: int) -> dict[int, int] | None:
        if self.code(v, n) != self.code(w, n):
            return None
        mapping: dict[int, int] = {}
        stack = [(v, w, n)]
        while stack:
            a, b, k = stack.pop()
            mapping[a] = b
            if k == 0:
                continue
            # equal codes give equal sorted key lists, so positional pairing is an isomorphism
            for (ka, ca), (kb, cb) in zip(self.children_by_code(a, k), self.children_by_code(b, k)):
                assert ka == kb
                stack.append((ca, cb, k - 1))
        return mapping


def n_tree_nodes(f: CompletionForest, v: int, n: int) -> list[int]:
    """V_n(v): v and its successors at most ``n`` arcs below it."""
    out = [v]
    frontier = [v]
    for _ in range(n):
        frontier = [c for x in frontier for c in f.successor_children(x)]
        out.extend(frontier)
    return out


def n_tree_iso(f: CompletionForest, v: int, w: int, n: int) -> dict[int, int] | None:
    """A label- and arc-label-preserving isomorphism from the n-tree of ``v`` onto that of ``w``."""
    return _TreeCodes(f).iso(v, w, n)


@dataclass(frozen=True)
class BlockingStatus:
    """``kind`` is ``unblocked``, ``direct`` or ``indirect``.

    For a directly blocked node, ``tree_root`` is the root ``v`` of the blocked
    n-tree, ``witness`` the n-witness ``w`` of ``v`` (a strict ancestor of the
    blocked node) and ``iso`` the n-tree isomorphism from ``v`` to ``w``.
    """

    kind: str = "unblocked"
    witness: int | None = None
    tree_root: int | None = None
    iso: tuple[tuple[int, int], ...] | None = None

    @property
    def blocked(self) -> bool:
        return self.kind != "unblocked"

    @property
    def direct(self) -> bool:
        return self.kind == "direct"

    @property
    def indirect(self) -> bool:
        return self.kind == "indirect"

    def __str__(self) -> str:
        if self.kind == "direct":
            return f"direct(witness={self.witness},tree={self.tree_root})"
        return self.kind


UNBLOCKED = BlockingStatus()
INDIRECT = BlockingStatus("indirect")


def blocking(f: CompletionForest, n: int) -> dict[int, BlockingStatus]:
    """Blocking status of every alive node under n-blocking, computed top-down."""
    codes = _TreeCodes(f)
    witness_of: dict[int, int | None] = {}

    def witness(v: int) -> int | None:
        if v not in witness_of:
            target = codes.code(v, n)
            witness_of[v] = next(
                (w for w in f.ancestors(v)
                 if f.depth[v] - f.depth[w] > n and codes.code(w, n) == target),
                None,
            )
        return witness_of[v]

    status: dict[int, BlockingStatus] = {}
    for x in f.alive_nodes():
        if f.kind[x] == ROOT:
            status[x] = UNBLOCKED
            continue
        p = f.parent[x]
        if status[p].blocked or not f.edges.get((p, x)):
            status[x] = INDIRECT
            continue
        status[x] = UNBLOCKED
        is_leaf = not f.successor_children(x)
        chain = [x] + [a for a in f.ancestors(x)][:n]
        for k in range(min(n, len(chain) - 1), -1, -1):
            v = chain[k]
            if f.kind[v] == ROOT or not (k == n or is_leaf):
                continue
            w = witness(v)
            if w is not None:
                iso = codes.iso(v, w, n)
                status[x] = BlockingStatus("direct", w, v, tuple(sorted(iso.items())))
                break
    return status


def blocking_status(f: CompletionForest, x: int, n: int) -> BlockingStatus:
    return blocking(f, n)[f.resolve(x)]


# -- clashes ------------------------------------------------------------------


def node_clash(f: CompletionForest, x: int) -> str | None:
    label = f.labels[x]
    for c in label:
        if isinstance(c, Not) and isinstance(c.operand, Atom) and c.operand in label:
            return f"node {x}: {c.operand} and {c}"
    for c in label:
        if isinstance(c, AtMost):
            ys = [y for y in s_neighbours(f, x, c.role) if c.filler in f.labels[y]]
            if len(ys) > c.count:
                for group in combinations(ys, c.count + 1):
                    if all(f.are_neq(a, b) for a, b in combinations(group, 2)):
                        return f"node {x}: {c} with distinct neighbours {list(group)}"
    return None


def has_clash(f: CompletionForest) -> str | None:
    """Describe the first clash found, or ``None`` for a clash-free forest."""
    for x in f.alive_nodes():
        found = node_clash(f, x)
        if found:
            return found
    return None


# -- dumps ------------------------------------------------------------------


def dump(f: CompletionForest, n: int | None = None) -> str:
    """Deterministic text rendering; statuses are included when ``n`` is given."""
    status = blocking(f, n) if n is not None else {}
    lines = []
    for x in f.labels:
        if x in f.merged:
            lines.append(f"node {x} merged-into={f.resolve(x)}")
            continue
        head = f"node {x} root={f.names[x]}" if f.kind[x] == ROOT else f"node {x} parent={f.parent[x]}"
        if x in status:
            head += f" status={status[x]}"
        lines.append(head)
        lines.append("  label: " + " ".join(sorted(c.sexpr for c in f.labels[x])))
    for (x, y), roles in sorted(f.edges.items()):
        lines.append(f"edge {x}->{y}: " + " ".join(sorted(str(r) for r in roles)))
    pairs = sorted(tuple(sorted(p)) for p in f.neq)
    if pairs:
        lines.append("neq: " + " ".join(f"{a}!={b}" for a, b in pairs))
    return "\n".join(lines) + "\n"


def forest_key(f: CompletionForest) -> str:
    return dump(f)
