"""Reference kernel: all concept assignments of one domain size are evaluated at once.

A *lane* is one assignment of concept names to domain elements; lane ``L`` puts
element ``e`` into concept ``c`` iff bit ``c*d + e`` of ``L`` is set. A register
holds, per element, the int whose bit ``L`` says whether the element belongs to
the concept under lane ``L``. Role assignments are enumerated one at a time.
"""
from __future__ import annotations

from itertools import product

from ._opcodes import (
    AND, ATLEAST, ATMOST, ATOM, C_EDGE, C_EQ, C_GLOBAL, C_MEMBER, C_NEQ, C_SUBSUMED, FIND, ALL,
    NATOM, NOT, OR, PRESERVE, Q_CONCEPT, SOME, COMPARE,
)


def _patterns(nc: int, d: int, full: int) -> list[int]:
    lanes = full.bit_length()
    pats = []
    for p in range(nc * d):
        period = 2 << p
        block = ((1 << (1 << p)) - 1) << (1 << p)
        pats.append(block * (full // ((1 << period) - 1)) if period <= lanes else 0)
    return pats


def symmetry_masks(nc: int, d: int) -> list[int]:
    """Per number ``u`` of pinned elements: lanes whose remaining elements have sorted types."""
    lanes = 1 << (nc * d)
    masks = []
    for u in range(d + 1):
        bits = []
        for lane in range(lanes):
            types = [sum(((lane >> (c * d + e)) & 1) << c for c in range(nc)) for e in range(u, d)]
            bits.append(all(a <= b for a, b in zip(types, types[1:])))
        masks.append(sum(1 << i for i, ok in enumerate(bits) if ok))
    return masks


class _Evaluator:
    def __init__(self, d, nc, nr, ops, incl, trans):
        self.d, self.nc, self.nr = d, nc, nr
        self.full = (1 << (1 << (nc * d))) - 1
        self.ops = [tuple(ops[i:i + 4]) for i in range(0, len(ops), 4)]
        self.incl = [tuple(incl[i:i + 2]) for i in range(0, len(incl), 2)]
        self.trans = list(trans)
        pats = _patterns(nc, d, self.full)
        self.static = {}
        for i, (code, c, _, _) in enumerate(self.ops):
            if code == ATOM:
                self.static[i] = [pats[c * d + e] for e in range(d)]
            elif code == NATOM:
                self.static[i] = [self.full ^ pats[c * d + e] for e in range(d)]
        self.regs: list[list[int]] = []
        self.rel: list[list[list[bool]]] = []

    def load(self, raw: int) -> bool:
        """Set the role assignment; ``False`` if it violates the role box."""
        d = self.d
        rel = [[[False] * d for _ in range(d)] for _ in range(2 * self.nr)]
        for r in range(self.nr):
            for a in range(d):
                for b in range(d):
                    if (raw >> (r * d * d + a * d + b)) & 1:
                        rel[2 * r][a][b] = True
                        rel[2 * r + 1][b][a] = True
        for s1, s2 in self.incl:
            if any(rel[s1][a][b] and not rel[s2][a][b] for a in range(d) for b in range(d)):
                return False
        for r in self.trans:
            m = rel[2 * r]
            if any(m[a][b] and m[b][c] and not m[a][c] for a in range(d) for b in range(d) for c in range(d)):
                return False
        self.rel = rel
        return True

    def evaluate(self) -> None:
        d, full, rel = self.d, self.full, self.rel
        regs: list[list[int]] = []
        for i, (code, x, y, z) in enumerate(self.ops):
            if i in self.static:
                regs.append(self.static[i])
            elif code == NOT:
                regs.append([full ^ v for v in regs[x]])
            elif code == AND:
                regs.append([a & b for a, b in zip(regs[x], regs[y])])
            elif code == OR:
                regs.append([a | b for a, b in zip(regs[x], regs[y])])
            elif code == SOME:
                arg, m = regs[y], rel[x]
                out = []
                for e in range(d):
                    v = 0
                    for b in range(d):
                        if m[e][b]:
                            v |= arg[b]
                    out.append(v)
                regs.append(out)
            elif code == ALL:
                arg, m = regs[y], rel[x]
                out = []
                for e in range(d):
                    v = full
                    for b in range(d):
                        if m[e][b]:
                            v &= arg[b]
                    out.append(v)
                regs.append(out)
            elif code in (ATLEAST, ATMOST):
                n = x + (code == ATMOST)
                arg, m = regs[z], rel[y]
                out = []
                for e in range(d):
                    ge = [full] + [0] * n
                    for b in range(d):
                        if m[e][b]:
                            for k in range(n, 0, -1):
                                ge[k] |= ge[k - 1] & arg[b]
                    out.append(ge[n] if code == ATLEAST else full ^ ge[n])
                regs.append(out)
            else:
                raise ValueError(f"bad opcode {code}")
        self.regs = regs

    def holds(self, cons, m, acc: int) -> int:
        regs, rel, full = self.regs, self.rel, self.full
        for i in range(0, len(cons), 4):
            kind, x, y, z = cons[i:i + 4]
            if kind == C_NEQ:
                if m[x] == m[y]:
                    return 0
            elif kind == C_EQ:
                if m[x] != m[y]:
                    return 0
            elif kind == C_EDGE:
                if not rel[x][m[y]][m[z]]:
                    return 0
            elif kind == C_MEMBER:
                acc &= regs[x][m[y]]
            elif kind == C_GLOBAL:
                for v in regs[x]:
                    acc &= v
            elif kind == C_SUBSUMED:
                for c, dd in zip(regs[x], regs[y]):
                    acc &= (full ^ c) | dd
            if not acc:
                return 0
        return acc

    def query(self, atoms, nvars, m, within: int) -> int:
        regs, rel, full = self.regs, self.rel, self.full
        out = 0
        for values in product(range(self.d), repeat=nvars):
            def val(t):
                return m[t] if t >= 0 else values[-t - 1]
            t = full
            for i in range(0, len(atoms), 4):
                kind, x, y, z = atoms[i:i + 4]
                if kind == Q_CONCEPT:
                    t &= regs[x][val(y)]
                elif not rel[x][val(y)][val(z)]:
                    t = 0
                if not t:
                    break
            out |= t
            if not within & ~out:
                break
        return out


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def run(mode, d, nc, nr, ops, incl, trans, sets, exts, nterms, maps, qatoms, nvars, symmetric):
    ev = _Evaluator(d, nc, nr, ops, incl, trans)
    sym = symmetry_masks(nc, d) if symmetric else [ev.full] * (d + 1)
    map_list = [tuple(maps[i:i + nterms]) for i in range(0, len(maps), nterms)] if nterms else [()] * (len(maps) or 1)
    bad = models = other = 0
    first = None
    for raw in range(1 << (nr * d * d)):
        if not ev.load(raw):
            continue
        ev.evaluate()
        for mi, m in enumerate(map_list):
            start = sym[max(m) + 1 if m else 0]
            if mode == FIND:
                acc = ev.holds(sets[0], m, start)
                if acc:
                    cm = acc & ~ev.query(qatoms, nvars, m, acc)
                    if cm:
                        return (raw, mi, _lowest(cm))
            elif mode == COMPARE:
                a0 = ev.holds(sets[0], m, start)
                a1 = ev.holds(sets[1], m, start)
                diff = a0 ^ a1
                models += a0.bit_count()
                other += a1.bit_count()
                if diff:
                    bad += diff.bit_count()
                    if first is None:
                        first = (raw, mi, _lowest(diff))
            elif mode == PRESERVE:
                parent = ev.holds(sets[0], m, start)
                if not parent:
                    continue
                models += parent.bit_count()
                covered = 0
                for cons, extra in zip(sets[1:], exts):
                    for ext in product(range(d), repeat=extra):
                        covered |= ev.holds(cons, m + ext, parent)
                        if not parent & ~covered:
                            break
                    if not parent & ~covered:
                        break
                lost = parent & ~covered
                if lost:
                    bad += lost.bit_count()
                    if first is None:
                        first = (raw, mi, _lowest(lost))
    if mode == FIND:
        return None
    return (bad, models, other, first)
