# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel; same contract as ``_kernel_py.run`` with lanes packed in 64-bit words."""
from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy, memset

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    ATOM = 0
    NATOM = 1
    NOT = 2
    AND = 3
    OR = 4
    SOME = 5
    ALL = 6
    ATLEAST = 7
    ATMOST = 8
    C_GLOBAL = 0
    C_SUBSUMED = 1
    C_MEMBER = 2
    C_EDGE = 3
    C_NEQ = 4
    C_EQ = 5
    Q_CONCEPT = 0
    FIND = 0
    COMPARE = 1
    PRESERVE = 2

cdef uint64_t[6] PATS
PATS[0] = 0xAAAAAAAAAAAAAAAAULL
PATS[1] = 0xCCCCCCCCCCCCCCCCULL
PATS[2] = 0xF0F0F0F0F0F0F0F0ULL
PATS[3] = 0xFF00FF00FF00FF00ULL
PATS[4] = 0xFFFF0000FFFF0000ULL
PATS[5] = 0xFFFFFFFF00000000ULL


cdef struct Ctx:
    int d
    int nc
    int nr
    int W
    uint64_t full
    int nops
    int *ops
    int nincl
    int *incl
    int ntrans
    int *trans
    uint64_t *regs
    char *rel
    uint64_t *ge
    uint64_t *sym


cdef int *to_ints(list xs) except NULL:
    cdef int n = len(xs)
    cdef int *out = <int *> malloc((n + 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = xs[i]
    return out


cdef inline uint64_t *reg(Ctx *k, int i, int e) nogil:
    return k.regs + (<long> i * k.d + e) * k.W


cdef inline char REL(Ctx *k, int slot, int a, int b) nogil:
    return k.rel[(slot * k.d + a) * k.d + b]


cdef int load(Ctx *k, uint64_t raw) nogil:
    cdef int d = k.d, r, a, b, c, s1, s2, i
    cdef char bit
    for r in range(k.nr):
        for a in range(d):
            for b in range(d):
                bit = (raw >> (r * d * d + a * d + b)) & 1
                k.rel[((2 * r) * d + a) * d + b] = bit
                k.rel[((2 * r + 1) * d + b) * d + a] = bit
    for i in range(k.nincl):
        s1 = k.incl[2 * i]
        s2 = k.incl[2 * i + 1]
        for a in range(d):
            for b in range(d):
                if REL(k, s1, a, b) and not REL(k, s2, a, b):
                    return 0
    for i in range(k.ntrans):
        r = 2 * k.trans[i]
        for a in range(d):
            for b in range(d):
                if REL(k, r, a, b):
                    for c in range(d):
                        if REL(k, r, b, c) and not REL(k, r, a, c):
                            return 0
    return 1


cdef void static_atoms(Ctx *k) nogil:
    cdef int i, e, w, p, code
    cdef uint64_t v
    cdef uint64_t *out
    for i in range(k.nops):
        code = k.ops[4 * i]
        if code != ATOM and code != NATOM:
            continue
        for e in range(k.d):
            p = k.ops[4 * i + 1] * k.d + e
            out = reg(k, i, e)
            for w in range(k.W):
                if p < 6:
                    v = PATS[p]
                else:
                    v = (<uint64_t> 0) - <uint64_t> ((w >> (p - 6)) & 1)
                if code == NATOM:
                    v = ~v
                out[w] = v & k.full


cdef void evaluate(Ctx *k) nogil:
    cdef int i, e, b, w, n, kk, code, x, y, z, slot, W = k.W, d = k.d
    cdef uint64_t *out
    cdef uint64_t *a1
    cdef uint64_t *a2
    cdef uint64_t *ge = k.ge
    for i in range(k.nops):
        code = k.ops[4 * i]
        x = k.ops[4 * i + 1]
        y = k.ops[4 * i + 2]
        z = k.ops[4 * i + 3]
        if code == ATOM or code == NATOM:
            continue
        for e in range(d):
            out = reg(k, i, e)
            if code == NOT:
                a1 = reg(k, x, e)
                for w in range(W):
                    out[w] = ~a1[w] & k.full
            elif code == AND:
                a1 = reg(k, x, e)
                a2 = reg(k, y, e)
                for w in range(W):
                    out[w] = a1[w] & a2[w]
            elif code == OR:
                a1 = reg(k, x, e)
                a2 = reg(k, y, e)
                for w in range(W):
                    out[w] = a1[w] | a2[w]
            elif code == SOME:
                memset(out, 0, W * sizeof(uint64_t))
                for b in range(d):
                    if REL(k, x, e, b):
                        a1 = reg(k, y, b)
                        for w in range(W):
                            out[w] |= a1[w]
            elif code == ALL:
                for w in range(W):
                    out[w] = k.full
                for b in range(d):
                    if REL(k, x, e, b):
                        a1 = reg(k, y, b)
                        for w in range(W):
                            out[w] &= a1[w]
            else:
                n = x + (1 if code == ATMOST else 0)
                slot = y
                if n == 0:
                    for w in range(W):
                        out[w] = k.full
                else:
                    # ge[kk] = "at least kk related fillers so far", kk = 1..n
                    memset(ge, 0, (n + 1) * W * sizeof(uint64_t))
                    for w in range(W):
                        ge[w] = k.full
                    for b in range(d):
                        if REL(k, slot, e, b):
                            a1 = reg(k, z, b)
                            for kk in range(n, 0, -1):
                                for w in range(W):
                                    ge[kk * W + w] |= ge[(kk - 1) * W + w] & a1[w]
                    for w in range(W):
                        out[w] = ge[n * W + w]
                if code == ATMOST:
                    for w in range(W):
                        out[w] = ~out[w] & k.full


cdef inline int nonzero(uint64_t *acc, int W) nogil:
    cdef int w
    for w in range(W):
        if acc[w]:
            return 1
    return 0


cdef int holds(Ctx *k, int *cons, int ncons, int *m, uint64_t *acc) nogil:
    """AND the constraint set into ``acc``; returns whether any lane survives."""
    cdef int i, e, w, kind, x, y, z, W = k.W
    cdef uint64_t *a1
    cdef uint64_t *a2
    for i in range(ncons):
        kind = cons[4 * i]
        x = cons[4 * i + 1]
        y = cons[4 * i + 2]
        z = cons[4 * i + 3]
        if kind == C_NEQ:
            if m[x] == m[y]:
                memset(acc, 0, W * sizeof(uint64_t))
                return 0
        elif kind == C_EQ:
            if m[x] != m[y]:
                memset(acc, 0, W * sizeof(uint64_t))
                return 0
        elif kind == C_EDGE:
            if not REL(k, x, m[y], m[z]):
                memset(acc, 0, W * sizeof(uint64_t))
                return 0
        elif kind == C_MEMBER:
            a1 = reg(k, x, m[y])
            for w in range(W):
                acc[w] &= a1[w]
        elif kind == C_GLOBAL:
            for e in range(k.d):
                a1 = reg(k, x, e)
                for w in range(W):
                    acc[w] &= a1[w]
        elif kind == C_SUBSUMED:
            for e in range(k.d):
                a1 = reg(k, x, e)
                a2 = reg(k, y, e)
                for w in range(W):
                    acc[w] &= (~a1[w]) | a2[w]
        if not nonzero(acc, W):
            return 0
    return 1


cdef void query_mask(Ctx *k, int *atoms, int natoms, int nvars, int *m, uint64_t *within,
                     uint64_t *out, uint64_t *t, int *vals) nogil:
    cdef int i, w, kind, x, y, z, vy, vz, alive, j, W = k.W, done
    cdef uint64_t *a1
    memset(out, 0, W * sizeof(uint64_t))
    for j in range(nvars):
        vals[j] = 0
    while True:
        for w in range(W):
            t[w] = k.full
        alive = 1
        for i in range(natoms):
            kind = atoms[4 * i]
            x = atoms[4 * i + 1]
            y = atoms[4 * i + 2]
            z = atoms[4 * i + 3]
            vy = m[y] if y >= 0 else vals[-y - 1]
            if kind == Q_CONCEPT:
                a1 = reg(k, x, vy)
                for w in range(W):
                    t[w] &= a1[w]
            else:
                vz = m[z] if z >= 0 else vals[-z - 1]
                if not REL(k, x, vy, vz):
                    alive = 0
                    break
        if alive:
            done = 1
            for w in range(W):
                out[w] |= t[w]
                if within[w] & ~out[w]:
                    done = 0
            if done:
                return
        # next assignment
        j = 0
        while j < nvars:
            vals[j] += 1
            if vals[j] < k.d:
                break
            vals[j] = 0
            j += 1
        if j == nvars:
            return


cdef int lowest(uint64_t *mask, int W) nogil:
    cdef int w
    for w in range(W):
        if mask[w]:
            return w * 64 + __builtin_ctzll(mask[w])
    return -1


cdef long popcount(uint64_t *mask, int W) nogil:
    cdef long total = 0
    cdef int w
    for w in range(W):
        total += __builtin_popcountll(mask[w])
    return total


cdef void build_sym(Ctx *k, int symmetric) nogil:
    cdef int u, lane, e, c, ty, prev, ok, lanes = 1 << (k.nc * k.d)
    for u in range(k.d + 1):
        memset(k.sym + u * k.W, 0, k.W * sizeof(uint64_t))
        for lane in range(lanes):
            ok = 1
            if symmetric:
                prev = -1
                for e in range(u, k.d):
                    ty = 0
                    for c in range(k.nc):
                        ty |= ((lane >> (c * k.d + e)) & 1) << c
                    if ty < prev:
                        ok = 0
                        break
                    prev = ty
            if ok:
                k.sym[u * k.W + (lane >> 6)] |= (<uint64_t> 1) << (lane & 63)


def run(int mode, int d, int nc, int nr, list ops, list incl, list trans, list sets, list exts,
        int nterms, list maps, list qatoms, int nvars, bint symmetric):
    cdef Ctx k
    cdef int lanes_log = nc * d
    cdef int nsets = len(sets), s, mi, nmaps, u, e, j, extra, maxext = 0, maxn = 0, i, w, covered_all
    cdef uint64_t raw, nraw
    cdef long bad = 0, models = 0, other = 0
    cdef int **cons = NULL
    cdef int *ncons = NULL
    cdef int *cexts = NULL
    cdef int *cmaps = NULL
    cdef int *qa = NULL
    cdef int *full_map = NULL
    cdef int *vals = NULL
    cdef uint64_t *acc = NULL
    cdef uint64_t *acc2 = NULL
    cdef uint64_t *cov = NULL
    cdef uint64_t *tmp = NULL
    cdef uint64_t *qm = NULL
    first = None
    result = None

    k.d = d
    k.nc = nc
    k.nr = nr
    k.W = 1 if lanes_log <= 6 else 1 << (lanes_log - 6)
    k.full = 0xFFFFFFFFFFFFFFFFULL if lanes_log >= 6 else (((<uint64_t> 1) << (1 << lanes_log)) - 1)
    k.nops = len(ops) // 4
    k.nincl = len(incl) // 2
    k.ntrans = len(trans)
    for i in range(k.nops):
        if ops[4 * i] == ATLEAST or ops[4 * i] == ATMOST:
            maxn = max(maxn, ops[4 * i + 1] + 1)
    for extra in exts:
        maxext = max(maxext, extra)
    nmaps = len(maps) // nterms if nterms else 1
    k.ops = k.incl = k.trans = NULL
    k.regs = k.ge = k.sym = NULL
    k.rel = NULL
    try:
        k.ops = to_ints(ops)
        k.incl = to_ints(incl)
        k.trans = to_ints(trans)
        k.regs = <uint64_t *> calloc(<size_t> max(1, k.nops) * d * k.W, sizeof(uint64_t))
        k.ge = <uint64_t *> calloc(<size_t> (maxn + 2) * k.W, sizeof(uint64_t))
        k.sym = <uint64_t *> calloc(<size_t> (d + 1) * k.W, sizeof(uint64_t))
        k.rel = <char *> calloc(<size_t> max(1, 2 * nr * d * d), sizeof(char))
        acc = <uint64_t *> calloc(k.W, sizeof(uint64_t))
        acc2 = <uint64_t *> calloc(k.W, sizeof(uint64_t))
        cov = <uint64_t *> calloc(k.W, sizeof(uint64_t))
        tmp = <uint64_t *> calloc(k.W, sizeof(uint64_t))
        qm = <uint64_t *> calloc(k.W, sizeof(uint64_t))
        vals = <int *> calloc(nvars + 1, sizeof(int))
        full_map = <int *> calloc(nterms + maxext + 1, sizeof(int))
        cons = <int **> calloc(nsets + 1, sizeof(int *))
        ncons = <int *> calloc(nsets + 1, sizeof(int))
        if (k.regs == NULL or k.ge == NULL or k.sym == NULL or k.rel == NULL or acc == NULL
                or acc2 == NULL or cov == NULL or tmp == NULL or qm == NULL or vals == NULL
                or full_map == NULL or cons == NULL or ncons == NULL):
            raise MemoryError()
        for s in range(nsets):
            cons[s] = to_ints(sets[s])
            ncons[s] = len(sets[s]) // 4
        cexts = to_ints(exts)
        cmaps = to_ints(maps)
        qa = to_ints(qatoms)
        build_sym(&k, symmetric)
        static_atoms(&k)
        nraw = (<uint64_t> 1) << (nr * d * d)
        raw = 0
        while raw < nraw:
            if not load(&k, raw):
                raw += 1
                continue
            evaluate(&k)
            for mi in range(nmaps):
                u = 0
                for j in range(nterms):
                    full_map[j] = cmaps[mi * nterms + j]
                    if full_map[j] + 1 > u:
                        u = full_map[j] + 1
                memcpy(acc, k.sym + u * k.W, k.W * sizeof(uint64_t))
                if mode == FIND:
                    if not holds(&k, cons[0], ncons[0], full_map, acc):
                        continue
                    query_mask(&k, qa, len(qatoms) // 4, nvars, full_map, acc, qm, tmp, vals)
                    for w in range(k.W):
                        acc[w] &= ~qm[w]
                    if nonzero(acc, k.W):
                        result = (raw, mi, lowest(acc, k.W))
                        return result
                elif mode == COMPARE:
                    memcpy(acc2, acc, k.W * sizeof(uint64_t))
                    holds(&k, cons[0], ncons[0], full_map, acc)
                    holds(&k, cons[1], ncons[1], full_map, acc2)
                    models += popcount(acc, k.W)
                    other += popcount(acc2, k.W)
                    for w in range(k.W):
                        tmp[w] = acc[w] ^ acc2[w]
                    if nonzero(tmp, k.W):
                        bad += popcount(tmp, k.W)
                        if first is None:
                            first = (raw, mi, lowest(tmp, k.W))
                else:
                    if not holds(&k, cons[0], ncons[0], full_map, acc):
                        continue
                    models += popcount(acc, k.W)
                    memset(cov, 0, k.W * sizeof(uint64_t))
                    covered_all = 0
                    for s in range(1, nsets):
                        extra = cexts[s - 1]
                        for j in range(extra):
                            full_map[nterms + j] = 0
                        while True:
                            memcpy(tmp, acc, k.W * sizeof(uint64_t))
                            holds(&k, cons[s], ncons[s], full_map, tmp)
                            covered_all = 1
                            for w in range(k.W):
                                cov[w] |= tmp[w]
                                if acc[w] & ~cov[w]:
                                    covered_all = 0
                            if covered_all:
                                break
                            j = 0
                            while j < extra:
                                full_map[nterms + j] += 1
                                if full_map[nterms + j] < d:
                                    break
                                full_map[nterms + j] = 0
                                j += 1
                            if j == extra:
                                break
                        if covered_all:
                            break
                    if not covered_all:
                        for w in range(k.W):
                            tmp[w] = acc[w] & ~cov[w]
                        bad += popcount(tmp, k.W)
                        if first is None:
                            first = (raw, mi, lowest(tmp, k.W))
            raw += 1
        if mode == FIND:
            return None
        return (bad, models, other, first)
    finally:
        free(k.ops)
        free(k.incl)
        free(k.trans)
        free(k.regs)
        free(k.ge)
        free(k.sym)
        free(k.rel)
        free(acc)
        free(acc2)
        free(cov)
        free(tmp)
        free(qm)
        free(vals)
        free(full_map)
        if cons != NULL:
            for s in range(nsets):
                free(cons[s])
        free(cons)
        free(ncons)
        free(cexts)
        free(cmaps)
        free(qa)
