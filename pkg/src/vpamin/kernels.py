"""Array kernels for the hot loops: tops fixpoint, clause generation, greedy solve.

Every kernel here is compiled with numba.  ``tops_numpy`` is the vectorised
fallback for the fixpoint; the fallbacks for encoding and solving are the
readable implementations in :mod:`vpamin.encode` and :mod:`vpamin.solver`,
which produce identical results (checked by the test-suite).

Array conventions (see :func:`vpa_arrays`):

* ``it``/``ct``: int32 ``(k, 3)`` rows ``(src, sym, dst)`` sorted lexicographically,
  with ``it_ptr``/``ct_ptr`` giving the row range of each source state;
* ``rt``: int32 ``(k, 4)`` rows ``(src, sym, stack, dst)``, sorted, with
  ``rt_ptr`` by source and ``rs_idx``/``rs_ptr`` listing rows by stack symbol;
* tops matrices are ``(n, n + 1)`` with the last column standing for the
  bottom-of-stack marker.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import njit
from .vpa import Vpa

FAM_ACCEPT, FAM_INTERNAL, FAM_CALL, FAM_RETURN, FAM_TRANS, FAM_SOFT = 1, 2, 3, 4, 6, 7


@dataclass(frozen=True)
class VpaArrays:
    n: int
    it: np.ndarray
    it_ptr: np.ndarray
    ct: np.ndarray
    ct_ptr: np.ndarray
    rt: np.ndarray
    rt_ptr: np.ndarray
    rs_idx: np.ndarray
    rs_ptr: np.ndarray
    initial: np.ndarray
    final: np.ndarray


def _sorted_rows(rows, width) -> np.ndarray:
    if not rows:
        return np.zeros((0, width), dtype=np.int32)
    return np.array(sorted(rows), dtype=np.int32).reshape(-1, width)


def _ptr(keys: np.ndarray, n: int) -> np.ndarray:
    counts = np.bincount(keys, minlength=n) if len(keys) else np.zeros(n, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr


def vpa_arrays(vpa: Vpa) -> VpaArrays:
    n = vpa.n_states
    it = _sorted_rows(vpa.internal, 3)
    ct = _sorted_rows(vpa.call, 3)
    rt = _sorted_rows(vpa.ret, 4)
    rs_idx = np.argsort(rt[:, 2], kind="stable").astype(np.int64)
    initial = np.zeros(n, dtype=np.bool_)
    initial[list(vpa.initial)] = True
    final = np.zeros(n, dtype=np.bool_)
    final[list(vpa.final)] = True
    return VpaArrays(
        n=n,
        it=it,
        it_ptr=_ptr(it[:, 0], n),
        ct=ct,
        ct_ptr=_ptr(ct[:, 0], n),
        rt=rt,
        rt_ptr=_ptr(rt[:, 0], n),
        rs_idx=rs_idx,
        rs_ptr=_ptr(rt[:, 2], n),
        initial=initial,
        final=final,
    )


# -- tops fixpoint ------------------------------------------------------------

@njit
def _or_row(f, src, dst, n1):
    changed = False
    for j in range(n1):
        if f[src, j] and not f[dst, j]:
            f[dst, j] = True
            changed = True
    return changed


@njit
def tops_numba(n, it, it_ptr, ct, ct_ptr, rt, rt_ptr, rs_idx, rs_ptr, initial):
    n1 = n + 1
    f = np.zeros((n, n1), dtype=np.bool_)
    queued = np.zeros(n, dtype=np.bool_)
    work = np.empty(n, dtype=np.int64)  # circular queue, each state at most once
    head = 0
    size = 0
    for q in range(n):
        if initial[q]:
            f[q, n] = True
            work[(head + size) % n] = q
            size += 1
            queued[q] = True
    while size > 0:
        q = work[head]
        head = (head + 1) % n
        size -= 1
        queued[q] = False
        grown = []
        for k in range(it_ptr[q], it_ptr[q + 1]):
            d = it[k, 2]
            if _or_row(f, q, d, n1):
                grown.append(d)
        for k in range(ct_ptr[q], ct_ptr[q + 1]):
            d = ct[k, 2]
            if not f[d, q]:
                f[d, q] = True
                grown.append(d)
        for k in range(rt_ptr[q], rt_ptr[q + 1]):
            s = rt[k, 2]
            if f[q, s]:
                d = rt[k, 3]
                if _or_row(f, s, d, n1):
                    grown.append(d)
        # q's row is also a stack-symbol row for returns popping q
        for m in range(rs_ptr[q], rs_ptr[q + 1]):
            k = rs_idx[m]
            src = rt[k, 0]
            if f[src, q]:
                d = rt[k, 3]
                if _or_row(f, q, d, n1):
                    grown.append(d)
        for d in grown:
            if not queued[d]:
                queued[d] = True
                work[(head + size) % n] = d
                size += 1
    return f


def tops_numpy(n, it, it_ptr, ct, ct_ptr, rt, rt_ptr, rs_idx, rs_ptr, initial):
    """Vectorised rounds over all transitions until nothing changes."""
    f = np.zeros((n, n + 1), dtype=np.bool_)
    f[initial, n] = True
    while True:
        before = f.copy()
        if len(it):
            np.logical_or.at(f, it[:, 2], f[it[:, 0]])
        if len(ct):
            live = f[ct[:, 0]].any(axis=1)
            f[ct[live, 2], ct[live, 0]] = True
        if len(rt):
            fire = f[rt[:, 0], rt[:, 2]]
            if fire.any():
                np.logical_or.at(f, rt[fire, 3], f[rt[fire, 2]])
        if np.array_equal(before, f):
            return f


# -- clause generation ----------------------------------------------------------

@njit
def _var(p, q, start, pos):
    if p < q:
        return start[p] + pos[q] - pos[p] - 1
    return start[q] + pos[p] - pos[q] - 1


@njit
def _emit(buf, blen, lits, ptr, fam, nc, nl, family, fill):
    # tautology: a variable occurring both negated and positive
    for i in range(blen):
        for j in range(i + 1, blen):
            if buf[i] == -buf[j]:
                return nc, nl
    if fill:
        for i in range(blen):
            lits[nl + i] = buf[i]
        fam[nc] = family
        ptr[nc + 1] = nl + blen
    return nc + 1, nl + blen


@njit
def _encode_pass(n, block, pos, start, members, mem_ptr, final,
                 it, it_ptr, ct, ct_ptr, rt, rt_ptr, tops, use_theory,
                 lits, ptr, fam, fill):
    nc = 0
    nl = 0
    buf = np.empty(n + 3, dtype=np.int32)
    # (1) acceptance
    for p in range(n):
        b = block[p]
        for m in range(mem_ptr[b], mem_ptr[b + 1]):
            q = members[m]
            if q > p and final[p] != final[q]:
                buf[0] = -(_var(p, q, start, pos) + 1)
                nc, nl = _emit(buf, 1, lits, ptr, fam, nc, nl, 1, fill)
    # (2) internal and (3) call successors
    for family in range(2, 4):
        tr = it if family == 2 else ct
        tp = it_ptr if family == 2 else ct_ptr
        for p in range(n):
            b = block[p]
            for m in range(mem_ptr[b], mem_ptr[b + 1]):
                q = members[m]
                if q == p:
                    continue
                vpq = _var(p, q, start, pos) + 1
                for k in range(tp[p], tp[p + 1]):
                    sym = tr[k, 1]
                    pd = tr[k, 2]
                    blen = 1
                    buf[0] = -vpq
                    sat = False
                    for kk in range(tp[q], tp[q + 1]):
                        if tr[kk, 1] != sym:
                            continue
                        qd = tr[kk, 2]
                        if qd == pd:
                            sat = True
                            break
                        if block[qd] == block[pd]:
                            buf[blen] = _var(pd, qd, start, pos) + 1
                            blen += 1
                    if not sat:
                        nc, nl = _emit(buf, blen, lits, ptr, fam, nc, nl, family, fill)
    # (4) return successors, stack pairs restricted by tops
    for p in range(n):
        b = block[p]
        for m in range(mem_ptr[b], mem_ptr[b + 1]):
            q = members[m]
            for k in range(rt_ptr[p], rt_ptr[p + 1]):
                sym = rt[k, 1]
                ps = rt[k, 2]
                pd = rt[k, 3]
                if not tops[p, ps]:
                    continue
                for qs in range(n):
                    if not tops[q, qs] or block[qs] != block[ps]:
                        continue
                    blen = 0
                    if p != q:
                        buf[blen] = -(_var(p, q, start, pos) + 1)
                        blen += 1
                    if ps != qs:
                        v = -(_var(ps, qs, start, pos) + 1)
                        if blen == 0 or buf[0] != v:
                            buf[blen] = v
                            blen += 1
                    sat = False
                    for kk in range(rt_ptr[q], rt_ptr[q + 1]):
                        if rt[kk, 1] != sym or rt[kk, 2] != qs:
                            continue
                        qd = rt[kk, 3]
                        if qd == pd:
                            sat = True
                            break
                        if block[qd] == block[pd]:
                            buf[blen] = _var(pd, qd, start, pos) + 1
                            blen += 1
                    if not sat:
                        nc, nl = _emit(buf, blen, lits, ptr, fam, nc, nl, 4, fill)
    # (6) transitivity, only without the equality theory
    if not use_theory:
        nb = len(mem_ptr) - 1
        for bb in range(nb):
            lo = mem_ptr[bb]
            hi = mem_ptr[bb + 1]
            for i in range(lo, hi):
                a = members[i]
                for j in range(i + 1, hi):
                    c1 = members[j]
                    for l in range(j + 1, hi):
                        c2 = members[l]
                        ab = _var(a, c1, start, pos) + 1
                        bc = _var(c1, c2, start, pos) + 1
                        ac = _var(a, c2, start, pos) + 1
                        buf[0] = -ab
                        buf[1] = -bc
                        buf[2] = ac
                        nc, nl = _emit(buf, 3, lits, ptr, fam, nc, nl, 6, fill)
                        buf[0] = -ab
                        buf[1] = -ac
                        buf[2] = bc
                        nc, nl = _emit(buf, 3, lits, ptr, fam, nc, nl, 6, fill)
                        buf[0] = -ac
                        buf[1] = -bc
                        buf[2] = ab
                        nc, nl = _emit(buf, 3, lits, ptr, fam, nc, nl, 6, fill)
    return nc, nl


@njit
def encode_numba(n, block, pos, start, members, mem_ptr, final,
                 it, it_ptr, ct, ct_ptr, rt, rt_ptr, tops, use_theory):
    dummy_l = np.empty(0, dtype=np.int32)
    dummy_p = np.empty(1, dtype=np.int64)
    dummy_f = np.empty(0, dtype=np.int8)
    nc, nl = _encode_pass(n, block, pos, start, members, mem_ptr, final,
                          it, it_ptr, ct, ct_ptr, rt, rt_ptr, tops, use_theory,
                          dummy_l, dummy_p, dummy_f, False)
    lits = np.empty(nl, dtype=np.int32)
    ptr = np.zeros(nc + 1, dtype=np.int64)
    fam = np.empty(nc, dtype=np.int8)
    _encode_pass(n, block, pos, start, members, mem_ptr, final,
                 it, it_ptr, ct, ct_ptr, rt, rt_ptr, tops, use_theory,
                 lits, ptr, fam, True)
    return lits, ptr, fam


# -- greedy solver --------------------------------------------------------------

@njit
def _find(parent, x):
    while parent[x] != x:
        x = parent[x]
    return x


@njit
def _assign(val, trail, st, v, x):
    val[v] = x
    trail[st[0]] = v
    st[0] += 1


@njit
def _propagate(val, trail, st, ptr, lits, occ_ptr, occ, use_theory,
               pair_lo, pair_hi, n, block, pos, start,
               parent, rep, nxt, joined, scratch_a, scratch_b):
    """Unit and equality propagation to fixpoint; returns True on conflict.

    ``st`` holds ``[trail length, queue head, active temporary nodes]``.
    """
    while st[1] < st[0]:
        v = trail[st[1]]
        st[1] += 1
        x = val[v]
        code = 2 * v + (1 if x == 1 else 0)
        for oi in range(occ_ptr[code], occ_ptr[code + 1]):
            c = occ[oi]
            unassigned = 0
            last = 0
            sat = False
            for li in range(ptr[c], ptr[c + 1]):
                lit = lits[li]
                u = abs(lit) - 1
                vu = val[u]
                if vu == -1:
                    unassigned += 1
                    last = lit
                elif (vu == 1) == (lit > 0):
                    sat = True
                    break
            if sat:
                continue
            if unassigned == 0:
                return True
            if unassigned == 1:
                _assign(val, trail, st, abs(last) - 1, 1 if last > 0 else 0)
        if use_theory and x == 1:
            ra = _find(parent, pair_lo[v])
            rb = _find(parent, pair_hi[v])
            if ra == rb:
                continue
            na = 0
            s = rep[ra]
            while True:
                scratch_a[na] = s
                na += 1
                s = nxt[s]
                if s == rep[ra]:
                    break
            nb = 0
            s = rep[rb]
            while True:
                scratch_b[nb] = s
                nb += 1
                s = nxt[s]
                if s == rep[rb]:
                    break
            t = n + st[2]
            parent[ra] = t
            parent[rb] = t
            parent[t] = t
            rep[t] = rep[ra]
            joined[st[2], 0] = ra
            joined[st[2], 1] = rb
            st[2] += 1
            a0 = rep[ra]
            b0 = rep[rb]
            tmp = nxt[a0]
            nxt[a0] = nxt[b0]
            nxt[b0] = tmp
            for i in range(na):
                for j in range(nb):
                    a = scratch_a[i]
                    b = scratch_b[j]
                    if block[a] != block[b]:
                        return True
                    w = _var(a, b, start, pos)
                    if w == v:
                        continue
                    if val[w] == 0:
                        return True
                    if val[w] == -1:
                        _assign(val, trail, st, w, 1)
    return False


@njit
def _undo_temps(parent, rep, nxt, joined, st, n, keep):
    while st[2] > keep:
        st[2] -= 1
        ra = joined[st[2], 0]
        rb = joined[st[2], 1]
        parent[ra] = ra
        parent[rb] = rb
        a0 = rep[ra]
        b0 = rep[rb]
        tmp = nxt[a0]
        nxt[a0] = nxt[b0]
        nxt[b0] = tmp


@njit
def solve_numba(nv, ptr, lits, pref, pair_lo, pair_hi, n, block, pos, start, use_theory):
    """Greedy DPLL: lowest unset variable first, preferred value first,
    chronological backtracking.  Returns ``(values, status, decisions,
    backtracks, max_depth)``; status 1 means unsatisfiable."""
    nclauses = len(ptr) - 1
    # occurrence lists keyed by literal code 2*v + (negative)
    counts = np.zeros(2 * nv + 1, dtype=np.int64)
    for li in range(len(lits)):
        lit = lits[li]
        code = 2 * (abs(lit) - 1) + (1 if lit < 0 else 0)
        counts[code + 1] += 1
    occ_ptr = np.cumsum(counts)
    occ = np.empty(len(lits), dtype=np.int64)
    fillp = occ_ptr[:-1].copy()
    for c in range(nclauses):
        for li in range(ptr[c], ptr[c + 1]):
            lit = lits[li]
            code = 2 * (abs(lit) - 1) + (1 if lit < 0 else 0)
            occ[fillp[code]] = c
            fillp[code] += 1

    val = np.full(nv, -1, dtype=np.int8)
    trail = np.empty(max(nv, 1), dtype=np.int64)
    st = np.zeros(3, dtype=np.int64)
    parent = np.arange(2 * n + 1, dtype=np.int64)
    rep = np.arange(2 * n + 1, dtype=np.int64)
    nxt = np.arange(n, dtype=np.int64)
    joined = np.zeros((n + 1, 2), dtype=np.int64)
    scratch_a = np.empty(n, dtype=np.int64)
    scratch_b = np.empty(n, dtype=np.int64)
    lvl_start = np.zeros(nv + 1, dtype=np.int64)
    lvl_temps = np.zeros(nv + 1, dtype=np.int64)
    dec_var = np.zeros(nv + 1, dtype=np.int64)

    decisions = 0
    backtracks = 0
    max_depth = 0

    # unit clauses at level 0
    for c in range(nclauses):
        if ptr[c + 1] - ptr[c] == 1:
            lit = lits[ptr[c]]
            u = abs(lit) - 1
            want = 1 if lit > 0 else 0
            if val[u] == -1:
                _assign(val, trail, st, u, want)
            elif val[u] != want:
                return val, 1, decisions, backtracks, max_depth
    if _propagate(val, trail, st, ptr, lits, occ_ptr, occ, use_theory, pair_lo, pair_hi,
                  n, block, pos, start, parent, rep, nxt, joined, scratch_a, scratch_b):
        return val, 1, decisions, backtracks, max_depth

    level = 0
    cursor = 0
    while True:
        while cursor < nv and val[cursor] != -1:
            cursor += 1
        if cursor == nv:
            break
        v = cursor
        level += 1
        lvl_start[level] = st[0]
        lvl_temps[level] = st[2]
        dec_var[level] = v
        decisions += 1
        _assign(val, trail, st, v, pref[v])
        depth = 0
        while _propagate(val, trail, st, ptr, lits, occ_ptr, occ, use_theory, pair_lo,
                         pair_hi, n, block, pos, start, parent, rep, nxt, joined,
                         scratch_a, scratch_b):
            if level == 0:
                return val, 1, decisions, backtracks, max_depth
            d = dec_var[level]
            while st[0] > lvl_start[level]:
                st[0] -= 1
                val[trail[st[0]]] = -1
            st[1] = st[0]
            _undo_temps(parent, rep, nxt, joined, st, n, lvl_temps[level])
            level -= 1
            depth += 1
            backtracks += 1
            _assign(val, trail, st, d, 1 - pref[d])
            cursor = d
        if depth > max_depth:
            max_depth = depth
    return val, 0, decisions, backtracks, max_depth


# -- bounded language comparison --------------------------------------------------
#
# A configuration (q, stack) is packed into one int64: the stack is a base
# ``n + 1`` number whose lowest digit is the top (digit 0 = no entry), and the
# code is ``stack * n + q``.  Each level of the search holds one sorted,
# duplicate-free code array per live word, stored CSR-style.

def step_tables(vpa: Vpa):
    """CSR successor tables keyed by (src, sym) and (src, sym, stack)."""
    n = vpa.n_states
    ns = max(vpa.alphabet.size, 1)
    keys = [p * ns + a for p, a, _ in vpa.internal] + [p * ns + c for p, c, _ in vpa.call]
    dsts = [q for _, _, q in vpa.internal] + [q for _, _, q in vpa.call]
    order = np.lexsort((np.array(dsts, dtype=np.int64), np.array(keys, dtype=np.int64))) if keys else []
    k_ptr = _ptr(np.array(keys, dtype=np.int64), n * ns)
    k_dst = np.array(dsts, dtype=np.int64)[order] if keys else np.zeros(0, dtype=np.int64)
    rkeys = np.array([(p * ns + r) * n + s for p, r, s, _ in vpa.ret], dtype=np.int64)
    rd = np.array([q for *_, q in vpa.ret], dtype=np.int64)
    rorder = np.lexsort((rd, rkeys)) if len(rkeys) else []
    r_ptr = _ptr(rkeys, n * ns * n)
    r_dst = rd[rorder] if len(rkeys) else np.zeros(0, dtype=np.int64)
    final = np.zeros(n, dtype=np.bool_)
    final[list(vpa.final)] = True
    init = np.array(sorted(vpa.initial), dtype=np.int64)
    return k_ptr, k_dst, r_ptr, r_dst, final, init


def packable(n: int, max_len: int) -> bool:
    return (n + 1) ** (max_len + 1) * max(n, 1) < 2 ** 62


@njit
def _grow(a, need):
    if need <= len(a):
        return a
    size = max(need, 2 * len(a))
    b = np.empty(size, dtype=a.dtype)
    b[:len(a)] = a
    return b


@njit
def _succ_codes(codes, lo, hi, sym, kind, n, ns, k_ptr, k_dst, r_ptr, r_dst, keep_mod, out):
    m = 0
    base = n + 1
    for i in range(lo, hi):
        c = codes[i]
        q = c % n
        st = c // n
        if kind == 2:
            if st == 0:
                continue
            top = st % base - 1
            rest = st // base
            key = (q * ns + sym) * n + top
            for j in range(r_ptr[key], r_ptr[key + 1]):
                out[m] = (rest % keep_mod) * n + r_dst[j]
                m += 1
        else:
            key = q * ns + sym
            nst = st * base + q + 1 if kind == 1 else st
            nst = nst % keep_mod
            for j in range(k_ptr[key], k_ptr[key + 1]):
                out[m] = nst * n + k_dst[j]
                m += 1
    # insertion sort then unique; the sets are small
    for i in range(1, m):
        x = out[i]
        j = i - 1
        while j >= 0 and out[j] > x:
            out[j + 1] = out[j]
            j -= 1
        out[j + 1] = x
    u = 1 if m else 0
    for i in range(1, m):
        if out[i] != out[u - 1]:
            out[u] = out[i]
            u += 1
    return u


@njit
def _hash_pair(a, ma, b, mb):
    h = np.int64(1469598103934665603)
    for i in range(ma):
        h = (h ^ a[i]) * np.int64(1099511628211)
    h = (h ^ np.int64(-7)) * np.int64(1099511628211)
    for i in range(mb):
        h = (h ^ b[i]) * np.int64(1099511628211)
    return h


@njit
def _same(x, lo, hi, buf, m):
    if hi - lo != m:
        return False
    for i in range(m):
        if x[lo + i] != buf[i]:
            return False
    return True


@njit
def _accepting(codes, lo, hi, n, final):
    for i in range(lo, hi):
        if final[codes[i] % n]:
            return True
    return False


@njit
def bounded_equiv_numba(kinds, max_len,
                        na, ka_ptr, ka_dst, ra_ptr, ra_dst, fin_a, init_a,
                        nb, kb_ptr, kb_dst, rb_ptr, rb_dst, fin_b, init_b):
    """Returns ``(ok, word)``; ``word`` is a shortest differing word when not ok."""
    ns = max(len(kinds), 1)
    # level arrays
    a_codes = init_a.copy()
    b_codes = init_b.copy()
    a_ptr = np.zeros(2, dtype=np.int64)
    b_ptr = np.zeros(2, dtype=np.int64)
    a_ptr[1] = len(init_a)
    b_ptr[1] = len(init_b)
    # word history: parent index and last symbol for every node ever created
    parent = np.full(1, -1, dtype=np.int64)
    last = np.full(1, -1, dtype=np.int64)
    node = np.zeros(1, dtype=np.int64)
    n_nodes = 1
    words = 1
    bad = -1
    if _accepting(a_codes, 0, a_ptr[1], na, fin_a) != _accepting(b_codes, 0, b_ptr[1], nb, fin_b):
        bad = 0
    buf_a = np.empty(64, dtype=np.int64)
    buf_b = np.empty(64, dtype=np.int64)
    depth = 0
    while bad < 0 and depth < max_len and words > 0:
        keep = max_len - depth - 1
        mod_a = (na + 1) ** keep
        mod_b = (nb + 1) ** keep
        nxt_a = np.empty(max(len(a_codes) * 2, 16), dtype=np.int64)
        nxt_b = np.empty(max(len(b_codes) * 2, 16), dtype=np.int64)
        nxt_a_ptr = np.zeros(words * ns + 1, dtype=np.int64)
        nxt_b_ptr = np.zeros(words * ns + 1, dtype=np.int64)
        nxt_node = np.empty(words * ns, dtype=np.int64)
        seen = dict()
        seen[np.int64(0)] = np.int64(-1)
        cnt = 0
        fa = 0
        fb = 0
        for w in range(words):
            for s in range(ns):
                if len(kinds) == 0:
                    break
                kind = kinds[s]
                la = a_ptr[w + 1] - a_ptr[w]
                lb = b_ptr[w + 1] - b_ptr[w]
                buf_a = _grow(buf_a, la * na + 1)
                buf_b = _grow(buf_b, lb * nb + 1)
                ma = _succ_codes(a_codes, a_ptr[w], a_ptr[w + 1], s, kind, na, ns,
                                 ka_ptr, ka_dst, ra_ptr, ra_dst, mod_a, buf_a)
                mb = _succ_codes(b_codes, b_ptr[w], b_ptr[w + 1], s, kind, nb, ns,
                                 kb_ptr, kb_dst, rb_ptr, rb_dst, mod_b, buf_b)
                if ma == 0 and mb == 0:
                    continue
                h = _hash_pair(buf_a, ma, buf_b, mb)
                prev = seen[h] if h in seen else np.int64(-1)
                if prev >= 0:
                    if (_same(nxt_a, nxt_a_ptr[prev], nxt_a_ptr[prev + 1], buf_a, ma)
                            and _same(nxt_b, nxt_b_ptr[prev], nxt_b_ptr[prev + 1], buf_b, mb)):
                        continue
                else:
                    seen[h] = np.int64(cnt)
                nxt_a = _grow(nxt_a, fa + ma)
                nxt_b = _grow(nxt_b, fb + mb)
                nxt_a[fa:fa + ma] = buf_a[:ma]
                nxt_b[fb:fb + mb] = buf_b[:mb]
                fa += ma
                fb += mb
                nxt_a_ptr[cnt + 1] = fa
                nxt_b_ptr[cnt + 1] = fb
                parent = _grow(parent, n_nodes + 1)
                last = _grow(last, n_nodes + 1)
                parent[n_nodes] = node[w]
                last[n_nodes] = s
                nxt_node[cnt] = n_nodes
                n_nodes += 1
                if bad < 0 and (_accepting(nxt_a, fa - ma, fa, na, fin_a)
                                != _accepting(nxt_b, fb - mb, fb, nb, fin_b)):
                    bad = n_nodes - 1
                cnt += 1
            if bad >= 0:
                break
        a_codes = nxt_a
        b_codes = nxt_b
        a_ptr = nxt_a_ptr[:cnt + 1]
        b_ptr = nxt_b_ptr[:cnt + 1]
        node = nxt_node[:cnt]
        words = cnt
        depth += 1
    if bad < 0:
        return True, np.zeros(0, dtype=np.int64)
    k = 0
    x = bad
    while parent[x] >= 0:
        k += 1
        x = parent[x]
    word = np.empty(k, dtype=np.int64)
    x = bad
    while parent[x] >= 0:
        k -= 1
        word[k] = last[x]
        x = parent[x]
    return False, word
