"""PMax-SAT instance for reachability-aware quotienting relations.

One Boolean variable per unordered pair ``{p, q}`` (``p < q``) of states in a
common seed block; variables are numbered in lexicographic pair order.
Diagonal pairs are the constant true and pairs split by the seed are the
constant false, so clauses mentioning them are simplified while they are
built.  Literals are signed 1-based variable indices, DIMACS style.

Clause families:

1. acceptance mismatch, unit ``-X{p,q}``;
2. internal-successor closure, ``-X{p,q} | X{p',q_1} | ...``;
3. call-successor closure, same shape as 2;
4. return-successor closure for every stack pair allowed by ``tops``,
   ``-X{p,q} | -X{pbar,qbar} | X{p',q_1} | ...``;
6. transitivity (only when the equality theory is off);
7. soft unit ``X{p,q}`` for every variable not touching an excluded state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from . import kernels
from ._accel import resolve
from .kernels import FAM_ACCEPT, FAM_CALL, FAM_INTERNAL, FAM_RETURN, FAM_SOFT, FAM_TRANS
from .partition import StatePartition
from .reachability import TopsMap, is_live
from .vpa import Vpa

FAMILIES = (FAM_ACCEPT, FAM_INTERNAL, FAM_CALL, FAM_RETURN, FAM_TRANS, FAM_SOFT)


class NotLiveError(ValueError):
    pass


class PairVar(NamedTuple):
    lo: int
    hi: int

    @classmethod
    def of(cls, p: int, q: int) -> "PairVar":
        if p == q:
            raise ValueError("diagonal pairs are constants, not variables")
        return cls(p, q) if p < q else cls(q, p)


class Clause(NamedTuple):
    literals: tuple[int, ...]
    kind: str  # "hard" | "soft"
    family: int


@dataclass(frozen=True, eq=False)
class ClauseDb:
    """Immutable clause database in CSR form.

    ``lits[ptr[i]:ptr[i+1]]`` are the literals of hard clause ``i`` and
    ``family[i]`` its family.  Soft clauses are the unit clauses ``X_v`` for
    every ``v`` with ``soft[v]``.
    """

    n_states: int
    block: np.ndarray  # seed block per state
    pairs: np.ndarray  # (V, 2) lo < hi, lexicographic
    ptr: np.ndarray
    lits: np.ndarray
    family: np.ndarray
    soft: np.ndarray
    theory: bool
    names: tuple[str, ...] = field(default=())

    @property
    def n_vars(self) -> int:
        return len(self.pairs)

    @property
    def n_hard(self) -> int:
        return len(self.ptr) - 1

    @property
    def n_soft(self) -> int:
        return int(self.soft.sum())

    @property
    def n_clauses(self) -> int:
        return self.n_hard + self.n_soft

    @cached_property
    def var_index(self) -> dict[PairVar, int]:
        return {PairVar(int(a), int(b)): i for i, (a, b) in enumerate(self.pairs)}

    def var(self, p: int, q: int) -> int | None:
        """Index of ``X{p,q}``, or ``None`` for a constant pair."""
        if p == q:
            return None
        return self.var_index.get(PairVar.of(p, q))

    def hard_clauses(self) -> Iterator[tuple[int, ...]]:
        lits = self.lits.tolist()
        ptr = self.ptr.tolist()
        for i in range(self.n_hard):
            yield tuple(lits[ptr[i]:ptr[i + 1]])

    def clauses(self) -> Iterator[Clause]:
        fams = self.family.tolist()
        for i, lits in enumerate(self.hard_clauses()):
            yield Clause(lits, "hard", fams[i])
        for v in np.flatnonzero(self.soft):
            yield Clause((int(v) + 1,), "soft", FAM_SOFT)

    @property
    def stats(self) -> dict[int, int]:
        counts = np.bincount(self.family.astype(np.int64), minlength=8) if self.n_hard else np.zeros(8, int)
        out = {f: int(counts[f]) for f in FAMILIES if f != FAM_SOFT}
        out[FAM_SOFT] = self.n_soft
        return out

    def to_wcnf(self) -> str:
        """Weighted CNF text (``p wcnf`` header, top weight for hard clauses)."""
        top = self.n_soft + 1
        out = [f"c vpamin instance: {self.n_states} states, theory={'on' if self.theory else 'off'}"]
        for i, (a, b) in enumerate(self.pairs.tolist()):
            na = self.names[a] if self.names else a
            nb = self.names[b] if self.names else b
            out.append(f"c var {i + 1} = {{{na},{nb}}}")
        if self.theory:
            out.append("c transitivity enforced by the solver, not listed")
        out.append(f"p wcnf {self.n_vars} {self.n_clauses} {top}")
        for lits in self.hard_clauses():
            out.append(f"{top} {' '.join(map(str, lits))} 0")
        for v in np.flatnonzero(self.soft):
            out.append(f"1 {int(v) + 1} 0")
        return "\n".join(out) + "\n"


class _Layout(NamedTuple):
    block: np.ndarray
    pos: np.ndarray
    start: np.ndarray
    members: np.ndarray
    mem_ptr: np.ndarray
    pairs: np.ndarray


def _layout(n: int, seed: StatePartition | None) -> _Layout:
    block = np.array(seed.block_of if seed is not None else (0,) * n, dtype=np.int64)
    nb = int(block.max()) + 1 if n else 0
    members = np.argsort(block, kind="stable").astype(np.int64)
    mem_ptr = np.zeros(nb + 1, dtype=np.int64)
    np.cumsum(np.bincount(block, minlength=nb), out=mem_ptr[1:])
    pos = np.empty(n, dtype=np.int64)
    pos[members] = np.arange(n) - mem_ptr[block[members]]
    size = mem_ptr[1:] - mem_ptr[:-1]
    after = size[block] - pos - 1  # members of the own block above each state
    start = np.zeros(n, dtype=np.int64)
    np.cumsum(after[:-1], out=start[1:])
    pairs = np.array(
        [(p, int(q)) for p in range(n) for q in members[mem_ptr[block[p]]:mem_ptr[block[p] + 1]] if q > p],
        dtype=np.int64,
    ).reshape(-1, 2)
    return _Layout(block, pos, start, members, mem_ptr, pairs)


def build_instance(
    vpa: Vpa,
    tops: TopsMap,
    seed: StatePartition | None = None,
    use_theory: bool = True,
    *,
    soft_exclude: Iterable[int] = (),
    check_live: bool = True,
    backend: str | None = None,
) -> ClauseDb:
    """Encode the quotienting-relation constraints of ``vpa`` as a ClauseDb.

    ``seed`` restricts variables to pairs inside its blocks (``None`` means a
    single block).  ``soft_exclude`` lists states whose pairs get no soft
    clause, typically the sink added by liveness completion.
    """
    if check_live and not is_live(vpa, tops, returns_only=True):
        raise NotLiveError("build_instance needs a live automaton (returns_only at least)")
    n = vpa.n_states
    lay = _layout(n, seed)
    arr = kernels.vpa_arrays(vpa)
    tmat = tops.matrix
    if resolve(backend) == "numba":
        lits, ptr, fam = kernels.encode_numba(
            n, lay.block, lay.pos, lay.start, lay.members, lay.mem_ptr, arr.final,
            arr.it, arr.it_ptr, arr.ct, arr.ct_ptr, arr.rt, arr.rt_ptr, tmat, use_theory,
        )
    else:
        lits, ptr, fam = _encode_python(vpa, tops, lay, use_theory)
    excluded = set(soft_exclude)
    soft = np.array([a not in excluded and b not in excluded for a, b in lay.pairs.tolist()], dtype=np.bool_)
    return ClauseDb(
        n_states=n,
        block=lay.block,
        pairs=lay.pairs,
        ptr=ptr,
        lits=lits,
        family=fam,
        soft=soft,
        theory=use_theory,
        names=vpa.states,
    )


def _encode_python(vpa: Vpa, tops: TopsMap, lay: _Layout, use_theory: bool):
    n = vpa.n_states
    block = lay.block.tolist()
    members = [lay.members[lay.mem_ptr[b]:lay.mem_ptr[b + 1]].tolist() for b in range(len(lay.mem_ptr) - 1)]
    index = {(int(a), int(b)): i + 1 for i, (a, b) in enumerate(lay.pairs.tolist())}

    def var(p, q):
        return index[(p, q) if p < q else (q, p)]

    out: list[tuple[tuple[int, ...], int]] = []

    def emit(lits: list[int], family: int) -> None:
        if any(-l in lits for l in lits):
            return
        out.append((tuple(lits), family))

    final = vpa.final
    for p in range(n):
        for q in members[block[p]]:
            if q > p and ((p in final) != (q in final)):
                emit([-var(p, q)], FAM_ACCEPT)

    for family, succ, pick in ((FAM_INTERNAL, vpa.internal_succ, 0), (FAM_CALL, vpa.call_succ, 1)):
        for p in range(n):
            for q in members[block[p]]:
                if q == p:
                    continue
                for _, sym, pd in vpa.outgoing[p][pick]:
                    targets = succ.get((q, sym), ())
                    if pd in targets:
                        continue
                    lits = [-var(p, q)]
                    lits += [var(pd, qd) for qd in targets if block[qd] == block[pd]]
                    emit(lits, family)

    rsucc = vpa.return_succ
    for p in range(n):
        for q in members[block[p]]:
            q_stacks = sorted(s for s in tops[q] if s >= 0)
            for _, sym, ps, pd in vpa.outgoing[p][2]:
                if ps not in tops[p]:
                    continue
                for qs in q_stacks:
                    if block[qs] != block[ps]:
                        continue
                    targets = rsucc.get((q, sym, qs), ())
                    if pd in targets:
                        continue
                    lits = []
                    if p != q:
                        lits.append(-var(p, q))
                    if ps != qs and -var(ps, qs) not in lits:
                        lits.append(-var(ps, qs))
                    lits += [var(pd, qd) for qd in targets if block[qd] == block[pd]]
                    emit(lits, FAM_RETURN)

    if not use_theory:
        for mem in members:
            for i, a in enumerate(mem):
                for j in range(i + 1, len(mem)):
                    b = mem[j]
                    for c in mem[j + 1:]:
                        ab, bc, ac = var(a, b), var(b, c), var(a, c)
                        emit([-ab, -bc, ac], FAM_TRANS)
                        emit([-ab, -ac, bc], FAM_TRANS)
                        emit([-ac, -bc, ab], FAM_TRANS)

    ptr = np.zeros(len(out) + 1, dtype=np.int64)
    np.cumsum([len(c) for c, _ in out], out=ptr[1:])
    lits = np.array([l for c, _ in out for l in c], dtype=np.int32)
    fam = np.array([f for _, f in out], dtype=np.int8)
    return lits, ptr, fam
