"""Reachability analyses on VPA: tops, trimming, liveness, seed partition."""

from __future__ import annotations

from functools import cached_property
from typing import Iterator

import numpy as np

from . import kernels
from ._accel import resolve
from .partition import StatePartition
from .vpa import BOTTOM, Vpa


class TopsMap:
    """Top-of-stack symbols per state; ``BOTTOM`` marks the empty stack.

    Backed by a boolean ``(n, n + 1)`` matrix whose last column is ``BOTTOM``.
    """

    def __init__(self, matrix: np.ndarray):
        self.matrix = np.ascontiguousarray(matrix, dtype=np.bool_)
        self.matrix.setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _sets(self) -> tuple[frozenset[int], ...]:
        n = self.n_states
        out = []
        for row in self.matrix:
            cols = np.flatnonzero(row).tolist()
            out.append(frozenset(BOTTOM if c == n else c for c in cols))
        return tuple(out)

    def __getitem__(self, q: int) -> frozenset[int]:
        return self._sets[q]

    def __len__(self) -> int:
        return self.n_states

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self._sets)

    def reachable(self, q: int) -> bool:
        return bool(self.matrix[q].any())

    def __eq__(self, other) -> bool:
        return isinstance(other, TopsMap) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self) -> str:
        return f"TopsMap({[sorted(s) for s in self._sets]})"


def compute_tops(vpa: Vpa, backend: str | None = None) -> TopsMap:
    """Least fixpoint of the four tops rules (initial, internal, call, return)."""
    a = kernels.vpa_arrays(vpa)
    fn = kernels.tops_numba if resolve(backend) == "numba" else kernels.tops_numpy
    f = fn(a.n, a.it, a.it_ptr, a.ct, a.ct_ptr, a.rt, a.rt_ptr, a.rs_idx, a.rs_ptr, a.initial)
    return TopsMap(f)


def empty_language_vpa(vpa: Vpa) -> Vpa:
    """One non-final initial state and no transitions, over ``vpa``'s alphabet."""
    return Vpa(states=("q0",), alphabet=vpa.alphabet, initial={0})


def restrict(vpa: Vpa, keep) -> Vpa:
    """Sub-automaton on the states in ``keep`` (original order kept)."""
    keep = sorted(set(keep))
    new = {q: i for i, q in enumerate(keep)}
    return Vpa(
        states=tuple(vpa.states[q] for q in keep),
        alphabet=vpa.alphabet,
        internal={(new[p], a, new[q]) for p, a, q in vpa.internal if p in new and q in new},
        call={(new[p], c, new[q]) for p, c, q in vpa.call if p in new and q in new},
        ret={
            (new[p], r, new[s], new[q])
            for p, r, s, q in vpa.ret
            if p in new and q in new and s in new
        },
        initial={new[q] for q in vpa.initial if q in new},
        final={new[q] for q in vpa.final if q in new},
    )


def coreachable(vpa: Vpa, tops: TopsMap) -> set[int]:
    """States from which a final state is reachable in the transition graph.

    Return edges count only when their stack symbol is in ``tops`` of the
    source, so this over-approximates true co-reachability.
    """
    back: dict[int, list[int]] = {}
    for p, _, q in vpa.internal:
        back.setdefault(q, []).append(p)
    for p, _, q in vpa.call:
        back.setdefault(q, []).append(p)
    for p, _, s, q in vpa.ret:
        if s in tops[p]:
            back.setdefault(q, []).append(p)
    seen = set(vpa.final)
    todo = list(seen)
    while todo:
        q = todo.pop()
        for p in back.get(q, ()):
            if p not in seen:
                seen.add(p)
                todo.append(p)
    return seen


def trim(vpa: Vpa) -> Vpa:
    """Remove unreachable and dead states."""
    tops = compute_tops(vpa)
    reach = {q for q in range(vpa.n_states) if tops.reachable(q)}
    keep = reach & coreachable(vpa, tops)
    if not (keep & vpa.initial):
        return empty_language_vpa(vpa)
    if len(keep) == vpa.n_states:
        return vpa
    return restrict(vpa, keep)


def is_live(vpa: Vpa, tops: TopsMap | None = None, returns_only: bool = False) -> bool:
    """Liveness predicate.

    Returns: for every state ``q``, return symbol ``r`` and state ``s``, a
    transition ``(q, r, s, _)`` exists iff ``s`` is in ``tops(q)``.  Unless
    ``returns_only``, every state also needs a successor for every internal
    and call symbol.
    """
    if tops is None:
        tops = compute_tops(vpa)
    alpha = vpa.alphabet
    if not returns_only:
        for q in range(vpa.n_states):
            for a in alpha.internal_ids:
                if (q, a) not in vpa.internal_succ:
                    return False
            for c in alpha.call_ids:
                if (q, c) not in vpa.call_succ:
                    return False
    present = {(p, r, s) for p, r, s, _ in vpa.ret}
    for q in range(vpa.n_states):
        stacks = {s for s in tops[q] if s != BOTTOM}
        for r in alpha.return_ids:
            if {s for s in stacks if (q, r, s) not in present}:
                return False
    for p, r, s in present:
        if s not in tops[p]:
            return False
    return True


def _unique_name(names, base: str) -> str:
    taken = set(names)
    name, i = base, 1
    while name in taken:
        name = f"{base}{i}"
        i += 1
    return name


def make_live_with_sink(vpa: Vpa, returns_only: bool = False) -> tuple[Vpa, int | None]:
    """Like :func:`make_live` but also reports the id of the added sink."""
    tops = compute_tops(vpa)
    n = vpa.n_states
    sink = n
    alpha = vpa.alphabet
    internal = set(vpa.internal)
    call = set(vpa.call)
    ret = {t for t in vpa.ret if t[2] in tops[t[0]]}
    added = False
    if not returns_only:
        for q in range(n):
            for a in alpha.internal_ids:
                if (q, a) not in vpa.internal_succ:
                    internal.add((q, a, sink))
                    added = True
            for c in alpha.call_ids:
                if (q, c) not in vpa.call_succ:
                    call.add((q, c, sink))
                    added = True
    present = {(p, r, s) for p, r, s, _ in ret}
    for q in range(n):
        for s in sorted(tops[q] - {BOTTOM}):
            for r in alpha.return_ids:
                if (q, r, s) not in present:
                    ret.add((q, r, s, sink))
                    added = True
    if not added:
        if ret == set(vpa.ret):
            return vpa, None
        return Vpa(vpa.states, alpha, internal, call, ret, vpa.initial, vpa.final), None

    if not returns_only:
        internal |= {(sink, a, sink) for a in alpha.internal_ids}
        call |= {(sink, c, sink) for c in alpha.call_ids}
    states = vpa.states + (_unique_name(vpa.states, "sink"),)
    # the sink's own return loops feed its tops; iterate to a fixpoint
    while True:
        out = Vpa(states, alpha, internal, call, ret, vpa.initial, vpa.final)
        sink_tops = compute_tops(out)[sink] - {BOTTOM}
        loops = {(sink, r, s, sink) for s in sink_tops for r in alpha.return_ids}
        if loops <= ret:
            return out, sink
        ret |= loops


def make_live(vpa: Vpa, returns_only: bool = False) -> Vpa:
    """Complete ``vpa`` to live form with at most one added non-final sink.

    Return transitions whose stack symbol is unreachable at their source are
    dropped.  With ``returns_only`` the internal and call relations are left
    partial.
    """
    return make_live_with_sink(vpa, returns_only)[0]


def initial_partition(vpa: Vpa) -> StatePartition:
    """Coarsest stable seed partition.

    States in a block agree on acceptance and on their sets of outgoing
    internal and call symbols; when every member of a block has a unique
    successor under some internal/call symbol, those successors share a block.
    """
    n = vpa.n_states
    alpha = vpa.alphabet
    succ: list[dict[int, tuple[int, ...]]] = [{} for _ in range(n)]
    for (q, a), ds in vpa.internal_succ.items():
        succ[q][a] = ds
    for (q, c), ds in vpa.call_succ.items():
        succ[q][c] = ds
    sig0 = [(q in vpa.final, tuple(sorted(succ[q]))) for q in range(n)]
    block = StatePartition(tuple(_relabel(sig0))).block_of
    syms = list(alpha.internal_ids) + list(alpha.call_ids)
    while True:
        members: dict[int, list[int]] = {}
        for q, b in enumerate(block):
            members.setdefault(b, []).append(q)
        unique = {
            b: [s for s in syms if all(len(succ[q].get(s, ())) == 1 for q in qs)]
            for b, qs in members.items()
        }
        sig = [(block[q], tuple(block[succ[q][s][0]] for s in unique[block[q]])) for q in range(n)]
        new = StatePartition(tuple(_relabel(sig))).block_of
        if max(new, default=-1) == max(block, default=-1):
            return StatePartition(block)
        block = new


def _relabel(signatures) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(s, len(ids)) for s in signatures]
