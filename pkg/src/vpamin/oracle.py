"""Independent checkers used by the tests and the CLI.

Nothing here shares code with the encoder or the solver: the RAQ checker
reads the closure conditions straight off the automaton and a partition, and
the bounded equivalence check simulates both automata on the same words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from ._accel import resolve
from .partition import StatePartition
from .reachability import TopsMap, compute_tops
from .vpa import BOTTOM, CALL, INTERNAL, RETURN, Alphabet, Config, Vpa, Word, initial_configs, step


class AlphabetMismatch(ValueError):
    pass


# -- bounded language equivalence ---------------------------------------------------

def _cut(configs: frozenset[Config], keep: int) -> frozenset[Config]:
    # at most ``keep`` more returns can happen, so deeper stack entries never matter
    return frozenset((q, s[len(s) - keep:] if keep else ()) if len(s) > keep else (q, s)
                     for q, s in configs)


def bounded_equiv(a: Vpa, b: Vpa, max_len: int = 8,
                  backend: str | None = None) -> tuple[bool, Word | None]:
    """Compare languages on all words up to ``max_len``.

    Returns ``(True, None)`` or ``(False, w)`` with ``w`` a shortest word
    accepted by exactly one side (first in symbol-id order among those).
    """
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("automata are over different alphabets")
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    if (resolve(backend) == "numba" and a.n_states and b.n_states
            and kernels.packable(a.n_states, max_len) and kernels.packable(b.n_states, max_len)):
        kinds = np.array([(INTERNAL, CALL, RETURN).index(a.alphabet.kind(s))
                          for s in range(a.alphabet.size)], dtype=np.int64)
        ok, word = kernels.bounded_equiv_numba(
            kinds, max_len, a.n_states, *kernels.step_tables(a), b.n_states, *kernels.step_tables(b))
        return (True, None) if ok else (False, tuple(int(x) for x in word))
    return _bounded_equiv_python(a, b, max_len)


def _bounded_equiv_python(a: Vpa, b: Vpa, max_len: int) -> tuple[bool, Word | None]:
    syms = range(a.alphabet.size)
    fa, fb = a.final, b.final
    level = {(_cut(initial_configs(a), max_len), _cut(initial_configs(b), max_len)): ()}
    for depth in range(max_len + 1):
        for (ca, cb), word in level.items():
            if any(q in fa for q, _ in ca) != any(q in fb for q, _ in cb):
                return False, word
        if depth == max_len:
            break
        keep = max_len - depth - 1
        nxt: dict = {}
        for (ca, cb), word in level.items():
            for s in syms:
                na, nb = step(a, ca, s), step(b, cb, s)
                if not na and not nb:
                    continue
                key = (_cut(na, keep), _cut(nb, keep))
                nxt.setdefault(key, word + (s,))
        level = nxt
    return True, None


# -- RAQ relations ------------------------------------------------------------------

@dataclass(frozen=True)
class RaqViolation:
    """One failed closure condition: ``p ~ q`` but ``q`` cannot match ``p``'s move."""

    constraint: str  # "accept" | "internal" | "call" | "return"
    p: int
    q: int
    symbol: int | None = None
    p_stack: int | None = None
    q_stack: int | None = None
    target: int | None = None

    def describe(self, vpa: Vpa) -> str:
        nm = vpa.states
        text = f"{self.constraint}: {nm[self.p]} ~ {nm[self.q]}"
        if self.symbol is not None:
            text += f" on {vpa.alphabet.name(self.symbol)}"
        if self.p_stack is not None:
            text += f" with stacks ({nm[self.p_stack]}, {nm[self.q_stack]})"
        if self.target is not None:
            text += f"; no match for target {nm[self.target]}"
        return text


def _check_part(vpa: Vpa, part: StatePartition) -> None:
    if part.n_states != vpa.n_states:
        raise ValueError(f"partition covers {part.n_states} states, automaton has {vpa.n_states}")


def check_raq(vpa: Vpa, tops: TopsMap | None, part: StatePartition) -> RaqViolation | None:
    """First violated closure condition of ``part``, or None when it is RAQ."""
    _check_part(vpa, part)
    if tops is None:
        tops = compute_tops(vpa)
    blk = part.block_of
    final = vpa.final
    out = vpa.outgoing
    isucc, csucc, rsucc = vpa.internal_succ, vpa.call_succ, vpa.return_succ
    for members in part.blocks:
        for p in members:
            for q in members:
                if p != q:
                    if (p in final) != (q in final):
                        return RaqViolation("accept", p, q)
                    for kind, succ, rows in (("internal", isucc, out[p][0]), ("call", csucc, out[p][1])):
                        for _, a, pd in rows:
                            if not any(blk[qd] == blk[pd] for qd in succ.get((q, a), ())):
                                return RaqViolation(kind, p, q, a, target=pd)
                q_stacks = [s for s in tops[q] if s != BOTTOM]
                for _, r, ps, pd in out[p][2]:
                    if ps not in tops[p]:
                        continue
                    for qs in q_stacks:
                        if blk[qs] != blk[ps]:
                            continue
                        if not any(blk[qd] == blk[pd] for qd in rsucc.get((q, r, qs), ())):
                            return RaqViolation("return", p, q, r, ps, qs, pd)
    return None


def check_local_max(vpa: Vpa, tops: TopsMap | None, part: StatePartition,
                    ignore: Iterable[int] = ()) -> tuple[int, int] | None:
    """A pair whose blocks could be merged while staying RAQ, or None.

    Blocks containing a state in ``ignore`` are left out of the search.
    """
    if tops is None:
        tops = compute_tops(vpa)
    skip = set(ignore)
    blocks = [b for b in part.blocks if not skip.intersection(b)]
    for i, b1 in enumerate(blocks):
        for b2 in blocks[i + 1:]:
            merged = part.merge(b1[0], b2[0])
            if check_raq(vpa, tops, merged) is None:
                return b1[0], b2[0]
    return None


# -- finite automata ---------------------------------------------------------------

def direct_bisim_fa(fa: Vpa) -> StatePartition:
    """Coarsest direct bisimulation of an automaton with only internal symbols."""
    if fa.alphabet.call or fa.alphabet.ret:
        raise ValueError("direct_bisim_fa needs empty call and return alphabets")
    n = fa.n_states
    succ: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for p, a, q in fa.internal:
        succ[p].append((a, q))
    block = [int(q in fa.final) for q in range(n)]
    while True:
        sigs = [(block[p], frozenset((a, block[q]) for a, q in succ[p])) for p in range(n)]
        ids: dict = {}
        new = [ids.setdefault(s, len(ids)) for s in sigs]
        if len(ids) == len(set(block)):
            return StatePartition(tuple(new))
        block = new


# -- fixtures ----------------------------------------------------------------------

def fig1x() -> Vpa:
    """Two calls whose returns differ, plus a state only reached on an empty stack.

    States q1, q2 and q3 all move to qf on ``b``.  q1 and q3 return on stack
    q0 to different places, and q2 never sees a nonempty stack, so q2 can be
    merged with either neighbour but not with both.
    """
    alpha = Alphabet(internal=("a", "b"), call=("c1", "c2"), ret=("r",))
    return Vpa.from_names(
        ["q0", "q1", "q2", "q3", "q4", "qf"],
        alpha,
        internal=[("q0", "a", "q2"), ("q4", "a", "qf"),
                  ("q1", "b", "qf"), ("q2", "b", "qf"), ("q3", "b", "qf")],
        call=[("q0", "c1", "q1"), ("q0", "c2", "q3")],
        ret=[("q1", "r", "q0", "qf"), ("q3", "r", "q0", "q4")],
        initial=["q0"],
        final=["qf"],
    )


def fig2x() -> Vpa:
    """q1 and q2 look alike but are the stack symbols the returns test."""
    alpha = Alphabet(internal=("a1", "a2"), call=("c",), ret=("r1", "r2"))
    return Vpa.from_names(
        ["q0", "q1", "q2", "q3", "qf"],
        alpha,
        internal=[("q0", "a1", "q1"), ("q0", "a2", "q2")],
        call=[("q1", "c", "q3"), ("q2", "c", "q3")],
        ret=[("q3", "r1", "q1", "qf"), ("q3", "r2", "q2", "qf")],
        initial=["q0"],
        final=["qf"],
    )


def sevpa(k: int) -> Vpa:
    """k single-state modules entered by ``c_i`` and left by ``r``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    alpha = Alphabet(internal=(), call=tuple(f"c{i}" for i in range(1, k + 1)), ret=("r",))
    mods = [f"q{i}" for i in range(1, k + 1)]
    return Vpa.from_names(
        ["q0", *mods, "qf"],
        alpha,
        call=[("q0", f"c{i}", m) for i, m in enumerate(mods, 1)],
        ret=[(m, "r", "q0", "qf") for m in mods],
        initial=["q0"],
        final=["qf"],
    )


def fixtures() -> dict[str, Vpa]:
    return {"FIG1X": fig1x(), "FIG2X": fig2x(), **{f"SEVPA({k})": sevpa(k) for k in range(1, 9)}}
