"""Visibly pushdown automata: data model, runs and membership.

States and symbols are dense integer ids with side tables of names.  A call
pushes the current state (weakly-hierarchical VPA), so the stack alphabet is
the state set plus the bottom marker ``BOTTOM``.  Returns on the empty stack
are not possible: a run that attempts one gets stuck.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain, product
from typing import Iterable, Iterator, Sequence

BOTTOM = -1

INTERNAL, CALL, RETURN = "internal", "call", "return"

WELL_MATCHED = "well-matched"
MATCHED_RETURN = "matched-return-only"
UNMATCHED_RETURN = "unmatched-return"

Word = tuple[int, ...]
Config = tuple[int, tuple[int, ...]]


class UnknownSymbolError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Three disjoint groups of symbol names.

    Symbol ids are assigned internal first, then call, then return.
    """

    internal: tuple[str, ...] = ()
    call: tuple[str, ...] = ()
    ret: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("internal", "call", "ret"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def size(self) -> int:
        return len(self.internal) + len(self.call) + len(self.ret)

    @property
    def names(self) -> tuple[str, ...]:
        return self.internal + self.call + self.ret

    @property
    def internal_ids(self) -> range:
        return range(0, len(self.internal))

    @property
    def call_ids(self) -> range:
        i = len(self.internal)
        return range(i, i + len(self.call))

    @property
    def return_ids(self) -> range:
        i = len(self.internal) + len(self.call)
        return range(i, i + len(self.ret))

    def kind(self, sym: int) -> str:
        if 0 <= sym < len(self.internal):
            return INTERNAL
        if sym < len(self.internal) + len(self.call):
            return CALL
        if sym < self.size:
            return RETURN
        raise UnknownSymbolError(f"unknown symbol id {sym}")

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSymbolError(f"unknown symbol {name!r}") from None

    def name(self, sym: int) -> str:
        return self.names[sym]

    def word(self, text: str | Sequence[str]) -> Word:
        """Parse a whitespace separated word such as ``"c1 r a"``."""
        tokens = text.split() if isinstance(text, str) else text
        return tuple(self.id(t) for t in tokens)

    def format(self, word: Iterable[int]) -> str:
        return " ".join(self.names[s] for s in word)


@dataclass(frozen=True)
class Vpa:
    """An immutable VPA over integer states ``0 .. len(states)-1``.

    ``states`` holds the state names.  Transitions are sets of tuples
    ``(src, sym, dst)`` and, for returns, ``(src, sym, stack, dst)``.
    Construction does not validate; see :func:`validate`.
    """

    states: tuple[str, ...]
    alphabet: Alphabet
    internal: frozenset = field(default_factory=frozenset)
    call: frozenset = field(default_factory=frozenset)
    ret: frozenset = field(default_factory=frozenset)
    initial: frozenset = field(default_factory=frozenset)
    final: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        for name in ("internal", "call", "ret", "initial", "final"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

    @classmethod
    def from_names(
        cls,
        states: Sequence[str],
        alphabet: Alphabet,
        internal: Iterable[tuple[str, str, str]] = (),
        call: Iterable[tuple[str, str, str]] = (),
        ret: Iterable[tuple[str, str, str, str]] = (),
        initial: Iterable[str] = (),
        final: Iterable[str] = (),
    ) -> "Vpa":
        sid = {name: i for i, name in enumerate(states)}
        sym = alphabet.id
        return cls(
            states=tuple(states),
            alphabet=alphabet,
            internal={(sid[p], sym(a), sid[q]) for p, a, q in internal},
            call={(sid[p], sym(c), sid[q]) for p, c, q in call},
            ret={(sid[p], sym(r), sid[s], sid[q]) for p, r, s, q in ret},
            initial={sid[q] for q in initial},
            final={sid[q] for q in final},
        )

    @property
    def n_states(self) -> int:
        return len(self.states)

    def state_id(self, name: str) -> int:
        return self.states.index(name)

    def transition_counts(self) -> tuple[int, int, int]:
        return len(self.internal), len(self.call), len(self.ret)

    # successor indexes, built lazily -------------------------------------

    @cached_property
    def internal_succ(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return _index3(self.internal)

    @cached_property
    def call_succ(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return _index3(self.call)

    @cached_property
    def return_succ(self) -> dict[tuple[int, int, int], tuple[int, ...]]:
        out: dict[tuple[int, int, int], list[int]] = {}
        for p, r, s, q in self.ret:
            out.setdefault((p, r, s), []).append(q)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def outgoing(self) -> tuple[tuple[list, list, list], ...]:
        """Per state: sorted (internal, call, return) transitions leaving it."""
        table = [([], [], []) for _ in self.states]
        for t in sorted(self.internal):
            table[t[0]][0].append(t)
        for t in sorted(self.call):
            table[t[0]][1].append(t)
        for t in sorted(self.ret):
            table[t[0]][2].append(t)
        return tuple(table)

    def successors(self, q: int, sym: int, stack_top: int | None = None) -> tuple[int, ...]:
        kind = self.alphabet.kind(sym)
        if kind == INTERNAL:
            return self.internal_succ.get((q, sym), ())
        if kind == CALL:
            return self.call_succ.get((q, sym), ())
        return self.return_succ.get((q, sym, stack_top), ())

    def is_deterministic(self) -> bool:
        return (
            len(self.initial) == 1
            and all(len(v) == 1 for v in self.internal_succ.values())
            and all(len(v) == 1 for v in self.call_succ.values())
            and all(len(v) == 1 for v in self.return_succ.values())
        )

    def __repr__(self) -> str:
        ni, nc, nr = self.transition_counts()
        return f"Vpa(states={self.n_states}, internal={ni}, call={nc}, return={nr})"


def _index3(transitions) -> dict[tuple[int, int], tuple[int, ...]]:
    out: dict[tuple[int, int], list[int]] = {}
    for p, a, q in transitions:
        out.setdefault((p, a), []).append(q)
    return {k: tuple(sorted(v)) for k, v in out.items()}


def validate(vpa: Vpa) -> list[str]:
    """Return every invariant violation of ``vpa``; an empty list means ok."""
    problems: list[str] = []
    alpha = vpa.alphabet
    names = alpha.names
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        problems.append(f"alphabet symbol names not unique: {dup}")
    if len(set(vpa.states)) != len(vpa.states):
        problems.append("state names not unique")
    n = vpa.n_states
    if not vpa.initial:
        problems.append("initial empty")

    def bad_state(q) -> bool:
        return not (isinstance(q, int) and 0 <= q < n)

    for q in sorted(vpa.initial | vpa.final, key=repr):
        if bad_state(q):
            problems.append(f"initial/final references undeclared state {q!r}")
    checks = (
        ("internal", vpa.internal, alpha.internal_ids),
        ("call", vpa.call, alpha.call_ids),
    )
    for kind, trans, ids in checks:
        for t in sorted(trans, key=repr):
            p, a, q = t
            if bad_state(p) or bad_state(q):
                problems.append(f"{kind} transition {t} references undeclared state")
            if a not in ids:
                problems.append(f"{kind} transition {t} uses a non-{kind} symbol")
    for t in sorted(vpa.ret, key=repr):
        p, r, s, q = t
        if bad_state(p) or bad_state(q):
            problems.append(f"return transition {t} references undeclared state")
        if s == BOTTOM:
            problems.append(f"return transition {t} pops the bottom marker")
        elif bad_state(s):
            problems.append(f"return transition {t} stack symbol {s!r} is not a declared state")
        if r not in alpha.return_ids:
            problems.append(f"return transition {t} uses a non-return symbol")
    return problems


def classify_word(alphabet: Alphabet, word: Sequence[int]) -> str:
    depth = 0
    for sym in word:
        kind = alphabet.kind(sym)
        if kind == CALL:
            depth += 1
        elif kind == RETURN:
            if depth == 0:
                return UNMATCHED_RETURN
            depth -= 1
    return WELL_MATCHED if depth == 0 else MATCHED_RETURN


# -- simulation -------------------------------------------------------------

def initial_configs(vpa: Vpa) -> frozenset[Config]:
    return frozenset((q, ()) for q in vpa.initial)


def step(vpa: Vpa, configs: Iterable[Config], sym: int) -> frozenset[Config]:
    """One synchronous step of the configuration-set simulation."""
    kind = vpa.alphabet.kind(sym)
    out = set()
    if kind == INTERNAL:
        succ = vpa.internal_succ
        for q, stack in configs:
            for d in succ.get((q, sym), ()):
                out.add((d, stack))
    elif kind == CALL:
        succ = vpa.call_succ
        for q, stack in configs:
            for d in succ.get((q, sym), ()):
                out.add((d, stack + (q,)))
    else:
        succ = vpa.return_succ
        for q, stack in configs:
            if not stack:
                continue  # stuck: no return on the empty stack
            for d in succ.get((q, sym, stack[-1]), ()):
                out.add((d, stack[:-1]))
    return frozenset(out)


def run(vpa: Vpa, word: Sequence[int]) -> frozenset[Config]:
    configs = initial_configs(vpa)
    for sym in word:
        if not configs:
            break
        configs = step(vpa, configs, sym)
    return configs


def accepts(vpa: Vpa, word: Sequence[int] | str) -> bool:
    if isinstance(word, str):
        word = vpa.alphabet.word(word)
    else:
        for sym in word:
            vpa.alphabet.kind(sym)
    final = vpa.final
    return any(q in final for q, _ in run(vpa, word))


def enumerate_language(vpa: Vpa, max_len: int) -> set[Word]:
    """All accepted words of length at most ``max_len``.

    Depth-first over symbol sequences, pruning prefixes whose configuration
    set is empty.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    symbols = range(vpa.alphabet.size)
    final = vpa.final
    found: set[Word] = set()

    def visit(prefix: Word, configs: frozenset[Config]) -> None:
        if any(q in final for q, _ in configs):
            found.add(prefix)
        if len(prefix) == max_len:
            return
        for sym in symbols:
            nxt = step(vpa, configs, sym)
            if nxt:
                visit(prefix + (sym,), nxt)

    start = initial_configs(vpa)
    if start:
        visit((), start)
    return found


def reachable_configs(vpa: Vpa, max_height: int) -> set[Config]:
    """Reachable configurations whose stack never exceeds ``max_height``.

    Exhaustive forward search; only runs that keep the stack within the bound
    are explored, so this under-approximates for deep stacks.
    """
    seen = set(initial_configs(vpa))
    todo = list(seen)
    syms = range(vpa.alphabet.size)
    while todo:
        conf = todo.pop()
        for sym in syms:
            for nxt in step(vpa, (conf,), sym):
                if len(nxt[1]) <= max_height and nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
    return seen


def iter_words(alphabet: Alphabet, max_len: int) -> Iterator[Word]:
    """Every word over ``alphabet`` up to ``max_len``, shortest first."""
    syms = range(alphabet.size)
    return chain.from_iterable(product(syms, repeat=k) for k in range(max_len + 1))
