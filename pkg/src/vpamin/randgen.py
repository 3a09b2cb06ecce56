"""Random VPA in the Tabakov-Vardi style, extended with stack-symbol density.

Counts are ``k = round(d * n)`` with round-half-up.  Randomness comes from
numpy's PCG64 bit generator seeded with the 64-bit ``RandomSpec.seed``, so a RandomSpec
always yields the same automaton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .vpa import Alphabet, Vpa


def density_count(d: float, n: int) -> int:
    """``round(d * n)`` rounding halves up (tolerant of float noise)."""
    return int(math.floor(d * n + 0.5 + 1e-9))


@dataclass(frozen=True)
class RandomSpec:
    n_states: int
    n_internal: int = 1
    n_call: int = 1
    n_return: int = 1
    accept_density: float = 0.5
    trans_density: float = 1.0
    stack_density: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n_states < 1:
            raise ValueError("n_states must be positive")
        if min(self.n_internal, self.n_call, self.n_return) < 0:
            raise ValueError("symbol counts must be non-negative")
        if not 0.0 <= self.accept_density <= 1.0:
            raise ValueError("accept_density must lie in [0, 1]")
        if not 0.0 <= self.stack_density <= 1.0:
            raise ValueError("stack_density must lie in [0, 1]")
        if self.trans_density < 0:
            raise ValueError("trans_density must be non-negative")
        n = self.n_states
        if density_count(self.trans_density, n) > n * n:
            raise ValueError(
                f"trans_density {self.trans_density} asks for more than {n * n} distinct transitions per symbol"
            )

    @property
    def k_accept(self) -> int:
        return density_count(self.accept_density, self.n_states)

    @property
    def k_trans(self) -> int:
        return density_count(self.trans_density, self.n_states)

    @property
    def k_stack(self) -> int:
        return density_count(self.stack_density, self.n_states)


def random_alphabet(n_internal: int, n_call: int, n_return: int) -> Alphabet:
    return Alphabet(
        internal=tuple(f"a{i}" for i in range(n_internal)),
        call=tuple(f"c{i}" for i in range(n_call)),
        ret=tuple(f"r{i}" for i in range(n_return)),
    )


def generate(spec: RandomSpec) -> Vpa:
    n = spec.n_states
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    alpha = random_alphabet(spec.n_internal, spec.n_call, spec.n_return)
    final = rng.choice(n, size=spec.k_accept, replace=False).tolist()
    k = spec.k_trans

    def pairs() -> list[tuple[int, int]]:
        flat = rng.choice(n * n, size=k, replace=False)
        return [divmod(int(x), n) for x in flat]

    internal = [(p, a, q) for a in alpha.internal_ids for p, q in pairs()]
    call = [(p, c, q) for c in alpha.call_ids for p, q in pairs()]
    ret = []
    for r in alpha.return_ids:
        for p, q in pairs():
            for s in rng.choice(n, size=spec.k_stack, replace=False).tolist():
                ret.append((p, r, s, q))
    return Vpa(
        states=tuple(f"q{i}" for i in range(n)),
        alphabet=alpha,
        internal=internal,
        call=call,
        ret=ret,
        initial={0},
        final=final,
    )


def make_deterministic(vpa: Vpa) -> Vpa:
    """Keep only the smallest target per (source, symbol[, stack]) key."""
    def first(rows, key_len):
        best: dict = {}
        for t in sorted(rows):
            best.setdefault(t[:key_len], t)
        return set(best.values())

    return Vpa(
        states=vpa.states,
        alphabet=vpa.alphabet,
        internal=first(vpa.internal, 2),
        call=first(vpa.call, 2),
        ret=first(vpa.ret, 3),
        initial=set(sorted(vpa.initial)[:1]),
        final=vpa.final,
    )
