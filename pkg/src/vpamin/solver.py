"""Greedy PMax-SAT solving with an equality theory, plus an exhaustive baseline.

The greedy solver is plain DPLL: it decides the lowest unset variable with its
preferred value (true for variables carrying a soft unit clause, false
otherwise), propagates, and on conflict backtracks chronologically, flipping
the most recent decision.  Because every earlier choice is retried only after
the whole subtree below it failed, the result is the first model in the
preference order over variable indices, i.e. the lexicographically greatest
one when all variables are soft.

With the theory switched on, transitivity is not encoded as clauses.  An
:class:`EqualityContext` tracks which states are equal and hands back every
pair implied by a new equality, and those pairs are set true with reason
"theory".
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from . import kernels
from ._accel import resolve
from .encode import ClauseDb, PairVar, _layout
from .partition import StatePartition


class Unsatisfiable(Exception):
    """Raised when the hard clauses conflict at decision level 0."""


class InstanceTooLarge(ValueError):
    pass


# -- equality theory --------------------------------------------------------------

class EqualityContext:
    """Union-find over states whose merges can be undone frame by frame.

    Two roots are never linked directly: a fresh temporary node becomes the
    parent of both, and undoing the merge just deletes that node.  No path
    compression is done, so deleting a node restores the previous forest
    exactly.
    """

    def __init__(self, n_states: int):
        self.n_states = n_states
        self._parent: dict[int, int] = {}
        self._members: dict[int, list[int]] = {}
        self._joined: dict[int, tuple[int, int]] = {}
        self._base: list[int] = []
        self._frames: list[list[int]] = []
        self._next = n_states

    def find(self, x: int) -> int:
        parent = self._parent
        while x in parent:
            x = parent[x]
        return x

    def members(self, x: int) -> list[int]:
        r = self.find(x)
        return self._members.get(r, [r])

    def assert_equal(self, p: int, q: int) -> set[PairVar]:
        """Merge the classes of ``p`` and ``q``.

        Returns the pairs newly implied by transitivity, i.e. every cross pair
        of the two old classes except ``{p, q}`` itself.
        """
        ra, rb = self.find(p), self.find(q)
        if ra == rb:
            return set()
        a, b = self.members(ra), self.members(rb)
        t = self._next
        self._next += 1
        self._parent[ra] = t
        self._parent[rb] = t
        self._members[t] = a + b
        self._joined[t] = (ra, rb)
        (self._frames[-1] if self._frames else self._base).append(t)
        implied = {PairVar.of(x, y) for x in a for y in b}
        implied.discard(PairVar.of(p, q))
        return implied

    def push_frame(self) -> None:
        self._frames.append([])

    def pop_frame(self) -> None:
        if not self._frames:
            raise IndexError("pop_frame on an empty frame stack")
        for t in reversed(self._frames.pop()):
            for child in self._joined.pop(t):
                del self._parent[child]
            del self._members[t]
            self._next -= 1

    @property
    def depth(self) -> int:
        return len(self._frames)

    def classes(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for q in range(self.n_states):
            out.setdefault(self.find(q), []).append(q)
        return list(out.values())


# -- greedy solver ----------------------------------------------------------------

@dataclass(frozen=True)
class Assignment:
    """A total assignment with the search statistics that produced it."""

    values: np.ndarray  # int8, 0/1 per variable
    decisions: int = 0
    backtracks: int = 0
    max_backtrack_depth: int = 0
    trail: tuple[tuple[int, int, str], ...] | None = field(default=None, repr=False)

    def __getitem__(self, v: int) -> bool:
        return bool(self.values[v])

    def true_vars(self) -> list[int]:
        return np.flatnonzero(self.values).tolist()

    def same_values(self, other: "Assignment") -> bool:
        return np.array_equal(self.values, other.values)


TraceSink = Callable[[str], None]


class GreedySolver:
    """Interactive greedy solver over variables ``0 .. n_vars-1``.

    Literals are signed 1-based indices.  ``pairs`` maps each variable to its
    state pair and is required when ``theory`` is on.  ``trace`` receives one
    line per event: ``<seq> <D|P|T|B> <var> <value> <level>``.
    """

    def __init__(self, n_vars: int, pairs: Sequence[tuple[int, int]] | None = None,
                 theory: bool = False, n_states: int | None = None,
                 trace: TraceSink | None = None):
        if theory and pairs is None:
            raise ValueError("theory propagation needs the pair of every variable")
        self.n_vars = n_vars
        self.val = [-1] * n_vars
        self.pref = [0] * n_vars
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.trail: list[int] = []
        self.reason: list[str] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.theory = theory
        self.unsat = False
        self._trace = trace
        self._seq = 0
        self.decisions = 0
        self.backtracks = 0
        self.max_depth = 0
        if theory:
            self.pairs = [tuple(map(int, p)) for p in pairs]
            self.var_of = {PairVar(*p): i for i, p in enumerate(self.pairs)}
            if n_states is None:
                n_states = 1 + max((p[1] for p in self.pairs), default=-1)
            self.eq = EqualityContext(n_states)

    @property
    def level(self) -> int:
        return len(self.trail_lim)

    def _log(self, kind: str, v: int, x: int) -> None:
        if self._trace is not None:
            self._trace(f"{self._seq} {kind} {v + 1} {x} {self.level}")
        self._seq += 1

    def _assign(self, v: int, x: int, kind: str) -> None:
        self.val[v] = x
        self.trail.append(v)
        self.reason.append(kind)
        self._log(kind, v, x)

    def _lit_value(self, lit: int) -> int:
        x = self.val[abs(lit) - 1]
        if x == -1:
            return -1
        return x if lit > 0 else 1 - x

    def add_clause(self, lits: Sequence[int], soft: bool = False) -> bool:
        """Add a clause and propagate at once; False means unsatisfiable."""
        if self.level:
            raise RuntimeError("clauses can only be added before solving")
        lits = list(dict.fromkeys(int(l) for l in lits))
        if soft:
            if len(lits) != 1 or lits[0] < 0:
                raise ValueError("soft clauses must be positive units")
            self.pref[lits[0] - 1] = 1
            return not self.unsat
        if self.unsat:
            return False
        if any(-l in lits for l in lits):
            return True
        if not lits:
            self.unsat = True
            return False
        # move non-false literals to the front so they get watched
        lits.sort(key=lambda l: self._lit_value(l) == 0)
        if len(lits) == 1 or self._lit_value(lits[1]) == 0:
            first = self._lit_value(lits[0])
            if first == 0:
                self.unsat = True
                return False
            if first == -1:
                self._assign(abs(lits[0]) - 1, int(lits[0] > 0), "P")
        if len(lits) > 1:
            c = len(self.clauses)
            self.clauses.append(lits)
            self.watches.setdefault(-lits[0], []).append(c)
            self.watches.setdefault(-lits[1], []).append(c)
        if self._propagate():
            self.unsat = True
        return not self.unsat

    def _propagate(self) -> bool:
        """Unit and theory propagation to fixpoint; True on conflict."""
        while self.qhead < len(self.trail):
            v = self.trail[self.qhead]
            self.qhead += 1
            x = self.val[v]
            false_lit = -(v + 1) if x == 1 else v + 1
            # watches are keyed by the negation of the watched literal
            key = -false_lit
            watching = self.watches.get(key, [])
            keep: list[int] = []
            i = 0
            conflict = False
            while i < len(watching):
                c = watching[i]
                i += 1
                lits = self.clauses[c]
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], lits[0]
                if self._lit_value(lits[0]) == 1:
                    keep.append(c)
                    continue
                for k in range(2, len(lits)):
                    if self._lit_value(lits[k]) != 0:
                        lits[1], lits[k] = lits[k], lits[1]
                        self.watches.setdefault(-lits[1], []).append(c)
                        break
                else:
                    keep.append(c)
                    if self._lit_value(lits[0]) == 0:
                        conflict = True
                        break
                    self._assign(abs(lits[0]) - 1, int(lits[0] > 0), "P")
            keep.extend(watching[i:])
            self.watches[key] = keep
            if conflict:
                return True
            if self.theory and x == 1:
                lo, hi = self.pairs[v]
                for pv in sorted(self.eq.assert_equal(lo, hi)):
                    w = self.var_of.get(pv)
                    if w is None or self.val[w] == 0:
                        return True
                    if self.val[w] == -1:
                        self._assign(w, 1, "T")
        return False

    def _new_level(self) -> None:
        self.trail_lim.append(len(self.trail))
        if self.theory:
            self.eq.push_frame()

    def _pop_level(self) -> None:
        start = self.trail_lim.pop()
        for v in self.trail[start:]:
            self.val[v] = -1
        del self.trail[start:]
        del self.reason[start:]
        self.qhead = len(self.trail)
        if self.theory:
            self.eq.pop_frame()

    def solve(self) -> Assignment:
        if self.unsat:
            raise Unsatisfiable("conflict at decision level 0")
        cursor = 0
        nv = self.n_vars
        while True:
            while cursor < nv and self.val[cursor] != -1:
                cursor += 1
            if cursor == nv:
                break
            self._new_level()
            self.decisions += 1
            self._assign(cursor, self.pref[cursor], "D")
            depth = 0
            while self._propagate():
                if self.level == 0:
                    self.unsat = True
                    raise Unsatisfiable("conflict at decision level 0")
                d = self.trail[self.trail_lim[-1]]
                self._pop_level()
                depth += 1
                self.backtracks += 1
                self._assign(d, 1 - self.pref[d], "B")
                cursor = d
            self.max_depth = max(self.max_depth, depth)
        return Assignment(
            values=np.array(self.val, dtype=np.int8),
            decisions=self.decisions,
            backtracks=self.backtracks,
            max_backtrack_depth=self.max_depth,
            trail=tuple(zip(self.trail, (self.val[v] for v in self.trail), self.reason)),
        )


def _python_solve(db: ClauseDb, trace: TraceSink | None) -> Assignment:
    s = GreedySolver(db.n_vars, db.pairs.tolist(), theory=db.theory,
                     n_states=db.n_states, trace=trace)
    for lits in db.hard_clauses():
        if not s.add_clause(lits):
            raise Unsatisfiable("conflict while adding hard clauses")
    for v in np.flatnonzero(db.soft):
        s.add_clause((int(v) + 1,), soft=True)
    return s.solve()


def solve_instance(db: ClauseDb, backend: str | None = None,
                   trace: TraceSink | None = None) -> Assignment:
    """Greedy solve of ``db``.  A trace forces the Python path."""
    if trace is not None or resolve(backend) == "python":
        return _python_solve(db, trace)
    n = db.n_states
    lay = _layout(n, StatePartition(tuple(db.block.tolist())))
    val, status, dec, bt, depth = kernels.solve_numba(
        db.n_vars, db.ptr, db.lits, db.soft.astype(np.int8),
        db.pairs[:, 0].copy(), db.pairs[:, 1].copy(), n,
        lay.block, lay.pos, lay.start, db.theory,
    )
    if status:
        raise Unsatisfiable("conflict at decision level 0")
    return Assignment(val.astype(np.int8), int(dec), int(bt), int(depth))


# -- post-hoc checks ----------------------------------------------------------------

def violated_clause(db: ClauseDb, values) -> tuple[int, ...] | None:
    """First hard clause falsified by ``values`` (theory-transitivity included)."""
    vals = np.asarray(values)
    for lits in db.hard_clauses():
        if not any((vals[abs(l) - 1] == 1) == (l > 0) for l in lits):
            return lits
    if db.theory:
        bad = _transitivity_violation(db, vals)
        if bad is not None:
            return bad
    return None


def _closure_vars(db: ClauseDb, true_vars) -> set[int] | None:
    """Variables implied true by transitive closure; None if it leaves the seed."""
    ctx = EqualityContext(db.n_states)
    for v in true_vars:
        ctx.assert_equal(*db.pairs[v].tolist())
    out = set()
    for cls in ctx.classes():
        for i, a in enumerate(cls):
            for b in cls[i + 1:]:
                w = db.var(a, b)
                if w is None:
                    return None
                out.add(w)
    return out


def _transitivity_violation(db: ClauseDb, vals) -> tuple[int, ...] | None:
    true = np.flatnonzero(vals == 1).tolist()
    closure = _closure_vars(db, true)
    if closure is None:
        return (0,)
    extra = sorted(closure - set(true))
    if extra:
        return (extra[0] + 1,)
    return None


def satisfies_hard(db: ClauseDb, values) -> bool:
    return violated_clause(db, values) is None


def extendable_var(db: ClauseDb, values) -> int | None:
    """A false soft variable whose assertion (with closure) breaks no hard clause.

    Closures that reach a variable without a soft clause are skipped: the
    solver tries those false first, so it makes no maximality promise there.
    """
    vals = np.asarray(values, dtype=np.int8)
    true = set(np.flatnonzero(vals == 1).tolist())
    for v in np.flatnonzero((vals == 0) & db.soft).tolist():
        closure = _closure_vars(db, true | {v})
        if closure is None:
            continue
        added = closure - true
        if not all(db.soft[w] for w in added):
            continue
        trial = vals.copy()
        trial[list(added)] = 1
        if violated_clause(db, trial) is None:
            return v
    return None


def is_locally_maximal(db: ClauseDb, values) -> bool:
    return extendable_var(db, values) is None


# -- exhaustive baseline ------------------------------------------------------------

def _baseline_setup(db: ClauseDb, max_vars: int):
    if db.n_vars > max_vars:
        raise InstanceTooLarge(f"{db.n_vars} variables exceed the exhaustive limit of {max_vars}")
    nv = db.n_vars
    checks: list[list[tuple[int, ...]]] = [[] for _ in range(nv)]
    for lits in db.hard_clauses():
        checks[max(abs(l) for l in lits) - 1].append(lits)
    # transitivity is always checked here, theory or not
    triples: list[list[tuple[int, int, int]]] = [[] for _ in range(nv)]
    by_block: dict[int, list[int]] = {}
    for q, b in enumerate(db.block.tolist()):
        by_block.setdefault(b, []).append(q)
    for mem in by_block.values():
        for i, a in enumerate(mem):
            for j in range(i + 1, len(mem)):
                for c in mem[j + 1:]:
                    t = (db.var(a, mem[j]), db.var(mem[j], c), db.var(a, c))
                    triples[max(t)].append(t)
    soft = db.soft.tolist()
    suffix = [0] * (nv + 1)
    for v in range(nv - 1, -1, -1):
        suffix[v] = suffix[v + 1] + soft[v]
    return checks, triples, soft, suffix


def _search(db: ClauseDb, max_vars: int, mode: str) -> Iterator[tuple[np.ndarray, int]]:
    """Depth-first search, true before false.

    ``mode`` is ``"all"`` (every model), ``"best"`` (strictly improving models)
    or ``"ties"`` (models scoring at least the best seen so far).
    """
    checks, triples, soft, suffix = _baseline_setup(db, max_vars)
    nv = db.n_vars
    val = [0] * nv
    best = [-1]

    def ok(v: int) -> bool:
        for lits in checks[v]:
            if not any((val[abs(l) - 1] == 1) == (l > 0) for l in lits):
                return False
        for ab, bc, ac in triples[v]:
            if val[ab] + val[bc] + val[ac] == 2:
                return False
        return True

    def rec(v: int, score: int) -> Iterator[tuple[np.ndarray, int]]:
        if mode == "best" and score + suffix[v] <= best[0]:
            return
        if mode == "ties" and score + suffix[v] < best[0]:
            return
        if v == nv:
            if mode != "all":
                best[0] = max(best[0], score)
            yield np.array(val, dtype=np.int8), score
            return
        for x in (1, 0):
            val[v] = x
            if ok(v):
                yield from rec(v + 1, score + (soft[v] and x))
        val[v] = 0

    yield from rec(0, 0)


def solve_baseline_exhaustive(db: ClauseDb, max_vars: int = 24) -> Assignment:
    """Global PMax-SAT optimum; ties go to the model setting lower indices true."""
    last = None
    for vals, _ in _search(db, max_vars, "best"):
        last = vals
    if last is None:
        raise Unsatisfiable("hard clauses have no model")
    return Assignment(last)


def all_models(db: ClauseDb, max_vars: int = 24) -> Iterator[np.ndarray]:
    """Every hard-satisfying assignment, transitivity included."""
    for vals, _ in _search(db, max_vars, "all"):
        yield vals


def optimal_models(db: ClauseDb, max_vars: int = 24) -> list[np.ndarray]:
    """All assignments reaching the optimal soft count."""
    found = list(_search(db, max_vars, "ties"))
    if not found:
        return []
    top = max(s for _, s in found)
    return [v for v, s in found if s == top]


def timed_solve(db: ClauseDb, backend: str | None = None,
                trace: TraceSink | None = None) -> tuple[Assignment, float]:
    t0 = time.perf_counter()
    a = solve_instance(db, backend, trace)
    return a, time.perf_counter() - t0
