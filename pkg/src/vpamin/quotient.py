"""Partitions from assignments, quotient automata, and the minimize pipeline."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, fields

from .encode import ClauseDb, build_instance
from .partition import StatePartition
from .reachability import compute_tops, initial_partition, make_live_with_sink, restrict, trim
from .solver import Assignment, EqualityContext, solve_instance
from .vpa import Vpa


class IntegrityError(ValueError):
    """The true variables of an assignment do not form an equivalence."""


def assignment_to_partition(db: ClauseDb, a: Assignment | object) -> StatePartition:
    """Blocks are the classes of ``{(p, q) | X{p,q} true}`` plus identity."""
    values = a.values if isinstance(a, Assignment) else a
    ctx = EqualityContext(db.n_states)
    true = set()
    for v, x in enumerate(list(values)):
        if x == 1:
            true.add(v)
            ctx.assert_equal(*db.pairs[v].tolist())
    classes = ctx.classes()
    for cls in classes:
        for i, p in enumerate(cls):
            for q in cls[i + 1:]:
                if db.var(p, q) not in true:
                    raise IntegrityError(f"relation not transitive: {p} ~ {q} is implied but false")
    return StatePartition.from_blocks(db.n_states, classes)


def build_quotient(vpa: Vpa, part: StatePartition) -> Vpa:
    """Quotient automaton; return transitions lift their stack symbol too."""
    if part.n_states != vpa.n_states:
        raise ValueError("partition does not cover the automaton's states")
    b = part.block_of
    names = tuple("|".join(vpa.states[q] for q in blk) for blk in part.blocks)
    return Vpa(
        states=names,
        alphabet=vpa.alphabet,
        internal={(b[p], a, b[q]) for p, a, q in vpa.internal},
        call={(b[p], c, b[q]) for p, c, q in vpa.call},
        ret={(b[p], r, b[s], b[q]) for p, r, s, q in vpa.ret},
        initial={b[q] for q in vpa.initial},
        final={b[q] for q in vpa.final},
    )


@dataclass
class MinimizeReport:
    """One CSV row describing a minimize run."""

    name: str
    states_in: int
    states_out: int
    ti_in: int
    ti_out: int
    tc_in: int
    tc_out: int
    tr_in: int
    tr_out: int
    vars: int
    clauses: int
    decisions: int
    backtracks: int
    time_ms: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def row(self) -> dict:
        out = asdict(self)
        out["time_ms"] = f"{self.time_ms:.3f}"
        return out


@dataclass
class MinimizeResult:
    vpa: Vpa
    report: MinimizeReport
    partition: StatePartition  # over the states of ``live``
    live: Vpa  # trimmed, return-live automaton that was encoded
    sink: int | None
    db: ClauseDb
    assignment: Assignment
    trimmed_states: int
    max_backtrack_depth: int

    def __iter__(self):
        # allows ``out, report = minimize(...)``
        return iter((self.vpa, self.report))


def strip_sink(quotient: Vpa, part: StatePartition, sink: int | None) -> Vpa:
    """Drop the completion sink when it stayed a singleton block."""
    if sink is None:
        return quotient
    blk = part.block_of[sink]
    if len(part.blocks[blk]) != 1 or blk in quotient.final or blk in quotient.initial:
        return quotient
    return restrict(quotient, [q for q in range(quotient.n_states) if q != blk])


def minimize(vpa: Vpa, *, use_theory: bool = True, backend: str | None = None,
             name: str = "", trace=None) -> MinimizeResult:
    """trim, make return-live, seed, encode, solve greedily, quotient, clean up."""
    t0 = time.perf_counter()
    trimmed = trim(vpa)
    live, sink = make_live_with_sink(trimmed, returns_only=True)
    tops = compute_tops(live, backend)
    seed = initial_partition(live)
    db = build_instance(live, tops, seed, use_theory,
                        soft_exclude=() if sink is None else (sink,), backend=backend)
    a = solve_instance(db, backend, trace)
    part = assignment_to_partition(db, a)
    out = trim(strip_sink(build_quotient(live, part), part, sink))
    elapsed = (time.perf_counter() - t0) * 1000.0
    ti_in, tc_in, tr_in = vpa.transition_counts()
    ti_out, tc_out, tr_out = out.transition_counts()
    report = MinimizeReport(
        name=name,
        states_in=vpa.n_states,
        states_out=out.n_states,
        ti_in=ti_in, ti_out=ti_out,
        tc_in=tc_in, tc_out=tc_out,
        tr_in=tr_in, tr_out=tr_out,
        vars=db.n_vars,
        clauses=db.n_clauses,
        decisions=a.decisions,
        backtracks=a.backtracks,
        time_ms=elapsed,
    )
    return MinimizeResult(out, report, part, live, sink, db, a, trimmed.n_states,
                          a.max_backtrack_depth)
