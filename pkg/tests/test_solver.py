import re

import numpy as np
import pytest
from hypothesis import given, settings

from vpamin import fig1x, minimize
from vpamin.encode import ClauseDb, PairVar, build_instance
from vpamin.quotient import assignment_to_partition
from vpamin.reachability import compute_tops, initial_partition, make_live_with_sink, trim
from vpamin.solver import (
    EqualityContext, GreedySolver, InstanceTooLarge, Unsatisfiable, extendable_var,
    optimal_models, satisfies_hard, solve_baseline_exhaustive, solve_instance,
)

from conftest import random_vpas, small_vpas


def plain_db(n_vars, hard, soft):
    """A ClauseDb over disjoint state pairs, so no transitivity is involved."""
    ptr = np.zeros(len(hard) + 1, dtype=np.int64)
    np.cumsum([len(c) for c in hard], out=ptr[1:])
    lits = np.array([l for c in hard for l in c], dtype=np.int32)
    soft_mask = np.zeros(n_vars, dtype=np.bool_)
    soft_mask[[v - 1 for v in soft]] = True
    return ClauseDb(
        n_states=2 * n_vars,
        block=np.repeat(np.arange(n_vars), 2),
        pairs=np.arange(2 * n_vars).reshape(-1, 2),
        ptr=ptr, lits=lits, family=np.full(len(hard), 2, dtype=np.int8),
        soft=soft_mask, theory=False,
    )


def test_forced_false():
    s = GreedySolver(1)
    assert s.add_clause([-1])
    s.add_clause([1], soft=True)
    assert s.solve().values.tolist() == [0]


def test_propagation_after_decision():
    s = GreedySolver(2)
    s.add_clause([-1, 2])
    s.add_clause([1], soft=True)
    s.add_clause([2], soft=True)
    a = s.solve()
    assert a.values.tolist() == [1, 1]
    assert a.decisions == 1


def test_empty_instance():
    a = GreedySolver(0).solve()
    assert len(a.values) == 0 and a.decisions == 0


def test_level_zero_conflict():
    s = GreedySolver(1)
    s.add_clause([1])
    assert not s.add_clause([-1])
    with pytest.raises(Unsatisfiable):
        s.solve()


def test_backtrack_to_false():
    # x1 true forces x2 and -x2
    s = GreedySolver(2)
    s.add_clause([-1, 2])
    s.add_clause([-1, -2])
    s.add_clause([1], soft=True)
    s.add_clause([2], soft=True)
    a = s.solve()
    assert a.values.tolist() == [0, 1]
    assert (a.backtracks, a.max_backtrack_depth) == (1, 1)


def test_multi_level_backtrack():
    # deciding x1 and x2 true leaves x3 impossible; the x2 level fails both ways,
    # so the search must return to x1
    s = GreedySolver(3)
    for c in ([-1, -2, 3], [-1, -2, -3], [-1, 2, 3], [-1, 2, -3]):
        s.add_clause(c)
    for v in (1, 2, 3):
        s.add_clause([v], soft=True)
    a = s.solve()
    assert a.values.tolist() == [0, 1, 1]
    assert a.max_backtrack_depth == 2


def test_trace_format():
    lines = []
    s = GreedySolver(2, trace=lines.append)
    s.add_clause([-1, 2])
    s.add_clause([-1, -2])
    s.add_clause([1], soft=True)
    s.solve()
    pat = re.compile(r"^\d+ [DPTB] \d+ [01] \d+$")
    assert lines and all(pat.match(l) for l in lines)
    assert [l.split()[1] for l in lines] == ["D", "P", "B", "D"]
    assert [int(l.split()[0]) for l in lines] == list(range(len(lines)))


def test_all_pairs_refuted():
    db = plain_db(3, [[-1], [-2], [-3]], [1, 2, 3])
    for backend in ("python", "numba"):
        a = solve_instance(db, backend)
        assert a.values.tolist() == [0, 0, 0] and a.decisions == 0


# -- equality theory ---------------------------------------------------------------

def test_theory_transitivity():
    ctx = EqualityContext(4)
    assert ctx.assert_equal(1, 2) == set()
    assert ctx.assert_equal(2, 3) == {PairVar(1, 3)}
    assert ctx.assert_equal(1, 2) == set()


def test_theory_frames():
    ctx = EqualityContext(4)
    ctx.assert_equal(1, 2)
    ctx.push_frame()
    ctx.assert_equal(2, 3)
    assert ctx.find(1) == ctx.find(3)
    ctx.pop_frame()
    assert ctx.find(1) != ctx.find(3)
    assert ctx.find(1) == ctx.find(2)
    with pytest.raises(IndexError):
        ctx.pop_frame()


def test_theory_nested_frames():
    ctx = EqualityContext(5)
    ctx.push_frame()
    ctx.assert_equal(0, 1)
    ctx.push_frame()
    ctx.assert_equal(2, 3)
    ctx.assert_equal(1, 2)
    ctx.pop_frame()
    assert ctx.find(0) == ctx.find(1) and ctx.find(2) != ctx.find(3)
    before = sorted(map(sorted, ctx.classes()))
    ctx.push_frame()
    ctx.assert_equal(3, 4)
    ctx.pop_frame()
    assert sorted(map(sorted, ctx.classes())) == before


def _naive_classes(n, merges):
    label = list(range(n))
    for a, b in merges:
        la, lb = label[a], label[b]
        label = [la if x == lb else x for x in label]
    return sorted(sorted(q for q in range(n) if label[q] == l) for l in set(label))


def test_theory_random_against_recompute():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        ctx = EqualityContext(n)
        frames = [[]]
        for _ in range(30):
            op = rng.integers(3)
            if op == 0:
                ctx.push_frame()
                frames.append([])
            elif op == 1 and len(frames) > 1:
                ctx.pop_frame()
                frames.pop()
            else:
                a, b = (int(x) for x in rng.integers(n, size=2))
                before = {q: ctx.find(q) for q in range(n)}
                implied = ctx.assert_equal(a, b)
                if a != b and before[a] != before[b]:
                    ca = [q for q in range(n) if before[q] == before[a]]
                    cb = [q for q in range(n) if before[q] == before[b]]
                    want = {PairVar.of(x, y) for x in ca for y in cb} - {PairVar.of(a, b)}
                    assert implied == want
                else:
                    assert implied == set()
                frames[-1].append((a, b))
            merges = [m for f in frames for m in f]
            assert sorted(map(sorted, ctx.classes())) == _naive_classes(n, merges)
            for q in range(n):
                assert ctx.find(ctx.find(q)) == ctx.find(q)


# -- RAQ instances -----------------------------------------------------------------

def _instance(vpa, theory=True):
    live, sink = make_live_with_sink(trim(vpa), returns_only=True)
    tops = compute_tops(live)
    return live, sink, build_instance(live, tops, initial_partition(live), theory,
                                      soft_exclude=() if sink is None else [sink])


def test_fig1x_greedy_and_optimum():
    live, sink, db = _instance(fig1x())
    sid = live.state_id
    x12, x13, x23 = (db.var(sid(a), sid(b)) for a, b in (("q1", "q2"), ("q1", "q3"), ("q2", "q3")))
    assert (x12, x13, x23) == (0, 1, 2)
    for backend in ("python", "numba"):
        a = solve_instance(db, backend)
        assert (a[x12], a[x13], a[x23]) == (True, False, False)
    opts = optimal_models(db)
    assert sorted(m.tolist() for m in opts) == [[0, 0, 1], [1, 0, 0]]
    best = solve_baseline_exhaustive(db)
    assert best.values.tolist() == [1, 0, 0]
    assert int(best.values[db.soft].sum()) == 1


def test_baseline_examples():
    db = plain_db(2, [[-1, -2]], [1, 2])
    assert solve_baseline_exhaustive(db).values.tolist() == [1, 0]
    db = plain_db(4, [], [1, 2, 3, 4])
    assert solve_baseline_exhaustive(db).values.tolist() == [1, 1, 1, 1]
    with pytest.raises(InstanceTooLarge):
        solve_baseline_exhaustive(plain_db(30, [], []))


@settings(max_examples=40)
@given(small_vpas(max_states=7, min_states=2))
def test_result_is_hard_satisfying_and_locally_maximal(vpa):
    _, _, db = _instance(vpa)
    a = solve_instance(db)
    assert satisfies_hard(db, a.values)
    assert extendable_var(db, a.values) is None


@settings(max_examples=40)
@given(small_vpas(max_states=6, min_states=2))
def test_theory_and_clauses_agree(vpa):
    _, _, on = _instance(vpa, theory=True)
    _, _, off = _instance(vpa, theory=False)
    a, b = solve_instance(on), solve_instance(off)
    assert assignment_to_partition(on, a) == assignment_to_partition(off, b)
    assert a.values.tolist() == b.values.tolist()


def test_greedy_backends_agree_on_random_instances():
    for vpa in random_vpas(60, seed=11, n=(4, 12)):
        _, _, db = _instance(vpa)
        a, b = solve_instance(db, "python"), solve_instance(db, "numba")
        assert a.values.tolist() == b.values.tolist()
        assert (a.decisions, a.backtracks, a.max_backtrack_depth) == (b.decisions, b.backtracks, b.max_backtrack_depth)
