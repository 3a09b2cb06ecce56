import numpy as np
import pytest
from hypothesis import given, settings

from vpamin import RandomSpec, StatePartition, bounded_equiv, fig1x, fig2x, generate, sevpa
from vpamin.encode import build_instance
from vpamin.reachability import (
    TopsMap, compute_tops, initial_partition, is_live, make_live, make_live_with_sink, trim,
)
from vpamin.solver import all_models
from vpamin.vpa import BOTTOM, Alphabet, Vpa, reachable_configs

from conftest import small_vpas

B = BOTTOM


def names(vpa, tops):
    return {vpa.states[q]: {"_" if s == B else vpa.states[s] for s in tops[q]} for q in range(vpa.n_states)}


def test_fig1x_tops():
    v = fig1x()
    assert names(v, compute_tops(v)) == {
        "q0": {"_"}, "q1": {"q0"}, "q2": {"_"}, "q3": {"q0"}, "q4": {"_"}, "qf": {"_", "q0"},
    }


def _tops_from_configs(vpa, height):
    out = [set() for _ in vpa.states]
    for q, stack in reachable_configs(vpa, height):
        out[q].add(stack[-1] if stack else B)
    return out


@pytest.mark.parametrize("vpa", [fig1x(), fig2x(), sevpa(4)], ids=["fig1x", "fig2x", "sevpa4"])
def test_tops_against_configuration_search(vpa):
    assert list(compute_tops(vpa)) == _tops_from_configs(vpa, 3)


def _rules_hold(vpa, f):
    for q in vpa.initial:
        if B not in f[q]:
            return False
    for p, _, q in vpa.internal:
        if not f[p] <= f[q]:
            return False
    for p, _, q in vpa.call:
        if f[p] and p not in f[q]:
            return False
    for p, _, s, q in vpa.ret:
        if s in f[p] and not f[s] <= f[q]:
            return False
    return True


@settings(max_examples=30)
@given(small_vpas(max_states=6))
def test_tops_is_least_fixpoint(vpa):
    f = [set(x) for x in compute_tops(vpa)]
    assert _rules_hold(vpa, f)
    for q in range(vpa.n_states):
        for s in sorted(f[q]):
            smaller = [set(x) for x in f]
            smaller[q].discard(s)
            assert not _rules_hold(vpa, smaller)


def test_tops_basics():
    alpha = Alphabet(internal=("a",))
    v = Vpa(("q0", "q1", "q2"), alpha, internal={(0, 0, 1)}, initial={0}, final={1})
    t = compute_tops(v)
    assert t[0] == {B} and t[1] == {B} and t[2] == frozenset()
    assert not t.reachable(2)
    assert isinstance(t, TopsMap) and t.matrix.shape == (3, 4)


def test_trim_drops_isolated_state():
    v = fig1x()
    extra = Vpa(v.states + ("qz",), v.alphabet, v.internal, v.call, v.ret, v.initial, v.final)
    assert trim(extra) == v
    assert trim(v) == v


def test_trim_no_final_gives_empty_language():
    alpha = Alphabet(internal=("a",))
    v = Vpa(("q0", "q1"), alpha, internal={(0, 0, 1), (1, 0, 0)}, initial={0})
    t = trim(v)
    assert t.n_states == 1 and not t.final and not t.internal and t.initial == {0}


def test_trim_keeps_states_reached_through_returns():
    # q2 is only reached by popping q0 from q1
    alpha = Alphabet(call=("c",), ret=("r",))
    v = Vpa(("q0", "q1", "q2"), alpha, call={(0, 0, 1)}, ret={(1, 1, 0, 2)}, initial={0}, final={2})
    assert trim(v) == v


@settings(max_examples=30)
@given(small_vpas(max_states=6))
def test_trim_idempotent_and_language_preserving(vpa):
    t = trim(vpa)
    assert trim(t) == t
    assert bounded_equiv(vpa, t, 6)[0]


def test_make_live_fig1x_full():
    v = fig1x()
    live, sink = make_live_with_sink(v)
    assert sink == 6 and live.states[sink] == "sink" and sink not in live.final
    assert is_live(live)
    added = {(live.states[p], live.alphabet.name(r), live.states[s]) for p, r, s, q in live.ret - v.ret}
    # q1 and q3 gain no new stack symbols; qf pops q0 into the sink
    assert {x for x in added if x[0] in ("q1", "q3")} == set()
    assert ("qf", "r", "q0") in added
    for q in ("q0", "q2", "q4", "qf"):
        qi = live.state_id(q)
        assert all((qi, c) in live.call_succ for c in live.alphabet.call_ids)
    assert all((sink, a, sink) in live.internal for a in live.alphabet.internal_ids)
    assert bounded_equiv(v, live, 8) == (True, None)


def test_make_live_unchanged_when_live():
    alpha = Alphabet(internal=("a",))
    v = Vpa(("q0",), alpha, internal={(0, 0, 0)}, initial={0}, final={0})
    assert make_live(v) is v


def test_make_live_drops_unreachable_returns():
    alpha = Alphabet(call=("c",), ret=("r",))
    # q1 has a return on stack q1 although only q0 can be on top there
    v = Vpa(("q0", "q1", "q2"), alpha, call={(0, 0, 1)}, ret={(1, 1, 0, 2), (1, 1, 1, 2)},
            initial={0}, final={2})
    live = make_live(v, returns_only=True)
    assert (1, 1, 1, 2) not in live.ret and (1, 1, 0, 2) in live.ret


@settings(max_examples=30)
@given(small_vpas(max_states=6))
def test_make_live_predicate_and_idempotence(vpa):
    t = trim(vpa)
    for ro in (False, True):
        live = make_live(t, returns_only=ro)
        assert is_live(live, returns_only=ro)
        assert make_live(live, returns_only=ro) == live
        assert len(live.states) <= len(t.states) + 1
        assert bounded_equiv(t, live, 5)[0]
        tops = compute_tops(live)
        present = {(p, r, s) for p, r, s, _ in live.ret}
        for q in range(live.n_states):
            for r in live.alphabet.return_ids:
                for s in range(live.n_states):
                    assert ((q, r, s) in present) == (s in tops[q])


def test_initial_partition_fig1x():
    live = make_live(fig1x(), returns_only=True)
    part = initial_partition(live)
    sid = live.state_id
    assert part.related(sid("q1"), sid("q3"))
    assert part.related(sid("q1"), sid("q2"))
    assert not part.related(sid("qf"), sid("q0"))
    assert [[live.states[q] for q in b] for b in part.blocks] == [
        ["q0"], ["q1", "q2", "q3"], ["q4"], ["qf"], ["sink"],
    ]


def test_initial_partition_all_final_no_transitions():
    alpha = Alphabet(internal=("a",))
    v = Vpa(("a", "b", "c"), alpha, initial={0}, final={0, 1, 2})
    assert initial_partition(v) == StatePartition.single(3)


def _hopcroft(n, n_sym, delta, final):
    """Classic Hopcroft refinement for a complete DFA."""
    inv = [[[] for _ in range(n)] for _ in range(n_sym)]
    for q in range(n):
        for a in range(n_sym):
            inv[a][delta[q][a]].append(q)
    f = frozenset(final)
    nf = frozenset(range(n)) - f
    parts = {x for x in (f, nf) if x}
    work = set(parts)
    while work:
        splitter = work.pop()
        for a in range(n_sym):
            pre = {p for q in splitter for p in inv[a][q]}
            for y in list(parts):
                inter, diff = y & pre, y - pre
                if inter and diff:
                    parts.remove(y)
                    parts |= {inter, diff}
                    if y in work:
                        work.remove(y)
                        work |= {inter, diff}
                    else:
                        work.add(min(inter, diff, key=len))
    block = [0] * n
    for i, blk in enumerate(parts):
        for q in blk:
            block[q] = i
    return StatePartition(tuple(block))


def test_initial_partition_matches_hopcroft_on_dfas():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(2, 12))
        k = int(rng.integers(1, 3))
        delta = [[int(rng.integers(n)) for _ in range(k)] for _ in range(n)]
        final = {q for q in range(n) if rng.random() < 0.4}
        alpha = Alphabet(internal=tuple(f"a{i}" for i in range(k)))
        v = Vpa(tuple(f"q{i}" for i in range(n)), alpha,
                internal={(q, a, delta[q][a]) for q in range(n) for a in range(k)},
                initial={0}, final=final)
        assert initial_partition(v) == _hopcroft(n, k, delta, final)


@settings(max_examples=25)
@given(small_vpas(max_states=5, min_states=2))
def test_seed_never_separates_raq_pairs(vpa):
    live, _ = make_live_with_sink(trim(vpa), returns_only=True)
    tops = compute_tops(live)
    seed = initial_partition(live)
    db = build_instance(live, tops, None)
    for model in all_models(db):
        for v in np.flatnonzero(model):
            a, b = db.pairs[v]
            assert seed.related(int(a), int(b))
