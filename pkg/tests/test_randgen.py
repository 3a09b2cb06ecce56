import numpy as np
import pytest

from vpamin import RandomSpec, generate, serialize
from vpamin.randgen import density_count, make_deterministic


def test_rounding_half_up():
    assert density_count(0.5, 5) == 3
    assert density_count(0.25, 2) == 1
    assert density_count(0.3, 15) == 5  # 4.5 rounds up even with float noise
    assert density_count(0.0, 9) == 0


def test_fig4_regime_counts():
    v = generate(RandomSpec(100, 1, 1, 1, accept_density=0.5, trans_density=1.0, stack_density=0.5, seed=1))
    assert len(v.final) == 50
    skeletons = {}
    for p, r, s, q in v.ret:
        skeletons.setdefault((p, r, q), set()).add(s)
    assert len(skeletons) == 100
    assert all(len(s) == 50 for s in skeletons.values())


def test_zero_transition_density():
    v = generate(RandomSpec(8, 2, 2, 2, trans_density=0.0, seed=3))
    assert not v.internal and not v.call and not v.ret
    assert v.initial == {0}


def test_internal_counts_over_seeds():
    for seed in range(100):
        v = generate(RandomSpec(10, 1, 0, 0, trans_density=2.0, seed=seed))
        assert len(v.internal) == 20


def test_counts_match_formulas():
    rng = np.random.default_rng(0)
    for seed in range(50):
        n = int(rng.integers(1, 20))
        spec = RandomSpec(n, 2, 1, 2, accept_density=float(rng.random()),
                          trans_density=float(rng.uniform(0, min(n, 3))),
                          stack_density=float(rng.random()), seed=seed)
        v = generate(spec)
        assert len(v.final) == spec.k_accept
        assert len(v.internal) == 2 * spec.k_trans
        assert len(v.call) == spec.k_trans
        assert len(v.ret) == 2 * spec.k_trans * spec.k_stack


def test_accepting_frequency():
    hits = np.zeros(20)
    for seed in range(1000):
        v = generate(RandomSpec(20, accept_density=0.3, seed=seed))
        hits[list(v.final)] += 1
    assert np.all(np.abs(hits / 1000 - 0.3) <= 0.05)


def test_reproducible():
    spec = RandomSpec(12, 2, 2, 2, trans_density=1.5, stack_density=0.4, seed=2**63 + 5)
    assert serialize(generate(spec)) == serialize(generate(spec))
    other = RandomSpec(12, 2, 2, 2, trans_density=1.5, stack_density=0.4, seed=6)
    assert serialize(generate(other)) != serialize(generate(spec))


def test_density_too_large():
    with pytest.raises(ValueError):
        RandomSpec(3, trans_density=4.0)
    with pytest.raises(ValueError):
        RandomSpec(3, stack_density=1.5)


def test_make_deterministic():
    v = generate(RandomSpec(10, 2, 2, 2, trans_density=2.0, stack_density=0.6, seed=9))
    d = make_deterministic(v)
    assert d.is_deterministic()
    assert d.internal <= v.internal and d.call <= v.call and d.ret <= v.ret
