import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from vpamin import RandomSpec, generate
from vpamin.vpa import Alphabet, Vpa

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def small_specs(draw, max_states=6, min_states=1):
    n = draw(st.integers(min_states, max_states))
    k = draw(st.integers(1, 2))
    return RandomSpec(
        n_states=n, n_internal=k, n_call=k, n_return=k,
        accept_density=draw(st.sampled_from([0.0, 0.3, 0.5, 1.0])),
        trans_density=min(float(n), draw(st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0]))),
        stack_density=draw(st.sampled_from([0.3, 0.6, 1.0])),
        seed=draw(st.integers(0, 2**32)),
    )


def small_vpas(max_states=6, min_states=1):
    return small_specs(max_states, min_states).map(generate)


def random_vpas(count, seed=0, n=(3, 7), symbols=(1, 2), dt=(1.0, 2.0), ds=(0.3, 0.6)):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        k = int(rng.choice(symbols))
        spec = RandomSpec(
            n_states=int(rng.integers(n[0], n[1])), n_internal=k, n_call=k, n_return=k,
            accept_density=0.5, trans_density=float(rng.choice(dt)),
            stack_density=float(rng.choice(ds)), seed=int(rng.integers(2**63)),
        )
        out.append(generate(spec))
    return out


@pytest.fixture
def abc():
    return Alphabet(internal=("a",), call=("c",), ret=("r",))


def one_state(alpha, final=True):
    return Vpa(("q0",), alpha, initial={0}, final={0} if final else set())


# acceptance results, filled in by test_acceptance and printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
