"""Compiled kernels against the interpreted path, plus the environment switch."""

import os
import subprocess
import sys

import numpy as np
import pytest

from vpamin import fig1x, fig2x, sevpa
from vpamin.encode import build_instance
from vpamin.oracle import _bounded_equiv_python, bounded_equiv
from vpamin.partition import StatePartition
from vpamin.quotient import build_quotient, minimize
from vpamin.reachability import compute_tops, initial_partition, make_live
from vpamin.solver import solve_instance

from conftest import random_vpas

CORPUS = [fig1x(), fig2x(), sevpa(4)] + random_vpas(40, seed=21, n=(3, 12))


@pytest.mark.parametrize("i", range(len(CORPUS)))
def test_tops_agree(i):
    v = CORPUS[i]
    assert np.array_equal(compute_tops(v, "numba").matrix, compute_tops(v, "python").matrix)


@pytest.mark.parametrize("theory", [True, False])
def test_encode_and_solve_agree(theory):
    for v in CORPUS:
        live = make_live(v, returns_only=True)
        tops = compute_tops(live)
        seed = initial_partition(live)
        a = build_instance(live, tops, seed, theory, backend="numba")
        b = build_instance(live, tops, seed, theory, backend="python")
        assert np.array_equal(a.lits, b.lits)
        assert np.array_equal(a.ptr, b.ptr)
        assert np.array_equal(a.family, b.family)
        sa, sb = solve_instance(a, "numba"), solve_instance(a, "python")
        assert np.array_equal(sa.values, sb.values)
        assert (sa.decisions, sa.backtracks, sa.max_backtrack_depth) == (
            sb.decisions, sb.backtracks, sb.max_backtrack_depth)


def test_bounded_equiv_agree():
    rng = np.random.default_rng(4)
    for v in CORPUS[3:]:
        blocks = tuple(int(x) for x in rng.integers(0, 3, size=v.n_states))
        q = build_quotient(v, StatePartition(blocks))
        for length in (0, 3, 7):
            assert bounded_equiv(v, q, length, "numba") == _bounded_equiv_python(v, q, length)


def test_minimize_backend_identical():
    for v in CORPUS:
        a, b = minimize(v, backend="numba"), minimize(v, backend="python")
        assert a.partition == b.partition and a.vpa == b.vpa


def test_unknown_backend():
    with pytest.raises(ValueError):
        compute_tops(fig1x(), "fortran")


def test_env_flag_selects_python():
    code = "from vpamin._accel import backend_name; print(backend_name())"
    env = dict(os.environ, VPAMIN_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
