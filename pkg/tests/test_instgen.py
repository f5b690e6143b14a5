import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from pmsched.instgen import (GenParams, gen_dag, gen_setups, gen_windows, generate, repair_triangle,
                             round_half_up)
from pmsched.model import validate_instance


def test_zero_density_no_edges():
    assert gen_dag(8, 0.0, random.Random(1)) == set()


def test_full_density_reduces_to_chain():
    edges = gen_dag(3, 1.0, random.Random(4))
    assert len(edges) == 2
    assert len(nx.dag_longest_path(nx.DiGraph(list(edges)))) == 3


@given(st.integers(2, 12), st.floats(0, 1), st.integers(0, 10**6))
def test_dag_acyclic_and_reduced(n, density, seed):
    g = nx.DiGraph(list(gen_dag(n, density, random.Random(seed))))
    assert nx.is_directed_acyclic_graph(g)
    if g.number_of_edges():
        assert set(nx.transitive_reduction(g).edges) == set(g.edges)


def test_two_jobs_keep_raw_draws():
    rng = random.Random(7)
    raw = [rng.randint(1, 10), rng.randint(1, 10)]
    s = gen_setups(2, (1, 10), [1, 1], random.Random(7))
    assert [s[0][1], s[1][0]] == raw and s[0][0] == s[1][1] == 0


def test_zero_setups():
    s = gen_setups(5, (0, 0), [1] * 5, random.Random(0))
    assert all(v == 0 for row in s for v in row)


@pytest.mark.parametrize("seed", range(100))
def test_wide_setups_valid(seed):
    inst = generate(GenParams(n=8, m=2, seed=seed, setup_range=(20, 40)))
    assert validate_instance(inst) is None


@given(st.integers(3, 8), st.integers(0, 10**6))
def test_repair_only_decreases(n, seed):
    rng = random.Random(seed)
    p = [rng.randint(1, 5) for _ in range(n)]
    raw = [[0 if i == j else rng.randint(1, 30) for j in range(n)] for i in range(n)]
    fixed = repair_triangle([row[:] for row in raw], p)
    for i in range(n):
        for j in range(n):
            assert fixed[i][j] <= raw[i][j]
            for k in range(n):
                assert fixed[i][j] <= fixed[i][k] + p[k] + fixed[k][j]


def test_windows_degenerate_zero():
    r, d = gen_windows(4, [2, 3, 1, 4], [[0] * 4 for _ in range(4)], 1.0, 0.0, (-0.5, 1.5), random.Random(0))
    assert d == [0] * 4 and r == [0] * 4


def test_windows_tau_rho_zero_gives_total():
    p = [2, 3, 1]
    s = [[0, 1, 4], [2, 0, 5], [3, 3, 0]]
    big_p = (2 + 1) + (3 + 2) + (1 + 3)
    _, d = gen_windows(3, p, s, 0.0, 0.0, (-0.5, 1.5), random.Random(0))
    assert d == [big_p] * 3


@given(st.integers(1, 12), st.integers(0, 10**6))
def test_windows_well_formed(n, seed):
    inst = generate(GenParams(n=n, m=2, seed=seed, tau=0.3, rho=0.5))
    for i in range(n):
        assert 0 <= inst.r[i] <= inst.d[i]


def test_reproducible():
    params = GenParams(n=10, m=3, seed=42, edge_density=0.3)
    assert generate(params) == generate(params)
    assert generate(params) != generate(GenParams(n=10, m=3, seed=43, edge_density=0.3))


def test_total_uses_same_min_setup_as_model():
    inst = generate(GenParams(n=6, m=2, seed=3, tau=0.0, rho=0.0))
    assert set(inst.d) == {sum(inst.p) + sum(inst.s_min)}


@pytest.mark.parametrize("bad", [
    dict(tau=1.5), dict(rho=-0.1), dict(edge_density=2.0),
    dict(setup_range=(5, 1)), dict(proc_range=(0, 3)), dict(n=0),
])
def test_bad_params(bad):
    kw = dict(n=5, m=2)
    kw.update(bad)
    with pytest.raises(ValueError):
        GenParams(**kw)


@pytest.mark.parametrize("x,expect", [(2.5, 3), (3.5, 4), (2.49, 2), (-0.5, 0), (0.0, 0)])
def test_round_half_up(x, expect):
    assert round_half_up(x) == expect
