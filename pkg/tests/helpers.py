"""Instances shared by several test modules."""

from __future__ import annotations

from functools import lru_cache

from pmsched.instgen import GenParams, generate
from pmsched.model import Criterion, Instance
from pmsched.oracle import brute_force

EXAMPLE1_P = [4, 3, 4, 3, 2]
EXAMPLE1_R = [1, 0, 3, 3, 1]
EXAMPLE1_D = [7, 5, 8, 10, 5]
EXAMPLE1_S = [
    [0, 2, 3, 4, 5],
    [7, 0, 6, 1, 3],
    [2, 4, 0, 7, 1],
    [4, 4, 8, 0, 1],
    [3, 4, 8, 5, 0],
]
# 1 -> 4 and 2 -> 5 in one-based ids
EXAMPLE1_EDGES = [(0, 3), (1, 4)]

EXAMPLE2_S = [
    [0, 10, 2, 10],
    [10, 0, 1, 1],
    [10, 10, 0, 10],
    [10, 10, 10, 0],
]


def example1() -> Instance:
    return Instance.build(2, EXAMPLE1_P, EXAMPLE1_R, EXAMPLE1_D, EXAMPLE1_S, EXAMPLE1_EDGES)


def example2(precedence: bool = True) -> Instance:
    edges = [(2, 3)] if precedence else []
    return Instance.build(2, [1, 1, 1, 1], [0, 0, 2, 2], [0, 0, 0, 0], EXAMPLE2_S, edges)


def corpus_params(count: int = 50, base_seed: int = 0) -> list[GenParams]:
    """n cycles through 6, 7, 8 and m through 2, 3."""
    return [GenParams(n=6 + i % 3, m=2 + (i // 3) % 2, seed=base_seed + i) for i in range(count)]


@lru_cache(maxsize=None)
def corpus(count: int = 50, base_seed: int = 0) -> tuple[Instance, ...]:
    return tuple(generate(p) for p in corpus_params(count, base_seed))


@lru_cache(maxsize=None)
def optimum(inst: Instance, crit: Criterion) -> int:
    return brute_force(inst, crit).value


def small(count: int, n: int = 5, m: int = 2, base_seed: int = 1000) -> list[Instance]:
    return [generate(GenParams(n=n, m=m, seed=base_seed + i)) for i in range(count)]


def topo_list(inst: Instance, keys) -> list[int]:
    """Precedence-feasible list that prefers jobs with smaller ``keys``."""
    done, out = 0, []
    while len(out) < inst.n:
        ready = [j for j in range(inst.n) if not done >> j & 1 and inst.pred_mask[j] & done == inst.pred_mask[j]]
        j = min(ready, key=lambda x: (keys[x], x))
        out.append(j)
        done |= 1 << j
    return out


def optimal_path(inst: Instance, crit: Criterion) -> list[tuple[int, int]]:
    """Decisions rebuilding an optimal schedule, in (start, job) order."""
    sched = brute_force(inst, crit).schedule
    return sorted(((j, sched.machine[j]) for j in range(inst.n)), key=lambda d: (sched.start[d[0]], d[0]))


def subtree_optimum(inst: Instance, ps, crit: Criterion):
    """Best value over every completion of ``ps`` (all ready jobs, all machines)."""
    from pmsched.model import extend, partial_value, ready_jobs
    if ps.is_complete(inst):
        return partial_value(ps, crit)
    return min(subtree_optimum(inst, extend(ps, j, k, inst), crit)
               for j in ready_jobs(ps, inst) for k in range(inst.m))
