"""Seeded random instance generator.

Precedence graphs come from a random topological order with independent
forward arcs, reduced transitively. Setups are drawn uniformly and then
lowered until the weak triangle inequality holds; time windows follow the
usual tau/rho due-date scheme with releases derived from the due dates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import networkx as nx

from .model import Instance


@dataclass(frozen=True)
class GenParams:
    n: int
    m: int
    seed: int = 0
    edge_density: float = 0.2
    setup_range: tuple[int, int] = (1, 10)
    proc_range: tuple[int, int] = (1, 5)
    tau: float = 0.5
    rho: float = 0.5
    alpha_range: tuple[float, float] = (-0.5, 1.5)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        for name in ("setup_range", "proc_range", "alpha_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: lower bound exceeds upper bound")
        if self.proc_range[0] < 1 or self.setup_range[0] < 0:
            raise ValueError("processing times must be >= 1 and setups >= 0")
        for name in ("tau", "rho", "edge_density"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def gen_dag(n: int, edge_density: float, rng: random.Random) -> set[tuple[int, int]]:
    order = list(range(n))
    rng.shuffle(order)
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_density:
                g.add_edge(order[a], order[b])
    if g.number_of_edges() == 0:
        return set()
    return set(nx.transitive_reduction(g).edges())


def repair_triangle(s: list[list[int]], p: list[int]) -> list[list[int]]:
    """Lower setups until ``s[i][j] <= s[i][k] + p[k] + s[k][j]`` everywhere."""
    n = len(p)
    s = [row[:] for row in s]
    changed = True
    while changed:
        changed = False
        for k in range(n):
            sk, pk = s[k], p[k]
            for i in range(n):
                if i == k:
                    continue
                base = s[i][k] + pk
                row = s[i]
                for j in range(n):
                    if j != i and base + sk[j] < row[j]:
                        row[j] = base + sk[j]
                        changed = True
    return s


def gen_setups(n: int, setup_range: tuple[int, int], p: list[int], rng: random.Random) -> list[list[int]]:
    lo, hi = setup_range
    s = [[0 if i == j else rng.randint(lo, hi) for j in range(n)] for i in range(n)]
    return repair_triangle(s, p)


def gen_windows(n: int, p: list[int], s: list[list[int]], tau: float, rho: float,
                alpha_range: tuple[float, float], rng: random.Random) -> tuple[list[int], list[int]]:
    total = sum(p[i] + min((s[i][j] for j in range(n) if j != i), default=0) for i in range(n))
    lo = max(0.0, total * (1 - tau - rho / 2))
    hi = total * (1 - tau + rho / 2)
    d, r = [], []
    for i in range(n):
        di = round_half_up(rng.uniform(lo, hi)) if hi > lo else round_half_up(max(lo, hi))
        alpha = rng.uniform(*alpha_range)
        d.append(di)
        r.append(max(0, round_half_up(di - p[i] * (2 + alpha))))
    return r, d


def generate(params: GenParams) -> Instance:
    rng = random.Random(params.seed)
    n = params.n
    p = [rng.randint(*params.proc_range) for _ in range(n)]
    edges = gen_dag(n, params.edge_density, rng)
    s = gen_setups(n, params.setup_range, p, rng)
    r, d = gen_windows(n, p, s, params.tau, params.rho, params.alpha_range, rng)
    return Instance.build(params.m, p, r, d, s, edges)
