"""Node evaluation: time-window propagation, lower bounds, list heuristic.

The SRPT bound works in time scaled by ``m`` so every quantity stays an
integer; the result is returned as an exact :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import (Criterion, Instance, PartialSchedule, _extend, ready_jobs, ready_time,
                    start_on)

INF = math.inf


@dataclass
class TimeWindows:
    """Propagated windows; scheduled jobs carry their actual start/completion."""

    r_prime: list[int]
    d_prime: list[float]
    z_best: int | None = None


def propagate_windows(inst: Instance, ps: PartialSchedule, z_best: int | None = None,
                      crit: Criterion = Criterion.SUM_COMPLETION) -> TimeWindows:
    n, p, start = inst.n, inst.p, ps.start
    mask = ps.mask
    rp = [0] * n
    for j in inst.topo_order:
        if mask >> j & 1:
            rp[j] = start[j]
            continue
        t = inst.r[j]
        for q in inst.preds[j]:
            v = rp[q] + p[q]
            if v > t:
                t = v
        rp[j] = t
    dp: list[float] = [INF] * n
    if crit is Criterion.MAX_LATENESS and z_best is not None:
        for j in reversed(inst.topo_order):
            if mask >> j & 1:
                dp[j] = start[j] + p[j]
                continue
            t = z_best + inst.d[j]
            for k in inst.succs[j]:
                v = dp[k] - p[k]
                if v < t:
                    t = v
            dp[j] = t
    return TimeWindows(rp, dp, z_best)


def lb_cp(inst: Instance, ps: PartialSchedule, crit: Criterion, windows: TimeWindows) -> int:
    """Bound from each unscheduled job finishing at its propagated release + p."""
    rp, p, mask = windows.r_prime, inst.p, ps.mask
    if crit is Criterion.SUM_COMPLETION:
        total = ps.sum_c
        for j in range(inst.n):
            if not mask >> j & 1:
                total += rp[j] + p[j]
        return total
    best = ps.max_lat
    for j in range(inst.n):
        if not mask >> j & 1:
            v = rp[j] + p[j] - inst.d[j]
            if best is None or v > best:
                best = v
    return best


def srpt_schedule(release: Sequence, work: Sequence) -> list:
    """Completion times of preemptive SRPT on one machine.

    Works for ints or Fractions; ties on remaining work go to the lowest index.
    """
    n = len(release)
    order = sorted(range(n), key=lambda i: (release[i], i))
    comp = [None] * n
    heap: list = []
    t = None
    idx = 0
    while idx < n or heap:
        if not heap:
            nxt = release[order[idx]]
            t = nxt if t is None or nxt > t else t
        while idx < n and release[order[idx]] <= t:
            i = order[idx]
            heapq.heappush(heap, (work[i], i))
            idx += 1
        rem, i = heapq.heappop(heap)
        if idx < n and t + rem > release[order[idx]]:
            nxt = release[order[idx]]
            heapq.heappush(heap, (rem - (nxt - t), i))
            t = nxt
        else:
            t = t + rem
            comp[i] = t
    return comp


def lb_srpt(inst: Instance, ps: PartialSchedule, windows: TimeWindows) -> Fraction:
    """Preemptive single-machine relaxation bound for the sum of completions.

    Each unscheduled job becomes a preemptive job of work ``(p + s) / m`` on
    one machine of speed ``m``, where ``s`` is the cheapest setup into it. A
    setup may be done before the job's release, so the release is moved back
    by ``s``. Jobs placed first on
    an empty machine need no setup; at most one per empty machine exists, so
    every sorted SRPT completion is lowered by the largest such setups. The
    sorted completions are matched against the sorted ``r' + p``.
    """
    m, p, smin, rp = inst.m, inst.p, inst.s_in_min, windows.r_prime
    jobs = [j for j in range(inst.n) if not ps.mask >> j & 1]
    if not jobs:
        return Fraction(ps.sum_c)
    empty = sum(1 for last in ps.last if last < 0)
    slack = sum(heapq.nlargest(empty, (smin[j] for j in jobs))) if empty else 0
    comp = sorted(srpt_schedule([max(0, m * (rp[j] - smin[j])) for j in jobs],
                                [p[j] + smin[j] for j in jobs]))
    a = sorted(m * (rp[j] + p[j]) for j in jobs)
    scaled = sum(max(c - slack, x) for c, x in zip(comp, a))
    return Fraction(ps.sum_c * m + scaled, m)


@dataclass
class EnergyInterval:
    t1: int
    t2: int
    jobs: list[int]
    k: int
    alpha: int
    e_consumed: int
    e_setup: int
    e_produced: int
    e_busy: int = 0

    @property
    def overloaded(self) -> bool:
        return self.e_consumed + self.e_setup + self.e_busy > self.e_produced


def mandatory_energy(t1: int, t2: int, r: int, d: float, p: int) -> int:
    return int(max(0, min(p, t2 - t1, r + p - t1, t2 - d + p)))


def setup_energy(jobs: Sequence[int], s: Sequence[Sequence[int]], m: int) -> tuple[int, int]:
    """``(alpha, sum of the alpha smallest setups among jobs)``."""
    alpha = max(0, len(jobs) - m)
    if alpha == 0:
        return 0, 0
    pool = (s[i][j] for i in jobs for j in jobs if i != j)
    return alpha, sum(heapq.nsmallest(alpha, pool))


def energy_interval(inst: Instance, ps: PartialSchedule, windows: TimeWindows) -> EnergyInterval | None:
    """Interval from the earliest window start to the end of the tightest window."""
    rp, dp, p = windows.r_prime, windows.d_prime, inst.p
    jobs = [j for j in range(inst.n) if not ps.mask >> j & 1]
    if not jobs:
        return None
    t1 = min(rp[j] for j in jobs)
    tight = min(jobs, key=lambda j: (dp[j] - rp[j], j))
    t2 = dp[tight]
    if t2 == INF or t2 <= t1:
        return None
    t2 = int(t2)
    consumed, consumers = 0, []
    for j in jobs:
        e = mandatory_energy(t1, t2, rp[j], dp[j], p[j])
        if e > 0:
            consumed += e
            consumers.append(j)
    alpha, e_setup = setup_energy(consumers, inst.s, inst.m)
    busy = sum(max(0, min(f, t2) - t1) for f in ps.free)
    return EnergyInterval(t1, t2, consumers, len(consumers), alpha, consumed, e_setup,
                          inst.m * (t2 - t1), busy)


def energetic_test(inst: Instance, ps: PartialSchedule, z_best: int | None,
                   windows: TimeWindows | None = None) -> bool:
    """True when no completion of ``ps`` can reach ``Lmax <= z_best``."""
    if z_best is None:
        return False
    if windows is None or windows.z_best != z_best:
        windows = propagate_windows(inst, ps, z_best, Criterion.MAX_LATENESS)
    rp, dp, p = windows.r_prime, windows.d_prime, inst.p
    for j in range(inst.n):
        if not ps.mask >> j & 1 and rp[j] + p[j] > dp[j]:
            return True
    interval = energy_interval(inst, ps, windows)
    return interval is not None and interval.overloaded


def tie_key(inst: Instance, crit: Criterion, job: int) -> int:
    return inst.p[job] if crit is Criterion.SUM_COMPLETION else inst.d[job]


def est_options(inst: Instance, ps: PartialSchedule, crit: Criterion) -> list[tuple[int, list[tuple[int, int]]]]:
    """Ready jobs by (EST, SPT/EDD, id), each with its machines by (start, index)."""
    out = []
    for j in ready_jobs(ps, inst):
        base = ready_time(ps, j, inst)
        starts = sorted((start_on(ps, j, k, inst, base), k) for k in range(inst.m))
        out.append((starts[0][0], tie_key(inst, crit, j), j, starts))
    out.sort()
    return [(j, starts) for _, _, j, starts in out]


def upper_bound(inst: Instance, ps: PartialSchedule,
                crit: Criterion = Criterion.SUM_COMPLETION) -> PartialSchedule:
    """Complete ``ps`` greedily with the earliest-starting (job, machine) pair."""
    while not ps.is_complete(inst):
        j, starts = est_options(inst, ps, crit)[0]
        st, k = starts[0]
        ps = _extend(ps, j, k, st, inst)
    return ps
