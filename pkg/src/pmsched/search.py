"""Two-level tree search: exact branch-and-bound and discrepancy-limited search.

A branch fixes the next job and its machine at once. Children are ranked by
the EST rule (ties SPT for the sum of completions, EDD for lateness) and
machines by earliest completion; a child costs the discrepancies of its
job rank plus its machine rank.
"""

from __future__ import annotations

import enum
import heapq
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import bounds, dominance
from .model import (Criterion, Instance, PartialSchedule, Schedule, _extend, partial_value,
                    ready_time, start_on)


class Strategy(str, enum.Enum):
    DFS = "dfs"
    DBDFS = "dbdfs"
    LDS_TOP = "ldstop"
    LDS_LOW = "ldslow"


class CountMode(str, enum.Enum):
    BINARY = "binary"
    NONBINARY = "nonbinary"
    MIXED = "mixed"


@dataclass(frozen=True)
class SearchConfig:
    criterion: Criterion = Criterion.SUM_COMPLETION
    strategy: Strategy = Strategy.DFS
    job_count: CountMode = CountMode.BINARY
    # with MIXED, job choices at depth < binary_depth are counted in binary mode
    binary_depth: int = 0
    max_discrepancies: int | None = None
    # discrepancies are only allowed at depths in [lo, hi)
    disc_window: tuple[int, int] | None = None
    lb_cp: bool = True
    lb_srpt: bool = True
    energetic: bool = True
    front_rule: bool = False
    maxflow_rule: bool = False
    adapted_rules: bool = False
    root_upper_bound: bool = True
    node_upper_bound: bool = False
    # try a single representative among empty (interchangeable) machines
    machine_symmetry: bool = True
    time_limit: float | None = None
    seed: int = 0
    record_leaves: bool = False

    def job_cost(self, rank: int, depth: int) -> int:
        if rank == 0:
            return 0
        if self.job_count is CountMode.BINARY:
            return 1
        if self.job_count is CountMode.MIXED and depth < self.binary_depth:
            return 1
        return rank

    def allows_discrepancy(self, depth: int) -> bool:
        if self.disc_window is None:
            return True
        lo, hi = self.disc_window
        return lo <= depth < hi


def bare_config(criterion: Criterion = Criterion.SUM_COMPLETION, **kw) -> SearchConfig:
    """Config with every bound and rule switched off."""
    base = dict(lb_cp=False, lb_srpt=False, energetic=False, front_rule=False,
                maxflow_rule=False, adapted_rules=False, root_upper_bound=False)
    base.update(kw)
    return SearchConfig(criterion=criterion, **base)


@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    time_to_best: float = 0.0
    elapsed: float = 0.0
    pruned_bound: int = 0
    pruned_energy: int = 0
    pruned_front: int = 0
    pruned_flow: int = 0
    improvements: int = 0
    timed_out: bool = False
    visited_leaves: list[tuple[tuple[int, int], ...]] = field(default_factory=list)


@dataclass
class Solution:
    schedule: Schedule | None
    value: int | None
    decisions: tuple[tuple[int, int], ...]
    stats: SearchStats
    optimal: bool = False


@dataclass(frozen=True)
class Decision:
    job: int
    machine: int
    start: int
    cost: int


def branch(ps: PartialSchedule, inst: Instance, config: SearchConfig,
           ref: Sequence[tuple[int, int]] | None = None) -> list[Decision]:
    """Children of ``ps`` in heuristic order with their discrepancy cost.

    With a reference decision list, its first unscheduled ready job on its
    reference machine becomes the rank-0 choice.
    """
    depth = len(ps.order)
    crit = config.criterion
    ref_job, ref_machine = _ref_choice(ps, ref) if ref is not None else (-1, -1)
    machines = _machines(ps, config, ref_machine)
    entries = []
    for j in range(inst.n):
        if ps.mask >> j & 1 or inst.pred_mask[j] & ps.mask != inst.pred_mask[j]:
            continue
        base = ready_time(ps, j, inst)
        starts = sorted((start_on(ps, j, k, inst, base), k) for k in machines)
        entries.append([starts[0][0], bounds.tie_key(inst, crit, j), j, starts])
    entries.sort()
    if ref is not None:
        for a, e in enumerate(entries):
            if e[2] == ref_job:
                entries.insert(0, entries.pop(a))
                starts = e[3]
                for b, (_, k) in enumerate(starts):
                    if k == ref_machine:
                        starts.insert(0, starts.pop(b))
                        break
                break
    allow = config.allows_discrepancy(depth)
    out = []
    for rank, (_, _, j, starts) in enumerate(entries):
        jc = config.job_cost(rank, depth)
        for mrank, (st, k) in enumerate(starts):
            cost = jc + mrank
            if cost and not allow:
                continue
            out.append(Decision(j, k, st, cost))
    return out


def _machines(ps: PartialSchedule, config: SearchConfig, preferred: int) -> list[int]:
    if not config.machine_symmetry:
        return list(range(len(ps.last)))
    empty = [k for k, j in enumerate(ps.last) if j < 0]
    if len(empty) < 2:
        return list(range(len(ps.last)))
    keep = preferred if preferred in empty else empty[0]
    return [k for k, j in enumerate(ps.last) if j >= 0 or k == keep]


def _ref_choice(ps: PartialSchedule, ref: Sequence[tuple[int, int]]) -> tuple[int, int]:
    for j, k in ref:
        if not ps.mask >> j & 1:
            return j, k
    return -1, -1


def count_discrepancies(inst: Instance, config: SearchConfig, decisions: Sequence[tuple[int, int]],
                        ref: Sequence[tuple[int, int]] | None = None) -> int | None:
    """Discrepancy cost of a decision path, or ``None`` if it leaves the tree."""
    ps = PartialSchedule.empty(inst)
    total = 0
    for j, k in decisions:
        for dec in branch(ps, inst, config, ref):
            if dec.job == j and dec.machine == k:
                total += dec.cost
                ps = _extend(ps, j, k, dec.start, inst)
                break
        else:
            return None
    return total


class _Stop(Exception):
    pass


class TreeSearch:
    """One search run; owns every piece of mutable state."""

    def __init__(self, inst: Instance, config: SearchConfig,
                 ref: Sequence[tuple[int, int]] | None = None,
                 incumbent: PartialSchedule | None = None,
                 z_seed: int | None = None,
                 deadline: float | None = None):
        self.inst = inst
        self.config = config
        self.crit = config.criterion
        self.ref = tuple(ref) if ref is not None else None
        self.z_seed = z_seed
        self.stats = SearchStats()
        self.t0 = time.perf_counter()
        self.deadline = deadline
        if config.time_limit is not None:
            d = self.t0 + config.time_limit
            self.deadline = d if self.deadline is None else min(self.deadline, d)
        self.best: PartialSchedule | None = None
        self.best_value: int | None = None
        if incumbent is not None:
            self.best, self.best_value = incumbent, partial_value(incumbent, self.crit)
        self.budget = config.max_discrepancies

    # incumbent handling -------------------------------------------------
    def cutoff(self):
        """Largest objective value still worth reaching."""
        c = None
        if self.best_value is not None:
            c = self.best_value - 1
        if self.z_seed is not None:
            c = self.z_seed if c is None else min(c, self.z_seed)
        return c

    def z_best(self) -> int | None:
        vals = [v for v in (self.best_value, self.z_seed) if v is not None]
        return min(vals) if vals else None

    def offer(self, ps: PartialSchedule) -> None:
        v = partial_value(ps, self.crit)
        c = self.cutoff()
        if c is None or v <= c:
            self.best, self.best_value = ps, v
            self.stats.improvements += 1
            self.stats.time_to_best = time.perf_counter() - self.t0

    # node evaluation ----------------------------------------------------
    def evaluate(self, ps: PartialSchedule) -> bool:
        """Count the node; return True if it should be expanded."""
        st = self.stats
        st.nodes += 1
        if self.deadline is not None and time.perf_counter() > self.deadline:
            st.timed_out = True
            raise _Stop
        inst, cfg, crit = self.inst, self.config, self.crit
        if ps.is_complete(inst):
            st.leaves += 1
            if cfg.record_leaves:
                st.visited_leaves.append(ps.order)
            self.offer(ps)
            return False
        cut = self.cutoff()
        windows = None
        if cut is not None and (cfg.lb_cp or (cfg.lb_srpt and crit is Criterion.SUM_COMPLETION)):
            windows = bounds.propagate_windows(inst, ps)
            if cfg.lb_cp and bounds.lb_cp(inst, ps, crit, windows) > cut:
                st.pruned_bound += 1
                return False
            if cfg.lb_srpt and crit is Criterion.SUM_COMPLETION and bounds.lb_srpt(inst, ps, windows) > cut:
                st.pruned_bound += 1
                return False
        if cfg.energetic and crit is Criterion.MAX_LATENESS:
            zb = self.z_best()
            if zb is not None:
                w = bounds.propagate_windows(inst, ps, zb, crit)
                if bounds.energetic_test(inst, ps, zb, w):
                    st.pruned_energy += 1
                    return False
        if ps.order:
            if cfg.front_rule:
                verdict = dominance.front_permutation_rule(ps, inst)
                if verdict.prune and cfg.adapted_rules and self.budget is not None:
                    verdict = dominance.discrepancy_adapted(verdict, self.budget, self._count)
                if verdict.prune:
                    st.pruned_front += 1
                    return False
            if cfg.maxflow_rule and dominance.maxflow_rule(ps, inst).prune:
                st.pruned_flow += 1
                return False
        if cfg.node_upper_bound:
            self.offer(bounds.upper_bound(inst, ps, crit))
        return True

    def _count(self, decisions):
        return count_discrepancies(self.inst, self.config, decisions, self.ref)

    # exploration --------------------------------------------------------
    def _children(self, ps: PartialSchedule, disc: int):
        budget = self.budget
        for dec in branch(ps, self.inst, self.config, self.ref):
            nd = disc + dec.cost
            if budget is None or nd <= budget:
                yield dec, nd

    def _dfs(self, ps: PartialSchedule, disc: int) -> None:
        if not self.evaluate(ps):
            return
        for dec, nd in self._children(ps, disc):
            self._dfs(_extend(ps, dec.job, dec.machine, dec.start, self.inst), nd)

    def _best_first(self, low: bool) -> None:
        # entries: (disc, +-depth, seq, parent, decision); parent None is the root
        root = PartialSchedule.empty(self.inst)
        heap: list = [(0, 0, 0, None, None)]
        seq = 1
        while heap:
            disc, _, _, parent, dec = heapq.heappop(heap)
            ps = root if parent is None else _extend(parent, dec.job, dec.machine, dec.start, self.inst)
            if not self.evaluate(ps):
                continue
            depth = len(ps.order) + 1
            key = -depth if low else depth
            for child, nd in self._children(ps, disc):
                heapq.heappush(heap, (nd, key, seq, ps, child))
                seq += 1

    def run(self) -> Solution:
        cfg = self.config
        if cfg.root_upper_bound:
            ub = bounds.upper_bound(self.inst, PartialSchedule.empty(self.inst), self.crit)
            if self.best is None or partial_value(ub, self.crit) < self.best_value:
                self.offer(ub)
        try:
            if cfg.strategy in (Strategy.DFS, Strategy.DBDFS):
                self._dfs(PartialSchedule.empty(self.inst), 0)
            else:
                self._best_first(low=cfg.strategy is Strategy.LDS_LOW)
        except _Stop:
            pass
        self.stats.elapsed = time.perf_counter() - self.t0
        return self.solution()

    def solution(self) -> Solution:
        sched = Schedule.from_partial(self.best, self.inst) if self.best is not None else None
        decisions = self.best.order if self.best is not None else ()
        return Solution(sched, self.best_value, decisions, self.stats, optimal=False)


def solve_exact(inst: Instance, config: SearchConfig | None = None, z_seed: int | None = None) -> Solution:
    """Branch-and-bound over the full tree; ``z_seed`` is a known bound without a schedule."""
    config = config or SearchConfig()
    config = replace(config, strategy=Strategy.DFS, max_discrepancies=None, disc_window=None)
    search = TreeSearch(inst, config, z_seed=z_seed)
    sol = search.run()
    sol.optimal = not sol.stats.timed_out
    return sol


def solve_lds(inst: Instance, config: SearchConfig,
              ref: Sequence[tuple[int, int]] | None = None,
              incumbent: PartialSchedule | None = None,
              deadline: float | None = None) -> Solution:
    """Explore the leaves within ``config.max_discrepancies`` of the heuristic.

    ``ref`` replaces the heuristic's first choice at each node by the
    reference solution's decision; ``incumbent`` seeds the best solution.
    """
    if config.strategy is Strategy.DFS:
        config = replace(config, strategy=Strategy.DBDFS)
    search = TreeSearch(inst, config, ref=ref, incumbent=incumbent, deadline=deadline)
    sol = search.run()
    sol.optimal = config.max_discrepancies is None and config.disc_window is None and not sol.stats.timed_out
    return sol

