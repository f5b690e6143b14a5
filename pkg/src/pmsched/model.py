"""Instances, partial schedules and semi-active decoding.

Jobs and machines are 0-based everywhere inside the package; the text file
formats in :mod:`pmsched.io` use 1-based ids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Sequence


class ContractError(ValueError):
    """Raised when an operation is called outside its precondition."""


class Criterion(str, enum.Enum):
    SUM_COMPLETION = "sum"
    MAX_LATENESS = "lmax"

    @classmethod
    def parse(cls, text: str) -> "Criterion":
        aliases = {"sum": cls.SUM_COMPLETION, "sumc": cls.SUM_COMPLETION, "ci": cls.SUM_COMPLETION,
                   "lmax": cls.MAX_LATENESS, "maxlateness": cls.MAX_LATENESS}
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ContractError(f"unknown criterion {text!r}") from None


@dataclass(frozen=True)
class Instance:
    """A ``Pm|prec,s_ij,r_i`` instance.

    ``s[i][j]`` is the setup needed when ``j`` directly follows ``i`` on a
    machine; ``edges`` holds pairs ``(i, j)`` meaning ``i`` must complete
    before ``j`` starts.
    """

    m: int
    p: tuple[int, ...]
    r: tuple[int, ...]
    d: tuple[int, ...]
    s: tuple[tuple[int, ...], ...]
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    @classmethod
    def build(cls, m: int, p: Sequence[int], r: Sequence[int], d: Sequence[int],
              s: Sequence[Sequence[int]], edges: Iterable[tuple[int, int]] = ()) -> "Instance":
        return cls(m=int(m), p=tuple(int(x) for x in p), r=tuple(int(x) for x in r),
                   d=tuple(int(x) for x in d), s=tuple(tuple(int(x) for x in row) for row in s),
                   edges=frozenset((int(i), int(j)) for i, j in edges))

    @property
    def n(self) -> int:
        return len(self.p)

    @cached_property
    def preds(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            out[j].append(i)
        return tuple(tuple(x) for x in out)

    @cached_property
    def succs(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            out[i].append(j)
        return tuple(tuple(x) for x in out)

    @cached_property
    def pred_mask(self) -> tuple[int, ...]:
        return tuple(sum(1 << q for q in qs) for qs in self.preds)

    @cached_property
    def topo_order(self) -> tuple[int, ...]:
        """Topological order; smallest ready id first, so it is deterministic."""
        ts = TopologicalSorter({j: self.preds[j] for j in range(self.n)})
        ts.prepare()
        order: list[int] = []
        while ts.is_active():
            ready = sorted(ts.get_ready())
            order.extend(ready)
            ts.done(*ready)
        return tuple(order)

    @cached_property
    def s_min(self) -> tuple[int, ...]:
        """``min_{j != i} s[i][j]``; 0 when the instance has a single job."""
        return tuple(min((self.s[i][j] for j in range(self.n) if j != i), default=0)
                     for i in range(self.n))

    @cached_property
    def s_in_min(self) -> tuple[int, ...]:
        """``min_{i != j} s[i][j]``: the cheapest setup paid before ``j`` when it is not first."""
        return tuple(min((self.s[i][j] for i in range(self.n) if i != j), default=0)
                     for j in range(self.n))


def validate_instance(inst: Instance) -> str | None:
    """Return a description of the first violated invariant, or ``None``."""
    n = inst.n
    if n < 1:
        return "empty instance: n must be >= 1"
    if inst.m < 1:
        return "machine count must be >= 1"
    if len(inst.r) != n or len(inst.d) != n:
        return "p, r and d must have the same length"
    if len(inst.s) != n or any(len(row) != n for row in inst.s):
        return "setup matrix must be n x n"
    for i in range(n):
        if inst.p[i] < 1:
            return f"processing time of job {i} must be >= 1"
        if inst.r[i] < 0:
            return f"release date of job {i} is negative"
        if inst.s[i][i] != 0:
            return f"diagonal setup s[{i}][{i}] must be 0"
        for j in range(n):
            if inst.s[i][j] < 0:
                return f"setup s[{i}][{j}] is negative"
    for i, j in inst.edges:
        if not (0 <= i < n and 0 <= j < n):
            return f"precedence ({i}, {j}) references an unknown job"
        if i == j:
            return f"cycle: self-loop on job {i}"
    try:
        TopologicalSorter({j: inst.preds[j] for j in range(n)}).prepare()
    except CycleError as exc:
        return f"cycle in precedence graph: {exc.args[1]}"
    s, p = inst.s, inst.p
    for k in range(n):
        for i in range(n):
            sik = s[i][k] + p[k]
            for j in range(n):
                if s[i][j] > sik + s[k][j]:
                    return (f"triangle inequality: s[{i}][{j}]={s[i][j]} > "
                            f"s[{i}][{k}]+p[{k}]+s[{k}][{j}]={sik + s[k][j]}")
    return None


class PartialSchedule:
    """Prefix of (job, machine) decisions with their semi-active start times.

    Instances are treated as values by the search: :func:`extend` returns a
    new object and never mutates its argument.
    """

    __slots__ = ("order", "start", "machine", "last", "free", "mask", "sum_c", "max_lat")

    def __init__(self, n: int, m: int):
        self.order: tuple[tuple[int, int], ...] = ()
        self.start: list[int] = [-1] * n
        self.machine: list[int] = [-1] * n
        self.last: list[int] = [-1] * m
        self.free: list[int] = [0] * m
        self.mask = 0
        self.sum_c = 0
        self.max_lat: int | None = None

    @classmethod
    def empty(cls, inst: Instance) -> "PartialSchedule":
        return cls(inst.n, inst.m)

    def copy(self) -> "PartialSchedule":
        ps = PartialSchedule.__new__(PartialSchedule)
        ps.order = self.order
        ps.start = self.start[:]
        ps.machine = self.machine[:]
        ps.last = self.last[:]
        ps.free = self.free[:]
        ps.mask = self.mask
        ps.sum_c = self.sum_c
        ps.max_lat = self.max_lat
        return ps

    @property
    def depth(self) -> int:
        return len(self.order)

    def is_scheduled(self, job: int) -> bool:
        return bool(self.mask >> job & 1)

    def completion(self, job: int, inst: Instance) -> int:
        return self.start[job] + inst.p[job]

    def front(self) -> list[int]:
        """Last job of every non-empty machine."""
        return [j for j in self.last if j >= 0]

    def jobs(self) -> list[int]:
        return [j for j, _ in self.order]

    def is_complete(self, inst: Instance) -> bool:
        return len(self.order) == inst.n

    def __repr__(self) -> str:
        body = ", ".join(f"{j}@M{k}:{self.start[j]}" for j, k in self.order)
        return f"PartialSchedule([{body}])"


def ready_time(ps: PartialSchedule, job: int, inst: Instance) -> int:
    """Earliest start of ``job`` allowed by its release date and predecessors."""
    t = inst.r[job]
    p, start = inst.p, ps.start
    for q in inst.preds[job]:
        c = start[q] + p[q]
        if c > t:
            t = c
    return t


def start_on(ps: PartialSchedule, job: int, machine: int, inst: Instance, base: int | None = None) -> int:
    """Semi-active start of ``job`` if appended to ``machine``."""
    t = ready_time(ps, job, inst) if base is None else base
    last = ps.last[machine]
    if last >= 0:
        t2 = ps.free[machine] + inst.s[last][job]
        if t2 > t:
            t = t2
    return t


def ready_jobs(ps: PartialSchedule, inst: Instance) -> list[int]:
    """Unscheduled jobs whose predecessors are all scheduled, by increasing id."""
    mask = ps.mask
    pm = inst.pred_mask
    return [j for j in range(inst.n) if not mask >> j & 1 and pm[j] & mask == pm[j]]


def extend(ps: PartialSchedule, job: int, machine: int, inst: Instance) -> PartialSchedule:
    """Append ``job`` to ``machine`` at its earliest feasible start."""
    if not 0 <= job < inst.n or not 0 <= machine < inst.m:
        raise ContractError(f"unknown job {job} or machine {machine}")
    if ps.mask >> job & 1:
        raise ContractError(f"job {job} is already scheduled")
    pm = inst.pred_mask[job]
    if pm & ps.mask != pm:
        raise ContractError(f"job {job} has unscheduled predecessors")
    return _extend(ps, job, machine, start_on(ps, job, machine, inst), inst)


def _extend(ps: PartialSchedule, job: int, machine: int, st: int, inst: Instance) -> PartialSchedule:
    # unchecked fast path for the search, ``st`` must come from start_on
    child = ps.copy()
    c = st + inst.p[job]
    child.order = ps.order + ((job, machine),)
    child.start[job] = st
    child.machine[job] = machine
    child.last[machine] = job
    child.free[machine] = c
    child.mask = ps.mask | (1 << job)
    child.sum_c = ps.sum_c + c
    lat = c - inst.d[job]
    if ps.max_lat is None or lat > ps.max_lat:
        child.max_lat = lat
    return child


def replay(inst: Instance, decisions: Iterable[tuple[int, int]]) -> PartialSchedule:
    """Rebuild the partial schedule produced by a (job, machine) decision list."""
    ps = PartialSchedule.empty(inst)
    for job, machine in decisions:
        ps = extend(ps, job, machine, inst)
    return ps


@dataclass(frozen=True)
class Schedule:
    start: tuple[int, ...]
    machine: tuple[int, ...]
    sequences: tuple[tuple[int, ...], ...]

    @classmethod
    def from_assignment(cls, inst: Instance, start: Sequence[int], machine: Sequence[int]) -> "Schedule":
        seqs: list[list[int]] = [[] for _ in range(inst.m)]
        for j in sorted(range(inst.n), key=lambda j: (start[j], j)):
            seqs[machine[j]].append(j)
        return cls(tuple(start), tuple(machine), tuple(tuple(x) for x in seqs))

    @classmethod
    def from_partial(cls, ps: PartialSchedule, inst: Instance) -> "Schedule":
        if not ps.is_complete(inst):
            raise ContractError("partial schedule is not complete")
        return cls.from_assignment(inst, ps.start, ps.machine)

    def completion(self, inst: Instance) -> list[int]:
        return [self.start[j] + inst.p[j] for j in range(inst.n)]


def schedule_violation(sched: Schedule, inst: Instance) -> str | None:
    """First feasibility violation of a complete schedule, or ``None``."""
    n, p = inst.n, inst.p
    if len(sched.start) != n or len(sched.machine) != n:
        return "schedule does not cover every job"
    seen = sorted(j for seq in sched.sequences for j in seq)
    if seen != list(range(n)):
        return "machine sequences are not a partition of the jobs"
    for k, seq in enumerate(sched.sequences):
        for j in seq:
            if sched.machine[j] != k:
                return f"job {j} listed on machine {k} but assigned to {sched.machine[j]}"
        for a, b in zip(seq, seq[1:]):
            if sched.start[b] < sched.start[a] + p[a] + inst.s[a][b]:
                return f"jobs {a} and {b} overlap or violate setup on machine {k}"
    for j in range(n):
        if sched.start[j] < inst.r[j]:
            return f"job {j} starts before its release date"
    for i, j in inst.edges:
        if sched.start[j] < sched.start[i] + p[i]:
            return f"precedence {i} -> {j} violated"
    return None


def evaluate(sched: Schedule, inst: Instance, crit: Criterion) -> int:
    why = schedule_violation(sched, inst)
    if why is not None:
        raise ContractError(f"infeasible schedule: {why}")
    comp = sched.completion(inst)
    if crit is Criterion.SUM_COMPLETION:
        return sum(comp)
    return max(c - d for c, d in zip(comp, inst.d))


def partial_value(ps: PartialSchedule, crit: Criterion) -> int:
    """Criterion restricted to the scheduled jobs (no feasibility re-check)."""
    if crit is Criterion.SUM_COMPLETION:
        return ps.sum_c
    return ps.max_lat if ps.max_lat is not None else -(1 << 60)


def respects_precedence(inst: Instance, order: Sequence[int]) -> bool:
    pos = {j: k for k, j in enumerate(order)}
    return all(i in pos and pos[i] < pos[j] for i, j in inst.edges if j in pos)


def decode_ect_partial(inst: Instance, order: Sequence[int]) -> PartialSchedule:
    """List scheduling: each job goes to the machine completing it first."""
    if not respects_precedence(inst, order):
        raise ContractError("job list violates the precedence constraints")
    ps = PartialSchedule.empty(inst)
    for job in order:
        if ps.mask >> job & 1:
            raise ContractError(f"job {job} appears twice in the list")
        base = ready_time(ps, job, inst)
        best_k, best_t = 0, None
        for k in range(inst.m):
            t = start_on(ps, job, k, inst, base)
            if best_t is None or t < best_t:
                best_k, best_t = k, t
        ps = _extend(ps, job, best_k, best_t, inst)
    return ps


def decode_ect(inst: Instance, order: Sequence[int]) -> Schedule:
    if sorted(order) != list(range(inst.n)):
        raise ContractError("list must be a permutation of all jobs")
    return Schedule.from_partial(decode_ect_partial(inst, order), inst)
