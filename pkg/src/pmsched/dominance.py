"""Dominance rules over partial schedules.

Both rules look for another partial schedule over the same jobs in which no
job starts later and at least one starts strictly earlier, and whose machines
end in states no worse than the node's: the same last job, the job that
preceded it (no worse under the weak triangle inequality), or idle. Any
completion of the evaluated node is then matched by a completion of the
dominant one, so the node can be pruned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Sequence

from .model import Instance, PartialSchedule, _extend, ready_time, respects_precedence, start_on


@dataclass
class DominanceVerdict:
    prune: bool
    witness: tuple[tuple[int, int], ...] | None = None
    rule: str = ""


NO_PRUNE = DominanceVerdict(False)


@dataclass
class FlowNetwork:
    """Resource-flow network; vertex ``v`` has label ``labels[v]``.

    Job ``j`` (zero-based) owns vertices labelled ``f"{j + 1}s"`` and
    ``f"{j + 1}t"``.
    """

    labels: list[str]
    cap: dict[int, dict[int, int]] = field(default_factory=dict)
    source: int = 0
    sink: int = 1
    required: int = 0

    def add_arc(self, u: int, v: int, c: int) -> None:
        self.cap.setdefault(u, {})
        self.cap.setdefault(v, {})
        self.cap[u][v] = self.cap[u].get(v, 0) + c
        self.cap[v].setdefault(u, 0)

    def has_arc(self, u: str, v: str) -> bool:
        iu, iv = self.labels.index(u), self.labels.index(v)
        return self.cap.get(iu, {}).get(iv, 0) > 0


def max_flow(net: FlowNetwork) -> int:
    """Edmonds-Karp on the residual capacities (copied, the network is untouched)."""
    res = {u: dict(vs) for u, vs in net.cap.items()}
    s, t = net.source, net.sink
    flow = 0
    while True:
        parent = {s: s}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for v, c in res.get(u, {}).items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if t not in parent:
            return flow
        push, v = None, t
        while v != s:
            u = parent[v]
            push = res[u][v] if push is None else min(push, res[u][v])
            v = u
        v = t
        while v != s:
            u = parent[v]
            res[u][v] -= push
            res[v][u] += push
            v = u
        flow += push


def _machine_preds(ps: PartialSchedule) -> dict[int, int]:
    """Job -> the job right before it on its machine (first jobs are absent)."""
    prev: dict[int, int] = {}
    last: dict[int, int] = {}
    for j, k in ps.order:
        if k in last:
            prev[j] = last[k]
        last[k] = j
    return prev


def build_flow_network(ps: PartialSchedule, inst: Instance, k: int | None = None) -> FlowNetwork | None:
    """Network whose saturating flow rebuilds ``ps`` with job ``k`` one unit earlier.

    Every other job keeps its start time. Each machine of the rebuilt
    schedule ends with a front job, with the job that preceded a front job
    (the weak triangle inequality makes that machine state no worse), or
    stays idle. Returns ``None`` when ``k`` cannot start earlier at all (time
    zero, release date or a predecessor's completion in the way).
    """
    if not ps.order:
        return None
    if k is None:
        k = ps.order[-1][0]
    p, s = inst.p, inst.s
    target = {j: ps.start[j] for j, _ in ps.order}
    target[k] -= 1
    if target[k] < 0 or target[k] < ready_time(ps, k, inst):
        return None
    jobs = [j for j, _ in ps.order]
    front = ps.front()
    fset = set(front)
    before = _machine_preds(ps)

    labels = ["S", "T", "0s", "0t"] + [f"end{f + 1}" for f in front]
    ends = {f: 4 + a for a, f in enumerate(front)}
    base = len(labels)
    for j in jobs:
        # one-based, so job labels never clash with the dummy 0s/0t
        labels += [f"{j + 1}s", f"{j + 1}t"]
    vs = {j: base + 2 * a for a, j in enumerate(jobs)}
    net = FlowNetwork(labels=labels, required=inst.m + len(jobs))
    S, T, Os, Ot = 0, 1, 2, 3
    net.add_arc(S, Os, inst.m)
    net.add_arc(Ot, T, inst.m)
    # machines left idle by the rebuilt schedule
    net.add_arc(Os, Ot, inst.m)
    for f in front:
        net.add_arc(ends[f], Ot, 1)
        net.add_arc(vs[f], ends[f], 1)
        if f in before:
            net.add_arc(vs[before[f]], ends[f], 1)
    for i in jobs:
        i_s, i_t = vs[i], vs[i] + 1
        net.add_arc(S, i_s, 1)
        net.add_arc(i_t, T, 1)
        net.add_arc(Os, i_t, 1)
        ci = target[i] + p[i]
        for j in jobs:
            if j != i and not (i in fset and j in fset) and target[j] >= ci + s[i][j]:
                net.add_arc(i_s, vs[j] + 1, 1)
    return net


def maxflow_rule(ps: PartialSchedule, inst: Instance) -> DominanceVerdict:
    net = build_flow_network(ps, inst)
    if net is None:
        return NO_PRUNE
    return DominanceVerdict(max_flow(net) == net.required, None, "maxflow")


def rebuild(inst: Instance, ps: PartialSchedule, order: Sequence[int], front: set[int]) -> PartialSchedule:
    """Replay ``order``: other jobs keep their machine, front jobs go to ECT."""
    out = PartialSchedule.empty(inst)
    for j in order:
        if j in front:
            base = ready_time(out, j, inst)
            st, mk = min((start_on(out, j, k, inst, base), k) for k in range(inst.m))
        else:
            mk = ps.machine[j]
            st = start_on(out, j, mk, inst)
        out = _extend(out, j, mk, st, inst)
    return out


def front_permutation_rule(ps: PartialSchedule, inst: Instance) -> DominanceVerdict:
    """Try every reordering of the front jobs inside the scheduled list."""
    front = ps.front()
    if len(front) < 2:
        return NO_PRUNE
    fset = set(front)
    jobs = ps.jobs()
    slots = [a for a, j in enumerate(jobs) if j in fset]
    current = tuple(jobs[a] for a in slots)
    for perm in permutations(current):
        if perm == current:
            continue
        order = jobs[:]
        for a, j in zip(slots, perm):
            order[a] = j
        if not respects_precedence(inst, order):
            continue
        alt = rebuild(inst, ps, order, fset)
        if set(alt.front()) != fset:
            continue
        if any(alt.start[j] > ps.start[j] for j in jobs):
            continue
        if any(alt.start[j] < ps.start[j] for j in front):
            return DominanceVerdict(True, alt.order, "front")
    return NO_PRUNE


def discrepancy_adapted(verdict: DominanceVerdict, budget: int | None,
                        count: Callable[[Sequence[tuple[int, int]]], int | None]) -> DominanceVerdict:
    """Keep a front-rule prune only if its witness lies in the explored neighbourhood.

    ``count`` returns the discrepancy cost of a decision list under the
    active reference and counting mode, or ``None`` if the list is outside
    the tree being searched.
    """
    if not verdict.prune or verdict.witness is None or budget is None:
        return verdict
    cost = count(verdict.witness)
    if cost is not None and cost <= budget:
        return verdict
    return NO_PRUNE
