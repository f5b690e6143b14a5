"""Exhaustive reference solver for small instances.

Every semi-active schedule is produced by the list that sorts its jobs by
(start, id), so the enumeration only extends a prefix with decisions that
keep the list in that order; empty machines are interchangeable and only
the lowest-indexed one is tried. Each distinct schedule is therefore decoded
once, which keeps n = 8, m = 3 within seconds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ContractError, Criterion, Instance, Schedule, decode_ect, evaluate

MAX_ORACLE_JOBS = 9


@dataclass(frozen=True)
class OracleResult:
    value: int
    schedule: Schedule
    enumerated: int


def _guard(inst: Instance) -> None:
    if inst.n > MAX_ORACLE_JOBS:
        raise ContractError(f"oracle refuses n={inst.n} > {MAX_ORACLE_JOBS}")


def brute_force(inst: Instance, crit: Criterion) -> OracleResult:
    _guard(inst)
    n, m = inst.n, inst.m
    p, r, d, s = inst.p, inst.r, inst.d, inst.s
    preds = inst.preds
    sum_crit = crit is Criterion.SUM_COMPLETION

    start = [0] * n
    mach = [-1] * n
    last = [-1] * m
    free = [0] * m
    best = [None, None, None]
    count = [0]

    def rec(done: int, prev_start: int, prev_job: int, acc: int) -> None:
        if done == n:
            count[0] += 1
            if best[0] is None or acc < best[0]:
                best[0], best[1], best[2] = acc, start[:], mach[:]
            return
        if best[0] is not None and sum_crit and acc >= best[0]:
            # completions only add to the total
            return
        for j in range(n):
            if mach[j] != -1:
                continue
            t0 = r[j]
            ok = True
            for q in preds[j]:
                if mach[q] == -1:
                    ok = False
                    break
                t0 = max(t0, start[q] + p[q])
            if not ok:
                continue
            tried_empty = False
            for k in range(m):
                lk = last[k]
                if lk == -1:
                    if tried_empty:
                        continue
                    tried_empty = True
                    t = t0
                else:
                    t = max(t0, free[k] + s[lk][j])
                if t < prev_start or (t == prev_start and j < prev_job):
                    continue
                c = t + p[j]
                start[j], mach[j] = t, k
                old_last, old_free = last[k], free[k]
                last[k], free[k] = j, c
                nacc = acc + c if sum_crit else max(acc, c - d[j])
                rec(done + 1, t, j, nacc)
                last[k], free[k] = old_last, old_free
                mach[j] = -1

    rec(0, -1, -1, 0 if sum_crit else -(1 << 60))
    value, st, mc = best
    sched = Schedule.from_assignment(inst, st, mc)
    assert evaluate(sched, inst, crit) == value
    return OracleResult(value=value, schedule=sched, enumerated=count[0])


def feasible_lists(inst: Instance):
    """All job permutations that respect the precedence graph."""
    n = inst.n
    pm = inst.pred_mask
    order: list[int] = []

    def rec(mask: int):
        if len(order) == n:
            yield tuple(order)
            return
        for j in range(n):
            if not mask >> j & 1 and pm[j] & mask == pm[j]:
                order.append(j)
                yield from rec(mask | 1 << j)
                order.pop()

    yield from rec(0)


def best_ect_list(inst: Instance, crit: Criterion) -> int:
    """Best value reachable by ECT allocation over every feasible list."""
    _guard(inst)
    return min(evaluate(decode_ect(inst, lst), inst, crit) for lst in feasible_lists(inst))


def count_tree(inst: Instance) -> int:
    """Node count of the full (job, machine) decision tree, root included."""
    n, m = inst.n, inst.m
    pm = inst.pred_mask
    memo: dict[int, int] = {}

    def rec(mask: int) -> int:
        if mask in memo:
            return memo[mask]
        total = 1
        for j in range(n):
            if not mask >> j & 1 and pm[j] & mask == pm[j]:
                total += m * rec(mask | 1 << j)
        memo[mask] = total
        return total

    return rec(0)


def relabel(inst: Instance, perm: list[int]) -> Instance:
    """Rename job ``j`` to ``perm[j]``."""
    n = inst.n
    inv = [0] * n
    for j, pj in enumerate(perm):
        inv[pj] = j
    return Instance.build(
        inst.m,
        [inst.p[inv[k]] for k in range(n)],
        [inst.r[inv[k]] for k in range(n)],
        [inst.d[inv[k]] for k in range(n)],
        [[inst.s[inv[a]][inv[b]] for b in range(n)] for a in range(n)],
        [(perm[i], perm[j]) for i, j in inst.edges],
    )


__all__ = ["OracleResult", "brute_force", "best_ect_list", "feasible_lists", "count_tree",
           "relabel", "MAX_ORACLE_JOBS"]
