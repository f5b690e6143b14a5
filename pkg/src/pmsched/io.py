"""Text formats for instances and solutions (1-based ids on disk)."""

from __future__ import annotations

from pathlib import Path

from .model import ContractError, Instance, Schedule


def format_instance(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.m}",
             " ".join(map(str, inst.p)),
             " ".join(map(str, inst.r)),
             " ".join(map(str, inst.d))]
    lines += [" ".join(map(str, row)) for row in inst.s]
    edges = sorted(inst.edges)
    lines.append(str(len(edges)))
    lines += [f"{i + 1} {j + 1}" for i, j in edges]
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    try:
        n, m = map(int, rows[0])
        p, r, d = (list(map(int, rows[k])) for k in (1, 2, 3))
        s = [list(map(int, rows[4 + i])) for i in range(n)]
        e = int(rows[4 + n][0])
        edges = []
        for k in range(e):
            i, j = map(int, rows[5 + n + k])
            edges.append((i - 1, j - 1))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed instance file: {exc}") from None
    if not (len(p) == len(r) == len(d) == n):
        raise ValueError("malformed instance file: vector lengths differ from n")
    return Instance.build(m, p, r, d, s, edges)


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst))


def format_solution(sched: Schedule, value: int) -> str:
    lines = [str(value)]
    lines += [f"{j + 1} {sched.machine[j] + 1} {sched.start[j]}" for j in range(len(sched.start))]
    return "\n".join(lines) + "\n"


def parse_solution(text: str, inst: Instance) -> tuple[int, Schedule]:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    value = int(rows[0][0])
    start = [-1] * inst.n
    machine = [-1] * inst.n
    for row in rows[1:]:
        j, k, t = map(int, row)
        if not (1 <= j <= inst.n and 1 <= k <= inst.m):
            raise ContractError(f"solution line {row} out of range")
        start[j - 1], machine[j - 1] = t, k - 1
    if -1 in machine:
        raise ContractError("solution does not assign every job")
    return value, Schedule.from_assignment(inst, start, machine)


def read_solution(path: str | Path, inst: Instance) -> tuple[int, Schedule]:
    return parse_solution(Path(path).read_text(), inst)


def write_solution(sched: Schedule, value: int, path: str | Path) -> None:
    Path(path).write_text(format_solution(sched, value))
