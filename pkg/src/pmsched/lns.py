"""Large neighbourhood search over discrepancy-limited trees.

Each round explores the leaves within ``k`` discrepancies of the reference
solution (the reference replaces the heuristic's first choice at every
node). A strictly better leaf becomes the new reference and ``k`` restarts
at 1; otherwise the neighbourhood grows.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field, replace

from . import bounds
from .model import ContractError, Instance, PartialSchedule, Schedule, partial_value, replay
from .search import CountMode, SearchConfig, SearchStats, Solution, Strategy, solve_lds


class Variant(str, enum.Enum):
    CDS = "cds"
    CDDS = "cdds"
    HDCDDS = "hdcdds"
    MCCDS = "mccds"


def default_search() -> SearchConfig:
    return SearchConfig(strategy=Strategy.LDS_LOW, job_count=CountMode.BINARY,
                        front_rule=True, adapted_rules=True, root_upper_bound=False)


@dataclass(frozen=True)
class LnsConfig:
    variant: Variant = Variant.CDS
    k_max: int | None = None
    k_limit: int = 3
    x: int | None = None
    depth_limit: int | None = None
    d_bin: int | None = None
    time_limit: float | None = None
    seed: int = 0
    search: SearchConfig = field(default_factory=default_search)

    def resolved(self, n: int) -> "LnsConfig":
        """Fill unset parameters with their size-dependent defaults."""
        out = replace(
            self,
            k_max=n if self.k_max is None else self.k_max,
            x=max(1, math.ceil(n / 5)) if self.x is None else self.x,
            depth_limit=math.ceil(n / 3) if self.depth_limit is None else self.depth_limit,
            d_bin=math.ceil(n / 4) if self.d_bin is None else self.d_bin,
        )
        if out.x < 1 or out.k_limit < 1 or out.k_max < 0 or out.depth_limit < 0:
            raise ContractError(f"invalid neighbourhood parameters {out}")
        if not 0 <= out.d_bin <= n:
            raise ContractError(f"d_bin={out.d_bin} outside [0, {n}]")
        return out


@dataclass
class Round:
    k: int
    window: tuple[int, int] | None
    value: int
    improved: bool
    elapsed: float


@dataclass
class LnsResult(Solution):
    trajectory: list[tuple[float, int]] = field(default_factory=list)
    rounds: list[Round] = field(default_factory=list)
    references: list[tuple[tuple[int, int], ...]] = field(default_factory=list)
    params: dict = field(default_factory=dict)


class _Climber:
    def __init__(self, inst: Instance, config: LnsConfig):
        self.inst = inst
        self.config = config.resolved(inst.n)
        self.crit = self.config.search.criterion
        self.t0 = time.perf_counter()
        tl = self.config.time_limit
        self.deadline = None if tl is None else self.t0 + tl
        self.ref = bounds.upper_bound(inst, PartialSchedule.empty(inst), self.crit)
        self.value = partial_value(self.ref, self.crit)
        self.stats = SearchStats()
        self.trajectory = [(0.0, self.value)]
        self.rounds: list[Round] = []
        self.references = [self.ref.order]

    def expired(self) -> bool:
        return self.deadline is not None and time.perf_counter() > self.deadline

    def explore(self, k: int, window: tuple[int, int] | None = None,
                search: SearchConfig | None = None) -> bool:
        """Search the k-discrepancy neighbourhood; True on strict improvement."""
        cfg = replace(search or self.config.search, max_discrepancies=k, disc_window=window,
                      time_limit=None)
        sol = solve_lds(self.inst, cfg, ref=self.ref.order, incumbent=self.ref, deadline=self.deadline)
        st = sol.stats
        self.stats.nodes += st.nodes
        self.stats.leaves += st.leaves
        self.stats.pruned_bound += st.pruned_bound
        self.stats.pruned_energy += st.pruned_energy
        self.stats.pruned_front += st.pruned_front
        self.stats.pruned_flow += st.pruned_flow
        improved = sol.value is not None and sol.value < self.value
        now = time.perf_counter() - self.t0
        if improved:
            self.ref = replay(self.inst, sol.decisions)
            self.value = sol.value
            self.stats.improvements += 1
            self.stats.time_to_best = now - st.elapsed + st.time_to_best
            self.trajectory.append((now, self.value))
            self.references.append(self.ref.order)
        self.rounds.append(Round(k, window, self.value, improved, now))
        if st.timed_out:
            self.stats.timed_out = True
        return improved

    def result(self) -> LnsResult:
        self.stats.elapsed = time.perf_counter() - self.t0
        cfg = self.config
        params = dict(variant=cfg.variant.value, k_max=cfg.k_max, k_limit=cfg.k_limit, x=cfg.x,
                      depth_limit=cfg.depth_limit, d_bin=cfg.d_bin, time_limit=cfg.time_limit)
        return LnsResult(Schedule.from_partial(self.ref, self.inst), self.value, self.ref.order,
                         self.stats, False, self.trajectory, self.rounds, self.references, params)


def _climb(inst: Instance, config: LnsConfig, window=None, search=None) -> LnsResult:
    c = _Climber(inst, config)
    k = 1
    while k <= c.config.k_max and not c.expired():
        if c.explore(k, window, search):
            k = 1
        else:
            k += 1
    return c.result()


def run_cds(inst: Instance, config: LnsConfig | None = None) -> LnsResult:
    return _climb(inst, replace(config or LnsConfig(), variant=Variant.CDS))


def run_cdds(inst: Instance, config: LnsConfig | None = None) -> LnsResult:
    """CDS with discrepancies confined to the top ``depth_limit`` levels."""
    config = replace(config or LnsConfig(), variant=Variant.CDDS).resolved(inst.n)
    return _climb(inst, config, window=(0, config.depth_limit))


def run_mccds(inst: Instance, config: LnsConfig | None = None) -> LnsResult:
    """CDS counting job discrepancies in binary above ``d_bin`` and by rank below."""
    config = replace(config or LnsConfig(), variant=Variant.MCCDS).resolved(inst.n)
    search = replace(config.search, job_count=CountMode.MIXED, binary_depth=config.d_bin)
    return _climb(inst, config, search=search)


def run_hdcdds(inst: Instance, config: LnsConfig | None = None) -> LnsResult:
    """CDS up to ``k_limit`` discrepancies, then a sliding band of ``x`` levels.

    Once the band has swept every level, ``k`` grows and the band restarts
    at the top. Stops when the time limit expires or ``k`` exceeds ``k_max``.
    """
    c = _Climber(inst, replace(config or LnsConfig(), variant=Variant.HDCDDS))
    cfg, n = c.config, inst.n
    k, band = 1, None
    while k <= cfg.k_max and not c.expired():
        if c.explore(k, band):
            k, band = 1, None
        elif band is None and k < cfg.k_limit:
            k += 1
        elif band is None:
            band = (0, cfg.x)
        else:
            lo = band[1]
            band = (lo, lo + cfg.x)
            if lo >= n:
                k, band = k + 1, (0, cfg.x)
    return c.result()


RUNNERS = {Variant.CDS: run_cds, Variant.CDDS: run_cdds, Variant.HDCDDS: run_hdcdds,
           Variant.MCCDS: run_mccds}


def run(inst: Instance, config: LnsConfig) -> LnsResult:
    return RUNNERS[config.variant](inst, config)
