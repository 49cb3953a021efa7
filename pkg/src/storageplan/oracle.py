"""Monolithic single-level LP baseline (no profit constraint).

All per-day dispatch blocks are coupled to shared investment variables
and solved as one LP.  This is the ground-truth for correctness checks
on small instances and the reference method for the scaling benchmark.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import lp_core
from .dispatch import add_day_block
from .lp_core import GE, LE, LinearProgram
from .model import Network, Plan, StorageTech, TypicalDay


@dataclass
class OracleResult:
    plan: Plan
    system_cost: float
    build_time: float
    solve_time: float
    rows: int
    cols: int
    nonzeros: int


def build_monolithic(net: Network, days: list[TypicalDay], tech: StorageTech,
                     budget: float | None) -> LinearProgram:
    lp = LinearProgram(name="monolithic")
    rating_vars = {}
    for b in net.candidate_buses:
        pv = f"pR[{b}]"
        ev = f"eR[{b}]"
        lp.add_var(pv, lb=0.0, cost=tech.c_p)
        lp.add_var(ev, lb=0.0, cost=tech.c_e)
        lp.add_row(f"ratio_lo[{b}]", [(pv, 1.0), (ev, -tech.rho_min)], GE, 0.0)
        lp.add_row(f"ratio_hi[{b}]", [(pv, 1.0), (ev, -tech.rho_max)], LE, 0.0)
        rating_vars[b] = (pv, ev)
    if budget is not None:
        coeffs = [(f"pR[{b}]", tech.c_p) for b in net.candidate_buses]
        coeffs += [(f"eR[{b}]", tech.c_e) for b in net.candidate_buses]
        lp.add_row("budget", coeffs, LE, budget)
    for day in days:
        add_day_block(lp, net, day, tech, list(net.candidate_buses),
                      rating_vars=rating_vars, weight=day.weight,
                      prefix=f"{day.day_id}/")
    return lp


def solve_monolithic(net: Network, days: list[TypicalDay], tech: StorageTech,
                     budget: float | None = None) -> OracleResult:
    t0 = time.perf_counter()
    lp = build_monolithic(net, days, tech, budget)
    t1 = time.perf_counter()
    sol = lp_core.solve(lp)
    t2 = time.perf_counter()
    if sol.status != "optimal":
        raise RuntimeError(f"monolithic LP {sol.status}")
    ratings = {}
    for b in net.candidate_buses:
        p = sol.value(f"pR[{b}]")
        e = sol.value(f"eR[{b}]")
        if p > 1e-7 or e > 1e-7:
            ratings[b] = (max(p, 0.0), max(e, 0.0))
    return OracleResult(
        plan=Plan(ratings), system_cost=sol.objective,
        build_time=t1 - t0, solve_time=t2 - t1,
        rows=lp.n_rows, cols=lp.n_vars, nonzeros=lp.nnz(),
    )


@dataclass
class GapReport:
    saving_ratio: float
    decomposition_saving: float
    oracle_saving: float
    passed: bool


def compare_to_oracle(decomp_cost: float, oracle_cost: float,
                      baseline_cost: float, epsilon: float = 0.05) -> GapReport:
    """Saving ratio of the decomposition against the monolithic optimum."""
    dec_saving = baseline_cost - decomp_cost
    ora_saving = baseline_cost - oracle_cost
    tiny = 1e-6 * max(1.0, abs(baseline_cost))
    if ora_saving <= tiny:
        if dec_saving > tiny:
            raise ValueError(
                "decomposition reports saving where the oracle finds none")
        return GapReport(1.0, dec_saving, ora_saving, True)
    ratio = dec_saving / ora_saving
    return GapReport(ratio, dec_saving, ora_saving,
                     ratio >= 1.0 - epsilon - 1e-9)
