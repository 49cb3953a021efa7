"""Inner/outer loop orchestration for storage siting and sizing.

The inner loop alternates per-day dispatch, subgradient evaluation and
the cutting-plane master until the optimality gap is within the relative
tolerance.  The outer loop enforces the minimum rate of return on
storage investment by shrinking the investment budget to (revenue /
required return) and re-running the inner loop with all accumulated
cuts retained.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field

from .dispatch import DispatchSolution, solve_ed, storage_revenue
from .master import MasterState, convergence_check, solve_master
from .model import Network, Plan, StorageTech, TypicalDay
from .subgradient import Cut, assemble_cut, compute_subgradients


@dataclass
class IterationRecord:
    iteration: int
    lower_bound: float
    sampled_cost: float
    best_cost: float
    plan_nonzeros: int


@dataclass
class OuterRecord:
    round: int
    budget: float | None
    investment_cost: float
    revenue: float


@dataclass
class PlanResult:
    plan: Plan
    system_cost: float          # money/day, best sampled
    baseline_cost: float        # system cost of the zero plan
    day_costs: dict[str, float]
    revenue: float              # money/day (Eq.-5 style market settlement)
    investment_cost: float
    achieved_return: float | None   # revenue / investment, None when no build
    converged: bool
    return_unachievable: bool = False
    gap: float = math.nan
    lower_bound: float = math.nan
    iterations: list[IterationRecord] = field(default_factory=list)
    outer_trace: list[OuterRecord] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    cuts: list[Cut] = field(default_factory=list)
    solutions: dict[str, DispatchSolution] = field(default_factory=dict)

    @property
    def saving(self) -> float:
        return self.baseline_cost - self.system_cost


def dispatch_all(net: Network, days: list[TypicalDay], plan: Plan,
                 tech: StorageTech, workers: int = 1
                 ) -> dict[str, DispatchSolution]:
    """Solve every typical day; results keyed and reduced in day order."""
    if workers > 1:
        ctx = ThreadPoolExecutor(max_workers=workers)
    else:
        ctx = nullcontext()
    with ctx as pool:
        if workers > 1:
            sols = list(pool.map(
                lambda day: solve_ed(net, day, plan, tech), days))
        else:
            sols = [solve_ed(net, day, plan, tech) for day in days]
    return {day.day_id: sol for day, sol in zip(days, sols)}


def _weighted_cost(days: list[TypicalDay], sols: dict[str, DispatchSolution],
                   plan: Plan, tech: StorageTech) -> float:
    return sum(day.weight * sols[day.day_id].cost for day in days) \
        + plan.investment_cost(tech)


def total_revenue(days: list[TypicalDay], sols: dict[str, DispatchSolution],
                  tech: StorageTech) -> float:
    return sum(storage_revenue(sols[day.day_id], tech, day.weight)
               for day in days)


def evaluate_plan(net: Network, days: list[TypicalDay], tech: StorageTech,
                  plan: Plan, workers: int = 1) -> PlanResult:
    """Dispatch all days at a fixed plan; no optimization."""
    plan.check_ratio_bounds(tech)
    t0 = time.perf_counter()
    sols = dispatch_all(net, days, plan, tech, workers)
    cost = _weighted_cost(days, sols, plan, tech)
    if plan.is_empty():
        baseline_sols = sols
        baseline = cost
    else:
        baseline_sols = dispatch_all(net, days, Plan(), tech, workers)
        baseline = _weighted_cost(days, baseline_sols, Plan(), tech)
    ce = plan.investment_cost(tech)
    cr = total_revenue(days, sols, tech)
    return PlanResult(
        plan=plan, system_cost=cost, baseline_cost=baseline,
        day_costs={d: s.cost for d, s in sols.items()},
        revenue=cr, investment_cost=ce,
        achieved_return=(cr / ce) if ce > 0 else None,
        converged=True, solutions=sols,
        timings={"dispatch": time.perf_counter() - t0},
    )


def inner_loop(net: Network, days: list[TypicalDay], tech: StorageTech,
               budget: float | None, epsilon: float = 0.05,
               max_iter: int = 150, workers: int = 1,
               state: MasterState | None = None) -> PlanResult:
    """Cutting-plane search for the best plan within the budget.

    A pre-seeded ``state`` (with cuts from earlier budgets) is reused;
    its bounds are reset since the feasible region changed.
    """
    if not (0 < epsilon < 1):
        raise ValueError("epsilon must be in (0, 1)")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    timings = {"dispatch": 0.0, "subgradient": 0.0, "master": 0.0}

    def timed(key, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        timings[key] += time.perf_counter() - t0
        return out

    if state is None:
        state = MasterState(candidate_buses=list(net.candidate_buses),
                            tech=tech, budget=budget)
    else:
        state.budget = budget
        state.reset_bounds()

    zero = Plan()
    sols_cache: dict[int, dict[str, DispatchSolution]] = {}
    if not state.cuts or math.isnan(state.baseline_cost):
        sols0 = timed("dispatch", dispatch_all, net, days, zero, tech, workers)
        cs0 = _weighted_cost(days, sols0, zero, tech)
        state.baseline_cost = cs0
        grads, branch = timed("subgradient", compute_subgradients,
                              net, days, sols0, zero, tech)
        state.add_cut(assemble_cut(net, zero, cs0, grads, branch, 0))
        sols_cache[id(zero)] = sols0
    state.record_sample(zero, state.baseline_cost)
    best_sols: dict[str, DispatchSolution] | None = sols_cache.get(id(zero))

    trace: list[IterationRecord] = []
    converged = False
    for nu in range(1, max_iter + 1):
        ytilde, lb = timed("master", solve_master, state)
        state.lower_bound = lb
        if convergence_check(state, epsilon):
            converged = True
            break
        sols = timed("dispatch", dispatch_all, net, days, ytilde, tech, workers)
        cs = _weighted_cost(days, sols, ytilde, tech)
        if cs < state.best_cost:
            best_sols = sols
        state.record_sample(ytilde, cs)
        grads, branch = timed("subgradient", compute_subgradients,
                              net, days, sols, ytilde, tech)
        state.add_cut(assemble_cut(net, ytilde, cs, grads, branch, nu))
        trace.append(IterationRecord(nu, lb, cs, state.best_cost,
                                     len(ytilde.installed_buses())))
        if convergence_check(state, epsilon):
            converged = True
            break

    plan = state.best_plan
    if best_sols is None:
        best_sols = timed("dispatch", dispatch_all, net, days, plan, tech, workers)
    ce = plan.investment_cost(tech)
    cr = total_revenue(days, best_sols, tech)
    gap = state.best_cost - state.lower_bound
    return PlanResult(
        plan=plan, system_cost=state.best_cost,
        baseline_cost=state.baseline_cost,
        day_costs={d: s.cost for d, s in best_sols.items()},
        revenue=cr, investment_cost=ce,
        achieved_return=(cr / ce) if ce > 0 else None,
        converged=converged, gap=gap, lower_bound=state.lower_bound,
        iterations=trace, timings=timings, cuts=list(state.cuts),
        solutions=best_sols,
    )


def default_budget_min(tech: StorageTech) -> float:
    # below a milli-unit of the cheapest installable device "no build"
    # is the honest answer
    return 1e-3 * (tech.c_p + tech.c_e)


def outer_loop(net: Network, days: list[TypicalDay], tech: StorageTech,
               chi: float, budget_init: float | None = None,
               budget_min: float | None = None, epsilon: float = 0.05,
               max_outer: int = 20, max_iter: int = 150,
               workers: int = 1) -> PlanResult:
    """Enforce revenue >= chi * investment by iterative budget reduction."""
    if chi < 1.0:
        warnings.warn(f"rate of return {chi} below 1 is vacuous; clamping to 1")
        chi = 1.0
    if budget_min is None:
        budget_min = default_budget_min(tech)

    state = MasterState(candidate_buses=list(net.candidate_buses),
                        tech=tech, budget=budget_init)
    budget = budget_init
    outer_trace: list[OuterRecord] = []
    result: PlanResult | None = None
    for rnd in range(1, max_outer + 1):
        result = inner_loop(net, days, tech, budget, epsilon=epsilon,
                            max_iter=max_iter, workers=workers, state=state)
        ce, cr = result.investment_cost, result.revenue
        outer_trace.append(OuterRecord(rnd, budget, ce, cr))
        if ce <= default_budget_min(tech) or cr >= chi * ce - 1e-6 * ce:
            result.outer_trace = outer_trace
            return result
        budget = cr / chi
        if budget < budget_min:
            empty = evaluate_plan(net, days, tech, Plan(), workers=workers)
            empty.return_unachievable = True
            empty.outer_trace = outer_trace
            return empty
    result.converged = False
    result.outer_trace = outer_trace
    return result


def format_report(result: PlanResult, schema_version: str = "1") -> str:
    """PlanResult as structured text with a stable schema."""
    lines = [f"schema_version = {schema_version}"]
    lines.append(f"converged = {str(result.converged).lower()}")
    lines.append(f"return_unachievable = {str(result.return_unachievable).lower()}")
    lines.append(f"baseline_cost = {result.baseline_cost:.6f}")
    lines.append(f"system_cost = {result.system_cost:.6f}")
    lines.append(f"saving = {result.saving:.6f}")
    lines.append(f"investment_cost = {result.investment_cost:.6f}")
    lines.append(f"revenue = {result.revenue:.6f}")
    if result.achieved_return is None:
        lines.append("achieved_return = null")
    else:
        lines.append(f"achieved_return = {result.achieved_return:.6f}")
    lines.append("[plan]")
    for b, (p, e) in sorted(result.plan.ratings.items()):
        lines.append(f"{b} {p:.6f} {e:.6f}")
    lines.append("[day_costs]")
    for d, c in sorted(result.day_costs.items()):
        lines.append(f"{d} {c:.6f}")
    return "\n".join(lines) + "\n"


def format_trace(result: PlanResult) -> str:
    lines = ["# iteration lower_bound sampled_cost best_cost plan_nonzeros"]
    for r in result.iterations:
        lines.append(f"{r.iteration} {r.lower_bound:.6f} {r.sampled_cost:.6f} "
                     f"{r.best_cost:.6f} {r.plan_nonzeros}")
    if result.outer_trace:
        lines.append("# round budget investment_cost revenue")
        for r in result.outer_trace:
            b = "inf" if r.budget is None else f"{r.budget:.6f}"
            lines.append(f"{r.round} {b} {r.investment_cost:.6f} "
                         f"{r.revenue:.6f}")
    return "\n".join(lines) + "\n"
