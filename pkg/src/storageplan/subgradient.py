"""Investment subgradients and cutting-plane cut assembly.

At buses holding storage the weighted rating-constraint duals give the
sensitivity of system cost to the power and energy ratings directly.
At empty buses those duals carry no information (the rating rows never
bind at zero rating), so the value of a marginal unit is found with a
price-taker profit-maximization LP for a 1 MWh device whose power/energy
ratio is itself optimized; its optimum is then projected onto the two
rating coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp_core
from .dispatch import DispatchSolution
from .lp_core import EQ, GE, LE, LinearProgram
from .model import Network, Plan, StorageTech, TypicalDay


@dataclass(frozen=True)
class Cut:
    """One supporting (approximately) hyperplane of the system-cost surface.

    ``point_p``/``point_e`` are the inquiry-point ratings and
    ``g_p``/``g_e`` the subgradient entries, all aligned with ``buses``.
    ``branch`` records which formula produced each entry ("BE" or "BN").
    """

    iteration: int
    buses: tuple[str, ...]
    point_p: tuple[float, ...]
    point_e: tuple[float, ...]
    sampled_cost: float
    g_p: tuple[float, ...]
    g_e: tuple[float, ...]
    branch: tuple[str, ...]

    def predicted_cost(self, plan: Plan) -> float:
        val = self.sampled_cost
        for b, pp, pe, gp, ge in zip(self.buses, self.point_p, self.point_e,
                                     self.g_p, self.g_e):
            val += gp * (plan.power(b) - pp) + ge * (plan.energy(b) - pe)
        return val


def subgrad_installed(sols: dict[str, DispatchSolution], weights: dict[str, float],
                      tech: StorageTech, plan: Plan) -> dict[str, tuple[float, float]]:
    """Subgradients at installed buses from the weighted rating duals."""
    out = {}
    for b in plan.installed_buses():
        gp = tech.c_p
        ge = tech.c_e
        for day_id, sol in sols.items():
            w = weights[day_id]
            c = sol.bus_col(b)
            gp += w * float(np.sum(sol.phi_ch[:, c] + sol.phi_dis[:, c]))
            ge += w * float(np.sum(sol.phi_soc[:, c]))
        out[b] = (gp, ge)
    return out


def build_sgsp(days: list[TypicalDay], prices: dict[str, DispatchSolution],
               tech: StorageTech, bus: str) -> LinearProgram:
    """Price-taker LP for a marginal 1 MWh unit at ``bus``.

    Variables are the unit's dispatch over every typical day plus its
    power/energy ratio rho (the power rating, since the energy rating is
    normalized to 1 MWh).  Prices are frozen at the current iteration's
    duals.  The optimal objective is the net daily cost of the unit
    excluding the energy-capital constant ``c_e``.
    """
    lp = LinearProgram(name=f"sgsp[{bus}]")
    lp.add_var("rho", lb=tech.rho_min, ub=tech.rho_max, cost=tech.c_p)
    for day in days:
        sol = prices[day.day_id]
        w = day.weight
        c = sol.bus_col(bus)
        d = day.day_id
        for t in range(1, day.n_hours + 1):
            lam = sol.lmp[t - 1, c]
            lp.add_var(f"pch[{d},{t}]", lb=0.0,
                       cost=w * (lam / tech.eta_ch + tech.c_ch))
            lp.add_var(f"pdis[{d},{t}]", lb=0.0,
                       cost=w * (-lam * tech.eta_dis + tech.c_dis))
            lp.add_var(f"reu[{d},{t}]", lb=0.0,
                       cost=w * (-sol.lam_ru[t - 1] * tech.eta_dis + tech.c_eu))
            lp.add_var(f"red[{d},{t}]", lb=0.0,
                       cost=w * (-sol.lam_rd[t - 1] / tech.eta_ch + tech.c_ed))
            lp.add_var(f"esoc[{d},{t}]", lb=-np.inf)
        for t in range(1, day.n_hours + 1):
            soc = [(f"esoc[{d},{t}]", 1.0), (f"pch[{d},{t}]", -1.0),
                   (f"pdis[{d},{t}]", 1.0)]
            if t > 1:
                soc.append((f"esoc[{d},{t-1}]", -1.0))
            lp.add_row(f"soc[{d},{t}]", soc, EQ, 0.0)
            lp.add_row(f"chcap[{d},{t}]",
                       [(f"pch[{d},{t}]", 1.0), (f"red[{d},{t}]", 1.0),
                        ("rho", -1.0)], LE, 0.0)
            lp.add_row(f"discap[{d},{t}]",
                       [(f"pdis[{d},{t}]", 1.0), (f"reu[{d},{t}]", 1.0),
                        ("rho", -1.0)], LE, 0.0)
            lp.add_row(f"socmax[{d},{t}]",
                       [(f"esoc[{d},{t}]", 1.0), (f"red[{d},{t}]", tech.t_es)],
                       LE, 1.0)
            lp.add_row(f"socmin[{d},{t}]",
                       [(f"esoc[{d},{t}]", 1.0), (f"reu[{d},{t}]", -tech.t_es)],
                       GE, 0.0)
    return lp


def solve_sgsp(days: list[TypicalDay], prices: dict[str, DispatchSolution],
               tech: StorageTech, bus: str) -> tuple[float, float]:
    """Return (g0, rho0): marginal-unit net daily cost and its P/E ratio."""
    lp = build_sgsp(days, prices, tech, bus)
    sol = lp_core.solve(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"marginal-unit LP {sol.status} at bus {bus}")
    return sol.objective + tech.c_e, sol.value("rho")


def split_subgradient(g0: float, rho0: float) -> tuple[float, float]:
    """Project the marginal-unit value onto the rating coordinates."""
    return g0 * rho0 / (1.0 + rho0), g0 / (1.0 + rho0)


def compute_subgradients(net: Network, days: list[TypicalDay],
                         sols: dict[str, DispatchSolution], plan: Plan,
                         tech: StorageTech,
                         pool=None) -> tuple[dict[str, tuple[float, float]],
                                             dict[str, str]]:
    """Subgradient pair and branch tag for every candidate bus."""
    weights = {day.day_id: day.weight for day in days}
    grads = subgrad_installed(sols, weights, tech, plan)
    branch = {b: "BE" for b in grads}
    empty = [b for b in net.candidate_buses if b not in grads]

    def one(b):
        g0, rho0 = solve_sgsp(days, sols, tech, b)
        return b, split_subgradient(g0, rho0)

    results = pool.map(one, empty) if pool is not None else map(one, empty)
    for b, pair in results:
        grads[b] = pair
        branch[b] = "BN"
    return grads, branch


def revenue_identity(plan: Plan, subgrads: dict[str, tuple[float, float]],
                     tech: StorageTech) -> float:
    """Storage revenue reconstructed from the installed-bus subgradients."""
    total = 0.0
    for b, (p, e) in plan.ratings.items():
        gp, ge = subgrads[b]
        total -= (gp - tech.c_p) * p + (ge - tech.c_e) * e
    return total


def assemble_cut(net: Network, plan: Plan, sampled_cost: float,
                 subgrads: dict[str, tuple[float, float]],
                 branch: dict[str, str], iteration: int) -> Cut:
    buses = tuple(net.candidate_buses)
    missing = [b for b in buses if b not in subgrads]
    if missing:
        raise ValueError(f"missing subgradient for buses {missing}")
    return Cut(
        iteration=iteration,
        buses=buses,
        point_p=tuple(plan.power(b) for b in buses),
        point_e=tuple(plan.energy(b) for b in buses),
        sampled_cost=sampled_cost,
        g_p=tuple(subgrads[b][0] for b in buses),
        g_e=tuple(subgrads[b][1] for b in buses),
        branch=tuple(branch[b] for b in buses),
    )


def export_cut_table(cuts: list[Cut]) -> str:
    """Cuts as tabular text for convergence diagnostics."""
    lines = ["# iteration bus g_p g_e branch"]
    for cut in cuts:
        for b, gp, ge, br in zip(cut.buses, cut.g_p, cut.g_e, cut.branch):
            lines.append(f"{cut.iteration} {b} {gp:.6f} {ge:.6f} {br}")
    return "\n".join(lines) + "\n"
