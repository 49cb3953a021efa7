"""Per-typical-day economic dispatch: LP construction, solve, and pricing.

The hourly dispatch co-optimizes energy and regulation.  Storage enters
through its grid-side injections (``eta_dis * p_dis`` delivered,
``p_ch / eta_ch`` drawn), while the state-of-charge recursion tracks the
internal energy ``p_ch - p_dis``; efficiencies therefore appear in the
nodal balance and regulation rows, not in the recursion.  The initial
state of charge is zero and the end-of-day level is left free.

Dual conventions follow :mod:`storageplan.lp_core`: the nodal-balance
duals are the locational marginal prices, the regulation-requirement
duals the system regulation prices, and the storage rating rows carry
the nonpositive duals used for investment subgradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lp_core
from .lp_core import EQ, GE, LE, LinearProgram
from .model import INSTALLED_EPS, Network, Plan, StorageTech, TypicalDay


class DispatchInfeasibleError(Exception):
    def __init__(self, day_id: str, hour: int | None):
        where = f"hour {hour}" if hour is not None else "inter-hour coupling"
        super().__init__(f"dispatch infeasible on day {day_id} ({where})")
        self.day_id = day_id
        self.hour = hour


def add_day_block(lp: LinearProgram, net: Network, day: TypicalDay,
                  tech: StorageTech, storage_buses: list[str],
                  rating_vars: dict[str, tuple[str, str]] | None = None,
                  plan: Plan | None = None, weight: float = 1.0,
                  prefix: str = "") -> None:
    """Append one day's dispatch variables and rows to ``lp``.

    Storage ratings are either constants taken from ``plan`` or, for the
    monolithic investment LP, the variables named in ``rating_vars``.
    Objective coefficients are scaled by ``weight``.
    """
    T = day.n_hours
    gens = net.generators
    gens_at = {b: [] for b in net.buses}
    for i, g in enumerate(gens):
        gens_at[g.bus].append(i)
    lines_out = {b: [] for b in net.buses}
    lines_in = {b: [] for b in net.buses}
    for l, ln in enumerate(net.lines):
        lines_out[ln.from_bus].append(l)
        lines_in[ln.to_bus].append(l)

    p = prefix
    ref_bus = net.buses[0]

    for t in range(1, T + 1):
        for i, g in enumerate(gens):
            lp.add_var(f"{p}pg[{t},{i}]", lb=0.0, cost=weight * g.c_g)
            lp.add_var(f"{p}rgu[{t},{i}]", lb=0.0, ub=tech.t_ru * g.ramp_up,
                       cost=weight * g.c_gu)
            lp.add_var(f"{p}rgd[{t},{i}]", lb=0.0, ub=tech.t_rd * g.ramp_down,
                       cost=weight * g.c_gd)
        for b in net.buses:
            spill_cap = day.profile("spill_max", b)[t - 1]
            lp.add_var(f"{p}prs[{t},{b}]", lb=0.0, ub=spill_cap,
                       cost=weight * day.c_rs)
            if b == ref_bus:
                lp.add_var(f"{p}th[{t},{b}]", lb=0.0, ub=0.0)
            else:
                lp.add_var(f"{p}th[{t},{b}]", lb=-np.inf, ub=np.inf)
        for l, ln in enumerate(net.lines):
            lp.add_var(f"{p}f[{t},{l}]", lb=-ln.capacity, ub=ln.capacity)
        for b in storage_buses:
            lp.add_var(f"{p}pch[{t},{b}]", lb=0.0, cost=weight * tech.c_ch)
            lp.add_var(f"{p}pdis[{t},{b}]", lb=0.0, cost=weight * tech.c_dis)
            lp.add_var(f"{p}reu[{t},{b}]", lb=0.0, cost=weight * tech.c_eu)
            lp.add_var(f"{p}red[{t},{b}]", lb=0.0, cost=weight * tech.c_ed)
            # nonnegativity of the SoC is enforced by the socmin row, so
            # the variable itself is free (keeps the dual recursion clean)
            lp.add_var(f"{p}esoc[{t},{b}]", lb=-np.inf, ub=np.inf)

    storage_set = set(storage_buses)
    for t in range(1, T + 1):
        # nodal power balance
        for b in net.buses:
            coeffs = [(f"{p}pg[{t},{i}]", 1.0) for i in gens_at[b]]
            coeffs += [(f"{p}f[{t},{l}]", -1.0) for l in lines_out[b]]
            coeffs += [(f"{p}f[{t},{l}]", 1.0) for l in lines_in[b]]
            coeffs.append((f"{p}prs[{t},{b}]", -1.0))
            if b in storage_set:
                coeffs.append((f"{p}pdis[{t},{b}]", tech.eta_dis))
                coeffs.append((f"{p}pch[{t},{b}]", -1.0 / tech.eta_ch))
            rhs = day.profile("demand", b)[t - 1] - day.profile("renewable", b)[t - 1]
            lp.add_row(f"{p}bal[{t},{b}]", coeffs, EQ, rhs)

        # system regulation requirements
        req = sum(day.phi_r * day.profile("renewable", b)[t - 1]
                  + day.phi_d * day.profile("demand", b)[t - 1]
                  for b in net.buses)
        up = [(f"{p}rgu[{t},{i}]", 1.0) for i in range(len(gens))]
        up += [(f"{p}reu[{t},{b}]", tech.eta_dis) for b in storage_buses]
        lp.add_row(f"{p}regup[{t}]", up, GE, req)
        dn = [(f"{p}rgd[{t},{i}]", 1.0) for i in range(len(gens))]
        dn += [(f"{p}red[{t},{b}]", 1.0 / tech.eta_ch) for b in storage_buses]
        lp.add_row(f"{p}regdn[{t}]", dn, GE, req)

        # generator capacity with regulation headroom
        for i, g in enumerate(gens):
            lp.add_row(f"{p}gmax[{t},{i}]",
                       [(f"{p}pg[{t},{i}]", 1.0), (f"{p}rgu[{t},{i}]", 1.0)],
                       LE, g.g_max)
            lp.add_row(f"{p}gmin[{t},{i}]",
                       [(f"{p}pg[{t},{i}]", 1.0), (f"{p}rgd[{t},{i}]", -1.0)],
                       GE, g.g_min)
            if t > 1:
                lp.add_row(f"{p}rampup[{t},{i}]",
                           [(f"{p}pg[{t},{i}]", 1.0), (f"{p}pg[{t-1},{i}]", -1.0)],
                           LE, g.ramp_up)
                lp.add_row(f"{p}rampdn[{t},{i}]",
                           [(f"{p}pg[{t},{i}]", 1.0), (f"{p}pg[{t-1},{i}]", -1.0)],
                           GE, -g.ramp_down)

        # dc power flow definition
        for l, ln in enumerate(net.lines):
            lp.add_row(f"{p}flow[{t},{l}]",
                       [(f"{p}f[{t},{l}]", 1.0),
                        (f"{p}th[{t},{ln.from_bus}]", -1.0 / ln.reactance),
                        (f"{p}th[{t},{ln.to_bus}]", 1.0 / ln.reactance)],
                       EQ, 0.0)

        # storage rating and state-of-charge rows
        for b in storage_buses:
            soc = [(f"{p}esoc[{t},{b}]", 1.0), (f"{p}pch[{t},{b}]", -1.0),
                   (f"{p}pdis[{t},{b}]", 1.0)]
            if t > 1:
                soc.append((f"{p}esoc[{t-1},{b}]", -1.0))
            lp.add_row(f"{p}soc[{t},{b}]", soc, EQ, 0.0)

            ch = [(f"{p}pch[{t},{b}]", 1.0), (f"{p}red[{t},{b}]", 1.0)]
            dis = [(f"{p}pdis[{t},{b}]", 1.0), (f"{p}reu[{t},{b}]", 1.0)]
            emax = [(f"{p}esoc[{t},{b}]", 1.0), (f"{p}red[{t},{b}]", tech.t_es)]
            if rating_vars is not None:
                pv, ev = rating_vars[b]
                lp.add_row(f"{p}chcap[{t},{b}]", ch + [(pv, -1.0)], LE, 0.0)
                lp.add_row(f"{p}discap[{t},{b}]", dis + [(pv, -1.0)], LE, 0.0)
                lp.add_row(f"{p}socmax[{t},{b}]", emax + [(ev, -1.0)], LE, 0.0)
            else:
                lp.add_row(f"{p}chcap[{t},{b}]", ch, LE, plan.power(b))
                lp.add_row(f"{p}discap[{t},{b}]", dis, LE, plan.power(b))
                lp.add_row(f"{p}socmax[{t},{b}]", emax, LE, plan.energy(b))
            lp.add_row(f"{p}socmin[{t},{b}]",
                       [(f"{p}esoc[{t},{b}]", 1.0), (f"{p}reu[{t},{b}]", -tech.t_es)],
                       GE, 0.0)


def build_ed(net: Network, day: TypicalDay, plan: Plan,
             tech: StorageTech) -> LinearProgram:
    """The economic-dispatch LP for one typical day at a fixed plan."""
    plan.check_ratio_bounds(tech)
    for b in plan.ratings:
        if b not in net.candidate_buses:
            raise ValueError(f"plan bus {b} is not a storage candidate")
    lp = LinearProgram(name=f"ed[{day.day_id}]")
    storage_buses = [b for b in net.candidate_buses
                     if plan.power(b) > INSTALLED_EPS]
    add_day_block(lp, net, day, tech, storage_buses, plan=plan)
    return lp


@dataclass
class DispatchSolution:
    """Primal dispatch, prices, and rating-constraint duals for one day.

    Arrays are indexed ``[t, entity]`` with hour t running 0..n_hours-1 in
    the first axis; bus/generator/line axes follow network ordering.
    Storage columns are zero at buses without installed storage.
    """

    day_id: str
    n_hours: int
    buses: list[str]
    cost: float                 # operating cost of this day (unweighted)
    duality_gap: float
    p_g: np.ndarray
    r_gu: np.ndarray
    r_gd: np.ndarray
    p_rs: np.ndarray
    f: np.ndarray
    theta: np.ndarray
    p_ch: np.ndarray
    p_dis: np.ndarray
    r_eu: np.ndarray
    r_ed: np.ndarray
    e_soc: np.ndarray
    lmp: np.ndarray             # [t, b]
    lam_ru: np.ndarray          # [t]
    lam_rd: np.ndarray
    phi_ch: np.ndarray          # [t, b], <= 0
    phi_dis: np.ndarray
    phi_soc: np.ndarray
    psi_soc: np.ndarray         # >= 0
    gamma_e: np.ndarray
    storage_buses: list[str] = field(default_factory=list)

    def bus_col(self, bus: str) -> int:
        return self.buses.index(bus)


def extract_solution(sol: lp_core.LPSolution, net: Network, day: TypicalDay,
                     storage_buses: list[str], prefix: str = "",
                     lp: LinearProgram | None = None) -> DispatchSolution:
    T = day.n_hours
    nb, ng, nl = len(net.buses), len(net.generators), len(net.lines)
    bi = net.bus_index()
    p = prefix

    def grid(shape):
        return np.zeros(shape)

    out = DispatchSolution(
        day_id=day.day_id, n_hours=T, buses=list(net.buses),
        cost=sol.objective,
        duality_gap=lp_core.duality_gap(sol, lp) if lp is not None else np.nan,
        p_g=grid((T, ng)), r_gu=grid((T, ng)), r_gd=grid((T, ng)),
        p_rs=grid((T, nb)), f=grid((T, nl)), theta=grid((T, nb)),
        p_ch=grid((T, nb)), p_dis=grid((T, nb)), r_eu=grid((T, nb)),
        r_ed=grid((T, nb)), e_soc=grid((T, nb)),
        lmp=grid((T, nb)), lam_ru=grid(T), lam_rd=grid(T),
        phi_ch=grid((T, nb)), phi_dis=grid((T, nb)), phi_soc=grid((T, nb)),
        psi_soc=grid((T, nb)), gamma_e=grid((T, nb)),
        storage_buses=list(storage_buses),
    )
    for t in range(1, T + 1):
        k = t - 1
        for i in range(ng):
            out.p_g[k, i] = sol.value(f"{p}pg[{t},{i}]")
            out.r_gu[k, i] = sol.value(f"{p}rgu[{t},{i}]")
            out.r_gd[k, i] = sol.value(f"{p}rgd[{t},{i}]")
        for b in net.buses:
            c = bi[b]
            out.p_rs[k, c] = sol.value(f"{p}prs[{t},{b}]")
            out.theta[k, c] = sol.value(f"{p}th[{t},{b}]")
            out.lmp[k, c] = sol.dual(f"{p}bal[{t},{b}]")
        for l in range(nl):
            out.f[k, l] = sol.value(f"{p}f[{t},{l}]")
        out.lam_ru[k] = sol.dual(f"{p}regup[{t}]")
        out.lam_rd[k] = sol.dual(f"{p}regdn[{t}]")
        for b in storage_buses:
            c = bi[b]
            out.p_ch[k, c] = sol.value(f"{p}pch[{t},{b}]")
            out.p_dis[k, c] = sol.value(f"{p}pdis[{t},{b}]")
            out.r_eu[k, c] = sol.value(f"{p}reu[{t},{b}]")
            out.r_ed[k, c] = sol.value(f"{p}red[{t},{b}]")
            out.e_soc[k, c] = sol.value(f"{p}esoc[{t},{b}]")
            out.phi_ch[k, c] = sol.dual(f"{p}chcap[{t},{b}]")
            out.phi_dis[k, c] = sol.dual(f"{p}discap[{t},{b}]")
            out.phi_soc[k, c] = sol.dual(f"{p}socmax[{t},{b}]")
            out.psi_soc[k, c] = sol.dual(f"{p}socmin[{t},{b}]")
            out.gamma_e[k, c] = sol.dual(f"{p}soc[{t},{b}]")
    return out


def _first_infeasible_hour(net: Network, day: TypicalDay, plan: Plan,
                           tech: StorageTech) -> int | None:
    """Diagnose infeasibility by solving each hour without coupling rows."""
    for t in range(1, day.n_hours + 1):
        hour = TypicalDay(
            day_id=f"{day.day_id}:h{t}", weight=1.0, n_hours=1,
            demand={b: (pr[t - 1],) for b, pr in day.demand.items()},
            renewable={b: (pr[t - 1],) for b, pr in day.renewable.items()},
            spill_max={b: (pr[t - 1],) for b, pr in day.spill_max.items()},
            c_rs=day.c_rs, phi_d=day.phi_d, phi_r=day.phi_r,
        )
        lp = build_ed(net, hour, plan, tech)
        if lp_core.solve(lp).status != "optimal":
            return t
    return None


def solve_ed(net: Network, day: TypicalDay, plan: Plan,
             tech: StorageTech) -> DispatchSolution:
    lp = build_ed(net, day, plan, tech)
    sol = lp_core.solve(lp)
    if sol.status != "optimal":
        raise DispatchInfeasibleError(day.day_id,
                                      _first_infeasible_hour(net, day, plan, tech))
    storage_buses = [b for b in net.candidate_buses
                     if plan.power(b) > INSTALLED_EPS]
    return extract_solution(sol, net, day, storage_buses, lp=lp)


def storage_revenue(sol: DispatchSolution, tech: StorageTech,
                    weight: float) -> float:
    """Market revenue net of operating cost for all storage in one day."""
    energy = (sol.p_dis * sol.lmp * tech.eta_dis
              - sol.p_ch * sol.lmp / tech.eta_ch)
    reg = (sol.r_eu * sol.lam_ru[:, None] * tech.eta_dis
           + sol.r_ed * sol.lam_rd[:, None] / tech.eta_ch)
    opcost = (tech.c_dis * sol.p_dis + tech.c_ch * sol.p_ch
              + tech.c_eu * sol.r_eu + tech.c_ed * sol.r_ed)
    return weight * float(np.sum(energy + reg - opcost))


@dataclass
class SimultaneityReport:
    violations: list[tuple[int, str]]          # (hour 1-based, bus)
    condition_failures: list[tuple[int, str]]  # hours where the sufficient
                                               # condition does not hold


def relaxation_threshold(tech: StorageTech, lmp: float) -> float:
    """Right-hand side of the exact-relaxation sufficient condition."""
    return -(1.0 / tech.eta_dis - tech.eta_ch) * lmp


def check_no_simultaneous(sol: DispatchSolution, tech: StorageTech,
                          eps_p: float = 1e-6) -> SimultaneityReport:
    """Report simultaneous charge/discharge and where the sufficient
    condition ``c_dis + c_ch > -(1/eta_dis - eta_ch) * lmp`` fails."""
    violations = []
    failures = []
    for k in range(sol.n_hours):
        for c, b in enumerate(sol.buses):
            if sol.p_ch[k, c] > eps_p and sol.p_dis[k, c] > eps_p:
                violations.append((k + 1, b))
            if b in sol.storage_buses:
                if tech.c_dis + tech.c_ch <= relaxation_threshold(
                        tech, sol.lmp[k, c]):
                    failures.append((k + 1, b))
    return SimultaneityReport(violations, failures)


def export_dispatch_table(sol: DispatchSolution, net: Network) -> str:
    """Primal dispatch as tabular text, one row per (hour, entity)."""
    lines = ["# day hour entity kind value"]
    for k in range(sol.n_hours):
        for i, g in enumerate(net.generators):
            lines.append(f"{sol.day_id} {k+1} {g.gen_id} p_g {sol.p_g[k,i]:.6f}")
            lines.append(f"{sol.day_id} {k+1} {g.gen_id} r_gu {sol.r_gu[k,i]:.6f}")
            lines.append(f"{sol.day_id} {k+1} {g.gen_id} r_gd {sol.r_gd[k,i]:.6f}")
        for c, b in enumerate(sol.buses):
            if b in sol.storage_buses:
                for kind, arr in (("p_ch", sol.p_ch), ("p_dis", sol.p_dis),
                                  ("r_eu", sol.r_eu), ("r_ed", sol.r_ed),
                                  ("e_soc", sol.e_soc)):
                    lines.append(f"{sol.day_id} {k+1} {b} {kind} {arr[k,c]:.6f}")
            lines.append(f"{sol.day_id} {k+1} {b} p_rs {sol.p_rs[k,c]:.6f}")
    return "\n".join(lines) + "\n"


def export_price_table(sol: DispatchSolution) -> str:
    lines = ["# day hour bus lmp lam_ru lam_rd"]
    for k in range(sol.n_hours):
        for c, b in enumerate(sol.buses):
            lines.append(f"{sol.day_id} {k+1} {b} {sol.lmp[k,c]:.6f} "
                         f"{sol.lam_ru[k]:.6f} {sol.lam_rd[k]:.6f}")
    return "\n".join(lines) + "\n"
