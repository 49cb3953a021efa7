"""Generic linear-program container and solver with primal and dual output.

This is the single numerical engine behind dispatch, the marginal-unit
subproblem, the master problem and the monolithic baseline.  Solving is
delegated to HiGHS through :func:`scipy.optimize.linprog`; the wrapper
fixes the dual sign convention used throughout the package:

* the dual of a row is d(objective)/d(rhs) of the row *as written*, so
  under minimization ``<=`` rows have nonpositive duals, ``>=`` rows
  nonnegative duals, and equality rows free duals;
* reduced costs follow the same convention for variable bounds
  (nonnegative at a lower bound, nonpositive at an upper bound).

HiGHS is deterministic for identical input, so repeated solves return
bit-identical solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

LE, GE, EQ = "<=", ">=", "="

FEAS_TOL = 1e-7
GAP_TOL = 1e-8
COMP_TOL = 1e-6

_HIGHS_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


class LPError(Exception):
    """Malformed linear program."""


@dataclass
class _Row:
    name: str
    coeffs: list[tuple[int, float]]
    relation: str
    rhs: float


class LinearProgram:
    """A minimization LP with named variables and named constraint rows."""

    def __init__(self, name: str = "lp"):
        self.name = name
        self.var_names: list[str] = []
        self._var_index: dict[str, int] = {}
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.cost: list[float] = []
        self.rows: list[_Row] = []
        self._row_index: dict[str, int] = {}

    def add_var(self, name: str, lb: float = 0.0, ub: float = math.inf,
                cost: float = 0.0) -> int:
        if name in self._var_index:
            raise LPError(f"duplicate variable {name}")
        if lb > ub:
            raise LPError(f"variable {name}: lb {lb} exceeds ub {ub}")
        idx = len(self.var_names)
        self.var_names.append(name)
        self._var_index[name] = idx
        self.lb.append(lb)
        self.ub.append(ub)
        self.cost.append(cost)
        return idx

    def var(self, name: str) -> int:
        return self._var_index[name]

    def add_to_cost(self, name: str, coef: float):
        self.cost[self._var_index[name]] += coef

    def add_row(self, name: str, coeffs: list[tuple[str, float]], relation: str,
                rhs: float):
        if name in self._row_index:
            raise LPError(f"duplicate row {name}")
        if relation not in (LE, GE, EQ):
            raise LPError(f"row {name}: bad relation {relation!r}")
        resolved = []
        for var_name, coef in coeffs:
            if var_name not in self._var_index:
                raise LPError(f"row {name}: unknown variable {var_name}")
            if coef != 0.0:
                resolved.append((self._var_index[var_name], float(coef)))
        self._row_index[name] = len(self.rows)
        self.rows.append(_Row(name, resolved, relation, float(rhs)))

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def nnz(self) -> int:
        return sum(len(r.coeffs) for r in self.rows)

    def write_lp_format(self, path):
        """Dump in CPLEX LP text format for external cross-checking."""
        def term(coef, name):
            sign = "+" if coef >= 0 else "-"
            return f" {sign} {abs(coef):.17g} {name}"

        with open(path, "w") as fh:
            fh.write(f"\\ {self.name}\nMinimize\n obj:")
            fh.write("".join(term(c, n) for n, c in zip(self.var_names, self.cost)
                             if c != 0.0) or " 0 " + self.var_names[0])
            fh.write("\nSubject To\n")
            rel = {LE: "<=", GE: ">=", EQ: "="}
            for row in self.rows:
                body = "".join(term(c, self.var_names[j]) for j, c in row.coeffs)
                fh.write(f" {row.name}:{body} {rel[row.relation]} {row.rhs:.17g}\n")
            fh.write("Bounds\n")
            for name, lo, hi in zip(self.var_names, self.lb, self.ub):
                lo_s = f"{lo:.17g}" if math.isfinite(lo) else "-inf"
                hi_s = f"{hi:.17g}" if math.isfinite(hi) else "+inf"
                fh.write(f" {lo_s} <= {name} <= {hi_s}\n")
            fh.write("End\n")


@dataclass
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: float = math.nan
    x: np.ndarray = field(default_factory=lambda: np.empty(0))
    duals: np.ndarray = field(default_factory=lambda: np.empty(0))
    reduced_costs: np.ndarray = field(default_factory=lambda: np.empty(0))
    var_names: list[str] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)
    _var_index: dict[str, int] = field(default_factory=dict, repr=False)
    _row_index: dict[str, int] = field(default_factory=dict, repr=False)

    def value(self, name: str) -> float:
        return float(self.x[self._var_index[name]])

    def dual(self, name: str) -> float:
        return float(self.duals[self._row_index[name]])

    def has_row(self, name: str) -> bool:
        return name in self._row_index


_STATUS = {0: "optimal", 2: "infeasible", 3: "unbounded"}


def solve(lp: LinearProgram) -> LPSolution:
    """Solve to optimality, returning primal values, row duals and reduced costs."""
    n = lp.n_vars
    if n == 0:
        raise LPError("no variables")
    c = np.asarray(lp.cost, dtype=float)
    bounds = list(zip(lp.lb, lp.ub))

    ub_rows, eq_rows = [], []
    data_ub, i_ub, j_ub, b_ub = [], [], [], []
    data_eq, i_eq, j_eq, b_eq = [], [], [], []
    for k, row in enumerate(lp.rows):
        if row.relation == EQ:
            r = len(eq_rows)
            eq_rows.append(k)
            for j, coef in row.coeffs:
                i_eq.append(r)
                j_eq.append(j)
                data_eq.append(coef)
            b_eq.append(row.rhs)
        else:
            sign = 1.0 if row.relation == LE else -1.0
            r = len(ub_rows)
            ub_rows.append(k)
            for j, coef in row.coeffs:
                i_ub.append(r)
                j_ub.append(j)
                data_ub.append(sign * coef)
            b_ub.append(sign * row.rhs)

    kwargs = {}
    if ub_rows:
        kwargs["A_ub"] = csr_matrix((data_ub, (i_ub, j_ub)), shape=(len(ub_rows), n))
        kwargs["b_ub"] = np.asarray(b_ub)
    if eq_rows:
        kwargs["A_eq"] = csr_matrix((data_eq, (i_eq, j_eq)), shape=(len(eq_rows), n))
        kwargs["b_eq"] = np.asarray(b_eq)

    res = linprog(c, bounds=bounds, method="highs", options=_HIGHS_OPTIONS, **kwargs)
    status = _STATUS.get(res.status)
    if status is None:
        raise LPError(f"solver failure on {lp.name}: {res.message}")
    row_names = [r.name for r in lp.rows]
    if status != "optimal":
        return LPSolution(status=status, var_names=list(lp.var_names),
                          row_names=row_names)

    duals = np.zeros(lp.n_rows)
    for r, k in enumerate(ub_rows):
        marg = res.ineqlin.marginals[r]
        duals[k] = marg if lp.rows[k].relation == LE else -marg
    for r, k in enumerate(eq_rows):
        duals[k] = res.eqlin.marginals[r]
    reduced = np.asarray(res.lower.marginals) + np.asarray(res.upper.marginals)

    return LPSolution(
        status="optimal",
        objective=float(res.fun),
        x=np.asarray(res.x, dtype=float),
        duals=duals,
        reduced_costs=reduced,
        var_names=list(lp.var_names),
        row_names=row_names,
        _var_index=dict(lp._var_index),
        _row_index=dict(lp._row_index),
    )


def dual_objective(sol: LPSolution, lp: LinearProgram) -> float:
    """Dual objective from row duals, reduced costs, bounds and rhs values."""
    total = 0.0
    for row, y in zip(lp.rows, sol.duals):
        total += y * row.rhs
    for lo, hi, z in zip(lp.lb, lp.ub, sol.reduced_costs):
        if z > 0 and math.isfinite(lo):
            total += z * lo
        elif z < 0 and math.isfinite(hi):
            total += z * hi
    return total


def duality_gap(sol: LPSolution, lp: LinearProgram) -> float:
    """Relative primal-dual objective mismatch of an optimal solution."""
    if sol.status != "optimal":
        raise LPError("duality_gap requires an optimal solution")
    dual = dual_objective(sol, lp)
    return abs(sol.objective - dual) / max(1.0, abs(sol.objective))


def max_constraint_violation(sol: LPSolution, lp: LinearProgram) -> float:
    worst = 0.0
    for row in lp.rows:
        lhs = sum(coef * sol.x[j] for j, coef in row.coeffs)
        if row.relation == LE:
            worst = max(worst, lhs - row.rhs)
        elif row.relation == GE:
            worst = max(worst, row.rhs - lhs)
        else:
            worst = max(worst, abs(lhs - row.rhs))
    for lo, hi, x in zip(lp.lb, lp.ub, sol.x):
        worst = max(worst, lo - x, x - hi)
    return worst


def max_complementarity_violation(sol: LPSolution, lp: LinearProgram) -> float:
    worst = 0.0
    for row, y in zip(lp.rows, sol.duals):
        if row.relation == EQ:
            continue
        lhs = sum(coef * sol.x[j] for j, coef in row.coeffs)
        worst = max(worst, abs(y * (row.rhs - lhs)))
    return worst
