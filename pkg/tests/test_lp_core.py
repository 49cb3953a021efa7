import itertools
import math

import numpy as np
import pytest

from storageplan import lp_core
from storageplan.lp_core import EQ, GE, LE, LinearProgram, LPError


def small_lp():
    """min 2x + 3y  s.t.  x + y >= 4,  x <= 3,  x, y >= 0."""
    lp = LinearProgram("small")
    lp.add_var("x", lb=0.0, cost=2.0)
    lp.add_var("y", lb=0.0, cost=3.0)
    lp.add_row("cover", [("x", 1.0), ("y", 1.0)], GE, 4.0)
    lp.add_row("cap", [("x", 1.0)], LE, 3.0)
    return lp


class TestBuilder:
    def test_duplicate_var(self):
        lp = LinearProgram()
        lp.add_var("x")
        with pytest.raises(LPError):
            lp.add_var("x")

    def test_duplicate_row(self):
        lp = small_lp()
        with pytest.raises(LPError):
            lp.add_row("cover", [("x", 1.0)], LE, 1.0)

    def test_unknown_var_in_row(self):
        lp = LinearProgram()
        lp.add_var("x")
        with pytest.raises(LPError):
            lp.add_row("r", [("z", 1.0)], LE, 1.0)

    def test_bad_relation(self):
        lp = LinearProgram()
        lp.add_var("x")
        with pytest.raises(LPError):
            lp.add_row("r", [("x", 1.0)], "<", 1.0)

    def test_bad_bounds(self):
        lp = LinearProgram()
        with pytest.raises(LPError):
            lp.add_var("x", lb=2.0, ub=1.0)

    def test_counts(self):
        lp = small_lp()
        assert lp.n_vars == 2
        assert lp.n_rows == 2
        assert lp.nnz() == 3


class TestSolve:
    def test_small(self):
        sol = lp_core.solve(small_lp())
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(9.0)  # x=3, y=1
        assert sol.value("x") == pytest.approx(3.0)
        assert sol.value("y") == pytest.approx(1.0)

    def test_dual_signs(self):
        sol = lp_core.solve(small_lp())
        # >= row active: nonnegative dual equal to marginal cost of cover
        assert sol.dual("cover") == pytest.approx(3.0)
        # <= row active and relieving it saves money: nonpositive dual
        assert sol.dual("cap") == pytest.approx(-1.0)

    def test_equality_dual(self):
        lp = LinearProgram()
        lp.add_var("x", lb=-math.inf, cost=5.0)
        lp.add_row("fix", [("x", 1.0)], EQ, 2.0)
        sol = lp_core.solve(lp)
        assert sol.objective == pytest.approx(10.0)
        assert sol.dual("fix") == pytest.approx(5.0)

    def test_infeasible(self):
        lp = LinearProgram()
        lp.add_var("x", lb=0.0, ub=1.0)
        lp.add_row("r", [("x", 1.0)], GE, 2.0)
        assert lp_core.solve(lp).status == "infeasible"

    def test_unbounded(self):
        lp = LinearProgram()
        lp.add_var("x", lb=-math.inf, cost=1.0)
        assert lp_core.solve(lp).status == "unbounded"

    def test_no_vars(self):
        with pytest.raises(LPError):
            lp_core.solve(LinearProgram())

    def test_deterministic(self):
        a = lp_core.solve(small_lp())
        b = lp_core.solve(small_lp())
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.duals, b.duals)
        assert a.objective == b.objective


class TestDuality:
    def test_gap_zero_at_optimum(self):
        lp = small_lp()
        sol = lp_core.solve(lp)
        assert lp_core.duality_gap(sol, lp) <= 1e-9

    def test_gap_detects_perturbed_duals(self):
        lp = small_lp()
        sol = lp_core.solve(lp)
        k = sol._row_index["cover"]
        sol.duals[k] += 1.25  # dual objective shifts by 1.25 * rhs = 5
        gap = lp_core.duality_gap(sol, lp)
        assert gap == pytest.approx(5.0 / max(1.0, abs(sol.objective)))

    def test_gap_requires_optimal(self):
        lp = LinearProgram()
        lp.add_var("x", lb=0.0, ub=1.0)
        lp.add_row("r", [("x", 1.0)], GE, 2.0)
        sol = lp_core.solve(lp)
        with pytest.raises(LPError):
            lp_core.duality_gap(sol, lp)

    def test_feasibility_and_complementarity(self):
        lp = small_lp()
        sol = lp_core.solve(lp)
        assert lp_core.max_constraint_violation(sol, lp) <= lp_core.FEAS_TOL
        assert lp_core.max_complementarity_violation(sol, lp) \
            <= lp_core.COMP_TOL


def _vertex_optimum(c, rows, box):
    """Brute-force optimum of min c.x over {A x (rel) b, 0 <= x <= box}
    by enumerating vertices (pairwise constraint intersections in 2-d)."""
    halfplanes = []  # (a, b) meaning a.x <= b
    for a, rel, b in rows:
        if rel == LE:
            halfplanes.append((np.asarray(a, float), b))
        else:
            halfplanes.append((-np.asarray(a, float), -b))
    halfplanes.append((np.array([1.0, 0.0]), box))
    halfplanes.append((np.array([0.0, 1.0]), box))
    halfplanes.append((np.array([-1.0, 0.0]), 0.0))
    halfplanes.append((np.array([0.0, -1.0]), 0.0))
    best = None
    for (a1, b1), (a2, b2) in itertools.combinations(halfplanes, 2):
        A = np.array([a1, a2])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        x = np.linalg.solve(A, [b1, b2])
        if all(a @ x <= b + 1e-9 for a, b in halfplanes):
            val = float(np.dot(c, x))
            if best is None or val < best:
                best = val
    return best


class TestAgainstVertexEnumeration:
    @pytest.mark.parametrize("seed", range(8))
    def test_random_2d(self, seed):
        rng = np.random.default_rng(seed)
        c = rng.uniform(-5, 5, 2)
        rows = []
        for i in range(4):
            a = rng.uniform(-1, 1, 2)
            rel = LE if rng.random() < 0.5 else GE
            # keep the origin-anchored box feasible region nonempty
            b = float(rng.uniform(0.5, 5)) if rel == LE else float(
                rng.uniform(-5, -0.5))
            rows.append((a, rel, b))
        lp = LinearProgram("rand2d")
        lp.add_var("x", lb=0.0, ub=10.0, cost=float(c[0]))
        lp.add_var("y", lb=0.0, ub=10.0, cost=float(c[1]))
        for i, (a, rel, b) in enumerate(rows):
            lp.add_row(f"r{i}", [("x", float(a[0])), ("y", float(a[1]))],
                       rel, b)
        expected = _vertex_optimum(c, rows, 10.0)
        sol = lp_core.solve(lp)
        if expected is None:
            assert sol.status == "infeasible"
        else:
            assert sol.status == "optimal"
            assert sol.objective == pytest.approx(expected, abs=1e-7)


class TestLPFormat:
    def test_dump_contains_structure(self, tmp_path):
        path = tmp_path / "out.lp"
        small_lp().write_lp_format(path)
        text = path.read_text()
        assert "Minimize" in text
        assert "cover:" in text
        assert ">= 4" in text
        assert "Bounds" in text
