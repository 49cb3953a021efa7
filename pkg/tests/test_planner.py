import pytest

from storageplan import oracle
from storageplan.model import Plan
from storageplan.planner import (default_budget_min, evaluate_plan,
                                 format_report, format_trace, inner_loop,
                                 outer_loop)


class TestEvaluatePlan:
    def test_fixed_plan_metrics(self, m2):
        res = evaluate_plan(m2.net, m2.days, m2.tech, Plan({"b1": (8.0, 8.0)}))
        assert res.baseline_cost == pytest.approx(2100.0)
        assert res.system_cost == pytest.approx(2100.0 - 40 * 8 + 16)
        assert res.investment_cost == pytest.approx(16.0)
        assert res.revenue == pytest.approx(320.0)
        assert res.achieved_return == pytest.approx(20.0)
        assert res.day_costs == {"d1": pytest.approx(1780.0)}

    def test_empty_plan(self, m2):
        res = evaluate_plan(m2.net, m2.days, m2.tech, Plan())
        assert res.system_cost == res.baseline_cost == pytest.approx(2100.0)
        assert res.achieved_return is None

    def test_ratio_violation_names_bus(self, m2):
        with pytest.raises(ValueError, match="bus b1"):
            evaluate_plan(m2.net, m2.days, m2.tech, Plan({"b1": (9.0, 1.0)}))


class TestInnerLoop:
    def test_worthless_storage_builds_nothing(self, m1):
        res = inner_loop(m1.net, m1.days, m1.tech, None)
        assert res.converged
        assert res.plan.is_empty()
        assert res.system_cost == pytest.approx(2600.0)
        assert res.saving == pytest.approx(0.0)

    def test_two_tier_reaches_optimum(self, m2):
        res = inner_loop(m2.net, m2.days, m2.tech, None, epsilon=0.05)
        assert res.converged
        assert res.system_cost == pytest.approx(1720.0, rel=1e-5)
        assert res.plan.power("b1") == pytest.approx(10.0, rel=1e-4)
        assert res.lower_bound <= res.system_cost + 1e-6
        # iteration trace: lower bounds never decrease
        lbs = [r.lower_bound for r in res.iterations]
        assert all(a <= b + 1e-6 for a, b in zip(lbs, lbs[1:]))

    def test_zero_budget_means_no_build(self, m2):
        res = inner_loop(m2.net, m2.days, m2.tech, 0.0)
        assert res.plan.is_empty()
        assert res.system_cost == pytest.approx(2100.0)

    def test_epsilon_validated(self, m2):
        with pytest.raises(ValueError, match="epsilon"):
            inner_loop(m2.net, m2.days, m2.tech, None, epsilon=1.5)
        with pytest.raises(ValueError, match="max_iter"):
            inner_loop(m2.net, m2.days, m2.tech, None, max_iter=0)

    def test_deterministic(self, rand_instance):
        inst = rand_instance(2)
        a = inner_loop(inst.net, inst.days, inst.tech, inst.budget)
        b = inner_loop(inst.net, inst.days, inst.tech, inst.budget)
        assert a.system_cost == b.system_cost
        assert a.plan.ratings == b.plan.ratings

    def test_parallel_dispatch_matches_serial(self, rand_instance):
        inst = rand_instance(9)
        a = inner_loop(inst.net, inst.days, inst.tech, inst.budget, workers=1)
        b = inner_loop(inst.net, inst.days, inst.tech, inst.budget, workers=3)
        assert a.system_cost == pytest.approx(b.system_cost, rel=1e-12)
        assert a.plan.ratings == b.plan.ratings

    def test_cost_dominates_oracle_within_tolerance(self, rand_instance):
        inst = rand_instance(1)
        res = inner_loop(inst.net, inst.days, inst.tech, inst.budget,
                         epsilon=0.05)
        ora = oracle.solve_monolithic(inst.net, inst.days, inst.tech,
                                      inst.budget)
        rep = oracle.compare_to_oracle(res.system_cost, ora.system_cost,
                                       res.baseline_cost)
        assert rep.passed


class TestOuterLoop:
    def test_return_satisfied_first_round(self, m2_outer):
        inst = m2_outer
        res = outer_loop(inst.net, inst.days, inst.tech, chi=1.2,
                         budget_init=inst.budget, budget_min=1.0)
        assert res.converged and not res.return_unachievable
        assert res.revenue >= 1.2 * res.investment_cost - 1e-6
        assert len(res.outer_trace) == 1

    def test_unachievable_return(self, m2_outer):
        inst = m2_outer
        res = outer_loop(inst.net, inst.days, inst.tech, chi=1.5,
                         budget_init=inst.budget, budget_min=1.0,
                         max_outer=200)
        assert res.return_unachievable
        assert res.plan.is_empty()
        assert res.investment_cost == 0.0
        # budgets in the trace shrink monotonically after the first round
        budgets = [r.budget for r in res.outer_trace[1:]]
        assert all(a >= b for a, b in zip(budgets, budgets[1:]))

    def test_investment_non_increasing_in_chi(self, m2_outer):
        inst = m2_outer
        ces = []
        for chi in (1.0, 1.2, 1.5):
            res = outer_loop(inst.net, inst.days, inst.tech, chi=chi,
                             budget_init=inst.budget, budget_min=1.0,
                             max_outer=200)
            ces.append(res.investment_cost)
        assert all(a >= b - 1e-6 for a, b in zip(ces, ces[1:]))

    def test_chi_below_one_clamped(self, m2):
        with pytest.warns(UserWarning, match="clamping"):
            res = outer_loop(m2.net, m2.days, m2.tech, chi=0.5)
        assert res.converged

    def test_default_budget_min(self, m2):
        assert default_budget_min(m2.tech) == pytest.approx(
            1e-3 * (m2.tech.c_p + m2.tech.c_e))


class TestReports:
    def test_report_schema(self, m2):
        res = inner_loop(m2.net, m2.days, m2.tech, None)
        text = format_report(res)
        lines = text.splitlines()
        assert lines[0] == "schema_version = 1"
        assert "converged = true" in lines
        assert "[plan]" in lines
        assert "[day_costs]" in lines
        assert any(l.startswith("d1 ") for l in lines)

    def test_trace(self, m2):
        res = inner_loop(m2.net, m2.days, m2.tech, None)
        text = format_trace(res)
        assert text.startswith("# iteration")
        assert len(text.splitlines()) == 1 + len(res.iterations)
