import pytest
from hypothesis import given
from hypothesis import strategies as st

from storageplan import datafiles
from storageplan.datafiles import (ParseError, load_bundled_tech,
                                   parse_config, parse_days, parse_network,
                                   parse_plan, parse_tech, write_days,
                                   write_network, write_plan, write_tech)
from storageplan.instances import m2, neglmp
from storageplan.model import (Plan, capital_recovery_factor,
                               libes_marginal_cost, prorate_capital_cost,
                               split_round_trip_efficiency, validate_network)

finite_pos = st.floats(1e-6, 1e6, allow_nan=False, allow_infinity=False)


class TestNetworkRoundTrip:
    def test_exact(self):
        net = m2().net
        assert parse_network(write_network(net)) == net

    def test_with_lines(self):
        net = neglmp().net
        assert parse_network(write_network(net)) == net

    def test_comments_and_blanks_ignored(self):
        text = "# header\n\n[buses]\nb1  # trailing\n[candidates]\nb1\n" \
               "[lines]\n[generators]\ng1 b1 10 0 1 1 20 0 0\n"
        net = parse_network(text)
        assert net.buses == ("b1",)
        assert net.generators[0].g_max == 10.0

    def test_errors(self):
        with pytest.raises(ParseError, match="outside a known section"):
            parse_network("b1 b2\n")
        with pytest.raises(ParseError, match="line row"):
            parse_network("[lines]\nl1 b1 b2 0.1\n")
        with pytest.raises(ParseError, match="not a number"):
            parse_network("[lines]\nl1 b1 b2 x 5\n")
        with pytest.raises(ParseError, match="NaN"):
            parse_network("[lines]\nl1 b1 b2 nan 5\n")


class TestDaysRoundTrip:
    def test_exact(self):
        days = neglmp().days
        parsed = parse_days(write_days(days))
        assert parsed == days

    @given(st.lists(finite_pos, min_size=2, max_size=6))
    def test_profile_values_bit_exact(self, values):
        from storageplan.model import TypicalDay
        day = TypicalDay(day_id="x", weight=2.0, n_hours=len(values),
                         demand={"b1": tuple(values)})
        parsed = parse_days(write_days([day]))[0]
        assert parsed.demand["b1"] == tuple(values)

    def test_errors(self):
        with pytest.raises(ParseError, match="no days"):
            parse_days("# empty\n")
        with pytest.raises(ParseError, match="before the first"):
            parse_days("weight = 1\n")
        with pytest.raises(ParseError, match="unknown section"):
            parse_days("[day d1]\n[junk]\n")
        with pytest.raises(ParseError, match="outside a day"):
            parse_days("[demand]\nb1 1 2\n")
        with pytest.raises(ParseError, match="bad day attribute"):
            parse_days("[day d1]\ncolor = blue\n")


class TestTechRoundTrip:
    def test_bundled_techs_round_trip(self):
        for name in ("aa_caes", "libes"):
            tech = load_bundled_tech(name)
            assert parse_tech(write_tech(tech)) == tech

    def test_errors(self):
        with pytest.raises(ParseError, match="unknown tech field"):
            parse_tech("c_x = 1\n")
        with pytest.raises(ParseError, match="expected"):
            parse_tech("c_p 1 2\n")
        with pytest.raises(ParseError, match="rho"):
            parse_tech("c_p = 1\nc_e = 1\nrho_min = 2\nrho_max = 1\n"
                       "eta_ch = 0.9\neta_dis = 0.9\n")


class TestPlanRoundTrip:
    @given(finite_pos, finite_pos)
    def test_bit_exact(self, p, e):
        plan = Plan({"b1": (p, e)})
        assert parse_plan(write_plan(plan)) == plan

    def test_errors(self):
        with pytest.raises(ParseError, match="plan row"):
            parse_plan("b1 1\n")


class TestConfig:
    def test_parse(self):
        cfg = parse_config("epsilon = 0.1\nchi = 1.2\nmax_iter = 50\n"
                           "workers = 2\nseed = 7\nbudget_max = 100\n")
        assert cfg == {"epsilon": 0.1, "chi": 1.2, "max_iter": 50,
                       "workers": 2, "seed": 7, "budget_max": 100.0}
        assert isinstance(cfg["max_iter"], int)

    def test_unknown_key(self):
        with pytest.raises(ParseError, match="unknown config"):
            parse_config("verbosity = 3\n")


class TestBundledData:
    def test_compressed_air_config(self):
        tech = load_bundled_tech("aa_caes")
        crf = capital_recovery_factor(0.05, 20)
        assert tech.c_p == prorate_capital_cost(1250.0 * 1000, 0.05, 20)
        assert tech.c_e == prorate_capital_cost(150.0 * 1000, 0.05, 20)
        assert tech.c_p == pytest.approx(1_250_000 * crf / 365, rel=1e-12)
        assert tech.rho_min == 0.05 and tech.rho_max == 0.25
        assert tech.eta_ch * tech.eta_dis == pytest.approx(0.72)
        assert tech.eta_ch == split_round_trip_efficiency(0.72)

    def test_battery_config(self):
        tech = load_bundled_tech("libes")
        assert tech.c_p == prorate_capital_cost(409.0 * 1000, 0.05, 10)
        # energy capital is oversized for the 70% usable depth window
        assert tech.c_e == prorate_capital_cost(468.0 * 1000 / 0.7, 0.05, 10)
        assert tech.c_dis == libes_marginal_cost(406.0, 0.7, 1.5e-4) == 87.0
        assert tech.c_eu == pytest.approx(8.7)
        assert tech.c_ch == tech.c_ed == 0.0
        assert tech.rho_min == 0.1 and tech.rho_max == 4.0
        assert tech.eta_ch * tech.eta_dis == pytest.approx(0.9)

    def test_bundled_examples_parse_and_validate(self):
        from importlib import resources
        for name in ("m2", "neglmp"):
            root = resources.files("storageplan").joinpath(
                f"data/examples/{name}")
            net = parse_network(root.joinpath("network.txt").read_text())
            days = parse_days(root.joinpath("days.txt").read_text())
            tech = parse_tech(root.joinpath("tech.txt").read_text())
            assert validate_network(net, days).ok
            assert tech.eta_ch > 0

    def test_bundled_examples_match_builders(self):
        from importlib import resources
        root = resources.files("storageplan").joinpath("data/examples/m2")
        assert parse_network(root.joinpath("network.txt").read_text()) \
            == m2().net
        assert parse_days(root.joinpath("days.txt").read_text()) == m2().days
