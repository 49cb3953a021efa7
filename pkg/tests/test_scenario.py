import numpy as np
import pytest

from storageplan.scenario import ProfileError, cluster_days, load_profiles


def make_text(n_days, shapes, n_hours=24):
    """Profile file with one bus; ``shapes[d]`` selects a base profile."""
    bases = [
        [50 + 10 * np.sin(h / 3.0) for h in range(n_hours)],
        [80 + 20 * np.cos(h / 4.0) for h in range(n_hours)],
        [30 + 5 * np.sin(h / 2.0) for h in range(n_hours)],
    ]
    lines = ["hour b1:demand b1:renewable"]
    hour = 0
    for d in range(n_days):
        base = bases[shapes[d] % len(bases)]
        for h in range(n_hours):
            lines.append(f"{hour} {base[h]:.4f} {max(0.0, base[h] - 40):.4f}")
            hour += 1
    return "\n".join(lines) + "\n"


class TestLoadProfiles:
    def test_shapes(self):
        ps = load_profiles(make_text(3, [0, 1, 2]))
        assert ps.n_days == 3
        assert ps.n_hours == 24
        assert ps.demand["b1"].shape == (3, 24)
        assert ps.renewable["b1"].shape == (3, 24)
        assert ps.buses == ["b1"]

    def test_bad_header(self):
        with pytest.raises(ProfileError, match="header"):
            load_profiles("time b1:demand\n0 5\n")
        with pytest.raises(ProfileError, match="bad column"):
            load_profiles("hour b1:load\n0 5\n")

    def test_wrong_column_count(self):
        with pytest.raises(ProfileError, match="columns"):
            load_profiles("hour b1:demand\n0 5 6\n")

    def test_rejects_nan_and_negative(self):
        head = "hour b1:demand\n"
        with pytest.raises(ProfileError, match="non-finite"):
            load_profiles(head + "0 nan\n")
        with pytest.raises(ProfileError, match="negative"):
            load_profiles(head + "0 -3\n")
        with pytest.raises(ProfileError, match="not a number"):
            load_profiles(head + "0 abc\n")

    def test_partial_day_rejected(self):
        text = make_text(1, [0])
        text = "\n".join(text.splitlines()[:-2]) + "\n"
        with pytest.raises(ProfileError, match="whole number"):
            load_profiles(text)

    def test_empty(self):
        with pytest.raises(ProfileError):
            load_profiles("")
        with pytest.raises(ProfileError, match="no data rows"):
            load_profiles("hour b1:demand\n")


class TestClusterDays:
    def test_duplicate_days_cluster_together(self):
        ps = load_profiles(make_text(6, [0, 1, 0, 1, 0, 1]))
        days = cluster_days(ps, 2)
        assert len(days) == 2
        assert sorted(d.weight for d in days) == [3.0, 3.0]
        # medoids are the lowest-index member of each cluster
        assert sorted(d.day_id for d in days) == ["d1", "d2"]

    def test_weights_sum_to_source_days(self):
        ps = load_profiles(make_text(7, [0, 1, 2, 0, 1, 0, 2]))
        for k in (1, 2, 3, 7):
            days = cluster_days(ps, k)
            assert len(days) == k
            assert sum(d.weight for d in days) == ps.n_days

    def test_representative_is_a_source_day(self):
        ps = load_profiles(make_text(5, [0, 1, 2, 1, 0]))
        for day in cluster_days(ps, 2):
            idx = int(day.day_id[1:]) - 1
            assert day.demand["b1"] == pytest.approx(ps.demand["b1"][idx])
            assert day.renewable["b1"] == pytest.approx(
                ps.renewable["b1"][idx])
            assert day.spill_max == day.renewable

    def test_k_equals_n(self):
        ps = load_profiles(make_text(4, [0, 1, 2, 0]))
        days = cluster_days(ps, 4)
        assert [d.weight for d in days] == [1.0] * 4
        assert [d.day_id for d in days] == ["d1", "d2", "d3", "d4"]

    def test_k_validation(self):
        ps = load_profiles(make_text(3, [0, 1, 2]))
        with pytest.raises(ValueError, match="cluster count"):
            cluster_days(ps, 0)
        with pytest.raises(ValueError, match="cluster count"):
            cluster_days(ps, 4)

    def test_regulation_parameters_forwarded(self):
        ps = load_profiles(make_text(2, [0, 1]))
        day = cluster_days(ps, 1, c_rs=7.0, phi_d=0.1, phi_r=0.2)[0]
        assert day.c_rs == 7.0
        assert day.phi_d == 0.1
        assert day.phi_r == 0.2
