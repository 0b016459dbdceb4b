import random
from fractions import Fraction

import pytest

from nearspan.errors import ConfigError
from nearspan.schedule import (
    PhaseSchedule,
    build_schedule,
    ceil_root_power,
    floor_log2,
    phase_count,
    radius_closed_form,
    radius_recurrence,
    to_fraction,
)


def test_phase_count_example():
    assert phase_count(4, 3) == (0, 3)
    assert phase_count(8, 3) == (1, 4)


def test_radius_and_delta_example():
    s = build_schedule(64, 4, 3, "exploratory", "1/2")
    assert s.R[1] == 6
    assert s.R[2] == 102
    assert s.delta[2] == 208
    assert s.delta[0] == 1 and s.delta[1] == 14


def test_r1_is_two_over_rho():
    for kappa, c in [(3, 3), (6, 4), (9, 5)]:
        s = build_schedule(100, kappa, c, "exploratory", "1/7")
        assert s.R[1] == 2 * c


def test_degree_thresholds():
    s = build_schedule(256, 4, 3, "exploratory", "1/2")
    assert s.deg[0] == 4
    assert s.deg[1:] == (7, 7, 7)  # ceil(256 ** (1/3)) = 7
    assert all(d <= s.deg_cap for d in s.deg)


def test_ceil_root_power_is_exact():
    assert ceil_root_power(256, 1, 4) == 4
    assert ceil_root_power(257, 1, 4) == 5
    assert ceil_root_power(1000, 1, 3) == 10
    assert ceil_root_power(1001, 1, 3) == 11
    assert ceil_root_power(16, 2, 4) == 4


def test_floor_log2():
    assert floor_log2(Fraction(4, 3)) == 0
    assert floor_log2(Fraction(8, 3)) == 1
    assert floor_log2(Fraction(4)) == 2


def test_guaranteed_identities():
    s = build_schedule(128, 4, 3, "guaranteed", "1/2")
    assert s.eps == Fraction(1, 2) * Fraction(1, 3) / (30 * s.ell)
    assert s.beta == (1 / s.eps) ** s.ell == (Fraction(30 * s.ell) / (Fraction(1, 3) * Fraction(1, 2))) ** s.ell
    assert s.stretch_bound_guaranteed and not s.notes


def test_exploratory_flags_unguaranteed_bound():
    assert not build_schedule(64, 4, 3, "exploratory", "1/2").stretch_bound_guaranteed
    assert build_schedule(64, 4, 3, "exploratory", "1/30").stretch_bound_guaranteed


@pytest.mark.parametrize(
    "args",
    [
        (1, 4, 3, "guaranteed", "1/2"),
        (64, 2, 3, "guaranteed", "1/2"),
        (64, 4, 2, "guaranteed", "1/2"),
        (64, 4, 5, "guaranteed", "1/2"),
        (64, 4, 3, "guaranteed", "3/2"),
        (64, 4, 3, "exploratory", "1"),
        (64, 4, 3, "exploratory", "0"),
        (64, 4, 3, "sideways", "1/2"),
        (64, 4, 3, "guaranteed", "abc"),
    ],
)
def test_invalid_configurations(args):
    with pytest.raises(ConfigError):
        build_schedule(*args)


def test_floats_are_refused():
    with pytest.raises(ConfigError):
        to_fraction(0.5)


def test_properties_on_random_triples():
    rng = random.Random(3)
    for _ in range(200):
        c = rng.randint(3, 8)
        kappa = rng.randint(c, 24)
        eps = Fraction(1, rng.randint(2, 60))
        s = build_schedule(rng.randint(2, 10**6), kappa, c, "exploratory", eps)
        assert s.R == tuple(radius_recurrence(eps, c, s.ell))
        for i in range(s.ell + 1):
            assert s.R[i] == radius_closed_form(eps, c, i)
            if i:
                assert s.R[i] > s.R[i - 1] and s.delta[i] > s.delta[i - 1]
            if s.rho >= 10 * eps:
                assert s.delta[i] <= 2 * (1 / eps) ** i
                if i:
                    assert s.R[i] <= 4 * c * (1 / eps) ** (i - 1)


def test_json_round_trip():
    s = build_schedule(300, 6, 4, "guaranteed", "1")
    data = s.to_json()
    assert data["beta"]["num"] == s.beta.numerator
    assert PhaseSchedule.from_json(data) == s
