from fractions import Fraction

import pytest

from evsp.generators import bpp_to_evsp
from evsp.heuristics import validate_plan
from evsp.model import two_station_instance
from evsp.oracle import OracleLimitError, brute_force_optimum, solve_bpp_bruteforce


def test_two_station_optimum():
    inst = two_station_instance()
    value, plan = brute_force_optimum(inst)
    assert value == 444
    assert plan.objective(inst) == 444
    assert validate_plan(inst, plan) == []


def test_bpp_reduction_value():
    items = [Fraction(1, 2), Fraction(3, 5), Fraction(2, 5)]
    assert solve_bpp_bruteforce(items) == 2
    value, plan = brute_force_optimum(bpp_to_evsp(items), 12, 6)
    assert value == 4
    assert validate_plan(bpp_to_evsp(items), plan) == []


def test_zero_customers():
    inst = two_station_instance().replace(customers=())
    assert brute_force_optimum(inst)[0] == 0


def test_cap_is_enforced():
    with pytest.raises(OracleLimitError):
        brute_force_optimum(two_station_instance(), max_customers=2)
    with pytest.raises(OracleLimitError):
        solve_bpp_bruteforce([0.1] * 13)


@pytest.mark.parametrize("items, bins", [([1.0, 1.0], 2), ([0.5], 1), ([0.5, 0.6, 0.4], 2), ([], 0),
                                         ([0.3, 0.3, 0.3, 0.3], 2), ([0.7, 0.6, 0.5, 0.2], 3)])
def test_bpp_bins(items, bins):
    assert solve_bpp_bruteforce(items) == bins


def test_bpp_rejects_bad_sizes():
    with pytest.raises(ValueError):
        solve_bpp_bruteforce([1.5])


def test_cold_search_matches_warm():
    inst = two_station_instance()
    assert brute_force_optimum(inst, warm=False)[0] == 444
