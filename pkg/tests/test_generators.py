from collections import Counter
from fractions import Fraction

import pytest

from evsp.generators import (
    ConfigurationError, GridParams, VamoParams, admissible_distances, bpp_to_evsp, gen_grid, gen_vamo, load_histograms,
)
from evsp.model import validate_instance
from evsp.oracle import brute_force_optimum


def test_grid_is_valid_and_deterministic():
    a = gen_grid(GridParams(3, 30, seed=11))
    assert validate_instance(a) == []
    assert a == gen_grid(GridParams(3, 30, seed=11))
    assert a != gen_grid(GridParams(3, 30, seed=12))
    assert {len(c.demands) for c in a.customers} <= {1, 2, 3, 4}
    for s in a.stations:
        assert 10 <= s.capacity <= 20
        assert round(0.2 * s.capacity) <= s.chargers <= round(0.5 * s.capacity) + 1
    assert all(v.initial_energy == a.battery_capacity for v in a.vehicles)


def test_grid_demands_fit_their_rentals():
    inst = gen_grid(GridParams(4, 200, seed=3))
    for _, d in inst.demands():
        assert d.depart % 5 == 0 and d.arrive % 5 == 0
        assert 5 * 60 <= d.depart < 23 * 60
        assert 0 < d.energy < d.duration * Fraction(5 * 60000, 60)
        assert d.pickup != d.dropoff


def test_customer_prefix_is_stable():
    # customers draw from their own streams, so adding customers keeps the first ones
    small, big = gen_grid(GridParams(3, 10, seed=5)), gen_grid(GridParams(3, 20, seed=5))
    assert small.customers == big.customers[:10]


def test_bad_params():
    with pytest.raises(ValueError):
        GridParams(stations=1)


def test_vamo_scenario_one():
    inst = gen_vamo(VamoParams("I", 40, seed=1))
    assert validate_instance(inst) == []
    assert all(len(c.demands) == 1 for c in inst.customers)
    assert all(s.chargers == s.capacity for s in inst.stations)
    assert len(inst.vehicles) == 15 and all(v.plugged for v in inst.vehicles)


def test_vamo_scenario_two_has_multi_demand_customers():
    inst = gen_vamo(VamoParams("II", 60, seed=2))
    assert validate_instance(inst) == []
    assert max(len(c.demands) for c in inst.customers) > 1


def test_vamo_scenario_four_holds_whole_fleet():
    inst = gen_vamo(VamoParams("IV", 20, seed=4))
    assert validate_instance(inst) == []
    assert min(s.capacity for s in inst.stations) >= len(inst.vehicles)
    assert min(s.capacity for s in inst.stations) >= 15


def test_vamo_scenario_three_uses_grid_sizes():
    inst = gen_vamo(VamoParams("III", 20, seed=4))
    assert validate_instance(inst) == []
    assert all(10 <= s.capacity <= 20 for s in inst.stations)


def test_admissible_distances():
    h = load_histograms()
    assert admissible_distances(h, 30) == [5, 10]
    assert admissible_distances(h, 60)[-1] == 25
    with pytest.raises(ConfigurationError):
        gen_vamo(VamoParams("I", 3, histograms={"station_capacities": [1]}))


def test_missing_histogram_file():
    with pytest.raises(ConfigurationError):
        load_histograms("/nonexistent/hist.json")


def test_bpp_single_item():
    inst = bpp_to_evsp([0.5])
    assert len(inst.stations) == 1 and inst.stations[0].capacity == 1 and inst.stations[0].chargers == 0
    assert len(inst.vehicles) == 1 and len(inst.customers) == 2
    assert validate_instance(inst) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bpp_full_items(n):
    value, _ = brute_force_optimum(bpp_to_evsp([1.0] * n), 12, 6)
    assert value == n


def test_bpp_rejects_bad_items():
    with pytest.raises(ValueError):
        bpp_to_evsp([])
    with pytest.raises(ValueError):
        bpp_to_evsp([0.5, 1.2])


def test_demand_count_shape():
    inst = gen_grid(GridParams(3, 2000, seed=9))
    counts = Counter(len(c.demands) for c in inst.customers)
    assert counts[2] > counts[1] > counts[3] > counts[4] > 0
