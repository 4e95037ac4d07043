from fractions import Fraction

import pytest

from evsp.model import (
    Customer, Demand, Instance, Station, Vehicle, as_fraction, customer_rental_stats, initial_distribution,
    two_station_instance, validate_instance,
)


def _inst(stations, vehicles, customers=(), L=600, mu=10):
    return Instance(tuple(stations), tuple(vehicles), tuple(customers), L, mu)


def test_two_station_instance_is_valid():
    inst = two_station_instance()
    assert validate_instance(inst) == []
    assert inst.battery_capacity == 600 and inst.charge_rate == 10
    assert [c.id for c in inst.customers] == ["A", "B", "C"]


def test_time_grid_has_synthetic_start():
    inst = two_station_instance()
    assert inst.t0 == inst.times[0] == 494
    assert inst.m == 12
    assert inst.times[1:] == tuple(sorted({t for _, d in inst.demands() for t in (d.depart, d.arrive)}))


def test_depart_equal_arrive_is_flagged():
    inst = _inst([Station("0", 2, 1)], [Vehicle("v", "0", Fraction(600))],
                 [Customer("c", (Demand("0", 100, "0", 100, Fraction(1)),))])
    assert any("depart < arrive" in p for p in validate_instance(inst))


def test_too_many_chargers_is_flagged():
    inst = _inst([Station("0", 2, 3)], [])
    assert any("R_s <= C_s" in p for p in validate_instance(inst))


def test_overlapping_rentals_are_flagged():
    c = Customer("c", (Demand("0", 10, "1", 30, Fraction(1)), Demand("1", 20, "0", 40, Fraction(1))))
    inst = _inst([Station("0", 2, 1), Station("1", 2, 1)], [], [c])
    assert any("overlapping" in p for p in validate_instance(inst))


@pytest.mark.parametrize("cap, chargers, n, plugged", [(4, 2, 2, 0), (4, 2, 3, 1), (3, 3, 2, 2)])
def test_initial_distribution(cap, chargers, n, plugged):
    inst = _inst([Station("0", cap, chargers)], [Vehicle(f"v{k}", "0", Fraction(600)) for k in range(n)])
    out = initial_distribution(inst)
    assert sum(v.plugged for v in out.vehicles) == plugged
    assert initial_distribution(out) == out
    assert validate_instance(out) == []


def test_rental_stats():
    a = two_station_instance().customers[0]
    assert customer_rental_stats(a) == (227, 2, Fraction(227, 2))
    one = Customer("x", (Demand("0", 0, "1", 60, Fraction(1)),))
    assert customer_rental_stats(one) == (60, 1, 60)
    three = Customer("y", tuple(Demand("0", 100 * k, "0", 100 * k + 30, Fraction(1)) for k in range(3)))
    assert customer_rental_stats(three) == (90, 3, 30)


def test_as_fraction_is_exact():
    assert as_fraction(0.6) == Fraction(3, 5)
    assert as_fraction("7/3") == Fraction(7, 3)


def test_replace_rederives_grid():
    inst = two_station_instance()
    fewer = inst.replace(customers=inst.customers[:1])
    assert fewer.times == (744, 745, 861, 900, 1011)
