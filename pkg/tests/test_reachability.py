from fractions import Fraction

from evsp.model import Customer, Demand, Instance, Station, Vehicle, two_station_instance
from evsp.network import build_homogeneous
from evsp.reachability import achievable_demands, prune_customers, split_and_shift, vehicle_networks


def test_vehicle_at_station_1_reaches_first_demand_of_a():
    inst = two_station_instance()
    net = build_homogeneous(inst)
    v1 = inst.vehicles[1]
    assert v1.station == "1"
    assert (0, 0) in achievable_demands(inst, net, v1)


def test_vehicle_at_station_1_misses_early_departure_from_0():
    inst = two_station_instance()
    keys = achievable_demands(inst, build_homogeneous(inst), inst.vehicles[1])
    assert (1, 0) not in keys  # departs station 0 at 495, before v1 could get there


def _single(energy, L=100, start=Fraction(100)):
    c = Customer("c", (Demand("0", 10, "1", 20, Fraction(energy)),))
    return Instance((Station("0", 1, 0), Station("1", 1, 0)), (Vehicle("v", "0", start),), (c,), L, 1)


def test_empty_battery_cannot_start():
    inst = _single(5, start=Fraction(0))
    assert achievable_demands(inst, build_homogeneous(inst), inst.vehicles[0]) == frozenset()


def test_demand_above_capacity_is_pruned():
    inst = _single(150)
    net = build_homogeneous(inst)
    assert achievable_demands(inst, net, inst.vehicles[0]) == frozenset()
    _, removed = prune_customers(inst, {inst.vehicles[0].id: frozenset()})
    assert removed == {0}


def test_two_station_instance_prunes_nothing():
    _, _, removed = vehicle_networks(two_station_instance())
    assert removed == set()


def test_vehicle_networks_are_subnetworks():
    inst = two_station_instance()
    full = build_homogeneous(inst)
    nets, _, _ = vehicle_networks(inst)
    for net in nets.values():
        for s, nodes in net.nodes.items():
            assert set(nodes) <= set(full.nodes[s])
        assert len(net.demand_arcs) <= len(full.demand_arcs)
    assert sum(len(n.demand_arcs) for n in nets.values()) < 2 * len(full.demand_arcs)


def test_split_gives_four_halves_and_four_copies():
    sp = split_and_shift(two_station_instance())
    assert [s.id for s in sp.instance.stations] == ["0/U", "0/E", "1/U", "1/E"]
    assert len(sp.origin) == 24
    counts = {}
    for okey, _cat in sp.origin.values():
        counts[okey] = counts.get(okey, 0) + 1
    assert set(counts.values()) == {4}


def test_all_charger_station_is_not_split():
    c = Customer("c", (Demand("0", 10, "1", 20, Fraction(1)),))
    inst = Instance((Station("0", 2, 2), Station("1", 2, 2)), (Vehicle("v", "0", Fraction(9), True),), (c,), 9, 1)
    sp = split_and_shift(inst)
    assert [s.id for s in sp.instance.stations] == ["0", "1"]
    assert sp.station_origin["0"] == ("0", "charging")
    assert [d.depart for _, d in sp.instance.demands()] == [10]


def test_plain_half_shifts_departure_to_next_return():
    # at a plain-only half a vehicle returned at 100 is only available from
    # its next departure instant, 130
    c = (Customer("a", (Demand("1", 50, "0", 100, Fraction(1)),)),
         Customer("b", (Demand("0", 130, "1", 160, Fraction(1)),)))
    inst = Instance((Station("0", 1, 0), Station("1", 1, 1)), (Vehicle("v", "1", Fraction(9), True),), c, 9, 1)
    sp = split_and_shift(inst)
    arrivals = sorted({d.arrive for _, d in sp.instance.demands() if d.dropoff == "0"})
    assert arrivals == [130]
    assert sp.consume == {(0, 0): inst.index_of(100)}
