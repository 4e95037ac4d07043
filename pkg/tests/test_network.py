from fractions import Fraction

from evsp.model import Customer, Demand, Instance, Station, Vehicle, two_station_instance
from evsp.network import build_homogeneous, smooth_and_prune


def test_homogeneous_counts():
    inst = two_station_instance()
    net = build_homogeneous(inst)
    assert {s: len(n) for s, n in net.nodes.items()} == {"0": 13, "1": 13}
    assert len(net.demand_arcs) == 6
    assert {s: len(a) for s, a in net.connecting.items()} == {"0": 12, "1": 12}


def test_connecting_arc_energy_is_rate_times_gap():
    inst = two_station_instance()
    net = build_homogeneous(inst)
    arcs = {(inst.times[a.tail], inst.times[a.head]): a.energy for a in net.connecting["0"]}
    assert arcs[(861, 871)] == 100
    assert arcs[(871, 895)] == 240
    # a 30-minute gap at 10 Wm/min
    assert Fraction(10) * 30 == 300
    assert all(e == 10 * (t1 - t0) for (t0, t1), e in arcs.items())


def test_demand_arcs_go_forward_in_time():
    net = build_homogeneous(two_station_instance())
    assert all(a.tail < a.head for a in net.demand_arcs)


def test_no_demands_gives_bare_paths():
    inst = Instance((Station("0", 1, 0), Station("1", 1, 1)), (Vehicle("v", "0", Fraction(5)),), (), 5, 1)
    net = build_homogeneous(inst)
    assert not net.demand_arcs
    assert all(len(n) == 2 for n in net.nodes.values())
    assert all(len(a) == 1 for a in net.connecting.values())


def test_smoothing_keeps_demand_endpoints():
    inst = two_station_instance()
    net = build_homogeneous(inst)
    sm = smooth_and_prune(net)
    keep = {0, inst.m} | {inst.index_of(t) for t in (495, 861, 871, 895, 900, 1241)}
    assert set(sm.nodes["0"]) == keep
    for s in sm.nodes:
        total = sum(a.energy for a in net.connecting[s])
        assert sum(a.energy for a in sm.connecting[s]) == total


def test_smoothing_merges_an_idle_node():
    # station 1 has no demand at time 20, so its node there is smoothed away
    c = (Customer("a", (Demand("0", 10, "1", 30, Fraction(1)),)), Customer("b", (Demand("0", 20, "0", 40, Fraction(1)),)))
    inst = Instance((Station("0", 2, 1), Station("1", 2, 1)), (Vehicle("v", "0", Fraction(9)),), c, 9, 1)
    net = build_homogeneous(inst)
    sm = smooth_and_prune(net)
    assert inst.index_of(20) in net.nodes["1"] and inst.index_of(20) not in sm.nodes["1"]
    assert sum(a.energy for a in sm.connecting["1"]) == sum(a.energy for a in net.connecting["1"])


def test_smoothing_is_a_fixpoint():
    sm = smooth_and_prune(build_homogeneous(two_station_instance()))
    again = smooth_and_prune(sm)
    assert again.nodes == sm.nodes
