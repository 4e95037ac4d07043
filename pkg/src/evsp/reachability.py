"""Per-vehicle achievable demands, customer pruning, per-vehicle networks
and the station-splitting / demand-shifting transform."""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from .model import CHARGING, PLAIN, Customer, Demand, DemandKey, Instance, Station, Vehicle
from .network import Network, build_homogeneous, build_network

log = logging.getLogger(__name__)

AchievabilitySet = FrozenSet[DemandKey]


def achievable_demands(inst: Instance, net: Network, v: Vehicle) -> AchievabilitySet:
    """Forward label propagation of the best-case remaining energy of ``v``.

    Nodes the vehicle cannot reach carry no label (rather than a zero label),
    otherwise parking could create energy at stations the vehicle never visits.
    Recharging is credited optimistically: label + E_e capped at L on every
    connecting arc of a station that has chargers.
    """
    L = inst.battery_capacity
    label: Dict[Tuple[str, int], Fraction] = {(v.station, 0): v.initial_energy}
    ok: Set[DemandKey] = set()
    order = sorted(((i, s) for s, idx in net.nodes.items() for i in idx))
    for i, s in order:
        best = label.get((s, i))
        conn = net.conn_in(s, i)
        if conn is not None and (s, conn.tail) in label:
            gain = conn.energy if inst.station(s).chargers > 0 else 0
            cand = min(L, label[(s, conn.tail)] + gain)
            best = cand if best is None else max(best, cand)
        for a in net.demand_in(s, i):
            prev = label.get((a.tail_station, a.tail))
            if prev is not None and prev - a.energy >= 0:
                ok.add(a.demand)
                cand = prev - a.energy
                best = cand if best is None else max(best, cand)
        if best is not None:
            label[(s, i)] = best
    return frozenset(ok)


def prune_customers(
    inst: Instance, sets: Mapping[str, AchievabilitySet], origin: Optional[Mapping[DemandKey, DemandKey]] = None
) -> Tuple[Dict[str, AchievabilitySet], Set[int]]:
    """Drop every customer with a demand that no vehicle can achieve.

    ``origin`` maps demand keys of a transformed instance back to the demand
    they copy; coverage is judged on the original demands.
    """
    origin = origin or {}
    covered = {origin.get(k, k) for ks in sets.values() for k in ks}
    needed: Dict[int, Set[DemandKey]] = {}
    for key, _ in inst.demands():
        needed.setdefault(key[0], set()).add(origin.get(key, key))
    removed = {c for c, keys in needed.items() if not keys <= covered}
    pruned = {vid: frozenset(k for k in ks if origin.get(k, k)[0] not in removed) for vid, ks in sets.items()}
    if removed:
        log.debug("pruned customers %s", sorted(removed))
    return pruned, removed


def vehicle_index_sets(inst: Instance, keys: AchievabilitySet) -> Dict[str, Set[int]]:
    """I^v_s: endpoint indices of achievable demands at each station, plus 0."""
    out = {s.id: {0} for s in inst.stations}
    for k in keys:
        d = inst.demand(k)
        out[d.pickup].add(inst.index_of(d.depart))
        out[d.dropoff].add(inst.index_of(d.arrive))
    return out


def build_heterogeneous(
    inst: Instance, keys: AchievabilitySet, consume: Optional[Mapping[DemandKey, int]] = None
) -> Network:
    """Network restricted to the demands one vehicle can achieve."""
    idx = vehicle_index_sets(inst, keys)
    core = sorted(set().union(*idx.values())) if idx else [0]
    order = sorted(keys, key=lambda k: k)
    return build_network(inst, order, idx, core, {k: consume[k] for k in order if consume and k in consume})


def vehicle_networks(inst: Instance, consume: Optional[Mapping[DemandKey, int]] = None,
                     origin: Optional[Mapping[DemandKey, DemandKey]] = None):
    """Achievability, pruning and per-vehicle networks in one pass.

    Returns (networks by vehicle id, pruned sets, removed customer positions).
    """
    hom = build_homogeneous(inst)
    sets = {v.id: achievable_demands(inst, hom, v) for v in inst.vehicles}
    pruned, removed = prune_customers(inst, sets, origin)
    nets = {vid: build_heterogeneous(inst, ks, consume) for vid, ks in pruned.items()}
    return nets, pruned, removed


# -- splitting ---------------------------------------------------------------

U, E = "U", "E"


@dataclass
class SplitInstance:
    """Instance whose stations each have only one spot kind.

    ``origin`` maps every split demand key to (original key, k) with k in
    {UU, UE, EU, EE}. ``consume`` gives, for return-shifted copies, the index
    of the original return time. ``station_origin`` maps split station ids to
    (original station id, spot kind).
    """

    instance: Instance
    original: Instance
    origin: Dict[DemandKey, Tuple[DemandKey, str]]
    consume: Dict[DemandKey, int]
    station_origin: Dict[str, Tuple[str, str]]

    def original_key(self, key: DemandKey) -> DemandKey:
        return self.origin[key][0]


def _halves(s: Station) -> List[Tuple[str, str, Station]]:
    """(side, new id, station) for the non-empty halves of ``s``."""
    if s.chargers == 0:
        return [(U, s.id, s)]
    if s.chargers == s.capacity:
        return [(E, s.id, s)]
    return [
        (U, f"{s.id}/U", Station(f"{s.id}/U", s.plain_spots, 0)),
        (E, f"{s.id}/E", Station(f"{s.id}/E", s.chargers, s.chargers)),
    ]


def split_and_shift(inst: Instance) -> SplitInstance:
    halves = {s.id: _halves(s) for s in inst.stations}
    stations = [h for s in inst.stations for _, _, h in halves[s.id]]
    station_origin = {sid: (s.id, PLAIN if side == U else CHARGING) for s in inst.stations for side, sid, _ in halves[s.id]}
    side_id = {(s.id, side): sid for s in inst.stations for side, sid, _ in halves[s.id]}

    vehicles = []
    for v in inst.vehicles:
        sid = side_id.get((v.station, E if v.plugged else U))
        if sid is None:
            raise ValueError(f"vehicle {v.id}: no {'charging' if v.plugged else 'plain'} spot at station {v.station}")
        vehicles.append(Vehicle(v.id, sid, v.initial_energy, v.plugged))

    # departure / return time sets of plain (charger-free) stations, from the original times
    plain = {sid for sid, (_, kind) in station_origin.items() if kind == PLAIN}
    deps: Dict[str, List[int]] = {sid: [] for sid in plain}
    rets: Dict[str, List[int]] = {sid: [] for sid in plain}
    for _, d in inst.demands():
        for side, sid, _ in halves[d.pickup]:
            if sid in plain:
                deps[sid].append(d.depart)
        for side, sid, _ in halves[d.dropoff]:
            if sid in plain:
                rets[sid].append(d.arrive)
    for tbl in (deps, rets):
        for sid in tbl:
            tbl[sid] = sorted(set(tbl[sid]))

    t0, tm = inst.times[0], inst.times[-1]

    def shifted_departure(sid: str, t: int) -> int:
        r = rets[sid]
        p = bisect.bisect_right(r, t)
        last_return = r[p - 1] if p else t0
        dl = deps[sid]
        return dl[bisect.bisect_left(dl, last_return)]

    def shifted_return(sid: str, t: int) -> int:
        dl = deps[sid]
        p = bisect.bisect_left(dl, t)
        return dl[p] if p < len(dl) else tm

    customers = []
    origin: Dict[DemandKey, Tuple[DemandKey, str]] = {}
    consume: Dict[DemandKey, int] = {}
    for c, cust in enumerate(inst.customers):
        copies: List[Demand] = []
        for k, d in enumerate(cust.demands):
            for out_side, out_sid, _ in halves[d.pickup]:
                for in_side, in_sid, _ in halves[d.dropoff]:
                    dep = shifted_departure(out_sid, d.depart) if out_sid in plain else d.depart
                    arr = shifted_return(in_sid, d.arrive) if in_sid in plain else d.arrive
                    key = (c, len(copies))
                    origin[key] = ((c, k), out_side + in_side)
                    if arr != d.arrive:
                        consume[key] = inst.index_of(d.arrive)
                    copies.append(Demand(out_sid, dep, in_sid, arr, d.energy))
        customers.append(Customer(cust.id, tuple(copies)))

    split = Instance(
        tuple(stations), tuple(vehicles), tuple(customers), inst.battery_capacity, inst.charge_rate,
        name=f"{inst.name}-split", times=inst.times,
    )
    return SplitInstance(split, inst, origin, consume, station_origin)
