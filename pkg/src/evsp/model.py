"""Instance and solution-plan data model.

Times are integer minutes. Energies are exact ``Fraction`` values in
watt-minutes (Wm); 1 kWh = 60 000 Wm.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

WM_PER_KWH = 60_000

PLAIN = "plain"
CHARGING = "charging"

# (customer position, demand position) -- stable key for one demand
DemandKey = Tuple[int, int]


def as_fraction(value) -> Fraction:
    """Exact conversion; floats go through their repr so 0.6 stays 3/5."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Station:
    id: str
    capacity: int
    chargers: int

    @property
    def plain_spots(self) -> int:
        return self.capacity - self.chargers


@dataclass(frozen=True)
class Vehicle:
    id: str
    station: str
    initial_energy: Fraction
    plugged: bool = False


@dataclass(frozen=True)
class Demand:
    pickup: str
    depart: int
    dropoff: str
    arrive: int
    energy: Fraction

    @property
    def duration(self) -> int:
        return self.arrive - self.depart


@dataclass(frozen=True)
class Customer:
    id: str
    demands: Tuple[Demand, ...]

    @property
    def rental_time(self) -> int:
        return sum(d.duration for d in self.demands)


@dataclass(frozen=True)
class Instance:
    """An EVSP instance.

    ``times`` is the index set I: position 0 holds the synthetic
    start instant t_0 and positions 1..m the sorted distinct demand
    endpoints. Pass ``times`` to override the derived grid (used by the
    station-splitting transform, which must keep the original grid).
    """

    stations: Tuple[Station, ...]
    vehicles: Tuple[Vehicle, ...]
    customers: Tuple[Customer, ...]
    battery_capacity: Fraction
    charge_rate: Fraction
    name: str = "instance"
    t0: Optional[int] = None
    times: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "stations", tuple(self.stations))
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        object.__setattr__(self, "customers", tuple(self.customers))
        object.__setattr__(self, "battery_capacity", as_fraction(self.battery_capacity))
        object.__setattr__(self, "charge_rate", as_fraction(self.charge_rate))
        if self.times is None:
            endpoints = sorted({t for c in self.customers for d in c.demands for t in (d.depart, d.arrive)})
            if self.t0 is not None:
                start = self.t0
            else:
                # synthetic start one minute before the first event keeps every
                # connecting arc strictly positive in duration
                start = endpoints[0] - 1 if endpoints else 0
            # without demands a single idle period keeps every network non-empty
            object.__setattr__(self, "times", (start, *endpoints) if endpoints else (start, start + 1))
        else:
            object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "t0", self.times[0])

    # -- lookups -----------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.times) - 1

    def index_of(self, t: int) -> int:
        return self._time_index[t]

    @property
    def _time_index(self) -> Dict[int, int]:
        cache = self.__dict__.get("_tix")
        if cache is None:
            cache = {t: i for i, t in enumerate(self.times)}
            object.__setattr__(self, "_tix", cache)
        return cache

    def station(self, sid: str) -> Station:
        return self.stations[self.station_pos(sid)]

    def station_pos(self, sid: str) -> int:
        cache = self.__dict__.get("_spos")
        if cache is None:
            cache = {s.id: p for p, s in enumerate(self.stations)}
            object.__setattr__(self, "_spos", cache)
        return cache[sid]

    def vehicle_pos(self, vid: str) -> int:
        cache = self.__dict__.get("_vpos")
        if cache is None:
            cache = {v.id: p for p, v in enumerate(self.vehicles)}
            object.__setattr__(self, "_vpos", cache)
        return cache[vid]

    def customer_pos(self, cid: str) -> int:
        cache = self.__dict__.get("_cpos")
        if cache is None:
            cache = {c.id: p for p, c in enumerate(self.customers)}
            object.__setattr__(self, "_cpos", cache)
        return cache[cid]

    def vehicles_at(self, sid: str) -> List[Vehicle]:
        return [v for v in self.vehicles if v.station == sid]

    def demands(self) -> List[Tuple[DemandKey, Demand]]:
        """All demands in global order (customers, then demand position)."""
        return [((c, k), d) for c, cust in enumerate(self.customers) for k, d in enumerate(cust.demands)]

    def demand(self, key: DemandKey) -> Demand:
        return self.customers[key[0]].demands[key[1]]

    def global_demand_index(self) -> Dict[DemandKey, int]:
        return {key: g for g, (key, _) in enumerate(self.demands())}

    def replace(self, **changes) -> "Instance":
        """Copy with changes; a new customer set re-derives the time grid."""
        if "customers" in changes and "times" not in changes:
            changes["times"] = None
            changes.setdefault("t0", None)
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ParkingInterval:
    """A vehicle stop: parked at ``station`` over [start, end).

    ``end`` is None for the final stop. A stop with start == end is a
    pass-through (arrive and leave at the same instant); its ``kind`` may
    be None because the spot kind is not observable.
    """

    station: str
    start: int
    end: Optional[int]
    kind: Optional[str]


@dataclass
class SolutionPlan:
    served: frozenset = frozenset()
    assignment: Dict[DemandKey, str] = field(default_factory=dict)
    parking: Dict[str, List[ParkingInterval]] = field(default_factory=dict)
    battery: Dict[str, Dict[int, Fraction]] = field(default_factory=dict)

    def objective(self, inst: Instance) -> int:
        return sum(inst.customers[c].rental_time for c in self.served)

    def vehicle_demands(self, inst: Instance, vid: str) -> List[DemandKey]:
        keys = [k for k, v in self.assignment.items() if v == vid]
        return sorted(keys, key=lambda k: (inst.demand(k).depart, inst.demand(k).arrive))


# -- operations ---------------------------------------------------------------


def validate_instance(inst: Instance) -> List[str]:
    """Return human-readable invariant violations; empty means valid."""
    out: List[str] = []
    ids = [s.id for s in inst.stations]
    if len(set(ids)) != len(ids):
        out.append("stations: duplicate station id")
    known = set(ids)
    if inst.battery_capacity < 0:
        out.append("instance: battery capacity L must be >= 0")
    if inst.charge_rate <= 0:
        out.append("instance: charge rate must be > 0")
    for s in inst.stations:
        if s.capacity <= 0:
            out.append(f"station {s.id}: capacity must be positive")
        if not 0 <= s.chargers <= s.capacity:
            out.append(f"station {s.id}: R_s <= C_s violated (R={s.chargers}, C={s.capacity})")
    vids = [v.id for v in inst.vehicles]
    if len(set(vids)) != len(vids):
        out.append("vehicles: duplicate vehicle id")
    for v in inst.vehicles:
        if v.station not in known:
            out.append(f"vehicle {v.id}: unknown station {v.station}")
        if not 0 <= v.initial_energy <= inst.battery_capacity:
            out.append(f"vehicle {v.id}: initial energy outside [0, L]")
    for s in inst.stations:
        here = inst.vehicles_at(s.id)
        plugged = sum(v.plugged for v in here)
        if len(here) > s.capacity:
            out.append(f"station {s.id}: |V_s| <= C_s violated ({len(here)} > {s.capacity})")
        if plugged > s.chargers:
            out.append(f"station {s.id}: plugged vehicles exceed R_s ({plugged} > {s.chargers})")
        if len(here) - plugged > s.plain_spots:
            out.append(f"station {s.id}: unplugged vehicles exceed C_s - R_s")
    cids = [c.id for c in inst.customers]
    if len(set(cids)) != len(cids):
        out.append("customers: duplicate customer id")
    for c in inst.customers:
        if not c.demands:
            out.append(f"customer {c.id}: no demands")
        for k, d in enumerate(c.demands):
            tag = f"customer {c.id} demand {k}"
            if d.pickup not in known or d.dropoff not in known:
                out.append(f"{tag}: unknown station")
            if not d.depart < d.arrive:
                out.append(f"{tag}: depart < arrive violated")
            if d.energy <= 0:
                out.append(f"{tag}: energy must be > 0")
        spans = sorted((d.depart, d.arrive) for d in c.demands)
        for (a0, a1), (b0, _) in zip(spans, spans[1:]):
            if b0 < a1:
                out.append(f"customer {c.id}: overlapping rental periods")
                break
    if inst.times and list(inst.times) != sorted(set(inst.times)):
        out.append("instance: time instants not strictly increasing")
    elif inst.customers and inst.times:
        tset = set(inst.times[1:])
        if any(t not in tset for c in inst.customers for d in c.demands for t in (d.depart, d.arrive)):
            out.append("instance: demand time missing from time grid")
        elif inst.times[0] >= min(d.depart for c in inst.customers for d in c.demands):
            out.append("instance: t_0 must precede every demand")
    return out


def instance_warnings(inst: Instance) -> List[str]:
    """Soft findings that do not make the instance invalid."""
    return [
        f"customer {c.id} demand {k}: energy exceeds battery capacity"
        for c in inst.customers
        for k, d in enumerate(c.demands)
        if d.energy > inst.battery_capacity
    ]


def initial_distribution(inst: Instance) -> Instance:
    """Plug vehicles only once the plain spots at their station are used up.

    Leaves the largest possible number of empty charging spots. Which of a
    station's vehicles get plugged is decided by position in the vehicle list
    (later vehicles first), so the result is deterministic and idempotent.
    """
    vehicles = list(inst.vehicles)
    for s in inst.stations:
        here = [p for p, v in enumerate(vehicles) if v.station == s.id]
        n_plugged = max(0, len(here) - s.plain_spots)
        plugged = set(here[len(here) - n_plugged:]) if n_plugged else set()
        for p in here:
            vehicles[p] = dataclasses.replace(vehicles[p], plugged=p in plugged)
    return dataclasses.replace(inst, vehicles=tuple(vehicles))


def customer_rental_stats(c: Customer) -> Tuple[int, int, Fraction]:
    total = c.rental_time
    return total, len(c.demands), Fraction(total, len(c.demands))


def two_station_instance() -> Instance:
    """Two-station example: 1 plain + 1 charging spot per station, one vehicle each.

    Battery 600 Wm charged in one hour gives 10 Wm/min.
    """
    stations = (Station("0", 2, 1), Station("1", 2, 1))
    vehicles = (Vehicle("v0", "0", Fraction(600)), Vehicle("v1", "1", Fraction(600)))

    def d(a, ta, b, tb, e):
        return Demand(str(a), ta, str(b), tb, Fraction(e))

    customers = (
        Customer("A", (d(1, 745, 0, 861, 465), d(0, 900, 1, 1011, 530))),
        Customer("B", (d(0, 495, 1, 591, 475), d(1, 760, 0, 871, 455))),
        Customer("C", (d(0, 895, 1, 991, 455), d(1, 1120, 0, 1241, 485))),
    )
    inst = Instance(stations, vehicles, customers, Fraction(600), Fraction(10), name="two-station")
    return initial_distribution(inst)
