"""Plan validation (the exact feasibility semantics) and the greedy
construction heuristic used as a warm start."""

from __future__ import annotations

import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .model import CHARGING, PLAIN, DemandKey, Instance, ParkingInterval, SolutionPlan

log = logging.getLogger(__name__)

BATTERY_TOL = 1e-6


def derive_stops(inst: Instance, vid: str, keys: Sequence[DemandKey]) -> List[Tuple[str, int, Optional[int]]]:
    """(station, start, end) of every stop of a vehicle serving ``keys`` in order."""
    v = inst.vehicles[inst.vehicle_pos(vid)]
    stops = []
    here, since = v.station, inst.t0
    for k in keys:
        d = inst.demand(k)
        stops.append((here, since, d.depart))
        here, since = d.dropoff, d.arrive
    stops.append((here, since, None))
    return stops


def occupancy_violations(inst: Instance, parking: Dict[str, List[ParkingInterval]],
                         stations: Optional[Iterable[str]] = None) -> List[str]:
    """Spot availability immediately before every arrival.

    A vehicle occupies its spot over [start, end); one leaving at t still
    holds it just before t. A zero-length stop (pass-through) needs a free
    spot of some kind; it counts against its own kind only when one is given.
    """
    by_station: Dict[str, List[ParkingInterval]] = defaultdict(list)
    for stops in parking.values():
        for p in stops:
            by_station[p.station].append(p)
    out = []
    for sid in (stations if stations is not None else sorted(by_station)):
        st = inst.station(sid)
        stops = by_station.get(sid, [])
        initial = [p for p in stops if p.start == inst.t0]
        n_plain = sum(p.kind == PLAIN for p in initial)
        n_chg = sum(p.kind == CHARGING for p in initial)
        if n_plain > st.plain_spots or n_chg > st.chargers or len(initial) > st.capacity:
            out.append(f"station {sid}: initial occupancy exceeds spots")
        for t in sorted({p.start for p in stops if p.start > inst.t0}):
            before = [p for p in stops if p.start < t and (p.end is None or p.end >= t)]
            arrive = [p for p in stops if p.start == t]
            plain = sum(p.kind == PLAIN for p in before + arrive)
            chg = sum(p.kind == CHARGING for p in before + arrive)
            if plain > st.plain_spots:
                out.append(f"station {sid} at {t}: no free plain spot ({plain} > {st.plain_spots})")
            if chg > st.chargers:
                out.append(f"station {sid} at {t}: no free charging spot ({chg} > {st.chargers})")
            if len(before) + len(arrive) > st.capacity:
                out.append(f"station {sid} at {t}: capacity exceeded ({len(before) + len(arrive)} > {st.capacity})")
    return out


def energy_profile(inst: Instance, stops: Sequence[ParkingInterval], keys: Sequence[DemandKey],
                   initial: Fraction, recharge: bool = True):
    """Simulate one vehicle's battery.

    Returns (energy before each demand, energy after each demand, function
    giving the energy held at any time instant).
    """
    L, mu = inst.battery_capacity, inst.charge_rate
    e = Fraction(initial)
    before, after = [], []
    segments = []  # (start, end, e_start, charging) for stops; trips store flat energy
    for n, p in enumerate(stops):
        end = p.end
        charging = recharge and p.kind == CHARGING
        segments.append((p.start, end, e, charging))
        if end is None:
            break
        if charging:
            e = min(L, e + mu * (end - p.start))
        d = inst.demand(keys[n])
        before.append(e)
        e = e - d.energy
        after.append(e)

    def at(t: int) -> Fraction:
        level = Fraction(initial)
        for n, (start, end, e0, charging) in enumerate(segments):
            if t < start:
                # in transit: consumption is booked on arrival
                return before[n - 1] if n > 0 else level
            if end is None or t <= end:
                return min(L, e0 + mu * (t - start)) if charging else e0
            level = after[n] if n < len(after) else level
        return level

    return before, after, at


def validate_plan(inst: Instance, plan: SolutionPlan) -> List[str]:
    """Every feasibility violation of ``plan``; empty means feasible."""
    out: List[str] = []
    vids = {v.id for v in inst.vehicles}
    served = set(plan.served)
    for c in served:
        if not 0 <= c < len(inst.customers):
            out.append(f"unknown served customer {c}")
    for key, vid in plan.assignment.items():
        if vid not in vids:
            out.append(f"demand {key}: unknown vehicle {vid}")
        if key[0] not in served:
            out.append(f"demand {key} assigned but customer {inst.customers[key[0]].id} not served")
    for c in sorted(served):
        if not 0 <= c < len(inst.customers):
            continue
        cust = inst.customers[c]
        if any((c, k) not in plan.assignment for k in range(len(cust.demands))):
            out.append(f"all-or-nothing violated: customer {cust.id}")
    if out:
        return out

    L = inst.battery_capacity
    for v in inst.vehicles:
        keys = plan.vehicle_demands(inst, v.id)
        stops = derive_stops(inst, v.id, keys)
        here = v.station
        last = inst.t0
        for k in keys:
            d = inst.demand(k)
            if d.pickup != here:
                out.append(f"vehicle {v.id}: not at {d.pickup} for demand {k} (at {here})")
            if d.depart < last:
                out.append(f"vehicle {v.id}: demand {k} departs at {d.depart} before previous return {last}")
            here, last = d.dropoff, d.arrive
        timeline = plan.parking.get(v.id)
        if timeline is None:
            out.append(f"vehicle {v.id}: missing parking timeline")
            continue
        if [(p.station, p.start, p.end) for p in timeline] != stops:
            out.append(f"vehicle {v.id}: parking timeline does not follow its demands")
            continue
        for p in timeline:
            if p.kind not in (PLAIN, CHARGING) and not (p.kind is None and p.end == p.start):
                out.append(f"vehicle {v.id}: stop at {p.station} from {p.start} has no spot kind")
        first = timeline[0]
        if first.station != v.station or first.kind != (CHARGING if v.plugged else PLAIN):
            out.append(f"vehicle {v.id}: initial position or plug state differs from the instance")
        before, _, at = energy_profile(inst, timeline, keys, v.initial_energy)
        for k, e in zip(keys, before):
            if e < inst.demand(k).energy:
                out.append(f"vehicle {v.id}: insufficient energy at demand {k} ({float(e)} < {float(inst.demand(k).energy)})")
        for i, val in sorted(plan.battery.get(v.id, {}).items()):
            val = Fraction(val)
            tol = BATTERY_TOL * (1 + float(L))
            if val < -tol or val > L + tol:
                out.append(f"vehicle {v.id}: battery {float(val)} at index {i} outside [0, L]")
            elif 0 <= i <= inst.m and float(val) > float(at(inst.times[i])) + tol:
                out.append(f"vehicle {v.id}: battery {float(val)} at index {i} exceeds reachable {float(at(inst.times[i]))}")
    if out:
        return out
    return occupancy_violations(inst, plan.parking)


# -- construction heuristic ---------------------------------------------------


def customer_order(inst: Instance) -> List[int]:
    """Descending rental time per demand; ties by customer id."""
    def key(c):
        cust = inst.customers[c]
        return (-Fraction(cust.rental_time, max(1, len(cust.demands))), cust.id)
    return sorted(range(len(inst.customers)), key=key)


def _sequence_ok(inst: Instance, vid: str, keys: Sequence[DemandKey]) -> bool:
    v = inst.vehicles[inst.vehicle_pos(vid)]
    here, last = v.station, inst.t0
    for k in keys:
        d = inst.demand(k)
        if d.pickup != here or d.depart < last:
            return False
        here, last = d.dropoff, d.arrive
    return True


def _assign_kinds(inst: Instance, vid: str, keys, parking, initial_kind: str) -> Optional[List[ParkingInterval]]:
    """Pick spot kinds for a vehicle's stops against the committed plan."""
    stops = derive_stops(inst, vid, keys)
    chosen: List[ParkingInterval] = []
    trial = dict(parking)
    for n, (sid, start, end) in enumerate(stops):
        if n == 0:
            options = [initial_kind]
        elif end == start:
            options = [None]
        else:
            options = [CHARGING, PLAIN]
        for kind in options:
            cand = chosen + [ParkingInterval(sid, start, end, kind)]
            trial[vid] = cand
            if not occupancy_violations(inst, trial, [sid]):
                chosen = cand
                break
        else:
            return None
    return chosen


def construct_initial(inst: Instance) -> SolutionPlan:
    """Greedy warm start.

    Customers are taken by descending rental time per demand. A customer is
    accepted by the first vehicle (in list order) that can drive all of its
    demands on top of its current schedule without any recharging and with a
    free spot at every stop.
    """
    parking: Dict[str, List[ParkingInterval]] = {}
    for v in inst.vehicles:
        parking[v.id] = [ParkingInterval(v.station, inst.t0, None, CHARGING if v.plugged else PLAIN)]
    schedule: Dict[str, List[DemandKey]] = {v.id: [] for v in inst.vehicles}
    used: Dict[str, Fraction] = {v.id: Fraction(0) for v in inst.vehicles}
    served = set()
    assignment: Dict[DemandKey, str] = {}
    for c in customer_order(inst):
        cust = inst.customers[c]
        need = sum(d.energy for d in cust.demands)
        new = [(c, k) for k in range(len(cust.demands))]
        for v in inst.vehicles:
            if used[v.id] + need > v.initial_energy:
                continue
            keys = sorted(schedule[v.id] + new, key=lambda k: (inst.demand(k).depart, inst.demand(k).arrive))
            if not _sequence_ok(inst, v.id, keys):
                continue
            others = {u: p for u, p in parking.items() if u != v.id}
            stops = _assign_kinds(inst, v.id, keys, others, CHARGING if v.plugged else PLAIN)
            if stops is None:
                continue
            parking[v.id] = stops
            schedule[v.id] = keys
            used[v.id] += need
            served.add(c)
            assignment.update({k: v.id for k in new})
            log.debug("customer %s -> vehicle %s", cust.id, v.id)
            break
    return SolutionPlan(frozenset(served), assignment, parking, {})
