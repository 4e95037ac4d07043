"""Exact solvers for tiny instances, used as test oracles."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .heuristics import construct_initial
from .model import CHARGING, PLAIN, DemandKey, Instance, ParkingInterval, SolutionPlan

log = logging.getLogger(__name__)

PASS = "pass"


class OracleLimitError(ValueError):
    """Instance exceeds the brute-force size caps."""


def brute_force_optimum(inst: Instance, max_customers: int = 8, max_vehicles: int = 4,
                        warm: bool = True) -> Tuple[int, SolutionPlan]:
    """Maximum total rental time by exhaustive event-ordered search.

    Time instants are processed in order; at each one, arriving vehicles
    choose a spot kind (or pass straight through to a departure at the same
    instant), then each departing demand is given a vehicle present at its
    pickup station, or its customer is rejected on its first demand.
    Vehicles in identical states are interchangeable and branched on once.
    """
    if len(inst.customers) > max_customers or len(inst.vehicles) > max_vehicles:
        raise OracleLimitError(
            f"{len(inst.customers)} customers / {len(inst.vehicles)} vehicles exceeds "
            f"cap {max_customers} / {max_vehicles}"
        )
    L, mu = inst.battery_capacity, inst.charge_rate
    stations = {s.id: s for s in inst.stations}
    first = {c: min(range(len(cu.demands)), key=lambda k: (cu.demands[k].depart, k))
             for c, cu in enumerate(inst.customers) if cu.demands}
    rental = [cu.rental_time for cu in inst.customers]

    deps: Dict[int, List[DemandKey]] = {}
    for key, d in inst.demands():
        deps.setdefault(d.depart, []).append(key)
    events: List[Tuple[str, object]] = []
    for t in inst.times[1:]:
        events.append(("arr", t))
        for key in sorted(deps.get(t, ()), key=lambda k: (-rental[k[0]], k)):
            events.append(("dep", key))
        events.append(("chk", t))

    # vehicle state: ("P", station, since, energy, kind, stops) or ("T", dest, arrive, energy, stops)
    start = tuple(
        ("P", v.station, inst.t0, v.initial_energy, CHARGING if v.plugged else PLAIN, ())
        for v in inst.vehicles
    )

    best_val = -1
    best: Optional[Tuple[tuple, Dict[int, bool], Dict[DemandKey, int]]] = None
    if warm:
        hplan = construct_initial(inst)
        best_val = hplan.objective(inst) - 1  # still let the search produce a plan of equal value
    total_rental = sum(rental)

    def energy_now(vs, t):
        _, _, since, e, kind, _ = vs
        return min(L, e + mu * (t - since)) if kind == CHARGING else e

    def rec(ev: int, state: tuple, status: Dict[int, bool], value: int, undecided: int, assign: Dict[DemandKey, int]):
        nonlocal best_val, best
        if value + undecided <= best_val:
            return
        if ev == len(events):
            best_val, best = value, (state, dict(status), dict(assign))
            return
        kind, arg = events[ev]
        if kind == "chk":
            if any(vs[0] == "P" and vs[4] == PASS for vs in state):
                return
            rec(ev + 1, state, status, value, undecided, assign)
        elif kind == "arr":
            t = arg
            arriving = [n for n, vs in enumerate(state) if vs[0] == "T" and vs[2] == t]
            if not arriving:
                rec(ev + 1, state, status, value, undecided, assign)
                return
            departing_from = {inst.demand(k).pickup for k in deps.get(t, ()) if status.get(k[0], True)}
            counts: Dict[str, List[int]] = {}
            for vs in state:
                if vs[0] == "P":
                    c = counts.setdefault(vs[1], [0, 0, 0])
                    c[0 if vs[4] == PLAIN else 1] += 1
                    c[2] += 1

            def place(j: int, st: tuple):
                if j == len(arriving):
                    rec(ev + 1, st, status, value, undecided, assign)
                    return
                n = arriving[j]
                _, dest, _, e, stops = st[n]
                s = stations[dest]
                c = counts.setdefault(dest, [0, 0, 0])
                if c[2] + 1 > s.capacity:
                    return
                options = []
                if dest in departing_from:
                    options.append(PASS)
                if c[1] < s.chargers:
                    options.append(CHARGING)
                if c[0] < s.plain_spots:
                    options.append(PLAIN)
                for opt in options:
                    slot = 0 if opt == PLAIN else 1 if opt == CHARGING else None
                    if slot is not None:
                        c[slot] += 1
                    c[2] += 1
                    nxt = st[:n] + (("P", dest, t, e, opt, stops),) + st[n + 1:]
                    place(j + 1, nxt)
                    c[2] -= 1
                    if slot is not None:
                        c[slot] -= 1

            place(0, state)
        else:
            key = arg
            c = key[0]
            d = inst.demand(key)
            decided = status.get(c)
            if decided is False:
                rec(ev + 1, state, status, value, undecided, assign)
                return
            opening = decided is None and key[1] == first[c]
            t = d.depart
            seen = set()
            cands = []
            for n, vs in enumerate(state):
                if vs[0] != "P" or vs[1] != d.pickup:
                    continue
                e = energy_now(vs, t)
                if e < d.energy:
                    continue
                sig = (e, vs[4])
                if sig in seen:
                    continue
                seen.add(sig)
                cands.append((e, n))
            cands.sort(key=lambda x: -x[0])
            for e, n in cands:
                _, sid, since, _, k0, stops = state[n]
                stop = ParkingInterval(sid, since, t, None if k0 == PASS else k0)
                nxt = state[:n] + (("T", d.dropoff, d.arrive, e - d.energy, stops + (stop,)),) + state[n + 1:]
                assign[key] = n
                if opening:
                    status[c] = True
                    rec(ev + 1, nxt, status, value + rental[c], undecided - rental[c], assign)
                    del status[c]
                else:
                    rec(ev + 1, nxt, status, value, undecided, assign)
                del assign[key]
            if opening:
                status[c] = False
                rec(ev + 1, state, status, value, undecided - rental[c], assign)
                del status[c]

    # customers without demands never get decided; they contribute nothing
    rec(0, start, {}, 0, total_rental, {})
    if best is None:  # cannot happen: rejecting everyone is always feasible
        raise RuntimeError("search produced no plan")
    state, status, assign = best
    parking = {}
    for v, vs in zip(inst.vehicles, state):
        _, sid, since, _, kind, stops = vs
        parking[v.id] = list(stops) + [ParkingInterval(sid, since, None, kind)]
    served = frozenset(c for c, ok in status.items() if ok)
    plan = SolutionPlan(served, {k: inst.vehicles[n].id for k, n in assign.items()}, parking, {})
    return best_val, plan


def solve_bpp_bruteforce(items: Sequence, max_items: int = 12) -> int:
    """Minimum number of unit bins; exhaustive with symmetry pruning."""
    sizes = sorted((Fraction(x) if not isinstance(x, float) else Fraction(repr(x)) for x in items), reverse=True)
    if len(sizes) > max_items:
        raise OracleLimitError(f"{len(sizes)} items exceeds cap {max_items}")
    if any(not 0 < s <= 1 for s in sizes):
        raise ValueError("item sizes must lie in (0, 1]")
    if not sizes:
        return 0
    best = len(sizes)
    loads: List[Fraction] = []

    def rec(i: int):
        nonlocal best
        if len(loads) >= best:
            return
        if i == len(sizes):
            best = len(loads)
            return
        tried = set()
        for b in range(len(loads)):
            if loads[b] in tried or loads[b] + sizes[i] > 1:
                continue
            tried.add(loads[b])
            loads[b] += sizes[i]
            rec(i + 1)
            loads[b] -= sizes[i]
        loads.append(sizes[i])
        rec(i + 1)
        loads.pop()

    rec(0)
    return best
