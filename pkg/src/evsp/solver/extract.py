"""Translate solver values into a SolutionPlan and a plan back into values.

Spot kinds come from the y/z connecting arcs for EVSP1/EVSP2 and from the
split category k of the demand arcs for EVSP1-S/EVSP2-S. A vehicle that
arrives at the final instant has no connecting arc after it in the unsplit
models, so its kind is filled in afterwards: plain spots first, then
charging spots.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from typing import Dict, List, Mapping, Optional, Tuple, Union

from ..heuristics import derive_stops, energy_profile
from ..milp.linear import LinearModel, ModelError
from ..model import CHARGING, PLAIN, DemandKey, Instance, ParkingInterval, SolutionPlan
from .bridge import SNAP_TOL, SolveOutcome

log = logging.getLogger(__name__)

_UNSET = "unset"
_SIDE = {PLAIN: "U", CHARGING: "E"}
_KIND = {"U": PLAIN, "E": CHARGING}


class ExtractionError(ModelError):
    """Solver values do not describe a consistent integral plan."""


def _values(outcome: Union[SolveOutcome, Mapping[str, float]]) -> Mapping[str, float]:
    return outcome.values if isinstance(outcome, SolveOutcome) else outcome


def _is_split(model: LinearModel) -> bool:
    return any(sem[0] == "x" and sem[3] is not None for sem in model.semantic.values())


def extract_plan(inst: Instance, model: LinearModel, outcome) -> SolutionPlan:
    """Plan encoded by an integral solution of ``model`` built from ``inst``."""
    values = _values(outcome)
    on = set()
    for n, v in model.variables.items():
        if not v.binary:
            continue
        x = float(values.get(n, 0.0))
        if SNAP_TOL < x < 1 - SNAP_TOL:
            raise ExtractionError(f"binary {n} is fractional ({x})")
        if x >= 1 - SNAP_TOL:
            on.add(n)
    served = {model.semantic[n][1] for n in on if model.semantic[n][0] == "w"}

    assignment: Dict[DemandKey, str] = {}
    category: Dict[DemandKey, Optional[str]] = {}
    kinds_at: Dict[Tuple[str, str, int], str] = {}
    for n in sorted(on):
        sem = model.semantic[n]
        if sem[0] == "x":
            _, vid, okey, k, _ = sem
            if okey in assignment:
                raise ExtractionError(f"demand {okey} covered twice (variable {n})")
            assignment[okey], category[okey] = vid, k
        elif sem[0] in ("y", "z"):
            _, vid, sid, tail, _ = sem
            kinds_at[(vid, sid, tail)] = PLAIN if sem[0] == "y" else CHARGING
    gidx = inst.global_demand_index()
    for key, _ in inst.demands():
        if (key in assignment) != (key[0] in served):
            raise ExtractionError(f"row cover_c{key[0]}_d{gidx[key]}: demand coverage disagrees with w_c{key[0]}")

    split = _is_split(model)
    parking: Dict[str, List[ParkingInterval]] = {}
    for v in inst.vehicles:
        keys = sorted((k for k, u in assignment.items() if u == v.id),
                      key=lambda k: (inst.demand(k).depart, inst.demand(k).arrive))
        stops = []
        for n, (sid, start, end) in enumerate(derive_stops(inst, v.id, keys)):
            if n == 0:
                kind = CHARGING if v.plugged else PLAIN
            elif split:
                kind = _KIND[category[keys[n - 1]][1]]
            else:
                idx = inst.index_of(start)
                kind = kinds_at.get((v.id, sid, idx))
                if kind is None and end != start:
                    kind = _UNSET if end is None and idx == inst.m else None
                    if kind is None:
                        raise ExtractionError(f"vehicle {v.id}: no connecting arc after arriving at {sid} at {start}")
            if split and end is not None and n < len(keys) and end != start:
                left = _KIND[category[keys[n]][0]]
                if left != kind:
                    raise ExtractionError(f"vehicle {v.id}: leaves {sid} at {end} from a {left} spot but parked at {kind}")
            stops.append(ParkingInterval(sid, start, end, kind))
        parking[v.id] = stops
    _fill_final(inst, parking)

    unit = float(model.meta.get("energy_unit", 1))
    battery: Dict[str, Dict[int, float]] = defaultdict(dict)
    for n, sem in model.semantic.items():
        if sem and sem[0] == "l" and n in values:
            battery[sem[1]][sem[2]] = float(values[n]) * unit
    return SolutionPlan(frozenset(served), assignment, parking, dict(battery))


def _fill_final(inst: Instance, parking: Dict[str, List[ParkingInterval]]):
    """Give final-instant arrivals a spot kind: plain first, then charging."""
    pending = defaultdict(list)
    for vid, stops in parking.items():
        if stops and stops[-1].kind == _UNSET:
            pending[stops[-1].station].append(vid)
    for sid, vids in pending.items():
        st = inst.station(sid)
        tm = inst.times[-1]
        held = [p for stops in parking.values() for p in stops
                if p.station == sid and p.start < tm and (p.end is None or p.end >= tm) and p.kind != _UNSET]
        free_plain = st.plain_spots - sum(p.kind == PLAIN for p in held)
        for vid in sorted(vids):
            kind = PLAIN if free_plain > 0 else CHARGING
            free_plain -= kind == PLAIN
            last = parking[vid][-1]
            parking[vid][-1] = ParkingInterval(last.station, last.start, last.end, kind)


def _pass_through_kinds(inst: Instance, plan: SolutionPlan) -> Dict[Tuple[str, int], str]:
    """Spot kind for each pass-through stop, chosen where a spot is free.

    A car that arrives and leaves at the same instant still takes a spot of
    its arrival category in the split models. Every stop touching that
    instant counts as occupying its spot; charging spots are tried first.
    """
    out: Dict[Tuple[str, int], str] = {}
    for vid in sorted(plan.parking):
        for n, p in enumerate(plan.parking[vid]):
            if p.kind is not None or p.end != p.start:
                continue
            used = {PLAIN: 0, CHARGING: 0}
            for uid, stops in plan.parking.items():
                for m, q in enumerate(stops):
                    if q.station != p.station or not q.start <= p.start <= (q.end if q.end is not None else p.start):
                        continue
                    kind = q.kind if q.kind is not None else out.get((uid, m))
                    if kind is not None and (uid, m) != (vid, n):
                        used[kind] += 1
            st = inst.station(p.station)
            if st.chargers - used[CHARGING] > 0:
                out[(vid, n)] = CHARGING
            elif st.plain_spots - used[PLAIN] > 0:
                out[(vid, n)] = PLAIN
            else:
                out[(vid, n)] = CHARGING if st.chargers else PLAIN
    return out


def plan_to_values(inst: Instance, model: LinearModel, plan: SolutionPlan) -> Dict[str, float]:
    """Variable values encoding ``plan`` in ``model`` (warm starts, cross-checks).

    Raises ValueError when the plan uses an arc or category the model lacks.
    """
    nets = model.meta["nets"]
    minst: Instance = model.meta["model_instance"]
    split = _is_split(model)
    unit = model.meta.get("energy_unit", 1)
    values = {n: 0.0 for n in model.variables}
    xidx: Dict[Tuple[str, DemandKey, Optional[str]], Tuple[str, DemandKey]] = {}
    conn: Dict[Tuple[str, str, str, int, int], str] = {}
    lvars: Dict[str, List[Tuple[int, str]]] = defaultdict(list)
    for n, sem in model.semantic.items():
        if sem[0] == "w":
            values[n] = 1.0 if sem[1] in plan.served else 0.0
        elif sem[0] == "x":
            xidx[(sem[1], sem[2], sem[3])] = (n, sem[4])
        elif sem[0] in ("y", "z"):
            conn[(sem[0], sem[1], sem[2], sem[3], sem[4])] = n
        elif sem[0] == "l":
            lvars[sem[1]].append((sem[2], n))

    passing = _pass_through_kinds(inst, plan)
    for v, mv in zip(inst.vehicles, minst.vehicles):
        net = nets[v.id]
        arcs_by_key = {a.demand: a for a in net.demand_arcs}
        keys = plan.vehicle_demands(inst, v.id)
        stops = plan.parking[v.id]
        kinds = [p.kind if p.kind is not None else passing.get((v.id, n)) for n, p in enumerate(stops)]
        chosen = []
        for n, key in enumerate(keys):
            options = [None]
            if split:
                dep = [kinds[n]] if kinds[n] else [PLAIN, CHARGING]
                arr = [kinds[n + 1]] if kinds[n + 1] else [PLAIN, CHARGING]
                options = [_SIDE[a] + _SIDE[b] for a in dep for b in arr]
            hit = next((xidx[(v.id, key, k)] for k in options if (v.id, key, k) in xidx), None)
            if hit is None:
                raise ValueError(f"vehicle {v.id}: demand {key} has no variable in {model.name}")
            name, mkey = hit
            values[name] = 1.0
            arc = arcs_by_key[mkey]
            chosen.append(arc)
            if split:
                k = model.semantic[name][3]
                kinds[n] = kinds[n] or _KIND[k[0]]
                kinds[n + 1] = kinds[n + 1] or _KIND[k[1]]
        here, cur = mv.station, 0
        legs = [(a.tail_station, a.tail, a.head_station, a.head) for a in chosen] + [(here, None, None, None)]
        for n, (ts, tail, hs, head) in enumerate(legs):
            role = "y" if kinds[n] == PLAIN else "z"
            for a in net.connecting.get(here, ()):
                if a.tail >= cur and (tail is None or a.head <= tail):
                    name = conn.get((role, v.id, here, a.tail, a.head))
                    if name is None:
                        raise ValueError(f"vehicle {v.id}: no {role} arc at {here} from {a.tail}")
                    values[name] = 1.0
            if tail is not None:
                here, cur = hs, head
        _, _, at = energy_profile(inst, stops, keys, v.initial_energy)
        for i, name in lvars[v.id]:
            values[name] = float(at(inst.times[i]) / unit)
    # the model credits a recharge only at the head of its connecting arc, so
    # battery levels follow the rows wherever they are tighter than reality
    for row in model.constraints:
        if not row.name.startswith("batt_"):
            continue
        own = [n for n, c in row.coeffs if c == 1 and model.semantic[n][0] == "l"]
        if len(own) != 1:
            continue
        bound = float(row.rhs) - sum(float(c) * values[n] for n, c in row.coeffs if n != own[0])
        values[own[0]] = min(values[own[0]], bound)
    return values
