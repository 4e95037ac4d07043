"""Versioned JSON files for instances and plans.

Energies are written exactly: integers as JSON numbers, other rationals as
"p/q" strings. Times are integer minutes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Union

from .model import Customer, Demand, Instance, ParkingInterval, SolutionPlan, Station, Vehicle

INSTANCE_SCHEMA = "evsp-instance/1"
PLAN_SCHEMA = "evsp-plan/1"

PathLike = Union[str, Path]


class FileFormatError(ValueError):
    """Document is not a supported evsp file."""


def enc(q: Fraction):
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dec(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "schema": INSTANCE_SCHEMA,
        "name": inst.name,
        "params": {"battery_capacity": enc(inst.battery_capacity), "charge_rate": enc(inst.charge_rate),
                   "t0": inst.t0},
        "stations": [{"id": s.id, "capacity": s.capacity, "chargers": s.chargers} for s in inst.stations],
        "vehicles": [{"id": v.id, "station": v.station, "initial_energy": enc(v.initial_energy), "plugged": v.plugged}
                     for v in inst.vehicles],
        "customers": [
            {"id": c.id, "demands": [{"pickup": d.pickup, "depart": d.depart, "dropoff": d.dropoff,
                                      "arrive": d.arrive, "energy": enc(d.energy)} for d in c.demands]}
            for c in inst.customers
        ],
    }


def _schema(doc: dict, want: str):
    got = doc.get("schema")
    if got is None:
        raise FileFormatError("missing schema field")
    if got != want:
        raise FileFormatError(f"unsupported schema {got!r}, expected {want!r}")


def instance_from_dict(doc: dict) -> Instance:
    _schema(doc, INSTANCE_SCHEMA)
    try:
        p = doc["params"]
        return Instance(
            tuple(Station(str(s["id"]), int(s["capacity"]), int(s["chargers"])) for s in doc["stations"]),
            tuple(Vehicle(str(v["id"]), str(v["station"]), dec(v["initial_energy"]), bool(v.get("plugged", False)))
                  for v in doc["vehicles"]),
            tuple(Customer(str(c["id"]), tuple(Demand(str(d["pickup"]), int(d["depart"]), str(d["dropoff"]),
                                                      int(d["arrive"]), dec(d["energy"])) for d in c["demands"]))
                  for c in doc["customers"]),
            dec(p["battery_capacity"]),
            dec(p["charge_rate"]),
            name=doc.get("name", ""),
            t0=p.get("t0"),
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FileFormatError(f"malformed instance document: {exc}") from exc


def plan_to_dict(inst: Instance, plan: SolutionPlan) -> dict:
    cid = [c.id for c in inst.customers]
    return {
        "schema": PLAN_SCHEMA,
        "instance": inst.name,
        "objective": plan.objective(inst),
        "served": sorted(cid[c] for c in plan.served),
        "assignment": [{"customer": cid[c], "demand": k, "vehicle": v}
                       for (c, k), v in sorted(plan.assignment.items())],
        "parking": {vid: [{"station": p.station, "start": p.start, "end": p.end, "kind": p.kind} for p in stops]
                    for vid, stops in plan.parking.items()},
        "battery": {vid: {str(i): float(e) for i, e in sorted(b.items())} for vid, b in plan.battery.items()},
    }


def plan_from_dict(inst: Instance, doc: dict) -> SolutionPlan:
    _schema(doc, PLAN_SCHEMA)
    try:
        served = frozenset(inst.customer_pos(c) for c in doc["served"])
        assignment = {(inst.customer_pos(a["customer"]), int(a["demand"])): str(a["vehicle"]) for a in doc["assignment"]}
        parking = {vid: [ParkingInterval(p["station"], int(p["start"]), None if p["end"] is None else int(p["end"]),
                                         p["kind"]) for p in stops]
                   for vid, stops in doc["parking"].items()}
        battery = {vid: {int(i): dec(e) for i, e in b.items()} for vid, b in doc.get("battery", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed plan document: {exc}") from exc
    return SolutionPlan(served, assignment, parking, battery)


def write_json(doc: dict, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def read_json(path: PathLike) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not JSON ({exc})") from exc


def save_instance(inst: Instance, path: PathLike) -> Path:
    return write_json(instance_to_dict(inst), path)


def load_instance(path: PathLike) -> Instance:
    return instance_from_dict(read_json(path))


def save_plan(inst: Instance, plan: SolutionPlan, path: PathLike) -> Path:
    return write_json(plan_to_dict(inst, plan), path)


def load_plan(inst: Instance, path: PathLike) -> SolutionPlan:
    return plan_from_dict(inst, read_json(path))
