"""Seeded instance generators: random grid, VAMO-style scenarios and the
bin-packing reduction.

Randomness comes from numpy ``SeedSequence`` streams split per entity: one
stream for stations and vehicles and one child stream per customer, so
adding customers never changes the stations or earlier customers.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Sequence

import numpy as np

from .model import WM_PER_KWH, Customer, Demand, Instance, Station, Vehicle, as_fraction, initial_distribution

log = logging.getLogger(__name__)

GRID_HOURS = tuple(range(5, 23))  # one-hour intervals of 5:00-23:00
GRID_HOUR_WEIGHTS = {7: 4, 8: 7, 9: 3, 16: 2, 17: 5, 18: 7, 19: 3}
DEMAND_COUNT_WEIGHTS = (4, 6, 2, 1)  # for 1, 2, 3, 4 demands
MAX_REDRAWS = 1000


class ConfigurationError(ValueError):
    """Generator configuration missing or malformed."""


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _percent_range(rng: np.random.Generator, cap: int, lo: float, hi: float) -> int:
    """Random integer between lo and hi (fractions of ``cap``), inclusive."""
    return int(rng.integers(round_half_up(lo * cap), round_half_up(hi * cap) + 1))


def _weighted(rng: np.random.Generator, values: Sequence, weights: Sequence[float]):
    w = np.asarray(weights, dtype=float)
    return values[int(rng.choice(len(values), p=w / w.sum()))]


def _overlaps(demands: Sequence[Demand], d: Demand) -> bool:
    return any(d.depart < o.arrive and o.depart < d.arrive for o in demands)


def _streams(seed: int, n_customers: int):
    root = np.random.SeedSequence(seed)
    fleet, customers = root.spawn(2)
    return np.random.default_rng(fleet), [np.random.default_rng(s) for s in customers.spawn(n_customers)]


def _draw_customer(rng, cid: str, n_demands: int, draw) -> Customer:
    """Draw ``n_demands`` pairwise non-overlapping demands.

    The first draw is always kept; later draws that overlap an earlier one
    are redrawn, so the first demand follows the unconditioned distribution.
    """
    demands: List[Demand] = []
    for _ in range(n_demands):
        for _attempt in range(MAX_REDRAWS):
            d = draw(rng)
            if not _overlaps(demands, d):
                demands.append(d)
                break
        else:
            raise ConfigurationError(f"customer {cid}: cannot place {n_demands} non-overlapping demands")
    return Customer(cid, tuple(demands))


# -- grid ---------------------------------------------------------------------


@dataclass
class GridParams:
    stations: int = 3
    customers: int = 30
    seed: int = 0
    grid_km: int = 50
    speed_kmh: int = 30
    battery_kwh: Fraction = Fraction(40)
    discharge_kwh_per_h: Fraction = Fraction(5)
    charge_kwh_per_h: Fraction = Fraction(10)
    capacity_range: tuple = (10, 20)
    charger_share: tuple = (0.2, 0.5)
    vehicle_share: tuple = (0.3, 0.75)

    def __post_init__(self):
        if self.stations < 2 or self.customers < 0:
            raise ValueError("need at least two stations and a non-negative customer count")


def gen_grid(p: GridParams) -> Instance:
    """Random grid instance; all vehicles start fully charged.

    Station positions are distinct integer points of the grid. The minimum
    trip time dis/speed is rounded up to the 5-minute grid before the random
    5-30 minute slack is added. Energies are whole watt-minutes drawn from
    [dis/speed, duration) times the discharge rate.
    """
    fleet_rng, cust_rngs = _streams(p.seed, p.customers)
    coords: List[tuple] = []
    while len(coords) < p.stations:
        xy = tuple(int(v) for v in fleet_rng.integers(0, p.grid_km + 1, size=2))
        if xy not in coords:
            coords.append(xy)
    stations, vehicles = [], []
    for s in range(p.stations):
        cap = int(fleet_rng.integers(p.capacity_range[0], p.capacity_range[1] + 1))
        chargers = _percent_range(fleet_rng, cap, *p.charger_share)
        stations.append(Station(str(s), cap, chargers))
        for _ in range(_percent_range(fleet_rng, cap, *p.vehicle_share)):
            vehicles.append(Vehicle(f"v{len(vehicles)}", str(s), p.battery_kwh * WM_PER_KWH))

    hours = list(GRID_HOURS)
    hour_w = [GRID_HOUR_WEIGHTS.get(h, 1) for h in hours]
    wm_per_min = p.discharge_kwh_per_h * WM_PER_KWH / 60

    def draw(rng) -> Demand:
        a, b = (int(x) for x in rng.choice(p.stations, size=2, replace=False))
        dis = math.dist(coords[a], coords[b])
        min_trip = dis / p.speed_kmh * 60
        depart = _weighted(rng, hours, hour_w) * 60 + 5 * int(rng.integers(0, 12))
        arrive = depart + 5 * math.ceil(min_trip / 5 - 1e-9) + 5 * int(rng.integers(1, 7))
        lo = math.ceil(min_trip * wm_per_min)
        hi = int((arrive - depart) * wm_per_min)  # exclusive upper end
        return Demand(str(a), depart, str(b), arrive, Fraction(int(rng.integers(lo, hi))))

    customers = []
    for c, rng in enumerate(cust_rngs):
        size = _weighted(rng, (1, 2, 3, 4), DEMAND_COUNT_WEIGHTS)
        customers.append(_draw_customer(rng, f"c{c}", size, draw))
    inst = Instance(tuple(stations), tuple(vehicles), tuple(customers), p.battery_kwh * WM_PER_KWH,
                    p.charge_kwh_per_h * WM_PER_KWH / 60, name=f"grid-s{p.stations}-c{p.customers}-seed{p.seed}")
    return initial_distribution(inst)


# -- VAMO-style scenarios -----------------------------------------------------

SCENARIOS = ("I", "II", "III", "IV")
_HIST_KEYS = ("station_capacities", "origin_weights", "destination_weights", "departure_hours",
              "departure_hour_weights", "rental_minutes", "rental_weights", "distance_km", "distance_weights")


def load_histograms(path: Optional[str] = None) -> Dict[str, list]:
    """Histogram tables from ``path``, or the shipped uniform defaults."""
    try:
        if path is None:
            text = resources.files("evsp").joinpath("data").joinpath("vamo_histograms.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot load histograms: {exc}") from exc
    _check_histograms(data)
    return data


def _check_histograms(h: Dict[str, list]):
    missing = [k for k in _HIST_KEYS if k not in h]
    if missing:
        raise ConfigurationError(f"histogram config lacks {', '.join(missing)}")
    n = len(h["station_capacities"])
    pairs = (("origin_weights", n), ("destination_weights", n), ("departure_hour_weights", len(h["departure_hours"])),
             ("rental_weights", len(h["rental_minutes"])), ("distance_weights", len(h["distance_km"])))
    for key, size in pairs:
        w = h[key]
        if len(w) != size:
            raise ConfigurationError(f"{key}: expected {size} weights, got {len(w)}")
        if any(x < 0 for x in w) or not any(x > 0 for x in w):
            raise ConfigurationError(f"{key}: weights must be non-negative and not all zero")


@dataclass
class VamoParams:
    scenario: str = "I"
    customers: int = 30
    seed: int = 0
    vehicles: int = 15
    battery_kwh: Fraction = Fraction(52)
    full_charge_hours: int = 3
    discharge_kwh_per_h: Fraction = Fraction(26, 5)
    speed_kmh: int = 30
    histograms: Optional[Dict[str, list]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        if self.customers < 0 or self.vehicles < 0:
            raise ValueError("counts must be non-negative")


def admissible_distances(h: Dict[str, list], rental_minutes: int, speed_kmh: int = 30) -> List[int]:
    """Travel distances whose driving time is strictly below the rental time."""
    return [d for d, w in zip(h["distance_km"], h["distance_weights"]) if w > 0 and d * 60 < rental_minutes * speed_kmh]


def gen_vamo(p: VamoParams) -> Instance:
    """VAMO-style instance for one of the four scenarios.

    I: one demand per customer; II: up to four demands; both keep the
    real station sizes with every spot a charger and a fixed fleet.
    III: station sizes, chargers and fleet drawn as for grid instances.
    IV: as III with every station able to hold the whole fleet.
    """
    h = p.histograms if p.histograms is not None else load_histograms()
    _check_histograms(h)
    fleet_rng, cust_rngs = _streams(p.seed, p.customers)
    caps = list(h["station_capacities"])
    n_st = len(caps)
    if p.scenario in ("I", "II"):
        stations = [Station(str(s), caps[s], caps[s]) for s in range(n_st)]
        if p.vehicles > sum(caps):
            raise ConfigurationError("fleet larger than total station capacity")
        slots = [str(s) for s in range(n_st) for _ in range(caps[s])]
        picks = fleet_rng.choice(len(slots), size=p.vehicles, replace=False)
        homes = [slots[int(k)] for k in sorted(picks)]
    else:
        stations, homes = [], []
        for s in range(n_st):
            cap = int(fleet_rng.integers(10, 21))
            stations.append(Station(str(s), cap, _percent_range(fleet_rng, cap, 0.2, 0.5)))
            homes += [str(s)] * _percent_range(fleet_rng, cap, 0.3, 0.75)
        if p.scenario == "IV":
            stations = [Station(s.id, max(s.capacity, len(homes)), s.chargers) for s in stations]
    L = p.battery_kwh * WM_PER_KWH
    vehicles = [Vehicle(f"v{k}", sid, L) for k, sid in enumerate(homes)]
    wm_per_km = p.discharge_kwh_per_h * WM_PER_KWH / p.speed_kmh
    ids = [str(s) for s in range(n_st)]

    def draw(rng) -> Demand:
        a = _weighted(rng, ids, h["origin_weights"])
        b = _weighted(rng, ids, h["destination_weights"])
        depart = _weighted(rng, h["departure_hours"], h["departure_hour_weights"]) * 60 + 5 * int(rng.integers(0, 12))
        rental = _weighted(rng, h["rental_minutes"], h["rental_weights"])
        ok = admissible_distances(h, rental, p.speed_kmh)
        if not ok:
            raise ConfigurationError(f"no admissible travel distance for a {rental} minute rental")
        weights = [h["distance_weights"][h["distance_km"].index(d)] for d in ok]
        dis = _weighted(rng, ok, weights)
        return Demand(a, depart, b, depart + rental, Fraction(dis) * wm_per_km)

    customers = []
    for c, rng in enumerate(cust_rngs):
        size = 1 if p.scenario == "I" else _weighted(rng, (1, 2, 3, 4), DEMAND_COUNT_WEIGHTS)
        customers.append(_draw_customer(rng, f"c{c}", size, draw))
    inst = Instance(tuple(stations), tuple(vehicles), tuple(customers), L,
                    L / (p.full_charge_hours * 60), name=f"vamo-{p.scenario}-c{p.customers}-seed{p.seed}")
    return initial_distribution(inst)


# -- bin packing reduction ----------------------------------------------------


def bpp_to_evsp(items: Sequence) -> Instance:
    """EVSP instance whose optimum is 2n minus the optimal bin count.

    One station with n plain spots, n vehicles with a unit battery, one
    customer per item driving (2i, 2i+1) with the item size as energy, and n
    dummy customers driving (1, 2) with a full battery each.
    """
    sizes = [as_fraction(x) for x in items]
    if not sizes:
        raise ValueError("need at least one item")
    if any(not 0 < s <= 1 for s in sizes):
        raise ValueError("item sizes must lie in (0, 1]")
    n = len(sizes)
    st = Station("s", n, 0)
    vehicles = tuple(Vehicle(f"v{k}", "s", Fraction(1)) for k in range(n))
    customers = [Customer(f"item{i}", (Demand("s", 2 * i, "s", 2 * i + 1, s),)) for i, s in enumerate(sizes, start=1)]
    customers += [Customer(f"dummy{k}", (Demand("s", 1, "s", 2, Fraction(1)),)) for k in range(1, n + 1)]
    return Instance((st,), vehicles, tuple(customers), Fraction(1), Fraction(1), name=f"bpp-n{n}")
