"""The four EVSP formulations.

EVSP1 and EVSP2 share one builder: EVSP1 is EVSP2 run over the homogeneous
network for every vehicle. EVSP1-S and EVSP2-S likewise share the split
builder; EVSP2-S runs it over the split-and-shifted instance, where every
station has a single spot kind and every demand copy a single category k.

Stations without plain spots get no y variables and stations without
chargers get no z variables; split categories whose side has no spots are
omitted.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

from ..model import DemandKey, Instance, validate_instance
from ..network import Arc, Network, build_homogeneous
from ..reachability import SplitInstance, split_and_shift, vehicle_networks
from .linear import EQ, LE, PARTIAL, LinearModel, ModelError, relax

log = logging.getLogger(__name__)

EVSP1, EVSP1S, EVSP2, EVSP2S = "EVSP1", "EVSP1-S", "EVSP2", "EVSP2-S"
FORMULATIONS = (EVSP1, EVSP1S, EVSP2, EVSP2S)
_ALIASES = {"evsp1": EVSP1, "evsp1s": EVSP1S, "evsp1-s": EVSP1S, "evsp2": EVSP2, "evsp2s": EVSP2S, "evsp2-s": EVSP2S}

K = ("UU", "UE", "EU", "EE")
Y_OUT, Y_IN = ("UU", "UE"), ("UU", "EU")
Z_OUT, Z_IN = ("EU", "EE"), ("UE", "EE")


def canonical_kind(kind: str) -> str:
    if kind in FORMULATIONS:
        return kind
    try:
        return _ALIASES[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown formulation {kind!r}") from None


def _sides(inst: Instance, sid: str) -> str:
    s = inst.station(sid)
    return ("U" if s.plain_spots > 0 else "") + ("E" if s.chargers > 0 else "")


class _Builder:
    """Shared variable/row emission over per-vehicle networks."""

    def __init__(self, kind: str, original: Instance, minst: Instance, nets: Mapping[str, Network],
                 removed: Set[int], split: bool, orig_key: Callable[[DemandKey], DemandKey],
                 categories: Callable[[Arc], Sequence[Optional[str]]]):
        self.kind, self.orig, self.inst, self.nets = kind, original, minst, nets
        self.removed, self.split = removed, split
        self.orig_key, self.categories = orig_key, categories
        self.gidx = original.global_demand_index()
        self.model = LinearModel(name=f"{kind}:{original.name}")
        self.x: Dict[str, Dict[Tuple[DemandKey, Optional[str]], str]] = {}
        self.y: Dict[Tuple[str, str, int], str] = {}
        self.z: Dict[Tuple[str, str, int], str] = {}
        self.l: Dict[Tuple[str, int], str] = {}
        self.lidx: Dict[str, List[int]] = {}

    # -- variables --------------------------------------------------------

    def variables(self):
        m, inst = self.model, self.inst
        for c, cust in enumerate(self.orig.customers):
            m.add_var(f"w_c{c}", "w", binary=True, semantic=("w", c))
        for vp, v in enumerate(inst.vehicles):
            net = self.nets[v.id]
            xs = self.x[v.id] = {}
            for a in net.demand_arcs:
                okey = self.orig_key(a.demand)
                for k in self.categories(a):
                    name = f"x_v{vp}_d{self.gidx[okey]}" + (f"_k{k}" if k else "")
                    xs[(a.demand, k)] = m.add_var(name, "x", binary=True, semantic=("x", v.id, okey, k, a.demand))
        for vp, v in enumerate(inst.vehicles):
            net = self.nets[v.id]
            for sp, st in enumerate(inst.stations):
                for a in net.connecting.get(st.id, ()):
                    sem = (v.id, st.id, a.tail, a.head)
                    if st.plain_spots > 0:
                        self.y[(v.id, st.id, a.head)] = m.add_var(f"y_v{vp}_s{sp}_i{a.head}", "y", binary=True, semantic=("y", *sem))
                    if st.chargers > 0:
                        self.z[(v.id, st.id, a.head)] = m.add_var(f"z_v{vp}_s{sp}_i{a.head}", "z", binary=True, semantic=("z", *sem))
        # battery levels are in units of L so the energy rows stay well scaled
        self.unit = inst.battery_capacity if inst.battery_capacity > 0 else Fraction(1)
        for vp, v in enumerate(inst.vehicles):
            net = self.nets[v.id]
            idx = set(net.core_indices) | {0} | {a.consumed_at for a in net.demand_arcs}
            self.lidx[v.id] = sorted(idx)
            for i in self.lidx[v.id]:
                self.l[(v.id, i)] = m.add_var(f"l_v{vp}_i{i}", "l", lb=0, ub=inst.battery_capacity / self.unit,
                                              semantic=("l", v.id, i))
        m.set_objective({f"w_c{c}": cust.rental_time for c, cust in enumerate(self.orig.customers)})

    # -- helpers ----------------------------------------------------------

    def xs_of(self, vid: str, arcs: Sequence[Arc], cats: Optional[Sequence[str]] = None) -> List[str]:
        out = []
        for a in arcs:
            for k in self.categories(a):
                if cats is None or k in cats:
                    out.append(self.x[vid][(a.demand, k)])
        return out

    def yz(self, table, vid: str, s: str, arc: Optional[Arc]) -> List[str]:
        if arc is None:
            return []
        name = table.get((vid, s, arc.head))
        return [name] if name else []

    def arrival_indices(self, s: str) -> List[int]:
        return sorted({i for net in self.nets.values() for i in net.arrival_indices(s)})

    # -- shared rows ------------------------------------------------------

    def demand_cover(self):
        m = self.model
        cover: Dict[DemandKey, List[str]] = {key: [] for key, _ in self.orig.demands()}
        for v in self.inst.vehicles:
            for (key, _k), name in self.x[v.id].items():
                cover[self.orig_key(key)].append(name)
        for c, cust in enumerate(self.orig.customers):
            if c in self.removed:
                m.add_row(f"prune_c{c}", [(f"w_c{c}", 1)], EQ, 0)
                continue
            for k in range(len(cust.demands)):
                names = cover[(c, k)]
                if not names:
                    raise ModelError(f"customer {cust.id} demand {k} has no arc in any vehicle network")
                m.add_row(f"cover_c{c}_d{self.gidx[(c, k)]}", [(n, 1) for n in names] + [(f"w_c{c}", -1)], EQ, 0)

    def battery(self):
        m, inst = self.model, self.inst
        for vp, v in enumerate(inst.vehicles):
            net = self.nets[v.id]
            consumed: Dict[int, List[Arc]] = {}
            for a in net.demand_arcs:
                consumed.setdefault(a.consumed_at, []).append(a)
            idx = self.lidx[v.id]
            for prev, i in zip(idx, idx[1:]):
                terms = [(self.l[(v.id, i)], 1), (self.l[(v.id, prev)], -1)]
                for st in inst.stations:
                    arc = net.conn_in(st.id, i)
                    for zn in self.yz(self.z, v.id, st.id, arc):
                        terms.append((zn, -arc.energy / self.unit))
                for a in consumed.get(i, ()):
                    for xn in self.xs_of(v.id, [a]):
                        terms.append((xn, a.energy / self.unit))
                m.add_row(f"batt_v{vp}_i{i}", terms, LE, 0)

    def initial_state(self):
        m, inst = self.model, self.inst
        for vp, v in enumerate(inst.vehicles):
            m.add_row(f"init_l_v{vp}", [(self.l[(v.id, 0)], 1)], EQ, v.initial_energy / self.unit)
            net = self.nets[v.id]
            for sp, st in enumerate(inst.stations):
                arc = net.conn_out(st.id, 0)
                here = st.id == v.station
                want_y = 1 if here and not v.plugged else 0
                want_z = 1 if here and v.plugged else 0
                for table, want, tag in ((self.y, want_y, "y"), (self.z, want_z, "z")):
                    names = self.yz(table, v.id, st.id, arc)
                    if not names and want:
                        raise ModelError(f"vehicle {v.id}: no {tag} arc leaving its station {st.id}")
                    for n in names:
                        m.add_row(f"init_{tag}_v{vp}_s{sp}", [(n, 1)], EQ, want)


def _build_unsplit(kind, inst, nets, removed, include_surplus, relax_half, policy) -> LinearModel:
    b = _Builder(kind, inst, inst, nets, removed, False, lambda k: k, lambda a: (None,))
    m = b.model
    b.variables()
    b.demand_cover()
    m_idx = inst.m
    V = inst.vehicles
    for vp, v in enumerate(V):
        net = nets[v.id]
        for sp, st in enumerate(inst.stations):
            for i in net.nodes[st.id]:
                if i in (0, m_idx):
                    continue
                cin, cout = net.conn_in(st.id, i), net.conn_out(st.id, i)
                xin = b.xs_of(v.id, net.demand_in(st.id, i))
                xout = b.xs_of(v.id, net.demand_out(st.id, i))
                terms = [(n, 1) for n in xin + b.yz(b.y, v.id, st.id, cin) + b.yz(b.z, v.id, st.id, cin)]
                terms += [(n, -1) for n in xout + b.yz(b.y, v.id, st.id, cout) + b.yz(b.z, v.id, st.id, cout)]
                m.add_row(f"flow_v{vp}_s{sp}_i{i}", terms, EQ, 0)
                for table, tag in ((b.y, "y"), (b.z, "z")):
                    lhs = b.yz(table, v.id, st.id, cin)
                    if lhs:
                        rhs = b.yz(table, v.id, st.id, cout) + xout
                        m.add_row(f"seq{tag}_v{vp}_s{sp}_i{i}", [(lhs[0], 1)] + [(n, -1) for n in rhs], LE, 0)
    for sp, st in enumerate(inst.stations):
        for i in b.arrival_indices(st.id):
            terms = []
            for v in V:
                net = nets[v.id]
                terms += [(n, 1) for n in b.xs_of(v.id, net.demand_in(st.id, i))]
                span = net.arc_spanning(st.id, i)
                terms += [(n, 1) for n in b.yz(b.y, v.id, st.id, span) + b.yz(b.z, v.id, st.id, span)]
            m.add_row(f"cap_s{sp}_i{i}", terms, LE, st.capacity)
            for table, tag, rhs in ((b.y, "y", st.plain_spots), (b.z, "z", st.chargers)):
                if rhs == 0:
                    continue
                for vp, v in enumerate(V):
                    leave = nets[v.id].arc_leaving(st.id, i)
                    if leave is None:
                        continue
                    terms = [(n, 1) for n in b.yz(table, v.id, st.id, leave)]
                    for v2 in V:
                        if v2.id != v.id:
                            terms += [(n, 1) for n in b.yz(table, v2.id, st.id, nets[v2.id].arc_spanning(st.id, i))]
                    m.add_row(f"cap{tag}_s{sp}_i{i}_v{vp}", terms, LE, rhs)
    b.battery()
    b.initial_state()
    if include_surplus:
        for sp, st in enumerate(inst.stations):
            for table, tag, rhs in ((b.y, "y", st.plain_spots), (b.z, "z", st.chargers)):
                terms = [(n, 1) for v in V for n in b.yz(table, v.id, st.id, nets[v.id].conn_in(st.id, m_idx))]
                m.add_row(f"surplus{tag}_s{sp}", terms, LE, rhs)
    m.relaxable = ("w", relax_half)
    m.meta.update(kind=kind, instance=inst, model_instance=inst, removed=sorted(removed),
                  surplus=include_surplus, station_origin=None, nets=dict(nets),
                  energy_unit=b.unit)
    return relax(m, policy)


def _build_split(kind, original, minst, nets, removed, orig_key, categories, station_origin, policy) -> LinearModel:
    b = _Builder(kind, original, minst, nets, removed, True, orig_key, categories)
    m = b.model
    b.variables()
    b.demand_cover()
    m_idx = minst.m
    V = minst.vehicles
    for vp, v in enumerate(V):
        net = nets[v.id]
        for sp, st in enumerate(minst.stations):
            for i in net.nodes[st.id]:
                if i in (0, m_idx):
                    continue
                cin, cout = net.conn_in(st.id, i), net.conn_out(st.id, i)
                for table, tag, cin_k, cout_k in ((b.y, "y", Y_IN, Y_OUT), (b.z, "z", Z_IN, Z_OUT)):
                    terms = [(n, 1) for n in b.xs_of(v.id, net.demand_in(st.id, i), cin_k) + b.yz(table, v.id, st.id, cin)]
                    terms += [(n, -1) for n in b.xs_of(v.id, net.demand_out(st.id, i), cout_k) + b.yz(table, v.id, st.id, cout)]
                    m.add_row(f"flow{tag}_v{vp}_s{sp}_i{i}", terms, EQ, 0)
    for sp, st in enumerate(minst.stations):
        for i in b.arrival_indices(st.id):
            for table, tag, cats, rhs in ((b.y, "y", Y_IN, st.plain_spots), (b.z, "z", Z_IN, st.chargers)):
                terms = []
                for v in V:
                    net = nets[v.id]
                    terms += [(n, 1) for n in b.xs_of(v.id, net.demand_in(st.id, i), cats)]
                    terms += [(n, 1) for n in b.yz(table, v.id, st.id, net.arc_spanning(st.id, i))]
                m.add_row(f"cap{tag}_s{sp}_i{i}", terms, LE, rhs)
    b.battery()
    b.initial_state()
    m.relaxable = ("w", "y", "z")
    m.meta.update(kind=kind, instance=original, model_instance=minst, removed=sorted(removed),
                  surplus=False, station_origin=station_origin, nets=dict(nets),
                  energy_unit=b.unit)
    return relax(m, policy)


def _check(inst: Instance):
    problems = validate_instance(inst)
    if problems:
        raise ModelError("invalid instance: " + "; ".join(problems))


def build_evsp1(inst: Instance, net: Optional[Network] = None, include_surplus: bool = False,
                policy: str = PARTIAL, relax_half: str = "z") -> LinearModel:
    _check(inst)
    net = net or build_homogeneous(inst)
    nets = {v.id: net for v in inst.vehicles}
    return _build_unsplit(EVSP1, inst, nets, set(), include_surplus, relax_half, policy)


def build_evsp2(inst: Instance, include_surplus: bool = False, policy: str = PARTIAL,
                relax_half: str = "z") -> LinearModel:
    _check(inst)
    nets, _, removed = vehicle_networks(inst)
    return _build_unsplit(EVSP2, inst, nets, removed, include_surplus, relax_half, policy)


def _all_categories(inst: Instance):
    def cats(a: Arc):
        return [o + i for o in _sides(inst, a.tail_station) for i in _sides(inst, a.head_station)]
    return cats


def build_evsp1s(inst: Instance, net: Optional[Network] = None, policy: str = PARTIAL) -> LinearModel:
    _check(inst)
    net = net or build_homogeneous(inst)
    nets = {v.id: net for v in inst.vehicles}
    cats = _all_categories(inst)
    return _build_split(EVSP1S, inst, inst, nets, set(), lambda k: k,
                        lambda a: [k for k in K if k in cats(a)], None, policy)


def build_evsp2s(inst: Instance, split: Optional[SplitInstance] = None, policy: str = PARTIAL) -> LinearModel:
    _check(inst)
    split = split or split_and_shift(inst)
    origin = {k: v[0] for k, v in split.origin.items()}
    nets, _, removed = vehicle_networks(split.instance, split.consume, origin)
    return _build_split(EVSP2S, inst, split.instance, nets, removed, origin.__getitem__,
                        lambda a: (split.origin[a.demand][1],), split.station_origin, policy)


def build(inst: Instance, kind: str, include_surplus: bool = False, policy: str = PARTIAL,
          relax_half: str = "z") -> LinearModel:
    """Dispatch on formulation name (accepts e.g. ``evsp2s`` or ``EVSP2-S``)."""
    kind = canonical_kind(kind)
    if kind == EVSP1:
        return build_evsp1(inst, include_surplus=include_surplus, policy=policy, relax_half=relax_half)
    if kind == EVSP2:
        return build_evsp2(inst, include_surplus=include_surplus, policy=policy, relax_half=relax_half)
    if kind == EVSP1S:
        return build_evsp1s(inst, policy=policy)
    return build_evsp2s(inst, policy=policy)
