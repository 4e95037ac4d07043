"""Space-time networks.

A network has one node per (station, retained time index). Demand arcs move
a vehicle between stations through time; connecting arcs keep it parked at a
station between two consecutive retained indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .model import DemandKey, Instance

DEMAND = "demand"
CONNECTING = "connecting"


@dataclass(frozen=True)
class Arc:
    kind: str
    tail_station: str
    tail: int
    head_station: str
    head: int
    energy: Fraction
    demand: Optional[DemandKey] = None
    # index at which a demand arc's energy is charged to the battery; differs
    # from ``head`` only for return-shifted demands of a split instance
    consume_index: Optional[int] = None

    @property
    def is_demand(self) -> bool:
        return self.kind == DEMAND

    @property
    def consumed_at(self) -> int:
        return self.head if self.consume_index is None else self.consume_index


@dataclass
class Network:
    """Per-station node index lists plus demand and connecting arcs.

    ``core_indices`` is the index set the battery is tracked on (I for the
    homogeneous network, I^v for a per-vehicle network).
    """

    instance: Instance
    nodes: Dict[str, Tuple[int, ...]]
    demand_arcs: List[Arc]
    connecting: Dict[str, List[Arc]]
    core_indices: Tuple[int, ...] = ()
    _din: Dict[Tuple[str, int], List[Arc]] = field(default_factory=dict, repr=False)
    _dout: Dict[Tuple[str, int], List[Arc]] = field(default_factory=dict, repr=False)
    _cin: Dict[Tuple[str, int], Arc] = field(default_factory=dict, repr=False)
    _cout: Dict[Tuple[str, int], Arc] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.core_indices:
            self.core_indices = tuple(sorted({i for idx in self.nodes.values() for i in idx}))
        self._index()

    def _index(self):
        self._din.clear()
        self._dout.clear()
        self._cin.clear()
        self._cout.clear()
        for a in self.demand_arcs:
            self._dout.setdefault((a.tail_station, a.tail), []).append(a)
            self._din.setdefault((a.head_station, a.head), []).append(a)
        for s, path in self.connecting.items():
            for a in path:
                self._cout[(s, a.tail)] = a
                self._cin[(s, a.head)] = a

    # -- adjacency ------------------------------------------------------------

    def demand_in(self, s: str, i: int) -> List[Arc]:
        return self._din.get((s, i), [])

    def demand_out(self, s: str, i: int) -> List[Arc]:
        return self._dout.get((s, i), [])

    def conn_in(self, s: str, i: int) -> Optional[Arc]:
        return self._cin.get((s, i))

    def conn_out(self, s: str, i: int) -> Optional[Arc]:
        return self._cout.get((s, i))

    def arc_spanning(self, s: str, i: int) -> Optional[Arc]:
        """Connecting arc (s_j, s_k) at ``s`` with j < i <= k."""
        for a in self.connecting.get(s, ()):
            if a.tail < i <= a.head:
                return a
        return None

    def arc_leaving(self, s: str, i: int) -> Optional[Arc]:
        """Connecting arc (s_j, s_k) at ``s`` with j <= i < k."""
        for a in self.connecting.get(s, ()):
            if a.tail <= i < a.head:
                return a
        return None

    def arrival_indices(self, s: str) -> List[int]:
        return sorted({a.head for a in self.demand_arcs if a.head_station == s})

    def node_count(self) -> int:
        return sum(len(v) for v in self.nodes.values())

    def stations(self) -> List[str]:
        return [s.id for s in self.instance.stations if s.id in self.nodes]

    def to_dot(self) -> str:
        """Graphviz rendering for debugging."""
        lines = ["digraph network {", "  rankdir=LR;"]
        for s, idx in self.nodes.items():
            for i in idx:
                lines.append(f'  "{s}_{i}" [label="{s},{i}"];')
        for path in self.connecting.values():
            for a in path:
                lines.append(f'  "{a.tail_station}_{a.tail}" -> "{a.head_station}_{a.head}" [style=dotted, label="{a.energy}"];')
        for a in self.demand_arcs:
            c, k = a.demand
            lines.append(f'  "{a.tail_station}_{a.tail}" -> "{a.head_station}_{a.head}" [label="c{c}d{k}:{a.energy}"];')
        lines.append("}")
        return "\n".join(lines)


def connecting_path(inst: Instance, s: str, indices: Sequence[int]) -> List[Arc]:
    """Connecting arcs over consecutive retained indices, E_e = mu * duration."""
    t = inst.times
    return [
        Arc(CONNECTING, s, a, s, b, inst.charge_rate * (t[b] - t[a]))
        for a, b in zip(indices, indices[1:])
    ]


def demand_arc(inst: Instance, key: DemandKey, consume_index: Optional[int] = None) -> Arc:
    d = inst.demand(key)
    return Arc(
        DEMAND, d.pickup, inst.index_of(d.depart), d.dropoff, inst.index_of(d.arrive),
        d.energy, key, consume_index,
    )


def build_network(
    inst: Instance,
    keys: Iterable[DemandKey],
    node_sets: Mapping[str, Iterable[int]],
    core_indices: Sequence[int] = (),
    consume: Optional[Mapping[DemandKey, int]] = None,
) -> Network:
    consume = consume or {}
    nodes = {s.id: tuple(sorted(set(node_sets.get(s.id, ())) | {0, inst.m})) for s in inst.stations}
    arcs = [demand_arc(inst, k, consume.get(k)) for k in keys]
    connecting = {s: connecting_path(inst, s, idx) for s, idx in nodes.items()}
    return Network(inst, nodes, arcs, connecting, tuple(core_indices))


def build_homogeneous(inst: Instance) -> Network:
    full = range(inst.m + 1)
    return build_network(inst, [k for k, _ in inst.demands()], {s.id: full for s in inst.stations}, tuple(full))


def smooth_and_prune(net: Network) -> Network:
    """Merge connecting arcs through nodes that touch no demand arc.

    Index 0 and the terminal index are always kept. The energy of a merged arc
    is the sum of the energies it replaces.
    """
    m = net.instance.m
    touched = {(a.tail_station, a.tail) for a in net.demand_arcs} | {(a.head_station, a.head) for a in net.demand_arcs}
    nodes: Dict[str, Tuple[int, ...]] = {}
    connecting: Dict[str, List[Arc]] = {}
    for s, idx in net.nodes.items():
        keep = tuple(i for i in idx if i in (0, m) or (s, i) in touched)
        nodes[s] = keep
        path: List[Arc] = []
        for a in net.connecting[s]:
            if path and path[-1].head not in keep:
                prev = path.pop()
                a = Arc(CONNECTING, s, prev.tail, s, a.head, prev.energy + a.energy)
            path.append(a)
        connecting[s] = path
    return Network(net.instance, nodes, list(net.demand_arcs), connecting)
