"""Solver-agnostic linear model with exact rational coefficients."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

LE, GE, EQ = "<=", ">=", "="

FULL_LP = "full_lp"
PARTIAL = "partial"
NONE = "none"
POLICIES = (NONE, PARTIAL, FULL_LP)


@dataclass(frozen=True)
class Variable:
    """A model column.

    ``binary`` records the nominal 0/1 domain; ``integer`` says whether the
    current relaxation policy keeps it integral. ``role`` is the symbol family
    (w, x, y, z, l).
    """

    name: str
    lb: Fraction
    ub: Optional[Fraction]
    binary: bool
    integer: bool
    role: str


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: Tuple[Tuple[str, Fraction], ...]
    sense: str
    rhs: Fraction


class ModelError(ValueError):
    pass


@dataclass
class LinearModel:
    """Maximisation model.

    ``semantic`` maps each variable name to a tuple naming the symbol it
    stands for, e.g. ("x", vehicle_id, demand_key, k).
    ``relaxable`` lists the roles whose integrality is provably redundant for
    this formulation; ``policy`` is the relaxation currently applied.
    """

    name: str = "model"
    variables: Dict[str, Variable] = field(default_factory=dict)
    constraints: List[Constraint] = field(default_factory=list)
    objective: Dict[str, Fraction] = field(default_factory=dict)
    semantic: Dict[str, tuple] = field(default_factory=dict)
    relaxable: Tuple[str, ...] = ()
    policy: str = NONE
    meta: Dict[str, object] = field(default_factory=dict)

    # -- construction -----------------------------------------------------

    def add_var(self, name: str, role: str, lb=0, ub=None, binary=False, semantic: tuple = ()) -> str:
        if name in self.variables:
            raise ModelError(f"duplicate variable {name}")
        lb = Fraction(lb)
        ub = None if ub is None else Fraction(ub)
        if binary:
            lb, ub = Fraction(0), Fraction(1)
        self.variables[name] = Variable(name, lb, ub, binary, binary, role)
        self.semantic[name] = semantic or (role,)
        return name

    def add_row(self, name: str, terms: Iterable[Tuple[str, object]], sense: str, rhs=0) -> Optional[Constraint]:
        """Add sum(coef * var) <sense> rhs, merging duplicates and dropping zeros.

        Rows whose left side vanishes are checked for consistency and dropped.
        """
        acc: Dict[str, Fraction] = {}
        for var, coef in terms:
            if var not in self.variables:
                raise ModelError(f"row {name}: unknown variable {var}")
            acc[var] = acc.get(var, Fraction(0)) + Fraction(coef)
        coeffs = tuple((v, c) for v, c in acc.items() if c != 0)
        rhs = Fraction(rhs)
        if not coeffs:
            if (sense == LE and rhs < 0) or (sense == GE and rhs > 0) or (sense == EQ and rhs != 0):
                raise ModelError(f"row {name}: empty row is infeasible")
            return None
        row = Constraint(name, coeffs, sense, rhs)
        self.constraints.append(row)
        return row

    def set_objective(self, terms: Mapping[str, object]):
        self.objective = {v: Fraction(c) for v, c in terms.items() if Fraction(c) != 0}

    # -- inspection -------------------------------------------------------

    def vars_by_role(self, role: str) -> List[str]:
        return [n for n, v in self.variables.items() if v.role == role]

    def integer_vars(self) -> List[str]:
        return [n for n, v in self.variables.items() if v.integer]

    def is_lp(self) -> bool:
        return not any(v.integer for v in self.variables.values())

    def evaluate(self, values: Mapping[str, float]) -> float:
        return float(sum(c * Fraction(values.get(v, 0)) for v, c in self.objective.items()))

    def violations(self, values: Mapping[str, object], tol: float = 1e-6) -> List[str]:
        """Rows and bounds violated by ``values`` (missing variables count as 0)."""
        out = []
        for n, v in self.variables.items():
            x = float(values.get(n, 0))
            if x < float(v.lb) - tol or (v.ub is not None and x > float(v.ub) + tol):
                out.append(f"bound {n}={x}")
        for r in self.constraints:
            lhs = sum(float(c) * float(values.get(v, 0)) for v, c in r.coeffs)
            rhs = float(r.rhs)
            scale = tol * (1 + abs(rhs))
            if (r.sense == LE and lhs > rhs + scale) or (r.sense == GE and lhs < rhs - scale) or (
                r.sense == EQ and abs(lhs - rhs) > scale
            ):
                out.append(f"row {r.name}: {lhs} {r.sense} {rhs}")
        return out

    def copy(self) -> "LinearModel":
        return dataclasses.replace(
            self,
            variables=dict(self.variables),
            constraints=list(self.constraints),
            objective=dict(self.objective),
            semantic=dict(self.semantic),
            meta=dict(self.meta),
        )

    def stats(self) -> Dict[str, int]:
        roles: Dict[str, int] = {}
        for v in self.variables.values():
            roles[v.role] = roles.get(v.role, 0) + 1
        return {"variables": len(self.variables), "constraints": len(self.constraints), **roles}


def relax(model: LinearModel, policy: str = FULL_LP) -> LinearModel:
    """Return a copy with integrality set by ``policy``.

    none keeps every nominal binary integral, partial relaxes only the
    formulation's provably-integral roles, full_lp relaxes everything. The
    result depends only on the nominal domains, so relaxing is idempotent and
    can be undone by relaxing with ``none``.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown relaxation policy {policy!r}")
    out = model.copy()
    for n, v in model.variables.items():
        if not v.binary:
            continue
        keep = policy == NONE or (policy == PARTIAL and v.role not in model.relaxable)
        out.variables[n] = dataclasses.replace(v, integer=keep)
    out.policy = policy
    return out
