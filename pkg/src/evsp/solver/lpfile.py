"""CPLEX LP-format emission and a reader for round-trip checks.

Integral coefficients are written as integers, all others as the shortest
float repr. Rows are not rescaled, so their numeric range is the model's.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Tuple, Union

from ..milp.linear import EQ, GE, LE, LinearModel

_WIDTH = 200
_SENSE = {LE: "<=", GE: ">=", EQ: "="}


def _num(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return repr(float(q))


def _terms(pairs: Iterable[Tuple[str, Fraction]]) -> List[str]:
    out = []
    for k, (name, c) in enumerate(pairs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1 else f"{_num(mag)} {name}"
        out.append((f"- {body}" if sign == "-" else body) if k == 0 else f"{sign} {body}")
    return out


def _wrap(head: str, pieces: List[str]) -> List[str]:
    lines, cur = [], head
    for p in pieces:
        if len(cur) + len(p) + 1 > _WIDTH and cur.strip():
            lines.append(cur)
            cur = "  "
        cur = f"{cur} {p}" if cur.strip() else cur + p
    lines.append(cur)
    return lines


def model_to_lp(model: LinearModel) -> str:
    lines = [f"\\ {model.name}", "Maximize"]
    pos = {n: k for k, n in enumerate(model.variables)}
    obj = sorted(model.objective.items(), key=lambda kv: pos[kv[0]])
    if obj:
        lines += _wrap(" obj:", _terms(obj))
    elif model.variables:
        lines.append(f" obj: 0 {next(iter(model.variables))}")
    else:
        lines.append(" obj: 0")
    lines.append("Subject To")
    for row in model.constraints:
        pieces = _terms(row.coeffs)
        pieces += [_SENSE[row.sense], _num(row.rhs)]
        lines += _wrap(f" {row.name}:", pieces)
    lines.append("Bounds")
    for v in model.variables.values():
        if v.ub is None:
            if v.lb != 0:
                lines.append(f" {v.name} >= {_num(v.lb)}")
        else:
            lines.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    ints = [v.name for v in model.variables.values() if v.integer]
    if ints:
        lines.append("Binaries")
        lines += _wrap("", ints)
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_model_file(model: LinearModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(model_to_lp(model))
    return path


_SECTIONS = {"maximize": "obj", "maximise": "obj", "subject to": "rows", "st": "rows", "s.t.": "rows",
             "bounds": "bounds", "binaries": "bin", "binary": "bin", "end": "end"}


def _parse_expr(text: str) -> List[Tuple[str, Fraction]]:
    text = text.strip()
    out = []
    pos = 0
    while pos < len(text):
        m = re.match(r"\s*([+-]?)\s*((?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.#/\[\]]*)", text[pos:])
        if not m:
            break
        sign, coef, name = m.groups()
        c = Fraction(coef) if coef else Fraction(1)
        out.append((name, -c if sign == "-" else c))
        pos += m.end()
    return out


def read_model_file(path: Union[str, Path]) -> LinearModel:
    """Parse a file written by :func:`write_model_file` back into a model.

    Non-integral coefficients come back as the exact decimals written.
    """
    model = LinearModel(name="parsed")
    section = None
    buf: List[str] = []
    rows: List[str] = []
    obj_text = ""
    bounds: List[str] = []
    bins: List[str] = []

    def flush():
        nonlocal obj_text
        if not buf:
            return
        text = " ".join(buf)
        buf.clear()
        if section == "obj":
            obj_text = text
        elif section == "rows":
            rows.append(text)

    for raw in Path(path).read_text().splitlines():
        line = raw.rstrip()
        if not line or line.lstrip().startswith("\\"):
            continue
        key = line.strip().lower()
        if key in _SECTIONS:
            flush()
            section = _SECTIONS[key]
            continue
        if section in ("obj", "rows"):
            if not raw.startswith("  ") and buf:
                flush()
            buf.append(line.strip())
        elif section == "bounds":
            bounds.append(line.strip())
        elif section == "bin":
            bins.extend(line.split())
    flush()

    names: List[str] = []

    def see(n):
        if n not in model.semantic:
            model.semantic[n] = ()
            names.append(n)

    obj_terms = _parse_expr(obj_text.split(":", 1)[1]) if ":" in obj_text else []
    parsed_rows = []
    for text in rows:
        name, body = text.split(":", 1)
        m = re.match(r"(.*?)(<=|>=|=)\s*(\S+)\s*$", body)
        lhs, sense, rhs = m.group(1), m.group(2), Fraction(m.group(3))
        terms = _parse_expr(lhs)
        for n, _ in terms:
            see(n)
        parsed_rows.append((name.strip(), terms, {"<=": LE, ">=": GE, "=": EQ}[sense], rhs))
    for n, _ in obj_terms:
        see(n)
    lb = {}
    ub = {}
    for b in bounds:
        m = re.match(r"(\S+)\s*<=\s*(\S+)\s*<=\s*(\S+)", b)
        if m:
            lb[m.group(2)], ub[m.group(2)] = Fraction(m.group(1)), Fraction(m.group(3))
            see(m.group(2))
            continue
        m = re.match(r"(\S+)\s*>=\s*(\S+)", b)
        if m:
            lb[m.group(1)] = Fraction(m.group(2))
            see(m.group(1))
    for n in bins:
        see(n)
    binset = set(bins)
    model.semantic.clear()
    for n in names:
        is_bin = n in binset
        model.add_var(n, n.split("_", 1)[0], lb=lb.get(n, 0), ub=ub.get(n), binary=is_bin)
    model.set_objective(dict(obj_terms))
    for name, terms, sense, rhs in parsed_rows:
        model.add_row(name, terms, sense, rhs)
    return model
