"""LP text export and the matching parser.

Only the subset we emit is understood: a linear minimization objective,
named linear rows, bounds, and ``General``/``Binary`` integrality
sections. Row names carry the constraint tag (``<tag>_<row>``), and the
model source rides along in a ``\\ source:`` comment so that a parse
reproduces the model exactly.
"""
from __future__ import annotations

import json
import re

from .model import TAGS, IlpModel, IlpVar, LinearConstraint

_WRAP = 100
_ROW_NAME = re.compile(r"^(?P<tag>[a-z_]+?)_(?P<row>\d+)$")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _terms_text(terms) -> str:
    parts = []
    for c, name in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        piece = f"{sign} {name}" if mag == 1 else f"{sign} {mag} {name}"
        parts.append(piece)
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _wrap(head: str, body: str) -> list[str]:
    """Break ``body`` on term boundaries; continuation lines are indented."""
    lines, cur = [], head
    for tok in re.split(r" (?=[+-] )", body):
        if len(cur) + len(tok) + 1 > _WRAP and cur.strip():
            lines.append(cur.rstrip())
            cur = "   "
        cur += (" " if not cur.endswith(" ") else "") + tok
    lines.append(cur.rstrip())
    return lines


def write_lp(model: IlpModel) -> str:
    names = model.var_names()
    out = [f"\\ model: M={model.M} Q={model.Q} R={model.R}"]
    if model.source is not None:
        out.append("\\ source: " + json.dumps(model.source, separators=(",", ":"), sort_keys=True))
    out.append("Minimize")
    obj = [(1, names[i]) for i in model.objective.tolist()]
    out += _wrap(" obj:", _terms_text(obj) if obj else "0")
    out.append("Subject To")
    row_names = model.row_names()
    for r, con in enumerate(model.constraints()):
        body = _terms_text(con.terms) + f" {con.relation} {con.rhs}"
        out += _wrap(f" {row_names[r]}:", body)
    out.append("Bounds")
    general, binary = [], []
    for i, (lo, hi) in enumerate(zip(model.lower.tolist(), model.upper.tolist())):
        if lo == 0 and hi == 1:
            binary.append(names[i])
        else:
            general.append(names[i])
            out.append(f" {lo} <= {names[i]} <= {hi}")
    for section, items in (("General", general), ("Binary", binary)):
        out.append(section)
        out += _wrap(" ", " ".join(items)) if items else []
    out.append("End")
    return "\n".join(out) + "\n"


def _logical_lines(text: str):
    """Yield ``(line_no, text)`` with indented continuation lines joined."""
    pending = None
    for no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        if raw.startswith("   ") and pending is not None:
            pending = (pending[0], pending[1] + " " + raw.strip())
            continue
        if pending is not None:
            yield pending
        pending = (no, raw.strip() if not raw.startswith("\\") else raw)
    if pending is not None:
        yield pending


def _parse_terms(text: str, where: int):
    toks = text.split()
    if toks == ["0"]:
        return []
    if toks and toks[0] not in ("+", "-"):
        toks.insert(0, "+")
    terms, i, n = [], 0, len(toks)
    while i < n:
        sign = toks[i]
        if sign not in ("+", "-") or i + 1 >= n:
            raise ValueError(f"line {where}: cannot parse terms near {' '.join(toks[i:i + 3])!r}")
        c = 1
        if toks[i + 1].isdigit():
            if i + 2 >= n:
                raise ValueError(f"line {where}: coefficient {toks[i + 1]} has no variable")
            c, i = int(toks[i + 1]), i + 1
        name = toks[i + 1]
        if not _NAME.fullmatch(name):
            raise ValueError(f"line {where}: bad variable name {name!r}")
        terms.append((-c if sign == "-" else c, name))
        i += 2
    return terms


def parse_lp(text: str) -> IlpModel:
    source = None
    section = None
    objective: list[str] = []
    rows: list[LinearConstraint] = []
    bounds: dict[str, tuple[int, int]] = {}
    general: list[str] = []
    binary: list[str] = []
    headers = {"minimize": "obj", "subject to": "rows", "bounds": "bounds",
               "general": "general", "binary": "binary", "end": "end"}
    for no, line in _logical_lines(text):
        if line.startswith("\\"):
            if line.startswith("\\ source:"):
                source = json.loads(line[len("\\ source:"):])
            continue
        key = line.strip().lower()
        if key in headers:
            section = headers[key]
            continue
        if section == "obj":
            label, _, body = line.partition(":")
            for c, name in _parse_terms(body, no):
                if c != 1:
                    raise ValueError(f"line {no}: objective coefficients must be 1")
                objective.append(name)
        elif section == "rows":
            label, _, body = line.partition(":")
            m = _ROW_NAME.match(label.strip())
            if not m or m["tag"] not in TAGS:
                raise ValueError(f"line {no}: row name {label.strip()!r} carries no known tag")
            rel_m = re.search(r"(<=|>=|=<|=>|=)\s*(-?\d+)\s*$", body)
            if not rel_m:
                raise ValueError(f"line {no}: missing relation")
            rel = {"=<": "<=", "=>": ">="}.get(rel_m[1], rel_m[1])
            rows.append(LinearConstraint(tuple(_parse_terms(body[:rel_m.start()], no)), rel,
                                         int(rel_m[2]), m["tag"]))
        elif section == "bounds":
            m = re.fullmatch(r"\s*(-?\d+)\s*<=\s*(\w+)\s*<=\s*(-?\d+)\s*", line)
            if not m:
                raise ValueError(f"line {no}: unsupported bound {line.strip()!r}")
            bounds[m[2]] = (int(m[1]), int(m[3]))
        elif section == "general":
            general += line.split()
        elif section == "binary":
            binary += line.split()
        elif section == "end":
            raise ValueError(f"line {no}: text after End")
        else:
            raise ValueError(f"line {no}: text outside any section")
    if section != "end":
        raise ValueError("missing End")
    variables = [IlpVar(n, *bounds.get(n, (0, 0))) for n in general]
    missing = [n for n in general if n not in bounds]
    if missing:
        raise ValueError(f"general variable {missing[0]!r} has no bounds")
    variables += [IlpVar(n, 0, 1) for n in binary]
    return IlpModel.from_rows(variables, rows, objective, source)
