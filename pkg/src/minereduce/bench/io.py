"""Instance file reading and writing.

Format::

    NAME <name>
    N <customers> M <vehicle types>
    VEHICLES
    <capacity> <fixed cost> <unit cost> <count, -1 = unlimited>   (M lines)
    NODES
    <id> <x> <y> <demand>                                         (N+1 lines, id 0 = depot)
    MATRIX                                                        (optional)
    <(N+1)^2 distances, row-major>
    LENGTHS                                                       (optional)
    <N+1 vertex lengths>

Without MATRIX, distances are Euclidean over the coordinates.  Blank lines
and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from ..model import UNLIMITED, Instance, Node, VehicleType, euclidean_matrix

SECTIONS = ("VEHICLES", "NODES", "MATRIX", "LENGTHS")


class ParseError(ValueError):
    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")


class _Lines:
    def __init__(self, text: str):
        self.items = [(k, ln.split()) for k, ln in enumerate(text.splitlines(), start=1)
                      if ln.strip() and not ln.lstrip().startswith("#")]
        self.pos = 0
        self.last = self.items[-1][0] if self.items else 1

    def peek(self) -> Optional[tuple[int, list[str]]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def take(self, what: str) -> tuple[int, list[str]]:
        nxt = self.peek()
        if nxt is None:
            raise ParseError(self.last, f"unexpected end of file, expected {what}")
        self.pos += 1
        return nxt

    def numbers(self, count: int, what: str) -> Iterator[tuple[int, float]]:
        """Yield ``count`` numeric tokens spread over any number of lines."""
        got = 0
        while got < count:
            nxt = self.peek()
            if nxt is None or nxt[1][0] in SECTIONS:
                ln = nxt[0] if nxt else self.last
                raise ParseError(ln, f"{what}: expected {count} values, found {got}")
            self.pos += 1
            ln, toks = nxt
            for tok in toks:
                if got == count:
                    raise ParseError(ln, f"{what}: more than {count} values")
                yield ln, _num(tok, ln)
                got += 1


def _num(tok: str, ln: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(ln, f"not a number: {tok!r}") from None


def _int(tok: str, ln: int) -> int:
    v = _num(tok, ln)
    if not v.is_integer():
        raise ParseError(ln, f"expected an integer, got {tok!r}")
    return int(v)


def _keyword(lines: _Lines, key: str) -> tuple[int, list[str]]:
    ln, toks = lines.take(key)
    if toks[0] != key:
        raise ParseError(ln, f"expected {key}, got {toks[0]!r}")
    return ln, toks


def parse_instance(text: str) -> Instance:
    lines = _Lines(text)
    ln, toks = _keyword(lines, "NAME")
    name = " ".join(toks[1:])
    if not name:
        raise ParseError(ln, "missing instance name")
    ln, toks = _keyword(lines, "N")
    if len(toks) != 4 or toks[2] != "M":
        raise ParseError(ln, "expected 'N <n> M <m>'")
    n, m = _int(toks[1], ln), _int(toks[3], ln)
    if n < 0 or m < 1:
        raise ParseError(ln, "need n >= 0 and m >= 1")

    _keyword(lines, "VEHICLES")
    fleet = []
    for _ in range(m):
        ln, toks = lines.take("vehicle line")
        if len(toks) != 4:
            raise ParseError(ln, "vehicle line needs '<capacity> <fixed> <unit> <count>'")
        count = _int(toks[3], ln)
        try:
            fleet.append(VehicleType(_num(toks[0], ln), _num(toks[1], ln), _num(toks[2], ln),
                                     UNLIMITED if count == -1 else count))
        except ValueError as exc:
            raise ParseError(ln, str(exc)) from None

    _keyword(lines, "NODES")
    raw = []
    for k in range(n + 1):
        ln, toks = lines.take("node line")
        if toks[0] in SECTIONS:
            raise ParseError(ln, f"expected {n + 1} nodes, found {k}")
        if len(toks) != 4:
            raise ParseError(ln, "node line needs '<id> <x> <y> <demand>'")
        nid = _int(toks[0], ln)
        if nid != k:
            raise ParseError(ln, f"node ids must be contiguous from 0, expected {k} got {nid}")
        x, y, q = (_num(t, ln) for t in toks[1:])
        if q < 0:
            raise ParseError(ln, f"negative demand {q:g}")
        if nid == 0 and q != 0:
            raise ParseError(ln, "depot demand must be zero")
        raw.append((ln, None if math.isnan(x) or math.isnan(y) else (x, y), q))

    size = n + 1
    dist = None
    lengths = np.zeros(size)
    while (nxt := lines.peek()) is not None:
        ln, toks = lines.take("section")
        if len(toks) != 1 or toks[0] not in ("MATRIX", "LENGTHS"):
            raise ParseError(ln, f"unexpected content {' '.join(toks)!r}")
        if toks[0] == "MATRIX":
            vals = [v for _, v in lines.numbers(size * size, "MATRIX")]
            dist = np.array(vals).reshape(size, size)
            if np.any(dist < 0) or np.any(np.diag(dist) != 0):
                raise ParseError(ln, "MATRIX must be nonnegative with a zero diagonal")
        else:
            for k, (vl, v) in enumerate(lines.numbers(size, "LENGTHS")):
                if v < 0 or (k == 0 and v != 0):
                    raise ParseError(vl, "lengths must be nonnegative and zero at the depot")
                lengths[k] = v
    if dist is None:
        missing = [ln for ln, xy, _ in raw if xy is None]
        if missing:
            raise ParseError(missing[0], "node without coordinates and no MATRIX section")
        dist = euclidean_matrix([xy for _, xy, _ in raw])
    nodes = [Node(k, q, float(lengths[k]), xy) for k, (_, xy, q) in enumerate(raw)]
    return Instance(name, nodes, dist, fleet)


def load_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def _fmt(v: float) -> str:
    return repr(float(v)) if not float(v).is_integer() else str(int(v))


def format_instance(instance: Instance, matrix: Optional[bool] = None) -> str:
    """Serialize ``instance``.  The matrix is written when coordinates cannot reproduce it."""
    coords = [nd.coords for nd in instance.nodes]
    if matrix is None:
        matrix = any(c is None for c in coords) or not np.array_equal(euclidean_matrix(coords), instance.dist)
    out = [f"NAME {instance.name}", f"N {instance.n} M {instance.m}", "VEHICLES"]
    for v in instance.fleet:
        out.append(f"{_fmt(v.capacity)} {_fmt(v.fixed_cost)} {_fmt(v.unit_cost)} {v.count}")
    out.append("NODES")
    for nd in instance.nodes:
        x, y = nd.coords if nd.coords is not None else (math.nan, math.nan)
        out.append(f"{nd.id} {_fmt(x) if not math.isnan(x) else 'nan'} "
                   f"{_fmt(y) if not math.isnan(y) else 'nan'} {_fmt(nd.demand)}")
    if matrix:
        out.append("MATRIX")
        out.extend(" ".join(_fmt(v) for v in row) for row in instance.dist)
    if instance.is_reduced:
        out.append("LENGTHS")
        out.append(" ".join(_fmt(v) for v in instance.lengths))
    return "\n".join(out) + "\n"


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(format_instance(instance))


# ------------------------------------------------------------ conversion


def parse_fleet(text: str) -> list[VehicleType]:
    """Fleet description: one ``<capacity> <fixed> <unit> <count>`` line per vehicle type."""
    fleet = []
    for ln, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        if len(toks) != 4:
            raise ParseError(ln, "fleet line needs '<capacity> <fixed> <unit> <count>'")
        count = _int(toks[3], ln)
        fleet.append(VehicleType(_num(toks[0], ln), _num(toks[1], ln), _num(toks[2], ln),
                                 UNLIMITED if count == -1 else count))
    if not fleet:
        raise ParseError(1, "empty fleet")
    return fleet


def convert_vrplib(text: str, fleet: Sequence[VehicleType]) -> Instance:
    """Build an instance from a VRPLIB/TSPLIB style file plus a fleet description.

    Supports NODE_COORD_SECTION (EUC_2D, unrounded) or an EXPLICIT
    FULL_MATRIX, a DEMAND_SECTION and a DEPOT_SECTION with a single depot.
    The depot becomes vertex 0; customers keep their relative order.
    """
    header: dict[str, str] = {}
    sections: dict[str, list[tuple[int, list[str]]]] = {}
    current = None
    for ln, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s == "EOF":
            continue
        if ":" in s and not s[0].isdigit() and not s[0] == "-":
            key, _, val = s.partition(":")
            header[key.strip().upper()] = val.strip()
            current = None
        elif s.upper().endswith("_SECTION"):
            current = s.upper()
            sections[current] = []
        elif current is not None:
            sections[current].append((ln, s.split()))
        else:
            raise ParseError(ln, f"unexpected line {s!r}")
    if "DIMENSION" not in header:
        raise ParseError(1, "missing DIMENSION")
    dim = int(header["DIMENSION"])
    depots = [_int(t, ln) for ln, toks in sections.get("DEPOT_SECTION", []) for t in toks if t != "-1"]
    if len(depots) > 1:
        raise ParseError(1, "only single-depot instances are supported")
    depot = depots[0] if depots else 1
    order = [depot] + [k for k in range(1, dim + 1) if k != depot]
    pos = {orig: new for new, orig in enumerate(order)}

    demand = np.zeros(dim + 1)
    for ln, toks in sections.get("DEMAND_SECTION", []):
        demand[_int(toks[0], ln)] = _num(toks[1], ln)
    coords: dict[int, tuple[float, float]] = {}
    for ln, toks in sections.get("NODE_COORD_SECTION", []):
        coords[_int(toks[0], ln)] = (_num(toks[1], ln), _num(toks[2], ln))

    if "EDGE_WEIGHT_SECTION" in sections:
        if header.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX").upper() != "FULL_MATRIX":
            raise ParseError(1, "only FULL_MATRIX explicit weights are supported")
        vals = [_num(t, ln) for ln, toks in sections["EDGE_WEIGHT_SECTION"] for t in toks]
        if len(vals) != dim * dim:
            raise ParseError(1, f"EDGE_WEIGHT_SECTION has {len(vals)} values, expected {dim * dim}")
        full = np.array(vals).reshape(dim, dim)
        idx = np.array(order) - 1
        dist = full[np.ix_(idx, idx)]
    else:
        if len(coords) != dim:
            raise ParseError(1, f"NODE_COORD_SECTION has {len(coords)} nodes, expected {dim}")
        dist = euclidean_matrix([coords[k] for k in order])
    nodes = [Node(pos[k], 0.0 if k == depot else float(demand[k]), 0.0, coords.get(k)) for k in order]
    return Instance(header.get("NAME", "unnamed"), nodes, dist, fleet)
