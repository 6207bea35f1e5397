"""Contract route segments into cluster vertices and map solutions back."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .construct import generate_initial_solution
from .localsearch import IlsParams, ils, rvnd_descent
from .model import Instance, Node, Route, Solution, StructureError

log = logging.getLogger(__name__)

REDUCED_SEARCH = ("ils", "descent")


@dataclass
class ReductionMap:
    original: Instance
    entries: dict[int, list[int]]  # cluster id -> ordered original customers
    passthrough: dict[int, int]  # other reduced ids (depot included) -> original id

    def originals(self, rid: int) -> list[int]:
        if rid in self.entries:
            return self.entries[rid]
        if rid in self.passthrough:
            return [self.passthrough[rid]]
        raise StructureError(f"reduced vertex {rid} is not in the reduction map")


def _segment_paths(segments) -> list[tuple[int, ...]]:
    """Accept bare customer paths or ``(path, vehicle)`` pairs."""
    out = []
    for s in segments:
        if len(s) == 2 and not isinstance(s[0], (int, np.integer)):
            s = s[0]
        out.append(tuple(int(c) for c in s))
    return out


def reduce_instance(instance: Instance, segments: Iterable) -> tuple[Instance, ReductionMap]:
    """Replace each segment by one cluster vertex.

    The cluster carries the summed demand and the length of the segment, is
    entered through the first customer's incoming arcs and left through the
    last customer's outgoing arcs.  Surviving customers keep their relative
    order and are renumbered ``1..s``; clusters follow in segment order.
    """
    paths = _segment_paths(segments)
    seen: set[int] = set()
    for p in paths:
        for c in p:
            if not 1 <= c <= instance.n:
                raise StructureError(f"segment {p} contains invalid customer {c}")
            if c in seen:
                raise StructureError(f"customer {c} appears in more than one segment")
            seen.add(c)
    q = instance.demands
    L = instance.lengths
    D = instance.dist
    kept = []
    for p in paths:
        if len(p) < 2:
            continue
        if q[list(p)].sum() > instance.max_capacity + 1e-9:
            log.warning("segment %s exceeds every vehicle capacity; not merged", p)
            continue
        kept.append(p)

    merged = {c for p in kept for c in p}
    survivors = [c for c in range(1, instance.n + 1) if c not in merged]
    first = [0, *survivors, *(p[0] for p in kept)]
    last = [0, *survivors, *(p[-1] for p in kept)]
    size = len(first)

    dist = D[np.ix_(last, first)].copy()
    np.fill_diagonal(dist, 0.0)

    nodes = [Node(0, coords=instance.nodes[0].coords)]
    for rid, c in enumerate(survivors, start=1):
        nd = instance.nodes[c]
        nodes.append(Node(rid, nd.demand, nd.length, nd.coords))
    entries = {}
    for rid, p in enumerate(kept, start=len(survivors) + 1):
        inner = sum(D[a, b] for a, b in zip(p[:-1], p[1:]))
        nodes.append(Node(rid, float(q[list(p)].sum()), float(inner + L[list(p)].sum())))
        entries[rid] = list(p)
    assert len(nodes) == size
    passthrough = {0: 0, **{rid: c for rid, c in enumerate(survivors, start=1)}}
    reduced = Instance(f"{instance.name}/reduced", nodes, dist, instance.fleet)
    return reduced, ReductionMap(instance, entries, passthrough)


def expand_solution(reduced_solution: Solution, rmap: ReductionMap) -> Solution:
    routes = []
    for r in reduced_solution.routes:
        customers = []
        for v in r.customers:
            customers.extend(rmap.originals(v))
        routes.append(Route(r.vehicle, customers))
    return Solution.build(rmap.original, routes)


def minereduce_generation(instance: Instance, pattern, ils_params: IlsParams, rng: np.random.Generator,
                          reduced_search: str = "ils") -> Solution:
    """Reduce with the pattern's segments, solve the reduced instance once, expand.

    ``reduced_search`` picks the local search applied to the reduced
    instance: a full ILS (``"ils"``) or a single RVND descent (``"descent"``).
    """
    if reduced_search not in REDUCED_SEARCH:
        raise ValueError(f"reduced_search must be one of {REDUCED_SEARCH}")
    segments = getattr(pattern, "segments", pattern)
    reduced, rmap = reduce_instance(instance, segments)
    start = generate_initial_solution(reduced, rng)
    if reduced_search == "ils":
        best = ils(reduced, start, ils_params, rng)
    else:
        best = rvnd_descent(reduced, start, rng, ils_params)
    return expand_solution(best, rmap)
