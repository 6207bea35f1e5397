"""Randomized cheapest-insertion construction.

This is a stand-in for the constructive procedure of the original MS-ILS
code, which is not published: routes are seeded, the remaining customers are
inserted in random order at their cheapest position/route/vehicle, and half
of the time one of the three cheapest insertions is picked at random instead.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np

from .model import Instance, Route, Solution

log = logging.getLogger(__name__)

RANDOM_PICK_PROB = 0.5
RCL_SIZE = 3


class ConstructionError(RuntimeError):
    """No feasible placement was found for some customers."""

    def __init__(self, unplaced: Iterable[int], reason: str = ""):
        self.unplaced = frozenset(unplaced)
        msg = f"could not place customers {sorted(self.unplaced)}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


class _Builder:
    def __init__(self, instance: Instance):
        self.inst = instance
        self.cap, self.fix, self.var, self.cnt = instance.fleet_arrays
        self.routes: list[list[int]] = []
        self.blocked: list[list[bool]] = []  # per route, one flag per insertion gap
        self.types: list[int] = []
        self.loads: list[float] = []
        self.dists: list[float] = []
        self.used = np.zeros(instance.m, dtype=np.int64)

    def travel(self, path: Sequence[int]) -> float:
        d = self.inst.dist
        L = self.inst.lengths
        prev = 0
        t = 0.0
        for c in path:
            t += d[prev, c] + L[c]
            prev = c
        return t + d[prev, 0]

    def cheapest_type(self, load: float, dist: float, release: int = -1):
        free = self.cnt - self.used
        if release >= 0:
            free = free.copy()
            free[release] += 1
        ok = (self.cap >= load - 1e-9) & (free > 0)
        if not ok.any():
            return -1, math.inf
        costs = np.where(ok, self.fix + self.var * dist, np.inf)
        u = int(np.argmin(costs))
        return u, float(costs[u])

    def open_route(self, path: list[int], vehicle: int, locked: bool = False):
        self.routes.append(list(path))
        self.blocked.append([False] + [locked] * (len(path) - 1) + [False])
        self.types.append(vehicle)
        self.loads.append(float(self.inst.demands[list(path)].sum()) if path else 0.0)
        self.dists.append(self.travel(path) if path else 0.0)
        self.used[vehicle] += 1

    def candidates(self, c: int):
        """All ``(cost increase, route index or -1, gap or vehicle)`` options for customer ``c``."""
        d = self.inst.dist
        q = self.inst.demands[c]
        lc = self.inst.lengths[c]
        out = []
        for r, path in enumerate(self.routes):
            load = self.loads[r] + q
            if load > self.cap.max() + 1e-9:
                continue
            if path:
                prev = np.array([0, *path])
                nxt = np.array([*path, 0])
                inc = d[prev, c] + lc + d[c, nxt] - d[prev, nxt]
                inc[np.asarray(self.blocked[r])] = np.inf
                g = int(np.argmin(inc))
                best_inc = float(inc[g])
            else:
                g, best_inc = 0, d[0, c] + lc + d[c, 0]
            if not math.isfinite(best_inc):
                continue
            u, cost = self.cheapest_type(load, self.dists[r] + best_inc, release=self.types[r])
            if u < 0:
                continue
            old = self.fix[self.types[r]] + self.var[self.types[r]] * self.dists[r] if path else 0.0
            out.append((cost - old, r, g, u))
        solo = d[0, c] + lc + d[c, 0]
        for u in range(self.inst.m):
            if self.cap[u] >= q - 1e-9 and self.used[u] < self.cnt[u]:
                out.append((self.fix[u] + self.var[u] * solo, -1, 0, u))
        return out

    def insert(self, c: int, rng: np.random.Generator) -> bool:
        cands = self.candidates(c)
        if not cands:
            return False
        cands.sort(key=lambda t: (t[0], t[1], t[2], t[3]))
        if len(cands) > 1 and rng.random() < RANDOM_PICK_PROB:
            pick = cands[int(rng.integers(0, min(RCL_SIZE, len(cands))))]
        else:
            pick = cands[0]
        _, r, g, u = pick
        if r < 0:
            self.open_route([c], u)
            return True
        path = self.routes[r]
        prev = path[g - 1] if g > 0 else 0
        nxt = path[g] if g < len(path) else 0
        d = self.inst.dist
        self.dists[r] += d[prev, c] + self.inst.lengths[c] + d[c, nxt] - d[prev, nxt]
        path.insert(g, c)
        self.blocked[r][g:g + 1] = [False, False]
        self.loads[r] += self.inst.demands[c]
        self.used[self.types[r]] -= 1
        self.used[u] += 1
        self.types[r] = u
        return True

    def solution(self) -> Solution:
        return Solution.build(self.inst, [Route(u, p) for u, p in zip(self.types, self.routes) if p])


def _preopen(b: _Builder, pool: list[int], rng: np.random.Generator):
    """Open the minimum number of routes able to carry the total demand, largest vehicles first."""
    inst = b.inst
    need = inst.total_demand
    order = sorted(range(inst.m), key=lambda u: (-inst.fleet[u].capacity, inst.fleet[u].fixed_cost))
    opened = []
    for u in order:
        avail = inst.fleet[u].count if not inst.fleet[u].unlimited else math.inf
        while avail > 0 and need > 1e-9 and len(opened) < len(pool):
            opened.append(u)
            need -= inst.fleet[u].capacity
            avail -= 1
        if need <= 1e-9:
            break
    for u in opened:
        fits = [c for c in pool if inst.demands[c] <= inst.fleet[u].capacity + 1e-9]
        if not fits:
            continue
        c = fits[int(rng.integers(0, len(fits)))]
        pool.remove(c)
        b.open_route([c], u)


def _attempt(instance, segments, rng, by_demand: bool, preopen: bool):
    b = _Builder(instance)
    placed = set()
    for path, u in segments:
        load = float(instance.demands[list(path)].sum())
        dist = b.travel(path)
        if 0 <= u < instance.m and b.cap[u] >= load - 1e-9 and b.used[u] < b.cnt[u]:
            vehicle = u
        else:
            vehicle, _ = b.cheapest_type(load, dist)
        if vehicle < 0:
            log.debug("no vehicle left for segment %s; inserting its customers freely", path)
            continue
        b.open_route(list(path), vehicle, locked=True)
        placed.update(path)
    pool = [c for c in range(1, instance.n + 1) if c not in placed]
    if preopen and not segments:
        _preopen(b, pool, rng)
    pool = [pool[k] for k in rng.permutation(len(pool))]
    if by_demand:
        pool.sort(key=lambda c: -instance.demands[c])
    failed = [c for c in pool if not b.insert(c, rng)]
    return b, failed


def _construct(instance: Instance, segments, rng: np.random.Generator, attempts: int) -> Solution:
    why = instance.infeasibility()
    if why:
        raise ConstructionError(range(1, instance.n + 1), why)
    worst: Optional[list[int]] = None
    for k in range(attempts):
        b, failed = _attempt(instance, segments, rng, by_demand=k >= attempts // 2, preopen=True)
        if not failed:
            return b.solution()
        if worst is None or len(failed) < len(worst):
            worst = failed
    raise ConstructionError(worst or [], f"no feasible insertion after {attempts} attempts")


def generate_initial_solution(instance: Instance, rng: np.random.Generator, attempts: int = 20) -> Solution:
    return _construct(instance, [], rng, attempts)


def seed_solution_from_pattern(instance: Instance, pattern_segments, rng: np.random.Generator,
                               attempts: int = 20) -> Solution:
    """Build a solution whose initial routes are the given ``(customer path, vehicle)`` segments.

    Remaining customers are inserted with the same engine as
    :func:`generate_initial_solution`, never inside a segment, so every
    segment survives as a contiguous, same-order piece of one route.
    """
    segments = [(tuple(p), int(u)) for p, u in pattern_segments]
    seen = set()
    for p, _ in segments:
        if seen.intersection(p) or len(set(p)) != len(p):
            raise ValueError("segments must be vertex-disjoint simple paths")
        seen.update(p)
    return _construct(instance, segments, rng, attempts)
