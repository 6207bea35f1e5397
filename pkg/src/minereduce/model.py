"""Heterogeneous-fleet VRP data model.

Costs follow the vertex-length formulation: a customer vertex may stand for a
whole route segment, in which case it carries the length of that segment and
every vehicle pays ``unit_cost * length`` for visiting it.  Plain instances
have all lengths equal to zero and reduce to the classical model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

UNLIMITED = -1
"""Fleet count marking an unlimited vehicle type (fleet size and mix)."""

COST_EPS = 1e-6


class StructureError(ValueError):
    """A route, solution or instance refers to something that does not exist."""


@dataclass(frozen=True)
class VehicleType:
    capacity: float
    fixed_cost: float
    unit_cost: float
    count: int = UNLIMITED

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValueError(f"vehicle capacity must be positive, got {self.capacity}")
        if self.fixed_cost < 0 or self.unit_cost < 0:
            raise ValueError("vehicle costs must be nonnegative")
        if self.count < 0 and self.count != UNLIMITED:
            raise ValueError(f"invalid vehicle count {self.count}")

    @property
    def unlimited(self) -> bool:
        return self.count == UNLIMITED


@dataclass(frozen=True)
class Node:
    id: int
    demand: float = 0.0
    length: float = 0.0
    coords: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.demand < 0:
            raise ValueError(f"node {self.id}: negative demand")
        if self.length < 0:
            raise ValueError(f"node {self.id}: negative length")
        if self.id == 0 and (self.demand != 0 or self.length != 0):
            raise ValueError("depot must have zero demand and zero length")


class Instance:
    """An immutable HFVRP instance.

    ``dist`` is a dense ``(n+1, n+1)`` matrix that may be asymmetric.  Vertex 0
    is the depot, customers are ``1..n``.
    """

    def __init__(self, name: str, nodes: Sequence[Node], dist, fleet: Sequence[VehicleType]):
        self.name = name
        self.nodes = tuple(nodes)
        self.fleet = tuple(fleet)
        d = np.array(dist, dtype=np.float64)
        d.setflags(write=False)
        self.dist = d
        self._validate()

    def _validate(self):
        size = len(self.nodes)
        if size < 1:
            raise ValueError("instance needs at least a depot")
        for k, node in enumerate(self.nodes):
            if node.id != k:
                raise ValueError(f"node ids must be contiguous from 0, found {node.id} at {k}")
        if self.dist.shape != (size, size):
            raise ValueError(f"distance matrix shape {self.dist.shape} does not match {size} vertices")
        if not np.all(np.isfinite(self.dist)) or np.any(self.dist < 0):
            raise ValueError("distances must be finite and nonnegative")
        if np.any(np.diag(self.dist) != 0):
            raise ValueError("distance matrix diagonal must be zero")
        if not self.fleet:
            raise ValueError("fleet is empty")

    @property
    def n(self) -> int:
        """Number of customers."""
        return len(self.nodes) - 1

    @property
    def m(self) -> int:
        return len(self.fleet)

    @cached_property
    def demands(self) -> np.ndarray:
        a = np.array([nd.demand for nd in self.nodes], dtype=np.float64)
        a.setflags(write=False)
        return a

    @cached_property
    def lengths(self) -> np.ndarray:
        a = np.array([nd.length for nd in self.nodes], dtype=np.float64)
        a.setflags(write=False)
        return a

    @cached_property
    def fleet_arrays(self):
        """``(capacity, fixed, unit, count)`` arrays; unlimited counts become a huge int."""
        cap = np.array([v.capacity for v in self.fleet], dtype=np.float64)
        fix = np.array([v.fixed_cost for v in self.fleet], dtype=np.float64)
        var = np.array([v.unit_cost for v in self.fleet], dtype=np.float64)
        cnt = np.array([1 << 40 if v.unlimited else v.count for v in self.fleet], dtype=np.int64)
        for a in (cap, fix, var, cnt):
            a.setflags(write=False)
        return cap, fix, var, cnt

    @property
    def total_demand(self) -> float:
        return float(self.demands.sum())

    @property
    def max_capacity(self) -> float:
        return max(v.capacity for v in self.fleet)

    @property
    def is_reduced(self) -> bool:
        return bool(np.any(self.lengths > 0))

    def fleet_capacity(self) -> float:
        if any(v.unlimited for v in self.fleet):
            return math.inf
        return sum(v.capacity * v.count for v in self.fleet)

    def infeasibility(self) -> Optional[str]:
        """Return a reason the instance can never be served, or ``None``."""
        if self.n and self.demands[1:].max() > self.max_capacity:
            return "a customer demand exceeds every vehicle capacity"
        if self.total_demand > self.fleet_capacity() + 1e-9:
            return "total demand exceeds total fleet capacity"
        return None

    def __repr__(self):
        return f"Instance({self.name!r}, n={self.n}, m={self.m})"


@dataclass
class Route:
    vehicle: int
    customers: list[int]

    def __post_init__(self):
        self.customers = list(self.customers)

    def arcs(self):
        path = [0, *self.customers, 0]
        return list(zip(path[:-1], path[1:]))


@dataclass
class Solution:
    routes: list[Route] = field(default_factory=list)
    cost: float = 0.0

    @classmethod
    def build(cls, instance: Instance, routes) -> "Solution":
        """Make a solution from ``Route`` objects or ``(vehicle, customers)`` pairs, computing its cost."""
        rs = [r if isinstance(r, Route) else Route(r[0], r[1]) for r in routes]
        rs = [r for r in rs if r.customers]
        sol = cls(rs, 0.0)
        sol.cost = solution_cost(instance, sol)
        return sol

    def copy(self) -> "Solution":
        return Solution([Route(r.vehicle, list(r.customers)) for r in self.routes], self.cost)

    def __len__(self):
        return len(self.routes)


def _check_route(instance: Instance, route: Route):
    if not 0 <= route.vehicle < instance.m:
        raise StructureError(f"unknown vehicle type {route.vehicle}")
    for c in route.customers:
        if not 1 <= c <= instance.n:
            raise StructureError(f"invalid customer id {c}")


def route_cost(instance: Instance, route: Route) -> float:
    _check_route(instance, route)
    veh = instance.fleet[route.vehicle]
    d = instance.dist
    prev = 0
    travel = 0.0
    for c in route.customers:
        travel += d[prev, c] + instance.nodes[c].length
        prev = c
    travel += d[prev, 0]
    return float(veh.fixed_cost + veh.unit_cost * travel)


def solution_cost(instance: Instance, solution: Solution) -> float:
    return sum((route_cost(instance, r) for r in solution.routes), 0.0)


def route_load(instance: Instance, route: Route) -> float:
    return float(sum((instance.nodes[c].demand for c in route.customers), 0.0))


@dataclass(frozen=True)
class Violation:
    kind: str  # "capacity", "fleet" or "coverage"
    subject: int  # route index, vehicle type or customer id
    detail: str


def check_feasibility(instance: Instance, solution: Solution) -> list[Violation]:
    """List every constraint violation of ``solution``; an empty list means feasible.

    Capacity violations are reported against the customer set of the route
    rather than its position so that permuting routes yields the same report.
    """
    out = []
    seen: dict[int, int] = {}
    used = [0] * instance.m
    for r in solution.routes:
        if not 0 <= r.vehicle < instance.m:
            out.append(Violation("fleet", r.vehicle, "unknown vehicle type"))
            continue
        used[r.vehicle] += 1
        load = sum(instance.demands[c] for c in r.customers if 1 <= c <= instance.n)
        cap = instance.fleet[r.vehicle].capacity
        if load > cap + 1e-9:
            out.append(Violation("capacity", min(r.customers, default=0),
                                 f"load {load:g} exceeds capacity {cap:g} on route {sorted(r.customers)}"))
        for c in r.customers:
            seen[c] = seen.get(c, 0) + 1
    for u, v in enumerate(instance.fleet):
        if not v.unlimited and used[u] > v.count:
            out.append(Violation("fleet", u, f"{used[u]} routes use type {u}, only {v.count} available"))
    for c in range(1, instance.n + 1):
        k = seen.pop(c, 0)
        if k != 1:
            out.append(Violation("coverage", c, f"customer visited {k} times"))
    for c in sorted(seen):
        out.append(Violation("coverage", c, "unknown customer id"))
    return out


def is_feasible(instance: Instance, solution: Solution) -> bool:
    return not check_feasibility(instance, solution)


def euclidean_matrix(coords) -> np.ndarray:
    xy = np.asarray(coords, dtype=np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=-1))
