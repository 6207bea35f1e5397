"""Iterated local search with random variable neighborhood descent.

The heavy lifting happens in :mod:`minereduce._kernel`; this module converts
between :class:`~minereduce.model.Solution` objects and the kernel's arrays.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernel as K
from .model import Instance, Route, Solution, solution_cost

MOVES = {
    "shift1": K.SHIFT1,
    "shift2": K.SHIFT2,
    "swap11": K.SWAP11,
    "swap21": K.SWAP21,
    "swap22": K.SWAP22,
    "cross": K.CROSS,
    "2opt": K.TWO_OPT,
    "exchange": K.EXCHANGE,
    "oropt": K.NB_OR_OPT,
    "vehicle": K.VEHICLE,
}

DEBUG = os.environ.get("MINEREDUCE_DEBUG", "") not in ("", "0")


@dataclass(frozen=True)
class IlsParams:
    beta: int = 5
    moves: frozenset = field(default_factory=lambda: frozenset(MOVES))

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        unknown = set(self.moves) - set(MOVES)
        if unknown:
            raise ValueError(f"unknown neighborhoods: {sorted(unknown)}")

    def max_iter_ils(self, n: int, v: int) -> int:
        """Consecutive non-improving perturbations allowed: ``n + beta * v``."""
        return n + self.beta * v

    def neighborhoods(self) -> np.ndarray:
        return np.array(sorted(MOVES[name] for name in self.moves), dtype=np.int64)


def pack(instance: Instance, solution: Solution):
    inst = K.make_inst(instance)
    st = K.empty_state(instance.n, instance.m)
    for r, route in enumerate(solution.routes):
        K.load_route(inst, st, r, route.vehicle, np.asarray(route.customers, dtype=np.int64))
        st.used[route.vehicle] += 1
    st.nr[0] = len(solution.routes)
    return inst, st


def unpack(instance: Instance, st) -> Solution:
    routes = []
    for r in range(st.nr[0]):
        k = st.rlen[r]
        routes.append(Route(int(st.rtype[r]), st.routes[r, 1:k + 1].tolist()))
    sol = Solution(routes, solution_cost(instance, Solution(routes)))
    if DEBUG:
        tracked = K.total_cost(K.make_inst(instance), st)
        assert abs(tracked - sol.cost) <= 1e-6 * max(1.0, abs(sol.cost)), (tracked, sol.cost)
    return sol


def rvnd_descent(instance: Instance, solution: Solution, rng: np.random.Generator,
                 params: IlsParams | None = None) -> Solution:
    """Descend to a local optimum of every enabled neighborhood."""
    params = params or IlsParams()
    inst, st = pack(instance, solution)
    nbs = params.neighborhoods()
    K.rvnd(inst, st, nbs, nbs.copy(), rng)
    out = unpack(instance, st)
    # the scan only accepts strictly improving moves, so an optimum stays as given
    return out if out.cost < solution.cost - K.EPS else solution.copy()


def perturb(instance: Instance, solution: Solution, rng: np.random.Generator) -> Solution:
    inst, st = pack(instance, solution)
    K.perturb(inst, st, rng)
    return unpack(instance, st)


def ils(instance: Instance, start: Solution, params: IlsParams, rng: np.random.Generator) -> Solution:
    """Descend, then perturb the incumbent and descend again until
    ``n + beta * v`` rounds in a row bring no improvement (``v`` = routes of ``start``)."""
    inst, st = pack(instance, start)
    best = K.empty_state(instance.n, instance.m)
    max_fail = params.max_iter_ils(instance.n, len(start.routes))
    nbs = params.neighborhoods()
    K.ils(inst, st, best, nbs, nbs.copy(), rng, max_fail)
    out = unpack(instance, best)
    return out if out.cost <= start.cost else start.copy()
