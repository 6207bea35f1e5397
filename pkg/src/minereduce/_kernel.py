"""Array-based route state and move kernels, compiled with numba.

A solution is held as a padded ``routes`` matrix (row ``r`` is
``0, c1, ..., ck, 0``) plus per-route prefix arrays:

* ``P[r, t]``  travel cost from position 0 up to arriving at position ``t``
  (arc distances plus lengths of the vertices left behind),
* ``Rv[r, t]`` the same arcs walked backwards (``d[s_{t+1}, s_t]``),
* ``Lc[r, t]`` cumulative vertex lengths, ``Qc[r, t]`` cumulative demand.

With these, the travel cost of any subpath, forward or reversed, is O(1),
and every move below is evaluated in O(1) plus an O(m^2) vehicle
assignment.  Distances are never assumed symmetric.
"""

from collections import namedtuple

import numpy as np
from numba import njit

# Every kernel is compiled without the numba runtime: none of them allocates,
# and the refcount traffic on the state arrays otherwise dominates move
# evaluation (the pruner cannot see through the nested scan loops).

EPS = 1e-6
CAP_EPS = 1e-9
INF = np.inf

# move ids
SHIFT1 = 0
SHIFT2 = 1
SWAP11 = 2
SWAP21 = 3
SWAP22 = 4
CROSS = 5
TWO_OPT = 6
EXCHANGE = 7
OR_OPT1 = 8
OR_OPT2 = 9
OR_OPT3 = 10
VEHICLE = 11

# neighborhood ids used by RVND; OR_OPT covers block lengths 1..3
NB_OR_OPT = OR_OPT1
NEIGHBORHOODS = (SHIFT1, SHIFT2, SWAP11, SWAP21, SWAP22, CROSS, TWO_OPT, EXCHANGE, NB_OR_OPT, VEHICLE)

Inst = namedtuple("Inst", "D L q cap fix var cnt maxcap")
State = namedtuple("State", "routes rlen rtype rload P Rv Lc Qc used nr buf")


def make_inst(instance):
    cap, fix, var, cnt = instance.fleet_arrays
    return Inst(
        np.ascontiguousarray(instance.dist), np.ascontiguousarray(instance.lengths),
        np.ascontiguousarray(instance.demands), cap.copy(), fix.copy(), var.copy(), cnt.copy(),
        float(cap.max()),
    )


def empty_state(n, m):
    rmax = max(n, 1)
    width = n + 2
    return State(
        np.zeros((rmax, width), dtype=np.int64),
        np.zeros(rmax, dtype=np.int64),
        np.zeros(rmax, dtype=np.int64),
        np.zeros(rmax, dtype=np.float64),
        np.zeros((rmax, width), dtype=np.float64),
        np.zeros((rmax, width), dtype=np.float64),
        np.zeros((rmax, width), dtype=np.float64),
        np.zeros((rmax, width), dtype=np.float64),
        np.zeros(m, dtype=np.int64),
        np.zeros(1, dtype=np.int64),
        np.zeros((2, width), dtype=np.int64),
    )


@njit(cache=True, _nrt=False)
def refresh(inst, st, r):
    k = st.rlen[r]
    s = st.routes[r]
    st.routes[r, 0] = 0
    st.routes[r, k + 1] = 0
    P = st.P[r]
    Rv = st.Rv[r]
    Lc = st.Lc[r]
    Qc = st.Qc[r]
    P[0] = 0.0
    Rv[0] = 0.0
    Lc[0] = 0.0
    Qc[0] = 0.0
    for t in range(1, k + 2):
        a = s[t - 1]
        b = s[t]
        P[t] = P[t - 1] + inst.L[a] + inst.D[a, b]
        Rv[t] = Rv[t - 1] + inst.D[b, a]
        Lc[t] = Lc[t - 1] + inst.L[b]
        Qc[t] = Qc[t - 1] + inst.q[b]
    st.rload[r] = Qc[k + 1]


@njit(cache=True, _nrt=False)
def load_route(inst, st, r, vehicle, customers):
    k = customers.shape[0]
    st.routes[r, 0] = 0
    for t in range(k):
        st.routes[r, t + 1] = customers[t]
    st.routes[r, k + 1] = 0
    st.rlen[r] = k
    st.rtype[r] = vehicle
    refresh(inst, st, r)


@njit(cache=True, inline="always", _nrt=False)
def route_dist(st, r):
    return st.P[r, st.rlen[r] + 1]


@njit(cache=True, inline="always", _nrt=False)
def route_cost(inst, st, r):
    u = st.rtype[r]
    return inst.fix[u] + inst.var[u] * st.P[r, st.rlen[r] + 1]


@njit(cache=True, _nrt=False)
def total_cost(inst, st):
    c = 0.0
    for r in range(st.nr[0]):
        c += route_cost(inst, st, r)
    return c


@njit(cache=True, inline="always", _nrt=False)
def _c(inst, st, r, a, b):
    # travel cost of positions a..b of route r, lengths of both ends included
    return st.P[r, b] - st.P[r, a] + inst.L[st.routes[r, b]]


@njit(cache=True, inline="always", _nrt=False)
def _rc(inst, st, r, a, b):
    # same subpath walked from b back to a
    return st.Rv[r, b] - st.Rv[r, a] + st.Lc[r, b] - st.Lc[r, a - 1]


@njit(cache=True, inline="always", _nrt=False)
def best_single(inst, st, load, dist, cur):
    """Cheapest type able to serve a route of ``load``/``dist`` when it gives up ``cur``."""
    best = INF
    bu = -1
    for u in range(inst.cap.shape[0]):
        if inst.cap[u] < load - CAP_EPS:
            continue
        busy = st.used[u]
        if u == cur:
            busy -= 1
        if busy >= inst.cnt[u]:
            continue
        c = inst.fix[u] + inst.var[u] * dist
        if c < best - 1e-12 or (u == cur and c <= best + 1e-12):
            best = c
            bu = u
    return bu, best


@njit(cache=True, inline="always", _nrt=False)
def best_pair(inst, st, ka, load_a, dist_a, ua, kb, load_b, dist_b, ub):
    """Jointly cheapest feasible types for two routes that release ``ua`` and ``ub``.

    A route with ``k == 0`` customers vanishes and takes no vehicle (type -1).
    """
    m = inst.cap.shape[0]
    best = INF
    bx = -1
    by = -1
    if ka == 0 or kb == 0:
        load = load_b if ka == 0 else load_a
        dist = dist_b if ka == 0 else dist_a
        bu = -1
        for y in range(m):
            if inst.cap[y] < load - CAP_EPS:
                continue
            busy = st.used[y]
            if ua == y:
                busy -= 1
            if ub == y:
                busy -= 1
            if busy >= inst.cnt[y]:
                continue
            c = inst.fix[y] + inst.var[y] * dist
            if c < best - 1e-12:
                best = c
                bu = y
        if ka == 0:
            by = bu
        else:
            bx = bu
    else:
        for x in range(m):
            if inst.cap[x] < load_a - CAP_EPS:
                continue
            busy = st.used[x]
            if ua == x:
                busy -= 1
            if ub == x:
                busy -= 1
            if busy >= inst.cnt[x]:
                continue
            cx = inst.fix[x] + inst.var[x] * dist_a
            if cx >= best:
                continue
            for y in range(m):
                if inst.cap[y] < load_b - CAP_EPS:
                    continue
                busy = st.used[y]
                if ua == y:
                    busy -= 1
                if ub == y:
                    busy -= 1
                if x == y:
                    busy += 1
                if busy >= inst.cnt[y]:
                    continue
                c = cx + inst.fix[y] + inst.var[y] * dist_b
                if c < best - 1e-12:
                    best = c
                    bx = x
                    by = y
    return bx, by, best


# ---------------------------------------------------------------- evaluation


@njit(cache=True, inline="always", _nrt=False)
def _spliced(inst, st, rx, x0, lx, ry, y0, ly):
    # distance of route rx once its block [x0, x0+lx) is replaced by ry's [y0, y0+ly)
    X = st.routes[rx]
    kx = st.rlen[rx]
    pre = X[x0 - 1]
    post = X[x0 + lx]
    d = st.P[rx, x0 - 1] + inst.L[pre]
    if ly > 0:
        Y = st.routes[ry]
        d += inst.D[pre, Y[y0]] + _c(inst, st, ry, y0, y0 + ly - 1) + inst.D[Y[y0 + ly - 1], post]
    else:
        d += inst.D[pre, post]
    d += st.P[rx, kx + 1] - st.P[rx, x0 + lx]
    return d


@njit(cache=True, inline="always", _nrt=False)
def eval_exchange(inst, st, ra, i, a, rb, j, b):
    """Block A[i:i+a] goes to B at j, block B[j:j+b] goes to A at i."""
    seg_a = st.Qc[ra, i + a - 1] - st.Qc[ra, i - 1] if a > 0 else 0.0
    seg_b = st.Qc[rb, j + b - 1] - st.Qc[rb, j - 1] if b > 0 else 0.0
    load_a = st.rload[ra] - seg_a + seg_b
    load_b = st.rload[rb] - seg_b + seg_a
    if load_a > inst.maxcap + CAP_EPS or load_b > inst.maxcap + CAP_EPS:
        return INF, -1, -1
    dist_a = _spliced(inst, st, ra, i, a, rb, j, b)
    dist_b = _spliced(inst, st, rb, j, b, ra, i, a)
    ka = st.rlen[ra] - a + b
    kb = st.rlen[rb] - b + a
    x, y, c = best_pair(inst, st, ka, load_a, dist_a, st.rtype[ra], kb, load_b, dist_b, st.rtype[rb])
    # c is inf when no vehicle assignment exists, which makes the delta inf too
    return c - route_cost(inst, st, ra) - route_cost(inst, st, rb), x, y


@njit(cache=True, inline="always", _nrt=False)
def eval_cross(inst, st, ra, i, rb, j):
    """Tails after positions i (of A) and j (of B) are exchanged."""
    ka_old = st.rlen[ra]
    kb_old = st.rlen[rb]
    load_a = st.Qc[ra, i] + st.rload[rb] - st.Qc[rb, j]
    load_b = st.Qc[rb, j] + st.rload[ra] - st.Qc[ra, i]
    if load_a > inst.maxcap + CAP_EPS or load_b > inst.maxcap + CAP_EPS:
        return INF, -1, -1
    A = st.routes[ra]
    B = st.routes[rb]
    dist_a = st.P[ra, i] + inst.L[A[i]] + inst.D[A[i], B[j + 1]] + st.P[rb, kb_old + 1] - st.P[rb, j + 1]
    dist_b = st.P[rb, j] + inst.L[B[j]] + inst.D[B[j], A[i + 1]] + st.P[ra, ka_old + 1] - st.P[ra, i + 1]
    ka = i + kb_old - j
    kb = j + ka_old - i
    x, y, c = best_pair(inst, st, ka, load_a, dist_a, st.rtype[ra], kb, load_b, dist_b, st.rtype[rb])
    # c is inf when no vehicle assignment exists, which makes the delta inf too
    return c - route_cost(inst, st, ra) - route_cost(inst, st, rb), x, y


@njit(cache=True, inline="always", _nrt=False)
def _intra_delta(inst, st, r, dist):
    u, c = best_single(inst, st, st.rload[r], dist, st.rtype[r])
    return c - route_cost(inst, st, r), u, -1


@njit(cache=True, inline="always", _nrt=False)
def eval_two_opt(inst, st, r, i, j):
    """Reverse positions i..j (i < j)."""
    s = st.routes[r]
    k = st.rlen[r]
    dist = (st.P[r, i - 1] + inst.L[s[i - 1]] + inst.D[s[i - 1], s[j]] + _rc(inst, st, r, i, j)
            + inst.D[s[i], s[j + 1]] + st.P[r, k + 1] - st.P[r, j + 1])
    return _intra_delta(inst, st, r, dist)


@njit(cache=True, inline="always", _nrt=False)
def eval_or_opt(inst, st, r, i, ln, j):
    """Move block [i, i+ln) so that it sits right before position j."""
    s = st.routes[r]
    k = st.rlen[r]
    e = i + ln - 1
    if j < i:
        dist = (st.P[r, j - 1] + inst.L[s[j - 1]] + inst.D[s[j - 1], s[i]] + _c(inst, st, r, i, e)
                + inst.D[s[e], s[j]] + _c(inst, st, r, j, i - 1) + inst.D[s[i - 1], s[e + 1]]
                + st.P[r, k + 1] - st.P[r, e + 1])
    else:
        dist = (st.P[r, i - 1] + inst.L[s[i - 1]] + inst.D[s[i - 1], s[e + 1]] + _c(inst, st, r, e + 1, j - 1)
                + inst.D[s[j - 1], s[i]] + _c(inst, st, r, i, e) + inst.D[s[e], s[j]]
                + st.P[r, k + 1] - st.P[r, j])
    return _intra_delta(inst, st, r, dist)


@njit(cache=True, inline="always", _nrt=False)
def eval_swap_pos(inst, st, r, i, j):
    """Exchange the customers at positions i < j."""
    s = st.routes[r]
    k = st.rlen[r]
    L = inst.L
    D = inst.D
    head = st.P[r, i - 1] + L[s[i - 1]]
    tail = st.P[r, k + 1] - st.P[r, j + 1]
    if j == i + 1:
        mid = D[s[i - 1], s[j]] + L[s[j]] + D[s[j], s[i]] + L[s[i]] + D[s[i], s[j + 1]]
    else:
        mid = (D[s[i - 1], s[j]] + L[s[j]] + D[s[j], s[i + 1]] + _c(inst, st, r, i + 1, j - 1)
               + D[s[j - 1], s[i]] + L[s[i]] + D[s[i], s[j + 1]])
    return _intra_delta(inst, st, r, head + mid + tail)


@njit(cache=True, inline="always", _nrt=False)
def eval_vehicle(inst, st, r):
    return _intra_delta(inst, st, r, route_dist(st, r))


@njit(cache=True, _nrt=False)
def eval_move(inst, st, mv, ra, i, rb, j):
    if mv == SHIFT1:
        return eval_exchange(inst, st, ra, i, 1, rb, j, 0)
    if mv == SHIFT2:
        return eval_exchange(inst, st, ra, i, 2, rb, j, 0)
    if mv == SWAP11:
        return eval_exchange(inst, st, ra, i, 1, rb, j, 1)
    if mv == SWAP21:
        return eval_exchange(inst, st, ra, i, 2, rb, j, 1)
    if mv == SWAP22:
        return eval_exchange(inst, st, ra, i, 2, rb, j, 2)
    if mv == CROSS:
        return eval_cross(inst, st, ra, i, rb, j)
    if mv == TWO_OPT:
        return eval_two_opt(inst, st, ra, i, j)
    if mv == EXCHANGE:
        return eval_swap_pos(inst, st, ra, i, j)
    if mv == VEHICLE:
        return eval_vehicle(inst, st, ra)
    return eval_or_opt(inst, st, ra, i, mv - OR_OPT1 + 1, j)


# ------------------------------------------------------------------ applying


@njit(cache=True, _nrt=False)
def _set_type(st, r, u):
    old = st.rtype[r]
    if old >= 0:
        st.used[old] -= 1
    st.rtype[r] = u
    if u >= 0:
        st.used[u] += 1


@njit(cache=True, _nrt=False)
def _drop_route(inst, st, r):
    last = st.nr[0] - 1
    if r != last:
        k = st.rlen[last]
        for t in range(k + 2):
            st.routes[r, t] = st.routes[last, t]
        st.rlen[r] = k
        st.rtype[r] = st.rtype[last]
        refresh(inst, st, r)
    st.nr[0] = last


@njit(cache=True, _nrt=False)
def _commit_pair(inst, st, ra, ka, rb, kb, x, y):
    # rows ra/rb of st.buf hold the new sequences (customers only, starting at column 0)
    for t in range(ka):
        st.routes[ra, t + 1] = st.buf[0, t]
    for t in range(kb):
        st.routes[rb, t + 1] = st.buf[1, t]
    st.rlen[ra] = ka
    st.rlen[rb] = kb
    # release both vehicles before taking the new ones so counts never overshoot
    _set_type(st, ra, -1)
    _set_type(st, rb, -1)
    _set_type(st, ra, x)
    _set_type(st, rb, y)
    refresh(inst, st, ra)
    refresh(inst, st, rb)
    if kb == 0:
        _drop_route(inst, st, rb)
    elif ka == 0:
        _drop_route(inst, st, ra)


@njit(cache=True, _nrt=False)
def apply_exchange(inst, st, ra, i, a, rb, j, b, x, y):
    A = st.routes[ra]
    B = st.routes[rb]
    ka_old = st.rlen[ra]
    kb_old = st.rlen[rb]
    n = 0
    for t in range(1, i):
        st.buf[0, n] = A[t]
        n += 1
    for t in range(j, j + b):
        st.buf[0, n] = B[t]
        n += 1
    for t in range(i + a, ka_old + 1):
        st.buf[0, n] = A[t]
        n += 1
    ka = n
    n = 0
    for t in range(1, j):
        st.buf[1, n] = B[t]
        n += 1
    for t in range(i, i + a):
        st.buf[1, n] = A[t]
        n += 1
    for t in range(j + b, kb_old + 1):
        st.buf[1, n] = B[t]
        n += 1
    _commit_pair(inst, st, ra, ka, rb, n, x, y)


@njit(cache=True, _nrt=False)
def apply_cross(inst, st, ra, i, rb, j, x, y):
    A = st.routes[ra]
    B = st.routes[rb]
    ka_old = st.rlen[ra]
    kb_old = st.rlen[rb]
    n = 0
    for t in range(1, i + 1):
        st.buf[0, n] = A[t]
        n += 1
    for t in range(j + 1, kb_old + 1):
        st.buf[0, n] = B[t]
        n += 1
    ka = n
    n = 0
    for t in range(1, j + 1):
        st.buf[1, n] = B[t]
        n += 1
    for t in range(i + 1, ka_old + 1):
        st.buf[1, n] = A[t]
        n += 1
    _commit_pair(inst, st, ra, ka, rb, n, x, y)


@njit(cache=True, _nrt=False)
def _commit_single(inst, st, r, u):
    k = st.rlen[r]
    for t in range(k):
        st.routes[r, t + 1] = st.buf[0, t]
    _set_type(st, r, u)
    refresh(inst, st, r)


@njit(cache=True, _nrt=False)
def apply_two_opt(inst, st, r, i, j, u):
    s = st.routes[r]
    k = st.rlen[r]
    n = 0
    for t in range(1, k + 1):
        if i <= t <= j:
            st.buf[0, n] = s[i + j - t]
        else:
            st.buf[0, n] = s[t]
        n += 1
    _commit_single(inst, st, r, u)


@njit(cache=True, _nrt=False)
def apply_or_opt(inst, st, r, i, ln, j, u):
    s = st.routes[r]
    k = st.rlen[r]
    n = 0
    for t in range(1, k + 2):
        if t == j:
            for q in range(i, i + ln):
                st.buf[0, n] = s[q]
                n += 1
        if t <= k and not (i <= t < i + ln):
            st.buf[0, n] = s[t]
            n += 1
    _commit_single(inst, st, r, u)


@njit(cache=True, _nrt=False)
def apply_swap_pos(inst, st, r, i, j, u):
    s = st.routes[r]
    k = st.rlen[r]
    for t in range(1, k + 1):
        st.buf[0, t - 1] = s[t]
    st.buf[0, i - 1] = s[j]
    st.buf[0, j - 1] = s[i]
    _commit_single(inst, st, r, u)


@njit(cache=True, _nrt=False)
def apply_move(inst, st, mv, ra, i, rb, j, x, y):
    if mv == SHIFT1:
        apply_exchange(inst, st, ra, i, 1, rb, j, 0, x, y)
    elif mv == SHIFT2:
        apply_exchange(inst, st, ra, i, 2, rb, j, 0, x, y)
    elif mv == SWAP11:
        apply_exchange(inst, st, ra, i, 1, rb, j, 1, x, y)
    elif mv == SWAP21:
        apply_exchange(inst, st, ra, i, 2, rb, j, 1, x, y)
    elif mv == SWAP22:
        apply_exchange(inst, st, ra, i, 2, rb, j, 2, x, y)
    elif mv == CROSS:
        apply_cross(inst, st, ra, i, rb, j, x, y)
    elif mv == TWO_OPT:
        apply_two_opt(inst, st, ra, i, j, x)
    elif mv == EXCHANGE:
        apply_swap_pos(inst, st, ra, i, j, x)
    elif mv == VEHICLE:
        _set_type(st, ra, x)
    else:
        apply_or_opt(inst, st, ra, i, mv - OR_OPT1 + 1, j, x)


# ------------------------------------------------------------------- descent


@njit(cache=True, _nrt=False)
def _scan_exchange(inst, st, a, b):
    symmetric = a == b
    nr = st.nr[0]
    for ra in range(nr):
        ka = st.rlen[ra]
        if ka < a:
            continue
        for rb in range(nr):
            if rb == ra or (symmetric and rb < ra):
                continue
            kb = st.rlen[rb]
            if kb < b:
                continue
            jmax = kb - b + 1 if b > 0 else kb + 1
            for i in range(1, ka - a + 2):
                for j in range(1, jmax + 1):
                    delta, x, y = eval_exchange(inst, st, ra, i, a, rb, j, b)
                    if delta < -EPS:
                        apply_exchange(inst, st, ra, i, a, rb, j, b, x, y)
                        return True
    return False


@njit(cache=True, _nrt=False)
def _scan_cross(inst, st):
    nr = st.nr[0]
    for ra in range(nr):
        for rb in range(ra + 1, nr):
            ka = st.rlen[ra]
            kb = st.rlen[rb]
            for i in range(ka + 1):
                for j in range(kb + 1):
                    if (i == 0 and j == 0) or (i == ka and j == kb):
                        continue
                    delta, x, y = eval_cross(inst, st, ra, i, rb, j)
                    if delta < -EPS:
                        apply_cross(inst, st, ra, i, rb, j, x, y)
                        return True
    return False


@njit(cache=True, _nrt=False)
def _scan_two_opt(inst, st):
    for r in range(st.nr[0]):
        k = st.rlen[r]
        for i in range(1, k):
            for j in range(i + 1, k + 1):
                delta, u, _ = eval_two_opt(inst, st, r, i, j)
                if delta < -EPS:
                    apply_two_opt(inst, st, r, i, j, u)
                    return True
    return False


@njit(cache=True, _nrt=False)
def _scan_swap_pos(inst, st):
    for r in range(st.nr[0]):
        k = st.rlen[r]
        for i in range(1, k):
            for j in range(i + 1, k + 1):
                delta, u, _ = eval_swap_pos(inst, st, r, i, j)
                if delta < -EPS:
                    apply_swap_pos(inst, st, r, i, j, u)
                    return True
    return False


@njit(cache=True, _nrt=False)
def _scan_or_opt(inst, st):
    for ln in range(1, 4):
        for r in range(st.nr[0]):
            k = st.rlen[r]
            for i in range(1, k - ln + 2):
                for j in range(1, k + 2):
                    if i <= j <= i + ln:
                        continue
                    delta, u, _ = eval_or_opt(inst, st, r, i, ln, j)
                    if delta < -EPS:
                        apply_or_opt(inst, st, r, i, ln, j, u)
                        return True
    return False


@njit(cache=True, _nrt=False)
def _scan_vehicle(inst, st):
    for r in range(st.nr[0]):
        delta, u, _ = eval_vehicle(inst, st, r)
        if delta < -EPS:
            _set_type(st, r, u)
            return True
    return False


@njit(cache=True, _nrt=False)
def scan(inst, st, nb):
    if nb == SHIFT1:
        return _scan_exchange(inst, st, 1, 0)
    if nb == SHIFT2:
        return _scan_exchange(inst, st, 2, 0)
    if nb == SWAP11:
        return _scan_exchange(inst, st, 1, 1)
    if nb == SWAP21:
        return _scan_exchange(inst, st, 2, 1)
    if nb == SWAP22:
        return _scan_exchange(inst, st, 2, 2)
    if nb == CROSS:
        return _scan_cross(inst, st)
    if nb == TWO_OPT:
        return _scan_two_opt(inst, st)
    if nb == EXCHANGE:
        return _scan_swap_pos(inst, st)
    if nb == VEHICLE:
        return _scan_vehicle(inst, st)
    return _scan_or_opt(inst, st)


@njit(cache=True, inline="always", _nrt=False)
def randint(rng, lo, hi):
    """Uniform integer in ``[lo, hi)``; ``Generator.integers`` allocates and needs the runtime."""
    return min(lo + int(rng.random() * (hi - lo)), hi - 1)


@njit(cache=True, _nrt=False)
def _shuffle(arr, rng):
    for t in range(arr.shape[0] - 1, 0, -1):
        s = randint(rng, 0, t + 1)
        tmp = arr[t]
        arr[t] = arr[s]
        arr[s] = tmp


@njit(cache=True, _nrt=False)
def rvnd(inst, st, nbs, order, rng):
    """Random variable neighborhood descent; returns the number of applied moves.

    ``order`` is scratch space of the same size as ``nbs``.
    """
    for t in range(nbs.shape[0]):
        order[t] = nbs[t]
    _shuffle(order, rng)
    moves = 0
    k = 0
    while k < order.shape[0]:
        if scan(inst, st, order[k]):
            moves += 1
            _shuffle(order, rng)
            k = 0
        else:
            k += 1
    return moves


# -------------------------------------------------------------- perturbation


@njit(cache=True, _nrt=False)
def _double_bridge(inst, st, rng):
    nr = st.nr[0]
    eligible = 0
    for r in range(nr):
        if st.rlen[r] >= 2:
            eligible += 1
    if eligible == 0:
        return False
    pick = randint(rng, 0, eligible)
    r = -1
    for q in range(nr):
        if st.rlen[q] >= 2:
            if pick == 0:
                r = q
                break
            pick -= 1
    k = st.rlen[r]
    # three distinct cut points in 1..k+1; blocks [p1,p2) and [p2,p3) trade places
    p1 = randint(rng, 1, k + 2)
    p2 = randint(rng, 1, k + 1)
    if p2 >= p1:
        p2 += 1
    p3 = randint(rng, 1, k)
    lo = min(p1, p2)
    hi = max(p1, p2)
    if p3 >= lo:
        p3 += 1
    if p3 >= hi:
        p3 += 1
    a = min(p1, min(p2, p3))
    c = max(p1, max(p2, p3))
    b = p1 + p2 + p3 - a - c
    s = st.routes[r]
    n = 0
    for t in range(1, a):
        st.buf[0, n] = s[t]
        n += 1
    for t in range(b, c):
        st.buf[0, n] = s[t]
        n += 1
    for t in range(a, b):
        st.buf[0, n] = s[t]
        n += 1
    for t in range(c, k + 1):
        st.buf[0, n] = s[t]
        n += 1
    for t in range(k):
        st.routes[r, t + 1] = st.buf[0, t]
    refresh(inst, st, r)
    u, _ = best_single(inst, st, st.rload[r], route_dist(st, r), st.rtype[r])
    _set_type(st, r, u)
    return True


@njit(cache=True, _nrt=False)
def _shift_feasible(inst, st, ra, i, rb):
    dq = inst.q[st.routes[ra, i]]
    ka = st.rlen[ra] - 1
    x, y, c = best_pair(inst, st, ka, st.rload[ra] - dq, 0.0, st.rtype[ra],
                        st.rlen[rb] + 1, st.rload[rb] + dq, 0.0, st.rtype[rb])
    return c < INF


@njit(cache=True, _nrt=False)
def _random_shift(inst, st, rng):
    nr = st.nr[0]
    if nr < 2:
        return False
    total = 0
    for ra in range(nr):
        for i in range(1, st.rlen[ra] + 1):
            for rb in range(nr):
                if rb != ra and _shift_feasible(inst, st, ra, i, rb):
                    total += 1
    if total == 0:
        return False
    pick = randint(rng, 0, total)
    for ra in range(nr):
        for i in range(1, st.rlen[ra] + 1):
            for rb in range(nr):
                if rb != ra and _shift_feasible(inst, st, ra, i, rb):
                    if pick == 0:
                        j = randint(rng, 1, st.rlen[rb] + 2)
                        _, x, y = eval_exchange(inst, st, ra, i, 1, rb, j, 0)
                        apply_exchange(inst, st, ra, i, 1, rb, j, 0, x, y)
                        return True
                    pick -= 1
    return False


@njit(cache=True, _nrt=False)
def perturb(inst, st, rng):
    """Double-bridge one route or apply two random feasible inter-route shifts."""
    if st.nr[0] >= 2 and randint(rng, 0, 2) == 1:
        done = _random_shift(inst, st, rng)
        if done:
            _random_shift(inst, st, rng)
            return True
        return _double_bridge(inst, st, rng)
    if _double_bridge(inst, st, rng):
        return True
    done = _random_shift(inst, st, rng)
    if done:
        _random_shift(inst, st, rng)
    return done


# ----------------------------------------------------------------------- ILS


@njit(cache=True, _nrt=False)
def copy_state(src, dst):
    nr = src.nr[0]
    dst.nr[0] = nr
    for r in range(nr):
        k = src.rlen[r]
        dst.rlen[r] = k
        dst.rtype[r] = src.rtype[r]
        dst.rload[r] = src.rload[r]
        for t in range(k + 2):
            dst.routes[r, t] = src.routes[r, t]
            dst.P[r, t] = src.P[r, t]
            dst.Rv[r, t] = src.Rv[r, t]
            dst.Lc[r, t] = src.Lc[r, t]
            dst.Qc[r, t] = src.Qc[r, t]
    for u in range(src.used.shape[0]):
        dst.used[u] = src.used[u]


@njit(cache=True, _nrt=False)
def ils(inst, st, best, nbs, order, rng, max_fail):
    """Iterated local search; ``best`` receives the result.  Returns perturbation rounds."""
    rvnd(inst, st, nbs, order, rng)
    copy_state(st, best)
    best_cost = total_cost(inst, best)
    fails = 0
    rounds = 0
    while fails < max_fail:
        copy_state(best, st)
        perturb(inst, st, rng)
        rvnd(inst, st, nbs, order, rng)
        rounds += 1
        c = total_cost(inst, st)
        if c < best_cost - EPS:
            copy_state(st, best)
            best_cost = c
            fails = 0
        else:
            fails += 1
    return rounds
