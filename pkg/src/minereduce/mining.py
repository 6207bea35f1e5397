"""Elite set, arc encoding of solutions and maximal frequent itemset mining."""

from __future__ import annotations

import bisect
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple, Optional, Sequence, TextIO

from .model import COST_EPS, Solution


class Item(NamedTuple):
    """An arc ``(i, j)`` travelled by a vehicle of type ``vehicle``."""

    arc: tuple[int, int]
    vehicle: int

    def token(self) -> str:
        return f"{self.arc[0]}>{self.arc[1]}@{self.vehicle}"

    @classmethod
    def parse(cls, token: str) -> "Item":
        arc, _, u = token.partition("@")
        i, _, j = arc.partition(">")
        return cls((int(i), int(j)), int(u))


class MalformedPatternError(ValueError):
    pass


def encode_transaction(solution: Solution) -> frozenset[Item]:
    items = []
    for r in solution.routes:
        path = [0, *r.customers, 0]
        items.extend(Item((a, b), r.vehicle) for a, b in zip(path[:-1], path[1:]))
    return frozenset(items)


def format_transaction(items: Iterable[Item]) -> str:
    return " ".join(it.token() for it in sorted(items))


def parse_transaction(line: str) -> frozenset[Item]:
    return frozenset(Item.parse(tok) for tok in line.split())


# ---------------------------------------------------------------- elite set


@dataclass
class EliteSet:
    capacity: int
    members: list[tuple[Solution, frozenset]] = field(default_factory=list)
    last_change_iter: int = 0
    mined_since_change: bool = False

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("elite set capacity must be positive")

    def __len__(self):
        return len(self.members)

    def transactions(self) -> list[frozenset]:
        return [t for _, t in self.members]

    @property
    def worst_cost(self) -> float:
        return self.members[-1][0].cost if self.members else math.inf

    def mark_mined(self):
        self.mined_since_change = True


def update_elite_set(elite: EliteSet, candidate: Solution, iteration: int) -> bool:
    """Insert ``candidate`` if it is distinct and either the set has room or it beats the worst member."""
    full = len(elite.members) >= elite.capacity
    if full and not candidate.cost < elite.worst_cost - COST_EPS:
        return False
    tx = encode_transaction(candidate)
    if any(t == tx for _, t in elite.members):
        return False
    if full:
        elite.members.pop()
    costs = [s.cost for s, _ in elite.members]
    elite.members.insert(bisect.bisect_right(costs, candidate.cost), (candidate.copy(), tx))
    elite.last_change_iter = iteration
    elite.mined_since_change = False
    return True


def is_stable(elite: EliteSet, delta: int, current_iter: int) -> bool:
    """Stability test evaluated at the start of iteration ``current_iter``.

    Before the first mining the set is stable once it went ``delta`` whole
    iterations without modification.  After a mining it additionally has to
    have changed since then, so identical content is never mined twice.
    """
    if elite.mined_since_change:
        return False
    return current_iter - elite.last_change_iter > delta


# ------------------------------------------------------------------- FPmax


def min_support_count(min_sup: float, n_transactions: int) -> int:
    # rounding first keeps e.g. 0.7 * 10 from becoming a threshold of 8
    return max(1, math.ceil(round(min_sup * n_transactions, 9)))


class _FPNode:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children = {}


class _FPTree:
    def __init__(self, paths: Iterable[tuple[Sequence, int]], rank: dict, min_count: int):
        counts: dict = defaultdict(int)
        paths = list(paths)
        for items, c in paths:
            for it in items:
                counts[it] += c
        total = sum(c for _, c in paths)
        # items present in every path extend any itemset of this tree for free
        self.perfect = frozenset(it for it, c in counts.items() if c == total)
        self.frequent = {it for it, c in counts.items() if c >= min_count and it not in self.perfect}
        self.counts = {it: counts[it] for it in self.frequent}
        self.root = _FPNode(None, None)
        self.header: dict = defaultdict(list)
        for items, c in paths:
            node = self.root
            for it in sorted((x for x in items if x in self.frequent), key=rank.__getitem__):
                child = node.children.get(it)
                if child is None:
                    child = node.children[it] = _FPNode(it, node)
                    self.header[it].append(child)
                child.count += c
                node = child

    def single_path(self) -> Optional[list]:
        path = []
        node = self.root
        while node.children:
            if len(node.children) > 1:
                return None
            node = next(iter(node.children.values()))
            path.append(node.item)
        return path

    def prefix_paths(self, item):
        for node in self.header[item]:
            path = []
            p = node.parent
            while p.item is not None:
                path.append(p.item)
                p = p.parent
            yield path, node.count


def _subsumed(candidate: frozenset, found: list[frozenset]) -> bool:
    return any(candidate <= m for m in found)


def _fpmax(tree: _FPTree, head: frozenset, rank, min_count, found: list[frozenset]):
    path = tree.single_path()
    if path is not None:
        cand = head | frozenset(path)
        if cand and not _subsumed(cand, found):
            found.append(cand)
        return
    for item in sorted(tree.frequent, key=rank.__getitem__, reverse=True):
        base = list(tree.prefix_paths(item))
        cond = _FPTree(base, rank, min_count)
        new_head = head | {item} | cond.perfect
        # look-ahead: everything reachable from here is already covered
        if _subsumed(new_head | cond.frequent, found):
            continue
        if not cond.frequent:
            if not _subsumed(new_head, found):
                found.append(new_head)
        else:
            _fpmax(cond, new_head, rank, min_count, found)


def mine_maximal_frequent(transactions: Sequence[Iterable[Hashable]], min_sup_fraction: float):
    """Return every maximal frequent itemset with its support count.

    An itemset is frequent when it occurs in at least
    ``ceil(min_sup_fraction * len(transactions))`` transactions.  The output
    is sorted by decreasing size, then by sorted item tuple.
    """
    if not transactions:
        raise ValueError("need at least one transaction")
    if not 0 < min_sup_fraction <= 1:
        raise ValueError("min_sup_fraction must lie in (0, 1]")
    db = [frozenset(t) for t in transactions]
    min_count = min_support_count(min_sup_fraction, len(db))
    freq: dict = defaultdict(int)
    for t in db:
        for it in t:
            freq[it] += 1
    # most frequent first; ties broken by the item itself for determinism
    order = sorted(freq, key=lambda it: (-freq[it], it))
    rank = {it: k for k, it in enumerate(order)}
    tree = _FPTree(((t, 1) for t in db), rank, min_count)
    found: list[frozenset] = []
    _fpmax(tree, tree.perfect, rank, min_count, found)
    maximal = [s for s in found if not any(s < o for o in found)]
    out = [(s, sum(1 for t in db if s <= t)) for s in set(maximal)]
    out.sort(key=lambda p: (-len(p[0]), sorted(p[0])))
    return out


# ---------------------------------------------------------------- patterns


def assemble_segments(itemset: Iterable[Item]) -> list[tuple[tuple[int, ...], int]]:
    """Chain the customer-to-customer arcs of a pattern into route segments.

    Arcs touching the depot are ignored.  Returns ``(path, vehicle)`` pairs
    for every chain of at least two customers, sorted by path.
    """
    succ: dict[int, tuple[int, int]] = {}
    pred: dict[int, int] = {}
    for it in itemset:
        i, j = it.arc
        if i == 0 or j == 0:
            continue
        if i == j:
            raise MalformedPatternError(f"self loop at {i}")
        if i in succ:
            raise MalformedPatternError(f"vertex {i} has two successors")
        if j in pred:
            raise MalformedPatternError(f"vertex {j} has two predecessors")
        succ[i] = (j, it.vehicle)
        pred[j] = i
    segments = []
    visited = set()
    for start in sorted(v for v in succ if v not in pred):
        path = [start]
        vehicle = succ[start][1]
        v = start
        while v in succ:
            nxt, u = succ[v]
            if u != vehicle:
                raise MalformedPatternError(f"segment through {v} mixes vehicle types {vehicle} and {u}")
            path.append(nxt)
            v = nxt
        visited.update(path)
        segments.append((tuple(path), vehicle))
    if len(visited) < len(set(succ) | set(pred)):
        raise MalformedPatternError("pattern contains a cycle")
    segments.sort()
    return segments


@dataclass(frozen=True)
class Pattern:
    items: frozenset
    support_count: int
    segments: tuple = ()

    @classmethod
    def from_itemset(cls, items, support: int) -> "Pattern":
        items = frozenset(items)
        return cls(items, support, tuple(assemble_segments(items)))

    def __len__(self):
        return len(self.items)


class PatternList:
    """Circular list of patterns, cursor starting at the largest."""

    def __init__(self, patterns: Sequence[Pattern] = ()):
        self.patterns = list(patterns)
        self.cursor = 0

    def __len__(self):
        return len(self.patterns)

    def __bool__(self):
        return bool(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def next(self) -> Pattern:
        if not self.patterns:
            raise ValueError("next_pattern called on an empty pattern list")
        p = self.patterns[self.cursor]
        self.cursor = (self.cursor + 1) % len(self.patterns)
        return p


def next_pattern(patterns: PatternList) -> Pattern:
    return patterns.next()


def select_patterns(itemsets, max_p: int) -> PatternList:
    """Keep the ``max_p`` largest itemsets, largest first, ties by sorted item order."""
    ranked = sorted(itemsets, key=lambda p: (-len(p[0]), sorted(p[0])))
    return PatternList([Pattern.from_itemset(s, sup) for s, sup in ranked[:max_p]])


def dump_mining(out: TextIO, transactions: Iterable[Iterable[Item]], patterns: Iterable[Pattern] = ()):
    """Write transactions, then mined patterns prefixed by their support, one per line."""
    for t in transactions:
        out.write(format_transaction(t) + "\n")
    for p in patterns:
        out.write(f"# {p.support_count} {format_transaction(p.items)}\n")
