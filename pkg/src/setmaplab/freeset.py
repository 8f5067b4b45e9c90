"""Exact maximum free set search (branch and bound) and a brute-force oracle."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations

from .core import ElementSet, SetMapping

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_TIME_BUDGET = 60.0
ORACLE_MAX_N = 20


class ResourceLimitExceeded(RuntimeError):
    """The search hit its node or time budget before completing."""

    def __init__(self, message: str, nodes: int, elapsed: float):
        super().__init__(message)
        self.nodes = nodes
        self.elapsed = elapsed


@dataclass(frozen=True)
class SearchReport:
    optimum: int
    witness: ElementSet
    nodes_explored: int
    elapsed: float

    def to_dict(self) -> dict:
        return {
            "optimum": self.optimum,
            "witness": list(self.witness),
            "nodes": self.nodes_explored,
            "millis": round(self.elapsed * 1000, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Search:
    def __init__(self, f: SetMapping, max_nodes: int, max_seconds: float):
        self.f = f
        self.masks = f.masks
        self.k = f.k
        self.max_nodes = max_nodes
        self.deadline = time.monotonic() + max_seconds
        self.max_seconds = max_seconds
        self.nodes = 0
        self.start = time.monotonic()

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise ResourceLimitExceeded(f"node budget {self.max_nodes} exceeded",
                                        self.nodes, time.monotonic() - self.start)
        if self.nodes & 0xFFF == 0 and time.monotonic() > self.deadline:
            raise ResourceLimitExceeded(f"time budget {self.max_seconds}s exceeded",
                                        self.nodes, time.monotonic() - self.start)

    def add(self, H: list[int], hmask: int, blocked: int, v: int):
        """Try to add v (larger than all of H); return new blocked mask or None."""
        if blocked >> v & 1:
            return None
        hm = hmask | 1 << v
        masks = self.masks
        for y in combinations(H, self.k - 1):
            m = masks.get(y + (v,), 0)
            if m:
                if m & hm:
                    return None
                blocked |= m
        return blocked

    def maximize(self, H: list[int], hmask: int, blocked: int, cands: int, best: list):
        # best = [size, witness]; first strictly-better set wins, so the
        # witness is lex-least (include-first DFS visits sets in lex order).
        self._tick()
        if len(H) > best[0]:
            best[0] = len(H)
            best[1] = tuple(H)
        cands &= ~blocked
        while cands:
            if len(H) + cands.bit_count() <= best[0]:
                return
            v = (cands & -cands).bit_length() - 1
            cands &= ~(1 << v)
            nb = self.add(H, hmask, blocked, v)
            if nb is not None:
                H.append(v)
                self.maximize(H, hmask | 1 << v, nb, cands, best)
                H.pop()

    def collect(self, H: list[int], hmask: int, blocked: int, cands: int, m: int, out: list):
        self._tick()
        if len(H) == m:
            out.append(tuple(H))
            return
        cands &= ~blocked
        while cands:
            if len(H) + cands.bit_count() < m:
                return
            v = (cands & -cands).bit_length() - 1
            cands &= ~(1 << v)
            nb = self.add(H, hmask, blocked, v)
            if nb is not None:
                H.append(v)
                self.collect(H, hmask | 1 << v, nb, cands, m, out)
                H.pop()


def _subtree(args):
    f, v, max_nodes, max_seconds = args
    s = _Search(f, max_nodes, max_seconds)
    best = [0, ()]
    nb = s.add([], 0, 0, v)
    if nb is not None:
        full = (1 << f.n) - 1
        s.maximize([v], 1 << v, nb, full & ~((1 << (v + 1)) - 1), best)
    return best[0], best[1], s.nodes


def max_free_set(f: SetMapping, max_nodes: int = DEFAULT_NODE_BUDGET,
                 max_seconds: float = DEFAULT_TIME_BUDGET, workers: int = 1) -> SearchReport:
    """Largest free set of ``f``, with the lexicographically least witness.

    Branches on the least undecided element, bounding by current size plus
    remaining unblocked candidates. With ``workers > 1`` the first-element
    subtrees run in separate processes and are reduced deterministically.
    """
    start = time.monotonic()
    if workers <= 1:
        s = _Search(f, max_nodes, max_seconds)
        best = [0, ()]
        s.maximize([], 0, 0, (1 << f.n) - 1, best)
        return SearchReport(best[0], best[1], s.nodes, time.monotonic() - start)

    jobs = [(f, v, max_nodes, max_seconds) for v in range(f.n)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_subtree, jobs))
    size, witness, nodes = 0, (), 1
    for sz, wit, nd in results:
        nodes += nd
        if sz > size or (sz == size and sz and wit < witness):
            size, witness = sz, wit
    return SearchReport(size, witness, nodes, time.monotonic() - start)


def enumerate_free_sets(f: SetMapping, m: int, max_nodes: int = DEFAULT_NODE_BUDGET,
                        max_seconds: float = DEFAULT_TIME_BUDGET) -> list[ElementSet]:
    """All free m-subsets in lexicographic order."""
    if not 0 <= m <= f.n:
        raise ValueError(f"m must be in [0, {f.n}], got {m}")
    s = _Search(f, max_nodes, max_seconds)
    out: list[ElementSet] = []
    s.collect([], 0, 0, (1 << f.n) - 1, m, out)
    return out


def oracle_max_free_set(f: SetMapping) -> SearchReport:
    """Unpruned sweep: sizes from n downward, each size in lex order."""
    if f.n > ORACLE_MAX_N:
        raise ValueError(f"oracle handles n <= {ORACLE_MAX_N}, got {f.n}")
    start = time.monotonic()
    k = f.k
    checked = 0
    for size in range(f.n, -1, -1):
        for H in combinations(range(f.n), size):
            checked += 1
            hs = set(H)
            if all(not (f.image(x) & hs) for x in combinations(H, k)):
                return SearchReport(size, H, checked, time.monotonic() - start)
    raise AssertionError("unreachable: the empty set is free")

