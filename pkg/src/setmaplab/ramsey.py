"""Partition arrows a -> (b, c)^r by exact search, the t_n ladder, and the
five-tuple position scan."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable

import numpy as np

from .core import ElementSet, SetMapping, elements

EXHAUSTIVE_CAP = 24  # max C(a, r) for confirm mode
SWEEP_CHUNK = 1 << 20


@dataclass(frozen=True)
class Coloring:
    """2-coloring of the r-subsets of [0, a), one bit per subset in lex order."""

    a: int
    r: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != comb(self.a, self.r):
            raise ValueError(f"need {comb(self.a, self.r)} colors, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("colors must be 0 or 1")

    @property
    def subsets(self) -> list[ElementSet]:
        return list(combinations(range(self.a), self.r))

    def color(self, x: Iterable[int]) -> int:
        return self.bits[_rank_subset(tuple(sorted(x)), self.a)]

    def homogeneous(self, size: int, color: int) -> ElementSet | None:
        """Lex-least size-set whose r-subsets all carry ``color``."""
        if size > self.a:
            return None
        index = {x: i for i, x in enumerate(self.subsets)}
        cur: list[int] = []
        r = self.r

        def dfs(start):
            if len(cur) == size:
                return tuple(cur)
            for v in range(start, self.a - (size - len(cur)) + 1):
                if len(cur) >= r - 1 and any(self.bits[index[y + (v,)]] != color
                                             for y in combinations(cur, r - 1)):
                    continue
                cur.append(v)
                found = dfs(v + 1)
                if found:
                    return found
                cur.pop()
            return None

        return dfs(0)

    def flipped(self) -> Coloring:
        return Coloring(self.a, self.r, tuple(1 - b for b in self.bits))

    def to_dict(self) -> dict:
        return {"a": self.a, "r": self.r, "bits": "".join(map(str, self.bits))}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc) -> Coloring:
        return cls(int(doc["a"]), int(doc["r"]), tuple(int(ch) for ch in doc["bits"]))


def _rank_subset(x: ElementSet, a: int) -> int:
    # position of x among the lex-ordered r-subsets of [0, a)
    r = len(x)
    pos, prev = 0, -1
    for i, v in enumerate(x):
        for w in range(prev + 1, v):
            pos += comb(a - w - 1, r - i - 1)
        prev = v
    return pos


@dataclass(frozen=True)
class ArrowVerdict:
    a: int
    b: int
    c: int
    r: int
    holds: bool | None  # None: refutation search gave up
    counterexample: Coloring | None
    exact: bool
    mode: str
    nodes: int
    elapsed: float

    def to_dict(self) -> dict:
        return {
            "relation": f"{self.a}->({self.b},{self.c})^{self.r}",
            "holds": self.holds,
            "exact": self.exact,
            "mode": self.mode,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
            "nodes": self.nodes,
            "millis": round(self.elapsed * 1000, 3),
        }


def is_counterexample(col: Coloring, b: int, c: int) -> bool:
    """Direct scan: no 0-homogeneous b-set and no 1-homogeneous c-set."""
    return col.homogeneous(b, 0) is None and col.homogeneous(c, 1) is None


class _Problem:
    def __init__(self, a: int, b: int, c: int, r: int):
        self.a, self.b, self.c, self.r = a, b, c, r
        self.tuples = list(combinations(range(a), r))
        self.N = len(self.tuples)
        index = {x: i for i, x in enumerate(self.tuples)}
        self.index = index
        self.bsets = [[index[y] for y in combinations(B, r)] for B in combinations(range(a), b)]
        self.csets = [[index[y] for y in combinations(C, r)] for C in combinations(range(a), c)]
        self.in_b = [[] for _ in range(self.N)]
        self.in_c = [[] for _ in range(self.N)]
        for j, ts in enumerate(self.bsets):
            for t in ts:
                self.in_b[t].append(j)
        for j, ts in enumerate(self.csets):
            for t in ts:
                self.in_c[t].append(j)

    def transposition_maps(self) -> list[list[int]]:
        maps = []
        for i, j in combinations(range(self.a), 2):
            swap = {i: j, j: i}
            maps.append([self.index[tuple(sorted(swap.get(v, v) for v in x))] for x in self.tuples])
        return maps

    def search(self, symmetry: bool, max_nodes: int | None) -> tuple[list[int] | None, bool, int]:
        """DFS over colors in lex order, 0 first.

        Returns (least counterexample or None, exhausted, nodes). With
        symmetry on, a prefix is dropped when some vertex transposition
        already maps it to something lex-smaller; the least counterexample
        is least in its orbit, so it is never dropped.
        """
        N = self.N
        full_b = comb(self.b, self.r)
        full_c = comb(self.c, self.r)
        zeros = [0] * len(self.bsets)
        ones = [0] * len(self.csets)
        in_b, in_c = self.in_b, self.in_c
        perms = self.transposition_maps() if symmetry else []
        colors = [-1] * N
        nodes = 0

        def apply(t, col):
            if col == 0:
                ok = True
                for j in in_b[t]:
                    zeros[j] += 1
                    if zeros[j] == full_b:
                        ok = False
                return ok
            ok = True
            for j in in_c[t]:
                ones[j] += 1
                if ones[j] == full_c:
                    ok = False
            return ok

        def undo(t, col):
            if col == 0:
                for j in in_b[t]:
                    zeros[j] -= 1
            else:
                for j in in_c[t]:
                    ones[j] -= 1

        def canonical_prefix(L):
            for pm in perms:
                for t in range(L):
                    u = pm[t]
                    if u >= L:
                        break
                    x, y = colors[t], colors[u]
                    if x < y:
                        break
                    if x > y:
                        return False
            return True

        if N == 0:
            # a < r <= b, c: no b- or c-sets, so the empty coloring refutes
            return [], True, 1

        t = 0
        while True:
            if t == N:
                return colors[:], True, nodes
            if t < 0:
                return None, True, nodes
            cur = colors[t]
            if cur != -1:
                undo(t, cur)
            nxt = cur + 1
            placed = False
            while nxt <= 1:
                nodes += 1
                if max_nodes is not None and nodes > max_nodes:
                    return None, False, nodes
                colors[t] = nxt
                if apply(t, nxt) and canonical_prefix(t + 1):
                    placed = True
                    break
                undo(t, nxt)
                nxt += 1
            if placed:
                t += 1
            else:
                colors[t] = -1
                t -= 1


def _random_refutation(p: _Problem, trials: int, seed: int) -> list[int] | None:
    rng = random.Random(seed)
    for _ in range(trials):
        colors = [rng.getrandbits(1) for _ in range(p.N)]
        if any(all(colors[t] == 0 for t in ts) for ts in p.bsets):
            continue
        if any(all(colors[t] == 1 for t in ts) for ts in p.csets):
            continue
        return colors
    return None


def _sweep(p: _Problem) -> tuple[list[int] | None, int]:
    """Vectorized sweep over all 2^N colorings; bit N-1-t carries tuple t."""
    N = p.N
    bmasks = [sum(1 << (N - 1 - t) for t in ts) for ts in p.bsets]
    cmasks = [sum(1 << (N - 1 - t) for t in ts) for ts in p.csets]
    total = 1 << N
    for lo in range(0, total, SWEEP_CHUNK):
        arr = np.arange(lo, min(total, lo + SWEEP_CHUNK), dtype=np.uint32)
        covered = np.zeros(arr.shape, dtype=bool)
        for m in bmasks:
            covered |= (arr & np.uint32(m)) == 0
        for m in cmasks:
            covered |= (arr & np.uint32(m)) == np.uint32(m)
        free = np.flatnonzero(~covered)
        if free.size:
            v = int(arr[free[0]])
            return [(v >> (N - 1 - t)) & 1 for t in range(N)], total
    return None, total


def arrow_check(a: int, b: int, c: int, r: int, mode: str = "search", symmetry: bool = True,
                max_nodes: int | None = 10**7, trials: int = 32, seed: int = 0) -> ArrowVerdict:
    """Decide a -> (b, c)^r.

    Modes: ``search`` (exact DFS with homogeneity and symmetry pruning),
    ``sweep`` (vectorized brute force over every coloring), both limited to
    C(a, r) <= 24; ``refute`` (seeded random colorings, then the DFS without
    the cap under a node budget: it can exhibit a counterexample, not
    necessarily the least, and only confirms if the DFS runs to the end).
    """
    if r < 1 or b < r or c < r:
        raise ValueError(f"need 1 <= r <= b and r <= c, got a={a} b={b} c={c} r={r}")
    if a < 0:
        raise ValueError("a must be non-negative")
    start = time.monotonic()
    p = _Problem(a, b, c, r)
    if mode in ("search", "sweep") and p.N > EXHAUSTIVE_CAP:
        raise ValueError(f"C({a},{r}) = {p.N} exceeds the exhaustive cap {EXHAUSTIVE_CAP}; "
                         f"use mode='refute'")
    if mode == "sweep":
        ce, nodes = _sweep(p)
        exhausted = True
    elif mode == "search":
        ce, exhausted, nodes = p.search(symmetry, None)
    elif mode == "refute":
        ce, exhausted, nodes = _random_refutation(p, trials, seed), False, trials
        if ce is None:
            ce, exhausted, more = p.search(False, max_nodes)
            nodes += more
    else:
        raise ValueError(f"unknown mode {mode!r}")
    col = Coloring(a, r, tuple(ce)) if ce is not None else None
    if col is not None:
        holds, exact = False, True
    elif exhausted:
        holds, exact = True, True
    else:
        holds, exact = None, False
    return ArrowVerdict(a, b, c, r, holds, col, exact, mode, nodes, time.monotonic() - start)


@dataclass(frozen=True)
class LadderEntry:
    index: int
    value: int
    exact: bool
    detail: str

    def to_dict(self) -> dict:
        return {"n": self.index, "value": self.value, "exact": self.exact, "detail": self.detail}


def t_ladder(n_max: int, span: int = 5, max_nodes: int = 10**6) -> list[LadderEntry]:
    """t_0 = 5, then t_{n+1} = least a with a -> (t_n, 7)^5.

    t_1 is settled by exhaustive checks. Later entries are lower bounds: one
    more than the largest a (scanned contiguously over ``span`` values) for
    which the refutation search exhibits a counterexample.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    out = [LadderEntry(0, 5, True, "base value")]
    if n_max == 0:
        return out
    notes = []
    a = 5
    while True:
        v = arrow_check(a, 5, 7, 5)
        if v.holds:
            break
        mode = "no 7-subset exists" if a < 7 else "coloring counterexample"
        notes.append(f"{a} fails ({mode}; least counterexample {v.counterexample.to_dict()['bits']})")
        a += 1
    out.append(LadderEntry(1, a, True, f"{a} -> (5,7)^5 holds; " + "; ".join(notes)))
    for n in range(1, n_max):
        prev = out[-1]
        b = prev.value
        lo = max(b, 7)
        bound, entry = None, None
        for a in range(lo, lo + span):
            v = arrow_check(a, b, 7, 5, mode="refute", max_nodes=max_nodes)
            if v.holds is False:
                bound = a + 1
                continue
            if v.holds is True and prev.exact:
                entry = LadderEntry(n + 1, a, True, f"{a} -> ({b},7)^5 confirmed by exhausted search")
            break
        if entry is None:
            tag = "" if prev.exact else f" (using t_{n} >= {b})"
            if bound is None:
                entry = LadderEntry(n + 1, lo, False, f"no refutation found from a = {lo}{tag}")
            else:
                entry = LadderEntry(n + 1, bound, False,
                                    f"lower bound: refutation search found counterexamples for "
                                    f"a = {lo}..{bound - 1}{tag}")
        out.append(entry)
    return out


@dataclass(frozen=True)
class PositionScan:
    size: int
    holds: bool
    failing: tuple[int, int] | None

    def to_dict(self) -> dict:
        return {"size": self.size, "holds": self.holds,
                "failing": list(self.failing) if self.failing else None}


def position_lemma_scan(size: int) -> PositionScan:
    """Does every pair of positions in a chain fit some 5-subchain's outer slots?"""
    if size < 5:
        raise ValueError("size must be >= 5")
    for i, j in combinations(range(size), 2):
        if not any(i in c and j in c and c[2] not in (i, j) for c in combinations(range(size), 5)):
            return PositionScan(size, False, (i, j))
    return PositionScan(size, True, None)


def triple_coloring(F: SetMapping, chain: Iterable[int]) -> Coloring:
    """Color triples of the chain by whether the least lies in F of the other two."""
    if F.k != 2:
        raise ValueError("triple_coloring needs an arity-2 mapping")
    chain = elements(chain, F.n)
    bits = tuple(int(chain[i] in F.image((chain[j], chain[k])))
                 for i, j, k in combinations(range(len(chain)), 3))
    return Coloring(len(chain), 3, bits)
