"""Explicit set mappings and the two-condition amalgamation operators."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .core import ElementSet, SetMapping, Tuple, elements


def interval_mapping(n: int) -> SetMapping:
    """f({x0<x1<x2<x3}) = open interval (x1, x2)."""
    if n < 4:
        raise ValueError(f"interval_mapping needs n >= 4, got {n}")
    images = {x: frozenset(range(x[1] + 1, x[2])) for x in combinations(range(n), 4)}
    return SetMapping(n, 4, images, interval_bounded=True)


def prefix_mapping(n: int) -> SetMapping:
    """f({x<y}) = [0, x)."""
    if n < 2:
        raise ValueError(f"prefix_mapping needs n >= 2, got {n}")
    images = {(x, y): frozenset(range(x)) for x, y in combinations(range(n), 2)}
    return SetMapping(n, 2, images, initial_segment=True)


def complete_pair_mapping(n: int) -> SetMapping:
    """f({x,y}) = everything except x and y."""
    images = {(x, y): frozenset(range(n)) - {x, y} for x, y in combinations(range(n), 2)}
    return SetMapping(n, 2, images)


@dataclass(frozen=True)
class EnumerationScheme:
    """For each x, an ordering gamma[x] of the predecessors {0, ..., x-1}."""

    n: int
    gamma: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.gamma) != self.n:
            raise ValueError(f"need {self.n} enumerations, got {len(self.gamma)}")
        for x, g in enumerate(self.gamma):
            if sorted(g) != list(range(x)):
                raise ValueError(f"gamma[{x}] = {list(g)} is not a bijection onto [0, {x})")
        pos = tuple({z: i for i, z in enumerate(g)} for g in self.gamma)
        object.__setattr__(self, "_pos", pos)

    def index(self, x: int, y: int) -> int:
        """The position of x in gamma[y] (x < y)."""
        return self._pos[y][x]

    @classmethod
    def identity(cls, n: int) -> EnumerationScheme:
        return cls(n, tuple(tuple(range(x)) for x in range(n)))

    @classmethod
    def random(cls, n: int, seed: int) -> EnumerationScheme:
        rng = random.Random(seed)
        gamma = []
        for x in range(n):
            g = list(range(x))
            rng.shuffle(g)
            gamma.append(tuple(g))
        return cls(n, tuple(gamma))

    def to_dict(self) -> dict:
        return {"n": self.n, "permutations": [list(g) for g in self.gamma]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: Mapping) -> EnumerationScheme:
        return cls(int(doc["n"]), tuple(tuple(int(z) for z in g) for g in doc["permutations"]))


def enumeration_mapping(scheme: EnumerationScheme) -> SetMapping:
    """f({x<y}) = {gamma_x(i) : i <= i(x, y)}, positions past the end of gamma_x ignored."""
    images = {}
    for x, y in combinations(range(scheme.n), 2):
        i = scheme.index(x, y)
        images[(x, y)] = frozenset(scheme.gamma[x][: i + 1])
    return SetMapping(scheme.n, 2, images, initial_segment=True)


def descent_chain(scheme: EnumerationScheme, H: Iterable[int]) -> list[int]:
    H = elements(H, scheme.n)
    if len(H) < 2:
        raise ValueError("descent_chain needs at least two elements")
    return [scheme.index(x, y) for x, y in zip(H, H[1:])]


def longest_descending_chain(scheme: EnumerationScheme) -> int:
    """Most elements x0 < x1 < ... whose consecutive indices strictly decrease."""
    n = scheme.n
    # best[(y, z)] = longest chain ending with the pair y < z
    best: dict[tuple[int, int], int] = {}
    for z in range(n):
        for y in range(z):
            iz = scheme.index(y, z)
            length = 2
            for x in range(y):
                if scheme.index(x, y) > iz:
                    length = max(length, best[(x, y)] + 1)
            best[(y, z)] = length
    return max(best.values(), default=min(n, 1))


def maximal_extension(F: SetMapping, support: Iterable[int],
                      old: Sequence[tuple[Iterable[int], SetMapping]],
                      mixed: Callable[[Tuple], bool]) -> SetMapping:
    """Extend the old (support, mapping) pairs to [support]^k.

    Mixed tuples get F's image intersected with the support; every other
    tuple keeps whatever the old mappings gave it (empty if none did).
    """
    s = elements(support, F.n)
    sset = set(s)
    olds = [(frozenset(sup), g) for sup, g in old]
    for sup, g in olds:
        if g.k != F.k:
            raise ValueError("arity mismatch between F and an old mapping")
        if not sup <= sset:
            raise ValueError("old support is not inside the new support")
    for (s1, g1), (s2, g2) in combinations(olds, 2):
        for x in combinations(sorted(s1 & s2), F.k):
            if g1.image(x) != g2.image(x):
                raise ValueError(f"old mappings disagree on {x}: "
                                 f"{sorted(g1.image(x))} vs {sorted(g2.image(x))}")
    merged: dict[Tuple, frozenset[int]] = {}
    for sup, g in olds:
        merged.update(g.on(sup))
    for x in combinations(s, F.k):
        if mixed(x) and not any(sup.issuperset(x) for sup, _ in olds):
            img = F.image(x) & sset
            if img:
                merged[x] = img
    return SetMapping(F.n, F.k, merged)


@dataclass(frozen=True)
class DeltaSystemPair:
    """Two conditions with supports root | branch and root | other_branch."""

    root: ElementSet
    branch: ElementSet
    other_branch: ElementSet
    p: object
    q: object

    @classmethod
    def from_conditions(cls, p, q) -> DeltaSystemPair:
        s, t = set(p.support), set(q.support)
        return cls(elements(s & t), elements(s - t), elements(t - s), p, q)

    @property
    def union(self) -> ElementSet:
        return elements(set(self.root) | set(self.branch) | set(self.other_branch))

    def is_mixed(self, x: Tuple) -> bool:
        b, c = set(self.branch), set(self.other_branch)
        return any(z in b for z in x) and any(z in c for z in x)


def verify_delta_preconditions(pair: DeltaSystemPair, F: SetMapping) -> bool:
    """Thinning conclusions needed before two conditions can be amalgamated.

    Always: root and branches pairwise disjoint, supports equal root | branch,
    and both g's agree on [root]^k. Pair flavor (k=2) additionally: F-images
    of root pairs miss both branches, and ranks agree on root secured sets.
    """
    a, b, c = set(pair.root), set(pair.branch), set(pair.other_branch)
    if a & b or a & c or b & c:
        return False
    p, q = pair.p, pair.q
    if set(p.support) != a | b or set(q.support) != a | c:
        return False
    if p.g.on(a) != q.g.on(a):
        return False
    if F.k == 2:
        for x in combinations(sorted(a), 2):
            if F.image(x) & (b | c):
                return False
        rp, rq = getattr(p, "r", None), getattr(q, "r", None)
        if rp is not None or rq is not None:
            rp, rq = rp or {}, rq or {}
            root_p = {u: v for u, v in rp.items() if a.issuperset(u)}
            root_q = {u: v for u, v in rq.items() if a.issuperset(u)}
            if root_p != root_q:
                return False
    return True
