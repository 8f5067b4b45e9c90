"""Finite forcing conditions: validity, amalgamation, rank completion, generic
builds, and the pair-mapping diagonalization solver."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .constructions import DeltaSystemPair, maximal_extension, verify_delta_preconditions
from .core import ElementSet, SetMapping, Tuple, elements

FLAVORS = ("quadruple", "ranked", "pair")


class ContainmentError(ValueError):
    """g is not pointwise inside F intersected with the support."""


class AmalgamationError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class GenericBuildError(RuntimeError):
    def __init__(self, message: str, condition=None):
        super().__init__(message)
        self.condition = condition


@dataclass(frozen=True)
class Verdict:
    valid: bool
    reason: str | None = None
    witness: object = None

    def __bool__(self):
        return self.valid


VALID = Verdict(True)


def _check_containment(F: SetMapping, s: ElementSet, g: SetMapping) -> None:
    if g.k != F.k or g.n != F.n:
        raise ContainmentError("g and F live on different ground sets or arities")
    sset = set(s)
    for x, img in g.images.items():
        if not sset.issuperset(x):
            raise ContainmentError(f"g is defined on {x}, outside the support")
        if not img <= F.image(x):
            raise ContainmentError(f"g{x} = {sorted(img)} is not inside F{x} = {sorted(F.image(x))}")
        if not img <= sset:
            raise ContainmentError(f"g{x} = {sorted(img)} leaves the support")


def _g_doc(g: SetMapping) -> dict:
    return {",".join(map(str, x)): sorted(img) for x, img in sorted(g.images.items())}


def _g_from_doc(F: SetMapping, doc: Mapping) -> SetMapping:
    images = {tuple(int(t) for t in key.split(",")): frozenset(v) for key, v in doc.items()}
    return SetMapping(F.n, F.k, images)


# --- quadruple arity ---------------------------------------------------------

def closed_free_sets(F: SetMapping, s: ElementSet, g: SetMapping, size: int,
                      first_only: bool = True) -> list[ElementSet]:
    """size-subsets of s that are F-closed and g-free (k=4), lex order."""
    Fimg, gimg = F.images, g.images
    empty = frozenset()
    cache: dict[Tuple, bool] = {}

    def good(c):
        ok = cache.get(c)
        if ok is None:
            outer = (c[0], c[1], c[3], c[4])
            ok = c[2] in Fimg.get(outer, empty) and c[2] not in gimg.get(outer, empty)
            cache[c] = ok
        return ok

    out: list[ElementSet] = []
    cur: list[int] = []

    def dfs(start: int) -> bool:
        if len(cur) == size:
            out.append(tuple(cur))
            return first_only
        for i in range(start, len(s) - (size - len(cur)) + 1):
            v = s[i]
            if len(cur) >= 4 and not all(good(c + (v,)) for c in combinations(cur, 4)):
                continue
            cur.append(v)
            if dfs(i + 1):
                return True
            cur.pop()
        return False

    dfs(0)
    return out


def check_condition4(F: SetMapping, s: Iterable[int], g: SetMapping) -> Verdict:
    """Valid iff no 7-subset of s is F-closed and g-free."""
    if F.k != 4:
        raise ValueError("check_condition4 needs an arity-4 F")
    s = elements(s, F.n)
    _check_containment(F, s, g)
    if len(s) < 7:
        return VALID
    bad = closed_free_sets(F, s, g, 7)
    if bad:
        return Verdict(False, "closed-free 7-set", bad[0])
    return VALID


@dataclass(frozen=True)
class Condition4:
    F: SetMapping
    support: ElementSet
    g: SetMapping

    def __post_init__(self):
        object.__setattr__(self, "support", elements(self.support, self.F.n))
        _check_containment(self.F, self.support, self.g)

    flavor = "quadruple"

    @classmethod
    def empty(cls, F: SetMapping) -> Condition4:
        return cls(F, (), SetMapping(F.n, F.k))

    def check(self) -> Verdict:
        return check_condition4(self.F, self.support, self.g)

    def to_dict(self) -> dict:
        return {"flavor": self.flavor, "F": self.F.to_dict(), "support": list(self.support),
                "g": _g_doc(self.g)}


# --- pair arity with ranks ---------------------------------------------------

def secured_sets(F: SetMapping, g: SetMapping, s: Iterable[int]) -> list[ElementSet]:
    """All secured subsets of s, in lex order.

    Secured is hereditary on triples: u is secured iff |u| >= 3 and every
    triple x<y<z of u has x in F(y,z) and x not in g(y,z).
    """
    s = elements(s, F.n)
    Fimg, gimg = F.images, g.images
    empty = frozenset()

    def good(x, y, z):
        return x in Fimg.get((y, z), empty) and x not in gimg.get((y, z), empty)

    out: list[ElementSet] = []
    cur: list[int] = []

    def dfs(start: int):
        for i in range(start, len(s)):
            v = s[i]
            if all(good(x, y, v) for x, y in combinations(cur, 2)):
                cur.append(v)
                if len(cur) >= 3:
                    out.append(tuple(cur))
                dfs(i + 1)
                cur.pop()

    dfs(0)
    return out


def canonical_rank(s: ElementSet, u: ElementSet) -> int:
    """Number of support elements above max(u)."""
    top = u[-1]
    return sum(1 for z in s if z > top)


def check_ranked_condition(F: SetMapping, s: Iterable[int], g: SetMapping,
                           r: Mapping[Tuple, int]) -> Verdict:
    if F.k != 2:
        raise ValueError("ranked conditions need an arity-2 F")
    s = elements(s, F.n)
    _check_containment(F, s, g)
    sec = secured_sets(F, g, s)
    secset = set(sec)
    for u in sec:
        if u not in r:
            return Verdict(False, "domain: missing secured set", u)
    for u in sorted(r):
        if u not in secset:
            return Verdict(False, "domain: not a secured set", u)
        if not isinstance(r[u], int) or r[u] < 0:
            return Verdict(False, "rank is not a natural number", u)
    for v in sec:
        for j in range(3, len(v)):
            u = v[:j]
            if r[u] <= r[v]:
                return Verdict(False, "rank does not decrease under end-extension", (u, v))
    return VALID


def rank_completion(F: SetMapping, s: Iterable[int], g: SetMapping,
                    partial_r: Mapping[Tuple, int]) -> dict[Tuple, int] | None:
    """Extend partial_r to every secured subset of s, or None if impossible.

    Secured sets form a forest under "drop the maximum"; a node's value must
    exceed every value below it. New nodes take the canonical rank when it
    fits, otherwise the least value that still leaves room below. Raises
    ValueError when partial_r already breaks the decrease on its own domain.
    """
    s = elements(s, F.n)
    sec = secured_sets(F, g, s)
    secset = set(sec)
    fixed = {tuple(u): v for u, v in partial_r.items()}
    for u, v in fixed.items():
        if u not in secset:
            raise ValueError(f"partial rank defined on {u}, which is not secured")
        if v < 0:
            raise ValueError(f"partial rank of {u} is negative")
    for v in fixed:
        for j in range(3, len(v)):
            u = v[:j]
            if u in fixed and fixed[u] <= fixed[v]:
                raise ValueError(f"partial rank already fails to decrease at {u} -> {v}")

    children: dict[Tuple, list[Tuple]] = {u: [] for u in sec}
    for v in sec:
        if len(v) > 3:
            children[v[:-1]].append(v)

    order = sorted(sec, key=len)
    low: dict[Tuple, int] = {}
    for u in reversed(order):
        need = max((low[c] + 1 for c in children[u]), default=0)
        if u in fixed:
            if fixed[u] < need:
                return None
            need = fixed[u]
        low[u] = need

    val: dict[Tuple, int] = {}
    for u in order:
        if u in fixed:
            val[u] = fixed[u]
            continue
        cap = val[u[:-1]] - 1 if len(u) > 3 else None
        choice = max(low[u], canonical_rank(s, u))
        if cap is not None:
            choice = min(choice, cap)
        if choice < low[u]:
            return None
        val[u] = choice
    return val


@dataclass(frozen=True)
class RankedCondition:
    F: SetMapping
    support: ElementSet
    g: SetMapping
    r: dict = field(default_factory=dict)

    flavor = "ranked"

    def __post_init__(self):
        object.__setattr__(self, "support", elements(self.support, self.F.n))
        object.__setattr__(self, "r", {tuple(u): int(v) for u, v in self.r.items()})
        _check_containment(self.F, self.support, self.g)

    @classmethod
    def empty(cls, F: SetMapping) -> RankedCondition:
        return cls(F, (), SetMapping(F.n, F.k), {})

    def check(self) -> Verdict:
        return check_ranked_condition(self.F, self.support, self.g, self.r)

    def secured(self) -> list[ElementSet]:
        return secured_sets(self.F, self.g, self.support)

    def to_dict(self) -> dict:
        return {"flavor": self.flavor, "F": self.F.to_dict(), "support": list(self.support),
                "g": _g_doc(self.g),
                "r": [{"set": list(u), "rank": v} for u, v in sorted(self.r.items())]}


# --- singleton pair arity ----------------------------------------------------

@dataclass(frozen=True)
class PairCondition:
    """g on [s]^2 with images of size at most one, inside F."""

    F: SetMapping
    support: ElementSet
    g: SetMapping

    flavor = "pair"

    def __post_init__(self):
        object.__setattr__(self, "support", elements(self.support, self.F.n))
        _check_containment(self.F, self.support, self.g)
        for x, img in self.g.images.items():
            if len(img) > 1:
                raise ContainmentError(f"g{x} = {sorted(img)} has more than one element")

    @classmethod
    def empty(cls, F: SetMapping) -> PairCondition:
        return cls(F, (), SetMapping(F.n, F.k))

    def check(self) -> Verdict:
        return VALID

    def empty_pairs(self) -> list[Tuple]:
        return [x for x in combinations(self.support, 2) if not self.g.image(x)]

    def to_dict(self) -> dict:
        return {"flavor": self.flavor, "F": self.F.to_dict(), "support": list(self.support),
                "g": _g_doc(self.g)}


def condition_from_dict(doc: Mapping):
    F = SetMapping.from_dict(doc["F"])
    g = _g_from_doc(F, doc.get("g", {}))
    flavor = doc.get("flavor")
    if flavor == "quadruple":
        return Condition4(F, doc["support"], g)
    if flavor == "ranked":
        r = {tuple(e["set"]): e["rank"] for e in doc.get("r", [])}
        return RankedCondition(F, doc["support"], g, r)
    if flavor == "pair":
        return PairCondition(F, doc["support"], g)
    raise ValueError(f"unknown condition flavor {flavor!r}")


def condition_to_json(p) -> str:
    return json.dumps(p.to_dict(), sort_keys=True, separators=(",", ":"))


def restriction_matches(result, p) -> bool:
    """result restricted to p's support reproduces p (g, and r when ranked)."""
    if result.g.on(p.support) != p.g.on(p.support):
        return False
    if isinstance(p, RankedCondition):
        sup = set(p.support)
        return {u: v for u, v in result.r.items() if sup.issuperset(u)} == p.r
    return True


# --- amalgamation ------------------------------------------------------------

def position_lemma_core(B: Iterable[int], mark0: int, mark1: int) -> ElementSet:
    """Least 5-subchain of the 7-set B with both marks in slots 0, 1, 3 or 4."""
    B = elements(B)
    if len(B) != 7:
        raise ValueError(f"B must have 7 elements, got {len(B)}")
    if mark0 == mark1 or mark0 not in B or mark1 not in B:
        raise ValueError("marks must be two distinct elements of B")
    for c in combinations(B, 5):
        if mark0 in c and mark1 in c and c[2] != mark0 and c[2] != mark1:
            return c
    raise AssertionError(f"no five-tuple for marks {mark0}, {mark1} in {B}")


def _same_ambient(p, q) -> SetMapping:
    if p.F != q.F:
        raise AmalgamationError("conditions live over different ambient mappings")
    return p.F


def amalgamate_theorem1(p: Condition4, q: Condition4) -> Condition4:
    """Common extension of a Delta-system pair, with F on the mixed tuples."""
    F = _same_ambient(p, q)
    pair = DeltaSystemPair.from_conditions(p, q)
    if not verify_delta_preconditions(pair, F):
        raise AmalgamationError("Delta-system preconditions fail")
    union = pair.union
    g = maximal_extension(F, union, [(p.support, p.g), (q.support, q.g)], pair.is_mixed)
    out = Condition4(F, union, g)
    verdict = out.check()
    if not verdict:
        raise AmalgamationError("amalgam is not a condition", verdict.witness)
    return out


def amalgamate_theorem2(p: RankedCondition, q: RankedCondition) -> RankedCondition:
    F = _same_ambient(p, q)
    pair = DeltaSystemPair.from_conditions(p, q)
    if not verify_delta_preconditions(pair, F):
        raise AmalgamationError("Delta-system preconditions fail")
    union = pair.union
    g = maximal_extension(F, union, [(p.support, p.g), (q.support, q.g)], pair.is_mixed)
    r = rank_completion(F, union, g, {**p.r, **q.r})
    if r is None:
        raise AmalgamationError("no rank function extends both inputs")
    out = RankedCondition(F, union, g, r)
    verdict = out.check()
    if not verdict:
        raise AmalgamationError(f"amalgam is not a condition: {verdict.reason}", verdict.witness)
    return out


def new_secured_sets(result: RankedCondition, p: RankedCondition,
                     q: RankedCondition) -> list[ElementSet]:
    sp, sq = set(p.support), set(q.support)
    return [u for u in result.secured() if not (sp.issuperset(u) or sq.issuperset(u))]


# --- generic builds ----------------------------------------------------------

def _step(cond, alpha: int, kills: Mapping[Tuple, int]):
    F = cond.F
    s = elements(set(cond.support) | {alpha})
    sset = set(s)
    images = dict(cond.g.images)
    others = [z for z in cond.support]
    for rest in combinations(others, F.k - 1):
        x = tuple(sorted(rest + (alpha,)))
        avail = F.image(x) & sset
        if cond.flavor == "pair":
            want = kills.get(x)
            if want is not None and want in avail:
                avail = frozenset([want])
            elif avail:
                avail = frozenset([min(avail)])
        if avail:
            images[x] = avail
    g = SetMapping(F.n, F.k, images)
    if cond.flavor == "quadruple":
        out = Condition4(F, s, g)
    elif cond.flavor == "pair":
        out = PairCondition(F, s, g)
    else:
        r = rank_completion(F, s, g, cond.r)
        if r is None:
            raise GenericBuildError(f"no rank function after adding {alpha}", cond)
        out = RankedCondition(F, s, g, r)
    if not out.check():
        raise GenericBuildError(f"adding {alpha} breaks validity", cond)
    return out


def generic_chain(flavor: str, F: SetMapping, universe: Iterable[int],
                  kills: Mapping[Iterable[int], int] | None = None) -> Iterator:
    """Successive conditions meeting each D_alpha, then each killing goal.

    A killing goal ({y, z}, x) asks for g({y, z}) = {x}; only the pair flavor
    accepts them.
    """
    cls = {"quadruple": Condition4, "ranked": RankedCondition, "pair": PairCondition}.get(flavor)
    if cls is None:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")
    kills = {tuple(sorted(y)): x for y, x in (kills or {}).items()}
    if kills and flavor != "pair":
        raise ValueError("killing goals only apply to the pair flavor")
    cond = cls.empty(F)
    yield cond
    for alpha in elements(universe, F.n):
        if alpha not in cond.support:
            cond = _step(cond, alpha, kills)
            yield cond
    for pair, x in sorted(kills.items()):
        for alpha in sorted(set(pair) | {x}):
            if alpha not in cond.support:
                cond = _step(cond, alpha, kills)
                yield cond
        if cond.g.image(pair) != {x}:
            raise GenericBuildError(f"killing goal g{pair} = {x} is unreachable", cond)


def generic_build(flavor: str, F: SetMapping, universe: Iterable[int],
                  kills: Mapping[Iterable[int], int] | None = None) -> SetMapping:
    cond = None
    for cond in generic_chain(flavor, F, universe, kills):
        pass
    return cond.g


# --- diagonalization ---------------------------------------------------------

@dataclass(frozen=True)
class Diagonalization:
    sat: bool
    g: SetMapping | None
    nodes: int
    elapsed: float
    empty_pairs: tuple[Tuple, ...] = ()

    def to_dict(self) -> dict:
        return {"sat": self.sat, "g": _g_doc(self.g) if self.g else None, "nodes": self.nodes,
                "millis": round(self.elapsed * 1000, 3),
                "empty_pairs": [list(x) for x in self.empty_pairs]}


def diagonalize_cor3(F: SetMapping, m: int) -> Diagonalization:
    """Least g inside F, images of size <= 1, leaving no free m-set.

    Pairs are assigned in lex order, values tried in increasing order with
    the empty image last. An m-set survives only while some pair inside it
    is still unassigned or already points back into it.
    """
    if F.k != 2:
        raise ValueError("diagonalize_cor3 needs an arity-2 F")
    if m < 3:
        raise ValueError(f"m must be >= 3, got {m}")
    start = time.monotonic()
    n = F.n
    pairs = list(combinations(range(n), 2))
    msets = list(combinations(range(n), m))
    containing: dict[Tuple, list[int]] = {u: [] for u in pairs}
    for i, X in enumerate(msets):
        for u in combinations(X, 2):
            containing[u].append(i)
    hits: dict[Tuple, dict[int, list[int]]] = {}
    for u in pairs:
        hits[u] = {x: [i for i in containing[u] if x in msets[i]] for x in sorted(F.image(u))}

    unassigned = [m * (m - 1) // 2] * len(msets)
    killed = [0] * len(msets)
    choice: list[int | None] = [None] * len(pairs)
    nodes = 0

    def dfs(j: int) -> bool:
        nonlocal nodes
        nodes += 1
        if j == len(pairs):
            return True
        u = pairs[j]
        for x in [*hits[u], None]:
            hit = hits[u][x] if x is not None else ()
            for i in containing[u]:
                unassigned[i] -= 1
            for i in hit:
                killed[i] += 1
            if all(unassigned[i] or killed[i] for i in containing[u]):
                choice[j] = x
                if dfs(j + 1):
                    return True
            for i in hit:
                killed[i] -= 1
            for i in containing[u]:
                unassigned[i] += 1
        return False

    if dfs(0):
        images = {u: frozenset([x]) for u, x in zip(pairs, choice) if x is not None}
        g = SetMapping(n, 2, images)
        empties = tuple(u for u, x in zip(pairs, choice) if x is None)
        return Diagonalization(True, g, nodes, time.monotonic() - start, empties)
    return Diagonalization(False, None, nodes, time.monotonic() - start)
