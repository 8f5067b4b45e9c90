"""Seeded random instances: mappings, schemes, and Delta-system pairs of conditions.

Every generator takes a ``random.Random`` so that a corpus is fixed by one
integer seed; ``case_rng(seed, i)`` derives the generator for case i.
"""

from __future__ import annotations

import random
from itertools import combinations

from .constructions import EnumerationScheme
from .core import SetMapping
from .forcing import Condition4, RankedCondition, check_condition4, secured_sets


def case_rng(seed: int, case: int) -> random.Random:
    return random.Random(f"{seed}:{case}")


def _subset(rng: random.Random, pool, p: float) -> frozenset[int]:
    return frozenset(z for z in pool if rng.random() < p)


def random_mapping(rng: random.Random, n: int, k: int, p: float | None = None) -> SetMapping:
    """Each element outside x joins f(x) independently with probability p."""
    if p is None:
        p = {1: 0.2, 2: 0.08, 3: 0.04, 4: 0.02}.get(k, 0.02)
    images = {}
    for x in combinations(range(n), k):
        xs = set(x)
        images[x] = _subset(rng, (z for z in range(n) if z not in xs), p)
    return SetMapping(n, k, images)


def random_interval_mapping(rng: random.Random, n: int, p: float) -> SetMapping:
    images = {x: _subset(rng, range(x[1] + 1, x[2]), p) for x in combinations(range(n), 4)}
    return SetMapping(n, 4, images, interval_bounded=True)


def random_initial_segment_mapping(rng: random.Random, n: int, p: float) -> SetMapping:
    images = {(x, y): _subset(rng, range(x), p) for x, y in combinations(range(n), 2)}
    return SetMapping(n, 2, images, initial_segment=True)


def random_scheme(rng: random.Random, n: int) -> EnumerationScheme:
    return EnumerationScheme.random(n, rng.randrange(2**32))


def _split(rng: random.Random, n: int, sizes: list[int]) -> list[tuple[int, ...]]:
    pool = list(range(n))
    rng.shuffle(pool)
    out, i = [], 0
    for s in sizes:
        out.append(tuple(sorted(pool[i:i + s])))
        i += s
    return out


def repair_condition4(rng: random.Random, F: SetMapping, s, images: dict, protected=()) -> Condition4:
    """Grow g until s has no F-closed g-free 7-set.

    Each round takes the least violating 7-set and blocks one of its
    5-chains at the middle, never touching tuples inside ``protected``.
    """
    prot = set(protected)
    while True:
        g = SetMapping(F.n, 4, images)
        verdict = check_condition4(F, s, g)
        if verdict:
            return Condition4(F, s, g)
        B = verdict.witness
        chains = [c for c in combinations(B, 5) if not prot.issuperset((c[0], c[1], c[3], c[4]))]
        c = rng.choice(chains)
        outer = (c[0], c[1], c[3], c[4])
        images[outer] = images.get(outer, frozenset()) | {c[2]}


def delta_pair_quadruple(rng: random.Random, n_max: int = 18):
    """(F, p, q): valid quadruple-arity conditions agreeing on their common root."""
    n = rng.randint(9, n_max)
    F = random_interval_mapping(rng, n, rng.uniform(0.7, 1.0))
    ra = rng.randint(0, min(6, n - 2))
    rb = rng.randint(1, min(6, (n - ra) // 2))
    rc = rng.randint(1, min(6, n - ra - rb))
    a, b, c = _split(rng, n, [ra, rb, rc])
    aset = set(a)

    def random_images(support, skip_inside):
        s = set(support)
        out = {}
        for x in combinations(sorted(support), 4):
            if skip_inside and aset.issuperset(x):
                continue
            if rng.random() < 0.25:
                img = _subset(rng, F.image(x) & s, 0.5)
                if img:
                    out[x] = img
        return out

    root = repair_condition4(rng, F, a, random_images(a, False))
    conds = []
    for branch in (b, c):
        s = tuple(sorted(aset | set(branch)))
        images = dict(root.g.images)
        images.update(random_images(s, True))
        conds.append(repair_condition4(rng, F, s, images, protected=a))
    return F, conds[0], conds[1]


def _random_ranks(rng: random.Random, sec, fixed: dict, spread: int = 3) -> dict:
    children = {u: [] for u in sec}
    for v in sec:
        if len(v) > 3:
            children[v[:-1]].append(v)
    order = sorted(sec, key=len)
    low = {}
    for u in reversed(order):
        need = max((low[c] + 1 for c in children[u]), default=0)
        low[u] = max(need, fixed.get(u, 0))
    val = {}
    for u in order:
        if u in fixed:
            val[u] = fixed[u]
            continue
        cap = val[u[:-1]] - 1 if len(u) > 3 else low[u] + spread
        val[u] = rng.randint(low[u], cap)
    return val


def delta_pair_ranked(rng: random.Random, n_max: int = 12):
    """(F, p, q): ranked conditions meeting every thinning precondition."""
    n = rng.randint(6, n_max)
    ra = rng.randint(0, min(4, n - 2))
    rb = rng.randint(1, min(4, (n - ra) // 2))
    rc = rng.randint(1, min(4, n - ra - rb))
    a, b, c = _split(rng, n, [ra, rb, rc])
    aset, branches = set(a), set(b) | set(c)
    base = random_initial_segment_mapping(rng, n, rng.uniform(0.6, 1.0))
    # thinning: F-images of root pairs avoid both branches
    F = base.with_images({x: img - branches if aset.issuperset(x) else img
                          for x, img in base.images.items()})

    def random_g(support, skip_inside):
        s = set(support)
        out = {}
        for x in combinations(sorted(support), 2):
            if skip_inside and aset.issuperset(x):
                continue
            if rng.random() < 0.3:
                img = _subset(rng, F.image(x) & s, 0.4)
                if img:
                    out[x] = img
        return out

    g_root = random_g(a, False)
    sec_a = secured_sets(F, SetMapping(n, 2, g_root), a)
    r_root = {}
    for u in sorted(sec_a, key=len):
        # far above anything that can hang below u in a support of size <= n
        r_root[u] = 4 * (n - len(u)) + rng.randint(0, 3)
    conds = []
    for branch in (b, c):
        s = tuple(sorted(aset | set(branch)))
        images = dict(g_root)
        images.update(random_g(s, True))
        g = SetMapping(n, 2, images)
        r = _random_ranks(rng, secured_sets(F, g, s), r_root)
        conds.append(RankedCondition(F, s, g, r))
    return F, conds[0], conds[1]
