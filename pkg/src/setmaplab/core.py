"""Set mappings over a finite ordered ground set, and the freeness predicates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Mapping

Tuple = tuple[int, ...]
ElementSet = tuple[int, ...]


class MappingError(ValueError):
    """A set mapping violates one of its invariants."""

    def __init__(self, message: str, tuple_: Tuple | None = None):
        super().__init__(message)
        self.tuple = tuple_


def elements(xs: Iterable[int], n: int | None = None) -> ElementSet:
    """Sort and deduplicate; check range when ``n`` is given."""
    out = tuple(sorted(set(int(x) for x in xs)))
    if n is not None and out and (out[0] < 0 or out[-1] >= n):
        raise ValueError(f"element out of range [0, {n}): {out}")
    return out


def to_mask(xs: Iterable[int]) -> int:
    m = 0
    for x in xs:
        m |= 1 << x
    return m


def from_mask(m: int) -> ElementSet:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True, eq=False)
class SetMapping:
    """f: [n]^k -> subsets of [n] with f(x) & x empty.

    Tuples missing from ``images`` have empty image, so a partial mapping
    (a condition's g) is just a SetMapping with sparse images.
    """

    n: int
    k: int
    images: Mapping[Tuple, frozenset[int]] = field(default_factory=dict)
    mu: int | None = None
    interval_bounded: bool = False
    initial_segment: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise MappingError(f"ground size must be >= 1, got {self.n}")
        if self.k < 1:
            raise MappingError(f"arity must be >= 1, got {self.k}")
        if self.mu is not None and self.mu < 1:
            raise MappingError(f"budget must be >= 1, got {self.mu}")
        if self.interval_bounded and self.k != 4:
            raise MappingError("interval_bounded requires k=4")
        if self.initial_segment and self.k != 2:
            raise MappingError("initial_segment requires k=2")
        clean: dict[Tuple, frozenset[int]] = {}
        for x, img in self.images.items():
            x = tuple(sorted(x))
            img = frozenset(img)
            if not img:
                continue
            self._validate(x, img)
            if x in clean:
                raise MappingError(f"duplicate tuple {x}", x)
            clean[x] = img
        object.__setattr__(self, "images", clean)

    def _validate(self, x: Tuple, img: frozenset[int]) -> None:
        n, k = self.n, self.k
        if len(x) != k or len(set(x)) != k:
            raise MappingError(f"tuple {x} is not a {k}-set", x)
        if x[0] < 0 or x[-1] >= n:
            raise MappingError(f"tuple {x} out of range [0, {n})", x)
        if min(img) < 0 or max(img) >= n:
            raise MappingError(f"image of {x} out of range [0, {n})", x)
        if img & set(x):
            raise MappingError(f"image of {x} meets its argument: {sorted(img & set(x))}", x)
        if self.mu is not None and len(img) >= self.mu:
            raise MappingError(f"image of {x} has {len(img)} elements, budget is <{self.mu}", x)
        if self.interval_bounded and not all(x[1] < z < x[2] for z in img):
            raise MappingError(f"interval_bounded: image of {x} not inside ({x[1]}, {x[2]})", x)
        if self.initial_segment and not all(z < x[0] for z in img):
            raise MappingError(f"initial_segment: image of {x} not inside [0, {x[0]})", x)

    def image(self, x: Iterable[int]) -> frozenset[int]:
        return self.images.get(tuple(sorted(x)), frozenset())

    def __call__(self, *x: int) -> frozenset[int]:
        return self.image(x)

    @cached_property
    def masks(self) -> dict[Tuple, int]:
        return {x: to_mask(img) for x, img in self.images.items()}

    def mask(self, x: Tuple) -> int:
        return self.masks.get(x, 0)

    def tuples(self) -> Iterable[Tuple]:
        return combinations(range(self.n), self.k)

    def with_images(self, images: Mapping[Tuple, Iterable[int]]) -> SetMapping:
        return SetMapping(self.n, self.k, {x: frozenset(v) for x, v in images.items()},
                          self.mu, self.interval_bounded, self.initial_segment)

    def restrict(self, support: Iterable[int]) -> SetMapping:
        """Images on [support]^k intersected with support."""
        s = set(support)
        return self.with_images({x: img & s for x, img in self.images.items() if s.issuperset(x)})

    def on(self, support: Iterable[int]) -> dict[Tuple, frozenset[int]]:
        """Nonempty images of tuples inside support (no intersection)."""
        s = set(support)
        return {x: img for x, img in self.images.items() if s.issuperset(x)}

    def contained_in(self, other: SetMapping) -> bool:
        return all(img <= other.image(x) for x, img in self.images.items())

    def __eq__(self, other):
        if not isinstance(other, SetMapping):
            return NotImplemented
        return (self.n, self.k, self.mu, self.interval_bounded, self.initial_segment, self.images) == (
            other.n, other.k, other.mu, other.interval_bounded, other.initial_segment, other.images)

    def __hash__(self):
        return hash((self.n, self.k, frozenset(self.images.items())))

    def __repr__(self):
        return f"SetMapping(n={self.n}, k={self.k}, mu={self.mu}, nonempty={len(self.images)})"

    # serialization

    def flags(self) -> list[str]:
        out = []
        if self.initial_segment:
            out.append("initial_segment")
        if self.interval_bounded:
            out.append("interval_bounded")
        return out

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "mu": self.mu,
            "flags": self.flags(),
            "images": {",".join(map(str, x)): sorted(img) for x, img in sorted(self.images.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: Mapping) -> SetMapping:
        try:
            flags = set(doc.get("flags", []))
            unknown = flags - {"initial_segment", "interval_bounded"}
            if unknown:
                raise MappingError(f"unknown flags {sorted(unknown)}")
            images = {}
            for key, img in doc.get("images", {}).items():
                x = tuple(int(t) for t in key.split(",")) if key else ()
                images[x] = frozenset(int(z) for z in img)
            return cls(int(doc["n"]), int(doc["k"]), images, doc.get("mu"),
                       "interval_bounded" in flags, "initial_segment" in flags)
        except (KeyError, TypeError, AttributeError) as e:
            raise MappingError(f"malformed mapping document: {e!r}") from e

    @classmethod
    def from_json(cls, text: str) -> SetMapping:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise MappingError(f"malformed JSON: {e}") from e
        return cls.from_dict(doc)


def _check_range(f: SetMapping, H: ElementSet) -> ElementSet:
    return elements(H, f.n)


def is_free(f: SetMapping, H: Iterable[int]) -> bool:
    H = _check_range(f, H)
    hm = to_mask(H)
    masks = f.masks
    if len(masks) < comb(len(H), f.k):
        # sparse mapping: scan the nonempty images instead of [H]^k
        return not any(m & hm and hm | to_mask(x) == hm for x, m in masks.items())
    return not any(masks.get(x, 0) & hm for x in combinations(H, f.k))


def _chains(U: ElementSet, k: int):
    if k == 4:
        for c in combinations(U, 5):
            yield (c[0], c[1], c[3], c[4]), c[2]
    elif k == 2:
        for x, y, z in combinations(U, 3):
            yield (y, z), x
    else:
        raise ValueError(f"unsupported arity {k}; closure predicates need k=4 or k=2")


def is_F_closed(F: SetMapping, U: Iterable[int]) -> bool:
    """k=4: every 5-chain's middle lies in F of its outer 4; k=2: every triple's least lies in F of the other two."""
    U = _check_range(F, U)
    return all(mid in F.image(outer) for outer, mid in _chains(U, F.k))


def is_g_free(g: SetMapping, U: Iterable[int]) -> bool:
    U = _check_range(g, U)
    return not any(mid in g.image(outer) for outer, mid in _chains(U, g.k))


def is_secured(F: SetMapping, g: SetMapping, u: Iterable[int]) -> bool:
    u = _check_range(F, u)
    if F.k != 2 or g.k != 2:
        raise ValueError("secured sets are defined for arity 2")
    return len(u) >= 3 and is_g_free(g, u) and is_F_closed(F, u)


def middle_element_free(f: SetMapping, H: Iterable[int]) -> bool:
    """Freeness read off the distinguished-element pattern alone."""
    H = _check_range(f, H)
    return not any(mid in f.image(outer) for outer, mid in _chains(H, f.k))


def free_reduction_equivalence(f: SetMapping, H: Iterable[int]) -> bool:
    """is_free(f, H) for interval-bounded or initial-segment f.

    For these mappings an element of H can only land in an image as the
    middle of a 5-chain (k=4) or the least of a triple (k=2), so this
    should always equal ``middle_element_free(f, H)``; the tests hold it
    to that.
    """
    if not (f.interval_bounded or f.initial_segment):
        raise ValueError("mapping is neither interval_bounded nor initial_segment")
    return is_free(f, H)
