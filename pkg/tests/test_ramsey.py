from itertools import combinations, product
from math import comb

import pytest

from setmaplab import SetMapping
from setmaplab.constructions import prefix_mapping
from setmaplab.corpus import case_rng, random_mapping
from setmaplab.ramsey import (
    Coloring,
    arrow_check,
    is_counterexample,
    position_lemma_scan,
    t_ladder,
    triple_coloring,
)


def has_homogeneous(col, size, color):
    return any(all(col.color(y) == color for y in combinations(X, col.r))
               for X in combinations(range(col.a), size))


def brute_arrow(a, b, c, r):
    for bits in product((0, 1), repeat=comb(a, r)):
        col = Coloring(a, r, bits)
        if not has_homogeneous(col, b, 0) and not has_homogeneous(col, c, 1):
            return False, bits
    return True, None


def test_anchors():
    assert arrow_check(6, 3, 3, 2).holds is True
    v = arrow_check(5, 3, 3, 2)
    assert v.holds is False and v.exact
    assert v.counterexample.to_dict()["bits"] == "0011101100"
    # color 0 is the 5-cycle 0-1-3-4-2, color 1 its complement
    zero = [x for x in combinations(range(5), 2) if v.counterexample.color(x) == 0]
    assert zero == [(0, 1), (0, 2), (1, 3), (2, 4), (3, 4)]


def test_arity_five_anchors():
    v = arrow_check(6, 5, 7, 5)
    assert v.holds is False and v.counterexample.bits == (1,) * 6
    assert arrow_check(7, 5, 7, 5).holds is True
    assert arrow_check(7, 5, 7, 5, mode="sweep").holds is True


CASES = [(a, b, c, r) for r in (1, 2, 3) for a in range(1, 7) for b in range(r, a + 2)
         for c in range(r, a + 2) if comb(a, r) <= 15]


@pytest.mark.parametrize("a,b,c,r", CASES)
def test_modes_agree_with_brute_force(a, b, c, r):
    want, least = brute_arrow(a, b, c, r)
    pruned = arrow_check(a, b, c, r)
    plain = arrow_check(a, b, c, r, symmetry=False)
    sweep = arrow_check(a, b, c, r, mode="sweep")
    assert pruned.holds == plain.holds == sweep.holds == want
    if not want:
        # lex-least counterexample is invariant under every mode
        for v in (pruned, plain, sweep):
            assert v.counterexample.bits == least
            assert is_counterexample(v.counterexample, b, c)


def test_refute_mode_finds_verified_counterexamples():
    v = arrow_check(9, 7, 7, 5, mode="refute")
    assert v.holds is False and is_counterexample(v.counterexample, 7, 7)
    assert arrow_check(6, 3, 3, 2, mode="refute").holds is True


def test_exhaustive_cap():
    with pytest.raises(ValueError):
        arrow_check(8, 5, 7, 5)


def test_coloring_round_trip():
    col = Coloring(5, 2, (0, 1) * 5)
    assert Coloring.from_dict(col.to_dict()) == col
    assert col.flipped().flipped() == col
    with pytest.raises(ValueError):
        Coloring(5, 2, (0,) * 9)


def test_homogeneous_lookup():
    col = Coloring(5, 2, (0,) * 10)
    assert col.homogeneous(5, 0) == (0, 1, 2, 3, 4)
    assert col.homogeneous(2, 1) is None


def test_ladder():
    ladder = t_ladder(1)
    assert [(e.value, e.exact) for e in ladder] == [(5, True), (7, True)]


def test_ladder_third_entry_is_a_bound():
    e = t_ladder(2)[2]
    assert not e.exact and e.value >= 8
    # the bound comes from a counterexample one below it
    v = arrow_check(e.value - 1, 7, 7, 5, mode="refute")
    assert v.holds is False and is_counterexample(v.counterexample, 7, 7)


def test_position_scan():
    assert position_lemma_scan(7).holds
    assert position_lemma_scan(8).holds
    six = position_lemma_scan(6)
    assert not six.holds and six.failing == (2, 3)
    assert not position_lemma_scan(5).holds


def test_triple_coloring_extremes():
    assert set(triple_coloring(prefix_mapping(7), range(7)).bits) == {1}
    assert set(triple_coloring(SetMapping(7, 2), range(7)).bits) == {0}


def test_triple_coloring_against_arrow():
    # 5 -> (4,3)^3 holds, so every 5-point window of a chain must show a
    # 0-homogeneous 4-set or a 1-homogeneous triple
    assert arrow_check(5, 4, 3, 3).holds is True
    assert arrow_check(4, 4, 4, 3).holds is False
    for i in range(20):
        F = random_mapping(case_rng(9, i), 9, 2, 0.4)
        col = triple_coloring(F, range(9))
        for x, bit in zip(combinations(range(9), 3), col.bits):
            assert bit == int(x[0] in F.image(x[1:]))
        for window in combinations(range(9), 5):
            sub = triple_coloring(F, window)
            assert sub.homogeneous(4, 0) or sub.homogeneous(3, 1)


def grid_verdict(a, b, c):
    mode = "search" if comb(a, 2) <= 24 else "refute"
    v = arrow_check(a, b, c, 2, mode=mode, max_nodes=10**6)
    assert v.holds is not None
    return v.holds


def test_monotone_on_pair_grid():
    table = {(a, b, c): grid_verdict(a, b, c)
             for a in range(2, 9) for b in range(2, 5) for c in range(2, 5)}
    for (a, b, c), holds in table.items():
        if holds and a < 8:
            assert table[a + 1, b, c]
        if holds and b > 2:
            assert table[a, b - 1, c]
    assert table[6, 3, 3] and not table[5, 3, 3]
    assert table[8, 3, 4] is False and table[8, 4, 3] is False


def test_flip_symmetry():
    for a in range(2, 7):
        for b in range(2, 5):
            for c in range(2, 5):
                v, w = arrow_check(a, b, c, 2), arrow_check(a, c, b, 2)
                assert v.holds == w.holds
                if v.counterexample is not None:
                    assert is_counterexample(v.counterexample.flipped(), c, b)


@pytest.mark.parametrize("size", range(5, 11))
def test_position_scan_range(size):
    assert position_lemma_scan(size).holds == (size >= 7)
