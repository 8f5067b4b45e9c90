from itertools import combinations

import pytest

from setmaplab import SetMapping, is_free
from setmaplab.constructions import (
    DeltaSystemPair,
    EnumerationScheme,
    complete_pair_mapping,
    descent_chain,
    enumeration_mapping,
    interval_mapping,
    longest_descending_chain,
    maximal_extension,
    prefix_mapping,
    verify_delta_preconditions,
)
from setmaplab.forcing import Condition4, PairCondition
from setmaplab.freeset import enumerate_free_sets, max_free_set


def test_interval_images():
    f = interval_mapping(6)
    assert f.image((0, 2, 4, 5)) == {3}
    assert f.image((0, 1, 2, 3)) == frozenset()
    assert f.interval_bounded


def test_interval_twenty():
    assert max_free_set(interval_mapping(20)).optimum == 4


def test_prefix_images():
    f = prefix_mapping(4)
    assert f.image((2, 3)) == {0, 1}
    assert f.image((0, 3)) == frozenset()
    assert f.initial_segment


def test_complete_pair_mapping():
    f = complete_pair_mapping(4)
    assert f.image((1, 3)) == {0, 2}


def small_scheme():
    return EnumerationScheme(3, ((), (0,), (1, 0)))


def test_enumeration_examples():
    f = enumeration_mapping(small_scheme())
    assert f.image((1, 2)) == {0}
    assert f.image((0, 1)) == frozenset()
    assert not is_free(f, (0, 1, 2))
    assert descent_chain(small_scheme(), (1, 2)) == [0]


def test_scheme_validation():
    with pytest.raises(ValueError):
        EnumerationScheme(3, ((), (0,), (0, 0)))
    with pytest.raises(ValueError):
        EnumerationScheme(2, ((), (1,)))


def test_scheme_round_trip():
    s = EnumerationScheme.random(9, 42)
    assert EnumerationScheme.from_dict(s.to_dict()) == s
    assert EnumerationScheme.random(9, 42) == s


def test_pairs_give_one_step_chains():
    s = EnumerationScheme.random(8, 3)
    for H in combinations(range(8), 2):
        assert len(descent_chain(s, H)) == 1


def test_descent_on_free_sets():
    for seed in range(15):
        s = EnumerationScheme.random(9, seed)
        f = enumeration_mapping(s)
        for m in range(2, 10):
            sets = enumerate_free_sets(f, m)
            for H in sets:
                d = descent_chain(s, H)
                assert all(x > y for x, y in zip(d, d[1:]))
            if not sets:
                break


def test_longest_chain_bounds_free_sets():
    # a free set of size m yields a descending chain of length m - 1
    for seed in range(10):
        s = EnumerationScheme.random(9, seed)
        assert max_free_set(enumeration_mapping(s)).optimum - 1 <= longest_descending_chain(s)


def test_maximal_extension_mixed_tuple():
    F = interval_mapping(6)
    p = Condition4(F, (0, 1, 2), SetMapping(6, 4))
    q = Condition4(F, (3, 4, 5), SetMapping(6, 4))
    pair = DeltaSystemPair.from_conditions(p, q)
    g = maximal_extension(F, range(6), [(p.support, p.g), (q.support, q.g)], pair.is_mixed)
    assert g.image((0, 1, 4, 5)) == {2, 3}


def test_maximal_extension_keeps_old_values():
    F = interval_mapping(8)
    old = SetMapping(8, 4, {(0, 1, 3, 4): {2}})
    g = maximal_extension(F, range(8), [(range(5), old)], lambda x: True)
    assert g.image((0, 1, 3, 4)) == {2}
    assert g.image((0, 1, 5, 7)) == {2, 3, 4}


def test_maximal_extension_detects_disagreement():
    F = interval_mapping(8)
    a = SetMapping(8, 4, {(0, 1, 3, 4): {2}})
    b = SetMapping(8, 4)
    with pytest.raises(ValueError):
        maximal_extension(F, range(8), [(range(5), a), (range(6), b)], lambda x: False)


def test_pair_flavor_mixed_pair():
    F = complete_pair_mapping(5)
    p = PairCondition(F, (0, 1), SetMapping(5, 2))
    q = PairCondition(F, (0, 3, 4), SetMapping(5, 2))
    pair = DeltaSystemPair.from_conditions(p, q)
    g = maximal_extension(F, pair.union, [(p.support, p.g), (q.support, q.g)], pair.is_mixed)
    assert g.image((1, 3)) == {0, 4}


def test_delta_preconditions():
    F = interval_mapping(6)
    p = Condition4(F, (0, 1, 2), SetMapping(6, 4))
    q = Condition4(F, (3, 4, 5), SetMapping(6, 4))
    assert verify_delta_preconditions(DeltaSystemPair.from_conditions(p, q), F)

    P = prefix_mapping(5)
    p = PairCondition(P, (1, 2, 3), SetMapping(5, 2))
    q = PairCondition(P, (2, 3, 4), SetMapping(5, 2))
    # root {2, 3} has F-image {0, 1}, which meets the branch {1}
    assert not verify_delta_preconditions(DeltaSystemPair.from_conditions(p, q), P)


def test_relabeled_copies_are_compatible():
    F = interval_mapping(10)
    g1 = SetMapping(10, 4, {(0, 1, 3, 4): {2}})
    g2 = SetMapping(10, 4, {(0, 1, 6, 7): {5}})
    p = Condition4(F, (0, 1, 2, 3, 4), g1)
    q = Condition4(F, (0, 1, 5, 6, 7), g2)
    assert verify_delta_preconditions(DeltaSystemPair.from_conditions(p, q), F)
