import json
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from setmaplab import SetMapping, MappingError
from setmaplab.constructions import interval_mapping, prefix_mapping
from setmaplab.core import (
    free_reduction_equivalence,
    is_F_closed,
    is_free,
    is_g_free,
    is_secured,
    middle_element_free,
)
from setmaplab.corpus import case_rng, random_interval_mapping, random_mapping

from conftest import brute_free


def test_free_interval_examples():
    f = interval_mapping(6)
    assert is_free(f, {0, 1, 2, 3})
    assert not is_free(f, {0, 1, 2, 3, 4})
    assert f.image((0, 1, 3, 4)) == {2}


def test_k_sets_always_free():
    f = interval_mapping(7)
    for H in combinations(range(7), 4):
        assert is_free(f, H)


def test_F_closed_examples():
    assert is_F_closed(interval_mapping(8), (0, 2, 3, 5, 7))
    assert all(is_F_closed(prefix_mapping(6), U) for U in combinations(range(6), 4))
    assert not is_F_closed(SetMapping(3, 2), (0, 1, 2))


def test_g_free_examples():
    assert is_g_free(SetMapping(6, 4), range(6))
    g = SetMapping(5, 4, {(0, 1, 3, 4): {2}})
    assert not is_g_free(g, (0, 1, 2, 3, 4))
    assert is_g_free(g, (0, 1, 3, 4))


def test_secured_examples():
    F = prefix_mapping(4)
    assert is_secured(F, SetMapping(4, 2), (0, 1, 2))
    assert not is_secured(F, SetMapping(4, 2), (0, 1))
    assert not is_secured(F, SetMapping(4, 2, {(1, 2): {0}}), (0, 1, 2))


def test_reduction_examples():
    f = interval_mapping(6)
    assert free_reduction_equivalence(f, range(5)) is False
    assert middle_element_free(f, range(5)) is False
    g = SetMapping(5, 2, {(y, z): {0} for y, z in combinations(range(1, 5), 2)}, initial_segment=True)
    assert free_reduction_equivalence(g, (1, 2, 3)) and middle_element_free(g, (1, 2, 3))


def test_reduction_needs_a_flag():
    with pytest.raises(ValueError):
        free_reduction_equivalence(SetMapping(5, 2), (0, 1))


def test_reduction_agrees_on_random_interval_mappings():
    for i in range(10):
        rng = case_rng(7, i)
        f = random_interval_mapping(rng, 9, 0.6)
        for size in range(8):
            for H in combinations(range(9), size):
                assert is_free(f, H) == middle_element_free(f, H)


def test_invariant_errors_name_the_tuple():
    with pytest.raises(MappingError) as e:
        SetMapping(4, 2, {(0, 1): {1}})
    assert e.value.tuple == (0, 1)
    with pytest.raises(MappingError):
        SetMapping(6, 4, {(0, 1, 2, 3): {5}}, interval_bounded=True)
    with pytest.raises(MappingError):
        SetMapping(4, 2, {(1, 2): {3}}, initial_segment=True)
    with pytest.raises(MappingError):
        SetMapping(5, 2, {(0, 1): {2, 3}}, mu=2)
    with pytest.raises(MappingError):
        SetMapping(4, 2, {(0, 1): {7}})


def test_json_round_trip_is_canonical():
    f = interval_mapping(6)
    text = f.to_json()
    g = SetMapping.from_json(text)
    assert g == f and g.to_json() == text
    assert json.loads(text)["images"]["0,1,3,4"] == [2]


def test_malformed_documents():
    with pytest.raises(MappingError):
        SetMapping.from_json("{not json")
    with pytest.raises(MappingError):
        SetMapping.from_json('{"n": 4, "k": 2, "images": {"0,1": [1]}}')


def test_restrict_and_on():
    f = interval_mapping(7)
    r = f.restrict((0, 1, 3, 4, 5))
    assert r.image((0, 1, 4, 5)) == {3}
    assert (0, 1, 4, 5) in f.on((0, 1, 4, 5))
    assert r.contained_in(f) and not f.contained_in(r)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9), st.sampled_from([1, 2, 3, 4]))
def test_is_free_matches_definition(seed, n, k):
    rng = case_rng(seed, 0)
    f = random_mapping(rng, n, k, 0.3)
    for size in range(n + 1):
        for H in combinations(range(n), size):
            assert is_free(f, H) == brute_free(f, H)
        if size > 5:
            break


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8), st.sampled_from([1, 2, 4]))
def test_round_trip_random(seed, n, k):
    f = random_mapping(case_rng(seed, 1), n, k, 0.3)
    assert SetMapping.from_json(f.to_json()) == f
    assert SetMapping.from_dict(json.loads(f.to_json())).to_json() == f.to_json()
