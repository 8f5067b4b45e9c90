from itertools import combinations

import pytest


def brute_free(f, H):
    """Freeness straight from the definition, no shortcuts."""
    for x in combinations(sorted(H), f.k):
        if f.image(x) & set(H):
            return False
    return True


def brute_max(f):
    for size in range(f.n, -1, -1):
        for H in combinations(range(f.n), size):
            if brute_free(f, H):
                return size, H
    return 0, ()


@pytest.fixture
def free_oracle():
    return brute_free
