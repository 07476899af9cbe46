from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtcorners.density import CornerDensity
from gtcorners.discrete import (
    as_signature,
    count_between,
    count_schemes,
    relative_dimension,
    relative_dimension_distribution,
    round_half_up,
    scaling_limit_compare,
)
from gtcorners.errors import DegenerateSpectrumError, DimensionError, ResourceError


def below(x):
    """All integer rows interlacing x (one shorter)."""
    return list(product(*[range(x[i], x[i + 1] + 1) for i in range(len(x) - 1)]))


def all_schemes(x):
    if len(x) == 1:
        return [()]
    out = []
    for y in below(x):
        out += [(y,) + rest for rest in all_schemes(y)]
    return out


def weyl_dimension(x):
    # highest weight read in decreasing order; x is increasing here
    n = len(x)
    num = den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= x[j] - x[i] + j - i
            den *= j - i
    return num // den


def signatures(n, top):
    return list(combinations_with_replacement(range(top + 1), n))


# -------------------------------------------------------------------- counts


def test_count_examples():
    assert count_schemes([0, 1]) == 2
    assert count_schemes([0, 1, 2]) == 8
    assert count_schemes([3, 3, 3]) == 1
    assert count_schemes([5]) == 1


def test_counts_are_exact_ints():
    v = count_schemes([0, 7, 15, 26])
    assert isinstance(v, int)
    assert v == weyl_dimension((0, 7, 15, 26))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_counts_match_enumeration(n):
    for x in signatures(n, 4):
        assert count_schemes(x) == len(all_schemes(x))


@given(st.lists(st.integers(0, 9), min_size=2, max_size=5))
def test_counts_match_weyl_formula(vals):
    x = sorted(vals)
    assert count_schemes(x) == weyl_dimension(x)


@given(st.lists(st.integers(0, 6), min_size=2, max_size=4), st.integers(-20, 20))
def test_shift_invariance(vals, c):
    x = sorted(vals)
    assert count_schemes([v + c for v in x]) == count_schemes(x)
    y = x[:-1]
    assert count_between([v + c for v in x], [v + c for v in y]) == count_between(x, y)


def test_count_between_examples():
    assert count_between([0, 1, 2], [1]) == 4
    assert count_between([0, 2], [1]) == 1
    assert count_between([0, 1, 2], [0, 2]) == 1
    assert count_between([0, 1, 2], [1, 1]) == 1
    assert count_between([0, 1, 2], [2, 2]) == 0
    assert count_between([0, 1, 2], [5]) == 0


def test_count_between_validation():
    with pytest.raises(DimensionError):
        count_between([0, 1], [0, 1])
    with pytest.raises(ValueError):
        count_schemes([2, 1])
    with pytest.raises(ValueError):
        as_signature([0, 0.5])


def test_budget():
    with pytest.raises(ResourceError):
        count_schemes([0, 1000, 2000, 3000, 4000])
    with pytest.raises(ResourceError):
        count_schemes([0, 5, 9], budget=10)


# ------------------------------------------------------------ relative dims


def test_relative_dimension_examples():
    assert relative_dimension([0, 1], [0]) == Fraction(1, 2)
    assert relative_dimension([0, 1], [1]) == Fraction(1, 2)
    assert relative_dimension([2, 2, 2], [2, 2]) == 1
    assert relative_dimension([2, 2, 2], [2]) == 1
    assert relative_dimension([0, 1, 2], [3]) == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_relative_dimensions_match_enumeration(n):
    for x in signatures(n, 4):
        schemes = all_schemes(x)
        for k in range(1, n):
            hist = Counter(s[n - 1 - k] for s in schemes)
            law = relative_dimension_distribution(x, k)
            assert set(law) == set(hist)
            for y, c in hist.items():
                assert law[y] == Fraction(c, len(schemes))
                assert relative_dimension(x, y) == Fraction(c, len(schemes))
            assert sum(law.values()) == 1


def test_support_matches_reachability():
    x = (0, 2, 3, 6)
    reach = {1: set(), 2: set(), 3: set()}
    for s in all_schemes(x):
        for row in s:
            reach[len(row)].add(row)
    for k in (1, 2, 3):
        for y in combinations_with_replacement(range(-1, 8), k):
            assert (relative_dimension(x, y) > 0) == (y in reach[k])


# ------------------------------------------------------------- scaling limit


def test_round_half_up():
    np.testing.assert_array_equal(round_half_up([0.5, 1.5, 2.4999, -0.5]), [1, 2, 2, 0])


def test_scaling_two_points_uniform():
    for L in (5, 10, 40):
        rep = scaling_limit_compare([0.0, 1.0], 1, L, [[0.3]])
        row = rep.rows[0]
        assert row.discrete == pytest.approx(L / (L + 1))
        assert row.continuous == 1.0
        assert rep.total_mass == 1


def test_scaling_differences_decrease():
    diffs = [scaling_limit_compare([0, 1, 2], 1, L, [[1.0]]).rows[0].abs_diff for L in (10, 20, 40)]
    assert diffs[0] > diffs[1] > diffs[2]


def test_scaling_limit_k2_approaches_density():
    x = [0.0, 1.0, 2.5, 4.0]
    a = [[0.7, 2.0]]
    ref = CornerDensity(x, 2)(a[0])
    errs = [abs(scaling_limit_compare(x, 2, L, a).rows[0].discrete - ref) for L in (4, 8, 16)]
    assert errs[-1] < errs[0]
    assert errs[-1] < 0.2 * ref


def test_scaling_collision():
    with pytest.raises(DegenerateSpectrumError):
        scaling_limit_compare([0.0, 0.1, 1.0], 1, 2, [[0.5]])
    with pytest.raises(ValueError):
        scaling_limit_compare([0.0, 1.0], 1, 0, [[0.5]])
