from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermofoot.exceptions import DegenerateTableError
from thermofoot.stats import (chi_square_2x2, cohort_table, descriptive_summary, midranks,
                              rank_sum_test)


class TestChiSquare:
    def test_gender_table(self):
        stat, p = chi_square_2x2([[58, 32], [66, 178]])
        assert stat == pytest.approx(39.3886, abs=0.01)
        assert 0 < p < 1e-8

    def test_equal_proportions(self):
        assert chi_square_2x2([[10, 10], [20, 20]])[0] == pytest.approx(0.0)

    def test_perfect_association(self):
        assert chi_square_2x2([[10, 0], [0, 10]])[0] == pytest.approx(20.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateTableError):
            chi_square_2x2([[0, 0], [3, 4]])

    def test_p_value_matches_reference(self):
        from scipy.stats import chi2
        stat, p = chi_square_2x2([[12, 7], [9, 15]])
        assert p == pytest.approx(chi2.sf(stat, 1), rel=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(1, 200), min_size=4, max_size=4), st.integers(1, 9))
    def test_symmetries(self, c, scale):
        a, b, cc, d = c
        s = chi_square_2x2([[a, b], [cc, d]])[0]
        assert chi_square_2x2([[cc, d], [a, b]])[0] == pytest.approx(s)
        assert chi_square_2x2([[b, a], [d, cc]])[0] == pytest.approx(s)
        assert chi_square_2x2([[a * scale, b * scale], [cc * scale, d * scale]])[0] \
            == pytest.approx(s * scale)


def _permutation_z(a, b):
    """Exhaustive permutation mean/std of the rank sum, as a z-score of the observed sum."""
    pooled = np.concatenate([a, b])
    ranks = midranks(pooled)
    w_obs = ranks[:len(a)].sum()
    sums = np.array([ranks[list(idx)].sum() for idx in combinations(range(len(pooled)), len(a))])
    sd = sums.std()
    return 0.0 if sd == 0 else (w_obs - sums.mean()) / sd


class TestRankSum:
    def test_identical(self):
        z, p = rank_sum_test([1, 2, 3], [1, 2, 3])
        assert z == 0 and p == pytest.approx(1.0)

    def test_hand_case(self):
        z, _ = rank_sum_test([1, 2], [3, 4])
        assert z == pytest.approx(-1.549, abs=1e-3)

    def test_all_constant(self):
        assert rank_sum_test([5, 5], [5, 5, 5]) == (0.0, 1.0)

    def test_matches_scipy(self):
        from scipy.stats import ranksums
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=20), rng.normal(0.5, size=25)
        z, p = rank_sum_test(a, b)
        ref = ranksums(a, b)
        assert z == pytest.approx(ref.statistic) and p == pytest.approx(ref.pvalue)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.integers(0, 6), min_size=1, max_size=6),
           st.lists(st.integers(0, 6), min_size=1, max_size=6))
    def test_permutation_oracle(self, a, b):
        z, _ = rank_sum_test(a, b)
        assert abs(abs(z) - abs(_permutation_z(np.array(a), np.array(b)))) <= 0.02

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=15),
           st.lists(st.floats(-50, 50), min_size=1, max_size=15))
    def test_monotone_invariance(self, a, b):
        z1, _ = rank_sum_test(a, b)
        z2, _ = rank_sum_test(np.exp(np.array(a) / 10), np.exp(np.array(b) / 10))
        # exp may merge values that differ by less than float resolution
        if len(set(a + b)) == len(set(np.exp(np.array(a + b) / 10))):
            assert z1 == pytest.approx(z2, abs=1e-9)


class TestDescriptive:
    def test_quartiles(self):
        s = descriptive_summary([1, 2, 3, 4, 5])
        assert (s.q1, s.median, s.q3) == (2, 3, 4)
        assert s.std == pytest.approx(np.std([1, 2, 3, 4, 5], ddof=1))

    def test_constant_and_missing(self):
        s = descriptive_summary([4.0, 4.0, np.nan])
        assert s.std == 0 and s.min == s.max == 4 and s.missing == 1 and s.n == 2

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
    def test_ordering(self, v):
        s = descriptive_summary(v)
        assert s.min <= s.q1 <= s.median <= s.q3 <= s.max


def test_cohort_table(small_table):
    rows = cohort_table(small_table)
    items = [r["item"] for r in rows]
    assert items[0] == "Gender" and items[-1] == "Outcome"
    assert "Age (Years)" in items and "TCI" in items
    age = rows[items.index("Age (Years)")]
    assert age["statistic"] > 0
