import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ratecol.exceptions import InputError
from ratecol.numerics import (
    SourceModel,
    binary_entropy,
    binom_log_pmf,
    cond_mean_interval,
    entropy,
    pmf_table,
    prob_at_most,
    prob_interval,
)

mpmath.mp.dps = 50


def mp_h(x):
    x = mpmath.mpf(x)
    if x in (0, 1):
        return mpmath.mpf(0)
    return -x * mpmath.log(x, 2) - (1 - x) * mpmath.log(1 - x, 2)


def mp_pmf(m, p, s):
    p = mpmath.mpf(p)
    return mpmath.binomial(m, s) * p**s * (1 - p) ** (m - s)


class TestSourceModel:
    def test_rejects_degenerate(self):
        for p in (0.0, 1.0, -0.1, 1.2):
            with pytest.raises(InputError):
                SourceModel(3, p)

    def test_heterogeneous(self):
        src = SourceModel(3, [0.1, 0.2, 0.3])
        assert not src.is_homogeneous
        with pytest.raises(InputError):
            src.require_homogeneous()
        assert SourceModel(2, [0.4, 0.4]).p == 0.4


class TestBinaryEntropy:
    def test_values(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.11) == pytest.approx(float(mp_h("0.11")), abs=1e-15)
        assert binary_entropy(0.11) == pytest.approx(0.49992, abs=1e-5)

    def test_clamps_near_endpoints(self):
        assert binary_entropy(1e-16) == 0.0
        assert binary_entropy(1 - 1e-16) == 0.0

    def test_domain(self):
        with pytest.raises(InputError):
            binary_entropy(1.0001)

    def test_concavity_grid(self):
        grid = np.linspace(0, 1, 401)
        h = np.array([binary_entropy(x) for x in grid])
        for i, j in itertools.combinations(range(0, 401, 7), 2):
            mid = binary_entropy((grid[i] + grid[j]) / 2)
            assert mid >= (h[i] + h[j]) / 2 - 1e-15

    @given(st.floats(1e-9, 1 - 1e-9))
    def test_matches_mpmath(self, x):
        assert binary_entropy(x) == pytest.approx(float(mp_h(x)), rel=1e-12, abs=1e-15)


class TestPmf:
    def test_examples(self):
        assert binom_log_pmf(SourceModel(1, 0.3), 1) == pytest.approx(math.log(0.3), abs=1e-15)
        assert binom_log_pmf(SourceModel(4, 0.5), 2) == pytest.approx(math.log(6 / 16), abs=1e-14)
        assert binom_log_pmf(SourceModel(200, 0.01), 0) == pytest.approx(200 * math.log(0.99), rel=1e-14)

    def test_range(self):
        with pytest.raises(InputError):
            binom_log_pmf(SourceModel(3, 0.5), 4)

    @pytest.mark.parametrize("m", [1, 7, 50, 1000, 10_000])
    @pytest.mark.parametrize("p", [1e-6, 1e-3, 0.1, 0.5, 0.9, 1 - 1e-3, 1 - 1e-6])
    def test_normalised(self, m, p):
        assert abs(math.fsum(pmf_table(SourceModel(m, p))) - 1.0) <= 1e-12

    @pytest.mark.parametrize("m, p", [(30, 0.3), (100, 0.01), (500, 0.77)])
    def test_matches_mpmath(self, m, p):
        vals = pmf_table(SourceModel(m, p))
        for s in range(0, m + 1, max(1, m // 13)):
            exact = float(mp_pmf(m, p, s))
            assert vals[s] == pytest.approx(exact, rel=1e-10, abs=1e-300)


class TestIntervals:
    def test_examples(self):
        assert prob_interval(SourceModel(5, 0.3), 0, 5) == 1.0
        assert prob_interval(SourceModel(2, 0.5), 1, 1) == pytest.approx(0.5, abs=1e-15)
        assert prob_interval(SourceModel(8, 0.5), 1, 8) == pytest.approx(0.99609375, abs=1e-15)

    def test_cond_mean_examples(self):
        src = SourceModel(8, 0.5)
        assert cond_mean_interval(src, 0, 8) == pytest.approx(4.0, abs=1e-13)
        assert cond_mean_interval(src, 3, 3) == 3.0
        brute = sum(s * mp_pmf(8, 0.5, s) for s in range(1, 9)) / sum(mp_pmf(8, 0.5, s) for s in range(1, 9))
        assert cond_mean_interval(src, 1, 8) == pytest.approx(float(brute), abs=1e-13)
        assert cond_mean_interval(src, 1, 8) == pytest.approx(4.015686, abs=1e-6)

    def test_bad_interval(self):
        with pytest.raises(InputError):
            prob_interval(SourceModel(4, 0.5), 3, 2)
        with pytest.raises(InputError):
            cond_mean_interval(SourceModel(4, 0.5), -1, 2)

    def test_deep_tail_mean_is_finite(self):
        src = SourceModel(5000, 1e-4)
        assert 4000 <= cond_mean_interval(src, 4000, 5000) <= 4001

    @given(st.integers(1, 300), st.floats(0.001, 0.999), st.data())
    def test_additivity_and_mean_bounds(self, m, p, data):
        src = SourceModel(m, p)
        a = data.draw(st.integers(0, m))
        b = data.draw(st.integers(a, m))
        if b < m:
            total = prob_interval(src, a, b) + prob_interval(src, b + 1, m)
            assert total == pytest.approx(prob_interval(src, a, m), abs=1e-12)
        assert a <= cond_mean_interval(src, a, b) <= b

    def test_tail_inequality_sweep(self):
        for m in range(1, 201):
            for p in (0.005, 0.05, 0.25, 0.5, 0.75, 0.95):
                src = SourceModel(m, p)
                for b in range(0, min(m, math.floor(m * p)) + 1):
                    assert prob_at_most(src, b) <= (b + 1) / (m * p) + 1e-12


class TestEntropyOfSumBound:
    """H(Y^k) <= k h(E(S_Y)/k) for any joint law on {0,1}^k."""

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_random_laws(self, k):
        rng = np.random.default_rng(k)
        sums = np.array([sum(x) for x in itertools.product((0, 1), repeat=k)])
        for _ in range(500):
            w = rng.dirichlet(np.full(2**k, rng.choice([0.05, 0.5, 5.0])))
            assert entropy(w) <= k * binary_entropy(min(1.0, float(w @ sums) / k)) + 1e-12

    def test_iid_is_tight(self):
        # product Bernoulli(q) law attains equality
        q, k = 0.3, 3
        w = [q ** sum(x) * (1 - q) ** (k - sum(x)) for x in itertools.product((0, 1), repeat=k)]
        assert entropy(w) == pytest.approx(k * binary_entropy(q), abs=1e-12)
