import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from thinent import information as info
from thinent import pmf as pm
from thinent import sampling as smp
from thinent.errors import InfiniteInformation, InteriorZero, ZeroMean


class TestScore:
    def test_poisson_score_vanishes(self):
        Pi = pm.poisson(2.5)
        s = info.scaled_score(Pi)
        # the stored mean is short by the tail's first moment
        assert np.max(np.abs(s.rho)) <= 2 * pm.tail_moment_bound(Pi) / Pi.mean
        assert s.k_value <= 1e-12

    def test_bernoulli_score(self):
        p = 0.3
        s = info.scaled_score(pm.bernoulli(p))
        assert s.rho[0] == pytest.approx(p / (1 - p), abs=1e-15)
        assert s.rho[1] == -1.0

    def test_ulc_score_decreasing(self):
        s = info.scaled_score(pm.binomial(7, 0.4))
        assert np.all(np.diff(s.rho) <= 1e-12)

    def test_errors(self):
        with pytest.raises(ZeroMean):
            info.scaled_score(pm.delta(0))
        with pytest.raises(InteriorZero):
            info.scaled_score(pm.make_pmf([0.5, 0.0, 0.5]))


class TestFisher:
    def test_bernoulli_closed_form(self):
        assert info.scaled_fisher(pm.bernoulli(0.3)) == pytest.approx(0.09 / 0.7, abs=1e-15)

    def test_poisson_zero(self):
        assert info.scaled_fisher(pm.poisson(1.7)) <= 1e-12

    def test_binomial_below_bernoulli(self):
        k = info.scaled_fisher(pm.binomial(10, 0.1))
        assert k == pytest.approx(oracles.scaled_fisher(pm.binomial(10, 0.1).probs), abs=1e-15)
        assert 0 < k <= info.scaled_fisher(pm.bernoulli(0.1)) + 1e-15

    def test_johnstone(self):
        assert info.johnstone_info(pm.bernoulli(0.4)) == math.inf
        assert info.johnstone_info(pm.poisson(2.0)) == pytest.approx(0.5, abs=1e-10)
        assert info.johnstone_info(pm.poisson(1.0)) == pytest.approx(1.0, abs=1e-8)

    def test_cramer_rao(self):
        for P in (pm.poisson(0.7), pm.family_pmf("negative-binomial", [3.0, 0.6]), pm.family_pmf("tilted-poisson", [2.0, 0.2])):
            assert info.johnstone_info(P) >= 1 / P.variance - 1e-8

    def test_subadditivity_examples(self):
        B = pm.bernoulli(0.3)
        assert info.fisher_subadditivity_gap([B]) == pytest.approx(0.0, abs=1e-15)
        assert info.fisher_subadditivity_gap([B, B]) >= -1e-15
        Pi = pm.poisson(1.5)
        assert abs(info.fisher_subadditivity_gap([Pi, Pi], "johnstoneI")) < 1e-8
        with pytest.raises(InfiniteInformation):
            info.fisher_subadditivity_gap([B, Pi], "johnstoneI")


class TestPoissonApprox:
    def test_poisson(self):
        r = info.poisson_approx_report(pm.poisson(1.3))
        assert max(r.K, r.D_to_poisson) <= 1e-12
        assert all(r.chain_ok.values())

    def test_binomial(self):
        r = info.poisson_approx_report(pm.binomial(10, 0.1))
        assert r.D_to_poisson <= 1 / 90
        assert info.binomial_relative_entropy_bound(10, 1.0) == pytest.approx(1 / 90)
        assert all(r.chain_ok.values())

    def test_random_ulc_chain(self):
        for i in range(100):
            r = info.poisson_approx_report(smp.random_ulc(smp.trial_rng(4, "chain", i)))
            assert all(r.chain_ok.values())


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 100_000))
def test_score_properties(i):
    rng = smp.trial_rng(5, "score-props", i)
    P = smp.random_pmf(rng) if rng.random() < 0.5 else smp.random_ulc(rng)
    s = info.scaled_score(P)
    assert abs(P.probs @ s.rho) < 1e-10
    assert s.k_value >= 0
    decreasing = bool(np.all(np.diff(s.rho) <= 1e-12 * np.maximum(1.0, np.abs(s.rho[1:]))))
    assert pm.ulc_check(P) == decreasing
