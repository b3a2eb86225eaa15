import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from thinent import pmf as pm
from thinent import sampling as smp
from thinent import shepp_olkin as so
from thinent.errors import BadQ, DirectionNotIncreasing, LengthMismatch, OutOfRange


def random_affine(rng, m):
    return so.so_path(rng.uniform(0, 1, m), rng.uniform(0, 1, m))


def random_monotone(rng, m):
    a, b = rng.uniform(0, 1, m), rng.uniform(0, 1, m)
    return so.so_path(np.minimum(a, b), np.maximum(a, b))


class TestPath:
    def test_examples(self):
        assert so.so_path([0.3, 0.6], [0.3, 0.6]).monotone
        assert so.so_path([0, 0], [1, 1]).monotone
        assert not so.so_path([0.2, 0.8], [0.8, 0.2]).monotone

    def test_errors(self):
        with pytest.raises(OutOfRange):
            so.so_path([0.2, 0.5], [1.2, 0.5])
        with pytest.raises(OutOfRange):
            so.so_path([math.nan], [0.5])
        with pytest.raises(LengthMismatch):
            so.so_path([0.2], [0.3, 0.4])
        with pytest.raises(OutOfRange):
            so.path_pmf_derivatives(so.so_path([0.2], [0.4]), 1.5)


class TestDerivatives:
    def test_single_coordinate(self):
        path = so.so_path([0.2], [0.7])
        d = so.path_pmf_derivatives(path, 0.4)
        assert np.allclose(d.g, [0.5])
        assert d.h.size == 0
        first = np.array([0.0, d.g[0]]) - np.array([d.g[0], 0.0])
        assert np.allclose(first, [-0.5, 0.5])

    def test_constant_path(self):
        d = so.path_pmf_derivatives(so.so_path([0.1, 0.5, 0.9], [0.1, 0.5, 0.9]), 0.3)
        assert not d.g.any() and not d.h.any()
        assert d.fd_residual_1 <= 1e-12 and d.fd_residual_2 <= 1e-6

    def test_match_mpmath_oracle(self):
        rng = smp.trial_rng(12, "so-deriv", 0)
        p0, p1 = rng.uniform(0, 1, 5), rng.uniform(0, 1, 5)
        path = so.so_path(p0, p1)
        d = so.path_pmf_derivatives(path, 0.37)
        d1, d2 = oracles.bernoulli_sum_t_derivatives(p0.tolist(), p1.tolist(), 0.37)
        m1 = 6
        assert np.allclose(so._first_from_g(d.g), d1, atol=1e-14, rtol=0)
        assert np.allclose(so._second_from_h(d.h, m1), d2, atol=1e-14, rtol=0)
        assert d.fd_residual_1 <= 1e-6 and d.fd_residual_2 <= 1e-6

    def test_step_halving_is_second_order(self):
        # at 1e-4 the second difference is rounding dominated, so halve from 1e-2
        path = so.so_path([0.1, 0.4, 0.8, 0.3, 0.6], [0.7, 0.2, 0.5, 0.9, 0.1])
        a = so.path_pmf_derivatives(path, 0.37, step=1e-2)
        b = so.path_pmf_derivatives(path, 0.37, step=5e-3)
        assert 3.5 <= a.fd_residual_1 / b.fd_residual_1 <= 4.5
        assert 3.5 <= a.fd_residual_2 / b.fd_residual_2 <= 4.5

    def test_telescoping_and_mass(self):
        for i in range(50):
            rng = smp.trial_rng(12, "so-mass", i)
            path = random_affine(rng, int(rng.integers(1, 9)))
            d = so.path_pmf_derivatives(path, float(rng.uniform()))
            assert abs(so._first_from_g(d.g).sum()) <= 1e-12
            assert abs(so._second_from_h(d.h, len(d.pmf.probs) if d.h.size else d.g.size + 1).sum()) <= 1e-12

    def test_permutation_invariance(self):
        rng = smp.trial_rng(12, "so-perm", 0)
        p0, p1 = rng.uniform(0, 1, 6), rng.uniform(0, 1, 6)
        perm = rng.permutation(6)
        a = so.so_path(p0, p1)
        b = so.so_path(p0[perm], p1[perm])
        da, db = so.path_pmf_derivatives(a, 0.6), so.path_pmf_derivatives(b, 0.6)
        assert np.allclose(da.pmf.probs, db.pmf.probs, atol=1e-12, rtol=0)
        assert np.allclose(da.g, db.g, atol=1e-12, rtol=0)
        assert np.allclose(da.h, db.h, atol=1e-12, rtol=0)
        va = [p.value for p in so.entropy_profile(a, 21, "renyi", 2.5)]
        vb = [p.value for p in so.entropy_profile(b, 21, "renyi", 2.5)]
        assert np.allclose(va, vb, atol=1e-12, rtol=0)


class TestKeyInequality:
    def test_constant_path(self):
        s = so.key_slack_profile(so.so_path([0.3, 0.7], [0.3, 0.7]), 0.5)
        assert not s.any()

    def test_single_coordinate_full_range(self):
        path = so.so_path([0.0], [1.0])
        for t in np.linspace(0.05, 0.95, 19):
            assert so.key_inequality_slack(path, t).min_slack >= 0

    def test_monotone_paths(self):
        for i in range(40):
            rng = smp.trial_rng(13, "key", i)
            path = random_monotone(rng, int(rng.integers(1, 9)))
            for t in np.linspace(0.1, 0.9, 9):
                r = so.key_inequality_slack(path, t)
                assert not r.exploratory
                assert r.min_slack >= -1e-9

    def test_flags_and_bounds(self):
        r = so.key_inequality_slack(so.so_path([0.2, 0.8], [0.8, 0.2]), 0.5)
        assert r.exploratory and r.interpretation == "f = P_t"
        with pytest.raises(OutOfRange):
            so.key_inequality_slack(so.so_path([0.2], [0.8]), 0.0)


class TestEntropyProfile:
    def test_bernoulli_second_derivative(self):
        path = so.so_path([0.2], [0.8])
        prof = so.entropy_profile(path, 101)
        assert len(prof) == 101 and math.isnan(prof[0].second_difference)
        for pt in prof[1:-1]:
            p = 0.2 + 0.6 * pt.t
            exact = -(0.6**2) / (p * (1 - p))
            assert pt.second_difference == pytest.approx(exact, abs=1e-3)

    def test_shannon_concave_on_random_paths(self):
        for i in range(60):
            rng = smp.trial_rng(14, "concave", i)
            path = random_affine(rng, int(rng.integers(1, 11)))
            assert so.max_second_difference(so.entropy_profile(path, 101)) <= 1e-8

    def test_q_one_limit(self):
        path = so.so_path([0.1, 0.3, 0.5], [0.6, 0.2, 0.9])
        for t in (0.0, 0.5, 1.0):
            P = pm.bernoulli_sum_probs(path.at(t))
            H = so.entropy_of(P)
            pp = P[P > 0]
            m2 = float(np.sum(pp * np.log(pp) ** 2))
            assert so.entropy_of(P, "tsallis", 1.0) == H
            # the gap is first order in q - 1, with these leading coefficients
            for eps in (1e-4, -1e-4):
                assert so.entropy_of(P, "tsallis", 1 + eps) - H == pytest.approx(-eps / 2 * m2, abs=1e-7)
                assert so.entropy_of(P, "renyi", 1 + eps) - H == pytest.approx(-eps / 2 * (m2 - H**2), abs=1e-7)
            assert abs(so.entropy_of(P, "tsallis", 1 + 1e-7) - H) <= 1e-6
            assert abs(so.entropy_of(P, "renyi", 1 - 1e-7) - H) <= 1e-6

    def test_collision_entropies(self):
        P = np.array([0.25, 0.5, 0.25])
        assert so.entropy_of(P, "renyi", 2.0) == pytest.approx(-math.log(0.375), abs=1e-15)
        assert so.entropy_of(P, "tsallis", 2.0) == pytest.approx(0.625, abs=1e-15)

    def test_bad_q(self):
        with pytest.raises(BadQ):
            so.entropy_of(np.array([0.5, 0.5]), "renyi", 0.0)
        with pytest.raises(BadQ):
            so.entropy_profile(so.so_path([0.2], [0.8]), 11, "tsallis", -1.0)

    def test_csv_export(self, tmp_path):
        prof = so.entropy_profile(so.so_path([0.2], [0.8]), 101)
        out = tmp_path / "profile.csv"
        so.write_profile_csv(prof, out)
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["t", "value", "second_difference"]
        assert len(rows) == 102
        assert rows[1][2] == "" and rows[-1][2] == ""
        assert float(rows[51][1]) == prof[50].value


class TestConjectureScans:
    def test_tsallis_root(self):
        r = so.tsallis_root()
        assert r == pytest.approx(oracles.tsallis_root(), abs=1e-12)
        assert abs(2 - 4 * 3.65986 + 2**3.65986) < 1e-3

    def test_tsallis_two_witness_frozen(self):
        # exact rational arithmetic gives T''(0.89) = 0.040461513730698 on this monotone path
        path = so.so_path([0.02920129311049602, 0.5920159504726107], [0.2612935409431817, 0.9668925415576575])
        assert path.monotone
        prof = so.entropy_profile(path, 101, "tsallis", 2.0)
        assert prof[89].second_difference == pytest.approx(0.040461513730698, abs=1e-4)
        assert so.max_second_difference(prof) > so.WITNESS_THRESHOLD

    def test_witness_is_reproducible(self):
        a = so.find_convexity_witness("tsallis", 4.0, 2, 100, 11)
        b = so.find_convexity_witness("tsallis", 4.0, 2, 100, 11)
        assert a is not None and a == b
        assert a.second_difference > so.WITNESS_THRESHOLD
        prof = so.entropy_profile(a.path, so.SCAN_GRID, "tsallis", 4.0)
        assert so.max_second_difference(prof) == pytest.approx(a.second_difference)

    def test_critical_q_bracket(self):
        r = so.critical_q_search("tsallis", 2, 40, 11)
        lo, hi = r.bracket
        assert hi - lo <= 0.05 and lo < r.q_hat < hi
        assert r.witness is not None and r.witness.q == hi

    def test_no_witness_at_top(self):
        r = so.critical_q_search("renyi", 2, 3, 0, lo=1.0, hi=1.2)
        if r.witness is None:
            assert math.isnan(r.q_hat) and r.bracket == (1.2, math.inf)

    def test_monotone_entropy(self):
        assert np.all(so.directional_entropy_differences([0.1], [0.4]) > 0)
        with pytest.raises(DirectionNotIncreasing):
            so.directional_entropy_differences([0.3, 0.2], [0.1, -0.1])
        r = so.monotone_entropy_check(2, 50, 3)
        assert r.trials == 50 and r.violations == [] and r.worst >= 0


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=7),
    st.floats(0.0, 1.0),
)
def test_gh_against_finite_differences(coords, t):
    path = so.so_path([a for a, _ in coords], [b for _, b in coords])
    d = so.path_pmf_derivatives(path, t)
    assert d.fd_residual_1 <= 1e-6 and d.fd_residual_2 <= 1e-6
    assert abs(d.pmf.probs.sum() - 1) <= 1e-12
