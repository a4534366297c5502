"""Exact degree pmfs, limit families, and the moment-transfer diagnostic.

Closed forms are pinned two ways: frozen hand-computed values, and an
independent quadrature route (the Poisson mixture integral evaluated
numerically) that every specialized family must reproduce.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from exchgraph._numerics import checked_quad
from exchgraph.degrees import (GeometricLaw, HierarchicalMixtureLaw, LerchZipfLaw,
                               NegativeBinomialLaw, PoissonLaw, PoissonMixtureLaw,
                               PowerLawTailLaw, default_limit_law, in_pmf_exact,
                               limit_law_from_json, limit_pmf, moment_transfer_check,
                               out_pmf_exact, tail_asymptote, total_variation,
                               write_pmf_table)
from exchgraph.errors import ParameterError
from exchgraph.mixing import (DiracMixing, HierarchicalMixing, PowerLawMixing,
                              SeedCdfMixing, moment)
from exchgraph.seeds import (DiracSeed, ExponentialSeed, GammaSeed, LerchSeed,
                             PowerLawSeed)


class TestFrozenValues:
    def test_geometric_worked_example(self):
        # unit-rate exponential seed: p_k = 2**-(k+1)
        assert GeometricLaw(gamma=1.0).pmf(3) == pytest.approx(2.0 ** -4, rel=1e-14)

    def test_lerch_zipf_worked_example(self):
        # alpha=1, s=2: normalizer is zeta(2) = pi**2 / 6
        assert LerchZipfLaw(alpha=1.0, s=2.0).pmf(0) == pytest.approx(6.0 / math.pi ** 2,
                                                                      rel=1e-12)

    def test_tail_asymptote_value(self):
        assert tail_asymptote(2.0, 2.5, 10) == pytest.approx(2.0 ** 1.5 * 1.5 * 10 ** -2.5,
                                                             rel=1e-14)


class TestMixtureCrossChecks:
    """Each closed family equals the quadrature Poisson mixture of its seed."""

    KS = np.arange(0, 31)

    def _max_rel(self, closed, generic):
        a, b = closed.pmf(self.KS), generic.pmf(self.KS)
        return float(np.max(np.abs(a - b) / a))

    def test_geometric_is_exponential_mixture(self):
        err = self._max_rel(GeometricLaw(gamma=1.3),
                            PoissonMixtureLaw(seed=ExponentialSeed(gamma=1.3)))
        assert err < 1e-8

    def test_negative_binomial_is_gamma_mixture(self):
        err = self._max_rel(NegativeBinomialLaw(r=2.5, gamma=0.7),
                            PoissonMixtureLaw(seed=GammaSeed(r=2.5, gamma=0.7)))
        assert err < 1e-8

    def test_power_tail_is_power_seed_mixture(self):
        err = self._max_rel(PowerLawTailLaw(alpha=1.0, beta=3.0),
                            PoissonMixtureLaw(seed=PowerLawSeed(alpha=1.0, beta=3.0)))
        assert err < 1e-8

    def test_lerch_zipf_is_lerch_mixture(self):
        err = self._max_rel(LerchZipfLaw(alpha=1.5, s=2.5),
                            PoissonMixtureLaw(seed=LerchSeed(alpha=1.5, s=2.5)))
        assert err < 1e-7

    def test_dirac_mixture_is_poisson(self):
        err = self._max_rel(PoissonLaw(lam=2.0),
                            PoissonMixtureLaw(seed=DiracSeed(t0=2.0)))
        assert err < 1e-14


class TestPowerLawTail:
    LAW = PowerLawTailLaw(alpha=1.0, beta=3.0)

    def test_recurrence_matches_direct_quadrature(self):
        ks = np.array([0, 1, 2, 5, 17, 60, 143, 300])
        by_range = self.LAW.log_pmf_range(300)[ks]
        assert_allclose(by_range, self.LAW.log_pmf(ks), rtol=0, atol=1e-9)

    def test_normalizes(self):
        assert np.exp(self.LAW.log_pmf_range(3000)).sum() == pytest.approx(1.0, abs=1e-6)

    def test_asymptote_within_five_percent_at_k200(self):
        ratio = self.LAW.pmf(200) / tail_asymptote(1.0, 3.0, 200)
        assert abs(ratio - 1.0) < 0.05

    def test_noninteger_tail_exponent(self):
        law = PowerLawTailLaw(alpha=0.5, beta=2.3)
        assert np.exp(law.log_pmf_range(20000)).sum() == pytest.approx(1.0, abs=1e-4)


class TestHierarchicalMixtureLaw:
    LAW = HierarchicalMixtureLaw(A=1.0, beta=3.0, gamma_exp=4.5)

    def test_matches_outer_quadrature(self):
        # oracle: integrate the conditional pmf against the cutoff density
        A, b, g = 1.0, 3.0, 4.5
        for k in range(10):
            want = checked_quad(
                lambda a: PowerLawTailLaw(alpha=a, beta=b).pmf(k)
                * (g - 1.0) * A ** (g - 1.0) * a ** (-g),
                A, np.inf, rel_tol=1e-9)
            assert self.LAW.pmf(k) == pytest.approx(want, rel=1e-7)

    def test_normalizes_and_positive(self):
        p = self.LAW.pmf_range(2000)
        assert np.all(p > 0)
        assert p.sum() == pytest.approx(1.0, abs=1e-5)

    def test_exponent_ordering_enforced(self):
        with pytest.raises(ParameterError):
            HierarchicalMixtureLaw(A=1.0, beta=2.0, gamma_exp=3.0)


class TestExactFiniteN:
    def test_out_pmf_sums_to_one(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        p = out_pmf_exact(spec, 12, np.arange(13))
        assert p.sum() == pytest.approx(1.0, rel=1e-9)

    def test_out_pmf_dirac_is_binomial(self):
        spec = DiracMixing(lam=2.0)
        ks = np.arange(0, 11)
        assert_allclose(out_pmf_exact(spec, 10, ks), stats.binom.pmf(ks, 10, 0.2), rtol=1e-10)

    def test_in_pmf_is_binomial_in_mean_rate(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        mu = moment(spec, 50, 1)
        ks = np.arange(0, 31)
        assert_allclose(in_pmf_exact(spec, 50, 30, ks), stats.binom.pmf(ks, 30, mu), rtol=1e-10)

    def test_out_degree_tv_convergence(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        lim = PowerLawTailLaw(alpha=1.0, beta=3.0)
        ks = np.arange(0, 101)
        tv_small = total_variation(out_pmf_exact(spec, 200, ks), lim.pmf(ks))
        tv_big = total_variation(out_pmf_exact(spec, 10_000, ks), lim.pmf(ks))
        assert tv_big < tv_small
        assert tv_big < 0.01

    def test_in_degree_tv_convergence(self):
        spec = DiracMixing(lam=2.0)
        ks = np.arange(0, 41)
        tv = total_variation(in_pmf_exact(spec, 10_000, 10_000, ks), PoissonLaw(lam=2.0).pmf(ks))
        assert tv < 0.005

    def test_degree_bounds_checked(self):
        spec = DiracMixing(lam=1.0)
        with pytest.raises(ParameterError):
            out_pmf_exact(spec, 5, 6)
        with pytest.raises(ParameterError):
            in_pmf_exact(spec, 5, 3, 4)
        with pytest.raises(ParameterError):
            out_pmf_exact(spec, 5, -1)
        with pytest.raises(ParameterError):
            out_pmf_exact(spec, 5, 2.5)


class TestMomentTransfer:
    def test_poisson_partial_sums_hit_known_moments(self):
        rep = moment_transfer_check(PoissonLaw(lam=2.0), 2.0, k_cap=1000)
        # sum k**2 p_k = lam + lam**2; integral t**2 dF = lam**2
        assert rep.pmf_partial == pytest.approx(2.0 + 4.0, rel=1e-8)
        assert rep.mixing_partial == pytest.approx(4.0, rel=1e-8)
        assert rep.agree and rep.both_finite_verdict

    def test_first_moments_agree_in_value(self):
        rep = moment_transfer_check(GeometricLaw(gamma=1.0), 1.0, k_cap=2000)
        assert rep.pmf_partial == pytest.approx(1.0, rel=1e-6)
        assert rep.mixing_partial == pytest.approx(1.0, rel=1e-6)
        assert rep.both_finite_verdict

    def test_heavy_tail_moment_blows_up_on_both_routes(self):
        law = PowerLawTailLaw(alpha=1.0, beta=3.0)
        rep = moment_transfer_check(law, 2.0, k_cap=20_000)
        assert not rep.pmf_stabilized and not rep.mixing_stabilized
        assert rep.agree and not rep.both_finite_verdict

    def test_heavy_tail_low_moment_stabilizes(self):
        law = PowerLawTailLaw(alpha=1.0, beta=4.0)
        rep = moment_transfer_check(law, 1.0, k_cap=20_000)
        assert rep.pmf_stabilized and rep.mixing_stabilized
        # both routes converge to the seed mean 3/2
        assert rep.pmf_partial == pytest.approx(1.5, rel=1e-4)
        assert rep.mixing_partial == pytest.approx(1.5, rel=1e-4)

    def test_requires_positive_order(self):
        with pytest.raises(ParameterError):
            moment_transfer_check(PoissonLaw(lam=1.0), 0.0)


class TestDefaultLimitLaw:
    def test_mappings(self):
        assert default_limit_law(DiracMixing(lam=2.0)) == PoissonLaw(lam=2.0)
        assert default_limit_law(PowerLawMixing(alpha=1.0, beta=3.0)) == \
            PowerLawTailLaw(alpha=1.0, beta=3.0)
        assert default_limit_law(SeedCdfMixing(seed=ExponentialSeed(gamma=1.3))) == \
            GeometricLaw(gamma=1.3)
        assert default_limit_law(SeedCdfMixing(seed=GammaSeed(r=2.0, gamma=1.0))) == \
            NegativeBinomialLaw(r=2.0, gamma=1.0)
        assert default_limit_law(SeedCdfMixing(seed=LerchSeed(alpha=1.5, s=2.5))) == \
            LerchZipfLaw(alpha=1.5, s=2.5)
        assert default_limit_law(HierarchicalMixing(A=1.0, beta=3.0, gamma_exp=4.5)) == \
            HierarchicalMixtureLaw(A=1.0, beta=3.0, gamma_exp=4.5)


@pytest.mark.parametrize("law", [
    PoissonLaw(lam=2.0),
    PoissonMixtureLaw(seed=ExponentialSeed(gamma=1.0)),
    GeometricLaw(gamma=1.3),
    NegativeBinomialLaw(r=2.0, gamma=0.5),
    PowerLawTailLaw(alpha=1.0, beta=3.0),
    LerchZipfLaw(alpha=1.5, s=2.5),
    HierarchicalMixtureLaw(A=1.0, beta=3.0, gamma_exp=4.5),
])
def test_limit_law_json_round_trip(law):
    assert limit_law_from_json(law.to_json()) == law
    assert limit_pmf(limit_law_from_json(law.to_json()), 2) == pytest.approx(law.pmf(2))


def test_pmf_table_format(tmp_path):
    path = tmp_path / "t.csv"
    write_pmf_table(path, [0, 1], [0.5, 0.25], [0.5, 0.2])
    lines = path.read_text().splitlines()
    assert lines[0] == "k,exact,limit,abs_diff"
    assert lines[1].startswith("0,0.5,0.5,")
    k, e, l, d = lines[2].split(",")
    assert float(d) == pytest.approx(0.05)
