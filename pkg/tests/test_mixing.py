"""Mixing-law moments, tails, row polynomials, and samplers."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from exchgraph._numerics import checked_quad, spawn_rng
from exchgraph.errors import ParameterError
from exchgraph.mixing import (DiracMixing, HierarchicalMixing, ModulatedPowerLawMixing,
                              PowerLawMixing, SeedCdfMixing, implied_seed, log_row_prob,
                              mixing_from_json, moment, sample_thetas, tail, xi)
from exchgraph.seeds import DiracSeed, ExponentialSeed, PowerLawSeed


def brute_moment(spec, n, i):
    """Quadrature oracle straight from the density definition."""
    if isinstance(spec, PowerLawMixing):
        a, b = spec.alpha / n, 1.0
        w = lambda t: t ** (-spec.beta)
    elif isinstance(spec, ModulatedPowerLawMixing):
        a, b = spec.alpha / n, 1.0
        w = lambda t: spec.modulation(n * t) * t ** (-spec.beta)
    else:
        raise AssertionError
    z = checked_quad(w, a, b, rel_tol=1e-11)
    return checked_quad(lambda t: t ** i * w(t), a, b, rel_tol=1e-11) / z


class TestPowerLaw:
    def test_first_moment_closed_value(self):
        # alpha=1, beta=3, n=10: ratio of two power integrals on (0.1, 1]
        assert_allclose(moment(PowerLawMixing(alpha=1.0, beta=3.0), 10, 1),
                        2.0 * 9.0 / 99.0, rtol=1e-13)

    def test_tail_closed_value(self):
        assert_allclose(tail(PowerLawMixing(alpha=1.0, beta=3.0), 10, 0.5),
                        3.0 / 99.0, rtol=1e-13)

    @pytest.mark.parametrize("i", [1, 2, 3, 5])
    def test_moments_match_quadrature(self, i):
        spec = PowerLawMixing(alpha=0.7, beta=2.4)
        assert_allclose(moment(spec, 50, i), brute_moment(spec, 50, i), rtol=1e-9)

    def test_moment_zero_is_one(self):
        assert moment(PowerLawMixing(alpha=1.0, beta=3.0), 10, 0) == 1.0

    def test_tail_endpoints(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        assert tail(spec, 10, 0.0) == 1.0
        assert tail(spec, 10, 1.0) == 0.0

    def test_sampler_matches_moments(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        rng = spawn_rng(99, 0)
        draws = sample_thetas(spec, 60, rng, 200_000)
        assert draws.min() >= 1.0 / 60 and draws.max() <= 1.0
        mu = moment(spec, 60, 1)
        sd = math.sqrt(moment(spec, 60, 2) - mu * mu)
        assert abs(draws.mean() - mu) < 5 * sd / math.sqrt(len(draws))

    def test_rejects_bad_parameters(self):
        with pytest.raises(ParameterError):
            PowerLawMixing(alpha=1.0, beta=1.0)
        with pytest.raises(ParameterError):
            PowerLawMixing(alpha=0.0, beta=3.0)
        with pytest.raises(ParameterError):
            moment(PowerLawMixing(alpha=30.0, beta=3.0), 10, 1)  # needs n > alpha


class TestDirac:
    def test_moments_and_tail(self):
        spec = DiracMixing(lam=2.0)
        assert moment(spec, 10, 3) == pytest.approx(0.2 ** 3, rel=1e-15)
        assert tail(spec, 10, 0.1) == 1.0
        assert tail(spec, 10, 0.2) == 0.0
        assert tail(spec, 10, 0.3) == 0.0

    def test_row_polynomial_is_binomial_term(self):
        spec = DiracMixing(lam=2.0)
        p = 0.2
        assert_allclose(math.exp(log_row_prob(spec, 10, 3)), p ** 3 * (1 - p) ** 7, rtol=1e-13)

    def test_zero_rate_allowed(self):
        spec = DiracMixing(lam=0.0)
        assert moment(spec, 10, 1) == 0.0
        rng = spawn_rng(1, 0)
        assert np.all(sample_thetas(spec, 10, rng, 100) == 0.0)

    def test_rate_cannot_exceed_n(self):
        with pytest.raises(ParameterError):
            moment(DiracMixing(lam=11.0), 10, 1)


class TestSymmetryTransform:
    """xi_n(i) = E (1 - 2 theta)**i in both evaluation regimes."""

    def test_small_order_identity(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        d1, d2 = moment(spec, 10, 1), moment(spec, 10, 2)
        assert_allclose(xi(spec, 10, 2), 1.0 - 4.0 * d1 + 4.0 * d2, rtol=1e-12)

    @pytest.mark.parametrize("i", [11, 12, 25])
    def test_split_route_matches_quadrature(self, i):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        n = 10
        w = lambda t: t ** (-3.0)
        z = checked_quad(w, 0.1, 1.0, rel_tol=1e-12)
        want = checked_quad(lambda t: (1 - 2 * t) ** i * w(t), 0.1, 1.0,
                            points=[0.5], rel_tol=1e-10) / z
        assert_allclose(xi(spec, n, i), want, rtol=1e-9, atol=1e-15)

    def test_dirac_closed_form(self):
        assert_allclose(xi(DiracMixing(lam=3.0), 10, 7), (1 - 0.6) ** 7, rtol=1e-13)

    def test_order_zero(self):
        assert xi(PowerLawMixing(alpha=1.0, beta=3.0), 10, 0) == 1.0


@pytest.mark.parametrize("spec,n", [
    (PowerLawMixing(alpha=1.0, beta=3.0), 12),
    (DiracMixing(lam=1.5), 9),
    (SeedCdfMixing(seed=ExponentialSeed(gamma=1.0)), 15),
    (ModulatedPowerLawMixing(alpha=1.0, beta=2.5,
                             g_table=((0.0, 1.0), (2.0, 3.0), (5.0, 0.5), (50.0, 1.0))), 40),
])
def test_row_polynomial_normalizes(spec, n):
    total = sum(math.comb(n, r) * math.exp(log_row_prob(spec, n, r)) for r in range(n + 1))
    assert_allclose(total, 1.0, rtol=1e-8)


class TestModulated:
    SPEC = ModulatedPowerLawMixing(alpha=1.0, beta=2.5,
                                   g_table=((0.0, 1.0), (2.0, 3.0), (5.0, 0.5), (50.0, 1.0)))

    def test_bounds_from_table(self):
        assert self.SPEC.c1 == 0.5
        assert self.SPEC.c2 == 3.0

    @pytest.mark.parametrize("i", [0, 1, 2, 4])
    def test_moments_match_quadrature(self, i):
        assert_allclose(moment(self.SPEC, 40, i), brute_moment(self.SPEC, 40, i), rtol=1e-9)

    def test_tail_matches_quadrature(self):
        n, t0 = 40, 0.21
        w = lambda t: self.SPEC.modulation(n * t) * t ** (-2.5)
        z = checked_quad(w, 1.0 / n, 1.0, rel_tol=1e-11)
        want = checked_quad(w, t0, 1.0, rel_tol=1e-11) / z
        assert_allclose(tail(self.SPEC, n, t0), want, rtol=1e-9)

    def test_sampler_matches_mean(self):
        rng = spawn_rng(7, 0)
        draws = sample_thetas(self.SPEC, 40, rng, 150_000)
        mu = moment(self.SPEC, 40, 1)
        sd = math.sqrt(moment(self.SPEC, 40, 2) - mu * mu)
        assert abs(draws.mean() - mu) < 5 * sd / math.sqrt(len(draws))

    def test_table_validation(self):
        with pytest.raises(ParameterError):
            ModulatedPowerLawMixing(alpha=1.0, beta=2.5, g_table=((0.0, 1.0),))
        with pytest.raises(ParameterError):
            ModulatedPowerLawMixing(alpha=1.0, beta=2.5, g_table=((0.0, 1.0), (0.0, 2.0)))
        with pytest.raises(ParameterError):
            ModulatedPowerLawMixing(alpha=1.0, beta=2.5, g_table=((0.0, 1.0), (1.0, -2.0)))


class TestSeedCdfSlice:
    def test_cdf_restriction_tail(self):
        # F_n(x) = F(n x) / F(n): tail at x for the unit-rate exponential seed
        seed = ExponentialSeed(gamma=1.0)
        spec = SeedCdfMixing(seed=seed)
        n, x = 15, 0.3
        want = 1.0 - (-math.expm1(-n * x)) / (-math.expm1(-float(n)))
        assert_allclose(tail(spec, n, x), want, rtol=1e-9)

    def test_sampler_stays_in_slice(self):
        spec = SeedCdfMixing(seed=ExponentialSeed(gamma=2.0))
        rng = spawn_rng(3, 0)
        draws = sample_thetas(spec, 20, rng, 50_000)
        assert draws.min() > 0.0 and draws.max() <= 1.0
        assert_allclose(draws.mean(), moment(spec, 20, 1), rtol=0.02)

    def test_dirac_seed_point_mass(self):
        spec = SeedCdfMixing(seed=DiracSeed(t0=4.0))
        assert_allclose(moment(spec, 10, 1), 0.4, rtol=1e-12)
        assert tail(spec, 10, 0.3) == 1.0
        assert tail(spec, 10, 0.5) == 0.0


class TestHierarchical:
    SPEC = HierarchicalMixing(A=1.0, beta=3.0, gamma_exp=4.5)

    def test_moment_matches_two_level_quadrature(self):
        n = 30
        norm = checked_quad(lambda a: a ** -4.5, 1.0, 15.0, rel_tol=1e-11)

        def outer(i):
            def inner(a):
                return moment(PowerLawMixing(alpha=a, beta=3.0), n, i) * a ** -4.5
            return checked_quad(inner, 1.0, 15.0, rel_tol=1e-10) / norm

        for i in (1, 2):
            assert_allclose(moment(self.SPEC, n, i), outer(i), rtol=1e-8)

    def test_sampler_matches_mean(self):
        rng = spawn_rng(11, 0)
        draws = sample_thetas(self.SPEC, 30, rng, 200_000)
        mu = moment(self.SPEC, 30, 1)
        sd = math.sqrt(moment(self.SPEC, 30, 2) - mu * mu)
        assert abs(draws.mean() - mu) < 5 * sd / math.sqrt(len(draws))

    def test_exponent_ordering_enforced(self):
        with pytest.raises(ParameterError):
            HierarchicalMixing(A=1.0, beta=3.0, gamma_exp=3.0)
        with pytest.raises(ParameterError):
            HierarchicalMixing(A=1.0, beta=2.0, gamma_exp=4.0)

    def test_needs_room_for_cutoff(self):
        with pytest.raises(ParameterError):
            moment(HierarchicalMixing(A=5.0, beta=3.0, gamma_exp=4.0), 10, 1)


class TestImpliedSeed:
    def test_known_mappings(self):
        assert implied_seed(DiracMixing(lam=2.0)) == DiracSeed(t0=2.0)
        assert implied_seed(PowerLawMixing(alpha=1.0, beta=3.0)) == PowerLawSeed(alpha=1.0, beta=3.0)
        seed = ExponentialSeed(gamma=1.3)
        assert implied_seed(SeedCdfMixing(seed=seed)) == seed

    def test_zero_rate_has_no_seed(self):
        with pytest.raises(ParameterError):
            implied_seed(DiracMixing(lam=0.0))


@pytest.mark.parametrize("spec", [
    DiracMixing(lam=2.0),
    PowerLawMixing(alpha=1.0, beta=3.0),
    ModulatedPowerLawMixing(alpha=1.0, beta=2.5, g_table=((0.0, 1.0), (3.0, 2.0), (9.0, 1.0))),
    SeedCdfMixing(seed=ExponentialSeed(gamma=1.0)),
    HierarchicalMixing(A=1.0, beta=3.0, gamma_exp=4.5),
])
def test_json_round_trip(spec):
    assert mixing_from_json(spec.to_json()) == spec


def test_json_rejects_unknown_kind():
    with pytest.raises(ParameterError):
        mixing_from_json({"kind": "cauchy"})
