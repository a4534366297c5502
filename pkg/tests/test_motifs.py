"""Pattern counts and their exact moments.

The mean and variance formulas are pinned by full weighted enumeration:
at n = 3 and n = 4 every adjacency matrix is listed and weighted by the
product of its row-sum probabilities, which is the exact law of the
ensemble.  Counting code is pinned separately by brute-force loops over
vertex tuples.
"""

import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from exchgraph.ensemble import EnsembleConfig, ExplicitRows
from exchgraph.errors import EnumerationBudgetError, ParameterError
from exchgraph.mixing import DiracMixing, PowerLawMixing, log_row_prob, moment
from exchgraph.motifs import (SubgraphPattern, connectivity_bound, count_cycles,
                              count_feedback_loops, count_feedforward_loops,
                              count_isolated, count_leaves, count_roots,
                              count_subgraph, mc_cycles, mc_motifs, mc_roots_leaves,
                              mean_cycles, mean_feedback_loops, mean_feedforward_loops,
                              mean_leaves, mean_roots, mean_subgraph,
                              var_feedback_loops, var_feedforward_loops,
                              weak_components)


def random_adjacency(rng, n, p=0.35, self_loops=True):
    a = rng.random((n, n)) < p
    if self_loops:
        np.fill_diagonal(a, rng.random(n) < 0.5)
    return a


def enumerate_square(spec, n, stat):
    """E[stat] and E[stat^2] over every n x n matrix, exactly weighted."""
    rp = [math.exp(log_row_prob(spec, n, r)) for r in range(n + 1)]
    total = total_sq = 0.0
    for gid in range(2 ** (n * n)):
        bits = [(gid >> b) & 1 for b in range(n * n)]
        a = np.array(bits, dtype=bool).reshape(n, n)
        w = math.prod(rp[int(a[i].sum())] for i in range(n))
        v = stat(a)
        total += w * v
        total_sq += w * v * v
    return total, total_sq


class TestCounting:
    def test_triple_counts_match_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(4):
            a = random_adjacency(rng, 8)
            fbl = ffl = 0
            for i, j, k in itertools.permutations(range(8), 3):
                if i < min(j, k) and a[i, j] and a[j, k] and a[k, i]:
                    fbl += 1
                if a[i, j] and a[j, k] and a[i, k]:
                    ffl += 1
            assert count_feedback_loops(a) == fbl
            assert count_feedforward_loops(a) == ffl
            assert count_cycles(a, 3) == fbl

    def test_self_loops_never_counted(self):
        a = np.eye(5, dtype=bool)
        assert count_feedback_loops(a) == 0
        assert count_feedforward_loops(a) == 0
        assert count_cycles(a, 2) == 0

    @pytest.mark.parametrize("k", [2, 4, 5])
    def test_cycles_match_brute_force(self, k):
        rng = np.random.default_rng(k)
        a = random_adjacency(rng, 8)
        brute = 0
        for tup in itertools.permutations(range(8), k):
            if tup[0] == min(tup) and all(a[tup[t], tup[(t + 1) % k]] for t in range(k)):
                brute += 1
        assert count_cycles(a, k) == brute

    def test_cycle_budget_enforced(self):
        a = np.ones((12, 12), dtype=bool)
        with pytest.raises(EnumerationBudgetError):
            count_cycles(a, 6, budget=1000)

    def test_rejects_non_square(self):
        with pytest.raises(ParameterError):
            count_feedback_loops(np.zeros((3, 4), dtype=bool))


class TestSubgraphPattern:
    def test_parse_and_symmetry(self):
        ffl = SubgraphPattern.parse("0>1,1>2,0>2")
        assert ffl.k == 3 and ffl.aut_size == 1
        assert ffl.out_degrees() == [2, 1, 0]
        cyc = SubgraphPattern.parse("0>1,1>2,2>0")
        assert cyc.aut_size == 3
        two = SubgraphPattern.parse("0>1,1>0")
        assert two.aut_size == 2

    @pytest.mark.parametrize("bad", ["0>0", "0>1,0>1", "1>2", "0>", "a>b", ""])
    def test_parse_rejects(self, bad):
        with pytest.raises(ParameterError):
            SubgraphPattern.parse(bad)

    def test_count_agrees_with_specialized_counters(self):
        rng = np.random.default_rng(4)
        a = random_adjacency(rng, 7)
        assert count_subgraph(a, SubgraphPattern.parse("0>1,1>2,0>2")) == \
            count_feedforward_loops(a)
        assert count_subgraph(a, SubgraphPattern.parse("0>1,1>2,2>0")) == \
            count_feedback_loops(a)
        assert count_subgraph(a, SubgraphPattern.parse("0>1,1>0")) == count_cycles(a, 2)

    def test_two_path_count_brute_force(self):
        rng = np.random.default_rng(11)
        a = random_adjacency(rng, 7)
        az = a.copy()
        np.fill_diagonal(az, False)
        brute = sum(1 for i, j, k in itertools.permutations(range(7), 3)
                    if az[i, j] and az[j, k])
        assert count_subgraph(a, SubgraphPattern.parse("0>1,1>2")) == brute

    def test_budget_enforced(self):
        a = np.ones((30, 30), dtype=bool)
        with pytest.raises(EnumerationBudgetError):
            count_subgraph(a, SubgraphPattern.parse("0>1,1>2"), budget=100)


SPECS_SMALL = [
    (DiracMixing(lam=1.0), 3),
    (PowerLawMixing(alpha=1.0, beta=3.0), 3),
    (DiracMixing(lam=1.2), 4),
    (PowerLawMixing(alpha=1.0, beta=2.6), 4),
]


class TestExactMoments:
    @pytest.mark.parametrize("spec,n", SPECS_SMALL)
    def test_feedback_mean_and_variance_exhaustive(self, spec, n):
        e1, e2 = enumerate_square(spec, n, count_feedback_loops)
        assert_allclose(mean_feedback_loops(spec, n), e1, rtol=1e-10)
        assert_allclose(var_feedback_loops(spec, n), e2 - e1 * e1, rtol=1e-10)

    @pytest.mark.parametrize("spec,n", SPECS_SMALL)
    def test_feedforward_mean_and_variance_exhaustive(self, spec, n):
        e1, e2 = enumerate_square(spec, n, count_feedforward_loops)
        assert_allclose(mean_feedforward_loops(spec, n), e1, rtol=1e-10)
        assert_allclose(var_feedforward_loops(spec, n), e2 - e1 * e1, rtol=1e-10)

    def test_two_cycle_mean_exhaustive(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        e1, _ = enumerate_square(spec, 3, lambda a: count_cycles(a, 2))
        assert_allclose(mean_cycles(spec, 3, 2), e1, rtol=1e-10)

    def test_cycle_mean_closed_form(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        mu = moment(spec, 20, 1)
        assert_allclose(mean_cycles(spec, 20, 5),
                        math.factorial(4) * math.comb(20, 5) * mu ** 5, rtol=1e-12)

    def test_feedback_variance_matches_explicit_polynomial(self):
        # independent transcription of the overlap-class expansion
        spec, n = PowerLawMixing(alpha=1.0, beta=2.6), 30
        mu, d2 = moment(spec, n, 1), moment(spec, n, 2)
        c3 = math.comb(n, 3)
        r_n = c3 - math.comb(n - 3, 3)
        want = (2 * c3 * (mu ** 3 + d2 ** 3)
                + 6 * (n - 3) * c3 * (mu ** 3 * d2 + mu ** 2 * d2 ** 2)
                + 12 * c3 * math.comb(n - 3, 2) * mu ** 4 * d2
                - 4 * c3 * r_n * mu ** 6)
        assert_allclose(var_feedback_loops(spec, n), want, rtol=1e-12)

    def test_subgraph_mean_exhaustive(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        pat = SubgraphPattern.parse("0>1,1>2")
        e1, _ = enumerate_square(spec, 3, lambda a: count_subgraph(a, pat))
        assert_allclose(mean_subgraph(spec, 3, pat), e1, rtol=1e-10)

    def test_shared_bias_mean_uses_joint_moment(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        n = 6
        d3 = moment(spec, n, 3)
        assert_allclose(mean_feedback_loops(spec, n, "completely_exchangeable"),
                        2 * math.comb(n, 3) * d3, rtol=1e-12)

    def test_two_level_variant_rejected(self):
        with pytest.raises(ParameterError):
            mean_feedback_loops(PowerLawMixing(alpha=1.0, beta=3.0), 10, "hierarchical")


class TestRootsLeaves:
    def test_counts_on_handmade_matrix(self):
        # node 0 -> 1, node 2 empty column and row
        a = np.zeros((3, 3), dtype=bool)
        a[0, 1] = True
        assert count_roots(a) == 1   # node 0: empty column, sends an edge
        assert count_leaves(a) == 1  # node 1: empty row, receives an edge
        assert count_isolated(a) == 1

    def test_self_loop_blocks_root(self):
        a = np.zeros((2, 2), dtype=bool)
        a[0, 0] = True
        a[0, 1] = True
        assert count_roots(a) == 0  # own column hit by the self-edge
        assert count_leaves(a) == 1

    @pytest.mark.parametrize("spec", [DiracMixing(lam=0.8),
                                      PowerLawMixing(alpha=0.5, beta=3.0)])
    def test_means_exhaustive_square(self, spec):
        rp = [math.exp(log_row_prob(spec, 2, r)) for r in range(3)]
        er = el = 0.0
        for gid in range(16):
            bits = [(gid >> b) & 1 for b in range(4)]
            a = np.array(bits, dtype=bool).reshape(2, 2)
            w = rp[int(a[0].sum())] * rp[int(a[1].sum())]
            er += w * count_roots(a)
            el += w * count_leaves(a)
        assert_allclose(mean_roots(spec, 2, 2), er, rtol=1e-10)
        assert_allclose(mean_leaves(spec, 2, 2), el, rtol=1e-10)

    def test_means_exhaustive_rectangular(self):
        spec, n, m = PowerLawMixing(alpha=0.5, beta=3.0), 3, 2
        rp = [math.exp(log_row_prob(spec, n, r)) for r in range(n + 1)]
        er = el = 0.0
        for gid in range(2 ** (m * n)):
            bits = [(gid >> b) & 1 for b in range(m * n)]
            a = np.array(bits, dtype=bool).reshape(m, n)
            w = math.prod(rp[int(a[i].sum())] for i in range(m))
            er += w * count_roots(a)
            el += w * count_leaves(a)
        assert_allclose(mean_roots(spec, n, m), er, rtol=1e-10)
        assert_allclose(mean_leaves(spec, n, m), el, rtol=1e-10)

    def test_single_sender_has_no_leaves(self):
        assert mean_leaves(DiracMixing(lam=1.0), 10, 1) == 0.0


class TestComponents:
    def test_component_count(self):
        a = np.zeros((5, 5), dtype=bool)
        a[0, 1] = True
        a[3, 3] = True  # self loop joins nothing
        assert weak_components(a) == 4
        assert count_isolated(a) == 2  # nodes 2 and 4

    def test_connectivity_bound_in_unit_interval(self):
        spec = PowerLawMixing(alpha=1.0, beta=3.0)
        for n in (10, 50, 200):
            b = connectivity_bound(spec, n)
            assert 0.0 <= b <= 1.0

    def test_connectivity_bound_tracks_simulation(self):
        spec = DiracMixing(lam=4.0)
        n = 40
        bound = connectivity_bound(spec, n)
        rng = np.random.default_rng(17)
        hits = 0
        reps = 300
        for _ in range(reps):
            a = rng.random((n, n)) < 4.0 / n
            hits += weak_components(a) == 1
        frac = hits / reps
        se = math.sqrt(frac * (1 - frac) / reps)
        assert frac <= bound + 4 * se + 1e-9


class TestMonteCarlo:
    SPEC = PowerLawMixing(alpha=1.0, beta=3.0)

    def test_triple_means_within_four_se(self):
        cfg = EnsembleConfig(n=30, mixing=self.SPEC, master_seed=5)
        rep = mc_motifs(cfg, 4000)
        assert abs(rep.fbl_mean - mean_feedback_loops(self.SPEC, 30)) < 4 * rep.fbl_se
        assert abs(rep.ffl_mean - mean_feedforward_loops(self.SPEC, 30)) < 4 * rep.ffl_se

    def test_deterministic_for_fixed_seed(self):
        cfg = EnsembleConfig(n=20, mixing=self.SPEC, master_seed=5)
        a = mc_motifs(cfg, 500)
        b = mc_motifs(cfg, 500)
        assert a == b

    def test_cycle_means_within_four_se(self):
        cfg = EnsembleConfig(n=30, mixing=self.SPEC, master_seed=5)
        out = mc_cycles(cfg, (2, 4), 2000)
        for k, (mean, se) in out.items():
            assert abs(mean - mean_cycles(self.SPEC, 30, k)) < 4 * se

    def test_roots_leaves_within_four_se(self):
        cfg = EnsembleConfig(n=200, mixing=self.SPEC, row_rule=ExplicitRows(m=100),
                             master_seed=6)
        rep = mc_roots_leaves(cfg, 3000)
        assert abs(rep.roots_mean - mean_roots(self.SPEC, 200, 100)) < 4 * rep.roots_se
        assert abs(rep.leaves_mean - mean_leaves(self.SPEC, 200, 100)) < 4 * rep.leaves_se

    def test_requires_square_for_triples(self):
        cfg = EnsembleConfig(n=30, mixing=self.SPEC, row_rule=ExplicitRows(m=10),
                             master_seed=5)
        with pytest.raises(ParameterError):
            mc_motifs(cfg, 10)
