import math
import random
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dyadosc as d
from dyadosc.dyadic import DyadicInterval as DI

mp.mp.dps = 40


def phi_highprec(eta) -> float:
    e = mp.mpf(eta)
    v = (1 + e) / 2 * mp.log(2 / (1 + e), 2) + (1 - e) / 2 * mp.log(2 / (1 - e), 2)
    return float(v)


class TestEntropyPhi:
    def test_endpoint_limits(self):
        assert d.entropy_phi(1e-12) == pytest.approx(1.0, abs=1e-9)
        assert d.entropy_phi(1.0 - 1e-12) == pytest.approx(0.0, abs=1e-9)
        assert d.entropy_phi(0.0) == 1.0
        assert d.entropy_phi(1.0) == 0.0

    def test_half_against_high_precision(self):
        assert d.entropy_phi(0.5) == pytest.approx(2.0 - 0.75 * math.log2(3.0),
                                                   abs=1e-12)
        assert d.entropy_phi(0.5) == pytest.approx(phi_highprec("0.5"), abs=1e-12)

    def test_cross_identity_on_grid(self):
        # Phi(eta) = 1 - [(1+eta)/2 log2(1+eta) + (1-eta)/2 log2(1-eta)]
        for eta in np.linspace(1e-3, 1.0 - 1e-3, 1000):
            other = 1.0 - ((1 + eta) / 2 * math.log2(1 + eta)
                           + (1 - eta) / 2 * math.log2(1 - eta))
            assert abs(d.entropy_phi(eta) - other) < 1e-12

    def test_strictly_decreasing_and_concave(self):
        grid = np.linspace(0.01, 0.99, 200)
        vals = np.array([d.entropy_phi(e) for e in grid])
        assert np.all(np.diff(vals) < 0)
        assert np.all(np.diff(vals, 2) < 0)

    def test_domain(self):
        with pytest.raises(d.DomainError):
            d.entropy_phi(1.5)


class TestProductLowerBound:
    def test_extremal_equality_exact(self):
        xs = d.extremal_configuration(4, Fraction(1, 2))
        prod = d.product_lower_bound_exact(xs, Fraction(1, 2))
        assert prod == Fraction(27, 256)
        assert prod == d.extremal_bound_exact(4, Fraction(1, 2))

    @pytest.mark.parametrize("n,eta", [(8, Fraction(1, 2)), (10, Fraction(3, 5)),
                                       (12, Fraction(1, 2))])
    def test_extremal_equality_family(self, n, eta):
        if (Fraction(n) * (1 + eta) / 2).denominator != 1:
            pytest.skip("threshold not integral")
        xs = d.extremal_configuration(n, eta)
        prod = d.product_lower_bound_exact(xs, eta)
        assert prod == d.extremal_bound_exact(n, eta)
        # and the float sides agree to 1e-12
        res = d.product_lower_bound([float(x) for x in xs], float(eta))
        assert res.product == pytest.approx(res.bound, rel=1e-12)

    def test_all_ones(self):
        res = d.product_lower_bound([1.0] * 9, 0.37)
        assert res.hypothesis_holds
        assert res.product == pytest.approx(((1 + 0.37) / 2) ** 9, rel=1e-12)
        assert res.product >= res.bound

    def test_hypothesis_not_satisfied_is_reported(self):
        res = d.product_lower_bound([-1.0, -1.0], 0.5)
        assert not res.hypothesis_holds
        assert res.satisfied is None

    @given(st.integers(1, 20), st.floats(0.05, 0.95),
           st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=20),
           st.floats(0.0, 1.0))
    @settings(max_examples=300, deadline=None)
    def test_random_feasible_instances(self, n, eta, base, blend):
        xs = (base * (n // len(base) + 1))[:n]
        # blend toward all-ones until the hypothesis holds
        s = sum(xs)
        target = eta * n
        if s < target:
            lam = (n - target) / (n - s)
            xs = [1.0 - lam * (1.0 - x) for x in xs]
        res = d.product_lower_bound(xs, eta)
        if res.hypothesis_holds:
            assert res.log2_margin >= -1e-9

    def test_domain_violation(self):
        with pytest.raises(d.DomainError):
            d.product_lower_bound([1.5], 0.5)


class TestMassMeasure:
    def test_uniform_for_zero_martingale(self):
        mm = d.mass_measure(d.zero_martingale(), 0.7)
        for n in range(6):
            for j in range(1 << n):
                assert mm.mass_exact(DI(n, j)) == Fraction(1, 1 << n)

    def test_binary_closed_form(self):
        eta = Fraction(1, 2)
        mm = d.mass_measure(d.binary_digit_martingale(), float(eta))
        for n in range(9):
            for j in range(1 << n):
                k = bin(j).count("1")
                expect = ((1 + eta) / 2) ** k * ((1 - eta) / 2) ** (n - k)
                assert mm.mass_exact(DI(n, j)) == expect

    def test_additivity_and_total_mass(self):
        mm = d.mass_measure(d.RandomSignMartingale(3), 0.5)
        for n in range(7):
            total = sum(mm.mass_exact(DI(n, j)) for j in range(1 << n))
            assert total == 1
            for j in range(1 << n):
                kids = (mm.mass_exact(DI(n + 1, 2 * j))
                        + mm.mass_exact(DI(n + 1, 2 * j + 1)))
                assert kids == mm.mass_exact(DI(n, j))

    def test_star_bound_precondition(self):
        big = d.Martingale(lambda child: 2.0 if child.index % 2 == 0 else -2.0,
                           star_bound=2.0)
        with pytest.raises(d.DomainError):
            d.mass_measure(big, 0.5)


class TestMassSweep:
    def test_binary_depth16(self):
        rep = d.sweep_mass_distribution(d.binary_digit_martingale(), 0.5, 16)
        assert rep.ok(1e-9)
        assert rep.members > 0

    def test_zero_martingale_root_only(self):
        rep = d.sweep_mass_distribution(d.zero_martingale(), 0.5, 8)
        assert rep.members == 1
        assert rep.worst_member == d.unit_interval()
        assert rep.worst_log2_margin == 0.0

    def test_alternating_adversary_matches_hand_enumeration(self):
        # jumps +1/-1 with the favored side alternating by level
        def inc(child):
            fav = 0 if child.level % 2 == 1 else 1
            return 1.0 if (child.index & 1) == fav else -1.0

        S = d.Martingale(inc, star_bound=1.0, name="alternating")
        eta = 0.5
        rep = d.sweep_mass_distribution(S, eta, 6)
        # independent brute enumeration of the threshold family
        members = 1  # root
        for n in range(1, 7):
            for j in range(1 << n):
                val = sum(inc(DI(k, j >> (n - k))) for k in range(1, n + 1))
                if val >= eta * n - 1e-12:
                    members += 1
        assert rep.members == members
        assert rep.ok(1e-9)

    def test_block_discounted(self, block_schedule_half):
        B = d.BlockMartingale(block_schedule_half)
        S = d.Martingale(lambda ch: math.pow(2.0, -ch.level * 0.5) * B.increment(ch),
                         star_bound=0.5, name="block-discounted")
        rep = d.sweep_mass_distribution(S, 0.25, 14)
        assert rep.ok(1e-9)
        assert rep.increments_paired and rep.level_sums_exact


class TestCoveringContent:
    def test_full_partition_content_one(self):
        fam = [DI(6, j) for j in range(64)]
        assert d.covering_content(fam, 1.0, 0.5) == pytest.approx(1.0)

    def test_small_exponent(self):
        fam = [DI(5, j) for j in range(32)]
        assert d.covering_content(fam, 0.5, 1.0) == pytest.approx(2 ** (5 * 0.5))

    def test_maximal_selection(self):
        fam = [DI(2, 1), DI(3, 2), DI(3, 3), DI(4, 5)]
        # the level-3 members and [5/16, 6/16) all sit inside [1/4, 1/2)
        assert d.covering_content(fam, 1.0, 0.5) == pytest.approx(0.25)

    def test_level_set_content_bounded_by_total_mass(self):
        S = d.binary_digit_martingale()
        eta = 0.5
        fam = d.level_set_family(S, eta, 14)
        content = d.covering_content(fam, d.entropy_phi(eta), 1.0)
        assert content <= 1.0 + 1e-9


class TestBesicovitch:
    def test_count_20(self):
        assert d.besicovitch_count(20, Fraction(1, 2)) == 21700

    def test_count_4(self):
        assert d.besicovitch_count(4, Fraction(1, 2)) == 5

    def test_threshold_at_top(self):
        for N in (5, 9, 16):
            eta = Fraction(N - 1, N)  # forces k >= N
            assert d.besicovitch_count(N, eta) == 1

    @pytest.mark.parametrize("eta", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    def test_brute_force_agreement(self, eta):
        for N in (10, 17, 20):
            assert (d.besicovitch_count(N, eta)
                    == d.besicovitch_count_bruteforce(N, eta))

    def test_caps(self):
        with pytest.raises(d.DomainError):
            d.besicovitch_count(20_000, Fraction(1, 2))


class TestDimEstimate:
    def test_single_values(self):
        assert d.dim_estimate([(20, 21700)])[0] == pytest.approx(0.7203, abs=5e-5)
        assert d.dim_estimate([(12, 1 << 12)])[0] == 1.0

    def test_monotone_toward_phi(self):
        eta = Fraction(1, 2)
        counts = [(N, d.besicovitch_count(N, eta)) for N in (20, 100, 500, 2000)]
        ests = d.dim_estimate(counts)
        assert all(a < b for a, b in zip(ests, ests[1:]))
        assert ests[-1] == pytest.approx(d.entropy_phi(0.5), abs=0.02)

    def test_huge_counts_log(self):
        c = d.besicovitch_count(2000, Fraction(1, 2))
        est = d.dim_estimate([(2000, c)])[0]
        assert 0.80 < est < d.entropy_phi(0.5)
