import math
from fractions import Fraction

import pytest

from sharpflat.padic import FormParams, PadicRing, QuadRing
from sharpflat.factor import (
    CharSpec,
    combine_pair,
    division_loss_digits,
    exact_combine_pair,
    factor_pair,
    growth_order,
    random_bounded,
    verify_pair,
)
from sharpflat.logmatrix import logmatrix_level, logmatrix_to_degree
from sharpflat.series import (
    Series1,
    extend,
    lift_to_quad,
    log1p_over_x,
    mul_trunc,
    one_series,
    reduce_mod_cyclo,
    series_min_abs_tv,
    zero_series,
)

FP33 = FormParams(3, 3, 1)
FP30 = FormParams(3, 0, 1)
FP55 = FormParams(5, 5, 1)
FP50 = FormParams(5, 0, 1)


def bounded(fp, d, seed, rel=60):
    return lift_to_quad(random_bounded(fp.p, d, seed, rel), QuadRing(fp, rel))


class TestCharSpec:
    def test_exponent(self):
        assert CharSpec("p", 2).n == 3

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            CharSpec("q", 1)

    def test_bad_level(self):
        with pytest.raises(ValueError):
            CharSpec("p", 0)


class TestFactorPair:
    def test_unit_vector_rows(self):
        # a pair equal to a row of M factors to a unit vector
        M = logmatrix_to_degree(FP33, 12)
        qr = M.ring
        d = 12
        for row, want in ((0, (1, 0)), (1, (0, 1))):
            mu_a, mu_b = M.entries[row]
            sharp, flat = factor_pair(mu_a, mu_b, M)
            for series, w in ((sharp, want[0]), (flat, want[1])):
                assert (series.coeffs[0] - qr.from_int(w)).is_zero
                assert all(c.is_zero for c in series.coeffs[1:])

    def test_row_sum_linearity(self):
        M = logmatrix_to_degree(FP33, 12)
        mu_a = M.entries[0][0] + M.entries[1][0]
        mu_b = M.entries[0][1] + M.entries[1][1]
        sharp, flat = factor_pair(mu_a, mu_b, M)
        back_a, back_b = combine_pair(sharp, flat, M)
        for got, want in ((back_a, mu_a), (back_b, mu_b)):
            assert all((g - w).is_zero for g, w in zip(got.coeffs, want.coeffs))
        qr = M.ring
        assert (sharp.coeffs[0] - qr.one()).is_zero
        assert (flat.coeffs[0] - qr.one()).is_zero

    def test_degree_mismatch(self):
        M = logmatrix_to_degree(FP33, 8)
        a = bounded(FP33, 8, 1)
        b = Series1(a.ring, "Y", a.coeffs)
        with pytest.raises(ValueError):
            factor_pair(a, b, M)


class TestCombinePair:
    def test_unit_vectors_give_rows(self):
        M = logmatrix_to_degree(FP33, 10)
        qr = M.ring
        one = one_series(qr, "X", 10)
        zero = zero_series(qr, "X", 10)
        mu_a, mu_b = combine_pair(one, zero, M)
        assert all((g - w).is_zero
                   for g, w in zip(mu_a.coeffs, M.entries[0][0].coeffs))
        assert all((g - w).is_zero
                   for g, w in zip(mu_b.coeffs, M.entries[0][1].coeffs))

    def test_zero_gives_zero(self):
        M = logmatrix_to_degree(FP33, 10)
        zero = zero_series(M.ring, "X", 10)
        mu_a, mu_b = combine_pair(zero, zero, M)
        assert all(c.is_zero for c in mu_a.coeffs + mu_b.coeffs)

    def test_row_sums(self):
        M = logmatrix_to_degree(FP33, 10)
        one = one_series(M.ring, "X", 10)
        mu_a, mu_b = combine_pair(one, one, M)
        want_a = M.entries[0][0] + M.entries[1][0]
        want_b = M.entries[0][1] + M.entries[1][1]
        for got, want in ((mu_a, want_a), (mu_b, want_b)):
            assert all((g - w).is_zero for g, w in zip(got.coeffs, want.coeffs))


class TestRoundTrip:
    @pytest.mark.parametrize("fp", [FP33, FP30, FP55, FP50])
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_factor_combine_identity(self, fp, seed):
        d = 27
        M = logmatrix_to_degree(fp, d)
        sharp = bounded(fp, d, seed)
        flat = bounded(fp, d, seed + 100)
        mu_a, mu_b = combine_pair(sharp, flat, M)
        got_sharp, got_flat = factor_pair(mu_a, mu_b, M)
        for got, want in ((got_sharp, sharp), (got_flat, flat)):
            for g, w in zip(got.coeffs, want.coeffs):
                delta = g - w
                assert delta.is_zero
                assert delta.zero_witness_tv() / 2 >= 30
        loss = division_loss_digits([sharp, flat], [got_sharp, got_flat])
        assert loss <= 30

    def test_boundedness_transfer(self):
        # recovered components stay bounded up to the measured loss
        fp = FP33
        d = 27
        M = logmatrix_to_degree(fp, d)
        sharp = bounded(fp, d, 9)
        flat = bounded(fp, d, 10)
        mu_a, mu_b = combine_pair(sharp, flat, M)
        rs, rf = factor_pair(mu_a, mu_b, M)
        loss = float(division_loss_digits([sharp, flat], [rs, rf]))
        for rec in (rs, rf):
            rep = growth_order(rec, 0)
            assert rep.bound <= 0 + loss

    def test_vanishing_of_adjugate_numerator(self):
        # m22*mu_a - m21*mu_b dies at every admissible character
        fp = FP33
        M = logmatrix_level(fp, 2, 9)
        sharp = bounded(fp, 8, 21)
        flat = bounded(fp, 8, 22)
        mu_a, mu_b = exact_combine_pair(sharp, flat, M)
        (m11, m12), (m21, m22) = ((extend(e, mu_a.deg) for e in row)
                                  for row in M.entries)
        num = mul_trunc(m22, mu_a) - mul_trunc(m21, mu_b)
        for m in (1, 2):
            assert reduce_mod_cyclo(num, m).is_zero


class TestVerifyPair:
    def test_synthesized_pair_passes(self):
        fp = FP33
        M = logmatrix_level(fp, 2, 9)
        mu_a, mu_b = exact_combine_pair(bounded(fp, 10, 5), bounded(fp, 10, 6), M)
        reports = verify_pair(mu_a, mu_b, [1, 2])
        for rep in reports:
            assert rep.passed
            assert rep.C_omega is not None

    def test_zero_pair_passes_with_zero_constant(self):
        qr = QuadRing(FP33, 60)
        z = zero_series(qr, "X", 6)
        rep = verify_pair(z, z, [1])[0]
        assert rep.passed
        assert rep.C_omega.is_zero

    def test_constants_cannot_interpolate(self):
        qr = QuadRing(FP33, 60)
        rep = verify_pair(one_series(qr, "X", 6), zero_series(qr, "X", 6), [1])[0]
        assert not rep.passed

    def test_constant_scales_linearly(self):
        fp = FP33
        M = logmatrix_level(fp, 1, 3)
        mu_a, mu_b = exact_combine_pair(bounded(fp, 4, 7), bounded(fp, 4, 8), M)
        r1 = verify_pair(mu_a, mu_b, [1])[0]
        r2 = verify_pair(mu_a * 3, mu_b * 3, [1])[0]
        assert (r2.C_omega - r1.C_omega * 3).is_zero

    def test_level_degree_guard(self):
        qr = QuadRing(FP33, 60)
        z = zero_series(qr, "X", 3)
        with pytest.raises(ValueError):
            verify_pair(z, z, [2])

    def test_trivial_character_excluded(self):
        qr = QuadRing(FP33, 60)
        z = zero_series(qr, "X", 6)
        with pytest.raises(ValueError):
            verify_pair(z, z, [0])


class TestGrowthOrder:
    def test_log_series_unbounded_order(self):
        rep = growth_order(log1p_over_x(3, 30), 0)
        assert rep.bound == 3.0
        assert rep.attained_at == 26

    def test_log_series_order_one(self):
        rep = growth_order(log1p_over_x(3, 30), 1)
        assert rep.bound <= 1

    def test_constant_series(self):
        qr = PadicRing(3, 60)
        rep = growth_order(one_series(qr, "X", 10), 0)
        assert rep.bound <= 0

    def test_pass_flag(self):
        rep = growth_order(log1p_over_x(3, 30), 0, c=3)
        assert rep.passed is True
        rep = growth_order(log1p_over_x(3, 30), 0, c=2)
        assert rep.passed is False

    def test_negative_exponent_rejected(self):
        with pytest.raises(ValueError):
            growth_order(log1p_over_x(3, 10), -1)


class TestRandomBounded:
    def test_deterministic(self):
        a = random_bounded(3, 20, 7)
        b = random_bounded(3, 20, 7)
        assert all((x - y).is_zero for x, y in zip(a.coeffs, b.coeffs))

    def test_seed_avalanche(self):
        a = random_bounded(3, 20, 0)
        b = random_bounded(3, 20, 1)
        assert any((x - y).zero_witness_tv() is None
                   for x, y in zip(a.coeffs, b.coeffs))

    def test_integral(self):
        s = random_bounded(5, 30, 123)
        rep = growth_order(s, 0)
        assert rep.bound <= 0
        assert all(c.valuation() >= 0 for c in s.coeffs)
