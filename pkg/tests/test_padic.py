import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sharpflat.padic import (
    FormParams,
    PadicApprox,
    PrecisionExhausted,
    QuadExtElem,
    QuadRing,
    ZeroAtPrecision,
    quad_conj,
    quad_inv,
    quad_mul,
    root_power,
    valuation,
)

from helpers import ExactQuad, exact_alpha, exact_beta, frac_vp, qp_matches, quad_matches

FP33 = FormParams(3, 3, 1)
FP30 = FormParams(3, 0, 1)
FP55 = FormParams(5, 5, 1)


class TestFormParams:
    def test_rejects_p2(self):
        with pytest.raises(ValueError):
            FormParams(2, 2, 1)

    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            FormParams(9, 9, 1)

    def test_rejects_ordinary(self):
        with pytest.raises(ValueError):
            FormParams(3, 1, 1)

    def test_rejects_nonunit_eps(self):
        with pytest.raises(ValueError):
            FormParams(3, 3, 6)

    def test_slopes_are_half(self):
        assert FP33.r == Fraction(1, 2)
        assert FP33.s == Fraction(1, 2)

    def test_ap_zero_allowed(self):
        assert FP30.a_p == 0


class TestQuadMul:
    def test_vieta_product(self):
        q = QuadRing(FP33)
        assert quad_mul(q.alpha(), q.beta()) == 3

    def test_multiplicative_identity(self):
        q = QuadRing(FP55)
        x = q.one() + q.alpha()
        assert quad_mul(x, q.one()) == x

    def test_defining_relation(self):
        q = QuadRing(FP33)
        t2 = quad_mul(q.alpha(), q.alpha())
        assert t2 == QuadExtElem.from_pair(FP33, -3, 3)

    def test_params_mismatch_rejected(self):
        with pytest.raises(ValueError):
            quad_mul(QuadRing(FP33).alpha(), QuadRing(FP55).alpha())


class TestQuadConj:
    def test_root_swap(self):
        q = QuadRing(FP33)
        assert quad_conj(q.alpha()) == q.beta()

    def test_involution(self):
        x = QuadExtElem.from_pair(FP33, 7, 11)
        assert quad_conj(quad_conj(x)) == x

    def test_fixed_field(self):
        q = QuadRing(FP55)
        assert quad_conj(q.from_int(5)) == 5


class TestQuadInv:
    def test_inv_theta(self):
        # norm of theta is eps*p, so 1/theta = (a_p - theta)/(eps*p)
        q = QuadRing(FP33)
        iv = quad_inv(q.alpha())
        assert quad_mul(iv, q.alpha()) == 1
        expected = QuadExtElem(FP33,
                               PadicApprox.from_fraction(3, Fraction(3, 3)),
                               PadicApprox.from_fraction(3, Fraction(-1, 3)))
        assert iv == expected

    def test_inv_theta_squared(self):
        # alpha^(-2) = (2 - theta)/3 at p=3, a_p=3, eps=1
        q = QuadRing(FP33)
        iv = quad_inv(quad_mul(q.alpha(), q.alpha()))
        expected = QuadExtElem(FP33,
                               PadicApprox.from_fraction(3, Fraction(2, 3)),
                               PadicApprox.from_fraction(3, Fraction(-1, 3)))
        assert iv == expected

    def test_inv_one(self):
        q = QuadRing(FP33)
        assert quad_inv(q.one()) == 1

    def test_zero_at_precision_raises(self):
        q = QuadRing(FP33)
        z = q.alpha() - q.alpha()
        with pytest.raises(ZeroAtPrecision):
            quad_inv(z)

    def test_exact_zero_raises(self):
        q = QuadRing(FP33)
        with pytest.raises(ZeroAtPrecision):
            quad_inv(q.zero())


class TestValuation:
    def test_theta_half(self):
        assert valuation(QuadRing(FP33).alpha()) == Fraction(1, 2)

    def test_p_is_one(self):
        assert valuation(QuadRing(FP33).from_int(3)) == 1

    def test_one_plus_theta(self):
        q = QuadRing(FP33)
        assert valuation(q.one() + q.alpha()) == 0

    def test_zero_is_inf(self):
        q = QuadRing(FP33)
        assert valuation(q.zero()) == math.inf


class TestRootPower:
    def test_first_power(self):
        q = QuadRing(FP33)
        assert root_power(FP33, "alpha", 1) == q.alpha()

    def test_negative_square(self):
        iv = root_power(FP33, "alpha", -2)
        expected = QuadExtElem(FP33,
                               PadicApprox.from_fraction(3, Fraction(2, 3)),
                               PadicApprox.from_fraction(3, Fraction(-1, 3)))
        assert iv == expected

    def test_square_is_relation(self):
        # alpha^2 = a_p*alpha - eps*p
        for fp in (FP33, FP30, FP55):
            q = QuadRing(fp)
            sq = root_power(fp, "alpha", 2)
            assert sq == QuadExtElem.from_pair(fp, -fp.eps * fp.p, fp.a_p)

    @pytest.mark.parametrize("fp", [FP33, FP30, FP55])
    def test_product_of_root_powers(self, fp):
        # alpha^k * beta^k = (eps*p)^k for -10 <= k <= 10
        q = QuadRing(fp)
        for k in range(-10, 11):
            prod = root_power(fp, "alpha", k) * root_power(fp, "beta", k)
            want = QuadExtElem(
                fp, PadicApprox.from_fraction(fp.p, Fraction(fp.eps * fp.p)**k),
                PadicApprox.exact_zero(fp.p))
            assert prod == want, k

    @pytest.mark.parametrize("k", range(-8, 9))
    def test_valuation_exact(self, k):
        assert valuation(root_power(FP33, "alpha", k)) == Fraction(k, 2)
        assert valuation(root_power(FP33, "beta", k)) == Fraction(k, 2)

    def test_bad_root_name(self):
        with pytest.raises(ValueError):
            root_power(FP33, "gamma", 1)


# -- randomized properties --------------------------------------------------

def exact_of(x: QuadExtElem, fp) -> ExactQuad:
    def lift(c):
        if c.unit == 0:
            return Fraction(0)
        return Fraction(c.unit) * Fraction(fp.p) ** (c.tv // 2)
    return ExactQuad(fp, lift(x.a), lift(x.b))


quad_elems = st.tuples(st.integers(-3, 3), st.integers(1, 3**8),
                       st.integers(-3, 3), st.integers(0, 3**8))


def mk_elem(tup, rel=20):
    va, ua, vb, ub = tup
    a = PadicApprox.from_raw(3, 2 * va, ua, rel)
    b = PadicApprox.from_raw(3, 2 * vb, ub, rel) if ub else PadicApprox.exact_zero(3)
    return QuadExtElem(FP33, a, b)


@settings(max_examples=60, deadline=None)
@given(quad_elems, quad_elems)
def test_valuation_additive(tx, ty):
    x, y = mk_elem(tx), mk_elem(ty)
    vx, vy = valuation(x), valuation(y)
    if vx is math.inf or vy is math.inf:
        assert valuation(x * y) == math.inf
    else:
        assert valuation(x * y) == vx + vy


@settings(max_examples=60, deadline=None)
@given(quad_elems)
def test_conj_norm_valuation(tx):
    x = mk_elem(tx)
    v = valuation(x)
    if v is math.inf:
        return
    n = x.norm()
    assert n.valuation() == 2 * v
    assert valuation(x) + valuation(quad_conj(x)) == n.valuation()


@settings(max_examples=50, deadline=None)
@given(quad_elems, quad_elems, st.lists(st.sampled_from("+-*"), min_size=1,
                                        max_size=4))
def test_capped_ops_sound_against_exact(tx, ty, ops):
    """Interval soundness: every op result matches the exact value
    modulo p^absprec."""
    x, y = mk_elem(tx), mk_elem(ty)
    ex, ey = exact_of(x, FP33), exact_of(y, FP33)
    for op in ops:
        if op == "+":
            x, ex = x + y, ex + ey
        elif op == "-":
            x, ex = x - y, ex - ey
        else:
            x, ex = x * y, ex * ey
        assert quad_matches(x, ex, 3)


@settings(max_examples=60, deadline=None)
@given(quad_elems)
def test_inv_sound_and_self_inverse(tx):
    x = mk_elem(tx)
    if x.is_zero:
        return
    iv = quad_inv(x)
    assert quad_matches(iv, exact_of(x, FP33).inv(), 3)
    assert x * iv == 1


def test_interval_rules_single_ops():
    # mul: valuations add, relative precision is the minimum
    x = PadicApprox.from_raw(3, 2, 5, 10)
    y = PadicApprox.from_raw(3, 4, 7, 6)
    z = x * y
    assert z.tv == 6 and z.rel == 6
    # add at distinct valuations: min valuation, absolute precision min
    s = x + y
    assert s.tv == 2
    assert s.abs_tv() == min(x.abs_tv(), y.abs_tv())
    # cancellation to zero at precision
    d = x - x
    assert d.unit == 0 and d.tv == x.abs_tv()


def test_precision_never_silently_increases():
    x = PadicApprox.from_raw(3, 0, 1 + 3**5, 6)
    y = PadicApprox.from_raw(3, 0, 3**6 - 1, 6)  # -1 to 6 digits
    s = x + y  # 3^5 visible, abs precision stays 6 digits
    assert s.tv == 10 and s.rel == 1
    assert s.abs_tv() == 12


def test_lifted_int_and_from_fraction_roundtrip():
    x = PadicApprox.from_fraction(3, Fraction(22, 7), 12)
    assert qp_matches(x, Fraction(22, 7), 3)
    n = PadicApprox.from_int(3, 54, 10)
    assert n.lifted_int() == 54
