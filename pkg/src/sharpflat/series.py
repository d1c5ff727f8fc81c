"""Truncated power series over pluggable coefficient rings.

One engine serves exact integers, Q_p, the ramified quadratic extension E,
and cyclotomic quotient rings: a coefficient ring is any adapter exposing
zero/one/from_int/is_zero/inv plus precision witnesses, and coefficients
combine through the ordinary arithmetic operators.

Truncation semantics: a ``Series1`` holds exactly ``deg`` coefficients and
every product or quotient is computed to the minimum operand degree.  There
is no silent degree extension; ``extend`` pads with exact zeros and is the
caller's assertion that the series really is a polynomial of lower degree.

Cyclotomic polynomials are always taken in the shifted variable, i.e. the
modulus of level m is Phi_{p^m}(1+X), the minimal polynomial of zeta - 1 for
zeta of exact order p^m.  Reduction modulo this (monic, integer) polynomial
implements evaluation at a character sending 1+X to zeta, all conjugates at
once.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .padic import (
    DEFAULT_PREC,
    PadicApprox,
    PadicRing,
    QuadExtElem,
    QuadRing,
    _pw,
    _vp,
)

INF = math.inf


class IntRing:
    """Exact integer coefficients (no precision tracking)."""

    p = None

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n

    def is_zero(self, x):
        return x == 0

    def is_exact_zero(self, x):
        return x == 0

    def zero_witness_tv(self, x):
        return INF if x == 0 else None

    def abs_tv(self, x):
        return INF

    def inv(self, x):
        if x in (1, -1):
            return x
        raise ValueError(f"{x} is not invertible over the integers")

    def __eq__(self, other):
        return isinstance(other, IntRing)

    def __hash__(self):
        return hash("IntRing")

    def __repr__(self):
        return "IntRing()"


INT = IntRing()


class Series1:
    """Sum of coeffs[n] * var**n for n < deg, coefficients in a fixed ring."""

    __slots__ = ("ring", "var", "coeffs")

    def __init__(self, ring, var, coeffs):
        self.ring = ring
        self.var = var
        self.coeffs = tuple(coeffs)

    @property
    def deg(self) -> int:
        return len(self.coeffs)

    def _check_same(self, other):
        if other.var != self.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")
        if other.ring != self.ring:
            raise ValueError("coefficient ring mismatch")

    def __add__(self, other):
        if not isinstance(other, Series1):
            return NotImplemented
        self._check_same(other)
        d = min(self.deg, other.deg)
        return Series1(self.ring, self.var,
                       tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not isinstance(other, Series1):
            return NotImplemented
        self._check_same(other)
        return Series1(self.ring, self.var,
                       tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Series1(self.ring, self.var, tuple(-x for x in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Series1):
            return mul_trunc(self, other)
        return Series1(self.ring, self.var,
                       tuple(c * other for c in self.coeffs))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __repr__(self):
        return f"Series1({self.var}, deg={self.deg}, ring={self.ring!r})"


def zero_series(ring, var, d) -> Series1:
    return Series1(ring, var, tuple(ring.zero() for _ in range(d)))


def one_series(ring, var, d) -> Series1:
    return constant_series(ring, var, ring.one(), d)


def constant_series(ring, var, value, d) -> Series1:
    return Series1(ring, var, (value,) + tuple(ring.zero() for _ in range(d - 1)))


def series_from_ints(ring, var, ints) -> Series1:
    return Series1(ring, var, tuple(ring.from_int(n) for n in ints))


def extend(s: Series1, d: int) -> Series1:
    """Pad with exact zeros up to degree d (caller asserts polynomiality)."""
    if d < s.deg:
        raise ValueError(f"extend target {d} below current degree {s.deg}")
    z = s.ring.zero()
    return Series1(s.ring, s.var, s.coeffs + tuple(z for _ in range(d - s.deg)))


def truncate(s: Series1, d: int) -> Series1:
    if d > s.deg:
        raise ValueError(f"truncate target {d} above current degree {s.deg}")
    return Series1(s.ring, s.var, s.coeffs[:d])


def map_coeffs(s: Series1, ring, f) -> Series1:
    return Series1(ring, s.var, tuple(f(c) for c in s.coeffs))


def lift_to_quad(s: Series1, qring: QuadRing) -> Series1:
    """Embed an integer or Q_p series into E coefficientwise."""
    if isinstance(s.ring, IntRing):
        return map_coeffs(s, qring, qring.from_int)
    if isinstance(s.ring, PadicRing):
        return map_coeffs(s, qring, qring.embed)
    if s.ring == qring:
        return s
    raise ValueError(f"cannot lift coefficients from {s.ring!r} into {qring!r}")


def mul_trunc(s: Series1, t: Series1) -> Series1:
    """Cauchy product truncated to the minimum operand degree."""
    s._check_same(t)
    d = min(s.deg, t.deg)
    ring = s.ring
    if isinstance(ring, QuadRing):
        return _mul_trunc_quad(s, t, d)
    exact0 = ring.is_exact_zero
    a, b = s.coeffs, t.coeffs
    out = []
    for k in range(d):
        acc = ring.zero()
        for i in range(k + 1):
            ai = a[i]
            if exact0(ai):
                continue
            acc = acc + ai * b[k - i]
        out.append(acc)
    return Series1(ring, s.var, tuple(out))


# -- batched convolution over the quadratic extension ----------------------
#
# Summing capped values term by term renormalizes at every step; because
# interval addition is associative (the residue modulo p^min(abs) and the
# bound both are), accumulating raw integers at a running valuation floor
# and normalizing once per coefficient gives bit-identical results.

def _comp(c):
    """(twice-valuation, unit, twice-absolute-precision) of a PadicApprox."""
    u = c.unit
    if u:
        return (c.tv, u, c.tv + 2 * c.rel)
    tv = c.tv
    if tv is None:
        return (INF, 0, INF)
    return (tv, 0, tv)


def _quad_dot(qring, LA, LB, RA, RB):
    """Sum of products of E-elements given by aligned component lists."""
    p = qring.p
    sums = [[0, None, INF], [0, None, INF], [0, None, INF]]  # aa, bb, ab+ba
    for idx in range(len(LA)):
        la, lb, ra, rb = LA[idx], LB[idx], RA[idx], RB[idx]
        for acc, (xtv, xu, xabs), (ytv, yu, yabs) in (
                (sums[0], la, ra), (sums[1], lb, rb),
                (sums[2], la, rb), (sums[2], lb, ra)):
            m = xtv + yabs
            n = xabs + ytv
            if n < m:
                m = n
            if m < acc[2]:
                acc[2] = m
            if xu and yu:
                tvp = xtv + ytv
                fl = acc[1]
                if fl is None:
                    acc[0] = xu * yu
                    acc[1] = tvp
                elif tvp >= fl:
                    acc[0] += xu * yu * _pw(p, (tvp - fl) >> 1)
                else:
                    acc[0] = acc[0] * _pw(p, (fl - tvp) >> 1) + xu * yu
                    acc[1] = tvp
    pa = qring.params
    s_aa, s_bb, s_ab = sums
    # fold in the quadratic relation: a-part -= eps*p * bb, b-part += a_p * bb
    a_val, a_fl, a_abs = s_aa
    b_val, b_fl, b_abs = s_ab
    if s_bb[1] is not None or s_bb[2] is not INF:
        bb_val, bb_fl, bb_abs = s_bb
        a_abs = min(a_abs, bb_abs + 2)
        if bb_fl is not None:
            sh = bb_fl + 2
            if a_fl is None:
                a_val, a_fl = -pa.eps * bb_val, sh
            elif sh >= a_fl:
                a_val -= pa.eps * bb_val * _pw(p, (sh - a_fl) >> 1)
            else:
                a_val = a_val * _pw(p, (a_fl - sh) >> 1) - pa.eps * bb_val
                a_fl = sh
        if pa.a_p:
            w2 = 2 * _vp(pa.a_p, p)
            au = pa.a_p // _pw(p, w2 >> 1)
            b_abs = min(b_abs, bb_abs + w2)
            if bb_fl is not None:
                sh = bb_fl + w2
                if b_fl is None:
                    b_val, b_fl = au * bb_val, sh
                elif sh >= b_fl:
                    b_val += au * bb_val * _pw(p, (sh - b_fl) >> 1)
                else:
                    b_val = b_val * _pw(p, (b_fl - sh) >> 1) + au * bb_val
                    b_fl = sh
    return QuadExtElem(pa, _finish_comp(p, a_val, a_fl, a_abs),
                       _finish_comp(p, b_val, b_fl, b_abs))


def _finish_comp(p, val, fl, abs_tv):
    if abs_tv is INF:
        # only exact-zero terms contributed
        return PadicApprox.exact_zero(p)
    if fl is None:
        return PadicApprox.zero_at(p, abs_tv)
    return PadicApprox.from_raw(p, fl, val, (abs_tv - fl) >> 1)


def _quad_comps(coeffs):
    la = []
    lb = []
    for c in coeffs:
        la.append(_comp(c.a))
        lb.append(_comp(c.b))
    return la, lb


def _mul_trunc_quad(s: Series1, t: Series1, d: int) -> Series1:
    sa, sb = _quad_comps(s.coeffs[:d])
    ta, tb = _quad_comps(t.coeffs[:d])
    ring = s.ring
    out = []
    for k in range(d):
        ra = ta[k::-1]
        rb = tb[k::-1]
        out.append(_quad_dot(ring, sa[:k + 1], sb[:k + 1], ra, rb))
    return Series1(ring, s.var, tuple(out))


def divide_series(num: Series1, den: Series1) -> Series1:
    """Quotient q with q*den == num to the minimum operand degree.

    Requires the constant term of den to be invertible at its tracked
    precision (negative valuation is fine); per-coefficient precision loss
    from the recursion is tracked through the coefficient arithmetic.
    """
    num._check_same(den)
    d = min(num.deg, den.deg)
    if d < 1:
        raise ValueError("division requires at least one coefficient")
    ring = num.ring
    inv0 = ring.inv(den.coeffs[0])
    if isinstance(ring, QuadRing):
        return _divide_quad(num, den, d, inv0)
    dc = den.coeffs
    q = []
    for k in range(d):
        acc = num.coeffs[k]
        for i in range(max(0, k - den.deg + 1), k):
            qi = q[i]
            if ring.is_exact_zero(qi):
                continue
            acc = acc - qi * dc[k - i]
        q.append(acc * inv0)
    return Series1(ring, num.var, tuple(q))


def _divide_quad(num: Series1, den: Series1, d: int, inv0) -> Series1:
    ring = num.ring
    dena, denb = _quad_comps(den.coeffs)
    q = []
    qa = []
    qb = []
    for k in range(d):
        lo = max(0, k - den.deg + 1)
        acc = num.coeffs[k]
        if lo < k:
            acc = acc - _quad_dot(ring, qa[lo:k], qb[lo:k],
                                  dena[k - lo:0:-1], denb[k - lo:0:-1])
        qk = acc * inv0
        q.append(qk)
        qa.append(_comp(qk.a))
        qb.append(_comp(qk.b))
    return Series1(ring, num.var, tuple(q))


def series_zero_witness(s: Series1):
    """Twice-valuation bound if every coefficient vanishes at precision."""
    ring = s.ring
    best = INF
    for c in s.coeffs:
        w = ring.zero_witness_tv(c)
        if w is None:
            return None
        best = min(best, w)
    return best


def series_min_abs_tv(s: Series1):
    ring = s.ring
    return min((ring.abs_tv(c) for c in s.coeffs), default=INF)


# -- integer polynomial helpers ------------------------------------------

def _int_poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _int_poly_divmod_monic(num, den):
    """Exact divmod by a monic integer polynomial."""
    num = list(num)
    dd = len(den) - 1
    q = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            q[k - dd] = c
            for j in range(dd + 1):
                num[k - dd + j] -= c * den[j]
    return q, num[:dd]


def _one_plus_x_pow(e):
    return [math.comb(e, k) for k in range(e + 1)]


@lru_cache(maxsize=None)
def cyclotomic_modulus(p: int, m: int):
    """Coefficients of Phi_{p^m}(1+X) as a tuple of ints (monic)."""
    if m < 1:
        raise ValueError(f"level must be >= 1, got {m}")
    num = _one_plus_x_pow(p**m)
    num[0] -= 1
    den = _one_plus_x_pow(p ** (m - 1))
    den[0] -= 1
    # both sides are divisible by X; strip it before the monic division
    q, r = _int_poly_divmod_monic(num[1:], den[1:])
    assert not any(r), "cyclotomic division must be exact"
    return tuple(q)


def cyclotomic_poly(p: int, m: int, var: str = "X") -> Series1:
    """Phi_{p^m}(1+X): degree p^(m-1)(p-1), constant term p, exact integers."""
    return Series1(INT, var, cyclotomic_modulus(p, m))


def log1p_over_x(p: int, d: int, rel: int = DEFAULT_PREC,
                 var: str = "X") -> Series1:
    """The series log(1+X)/X: coefficient n is (-1)^n/(n+1)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    ring = PadicRing(p, rel)
    sign = 1
    coeffs = []
    for n in range(d):
        coeffs.append(ring.from_fraction(sign) / ring.from_int(n + 1))
        sign = -sign
    return Series1(ring, var, tuple(coeffs))


# -- cyclotomic quotient rings --------------------------------------------

class CycloRing:
    """R = B[X]/Phi_{p^m}(1+X) over a base coefficient ring B."""

    __slots__ = ("base", "m", "p", "modulus", "degree")

    def __init__(self, base, m, p=None):
        self.base = base
        self.m = m
        self.p = p if p is not None else base.p
        if self.p is None:
            raise ValueError("a prime is required for the cyclotomic modulus")
        self.modulus = cyclotomic_modulus(self.p, m)
        self.degree = len(self.modulus) - 1

    def zero(self):
        z = self.base.zero()
        return CycloElem(self, tuple(z for _ in range(self.degree)))

    def one(self):
        return self.embed_scalar(self.base.one())

    def from_int(self, n):
        return self.embed_scalar(self.base.from_int(n))

    def embed_scalar(self, x):
        z = self.base.zero()
        return CycloElem(self, (x,) + tuple(z for _ in range(self.degree - 1)))

    def var_class(self):
        """The class of the reduced variable (the image of X)."""
        z = self.base.zero()
        coeffs = [z] * self.degree
        coeffs[1] = self.base.one()
        return CycloElem(self, tuple(coeffs))

    def is_zero(self, x):
        return all(self.base.is_zero(c) for c in x.coeffs)

    def is_exact_zero(self, x):
        return all(self.base.is_exact_zero(c) for c in x.coeffs)

    def zero_witness_tv(self, x):
        best = INF
        for c in x.coeffs:
            w = self.base.zero_witness_tv(c)
            if w is None:
                return None
            best = min(best, w)
        return best

    def abs_tv(self, x):
        return min(self.base.abs_tv(c) for c in x.coeffs)

    def inv(self, x):
        raise NotImplementedError(
            "inversion in a cyclotomic quotient ring is not supported")

    def __eq__(self, other):
        return (isinstance(other, CycloRing) and other.m == self.m
                and other.p == self.p and other.base == self.base)

    def __hash__(self):
        return hash(("CycloRing", self.p, self.m, self.base))

    def __repr__(self):
        return f"CycloRing(p={self.p}, m={self.m}, base={self.base!r})"


class CycloElem:
    """A class in B[X]/Phi_{p^m}(1+X), stored by its degree-reduced poly."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(coeffs)

    @property
    def is_zero(self):
        return self.ring.is_zero(self)

    def zero_witness_tv(self):
        return self.ring.zero_witness_tv(self)

    def abs_tv(self):
        return self.ring.abs_tv(self)

    def twice_valuation(self):
        """Minimum coefficient valuation (doubled); +inf for zeros."""
        return min(c.twice_valuation() for c in self.coeffs)

    def _check_same(self, other):
        if other.ring != self.ring:
            raise ValueError("cyclotomic ring mismatch")

    def __add__(self, other):
        if isinstance(other, CycloElem) and other.ring == self.ring:
            return CycloElem(self.ring,
                             tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))
        return self + self._as_scalar_elem(other)

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.ring, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-(self._lift(other)))

    def __rsub__(self, other):
        return (-self) + other

    def _lift(self, other):
        if isinstance(other, CycloElem) and other.ring == self.ring:
            return other
        return self._as_scalar_elem(other)

    def _as_scalar_elem(self, other):
        if isinstance(other, int):
            return self.ring.from_int(other)
        return self.ring.embed_scalar(other)

    def __mul__(self, other):
        ring = self.ring
        if isinstance(other, CycloElem) and other.ring == ring:
            base = ring.base
            exact0 = base.is_exact_zero
            a, b = self.coeffs, other.coeffs
            prod = [base.zero() for _ in range(2 * ring.degree - 1)]
            for i, ai in enumerate(a):
                if exact0(ai):
                    continue
                for j, bj in enumerate(b):
                    prod[i + j] = prod[i + j] + ai * bj
            rem = _reduce_by_monic_int(prod, ring.modulus, base)
            return CycloElem(ring, tuple(rem))
        if isinstance(other, int):
            return CycloElem(ring, tuple(c * other for c in self.coeffs))
        # scalar from the base ring (including a nested CycloElem)
        return CycloElem(ring, tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (self - self._lift(other)).is_zero

    __hash__ = None

    def __repr__(self):
        return f"CycloElem(m={self.ring.m}, coeffs={list(self.coeffs)!r})"


def _reduce_by_monic_int(coeffs, modulus, ring):
    """Remainder of a coefficient list modulo a monic integer polynomial.

    Zero-at-precision leading terms are folded in honestly (their precision
    bound propagates); only exact zeros are skipped.
    """
    rem = list(coeffs)
    dd = len(modulus) - 1
    exact0 = ring.is_exact_zero
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k]
        if exact0(c):
            continue
        for j in range(dd):
            rem[k - dd + j] = rem[k - dd + j] - c * modulus[j]
    rem = rem[:dd]
    while len(rem) < dd:
        rem.append(ring.zero())
    return rem


def reduce_mod_cyclo(s: Series1, m: int, p=None, growth=None):
    """Reduce a series modulo Phi_{p^m}(1+X), i.e. evaluate at level m.

    Returns the class in the quotient ring.  When ``growth=(u, c)`` is
    supplied (a hypothesis |coeff_n| <= p^c * n^u on the discarded tail of
    the underlying infinite series), returns ``(elem, tail_bound)`` where
    tail_bound = deg/phi - (u*log_p(deg) + c) is a lower bound for the
    valuation of the neglected tail; a bound <= 0 is vacuous.
    """
    if s.deg < 1:
        raise ValueError("reduction requires at least one coefficient")
    if m < 1:
        raise ValueError(f"level must be >= 1, got {m}")
    ring = s.ring
    pp = p if p is not None else ring.p
    cring = CycloRing(ring, m, pp)
    rem = _reduce_by_monic_int(list(s.coeffs), cring.modulus, ring)
    elem = CycloElem(cring, tuple(rem))
    if growth is None:
        return elem
    u, c = growth
    bound = s.deg / cring.degree - (u * math.log(s.deg, pp) + c)
    return elem, bound


# -- two-variable series ---------------------------------------------------

class Series2:
    """Sum of coeffs[i][j] * X^i * Y^j on a rectangular truncation grid."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(tuple(row) for row in coeffs)
        dy = len(self.coeffs[0]) if self.coeffs else 0
        if any(len(row) != dy for row in self.coeffs):
            raise ValueError("coefficient grid must be rectangular")

    @property
    def degs(self):
        dx = len(self.coeffs)
        return (dx, len(self.coeffs[0]) if dx else 0)

    def _check_same(self, other):
        if other.ring != self.ring:
            raise ValueError("coefficient ring mismatch")

    def x_fiber(self, j) -> Series1:
        """The series in X multiplying Y^j."""
        return Series1(self.ring, "X", tuple(row[j] for row in self.coeffs))

    def y_fiber(self, i) -> Series1:
        """The series in Y multiplying X^i."""
        return Series1(self.ring, "Y", self.coeffs[i])

    def __add__(self, other):
        if not isinstance(other, Series2):
            return NotImplemented
        self._check_same(other)
        dx = min(self.degs[0], other.degs[0])
        dy = min(self.degs[1], other.degs[1])
        return Series2(self.ring,
                       tuple(tuple(self.coeffs[i][j] + other.coeffs[i][j]
                                   for j in range(dy)) for i in range(dx)))

    def __sub__(self, other):
        if not isinstance(other, Series2):
            return NotImplemented
        self._check_same(other)
        dx = min(self.degs[0], other.degs[0])
        dy = min(self.degs[1], other.degs[1])
        return Series2(self.ring,
                       tuple(tuple(self.coeffs[i][j] - other.coeffs[i][j]
                                   for j in range(dy)) for i in range(dx)))

    def __neg__(self):
        return Series2(self.ring,
                       tuple(tuple(-c for c in row) for row in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Series2):
            return mul2_trunc(self, other)
        if isinstance(other, Series1):
            return mul_x(self, other) if other.var == "X" else mul_y(self, other)
        return Series2(self.ring,
                       tuple(tuple(c * other for c in row) for row in self.coeffs))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __repr__(self):
        return f"Series2(degs={self.degs}, ring={self.ring!r})"


def zero_series2(ring, dx, dy) -> Series2:
    z = ring.zero()
    return Series2(ring, tuple(tuple(z for _ in range(dy)) for _ in range(dx)))


def extend2(s: Series2, dx, dy) -> Series2:
    dx0, dy0 = s.degs
    if dx < dx0 or dy < dy0:
        raise ValueError("extend target below current degrees")
    z = s.ring.zero()
    rows = [tuple(row) + tuple(z for _ in range(dy - dy0)) for row in s.coeffs]
    rows += [tuple(z for _ in range(dy)) for _ in range(dx - dx0)]
    return Series2(s.ring, rows)


def truncate2(s: Series2, dx, dy) -> Series2:
    return Series2(s.ring, tuple(row[:dy] for row in s.coeffs[:dx]))


def outer(sx: Series1, sy: Series1) -> Series2:
    """The product sx(X) * sy(Y) as a two-variable series."""
    if sx.var != "X" or sy.var != "Y":
        raise ValueError("outer expects an X-series and a Y-series")
    if sx.ring != sy.ring:
        raise ValueError("coefficient ring mismatch")
    return Series2(sx.ring,
                   tuple(tuple(a * b for b in sy.coeffs) for a in sx.coeffs))


def _fibers_mapped_x(s: Series2, f):
    """Apply a Series1->Series1 map to every X-fiber (fixed Y power)."""
    dy = s.degs[1]
    cols = [f(s.x_fiber(j)).coeffs for j in range(dy)]
    dx = len(cols[0]) if cols else 0
    return Series2(s.ring, tuple(tuple(cols[j][i] for j in range(dy))
                                 for i in range(dx)))


def _fibers_mapped_y(s: Series2, f):
    """Apply a Series1->Series1 map to every Y-fiber (fixed X power)."""
    return Series2(s.ring, tuple(f(s.y_fiber(i)).coeffs
                                 for i in range(s.degs[0])))


def mul_x(s: Series2, t: Series1) -> Series2:
    """Multiply by a series in X only (each X-fiber independently)."""
    if t.var != "X":
        raise ValueError("mul_x expects an X-series")
    return _fibers_mapped_x(s, lambda fib: mul_trunc(fib, t))


def mul_y(s: Series2, t: Series1) -> Series2:
    if t.var != "Y":
        raise ValueError("mul_y expects a Y-series")
    return _fibers_mapped_y(s, lambda fib: mul_trunc(fib, t))


def divide_x(s: Series2, den: Series1) -> Series2:
    """Divide by a series in X only, fiber by fiber (exact per fiber)."""
    if den.var != "X":
        raise ValueError("divide_x expects an X-series")
    return _fibers_mapped_x(s, lambda fib: divide_series(fib, den))


def divide_y(s: Series2, den: Series1) -> Series2:
    if den.var != "Y":
        raise ValueError("divide_y expects a Y-series")
    return _fibers_mapped_y(s, lambda fib: divide_series(fib, den))


def mul2_trunc(s: Series2, t: Series2) -> Series2:
    """Full two-variable Cauchy product, truncated to min degrees."""
    s._check_same(t)
    dx = min(s.degs[0], t.degs[0])
    dy = min(s.degs[1], t.degs[1])
    ring = s.ring
    exact0 = ring.is_exact_zero
    out = [[ring.zero() for _ in range(dy)] for _ in range(dx)]
    for i1, row in enumerate(s.coeffs):
        if i1 >= dx:
            break
        for j1, c in enumerate(row):
            if j1 >= dy or exact0(c):
                continue
            for i2 in range(dx - i1):
                trow = t.coeffs[i2]
                for j2 in range(dy - j1):
                    tc = trow[j2]
                    if exact0(tc):
                        continue
                    out[i1 + i2][j1 + j2] = out[i1 + i2][j1 + j2] + c * tc
    return Series2(ring, out)


def derivative(s, axis: str):
    """Formal partial derivative; the degree drops by one along ``axis``."""
    if isinstance(s, Series1):
        if axis != s.var:
            raise ValueError(f"axis {axis} not present in a {s.var}-series")
        return Series1(s.ring, s.var,
                       tuple((k + 1) * c for k, c in enumerate(s.coeffs[1:])))
    if isinstance(s, Series2):
        dx, dy = s.degs
        if axis == "X":
            return Series2(s.ring,
                           tuple(tuple((i + 1) * c for c in s.coeffs[i + 1])
                                 for i in range(dx - 1)))
        if axis == "Y":
            return Series2(s.ring,
                           tuple(tuple((j + 1) * row[j + 1] for j in range(dy - 1))
                                 for row in s.coeffs))
        raise ValueError(f"unknown axis {axis!r}")
    raise TypeError(f"cannot differentiate {type(s).__name__}")


def partial_apply(s: Series2, axis: str, m: int, p=None) -> Series1:
    """Substitute the level-m cyclotomic class into one variable.

    Reducing each fiber modulo Phi_{p^m}(1+axis) leaves a one-variable
    series in the other variable with coefficients in the quotient ring.
    """
    pp = p if p is not None else s.ring.p
    cring = CycloRing(s.ring, m, pp)
    if axis == "X":
        dy = s.degs[1]
        coeffs = tuple(reduce_mod_cyclo(s.x_fiber(j), m, pp) for j in range(dy))
        return Series1(cring, "Y", coeffs)
    if axis == "Y":
        dx = s.degs[0]
        coeffs = tuple(reduce_mod_cyclo(s.y_fiber(i), m, pp) for i in range(dx))
        return Series1(cring, "X", coeffs)
    raise ValueError(f"unknown axis {axis!r}")
