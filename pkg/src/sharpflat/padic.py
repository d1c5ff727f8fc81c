"""Capped-precision arithmetic in Q_p and in a ramified quadratic extension.

Numbers are stored in capped-relative form: a valuation together with a unit
mantissa known modulo p**rel.  Absolute precision (valuation + relative
precision) follows the usual interval rules and is never silently increased;
a quantity that cancels below its known digits becomes an explicit
"zero at precision" carrying the bound that was witnessed.

The quadratic extension E = Q_p(theta) is defined by

    theta**2 = a_p * theta - eps * p,

where p divides a_p and eps is a unit.  Both roots of X^2 - a_p*X + eps*p
then have valuation 1/2, so E/Q_p is ramified and valuations of E-elements
live in (1/2)Z.  All valuations are therefore handled internally as
*doubled* integers ("tv" = twice the valuation), which keeps half-integers
exact and comparisons cheap.

Everything here is immutable after construction and all operations are pure,
so values can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

#: Default relative precision, in p-adic digits.
DEFAULT_PREC = 60

INF = math.inf


class ZeroAtPrecision(ZeroDivisionError):
    """Inversion of a value that is indistinguishable from zero.

    ``bound_tv`` is twice the absolute precision at which the operand is
    known to vanish (``math.inf`` for an exact zero).
    """

    def __init__(self, bound_tv):
        self.bound_tv = bound_tv
        if bound_tv is INF:
            msg = "division by exact zero"
        else:
            msg = ("division by a value indistinguishable from 0 "
                   f"at absolute precision {Fraction(bound_tv, 2)}")
        super().__init__(msg)


class PrecisionExhausted(ArithmeticError):
    """Raised when a result would retain fewer than one significant digit."""


def _vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


_pow_cache: dict = {}


def _pw(p: int, e: int) -> int:
    """Cached p**e (the hot loops reuse a handful of exponents)."""
    key = (p, e)
    r = _pow_cache.get(key)
    if r is None:
        r = _pow_cache[key] = p**e
    return r


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FormParams:
    """The arithmetic datum (p, a_p, eps) defining the quadratic relation.

    Requires p an odd prime and p | a_p (so both roots of the quadratic
    have valuation 1/2; the ordinary case is rejected).  eps must be a
    unit at p.  The two roots are represented as alpha = theta and
    beta = a_p - theta, so alpha*beta = eps*p and alpha + beta = a_p hold
    identically.
    """

    p: int
    a_p: int
    eps: int

    def __post_init__(self):
        if self.p == 2:
            raise ValueError("p = 2 is not supported")
        if self.p < 3 or not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not an odd prime")
        if self.a_p % self.p != 0:
            raise ValueError(
                f"a_p = {self.a_p} is a unit at p = {self.p}; only the "
                "non-ordinary case (p divides a_p) is supported")
        if math.gcd(self.eps, self.p) != 1:
            raise ValueError(f"eps = {self.eps} is not a unit at p = {self.p}")

    @property
    def r(self) -> Fraction:
        """Valuation of the first root (Newton polygon slope)."""
        return Fraction(1, 2)

    @property
    def s(self) -> Fraction:
        """Valuation of the second root."""
        return Fraction(1, 2)


class PadicApprox:
    """A Q_p number known to finite precision.

    Nonzero: value = unit * p**(tv/2) with 0 < unit < p**rel and p not
    dividing unit; the value is known modulo p**(tv/2 + rel).  Elements of
    Q_p always have even tv.

    Zero at precision: unit == 0, rel == 0 and tv is twice the witnessed
    absolute precision (the value is congruent to 0 modulo p**(tv/2));
    tv None marks an exact zero.
    """

    __slots__ = ("p", "tv", "unit", "rel")

    def __init__(self, p, tv, unit, rel):
        self.p = p
        self.tv = tv
        self.unit = unit
        self.rel = rel

    # -- constructors ------------------------------------------------

    @classmethod
    def exact_zero(cls, p):
        return cls(p, None, 0, 0)

    @classmethod
    def zero_at(cls, p, tv_bound):
        """Zero witnessed to twice-absolute-precision ``tv_bound``."""
        return cls(p, tv_bound, 0, 0)

    @classmethod
    def from_raw(cls, p, tv, mantissa, rel):
        """mantissa * p**(tv/2), mantissa known to ``rel`` relative digits."""
        if rel <= 0:
            # nothing visible: only the absolute bound tv + 2*rel survives
            return cls.zero_at(p, tv + 2 * rel)
        m = mantissa % _pw(p, rel)
        if m == 0:
            return cls.zero_at(p, tv + 2 * rel)
        w = _vp(m, p)
        if w:
            return cls(p, tv + 2 * w, m // _pw(p, w), rel - w)
        return cls(p, tv, m, rel)

    @classmethod
    def from_int(cls, p, n, rel=DEFAULT_PREC):
        if n == 0:
            return cls.exact_zero(p)
        v = _vp(n, p)
        return cls(p, 2 * v, (n // p**v) % p**rel, rel)

    @classmethod
    def from_fraction(cls, p, fr, rel=DEFAULT_PREC):
        fr = Fraction(fr)
        if fr == 0:
            return cls.exact_zero(p)
        num, den = fr.numerator, fr.denominator
        v = _vp(num, p) - _vp(den, p)
        nu = num // p ** _vp(num, p)
        du = den // p ** _vp(den, p)
        unit = nu * pow(du, -1, p**rel) % p**rel
        return cls(p, 2 * v, unit, rel)

    # -- predicates and accessors ------------------------------------

    @property
    def is_zero(self) -> bool:
        """Zero-at-precision test (includes exact zeros)."""
        return self.unit == 0

    @property
    def is_exact_zero(self) -> bool:
        return self.unit == 0 and self.tv is None

    def zero_witness_tv(self):
        """None if distinguishable from 0, else twice the witnessed bound."""
        if self.unit:
            return None
        return INF if self.tv is None else self.tv

    def abs_tv(self):
        """Twice the absolute precision."""
        if self.unit:
            return self.tv + 2 * self.rel
        return INF if self.tv is None else self.tv

    def valuation(self):
        """Valuation as an integer; +inf (a lower bound) for zeros."""
        if self.unit == 0:
            return INF
        return self.tv // 2

    def twice_valuation(self):
        return INF if self.unit == 0 else self.tv

    def lifted_int(self) -> int:
        """The integer unit * p**(tv/2); requires valuation >= 0."""
        if self.unit == 0:
            return 0
        if self.tv < 0:
            raise ValueError("negative valuation has no integer lift")
        return self.unit * self.p ** (self.tv // 2)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicApprox):
            if other.p != self.p:
                raise ValueError(f"prime mismatch: {self.p} vs {other.p}")
            return other
        if isinstance(other, int):
            return PadicApprox.from_int(self.p, other, max(self.rel, 1))
        return None

    def __add__(self, other):
        x = self
        if type(other) is PadicApprox:
            y = other
            if y.p != x.p:
                raise ValueError(f"prime mismatch: {x.p} vs {y.p}")
        else:
            y = self._coerce(other)
            if y is None:
                return NotImplemented
        p = x.p
        xu, yu = x.unit, y.unit
        if xu and yu:
            xtv, ytv = x.tv, y.tv
            tvm = xtv if xtv <= ytv else ytv
            tabs = min(xtv + 2 * x.rel, ytv + 2 * y.rel)
            s = (xu * _pw(p, (xtv - tvm) >> 1)
                 + yu * _pw(p, (ytv - tvm) >> 1))
            span = (tabs - tvm) >> 1
            m = s % _pw(p, span)
            if m == 0:
                return PadicApprox(p, tabs, 0, 0)
            if m % p:
                return PadicApprox(p, tvm, m, span)
            w = _vp(m, p)
            return PadicApprox(p, tvm + 2 * w, m // _pw(p, w), span - w)
        if x.tv is None:
            return y
        if y.tv is None:
            return x
        if xu == 0 and yu == 0:
            return PadicApprox.zero_at(p, min(x.tv, y.tv))
        z, w = (x, y) if xu == 0 else (y, x)
        # w + O(p^(z.tv/2)): visible digits of w below the bound survive
        if w.tv >= z.tv:
            return PadicApprox.zero_at(p, z.tv)
        bound = min(z.tv, w.tv + 2 * w.rel)
        return PadicApprox.from_raw(p, w.tv, w.unit, (bound - w.tv) // 2)

    __radd__ = __add__

    def __neg__(self):
        if self.unit == 0:
            return self
        return PadicApprox(self.p, self.tv, self.p**self.rel - self.unit, self.rel)

    def __sub__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self + (-y)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        x = self
        if type(other) is PadicApprox:
            y = other
            if y.p != x.p:
                raise ValueError(f"prime mismatch: {x.p} vs {y.p}")
        else:
            y = self._coerce(other)
            if y is None:
                return NotImplemented
        p = x.p
        xu, yu = x.unit, y.unit
        if xu and yu:
            rel = x.rel if x.rel <= y.rel else y.rel
            return PadicApprox(p, x.tv + y.tv, xu * yu % _pw(p, rel), rel)
        if x.tv is None or y.tv is None:
            return PadicApprox.exact_zero(p)
        return PadicApprox.zero_at(p, x.tv + y.tv)

    __rmul__ = __mul__

    def _mul_int(self, n: int):
        """Fast multiply by an exact integer."""
        p = self.p
        if n == 0:
            return PadicApprox.exact_zero(p)
        u = self.unit
        if u == 0:
            if self.tv is None:
                return self
            return PadicApprox.zero_at(p, self.tv + 2 * _vp(n, p))
        w = _vp(n, p)
        rel = self.rel
        return PadicApprox(p, self.tv + 2 * w,
                           u * (n // _pw(p, w)) % _pw(p, rel), rel)

    def inv(self):
        if self.unit == 0:
            raise ZeroAtPrecision(self.zero_witness_tv())
        p, rel = self.p, self.rel
        return PadicApprox(p, -self.tv, pow(self.unit, -1, p**rel), rel)

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self * y.inv()

    def __rtruediv__(self, other):
        x = self._coerce(other)
        return x * self.inv()

    def __eq__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return (self - y).unit == 0

    __hash__ = None

    def __repr__(self):
        if self.unit == 0:
            if self.tv is None:
                return "0"
            return f"O({self.p}^{Fraction(self.tv, 2)})"
        v = Fraction(self.tv, 2)
        a = Fraction(self.abs_tv(), 2)
        return f"{self.unit}*{self.p}^{v} + O({self.p}^{a})"


class PadicRing:
    """Coefficient-ring adapter for Q_p at a fixed relative precision cap."""

    __slots__ = ("p", "rel")

    def __init__(self, p, rel=DEFAULT_PREC):
        self.p = p
        self.rel = rel

    def zero(self):
        return PadicApprox.exact_zero(self.p)

    def one(self):
        return PadicApprox.from_int(self.p, 1, self.rel)

    def from_int(self, n):
        return PadicApprox.from_int(self.p, n, self.rel)

    def from_fraction(self, fr):
        return PadicApprox.from_fraction(self.p, fr, self.rel)

    def is_zero(self, x):
        return x.is_zero

    def is_exact_zero(self, x):
        return x.is_exact_zero

    def zero_witness_tv(self, x):
        return x.zero_witness_tv()

    def abs_tv(self, x):
        return x.abs_tv()

    def inv(self, x):
        return x.inv()

    def __eq__(self, other):
        return (isinstance(other, PadicRing)
                and other.p == self.p and other.rel == self.rel)

    def __hash__(self):
        return hash(("PadicRing", self.p, self.rel))

    def __repr__(self):
        return f"PadicRing(p={self.p}, rel={self.rel})"


class QuadExtElem:
    """a + b*theta in E = Q_p(theta), theta**2 = a_p*theta - eps*p.

    The valuation is min(v(a), v(b) + 1/2); an integer and a half-integer
    never coincide, so the minimum is always attained by a unique term and
    valuations stay exact under the capped arithmetic.
    """

    __slots__ = ("params", "a", "b")

    def __init__(self, params, a, b):
        self.params = params
        self.a = a
        self.b = b

    # -- constructors ------------------------------------------------

    @classmethod
    def from_pair(cls, params, a, b, rel=DEFAULT_PREC):
        p = params.p
        if not isinstance(a, PadicApprox):
            a = PadicApprox.from_int(p, a, rel)
        if not isinstance(b, PadicApprox):
            b = PadicApprox.from_int(p, b, rel)
        return cls(params, a, b)

    @classmethod
    def from_int(cls, params, n, rel=DEFAULT_PREC):
        return cls(params, PadicApprox.from_int(params.p, n, rel),
                   PadicApprox.exact_zero(params.p))

    @classmethod
    def theta(cls, params, rel=DEFAULT_PREC):
        return cls(params, PadicApprox.exact_zero(params.p),
                   PadicApprox.from_int(params.p, 1, rel))

    # -- predicates ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero

    @property
    def is_exact_zero(self) -> bool:
        return self.a.is_exact_zero and self.b.is_exact_zero

    def zero_witness_tv(self):
        wa = self.a.zero_witness_tv()
        wb = self.b.zero_witness_tv()
        if wa is None or wb is None:
            return None
        return min(wa, wb + 1)

    def abs_tv(self):
        return min(self.a.abs_tv(), self.b.abs_tv() + 1)

    def valuation(self):
        """Valuation in (1/2)Z as a Fraction; +inf (lower bound) for zeros."""
        va = self.a.twice_valuation()
        vb = self.b.twice_valuation()
        tv = min(va, vb + 1)
        return INF if tv is INF else Fraction(tv, 2)

    def twice_valuation(self):
        va = self.a.twice_valuation()
        vb = self.b.twice_valuation()
        return min(va, vb + 1)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadExtElem):
            if other.params != self.params:
                raise ValueError("FormParams mismatch between operands")
            return other
        if isinstance(other, int):
            return QuadExtElem.from_int(self.params, other,
                                        max(self.a.rel, self.b.rel, 1))
        return None

    def __add__(self, other):
        if type(other) is QuadExtElem:
            return QuadExtElem(self.params, self.a + other.a, self.b + other.b)
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QuadExtElem(self.params, self.a + y.a, self.b + y.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtElem(self.params, -self.a, -self.b)

    def __sub__(self, other):
        if type(other) is QuadExtElem:
            return QuadExtElem(self.params, self.a - other.a, self.b - other.b)
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QuadExtElem(self.params, self.a - y.a, self.b - y.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if type(other) is QuadExtElem:
            y = other
            if y.params is not self.params and y.params != self.params:
                raise ValueError("FormParams mismatch between operands")
        else:
            y = self._coerce(other)
            if y is None:
                return NotImplemented
        pa = self.params
        xa, xb = self.a, self.b
        ya, yb = y.a, y.b
        bd = xb * yb
        a = xa * ya - bd._mul_int(pa.eps * pa.p)
        b = xa * yb + xb * ya
        if pa.a_p:
            b = b + bd._mul_int(pa.a_p)
        return QuadExtElem(pa, a, b)

    __rmul__ = __mul__

    def scale(self, c: PadicApprox):
        """Multiply by a base-field element."""
        return QuadExtElem(self.params, self.a * c, self.b * c)

    def conj(self):
        """The nontrivial automorphism a + b*theta -> (a + a_p*b) - b*theta."""
        return QuadExtElem(self.params, self.a + self.b * self.params.a_p,
                           -self.b)

    def norm(self) -> PadicApprox:
        """x * conj(x), an element of Q_p: a^2 + a_p*a*b + eps*p*b^2."""
        pa = self.params
        return (self.a * self.a + self.a * self.b * pa.a_p
                + self.b * self.b * (pa.eps * pa.p))

    def inv(self):
        w = self.zero_witness_tv()
        if w is not None:
            raise ZeroAtPrecision(w)
        return self.conj().scale(self.norm().inv())

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self * y.inv()

    def __eq__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return (self - y).is_zero

    __hash__ = None

    def __repr__(self):
        return f"({self.a!r}) + ({self.b!r})*theta"


class QuadRing:
    """Coefficient-ring adapter for E = Q_p(theta)."""

    __slots__ = ("params", "rel")

    def __init__(self, params, rel=DEFAULT_PREC):
        self.params = params
        self.rel = rel

    @property
    def p(self):
        return self.params.p

    def base(self):
        return PadicRing(self.params.p, self.rel)

    def zero(self):
        return QuadExtElem.from_int(self.params, 0, self.rel)

    def one(self):
        return QuadExtElem.from_int(self.params, 1, self.rel)

    def from_int(self, n):
        return QuadExtElem.from_int(self.params, n, self.rel)

    def embed(self, x: PadicApprox):
        """Embed a base-field element as a + 0*theta."""
        return QuadExtElem(self.params, x, PadicApprox.exact_zero(self.p))

    def alpha(self):
        return QuadExtElem.theta(self.params, self.rel)

    def beta(self):
        return QuadExtElem.from_pair(self.params, self.params.a_p, -1, self.rel)

    def is_zero(self, x):
        return x.is_zero

    def is_exact_zero(self, x):
        return x.is_exact_zero

    def zero_witness_tv(self, x):
        return x.zero_witness_tv()

    def abs_tv(self, x):
        return x.abs_tv()

    def inv(self, x):
        return x.inv()

    def __eq__(self, other):
        return (isinstance(other, QuadRing)
                and other.params == self.params and other.rel == self.rel)

    def __hash__(self):
        return hash(("QuadRing", self.params, self.rel))

    def __repr__(self):
        return f"QuadRing(p={self.p}, a_p={self.params.a_p}, rel={self.rel})"


# -- named operations ---------------------------------------------------

def quad_mul(x: QuadExtElem, y: QuadExtElem) -> QuadExtElem:
    """Product in E, reducing theta**2 = a_p*theta - eps*p."""
    return x * y


def quad_conj(x: QuadExtElem) -> QuadExtElem:
    """Swap the two roots: an involution fixing Q_p."""
    return x.conj()


def quad_inv(x: QuadExtElem) -> QuadExtElem:
    """Inverse conj(x)/norm(x); raises ZeroAtPrecision on a zero operand."""
    return x.inv()


def valuation(x):
    """Valuation of a PadicApprox or QuadExtElem (+inf for zeros)."""
    return x.valuation()


def root_power(params: FormParams, which: str, k: int,
               rel: int = DEFAULT_PREC) -> QuadExtElem:
    """alpha**k or beta**k by square-and-multiply; valuation is exactly k/2.

    ``which`` is "alpha" or "beta".  Negative k inverts once at the end,
    which keeps the precision loss to a single norm division.
    """
    if which == "alpha":
        base = QuadExtElem.theta(params, rel)
    elif which == "beta":
        base = QuadExtElem.from_pair(params, params.a_p, -1, rel)
    else:
        raise ValueError(f"which must be 'alpha' or 'beta', got {which!r}")
    e = abs(k)
    acc = QuadExtElem.from_int(params, 1, rel)
    sq = base
    while e:
        if e & 1:
            acc = acc * sq
        e >>= 1
        if e:
            sq = sq * sq
    if k < 0:
        acc = acc.inv()
    if not acc.is_zero:
        if (acc.a.unit and acc.a.rel < 1) or (acc.b.unit and acc.b.rel < 1):
            raise PrecisionExhausted(
                f"{which}**{k} retains no significant digit at rel={rel}")
    return acc
