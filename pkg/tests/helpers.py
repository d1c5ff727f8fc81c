"""Shared test oracles: exact arithmetic in Q and in the quadratic extension.

``ExactQuad`` mirrors QuadExtElem over Fractions, so every capped-precision
result can be checked for soundness: the approximation must agree with the
exact value modulo p to the claimed absolute precision.
"""

from fractions import Fraction

from sharpflat.padic import PadicApprox, QuadExtElem

INF = float("inf")


def frac_vp(fr, p):
    """Exact valuation of a Fraction (inf for zero)."""
    fr = Fraction(fr)
    if fr == 0:
        return INF
    v = 0
    n = fr.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = fr.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


class ExactQuad:
    """a + b*theta with Fraction coordinates; exact mirror of QuadExtElem."""

    def __init__(self, params, a, b=0):
        self.params = params
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, other):
        return ExactQuad(self.params, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return ExactQuad(self.params, self.a - other.a, self.b - other.b)

    def __neg__(self):
        return ExactQuad(self.params, -self.a, -self.b)

    def __mul__(self, other):
        pa = self.params
        bd = self.b * other.b
        return ExactQuad(pa,
                         self.a * other.a - bd * pa.eps * pa.p,
                         self.a * other.b + self.b * other.a + bd * pa.a_p)

    def conj(self):
        return ExactQuad(self.params, self.a + self.params.a_p * self.b, -self.b)

    def norm(self):
        pa = self.params
        return self.a**2 + pa.a_p * self.a * self.b + pa.eps * pa.p * self.b**2

    def inv(self):
        n = self.norm()
        c = self.conj()
        return ExactQuad(self.params, c.a / n, c.b / n)

    def pow(self, k):
        acc = ExactQuad(self.params, 1)
        base = self if k >= 0 else self.inv()
        for _ in range(abs(k)):
            acc = acc * base
        return acc

    def twice_valuation(self):
        p = self.params.p
        va = frac_vp(self.a, p)
        vb = frac_vp(self.b, p)
        return min(2 * va, 2 * vb + 1)


def exact_alpha(params):
    return ExactQuad(params, 0, 1)


def exact_beta(params):
    return ExactQuad(params, params.a_p, -1)


def qp_matches(approx: PadicApprox, exact, p) -> bool:
    """Soundness: approx and the exact Fraction agree modulo p^absprec."""
    exact = Fraction(exact)
    tabs = approx.abs_tv()
    if tabs is INF or tabs == float("inf"):
        return exact == (0 if approx.unit == 0
                         else Fraction(approx.unit * p ** (approx.tv // 2)))
    absprec = tabs // 2
    if approx.unit == 0:
        lifted = Fraction(0)
    else:
        lifted = Fraction(approx.unit) * Fraction(p) ** (approx.tv // 2)
    return frac_vp(exact - lifted, p) >= absprec


def quad_matches(approx: QuadExtElem, exact: ExactQuad, p) -> bool:
    return (qp_matches(approx.a, exact.a, p)
            and qp_matches(approx.b, exact.b, p))


def exact_mat_mul(a, b):
    """2x2 multiply of matrices with ExactQuad (or Fraction-poly) entries."""
    return tuple(
        tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2))
        for i in range(2))
