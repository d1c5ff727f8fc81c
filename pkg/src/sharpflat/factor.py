"""Sharp/flat factorization of one-variable interpolating pairs.

A pair (mu_alpha, mu_beta) of series over E whose values at every level-m
character are alpha^(-n) resp. beta^(-n) times a common constant (n = m+1)
can be written as a bounded row vector times a logarithmic matrix:

    (mu_alpha  mu_beta) = (mu_sharp  mu_flat) * M.

``factor_pair`` recovers the bounded components by the adjugate formula
(divide by det M), ``combine_pair`` is its inverse, ``verify_pair`` checks
the character-value property directly.  ``growth_order`` measures the
valuation growth that separates bounded series from the logarithmic ones,
and ``random_bounded`` synthesizes deterministic integral test series.

Factorization followed by recombination is the identity on the truncated
coefficients whatever the truncation degree; character-value checks, by
contrast, see a truncated series only up to a tail bound, so they are run
on fully held polynomials (see ``exact_combine_pair``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .padic import DEFAULT_PREC, PadicRing, QuadRing, root_power
from .series import (
    Series1,
    divide_series,
    extend,
    mul_trunc,
    reduce_mod_cyclo,
    series_min_abs_tv,
)

INF = math.inf


@dataclass(frozen=True)
class CharSpec:
    """A finite-order character: branch variable and level.

    The character sends the topological generator of its branch to a root
    of unity of exact order p^m (conductor p^(m+1)), so evaluation is
    reduction modulo Phi_{p^m}(1+X) in the branch variable and the
    interpolation exponent is n = m + 1.
    """

    branch: str  # "p" (X-side) or "pbar" (Y-side)
    m: int

    def __post_init__(self):
        if self.branch not in ("p", "pbar"):
            raise ValueError(f"branch must be 'p' or 'pbar', got {self.branch!r}")
        if self.m < 1:
            raise ValueError(f"level must be >= 1, got {self.m}")

    @property
    def n(self) -> int:
        return self.m + 1


@dataclass
class CharValueReport:
    """Outcome of a character-value identity check at one level.

    ``residual_valuation`` is the valuation of the residual if the check
    failed, or the witnessed absolute precision of the zero residual if it
    passed (a lower bound).  Recovered constants are classes in the
    cyclotomic quotient ring over E; fields not produced by a given check
    stay None.
    """

    level: object  # an int, or an (m_x, m_y) pair for two-variable checks
    passed: bool
    residual_valuation: object  # Fraction or math.inf
    C_omega: object = None
    A_omega: object = None
    B_omega: object = None
    D_omega: object = None
    E_omega: object = None
    K_omega: object = None
    detail: str = ""


@dataclass
class GrowthReport:
    """Result of a growth-order scan: B(u) = max(-v(c_n) - u*log_p(n))."""

    u: float
    bound: float  # -inf when every scanned coefficient vanishes
    attained_at: object  # index of the maximizing coefficient, or None
    offset: object = None  # the c the scan was compared against, if any
    passed: object = None  # bound <= c, when c was supplied


def _residual_from(diff) -> tuple:
    """(passed, valuation-or-witness) for a possibly-zero ring element."""
    w = diff.zero_witness_tv()
    if w is not None:
        return True, (INF if w is INF else Fraction(w, 2))
    return False, _tv_to_val(diff)


def _tv_to_val(x):
    t = x.twice_valuation()
    return INF if t is INF else Fraction(t, 2)


def factor_pair(mu_alpha: Series1, mu_beta: Series1, M) -> tuple:
    """Split an interpolating pair into its bounded sharp/flat components.

    Computes (m22*mu_alpha - m21*mu_beta)/det and
    (-m12*mu_alpha + m11*mu_beta)/det.  Recombining through ``combine_pair``
    reproduces the inputs on the shared truncation within tracked precision.
    """
    mu_alpha._check_same(mu_beta)
    (m11, m12), (m21, m22) = M.entries
    det = M.det()
    num_sharp = mul_trunc(m22, mu_alpha) - mul_trunc(m21, mu_beta)
    num_flat = mul_trunc(m11, mu_beta) - mul_trunc(m12, mu_alpha)
    return divide_series(num_sharp, det), divide_series(num_flat, det)


def combine_pair(mu_sharp: Series1, mu_flat: Series1, M) -> tuple:
    """Row vector times matrix: the inverse of ``factor_pair``."""
    mu_sharp._check_same(mu_flat)
    (m11, m12), (m21, m22) = M.entries
    mu_alpha = mul_trunc(mu_sharp, m11) + mul_trunc(mu_flat, m21)
    mu_beta = mul_trunc(mu_sharp, m12) + mul_trunc(mu_flat, m22)
    return mu_alpha, mu_beta


def exact_combine_pair(mu_sharp: Series1, mu_flat: Series1, M) -> tuple:
    """Recombine with full polynomial products (no truncation tail).

    Both inputs and the matrix entries are taken as exact polynomials and
    everything is padded so the products are held completely.  Use this to
    synthesize pairs whose character values are exact; the plain
    ``combine_pair`` keeps the common truncation instead.
    """
    d = mu_sharp.deg + M.entries[0][0].deg - 1
    sharp = extend(mu_sharp, d)
    flat = extend(mu_flat, d)
    (m11, m12), (m21, m22) = ((extend(e, d) for e in row) for row in M.entries)
    mu_alpha = mul_trunc(sharp, m11) + mul_trunc(flat, m21)
    mu_beta = mul_trunc(sharp, m12) + mul_trunc(flat, m22)
    return mu_alpha, mu_beta


def verify_pair(mu_alpha: Series1, mu_beta: Series1, levels) -> list:
    """Check alpha^n * mu_alpha = beta^n * mu_beta at each character level.

    For each m in ``levels`` (with n = m + 1) both series are reduced into
    the level-m cyclotomic ring and the rescaled values are compared; the
    common value C_omega = alpha^n * mu_alpha(omega) is reported.  Trivial
    characters (m = 0) are outside the contract and rejected.
    """
    mu_alpha._check_same(mu_beta)
    ring = mu_alpha.ring
    if not isinstance(ring, QuadRing):
        raise ValueError("verify_pair expects series over the quadratic extension")
    params = ring.params
    reports = []
    for m in levels:
        if m < 1:
            raise ValueError(f"levels must be >= 1, got {m}")
        phi_deg = (params.p - 1) * params.p ** (m - 1)
        if phi_deg > mu_alpha.deg:
            raise ValueError(
                f"level {m} needs degree >= {phi_deg}, have {mu_alpha.deg}")
        n = m + 1
        va = reduce_mod_cyclo(mu_alpha, m)
        vb = reduce_mod_cyclo(mu_beta, m)
        an = root_power(params, "alpha", n, ring.rel)
        bn = root_power(params, "beta", n, ring.rel)
        lhs = va * an
        rhs = vb * bn
        passed, residual = _residual_from(lhs - rhs)
        reports.append(CharValueReport(level=m, passed=passed,
                                       residual_valuation=residual,
                                       C_omega=lhs))
    return reports


def growth_order(s: Series1, u, c=None) -> GrowthReport:
    """Scan B(u) = max over 1 <= n < deg of (-v(c_n) - u*log_p(n)).

    A desk-scale proxy for order-u growth: a series lies in the order-u
    class with offset c exactly when B(u) <= c.  Coefficients that vanish
    at their precision contribute nothing to the scan.
    """
    if u < 0:
        raise ValueError("growth exponent must be >= 0")
    p = s.ring.p
    if p is None:
        raise ValueError("growth_order needs p-adic coefficients")
    best = -INF
    best_at = None
    for n in range(1, s.deg):
        cf = s.coeffs[n]
        tv = cf.twice_valuation()
        if tv is INF:
            continue
        val = -tv / 2 - u * math.log(n, p)
        if val > best:
            best = val
            best_at = n
    return GrowthReport(u=u, bound=best, attained_at=best_at, offset=c,
                        passed=None if c is None else best <= c)


# splitmix64: the standard 64-bit mixing generator (Steele-Lea-Flood
# constants).  State advances by the golden-gamma increment; each output
# word is the finalizer applied to the new state.
_GAMMA = 0x9E3779B97F4A7C15
_M64 = (1 << 64) - 1


def _splitmix64_stream(seed: int):
    state = seed & _M64
    while True:
        state = (state + _GAMMA) & _M64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        yield z ^ (z >> 31)


def random_bounded(p: int, d: int, seed: int, rel: int = DEFAULT_PREC) -> Series1:
    """Deterministic pseudo-random integral series: d coefficients mod p^rel.

    Coefficient n is assembled from consecutive splitmix64 words (enough
    64-bit words to cover p^rel, plus one) reduced modulo p^rel, so every
    coefficient has valuation >= 0 and the same (p, d, seed, rel) always
    reproduces the same series.
    """
    modulus = p**rel
    words = (modulus.bit_length() + 63) // 64 + 1
    stream = _splitmix64_stream(seed)
    ring = PadicRing(p, rel)
    coeffs = []
    for _ in range(d):
        acc = 0
        for _ in range(words):
            acc = (acc << 64) | next(stream)
        coeffs.append(ring.from_int(acc % modulus))
    return Series1(ring, "X", tuple(coeffs))


def division_loss_digits(inputs, outputs) -> Fraction:
    """Worst absolute-precision drop (in digits) from inputs to outputs."""
    in_abs = min(series_min_abs_tv(s) for s in inputs)
    out_abs = min(series_min_abs_tv(s) for s in outputs)
    if out_abs is INF:
        return Fraction(0)
    if in_abs is INF:
        in_abs = out_abs
    return Fraction(in_abs - out_abs, 2)
