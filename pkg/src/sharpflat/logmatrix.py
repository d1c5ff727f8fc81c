"""Finite-level logarithmic matrices and their structural identities.

The level-n matrix is the product

    M^(n) = C_1 * ... * C_n * C^(-n-2) * A,

where C_k = [[a_p, 1], [-eps*Phi_{p^k}(1+X), 0]] is the level-k companion
block, C is the same block with the cyclotomic value replaced by its
constant term p, and A = [[-1, -1], [beta, alpha]] conjugates C into
diag(alpha, beta).  The integral head H = C_1*...*C_n is computed in exact
integer polynomial arithmetic; the closed form

    C^(-n-2)*A = [[-alpha^(-n-2), -beta^(-n-2)],
                  [beta*alpha^(-n-2), alpha*beta^(-n-2)]]

is applied in a single final step, which confines every negative valuation
to one place.

Because each C_k has constant term C, consecutive levels agree modulo
(1+X)^(p^n) - 1 (stabilization), the determinant has the exact closed form
checked by ``det_check``, and evaluating at a level-m character collapses
the matrix to rank one (``rank1_at_level``).  With a_p = 0 the product of
an even number of companion blocks is diagonal, which recovers the
plus/minus splitting blocks (``pollack_blocks``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .factor import CharValueReport, _residual_from
from .padic import DEFAULT_PREC, FormParams, QuadRing, root_power
from .series import (
    INT,
    Series1,
    _reduce_by_monic_int,
    constant_series,
    cyclotomic_modulus,
    mul_trunc,
    one_series,
    reduce_mod_cyclo,
    series_from_ints,
    zero_series,
)

INF = math.inf


class VerificationError(AssertionError):
    """An identity that is exact polynomial algebra failed to hold."""


class MatrixSeries:
    """A 2x2 matrix of one-variable series sharing degree and variable."""

    __slots__ = ("entries", "params", "level", "var")

    def __init__(self, entries, params, level, var):
        self.entries = tuple(tuple(row) for row in entries)
        self.params = params
        self.level = level
        self.var = var

    @property
    def deg(self) -> int:
        return self.entries[0][0].deg

    @property
    def ring(self):
        return self.entries[0][0].ring

    def det(self) -> Series1:
        (m11, m12), (m21, m22) = self.entries
        return mul_trunc(m11, m22) - mul_trunc(m12, m21)

    def __repr__(self):
        return (f"MatrixSeries(level={self.level}, var={self.var}, "
                f"deg={self.deg}, ring={self.ring!r})")


def _mat_mul(a, b):
    """2x2 product of series matrices (plain tuples of rows)."""
    return tuple(
        tuple(mul_trunc(a[i][0], b[0][j]) + mul_trunc(a[i][1], b[1][j])
              for j in range(2))
        for i in range(2))


def companion_matrix(params: FormParams, k: int, d: int,
                     var: str = "X") -> MatrixSeries:
    """C_k = [[a_p, 1], [-eps*Phi_{p^k}(1+X), 0]] over exact integers."""
    if k < 1:
        raise ValueError(f"level must be >= 1, got {k}")
    phi = list(cyclotomic_modulus(params.p, k))[:d]
    phi += [0] * (d - len(phi))
    entries = (
        (constant_series(INT, var, params.a_p, d), one_series(INT, var, d)),
        (series_from_ints(INT, var, [-params.eps * c for c in phi]),
         zero_series(INT, var, d)),
    )
    return MatrixSeries(entries, params, k, var)


def companion_constant(params: FormParams, d: int, var: str = "X") -> MatrixSeries:
    """C = [[a_p, 1], [-eps*p, 0]], the common constant term of every C_k."""
    entries = (
        (constant_series(INT, var, params.a_p, d), one_series(INT, var, d)),
        (constant_series(INT, var, -params.eps * params.p, d),
         zero_series(INT, var, d)),
    )
    return MatrixSeries(entries, params, 0, var)


def diagonalizer(params: FormParams, d: int, rel: int = DEFAULT_PREC,
                 var: str = "X") -> MatrixSeries:
    """A = [[-1, -1], [beta, alpha]], satisfying A^(-1) C A = diag(alpha, beta)."""
    qr = QuadRing(params, rel)
    mo = qr.from_int(-1)
    entries = (
        (constant_series(qr, var, mo, d), constant_series(qr, var, mo, d)),
        (constant_series(qr, var, qr.beta(), d),
         constant_series(qr, var, qr.alpha(), d)),
    )
    return MatrixSeries(entries, params, 0, var)


def _tail_block(params: FormParams, n: int, rel: int):
    """C^(-n-2)*A as a 2x2 of constants in E (closed form)."""
    am = root_power(params, "alpha", -(n + 2), rel)
    bm = root_power(params, "beta", -(n + 2), rel)
    qr = QuadRing(params, rel)
    return ((-am, -bm), (qr.beta() * am, qr.alpha() * bm))


def _scale_int_series(s: Series1, t, qring: QuadRing, var: str) -> Series1:
    coeffs = tuple(qring.zero() if c == 0 else qring.from_int(c) * t
                   for c in s.coeffs)
    return Series1(qring, var, coeffs)


def integral_head(params: FormParams, n: int, d: int, var: str = "X"):
    """C_1*...*C_n over exact integers, truncated to degree d."""
    acc = companion_matrix(params, 1, d, var).entries
    for k in range(2, n + 1):
        acc = _mat_mul(acc, companion_matrix(params, k, d, var).entries)
    return acc


def logmatrix_level(params: FormParams, n: int, d: int,
                    rel: int = DEFAULT_PREC, var: str = "X") -> MatrixSeries:
    """The level-n matrix M^(n) to degree d at relative precision rel.

    The integral head is exact; the only divisions happen inside the
    closed-form tail block, so row-one coefficients sit at valuation
    >= -(n+2)/2 before the cancellations that make the levels stabilize.
    """
    if n < 1:
        raise ValueError(f"level must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"degree must be >= 1, got {d}")
    head = integral_head(params, n, d, var)
    tail = _tail_block(params, n, rel)
    qr = QuadRing(params, rel)
    entries = tuple(
        tuple(_scale_int_series(head[i][0], tail[0][j], qr, var)
              + _scale_int_series(head[i][1], tail[1][j], qr, var)
              for j in range(2))
        for i in range(2))
    return MatrixSeries(entries, params, n, var)


def logmatrix_to_degree(params: FormParams, d: int, rel: int = DEFAULT_PREC,
                        var: str = "X") -> MatrixSeries:
    """The limit matrix represented to degree d.

    Uses the least level n with p^n >= d: by stabilization, coefficients
    below degree p^n are final modulo (1+X)^(p^n) - 1, so this is the
    canonical finite representative of the limit.
    """
    n = 1
    while params.p**n < d:
        n += 1
    return logmatrix_level(params, n, d, rel, var)


@dataclass
class StabilizationReport:
    """Reduction of M^(n+1) - M^(n) modulo (1+X)^(p^n) - 1."""

    params: FormParams
    n: int
    degree: int
    passed: bool
    witness_tv: object  # min twice-absolute-precision of the vanished residual
    failures: tuple  # (row, col, coeff_index, twice_valuation) for nonzero residuals


def stabilization_check(params: FormParams, n: int, d=None,
                        rel: int = DEFAULT_PREC) -> StabilizationReport:
    """Check that consecutive levels agree modulo (1+X)^(p^n) - 1."""
    p = params.p
    if d is None:
        d = p ** (n + 1)
    if d <= p**n:
        raise ValueError(f"degree {d} must exceed p^n = {p**n}")
    ma = logmatrix_level(params, n, d, rel)
    mb = logmatrix_level(params, n + 1, d, rel)
    modulus = tuple(math.comb(p**n, j) - (1 if j == 0 else 0)
                    for j in range(p**n + 1))
    ring = ma.ring
    witness = INF
    failures = []
    for i in range(2):
        for j in range(2):
            diff = mb.entries[i][j] - ma.entries[i][j]
            rem = _reduce_by_monic_int(list(diff.coeffs), modulus, ring)
            for k, c in enumerate(rem):
                w = ring.zero_witness_tv(c)
                if w is None:
                    failures.append((i, j, k, c.twice_valuation()))
                else:
                    witness = min(witness, w)
    return StabilizationReport(params=params, n=n, degree=d,
                               passed=not failures, witness_tv=witness,
                               failures=tuple(failures))


def det_closed_form(params: FormParams, n: int, d: int,
                    rel: int = DEFAULT_PREC, var: str = "X") -> Series1:
    """((1+X)^(p^n) - 1)/X * (beta - alpha) / (eps^2 * p^(n+2))."""
    qr = QuadRing(params, rel)
    scalar = _beta_minus_alpha(qr) * qr.from_int(
        params.eps**2 * params.p ** (n + 2)).inv()
    pn = params.p**n
    coeffs = tuple(
        qr.zero() if j + 1 > pn else qr.from_int(math.comb(pn, j + 1)) * scalar
        for j in range(d))
    return Series1(qr, var, coeffs)


def _beta_minus_alpha(qr: QuadRing):
    # beta - alpha = a_p - 2*theta, of valuation 1/2
    return qr.beta() - qr.alpha()


@dataclass
class DetReport:
    """Exact and capped determinant identity at one level.

    ``exact_identity`` compares det(C_1...C_n) with eps^n times the exact
    integer polynomial ((1+X)^(p^n)-1)/X, with zero tolerance.
    ``capped_witness_tv`` witnesses that the assembled matrix determinant
    matches the closed form within tracked precision.
    ``limit_distance_tv`` gives, for each coefficient index below p, twice
    the valuation of (det M^(n) - limit closed form), measuring the p-adic
    approach to log(1+X)/X * (beta-alpha)/(alpha*beta)^2.
    """

    params: FormParams
    n: int
    degree: int
    exact_identity: bool
    mismatch_index: object
    capped_passed: bool
    capped_witness_tv: object
    limit_distance_tv: tuple

    @property
    def passed(self) -> bool:
        return self.exact_identity and self.capped_passed


def det_check(params: FormParams, n: int, d=None,
              rel: int = DEFAULT_PREC) -> DetReport:
    """Verify the determinant identity at level n, exactly and as capped."""
    p = params.p
    if n < 1:
        raise ValueError(f"level must be >= 1, got {n}")
    if d is None:
        d = min(p**n, 3 * p)
    head = integral_head(params, n, d)
    det_head = (mul_trunc(head[0][0], head[1][1])
                - mul_trunc(head[0][1], head[1][0]))
    pn = p**n
    target = [params.eps**n * math.comb(pn, j + 1) if j + 1 <= pn else 0
              for j in range(d)]
    mismatch = None
    for j, (a, b) in enumerate(zip(det_head.coeffs, target)):
        if a != b:
            mismatch = j
            break
    # capped route: determinant of the assembled matrix against closed form
    m = logmatrix_level(params, n, d, rel)
    dm = m.det()
    closed = det_closed_form(params, n, d, rel)
    ring = m.ring
    witness = INF
    capped_ok = True
    for c in (dm - closed).coeffs:
        w = ring.zero_witness_tv(c)
        if w is None:
            capped_ok = False
        else:
            witness = min(witness, w)
    # distance to the limit on low coefficients
    qr = QuadRing(params, rel)
    scalar = _beta_minus_alpha(qr) * qr.from_int(
        (params.eps * p) ** 2).inv()
    distances = []
    sign = 1
    for j in range(min(p, d)):
        limit_j = (qr.embed(qr.base().from_fraction(Fraction(sign, j + 1)))
                   * scalar)
        diff = dm.coeffs[j] - limit_j
        tv = diff.twice_valuation()
        if diff.is_zero:
            tv = diff.abs_tv()
        distances.append(tv)
        sign = -sign
    return DetReport(params=params, n=n, degree=d,
                     exact_identity=mismatch is None, mismatch_index=mismatch,
                     capped_passed=capped_ok, capped_witness_tv=witness,
                     limit_distance_tv=tuple(distances))


def rank1_at_level(M: MatrixSeries, m: int) -> CharValueReport:
    """Check the rank-one shape of the matrix at a level-m character.

    With n = m + 1, asserts alpha^n*m11(omega) = beta^n*m12(omega) and
    alpha^n*m21(omega) = beta^n*m22(omega) in the cyclotomic quotient ring,
    and reports the recovered constants A = -alpha^n*m11(omega),
    B = -alpha^n*m21(omega).  The matrix must hold its full polynomial
    (degree >= p^level) so reduction is evaluation, not an approximation.
    """
    params = M.params
    p = params.p
    phi_deg = (p - 1) * p ** (m - 1)
    if p**M.level < phi_deg:
        raise ValueError(
            f"matrix level {M.level} too small for character level {m}")
    if M.deg < p**M.level:
        raise ValueError(
            f"matrix degree {M.deg} truncates the level-{M.level} polynomial "
            f"(need >= {p**M.level})")
    n = m + 1
    rel = M.ring.rel
    an = root_power(params, "alpha", n, rel)
    bn = root_power(params, "beta", n, rel)
    ev = [[reduce_mod_cyclo(M.entries[i][j], m) for j in range(2)]
          for i in range(2)]
    r1 = ev[0][0] * an - ev[0][1] * bn
    r2 = ev[1][0] * an - ev[1][1] * bn
    ok1, res1 = _residual_from(r1)
    ok2, res2 = _residual_from(r2)
    return CharValueReport(
        level=m, passed=ok1 and ok2, residual_valuation=min(res1, res2),
        A_omega=-(ev[0][0] * an), B_omega=-(ev[1][0] * an),
        detail="" if ok1 and ok2 else "row " + ("1" if not ok1 else "2"))


def pollack_blocks(params: FormParams, m: int, d=None) -> tuple:
    """Diagonal of C_1*...*C_{2m} in the a_p = 0 case, verified exactly.

    The product is diag((-eps)^m * prod Phi_{p^{2k}},
    (-eps)^m * prod Phi_{p^{2k-1}}) for k = 1..m, with zero off-diagonal:
    the finite-level plus/minus logarithm blocks.  Exact integer
    arithmetic, zero tolerance.
    """
    if params.a_p != 0:
        raise ValueError("pollack_blocks requires a_p = 0")
    if m < 1:
        raise ValueError(f"pair count must be >= 1, got {m}")
    p = params.p
    if d is None:
        d = p ** (2 * m)
    head = integral_head(params, 2 * m, d)
    if any(c != 0 for c in head[0][1].coeffs + head[1][0].coeffs):
        raise VerificationError("off-diagonal entries do not vanish")
    sign = (-params.eps) ** m
    even = [sign]
    odd = [sign]
    for k in range(1, m + 1):
        even = _trunc_int_mul(even, cyclotomic_modulus(p, 2 * k), d)
        odd = _trunc_int_mul(odd, cyclotomic_modulus(p, 2 * k - 1), d)
    for got, want, name in ((head[0][0], even, "first"),
                            (head[1][1], odd, "second")):
        want = want + [0] * (d - len(want))
        if list(got.coeffs) != want[:d]:
            raise VerificationError(f"{name} diagonal block mismatch")
    return head[0][0], head[1][1]


def _trunc_int_mul(a, b, d):
    out = [0] * min(len(a) + len(b) - 1, d)
    for i, ai in enumerate(a):
        if ai and i < d:
            for j, bj in enumerate(b):
                if i + j < d:
                    out[i + j] += ai * bj
    return out
