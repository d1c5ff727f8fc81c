"""Two-variable sharp/flat factorization.

A quadruple of two-variable series indexed by the two roots,

    (L_aa  L_ba  L_ab  L_bb),   first index = X-side root, second = Y-side,

factors through the X-variable logarithmic matrix and then through the
Y-variable one:

    (L_aa  L_ba  L_ab  L_bb) = (L_ss  L_fs  L_sf  L_ff) * kron(Mx, My),

with composite indices ordered (1,1), (2,1), (1,2), (2,2) so the row-vector
identity holds literally.  Each determinant depends on one variable only,
so both divisions are fiber-wise and the two directions commute.

Character evaluation substitutes cyclotomic classes in both variables;
the interpolation, partial-derivative and vanishing identities of the
quadruple are checked in the resulting nested quotient ring.  As in the
one-variable case, these evaluations are exact only on fully held
polynomials, hence ``recombine_exact`` alongside the truncating
``recombine``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .factor import CharValueReport, _residual_from
from .padic import QuadRing, root_power
from .series import (
    CycloRing,
    Series2,
    derivative,
    divide_x,
    divide_y,
    extend,
    extend2,
    mul2_trunc,
    mul_x,
    mul_y,
    outer,
    partial_apply,
    reduce_mod_cyclo,
    zero_series2,
)

INF = math.inf


@dataclass(frozen=True)
class LQuadruple:
    """Four two-variable series over E in the fixed order (aa, ba, ab, bb).

    The first index is the X-side root, the second the Y-side root.  After
    factorization the same container holds the bounded parts in the order
    (sharp-sharp, flat-sharp, sharp-flat, flat-flat).
    """

    parts: tuple

    def __post_init__(self):
        if len(self.parts) != 4:
            raise ValueError("a quadruple needs exactly four series")
        degs = self.parts[0].degs
        ring = self.parts[0].ring
        for s in self.parts[1:]:
            if s.degs != degs:
                raise ValueError("degree mismatch inside the quadruple")
            if s.ring != ring:
                raise ValueError("ring mismatch inside the quadruple")

    @property
    def ring(self):
        return self.parts[0].ring

    @property
    def degs(self):
        return self.parts[0].degs

    @property
    def aa(self) -> Series2:
        return self.parts[0]

    @property
    def ba(self) -> Series2:
        return self.parts[1]

    @property
    def ab(self) -> Series2:
        return self.parts[2]

    @property
    def bb(self) -> Series2:
        return self.parts[3]


def _check_matrix(M, var):
    if M.var != var:
        raise ValueError(f"expected a matrix in {var}, got {M.var}")


def factor_x(L: LQuadruple, Mx) -> tuple:
    """Factor the X-direction out of the quadruple.

    For each fixed Y-side root, the (alpha, beta) pair in the first index
    is divided into sharp/flat components by the adjugate formula; the
    division by det(Mx), a series in X only, is applied to every X-fiber
    independently.  Returns (sharp_alpha, flat_alpha, sharp_beta, flat_beta).
    """
    _check_matrix(Mx, "X")
    (m11, m12), (m21, m22) = Mx.entries
    det = Mx.det()
    out = []
    for la, lb in ((L.aa, L.ba), (L.ab, L.bb)):
        num_sharp = mul_x(la, m22) - mul_x(lb, m21)
        num_flat = mul_x(lb, m11) - mul_x(la, m12)
        out.append(divide_x(num_sharp, det))
        out.append(divide_x(num_flat, det))
    return tuple(out)


def factor_y(halves: tuple, My) -> LQuadruple:
    """Factor the Y-direction out of the output of ``factor_x``.

    ``halves`` is (sharp_alpha, flat_alpha, sharp_beta, flat_beta); for each
    fixed first index the Y-side pair is divided by det(My) per Y-fiber.
    Returns the bounded quadruple in the order (ss, fs, sf, ff).
    """
    _check_matrix(My, "Y")
    sa, fa, sb, fb = halves
    (m11, m12), (m21, m22) = My.entries
    det = My.det()
    def split(pa, pb):
        num_sharp = mul_y(pa, m22) - mul_y(pb, m21)
        num_flat = mul_y(pb, m11) - mul_y(pa, m12)
        return divide_y(num_sharp, det), divide_y(num_flat, det)
    ss, sf = split(sa, sb)
    fs, ff = split(fa, fb)
    return LQuadruple((ss, fs, sf, ff))


def factor_full(L: LQuadruple, Mx, My) -> LQuadruple:
    """Both directions: recombining through kron(Mx, My) returns the input."""
    return factor_y(factor_x(L, Mx), My)


def recombine(Q: LQuadruple, Mx, My) -> LQuadruple:
    """Row vector times kron(Mx, My), on the common truncation grid.

    Computed through the separable structure (a Y-direction pass followed
    by an X-direction pass), which is equivalent to multiplying by the
    4x4 Kronecker matrix but quadratically cheaper.
    """
    _check_matrix(Mx, "X")
    _check_matrix(My, "Y")
    mx, my = Mx.entries, My.entries
    parts = []
    for l in range(2):
        mids = [Q.parts[0] * my[0][l] + Q.parts[2] * my[1][l],
                Q.parts[1] * my[0][l] + Q.parts[3] * my[1][l]]
        for k in range(2):
            parts.append(mids[0] * mx[0][k] + mids[1] * mx[1][k])
    # collected as (l=1: k=1, k=2; l=2: k=1, k=2) = (aa, ba, ab, bb)
    return LQuadruple(tuple(parts))


def recombine_exact(Q: LQuadruple, Mx, My) -> LQuadruple:
    """Recombine with fully held polynomial products (no truncation tail).

    Pads the bounded quadruple and the matrix entries so every product is
    a complete polynomial; character evaluations of the result are then
    exact.  The output grid is (dQx + deg Mx - 1, dQy + deg My - 1).
    """
    dqx, dqy = Q.degs
    dx = dqx + Mx.deg - 1
    dy = dqy + My.deg - 1
    qpad = LQuadruple(tuple(extend2(s, dx, dy) for s in Q.parts))
    mxp = _extended_matrix(Mx, dx)
    myp = _extended_matrix(My, dy)
    return recombine(qpad, mxp, myp)


def _extended_matrix(M, d):
    from .logmatrix import MatrixSeries
    entries = tuple(tuple(extend(e, d) for e in row) for row in M.entries)
    return MatrixSeries(entries, M.params, M.level, M.var)


def _padded_to(M, d):
    """Pad a matrix that holds its full polynomial out to degree d."""
    if M.deg >= d:
        return M
    if M.deg < M.params.p**M.level:
        raise ValueError(
            f"matrix degree {M.deg} truncates the level-{M.level} polynomial; "
            "character checks need the full matrix")
    return _extended_matrix(M, d)


def kronecker(Mx, My) -> tuple:
    """The 4x4 Kronecker matrix of two-variable series.

    Entry ((i,j),(k,l)) is mx[i][k](X) * my[j][l](Y), with composite
    indices enumerated (1,1), (2,1), (1,2), (2,2) in both directions.
    """
    _check_matrix(Mx, "X")
    _check_matrix(My, "Y")
    if Mx.ring != My.ring:
        raise ValueError("matrix coefficient rings differ")
    order = ((0, 0), (1, 0), (0, 1), (1, 1))
    return tuple(
        tuple(outer(Mx.entries[i][k], My.entries[j][l]) for (k, l) in order)
        for (i, j) in order)


def rowvec_times_kron(vec: tuple, kron: tuple) -> tuple:
    """Multiply a 4-row-vector of Series2 by a 4x4 of Series2 (full Cauchy)."""
    out = []
    for c in range(4):
        acc = None
        for r in range(4):
            term = mul2_trunc(vec[r], kron[r][c])
            acc = term if acc is None else acc + term
        out.append(acc)
    return tuple(out)


def _nested_eval(s: Series2, mx: int, my: int):
    """Evaluate at a pair of characters: reduce X at level mx, Y at my."""
    return reduce_mod_cyclo(partial_apply(s, "X", mx), my)


def _quad_params(L: LQuadruple):
    ring = L.ring
    if not isinstance(ring, QuadRing):
        raise ValueError("quadruple must have coefficients in the quadratic extension")
    return ring.params, ring.rel


def _check_level_pair(L, mx, my):
    p = L.ring.p
    for m, d, name in ((mx, L.degs[0], "X"), (my, L.degs[1], "Y")):
        if m < 1:
            raise ValueError(f"levels must be >= 1, got {m}")
        if (p - 1) * p ** (m - 1) > d:
            raise ValueError(
                f"{name}-level {m} needs degree >= {(p-1)*p**(m-1)}, have {d}")


def verify_interpolation4(L: LQuadruple, level_pairs) -> list:
    """Check the four rescaled character values agree at each level pair.

    With n_x = m_x + 1 and n_y = m_y + 1, the values
    alpha^(n_x)alpha^(n_y)L_aa, beta^(n_x)alpha^(n_y)L_ba,
    alpha^(n_x)beta^(n_y)L_ab, beta^(n_x)beta^(n_y)L_bb all evaluate to a
    common constant in the bi-cyclotomic ring; the report carries it and
    names the first deviating component on failure.
    """
    params, rel = _quad_params(L)
    reports = []
    for mx, my in level_pairs:
        _check_level_pair(L, mx, my)
        nx, ny = mx + 1, my + 1
        ax = root_power(params, "alpha", nx, rel)
        bx = root_power(params, "beta", nx, rel)
        ay = root_power(params, "alpha", ny, rel)
        by = root_power(params, "beta", ny, rel)
        scaled = []
        for part, scal in zip(L.parts, (ax * ay, bx * ay, ax * by, bx * by)):
            scaled.append(_nested_eval(part, mx, my) * scal)
        names = ("L_aa", "L_ba", "L_ab", "L_bb")
        passed = True
        residual = INF
        detail = ""
        for idx in (1, 2, 3):
            ok, res = _residual_from(scaled[idx] - scaled[0])
            residual = min(residual, res)
            if not ok and passed:
                passed = False
                detail = f"{names[idx]} deviates"
        reports.append(CharValueReport(level=(mx, my), passed=passed,
                                       residual_valuation=residual,
                                       C_omega=scaled[0], detail=detail))
    return reports


def derivative_relation(L: LQuadruple, level_pairs, Mx=None) -> list:
    """Check the X-derivative character identities at each level pair.

    Asserts beta^(n_y) * dL_ab = alpha^(n_y) * dL_aa and
    beta^(n_y) * dL_bb = alpha^(n_y) * dL_ba at the characters (d = d/dX),
    and reports the constants D = alpha^(n_y)*dL_aa(omega) and
    E = alpha^(n_y)*dL_ba(omega).  When the X-matrix is supplied, the
    mixed constant K = m22*D + dm22*alpha^(-n_x)*C - m21*E
    - dm21*beta^(-n_x)*C is reported as well.
    """
    params, rel = _quad_params(L)
    dparts = [derivative(part, "X") for part in L.parts]
    reports = []
    for mx, my in level_pairs:
        _check_level_pair(L, mx, my)
        nx, ny = mx + 1, my + 1
        ay = root_power(params, "alpha", ny, rel)
        by = root_power(params, "beta", ny, rel)
        ev = [_nested_eval(dp, mx, my) for dp in dparts]
        d_const = ev[0] * ay
        e_const = ev[1] * ay
        ok1, res1 = _residual_from(ev[2] * by - d_const)
        ok2, res2 = _residual_from(ev[3] * by - e_const)
        k_const = None
        if Mx is not None:
            k_const = _mixed_constant(L, Mx, mx, my, d_const, e_const)
        reports.append(CharValueReport(
            level=(mx, my), passed=ok1 and ok2,
            residual_valuation=min(res1, res2),
            D_omega=d_const, E_omega=e_const, K_omega=k_const,
            detail="" if ok1 and ok2 else
            ("dL_ab" if not ok1 else "dL_bb") + " deviates"))
    return reports


def _mixed_constant(L, Mx, mx, my, d_const, e_const):
    params, rel = _quad_params(L)
    nx, ny = mx + 1, my + 1
    ax = root_power(params, "alpha", nx, rel)
    ay = root_power(params, "alpha", ny, rel)
    c_const = _nested_eval(L.aa, mx, my) * (ax * ay)
    nested = d_const.ring
    m21, m22 = Mx.entries[1]
    ev22 = nested.embed_scalar(reduce_mod_cyclo(m22, mx))
    ev21 = nested.embed_scalar(reduce_mod_cyclo(m21, mx))
    dv22 = nested.embed_scalar(reduce_mod_cyclo(derivative(m22, "X"), mx))
    dv21 = nested.embed_scalar(reduce_mod_cyclo(derivative(m21, "X"), mx))
    a_neg = root_power(params, "alpha", -nx, rel)
    b_neg = root_power(params, "beta", -nx, rel)
    return (ev22 * d_const + dv22 * (c_const * a_neg)
            - ev21 * e_const - dv21 * (c_const * b_neg))


def sharp_value_relation(L: LQuadruple, Mx, My, level_pairs) -> list:
    """Check L_sharp_star(omega) * d(det Mx)(omega_x) = star^(-n_y) * K.

    The sharp X-components vanish against det(Mx) at the X-character, so
    their values there are controlled by the derivative of the determinant;
    this ties ``factor_x`` outputs to the constants from
    ``derivative_relation`` at every level pair.
    """
    params, rel = _quad_params(L)
    sharp_alpha, _, sharp_beta, _ = factor_x(L, Mx)
    ddet = derivative(Mx.det(), "X")
    reports = []
    for mx, my in level_pairs:
        _check_level_pair(L, mx, my)
        ny = my + 1
        rel_reports = derivative_relation(L, [(mx, my)], Mx=Mx)[0]
        k_const = rel_reports.K_omega
        nested = k_const.ring
        ddet_ev = nested.embed_scalar(reduce_mod_cyclo(ddet, mx))
        a_neg = root_power(params, "alpha", -ny, rel)
        b_neg = root_power(params, "beta", -ny, rel)
        ok = True
        residual = INF
        for part, scal in ((sharp_alpha, a_neg), (sharp_beta, b_neg)):
            lhs = _nested_eval(part, mx, my) * ddet_ev
            good, res = _residual_from(lhs - k_const * scal)
            ok = ok and good
            residual = min(residual, res)
        reports.append(CharValueReport(level=(mx, my), passed=ok,
                                       residual_valuation=residual,
                                       K_omega=k_const))
    return reports


def vanish_check(L: LQuadruple, Mx, level_pairs) -> list:
    """Check the adjugate numerators vanish at every requested character.

    m22*L_aa - m21*L_ba and m11*L_ba - m12*L_aa reduce to zero under the
    X-reduction followed by the Y-reduction: these numerators are det(Mx)
    times a bounded part, and det(Mx) vanishes at every X-side character.
    The matrix is padded to the quadruple's X-degree so the numerators are
    held completely.
    """
    _check_matrix(Mx, "X")
    Mx = _padded_to(Mx, L.degs[0])
    (m11, m12), (m21, m22) = Mx.entries
    num_sharp = mul_x(L.aa, m22) - mul_x(L.ba, m21)
    num_flat = mul_x(L.ba, m11) - mul_x(L.aa, m12)
    reports = []
    for mx, my in level_pairs:
        _check_level_pair(L, mx, my)
        passed = True
        residual = INF
        detail = ""
        for name, num in (("sharp", num_sharp), ("flat", num_flat)):
            ok, res = _residual_from(_nested_eval(num, mx, my))
            residual = min(residual, res)
            if not ok and passed:
                passed = False
                detail = f"{name} combination does not vanish"
        reports.append(CharValueReport(level=(mx, my), passed=passed,
                                       residual_valuation=residual,
                                       detail=detail))
    return reports


def random_quadruple(params, dx, dy, seed, rel) -> LQuadruple:
    """Deterministic bounded quadruple: four integral grids from one seed."""
    from .factor import random_bounded
    from .series import lift_to_quad
    qr = QuadRing(params, rel)
    parts = []
    for t in range(4):
        rows = []
        for i in range(dx):
            row = lift_to_quad(
                random_bounded(params.p, dy, seed * 4096 + t * 512 + i, rel), qr)
            rows.append(row.coeffs)
        parts.append(Series2(qr, rows))
    return LQuadruple(tuple(parts))
