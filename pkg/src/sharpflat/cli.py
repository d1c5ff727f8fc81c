"""Command-line entry point and JSON serialization.

Subcommands construct matrices, run factorizations and verification
suites, and read/write series as JSON.  Exit status is 0 on success, 1
when a verification suite reports failures, 2 on usage or parameter
errors.

JSON encoding is exact (no floating point): each Q_p coordinate is either

    {"v": <twice-valuation int>, "u": "<decimal unit string>", "r": <rel>}

or ``{"zero": true, "absprec": <digits or null>}``; an element of the
quadratic extension is ``{"a": ..., "b": ...}``; a one-variable series is
``{"var": "X", "deg": d, "coeffs": [...]}``; a two-variable series lists
only its nonzero coefficients as ``{"i": i, "j": j, "c": ...}`` triples.
Identical configuration (including the seed) produces byte-identical
output: keys are sorted and all diagnostics are encoded as strings.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from .factor import (
    combine_pair,
    division_loss_digits,
    exact_combine_pair,
    factor_pair,
    growth_order,
    random_bounded,
    verify_pair,
)
from .logmatrix import (
    VerificationError,
    det_check,
    logmatrix_level,
    logmatrix_to_degree,
    pollack_blocks,
    rank1_at_level,
    stabilization_check,
)
from .padic import DEFAULT_PREC, FormParams, PadicApprox, PadicRing, QuadExtElem, QuadRing
from .series import (
    CycloElem,
    Series1,
    Series2,
    lift_to_quad,
    log1p_over_x,
    partial_apply,
    reduce_mod_cyclo,
    series_min_abs_tv,
)
from .twovar import (
    LQuadruple,
    derivative_relation,
    factor_full,
    random_quadruple,
    recombine,
    recombine_exact,
    vanish_check,
    verify_interpolation4,
)

INF = math.inf


@dataclass
class JobConfig:
    """Validated run configuration shared by every subcommand."""

    command: str
    p: int = 3
    a_p: int = 3
    eps: int = 1
    deg: int = 30
    degy: int = None
    prec: int = DEFAULT_PREC
    levels: tuple = (1, 2)
    seed: int = 0
    level: int = None
    axis: str = "X"
    u: float = 0.0
    c: float = None
    inp: str = None
    out: str = None

    def params(self) -> FormParams:
        return FormParams(self.p, self.a_p, self.eps)


# -- encoding ---------------------------------------------------------------

def encode_qp(x: PadicApprox):
    if x.unit == 0:
        absprec = None if x.tv is None else x.tv // 2
        return {"zero": True, "absprec": absprec}
    return {"v": x.tv, "u": str(x.unit), "r": x.rel}


def encode_value(x):
    if isinstance(x, PadicApprox):
        return encode_qp(x)
    if isinstance(x, QuadExtElem):
        return {"a": encode_qp(x.a), "b": encode_qp(x.b)}
    if isinstance(x, CycloElem):
        return {"m": x.ring.m, "coeffs": [encode_value(c) for c in x.coeffs]}
    if isinstance(x, int):
        return {"v": 0, "u": str(x), "r": None}
    raise TypeError(f"cannot encode {type(x).__name__}")


def encode_series1(s: Series1):
    return {"var": s.var, "deg": s.deg,
            "coeffs": [encode_value(c) for c in s.coeffs]}


def encode_series2(s: Series2):
    dx, dy = s.degs
    coeffs = []
    for i in range(dx):
        for j in range(dy):
            c = s.coeffs[i][j]
            if s.ring.is_exact_zero(c):
                continue
            coeffs.append({"i": i, "j": j, "c": encode_value(c)})
    return {"degs": [dx, dy], "coeffs": coeffs}


def encode_matrix(m):
    return {"level": m.level, "var": m.var,
            "entries": [[encode_series1(e) for e in row] for row in m.entries]}


def _jsonable(v):
    """Encode diagnostics deterministically: fractions/inf as strings."""
    if isinstance(v, Fraction):
        return str(v)
    if v is INF:
        return "inf"
    if isinstance(v, float):
        return repr(v)
    return v


# -- decoding ---------------------------------------------------------------

def decode_qp(obj, ring: PadicRing) -> PadicApprox:
    if obj.get("zero"):
        ap = obj.get("absprec")
        if ap is None:
            return PadicApprox.exact_zero(ring.p)
        return PadicApprox.zero_at(ring.p, 2 * ap)
    return PadicApprox.from_raw(ring.p, obj["v"], int(obj["u"]),
                                min(obj["r"] or ring.rel, ring.rel))


def decode_value(obj, qring: QuadRing):
    if "a" in obj:
        base = PadicRing(qring.p, qring.rel)
        return QuadExtElem(qring.params, decode_qp(obj["a"], base),
                           decode_qp(obj["b"], base))
    return qring.embed(decode_qp(obj, PadicRing(qring.p, qring.rel)))


def decode_series1(obj, qring: QuadRing) -> Series1:
    coeffs = [decode_value(c, qring) for c in obj["coeffs"]]
    return Series1(qring, obj.get("var", "X"), coeffs)


def decode_series2(obj, qring: QuadRing) -> Series2:
    dx, dy = obj["degs"]
    grid = [[qring.zero() for _ in range(dy)] for _ in range(dx)]
    for item in obj["coeffs"]:
        grid[item["i"]][item["j"]] = decode_value(item["c"], qring)
    return Series2(qring, grid)


# -- subcommands -------------------------------------------------------------

def _read_input(cfg: JobConfig):
    if cfg.inp:
        with open(cfg.inp) as fh:
            return json.load(fh)
    return json.load(sys.stdin)


def _emit(cfg: JobConfig, obj) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_dict(r):
    out = {"level": list(r.level) if isinstance(r.level, tuple) else r.level,
           "passed": r.passed,
           "residual_valuation": _jsonable(r.residual_valuation)}
    if r.detail:
        out["detail"] = r.detail
    for name in ("C_omega", "A_omega", "B_omega", "D_omega", "E_omega",
                 "K_omega"):
        v = getattr(r, name)
        if v is not None:
            out[name.lower()] = encode_value(v)
    return out


def cmd_logmatrix(cfg: JobConfig):
    params = cfg.params()
    if cfg.level:
        m = logmatrix_level(params, cfg.level, cfg.deg, cfg.prec)
    else:
        m = logmatrix_to_degree(params, cfg.deg, cfg.prec)
    _emit(cfg, {"matrix": encode_matrix(m), "failures": []})
    return 0


def cmd_pollack(cfg: JobConfig):
    params = cfg.params()  # rejects before computing when invalid
    if params.a_p != 0:
        raise ValueError("pollack requires a_p = 0")
    m = cfg.level or 1
    d1, d2 = pollack_blocks(params, m)
    _emit(cfg, {"first": encode_series1(d1), "second": encode_series1(d2),
                "pairs": m, "failures": []})
    return 0


def cmd_factor1(cfg: JobConfig):
    params = cfg.params()
    qring = QuadRing(params, cfg.prec)
    data = _read_input(cfg)
    mu_alpha = decode_series1(data["mu_alpha"], qring)
    mu_beta = decode_series1(data["mu_beta"], qring)
    M = logmatrix_to_degree(params, min(mu_alpha.deg, mu_beta.deg), cfg.prec)
    sharp, flat = factor_pair(mu_alpha, mu_beta, M)
    _emit(cfg, {"mu_sharp": encode_series1(sharp),
                "mu_flat": encode_series1(flat),
                "matrix_level": M.level, "failures": []})
    return 0


def cmd_factor2(cfg: JobConfig):
    params = cfg.params()
    qring = QuadRing(params, cfg.prec)
    data = _read_input(cfg)
    parts = tuple(decode_series2(data[k], qring)
                  for k in ("l_aa", "l_ba", "l_ab", "l_bb"))
    L = LQuadruple(parts)
    dx, dy = L.degs
    Mx = logmatrix_to_degree(params, dx, cfg.prec, var="X")
    My = logmatrix_to_degree(params, dy, cfg.prec, var="Y")
    out = factor_full(L, Mx, My)
    _emit(cfg, {"l_ss": encode_series2(out.parts[0]),
                "l_fs": encode_series2(out.parts[1]),
                "l_sf": encode_series2(out.parts[2]),
                "l_ff": encode_series2(out.parts[3]),
                "failures": []})
    return 0


def cmd_eval(cfg: JobConfig):
    params = cfg.params()
    qring = QuadRing(params, cfg.prec)
    data = _read_input(cfg)
    m = cfg.level or cfg.levels[0]
    if "degs" in data:
        s = decode_series2(data, qring)
        res = partial_apply(s, cfg.axis, m)
        _emit(cfg, {"partial": {"var": res.var, "deg": res.deg,
                                "coeffs": [encode_value(c) for c in res.coeffs]},
                    "level": m, "axis": cfg.axis, "failures": []})
    else:
        s = decode_series1(data, qring)
        elem = reduce_mod_cyclo(s, m)
        _emit(cfg, {"class": encode_value(elem), "level": m, "failures": []})
    return 0


def cmd_growth(cfg: JobConfig):
    params = cfg.params()
    if cfg.inp:
        qring = QuadRing(params, cfg.prec)
        s = decode_series1(_read_input(cfg), qring)
    else:
        s = log1p_over_x(cfg.p, cfg.deg, cfg.prec)
    rep = growth_order(s, cfg.u, cfg.c)
    failures = []
    if rep.passed is False:
        failures.append({"check": "growth", "bound": _jsonable(rep.bound),
                         "offset": _jsonable(rep.offset)})
    _emit(cfg, {"u": _jsonable(rep.u), "bound": _jsonable(rep.bound),
                "attained_at": rep.attained_at,
                "passed": rep.passed, "failures": failures})
    return 1 if failures else 0


def cmd_roundtrip(cfg: JobConfig):
    params = cfg.params()
    qring = QuadRing(params, cfg.prec)
    M = logmatrix_to_degree(params, cfg.deg, cfg.prec)
    sharp = lift_to_quad(random_bounded(cfg.p, cfg.deg, cfg.seed, cfg.prec), qring)
    flat = lift_to_quad(random_bounded(cfg.p, cfg.deg, cfg.seed + 1, cfg.prec),
                        qring)
    mu_alpha, mu_beta = combine_pair(sharp, flat, M)
    got_sharp, got_flat = factor_pair(mu_alpha, mu_beta, M)
    failures = []
    worst = INF
    for got, want, name in ((got_sharp, sharp, "sharp"), (got_flat, flat, "flat")):
        for k, (g, w) in enumerate(zip(got.coeffs, want.coeffs)):
            delta = g - w
            witness = delta.zero_witness_tv()
            if witness is None:
                failures.append({"check": "roundtrip", "component": name,
                                 "index": k})
            else:
                worst = min(worst, witness)
    loss = division_loss_digits([sharp, flat], [got_sharp, got_flat])
    _emit(cfg, {"degree": cfg.deg, "seed": cfg.seed,
                "recovered_absprec_digits": _jsonable(
                    worst if worst is INF else Fraction(worst, 2)),
                "max_loss_digits": _jsonable(loss),
                "failures": failures})
    return 1 if failures else 0


def _verify_suite(cfg: JobConfig):
    params = cfg.params()
    qring = QuadRing(params, cfg.prec)
    p = params.p
    levels = list(cfg.levels)
    results = {}
    failures = []

    def note(kind, key, passed, extra=None):
        results.setdefault(kind, {})[key] = dict(passed=passed, **(extra or {}))
        if not passed:
            failures.append({"check": kind, "case": key})

    for n in levels:
        rep = stabilization_check(params, n, rel=cfg.prec)
        note("stabilization", f"n={n}", rep.passed,
             {"witness_digits": _jsonable(Fraction(rep.witness_tv, 2))
              if rep.witness_tv is not INF else "inf"})
    for n in levels:
        rep = det_check(params, n, rel=cfg.prec)
        note("determinant", f"n={n}", rep.passed,
             {"limit_distance_tv": [_jsonable(t) for t in rep.limit_distance_tv]})
    nmat = max(levels)
    M = logmatrix_level(params, nmat, p**nmat, cfg.prec)
    for m in levels:
        rep = rank1_at_level(M, m)
        note("rank1", f"m={m}", rep.passed,
             {"residual": _jsonable(rep.residual_valuation)})
    # one-variable round trip and interpolation on an exact synthesis
    sharp = lift_to_quad(random_bounded(p, cfg.deg, cfg.seed, cfg.prec), qring)
    flat = lift_to_quad(random_bounded(p, cfg.deg, cfg.seed + 1, cfg.prec), qring)
    mu_a, mu_b = combine_pair(sharp, flat, logmatrix_to_degree(params, cfg.deg,
                                                               cfg.prec))
    rs, rf = factor_pair(mu_a, mu_b, logmatrix_to_degree(params, cfg.deg,
                                                         cfg.prec))
    rt_ok = all((g - w).zero_witness_tv() is not None
                for got, want in ((rs, sharp), (rf, flat))
                for g, w in zip(got.coeffs, want.coeffs))
    note("roundtrip1", f"seed={cfg.seed}", rt_ok,
         {"loss_digits": _jsonable(division_loss_digits([sharp, flat], [rs, rf]))})
    sharp_e = lift_to_quad(random_bounded(p, 6, cfg.seed + 2, cfg.prec), qring)
    flat_e = lift_to_quad(random_bounded(p, 6, cfg.seed + 3, cfg.prec), qring)
    ma_e, mb_e = exact_combine_pair(sharp_e, flat_e,
                                    logmatrix_level(params, nmat, p**nmat,
                                                    cfg.prec))
    for rep in verify_pair(ma_e, mb_e, levels):
        note("interpolation1", f"m={rep.level}", rep.passed,
             {"residual": _jsonable(rep.residual_valuation)})
    # two-variable identities on an exact synthesis
    Mx = logmatrix_level(params, nmat, p**nmat, cfg.prec, var="X")
    My = logmatrix_level(params, nmat, p**nmat, cfg.prec, var="Y")
    Q = random_quadruple(params, 4, 4, cfg.seed, cfg.prec)
    L = recombine_exact(Q, Mx, My)
    pairs = [(a, b) for a in levels for b in levels
             if a + b <= min(levels) + max(levels)]
    for rep in verify_interpolation4(L, pairs):
        note("interpolation2", f"m={rep.level}", rep.passed,
             {"residual": _jsonable(rep.residual_valuation)})
    for rep in derivative_relation(L, pairs, Mx=Mx):
        note("derivative", f"m={rep.level}", rep.passed,
             {"residual": _jsonable(rep.residual_valuation)})
    for rep in vanish_check(L, Mx, pairs):
        note("vanish", f"m={rep.level}", rep.passed,
             {"residual": _jsonable(rep.residual_valuation)})
    # two-variable round trip on the common truncation
    R = factor_full(recombine(Q, _trim(Mx, 4 * p), _trim(My, 4 * p)),
                    _trim(Mx, 4 * p), _trim(My, 4 * p))
    rt2 = all((g - w).zero_witness_tv() is not None
              for got, want in zip(R.parts, Q.parts)
              for grow, wrow in zip(got.coeffs, want.coeffs)
              for g, w in zip(grow, wrow))
    note("roundtrip2", f"seed={cfg.seed}", rt2)
    if params.a_p == 0:
        try:
            pollack_blocks(params, max(1, min(levels)))
            note("pollack", "blocks", True)
        except VerificationError as exc:
            note("pollack", "blocks", False, {"error": str(exc)})
    return results, failures


def _trim(M, d):
    from .logmatrix import MatrixSeries
    from .series import truncate
    if M.deg <= d:
        return M
    entries = tuple(tuple(truncate(e, d) for e in row) for row in M.entries)
    return MatrixSeries(entries, M.params, M.level, M.var)


def cmd_verify(cfg: JobConfig):
    results, failures = _verify_suite(cfg)
    _emit(cfg, {"results": results, "failures": failures})
    return 1 if failures else 0


COMMANDS = {
    "logmatrix": cmd_logmatrix,
    "pollack": cmd_pollack,
    "factor1": cmd_factor1,
    "factor2": cmd_factor2,
    "eval": cmd_eval,
    "verify": cmd_verify,
    "roundtrip": cmd_roundtrip,
    "growth": cmd_growth,
}


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="sharpflat",
        description="Logarithmic matrices and sharp/flat factorization of "
                    "p-adic power series")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("logmatrix", "emit a finite-level logarithmic matrix"),
            ("pollack", "emit the a_p = 0 plus/minus diagonal blocks"),
            ("factor1", "factor a one-variable pair into sharp/flat parts"),
            ("factor2", "factor a two-variable quadruple"),
            ("eval", "evaluate a series at a character level"),
            ("verify", "run the verification suites"),
            ("roundtrip", "seeded synthesis, factorization and comparison"),
            ("growth", "growth-order scan of a series")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--p", type=int, default=3)
        sp.add_argument("--ap", type=int, default=None,
                        help="a_p (defaults to p)")
        sp.add_argument("--eps", type=int, default=1)
        sp.add_argument("--deg", type=int, default=30)
        sp.add_argument("--degy", type=int, default=None)
        sp.add_argument("--prec", type=int, default=DEFAULT_PREC)
        sp.add_argument("--levels", type=str, default="1,2")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--level", type=int, default=None)
        sp.add_argument("--axis", choices=("X", "Y"), default="X")
        sp.add_argument("--u", type=float, default=0.0)
        sp.add_argument("--c", type=float, default=None)
        sp.add_argument("--in", dest="inp", default=None)
        sp.add_argument("--out", dest="out", default=None)
    return ap


def main(argv=None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        levels = tuple(int(t) for t in ns.levels.split(",") if t)
        cfg = JobConfig(command=ns.command, p=ns.p,
                        a_p=ns.p if ns.ap is None else ns.ap,
                        eps=ns.eps, deg=ns.deg, degy=ns.degy, prec=ns.prec,
                        levels=levels, seed=ns.seed, level=ns.level,
                        axis=ns.axis, u=ns.u, c=ns.c, inp=ns.inp, out=ns.out)
        if not levels:
            raise ValueError("at least one level is required")
        cfg.params()  # validate p, a_p, eps up front
        return COMMANDS[cfg.command](cfg)
    except (ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
