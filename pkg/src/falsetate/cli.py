"""Command-line front end.

Exit codes: 0 on success, 2 when the requested case is unsupported (this
includes an insufficient coefficient budget) and 1 on an internal
inconsistency.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import click
import mpmath

from . import __version__
from .artin import InconsistencyError, rho, sigma
from .elliptic import parse_curve, periods, tate_local, torsion_order, Curve
from .epsilon import eps_rho, eps_sigma
from .fieldtower import Tower, UnsupportedError
from .iwasawa import (
    Provenanced,
    hk_rank_parity,
    lambda_hm,
    main_theorem_report,
    regularity_report,
    root_number_rho_n,
)
from .lseries import curve_root_number, InsufficientBudget, IndeterminateSign, InsufficientPrecision
from .padicl import bsd_quotient, congruence_check, curly_l, l_star, twist_data, twisted_l_value

log = logging.getLogger("falsetate")

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_UNSUPPORTED = 2

TABLE_COLUMNS = ("m", "N(rho)", "N(E,rho)", "L*", "Sha", "L_E(sigma)", "L_E(rho)")
HYPOTHESES = ("sha", "mu", "lambda")


@dataclass
class RunConfig:
    curve: str
    p: int
    m: list[int]
    bits: int = 128
    coeff_cap: int | None = None
    padic_prec: int = 4
    fmt: str = "table"
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.m = dedupe_m(self.p, self.m)

    def source(self, key: str, default: str) -> str:
        return self.provenance.get(key, default)


def dedupe_m(p: int, ms: list[int]) -> list[int]:
    """Sorted m values, keeping the smallest m among those defining the same field."""
    kept: list[Tower] = []
    for m in sorted(set(ms)):
        t = Tower(p, m)
        if not any(t.same_field(k) for k in kept):
            kept.append(t)
    return [t.m for t in kept]


def _check_budget(E: Curve, taus: list[Any], cap: int | None) -> None:
    if cap is None:
        return
    for tau in taus:
        need = twist_data(E, tau).series.default_budget()
        if need > cap:
            raise InsufficientBudget(f"coefficient cap {cap} is below the required budget of {need}", need)


def _fmt_fraction(x: Fraction | None) -> str:
    return "-" if x is None else str(x)


# ---------------------------------------------------------------------------
# row builders (pure functions returning JSON-ready dictionaries)
# ---------------------------------------------------------------------------


def info_record(E: Curve, bits: int) -> dict[str, Any]:
    P = periods(E, bits)
    local = []
    for q in E.bad_primes:
        ld = tate_local(E, q)
        local.append({"q": q, "kind": ld.kind, "kodaira": ld.kodaira, "tamagawa": ld.tamagawa})
    return {
        "curve": E.label or ",".join(map(str, E.ainvs)),
        "ainvs": list(E.ainvs),
        "conductor": E.conductor,
        "discriminant": E.discriminant,
        "root_number": curve_root_number(E),
        "local": local,
        "Omega_plus": mpmath.nstr(P.Omega_plus.mid, 15),
        "Omega_minus_over_i": mpmath.nstr(P.Omega_minus_im.mid, 15),
        "torsion": torsion_order(E, "Q"),
    }


def table_row(E: Curve, cfg: RunConfig, m: int) -> dict[str, Any] | None:
    """One table row, or None when L(E, rho, s) has sign -1."""
    tower = Tower(cfg.p, m)
    r = rho(tower)
    data = twist_data(E, r)
    if data.series.sign == -1:
        log.info("m=%d omitted: L(E, rho, s) has sign -1", m)
        return None
    _check_budget(E, [None, sigma(tower), r], cfg.coeff_cap)
    bsd = bsd_quotient(E, "L", tower)
    cong = congruence_check(E, tower, cfg.padic_prec)
    flags = sorted(set(bsd.flags) | set(cong.sigma.flags) | set(cong.rho.flags) | set(cong.flags))
    sha = "-" if bsd.rank_positive else _fmt_fraction(bsd.sha)
    return {
        "m": m,
        "N(rho)": tower.N_rho,
        "N(E,rho)": data.series.conductor,
        "L*": _fmt_fraction(cong.rho.l_star),
        "Sha": sha,
        "L_E(sigma)": str(cong.sigma.value),
        "L_E(rho)": str(cong.rho.value),
        "congruent": cong.congruent,
        "provenance": {"Sha": cfg.source("sha", "BSD-analytic"), "sign": data.sign_source},
        "flags": flags,
    }


def congruence_record(E: Curve, cfg: RunConfig, m: int) -> dict[str, Any]:
    tower = Tower(cfg.p, m)
    _check_budget(E, [sigma(tower), rho(tower)], cfg.coeff_cap)
    c = congruence_check(E, tower, cfg.padic_prec)
    s, r = c.sigma.value, c.rho.value
    lead_s = s.unit % cfg.p if s.valuation() == 0 else 0
    lead_r = r.unit % cfg.p if r.valuation() == 0 else 0
    verdict = "OK" if c.congruent else "FAIL"
    return {
        "m": m,
        "L_E(sigma)": str(s),
        "L_E(rho)": str(r),
        "summary": f"{lead_s} ≡ {lead_r} mod {cfg.p}, {verdict}",
        "congruent": c.congruent,
        "depth": c.depth if c.depth != float("inf") else "inf",
        "both_units": c.both_units,
        "b": c.b,
        "flags": sorted(set(c.flags) | set(c.sigma.flags) | set(c.rho.flags)),
    }


def iwasawa_record(E: Curve, cfg: RunConfig, m: int) -> dict[str, Any]:
    tower = Tower(cfg.p, m)
    _check_budget(E, [sigma(tower), rho(tower)], cfg.coeff_cap)
    ls, _, _ = l_star(E, sigma(tower))
    lr, _, _ = l_star(E, rho(tower))
    cs = curly_l(E, "sigma", tower, cfg.padic_prec)
    cr = curly_l(E, "rho", tower, cfg.padic_prec)
    lam = Provenanced(0, cfg.source("lambda", "assumed"))
    mu = Provenanced(True, cfg.source("mu", "assumed"))
    report = main_theorem_report(E, tower, ls, lr, mu,
                                 computed=(cs.valuation(), cr.valuation()))
    chi = report.chi
    out: dict[str, Any] = {
        "m": m,
        "chi_cyc": {"K": chi.chi_cyc_K, "F": chi.chi_cyc_F},
        "chi_na": {"K": chi.chi_na_K, "F": chi.chi_na_F, "sigma": chi.chi_na_sigma, "rho": chi.chi_na_rho},
        "main_theorem": {"sigma_side": report.sigma_side, "rho_side": report.rho_side,
                         "consistent": report.consistent, "predicted": list(report.predicted),
                         "computed": [str(x) for x in report.computed or ()], "matches": report.matches},
        "hypotheses": dict(report.hypotheses, **{"Sha": cfg.source("sha", "BSD-analytic"),
                                                 "lambda(E/K)": lam.provenance}),
        "flags": chi.flags,
    }
    try:
        lam_rep = lambda_hm(E, tower, lam)
        out["lambda"] = {"K": lam.value, "F": lam_rep.lam_F, "unchanged": lam_rep.unchanged}
    except UnsupportedError as exc:
        out["lambda"] = {"unsupported": str(exc)}
    try:
        rn = root_number_rho_n(E, tower, None if E.is_semistable() else curve_root_number(E))
        par = hk_rank_parity(E, tower, lam)
        out["root_number_rho_n"] = rn.w_rho
        out["rank_lower_bound_n1"] = rn.rank_bound
        out["h"] = par.h
    except UnsupportedError as exc:
        out["root_number_rho_n"] = f"unsupported: {exc}"
    reg = regularity_report(E, tower, cs.value)
    out["regular"] = {"value": reg.regular, "note": reg.note}
    return out


def epsilon_record(p: int, m: int) -> dict[str, Any]:
    tower = Tower(p, m)
    return {"p": p, "m": m, "eps_sigma": str(eps_sigma(tower)), "eps_rho": str(eps_rho(tower))}


def lvalue_record(E: Curve, cfg: RunConfig, m: int | None, kind: str) -> dict[str, Any]:
    tau = None
    if kind != "E":
        if m is None:
            raise click.UsageError("--m is required for twisted L-values")
        tower = Tower(cfg.p, m)
        tau = sigma(tower) if kind == "sigma" else rho(tower)
    data = twist_data(E, tau)
    if cfg.coeff_cap is not None:
        need = data.series.default_budget()
        if need > cfg.coeff_cap:
            raise InsufficientBudget(f"coefficient cap {cfg.coeff_cap} is below the required budget of {need}", need)
    val = twisted_l_value(E, tau)
    return {
        "twist": kind,
        "m": m,
        "conductor": data.series.conductor,
        "sign": data.series.sign,
        "value": mpmath.nstr(val.value.mid, 15),
        "error": float(val.value.err),
        "budget": val.budget,
        "provenance": {"sign": data.sign_source},
        "flags": list(data.flags),
    }


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def dump_json(records: list[dict[str, Any]]) -> str:
    return json.dumps(records, indent=2, sort_keys=True, ensure_ascii=False)


def _cell(x: Any) -> str:
    if isinstance(x, (dict, list)):
        return json.dumps(x, sort_keys=True, ensure_ascii=False)
    return str(x)


def dump_csv(records: list[dict[str, Any]], columns: tuple[str, ...] | None = None) -> str:
    cols = list(columns) if columns else list(dict.fromkeys(k for r in records for k in r))
    extra = sorted({k for r in records for k in r} - set(cols))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols + extra)
    for r in records:
        w.writerow([_cell(r.get(c, "")) for c in cols + extra])
    return buf.getvalue()


def dump_table(records: list[dict[str, Any]], columns: tuple[str, ...] | None = None) -> str:
    cols = list(columns) if columns else list(dict.fromkeys(k for r in records for k in r))
    rows = [[_cell(r.get(c, "")) for c in cols] for r in records]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def emit(records: list[dict[str, Any]], fmt: str, columns: tuple[str, ...] | None = None) -> None:
    if fmt == "json":
        click.echo(dump_json(records))
    elif fmt == "csv":
        click.echo(dump_csv(records, columns), nl=False)
    else:
        click.echo(dump_table(records, columns))


def _run(body: Callable[[], None]) -> None:
    try:
        body()
    except (UnsupportedError, NotImplementedError) as exc:
        click.echo(f"unsupported: {exc}", err=True)
        sys.exit(EXIT_UNSUPPORTED)
    except (InconsistencyError, IndeterminateSign, InsufficientPrecision) as exc:
        click.echo(f"inconsistency: {exc}", err=True)
        sys.exit(EXIT_INCONSISTENT)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _parse_assume(values: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for v in values:
        key, _, prov = v.partition("=")
        if key not in HYPOTHESES or prov not in ("descent-known", "BSD-analytic", "assumed"):
            raise click.BadParameter(f"expected one of {HYPOTHESES} = provenance, got {v!r}", param_hint="--assume")
        out[key] = prov
    return out


def common(f: Callable[..., Any]) -> Callable[..., Any]:
    opts = [
        click.option("--curve", required=True, help="Curve label (e.g. 21A4) or coefficients a1,a2,a3,a4,a6."),
        click.option("--p", "p", type=int, required=True, help="The odd prime p."),
        click.option("--m", "m", type=int, multiple=True, help="p-power free integer m (repeatable)."),
        click.option("--bits", type=int, default=128, show_default=True, help="Working precision in bits."),
        click.option("--coeff-cap", type=int, default=None, help="Largest coefficient budget allowed."),
        click.option("--padic-prec", type=int, default=4, show_default=True, help="p-adic precision O(p^N)."),
        click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="table",
                     show_default=True),
        click.option("--assume", multiple=True, help="Provenance override, e.g. sha=descent-known."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _config(curve: str, p: int, m: tuple[int, ...], bits: int, coeff_cap: int | None, padic_prec: int,
            fmt: str, assume: tuple[str, ...]) -> RunConfig:
    mpmath.mp.prec = max(mpmath.mp.prec, bits)
    if p >= 7:
        click.echo(f"unverified: p = {p} lies outside the range where the numerics are validated", err=True)
    return RunConfig(curve, p, list(m), bits, coeff_cap, padic_prec, fmt, _parse_assume(assume))


def _curve(spec: str) -> Curve:
    try:
        return parse_curve(spec)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--curve") from exc


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Twisted L-values of elliptic curves over false Tate extensions."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command()
@click.argument("curve")
@click.option("--bits", type=int, default=128, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="table")
def info(curve: str, bits: int, fmt: str) -> None:
    """Reduction data, periods and torsion of CURVE."""
    E = _curve(curve)
    _run(lambda: _emit_info(E, bits, fmt))


def _emit_info(E: Curve, bits: int, fmt: str) -> None:
    rec = info_record(E, bits)
    if fmt == "json":
        emit([rec], fmt)
        return
    flat = {k: v for k, v in rec.items() if k != "local"}
    emit([flat], fmt)
    emit(rec["local"], fmt, ("q", "kind", "kodaira", "tamagawa"))


@main.command()
@common
def table(**kw: Any) -> None:
    """Table rows (m, N(rho), N(E,rho), L*, Sha, L_E(sigma), L_E(rho))."""
    cfg = _config(**kw)
    E = _curve(cfg.curve)

    def body() -> None:
        rows = []
        failed = False
        for m in cfg.m:
            try:
                row = table_row(E, cfg, m)
            except (UnsupportedError, InconsistencyError, ArithmeticError) as exc:
                failed = True
                row = {"m": m, "error": f"{type(exc).__name__}: {exc}"}
            if row is not None:
                rows.append(row)
        emit(rows, cfg.fmt, None if cfg.fmt == "json" else TABLE_COLUMNS + ("congruent", "flags"))
        if failed:
            sys.exit(EXIT_UNSUPPORTED)

    _run(body)


@main.command()
@common
def congruence(**kw: Any) -> None:
    """Check L_E(sigma) = L_E(rho) mod p."""
    cfg = _config(**kw)
    E = _curve(cfg.curve)
    _run(lambda: emit([congruence_record(E, cfg, m) for m in cfg.m], cfg.fmt))


@main.command()
@common
def iwasawa(**kw: Any) -> None:
    """Euler characteristics, lambda invariants and the main theorem report."""
    cfg = _config(**kw)
    E = _curve(cfg.curve)
    _run(lambda: emit([iwasawa_record(E, cfg, m) for m in cfg.m], cfg.fmt))


@main.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--m", "m", type=int, multiple=True, required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="table")
def epsilon(p: int, m: tuple[int, ...], fmt: str) -> None:
    """Local epsilon factors at p of sigma and rho."""
    _run(lambda: emit([epsilon_record(p, x) for x in m], fmt))


@main.command()
@common
@click.option("--twist", type=click.Choice(["E", "sigma", "rho"]), default="E", show_default=True)
def lvalue(twist: str, **kw: Any) -> None:
    """L(E, 1) or L(E, tau, 1) for tau = sigma or rho."""
    cfg = _config(**kw)
    E = _curve(cfg.curve)
    ms: list[int | None] = list(cfg.m) or [None]
    _run(lambda: emit([lvalue_record(E, cfg, m, twist) for m in ms], cfg.fmt))


__all__ = ["RunConfig", "dedupe_m", "dump_csv", "dump_json", "dump_table", "main", "table_row"]
