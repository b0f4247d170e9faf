"""Command line front end.

``fdbounds run CONFIG``        base case and sensitivity tables
``fdbounds check CONFIG``      the same, compared against the bundled published tables
``fdbounds simulate CONFIG``   Monte Carlo validation of the analytic bounds
``fdbounds calibrate CONFIG``  gamma and gph from the filing aggregates

CONFIG is an INI file; ``bundled`` (or no argument) uses the packaged
2017-2019 configuration.  An ``[include]`` section with ``files = a.ini b.ini``
reads those files first; keys in the including file win.  Relative paths are
resolved against the file that mentions them.

Exit status: 0 success, 1 configuration or data error, 2 invariant violation,
3 golden-tolerance breach in ``check``.
"""

from __future__ import annotations

import argparse
import configparser
import io
import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from . import __version__, cases
from .bounds import (
    BalanceSheetInputs,
    BoundsReport,
    EstimationParams,
    Scenario,
    SensitivityRow,
    bounds_report,
    parse_scenario,
    sensitivity_grid,
)
from .calibration import TaxContext, average_gph, gamma_from_market, gph_from_nph, nph
from .curves import DiscountCurve, VolCurve, bundled_curve, bundled_vols, load_curve, load_vols, stated_formula_vols

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_GOLDEN = 0, 1, 2, 3

BASE_COLUMNS = ("lb_hat", "ub_hat", "fdb_hat", "epsilon", "delta", "ii_hat", "cog_hat")
BASE_HEADER = ("year", "LB", "UB", "FDB", "epsilon", "delta", "II", "COG")
SENS_HEADER = ("scenario", "year", "FDB", "LB", "UB", "d_FDB", "d_LB", "d_UB")

TOL_BN = 0.5
TOL_PCT = 0.25
TOL_REL = 0.6


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# Configuration


def _read_ini(path: Path, seen: tuple[Path, ...] = ()) -> configparser.ConfigParser:
    path = path.resolve()
    if path in seen:
        raise ConfigError(f"{path}: include cycle")
    if not path.is_file():
        raise ConfigError(f"{path}: no such config file")
    own = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        own.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section in own.sections():
        for key in ("curve", "vols"):
            raw = own.get(section, key, fallback=None)
            if raw is not None and raw not in ("bundled", "formula"):
                own.set(section, key, str((path.parent / raw).resolve()))
    merged = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    if own.has_section("include"):
        for name in own.get("include", "files", fallback="").split():
            merged.read_dict(_read_ini(path.parent / name, seen + (path,)))
    merged.read_dict({s: dict(own.items(s, raw=True)) for s in own.sections() if s != "include"})
    return merged


def _bundled_ini() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.read_string((resources.files("fdbounds.data") / "base_case.ini").read_text("utf-8"))
    return cp


@dataclass(frozen=True)
class YearInputs:
    year: int
    bs: BalanceSheetInputs
    params: EstimationParams
    curve: DiscountCurve
    vols: VolCurve


@dataclass(frozen=True)
class RunConfig:
    years: tuple[YearInputs, ...]
    scenarios: tuple[Scenario, ...]
    golden: bool = True
    tau: float = 0.299
    sim: dict[str, str] = field(default_factory=dict)


_FLOAT_PARAMS = ("sigma", "nu", "d", "h", "theta", "cv_product")


def _float(section: configparser.SectionProxy, key: str, default: float | None = None) -> float | None:
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a number") from None


def _calibrated_gph(years: Sequence[int], tau: float) -> float:
    return average_gph([gph_from_nph(nph(cases.gph_aggregates(y)), TaxContext(tau)) for y in years])


def build_run_config(cp: configparser.ConfigParser, article91: bool = True) -> RunConfig:
    if not cp.has_section("run"):
        raise ConfigError("config has no [run] section")
    run = cp["run"]
    try:
        years = tuple(int(y) for y in run.get("years", "").replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"[run] years = {run.get('years')!r} must list integers") from None
    if not years:
        raise ConfigError("[run] years is empty")
    tau = _float(run, "tau", 0.299)
    scen_text = run.get("scenarios", "").replace("\n", ",")
    scenarios = tuple(parse_scenario(s) for s in scen_text.split(",") if s.strip())

    gph_raw = run.get("gph", str(cases.BASE_GPH)).strip()
    gph = _calibrated_gph(cases.YEARS, tau) if gph_raw == "calibrated" else _float(run, "gph", cases.BASE_GPH)
    article91 = article91 and run.getboolean("article91", True)
    common = cp["params"] if cp.has_section("params") else None

    out = []
    for year in years:
        sec = cp[f"year:{year}"] if cp.has_section(f"year:{year}") else None
        out.append(_year_inputs(year, sec, common, gph, article91))
    sim = dict(cp["simulate"]) if cp.has_section("simulate") else {}
    return RunConfig(tuple(out), scenarios, run.getboolean("golden", True), tau, sim)


def _year_inputs(year, sec, common, gph, article91) -> YearInputs:
    get = (lambda k, d=None: _float(sec, k, d)) if sec is not None else (lambda k, d=None: d)
    try:
        bs0 = cases.balance_sheet(year)
        rho0, gamma0 = cases.market_rates(year)
    except KeyError:
        if sec is None:
            raise ConfigError(f"no bundled data for {year}; add a [year:{year}] section") from None
        bs0, rho0, gamma0 = None, None, None

    def need(key, bundled):
        value = get(key, bundled)
        if value is None:
            raise ConfigError(f"[year:{year}] missing {key}")
        return value

    bs = BalanceSheetInputs(
        lp0=need("lp0", bs0 and bs0.lp0),
        sf0=need("sf0", bs0 and bs0.sf0),
        ug0=need("ug0", bs0 and bs0.ug0),
        gb=need("gb", bs0 and bs0.gb),
        fdb_reported=get("fdb_reported", bs0 and bs0.fdb_reported),
        label=str(year),
    )
    kw = dict(gph=gph, rho=need("rho", rho0), gamma=need("gamma", gamma0), article91=article91)
    for source in (common, sec):
        if source is None:
            continue
        for key in _FLOAT_PARAMS:
            if key in source:
                kw[key] = _float(source, key)
        if "T" in source:
            kw["T"] = int(_float(source, "T"))
        if "black_forward" in source:
            kw["black_forward"] = source["black_forward"]
        if "gph" in source and source is sec:
            kw["gph"] = _float(source, "gph")
    for key in ("d", "h"):
        if key in kw and float(kw[key]).is_integer():
            kw[key] = int(kw[key])
    params = EstimationParams(**kw)

    curve_ref = sec.get("curve", "bundled") if sec is not None else "bundled"
    vols_ref = sec.get("vols", None) if sec is not None else None
    if vols_ref is None and common is not None:
        vols_ref = common.get("vols", "bundled")
    vols_ref = vols_ref or "bundled"
    curve = bundled_curve(year) if curve_ref == "bundled" else load_curve(Path(curve_ref))
    if vols_ref == "bundled":
        vols = bundled_vols()
    elif vols_ref == "formula":
        vols = stated_formula_vols(max(60, params.T + 1))
    else:
        vols = load_vols(Path(vols_ref))
    return YearInputs(year, bs, params, curve, vols)


def load_config(ref: str | None, article91: bool = True) -> RunConfig:
    cp = _bundled_ini() if ref in (None, "bundled") else _read_ini(Path(ref))
    return build_run_config(cp, article91)


# --------------------------------------------------------------------------
# Computation


@dataclass(frozen=True)
class Results:
    base: tuple[tuple[int, BoundsReport], ...]
    sensitivities: tuple[tuple[int, SensitivityRow], ...]


def compute(cfg: RunConfig) -> Results:
    base, sens = [], []
    for yi in cfg.years:
        base.append((yi.year, bounds_report(yi.bs, yi.params, yi.curve, yi.vols)))
        if cfg.scenarios:
            for row in sensitivity_grid(yi.bs, yi.params, yi.curve, yi.vols, cfg.scenarios):
                sens.append((yi.year, row))
    # Scenario tables are grouped by scenario, years ascending within each.
    order = {sc.label: i for i, sc in enumerate(cfg.scenarios)}
    sens.sort(key=lambda item: (order[item[1].label], item[0]))
    return Results(tuple(base), tuple(sens))


# --------------------------------------------------------------------------
# Output


def _fmt(x: float | None) -> str:
    if x is None:
        return "n/a"
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _table(header: Sequence[str], rows: Sequence[Sequence[str]], fmt: str) -> str:
    if fmt == "md":
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
        lines += ["| " + " | ".join(r) + " |" for r in rows]
    else:
        lines = [", ".join(header)] + [", ".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def base_rows(results: Results, unit: str) -> list[list[str]]:
    rows = []
    for year, rep in results.base:
        pick: Callable[[str], float | None] = (lambda n: getattr(rep, n)) if unit == "bn" else rep.pct
        rows.append([str(year)] + [_fmt(pick(c)) for c in BASE_COLUMNS])
    return rows


def sensitivity_rows(results: Results) -> list[list[str]]:
    return [
        [row.label, str(year), _fmt(row.report.fdb_hat), _fmt(row.report.lb_hat), _fmt(row.report.ub_hat),
         _fmt(row.d_fdb), _fmt(row.d_lb), _fmt(row.d_ub)]
        for year, row in results.sensitivities
    ]


def emit_report(results: Results, fmt: str = "csv") -> dict[str, str]:
    """Report documents keyed by file name.  Output depends only on ``results``."""
    ext = "md" if fmt == "md" else "csv"
    docs = {
        f"base_bn.{ext}": _table(BASE_HEADER, base_rows(results, "bn"), fmt),
        f"base_pct.{ext}": _table(BASE_HEADER, base_rows(results, "pct"), fmt),
    }
    if results.sensitivities:
        docs[f"sensitivity.{ext}"] = _table(SENS_HEADER, sensitivity_rows(results), fmt)
    return docs


def _write(docs: dict[str, str], out: str | None, stream: io.TextIOBase) -> None:
    if out is None:
        for name, text in docs.items():
            stream.write(f"# {name}\n{text}\n")
        return
    target = Path(out)
    target.mkdir(parents=True, exist_ok=True)
    for name, text in docs.items():
        (target / name).write_text(text, encoding="utf-8", newline="\n")


# --------------------------------------------------------------------------
# Golden comparison


@dataclass(frozen=True)
class GoldenLine:
    what: str
    computed: float
    published: float
    tol: float
    ok: bool

    def __str__(self) -> str:
        flag = "ok  " if self.ok else "FAIL"
        return f"{flag} {self.what}: computed {self.computed:.3f}, published {self.published:.2f}, tol {self.tol}"


def golden_comparison(results: Results) -> list[GoldenLine]:
    gb, gs = cases.golden_base(), cases.golden_sensitivity()
    lines = []
    for year, rep in results.base:
        for unit, tol in (("bn", TOL_BN), ("pct", TOL_PCT)):
            ref = gb.get((year, unit))
            if ref is None:
                continue
            for name in ("lb_hat", "ub_hat", "fdb_hat", "ii_hat", "cog_hat"):
                x = getattr(rep, name) if unit == "bn" else rep.pct(name)
                pub = ref[name]
                lines.append(GoldenLine(f"{year} {name} [{unit}]", x, pub, tol, abs(x - pub) <= tol + 1e-12))
    for year, row in results.sensitivities:
        ref = gs.get((row.label, year))
        if ref is None:
            continue
        for name, x, pub in zip(("d_fdb", "d_lb", "d_ub"), (row.d_fdb, row.d_lb, row.d_ub), ref):
            same_sign = (pub == 0.0 and abs(x) < 0.005) or (pub != 0.0 and math.copysign(1, x) == math.copysign(1, pub))
            ok = same_sign and abs(x - pub) <= TOL_REL + 1e-12
            lines.append(GoldenLine(f"{row.label} {year} {name}", x, pub, TOL_REL, ok))
    return lines


# --------------------------------------------------------------------------
# Verbs


def cmd_run(args, out: io.TextIOBase) -> int:
    cfg = load_config(args.config, article91=not args.no_art91)
    _write(emit_report(compute(cfg), args.format), args.out, out)
    return EXIT_OK


def cmd_check(args, out: io.TextIOBase) -> int:
    cfg = load_config(args.config, article91=not args.no_art91)
    if not all(yi.params.article91 for yi in cfg.years):
        raise ConfigError("the published tables apply Article 91; drop --no-art91 for check")
    results = compute(cfg)
    _write(emit_report(results, args.format), args.out, out) if args.out else None
    lines = golden_comparison(results)
    if not lines:
        raise ConfigError("nothing to compare: no configured year or scenario has published values")
    for line in lines:
        out.write(f"{line}\n")
    failed = sum(not line.ok for line in lines)
    out.write(f"{len(lines) - failed}/{len(lines)} within tolerance\n")
    return EXIT_GOLDEN if failed else EXIT_OK


def cmd_calibrate(args, out: io.TextIOBase) -> int:
    cfg = load_config(args.config)
    tax = TaxContext(cfg.tau)
    rows, gphs = [], []
    for yi in cfg.years:
        gamma = gamma_from_market(cases.gamma_aggregates(yi.year))
        share = nph(cases.gph_aggregates(yi.year))
        g = gph_from_nph(share, tax)
        gphs.append(g)
        rows.append([str(yi.year), _fmt(100 * gamma), _fmt(100 * share), _fmt(100 * g)])
    rows.append(["average", "", "", _fmt(100 * average_gph(gphs))])
    docs = {f"calibration.{'md' if args.format == 'md' else 'csv'}": _table(("year", "gamma_pct", "nph_pct", "gph_pct"), rows, args.format)}
    _write(docs, args.out, out)
    return EXIT_OK


def cmd_simulate(args, out: io.TextIOBase) -> int:
    from . import almsim
    from .almsim import valuation

    cfg = load_config(args.config)
    sim = cfg.sim
    base = {"conforming": almsim.conforming, "violated": almsim.violated}.get(sim.get("config", "conforming"))
    if base is None:
        raise ConfigError(f"[simulate] config must be 'conforming' or 'violated', got {sim.get('config')!r}")
    ledger_cfg = base()
    overrides = {}
    for key in ("lp0", "sf0", "ug0", "sigma", "rho", "gamma", "gph", "nu", "h", "d", "asset_duration"):
        if key in sim:
            try:
                overrides[key] = float(sim[key])
            except ValueError:
                raise ConfigError(f"[simulate] {key} = {sim[key]!r} is not a number") from None
    if "T" in sim:
        overrides["T"] = int(sim["T"])
    ledger_cfg = replace(ledger_cfg, **overrides)
    seed = args.seed if args.seed is not None else int(sim.get("seed", 1))
    paths = args.paths if args.paths is not None else int(sim.get("paths", 10_000))
    vol = float(sim.get("vol", almsim.configs.CONFORMING_VOL))
    curve = bundled_curve(int(sim.get("curve_year", 2017)))
    model = almsim.RateModel(curve, vol, seed=seed, paths=paths)

    L, rep, bracket = valuation.bracket_run(ledger_cfg, model)
    checks = simulation_checks(L, curve, rep, bracket)
    rows = [[name, detail, "ok" if ok else "FAIL"] for name, detail, ok in checks]
    text = _table(("check", "detail", "status"), rows, args.format)
    _write({f"simulate.{'md' if args.format == 'md' else 'csv'}": text}, args.out, out)
    identities_ok = all(ok for name, _, ok in checks if name != "bracket")
    if sim.get("config", "conforming") == "violated":
        return EXIT_OK if identities_ok else EXIT_INVARIANT
    return EXIT_OK if all(ok for _, _, ok in checks) else EXIT_INVARIANT


def simulation_checks(L, curve, rep, bracket) -> list[tuple[str, str, bool]]:
    from .almsim import valuation as V

    dbsf = V.dbsf_evolution_error(L)
    ibp = V.integration_by_parts_error(L)
    mart = V.martingale_check(L, curve)
    worst = max(abs(e.mean - p) / e.se if e.se > 0 else (0.0 if abs(e.mean - p) < 1e-12 else math.inf) for _, e, p in mart)
    leak = V.no_leakage(L)
    resid = V.verify_representation(L)
    return [
        ("dbsf_evolution", f"max error {dbsf:.2e}", dbsf <= 1e-10),
        ("integration_by_parts", f"max error {ibp:.2e}", ibp <= 1e-9),
        ("martingale", f"worst |z| {worst:.2f}", all(e.within(p) for _, e, p in mart)),
        ("no_leakage", f"{leak}", leak.within(0.0)),
        ("representation", f"{resid}", resid.within(0.0)),
        ("bracket", f"FDB_mc {bracket.fdb_mc} in [{bracket.lb:.4f}, {bracket.ub:.4f}]", bracket.inside),
    ]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdbounds", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, func, help_ in (
        ("run", cmd_run, "base case and sensitivity tables"),
        ("check", cmd_check, "compare against the published tables"),
        ("simulate", cmd_simulate, "Monte Carlo validation"),
        ("calibrate", cmd_calibrate, "gamma and gph from filing aggregates"),
    ):
        p = sub.add_parser(verb, help=help_)
        p.add_argument("config", nargs="?", default="bundled", help="INI file or 'bundled'")
        p.add_argument("--out", help="output directory (default: standard output)")
        p.add_argument("--format", choices=("csv", "md"), default="csv")
        p.add_argument("--seed", type=int)
        p.add_argument("--paths", type=int)
        p.add_argument("--no-art91", action="store_true", help="report FDB without the Article 91 adjustment")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None, stdout: io.TextIOBase | None = None) -> int:
    out = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ArithmeticError as exc:
        print(f"fdbounds: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, KeyError, OSError, configparser.Error) as exc:
        print(f"fdbounds: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
