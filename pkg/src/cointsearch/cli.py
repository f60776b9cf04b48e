"""Command-line front end.

Subcommands: ``unitroot``, ``search``, ``johansen``, ``forecast``,
``compare``.  Data arrives as a CSV whose first column is ``year`` with
strictly consecutive integers; the run configuration is a JSON file (see
README for the schema) with selected flag overrides.  Reports render as
plain text or as deterministic JSON (``--format json``): identical
config, data and seed produce byte-identical output.

Exit codes: 0 success, 1 usage error, 2 data/configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SearchConfig
from .errors import (
    AlignmentError,
    CointsearchError,
    ConfigError,
    DataError,
    DegenerateSeriesError,
    InsufficientDataError,
)
from .forecast import (
    ForecastConfig,
    comparison_to_csv,
    forecast_compare,
    mc_forecast,
)
from .generator import RankedModel, SearchReport, run_search
from .johansen import ec_consistency, johansen_test
from .regress import difference_ols, nls_ec_fit
from .series import AlignedDataset
from .specs import CandidateSpec
from .unitroot import adf_test, kpss_test

__all__ = ["load_dataset", "run_cli", "main"]

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 1, not argparse's 2
        raise UsageError(message)


def load_dataset(path: str | Path, target: str | None = None) -> AlignedDataset:
    """Read an annual CSV into an aligned dataset.

    The first column must be named ``year`` and hold strictly consecutive
    integers; every other column must be numeric.  Errors carry the
    offending row/column location.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "year":
        raise DataError(f"{path}: first column must be named 'year'")
    names = header[1:]
    if not names:
        raise DataError(f"{path}: no data columns besides 'year'")
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise DataError(f"{path}: duplicate column name {dup[0]!r}")

    years: list[int] = []
    values: list[list[float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} cells, "
                            f"got {len(row)}")
        try:
            year = int(row[0])
        except ValueError:
            raise DataError(f"{path}:{lineno}: year {row[0]!r} is not an "
                            f"integer") from None
        if years and year != years[-1] + 1:
            missing = years[-1] + 1
            raise DataError(f"{path}:{lineno}: years must be consecutive; "
                            f"expected {missing}, got {year}")
        years.append(year)
        parsed = []
        for col, cell in zip(names, row[1:]):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}:{lineno}: column {col!r} has "
                                f"non-numeric value {cell.strip()!r}") from None
            if not np.isfinite(v):
                raise DataError(f"{path}:{lineno}: column {col!r} has "
                                f"non-finite value {cell.strip()!r}")
            parsed.append(v)
        values.append(parsed)
    if not years:
        raise DataError(f"{path}: no data rows")
    arr = np.asarray(values)
    cols = {nm: arr[:, i] for i, nm in enumerate(names)}
    return AlignedDataset(years[0], cols, target or names[0])


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise DataError(f"config {path} must hold a JSON object")
    return raw


_SEARCH_KEYS = {"target", "predictors", "mode", "merge_groups", "eg_level",
                "bglm_level", "bglm_lags", "bg_design",
                "deterministic_options", "nls", "seed"}


def _search_config(raw: dict, args) -> SearchConfig:
    cfg = {k: v for k, v in raw.items() if k in _SEARCH_KEYS}
    if getattr(args, "target", None):
        cfg["target"] = args.target
    if getattr(args, "predictors", None):
        cfg["predictors"] = [p.strip() for p in args.predictors.split(",")]
    if getattr(args, "mode", None):
        cfg["mode"] = args.mode
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if "target" not in cfg or "predictors" not in cfg:
        raise ConfigError("the configuration must name a target and predictors")
    return SearchConfig.from_dict(cfg)


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def _emit(payload: dict, args, text_renderer) -> None:
    if args.format == "json":
        out = json.dumps(_json_ready(payload), sort_keys=True, indent=2) + "\n"
    else:
        out = text_renderer(payload)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _meta(seed: int | None = None, **extra) -> dict:
    meta = {"schema_version": SCHEMA_VERSION, "package_version": __version__}
    if seed is not None:
        meta["seed"] = seed
    meta.update(extra)
    return meta


# --------------------------------------------------------------------------
# unitroot
# --------------------------------------------------------------------------

def _cmd_unitroot(args) -> int:
    data = load_dataset(args.data)
    columns = ([c.strip() for c in args.columns.split(",")]
               if args.columns else list(data.columns))
    variables = []
    for name in columns:
        s = data.series(name)
        adf = {}
        for case in ("none", "constant", "constant_and_trend"):
            res = adf_test(s, case, max_lag=args.max_lag)
            adf[case] = {"p_value": res.p_value, "statistic": res.statistic,
                         "lags_used": res.lags_used}
        kpss = {}
        for case in ("constant", "constant_and_trend"):
            res = kpss_test(s, case)
            kpss[case] = {"statistic": res.statistic,
                          "p_bracket": list(res.p_bracket),
                          "bandwidth": res.bandwidth}
        variables.append({"name": name, "adf": adf, "kpss": kpss})
    payload = {"meta": _meta(), "report": "unitroot", "variables": variables}

    def render(p) -> str:
        lines = ["unit-root pretests (ADF p-values; KPSS stationarity brackets)",
                 f"{'variable':<12}{'ADF 0':>8}{'ADF C':>8}{'ADF CT':>8}"
                 f"{'KPSS C':>14}{'KPSS CT':>14}"]
        for v in p["variables"]:
            a = v["adf"]
            k = v["kpss"]

            def br(case):
                lo, hi = k[case]["p_bracket"]
                if hi >= 1.0:
                    return f"> {lo:.2f}"
                if lo <= 0.0:
                    return f"< {hi:.2f}"
                return f"{lo:.3g}-{hi:.3g}"

            lines.append(
                f"{v['name']:<12}"
                f"{a['none']['p_value']:>8.2f}"
                f"{a['constant']['p_value']:>8.2f}"
                f"{a['constant_and_trend']['p_value']:>8.2f}"
                f"{br('constant'):>14}{br('constant_and_trend'):>14}")
        return "\n".join(lines) + "\n"

    _emit(payload, args, render)
    return 0


# --------------------------------------------------------------------------
# search
# --------------------------------------------------------------------------

def _ranked_to_dict(m: RankedModel) -> dict:
    est = m.estimate
    coef = {nm: float(v) for nm, v in zip(est.param_names, est.coefficients)}
    return {
        "id": m.spec.id,
        "subset": list(m.spec.subset),
        "deterministic": m.spec.deterministic,
        "phi_free": m.spec.phi_free,
        "coefficients": coef,
        "t_ratios": {nm: float(t) for nm, t in est.t_ratios.items()},
        "converged": est.converged,
        "phi_stationary": est.phi_stationary,
        "ssr": est.ssr,
        "aic": m.scores.aic,
        "bic": m.scores.bic,
        "er_aic": m.scores.er_aic,
        "er_bic": m.scores.er_bic,
        "aic_rank": m.aic_rank,
        "bic_rank": m.bic_rank,
        "diagnostics": dict(m.diagnostics),
    }


def _search_payload(report: SearchReport, config: SearchConfig) -> dict:
    return {
        "meta": _meta(seed=config.seed, thresholds={
            "eg_level": config.eg_level, "bglm_level": config.bglm_level,
            "bglm_lags": config.bglm_lags, "bg_design": config.bg_design}),
        "report": "search",
        "mode": report.mode,
        "n_candidates": report.n_candidates,
        "n_obs_scored": report.n_obs_scored,
        "predictors": list(report.predictors),
        "merged": list(report.merged),
        "survivors": [_ranked_to_dict(m) for m in report.survivors],
        "discards": [
            {"id": d.spec_id, "reason": d.reason, "detail": d.detail}
            for d in report.discards
        ],
    }


def _render_search(p) -> str:
    lines = [f"search mode={p['mode']}  candidates={p['n_candidates']}  "
             f"survivors={len(p['survivors'])}  (n={p['n_obs_scored']})"]
    if p["survivors"]:
        lines.append(f"{'rank':<5}{'model':<44}{'BIC':>10}{'AIC':>10}"
                     f"{'ER BIC':>8}{'ER AIC':>12}{'BG LM':>8}{'EG DF':>16}")
    for m in p["survivors"]:
        diag = m["diagnostics"]
        eg = (f"{diag['eg_statistic']:.2f} ({diag['eg_critical_value']:.2f})"
              if "eg_statistic" in diag else "-")
        lines.append(
            f"{m['bic_rank']:<5}{m['id']:<44}{m['bic']:>10.4f}{m['aic']:>10.4f}"
            f"{m['er_bic']:>8.2f}"
            f"{m['er_aic']:>8.2f} ({m['aic_rank']})"
            f"{diag['bg_lm_pvalue']:>8.2f}{eg:>16}")
    reasons: dict[str, int] = {}
    for d in p["discards"]:
        reasons[d["reason"]] = reasons.get(d["reason"], 0) + 1
    lines.append("discards: " + (", ".join(
        f"{k}={v}" for k, v in sorted(reasons.items())) or "none"))
    return "\n".join(lines) + "\n"


def _cmd_search(args) -> int:
    raw = _load_config_file(args.config)
    config = _search_config(raw, args)
    data = load_dataset(args.data, target=config.target)
    report = run_search(data, config)
    _emit(_search_payload(report, config), args, _render_search)
    return 0


# --------------------------------------------------------------------------
# johansen
# --------------------------------------------------------------------------

def _cmd_johansen(args) -> int:
    raw = _load_config_file(args.config)
    jo = raw.get("johansen", {})
    columns = ([c.strip() for c in args.columns.split(",")]
               if args.columns else jo.get("columns"))
    case = args.case or jo.get("case", "restricted_constant")
    level = args.level if args.level is not None else jo.get("level", 0.05)
    lags = (args.extra_diff_lags if args.extra_diff_lags is not None
            else jo.get("extra_diff_lags", 0))
    target = raw.get("target")
    data = load_dataset(args.data, target=target)
    if columns is None:
        columns = list(data.columns)
    vec = johansen_test(data, case=case, level=level, columns=tuple(columns),
                        extra_diff_lags=lags)
    payload = {
        "meta": _meta(),
        "report": "johansen",
        "case": vec.case,
        "variables": list(vec.variables),
        "level": vec.level,
        "eigenvalues": vec.eigenvalues,
        "trace": {"statistics": vec.trace_stats,
                  "p_values": vec.trace_pvalues,
                  "critical_values": vec.trace_critical_values},
        "max_eig": {"statistics": vec.max_eig_stats,
                    "p_values": vec.max_eig_pvalues,
                    "critical_values": vec.max_eig_critical_values},
        "selected_rank": vec.selected_rank,
        "selected_rank_max_eig": vec.selected_rank_max_eig,
        "full_rank_indicated": vec.full_rank_indicated,
    }

    if args.check_model:
        spec = CandidateSpec.from_id(args.check_model)
        cfg = _search_config(raw, args)
        est = (nls_ec_fit(spec, data, cfg.nls) if spec.form == "levels"
               else difference_ols(spec, data))
        res = ec_consistency(vec, est, spec, target=cfg.target)
        payload["consistency"] = {
            "model": spec.id,
            "xi": res.xi,
            "reconstructed": res.reconstructed_ec,
            "target": res.target_ec,
            "coordinates": list(res.coordinates),
            "bounds": res.bounds,
            "within_bounds": res.within_bounds,
        }

    def render(p) -> str:
        lines = [f"johansen case={p['case']} level={p['level']} "
                 f"variables={','.join(p['variables'])}"]
        lines.append(f"{'r':<4}{'eigenvalue':>12}{'trace':>10}{'cv':>9}"
                     f"{'p':>8}{'max-eig':>10}{'cv':>9}{'p':>8}")
        d = len(p["eigenvalues"])
        for r in range(d):
            lines.append(
                f"{r:<4}{p['eigenvalues'][r]:>12.4f}"
                f"{p['trace']['statistics'][r]:>10.3f}"
                f"{p['trace']['critical_values'][r]:>9.3f}"
                f"{p['trace']['p_values'][r]:>8.3f}"
                f"{p['max_eig']['statistics'][r]:>10.3f}"
                f"{p['max_eig']['critical_values'][r]:>9.3f}"
                f"{p['max_eig']['p_values'][r]:>8.3f}")
        lines.append(f"selected rank: trace={p['selected_rank']} "
                     f"max-eig={p['selected_rank_max_eig']}"
                     + (" (all ranks rejected)" if p["full_rank_indicated"]
                        else ""))
        if "consistency" in p:
            c = p["consistency"]
            lines.append(f"consistency with {c['model']}: "
                         f"within_bounds={c['within_bounds']}")
        return "\n".join(lines) + "\n"

    _emit(payload, args, render)
    return 0


# --------------------------------------------------------------------------
# forecast / compare
# --------------------------------------------------------------------------

def _forecast_config(raw: dict, args, need_model: bool) -> tuple:
    fo = dict(raw.get("forecast", {}))
    model_id = args.model or fo.pop("model", None)
    if need_model and not model_id:
        raise ConfigError("a forecast model id is required "
                          "(--model or forecast.model)")
    if args.train_end is not None:
        fo["train_end"] = args.train_end
    if args.horizon_end is not None:
        fo["horizon_end"] = args.horizon_end
    if args.reps is not None:
        fo["reps"] = args.reps
    if args.seed is not None:
        fo["seed"] = args.seed
    elif "seed" not in fo:
        fo["seed"] = raw.get("seed", 0)
    if "train_end" not in fo or "horizon_end" not in fo:
        raise ConfigError("forecast needs train_end and horizon_end")
    train_end = int(fo.pop("train_end"))
    horizon_end = int(fo.pop("horizon_end"))
    try:
        cfg = ForecastConfig(horizon_start=train_end + 1,
                             horizon_end=horizon_end, **fo)
    except TypeError as exc:
        raise ConfigError(f"bad forecast configuration: {exc}") from None
    return cfg, train_end, model_id


def _cmd_forecast(args) -> int:
    raw = _load_config_file(args.config)
    scfg = _search_config(raw, args)
    data = load_dataset(args.data, target=scfg.target)
    cfg, train_end, model_id = _forecast_config(raw, args, need_model=True)
    spec = CandidateSpec.from_id(model_id)
    train = data.window(data.first_year, train_end)
    est = (nls_ec_fit(spec, train, scfg.nls) if spec.form == "levels"
           else difference_ols(spec, train))
    # worker parallelism never changes output bytes (per-repetition
    # substreams); the env var only trades wall time
    threads = int(os.environ.get("COINTSEARCH_THREADS", "1"))
    bands = mc_forecast(spec, est, data, cfg, threads=max(threads, 1))
    payload = {
        "meta": _meta(seed=cfg.seed, reps=cfg.reps),
        "report": "forecast",
        "model": spec.id,
        "train_end": train_end,
        "years": bands.years,
        "mean": bands.mean,
        "lower": bands.lower,
        "upper": bands.upper,
        "covariance_fallback": bands.covariance_fallback,
    }

    def render(p) -> str:
        lines = [f"forecast {p['model']} (train through {p['train_end']}, "
                 f"reps={p['meta']['reps']}, seed={p['meta']['seed']})",
                 f"{'year':<6}{'mean':>14}{'lower':>14}{'upper':>14}"]
        for i, year in enumerate(p["years"]):
            lines.append(f"{int(year):<6}{p['mean'][i]:>14.4f}"
                         f"{p['lower'][i]:>14.4f}{p['upper'][i]:>14.4f}")
        return "\n".join(lines) + "\n"

    _emit(payload, args, render)
    return 0


def _cmd_compare(args) -> int:
    raw = _load_config_file(args.config)
    scfg = _search_config(raw, args)
    data = load_dataset(args.data, target=scfg.target)
    co = raw.get("compare", {})
    model_ids = ([m.strip() for m in args.models.split(";")]
                 if args.models else co.get("models"))
    if not model_ids:
        raise ConfigError("compare needs model ids (--models or compare.models)")
    splits = co.get("splits")
    if args.train_end is not None and args.horizon_end is not None:
        splits = [[args.train_end, args.horizon_end]]
    if not splits:
        raise ConfigError("compare needs splits (compare.splits or "
                          "--train-end/--horizon-end)")
    reps = args.reps if args.reps is not None else co.get(
        "reps", raw.get("forecast", {}).get("reps", 10_000))
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    cfg = ForecastConfig(reps=reps, seed=seed, horizon_start=0, horizon_end=0)
    specs = [CandidateSpec.from_id(mid) for mid in model_ids]
    report = forecast_compare(specs, data, [tuple(s) for s in splits], cfg,
                              nls_options=scfg.nls)
    payload = {
        "meta": _meta(seed=seed, reps=reps),
        "report": "compare",
        "rows": [
            {
                "train_end": r.train_end, "horizon_end": r.horizon_end,
                "model": r.spec_id, "available": r.available,
                "years": r.years, "mean": r.mean, "lower": r.lower,
                "upper": r.upper, "realization": r.realization,
                "rmse": r.rmse, "mean_band_width": r.mean_band_width,
                "detail": r.detail,
            }
            for r in report.rows
        ],
    }

    def render(p) -> str:
        lines = [f"forecast comparison (reps={p['meta']['reps']}, "
                 f"seed={p['meta']['seed']})",
                 f"{'train':<7}{'model':<44}{'RMSE':>12}{'band width':>12}"]
        for r in p["rows"]:
            if r["available"]:
                lines.append(f"{r['train_end']:<7}{r['model']:<44}"
                             f"{r['rmse']:>12.4f}{r['mean_band_width']:>12.4f}")
            else:
                lines.append(f"{r['train_end']:<7}{r['model']:<44}"
                             f"{'unavailable: ' + r['detail']:>24}")
        return "\n".join(lines) + "\n"

    if args.format == "csv":
        out = comparison_to_csv(report)
        if args.out:
            Path(args.out).write_text(out)
        else:
            sys.stdout.write(out)
        return 0
    _emit(payload, args, render)
    return 0


# --------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="cointsearch",
                     description="exhaustive cointegration model search")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    def common(p, forecast_flags=False):
        p.add_argument("--data", required=True, help="CSV data file")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--format", choices=("text", "json", "csv"),
                       default="text")
        p.add_argument("--out", help="write the report to a file")
        p.add_argument("--seed", type=int)
        p.add_argument("--target")
        p.add_argument("--predictors", help="comma-separated predictor columns")
        if forecast_flags:
            p.add_argument("--train-end", type=int, dest="train_end")
            p.add_argument("--horizon-end", type=int, dest="horizon_end")
            p.add_argument("--reps", type=int)

    p = sub.add_parser("unitroot", help="ADF and KPSS pretests per variable")
    common(p)
    p.add_argument("--columns", help="comma-separated columns (default: all)")
    p.add_argument("--max-lag", type=int, dest="max_lag")
    p.set_defaults(func=_cmd_unitroot)

    p = sub.add_parser("search", help="exhaustive candidate search")
    common(p)
    p.add_argument("--mode", choices=("levels", "differences"))
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("johansen", help="VEC rank tests")
    common(p)
    p.add_argument("--columns", help="comma-separated system columns")
    p.add_argument("--case", choices=("restricted_constant",
                                      "restricted_trend_with_drift"))
    p.add_argument("--level", type=float)
    p.add_argument("--extra-diff-lags", type=int, dest="extra_diff_lags")
    p.add_argument("--check-model", dest="check_model",
                   help="candidate id for the EC consistency check")
    p.set_defaults(func=_cmd_johansen)

    p = sub.add_parser("forecast", help="Monte Carlo forecast bands")
    common(p, forecast_flags=True)
    p.add_argument("--model", help="candidate id to forecast")
    p.set_defaults(func=_cmd_forecast)

    p = sub.add_parser("compare", help="re-estimate and compare forecasts")
    common(p, forecast_flags=True)
    p.add_argument("--models", help="semicolon-separated candidate ids")
    p.set_defaults(func=_cmd_compare)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (DataError, ConfigError, AlignmentError, InsufficientDataError,
            DegenerateSeriesError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (CointsearchError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(run_cli())
