"""Command-line front end: ``oddsgen <verb> [options]``.

Verbs
-----
fit         fit a model to a one-column CSV
gof         fit, then goodness-of-fit statistics and information criteria
compare     T2GWE and competitors side by side, sorted by AIC
properties  moments, entropies and tail behaviour at given or fitted parameters
simulate    bias/MSE simulation study
curves      ECDF, Kaplan-Meier, TTT, fitted curves and histogram as CSV files

Options may also come from ``--config file.json`` whose keys mirror the
long flag names (``data``, ``family``, ``method``...); flags given on the
command line win.  Failures print ``{"error": ..., "message": ...}`` to
stderr and exit with status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .competitors import COMPETITORS, FAMILY_MODELS, FamilyModel, competitor_fit, get_model
from .errors import ConfigError, DataError, IntegrationError
from .estimation import METHODS, Dataset, FitConfig, FitResult, fit
from .family import ParamVector, t2gwg_quantile
from .gof import empirical_curves, gof_report
from .montecarlo import ci_plan, full_plan, run_simulation
from .properties import (
    moment_raw,
    moment_summary,
    mgf,
    renyi_entropy,
    shannon_entropy,
    tail_exponential_rate,
    tail_power_exponent,
)

__all__ = ["ingest_csv", "main", "build_parser", "run", "compare_rows"]

COMPARE_MODELS = ("T2GWE", "EGT", "WGE", "LGT", "T2G", "EWL")
TABLE_DIGITS = 6
EXIT_ERROR = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


# ---- ingestion -----------------------------------------------------------------

def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def ingest_csv(path) -> Dataset:
    """Read one numeric value per row; a non-numeric first row is a header.

    Raises
    ------
    DataError
        On an empty file, a blank or multi-column row, or a value that is
        not a finite number; the message names the 1-based line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataError(f"{path}: file is empty")
    values = []
    for line, row in enumerate(rows, 1):
        cells = [c.strip() for c in row]
        if line == 1 and len(cells) == 1 and cells[0] and not _is_number(cells[0]):
            continue
        if not cells or not any(cells):
            raise DataError(f"{path}: line {line} is empty")
        if len(cells) > 1:
            raise DataError(
                f"{path}: line {line} has {len(cells)} columns; expected one value per row "
                "(censoring indicators are not supported)"
            )
        try:
            v = float(cells[0])
        except ValueError:
            raise DataError(f"{path}: line {line}: {cells[0]!r} is not a number") from None
        if not math.isfinite(v):
            raise DataError(f"{path}: line {line}: non-finite value {cells[0]!r}")
        values.append(v)
    if not values:
        raise DataError(f"{path}: no data rows")
    return Dataset(values)


# ---- output helpers ------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{TABLE_DIGITS}g}" if math.isfinite(v) else ""
    return str(v)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


# ---- model plumbing --------------------------------------------------------------------

def _model_key(family: str | None, baseline: str | None) -> str:
    fam = (family or "T2GWG").upper()
    if fam in ("T2GWG", "FAMILY"):
        return baseline or "exponential"
    if fam in FAMILY_MODELS:
        if baseline and baseline != FAMILY_MODELS[fam]:
            raise ConfigError(f"family {fam} implies the {FAMILY_MODELS[fam]} baseline, not {baseline!r}")
        return FAMILY_MODELS[fam]
    if fam in COMPETITORS:
        return fam
    raise ConfigError(f"unknown family {family!r}; choose T2GWG (with --baseline), "
                      f"{', '.join(sorted(FAMILY_MODELS))} or {', '.join(COMPETITORS)}")


def _fit_config(cfg: dict, method: str = "mle") -> FitConfig:
    kw = {"method": method, "seed": int(cfg.get("seed") or 0)}
    if cfg.get("starts") is not None:
        kw["starts"] = int(cfg["starts"])
    if cfg.get("tol") is not None:
        kw["tolerance"] = float(cfg["tol"])
    if cfg.get("optimizer"):
        kw["optimizer"] = cfg["optimizer"]
    if cfg.get("max_iterations") is not None:
        kw["max_iterations"] = int(cfg["max_iterations"])
    return FitConfig(**kw)


def fit_model(model_key: str, data: Dataset, config: FitConfig) -> FitResult:
    m = get_model(model_key)
    if isinstance(m, FamilyModel):
        return fit(data, m.baseline, config)
    return competitor_fit(m, data, config)


def _methods(cfg: dict) -> list[str]:
    raw = cfg.get("method") or "mle"
    items = raw if isinstance(raw, (list, tuple)) else str(raw).split(",")
    out = [m.strip().lower() for m in items if m.strip()]
    bad = [m for m in out if m not in METHODS]
    if bad:
        raise ConfigError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    return out


def _float_list(raw, name: str) -> list[float]:
    if raw is None:
        return []
    items = raw if isinstance(raw, (list, tuple)) else str(raw).split(",")
    try:
        return [float(v) for v in items if str(v).strip()]
    except ValueError:
        raise ConfigError(f"--{name} expects comma-separated numbers, got {raw!r}") from None


def _require_data(cfg: dict) -> Dataset:
    if not cfg.get("data"):
        raise ConfigError("this command needs --data <path>")
    return ingest_csv(cfg["data"])


def _params_or_fit(cfg: dict, key: str):
    """Parameters from ``--params`` or, failing that, an MLE fit to ``--data``."""
    vals = _float_list(cfg.get("params"), "params")
    m = get_model(key)
    if vals:
        if len(vals) != m.param_count:
            raise ConfigError(f"{m.name} takes {m.param_count} parameters, got {len(vals)}")
        return ParamVector.from_array(vals) if isinstance(m, FamilyModel) else tuple(vals), None
    data = _require_data(cfg)
    res = fit_model(key, data, _fit_config(cfg))
    return res.estimates, res


# ---- commands ----------------------------------------------------------------------------

def cmd_fit(cfg: dict) -> str:
    data = _require_data(cfg)
    key = _model_key(cfg.get("family"), cfg.get("baseline"))
    results = [fit_model(key, data, _fit_config(cfg, m)) for m in _methods(cfg)]
    if cfg.get("format") == "csv":
        rows = []
        for r in results:
            se = r.std_errors or (math.nan,) * len(r.param_names)
            for name, est, s in zip(r.param_names, r.estimate_array(), se):
                rows.append([r.model, r.method, name, est, s, r.neg2_loglik, r.converged])
        return _csv_text(["model", "method", "parameter", "estimate", "std_error", "neg2_loglik", "converged"], rows)
    out = [r.as_dict() for r in results]
    return _dump_json(out[0] if len(out) == 1 else out)


def _fit_and_gof(key: str, data: Dataset, config: FitConfig) -> dict:
    r = fit_model(key, data, config)
    return {"fit": r.as_dict(), "gof": gof_report(r, key, data).as_dict()}


def cmd_gof(cfg: dict) -> str:
    data = _require_data(cfg)
    key = _model_key(cfg.get("family"), cfg.get("baseline"))
    rows = [_fit_and_gof(key, data, _fit_config(cfg, m)) for m in _methods(cfg)]
    if cfg.get("format") == "csv":
        cols = list(rows[0]["gof"])
        body = [[row["fit"]["method"], *[row["gof"][c] for c in cols]] for row in rows]
        return _csv_text(["method", *cols], body)
    return _dump_json(rows[0] if len(rows) == 1 else rows)


GOF_COLUMNS = ("neg2_loglik", "aic", "caic", "bic", "hqic", "w_star", "a_star", "ks_stat", "ks_pvalue")


def compare_rows(data: Dataset, models: Sequence[str], config: FitConfig) -> list[dict]:
    """One row per model (MLE fit plus report), sorted by AIC; failures last."""
    rows = []
    for name in models:
        key = _model_key(name, None)
        row = {"model": get_model(key).name, "fit": None, "gof": None, "error": None}
        try:
            r = fit_model(key, data, config)
            row["fit"] = r.as_dict()
            row["gof"] = gof_report(r, key, data).as_dict()
        except (ValueError, ArithmeticError, IntegrationError) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return sorted(rows, key=lambda r: (r["gof"] is None, r["gof"]["aic"] if r["gof"] else 0.0))


def cmd_compare(cfg: dict) -> str:
    data = _require_data(cfg)
    requested = cfg.get("models")
    if requested:
        names = [m.strip().upper() for m in (requested if isinstance(requested, list) else str(requested).split(",")) if m.strip()]
        if "T2GWE" not in names:
            names = ["T2GWE", *names]
    else:
        names = list(COMPARE_MODELS)
    rows = compare_rows(data, names, _fit_config(cfg))
    if cfg.get("format") == "csv":
        width = max((len(r["fit"]["estimates"]) for r in rows if r["fit"]), default=0)
        header = ["model"]
        for j in range(width):
            header += [f"par{j + 1}", f"est{j + 1}", f"se{j + 1}"]
        header += [*GOF_COLUMNS, "converged", "error"]
        body = []
        for r in rows:
            line = [r["model"]]
            est = list(r["fit"]["estimates"].items()) if r["fit"] else []
            se = r["fit"]["std_errors"] if r["fit"] else None
            for j in range(width):
                if j < len(est):
                    line += [est[j][0], est[j][1], se[est[j][0]] if se else math.nan]
                else:
                    line += ["", math.nan, math.nan]
            g = r["gof"] or {}
            line += [g.get(c, math.nan) for c in GOF_COLUMNS]
            line += [r["fit"]["converged"] if r["fit"] else "", r["error"] or ""]
            body.append(line)
        return _csv_text(header, body)
    return _dump_json(rows)


def _safe(fn, *args):
    try:
        return {"value": fn(*args)}
    except (IntegrationError, ValueError) as exc:
        return {"value": None, "error": str(exc)}


def cmd_properties(cfg: dict) -> str:
    key = _model_key(cfg.get("family"), cfg.get("baseline"))
    m = get_model(key)
    if not isinstance(m, FamilyModel):
        raise ConfigError("properties are available for the T2GWG family only")
    params, _ = _params_or_fit(cfg, key)
    b = m.baseline
    orders = int(cfg.get("moments") or 4)
    omegas = _float_list(cfg.get("renyi"), "renyi") or [0.5, 2.0]
    ts = _float_list(cfg.get("mgf"), "mgf")
    out: dict[str, Any] = {
        "model": m.name,
        "params": dict(zip(m.param_names, params.as_array())),
        "quantiles": {str(q): float(t2gwg_quantile(params, b, q)) for q in (0.1, 0.25, 0.5, 0.75, 0.9)},
        "tail": {"power_exponent": tail_power_exponent(params, b), "exponential_rate": tail_exponential_rate(params, b)},
        "raw_moments": {str(r): _safe(moment_raw, params, b, r) for r in range(1, orders + 1)},
        "shannon_entropy": _safe(shannon_entropy, params, b),
        "renyi_entropy": {str(w): _safe(renyi_entropy, params, b, w) for w in omegas},
        "mgf": {str(t): _safe(mgf, params, b, t) for t in ts},
    }
    try:
        s = moment_summary(params, b)
        out["summary"] = {"mean": s.mean, "variance": s.variance, "skewness": s.skewness, "kurtosis": s.kurtosis}
    except (IntegrationError, ValueError) as exc:
        out["summary"] = {"error": str(exc)}
    if cfg.get("format") == "csv":
        rows = [["mean", out["summary"].get("mean")], ["variance", out["summary"].get("variance")]]
        rows += [[f"moment_{r}", v["value"]] for r, v in out["raw_moments"].items()]
        rows += [["shannon", out["shannon_entropy"]["value"]]]
        rows += [[f"renyi_{w}", v["value"]] for w, v in out["renyi_entropy"].items()]
        rows += [[f"mgf_{t}", v["value"]] for t, v in out["mgf"].items()]
        return _csv_text(["quantity", "value"], [[k, math.nan if v is None else v] for k, v in rows])
    return _dump_json(out)


def cmd_simulate(cfg: dict) -> str:
    profile = cfg.get("profile") or "full"
    if profile not in ("full", "ci"):
        raise ConfigError("--profile must be 'full' or 'ci'")
    kw: dict[str, Any] = {}
    truth = _float_list(cfg.get("truth"), "truth")
    if truth:
        kw["truth"] = ParamVector.from_array(truth)
    if cfg.get("baseline"):
        kw["baseline"] = cfg["baseline"]
    if cfg.get("sizes"):
        kw["sample_sizes"] = tuple(int(v) for v in _float_list(cfg["sizes"], "sizes"))
    if cfg.get("replications") is not None:
        kw["replications"] = int(cfg["replications"])
    if cfg.get("method"):
        kw["methods"] = tuple(_methods(cfg))
    if cfg.get("seed") is not None:
        kw["seed"] = int(cfg["seed"])
    if cfg.get("starts") is not None:
        kw["starts"] = int(cfg["starts"])
    if cfg.get("optimizer"):
        kw["optimizer"] = cfg["optimizer"]
    if cfg.get("tol") is not None:
        kw["tolerance"] = float(cfg["tol"])
    plan = ci_plan(**kw) if profile == "ci" else full_plan(**kw)
    report = run_simulation(plan, workers=int(cfg.get("workers") or 1))
    if cfg.get("format") == "csv":
        return report.to_csv()
    return report.to_json() + "\n"


def cmd_curves(cfg: dict) -> str:
    data = _require_data(cfg)
    key = _model_key(cfg.get("family"), cfg.get("baseline"))
    params, _ = _params_or_fit(cfg, key)
    out_dir = Path(cfg.get("out") or "curves")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out_dir}: {exc.strerror or exc}") from None
    c = empirical_curves(data, (key, params))
    m = get_model(key)
    hist = c.histogram
    mids = 0.5 * (hist[:-1, 0] + hist[1:, 0])
    files = {
        "ecdf.csv": (["x", "y"], c.ecdf),
        "km.csv": (["x", "y"], c.km),
        "ttt.csv": (["x", "y"], c.ttt if c.ttt is not None else np.empty((0, 2))),
        "theoretical.csv": (["x", "cdf", "survival", "pdf"], np.column_stack([c.cdf, c.sf[:, 1], c.pdf[:, 1]])),
        "histogram.csv": (
            ["left", "right", "density", "fitted_pdf"],
            np.column_stack([hist[:-1, 0], hist[1:, 0], hist[:-1, 1], m.pdf(mids, params)]),
        ),
        "hazard.csv": (["x", "y"], c.hazard),
    }
    written = []
    for name, (header, arr) in files.items():
        path = out_dir / name
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([repr(float(v)) for v in row] for row in arr)
        try:
            path.write_text(buf.getvalue())
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from None
        written.append(str(path))
    return _dump_json({"model": m.name, "params": dict(zip(m.param_names, np.asarray(
        params.as_array() if isinstance(params, ParamVector) else params))), "files": written})


COMMANDS = {
    "fit": cmd_fit,
    "gof": cmd_gof,
    "compare": cmd_compare,
    "properties": cmd_properties,
    "simulate": cmd_simulate,
    "curves": cmd_curves,
}


# ---- argument parsing ------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common")
    g.add_argument("--config", help="JSON file with option values; flags override it")
    g.add_argument("--data", help="one-column CSV of observations")
    g.add_argument("--family", help="T2GWG (with --baseline), T2GWE/T2GWU/T2GWP or a competitor")
    g.add_argument("--baseline", help="exponential, uniform or pareto")
    g.add_argument("--method", help="comma-separated estimation methods: " + ",".join(METHODS))
    g.add_argument("--seed", type=int, help="random seed (default 0)")
    g.add_argument("--out", help="output file (directory for curves)")
    g.add_argument("--format", choices=["json", "csv"], help="output format (default json)")
    g.add_argument("--starts", type=int, help="multistart count")
    g.add_argument("--tol", type=float, help="objective tolerance")
    g.add_argument("--optimizer", choices=["simplex", "quasi-newton"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oddsgen", description="T2GWG distribution family: fitting, diagnostics, simulation.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, help_text in [
        ("fit", "fit a model"),
        ("gof", "fit and report goodness-of-fit statistics"),
        ("compare", "compare T2GWE with competitor models"),
        ("properties", "moments, entropies and tails"),
        ("simulate", "bias/MSE simulation study"),
        ("curves", "write plotting point series"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _common(p)
        if name == "compare":
            p.add_argument("--models", help="comma-separated models (T2GWE is always included)")
        if name in ("properties", "curves"):
            p.add_argument("--params", help="comma-separated parameters; fitted from --data when omitted")
        if name == "properties":
            p.add_argument("--moments", type=int, help="highest raw moment order (default 4)")
            p.add_argument("--renyi", help="comma-separated Renyi orders (default 0.5,2)")
            p.add_argument("--mgf", help="comma-separated points for the moment generating function")
        if name == "simulate":
            p.add_argument("--profile", choices=["full", "ci"], help="preset plan (default full)")
            p.add_argument("--truth", help="comma-separated true parameters")
            p.add_argument("--sizes", help="comma-separated sample sizes")
            p.add_argument("--replications", type=int)
            p.add_argument("--workers", type=int, help="worker processes")
    return parser


def _load_config(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    aliases = {"input_path": "data", "output_path": "out", "methods": "method", "tolerance": "tol"}
    return {aliases.get(k, k): v for k, v in raw.items()}


def resolve_config(argv: Sequence[str] | None) -> dict:
    """Merge ``--config`` file values with explicit flags (flags win)."""
    ns = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(ns).items() if v is not None}
    cfg = _load_config(flags["config"]) if flags.get("config") else {}
    file_cmd = cfg.pop("command", None)
    cfg.update(flags)
    if "command" not in cfg and file_cmd:
        cfg["command"] = file_cmd
    if cfg.get("command") not in COMMANDS:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    return cfg


def run(argv: Sequence[str] | None = None) -> str:
    cfg = resolve_config(argv)
    text = COMMANDS[cfg["command"]](cfg)
    if cfg["command"] != "curves":
        _emit(text, cfg.get("out"))
        return text
    sys.stdout.write(text)
    return text


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        run(argv)
    except UsageError as exc:
        return _fail("UsageError", str(exc), EXIT_USAGE)
    except (ValueError, ArithmeticError, IntegrationError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_ERROR)
    return 0


if __name__ == "__main__":
    sys.exit(main())
