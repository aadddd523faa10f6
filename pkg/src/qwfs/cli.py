"""Command-line entry point: seeded runs from JSON configs, CSV/JSON output,
and canned recipes for the publication-style figures.

Exit codes: 0 success, 1 runtime failure (I/O, optimizer), 2 usage or config
error.  Data CSVs are byte-reproducible for a given config; run summaries go
to a JSON sidecar next to the CSV.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .configurations import LAYOUTS
from .experiments import (
    BASELINE_MODES,
    CONFIG_LABELS,
    low_doc_slope,
    make_config_label,
    run_ensemble,
    run_mirror_diagnostic,
    sweep_doc,
    sweep_n,
)
from .media import MEDIUM_KINDS, MediumModel, generate, save_matrix
from .shaping import OptimizerFailure, OptimizerSpec

CSV_HEADER = (
    "config,model,n,doc,realization,seed,p_opt,p0,eta,eta_over_n,"
    "sigma1_sq,converged,iterations,baseline_mode"
)

SUMMARY_CONFIGS = ("1p-s", "2p-is", "2p-is-opc", "2p-ds", "2p-ds-opc")

_OPTIMIZER_KEYS = (
    "algorithm",
    "restarts",
    "max_iterations",
    "gradient_tolerance",
    "objective_tolerance",
    "history_size",
)


class ConfigError(Exception):
    """Invalid configuration file or flag combination."""


# ---------------------------------------------------------------------------
# Config loading and merging


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level value must be a JSON object")
    return data


def _reject_unknown(doc: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(unknown)}")


def _merge(defaults: dict, config: dict, overrides: dict) -> dict:
    merged = dict(defaults)
    merged.update(config)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged


def _coerce_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ConfigError(f"field {name!r} must be an integer, got {value!r}")
    return int(value)


def _coerce_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {name!r} must be a number, got {value!r}")
    return float(value)


def _coerce_choice(value, name: str, choices) -> str:
    if value not in choices:
        raise ConfigError(f"field {name!r} must be one of {list(choices)}, got {value!r}")
    return value


def _coerce_list(value, name: str):
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"field {name!r} must be a non-empty list, got {value!r}")
    return list(value)


def _optimizer_spec(doc) -> OptimizerSpec:
    if doc is None:
        return OptimizerSpec()
    if not isinstance(doc, dict):
        raise ConfigError(f"field 'optimizer' must be an object, got {doc!r}")
    _reject_unknown(doc, _OPTIMIZER_KEYS, "optimizer")
    kwargs = {}
    if "algorithm" in doc:
        kwargs["algorithm"] = doc["algorithm"]
    for key in ("restarts", "max_iterations", "history_size"):
        if key in doc:
            kwargs[key] = _coerce_int(doc[key], f"optimizer.{key}")
    for key in ("gradient_tolerance", "objective_tolerance"):
        if key in doc:
            kwargs[key] = _coerce_float(doc[key], f"optimizer.{key}")
    try:
        return OptimizerSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid optimizer settings: {exc}") from exc


def _optimizer_overrides(args) -> dict:
    doc = {}
    for key in _OPTIMIZER_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    return doc


def _check_doc_value(doc: float, n: int) -> float:
    if not (0.0 < doc <= 1.0):
        raise ConfigError(f"doc must lie in (0, 1], got {doc}")
    m = round(doc * n)
    if m < 1 or abs(m - doc * n) > 1e-9:
        raise ConfigError(f"doc * n must be integral, got doc={doc}, n={n}")
    return doc


def _check_baseline(baseline: str | None, model: str) -> str | None:
    if baseline is None:
        return None
    _coerce_choice(baseline, "baseline", BASELINE_MODES)
    if baseline == "analytic-unitary" and model != "unitary":
        raise ConfigError("baseline 'analytic-unitary' is only valid with model 'unitary'")
    return baseline


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("QWFS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"QWFS_THREADS must be an integer, got {env!r}") from exc
    return 1


# ---------------------------------------------------------------------------
# Output writing


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _record_row(record) -> str:
    sigma = _fmt(record.sigma1_sq) if record.sigma1_sq is not None else ""
    return ",".join(
        [
            record.config,
            record.model,
            str(record.n),
            _fmt(record.doc),
            str(record.realization_id),
            str(record.seed),
            _fmt(record.p_opt),
            _fmt(record.p0),
            _fmt(record.eta),
            _fmt(record.eta_over_n),
            sigma,
            "true" if record.converged else "false",
            str(record.iterations),
            record.baseline_mode,
        ]
    )


def _write_lines(path: str, lines: list[str]) -> None:
    out = Path(path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def _write_records_csv(path: str, records, sweep_values=None) -> None:
    if sweep_values is None:
        lines = [CSV_HEADER] + [_record_row(r) for r in records]
    else:
        lines = ["sweep_value," + CSV_HEADER] + [
            _fmt(v) + "," + _record_row(r) for v, r in zip(sweep_values, records)
        ]
    _write_lines(path, lines)


def _sidecar_path(output: str) -> str:
    p = Path(output)
    return str(p.with_suffix(".json")) if p.suffix == ".csv" else str(p) + ".json"


def _write_json(path: str, payload) -> None:
    _write_lines(path, [json.dumps(payload, indent=2, sort_keys=True)])


def _summary_payload(summary) -> dict:
    return {
        "config": summary.config,
        "model": summary.model,
        "n": summary.n,
        "doc": summary.doc,
        "mean_eta_over_n": summary.mean_eta_over_n,
        "std_eta_over_n": summary.std_eta_over_n,
        "realizations": summary.realizations,
        "failed": summary.failed,
    }


# ---------------------------------------------------------------------------
# Subcommands


_RUN_KEYS = (
    "model",
    "configuration",
    "symmetric",
    "n",
    "doc",
    "realizations",
    "seed",
    "optimizer",
    "baseline",
    "output",
)

_RUN_DEFAULTS = {
    "model": "unitary",
    "configuration": "1p-s",
    "symmetric": False,
    "n": 128,
    "doc": 1.0,
    "realizations": 40,
    "seed": 1,
    "optimizer": None,
    "baseline": None,
    "output": "results.csv",
}


def _run_settings(args) -> dict:
    config = _load_config(args.config) if args.config else {}
    _reject_unknown(config, _RUN_KEYS, "config")
    overrides = {
        "model": args.model,
        "configuration": args.configuration,
        "symmetric": args.symmetric,
        "n": args.n,
        "doc": args.doc,
        "realizations": args.realizations,
        "seed": args.seed,
        "baseline": args.baseline,
        "output": args.output,
    }
    optimizer_overrides = _optimizer_overrides(args)
    if optimizer_overrides:
        merged_opt = dict(config.get("optimizer") or {})
        merged_opt.update(optimizer_overrides)
        overrides["optimizer"] = merged_opt
    settings = _merge(_RUN_DEFAULTS, config, overrides)
    settings["model"] = _coerce_choice(settings["model"], "model", MEDIUM_KINDS)
    settings["configuration"] = _coerce_choice(settings["configuration"], "configuration", LAYOUTS)
    if not isinstance(settings["symmetric"], bool):
        raise ConfigError(f"field 'symmetric' must be a boolean, got {settings['symmetric']!r}")
    settings["n"] = _coerce_int(settings["n"], "n")
    if settings["n"] < 1:
        raise ConfigError("n must be >= 1")
    settings["doc"] = _check_doc_value(_coerce_float(settings["doc"], "doc"), settings["n"])
    settings["realizations"] = _coerce_int(settings["realizations"], "realizations")
    if settings["realizations"] < 1:
        raise ConfigError("realizations must be >= 1")
    settings["seed"] = _coerce_int(settings["seed"], "seed")
    settings["baseline"] = _check_baseline(settings["baseline"], settings["model"])
    settings["spec"] = _optimizer_spec(settings.pop("optimizer"))
    settings["label"] = make_config_label(settings["configuration"], settings["symmetric"])
    return settings


def cmd_run(args) -> int:
    s = _run_settings(args)
    summary, records = run_ensemble(
        s["label"],
        s["model"],
        s["n"],
        s["doc"],
        s["spec"],
        s["seed"],
        s["realizations"],
        threads=_threads(args),
        baseline=s["baseline"],
    )
    _write_records_csv(s["output"], records)
    _write_json(_sidecar_path(s["output"]), _summary_payload(summary))
    if not records:
        print("error: the optimizer failed on every realization", file=sys.stderr)
        return 1
    print(
        f"{s['label']} {s['model']} n={s['n']} doc={s['doc']:g}: "
        f"eta/N = {summary.mean_eta_over_n:.6g} +- {summary.std_eta_over_n:.3g} "
        f"({summary.realizations} realizations) -> {s['output']}"
    )
    return 0


_SUMMARY_KEYS = ("n", "realizations", "seed", "optimizer", "output", "models", "configurations")

_SUMMARY_DEFAULTS = {
    "n": 128,
    "realizations": 40,
    "seed": 1,
    "optimizer": None,
    "output": "summary.csv",
    "models": ["unitary", "gaussian"],
    "configurations": list(SUMMARY_CONFIGS),
}


def cmd_summary(args) -> int:
    config = _load_config(args.config) if args.config else {}
    _reject_unknown(config, _SUMMARY_KEYS, "config")
    overrides = {
        "n": args.n,
        "realizations": args.realizations,
        "seed": args.seed,
        "output": args.output,
        "models": args.models.split(",") if args.models else None,
        "configurations": args.configurations.split(",") if args.configurations else None,
    }
    optimizer_overrides = _optimizer_overrides(args)
    if optimizer_overrides:
        merged_opt = dict(config.get("optimizer") or {})
        merged_opt.update(optimizer_overrides)
        overrides["optimizer"] = merged_opt
    s = _merge(_SUMMARY_DEFAULTS, config, overrides)
    n = _coerce_int(s["n"], "n")
    realizations = _coerce_int(s["realizations"], "realizations")
    seed = _coerce_int(s["seed"], "seed")
    spec = _optimizer_spec(s["optimizer"])
    models = [_coerce_choice(m, "models", MEDIUM_KINDS) for m in _coerce_list(s["models"], "models")]
    labels = [
        _coerce_choice(c, "configurations", CONFIG_LABELS)
        for c in _coerce_list(s["configurations"], "configurations")
    ]
    threads = _threads(args)

    all_records = []
    summaries = []
    print(f"{'config':<22}{'model':<10}{'mean eta/N':>12}{'std':>10}{'runs':>6}{'failed':>8}")
    for label in labels:
        for model in models:
            summary, records = run_ensemble(
                label, model, n, 1.0, spec, seed, realizations, threads=threads
            )
            all_records.extend(records)
            summaries.append(summary)
            print(
                f"{label:<22}{model:<10}{summary.mean_eta_over_n:>12.4f}"
                f"{summary.std_eta_over_n:>10.4f}{summary.realizations:>6}{summary.failed:>8}"
            )
    _write_records_csv(s["output"], all_records)
    _write_json(_sidecar_path(s["output"]), [_summary_payload(x) for x in summaries])
    return 0


_SWEEP_DOC_KEYS = (
    "models",
    "configurations",
    "n",
    "docs",
    "realizations",
    "seed",
    "optimizer",
    "baseline",
    "output",
)

_SWEEP_DOC_DEFAULTS = {
    "models": ["unitary"],
    "configurations": ["1p-s"],
    "n": 128,
    "docs": [1 / 128, 1 / 64, 1 / 32, 1 / 16, 1 / 8, 1 / 4, 1 / 2, 1.0],
    "realizations": 40,
    "seed": 1,
    "optimizer": None,
    "baseline": None,
    "output": "sweep-doc.csv",
}


def _parse_number_list(text: str, name: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {name!r} list from {text!r}") from exc


def cmd_sweep_doc(args) -> int:
    config = _load_config(args.config) if args.config else {}
    _reject_unknown(config, _SWEEP_DOC_KEYS, "config")
    overrides = {
        "models": args.models.split(",") if args.models else None,
        "configurations": args.configurations.split(",") if args.configurations else None,
        "n": args.n,
        "docs": _parse_number_list(args.docs, "docs") if args.docs else None,
        "realizations": args.realizations,
        "seed": args.seed,
        "baseline": args.baseline,
        "output": args.output,
    }
    optimizer_overrides = _optimizer_overrides(args)
    if optimizer_overrides:
        merged_opt = dict(config.get("optimizer") or {})
        merged_opt.update(optimizer_overrides)
        overrides["optimizer"] = merged_opt
    s = _merge(_SWEEP_DOC_DEFAULTS, config, overrides)
    n = _coerce_int(s["n"], "n")
    realizations = _coerce_int(s["realizations"], "realizations")
    seed = _coerce_int(s["seed"], "seed")
    spec = _optimizer_spec(s["optimizer"])
    docs = [
        _check_doc_value(_coerce_float(d, "docs"), n) for d in _coerce_list(s["docs"], "docs")
    ]
    models = [_coerce_choice(m, "models", MEDIUM_KINDS) for m in _coerce_list(s["models"], "models")]
    labels = [
        _coerce_choice(c, "configurations", CONFIG_LABELS)
        for c in _coerce_list(s["configurations"], "configurations")
    ]
    threads = _threads(args)

    rows, values, payload_points, slopes = [], [], [], {}
    for label in labels:
        for model in models:
            baseline = _check_baseline(s["baseline"], model) if s["baseline"] else None
            points = sweep_doc(
                label, model, n, docs, spec, seed, realizations, threads=threads, baseline=baseline
            )
            for point in points:
                for record in point.records:
                    rows.append(record)
                    values.append(point.sweep_value)
                payload_points.append(
                    {"sweep_value": point.sweep_value, **_summary_payload(point.summary)}
                )
            slope = low_doc_slope(points)
            if slope is not None:
                slopes[f"{label}/{model}"] = slope
    _write_records_csv(s["output"], rows, sweep_values=values)
    _write_json(
        _sidecar_path(s["output"]), {"points": payload_points, "low_doc_slopes": slopes}
    )
    print(f"wrote {len(rows)} rows -> {s['output']}")
    for key, slope in slopes.items():
        print(f"low-DOC slope {key}: {slope:.4f}")
    return 0


_SWEEP_N_KEYS = (
    "models",
    "configurations",
    "n_list",
    "doc",
    "realizations",
    "seed",
    "optimizer",
    "baseline",
    "output",
)

_SWEEP_N_DEFAULTS = {
    "models": ["unitary"],
    "configurations": ["2p-ds"],
    "n_list": [32, 64, 128, 256],
    "doc": 1.0,
    "realizations": 20,
    "seed": 1,
    "optimizer": None,
    "baseline": None,
    "output": "sweep-n.csv",
}


def cmd_sweep_n(args) -> int:
    config = _load_config(args.config) if args.config else {}
    _reject_unknown(config, _SWEEP_N_KEYS, "config")
    overrides = {
        "models": args.models.split(",") if args.models else None,
        "configurations": args.configurations.split(",") if args.configurations else None,
        "n_list": [int(v) for v in _parse_number_list(args.n_list, "n_list")]
        if args.n_list
        else None,
        "doc": args.doc,
        "realizations": args.realizations,
        "seed": args.seed,
        "baseline": args.baseline,
        "output": args.output,
    }
    optimizer_overrides = _optimizer_overrides(args)
    if optimizer_overrides:
        merged_opt = dict(config.get("optimizer") or {})
        merged_opt.update(optimizer_overrides)
        overrides["optimizer"] = merged_opt
    s = _merge(_SWEEP_N_DEFAULTS, config, overrides)
    n_list = [_coerce_int(v, "n_list") for v in _coerce_list(s["n_list"], "n_list")]
    if any(v < 1 for v in n_list):
        raise ConfigError("all n_list entries must be >= 1")
    realizations = _coerce_int(s["realizations"], "realizations")
    seed = _coerce_int(s["seed"], "seed")
    doc = _coerce_float(s["doc"], "doc")
    for n in n_list:
        _check_doc_value(doc, n)
    spec = _optimizer_spec(s["optimizer"])
    models = [_coerce_choice(m, "models", MEDIUM_KINDS) for m in _coerce_list(s["models"], "models")]
    labels = [
        _coerce_choice(c, "configurations", CONFIG_LABELS)
        for c in _coerce_list(s["configurations"], "configurations")
    ]
    threads = _threads(args)

    rows, values, payload_points = [], [], []
    for label in labels:
        for model in models:
            baseline = _check_baseline(s["baseline"], model) if s["baseline"] else None
            points = sweep_n(
                label,
                model,
                n_list,
                spec,
                seed,
                realizations,
                threads=threads,
                baseline=baseline,
                doc=doc,
            )
            for point in points:
                for record in point.records:
                    rows.append(record)
                    values.append(point.sweep_value)
                payload_points.append(
                    {
                        "sweep_value": point.sweep_value,
                        "mean_sigma1_sq": point.mean_sigma1_sq,
                        "mean_total_optimized": point.mean_total_optimized,
                        **_summary_payload(point.summary),
                    }
                )
    _write_records_csv(s["output"], rows, sweep_values=values)
    _write_json(_sidecar_path(s["output"]), {"points": payload_points})
    print(f"wrote {len(rows)} rows -> {s['output']}")
    return 0


def cmd_gen_matrix(args) -> int:
    model = MediumModel(
        kind=_coerce_choice(args.model, "model", MEDIUM_KINDS),
        n=args.n,
        seed=args.seed,
    )
    save_matrix(generate(model), args.out)
    print(f"wrote {args.model} matrix n={args.n} seed={args.seed} -> {args.out}")
    return 0


_DIAGNOSE_KEYS = (
    "model",
    "configuration",
    "symmetric",
    "n",
    "doc",
    "seed",
    "optimizer",
    "baseline",
    "output",
)

_DIAGNOSE_DEFAULTS = {
    "model": "unitary",
    "configuration": "2p-ds",
    "symmetric": True,
    "n": 128,
    "doc": 1.0,
    "seed": 1,
    "optimizer": None,
    "baseline": None,
    "output": "mirror-field.csv",
}


def cmd_diagnose(args) -> int:
    config = _load_config(args.config) if args.config else {}
    _reject_unknown(config, _DIAGNOSE_KEYS, "config")
    overrides = {
        "model": args.model,
        "configuration": args.configuration,
        "symmetric": args.symmetric,
        "n": args.n,
        "doc": args.doc,
        "seed": args.seed,
        "baseline": args.baseline,
        "output": args.output,
    }
    optimizer_overrides = _optimizer_overrides(args)
    if optimizer_overrides:
        merged_opt = dict(config.get("optimizer") or {})
        merged_opt.update(optimizer_overrides)
        overrides["optimizer"] = merged_opt
    s = _merge(_DIAGNOSE_DEFAULTS, config, overrides)
    model = _coerce_choice(s["model"], "model", MEDIUM_KINDS)
    if s["configuration"] != "2p-ds":
        raise ConfigError("diagnose requires configuration '2p-ds'")
    if not isinstance(s["symmetric"], bool):
        raise ConfigError(f"field 'symmetric' must be a boolean, got {s['symmetric']!r}")
    n = _coerce_int(s["n"], "n")
    doc = _check_doc_value(_coerce_float(s["doc"], "doc"), n)
    seed = _coerce_int(s["seed"], "seed")
    baseline = _check_baseline(s["baseline"], model)
    spec = _optimizer_spec(s["optimizer"])
    label = make_config_label("2p-ds", s["symmetric"])

    diag = run_mirror_diagnostic(label, model, n, doc, spec, seed, baseline=baseline)
    phases = np.angle(diag.field)
    moduli = np.abs(diag.field)
    lines = ["mode,phase,modulus"] + [
        f"{i},{_fmt(phases[i])},{_fmt(moduli[i])}" for i in range(n)
    ]
    _write_lines(s["output"], lines)

    payload = {
        "config": label,
        "model": model,
        "n": n,
        "doc": doc,
        "seed": seed,
        "eta_over_n": diag.record.eta_over_n,
        "cluster_score": diag.cluster.score,
        "unweighted_cluster_score": diag.cluster.unweighted_score,
        "cluster_centers": list(diag.cluster.cluster_centers),
        "transmission_excess": diag.excess,
    }
    _write_json(_sidecar_path(s["output"]), payload)
    print(f"{label} {model} n={n} doc={doc:g}: eta/N = {diag.record.eta_over_n:.6g}")
    print(
        f"cluster score = {diag.cluster.score:.4f} "
        f"(unweighted {diag.cluster.unweighted_score:.4f}), "
        f"centers = {diag.cluster.cluster_centers[0]:.4f}, {diag.cluster.cluster_centers[1]:.4f}"
    )
    if diag.excess is not None:
        print(f"transmission excess = {diag.excess:.4f}")
    print(f"mirror-plane field -> {s['output']}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--threads", type=int, help="worker threads (or env QWFS_THREADS)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output")
    parser.add_argument("--algorithm", choices=("quasi-newton", "momentum"))
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--max-iterations", dest="max_iterations", type=int)
    parser.add_argument("--gradient-tolerance", dest="gradient_tolerance", type=float)
    parser.add_argument("--objective-tolerance", dest="objective_tolerance", type=float)
    parser.add_argument("--history-size", dest="history_size", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwfs",
        description="Two-photon wavefront-shaping enhancement simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration ensemble and write CSV/JSON")
    _add_common(p_run)
    p_run.add_argument("--model", choices=MEDIUM_KINDS)
    p_run.add_argument("--configuration", choices=LAYOUTS)
    p_run.add_argument("--symmetric", action=argparse.BooleanOptionalAction, default=None)
    p_run.add_argument("--n", type=int)
    p_run.add_argument("--doc", type=float)
    p_run.add_argument("--realizations", type=int)
    p_run.add_argument("--baseline", choices=BASELINE_MODES)
    p_run.set_defaults(handler=cmd_run)

    p_summary = sub.add_parser(
        "summary", help="all shaping configurations x medium models in one table"
    )
    _add_common(p_summary)
    p_summary.add_argument("--n", type=int)
    p_summary.add_argument("--realizations", type=int)
    p_summary.add_argument("--models", help="comma-separated medium kinds")
    p_summary.add_argument("--configurations", help="comma-separated configuration labels")
    p_summary.set_defaults(handler=cmd_summary)

    p_sweep_doc = sub.add_parser("sweep-doc", help="enhancement versus degree of control")
    _add_common(p_sweep_doc)
    p_sweep_doc.add_argument("--models")
    p_sweep_doc.add_argument("--configurations")
    p_sweep_doc.add_argument("--n", type=int)
    p_sweep_doc.add_argument("--docs", help="comma-separated DOC values")
    p_sweep_doc.add_argument("--realizations", type=int)
    p_sweep_doc.add_argument("--baseline", choices=BASELINE_MODES)
    p_sweep_doc.set_defaults(handler=cmd_sweep_doc)

    p_sweep_n = sub.add_parser("sweep-n", help="enhancement versus system size")
    _add_common(p_sweep_n)
    p_sweep_n.add_argument("--models")
    p_sweep_n.add_argument("--configurations")
    p_sweep_n.add_argument("--n-list", dest="n_list", help="comma-separated sizes")
    p_sweep_n.add_argument("--doc", type=float)
    p_sweep_n.add_argument("--realizations", type=int)
    p_sweep_n.add_argument("--baseline", choices=BASELINE_MODES)
    p_sweep_n.set_defaults(handler=cmd_sweep_n)

    p_gen = sub.add_parser("gen-matrix", help="dump one transmission matrix for external checks")
    p_gen.add_argument("--model", required=True, choices=MEDIUM_KINDS)
    p_gen.add_argument("--n", required=True, type=int)
    p_gen.add_argument("--seed", required=True, type=int)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(handler=cmd_gen_matrix)

    p_diag = sub.add_parser(
        "diagnose", help="mirror-plane phases, cluster score, transmission excess"
    )
    _add_common(p_diag)
    p_diag.add_argument("--model", choices=MEDIUM_KINDS)
    p_diag.add_argument("--configuration", choices=("2p-ds",))
    p_diag.add_argument("--symmetric", action=argparse.BooleanOptionalAction, default=None)
    p_diag.add_argument("--n", type=int)
    p_diag.add_argument("--doc", type=float)
    p_diag.add_argument("--baseline", choices=BASELINE_MODES)
    p_diag.set_defaults(handler=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OptimizerFailure as exc:
        print(f"optimizer failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
