"""Command-line front end: seeded experiments in, JSON reports out.

Subcommands
-----------
generate        sample a dataset from a population spec, write dataset.csv
metrics         fairness metrics of a classifier on a dataset
eok             both equalized-odds estimates (plug-in and resampling)
bounds          evaluate configured bound clauses; exit 1 if any fails
concentration   deviation certificate check; exit 1 if the envelope breaks
train           one penalized training run with its objective trace
sweep           lambda frontier table, also written as sweep.csv

Every command reads one JSON config file (see README for the schema) and
accepts ``--seed`` / ``--out`` overrides plus ``--format json|table`` for
stdout.  A report is always written to ``<out>/<command>.json`` containing
the command, package and schema versions, the effective seed, a SHA-256
digest of the effective config, and the command's result object.  Reports
are byte-for-byte reproducible for a given config and seed except for the
single ``timing`` key (start timestamp and elapsed seconds), which callers
comparing runs should drop.

Exit status: 0 on success (for ``bounds``/``concentration`` this requires
every clause to hold), 1 when a checked bound fails, 2 on configuration or
validation errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    check_ba_bounds,
    check_biased_lower_bound,
    check_calibration_chain,
    check_tvd_dominance,
    check_unbiased_equality,
)
from .complexity import concentration_check, suggest_radius
from .eok import eok_hat_bootstrap, eok_hat_plugin
from .errors import ConfigurationError, FairmmdError
from .fairness import (
    balanced_accuracy,
    constant_classifier,
    dc,
    dnc,
    dodds,
    dopp,
    dp,
    dpc,
    dr,
    external_scores_classifier,
    group_stats,
    logistic_head_classifier,
    sup_dp,
    witness_classifier,
)
from .frl import TrainConfig, lambda_sweep, train
from .kernels import KernelSpec, laplacian, linear, median_heuristic, rbf
from .synth import (
    LabeledDataset,
    population_from_dict,
    read_csv,
    sample_population,
    write_csv,
)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigurationError("config must be a JSON object")
    cfg["_dir"] = str(p.parent)
    return cfg


def _effective(cfg: dict, args) -> dict:
    eff = {k: v for k, v in cfg.items() if not k.startswith("_")}
    if args.seed is not None:
        eff["seed"] = args.seed
    if args.out is not None:
        eff["out"] = args.out
    eff.setdefault("seed", 0)
    eff.setdefault("out", "reports")
    return eff


def _resolve_dataset(cfg: dict, eff: dict) -> tuple[LabeledDataset, np.ndarray | None]:
    """Dataset from either a CSV path or a sampled population (exactly one)."""
    has_pop = "population" in eff
    has_csv = "dataset" in eff
    if has_pop == has_csv:
        raise ConfigurationError('config needs exactly one of "population" or "dataset"')
    if has_csv:
        path = Path(eff["dataset"])
        if not path.is_absolute():
            path = Path(cfg.get("_dir", ".")) / path
        return read_csv(path)
    pop = population_from_dict(eff["population"])
    n = int(eff.get("n", 1000))
    return sample_population(pop, n, int(eff["seed"])), None


def _resolve_kernel(eff: dict, data: LabeledDataset | None) -> KernelSpec:
    kc = eff.get("kernel")
    if not isinstance(kc, dict) or "family" not in kc:
        raise ConfigurationError('config needs a "kernel" object with a "family"')
    fam = kc["family"]
    if fam in ("rbf", "laplacian"):
        sigma = kc.get("sigma", 1.0)
        if sigma == "median":
            if data is None:
                raise ConfigurationError("median bandwidth needs a dataset in scope")
            sigma = median_heuristic(data.z, seed=int(eff["seed"]))
        return rbf(float(sigma)) if fam == "rbf" else laplacian(float(sigma))
    if fam == "linear":
        if "radius" not in kc:
            raise ConfigurationError('linear kernel config needs a "radius"')
        return linear(float(kc["radius"]))
    raise ConfigurationError(f"unsupported kernel family in config: {fam!r}")


def _kernel_dict(spec: KernelSpec) -> dict:
    out = {"family": spec.family, "nu": spec.nu, "lipschitz": spec.lipschitz}
    if spec.sigma is not None:
        out["sigma"] = spec.sigma
    if spec.radius is not None:
        out["radius"] = spec.radius
    return out


def _resolve_classifier(eff: dict, data: LabeledDataset, spec: KernelSpec, csv_scores):
    mc = eff.get("metrics", {})
    cc = mc.get("classifier", {"kind": "witness"})
    kind = cc.get("kind", "witness")
    if kind == "witness":
        return witness_classifier(spec, data.z[data.s == 1], data.z[data.s == 0]), kind
    if kind == "constant":
        return constant_classifier(float(cc.get("value", 0.5))), kind
    if kind == "logistic_head":
        return logistic_head_classifier(cc["weights"], float(cc["bias"])), kind
    if kind == "external_scores":
        if csv_scores is None:
            raise ConfigurationError(
                "external_scores classifier needs a dataset CSV with a score column"
            )
        return external_scores_classifier(csv_scores), kind
    raise ConfigurationError(f"unknown classifier kind {kind!r}")


# ---------------------------------------------------------------------------
# report plumbing


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonify(dataclasses.asdict(obj))
    return obj


def _config_digest(eff: dict) -> str:
    # The output directory has no bearing on the numbers, so it stays out of
    # the digest: runs into different directories should compare equal.
    canon = json.dumps({k: _jsonify(v) for k, v in eff.items() if k != "out"},
                       sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()


def _write_report(command: str, eff: dict, result: dict, started: float) -> tuple[dict, Path]:
    report = {
        "command": command,
        "versions": {"fairmmd": __version__, "report_schema": SCHEMA_VERSION},
        "seed": int(eff["seed"]),
        "config_digest": _config_digest(eff),
        "timing": {
            "started_at": datetime.fromtimestamp(started, tz=timezone.utc).isoformat(),
            "elapsed_seconds": time.time() - started,
        },
        "result": _jsonify(result),
    }
    out_dir = Path(eff["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{command}.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return report, path


def _emit(report: dict, path: Path, fmt: str, table_lines) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in table_lines:
            print(line)
    print(f"report written to {path}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_generate(eff: dict, cfg: dict, fmt: str) -> int:
    started = time.time()
    if "population" not in eff:
        raise ConfigurationError('generate needs a "population" section')
    pop = population_from_dict(eff["population"])
    n = int(eff.get("n", 1000))
    data = sample_population(pop, n, int(eff["seed"]))
    out_dir = Path(eff["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "dataset.csv"
    write_csv(data, csv_path)
    counts = group_stats(data).counts
    result = {
        "path": str(csv_path),
        "n": data.n,
        "dim": data.dim,
        "cell_counts": {f"{s},{y}": int(counts[s, y]) for s in (0, 1) for y in (0, 1)},
        "csv_sha256": hashlib.sha256(csv_path.read_bytes()).hexdigest(),
    }
    report, path = _write_report("generate", eff, result, started)
    _emit(report, path, fmt, [
        f"wrote {csv_path} ({data.n} rows, dim {data.dim})",
        f"cell counts: {result['cell_counts']}",
    ])
    return 0


def _cmd_metrics(eff: dict, cfg: dict, fmt: str) -> int:
    started = time.time()
    data, csv_scores = _resolve_dataset(cfg, eff)
    spec = _resolve_kernel(eff, data)
    h, kind = _resolve_classifier(eff, data, spec, csv_scores)
    bins = eff.get("metrics", {}).get("bins")
    metrics = {
        "dp": dp(h, data),
        "dopp": dopp(h, data),
        "dr": dr(h, data),
        "dodds": dodds(h, data),
        "dpc": dpc(h, data, bins),
        "dnc": dnc(h, data, bins),
        "dc": dc(h, data, bins),
        "balanced_accuracy_s": balanced_accuracy(h, data, "s"),
        "balanced_accuracy_y": balanced_accuracy(h, data, "y"),
        "sup_dp": sup_dp(spec, data),
    }
    result = {"metrics": metrics, "classifier_kind": kind, "kernel": _kernel_dict(spec),
              "n": data.n, "bins": bins}
    report, path = _write_report("metrics", eff, result, started)
    _emit(report, path, fmt,
          [f"{k:>22s}  {v:.6f}" for k, v in metrics.items()])
    return 0


def _cmd_eok(eff: dict, cfg: dict, fmt: str) -> int:
    started = time.time()
    data, _ = _resolve_dataset(cfg, eff)
    spec = _resolve_kernel(eff, data)
    opts = eff.get("eok", {})
    method = opts.get("method", "both")
    if method not in ("both", "plugin", "bootstrap"):
        raise ConfigurationError(f'eok method must be both|plugin|bootstrap, got {method!r}')
    weights = opts.get("weights")
    result = {"kernel": _kernel_dict(spec), "n": data.n}
    lines = []
    if method in ("both", "plugin"):
        est = eok_hat_plugin(spec, data, weights=weights)
        result["plugin"] = dataclasses.asdict(est)
        lines.append(f"plugin     eok2={est.eok2:.6f}  eok={est.eok:.6f}  weights={est.weights}")
    if method in ("both", "bootstrap"):
        est = eok_hat_bootstrap(
            spec, data,
            m0=opts.get("m0"), m1=opts.get("m1"),
            seed=int(opts.get("bootstrap_seed", eff["seed"])), weights=weights,
        )
        result["bootstrap"] = dataclasses.asdict(est)
        lines.append(f"bootstrap  eok2={est.eok2:.6f}  eok={est.eok:.6f}  weights={est.weights}")
    report, path = _write_report("eok", eff, result, started)
    _emit(report, path, fmt, lines)
    return 0


_BOUND_CHECKS = (
    "unbiased_equality",
    "biased_lower_bound",
    "ba_bounds",
    "calibration_chain",
    "tvd_dominance",
)


def _cmd_bounds(eff: dict, cfg: dict, fmt: str) -> int:
    started = time.time()
    data, _ = _resolve_dataset(cfg, eff)
    spec = _resolve_kernel(eff, data)
    opts = eff.get("bounds", {})
    checks = opts.get("checks", ["biased_lower_bound", "ba_bounds", "calibration_chain"])
    tols = opts.get("tolerances", {})
    reports = []
    for name in checks:
        if name not in _BOUND_CHECKS:
            raise ConfigurationError(f"unknown bound check {name!r}; known: {_BOUND_CHECKS}")
        if name == "unbiased_equality":
            reports.append(check_unbiased_equality(
                spec, data, tol=float(tols.get(name, 0.02)),
                rate_threshold=float(opts.get("rate_threshold", 0.02)),
            ))
        elif name == "biased_lower_bound":
            reports.append(check_biased_lower_bound(spec, data, tol=float(tols.get(name, 0.03))))
        elif name == "ba_bounds":
            reports.extend(check_ba_bounds(
                spec, data, trials=int(opts.get("trials", 50)),
                tol=float(tols.get(name, 0.01)), seed=int(eff["seed"]),
                n_anchors=int(opts.get("n_anchors", 100)),
            ))
        elif name == "calibration_chain":
            reports.extend(check_calibration_chain(
                spec, data,
                sigma_u=float(opts.get("sigma_u", 0.5)),
                sigma_y=float(opts.get("sigma_y", 1.0)),
                tol=float(tols.get(name, 0.05)),
            ))
        else:
            reports.append(check_tvd_dominance(
                spec, data, tol=float(tols.get(name, 1e-9)),
                max_support=int(opts.get("max_support", 64)),
            ))
    all_hold = all(r.holds for r in reports)
    result = {"clauses": [r.as_dict() for r in reports], "all_hold": all_hold,
              "kernel": _kernel_dict(spec), "n": data.n}
    report, path = _write_report("bounds", eff, result, started)
    lines = [
        f"{r.name:>26s}  {r.kind}  lhs={r.lhs: .6f}  rhs={r.rhs: .6f}  "
        f"slack={r.slack: .2e}  {'HOLDS' if r.holds else 'FAILS'}"
        for r in reports
    ] + [f"all clauses hold: {all_hold}"]
    _emit(report, path, fmt, lines)
    return 0 if all_hold else 1


def _cmd_concentration(eff: dict, cfg: dict, fmt: str) -> int:
    started = time.time()
    if "population" not in eff:
        raise ConfigurationError('concentration needs a "population" section')
    pop = population_from_dict(eff["population"])
    opts = eff.get("concentration", {})
    if "grid" not in opts:
        raise ConfigurationError('concentration needs a "grid" of encoder matrices')
    grid = [np.asarray(W, dtype=float) for W in opts["grid"]]
    radius = opts.get("radius")
    if radius is None:
        radius = suggest_radius(pop, grid)
    spec = linear(float(radius))
    rep = concentration_check(
        pop, grid, spec,
        n_grid=opts.get("n_grid", [100, 200, 400, 800]),
        trials=int(opts.get("trials", 100)),
        delta=float(opts.get("delta", 0.05)),
        seed=int(eff["seed"]),
        g_trials=int(opts.get("g_trials", 64)),
    )
    result = dict(rep.as_dict(), kernel=_kernel_dict(spec))
    report, path = _write_report("concentration", eff, result, started)
    lines = [
        f"n={r['n']:>6d}  mean_dev={r['mean_dev']:.5f}  "
        f"q{100 * (1 - rep.delta):.0f}={r['quantile_dev']:.5f}  bound={r['bound']:.3f}"
        for r in rep.rows
    ] + [f"slope={rep.slope:.3f}  envelope holds: {rep.holds}"]
    _emit(report, path, fmt, lines)
    return 0 if rep.holds else 1


def _train_config(eff: dict, spec: KernelSpec) -> TrainConfig:
    t = eff.get("train", {})
    return TrainConfig(
        kernel=spec,
        lam=float(t.get("lambda", 1.0)),
        steps=int(t.get("steps", 200)),
        step_size=float(t.get("step_size", 0.5)),
        encoder_dim=int(t.get("encoder_dim", 2)),
        batch=t.get("batch"),
        seed=int(eff["seed"]),
        init_scale=float(t.get("init_scale", 0.1)),
    )


def _cmd_train(eff: dict, cfg: dict, fmt: str) -> int:
    started = time.time()
    data, _ = _resolve_dataset(cfg, eff)
    spec = _resolve_kernel(eff, data)
    res = train(data, _train_config(eff, spec))
    result = {
        "final": {"sup": res.sup_trace[-1], "penalty": res.penalty_trace[-1],
                  "total": res.total_trace[-1]},
        "trace": {"sup": res.sup_trace, "penalty": res.penalty_trace,
                  "total": res.total_trace},
        "encoder": res.encoder,
        "head": {"weights": res.head_w, "bias": res.head_b},
        "mixture_weights": res.weights,
        "kernel": _kernel_dict(spec),
        "n": data.n,
    }
    report, path = _write_report("train", eff, result, started)
    _emit(report, path, fmt, [
        f"step {0:>5d}: sup={res.sup_trace[0]:.6f} penalty={res.penalty_trace[0]:.6f} "
        f"total={res.total_trace[0]:.6f}",
        f"step {len(res.sup_trace) - 1:>5d}: sup={res.sup_trace[-1]:.6f} "
        f"penalty={res.penalty_trace[-1]:.6f} total={res.total_trace[-1]:.6f}",
    ])
    return 0


def _cmd_sweep(eff: dict, cfg: dict, fmt: str) -> int:
    started = time.time()
    if "population" not in eff:
        raise ConfigurationError('sweep needs a "population" section')
    pop = population_from_dict(eff["population"])
    spec = _resolve_kernel(eff, None)
    opts = eff.get("sweep", {})
    lambdas = opts.get("lambdas", [0.0, 0.1, 1.0, 10.0])
    res = lambda_sweep(
        pop, lambdas, _train_config(eff, spec),
        n=int(eff.get("n", 1000)), seed=int(eff["seed"]),
        dc_bins=opts.get("dc_bins", 20),
    )
    from scipy.stats import spearmanr

    rho = float(spearmanr(res.lambdas, [r["eok2"] for r in res.rows]).statistic)
    result = dict(res.as_dict(), kernel=_kernel_dict(spec), spearman_lambda_eok2=rho)
    out_dir = Path(eff["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    cols = list(res.rows[0].keys())
    with open(csv_path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in res.rows:
            fh.write(",".join(f"{row[c]:.17g}" for c in cols) + "\n")
    result["csv_path"] = str(csv_path)
    report, path = _write_report("sweep", eff, result, started)
    header = "  ".join(f"{c:>10s}" for c in cols)
    lines = [header] + [
        "  ".join(f"{row[c]:>10.5f}" for c in cols) for row in res.rows
    ] + [f"spearman(lambda, eok2) = {rho:.3f}", f"frontier written to {csv_path}"]
    _emit(report, path, fmt, lines)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "metrics": _cmd_metrics,
    "eok": _cmd_eok,
    "bounds": _cmd_bounds,
    "concentration": _cmd_concentration,
    "train": _cmd_train,
    "sweep": _cmd_sweep,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairmmd",
        description="kernel fairness statistics: estimators, bound checks, training",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--format", choices=("json", "table"), default="table",
                       help="stdout rendering (the JSON report file is always written)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        eff = _effective(cfg, args)
        return _COMMANDS[args.command](eff, cfg, args.format)
    except FairmmdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
