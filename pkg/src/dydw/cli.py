"""Command-line front end: seeded runs, CSV/JSONL outputs, run manifests.

Every run writes its declared outputs plus run_manifest.json carrying the
tool version, the merged configuration, the seed, timestamps and a
sha256 per output file.  Outputs are byte-identical for a fixed seed
regardless of worker count: replicate seeds derive from the replicate
index and reduction happens in index order.

Exit codes: 0 success (and all experiment gates passed), 1 experiment
gate failure, 2 usage error (unknown flag/subcommand), 3 invalid value,
4 unwritable output.
"""

import argparse
import csv
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from ._parallel import default_workers, run_replicates
from ._rng import derive_seed
from .boxes import estimate_PAk
from .field import ArrowField
from .numerics import (
    dim_lower,
    gamma_of_K,
    p_of_K,
    survival_drifted_dp,
    survival_symmetric,
)
from .sweep import exceptional_set_En
from . import experiments as expmod

EXIT_OK = 0
EXIT_GATE_FAIL = 1
EXIT_USAGE = 2
EXIT_BAD_VALUE = 3
EXIT_UNWRITABLE = 4


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(path, rows, fieldnames=None):
    if fieldnames is None:
        keys = []
        for r in rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        fieldnames = keys
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(fieldnames)
        for r in rows:
            w.writerow([_fmt(r.get(k)) for k in fieldnames])


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_config_file(path):
    cfg = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            k, v = line.split("=", 1)
            cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def _float_list(text):
    return [float(x) for x in str(text).split(",") if x != ""]


def _int_list(text):
    return [int(x) for x in str(text).split(",") if x != ""]


# flag name -> (parser, default); None default means required
_SCHEMAS = {
    "sweep": {
        "k": (float, 6.0),
        "boxes": (int, 3),
        "tau_max": (float, 1.0),
        "seed": (int, 0),
        "replicates": (int, 100),
        "workers": (int, 0),
    },
    "sticky": {
        "s": (float, 0.6931471805599453),
        "horizon": (int, 200),
        "replicates": (int, 10000),
        "seed": (int, 0),
        "t_checks": (_int_list, [10, 50, 200]),
    },
    "boxes": {
        "gamma": (float, 3.0),
        "k": (int, 2),
        "replicates": (int, 10000),
        "seed": (int, 0),
        "method": (str, "auto"),
    },
    "solve": {
        "k": (_float_list, [1.0]),
        "gamma0": (float, 0.0),
    },
    "survival": {
        "k": (float, 1.0),
        "n": (int, 1000),
        "j": (float, 1.0),
        "eps": (float, 0.0),
        "drift": (str, "linear"),
        "stride": (int, 1),
    },
    "experiment": {
        "name": (str, None),
        "seed": (int, 0),
        "replicates": (int, 0),
        "workers": (int, 0),
    },
}

_EXPERIMENT_DEFAULTS = {
    "correlation_decay": {
        "delta_grid": [1.0 / 8, 1.0 / 16, 1.0 / 32],
        "s_grid": [0.125, 0.25, 0.5, 1.0, 2.0, 4.0],
        "replicates": 20000,
    },
    "sticky_equivalence": {
        "s": 0.6931471805599453,
        "horizon": 200,
        "replicates": 100000,
        "t_checks": [10, 50, 200],
    },
    "En_statistics": {
        "K": 6.0,
        "n_boxes": 3,
        "tau_max": 1.0,
        "replicates": 1000,
        "pak_replicates": 200000,
    },
    "dimension_boxcount": {
        "K": 8.0,
        "ns": [1, 2, 3],
        "tau_max": 1.0,
        "replicates": 200,
        "eps_grid": [2.0**-e for e in range(2, 10)],
    },
    "product_ratio_check": {"K": 6.0, "s_grid": [0.1, 0.5, 1.5, 5.0], "n": 2, "replicates": 20000},
    "tameness_probe": {
        "horizon_grid": [128, 256, 512],
        "tau_max": 1.0,
        "replicates": 150,
        "level": 8,
        "m_cells": 16,
        "conf_K": 0.5,
        "conf_j": 8.0,
        "conf_horizons": [256, 1024],
    },
}


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="dydw",
        description="Dynamical discrete web toolkit: sweeps, sticky pairs, box events, solvers.",
        epilog="Exit codes: 0 ok, 1 experiment gates failed, 2 usage, 3 bad value, 4 unwritable output.",
    )
    ap.add_argument("--version", action="version", version=f"dydw {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "k": "boundary slope K (or solver grid, comma separated for solve)",
        "boxes": "number of box events A_0..A_{n-1}",
        "tau_max": "dynamical-time horizon",
        "seed": "master seed; replicate seeds derive from it",
        "replicates": "number of replicates",
        "workers": "worker threads (0 = auto); outputs do not depend on it",
        "s": "dynamical-time separation |tau - tau'|",
        "horizon": "walk horizon (steps)",
        "t_checks": "comma-separated coincidence checkpoints",
        "gamma": "box growth ratio (> 2)",
        "method": "auto | field | bridge",
        "gamma0": "gamma_0 estimate for the lower dimension bound (0 = skip)",
        "n": "horizon / box index depending on subcommand",
        "j": "boundary offset j",
        "eps": "drift parameter (0 = symmetric walk)",
        "drift": "drift parameterization: linear | exp",
        "stride": "emit every stride-th row of the survival curve",
        "name": "experiment name",
    }
    per_cmd = {("boxes", "k"): "box index k", ("survival", "n"): "survival horizon"}
    for cmd, schema in _SCHEMAS.items():
        p = sub.add_parser(cmd, help=f"run the {cmd} subcommand")
        for flag, (typ, default) in schema.items():
            text = per_cmd.get((cmd, flag), helps.get(flag, flag))
            p.add_argument(
                f"--{flag.replace('_', '-')}",
                dest=flag,
                type=str,
                default=None,
                required=False,
                help=text + ("" if default is None else f" (default {default})"),
            )
        p.add_argument("--config", type=str, default=None, help="key=value config file")
        p.add_argument("--out-dir", type=str, default=None, help="output directory (or $DYDW_OUT_DIR)")
        if cmd == "experiment":
            p.add_argument(
                "--param",
                action="append",
                default=[],
                help="experiment parameter override KEY=VALUE (repeatable)",
            )
    return ap


def _merge_config(cmd, args):
    """flags > config file > defaults; returns the merged, typed config."""
    schema = _SCHEMAS[cmd]
    file_cfg = _parse_config_file(args.config) if args.config else {}
    merged = {}
    for flag, (typ, default) in schema.items():
        raw = getattr(args, flag)
        if raw is None:
            raw = file_cfg.get(flag)
        if raw is None:
            if default is None:
                raise ValueError(f"--{flag.replace('_', '-')} is required")
            merged[flag] = default
        else:
            merged[flag] = typ(raw)
    return merged


def _out_dir(args):
    d = args.out_dir or os.environ.get("DYDW_OUT_DIR") or "."
    os.makedirs(d, exist_ok=True)
    probe = os.path.join(d, ".dydw_write_probe")
    with open(probe, "w") as fh:
        fh.write("")
    os.remove(probe)
    return d


class _Manifest:
    def __init__(self, command, config):
        self.data = {
            "tool": "dydw",
            "version": __version__,
            "command": command,
            "config": config,
            "seed": config.get("seed"),
            "started_utc": datetime.now(timezone.utc).isoformat(),
            "outputs": {},
        }

    def add(self, path):
        self.data["outputs"][os.path.basename(path)] = _sha256(path)

    def write(self, out_dir):
        self.data["finished_utc"] = datetime.now(timezone.utc).isoformat()
        path = os.path.join(out_dir, "run_manifest.json")
        with open(path, "w") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_sweep(cfg, out_dir):
    workers = cfg["workers"] or default_workers()

    def one(r):
        f = ArrowField(derive_seed(cfg["seed"], r), tau_max=cfg["tau_max"])
        return exceptional_set_En(f, cfg["k"], cfg["boxes"], cfg["tau_max"])

    sets = run_replicates(one, cfg["replicates"], workers)
    rows = []
    summary = []
    for r, s in enumerate(sets):
        for a, b in s.intervals:
            rows.append({"replicate_id": r, "a": a, "b": b})
        summary.append(
            {
                "replicate_id": r,
                "measure": s.measure(),
                "n_intervals": len(s),
                "nonempty": not s.is_empty(),
            }
        )
    p1 = os.path.join(out_dir, "intervals.csv")
    _write_csv(p1, rows, ["replicate_id", "a", "b"])
    p2 = os.path.join(out_dir, "sweep_summary.csv")
    _write_csv(p2, summary, ["replicate_id", "measure", "n_intervals", "nonempty"])
    return [p1, p2], EXIT_OK


def _cmd_sticky(cfg, out_dir):
    rep = expmod.sticky_equivalence(
        cfg["s"], cfg["horizon"], cfg["replicates"], seed=cfg["seed"], t_checks=tuple(cfg["t_checks"])
    )
    coin = []
    cov = []
    for c in rep.cells:
        if "p_coincide_direct" in c:
            coin.append(
                {"source": "direct", "t": c["t"], "p_hat": c["p_coincide_direct"], "se": c["se_direct"]}
            )
            coin.append(
                {"source": "sampler", "t": c["t"], "p_hat": c["p_coincide_sampler"], "se": c["se_sampler"]}
            )
        if "endpoint_cov_direct" in c:
            cov.append(
                {
                    "t": c["t"],
                    "cov_direct": c["endpoint_cov_direct"],
                    "cov_sampler": c["endpoint_cov_sampler"],
                    "z": c["z"],
                }
            )
    p1 = os.path.join(out_dir, "coincidence.csv")
    _write_csv(p1, coin, ["source", "t", "p_hat", "se"])
    p2 = os.path.join(out_dir, "covariance.csv")
    _write_csv(p2, cov, ["t", "cov_direct", "cov_sampler", "z"])
    return [p1, p2], EXIT_OK


def _cmd_boxes(cfg, out_dir):
    est = estimate_PAk(cfg["gamma"], cfg["k"], cfg["replicates"], cfg["seed"], method=cfg["method"])
    p1 = os.path.join(out_dir, "pak.csv")
    _write_csv(
        p1,
        [
            {
                "gamma": cfg["gamma"],
                "k": cfg["k"],
                "replicates": est.replicates,
                "p_hat": est.p_hat,
                "se": est.se,
                "method": est.method,
            }
        ],
        ["gamma", "k", "replicates", "p_hat", "se", "method"],
    )
    return [p1], EXIT_OK


def _cmd_solve(cfg, out_dir):
    rows = []
    for K in cfg["k"]:
        g = gamma_of_K(K)
        p = p_of_K(K)
        dl = dim_lower(K, cfg["gamma0"]) if cfg["gamma0"] > 1.0 else None
        rows.append(
            {
                "K": K,
                "gamma": g.value,
                "gamma_residual": g.residual,
                "p": p.value,
                "p_log": p.value_log,
                "p_residual": p.residual,
                "dim_lower": dl,
                "dim_upper": 1.0 - p.value,
            }
        )
    p1 = os.path.join(out_dir, "solve.csv")
    _write_csv(
        p1, rows, ["K", "gamma", "gamma_residual", "p", "p_log", "p_residual", "dim_lower", "dim_upper"]
    )
    return [p1], EXIT_OK


def _cmd_survival(cfg, out_dir):
    if cfg["eps"] > 0:
        table = survival_drifted_dp(cfg["eps"], cfg["k"], cfg["n"], j=cfg["j"], drift=cfg["drift"])
    else:
        table = survival_symmetric(cfg["k"], cfg["j"], cfg["n"])
    rows = []
    for n in range(0, cfg["n"] + 1, max(1, cfg["stride"])):
        rows.append(
            {
                "K": cfg["k"],
                "j": cfg["j"],
                "eps": cfg["eps"],
                "n": n,
                "survival_lower": float(table.values[n]),
                "survival_upper": float(table.values_upper[n]),
            }
        )
    p1 = os.path.join(out_dir, "survival.csv")
    _write_csv(p1, rows, ["K", "j", "eps", "n", "survival_lower", "survival_upper"])
    outputs = [p1]
    if cfg["eps"] > 0:
        p2 = os.path.join(out_dir, "tinf.csv")
        lo, hi = table.tinf_bracket
        _write_csv(
            p2,
            [{"K": cfg["k"], "eps": cfg["eps"], "N": cfg["n"], "tinf_lower": lo, "tinf_upper": hi}],
            ["K", "eps", "N", "tinf_lower", "tinf_upper"],
        )
        outputs.append(p2)
    return outputs, EXIT_OK


def _parse_param(text):
    if "=" not in text:
        raise ValueError(f"--param expects KEY=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    try:
        val = json.loads(v)
    except json.JSONDecodeError:
        val = v
    return k.strip(), val


def _cmd_experiment(cfg, out_dir, params):
    name = cfg["name"]
    if name not in _EXPERIMENT_DEFAULTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(_EXPERIMENT_DEFAULTS)}")
    kwargs = dict(_EXPERIMENT_DEFAULTS[name])
    if cfg["replicates"]:
        kwargs["replicates"] = cfg["replicates"]
    for text in params:
        k, v = _parse_param(text)
        if k not in kwargs:
            raise ValueError(f"unknown parameter {k!r} for experiment {name}")
        kwargs[k] = v
    kwargs["seed"] = cfg["seed"]
    if name == "En_statistics":
        kwargs["workers"] = cfg["workers"] or None
        report = expmod.En_statistics(**kwargs)
    elif name == "correlation_decay":
        report = expmod.correlation_decay(**kwargs)
    elif name == "sticky_equivalence":
        report = expmod.sticky_equivalence(**kwargs)
    elif name == "product_ratio_check":
        report = expmod.product_ratio_check(**kwargs)
    elif name == "tameness_probe":
        kwargs["workers"] = cfg["workers"] or None
        report = expmod.tameness_probe(**kwargs)
    elif name == "dimension_boxcount":
        kwargs["workers"] = cfg["workers"] or None
        report = _dimension_boxcount_run(**kwargs)
    p1 = os.path.join(out_dir, "report.jsonl")
    with open(p1, "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    p2 = os.path.join(out_dir, "cells.csv")
    _write_csv(p2, report.cells)
    return [p1, p2], EXIT_OK if report.passed else EXIT_GATE_FAIL


def _dimension_boxcount_run(K, ns, tau_max, replicates, eps_grid, seed=0, workers=None):
    from .numerics import p_of_K as _p

    def one(args):
        n, r = args
        f = ArrowField(derive_seed(seed, 7, n, r), tau_max=tau_max)
        return exceptional_set_En(f, K, n, tau_max)

    sets_by_label = {}
    for n in ns:
        sets = run_replicates(lambda r, n=n: one((n, r)), replicates, workers)
        sets_by_label[f"n{n}"] = sets
    bracket = (None, 1.0 - _p(K).value)
    return expmod.dimension_boxcount(sets_by_label, eps_grid, dim_bracket=bracket)


def run(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _merge_config(args.command, args)
        if args.command == "experiment":
            # param overrides are part of the effective config, so the
            # manifest must record them for faithful replay
            cfg["param"] = sorted(args.param)
        out_dir = None
        try:
            out_dir = _out_dir(args)
        except OSError as e:
            print(f"dydw: cannot write to output directory: {e}", file=sys.stderr)
            return EXIT_UNWRITABLE
        manifest = _Manifest(args.command, cfg)
        body = {
            "sweep": _cmd_sweep,
            "sticky": _cmd_sticky,
            "boxes": _cmd_boxes,
            "solve": _cmd_solve,
            "survival": _cmd_survival,
        }
        if args.command == "experiment":
            outputs, code = _cmd_experiment(cfg, out_dir, cfg["param"])
        else:
            outputs, code = body[args.command](cfg, out_dir)
        for path in outputs:
            manifest.add(path)
        manifest.write(out_dir)
        return code
    except (ValueError, ArithmeticError) as e:
        print(f"dydw: invalid value: {e}", file=sys.stderr)
        return EXIT_BAD_VALUE
    except OSError as e:
        print(f"dydw: output error: {e}", file=sys.stderr)
        return EXIT_UNWRITABLE


def replay_manifest(manifest_path, out_dir):
    """Re-run a recorded config and compare output checksums.

    Returns {filename: bool}; True when the replayed file hashes equal.
    """
    with open(manifest_path) as fh:
        data = json.load(fh)
    argv = [data["command"]]
    for k, v in data["config"].items():
        if k == "param":
            for item in v:
                argv += ["--param", str(item)]
            continue
        if isinstance(v, list):
            v = ",".join(str(x) for x in v)
        argv += [f"--{k.replace('_', '-')}", str(v)]
    argv += ["--out-dir", out_dir]
    code = run(argv)
    if code not in (EXIT_OK, EXIT_GATE_FAIL):
        raise RuntimeError(f"replay failed with exit code {code}")
    out = {}
    for name, digest in data["outputs"].items():
        out[name] = _sha256(os.path.join(out_dir, name)) == digest
    return out


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
