"""Batch experiment runner and scaling fits.

Subcommands: ``gen`` (emit an edge list), ``exact`` (chain quantities),
``simulate`` (Monte Carlo estimates), ``verify`` (relation checks),
``scale`` (scaling-exponent fits across a sweep), ``all`` (full
pipeline). Configs are INI files (see ``parse_config``); flags override
config values, and a seed is mandatory for anything Monte Carlo.

Exit codes: 0 all explicit-constant checks passed, 2 at least one
explicit-constant violation, 1 runtime error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import bounds
from .errors import CoalwalkError, ConfigError, InsufficientPoints
from .graphs import FamilySpec, generate, load_edge_list, validate
from .seeding import mix64
from .simulate import estimate

CSV_COLUMNS = ("family", "n", "m", "quantity", "value", "stderr",
               "trials", "censored", "seed")

# Which FamilySpec field a sweep's size list feeds, per family.
SIZE_PARAM = {
    "path": "n", "cycle": "n", "clique": "n", "star": "n", "barbell": "n",
    "random_regular": "n", "lower_bound": "n",
    "binary_tree": "levels", "hypercube": "dim", "torus": "side",
    "grid": "side",
}


@dataclass(frozen=True)
class SweepSpec:
    family: str
    sizes: tuple[int, ...]
    degree: int | None = None
    dim: int | None = None
    alpha: float | None = None

    def spec_for(self, size: int) -> FamilySpec:
        kwargs = {SIZE_PARAM[self.family]: size}
        if self.family in ("torus", "grid"):
            kwargs["dim"] = self.dim if self.dim is not None else 2
        if self.family == "random_regular":
            kwargs["degree"] = self.degree if self.degree is not None else 3
        if self.family == "lower_bound":
            kwargs["alpha"] = self.alpha if self.alpha is not None else 1.0
        return FamilySpec(self.family, **kwargs)


@dataclass
class ExperimentConfig:
    sweeps: list[SweepSpec]
    master_seed: int | None = None
    trials: int = 0
    cap: int | None = None
    quantities: tuple[str, ...] = ("exact",)
    sim_kinds: tuple[str, ...] = ("coalescence",)
    outdir: str = "out"
    meeting_limit: int = 100

    def require_seed(self) -> int:
        if self.master_seed is None:
            raise ConfigError("a master seed is mandatory for Monte Carlo runs")
        return self.master_seed

    def validate(self) -> None:
        if not self.sweeps:
            raise ConfigError("config defines no sweeps")
        for sweep in self.sweeps:
            if sweep.family not in SIZE_PARAM:
                raise ConfigError(f"unknown family {sweep.family!r}")
            if list(sweep.sizes) != sorted(set(sweep.sizes)):
                raise ConfigError("sweep sizes must be strictly increasing")
        for q in self.quantities:
            if q not in ("exact", "simulate", "verify"):
                raise ConfigError(f"unknown quantity group {q!r}")
        if "simulate" in self.quantities:
            if self.trials < 2:
                raise ConfigError("Monte Carlo quantities need trials >= 2")
            self.require_seed()


def parse_config(path: str) -> ExperimentConfig:
    """Read an experiment config.

    Format: an ``[experiment]`` section with keys master_seed, trials,
    cap, quantities (comma list of exact/simulate/verify), sim_kinds,
    outdir, meeting_limit; plus one ``[sweep:NAME]`` section per family
    sweep with keys family, sizes (whitespace list), and optional degree,
    dim, alpha.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    sweeps = []
    for section in parser.sections():
        if not section.startswith("sweep"):
            continue
        body = parser[section]
        if "family" not in body or "sizes" not in body:
            raise ConfigError(f"[{section}] needs 'family' and 'sizes'")
        sweeps.append(SweepSpec(
            family=body["family"].strip(),
            sizes=tuple(int(tok) for tok in body["sizes"].split()),
            degree=body.getint("degree", fallback=None),
            dim=body.getint("dim", fallback=None),
            alpha=body.getfloat("alpha", fallback=None)))
    config = ExperimentConfig(
        sweeps=sweeps,
        master_seed=(int(exp["master_seed"]) if "master_seed" in exp else None),
        trials=int(exp.get("trials", 0)),
        cap=(int(exp["cap"]) if "cap" in exp else None),
        quantities=tuple(
            tok.strip() for tok in exp.get("quantities", "exact").split(",")),
        sim_kinds=tuple(
            tok.strip() for tok in exp.get("sim_kinds", "coalescence").split(",")),
        outdir=exp.get("outdir", "out"),
        meeting_limit=int(exp.get("meeting_limit", 100)))
    config.validate()
    return config


# ---------------------------------------------------------------------------
# Scaling fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    model: str
    exponent: float | None
    stderr: float | None
    r_squared: float | None
    ratio_min: float | None = None
    ratio_max: float | None = None

    @property
    def ratio_spread(self) -> float | None:
        if self.ratio_min is None:
            return None
        return self.ratio_max / self.ratio_min


def fit_scaling(series, model: str = "n^a") -> ScalingFit:
    """Least squares on the log-transformed model.

    ``"n^a"`` regresses ln T on ln n and reports the exponent with its
    standard error and R^2. ``"n*log n"`` has no free exponent, so the
    spread of T / (n ln n) over the sweep is reported instead.
    """
    pts = [(int(n), float(v)) for n, v in series]
    if len(pts) < 4:
        raise InsufficientPoints("scaling fits need at least 4 sizes")
    if any(v <= 0 for _, v in pts):
        raise InsufficientPoints("scaling fits need positive values")
    ns = np.array([n for n, _ in pts], dtype=float)
    vals = np.array([v for _, v in pts])
    if model == "n*log n":
        ratios = vals / (ns * np.log(ns))
        return ScalingFit(model, None, None, None,
                          float(ratios.min()), float(ratios.max()))
    if model != "n^a":
        raise ConfigError(f"unknown scaling model {model!r}")
    x = np.log(ns)
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(((y - fitted) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_sq = 1.0 - ss_res / ss_tot if ss_tot else 1.0
    dof = len(pts) - 2
    sigma_sq = ss_res / dof if dof else 0.0
    slope_se = math.sqrt(sigma_sq / float(((x - x.mean()) ** 2).sum()))
    return ScalingFit(model, float(slope), slope_se, min(max(r_sq, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as handle:
        handle.write(text)
    os.replace(tmp, path)


def _record_rows(family, n, m, quantity, value, stderr=None, trials=None,
                 censored=None, seed=None):
    return {"family": family, "n": n, "m": m, "quantity": quantity,
            "value": value, "stderr": stderr, "trials": trials,
            "censored": censored, "seed": seed}


def run(config: ExperimentConfig) -> dict:
    """Execute every sweep point; write JSON records and one flat CSV.

    Returns a summary dict with the CSV path, per-point record paths, and
    the explicit-check verdict. Numeric CSV fields are byte-identical
    across reruns with the same config and master seed, independent of
    worker count.
    """
    config.validate()
    os.makedirs(config.outdir, exist_ok=True)
    rows = []
    record_paths = []
    explicit_ok = True
    for sweep in config.sweeps:
        for size in sweep.sizes:
            spec = sweep.spec_for(size)
            seed = mix64(config.master_seed or 0, hash_label(spec.label()))
            g = generate(spec, seed=seed)
            record = {"spec": spec.to_dict(), "n": g.n, "m": g.m}
            mq = None
            estimates = {}
            if "simulate" in config.quantities:
                master = config.require_seed()
                for kind in config.sim_kinds:
                    params = {}
                    if kind == "meeting":
                        params = {"stationary": True}
                    est = estimate(kind, g, params, config.trials,
                                   mix64(master, hash_label(spec.label()),
                                         hash_label(kind)),
                                   cap=config.cap)
                    estimates[kind] = est
                    rows.append(_record_rows(
                        spec.family, g.n, g.m, f"t_{kind}_sim", est.mean,
                        est.stderr, est.trials, est.censored_count, master))
            if "exact" in config.quantities or "verify" in config.quantities:
                mq = bounds.measure(
                    g, meeting_limit=config.meeting_limit,
                    t_coal_estimate=estimates.get("coalescence"))
                record["measured"] = mq.to_dict()
                for name, value in (
                        ("t_hit", mq.t_hit), ("t_mix", mq.t_mix),
                        ("t_sep", mq.t_sep), ("lambda2", mq.lambda2),
                        ("t_meet", mq.t_meet), ("t_meet_pi", mq.t_meet_pi),
                        ("c_max", mq.collision.c_max),
                        ("c_min", mq.collision.c_min),
                        ("r_max", mq.collision.r_max),
                        ("pi_min", mq.pi_min),
                        ("pi_norm_sq", mq.pi_norm_sq)):
                    if value is not None:
                        rows.append(_record_rows(spec.family, g.n, g.m,
                                                 name, float(value)))
            if "verify" in config.quantities:
                report = bounds.verify_relations(g, mq)
                record["bound_report"] = report.to_rows()
                if not report.all_explicit_passed:
                    explicit_ok = False
            if estimates:
                record["estimates"] = {
                    kind: {"mean": est.mean, "stderr": est.stderr,
                           "ci95": [est.ci95_lo, est.ci95_hi],
                           "trials": est.trials,
                           "censored": est.censored_count}
                    for kind, est in estimates.items()}
            path = os.path.join(config.outdir,
                                f"{spec.label()}.json")
            _atomic_write(path, json.dumps(record, indent=2, sort_keys=True,
                                           default=_json_default))
            record_paths.append(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    csv_path = os.path.join(config.outdir, "results.csv")
    _atomic_write(csv_path, buf.getvalue())
    return {"csv": csv_path, "records": record_paths,
            "explicit_ok": explicit_ok}


def hash_label(label: str) -> int:
    acc = 0
    for ch in label:
        acc = (acc * 131 + ord(ch)) % (1 << 61)
    return acc


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


# ---------------------------------------------------------------------------
# Command-line interface
# ---------------------------------------------------------------------------

def _spec_from_args(args) -> FamilySpec:
    kwargs = {}
    for key in ("n", "levels", "dim", "side", "degree"):
        val = getattr(args, key, None)
        if val is not None:
            kwargs[key] = val
    if getattr(args, "alpha", None) is not None:
        kwargs["alpha"] = args.alpha
    return FamilySpec(args.family, **kwargs)


def _add_spec_args(sub):
    sub.add_argument("--family", required=True)
    sub.add_argument("--n", type=int)
    sub.add_argument("--levels", type=int)
    sub.add_argument("--dim", type=int)
    sub.add_argument("--side", type=int)
    sub.add_argument("--degree", type=int)
    sub.add_argument("--alpha", type=float)
    sub.add_argument("--seed", type=int, default=None)


def _load_graph(args):
    if getattr(args, "edge_list", None):
        with open(args.edge_list) as handle:
            return load_edge_list(handle.read())
    return generate(_spec_from_args(args), seed=args.seed or 0)


def _cmd_gen(args) -> int:
    g = generate(_spec_from_args(args), seed=args.seed or 0)
    text = g.to_edge_list()
    if args.output:
        _atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_exact(args) -> int:
    g = _load_graph(args)
    mq = bounds.measure(g, meeting_limit=args.meeting_limit)
    payload = {"n": g.n, "m": g.m, "diagnostics": vars(validate(g)),
               "measured": mq.to_dict()}
    text = json.dumps(payload, indent=2, sort_keys=True,
                      default=_json_default)
    if args.output:
        _atomic_write(args.output, text)
    else:
        print(text)
    return 0


def _cmd_simulate(args) -> int:
    if args.seed is None:
        raise ConfigError("--seed is mandatory for Monte Carlo runs")
    g = _load_graph(args)
    params = {}
    if args.kind == "meeting":
        if args.u is None or args.v is None:
            params = {"stationary": True}
        else:
            params = {"u": args.u, "v": args.v}
    est = estimate(args.kind, g, params, args.trials, args.seed, cap=args.cap)
    print(json.dumps({
        "kind": args.kind, "n": g.n, "mean": est.mean, "stderr": est.stderr,
        "ci95": [est.ci95_lo, est.ci95_hi], "trials": est.trials,
        "censored": est.censored_count}, indent=2))
    return 0


def _cmd_verify(args) -> int:
    g = _load_graph(args)
    mq = bounds.measure(g, meeting_limit=args.meeting_limit)
    report = bounds.verify_relations(g, mq)
    if args.csv:
        _atomic_write(args.csv, report.to_csv())
    print(report.to_json())
    return 0 if report.all_explicit_passed else 2


def _cmd_scale(args) -> int:
    config = parse_config(args.config)
    result = run(config)
    fits = {}
    by_sweep: dict[tuple[str, str], list] = {}
    with open(result["csv"]) as handle:
        for row in csv.DictReader(handle):
            key = (row["family"], row["quantity"])
            if row["value"]:
                by_sweep.setdefault(key, []).append(
                    (int(row["n"]), float(row["value"])))
        for (family, quantity), series in by_sweep.items():
            if len(series) >= 4 and all(v > 0 for _, v in series):
                fit = fit_scaling(series, model=args.model)
                fits[f"{family}:{quantity}"] = vars(fit)
    print(json.dumps(fits, indent=2, sort_keys=True))
    return 0 if result["explicit_ok"] else 2


def _cmd_all(args) -> int:
    config = parse_config(args.config)
    if args.seed is not None:
        config.master_seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
    if args.outdir is not None:
        config.outdir = args.outdir
    if "simulate" in config.quantities:
        config.require_seed()
    result = run(config)
    print(json.dumps({"csv": result["csv"],
                      "records": result["records"],
                      "explicit_ok": result["explicit_ok"]}, indent=2))
    return 0 if result["explicit_ok"] else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coalwalk",
        description="random-walk coalescence measurements on graphs")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="emit an edge list for a family spec")
    _add_spec_args(gen)
    gen.add_argument("--output", "-o")
    gen.set_defaults(func=_cmd_gen)

    exact = subs.add_parser("exact", help="exact chain quantities")
    _add_spec_args(exact)
    exact.add_argument("--edge-list")
    exact.add_argument("--meeting-limit", type=int, default=100)
    exact.add_argument("--output", "-o")
    exact.set_defaults(func=_cmd_exact)

    sim = subs.add_parser("simulate", help="Monte Carlo estimates")
    _add_spec_args(sim)
    sim.add_argument("--edge-list")
    sim.add_argument("--kind", default="coalescence",
                     choices=["meeting", "coalescence", "voter"])
    sim.add_argument("--trials", type=int, default=1000)
    sim.add_argument("--cap", type=int)
    sim.add_argument("--u", type=int)
    sim.add_argument("--v", type=int)
    sim.set_defaults(func=_cmd_simulate)

    verify = subs.add_parser("verify", help="explicit-constant checks")
    _add_spec_args(verify)
    verify.add_argument("--edge-list")
    verify.add_argument("--meeting-limit", type=int, default=100)
    verify.add_argument("--csv")
    verify.set_defaults(func=_cmd_verify)

    scale = subs.add_parser("scale", help="scaling fits across a sweep")
    scale.add_argument("--config", required=True)
    scale.add_argument("--model", default="n^a", choices=["n^a", "n*log n"])
    scale.set_defaults(func=_cmd_scale)

    full = subs.add_parser("all", help="full pipeline from a config file")
    full.add_argument("--config", required=True)
    full.add_argument("--seed", type=int, help="override master_seed")
    full.add_argument("--trials", type=int, help="override trials")
    full.add_argument("--outdir", help="override output directory")
    full.set_defaults(func=_cmd_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CoalwalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
