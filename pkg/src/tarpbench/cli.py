"""Command-line entry point: ``tarpbench {estimate,synth,region,export}``.

Exit codes: 0 success, 1 usage, 2 data/schema, 3 runtime.
"""

import argparse
import json
import sys
import warnings
from dataclasses import asdict, dataclass
from typing import Optional

from . import __version__
from .bench import (
    COST_AXES,
    KmaxWarning,
    PartitionConfig,
    estimate_curve,
    export_results,
    load_curves,
    load_methods,
    max_reliable_k,
    region_report,
)
from .data import (
    GaussianMixtureSpec,
    bayes_error_gaussian,
    load_csv,
    load_mfeat,
    partition,
    sample_gaussian_mixture,
    save_csv,
)
from .errors import TarpBenchError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class StageError(Exception):
    def __init__(self, stage, code, cause):
        self.stage, self.code, self.cause = stage, code, cause
        super().__init__(f"{stage}: {cause}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    data: Optional[str]
    synth: Optional[str]
    synth_count: int
    mfeat_task: Optional[str]
    label_column: str
    header: bool
    split: str
    fractions: tuple
    n_list: tuple
    k_max: int
    runs: int
    seed: int
    out: Optional[str]
    format: str
    cost_axis: str
    jobs: int
    kmax_guard: str

    def validate(self):
        if (self.data is None) == (self.synth is None):
            raise UsageError("exactly one of --data or --synth is required")
        if not self.n_list or min(self.n_list) < 1:
            raise UsageError("--n values must all be >= 1")
        if self.k_max < 1:
            raise UsageError("--kmax must be >= 1")
        if self.runs < 1:
            raise UsageError("--runs must be >= 1")
        if self.synth_count < 2:
            raise UsageError("--count must be >= 2")
        if len(self.fractions) != 3 or min(self.fractions) <= 0 \
                or abs(sum(self.fractions) - 1) > 1e-9:
            raise UsageError("--fractions must be three positive numbers summing to 1")

    def to_dict(self):
        d = asdict(self)
        d["fractions"] = list(self.fractions)
        d["n_list"] = list(self.n_list)
        return d


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _label_column(text):
    try:
        return int(text)
    except ValueError:
        return text


def _run_stage(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (OSError, TarpBenchError, ValueError, KeyError) as e:
        raise StageError(stage, EXIT_DATA, e) from e
    except Exception as e:  # noqa: BLE001 - reported with the failing stage
        raise StageError(stage, EXIT_RUNTIME, e) from e


def _load_dataset(cfg: RunConfig):
    if cfg.synth is not None:
        spec = GaussianMixtureSpec.from_json(cfg.synth)
        return sample_gaussian_mixture(spec, cfg.synth_count, cfg.seed)
    if cfg.mfeat_task is not None:
        return load_mfeat(cfg.data, cfg.mfeat_task)
    return load_csv(cfg.data, _label_column(cfg.label_column), header=cfg.header)


def _print_table(curves, out):
    print(f"{'n':>4} {'k':>3} {'B_k^n':>10} {'s.e.':>9} {'train_s':>10} {'test_s':>10}",
          file=out)
    for c in curves:
        print(f"{c.n:>4} {0:>3} {c.b0:>10.5f} {'-':>9} {'-':>10} {'-':>10}", file=out)
        for p in c.points:
            print(f"{p.n:>4} {p.k:>3} {p.mean_error:>10.5f} {p.std_error:>9.5f} "
                  f"{p.mean_training_time:>10.6f} {p.mean_testing_time:>10.6f}", file=out)
        a = c.asymptote
        state = "converged" if a.converged else "provisional"
        print(f"     asymptote ({state}): {a.value:.5f}", file=out)


def cmd_estimate(cfg: RunConfig, out=None):
    out = out or sys.stdout
    cfg.validate()
    dataset = _run_stage("load", _load_dataset, cfg)
    split = PartitionConfig(cfg.split, tuple(cfg.fractions))
    parts = _run_stage("partition", partition, dataset, split.strategy, split.fractions,
                       seed=0 if split.strategy == "stratified_random" else None)
    k_ok = max_reliable_k(len(parts.train_idx))
    if cfg.k_max > k_ok and cfg.kmax_guard == "refuse":
        raise StageError("kmax-guard", EXIT_DATA, ValueError(
            f"--kmax {cfg.k_max} exceeds {k_ok}, the largest k with at least 10 expected "
            f"training samples per leaf ({len(parts.train_idx)} training samples); "
            f"use --kmax-guard warn or off to proceed"))
    name = cfg.data or cfg.synth
    curves = []
    with warnings.catch_warnings():
        if cfg.kmax_guard == "off":
            warnings.simplefilter("ignore", KmaxWarning)
        for n in cfg.n_list:
            curves.append(_run_stage("estimate", estimate_curve, dataset, split, n,
                                     cfg.k_max, cfg.runs, cfg.seed, cfg.jobs, name=name))
    _print_table(curves, out)
    if cfg.out:
        _run_stage("export", export_results, curves, cfg.out, cfg.format,
                   cost_axis=cfg.cost_axis, config=cfg.to_dict())
    return curves


def cmd_synth(spec_path, count, seed, out_path, out=None):
    out = out or sys.stdout
    if count < 2:
        raise UsageError("--count must be >= 2")
    spec = _run_stage("spec", GaussianMixtureSpec.from_json, spec_path)
    dataset = _run_stage("sample", sample_gaussian_mixture, spec, count, seed)
    _run_stage("write", save_csv, dataset, out_path)
    be = _run_stage("bayes-error", bayes_error_gaussian, spec, seed=seed)
    if be.method == "closed_form":
        print(f"Bayes error (closed form): {be.value:.6g}", file=out)
    else:
        print(f"Bayes error (Monte-Carlo): {be.value:.6g} +/- {be.std_error:.2g}", file=out)
    print(f"wrote {count} samples to {out_path}", file=out)
    return be


def cmd_region(curve_path, methods_path, cost_axis="training_time", n=None, out=None):
    out = out or sys.stdout
    curves = _run_stage("curves", load_curves, curve_path)
    methods = _run_stage("methods", load_methods, methods_path)
    if n is not None:
        curves = [c for c in curves if c.n == n]
    if not curves:
        raise StageError("curves", EXIT_DATA, ValueError("no matching curves"))
    results = []
    for c in curves:
        if not c.points:
            raise StageError("region", EXIT_DATA, ValueError(f"curve n={c.n} has no points"))
        print(f"curve n={c.n} ({c.dataset or 'unnamed'}), cost axis {cost_axis}", file=out)
        for m in methods:
            r = region_report(c, m, cost_axis)
            results.append((c.n, r))
            detail = ""
            if r.dominated_by is not None:
                k, err, cost = r.dominated_by
                what = "b0 anchor" if k == 0 else f"k={k}"
                detail = f" (dominated by {what}: error {err:.4f}, cost {cost:.4g}s)"
            elif r.margin is not None:
                detail = f" (margin {r.margin:.4f} below asymptote)"
            print(f"  {m.name}: {r.label.value}{detail}", file=out)
        if not c.asymptote or not c.asymptote.converged:
            print(f"  warning: asymptote for n={c.n} is provisional (not converged)", file=out)
    return results


def cmd_export(curve_path, out_path, fmt, methods_path=None, cost_axis="training_time"):
    curves = _run_stage("curves", load_curves, curve_path)
    methods = _run_stage("methods", load_methods, methods_path) if methods_path else ()
    configs = [c.config for c in curves if c.config is not None]
    return _run_stage("export", export_results, curves, out_path, fmt, methods=methods,
                      cost_axis=cost_axis, config=configs[0] if configs else None)


def build_parser():
    p = _Parser(prog="tarpbench", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("estimate", help="estimate benchmark curves B_k^n")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV dataset (or MFEAT feature file with --mfeat)")
    src.add_argument("--synth", help="Gaussian mixture spec JSON to sample a dataset from")
    e.add_argument("--count", type=int, default=6000,
                   help="samples drawn from --synth (default 6000)")
    e.add_argument("--mfeat", choices=("zero_vs_one", "even_vs_odd"), default=None,
                   help="read --data as a raw UCI MFEAT feature file for this task")
    e.add_argument("--label-column", default="-1",
                   help="label column name or index (default: last column)")
    e.add_argument("--no-header", action="store_true", help="CSV has no header row")
    e.add_argument("--split", choices=("sequential", "stratified_random"),
                   default="stratified_random", help="partition strategy")
    e.add_argument("--fractions", type=_float_list, default=(0.25, 0.25, 0.5),
                   help="train,val,test fractions (default 0.25,0.25,0.5)")
    e.add_argument("--n", type=_int_list, default=(1,), help="comma-separated n values")
    e.add_argument("--kmax", type=int, required=True, help="largest tree depth k")
    e.add_argument("--runs", type=int, default=100, help="Monte-Carlo runs per (n, k)")
    e.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")
    e.add_argument("--out", help="output file for the curves")
    e.add_argument("--format", choices=("json", "csv"), default=None,
                   help="output format (default: from --out extension, else json)")
    e.add_argument("--cost-axis", choices=COST_AXES, default="training_time")
    e.add_argument("--jobs", type=int, default=1, help="worker processes")
    e.add_argument("--kmax-guard", choices=("warn", "refuse", "off"), default="warn",
                   help="action when training size / 2**kmax < 10 (default warn)")

    s = sub.add_parser("synth", help="sample a Gaussian-mixture dataset to CSV")
    s.add_argument("--spec", required=True, help="mixture spec JSON")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True, help="output CSV path")

    r = sub.add_parser("region", help="place methods on the benchmark plane")
    r.add_argument("--curves", required=True, help="curve JSON written by estimate")
    r.add_argument("--methods", required=True,
                   help="JSON array of {name, error, training_time_s, testing_time_s}")
    r.add_argument("--cost-axis", choices=COST_AXES, default="training_time")
    r.add_argument("--n", type=int, default=None, help="only the curve with this n")

    x = sub.add_parser("export", help="convert a curve JSON file to JSON or CSV")
    x.add_argument("--curves", required=True)
    x.add_argument("--out", required=True)
    x.add_argument("--format", choices=("json", "csv"), default=None)
    x.add_argument("--methods", default=None, help="method points to attach (JSON only)")
    x.add_argument("--cost-axis", choices=COST_AXES, default="training_time")
    return p


def _format_for(path, fmt):
    if fmt:
        return fmt
    return "csv" if path and str(path).lower().endswith(".csv") else "json"


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "estimate":
            cfg = RunConfig(
                data=args.data, synth=args.synth, synth_count=args.count,
                mfeat_task=args.mfeat, label_column=args.label_column,
                header=not args.no_header, split=args.split,
                fractions=tuple(args.fractions), n_list=tuple(args.n), k_max=args.kmax,
                runs=args.runs, seed=args.seed, out=args.out,
                format=_format_for(args.out, args.format), cost_axis=args.cost_axis,
                jobs=args.jobs, kmax_guard=args.kmax_guard)
            cmd_estimate(cfg)
        elif args.command == "synth":
            cmd_synth(args.spec, args.count, args.seed, args.out)
        elif args.command == "region":
            cmd_region(args.curves, args.methods, args.cost_axis, args.n)
        elif args.command == "export":
            cmd_export(args.curves, args.out, _format_for(args.out, args.format),
                       args.methods, args.cost_axis)
    except UsageError as e:
        print(f"tarpbench {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as e:
        print(f"tarpbench {args.command}: {e.stage} failed: {e.cause}", file=sys.stderr)
        return e.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
