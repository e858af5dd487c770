"""Command line front end: resolve an experiment, run every seed, write the outputs.

Exit status is 0 on success, 1 for usage or configuration errors and 2 when a run
or the file output fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import (
    EMIT_FLAGS,
    ConfigError,
    ExperimentSpec,
    apply_settings,
    load_document,
    preset,
    preset_names,
    serialize_config,
)
from .dynamics import VARIANTS, RunResult, run
from .indicators import IndicatorReport, report
from .problems import get_problem, problem_names, reference_front

INDICATORS = ("gd", "igd", "hv", "ni")


def fmt(x) -> str:
    """Float with 17 significant digits; integers and strings pass through."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_front_csv(path: Path, result: RunResult) -> None:
    a = result.approximation
    d, p = a.x.shape[1], a.fx.shape[1]
    header = ["swarm", "origin", "j"] + [f"x_{i + 1}" for i in range(d)] + [f"f_{i + 1}" for i in range(p)]
    header.append("nondominated")
    rows = (
        [a.swarm[i], a.origin[i], a.j[i], *a.x[i], *a.fx[i], bool(a.nondominated[i])]
        for i in range(len(a))
    )
    _write_csv(path, header, rows)


def write_weights_csv(path: Path, result: RunResult) -> None:
    n_steps, K, p = result.weights.shape
    header = ["step", "swarm"] + [f"lambda_{i + 1}" for i in range(p)]
    rows = ([s, k, *result.weights[s, k]] for s in range(n_steps) for k in range(K))
    _write_csv(path, header, rows)


def write_diagnostics_csv(path: Path, result: RunResult) -> None:
    d = result.trace[0].E.shape[1]
    header = ["step", "swarm", "V", "M"] + [f"E_{i + 1}" for i in range(d)]
    rows = (
        [s, k, diag.V[k], diag.M[k], *diag.E[k]]
        for s, diag in enumerate(result.trace)
        for k in range(len(diag.V))
    )
    _write_csv(path, header, rows)


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


def summarize(spec: ExperimentSpec, seeds: Sequence[int], reports: Sequence[IndicatorReport]) -> dict:
    """Summary document: per-seed indicator lists plus their mean and sample standard deviation."""
    problem = get_problem(spec.problem)
    table = {key: [getattr(r, key) for r in reports] for key in INDICATORS}
    mean, stddev = {}, {}
    for key, values in table.items():
        arr = np.asarray(values, dtype=float)
        mean[key] = _json_float(arr.mean())
        stddev[key] = _json_float(arr.std(ddof=1)) if len(arr) > 1 else None
    doc = {
        "problem": spec.problem,
        "variant": spec.run.variant,
        "seeds": [int(s) for s in seeds],
    }
    for key in INDICATORS:
        doc[key] = [int(v) if key == "ni" else _json_float(v) for v in table[key]]
    doc["mean"] = mean
    doc["stddev"] = stddev
    doc["reference_point"] = [float(v) for v in problem.hv_ref]
    doc["indicator_set"] = "non-dominated particles and consensus points"
    return doc


def _write_json(path: Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


@dataclass
class ExperimentOutcome:
    files: list
    reports: dict  # seed -> IndicatorReport
    summary: dict


def run_experiment(spec: ExperimentSpec, log=None) -> ExperimentOutcome:
    """Run every seed of ``spec`` and write the requested files under ``spec.out``.

    Per seed ``seed<S>_front.csv``, ``seed<S>_weights.csv``, ``seed<S>_diagnostics.csv``
    and ``seed<S>_summary.json`` are written as selected by ``spec.emit``; the
    aggregate ``summary.json`` is always written once all seeds are done.
    """
    problem = get_problem(spec.problem)
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    reference = reference_front(problem, spec.resolution)
    files, reports = [], {}
    for seed in spec.seeds:
        cfg = replace(spec.run, seed=seed)
        result = run(problem, cfg)
        rep = report(result.approximation, reference, problem.hv_ref)
        reports[seed] = rep
        stem = f"seed{seed}"
        writers = {
            "front_csv": (f"{stem}_front.csv", write_front_csv),
            "weights_csv": (f"{stem}_weights.csv", write_weights_csv),
            "diagnostics_csv": (f"{stem}_diagnostics.csv", write_diagnostics_csv),
        }
        for flag in EMIT_FLAGS:
            if flag not in spec.emit:
                continue
            if flag == "summary_json":
                path = out / f"{stem}_summary.json"
                _write_json(path, summarize(spec, [seed], [rep]))
            else:
                name, writer = writers[flag]
                path = out / name
                writer(path, result)
            files.append(path)
        if log is not None:
            log(f"seed {seed}: gd={rep.gd:.6g} igd={rep.igd:.6g} hv={rep.hv:.6g} ni={rep.ni}")
    summary = summarize(spec, spec.seeds, [reports[s] for s in spec.seeds])
    path = out / "summary.json"
    _write_json(path, summary)
    files.append(path)
    return ExperimentOutcome(files, reports, summary)


# --- argument handling -------------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="mscbo",
        description="Multi-swarm consensus-based optimization for multi-objective problems.",
    )
    ap.add_argument("--problem", help=f"benchmark problem ({', '.join(problem_names())})")
    ap.add_argument("--variant", choices=VARIANTS)
    ap.add_argument("--swarms", type=int, metavar="K", help="number of swarms")
    ap.add_argument("--particles", type=int, metavar="N", help="particles per swarm")
    ap.add_argument("--iters", type=int, help="number of time steps; sets T = iters * tau")
    ap.add_argument("--seed", type=int, help="first seed")
    ap.add_argument("--seeds", type=int, metavar="N", help="run N consecutive seeds starting at --seed")
    ap.add_argument("--config", metavar="PATH", help="YAML or JSON configuration file")
    ap.add_argument("--preset", metavar="NAME", help=f"start from a preset ({', '.join(preset_names())})")
    ap.add_argument("--out", metavar="DIR", help="output directory")
    ap.add_argument("--emit", metavar="LIST", help=f"comma-separated subset of {','.join(EMIT_FLAGS)} or 'all'")
    ap.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    ap.add_argument("--quiet", action="store_true")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def resolve_spec(args: argparse.Namespace) -> ExperimentSpec:
    """Defaults, then preset, then config file, then flags."""
    doc = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc.strerror}") from None
        doc = load_document(text)
    name = args.preset or doc.get("preset")
    spec = preset(str(name)) if name else ExperimentSpec()
    spec = apply_settings(spec, doc)

    flags = {}
    if args.problem is not None:
        flags["problem"] = args.problem
    if args.variant is not None:
        flags["variant"] = args.variant
    if args.swarms is not None:
        flags["K"] = args.swarms
    if args.particles is not None:
        flags["N_bar"] = args.particles
    if args.out is not None:
        flags["out"] = args.out
    if args.emit is not None:
        flags["emit"] = args.emit
    spec = apply_settings(spec, flags)

    if args.iters is not None:
        if args.iters < 1:
            raise ConfigError("iters must be at least 1")
        spec = apply_settings(spec, {"T": args.iters * spec.run.tau})
    if args.seed is not None or args.seeds is not None:
        first = args.seed if args.seed is not None else spec.seeds[0]
        count = args.seeds if args.seeds is not None else 1
        if count < 1:
            raise ConfigError("--seeds must be at least 1")
        spec = apply_settings(spec, {"seeds": list(range(first, first + count))})
    return spec


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = resolve_spec(args)
    except (UsageError, ConfigError) as exc:
        print(f"mscbo: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if args.print_config:
        sys.stdout.write(serialize_config(spec))
        return 0
    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    try:
        outcome = run_experiment(spec, log=log)
    except (OSError, ValueError, FloatingPointError) as exc:
        print(f"mscbo: run failed: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        m = outcome.summary["mean"]
        print(f"{spec.problem} ({spec.run.variant}), {len(spec.seeds)} seed(s): "
              f"mean hv={m['hv']:.6g} igd={m['igd']:.6g} gd={m['gd']:.6g} ni={m['ni']:.6g}")
        print(f"wrote {len(outcome.files)} files to {spec.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
