"""Command-line front end.

Subcommands::

    generate    emit a word (text file) plus a JSON summary
    analyze     discrepancy / balance / abelian / factor statistics of a file
    partition   build the exact d=3 partition, export JSON and SVG
    verify      run the full verification suite (exit 4 on any failure)
    bench       steps/sec of generation, pieces/sec of partition refinement

Exit codes: 0 ok, 1 I/O failure, 2 invalid parameters, 3 partition did not
converge, 4 verification failure.  Identical arguments and seed produce
byte-identical JSON output; SVG output is identical up to the version
comment.  The environment variable FAIRSEQ_THREADS caps compiled-kernel
parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from . import complexity as cx
from . import geometry as geo
from . import sequences as seq
from . import verify as verify_mod
from .errors import NoConvergence
from .formats import decimate_curve, dump_json, read_sequence, write_sequence
from .svgplot import render_system

EXIT_IO = 1
EXIT_PARAMS = 2
EXIT_NO_CONVERGENCE = 3
EXIT_VERIFY_FAILED = 4


@dataclass
class RunConfig:
    command: str
    alpha: list | None = None
    C: float | str | None = None
    C_prime: float | str | None = None
    x0: list | str | None = None
    steps: int = 0
    seed: int = 0
    kind: str = "tijdeman"
    out: str | None = None
    summary: str | None = None
    svg: str | None = None
    input: str | None = None
    checks: list | None = None
    n_max: int | None = None
    max_window: int = 10_000
    assert_irrational: bool = False


def _apply_thread_cap():
    cap = os.environ.get("FAIRSEQ_THREADS")
    if cap:
        try:
            import numba

            numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))
        except (ValueError, ImportError):
            pass


def _parse_floats(text: str) -> list:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _looks_rational(value: float, max_den: int = 1_000_000) -> bool:
    approx = Fraction(value).limit_denominator(max_den)
    return abs(float(approx) - value) <= 1e-12 / max(approx.denominator, 1)


def _build_params(cfg: RunConfig) -> seq.TijdemanParams:
    alpha = seq.FrequencyVector(np.asarray(cfg.alpha, float))
    if cfg.assert_irrational:
        rational = [i + 1 for i, a in enumerate(alpha.alphas) if _looks_rational(a)]
        if rational:
            raise ValueError(
                f"--assert-irrational: frequencies at positions {rational} admit "
                f"small-denominator rational representations"
            )
    if cfg.x0 in (None, "zero"):
        x0 = seq.SumZeroVector.zero(alpha.d)
    else:
        x0 = seq.SumZeroVector(np.asarray(cfg.x0, float))
    if cfg.C == "canonical" or cfg.C is None:
        canonical = seq.canonical_params(alpha)
        return seq.TijdemanParams(alpha, canonical.C, canonical.C_prime, x0)
    return seq.TijdemanParams(alpha, float(cfg.C), float(cfg.C_prime), x0)


def _params_dict(params: seq.TijdemanParams) -> dict:
    return {
        "alpha": [float(a) for a in params.alpha.alphas],
        "C": params.C,
        "C_prime": params.C_prime,
        "x0": [float(v) for v in params.x0.coords],
        "canonical": params.canonical,
    }


def cmd_generate(cfg: RunConfig) -> int:
    try:
        if cfg.kind == "billiard":
            alpha = seq.FrequencyVector(np.asarray(cfg.alpha, float))
            if cfg.x0 in (None, "zero"):
                x0 = seq.SumZeroVector.zero(alpha.d)
            else:
                x0 = seq.SumZeroVector(np.asarray(cfg.x0, float))
            params = seq.TijdemanParams(alpha, 1.0, float(alpha.d), x0)
            letters, running_max, _, _, _ = seq.generate_letters(
                "billiard", alpha, x0, cfg.steps,
            )
        else:
            params = _build_params(cfg)
            letters, running_max, _, _, _ = seq.generate_letters(
                "tijdeman", params.alpha, params.x0, cfg.steps,
                big_c=params.C, big_cp=params.C_prime,
            )
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS

    word = seq.LetterSequence(letters, params.d)
    header = {
        "alpha": params.alpha.alphas,
        "C": params.C,
        "C_prime": params.C_prime,
        "x0": params.x0.coords,
        "kind": cfg.kind,
    }
    summary = {
        "schema": 1,
        "alpha_is_float": True,
        "kind": cfg.kind,
        "params": _params_dict(params),
        "N": cfg.steps,
        "discrepancy": float(running_max[-1]),
        "running_max": decimate_curve(running_max),
    }
    try:
        if cfg.out:
            write_sequence(cfg.out, word, header)
        if cfg.summary:
            dump_json(summary, cfg.summary)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    shown = " ".join(str(int(v)) for v in word.letters[:40])
    suffix = " ..." if len(word) > 40 else ""
    print(f"{len(word)} letters: {shown}{suffix}")
    print(f"prefix discrepancy {summary['discrepancy']!r}")
    return 0


def cmd_analyze(cfg: RunConfig) -> int:
    try:
        word, header = read_sequence(cfg.input)
    except OSError as exc:
        print(f"cannot read {cfg.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    alpha_values = cfg.alpha or header.get("alpha")
    report = {"schema": 1, "alpha_is_float": True, "N": len(word),
              "params": {k: header[k] for k in sorted(header)}}
    if len(word) == 0:
        report.update({"discrepancy": 0.0, "balance": 0, "abelian": 0,
                       "complexity_profile": []})
    else:
        max_window = min(cfg.max_window, len(word))
        n_max = cfg.n_max or max(1, min(50, len(word) // 10))
        profile = cx.complexity_profile(word, n_max) if n_max <= len(word) // 10 \
            else None
        report["balance"] = seq.balance(word, max_window)
        report["abelian"] = seq.abelian_complexity(
            word, min(max_window, len(word))
        )
        if alpha_values is not None:
            alpha = seq.FrequencyVector(np.asarray(alpha_values, float))
            report["discrepancy"] = seq.discrepancy_prefix(word, alpha)
        if profile is not None:
            report["complexity_profile"] = [
                [n, int(p)] for n, p in enumerate(profile.counts, start=1)
            ]
            if profile.n_max >= 12:
                report["complexity_slope"] = cx.exponent_fit(
                    profile, 5, profile.n_max
                )
                report["fit_range"] = [5, profile.n_max]
    try:
        if cfg.summary:
            dump_json(report, cfg.summary)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0


def cmd_partition(cfg: RunConfig) -> int:
    try:
        params = _build_params(cfg)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    try:
        system = geo.exact_partition_d3(params)
    except NoConvergence as exc:
        print(f"refinement did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    payload = {
        "schema": 1,
        "alpha": [float(a) for a in params.alpha.alphas],
        "C": params.C,
        "C_prime": params.C_prime,
        "total_area": system.total_area,
        "atoms": [
            {
                "letter": atom.letter,
                "translation": [float(t) for t in atom.translation],
                "polygons": [
                    [[float(x), float(y)] for x, y in poly.vertices]
                    for poly in atom.polygons
                ],
            }
            for atom in system.atoms
        ],
    }
    try:
        if cfg.summary:
            dump_json(payload, cfg.summary)
        if cfg.svg:
            with open(cfg.svg, "w", encoding="utf-8") as fh:
                fh.write(render_system(system))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"total area {system.total_area!r}")
    for atom in system.atoms:
        pieces = len(atom.polygons)
        comps = len(geo.connected_components(atom.polygons))
        print(f"atom {atom.letter}: area {atom.area:.6f}, "
              f"{pieces} pieces in {comps} component(s)")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    def progress(report):
        flag = "PASS" if report["passed"] else "FAIL"
        print(f"[{flag}] {report['name']}")

    try:
        suite = verify_mod.run_suite(cfg.checks, seed=cfg.seed, progress=progress)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return EXIT_PARAMS
    try:
        if cfg.summary:
            dump_json(suite, cfg.summary)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if not suite["all_passed"]:
        return EXIT_VERIFY_FAILED
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    alpha = seq.FrequencyVector([0.5, 0.3, 0.2])
    params = seq.canonical_params(alpha)
    steps = max(cfg.steps, 1_000_000)
    seq.generate_letters("tijdeman", alpha, params.x0, 1000,
                         big_c=params.C, big_cp=params.C_prime)  # warm-up JIT
    t0 = time.perf_counter()
    seq.generate_letters("tijdeman", alpha, params.x0, steps,
                         big_c=params.C, big_cp=params.C_prime)
    dt = time.perf_counter() - t0
    print(f"generation: {steps} steps in {dt:.3f}s ({steps / dt:,.0f} steps/s)")

    fig = verify_mod.figure_parameter_sets()["three-atoms"]
    t0 = time.perf_counter()
    system = geo.exact_partition_d3(fig)
    dt = time.perf_counter() - t0
    pieces = sum(len(a.polygons) for a in system.atoms)
    print(f"partition: {pieces} pieces in {dt:.3f}s ({pieces / dt:,.0f} pieces/s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairwords",
        description="minimal-discrepancy sequences and their exchange geometry",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a word")
    gen.add_argument("--kind", choices=("tijdeman", "billiard"),
                     default="tijdeman")
    gen.add_argument("--alpha", required=True, help="comma-separated frequencies")
    gen.add_argument("--params", default=None,
                     help='"canonical" to derive C = C\' from alpha')
    gen.add_argument("--C", type=float, default=None)
    gen.add_argument("--C-prime", dest="C_prime", type=float, default=None)
    gen.add_argument("--x0", default="zero",
                     help='"zero" or comma-separated coordinates summing to 0')
    gen.add_argument("--steps", type=int, required=True)
    gen.add_argument("--out", default=None, help="sequence file path")
    gen.add_argument("--summary", default=None, help="JSON summary path")
    gen.add_argument("--assert-irrational", action="store_true")

    ana = sub.add_parser("analyze", help="statistics of a sequence file")
    ana.add_argument("--input", required=True)
    ana.add_argument("--alpha", default=None)
    ana.add_argument("--summary", default=None)
    ana.add_argument("--max-window", dest="max_window", type=int, default=10_000)
    ana.add_argument("--n-max", dest="n_max", type=int, default=None)

    par = sub.add_parser("partition", help="exact d=3 partition")
    par.add_argument("--alpha", required=True)
    par.add_argument("--params", default=None)
    par.add_argument("--C", type=float, default=None)
    par.add_argument("--C-prime", dest="C_prime", type=float, default=None)
    par.add_argument("--summary", default=None, help="JSON output path")
    par.add_argument("--svg", default=None, help="SVG output path")

    ver = sub.add_parser("verify", help="run the verification suite")
    ver.add_argument("--checks", default=None,
                     help=f"comma-separated subset of: {', '.join(verify_mod.CHECK_NAMES)}")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--summary", default=None, help="JSON report path")

    ben = sub.add_parser("bench", help="throughput measurements")
    ben.add_argument("--steps", type=int, default=1_000_000)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if hasattr(args, "alpha") and args.alpha:
        cfg.alpha = _parse_floats(args.alpha)
    if getattr(args, "params", None) == "canonical":
        cfg.C = cfg.C_prime = "canonical"
    elif getattr(args, "C", None) is not None:
        cfg.C = args.C
        cfg.C_prime = args.C_prime if args.C_prime is not None else args.C
    if hasattr(args, "x0"):
        cfg.x0 = "zero" if args.x0 == "zero" else _parse_floats(args.x0)
    for name in ("kind", "steps", "seed", "out", "summary", "svg", "input",
                 "n_max", "max_window", "assert_irrational"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "checks", None):
        cfg.checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    return cfg


def main(argv=None) -> int:
    _apply_thread_cap()
    args = build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    handlers = {
        "generate": cmd_generate,
        "analyze": cmd_analyze,
        "partition": cmd_partition,
        "verify": cmd_verify,
        "bench": cmd_bench,
    }
    try:
        return handlers[cfg.command](cfg)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
