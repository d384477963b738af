"""Command-line entry point: ``stochquant {compress,benchmark,baseline}``.

Exit codes: 0 success, 2 usage/invalid arguments, 3 I/O failure,
4 degenerate input (too few distinct colors for the requested palette).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from stochquant.errors import DegenerateSeedingError, ImageIOError, InvalidInputError
from stochquant.optimizer import DEFAULT_R, DEFAULT_RHO, DEFAULT_SEED, QuantizerConfig
from stochquant.report import dumps
from stochquant.runner import TABLE1_COLORS, compare_baseline, compress_image, run_benchmark

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4

log = logging.getLogger("stochquant")


def _color_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or comma-separated integers, got {text!r}")
    if not values or any(not 1 <= v <= 256 for v in values):
        raise argparse.ArgumentTypeError("palette sizes must be integers in [1, 256]")
    return values


def _single_color(text: str) -> int:
    values = _color_list(text)
    if len(values) != 1:
        raise argparse.ArgumentTypeError("this command takes a single palette size")
    return values[0]


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=_positive_float, default=DEFAULT_RHO, help="learning rate (default %(default)s)")
    p.add_argument("--r", type=float, default=DEFAULT_R, help="norm degree, >= 2 (default %(default)s)")
    p.add_argument("--iters", type=int, default=None,
                   help="SQ iterations (default: 50 per pixel, capped at 5e6)")
    p.add_argument("--seed", type=_count, default=DEFAULT_SEED, help="random seed (default %(default)s)")
    p.add_argument("--seeding", choices=("uniform", "dsq"), default="dsq", help="initial palette strategy")
    p.add_argument("--trace-every", type=_count, default=0,
                   help="evaluate the objective every N iterations (0: start and end only)")
    p.add_argument("--strict", action="store_true",
                   help="fail instead of shrinking K when the image has fewer colors than requested")
    p.add_argument("-v", "--verbose", action="store_true", help="log each trace point")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochquant", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="quantize one image to an indexed PNG")
    p.add_argument("--input", required=True)
    p.add_argument("--colors", type=_single_color, default=4)
    p.add_argument("--out", help="output PNG path")
    p.add_argument("--report", help="write the JSON report here (default: stdout)")
    _add_common(p)

    p = sub.add_parser("benchmark", help="MSE table over images and palette sizes")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--colors", type=_color_list, default=list(TABLE1_COLORS))
    p.add_argument("--format", choices=("csv", "md", "json"), default="md")
    p.add_argument("--out", help="write the table here (default: stdout)")
    p.add_argument("--report", help="directory for per-cell JSON reports")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("baseline", help="compare SQ with Lloyd's K-Means on one image")
    p.add_argument("--input", required=True)
    p.add_argument("--colors", type=_single_color, default=4)
    p.add_argument("--lloyd-iters", type=_count, default=300)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--report", help="write the JSON comparison here (default: stdout)")
    _add_common(p)
    return parser


def _config(args: argparse.Namespace, K: int) -> QuantizerConfig:
    return QuantizerConfig(
        K=K,
        rho=args.rho,
        r=args.r,
        max_iters=args.iters,
        seed=args.seed,
        seeding=args.seeding,
        trace_every=args.trace_every,
    )


def _emit(text: str, dest: str | None) -> None:
    if dest is None:
        sys.stdout.write(text)
    else:
        try:
            Path(dest).write_text(text, newline="")
        except OSError as exc:
            raise ImageIOError(f"cannot write {dest!r}: {exc}") from exc


def _cmd_compress(args: argparse.Namespace) -> int:
    report, _ = compress_image(args.input, _config(args, args.colors), args.out, strict=args.strict)
    _emit(report.to_json(), args.report)
    log.info("%s: K=%d mse=%.6g -> %d bytes", args.input, report.K, report.mse, report.compressed_bytes)
    return EXIT_OK


def _cmd_benchmark(args: argparse.Namespace) -> int:
    base = _config(args, args.colors[0])
    if args.strict:
        log.warning("--strict has no effect on benchmark")
    table = run_benchmark(args.inputs, args.colors, base, jobs=args.jobs)
    if args.report:
        outdir = Path(args.report)
        try:
            outdir.mkdir(parents=True, exist_ok=True)
            for (k, j), rep in sorted(table.reports.items()):
                (outdir / f"{j:03d}_{Path(args.inputs[j]).stem}_K{k}.json").write_text(rep.to_json())
        except OSError as exc:
            raise ImageIOError(f"cannot write reports to {args.report!r}: {exc}") from exc
    render = {"csv": table.to_csv, "md": table.to_markdown, "json": lambda: dumps(table.to_dict())}
    _emit(render[args.format](), args.out)
    if table.all_failed():
        first = table.errors[0]
        return _exit_code(first)
    return EXIT_OK


def _cmd_baseline(args: argparse.Namespace) -> int:
    result = compare_baseline(
        args.input, _config(args, args.colors), lloyd_iters=args.lloyd_iters, tol=args.tol, strict=args.strict
    )
    _emit(dumps(result), args.report)
    return EXIT_OK


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, DegenerateSeedingError):
        return EXIT_DEGENERATE
    if isinstance(exc, InvalidInputError):
        return EXIT_USAGE
    if isinstance(exc, OSError):
        return EXIT_IO
    raise exc


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    commands = {"compress": _cmd_compress, "benchmark": _cmd_benchmark, "baseline": _cmd_baseline}
    try:
        return commands[args.command](args)
    except (DegenerateSeedingError, InvalidInputError, OSError) as exc:
        print(f"stochquant: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
