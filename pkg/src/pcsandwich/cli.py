"""Command-line entry point: ``pcs find-checks | sandwich | sweep | reproduce``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .checks import find_checks
from .circuit import CircuitParseError, parse
from .experiments import ExperimentConfig, figure_config, records_to_csv, run_sweep, summary_to_csv
from .sandwich import build

log = logging.getLogger("pcsandwich")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_BAD_INPUT = 2


class InputError(Exception):
    pass


def _read_circuit(path: str):
    try:
        return parse(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except CircuitParseError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_find_checks(args) -> int:
    u = _read_circuit(args.circuit)
    checks = find_checks(u, args.layers)
    for k, layer in enumerate(checks, start=1):
        print(f"layer {k}: c2={layer.c2} c1={layer.c1}")
    if not checks.complete:
        print(f"found {checks.found} of {args.layers} layers", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_sandwich(args) -> int:
    u = _read_circuit(args.circuit)
    checks = find_checks(u, args.layers)
    if len(checks) == 0:
        print("no check layers exist for this circuit", file=sys.stderr)
        return EXIT_PARTIAL
    _write(args.out, build(u, checks).to_text())
    if not checks.complete:
        print(f"found {checks.found} of {args.layers} layers", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _emit_sweep(config: ExperimentConfig, args) -> int:
    records, summary = run_sweep(config, workers=args.workers)
    _write(args.out, records_to_csv(records))
    if args.summary:
        _write(args.summary, summary_to_csv(summary))
    flagged = sum(r.flagged for r in records)
    if flagged:
        log.warning("%d records had zero postselection probability", flagged)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        config = ExperimentConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {args.config}: {exc.strerror}") from exc
    except (ValueError, TypeError) as exc:
        raise InputError(f"{args.config}: {exc}") from exc
    return _emit_sweep(config, args)


def cmd_reproduce(args) -> int:
    return _emit_sweep(figure_config(args.figure, args.scale, args.seed), args)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcs", description="Pauli check sandwiching toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("find-checks", help="list check pairs for a circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--layers", type=_positive, required=True)
    p.set_defaults(func=cmd_find_checks)

    p = sub.add_parser("sandwich", help="emit the check-sandwiched circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--layers", type=_positive, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sandwich)

    def sweep_outputs(p):
        p.add_argument("--out", default="-", help="per-circuit CSV (default stdout)")
        p.add_argument("--summary", help="per-point summary CSV")
        p.add_argument("--workers", type=_positive, default=1)

    p = sub.add_parser("sweep", help="run a sweep from a JSON config")
    p.add_argument("--config", required=True)
    sweep_outputs(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="run a figure replica")
    p.add_argument("figure", choices=("fig4", "fig7", "fig12"))
    p.add_argument("--scale", choices=("small", "full"), default="full")
    p.add_argument("--seed", type=int, default=0)
    sweep_outputs(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
