"""Command-line interface.

Exit status: 0 when the requested check passes, 1 when it fails, 2 for
configuration or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from . import presets as P
from .counting import audit_blocks, count_blocks
from .languages import ParryData
from .schedule import (Schedule, ScheduleExhausted, cf_min_bound_holds, validate_good,
                       validate_symbolic)
from .stream import ENCODINGS, DigitStream, decode, guess_encoding, write_stream
from .numerals import value_of
from .words import working_precision

log = logging.getLogger("munormal")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class UsageError(Exception):
    """Bad configuration or input; maps to exit status 2."""


def _load(args) -> tuple:
    try:
        return P.resolve(getattr(args, "preset", None), getattr(args, "config", None))
    except P.ConfigError as exc:
        raise UsageError(str(exc)) from exc


def _materialized(name: str, cfg: dict) -> Schedule:
    try:
        W = P.build_schedule(cfg, name)
    except (P.ConfigError, ValueError) as exc:
        raise UsageError(f"invalid config {name}: {exc}") from exc
    if not isinstance(W, Schedule):
        raise UsageError(f"{name} is a formula schedule whose blocks are far too long to "
                         f"materialise; use its desk surrogate ({name}-desk) instead")
    return W


def _write_json(obj, path: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, default=str)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


# generate ----------------------------------------------------------------------

def cmd_generate(args) -> int:
    name, cfg = _load(args)
    W = _materialized(name, cfg)
    total = W.total_length()
    if args.n < 1:
        raise UsageError("--n must be positive")
    if total is not None and args.n > total:
        raise UsageError(f"{name} provides {total} digits, {args.n} requested")
    stream = DigitStream(W)
    try:
        with open(args.out, "wb") as fh:
            digest = write_stream(stream, args.n, fh, args.encoding)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    last = W.stage_of(args.n)
    manifest = {
        "config": cfg,
        "source": name,
        "n": args.n,
        "encoding": args.encoding,
        "sha256": digest,
        "stages": [{"i": i, "copies": W.info(i).copies, "block_length": W.info(i).length,
                    "L": W.L(i)} for i in range(1, last + 1)],
        "last_stage": last,
        "precision": working_precision(),
    }
    _write_json(manifest, args.manifest or args.out + ".manifest.json")
    log.info("wrote %d digits to %s (sha256 %s)", args.n, args.out, digest)
    return EXIT_PASS


# verify ------------------------------------------------------------------------

def _measure_from_args(args):
    if args.preset or args.config:
        name, cfg = _load(args)
        return name, cfg
    if args.system is None:
        raise UsageError("verify needs --preset, --config or --system to know the target measure")
    cfg = {"system": args.system}
    if args.system == "qary":
        cfg["q"] = args.q
    if args.system == "beta":
        cfg["parry"] = json.loads(args.parry) if args.parry else {"preperiod": [1, 1], "period": []}
    return args.system, cfg


def _read_digits(path: str, encoding: Optional[str]):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    enc = encoding or guess_encoding(data)
    try:
        return decode(data, enc)
    except (ValueError, UnicodeDecodeError) as exc:
        raise UsageError(f"unparsable digits in {path}: {exc}") from exc


def cmd_verify(args) -> int:
    name, cfg = _measure_from_args(args)
    try:
        measure = P.target_measure(cfg)
    except P.ConfigError as exc:
        raise UsageError(str(exc)) from exc
    if args.k_max < 1:
        raise UsageError("--k-max must be >= 1")
    if args.tol <= 0:
        raise UsageError("--tol must be positive")

    if args.input:
        source = _read_digits(args.input, args.encoding)
        n = len(source) if args.n is None else args.n
        if n > len(source):
            raise UsageError(f"--n {n} exceeds the {len(source)} digits in {args.input}")
    else:
        W = _materialized(name, cfg)
        total = W.total_length()
        n = args.n if args.n is not None else total
        if n is None or (total is not None and n > total):
            raise UsageError(f"{name} provides {total} digits; choose --n accordingly")
        source = DigitStream(W)
    if args.k_max > n:
        raise UsageError(f"--k-max {args.k_max} exceeds the prefix length {n}")

    try:
        targets = [b for b in audit_blocks(measure, args.k_max, args.mu_floor) if measure(b) > 0]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not targets:
        raise UsageError("no block reaches the mass floor")
    report = count_blocks(source, targets, n, measure=measure, mu_floor=args.mu_floor,
                          chunks=args.chunks, workers=args.workers)
    worst = max(report.records, key=lambda r: r.rel_dev)
    passed = report.max_rel_dev <= args.tol
    out = report.to_dict()
    out.update({"source": args.input or name, "k_max": args.k_max, "tol": args.tol,
                "mu_floor": args.mu_floor, "passed": passed, "worst": list(worst.block)})
    if args.report:
        _write_json(out, args.report)
    verdict = "PASS" if passed else "FAIL"
    print(f"{verdict}: max relative deviation {report.max_rel_dev:.6g} over {len(targets)} blocks "
          f"(tol {args.tol}, worst block {list(worst.block)}, n={n})")
    return EXIT_PASS if passed else EXIT_FAIL


# schedule-check ----------------------------------------------------------------

def cmd_schedule_check(args) -> int:
    name, cfg = _load(args)
    try:
        W = P.build_schedule(cfg, name)
    except (P.ConfigError, ValueError) as exc:
        raise UsageError(f"invalid config {name}: {exc}") from exc
    if args.horizon < 3:
        raise UsageError("--horizon must be at least 3")
    extra = {}
    if isinstance(W, Schedule):
        horizon = min(args.horizon, W.n_stages)
        if horizon < 3:
            raise UsageError(f"{name} has only {W.n_stages} stages")
        report = validate_good(W, horizon)
    else:
        horizon = args.horizon
        report = validate_symbolic(W, horizon)
        if cfg.get("system") == "cf":
            extra["cf_min_bound"] = {i: cf_min_bound_holds(i) for i in range(8, min(horizon, 12) + 1)}
    for t in report.trends:
        verdict = "PASS" if t.decreasing else "FAIL"
        tail = ", ".join(f"{i}:{v:.3g}" for i, v in list(zip(t.indices, t.values))[-3:])
        print(f"{t.name}: {verdict} ({t.indices[0]}..{t.indices[-1]}; last {tail})")
    out = {"source": name, "horizon": horizon, **report.to_dict(), **extra}
    if args.report:
        _write_json(out, args.report)
    if report.passed:
        print("PASS: all growth conditions decrease")
        return EXIT_PASS
    print("FAIL: " + ", ".join(report.failed()))
    return EXIT_FAIL


# value -------------------------------------------------------------------------

def cmd_value(args) -> int:
    try:
        digits = [int(t) for t in args.digits.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"unparsable digits: {exc}") from exc
    data = ParryData.from_json(args.parry) if args.parry else None
    if args.system == "beta" and data is None:
        data = ParryData((1, 1))
    try:
        v = value_of(args.system, digits, q=args.q, data=data, precision=args.precision)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps(v.to_dict()))
    return EXIT_PASS


# parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="munormal", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp, required=True):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--preset", help=f"one of: {', '.join(P.preset_names())}")
        g.add_argument("--config", help="JSON config file")

    g = sub.add_parser("generate", help="write a prefix of the constructed sequence")
    source(g)
    g.add_argument("--n", type=int, required=True, help="number of digits")
    g.add_argument("--out", required=True)
    g.add_argument("--encoding", choices=ENCODINGS, default="lines")
    g.add_argument("--manifest", help="manifest path (default OUT.manifest.json)")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="compare block frequencies with the target measure")
    source(v, required=False)
    v.add_argument("--in", dest="input", help="digit file; the measure comes from --preset/--config/--system")
    v.add_argument("--encoding", choices=ENCODINGS)
    v.add_argument("--system", choices=P.SYSTEMS)
    v.add_argument("--q", type=int, default=2)
    v.add_argument("--parry", help='JSON Parry data, e.g. {"preperiod": [1, 1]}')
    v.add_argument("--n", type=int)
    v.add_argument("--k-max", type=int, default=3)
    v.add_argument("--tol", type=float, default=0.05)
    v.add_argument("--mu-floor", type=float, default=0.01)
    v.add_argument("--chunks", type=int, default=1)
    v.add_argument("--workers", type=int)
    v.add_argument("--report", help="JSON report path")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("schedule-check", help="trend check of the growth conditions")
    source(s)
    s.add_argument("--horizon", type=int, default=30)
    s.add_argument("--report", help="JSON report path")
    s.set_defaults(func=cmd_schedule_check)

    val = sub.add_parser("value", help="real number represented by a digit word")
    val.add_argument("--system", choices=P.SYSTEMS, required=True)
    val.add_argument("--digits", required=True, help="digits separated by spaces or commas")
    val.add_argument("--q", type=int, default=10)
    val.add_argument("--parry")
    val.add_argument("--precision", type=int)
    val.set_defaults(func=cmd_value)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        working_precision()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScheduleExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
