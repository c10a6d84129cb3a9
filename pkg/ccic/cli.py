"""Command-line entry point: covers, verify, run, ic, sweep and serve."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Sequence

from . import settings
from .bits import is_bitstring
from .boolfun import BoolFunction, bits_of, from_file, generate_named, parse_index
from .corpus import build_corpus, run_sweep
from .covers import combined_sequence, min_cover
from .errors import CcicError
from .icomplex import combination_check, ic_structured, resolve_budget, verify_theorem
from .microvm import vm_ic
from .protocols import ProtocolKind, auto_guess, individual_bound_check, run
from .reports import emit, render
from .witness import Mode, context_for

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_GAP = 1
EXIT_INPUT = 2

THEOREMS = ("yes", "no", "two", "combination", "individual")


@dataclass
class ExperimentConfig:
    fn: str | None = None
    n: int | None = None
    seed: int | None = None
    file: str | None = None
    protocol: str = "fig1"
    theorem: str = "yes"
    mode: str = "yes"
    model: str = "structured"
    z: int | None = None
    x: str | None = None
    y: str | None = None
    guess: str | None = None
    budget: int | None = None
    tol: int = settings.TOLERANCE_BITS
    wmax: int | None = None
    lmax: int | None = None
    out: str | None = None
    fmt: str = "json"
    workers: int | None = None
    random_count: int | None = None
    progress: bool = True

    def validate(self) -> None:
        if self.tol < 0:
            raise ValueError(f"tolerance must be >= 0, got {self.tol}")
        if self.n is not None and not 1 <= self.n <= settings.MAX_N:
            raise ValueError(f"n must be in [1, {settings.MAX_N}], got {self.n}")
        if self.budget is not None and self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")

    def load_function(self) -> BoolFunction:
        if self.file:
            return from_file(self.file)
        if self.fn is None or self.n is None:
            raise ValueError("give --fn and --n, or --file")
        return generate_named(self.fn, self.n, self.seed)

    def pair(self, f: BoolFunction) -> tuple[int, int] | None:
        if self.x is None and self.y is None:
            return None
        if self.x is None or self.y is None:
            raise ValueError("give both --x and --y")
        return parse_index(self.x, f.n), parse_index(self.y, f.n)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ExperimentConfig":
        fields = cls.__dataclass_fields__
        return cls(**{k: v for k, v in vars(args).items() if k in fields and v is not None})


# -------------------------------
# Report builders (shared with the HTTP API)
# -------------------------------
def covers_report(f: BoolFunction, z: int | None = None) -> dict:
    payload = {"function": f.label, "n": f.n}
    if z is None:
        payload["combined_sequence"] = combined_sequence(f).to_report()
        return payload
    cover = min_cover(f, z)
    payload.update(cover.to_report())
    payload["empty_side"] = cover.is_empty_side
    return payload


def verify_report(f: BoolFunction, theorem: str, budget: int | None, tol: int, pair=None) -> tuple[dict, bool]:
    if theorem in ("yes", "no", "two"):
        report = verify_theorem(f, Mode(theorem), budget, tol)
        return report.to_report(), report.passed

    pairs = [pair] if pair is not None else [(x, y) for x in range(f.size) for y in range(f.size)]
    if theorem == "combination":
        ctx = context_for(f)
        budget = resolve_budget(f, budget)
        reports = [combination_check(y, f.row_masks[x], ctx, budget) for x, y in pairs]
        rows = []
        for (x, y), r in zip(pairs, reports):
            row = {"x": bits_of(x, f.n)}
            row.update(r.to_report())
            row["y"] = bits_of(y, f.n)
            rows.append(row)
        ok = all(r.holds for r in reports)
    elif theorem == "individual":
        reports = [individual_bound_check(f, x, y, budget, tol) for x, y in pairs]
        rows = [r.to_report() for r in reports]
        ok = all(r.passed for r in reports)
    else:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    return {"function": f.label, "n": f.n, "check": theorem, "pass": ok, "pairs": rows}, ok


def parse_guess(raw: str) -> str:
    bits = raw[2:] if raw.startswith("0b") else raw
    if not is_bitstring(bits):
        raise ValueError(f"guess must be a bitstring (optionally 0b-prefixed) or 'auto', got {raw!r}")
    return bits


def run_report(f: BoolFunction, kind: ProtocolKind, x: int, y: int, guess: str, budget: int | None) -> dict:
    notice = None
    if guess == "auto":
        w = auto_guess(kind, f, x, y, budget)
        if w is None:
            notice = "no guess reaches a verdict for this pair"
            w = ""
    else:
        w = parse_guess(guess)
    transcript = run(kind, f, x, y, w, budget)
    payload = transcript.to_report()
    payload["function"] = f.label
    if notice:
        payload["notice"] = notice
    return payload


def ic_report(f: BoolFunction, x: int, y: int, mode: Mode, model: str, budget: int | None, lmax: int | None) -> dict:
    A = f.row_masks[x]
    if model == "vm":
        result = vm_ic(y, A, mode, f, lmax).to_report()
    elif model == "structured":
        result = ic_structured(y, A, mode, context_for(f), resolve_budget(f, budget)).to_report()
    else:
        raise ValueError(f"unknown model {model!r}; choose structured or vm")
    return {"function": f.label, "n": f.n, "x": bits_of(x, f.n), "y": bits_of(y, f.n), **result}


# -------------------------------
# Commands
# -------------------------------
def cmd_covers(config: ExperimentConfig) -> int:
    f = config.load_function()
    emit(render(covers_report(f, config.z), config.fmt), config.out)
    return EXIT_OK


def cmd_verify(config: ExperimentConfig) -> int:
    f = config.load_function()
    payload, ok = verify_report(f, config.theorem, config.budget, config.tol, config.pair(f))
    emit(render(payload, config.fmt), config.out)
    if payload.get("empty_side"):
        logger.info("%s", payload["notice"])
    return EXIT_OK if ok else EXIT_GAP


def cmd_run(config: ExperimentConfig) -> int:
    f = config.load_function()
    pair = config.pair(f)
    if pair is None:
        raise ValueError("run needs --x and --y")
    if config.guess is None:
        raise ValueError("run needs --guess (a bitstring or 'auto')")
    kind = ProtocolKind.parse(config.protocol)
    payload = run_report(f, kind, pair[0], pair[1], config.guess, config.budget)
    emit(render(payload, config.fmt), config.out)
    return EXIT_OK


def cmd_ic(config: ExperimentConfig) -> int:
    f = config.load_function()
    pair = config.pair(f)
    if pair is None:
        raise ValueError("ic needs --x and --y")
    payload = ic_report(f, pair[0], pair[1], Mode(config.mode), config.model, config.budget, config.lmax)
    emit(render(payload, config.fmt), config.out)
    return EXIT_OK


def cmd_sweep(config: ExperimentConfig) -> int:
    if config.n is None:
        raise ValueError("sweep needs --n")
    functions = build_corpus(config.n, config.random_count, config.seed)
    rows = run_sweep(functions, config.tol, config.workers, config.progress)
    failed = sum(1 for r in rows if not r["pass"])
    payload = {
        "n": config.n,
        "functions": len(functions),
        "checks": len(rows),
        "failed": failed,
        "rows": rows,
    }
    emit(render(payload if config.fmt == "json" else rows, config.fmt), config.out)
    return EXIT_OK if failed == 0 else EXIT_GAP


def serve(host: str | None = None, port: int | None = None) -> int:
    import app as web

    web.app.run(host=host or settings.HOST, port=port or settings.PORT)
    return EXIT_OK


COMMANDS = {
    "covers": cmd_covers,
    "verify": cmd_verify,
    "run": cmd_run,
    "ic": cmd_ic,
    "sweep": cmd_sweep,
}


def _add_function_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fn", help="named function: NEQ, EQ, CONST0, CONST1, DISJ or RANDOM")
    p.add_argument("--n", type=int, help="input length in bits")
    p.add_argument("--seed", type=int, help="seed for RANDOM")
    p.add_argument("--file", help="path to a .bfn truth table (overrides --fn)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--budget", type=int, help="step budget (default: CCIC_BUDGET or calibrated)")


def _parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="ccic",
        description="Rectangle covers, non-deterministic protocols and instance complexity on small boolean functions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("covers", help="canonical minimum covers")
    _add_function_args(p)
    _add_output_args(p)
    p.add_argument("--z", type=int, choices=(0, 1), help="color; omit for the combined sequence")

    p = sub.add_parser("verify", help="theorem, combination and individual-bound checks")
    _add_function_args(p)
    _add_output_args(p)
    p.add_argument("--theorem", choices=THEOREMS, default="yes")
    p.add_argument("--tol", type=int, default=settings.TOLERANCE_BITS, help="tolerance in bits (default: %(default)s)")
    p.add_argument("--x", help="Alice's input as an n-bit string (combination/individual)")
    p.add_argument("--y", help="Bob's input as an n-bit string (combination/individual)")

    p = sub.add_parser("run", help="run one protocol on one pair and dump the transcript")
    _add_function_args(p)
    _add_output_args(p)
    p.add_argument("--protocol", default="fig1", help="fig1, fig3, fig4 or neq")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--guess", required=True, help="guess bitstring (0b prefix allowed) or 'auto'")

    p = sub.add_parser("ic", help="instance complexity of one pair")
    _add_function_args(p)
    _add_output_args(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="yes")
    p.add_argument("--model", choices=("structured", "vm"), default="structured")
    p.add_argument("--lmax", type=int, help=f"VM length cap (default {settings.VM_LMAX}, max {settings.VM_LMAX_CAP})")

    p = sub.add_parser("sweep", help="all checks over the corpus for one n")
    p.add_argument("--n", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--seed", type=int, help=f"first RANDOM seed (default {settings.SEED})")
    p.add_argument("--random-count", type=int, help=f"RANDOM functions at n=2 (default {settings.RANDOM_COUNT})")
    p.add_argument("--workers", type=int, help="worker processes (default: CCIC_WORKERS)")
    p.add_argument("--tol", type=int, default=settings.TOLERANCE_BITS)
    p.add_argument("--no-progress", dest="progress", action="store_false")
    p.add_argument("--out")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    p = sub.add_parser("serve", help="start the JSON report server")
    p.add_argument("--host")
    p.add_argument("--port", type=int)

    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parse_args(sys.argv[1:] if argv is None else argv)
    level = logging.DEBUG if args.verbose else settings.LOG_LEVEL
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, stream=sys.stderr)

    try:
        if args.command == "serve":
            return serve(args.host, args.port)
        config = ExperimentConfig.from_args(args)
        config.validate()
        return COMMANDS[args.command](config)
    except (CcicError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
