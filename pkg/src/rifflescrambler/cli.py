"""``rscram`` command-line front end.

Exit codes: 0 success, 1 verification mismatch or failed check, 2 usage
error, 3 internal or resource error.  Passwords are read from stdin (or a
prompt when stdin is a terminal), never from arguments.  Structured output
is JSON on stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import getpass
import json
import os
import re
import sys
import time
from typing import BinaryIO, Optional, Sequence, TextIO

from . import analysis, hasher
from .errors import PhcDecodeError, ResourceError, RiffleScramblerError, UsageError
from .graph import export_graph, gen_graph
from .permute import inverse_riffle_shuffle, sha256

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _ParseError(f"{self.prog}: {message}")

    def print_help(self, file=None):
        raise _HelpShown(self.format_help())


class _HelpShown(Exception):
    def __init__(self, text: str):
        self.text = text


def _salt_hex(text: str) -> bytes:
    try:
        salt = bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError("salt must be hex") from None
    if len(salt) < hasher.MIN_SALT:
        raise argparse.ArgumentTypeError(f"salt must be at least {hasher.MIN_SALT} bytes")
    return salt


def _int_range(text: str) -> range:
    m = re.fullmatch(r"(\d+)(?:\.\.(\d+))?", text)
    if m is None:
        raise argparse.ArgumentTypeError("expected a..b")
    a = int(m.group(1))
    b = int(m.group(2) or a)
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError("expected 1 <= a <= b")
    return range(a, b + 1)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rscram", description="RiffleScrambler password hashing and graph analysis.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("hash", help="hash a password read from stdin")
    h.add_argument("--garlic", type=_positive, default=hasher.DEFAULT_GARLIC)
    h.add_argument("--lambda", dest="lam", type=_positive, default=hasher.DEFAULT_LAMBDA)
    salt = h.add_mutually_exclusive_group()
    salt.add_argument("--salt-hex", type=_salt_hex)
    salt.add_argument("--random-salt", action="store_true")

    v = sub.add_parser("verify", help="check a password from stdin against an encoded hash")
    v.add_argument("encoded")

    g = sub.add_parser("graph", help="export the salt's graph")
    g.add_argument("--garlic", type=_positive, required=True)
    g.add_argument("--lambda", dest="lam", type=_positive, default=1)
    g.add_argument("--salt-hex", type=_salt_hex, required=True)
    g.add_argument("--export", choices=("dot", "json"), default="json")
    g.add_argument("--out")

    a = sub.add_parser("analyze", help="superconcentrator and dispersion checks")
    a.add_argument("--garlic", type=_positive, required=True)
    a.add_argument("--salt-hex", type=_salt_hex, required=True)
    a.add_argument("--superconcentrator", action="store_true")
    mode = a.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=_positive)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--dispersion", action="store_true")
    a.add_argument("--h", type=_positive)
    a.add_argument("--trials", type=_positive, default=200)
    a.add_argument("--jobs", type=_positive, default=1)

    pb = sub.add_parser("pebble", help="simulate a pebbling of the salt's graph")
    pb.add_argument("--garlic", type=_positive, required=True)
    pb.add_argument("--lambda", dest="lam", type=_positive, default=1)
    pb.add_argument("--salt-hex", type=_salt_hex, required=True)
    pb.add_argument("--strategy", choices=("honest", "greedy"), default="honest")
    pb.add_argument("--budget", type=_positive)
    pb.add_argument("--max-placements", type=_positive, default=analysis.DEFAULT_MAX_PLACEMENTS)
    pb.add_argument("--csv")

    b = sub.add_parser("bench", help="time evaluate and count hash calls")
    b.add_argument("--garlic-range", type=_int_range, default=_int_range("4..10"))
    b.add_argument("--lambda-range", type=_int_range, default=_int_range("1..2"))
    b.add_argument("--salt-hex", type=_salt_hex, default=bytes(range(16)))
    return p


class _Io:
    def __init__(self, stdin: BinaryIO, stdout: TextIO, stderr: TextIO):
        self.stdin, self.stdout, self.stderr = stdin, stdout, stderr
        self.color = not os.environ.get("RSCRAM_NO_COLOR") and getattr(stderr, "isatty", lambda: False)()

    def emit(self, obj) -> None:
        self.stdout.write(json.dumps(obj, sort_keys=True) + "\n")

    def warn(self, message: str) -> None:
        prefix = "\x1b[31merror:\x1b[0m" if self.color else "error:"
        self.stderr.write(f"{prefix} {message}\n")

    def password(self) -> bytes:
        isatty = getattr(self.stdin, "isatty", lambda: False)
        if isatty():
            return getpass.getpass("Password: ").encode("utf-8")
        data = self.stdin.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
        if data.endswith(b"\r\n"):
            return data[:-2]
        return data[:-1] if data.endswith(b"\n") else data


def _graph(garlic: int, salt: bytes, lam: int = 1):
    hasher.HashParams(garlic, lam, salt)
    sigma = inverse_riffle_shuffle(sha256, 1 << garlic, salt).permutation
    return gen_graph(garlic, sigma, lam)


def _cmd_hash(args, io: _Io) -> int:
    salt = args.salt_hex if args.salt_hex is not None else hasher.new_salt()
    params = hasher.HashParams(args.garlic, args.lam, salt)
    io.stdout.write(hasher.hash_password(io.password(), params) + "\n")
    return EXIT_OK


def _cmd_verify(args, io: _Io) -> int:
    try:
        ok = hasher.verify_password(args.encoded, io.password())
    except PhcDecodeError as exc:
        raise UsageError(f"malformed hash string: {exc}") from None
    io.emit({"match": ok})
    return EXIT_OK if ok else EXIT_MISMATCH


def _cmd_graph(args, io: _Io) -> int:
    data = export_graph(_graph(args.garlic, args.salt_hex, args.lam), args.export)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        io.stdout.write(data.decode("utf-8"))
    return EXIT_OK


def _cmd_analyze(args, io: _Io) -> int:
    if not (args.superconcentrator or args.dispersion):
        raise UsageError("choose --superconcentrator and/or --dispersion")
    if args.dispersion and args.h is None:
        raise UsageError("--dispersion needs --h")
    graph = _graph(args.garlic, args.salt_hex)
    reports = []
    if args.superconcentrator:
        mode = "exhaustive" if args.exhaustive else "sampled"
        reports.append(analysis.check_superconcentrator(
            graph, mode, args.samples or 1000, args.seed, args.jobs))
    if args.dispersion:
        reports.append(analysis.dispersion_report(graph, 0, args.h, args.trials, args.seed, args.jobs))
    out = [r.to_dict() for r in reports]
    io.emit(out[0] if len(out) == 1 else out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_MISMATCH


def _cmd_pebble(args, io: _Io) -> int:
    graph = _graph(args.garlic, args.salt_hex, args.lam)
    strategy = "honest-rowwise" if args.strategy == "honest" else "greedy-budget"
    trace = analysis.simulate_pebbling(graph, strategy, args.budget, args.max_placements)
    result = {"strategy": strategy, "budget": args.budget, "legal": trace.legal,
              "placements": trace.placements, "failure": trace.failure,
              "blocking_node": list(trace.blocking_node) if trace.blocking_node else None}
    if trace.legal:
        result["metrics"] = analysis.pebble_metrics(trace).to_dict()
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                fh.write(trace.to_csv())
    io.emit(result)
    return EXIT_OK if trace.legal else EXIT_MISMATCH


def _cmd_bench(args, io: _Io) -> int:
    rows = []
    for g in args.garlic_range:
        for lam in args.lambda_range:
            params = hasher.HashParams(g, lam, args.salt_hex)
            calls = 0

            def counted(data: bytes) -> bytes:
                nonlocal calls
                calls += 1
                return sha256(data)

            start = time.perf_counter()
            hasher.evaluate(b"benchmark", params, counted)
            elapsed = time.perf_counter() - start
            predicted = hasher.hash_call_count(params)
            rows.append({"garlic": g, "lambda": lam, "seconds": round(elapsed, 6),
                         "calls": calls, "predicted": predicted.total,
                         "evaluation_calls": predicted.evaluation})
    io.emit(rows)
    return EXIT_OK


_COMMANDS = {"hash": _cmd_hash, "verify": _cmd_verify, "graph": _cmd_graph,
             "analyze": _cmd_analyze, "pebble": _cmd_pebble, "bench": _cmd_bench}


def run(argv: Sequence[str], stdin: Optional[BinaryIO] = None, stdout: Optional[TextIO] = None,
        stderr: Optional[TextIO] = None) -> int:
    if stdin is None:
        stdin = getattr(sys.stdin, "buffer", sys.stdin)
    io = _Io(stdin, stdout or sys.stdout, stderr or sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _HelpShown as exc:
        io.stdout.write(exc.text)
        return EXIT_OK
    except _ParseError as exc:
        io.warn(str(exc))
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, io)
    except UsageError as exc:
        io.warn(str(exc))
        return EXIT_USAGE
    except (ResourceError, RiffleScramblerError, MemoryError, OSError) as exc:
        io.warn(f"{type(exc).__name__}: {exc}")
        return EXIT_INTERNAL
    except KeyboardInterrupt:
        io.warn("interrupted")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))
