"""Command line interface.

Exit codes: 0 success, 1 verification mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import sys

from fibrewise.cli import commands
from fibrewise.cli.formats import parse_graph
from fibrewise.errors import InputError, PreconditionError, VerificationError

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fibrewise", description="Path spaces, regulated limits and their stage algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="fin/src/sing/reg vertex sets")
    c.add_argument("file")

    b = sub.add_parser("boundary", help="list points of a regulated path space")
    b.add_argument("file")
    b.add_argument("--mode", choices=("unified", "perfect", "min", "custom"), default="perfect")
    b.add_argument("--vertices", help="comma-separated V for custom (or perfect) mode")
    b.add_argument("--max-len", type=int, default=3)
    b.add_argument("--bundle-bound", type=int, default=None)

    k = sub.add_parser("core", help="stage algebras as a Bratteli diagram")
    k.add_argument("file")
    k.add_argument("--mode", choices=("toeplitz", "perfect", "min", "custom"), default="perfect")
    k.add_argument("--vertices")
    k.add_argument("--stages", type=int, default=3)
    k.add_argument("--emit", choices=("dot", "json"), default="json")

    v = sub.add_parser("verify", help="cross-check the tower against the Fock oracle")
    v.add_argument("file")
    v.add_argument("--mode", choices=("toeplitz", "perfect", "min", "custom"), default="toeplitz")
    v.add_argument("--vertices")
    v.add_argument("--stages", type=int, default=3)
    # testing only: perturb one connecting multiplicity at the given stage
    v.add_argument("--inject-fault", type=int, default=None, metavar="STAGE", help=argparse.SUPPRESS)

    s = sub.add_parser("converge", help="decide convergence of a one-parameter path sequence")
    s.add_argument("file")
    s.add_argument("--mode", choices=("unified", "perfect", "min", "custom"), default="unified")
    s.add_argument("--vertices")
    s.add_argument("--seq", required=True)
    s.add_argument("--target", required=True)

    d = sub.add_parser("duality", help="commutative duality check for a finite map")
    d.add_argument("mapfile")
    return p


def run(argv=None) -> tuple:
    args = build_parser().parse_args(argv)
    if args.command == "duality":
        return commands.cmd_duality(_read(args.mapfile))
    g = parse_graph(_read(args.file))
    if args.command == "classify":
        return commands.cmd_classify(g)
    if args.command == "boundary":
        return commands.cmd_boundary(g, args.mode, args.vertices, args.max_len, args.bundle_bound)
    if args.command == "core":
        if args.stages < 1:
            raise InputError("--stages must be at least 1")
        return commands.cmd_core(g, args.mode, args.vertices, args.stages, args.emit)
    if args.command == "verify":
        if args.stages < 1:
            raise InputError("--stages must be at least 1")
        return commands.cmd_verify(g, args.mode, args.vertices, args.stages, args.inject_fault)
    return commands.cmd_converge(g, args.mode, args.seq, args.target, args.vertices)


def main(argv=None) -> int:
    try:
        code, text = run(argv)
    except (InputError, PreconditionError) as exc:
        print(f"fibrewise: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as exc:
        print(f"fibrewise: verification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    sys.stdout.write(text)
    return code
