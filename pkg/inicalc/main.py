"""Entry point: the ``inicalc`` command line, and ``serve`` for the HTTP surface."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from pathlib import Path

import uvicorn
from pydantic import ValidationError

from inicalc import config
from inicalc.cli.commands import (
    SUITES, RunRecord, run_check, run_eval, run_gen, run_independence,
    run_suite, run_translate,
)
from inicalc.cli.render import render_json, render_text
from inicalc.errors import UsageError
from inicalc.harness.events import Event, event_bus
from inicalc.harness.models import GenConfig
from inicalc.semantics.models import ModelId
from inicalc.syntax.ast import Layer
from inicalc.translator import FragmentTag
from inicalc.web.app import create_app

logger = logging.getLogger("inicalc")

FRAGMENTS = {"ni": FragmentTag.ARROW_FREE, "mult": FragmentTag.MULTIPLICATIVE}


class _Parser(argparse.ArgumentParser):
    """Bad flags are a user error (exit 1); exit 2 is reserved for failed checks."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    modelled = argparse.ArgumentParser(add_help=False)
    modelled.add_argument("--model", choices=[m.value for m in ModelId], default=config.DEFAULT_MODEL)

    corpus = argparse.ArgumentParser(add_help=False)
    corpus.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    corpus.add_argument("--count", type=int, default=config.DEFAULT_COUNT)
    corpus.add_argument("--depth", type=int, default=config.DEFAULT_DEPTH)
    corpus.add_argument("--type", dest="target_type", default=None, help="target type, e.g. 'Bool (x) Bool'")

    parser = _Parser(prog="inicalc", description="Typecheck, run and test one-level and two-level affine effect programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="typecheck a program")
    p.add_argument("file")
    p.add_argument("--model", choices=[m.value for m in ModelId], default=None)

    p = sub.add_parser("eval", parents=[common, modelled], help="evaluate a program")
    p.add_argument("file")
    p.add_argument("--erased", action="store_true", help="print the erased joint of an independent-layer program")

    p = sub.add_parser("independence", parents=[common, modelled], help="check that a tensor-typed program factorizes")
    p.add_argument("file")

    p = sub.add_parser("translate", parents=[common], help="translate a one-level program into the two-level language")
    p.add_argument("file")
    p.add_argument("--fragment", choices=tuple(FRAGMENTS), default="ni")

    p = sub.add_parser("suite", parents=[common, modelled, corpus], help="run a law or soundness suite")
    p.add_argument("kind", choices=tuple(SUITES))

    p = sub.add_parser("gen", parents=[common, modelled, corpus], help="print random well-typed terms")
    p.add_argument("--layer", choices=[layer.value for layer in Layer], default=Layer.INI.value)
    p.add_argument("--fragment", choices=tuple(FRAGMENTS), default=None)

    sub.add_parser("serve", help="start the HTTP surface")
    return parser


def _log_event(event: Event) -> None:
    logger.info("%s %s %s", event.suite, event.type.value, event.data)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _gen_config(args: argparse.Namespace, **extra) -> GenConfig:
    try:
        return GenConfig(
            max_depth=args.depth, seed=args.seed, count=args.count,
            target_type=args.target_type, model=ModelId(args.model), **extra,
        )
    except ValidationError as e:
        raise UsageError(f"bad generator settings: {e.errors()[0]['msg']}") from None


def run_command(args: argparse.Namespace) -> RunRecord:
    command = args.command
    if command in ("check", "eval", "independence", "translate"):
        text = _read(args.file)
        if command == "check":
            return run_check(text, args.file, ModelId(args.model) if args.model else None)
        if command == "eval":
            return run_eval(text, args.file, ModelId(args.model), erased=args.erased)
        if command == "independence":
            return run_independence(text, args.file, ModelId(args.model))
        return run_translate(text, args.file, FRAGMENTS[args.fragment])

    if command == "suite":
        event_bus.subscribe(_log_event)
        try:
            return run_suite(args.kind, _gen_config(args))
        finally:
            event_bus.unsubscribe(_log_event)

    fragment = FRAGMENTS[args.fragment] if args.fragment else None
    return run_gen(_gen_config(args, layer=Layer(args.layer), fragment=fragment))


async def serve() -> None:
    logger.info("Starting inicalc HTTP surface on port %d", config.PORT)
    server = uvicorn.Server(uvicorn.Config(
        app=create_app(),
        host="0.0.0.0",
        port=config.PORT,
        log_level="info",
        access_log=False,
    ))
    await server.serve()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL, logging.WARNING),
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )

    if args.command == "serve":
        try:
            asyncio.run(serve())
        except KeyboardInterrupt:
            logger.info("Stopped by user")
        return 0

    try:
        record = run_command(args)
    except UsageError as e:
        record = RunRecord(command=args.command, input=getattr(args, "file", ""), outcome={"error": e.to_dict()}, exit_code=1)

    print(render_json(record) if args.format == "json" else render_text(record))
    return record.exit_code


if __name__ == "__main__":
    sys.exit(main())
