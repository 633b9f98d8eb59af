"""Command-line entry point."""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger
from pydantic import ValidationError

from config import VERSION, settings
from models.errors import InputFormatError, TvwbError
from services.command_registry import command_registry
from utils.documents import canonical_json, to_jsonable

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvwb", description="Tree very weak Bernoulli toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in command_registry.list_commands():
        command_class = command_registry.get_class(name)
        sub = subparsers.add_parser(name, help=command_class.help, description=command_class.help)
        command_class.add_arguments(sub)
        sub.add_argument("--json", action="store_true", help="Print the JSON report to standard output")
        sub.add_argument("--out", help="Write the JSON report to this path")
        sub.add_argument("--log-level", default=settings.LOG_LEVEL, help="Log level for standard error")
    return parser


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper())


def _emit_error(kind: str, error: Exception, as_json: bool) -> None:
    payload = {"error": {"type": kind, "message": str(error)}}
    if as_json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"error ({kind}): {error}", file=sys.stderr)


def semantic_cause(error: ValidationError) -> Optional[TvwbError]:
    """The first TvwbError raised inside a model validator, if any."""
    for detail in error.errors():
        cause = detail.get("ctx", {}).get("error")
        if isinstance(cause, TvwbError):
            return cause
        if isinstance(cause, ValidationError):
            nested = semantic_cause(cause)
            if nested is not None:
                return nested
    return None


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    command = command_registry.get_command(args.command)
    input_data = vars(args)

    try:
        report = command.process(input_data)
    except ValidationError as e:
        cause = semantic_cause(e)
        logger.error(f"Error in {args.command}: {str(cause or e)}")
        if cause is not None:
            _emit_error(type(cause).__name__, cause, args.json)
            return EXIT_REJECTED
        _emit_error(type(e).__name__, e, args.json)
        return EXIT_INPUT
    except (InputFormatError, OSError, json.JSONDecodeError) as e:
        logger.error(f"Error in {args.command}: {str(e)}")
        _emit_error(type(e).__name__, e, args.json)
        return EXIT_INPUT
    except TvwbError as e:
        logger.error(f"Error in {args.command}: {str(e)}")
        _emit_error(type(e).__name__, e, args.json)
        return EXIT_REJECTED

    document = canonical_json(to_jsonable(report))
    # with --json, standard output carries only the report
    print(command.render(report.results), file=sys.stderr if args.json else sys.stdout)
    if args.json:
        print(document)
    if args.out:
        Path(args.out).write_text(document + "\n", encoding="utf-8")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
