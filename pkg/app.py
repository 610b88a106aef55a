# app.py
from __future__ import annotations

import argparse
import logging
import sys
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from cli.commands import COMMANDS
from cli.commands.base_command import BaseCommand
from cli.logging_utils import setup_logging
from controllers.errors import SrdmError
from controllers.workers import set_default_threads
from models.run_model import TOOL_VERSION

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, BaseCommand]]:
    parser = argparse.ArgumentParser(
        prog="srdm",
        description="Distribution-based quality metric for super-resolution outputs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    commands: Dict[str, BaseCommand] = {}
    for cls in COMMANDS:
        cmd = cls()
        cmd.register(sub)
        commands[cmd.name] = cmd
    return parser, commands


def main(argv: Optional[List[str]] = None) -> int:
    parser, _ = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_INPUT
    setup_logging(args.log_level)
    cmd: BaseCommand = args.handler

    try:
        if args.config:
            cmd.apply_config_file(args.config)
            # re-parse so explicit flags win over file values
            args = parser.parse_args(argv)
            setup_logging(args.log_level)
        set_default_threads(args.threads)
        return cmd.run(args)
    except SrdmError as e:
        log.error("%s: %s", e.code, e.detail)
        log.debug("error record: %s", e.as_dict())
        return EXIT_INPUT
    except ValidationError as e:
        log.error("invalid input: %s", e)
        return EXIT_INPUT
    except FileNotFoundError as e:
        log.error("file not found: %s", e.filename)
        return EXIT_INPUT
    except Exception:
        log.exception("internal error in %s", cmd.name)
        return EXIT_INTERNAL
    finally:
        set_default_threads(None)


if __name__ == "__main__":
    sys.exit(main())
