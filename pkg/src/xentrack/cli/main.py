"""
xentrack command line.

Exit codes: 0 success, 1 input/validation error (including usage errors), 2 internal error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError
from rich.logging import RichHandler

from xentrack.cli import commands, display
from xentrack.config import settings
from xentrack.errors import XenTrackError

logger = logging.getLogger("xentrack")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2

# logging.getLevelNamesMapping() is Python 3.11+; on 3.10 it is equivalent to a copy of _nameToLevel.
_get_level_names_mapping = getattr(logging, "getLevelNamesMapping", lambda: dict(logging._nameToLevel))


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1 instead of argparse's 2, which is reserved for internal errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def setup_logging(verbose: bool) -> None:
    if verbose:
        level = logging.DEBUG
    else:
        level = _get_level_names_mapping().get(settings.XENTRACK_LOG_LEVEL.upper(), logging.INFO)
    handler = RichHandler(console=display.console, show_path=False, rich_tracebacks=verbose)
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=[handler], force=True)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="xentrack", description="Rotated-text tracking: track, evaluate, synthesize, draw, benchmark.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging and tracebacks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def with_config(p: ArgumentParser) -> ArgumentParser:
        p.add_argument("--config", help="TOML run config (default: $XENTRACK_CONFIG)")
        return p

    p = with_config(sub.add_parser("track", help="Track every video of a detection file"))
    p.add_argument("--detections", help="Detection JSON-lines file")
    p.add_argument("--out", help="Track file (one video) or directory (several videos)")
    p.add_argument("--workers", type=int, help="Videos tracked concurrently (default: config or $XENTRACK_WORKERS)")
    p.set_defaults(handler=commands.cmd_track)

    p = with_config(sub.add_parser("eval", help="Evaluate predicted tracks against ground truth"))
    p.add_argument("--pred", required=True, help="Track file or directory of *.tracks.json")
    p.add_argument("--gt", help="Ground-truth JSON-lines file")
    p.add_argument("--match-iou", type=float, help="Match threshold (default: metrics.match_iou)")
    p.add_argument("--out", help="Also write the report to this file")
    p.set_defaults(handler=commands.cmd_eval)

    p = with_config(sub.add_parser("synth", help="Write a seeded synthetic scenario"))
    p.add_argument("--out-dets", required=True, help="Detection file to write")
    p.add_argument("--out-gt", required=True, help="Ground-truth file to write")
    p.add_argument("--videos", type=int, default=1, help="Number of videos (seed + k for video k)")
    p.add_argument("--seed", type=int, help="Override scenario.seed")
    p.set_defaults(handler=commands.cmd_synth)

    p = with_config(sub.add_parser("overlay", help="Draw tracks as SVG frames"))
    p.add_argument("--tracks", required=True, help="Track file or directory")
    p.add_argument("--size", required=True, type=commands.parse_size, help="Frame size WxH in pixels")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--background", help="Background image template, e.g. frames/{frame:06d}.jpg")
    p.set_defaults(handler=commands.cmd_overlay)

    p = with_config(sub.add_parser("bench", help="Time the tracker on dense synthetic frames"))
    p.add_argument("--n-boxes", type=int, default=200, help="Text instances per frame")
    p.add_argument("--frames", type=int, default=100, help="Frames to track")
    p.add_argument("--seed", type=int, help="Workload seed (default: $XENTRACK_SEED)")
    p.set_defaults(handler=commands.cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT

    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except XenTrackError as e:
        display.print_error(str(e))
        return EXIT_INPUT
    except ValidationError as e:
        display.print_error("; ".join(line.strip() for line in str(e).splitlines()))
        return EXIT_INPUT
    except Exception as e:
        if args.verbose:
            logger.exception("internal error")
        display.print_error(f"internal error: {type(e).__name__}: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
