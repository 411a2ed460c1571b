"""Command line entry point.

Exit codes: 0 success, 1 partial failure (some videos failed), 2 bad
configuration or unreadable inputs.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import fixtures
from .config import RunConfig, load_config
from .errors import ConfigurationError, EvaluationError
from .pipeline import run_analyze, run_evaluate

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("newstension")


def _cmd_analyze(args) -> int:
    config = load_config(args.config) if args.config else RunConfig()
    return run_analyze(args.manifest, config, args.out, workers=args.workers)


def _cmd_evaluate(args) -> int:
    calibration = None
    if args.calibration:
        with open(args.calibration, encoding="utf-8") as fh:
            calibration = [line.strip() for line in fh if line.strip()]
    report = run_evaluate(args.reports, args.annotations, tuple(args.baseline or ()), args.out, calibration)
    for name, row in report["approaches"].items():
        log.info("%-10s all=%s concordance=%s", name, row["all"], row["concordance"])
    return EXIT_PARTIAL if report["failed_videos"] else EXIT_OK


def _cmd_fixtures(args) -> int:
    paths = fixtures.generate(args.out)
    print(json.dumps({k: str(v) for k, v in paths.items()}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newstension", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="fuse features of every manifest video into a tension level")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", help="JSON run configuration (defaults apply when omitted)")
    p.add_argument("--out", required=True, help="JSON-lines report to write")
    p.add_argument("--workers", type=int, help="worker processes (default: config, then CPU count)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("evaluate", help="score reports against annotator labels")
    p.add_argument("--reports", required=True)
    p.add_argument("--annotations", required=True, help="CSV: video_id,annotator_id,label")
    p.add_argument("--baseline", action="append", choices=("field-size", "sentiment"))
    p.add_argument("--calibration", help="file of video ids used to tune the field-size threshold")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("fixtures", help="synthetic dataset tools")
    fsub = p.add_subparsers(dest="fixtures_command", required=True)
    g = fsub.add_parser("generate", help="write the 20-video synthetic dataset")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_fixtures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, EvaluationError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
