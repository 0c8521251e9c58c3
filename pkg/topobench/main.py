"""
Command-line entry point for topobench.

This module builds the argument parser, configures logging from settings,
loads the run configuration (profile file, then flag overrides) and
dispatches to the command handlers. Errors become exit codes: 0 success,
1 usage or configuration, 2 validation or oracle failure, 3 infeasible
generation or selection.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from core.config import FLAG_PATHS, load_run_config, settings
from core.exceptions import EXIT_OK, TopoBenchError, UsageError, exit_code_for, format_error
from cli.commands import COMMANDS, run_command
from models.schemas import BaselineName, TaskName


# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)


class TopoBenchArgumentParser(argparse.ArgumentParser):
    """Argument parser raising UsageError instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _run_options() -> argparse.ArgumentParser:
    parent = TopoBenchArgumentParser(add_help=False)
    group = parent.add_argument_group("run configuration")
    group.add_argument("--config", help="JSON run profile; flags override it")
    group.add_argument("--profile", help=f"Shipped profile name under {settings.PROFILE_DIR}/ (desk, full)")
    group.add_argument("--task", choices=[t.value for t in TaskName])
    group.add_argument("--seed", type=int, help="Master seed")
    group.add_argument("--candidates", type=int, help="Candidate pool size")
    group.add_argument("--train-size", type=int)
    group.add_argument("--test-size", type=int)
    group.add_argument("--folds", type=int, help="Number of CV folds n")
    group.add_argument("--train-folds", type=int, help="Training folds m per round")
    group.add_argument("--threshold", type=int, help="Clique distance threshold")
    group.add_argument("--clique-size", type=int)
    group.add_argument("--baseline", choices=[b.value for b in BaselineName])
    group.add_argument("--wl-iterations", type=int)
    group.add_argument("--samples", type=int, help="Graphlet samples per graph")
    group.add_argument("--graphlet-size", type=int, choices=[3, 4])
    group.add_argument("--workers", type=int, help="Generation worker processes")
    group.add_argument("--out", help="Output directory")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _run_options()
    parser = TopoBenchArgumentParser(prog=settings.APP_NAME, description="Topological graph benchmark toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("generate", parents=[parent], help="Generate a balanced candidate pool")

    filter_parser = subparsers.add_parser("filter", parents=[parent], help="Filter candidates into train/test")
    filter_parser.add_argument("--candidates-file", dest="candidates_file", help="Candidate dataset file")

    verify_parser = subparsers.add_parser("verify", parents=[parent], help="Recompute labels with the oracles")
    verify_parser.add_argument("dataset", nargs="?", help="Dataset file (default: candidates in --out)")

    baseline_parser = subparsers.add_parser("baseline", parents=[parent], help="Evaluate a kernel-feature baseline")
    baseline_parser.add_argument("--train", help="Train split file")
    baseline_parser.add_argument("--test", help="Test split file")

    demo_parser = subparsers.add_parser("tensor-demo", parents=[parent], help="Initial node features via tensors")
    demo_parser.add_argument("dataset", nargs="?", help="Dataset file (default: candidates in --out)")
    demo_parser.add_argument("--main-mode", type=int, default=0, help="Main topology mode")
    demo_parser.add_argument("--width", type=int, default=8, help="Embedding width per mode")
    demo_parser.add_argument("--node-table", choices=["tensor", "lookup"], default="tensor")
    demo_parser.add_argument("--limit", type=int, help="Process only the first N items")
    demo_parser.add_argument("--shuffle", action="store_true", help="Relabel topology indices before embedding")
    return parser


def _config_file(args: argparse.Namespace) -> Optional[str]:
    if args.config and args.profile:
        raise UsageError("--config and --profile are mutually exclusive")
    if args.profile:
        path = Path(settings.PROFILE_DIR) / f"{args.profile}.json"
        if not path.exists():
            raise UsageError(f"unknown profile {args.profile!r}", details={"path": str(path)})
        return str(path)
    return args.config


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one topobench command.

    Args:
        argv: Command-line arguments without the program name

    Returns:
        Process exit code
    """
    try:
        args = build_parser().parse_args(argv)
        overrides = {name: getattr(args, name, None) for name in FLAG_PATHS}
        cfg = load_run_config(_config_file(args), overrides)

        kwargs = {}
        if args.command == "filter":
            kwargs = {"candidates": args.candidates_file}
        elif args.command == "verify":
            kwargs = {"dataset": args.dataset}
        elif args.command == "baseline":
            kwargs = {"train": args.train, "test": args.test}
        elif args.command == "tensor-demo":
            kwargs = {
                "dataset": args.dataset,
                "main_mode": args.main_mode,
                "width": args.width,
                "node_table": args.node_table,
                "limit": args.limit,
                "shuffle": args.shuffle,
            }

        summary = run_command(args.command, COMMANDS[args.command], cfg, **kwargs)
        print(json.dumps(summary, sort_keys=True, indent=2))
        return EXIT_OK
    except TopoBenchError as e:
        print(format_error(e), file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
