"""Command line launcher for the scoring service."""

from __future__ import annotations

import argparse
import sys

from .labels import TASKS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bioee-service",
        description="Serve scoring endpoints from fine-tuned checkpoints.",
    )
    for task in TASKS:
        parser.add_argument(
            f"--{task}", metavar="DIR", help=f"checkpoint directory for /v1/{task}"
        )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--batch-size", type=int, default=32)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    checkpoints = {
        task: getattr(args, task) for task in TASKS if getattr(args, task) is not None
    }
    if not checkpoints:
        print("error: no checkpoints given; pass at least one of "
              + ", ".join(f"--{t}" for t in TASKS), file=sys.stderr)
        return 1
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()
    from .app import create_app

    try:
        app = create_app(checkpoints, batch_size=args.batch_size)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
