"""Command-line entry point of the Friedlander dispersion toolkit."""

import argparse
import hashlib
import platform
import sys
from importlib import metadata
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from app.commands import CommandResult, register_all
from app.config import settings
from app.models.runs import Manifest, OutputFile, RunConfig
from app.util.errors import ArgumentError, FriedlanderError, exit_code_for
from app.util.logging import RunLogger, get_logger, setup_logging
from app.util.metrics import write_metrics
from app.util.output import dumps_csv, dumps_json, write_text

logger = get_logger("cli")

PACKAGE = "friedlander-dispersion"
VERSIONED_PACKAGES = (PACKAGE, "numpy", "scipy", "pydantic", "pydantic-settings", "prometheus-client")
MANIFEST_SUFFIX = ".manifest.json"

# Parsed attributes that are plumbing rather than inputs of the computation
PLUMBING = {"handler", "output_format", "command", "out", "threads", "log_level", "from_manifest", "quad_tol"}


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Options accepted before or after the subcommand name."""
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--threads", type=int, default=default(None), help="Worker cap (fallback: FD_THREADS)")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        default=default(None),
        help="Logging level (fallback: FD_LOG_LEVEL)",
    )
    parser.add_argument("--out", default=default(None), help="Result file (default: <results dir>/<command>.<json|csv>)")
    parser.add_argument("--quad-tol", type=float, default=default(None), help="Absolute oscillatory-quadrature tolerance")
    parser.add_argument("--from-manifest", default=default(None), help="Re-run the invocation recorded in a manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fd",
        description="Dispersive estimates for waves in the Friedlander model domain",
    )
    _global_options(parser, suppress=False)
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    register_all(subparsers)
    for sub in subparsers.choices.values():
        _global_options(sub, suppress=True)
    return parser


def package_versions() -> dict:
    versions = {"python": platform.python_version()}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def default_output(command: str, output_format: str) -> Path:
    return Path(settings.results_dir or "results") / f"{command}.{output_format}"


def load_manifest(path: str) -> Manifest:
    try:
        return Manifest.model_validate_json(Path(path).read_text())
    except OSError as e:
        raise ArgumentError(f"Cannot read manifest {path}: {e}")
    except ValidationError as e:
        raise ArgumentError(f"Invalid manifest {path}: {e}")


def run_id_for(argv: List[str]) -> str:
    """Stable identifier of an invocation, so identical runs log identical ids."""
    return hashlib.sha256("\x00".join(argv).encode("utf-8")).hexdigest()[:12]


def render(result: CommandResult) -> str:
    if result.format == "csv":
        return dumps_csv(result.header, result.rows)
    return dumps_json(result.payload or {}) + "\n"


def execute(args: argparse.Namespace, argv: List[str], out: Optional[str]) -> Manifest:
    """Run the parsed command and write its result, manifest and metrics."""
    output = Path(out) if out else default_output(args.command, args.output_format)
    result: CommandResult = args.handler(args)
    digest = write_text(output, render(result))

    options = {k: v for k, v in sorted(vars(args).items()) if k not in PLUMBING}
    tolerances = {"quad_tol": settings.quad_tol, "newton_tol": settings.newton_tol, "zero_tol": settings.zero_tol}
    if "tol" in options:
        tolerances["tol"] = options["tol"]
    manifest = Manifest(
        run=RunConfig(
            command=args.command,
            argv=argv,
            options=options,
            threads=settings.threads,
            output=str(output),
            tolerances=tolerances,
        ),
        settings=settings.model_dump(),
        versions=package_versions(),
        outputs=[OutputFile(path=str(output), sha256=digest, format=result.format)],
    )
    manifest_path = output.with_name(output.name + MANIFEST_SUFFIX)
    write_text(manifest_path, dumps_json(manifest.model_dump()) + "\n")
    if settings.enable_metrics:
        write_metrics(output.parent, settings.metrics_file_name)
    logger.info(f"Wrote {output} and {manifest_path.name}")
    return manifest


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the subcommand and return the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # usage errors exit 2, --help exits 0
        return e.code if isinstance(e.code, int) else 2

    setup_logging(args.log_level)
    out = args.out
    threads = args.threads
    quad_tol = args.quad_tol
    if args.from_manifest:
        try:
            manifest = load_manifest(args.from_manifest)
        except FriedlanderError as e:
            logger.error(str(e))
            return exit_code_for(e)
        argv = list(manifest.run.argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else 2
        out = out or manifest.run.output
        threads = threads or manifest.run.threads
        # an explicit --quad-tol wins over the recorded one
        if quad_tol is None:
            quad_tol = manifest.run.tolerances.get("quad_tol")
        logger.info(f"Replaying {manifest.run.command} from {manifest.run.output}")

    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if threads is not None and threads < 1:
        logger.error("--threads must be >= 1")
        return 2

    saved = (settings.threads, settings.quad_tol)
    if threads is not None:
        settings.threads = threads
    if quad_tol is not None:
        settings.quad_tol = quad_tol
    try:
        with RunLogger(args.command, run_id_for(argv)):
            execute(args, argv, out)
    except FriedlanderError as e:
        return exit_code_for(e)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return 2
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return 1
    finally:
        settings.threads, settings.quad_tol = saved
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
