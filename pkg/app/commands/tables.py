"""Airy tables and gallery modes."""

import argparse

from app.commands import CommandResult
from app.services.modes import mode_service
from app.services.specfun import airy_service
from app.util.logging import get_logger

logger = get_logger("commands.tables")


def register(subparsers) -> None:
    parser = subparsers.add_parser("airy-table", help="Zeros of Ai(-w), Ai'(-w_k) and L'(w_k)")
    parser.add_argument("--count", type=int, required=True, help="Number of zeros")
    parser.set_defaults(handler=airy_table, output_format="json")

    parser = subparsers.add_parser("modes", help="Gallery mode e_k(., theta) and its checks")
    parser.add_argument("--k", type=int, required=True, help="Mode index (>= 1)")
    parser.add_argument("--theta", type=float, required=True, help="Tangential frequency (non-zero)")
    parser.add_argument(
        "--grid", "--points", dest="points", type=int, default=0,
        help="Write that many samples as CSV instead of the summary",
    )
    parser.add_argument("--x-max", type=float, default=None, help="Right end of the sample grid")
    parser.set_defaults(handler=modes, output_format="json")


def airy_table(args: argparse.Namespace) -> CommandResult:
    """Airy zeros with derivative values and L' at the zeros."""
    table = airy_service.airy_table(args.count)
    records = table.records()[: args.count]
    return CommandResult(payload={"count": len(records), "zeros": records})


def modes(args: argparse.Namespace) -> CommandResult:
    """Eigenvalue, normalization and Sturm count of one mode, or its samples."""
    if args.points:
        x, values = mode_service.sample(args.k, args.theta, args.points, args.x_max)
        return CommandResult(format="csv", header=["x", "e_k"], rows=[[float(a), float(b)] for a, b in zip(x, values)])
    mode = mode_service.eigenmode(args.k, args.theta)
    residual, scale = mode_service.spectral_action(args.k, args.theta)
    return CommandResult(
        payload={
            "k": mode.k,
            "theta": mode.theta,
            "omega": mode.omega,
            "eigenvalue": mode.eigenvalue,
            "normalizer": mode.normalizer,
            "norm_squared": mode_service.norm_squared(args.k, args.theta),
            "interior_zeros": mode_service.interior_zeros(args.k, args.theta),
            "spectral_residual": residual / scale,
        }
    )
