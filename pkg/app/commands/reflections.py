"""Airy-Poisson summation check and the overlap count of reflected waves."""

import argparse
import math

import numpy as np

from app.commands import CommandResult
from app.services.cutoffs import cutoff_service
from app.services.parametrix import parametrix_service
from app.util.logging import get_logger

logger = get_logger("commands.reflections")


def register(subparsers) -> None:
    parser = subparsers.add_parser("poisson-check", help="Both sides of the Airy-Poisson summation identity")
    parser.add_argument("--bump-center", type=float, required=True, help="Center of the test bump in omega")
    parser.add_argument("--bump-width", type=float, required=True, help="Width of the test bump")
    parser.add_argument("--nmax", type=int, required=True, help="Largest |N| summed")
    parser.set_defaults(handler=poisson_check, output_format="json")

    parser = subparsers.add_parser("overlap-count", help="Reflections contributing near (t, x, y)")
    parser.add_argument("--t", type=float, required=True, help="Time")
    parser.add_argument("--gamma", type=float, required=True, help="Dyadic angle scale")
    parser.add_argument("--h", type=float, required=True, help="Semiclassical parameter")
    parser.add_argument("--m", type=int, choices=(0, 1), default=0, help="Mass")
    parser.add_argument("--x", type=float, default=None, help="Normal coordinate (default: gamma)")
    parser.add_argument("--y", type=float, default=None, help="Tangential coordinate (default: on the front, -t sqrt(1+gamma))")
    parser.add_argument("--a", type=float, default=None, help="Source distance (default: gamma)")
    parser.set_defaults(handler=overlap_count, output_format="json")


def poisson_check(args: argparse.Namespace) -> CommandResult:
    """lhs = sum_N int e^{-iNL} f, rhs = 2 pi sum_k f(w_k) / L'(w_k) for a bump f."""
    testfn = cutoff_service.bump_function(args.bump_center, args.bump_width)
    bump = cutoff_service.bump(args.bump_center, args.bump_width)
    support = (max(bump.support[0], 0.0), bump.support[1])
    check = parametrix_service.airy_poisson_check(testfn, support, args.nmax)
    nodes = np.linspace(support[0], support[1], 2001)
    sup_norm = float(np.max(np.abs(testfn(nodes))))
    return CommandResult(
        payload={
            "lhs": check.lhs,
            "lhs_imag": check.lhs_imag,
            "rhs": check.rhs,
            "relerr": check.relerr,
            "nmax": check.n_max,
            "testfn_sup": sup_norm,
        }
    )


def overlap_count(args: argparse.Namespace) -> CommandResult:
    x = args.gamma if args.x is None else args.x
    y = -args.t * math.sqrt(1.0 + args.gamma) if args.y is None else args.y
    report = parametrix_service.overlap_count(args.t, x, y, args.gamma, args.h, m=args.m, a=args.a)
    if not report.within_bound:
        logger.warning(
            f"{report.count} reflections exceed C * bound = {report.constant * report.bound_rhs:.3g}"
        )
    return CommandResult(
        payload={
            "t": report.t,
            "x": report.x,
            "y": report.y,
            "gamma": report.gamma,
            "h": report.h,
            "m": report.m,
            "members": report.members,
            "count": report.count,
            "bound_rhs": report.bound_rhs,
            "constant": report.constant,
            "within_bound": report.within_bound,
        }
    )
