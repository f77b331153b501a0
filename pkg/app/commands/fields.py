"""Pointwise Green-function values and the Klein-Gordon model integral."""

import argparse
from typing import List

import numpy as np

from app.commands import CommandResult
from app.models.domain import GreenQuery
from app.services.green import green_service
from app.services.parametrix import parametrix_service
from app.services.specfun import airy_service
from app.util.errors import ArgumentError
from app.util.logging import get_logger

logger = get_logger("commands.fields")

DEFAULT_T_LIST = "100,177.82794100389228,316.22776601683796,562.341325190349,1000,1778.2794100389228,3162.2776601683795,5623.413251903491,10000"


def parse_float_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ArgumentError(f"Invalid number list {text!r}: {e}")
    if not values:
        raise ArgumentError("Empty number list")
    return values


def register(subparsers) -> None:
    parser = subparsers.add_parser("green-eval", help="Localized Green function at one point")
    parser.add_argument("--m", type=int, choices=(0, 1), default=0, help="Mass")
    parser.add_argument("--h", type=float, default=2.0 ** -7, help="Semiclassical parameter")
    parser.add_argument("--a", type=float, default=0.25, help="Source distance to the boundary")
    parser.add_argument("--gamma", type=float, default=0.25, help="Dyadic angle scale")
    parser.add_argument("--t", type=float, required=True, help="Time")
    parser.add_argument("--x", type=float, default=None, help="Normal coordinate (default: a)")
    parser.add_argument("--y", type=float, default=0.0, help="Tangential coordinate")
    parser.add_argument("--low-freq", action="store_true", help="Evaluate the low-frequency Green function")
    parser.add_argument("--d", type=int, default=2, help="Dimension (low frequency)")
    parser.add_argument("--kmax", type=int, default=None, help="Mode truncation")
    parser.add_argument("--tol", type=float, default=1e-8, help="Relative quadrature tolerance")
    parser.add_argument(
        "--split",
        choices=("full", "chi0", "rest"),
        default="full",
        help="Low-frequency part: all modes, the chi0(t lambda_k / M) part or its complement",
    )
    parser.add_argument("--reflected", action="store_true", help="Also sum the reflected wave packets")
    parser.set_defaults(handler=green_eval, output_format="json")

    parser = subparsers.add_parser("model-integral", help="|v(z, t)| of the Klein-Gordon model integral")
    parser.add_argument("--m", type=int, choices=(0, 1), default=1, help="Mass")
    parser.add_argument("--c", type=float, default=None, help="Airy coefficient (default: w_1)")
    parser.add_argument("--z", type=float, default=None, help="Observation slope (default: degenerate z0)")
    parser.add_argument("--t-list", type=str, default=DEFAULT_T_LIST, help="Comma-separated times")
    parser.set_defaults(handler=model_integral, output_format="csv")


def green_eval(args: argparse.Namespace) -> CommandResult:
    """G_h at (t, x, y), high or low frequency."""
    x = args.a if args.x is None else args.x
    if args.low_freq:
        result = green_service.green_low_freq(
            args.m, args.t, x, args.a, args.y, d=args.d, kmax=args.kmax, tol=args.tol, split_part=args.split
        )
        payload = {"representation": "spectral", "low_freq": True, "d": args.d, "split": args.split}
        payload.update(result.as_json())
        return CommandResult(payload=payload)

    q = GreenQuery(m=args.m, h=args.h, a=args.a, gamma=args.gamma, t=args.t, x=x, y=args.y, kmax=args.kmax, tol=args.tol)
    result = green_service.green_high_freq(q)
    payload = {"representation": "spectral", "low_freq": False, "lambda_gamma": q.lambda_gamma}
    payload.update(result.as_json())
    if args.reflected:
        window = parametrix_service.reflection_window(q)
        reflected = parametrix_service.sum_reflected(q)
        payload["reflected_re"] = reflected.real
        payload["reflected_im"] = reflected.imag
        payload["window"] = [window.start, window.stop - 1]
        scale = max(abs(result.value), abs(reflected))
        payload["relative_difference"] = abs(result.value - reflected) / scale if scale > 0 else 0.0
    return CommandResult(payload=payload)


def model_integral(args: argparse.Namespace) -> CommandResult:
    """|v(z, t)| along a list of times."""
    c = airy_service.zero(1) if args.c is None else args.c
    z = args.z
    if z is None:
        degenerate = green_service.find_degenerate(args.m, c)
        if degenerate is None:
            # no inflection: observe along the slope at eta = 1
            z = float(green_service.model_dispersion(1.0, args.m, c)[1])
        else:
            z = degenerate[1]
        logger.info(f"Model integral observed at z={z:.12f}")
    rows = []
    for t in parse_float_list(args.t_list):
        value = green_service.model_integral(args.m, c, z, t)
        rows.append([t, float(np.abs(value))])
    return CommandResult(format="csv", header=["t", "abs_value"], rows=rows)
