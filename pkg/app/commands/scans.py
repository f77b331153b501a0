"""Sup-norm decay scans and power-law fits of their curves."""

import argparse
import csv
from pathlib import Path

import numpy as np

from app.commands import CommandResult
from app.models.domain import DecayCurve
from app.services.decay import decay_service
from app.util.errors import ArgumentError
from app.util.logging import get_logger

logger = get_logger("commands.scans")

CURVE_HEADER = ["t", "sup", "argmax_x", "argmax_y"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("decay-scan", help="sup |G(t)| on a geometric time grid")
    parser.add_argument("--m", type=int, choices=(0, 1), default=0, help="Mass")
    parser.add_argument("--h", type=float, default=2.0 ** -7, help="Semiclassical parameter")
    parser.add_argument("--a", type=float, default=0.25, help="Source distance to the boundary")
    parser.add_argument("--gamma", type=float, default=None, help="Dyadic angle scale (default: a)")
    parser.add_argument("--t-min", type=float, required=True, help="First time")
    parser.add_argument("--t-max", type=float, required=True, help="Last time")
    parser.add_argument("--t-count", type=int, required=True, help="Number of times")
    parser.add_argument("--low-freq", action="store_true", help="Scan the low-frequency Green function")
    parser.add_argument("--x-points", type=int, default=None, help="Normal grid size (default 129, or 9 at low frequency)")
    parser.set_defaults(handler=decay_scan, output_format="csv")

    parser = subparsers.add_parser("decay-fit", help="Fit sup ~ C t^{-alpha} to a decay-scan curve")
    parser.add_argument("--in", dest="input", required=True, help="CSV written by decay-scan")
    parser.add_argument("--peaks-only", action="store_true", help="Fit through the detected peaks only")
    parser.set_defaults(handler=decay_fit, output_format="json")


def time_grid(t_min: float, t_max: float, count: int) -> np.ndarray:
    if count < 1:
        raise ArgumentError("--t-count must be >= 1")
    if t_min <= 0 or t_max < t_min:
        raise ArgumentError("Need 0 < t-min <= t-max")
    return np.geomspace(t_min, t_max, count)


def decay_scan(args: argparse.Namespace) -> CommandResult:
    t_values = time_grid(args.t_min, args.t_max, args.t_count)
    if args.low_freq:
        curve = decay_service.low_freq_curve(args.m, args.a, t_values, args.x_points or 9)
    else:
        gamma = args.a if args.gamma is None else args.gamma
        curve = decay_service.high_freq_curve(args.m, args.h, args.a, gamma, t_values, args.x_points or 129)
    rows = [[t, s, p[0], p[1]] for t, s, p in zip(curve.t_values, curve.sup_values, curve.argmax_points)]
    return CommandResult(format="csv", header=CURVE_HEADER, rows=rows)


def read_curve(path: Path) -> DecayCurve:
    """DecayCurve from a decay-scan CSV."""
    try:
        with open(path, newline="") as f:
            records = list(csv.DictReader(f))
    except OSError as e:
        raise ArgumentError(f"Cannot read {path}: {e}")
    try:
        t_values = [float(r["t"]) for r in records]
        sup_values = [float(r["sup"]) for r in records]
        argmax = [(float(r.get("argmax_x") or "nan"), float(r.get("argmax_y") or "nan")) for r in records]
    except (KeyError, TypeError, ValueError) as e:
        raise ArgumentError(f"{path} is not a decay curve: {e}")
    curve = DecayCurve(t_values=t_values, sup_values=sup_values, argmax_points=argmax)
    curve.peaks = decay_service.detect_peaks(t_values, sup_values)
    return curve


def decay_fit(args: argparse.Namespace) -> CommandResult:
    curve = read_curve(Path(args.input))
    fit = decay_service.fit_exponent(curve, use_peaks_only=args.peaks_only)
    return CommandResult(
        payload={
            "exponent": fit.exponent,
            "residual": fit.residual,
            "constant": fit.constant,
            "samples": len(fit.t_values),
            "peaks_only": args.peaks_only,
            "peaks": [list(p) for p in curve.peaks],
            "degenerate": fit.degenerate,
        }
    )
