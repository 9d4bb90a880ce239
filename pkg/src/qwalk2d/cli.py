"""
Command-line front end.

Commands
--------
simulate    evolve a walk and write the probability grid (csv or json)
spectrum    cluster the full eigenvalue spectrum of a coin on a lattice
timeavg     time-averaged origin probabilities by any of the four methods
scan-alpha  tabulate the two-component limit curves p_R, p_L over alpha
predict     localization verdict from block-spectrum degeneracy

Coins are selected with `grover | a1 | a2 | a4:p | file:path`; initial
states with `R | L | U | D` or `custom:a,b,c,d` using complex literals
like `0.5+0.3i` or `0.5e^{i/3}`.  Exit codes: 0 success, 2 usage error,
3 numeric/internal-consistency error.  Set QWALK2D_THREADS to spread
spectral block construction over worker threads.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import re
import sys

import numpy as np

from . import timeavg as ta
from .coins import Coin, a1_coin, a2_coin, coin_from_json, grover_coin, symmetric_family
from .evolve import evolve
from .spectral import SpectralDecomposition, SpectralError, evolve_spectral
from .state import InitialSpec, origin_superposition, write_grid_csv, write_grid_json

__all__ = ["main", "parse_coin", "parse_complex", "parse_initial", "run"]

_POLAR = re.compile(
    r"^(?P<mod>[+-]?(?:\d+\.?\d*|\.\d+)?)\s*e\^\{(?P<sign>[+-]?)i(?P<theta>[^}]*)\}$"
)
_THETA = re.compile(
    r"^(?P<num>\d+\.?\d*|\.\d+)?\s*(?P<pi>pi)?\s*(?:/\s*(?P<den>\d+\.?\d*|\.\d+))?$"
)


def parse_complex(text: str) -> complex:
    """Parse a complex literal: `x+yi` cartesian or `re^{iT}` polar."""
    text = text.strip()
    if not text:
        raise ValueError("empty complex literal")
    polar = _POLAR.match(text)
    if polar:
        mod_text = polar.group("mod")
        modulus = 1.0 if mod_text in ("", "+") else -1.0 if mod_text == "-" else float(mod_text)
        theta_text = polar.group("theta").strip()
        theta_match = _THETA.match(theta_text)
        if not theta_match:
            raise ValueError(f"bad phase in complex literal {text!r}")
        theta = float(theta_match.group("num") or 1.0)
        if theta_match.group("pi"):
            theta *= np.pi
        if theta_match.group("den"):
            theta /= float(theta_match.group("den"))
        if polar.group("sign") == "-":
            theta = -theta
        return modulus * complex(np.cos(theta), np.sin(theta))
    normalized = re.sub(r"(?<![0-9.])j", "1j", text.replace("i", "j").replace(" ", ""))
    try:
        return complex(normalized)
    except ValueError:
        raise ValueError(f"cannot parse complex literal {text!r}") from None


def parse_coin(text: str) -> Coin:
    """Resolve a coin selector `grover | a1 | a2 | a4:p | file:path`."""
    text = text.strip()
    if text == "grover":
        return grover_coin()
    if text == "a1":
        return a1_coin()
    if text == "a2":
        return a2_coin()
    if text.startswith("a4:"):
        try:
            p = float(text[3:])
        except ValueError:
            raise ValueError(f"bad parameter in coin selector {text!r}") from None
        return symmetric_family(p)
    if text.startswith("file:"):
        return coin_from_json(text[5:])
    raise ValueError(
        f"unknown coin {text!r}; expected grover, a1, a2, a4:p or file:path"
    )


def parse_initial(text: str) -> InitialSpec:
    """
    Resolve an initial-state selector: one of R/L/U/D, or
    `custom:a,b,c,d`.  Custom weights are normalized; a warning is
    emitted when the input norm deviates from 1 by more than 1e-6.
    """
    text = text.strip()
    if text.upper() in ("R", "L", "U", "D"):
        return InitialSpec.pure(text.upper())
    if not text.startswith("custom:"):
        raise ValueError(
            f"unknown initial state {text!r}; expected R, L, U, D or custom:a,b,c,d"
        )
    parts = text[len("custom:"):].split(",")
    if len(parts) != 4:
        raise ValueError(f"custom initial state needs 4 components, got {len(parts)}")
    weights = np.array([parse_complex(part) for part in parts])
    norm = float(np.sqrt((np.abs(weights) ** 2).sum()))
    if norm == 0.0:
        raise ValueError("custom initial state cannot be all zero")
    if abs(norm - 1.0) > 1e-6:
        print(
            f"warning: normalizing initial state (input norm {norm:.6g})",
            file=sys.stderr,
        )
    weights = weights / norm
    return InitialSpec(*weights)


def _odd_size(value: str) -> int:
    size = int(value)
    if size < 3 or size % 2 == 0:
        raise argparse.ArgumentTypeError(f"lattice size must be odd and >= 3, got {size}")
    return size


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk2d",
        description="Two-dimensional coined quantum walks on the periodic lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="evolve a walk and write the probability grid")
    sim.add_argument("--coin", required=True)
    sim.add_argument("--n", type=_odd_size, required=True)
    sim.add_argument("--steps", type=int, required=True)
    sim.add_argument("--initial", default="R")
    sim.add_argument("--backend", choices=("direct", "spectral"), default="direct")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--out", required=True)

    spec = sub.add_parser("spectrum", help="cluster the full eigenvalue spectrum")
    spec.add_argument("--coin", required=True)
    spec.add_argument("--n", type=_odd_size, required=True)
    spec.add_argument("--out")

    avg = sub.add_parser("timeavg", help="time-averaged origin probabilities")
    avg.add_argument("--coin", default="grover")
    avg.add_argument("--n", type=_odd_size)
    avg.add_argument("--initial", default="R")
    avg.add_argument(
        "--method",
        choices=("empirical", "exact", "closed-form", "limit"),
        default="exact",
    )
    avg.add_argument("--parity", choices=ta.PARITIES, default="all")
    avg.add_argument("--samples", type=int, default=20000,
                     help="time horizon T for the empirical method")
    avg.add_argument("--out")

    scan = sub.add_parser("scan-alpha", help="limit curves over the two-component family")
    scan.add_argument("--samples", type=int, default=201)
    scan.add_argument("--out")

    pred = sub.add_parser("predict", help="localization verdict for a coin")
    pred.add_argument("--coin", required=True)
    pred.add_argument("--n", type=_odd_size, required=True)
    return parser


def _cmd_simulate(args) -> int:
    coin = parse_coin(args.coin)
    spec = parse_initial(args.initial)
    if args.steps < 0:
        raise ValueError(f"steps must be nonnegative, got {args.steps}")
    state = origin_superposition(args.n, spec)
    if args.backend == "spectral":
        state = evolve_spectral(state, coin, args.steps)
    else:
        state = evolve(state, coin, args.steps)
    if args.format == "csv":
        write_grid_csv(state, args.out)
    else:
        write_grid_json(state, args.out, coin=coin.label, initial=args.initial)
    grid = state.probability_grid()
    flat = int(np.argmax(grid))
    half = (state.n - 1) // 2
    x_max = flat // state.n - half
    y_max = flat % state.n - half
    print(f"origin probability: {state.probability_at(0, 0):.12g}")
    print(f"grid maximum: {grid.max():.12g} at ({x_max}, {y_max})")
    return 0


def _cmd_spectrum(args) -> int:
    coin = parse_coin(args.coin)
    decomposition = SpectralDecomposition.build(coin, args.n)
    if args.out:
        decomposition.write_json(args.out)
    else:
        print(json.dumps(decomposition.to_payload(), indent=2, sort_keys=True))
    return 0


def _format_value(value: complex) -> str:
    if abs(value.imag) < 1e-9:
        return f"{value.real:.12g}"
    return f"{value.real:.12g}{value.imag:+.12g}i"


def _cmd_timeavg(args) -> int:
    spec = parse_initial(args.initial)
    if args.method == "limit":
        report = ta.limit_report(spec)
    elif args.method == "closed-form":
        if args.coin != "grover" or spec.describe() != "R":
            raise ValueError(
                "the closed form covers the grover coin started in the pure R state"
            )
        if args.n is None:
            raise ValueError("--n is required for the closed-form method")
        value = ta.grover_closed_form(args.n, args.parity)
        print(f"{value:.12g}")
        if args.out:
            payload = {
                "method": "closed-form",
                "parity": args.parity,
                "coin": "grover",
                "N": args.n,
                "initial": "R",
                "per_chirality": {"R": value},
                "total": None,
                "samples": None,
            }
            pathlib.Path(args.out).write_text(
                json.dumps(payload, indent=2, sort_keys=True) + "\n"
            )
        return 0
    else:
        coin = parse_coin(args.coin)
        if args.n is None:
            raise ValueError(f"--n is required for the {args.method} method")
        if args.method == "empirical":
            state = origin_superposition(args.n, spec)
            report = ta.empirical_time_average(
                state, coin, args.samples, parity=args.parity
            )
        else:
            report = ta.exact_time_average(coin, spec, args.n, parity=args.parity)
    for name, value in zip("RLUD", report.per_chirality):
        print(f"{name}: {value:.12g}")
    print(f"total: {report.total:.12g}")
    if args.out:
        ta.write_report_json(report, args.out)
    return 0


def _cmd_scan_alpha(args) -> int:
    if args.out:
        ta.write_scan_csv(args.out, args.samples)
    else:
        rows = ta.scan_alpha(args.samples)
        print("alpha,p_R,p_L")
        for alpha, p_r, p_l in rows:
            print(f"{alpha:.17g},{p_r:.17g},{p_l:.17g}")
    return 0


def _cmd_predict(args) -> int:
    coin = parse_coin(args.coin)
    report = ta.localization_predictor(coin, args.n)
    print(f"localizing: {'yes' if report.localizing else 'no'}")
    if report.common_eigenvalues:
        values = ", ".join(_format_value(v) for v in report.common_eigenvalues)
        print(f"common eigenvalues: {values}")
    print(f"max multiplicity: {report.max_multiplicity}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "spectrum": _cmd_spectrum,
    "timeavg": _cmd_timeavg,
    "scan-alpha": _cmd_scan_alpha,
    "predict": _cmd_predict,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (SpectralError, ta.ConsistencyError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
