"""Command-line sweeps reproducing the spin, boson and bound-comparison curves.

Exit codes: 0 success, 2 usage error, 3 numerical-validation failure,
4 convergence failure.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys

import numpy as np

from . import sweeps
from .boson import ConvergenceError
from .core import DensityMatrix, DistanceMeasure, apply_channel
from .decoherence import CouplingParams, ThermalBathParams, decohere, sigma_from_thermal
from .sampling import random_density_matrix
from .spin import SpinEnsemble

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_CONVERGENCE = 0, 2, 3, 4
DECOHERENCE_ATOL = 1e-10


def _add_sigma(p, default):
    p.add_argument("--sigma", nargs=3, metavar=("MIN", "MAX", "POINTS"), default=default,
                   help="sigma range and point count")
    spacing = p.add_mutually_exclusive_group()
    spacing.add_argument("--log", dest="log", action="store_true", default=True, help="log spacing (default)")
    spacing.add_argument("--linear", dest="log", action="store_false", help="linear spacing")


def _add_output(p):
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--gnuplot", action="store_true", help="also write <out>.gp plot script")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macrocoh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spin-sweep", help="N-spin magnetization measurement sweep")
    sp.add_argument("--n", type=int, required=True, help="number of spin-1/2 particles")
    sp.add_argument("--states", nargs="+", required=True,
                    help="product:theta=..  ghz  rdicke:k=..[,theta=..,phi=..]  decoghz:gamma=..")
    _add_sigma(sp, ["1", "200", "60"])
    sp.add_argument("--distance", choices=["bures", "relent"], default="bures")
    _add_output(sp)

    bp = sub.add_parser("boson-sweep", help="X-quadrature measurement sweep")
    bp.add_argument("--states", nargs="+", required=True, help="coherent:alpha=..  cat:alpha=..  fock:n=..")
    _add_sigma(bp, ["0.2", "50", "60"])
    bp.add_argument("--distance", choices=["bures", "relent"], default="bures")
    bp.add_argument("--cutoff", type=int, help="Fock cutoff (default: per state)")
    bp.add_argument("--grid-points", type=int, default=sweeps.boson.DEFAULT_POINTS)
    _add_output(bp)

    cp = sub.add_parser("bounds-compare", help="skew vs Fisher fidelity bounds on a decohered GHZ state")
    cp.add_argument("--n", type=int, default=100)
    cp.add_argument("--gamma", type=float, default=0.85)
    _add_sigma(cp, ["5", "200", "60"])
    _add_output(cp)

    dp = sub.add_parser("decoherence-check", help="compare the decoherence model with the measurement channel")
    dp.add_argument("--n", type=int, default=8, help="spins in the test system")
    dp.add_argument("--g", type=float, default=1.0)
    dp.add_argument("--t", type=float, default=1.0)
    dp.add_argument("--mu", type=float, help="environment width (direct mode)")
    dp.add_argument("--beta", type=float, help="inverse bath temperature (thermal mode)")
    dp.add_argument("--omega", type=float, help="bath frequency (thermal mode)")
    dp.add_argument("--seed", type=int, default=0)
    return parser


def _sigmas(parser, args):
    try:
        lo, hi = sweeps.parse_number(args.sigma[0]), sweeps.parse_number(args.sigma[1])
        pts = int(args.sigma[2])
        return sweeps.sigma_grid(lo, hi, pts, args.log)
    except (sweeps.SpecError, ValueError) as exc:
        parser.error(f"--sigma: {exc}")


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _config_echo(args) -> list[str]:
    keys = [k for k in sorted(vars(args)) if k not in ("out", "gnuplot")]
    parts = []
    for k in keys:
        v = getattr(args, k)
        parts.append(f"{k}={' '.join(map(str, v)) if isinstance(v, list) else v}")
    return ["macrocoh " + " ".join(parts)]


def _gnuplot(args, columns: tuple[int, int], ylabel: str):
    if not args.gnuplot:
        return
    x, y = columns
    script = (
        "set datafile separator ','\n"
        "set logscale x\n"
        "set xlabel 'sigma'\n"
        f"set ylabel '{ylabel}'\n"
        f"plot '{args.out}' using {x}:{y} skip 2 with lines title '{ylabel}'\n"
    )
    with open(args.out + ".gp", "w", newline="", encoding="utf-8") as fh:
        fh.write(script)


def _sweep(parser, args, system: str) -> int:
    kinds = sweeps.SPIN_KINDS if system == "spin" else sweeps.BOSON_KINDS
    try:
        specs = [sweeps.parse_state_spec(s, kinds) for s in args.states]
    except sweeps.SpecError as exc:
        parser.error(str(exc))
    if system == "spin" and args.n < 1:
        parser.error("--n must be positive")
    config = sweeps.SweepConfig(
        system=system,
        states=specs,
        sigmas=_sigmas(parser, args),
        distance=DistanceMeasure(args.distance),
        n=getattr(args, "n", None),
        cutoff=getattr(args, "cutoff", None),
        grid_points=getattr(args, "grid_points", sweeps.boson.DEFAULT_POINTS),
        seed=args.seed,
    )
    try:
        rows = sweeps.spin_sweep(config) if system == "spin" else sweeps.boson_sweep(config)
    except sweeps.SpecError as exc:
        parser.error(str(exc))
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    with _open_out(args.out) as fh:
        sweeps.write_csv(fh, sweeps.CSV_HEADER, map(sweeps.sweep_row_values, rows), _config_echo(args))
    _gnuplot(args, (2, 4), "M")
    try:
        for r in rows:
            r.check()
    except sweeps.BoundViolation as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _bounds(parser, args) -> int:
    try:
        rows, crossings = sweeps.bounds_compare(args.n, args.gamma, _sigmas(parser, args))
    except sweeps.SpecError as exc:
        parser.error(str(exc))
    footer = "crossing_sigma=" + (" ".join(sweeps.fmt(c) for c in crossings) if crossings else "none")
    with _open_out(args.out) as fh:
        sweeps.write_csv(fh, sweeps.BOUNDS_HEADER, map(sweeps.bounds_row_values, rows), _config_echo(args))
        fh.write(f"# {footer}\n")
    _gnuplot(args, (1, 2), "sqrt F")
    bad = [r for r in rows if max(r.b_w, r.b_f) > r.sqrt_f + sweeps.BOUND_ATOL]
    if bad:
        print(f"bound violation at sigma={bad[0].sigma!r}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _decoherence(parser, args) -> int:
    thermal = args.beta is not None or args.omega is not None
    if thermal and (args.beta is None or args.omega is None):
        parser.error("thermal mode needs both --beta and --omega")
    if thermal == (args.mu is not None):
        parser.error("give either --mu or --beta/--omega")
    if args.n < 1:
        parser.error("--n must be positive")
    try:
        if thermal:
            if args.t == 0:
                parser.error("thermal mode needs --t > 0")
            tb = ThermalBathParams(args.beta, args.omega, args.g, args.t)
            sigma = sigma_from_thermal(tb)
            # sigma = mu / (sqrt 2 g t) fixes the equivalent Gaussian width
            params = CouplingParams(args.g, args.t, sigma * math.sqrt(2.0) * args.g * args.t)
        else:
            params = CouplingParams(args.g, args.t, args.mu)
            sigma = params.effective_sigma
    except ValueError as exc:
        parser.error(str(exc))

    ens = SpinEnsemble(args.n)
    rho = DensityMatrix(random_density_matrix(ens.dim, seed=args.seed), ens.spectrum)
    decohered = np.asarray(decohere(rho, params))
    measured = np.asarray(rho) if math.isinf(sigma) else np.asarray(apply_channel(rho, sigma))
    deviation = float(np.max(np.abs(decohered - measured)))
    print(f"mode={'thermal' if thermal else 'direct'}")
    print(f"sigma={'inf' if math.isinf(sigma) else sweeps.fmt(sigma)}")
    print(f"mu={sweeps.fmt(params.mu)}")
    print(f"max_deviation={sweeps.fmt(deviation)}")
    if deviation > DECOHERENCE_ATOL:
        print("FAIL: decoherence and measurement channels disagree", file=sys.stderr)
        return EXIT_VALIDATION
    print("OK")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "gnuplot", False) and args.out is None:
        parser.error("--gnuplot needs --out")
    try:
        if args.command == "spin-sweep":
            return _sweep(parser, args, "spin")
        if args.command == "boson-sweep":
            return _sweep(parser, args, "boson")
        if args.command == "bounds-compare":
            return _bounds(parser, args)
        return _decoherence(parser, args)
    except sweeps.SpecError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
