"""Sigma sweeps over labelled states, producing self-describing CSV rows."""

from __future__ import annotations

import ast
import csv
import math
import operator
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import boson, info, numerics, spin
from .core import DensityMatrix, DistanceMeasure, apply_channel, measure_M, pure_state_measure

CSV_HEADER = ["state", "sigma", "measure", "M", "I_W", "I_F_or_4Var", "bound_M_w", "bound_M_f"]
BOUNDS_HEADER = ["sigma", "sqrt_F", "B_W", "B_F", "B_pure"]
BOUND_ATOL = 1e-8

SPIN_KINDS = {"product": {"theta"}, "ghz": set(), "rdicke": {"k", "theta", "phi"}, "decoghz": {"gamma"}}
BOSON_KINDS = {"coherent": {"alpha"}, "cat": {"alpha"}, "fock": {"n"}}


class SpecError(ValueError):
    """Malformed state spec or sweep flag."""


class BoundViolation(RuntimeError):
    """A computed measure exceeds one of its proven upper bounds."""


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
           ast.Pow: operator.pow}


def parse_number(text: str) -> float:
    """Parse a literal such as ``0.3``, ``pi/4`` or ``3*pi/8``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise SpecError(f"not a number: {text!r}")
    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise SpecError(f"not a number: {text!r}") from exc


@dataclass(frozen=True)
class StateSpec:
    label: str
    kind: str
    params: dict = field(default_factory=dict, hash=False, compare=False)


def parse_state_spec(text: str, kinds: dict[str, set[str]]) -> StateSpec:
    """``kind[:key=value[,key=value...]]`` against the allowed kinds and keys."""
    kind, _, rest = text.partition(":")
    if kind not in kinds:
        raise SpecError(f"unknown state kind {kind!r} in {text!r}; expected one of {sorted(kinds)}")
    params = {}
    if rest:
        for token in rest.split(","):
            key, eq, value = token.partition("=")
            if not eq or key not in kinds[kind]:
                raise SpecError(f"bad parameter {token!r} in state spec {text!r}")
            params[key] = parse_number(value)
    return StateSpec(text, kind, params)


def sigma_grid(lo: float, hi: float, points: int, log: bool = True) -> np.ndarray:
    if not lo > 0:
        raise SpecError(f"sigma minimum must be positive, got {lo}")
    if hi < lo:
        raise SpecError(f"sigma maximum {hi} below minimum {lo}")
    if points < 1:
        raise SpecError(f"need at least one sigma point, got {points}")
    if points == 1 or lo == hi:
        return np.full(points, float(lo))
    return np.geomspace(lo, hi, points) if log else np.linspace(lo, hi, points)


@dataclass
class SweepConfig:
    system: str
    states: list[StateSpec]
    sigmas: np.ndarray
    distance: DistanceMeasure = DistanceMeasure.BURES
    n: int | None = None
    cutoff: int | None = None
    grid_points: int = boson.DEFAULT_POINTS
    seed: int = 0
    emit_bounds: bool = True


@dataclass(frozen=True)
class SweepRow:
    state: str
    sigma: float
    measure: str
    M: float
    i_w: float
    i_f_or_4var: float
    bound_M_w: float | None
    bound_M_f: float | None

    def check(self, atol: float = BOUND_ATOL):
        for name in ("bound_M_w", "bound_M_f"):
            b = getattr(self, name)
            if b is not None and self.M > b + atol:
                raise BoundViolation(f"{self.state} at sigma={self.sigma!r}: M={self.M!r} exceeds {name}={b!r}")


def _threads() -> int | None:
    raw = os.environ.get("MACROCOH_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise SpecError(f"MACROCOH_THREADS must be an integer, got {raw!r}") from None
    return None if n <= 0 else n


def _run_points(jobs: list[tuple[int, float, Callable[[], SweepRow]]]) -> list[SweepRow]:
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = [(i, s, pool.submit(fn)) for i, s, fn in jobs]
        done = [(i, s, f.result()) for i, s, f in futures]
    done.sort(key=lambda item: (item[0], item[1]))
    return [row for _, _, row in done]


@dataclass
class _Prepared:
    label: str
    pure: np.ndarray | None
    rho: DensityMatrix | None
    i_w: float
    i_f_or_4var: float


def _bounds(prep: _Prepared, sigma: float, distance: DistanceMeasure):
    if distance is not DistanceMeasure.BURES:
        return None, None
    if prep.pure is not None:
        bw = info.bound_w_pure(prep.i_w, sigma)
    else:
        bw = info.bound_w(prep.i_w, sigma)
    bf = info.bound_f(prep.i_f_or_4var, sigma)
    return 2.0 * (1.0 - bw), 2.0 * (1.0 - bf)


def prepare_spin_state(spec: StateSpec, ens: spin.SpinEnsemble) -> _Prepared:
    p = spec.params
    if spec.kind == "product":
        amp = spin.product_state(ens, p.get("theta", math.pi / 4))
    elif spec.kind == "ghz":
        amp = spin.ghz_state(ens)
    elif spec.kind == "rdicke":
        k = p.get("k", ens.n // 2)
        if k != int(k) or not 0 <= k <= ens.n:
            raise SpecError(f"rdicke excitation k must be an integer in [0, {ens.n}], got {k}")
        amp = spin.rotated_dicke(ens, int(k), p.get("theta", math.pi / 2), p.get("phi", 0.0))
    else:
        gamma = p.get("gamma", 1.0)
        if not 0 <= gamma <= 1:
            raise SpecError(f"decoghz gamma must lie in [0, 1], got {gamma}")
        rho = spin.decohered_ghz(ens, gamma)
        return _Prepared(spec.label, None, rho, info.skew_information(rho), info.fisher_information(rho))
    amp = amp / np.linalg.norm(amp)
    var = info.variance(amp, ens.spectrum)
    return _Prepared(spec.label, amp, None, var, 4.0 * var)


def spin_sweep(config: SweepConfig) -> list[SweepRow]:
    ens = spin.SpinEnsemble(config.n)
    preps = [prepare_spin_state(s, ens) for s in config.states]
    d = config.distance

    def point(prep, sigma):
        if prep.pure is not None and d is DistanceMeasure.BURES:
            m = pure_state_measure(prep.pure, ens.spectrum, sigma)
        else:
            rho = prep.rho if prep.rho is not None else DensityMatrix.from_pure(prep.pure, ens.spectrum)
            m = measure_M(rho, sigma, d)
        bw, bf = _bounds(prep, sigma, d) if config.emit_bounds else (None, None)
        return SweepRow(prep.label, float(sigma), d.value, m, prep.i_w, prep.i_f_or_4var, bw, bf)

    jobs = [(i, float(s), (lambda p=prep, s=float(s): point(p, s)))
            for i, prep in enumerate(preps) for s in config.sigmas]
    return _run_points(jobs)


def prepare_boson_state(spec: StateSpec, cutoff: int | None) -> _Prepared:
    p = spec.params
    if spec.kind == "fock":
        n = p.get("n", 0)
        if n != int(n) or n < 0:
            raise SpecError(f"fock level must be a non-negative integer, got {n}")
        need = int(n) + 1
    else:
        alpha = p.get("alpha", 0.0)
        if spec.kind == "cat" and not alpha > 0:
            raise SpecError(f"cat amplitude must be positive, got {alpha}")
        need = boson.required_cutoff(alpha)
    fs = boson.FockSpace(cutoff if cutoff is not None else need)
    try:
        if spec.kind == "fock":
            amp = boson.fock_state(fs, int(n))
        elif spec.kind == "cat":
            amp = boson.cat_state(fs, alpha)
        else:
            amp = boson.coherent_state(fs, alpha)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    _, var = boson.quadrature_moments(amp)
    return _Prepared(spec.label, amp, None, var, 4.0 * var)


def boson_sweep(config: SweepConfig) -> list[SweepRow]:
    preps = [prepare_boson_state(s, config.cutoff) for s in config.states]
    d = config.distance

    def point(prep, sigma):
        grid = boson.default_grid(prep.pure, config.grid_points)
        m = boson.quadrature_measure_M(prep.pure, grid, sigma, d, check_convergence=d is DistanceMeasure.BURES)
        bw, bf = _bounds(prep, sigma, d) if config.emit_bounds else (None, None)
        return SweepRow(prep.label, float(sigma), d.value, m, prep.i_w, prep.i_f_or_4var, bw, bf)

    jobs = [(i, float(s), (lambda p=prep, s=float(s): point(p, s)))
            for i, prep in enumerate(preps) for s in config.sigmas]
    return _run_points(jobs)


@dataclass(frozen=True)
class BoundsRow:
    sigma: float
    sqrt_f: float
    b_w: float
    b_f: float
    b_pure: float | None


def bounds_compare(n: int, gamma: float, sigmas: Iterable[float]) -> tuple[list[BoundsRow], list[float]]:
    """Exact ``sqrt F`` and both lower bounds for the decohered GHZ state."""
    if n < 2:
        raise SpecError(f"bounds comparison needs N >= 2, got {n}")
    if not 0 <= gamma <= 1:
        raise SpecError(f"gamma must lie in [0, 1], got {gamma}")
    ens = spin.SpinEnsemble(n)
    rho = spin.decohered_ghz(ens, gamma)
    i_w = info.skew_information(rho)
    i_f = info.fisher_information(rho)
    var = None
    if gamma == 1:
        var = info.variance(spin.ghz_state(ens), ens.spectrum)
    rows = []
    for s in sigmas:
        sqrt_f = math.sqrt(numerics.fidelity(rho, apply_channel(rho, float(s))))
        rows.append(BoundsRow(float(s), sqrt_f, info.bound_w(i_w, s), info.bound_f(i_f, s),
                              None if var is None else info.bound_w_pure(var, s)))
    crossings = info.bound_crossings([r.sigma for r in rows], [r.b_w for r in rows], [r.b_f for r in rows])
    return rows, crossings


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def write_csv(fh, header: list[str], rows: Iterable[Iterable], comments: Iterable[str] = ()):
    """Write ``#`` comment lines, a header and rows with '\\n' line endings."""
    for c in comments:
        fh.write(f"# {c}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def sweep_row_values(r: SweepRow) -> list:
    return [r.state, r.sigma, r.measure, r.M, r.i_w, r.i_f_or_4var, r.bound_M_w, r.bound_M_f]


def bounds_row_values(r: BoundsRow) -> list:
    return [r.sigma, r.sqrt_f, r.b_w, r.b_f, r.b_pure]
