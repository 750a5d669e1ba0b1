"""Config-driven command line for simulations and analysis.

Subcommands::

    hughes1d simulate-ftl      --config CFG [--out DIR]
    hughes1d simulate-godunov  --config CFG [--out DIR]
    hughes1d compare           --config CFG [--out DIR]
    hughes1d analyze           --config CFG
    hughes1d atomize           --config CFG [--out DIR]

``--config`` takes a path to an INI-style run file or the name of a
bundled experiment (``fig1`` .. ``fig8``).  All runs are deterministic:
the same configuration produces byte-identical CSV output.  Exit codes:
0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .analysis import align_series, compare_methods, total_variation
from .atomize import (ParticleConfiguration, atomize, atomize_count,
                      atomize_riemann)
from .density import PiecewiseConstantDensity
from .errors import ConfigError, Hughes1DError
from .ftl import IntegratorConfig, initial_state, integrate
from .godunov import run_godunov
from .model import ModelFunctions
from .series import SnapshotSeries
from .turning import (check_theorem2, cone_speed, critical_rho_max,
                      riemann_collision_indicator, riemann_initial_xi)

BUNDLED = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8")

_FLOAT_FMT = "%.17g"


@dataclass
class RunConfig:
    """Validated contents of one run file."""

    model: ModelFunctions
    segments: list[tuple[float, float, float]]
    initial: PiecewiseConstantDensity
    n_dyadic: int | None
    num_particles: int | None
    riemann_counts: tuple[int, int] | None
    num_cells: int
    t_end: float
    snapshot_count: int
    rel_tol: float
    abs_tol: float
    cfl: float
    crossing_policy: str
    out_dir: str
    prefix: str

    def particle_configuration(self) -> ParticleConfiguration:
        if self.riemann_counts is not None:
            (a, b, v_minus), (c, d, v_plus) = self.segments
            return atomize_riemann(v_minus, v_plus, *self.riemann_counts)
        if self.n_dyadic is not None:
            return atomize(self.initial, self.n_dyadic)
        return atomize_count(self.initial, self.num_particles)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                                snapshot_count=self.snapshot_count,
                                crossing_policy=self.crossing_policy)


def _parse_segments(raw: str) -> list[tuple[float, float, float]]:
    segments = []
    for line in raw.replace(";", "\n").splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise ConfigError(f"segment line needs 'left right value': {line!r}")
        try:
            segments.append(tuple(float(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"bad segment line {line!r}") from exc
    if not segments:
        raise ConfigError("initial datum has no segments")
    return segments


def _config_text(name_or_path: str) -> str:
    if name_or_path in BUNDLED:
        ref = resources.files("hughes1d").joinpath(f"configs/{name_or_path}.cfg")
        return ref.read_text()
    p = Path(name_or_path)
    if not p.exists():
        raise ConfigError(f"config {name_or_path!r} is neither a file nor one "
                          f"of the bundled names {', '.join(BUNDLED)}")
    return p.read_text()


def load_config(name_or_path: str) -> RunConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(_config_text(name_or_path))
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {name_or_path}: {exc}") from exc

    def get(section, key, cast, default=None):
        if not parser.has_option(section, key):
            if default is None:
                raise ConfigError(f"missing [{section}] {key}")
            return default
        raw = parser.get(section, key)
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc

    def coeffs(raw: str) -> tuple[float, ...]:
        return tuple(float(p) for p in raw.replace(",", " ").split())

    try:
        model = ModelFunctions(
            velocity_kind=get("model", "velocity", str, "linear"),
            cost_kind=get("model", "cost", str, "reciprocal"),
            rho_max=get("model", "rho_max", float, 0.99),
            velocity_coeffs=get("model", "velocity_coeffs", coeffs, ())
            or None,
            cost_coeffs=get("model", "cost_coeffs", coeffs, ()) or None,
        )
    except Hughes1DError as exc:
        raise ConfigError(f"invalid model: {exc}") from exc

    segments = _parse_segments(get("initial", "segments", str))
    for left, right, value in segments:
        if not -1.0 <= left < right <= 1.0:
            raise ConfigError(f"segment ({left}, {right}) outside [-1, 1]")
        if not 0.0 <= value <= model.rho_max:
            raise ConfigError(
                f"segment value {value} outside [0, rho_max={model.rho_max}]")
    try:
        initial = PiecewiseConstantDensity.from_segments(segments)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    n_dyadic = get("discretization", "n_dyadic", int, 0) or None
    num_particles = get("discretization", "num_particles", int, 0) or None
    n_minus = get("discretization", "riemann_n_minus", int, 0)
    n_plus = get("discretization", "riemann_n_plus", int, 0)
    riemann = (n_minus, n_plus) if (n_minus or n_plus) else None
    chosen = sum(x is not None for x in (n_dyadic, num_particles, riemann))
    if chosen != 1:
        raise ConfigError("choose exactly one of n_dyadic, num_particles or "
                          "riemann_n_minus/riemann_n_plus")
    if riemann is not None:
        if n_minus < 1 or n_plus < 1:
            raise ConfigError("riemann mode needs both particle counts")
        if (len(segments) != 2 or segments[0][:2] != (-1.0, 0.0)
                or segments[1][:2] != (0.0, 1.0)
                or not segments[0][2] < segments[1][2]):
            raise ConfigError("riemann mode needs segments -1 0 v_minus / "
                              "0 1 v_plus with v_minus < v_plus")

    t_end = get("time", "t_end", float)
    if t_end <= 0.0:
        raise ConfigError("t_end must be positive")
    snapshot_count = get("time", "snapshot_count", int, 21)
    if snapshot_count < 2:
        raise ConfigError("snapshot_count must be at least 2")

    policy = get("integrator", "crossing_policy", str, "switch")
    if policy not in ("switch", "halt"):
        raise ConfigError(f"unknown crossing policy {policy!r}")
    cfl = get("integrator", "cfl", float, 0.9)
    if not 0.0 < cfl <= 1.0:
        raise ConfigError("cfl must lie in (0, 1]")

    return RunConfig(
        model=model,
        segments=segments,
        initial=initial,
        n_dyadic=n_dyadic,
        num_particles=num_particles,
        riemann_counts=riemann,
        num_cells=get("discretization", "num_cells", int, 200),
        t_end=t_end,
        snapshot_count=snapshot_count,
        rel_tol=get("integrator", "rel_tol", float, 1e-6),
        abs_tol=get("integrator", "abs_tol", float, 1e-9),
        cfl=cfl,
        crossing_policy=policy,
        out_dir=get("output", "directory", str, "."),
        prefix=get("output", "prefix", str, ""),
    )


# -- CSV emission -----------------------------------------------------------

def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _out_path(out_dir: str, prefix: str, name: str) -> Path:
    stem = f"{prefix}_{name}" if prefix else name
    return Path(out_dir) / stem


def write_series(series: SnapshotSeries, out_dir: str, prefix: str) -> list[Path]:
    written = []

    snap = _out_path(out_dir, prefix, "snapshots.csv")
    rows = []
    for t, dens in zip(series.times, series.densities):
        for left, right, value in zip(dens.breakpoints[:-1],
                                      dens.breakpoints[1:], dens.values):
            rows.append((_fmt(t), _fmt(left), _fmt(right), _fmt(value)))
    _write_csv(snap, ["t", "x_left", "x_right", "density"], rows)
    written.append(snap)

    xi = _out_path(out_dir, prefix, "xi.csv")
    _write_csv(xi, ["t", "xi"],
               [(_fmt(t), _fmt(x)) for t, x in zip(series.times,
                                                   series.xi_history)])
    written.append(xi)

    if series.method == "ftl":
        ev = _out_path(out_dir, prefix, "events.csv")
        _write_csv(ev, ["t", "particle_index", "side", "xi", "relative_speed"],
                   [(_fmt(e.time), e.particle_index, e.side,
                     _fmt(e.xi_at_event), _fmt(e.relative_speed))
                    for e in series.events])
        written.append(ev)

        part = _out_path(out_dir, prefix, "particles.csv")
        rows = []
        for t, pos in zip(series.times, series.positions):
            rows.extend((_fmt(t), i, _fmt(x)) for i, x in enumerate(pos))
        _write_csv(part, ["t", "index", "position"], rows)
        written.append(part)
    return written


def run_ftl(config: RunConfig) -> SnapshotSeries:
    state = initial_state(config.model, config.particle_configuration())
    series, _ = integrate(config.model, state, config.t_end,
                          config.integrator())
    return series


def run_grid(config: RunConfig) -> SnapshotSeries:
    return run_godunov(config.model, config.initial, config.num_cells,
                       config.t_end, cfl=config.cfl,
                       snapshot_count=config.snapshot_count)


def cmd_simulate(config: RunConfig, method: str, out_dir: str) -> int:
    series = run_ftl(config) if method == "ftl" else run_grid(config)
    for path in write_series(series, out_dir, config.prefix):
        print(path)
    return 0


def cmd_compare(config: RunConfig, out_dir: str) -> int:
    ftl_series = run_ftl(config)
    god_series = run_grid(config)
    ftl_series, god_series = align_series(ftl_series, god_series)
    report = compare_methods(ftl_series, god_series)
    path = _out_path(out_dir, config.prefix, "comparison.csv")
    _write_csv(path, ["t", "l1_density", "xi_ftl", "xi_godunov", "abs_xi_diff"],
               [(_fmt(t), _fmt(l1), _fmt(xa), _fmt(xb), _fmt(abs(xa - xb)))
                for t, l1, xa, xb in zip(report.times, report.l1_density,
                                         report.xi_first, report.xi_second)])
    print(path)
    return 0


def cmd_atomize(config: RunConfig, out_dir: str) -> int:
    particles = config.particle_configuration()
    path = _out_path(out_dir, config.prefix, "particles.csv")
    _write_csv(path, ["index", "position"],
               [(i, _fmt(x)) for i, x in enumerate(particles.positions)])
    print(path)
    return 0


def cmd_analyze(config: RunConfig) -> int:
    m = config.model
    tv = total_variation(config.initial)
    d = m.derived_constants()
    q = cone_speed(m, tv)
    print(f"model: velocity={m.velocity_kind} cost={m.cost_kind} "
          f"rho_max={_fmt(m.rho_max)} v_max={_fmt(m.v_max)} "
          f"rho_hat={_fmt(m.rho_hat)}")
    print(f"TV(initial) = {_fmt(tv)}")
    print(f"L = {_fmt(d.lipschitz_L)}")
    print(f"C = {_fmt(d.big_C)}")
    print(f"Q = {_fmt(q)}")
    if m.rho_max < 1.0:
        ok, margin = check_theorem2(m, tv)
        verdict = "satisfied" if ok else "violated"
        print(f"smallness condition: {verdict} (margin = {_fmt(margin)})")
    else:
        print("smallness condition: not applicable (rho_max = 1)")
    crit = critical_rho_max(m)
    if crit is None:
        print("critical rho_max: none (condition holds for every rho_max < 1)")
    else:
        print(f"critical rho_max = {_fmt(crit)}")

    segs = config.segments
    if (len(segs) == 2 and segs[0][:2] == (-1.0, 0.0)
            and segs[1][:2] == (0.0, 1.0) and segs[0][2] < segs[1][2]):
        v_minus, v_plus = segs[0][2], segs[1][2]
        xi0 = riemann_initial_xi(m, v_minus, v_plus)
        indicator = riemann_collision_indicator(m, v_minus, v_plus)
        xi_dot = 0.5 * (indicator - 2.0 * m.velocity(v_plus))
        outcome = "no collision" if indicator > 0 else "collision predicted"
        print(f"riemann datum ({_fmt(v_minus)}, {_fmt(v_plus)}):")
        print(f"  xi_bar = {_fmt(xi0)}")
        print(f"  xi_dot(0) = {_fmt(xi_dot)}")
        print(f"  F = {_fmt(indicator)} ({outcome})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hughes1d",
        description="Two-exit pedestrian flow: particle and Godunov solvers")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_out in [("simulate-ftl", True), ("simulate-godunov", True),
                            ("compare", True), ("analyze", False),
                            ("atomize", True)]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="path to a run file or a bundled name "
                            f"({', '.join(BUNDLED)})")
        if needs_out:
            p.add_argument("--out", default=None,
                           help="output directory (default: config value)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    out_dir = getattr(args, "out", None) or config.out_dir
    try:
        if args.command == "simulate-ftl":
            return cmd_simulate(config, "ftl", out_dir)
        if args.command == "simulate-godunov":
            return cmd_simulate(config, "godunov", out_dir)
        if args.command == "compare":
            return cmd_compare(config, out_dir)
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command == "atomize":
            return cmd_atomize(config, out_dir)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (Hughes1DError, ValueError, OSError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
