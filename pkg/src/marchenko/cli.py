"""
Command-line driver: forward data generation, inversion, round trips.

    marchenko forward   --potential exp --depth 3 --rate 1.5 --out run/
    marchenko invert    run/scattering.csv --h 0.04 --R 4 --out inv/
    marchenko roundtrip --potential exp --depth 3 --rate 1.5 --out rt/
    marchenko kernel    run/scattering.csv --out kern/

Settings come from (highest first) command-line flags, a flat ``key = value``
file given with ``--config``, and built-in defaults. Every run writes a
``config.txt`` snapshot in the same format.

Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import (ScatteringData, ScatteringDataError, build_y_evaluator,
                   load_scattering_csv, save_phase_csv, save_scattering_csv, write_columns)
from .forward import (Potential, exponential_potential, find_bound_states, s_matrix_table,
                      square_well, tabulated_potential, zero_potential)
from .kernel import recover_with_residual
from .numerics import QuadratureError, SingularSystemError
from .solver import (assemble_p_system, build_kernel_matrix, extract_potential,
                     marchenko_residual, solve_all)

log = logging.getLogger("marchenko")

COND_WARN = 1e8


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    h: float = 0.04
    R: float = 4.0
    q_edge: float = 8.0
    q_points: int = 40
    step: float = 1e-3
    window: tuple[float, float] = (0.2, 3.0)
    out: str = "."
    potential: str = "exp"
    depth: float = 3.0
    rate: float = 1.5
    radius: float = 1.0
    table: str = ""

    def __post_init__(self):
        self.h, self.R, self.q_edge, self.step = map(float, (self.h, self.R, self.q_edge, self.step))
        self.q_points = int(self.q_points)
        self.window = tuple(float(x) for x in self.window)
        if not (self.h > 0 and self.R > 0 and self.q_edge > 0 and self.step > 0):
            raise ConfigError("h, R, q_edge and step must be positive")
        if abs(self.R / self.h - round(self.R / self.h)) > 1e-9 * max(1.0, self.R / self.h):
            raise ConfigError(f"R/h = {self.R / self.h} is not an integer")
        if self.N < 2:
            raise ConfigError("R/h must be at least 2")
        if self.q_points < 3:
            raise ConfigError("q_points must be at least 3")
        if len(self.window) != 2 or not self.window[0] < self.window[1]:
            raise ConfigError(f"bad window {self.window}")
        if self.potential not in ("exp", "well", "table", "zero"):
            raise ConfigError(f"unknown potential {self.potential!r}")

    @property
    def N(self) -> int:
        return round(self.R / self.h)

    @property
    def q_grid(self) -> np.ndarray:
        return self.q_edge * np.arange(1, self.q_points + 1) / self.q_points

    def potential_object(self) -> Potential:
        if self.potential == "exp":
            return exponential_potential(self.depth, self.rate)
        if self.potential == "well":
            return square_well(self.depth, self.radius)
        if self.potential == "zero":
            return zero_potential()
        if not self.table:
            raise ConfigError("potential 'table' needs --table FILE")
        r, v = _read_table(self.table)
        return tabulated_potential(r, v)

    def dump(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(repr(x) for x in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


def _read_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read potential table {path}: {exc}") from None
    if rows.shape[1] != 2:
        raise ConfigError(f"potential table {path} must have columns r,V")
    return rows[:, 0], rows[:, 1]


def read_config_file(path: str) -> dict:
    names = {f.name for f in dataclasses.fields(RunConfig)}
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in names:
            raise ConfigError(f"{path}:{lineno}: cannot parse {line!r}")
        value = value.strip()
        values[key] = tuple(value.split(",")) if key == "window" else value
    return values


def _make_config(args) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for f in dataclasses.fields(RunConfig):
        cli_value = getattr(args, f.name, None)
        if cli_value is not None:
            values[f.name] = cli_value
    try:
        for key in ("depth", "rate", "radius"):
            if key in values:
                values[key] = float(values[key])
        return RunConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _prepare_out(config: RunConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(config.dump())
    return out


# =============================================================================
# Commands
# =============================================================================

def cmd_forward(config: RunConfig) -> ScatteringData:
    out = _prepare_out(config)
    potential = config.potential_object()
    table = s_matrix_table(potential, config.q_grid, step=config.step)
    states = find_bound_states(potential, step=config.step)
    data = ScatteringData.from_table(table, states)
    save_scattering_csv(data, out / "scattering.csv")
    save_phase_csv(table, out / "phase_shifts.csv")
    log.info("forward: %d samples, %d bound states, A = %.6g", len(table), len(states), data.A)
    return data


def _invert_data(config: RunConfig, data: ScatteringData):
    y = build_y_evaluator(data)
    coeffs, consistency = recover_with_residual(y, config.h, config.N)
    kernel = build_kernel_matrix(coeffs)
    solution = solve_all(kernel)
    potential = extract_potential(solution)
    return coeffs, kernel, solution, potential, consistency


def cmd_invert(config: RunConfig, scattering_csv: str | Path, dump_solution: bool = False):
    data = load_scattering_csv(scattering_csv)
    out = _prepare_out(config)
    coeffs, kernel, solution, potential, consistency = _invert_data(config, data)
    potential.to_csv(out / "potential.csv")
    if dump_solution:
        solution.to_csv(out / "solution.csv")

    conds = [np.linalg.cond(assemble_p_system(kernel, p).matrix) for p in range(kernel.N + 1)]
    lines = [
        f"h = {config.h!r}",
        f"N = {config.N}",
        f"q_edge = {data.q_edge!r}",
        f"A = {data.A!r}",
        f"bound_states = {len(data.bound_states)}",
        f"consistency_residual = {float(consistency)!r}",
        f"marchenko_residual = {float(marchenko_residual(solution, kernel))!r}",
        f"max_condition = {float(max(conds))!r}",
    ]
    lines += [f"warning_p{p} = condition {c:.3e}" for p, c in enumerate(conds) if c > COND_WARN]
    (out / "diagnostics.txt").write_text("\n".join(lines) + "\n")
    return potential


def window_errors(r, v_input, v_rec, window) -> tuple[float, float]:
    """Max-abs and relative-L2 error over grid points with ``window[0] <= r <= window[1]``."""
    r = np.asarray(r)
    inside = (r >= window[0] - 1e-12) & (r <= window[1] + 1e-12)
    diff = np.asarray(v_rec)[inside] - np.asarray(v_input)[inside]
    max_abs = float(np.max(np.abs(diff))) if diff.size else 0.0
    scale = float(np.linalg.norm(np.asarray(v_input)[inside]))
    rel = float(np.linalg.norm(diff)) / scale if scale > 0 else float(np.linalg.norm(diff))
    return max_abs, rel


def cmd_roundtrip(config: RunConfig):
    out = _prepare_out(config)
    with tempfile.TemporaryDirectory() as tmp:
        work = dataclasses.replace(config, out=tmp)
        cmd_forward(work)
        potential = cmd_invert(work, Path(tmp) / "scattering.csv")
        diagnostics = (Path(tmp) / "diagnostics.txt").read_text()
    r = potential.r
    v_input = config.potential_object()(r)
    write_columns(out / "comparison.csv", ["r", "V_input", "V_reconstructed"],
                  [r, v_input, potential.values])
    max_abs, rel = window_errors(r, v_input, potential.values, config.window)
    metrics = f"max_abs_error = {max_abs!r}\nrel_l2_error = {rel!r}\n"
    (out / "diagnostics.txt").write_text(diagnostics + metrics)
    print(f"window [{config.window[0]}, {config.window[1]}]: "
          f"max_abs_error = {max_abs:.6g}, rel_l2_error = {rel:.6g}")
    return max_abs, rel


def cmd_kernel(config: RunConfig, scattering_csv: str | Path):
    data = load_scattering_csv(scattering_csv)
    out = _prepare_out(config)
    coeffs, _ = recover_with_residual(build_y_evaluator(data), config.h, config.N)
    coeffs.to_csv(out / "kernel.csv")
    return coeffs


# =============================================================================
# Argument parsing
# =============================================================================

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--h", type=float, help="basis step (default 0.04)")
    common.add_argument("--R", type=float, help="potential range; R/h must be integral (default 4)")
    common.add_argument("--q-edge", dest="q_edge", type=float, help="last sampled momentum (default 8)")
    common.add_argument("--q-points", dest="q_points", type=int, help="uniform samples on (0, q_edge] (default 40)")
    common.add_argument("--step", type=float, help="forward integration step (default 0.001)")
    common.add_argument("--window", type=float, nargs=2, metavar=("R_LO", "R_HI"),
                        help="comparison window (default 0.2 3.0)")
    common.add_argument("--out", help="output directory (default .)")
    common.add_argument("-v", "--verbose", action="store_true")

    pot = argparse.ArgumentParser(add_help=False)
    pot.add_argument("--potential", choices=["exp", "well", "table", "zero"],
                     help="exp: -depth*exp(-rate*r); well: -depth for r<radius; table: CSV r,V")
    pot.add_argument("--depth", type=float)
    pot.add_argument("--rate", type=float)
    pot.add_argument("--radius", type=float)
    pot.add_argument("--table", help="CSV with header r,V")

    parser = _Parser(prog="marchenko", description="Algebraic Marchenko inversion for s-wave scattering.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("forward", parents=[common, pot], help="compute S(q), phase shifts and bound states")
    p = sub.add_parser("invert", parents=[common], help="reconstruct V(r) from a scattering CSV")
    p.add_argument("scattering", help="scattering CSV (q,re_s,im_s)")
    p.add_argument("--dump-solution", action="store_true", help="also write solution.csv")
    sub.add_parser("roundtrip", parents=[common, pot], help="forward then invert, report errors")
    p = sub.add_parser("kernel", parents=[common], help="write the kernel coefficients F0k")
    p.add_argument("scattering", help="scattering CSV (q,re_s,im_s)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        config = _make_config(args)
        if args.command == "forward":
            cmd_forward(config)
        elif args.command == "invert":
            cmd_invert(config, args.scattering, args.dump_solution)
        elif args.command == "roundtrip":
            cmd_roundtrip(config)
        elif args.command == "kernel":
            cmd_kernel(config, args.scattering)
    except (ScatteringDataError, ConfigError, FileNotFoundError) as exc:
        print(f"marchenko: error: {exc}", file=sys.stderr)
        return 1
    except (SingularSystemError, QuadratureError, FloatingPointError, ArithmeticError) as exc:
        print(f"marchenko: numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"marchenko: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
