"""
Scattering data for the inverse problem and the function Y(q) built from it.

``Y(q) = 1 - S(q) - i * sum_j M_j**2 / (q - i*kappa_j)``

Inside the sampled range, Re S and Im S are each interpolated by a C1
quadratic spline. Beyond the last sample, ``S(q) = exp(-2iA/q)`` with ``A``
chosen so that the tail meets the last sample.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .forward import BoundState, PhaseShiftTable, tail_constant
from .numerics import QuadraticSpline, fit_quadratic_spline

UNITARITY_TOL = 1e-9


class ScatteringDataError(ValueError):
    """Invalid scattering data; ``line`` is the 1-based file line when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class ScatteringData:
    """S-matrix samples ``s[i] = S(q[i])`` plus bound states.

    ``q_edge`` is the largest sampled momentum; ``A`` is the tail constant.
    When ``A`` is omitted it is matched to the sample at ``q_edge``.
    """

    q: np.ndarray
    s: np.ndarray
    bound_states: tuple[BoundState, ...] = ()
    A: float | None = None
    q_edge: float = field(init=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        s = np.asarray(self.s, dtype=complex)
        if q.ndim != 1 or q.shape != s.shape or q.size == 0:
            raise ScatteringDataError("q and S must be non-empty 1-D arrays of equal length")
        if q[0] <= 0 or np.any(np.diff(q) <= 0):
            raise ScatteringDataError("q must be positive and strictly increasing")
        dev = np.abs(np.abs(s) - 1)
        if np.any(dev > UNITARITY_TOL):
            i = int(np.argmax(dev))
            raise ScatteringDataError(f"|S| = {abs(s[i])!r} at q = {q[i]!r} is not unitary")
        kappas = [b.kappa for b in self.bound_states]
        if len(set(kappas)) != len(kappas):
            raise ScatteringDataError("bound-state kappas must be distinct")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "bound_states", tuple(self.bound_states))
        object.__setattr__(self, "q_edge", float(q[-1]))
        if self.A is None:
            object.__setattr__(self, "A", tail_constant(self.q_edge, s[-1]))
        else:
            object.__setattr__(self, "A", float(self.A))

    @classmethod
    def from_table(cls, table: PhaseShiftTable, bound_states: Iterable[BoundState] = ()):
        return cls(table.q, table.s, tuple(bound_states))


@dataclass(frozen=True)
class YEvaluator:
    """Callable ``Y(q)`` for ``q > 0``; see the module docstring."""

    re_s: QuadraticSpline
    im_s: QuadraticSpline
    A: float
    bound_states: tuple[BoundState, ...]

    @property
    def q_edge(self) -> float:
        return self.re_s.domain[1]

    @property
    def breakpoints(self) -> np.ndarray:
        """Momenta where Y is not infinitely differentiable (spline knots)."""
        return self.re_s.knots

    def s(self, q):
        """Interpolated S-matrix (spline inside, analytic tail outside)."""
        q = np.asarray(q, dtype=float)
        if np.any(q <= 0):
            raise ValueError("Y is only evaluated at q > 0")
        inside = q <= self.q_edge
        out = np.empty(q.shape, dtype=complex)
        qi = q[inside]
        out[inside] = (self.re_s(qi, extrapolate_left=True)
                       + 1j * self.im_s(qi, extrapolate_left=True))
        out[~inside] = np.exp(-2j * self.A / q[~inside])
        return out if out.ndim else complex(out)

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        y = 1 - np.asarray(self.s(q))
        for b in self.bound_states:
            y = y - 1j * b.M**2 / (q - 1j * b.kappa)
        return y if y.ndim else complex(y)


def build_y_evaluator(data: ScatteringData) -> YEvaluator:
    if data.q.size < 3:
        raise ScatteringDataError(f"need at least 3 S samples, got {data.q.size}")
    return YEvaluator(fit_quadratic_spline(data.q, data.s.real),
                      fit_quadratic_spline(data.q, data.s.imag),
                      data.A, data.bound_states)


def y_at(evaluator: YEvaluator, q: float) -> complex:
    return evaluator(q)


# =============================================================================
# CSV I/O
# =============================================================================

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_scattering_csv(data: ScatteringData, path: str | os.PathLike) -> None:
    """Write ``q,re_s,im_s`` rows, a ``# bound_states`` section and a metadata line."""
    lines = ["q,re_s,im_s"]
    lines += [f"{_fmt(q)},{_fmt(s.real)},{_fmt(s.imag)}" for q, s in zip(data.q, data.s)]
    if data.bound_states:
        lines += ["# bound_states", "kappa,M"]
        lines += [f"{_fmt(b.kappa)},{_fmt(b.M)}" for b in data.bound_states]
    lines.append(f"# q_edge={_fmt(data.q_edge)} A={_fmt(data.A)}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _floats(text: str, count: int, lineno: int) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise ScatteringDataError(f"expected {count} comma-separated values, got {len(parts)}", lineno)
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ScatteringDataError(f"non-numeric value in {text.strip()!r}", lineno) from None
    if not all(np.isfinite(values)):
        raise ScatteringDataError("non-finite value", lineno)
    return values


def load_scattering_csv(path: str | os.PathLike) -> ScatteringData:
    """Read a file written by :func:`save_scattering_csv`, validating every row."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0].strip().replace(" ", "") != "q,re_s,im_s":
        raise ScatteringDataError("missing header 'q,re_s,im_s'", 1)

    q, s, states, meta = [], [], [], {}
    section = "samples"
    for lineno, line in enumerate(raw[1:], start=2):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            body = text[1:].strip()
            if body == "bound_states":
                section = "bound"
                continue
            for item in body.split():
                key, sep, value = item.partition("=")
                if not sep:
                    raise ScatteringDataError(f"unrecognised comment {text!r}", lineno)
                try:
                    meta[key] = float(value)
                except ValueError:
                    raise ScatteringDataError(f"bad metadata value {item!r}", lineno) from None
            continue
        if section == "bound":
            if text.replace(" ", "") == "kappa,M":
                continue
            kappa, m = _floats(text, 2, lineno)
            if not (kappa > 0 and m > 0):
                raise ScatteringDataError("bound state needs kappa > 0 and M > 0", lineno)
            states.append(BoundState(kappa, m))
            continue
        qi, re, im = _floats(text, 3, lineno)
        if qi <= 0:
            raise ScatteringDataError(f"q must be positive, got {qi!r}", lineno)
        if q and qi <= q[-1]:
            raise ScatteringDataError(f"q = {qi!r} does not increase (previous {q[-1]!r})", lineno)
        if abs(abs(complex(re, im)) - 1) > UNITARITY_TOL:
            raise ScatteringDataError(f"|S| = {abs(complex(re, im))!r} is not unitary", lineno)
        q.append(qi)
        s.append(complex(re, im))

    if not q:
        raise ScatteringDataError("no S-matrix samples")
    if "q_edge" in meta and not np.isclose(meta["q_edge"], q[-1], rtol=1e-12, atol=0):
        raise ScatteringDataError(f"q_edge={meta['q_edge']!r} differs from last sample {q[-1]!r}")
    return ScatteringData(np.array(q), np.array(s), tuple(states), meta.get("A"))


def save_phase_csv(table: PhaseShiftTable, path: str | os.PathLike) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("q,delta\n")
        for q, d in zip(table.q, table.delta):
            fh.write(f"{_fmt(q)},{_fmt(d)}\n")


def write_columns(path: str | os.PathLike, header: Sequence[str], columns: Sequence[Sequence[float]]) -> None:
    """Headered CSV of equal-length numeric columns, 17 significant digits."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(x) for x in row) + "\n")
