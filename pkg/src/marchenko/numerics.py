"""
Numerical primitives shared by the forward and inverse solvers.

Contents
--------
- composite Simpson quadrature with a panel width tied to the oscillation
  rate of the integrand, refined by grid doubling;
- a C1 quadratic interpolating spline;
- a pivoted dense linear solve with an explicit singularity check;
- second-order finite differences on a uniform grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

TOL_QUAD = 1e-9
MAX_PHASE_PER_PANEL = math.pi / 8


class QuadratureError(ArithmeticError):
    """Raised when an integrand is not finite or refinement does not converge."""


class SingularSystemError(np.linalg.LinAlgError):
    """Raised by :func:`solve_dense` for a numerically singular matrix.

    ``index`` is the elimination step whose pivot fell below threshold.
    """

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


# =============================================================================
# Quadrature
# =============================================================================

def _segments(a: float, b: float, breakpoints: Sequence[float] | None) -> np.ndarray:
    edges = [a, b]
    if breakpoints is not None:
        edges += [float(x) for x in breakpoints if a < x < b]
    return np.unique(np.asarray(edges, dtype=float))


def simpson_grid(a: float, b: float, width: float,
                 breakpoints: Sequence[float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Simpson on ``[a, b]``.

    Every segment between consecutive breakpoints gets an even number of
    panels no wider than ``width``. Breakpoints are always nodes, so a
    piecewise-smooth integrand keeps the full fourth-order rate.
    """
    edges = _segments(a, b, breakpoints)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(2, math.ceil((hi - lo) / width))
        n += n % 2
        x = np.linspace(lo, hi, n + 1)
        w = np.full(n + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= (hi - lo) / (3 * n)
        if nodes:
            # shared endpoint with the previous segment
            weights[-1][-1] += w[0]
            x, w = x[1:], w[1:]
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def initial_panel_width(a: float, b: float, omega: float) -> float:
    """Widest panel whose phase advance stays below ``MAX_PHASE_PER_PANEL``."""
    width = (b - a) / 2
    if omega != 0:
        width = min(width, MAX_PHASE_PER_PANEL / abs(omega))
    return width


def _check_finite(q: np.ndarray, values: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise QuadratureError(f"integrand is not finite at q = {q[bad][0]!r}")


def integrate_oscillatory(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                          omega: float, tol: float = TOL_QUAD,
                          breakpoints: Sequence[float] | None = None,
                          max_nodes: int = 1 << 23) -> float:
    """Integrate a real, possibly oscillatory integrand over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand; receives an array of abscissae.
    a, b : float
        Integration limits, ``a < b``.
    omega : float
        Phase rate of the oscillating factor inside ``f``. Sets the starting
        panel width so the phase advance per panel is at most pi/8.
    tol : float
        Absolute tolerance. The panel width is halved until two successive
        results differ by at most ``tol``.
    breakpoints : sequence of float, optional
        Abscissae where ``f`` is not smooth (spline knots, seams).

    Returns
    -------
    float
        The integral at the finest grid used.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    width = initial_panel_width(a, b, omega)

    def simpson(width):
        q, w = simpson_grid(a, b, width, breakpoints)
        values = np.asarray(f(q), dtype=float)
        _check_finite(q, values)
        return float(np.dot(w, values)), q.size

    previous, _ = simpson(width)
    while True:
        width /= 2
        current, n = simpson(width)
        if abs(current - previous) <= tol:
            return current
        if n > max_nodes:
            raise QuadratureError(
                f"no convergence to {tol:g} with {n} nodes "
                f"(last change {abs(current - previous):.3g})")
        previous = current


# =============================================================================
# Quadratic spline
# =============================================================================

@dataclass(frozen=True)
class QuadraticSpline:
    """C1 piecewise quadratic through ``(knots[i], values[i])``.

    On ``[knots[i], knots[i+1]]`` the spline is
    ``values[i] + slopes[i]*t + curvatures[i]*t**2`` with ``t = x - knots[i]``.
    """

    knots: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    curvatures: np.ndarray

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def __call__(self, x, extrapolate_left: bool = False):
        """Evaluate the spline.

        Points beyond the last knot are always an error. Points below the
        first knot are an error unless ``extrapolate_left`` is set, in which
        case the first segment's quadratic is continued.
        """
        x_arr = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(x_arr > hi) or (not extrapolate_left and np.any(x_arr < lo)):
            raise ValueError(f"spline evaluated outside [{lo}, {hi}]")
        i = np.clip(np.searchsorted(self.knots, x_arr, side="right") - 1,
                    0, len(self.knots) - 2)
        t = x_arr - self.knots[i]
        out = self.values[i] + t * (self.slopes[i] + t * self.curvatures[i])
        return out if out.ndim else float(out)

    def derivative(self, x):
        x_arr = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.knots, x_arr, side="right") - 1,
                    0, len(self.knots) - 2)
        t = x_arr - self.knots[i]
        return self.slopes[i] + 2 * t * self.curvatures[i]


def _slope_recursion(x, y, slope0):
    dx = np.diff(x)
    slopes = np.empty(dx.size)
    curvatures = np.empty(dx.size)
    slope = slope0
    for i, step in enumerate(dx):
        slopes[i] = slope
        curvatures[i] = (y[i + 1] - y[i] - slope * step) / step**2
        slope += 2 * curvatures[i] * step
    return slopes, curvatures


def fit_quadratic_spline(x: Sequence[float], y: Sequence[float]) -> QuadraticSpline:
    """Fit a C1 quadratic spline with knots at the samples ``(x[i], y[i])``.

    Interpolation and slope continuity leave one free parameter, the slope
    at the first knot. Every curvature is affine in it, so it is chosen to
    minimise the sum of squared jumps in the second derivative. Quadratic
    data are reproduced exactly; with three samples the result is their
    interpolating parabola.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if x.size < 3:
        raise ValueError(f"need at least 3 samples, got {x.size}")
    dx = np.diff(x)
    if np.any(dx <= 0):
        i = int(np.argmax(dx <= 0))
        raise ValueError(f"abscissae must be strictly increasing (x[{i}]={x[i]}, x[{i+1}]={x[i+1]})")

    # start from the first three points' parabola, then correct by least squares
    s01 = (y[1] - y[0]) / dx[0]
    s12 = (y[2] - y[1]) / dx[1]
    guess = s01 - (s12 - s01) / (x[2] - x[0]) * dx[0]
    _, c_guess = _slope_recursion(x, y, guess)
    _, c_unit = _slope_recursion(x, np.zeros_like(y), 1.0)
    jumps, response = np.diff(c_guess), np.diff(c_unit)
    slope0 = guess - np.dot(jumps, response) / np.dot(response, response)
    slopes, curvatures = _slope_recursion(x, y, slope0)
    return QuadraticSpline(x, y[:-1].copy(), slopes, curvatures)


# =============================================================================
# Dense linear systems
# =============================================================================

@dataclass(frozen=True)
class DenseSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"matrix must be square, got shape {a.shape}")
        if b.shape != (a.shape[0],):
            raise ValueError(f"rhs shape {b.shape} does not match matrix {a.shape}")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "rhs", b)


def solve_dense(system: DenseSystem, pivot_tol: float = 1e-14) -> np.ndarray:
    """Solve ``A x = b`` by LU factorisation with partial pivoting.

    Raises :class:`SingularSystemError` when a pivot falls below
    ``pivot_tol`` times the infinity norm of ``A``.
    """
    a, b = system.matrix, system.rhs
    scale = np.linalg.norm(a, np.inf)
    if scale == 0:
        raise SingularSystemError("matrix is identically zero", 0)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularSystemError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    pivots = np.abs(np.diag(lu))
    small = np.flatnonzero(pivots < pivot_tol * scale)
    if small.size:
        i = int(small[0])
        raise SingularSystemError(
            f"matrix is numerically singular: pivot {i} is {pivots[i]:.3e} "
            f"(scale {scale:.3e})", i)
    return scipy.linalg.lu_solve((lu, piv), b)


# =============================================================================
# Finite differences
# =============================================================================

def central_difference(values: Sequence[float], h: float) -> np.ndarray:
    """First derivative of uniformly spaced samples, second order everywhere.

    Interior points use the centred formula; the two end points use the
    three-point one-sided formulas.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 3:
        raise ValueError("central_difference needs at least 3 values")
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2 * h)
    d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
    d[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
    return d
