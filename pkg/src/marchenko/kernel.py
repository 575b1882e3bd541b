"""
Recovery of the s-wave Marchenko kernel on a rectangular basis.

With ``F(x) = sum_k F0[k] * H_k(x)`` and ``H_k`` the indicator of
``[k h, (k+1) h]``, the product ``q Y(q)`` is a trigonometric polynomial on
``|q| <= pi/h`` whose coefficients are successive differences of ``F0``.
The moments

    m_k = (h/pi) * int_0^{pi/h} Im(q Y(q) exp(i q h k)) dq

therefore give ``F0[2N] = m_{2N+1}`` and ``F0[k-1] = F0[k] + m_k``. The
remaining relation, ``F0[-2N] = -m_{-2N}``, is kept as a consistency check.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .data import write_columns
from .numerics import (TOL_QUAD, QuadratureError, initial_panel_width,
                       integrate_oscillatory, simpson_grid)

YFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class KernelCoefficients:
    """``values[k + 2N] = F0[k]`` for ``k = -2N .. 2N``."""

    h: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.iscomplexobj(v):
            raise ValueError("kernel coefficients must be real")
        v = v.astype(float)
        if v.shape != (4 * self.N + 1,):
            raise ValueError(f"expected {4 * self.N + 1} coefficients, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("kernel coefficients must be finite")
        object.__setattr__(self, "values", v)

    @property
    def k(self) -> np.ndarray:
        return np.arange(-2 * self.N, 2 * self.N + 1)

    def __getitem__(self, k: int) -> float:
        if not -2 * self.N <= k <= 2 * self.N:
            raise IndexError(k)
        return float(self.values[k + 2 * self.N])

    def to_csv(self, path: str | os.PathLike) -> None:
        write_columns(path, ["k", "F0k"], [self.k, self.values])


def _breakpoints(y: YFunction):
    return getattr(y, "breakpoints", None)


def q_times_y(y: YFunction, q: np.ndarray) -> np.ndarray:
    """``q * Y(q)`` with the removable point ``q = 0`` set to its limit 0."""
    q = np.asarray(q, dtype=float)
    out = np.zeros(q.shape, dtype=complex)
    pos = q > 0
    out[pos] = q[pos] * np.asarray(y(q[pos]))
    return out


def fourier_moment(y: YFunction, h: float, k: int, tol: float = TOL_QUAD) -> float:
    """``(h/pi) * int_0^{pi/h} Im(q Y(q) exp(i q h k)) dq`` for a single ``k``."""
    if not h > 0:
        raise ValueError("h must be positive")

    def integrand(q):
        return np.imag(q_times_y(y, q) * np.exp(1j * q * h * k))

    upper = math.pi / h
    value = integrate_oscillatory(integrand, 0.0, upper, abs(k) * h, tol=tol,
                                  breakpoints=_breakpoints(y))
    return h / math.pi * value


def fourier_moments(y: YFunction, h: float, ks: Sequence[int], tol: float = TOL_QUAD,
                    max_nodes: int = 1 << 22) -> np.ndarray:
    """All moments for ``ks`` on one shared grid.

    Same rule as :func:`fourier_moment`: composite Simpson starting from the
    phase-limited panel width of the fastest ``k``, halved until every
    integral changes by at most ``tol``. ``q Y(q)`` is evaluated once per
    grid.
    """
    ks = np.asarray(ks, dtype=int)
    upper = math.pi / h
    width = initial_panel_width(0.0, upper, float(np.max(np.abs(ks))) * h)
    bp = _breakpoints(y)

    def all_integrals(width):
        q, w = simpson_grid(0.0, upper, width, bp)
        g = q_times_y(y, q)
        bad = ~np.isfinite(g)
        if np.any(bad):
            raise QuadratureError(f"integrand is not finite at q = {q[bad][0]!r}")
        gw = g * w
        # Im(g e^{i q h k}) = Re g sin + Im g cos
        return np.array([np.dot(gw.real, np.sin(q * h * k)) + np.dot(gw.imag, np.cos(q * h * k))
                         for k in ks]), q.size

    previous, _ = all_integrals(width)
    while True:
        width /= 2
        current, n = all_integrals(width)
        change = float(np.max(np.abs(current - previous)))
        if change <= tol:
            return h / math.pi * current
        if n > max_nodes:
            raise QuadratureError(f"moments did not converge to {tol:g} with {n} nodes (change {change:.3g})")
        previous = current


def _telescope(moments: np.ndarray, N: int) -> np.ndarray:
    """Descending chain ``F0[k-1] = F0[k] + m_k`` with compensated summation.

    ``moments[i]`` is ``m_k`` for ``k = i - 2N``, ``i = 0 .. 4N+1``.
    """
    values = np.empty(4 * N + 1)
    total = moments[-1]          # m_{2N+1}
    comp = 0.0
    values[-1] = total
    for k in range(2 * N, -2 * N, -1):
        term = moments[k + 2 * N] - comp
        t = total + term
        comp = (t - total) - term
        total = t
        values[k - 1 + 2 * N] = total
    return values


def recover_coefficients(y: YFunction, h: float, N: int, tol: float = TOL_QUAD) -> KernelCoefficients:
    if not h > 0 or N < 1:
        raise ValueError(f"need h > 0 and N >= 1, got h={h}, N={N}")
    ks = np.arange(-2 * N, 2 * N + 2)
    return KernelCoefficients(h, N, _telescope(fourier_moments(y, h, ks, tol), N))


def consistency_residual(y: YFunction, coeffs: KernelCoefficients, tol: float = TOL_QUAD) -> float:
    """``|F0[-2N] + m_{-2N}|``, the one relation not used by the recursion."""
    m = fourier_moment(y, coeffs.h, -2 * coeffs.N, tol)
    return abs(coeffs[-2 * coeffs.N] + m)


def recover_with_residual(y: YFunction, h: float, N: int,
                          tol: float = TOL_QUAD) -> tuple[KernelCoefficients, float]:
    """Coefficients plus consistency residual from a single batch of moments."""
    ks = np.arange(-2 * N, 2 * N + 2)
    moments = fourier_moments(y, h, ks, tol)
    coeffs = KernelCoefficients(h, N, _telescope(moments, N))
    return coeffs, abs(coeffs[-2 * N] + moments[0])


@dataclass(frozen=True)
class BandLimitedY:
    """``Y(q)`` generated by a known coefficient sequence on the rectangular basis.

    ``Y(q) = sum_k c_k * i (exp(-i q h) - 1) / q * exp(-i q h k)``, the exact
    Fourier transform of ``sum_k c_k H_k``.
    """

    h: float
    values: np.ndarray

    @property
    def N(self) -> int:
        return (len(self.values) - 1) // 4

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        z = np.exp(-1j * q * self.h)
        # Horner in z, |z| = 1, then shift by z**(-2N)
        series = np.zeros(q.shape, dtype=complex)
        for c in np.asarray(self.values, dtype=float)[::-1]:
            series = series * z + c
        series *= np.exp(2j * q * self.h * self.N)
        out = 1j * (z - 1) / q * series
        return out if out.ndim else complex(out)
