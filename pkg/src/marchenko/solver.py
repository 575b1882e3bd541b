"""
Finite linear systems for the Marchenko equation and potential extraction.

The kernel is expanded on hat functions ``Delta_n`` of half-width ``h``
centred at ``n h``, and the solution as ``L(x, y) = sum_m P_m(x) Delta_m(y)``.
At ``x = p h`` the integral equation becomes, for each ``p``,

    sum_m (delta_jm + sum_n zeta[n, m, p] F[n, j]) P[p, m] = -F[p, j]

with ``zeta[n, m, p]`` the overlap of ``Delta_m`` and ``Delta_n`` on
``[p h, inf)``. Since ``L(p h, p h) = P[p, p]``, the potential follows as
``V = -2 d/dr P[p, p]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .data import write_columns
from .kernel import KernelCoefficients
from .numerics import DenseSystem, SingularSystemError, central_difference, solve_dense


def zeta(n: int, m: int, p: int, h: float) -> float:
    """Overlap integral of hat functions ``m`` and ``n`` over ``[p h, inf)``."""
    value = 0
    if n == m:
        value += 2 * ((n == p) + 2 * (n >= p + 1))
    if n == m - 1:
        value += n >= p
    if n == m + 1:
        value += m >= p
    return h / 6 * value


def zeta_bands(p: int, N: int, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nonzero ``zeta[n, m, p]`` as three bands indexed by ``m = 0..N``.

    Returns ``(lower, diag, upper)`` holding ``zeta[m-1, m, p]``,
    ``zeta[m, m, p]`` and ``zeta[m+1, m, p]``; out-of-range entries are 0.
    """
    m = np.arange(N + 1)
    diag = h / 6 * 2 * ((m == p) + 2 * (m >= p + 1))
    lower = np.where((m >= 1) & (m - 1 >= p), h / 6, 0.0)
    upper = np.where((m <= N - 1) & (m >= p), h / 6, 0.0)
    return lower, diag, upper


@dataclass(frozen=True)
class KernelMatrix:
    """Samples ``F[k, j] = F(k h + j h)`` for ``k, j = 0..N`` (Hankel)."""

    h: float
    N: int
    values: np.ndarray


@dataclass(frozen=True)
class SolutionMatrix:
    """``values[p, k] = P_k(p h)``."""

    h: float
    N: int
    values: np.ndarray

    def to_csv(self, path: str | os.PathLike) -> None:
        cols = [np.arange(self.N + 1)] + [self.values[:, k] for k in range(self.N + 1)]
        write_columns(path, ["p"] + [f"P{k}" for k in range(self.N + 1)], cols)


@dataclass(frozen=True)
class PotentialGrid:
    h: float
    values: np.ndarray

    @property
    def r(self) -> np.ndarray:
        return self.h * np.arange(self.values.size)

    def to_csv(self, path: str | os.PathLike) -> None:
        write_columns(path, ["r", "V"], [self.r, self.values])


def build_kernel_matrix(coeffs: KernelCoefficients) -> KernelMatrix:
    N = coeffs.N
    idx = np.add.outer(np.arange(N + 1), np.arange(N + 1))
    return KernelMatrix(coeffs.h, N, coeffs.values[idx + 2 * N])


def assemble_p_system(kernel: KernelMatrix, p: int) -> DenseSystem:
    """Coefficient matrix ``A[j, m] = delta_jm + sum_n zeta[n,m,p] F[n,j]`` and rhs ``-F[p, :]``."""
    N, F = kernel.N, kernel.values
    if not 0 <= p <= N:
        raise ValueError(f"p={p} outside 0..{N}")
    lower, diag, upper = zeta_bands(p, N, kernel.h)
    # sum over the three nonzero n for each column m; F is symmetric so F[n, j] = F[j, n]
    a = F * diag
    a[:, 1:] += F[:, :-1] * lower[1:]
    a[:, :-1] += F[:, 1:] * upper[:-1]
    a[np.diag_indices(N + 1)] += 1.0
    return DenseSystem(a, -F[p])


def solve_p_system(kernel: KernelMatrix, p: int) -> np.ndarray:
    try:
        return solve_dense(assemble_p_system(kernel, p))
    except SingularSystemError as exc:
        raise SingularSystemError(f"system for p={p}: {exc}", p) from exc


def solve_all(kernel: KernelMatrix) -> SolutionMatrix:
    rows = [solve_p_system(kernel, p) for p in range(kernel.N + 1)]
    return SolutionMatrix(kernel.h, kernel.N, np.array(rows))


def extract_potential(solution: SolutionMatrix) -> PotentialGrid:
    if solution.N < 2:
        raise ValueError("need N >= 2 to differentiate the diagonal")
    diagonal = np.diag(solution.values)
    return PotentialGrid(solution.h, -2 * central_difference(diagonal, solution.h))


def marchenko_residual(solution: SolutionMatrix, kernel: KernelMatrix) -> float:
    """Largest discretised residual of the integral equation on ``y >= x``."""
    worst = 0.0
    for p in range(kernel.N + 1):
        system = assemble_p_system(kernel, p)
        # F[p,j] + P[p,j] + sum_m P[p,m] sum_n zeta F[n,j]  ==  (A P_p - rhs)_j
        r = system.matrix @ solution.values[p] - system.rhs
        worst = max(worst, float(np.max(np.abs(r[p:]))))
    return worst


def invert(coeffs: KernelCoefficients) -> tuple[KernelMatrix, SolutionMatrix, PotentialGrid]:
    kernel = build_kernel_matrix(coeffs)
    solution = solve_all(kernel)
    return kernel, solution, extract_potential(solution)
