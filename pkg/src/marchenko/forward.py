"""
Direct problem for the s-wave radial Schroedinger equation.

Units are hbar = 2m = 1, so the equation is ``u'' = (V(r) - q**2) u`` and the
energy is ``E = q**2``. The regular solution (``u(0) = 0``) is propagated with
a fixed-step fourth-order Magnus scheme on a uniform grid split at the
potential's breakpoints, then matched to free waves beyond the potential's
cutoff radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

MAX_STEP = 1e-3
MATCH_PAD = 2.0
RESCALE_AT = 1e100


# =============================================================================
# Potentials
# =============================================================================

@dataclass(frozen=True)
class Potential:
    """A real potential, identically zero beyond ``cutoff``.

    ``breakpoints`` lists radii where ``func`` is discontinuous; the
    integrator places grid nodes there so no step straddles a jump.
    """

    func: Callable[[np.ndarray], np.ndarray]
    cutoff: float
    breakpoints: tuple[float, ...] = ()
    label: str = "custom"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        v = np.where(r > self.cutoff, 0.0, np.asarray(self.func(r), dtype=float) * np.ones_like(r))
        return v if v.ndim else float(v)


def exponential_potential(depth: float, rate: float, cutoff: float | None = None) -> Potential:
    """``V(r) = -depth * exp(-rate * r)``.

    The default cutoff is 25 decay lengths, where the potential is below
    ``depth * 1.4e-11``.
    """
    if rate <= 0:
        raise ValueError("rate must be positive")
    if cutoff is None:
        cutoff = 25.0 / rate
    return Potential(lambda r: -depth * np.exp(-rate * r), cutoff,
                     label=f"exp depth={depth!r} rate={rate!r}")


def square_well(depth: float, radius: float) -> Potential:
    """``V(r) = -depth`` for ``r < radius``, zero outside."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return Potential(lambda r: np.where(r < radius, -depth, 0.0), radius,
                     breakpoints=(radius,), label=f"well depth={depth!r} radius={radius!r}")


def tabulated_potential(r: Sequence[float], v: Sequence[float]) -> Potential:
    """Piecewise-linear potential through tabulated points; zero past the last radius."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    if r.ndim != 1 or r.shape != v.shape or r.size < 2:
        raise ValueError("tabulated potential needs matching 1-D r and V with >= 2 points")
    if np.any(np.diff(r) <= 0) or r[0] < 0:
        raise ValueError("tabulated radii must be non-negative and strictly increasing")
    if not np.all(np.isfinite(v)):
        raise ValueError("tabulated potential values must be finite")
    return Potential(lambda x: np.interp(x, r, v), float(r[-1]),
                     breakpoints=(float(r[-1]),), label="table")


def zero_potential(cutoff: float = 1.0) -> Potential:
    return Potential(lambda r: np.zeros_like(r), cutoff, label="zero")


# =============================================================================
# Propagation
# =============================================================================

@dataclass
class _Path:
    """Potential sampled at the two Gauss points of every step."""

    r: np.ndarray          # node radii, r[0] = 0
    v1: np.ndarray
    v2: np.ndarray


_GAUSS = math.sqrt(3) / 6


def _build_path(potential: Potential, r_end: float, step: float) -> _Path:
    edges = sorted({0.0, r_end, *(b for b in potential.breakpoints if 0 < b < r_end)})
    r = [np.zeros(1)]
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil((hi - lo) / step - 1e-9))
        r.append(np.linspace(lo, hi, n + 1)[1:])
    r = np.concatenate(r)
    mid, half = 0.5 * (r[:-1] + r[1:]), np.diff(r)
    return _Path(r, potential(mid - _GAUSS * half), potential(mid + _GAUSS * half))


def _propagate(path: _Path, energies: np.ndarray, keep: bool = False):
    """Fourth-order Magnus propagation of ``(u, u')`` for ``u'' = (V - E) u``.

    Starts from ``u(0)=0, u'(0)=1`` and is vectorised over ``E``. Each step
    applies ``exp(Omega)`` exactly (Omega is a traceless 2x2 matrix), so
    stretches of constant potential, in particular the free region, carry
    no truncation error.

    Returns ``(u, du, nodes)`` at the last radius; ``nodes`` counts sign
    changes of ``u`` on the grid. With ``keep`` the history of ``u`` is
    returned as well.
    """
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    u = np.zeros_like(e)
    du = np.ones_like(e)
    nodes = np.zeros(e.shape, dtype=int)
    history = [u.copy()] if keep else None
    for i, h in enumerate(np.diff(path.r)):
        w1 = path.v1[i] - e
        w2 = path.v2[i] - e
        # Omega = [[c, h], [h*wbar, -c]]
        c = math.sqrt(3) / 12 * h * h * (w1 - w2)
        hw = 0.5 * h * (w1 + w2)
        s2 = c * c + h * hw
        sig = np.sqrt(np.abs(s2))
        small = sig < 1e-4
        with np.errstate(over="ignore", invalid="ignore"):
            ch = np.where(s2 >= 0, np.cosh(sig), np.cos(sig))
            sh = np.where(s2 >= 0, np.sinh(sig), np.sin(sig)) / np.where(small, 1.0, sig)
        ch = np.where(small, 1 + s2 / 2 + s2 * s2 / 24, ch)
        sh = np.where(small, 1 + s2 / 6 + s2 * s2 / 120, sh)
        u_new = (ch + sh * c) * u + sh * h * du
        du = sh * hw * u + (ch - sh * c) * du
        nodes += u_new * u < 0
        u = u_new
        big = np.abs(u) > RESCALE_AT
        if np.any(big):
            scale = np.where(big, np.abs(u), 1.0)
            u, du = u / scale, du / scale
            if keep:
                history = [x / scale for x in history]
        if keep:
            history.append(u.copy())
    if keep:
        return u, du, nodes, np.array(history)
    return u, du, nodes


def default_step(q: float) -> float:
    return min(MAX_STEP, 0.1 / q) if q > 0 else MAX_STEP


def integrate_radial(potential: Potential, q: float, r_match: float | None = None,
                     step: float | None = None) -> tuple[float, float]:
    """Regular solution and its derivative at ``r_match``.

    The solution starts as ``u(0) = 0, u'(0) = 1`` and is rescaled when it
    grows past 1e100, so only the ratio ``u'/u`` and the phase are
    meaningful.
    """
    if not q > 0:
        raise ValueError(f"momentum must be positive, got {q}")
    if r_match is None:
        r_match = potential.cutoff + MATCH_PAD
    if r_match < potential.cutoff:
        raise ValueError(f"r_match={r_match} lies inside the potential (cutoff {potential.cutoff})")
    if step is None:
        step = default_step(q)
    if not q * step < 0.5:
        raise ValueError(f"step {step} too coarse for q={q}")
    u, du, _ = _propagate(_build_path(potential, r_match, step), np.array([q * q]))
    return float(u[0]), float(du[0])


def _phase_from_match(q, u, du, r):
    d = np.arctan2(q * u * np.cos(q * r) - du * np.sin(q * r),
                   du * np.cos(q * r) + q * u * np.sin(q * r))
    return np.where(d <= -np.pi, d + 2 * np.pi, d)


def phase_shift(potential: Potential, q: float, r_match: float | None = None,
                step: float | None = None) -> float:
    """s-wave phase shift in radians, on the branch (-pi, pi]."""
    if r_match is None:
        r_match = potential.cutoff + MATCH_PAD
    u, du = integrate_radial(potential, q, r_match, step)
    return float(_phase_from_match(q, u, du, r_match))


# =============================================================================
# Tables of S
# =============================================================================

@dataclass(frozen=True)
class PhaseShiftTable:
    q: np.ndarray
    delta: np.ndarray
    s: np.ndarray = field(init=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        delta = np.asarray(self.delta, dtype=float)
        if q.ndim != 1 or q.shape != delta.shape or q.size == 0:
            raise ValueError("q and delta must be non-empty 1-D arrays of equal length")
        if q[0] <= 0 or np.any(np.diff(q) <= 0):
            raise ValueError("q must be positive and strictly increasing")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "s", np.exp(2j * delta))

    def __len__(self):
        return self.q.size


def s_matrix_table(potential: Potential, q_grid: Sequence[float],
                   step: float | None = None) -> PhaseShiftTable:
    """Phase shifts and ``S = exp(2i delta)`` on a momentum grid.

    All momenta share one propagation; the step is the default step of the
    largest momentum unless given.
    """
    q = np.asarray(q_grid, dtype=float)
    if q.ndim != 1 or q.size == 0 or q[0] <= 0 or np.any(np.diff(q) <= 0):
        raise ValueError("q grid must be positive and strictly increasing")
    if step is None:
        step = default_step(float(q[-1]))
    if not q[-1] * step < 0.5:
        raise ValueError(f"step {step} too coarse for q={q[-1]}")
    r_match = potential.cutoff + MATCH_PAD
    u, du, _ = _propagate(_build_path(potential, r_match, step), q * q)
    return PhaseShiftTable(q, _phase_from_match(q, u, du, r_match))


def asymptotic_constant(table: PhaseShiftTable, q_edge: float) -> float:
    """Constant ``A`` of the tail ``S(q) = exp(-2iA/q)`` matched at ``q_edge``.

    ``A = -q_edge * delta(q_edge)`` with the phase shift taken on the branch
    (-pi/2, pi/2], the one continuously connected to zero at large q.
    """
    hit = np.flatnonzero(np.isclose(table.q, q_edge, rtol=1e-12, atol=0))
    if hit.size == 0:
        raise ValueError(f"no table entry at q_edge={q_edge}")
    return tail_constant(q_edge, table.s[hit[0]])


def tail_constant(q_edge: float, s_edge: complex) -> float:
    """``A`` such that ``exp(-2iA/q_edge) == s_edge``, smallest ``|A|`` branch."""
    delta = np.angle(s_edge) / 2
    if delta <= -np.pi / 2:
        delta += np.pi
    return float(-q_edge * delta)


# =============================================================================
# Bound states
# =============================================================================

@dataclass(frozen=True)
class BoundState:
    """Bound state at ``q = i*kappa`` (energy ``-kappa**2``) with asymptotic constant ``M``."""

    kappa: float
    M: float

    def __post_init__(self):
        if not (self.kappa > 0 and self.M > 0):
            raise ValueError(f"bound state needs kappa > 0 and M > 0, got {self}")


def _tail_crosses(u, du, kappa):
    # u(R + t) = a exp(kappa t) + b exp(-kappa t); a zero at t > 0 iff -b/a > 1
    a = 0.5 * (u + du / kappa)
    b = 0.5 * (u - du / kappa)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (a != 0) & (-b / a > 1)


def _count_below(path: _Path, kappa: np.ndarray) -> np.ndarray:
    """Number of bound states deeper than ``-kappa**2`` (oscillation count)."""
    u, du, nodes = _propagate(path, -kappa**2)
    return nodes + _tail_crosses(u, du, kappa)


def find_bound_states(potential: Potential, step: float = MAX_STEP,
                      kappa_min: float = 1e-6) -> list[BoundState]:
    """All bound states of the potential, deepest first.

    Each state is bracketed by bisection on the node count of the regular
    solution, then located precisely as the root of the Wronskian with the
    decaying exponential at the cutoff radius.
    """
    r_end = potential.cutoff
    path = _build_path(potential, r_end, step)
    depth = -min(0.0, float(np.min(np.concatenate([path.v1, path.v2]))))
    if depth == 0:
        return []
    kappa_max = math.sqrt(depth) * (1 + 1e-9)
    n_b = int(_count_below(path, np.array([kappa_min]))[0])
    if n_b == 0:
        return []

    # vectorised bisection: state j (1-based) has count(kappa) >= j for kappa < kappa_j
    j = np.arange(1, n_b + 1)
    lo = np.full(n_b, kappa_min)
    hi = np.full(n_b, kappa_max)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        below = _count_below(path, mid) >= j
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    def wronskian(kappa):
        u, du, _ = _propagate(path, np.array([-kappa * kappa]))
        return float(du[0] + kappa * u[0])

    states = []
    for a, b in zip(lo, hi):
        kappa = brentq(wronskian, a, b, xtol=1e-14, rtol=1e-13) if wronskian(a) * wronskian(b) < 0 else 0.5 * (a + b)
        states.append(BoundState(kappa, _asymptotic_norm(potential, kappa, step)))
    return states


def _asymptotic_norm(potential: Potential, kappa: float, step: float) -> float:
    """``M`` with ``u -> M exp(-kappa r)`` for the unit-normalised bound state."""
    r_end = potential.cutoff
    path = _build_path(potential, r_end, step)
    u_end, _, _, u = _propagate(path, np.array([-kappa * kappa]), keep=True)
    u = u[:, 0]
    norm2 = _grid_integral(path.r, u * u, potential.breakpoints)
    norm2 += u[-1] ** 2 / (2 * kappa)
    return float(abs(u[-1]) / math.sqrt(norm2) * math.exp(kappa * r_end))


def _grid_integral(r: np.ndarray, f: np.ndarray, breakpoints) -> float:
    edges = sorted({0.0, float(r[-1]), *(b for b in breakpoints if 0 < b < r[-1])})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        i0 = int(np.argmin(np.abs(r - lo)))
        i1 = int(np.argmin(np.abs(r - hi)))
        total += float(simpson(f[i0:i1 + 1], x=r[i0:i1 + 1]))
    return total
