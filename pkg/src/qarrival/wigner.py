"""Wigner-Weyl phase-space route to the quasi-probability.

The Weyl symbol of (P_s2(tau) P_s1 + h.c.) / 2 is

    A_{s1 s2}(X, p) = [1 + s1 sgn X + s2 sgn X_tau + s1 s2 (2/pi) Si(2 X X_tau / tau)] / 4,

X_tau = X + p tau, and W_{s1 s2} = A_{s1 s2} / (2 pi).  Then
q(s1, s2) = 2 pi int dX dp W_{s1 s2} W_rho with W_rho taken at t1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import gauss_legendre, quantum_step, sine_integral
from .states import GridWaveFunction, WavepacketState
from .twotime import SIGNS, TwoTimeTable

__all__ = [
    "ResolutionError",
    "PhaseSpaceFunction",
    "wigner_of_state",
    "wigner_gaussian_superposition",
    "kernel_W",
    "kernel_W_printed",
    "classical_kernel_W",
    "weyl_symbol_of_projector",
    "q_via_phase_space",
    "trace_with_symbol",
    "quantum_step_curve",
]


class ResolutionError(ValueError):
    """Grid too coarse for the requested transform."""


@dataclass(frozen=True)
class PhaseSpaceFunction:
    X: np.ndarray
    p: np.ndarray
    values: np.ndarray  # shape (len(X), len(p))

    def __post_init__(self):
        if self.values.shape != (self.X.size, self.p.size):
            raise ValueError("values must have shape (len(X), len(p))")

    @property
    def cell_area(self) -> float:
        return float((self.X[1] - self.X[0]) * (self.p[1] - self.p[0]))

    def integral(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def position_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * (self.p[1] - self.p[0])

    def to_csv_rows(self):
        for i, x in enumerate(self.X):
            for j, p in enumerate(self.p):
                yield (float(x), float(p), float(self.values[i, j]))


# ------------------------------------------------------------ Wigner functions

def wigner_gaussian_superposition(state: WavepacketState, X, p) -> np.ndarray:
    """Closed-form W_rho(X, p) for a Gaussian superposition (broadcasting X and p)."""
    X = np.asarray(X, dtype=float)
    p = np.asarray(p, dtype=float)
    total = np.zeros(np.broadcast(X, p).shape)
    coeffs = [(c, g.exponent_coefficients()) for c, g in state.terms]
    for ci, (ai, bi, gi) in coeffs:
        ai, bi, gi = ai.conjugate(), bi.conjugate(), gi.conjugate()
        for cj, (aj, bj, gj) in coeffs:
            A = 0.25 * (aj + ai)
            B = (aj - ai) * X + 0.5 * (bj - bi) - 1j * p
            C = (aj + ai) * X * X + (bj + bi) * X + gj + gi
            val = np.sqrt(np.pi / -A) * np.exp(C - B * B / (4 * A))
            total = total + (ci.conjugate() * cj * val).real
    return total / (2 * np.pi)


def wigner_of_state(state, X, p, nyquist_tol: float = 1e-8) -> PhaseSpaceFunction:
    """W_rho on the lattice X x p.

    Grid states use the direct transform with xi = 2 k dx, so X is snapped to
    grid points and momenta must stay below half the grid Nyquist frequency.
    """
    X = np.asarray(X, dtype=float)
    p = np.asarray(p, dtype=float)
    if isinstance(state, WavepacketState):
        return PhaseSpaceFunction(X, p, wigner_gaussian_superposition(state, X[:, None], p[None, :]))
    if not isinstance(state, GridWaveFunction):
        raise TypeError("state must be a WavepacketState or GridWaveFunction")
    psi = state.amplitudes
    n, dx = state.n, state.dx
    spectrum = np.abs(np.fft.fft(psi))
    k = np.abs(np.fft.fftfreq(n))
    tail = spectrum[k >= 0.25].max() / spectrum.max()
    if tail > nyquist_tol or np.abs(p).max() > np.pi / (2 * dx):
        raise ResolutionError(
            f"grid spacing {dx:g} does not resolve the Wigner transform (spectral tail {tail:.1e})")
    idx = np.rint((X - state.x_min) / dx).astype(int)
    if idx.min() < 0 or idx.max() >= n:
        raise ResolutionError("X lattice leaves the grid")
    X_used = state.x_min + idx * dx
    kmax = n // 2
    shifts = np.arange(-kmax, kmax + 1)
    phase = np.exp(-2j * np.outer(shifts, p) * dx)
    padded = np.concatenate([np.zeros(kmax, complex), psi, np.zeros(kmax + 1, complex)])
    W = np.empty((idx.size, p.size))
    for row, j in enumerate(idx):
        fwd = padded[j + kmax + shifts]
        bwd = padded[j + kmax - shifts]
        W[row] = (fwd * bwd.conjugate() @ phase).real * dx / np.pi
    return PhaseSpaceFunction(X_used, p, W)


# ---------------------------------------------------------------- the kernels

def weyl_symbol_of_projector(s1: int, s2: int, X, p, tau: float):
    """A_{s1 s2}(X, p) = 2 pi W_{s1 s2}(X, p)."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    X = np.asarray(X, dtype=float)
    Xt = X + np.asarray(p, dtype=float) * tau
    u = 2.0 * X * Xt / tau
    return 0.25 * (1 + s1 * np.sign(X) + s2 * np.sign(Xt) + s1 * s2 * (2 / np.pi) * sine_integral(u))


def kernel_W(s1: int, s2: int, X, p, tau: float):
    """W_{s1 s2}(X, p; tau)."""
    return weyl_symbol_of_projector(s1, s2, X, p, tau) / (2 * np.pi)


def kernel_W_printed(s1: int, s2: int, X, p, tau: float):
    """The unequal-sign kernel with its Si and constant terms flipped.

    Kept to document that it fails the resolution of identity.
    """
    X = np.asarray(X, dtype=float)
    Xt = X + np.asarray(p, dtype=float) * tau
    u = 2.0 * X * Xt / tau
    th = lambda v: np.heaviside(v, 0.5)
    if s1 == s2:
        return kernel_W(s1, s2, X, p, tau)
    return (th(s1 * X) + th(s2 * Xt) + 0.5 - sine_integral(-u) / np.pi) / (4 * np.pi)


def classical_kernel_W(s1: int, s2: int, X, p, tau: float):
    """Large-|u| limit: [theta(s1 X) + theta(s2 X_tau) - theta(-s1 s2 X X_tau)] / (4 pi)."""
    X = np.asarray(X, dtype=float)
    Xt = X + np.asarray(p, dtype=float) * tau
    th = lambda v: np.heaviside(v, 0.5)
    return (th(s1 * X) + th(s2 * Xt) - th(-s1 * s2 * X * Xt)) / (4 * np.pi)


def quantum_step_curve(u_min: float, u_max: float, n: int):
    """Rows (u, 1/2 - Si(u)/pi)."""
    u = np.linspace(u_min, u_max, n)
    return list(zip(u.tolist(), np.asarray(quantum_step(u)).tolist()))


# ------------------------------------------------------------ phase-space q

def _shear_nodes(state: WavepacketState, t1: float, t2: float, n: int, spreads: float):
    """Gauss-Legendre nodes in (X, X_tau), split at zero on both axes."""
    def half_ranges(t):
        lo = min(g.evolved(t - g.t).center - spreads * g.evolved(t - g.t).spread for g in state.packets)
        hi = max(g.evolved(t - g.t).center + spreads * g.evolved(t - g.t).spread for g in state.packets)
        pieces = []
        if lo < 0:
            pieces.append((lo, min(hi, 0.0)))
        if hi > 0:
            pieces.append((max(lo, 0.0), hi))
        return [gauss_legendre(n, a, b) for a, b in pieces if b > a]
    return half_ranges(t1), half_ranges(t2)


def q_via_phase_space(state, t1: float, t2: float, n: int = 400, spreads: float = 10.0,
                      lattice: tuple[np.ndarray, np.ndarray] | None = None) -> TwoTimeTable:
    """q(s1, s2) = 2 pi int dX dp W_{s1 s2}(X, p) W_rho(X, p; t1).

    Gaussian superpositions are integrated with Gauss-Legendre rules in the
    sheared coordinates (X, X_tau), where every sign discontinuity of the
    kernel lies on a panel edge.  Grid states (or an explicit ``lattice``)
    use the plain lattice sum over a uniform (X, p) grid.
    """
    if not t2 > t1 >= 0:
        raise ValueError("need t2 > t1 >= 0")
    tau = t2 - t1
    if lattice is not None or not isinstance(state, WavepacketState):
        if lattice is None:
            raise ValueError("grid states need an explicit (X, p) lattice")
        X, p = lattice
        start = state.evolved(t1)
        W = wigner_of_state(start, X, p)
        vals = {}
        for s1 in SIGNS:
            for s2 in SIGNS:
                A = weyl_symbol_of_projector(s1, s2, W.X[:, None], W.p[None, :], tau)
                vals[(s1, s2)] = float((A * W.values).sum() * W.cell_area)
        return TwoTimeTable(vals, "quasi", t1, t2, sum_tol=1e-6)

    start = state.evolved(t1)
    x_rules, xt_rules = _shear_nodes(state, t1, t2, n, spreads)
    vals = {(s1, s2): 0.0 for s1 in SIGNS for s2 in SIGNS}
    for rx in x_rules:
        for rt in xt_rules:
            Xg = rx.nodes[:, None]
            Xt = rt.nodes[None, :]
            weight = rx.weights[:, None] * rt.weights[None, :] / tau
            W = wigner_gaussian_superposition(start, Xg, (Xt - Xg) / tau) * weight
            sx, st = np.sign(rx.nodes.mean()), np.sign(rt.nodes.mean())
            si = (2 / np.pi) * sine_integral(2 * Xg * Xt / tau)
            mass, si_part = W.sum(), (W * si).sum()
            for s1 in SIGNS:
                for s2 in SIGNS:
                    vals[(s1, s2)] += 0.25 * ((1 + s1 * sx + s2 * st) * mass + s1 * s2 * si_part)
    return TwoTimeTable(vals, "quasi", t1, t2, sum_tol=1e-6)


def trace_with_symbol(state: WavepacketState, symbol, t: float = 0.0, n: int = 400,
                      spreads: float = 10.0) -> float:
    """2 pi int W_A W_rho for a symbol A(X, p) discontinuous only at X = 0."""
    start = state.evolved(t)
    rules, pr = _shear_nodes(state, t, t, n, spreads)[0], None
    pmin = min(g.p0 - spreads / (2 * g.sigma) for g in state.packets)
    pmax = max(g.p0 + spreads / (2 * g.sigma) for g in state.packets)
    pr = gauss_legendre(n, pmin, pmax)
    total = 0.0
    for rx in rules:
        Xg, P = rx.nodes[:, None], pr.nodes[None, :]
        W = wigner_gaussian_superposition(start, Xg, P)
        total += float((rx.weights[:, None] * pr.weights[None, :] * W * symbol(Xg, P)).sum())
    return total


