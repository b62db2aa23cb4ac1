"""Flux operator on positive momenta and quantum backflow.

For a window [t1, t2] of length T, centred at zero, the integrated flux
F = P_+(T/2) - P_+(-T/2) has the momentum kernel

    K(p, p') = sin((p^2 - p'^2) T / 4) / (pi (p - p')),   K(p, p) = p T / (2 pi).

K depends on p and T only through p sqrt(T / 4), so the spectrum of F
restricted to p >= 0 is T-independent.  Its most negative eigenvalue is the
backflow constant; the discretization converges like 1 / cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from .numerics import ConvergenceError, gauss_legendre
from .states import GridWaveFunction, MomentumWaveFunction
from .twotime import quasi_probability

__all__ = [
    "FluxSpectrumProblem",
    "FluxMatrix",
    "BackflowEigenpair",
    "flux_kernel",
    "build_flux_matrix",
    "spectrum",
    "extremal_eigenvalue",
    "q_from_lambda",
    "negative_momentum_leakage",
    "q_minus_plus_momentum",
    "EigenstateCheck",
    "verify_eigenstate_q",
    "backflow_increase",
    "Extrapolation",
    "extrapolate_lambda",
    "modes_for_cutoff",
]


@dataclass(frozen=True)
class FluxSpectrumProblem:
    p_max: float
    n_modes: int
    T: float = 4.0

    def __post_init__(self):
        if self.n_modes < 64:
            raise ValueError("n_modes must be at least 64")
        if self.p_max <= 0 or self.T < 0:
            raise ValueError("p_max must be positive and T non-negative")

    @property
    def scaled_cutoff(self) -> float:
        """p_max sqrt(T / 4), the only combination the spectrum depends on."""
        return self.p_max * math.sqrt(self.T / 4)


def modes_for_cutoff(scaled_cutoff: float, per_unit_sq: float = 1.6) -> int:
    """Node count resolving the kernel oscillation sin(u^2 - u'^2) up to the cutoff."""
    n = max(64, int(math.ceil(per_unit_sq * scaled_cutoff**2)))
    return n + n % 2


def flux_kernel(p, q, T: float):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    s = p + q
    a = (p - q) * s * T / 4
    # sin(a) / (pi (p - q)) = (s T / 4 pi) sinc(a); finite on the diagonal.
    return s * T / (4 * np.pi) * np.sinc(a / np.pi)


@dataclass(frozen=True)
class FluxMatrix:
    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    problem: FluxSpectrumProblem


def build_flux_matrix(problem: FluxSpectrumProblem) -> FluxMatrix:
    """Symmetrized Nystrom matrix sqrt(w_i) K(p_i, p_j) sqrt(w_j) on Gauss-Legendre nodes."""
    rule = gauss_legendre(problem.n_modes, 0.0, problem.p_max)
    root_w = np.sqrt(rule.weights)
    m = root_w[:, None] * flux_kernel(rule.nodes[:, None], rule.nodes[None, :], problem.T) * root_w[None, :]
    m = 0.5 * (m + m.T)
    m.setflags(write=False)
    return FluxMatrix(rule.nodes, rule.weights, m, problem)


def spectrum(fm: FluxMatrix) -> np.ndarray:
    return linalg.eigh(fm.matrix, eigvals_only=True)


@dataclass(frozen=True)
class BackflowEigenpair:
    lam: float
    lam_max: float
    amplitudes: MomentumWaveFunction
    node_values: np.ndarray
    flux: FluxMatrix

    def interpolate(self, p) -> np.ndarray:
        """Nystrom extension (1 / lambda) sum_j K(p, p_j) w_j f(p_j)."""
        fm = self.flux
        k = flux_kernel(np.asarray(p, dtype=float)[:, None], fm.nodes[None, :], fm.problem.T)
        return k @ (fm.weights * self.node_values) / self.lam


def extremal_eigenvalue(problem: FluxSpectrumProblem, n_uniform: int = 2**14) -> BackflowEigenpair:
    """Most negative eigenpair; amplitudes sampled on a uniform grid of [0, p_max)."""
    fm = build_flux_matrix(problem)
    n = problem.n_modes
    try:
        lo_val, lo_vec = linalg.eigh(fm.matrix, subset_by_index=[0, 0])
        hi_val = linalg.eigh(fm.matrix, eigvals_only=True, subset_by_index=[n - 1, n - 1])
    except linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    lam = float(lo_val[0])
    f = lo_vec[:, 0] / np.sqrt(fm.weights)
    f *= np.sign(f[np.argmax(np.abs(f))])
    dp = problem.p_max / n_uniform
    p = np.arange(n_uniform) * dp
    pair = BackflowEigenpair(lam, float(hi_val[0]), None, f, fm)
    values = pair.interpolate(p)
    values /= math.sqrt(np.sum(np.abs(values) ** 2) * dp)
    amps = MomentumWaveFunction(0.0, dp, values.astype(complex))
    return BackflowEigenpair(lam, float(hi_val[0]), amps, f, fm)


def q_from_lambda(lam: float) -> float:
    """lambda (lambda + 1) / 2."""
    if not -1 <= lam <= 1:
        raise ValueError("lambda must lie in [-1, 1]")
    return 0.5 * lam * (lam + 1)


def negative_momentum_leakage(pair: BackflowEigenpair, n: int = 4000) -> float:
    """|| theta(-p) F psi ||^2 for the eigenstate psi (quadrature over p < 0).

    Substituting p = -v / (1 - v) maps (-inf, 0] to [0, 1).
    """
    fm = pair.flux
    rule = gauss_legendre(n, 0.0, 1.0)
    v = rule.nodes
    p = -v / (1 - v)
    jac = 1 / (1 - v) ** 2
    k = flux_kernel(p[:, None], fm.nodes[None, :], fm.problem.T)
    g = k @ (fm.weights * pair.node_values)
    norm = np.sum(fm.weights * pair.node_values**2)
    return float(np.sum(rule.weights * jac * g * g) / norm)


def q_minus_plus_momentum(pair: BackflowEigenpair) -> float:
    """q(-, +) = <F>/2 + ||F psi||^2 / 2 for an eigenstate of theta(p) F theta(p)."""
    lam = pair.lam
    return 0.5 * lam + 0.5 * (lam * lam + negative_momentum_leakage(pair))


@dataclass(frozen=True)
class EigenstateCheck:
    lam: float
    q_grid: float
    q_formula: float
    q_momentum: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.q_grid - self.q_formula) < self.tolerance


def eigenstate_on_grid(pair: BackflowEigenpair, n_position: int = 2**16) -> GridWaveFunction:
    """Grid state at t1 = 0 whose window [0, T] is the centred window of the kernel."""
    mom = pair.amplitudes
    T = pair.flux.problem.T
    shifted = MomentumWaveFunction(mom.p_min, mom.dp, mom.amplitudes * np.exp(0.25j * mom.p**2 * T))
    return shifted.to_position(n_position)


def verify_eigenstate_q(pair: BackflowEigenpair, tolerance: float = 5e-3,
                        n_position: int = 2**16) -> EigenstateCheck:
    """Compare the grid-engine q(-, +) of the eigenstate with lambda (lambda + 1) / 2."""
    state = eigenstate_on_grid(pair, n_position)
    T = pair.flux.problem.T
    q = quasi_probability(state, 0.0, T, edge_tol=np.inf)
    return EigenstateCheck(pair.lam, q[(-1, 1)], q_from_lambda(pair.lam),
                           q_minus_plus_momentum(pair), tolerance)


def backflow_increase(pair: BackflowEigenpair, n_position: int = 2**16) -> float:
    """p_-(T) - p_-(0) for the eigenstate on the grid (equals -lambda)."""
    state = eigenstate_on_grid(pair, n_position)
    x = state.x
    later = state.evolved(pair.flux.problem.T)
    left = lambda s: float(np.sum(np.abs(s.amplitudes[x < 0]) ** 2) * s.dx)
    return left(later) - left(state)


@dataclass(frozen=True)
class Extrapolation:
    cutoffs: tuple[float, ...]
    modes: tuple[int, ...]
    lambdas: tuple[float, ...]
    lam_max: tuple[float, ...]
    estimate: float
    error: float


def extrapolate_lambda(cutoffs: Sequence[float] = (14, 20, 28, 40), T: float = 4.0,
                       per_unit_sq: float = 1.6) -> Extrapolation:
    """lambda_min(U) fitted by a + b / U + c / U^2 and evaluated at U = infinity.

    The error bar is the spread between the fit above and the two-term fit
    through the largest two cutoffs.
    """
    cutoffs = tuple(float(u) for u in cutoffs)
    if len(cutoffs) < 3:
        raise ValueError("need at least three cutoffs")
    lams, highs, modes = [], [], []
    for u in cutoffs:
        n = modes_for_cutoff(u, per_unit_sq)
        problem = FluxSpectrumProblem(u / math.sqrt(T / 4), n, T)
        fm = build_flux_matrix(problem)
        lams.append(float(linalg.eigh(fm.matrix, eigvals_only=True, subset_by_index=[0, 0])[0]))
        highs.append(float(linalg.eigh(fm.matrix, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0]))
        modes.append(n)
    inv = 1 / np.asarray(cutoffs)
    design = np.vstack([np.ones_like(inv), inv, inv**2]).T
    three = np.linalg.lstsq(design, np.asarray(lams), rcond=None)[0][0]
    two = np.linalg.lstsq(design[-2:, :2], np.asarray(lams[-2:]), rcond=None)[0][0]
    return Extrapolation(cutoffs, tuple(modes), tuple(lams), tuple(highs), float(three),
                         float(abs(three - two)))
