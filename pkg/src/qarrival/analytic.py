"""Closed-form quasi-probabilities for Gaussian configurations.

Two Gaussians phi_+ (start at +L, move left) and phi_- (start at -L, move
right) meet at the origin at tau = L / p0.  With alpha_+ = cos(phi) e^{i theta}
and alpha_- = sin(phi), the quasi-probability at (t1, t2) = (0, tau) is

    q(+, s) = cos^2(phi) / 2 + sin(2 phi) f_s / 4
    q(-, s) = sin^2(phi) / 2 + sin(2 phi) f_s / 4
    f_s     = exp(-Y^2) (cos theta + s sin theta erfi Y)

up to tails of size erfc(L / (sqrt 2 sigma)).  The exact overlap
<phi_-|P_s(tau)|phi_+> fixes Y = sqrt(2) p0 (Delta x)_tau; the variable
``y = p0 (Delta x)_tau`` is kept for the printed-form comparison.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .numerics import NATURAL_UNITS, UnitSystem, dawson, erfc_complex, integrate
from .states import GaussianPacket, WavepacketState, current_at_origin
from .twotime import SIGNS, TwoTimeTable

__all__ = [
    "TwoGaussianConfig",
    "overlap_exponent",
    "interference_factor",
    "max_interference",
    "two_gaussian_q",
    "q_min_of_y",
    "optimal_angles",
    "truncation_error_bound",
    "normalized_truncation_bound",
    "single_gaussian_kernel",
    "single_gaussian_kernel_quadrature",
    "energy_time",
    "ShortTimeEstimate",
    "short_time_expansion",
]

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class TwoGaussianConfig:
    L: float
    sigma: float
    p0: float
    phi: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.L <= 0 or self.sigma <= 0 or self.p0 <= 0:
            raise ValueError("L, sigma and p0 must be positive")
        if not -1e-12 <= self.phi <= math.pi / 2 + 1e-12:
            raise ValueError("phi must lie in [0, pi/2]")

    @property
    def tau(self) -> float:
        return self.L / self.p0

    @property
    def spread(self) -> float:
        """(Delta x)_tau."""
        return math.sqrt(self.sigma**2 + self.tau**2 / (4 * self.sigma**2))

    @property
    def y(self) -> float:
        return self.p0 * self.spread

    @property
    def overlap_y(self) -> float:
        """Argument Y = sqrt(2) y that the exact Gaussian overlaps depend on."""
        return math.sqrt(2.0) * self.y

    @property
    def approximation_valid(self) -> bool:
        return self.L / self.sigma >= 2.3

    @property
    def alphas(self) -> tuple[complex, complex]:
        return (math.cos(self.phi) * cmath.exp(1j * self.theta), math.sin(self.phi))

    def packets(self) -> tuple[GaussianPacket, GaussianPacket]:
        return (GaussianPacket(self.L, self.sigma, -self.p0),
                GaussianPacket(-self.L, self.sigma, self.p0))

    def packets_as_states(self) -> tuple[WavepacketState, WavepacketState]:
        return tuple(WavepacketState.single(g.x0, g.sigma, g.p0) for g in self.packets())

    def state(self) -> WavepacketState:
        return WavepacketState.normalized(self.alphas, self.packets())

    def norm_sq(self) -> float:
        """<psi|psi> for the unnormalized alpha_+ phi_+ + alpha_- phi_-."""
        return 1.0 + math.sin(2 * self.phi) * math.cos(self.theta) * math.exp(-self.overlap_y**2)

    @classmethod
    def from_y(cls, y: float, sigma: float = 1.0, p0_sigma: float = 0.01, **angles):
        """Configuration whose y equals ``y`` for the given p0 * sigma."""
        p0 = p0_sigma / sigma
        rest = y * y - p0_sigma**2
        if rest <= 0:
            raise ValueError("y too small for this p0 * sigma")
        L = 2 * sigma * math.sqrt(rest)
        return cls(L, sigma, p0, **angles)


def overlap_exponent(Y: float) -> float:
    return math.exp(-Y * Y)


def interference_factor(Y: float, theta: float, s: int) -> float:
    """f_s(Y, theta) = exp(-Y^2) (cos theta + s sin theta erfi Y)."""
    return math.exp(-Y * Y) * math.cos(theta) + s * math.sin(theta) * _TWO_OVER_SQRT_PI * dawson(Y)


def max_interference(Y):
    """max over theta of |f_s| = exp(-Y^2) sqrt(1 + erfi(Y)^2)."""
    Y = np.asarray(Y, dtype=float)
    return np.sqrt(np.exp(-2 * Y * Y) + (_TWO_OVER_SQRT_PI * dawson(Y)) ** 2)[()]


def q_min_of_y(y):
    """(1 - sqrt(1 + exp(-2y^2)(1 + erfi(y)^2))) / 4."""
    return 0.25 * (1.0 - np.sqrt(1.0 + max_interference(y) ** 2))


def optimal_angles(y: float, entry: tuple[int, int] = (1, 1)) -> tuple[float, float]:
    """(phi, theta) minimising ``entry`` of the closed-form table at argument y.

    theta turns f_s into -max_interference(y); phi then balances the
    diagonal and interference terms.
    """
    s1, s = entry
    beta = math.atan2(s * _TWO_OVER_SQRT_PI * dawson(y), math.exp(-y * y))
    theta = math.remainder(beta + math.pi, 2 * math.pi)
    fm = float(max_interference(y))
    two_phi = math.pi - math.atan(fm) if s1 == 1 else math.atan(fm)
    return 0.5 * two_phi, theta


def two_gaussian_q(config: TwoGaussianConfig, printed_argument: bool = False,
                   normalize: bool = True) -> TwoTimeTable:
    """Closed-form q(s1, s2) at (0, tau) for the two-Gaussian state.

    ``printed_argument`` evaluates the interference terms at y instead of
    Y = sqrt(2) y; ``normalize`` divides by the exact norm of the
    superposition (the raw formula assumes orthogonal packets).
    """
    Y = config.y if printed_argument else config.overlap_y
    phi, theta = config.phi, config.theta
    vals = {}
    for s in SIGNS:
        f = interference_factor(Y, theta, s)
        vals[(1, s)] = 0.5 * math.cos(phi) ** 2 + 0.25 * math.sin(2 * phi) * f
        vals[(-1, s)] = 0.5 * math.sin(phi) ** 2 + 0.25 * math.sin(2 * phi) * f
    total = sum(vals.values())
    if normalize:
        vals = {k: v / total for k, v in vals.items()}
    return TwoTimeTable(vals, "quasi", 0.0, config.tau, sum_tol=1.0)


def truncation_error_bound(L: float, sigma: float) -> float:
    """erfc(L / (sqrt 2 sigma)) / 4: size of the neglected tail terms."""
    return 0.25 * float(erfc_complex(L / (math.sqrt(2) * sigma)).real)


def normalized_truncation_bound(config: TwoGaussianConfig) -> float:
    """Cauchy-Schwarz bound on |closed form - exact| for the normalized table.

    Each neglected term is a matrix element between a unit-norm packet and
    a packet tail of norm sqrt(erfc(L / (sqrt 2 sigma)) / 2).
    """
    tail = math.sqrt(0.5 * float(erfc_complex(config.L / (math.sqrt(2) * config.sigma)).real))
    return 2 * tail / config.norm_sq()


def energy_time(p: float, units: UnitSystem = NATURAL_UNITS) -> float:
    """tau_E = hbar / E with E = p^2 / 2m."""
    return units.hbar * 2 * units.mass / (p * p)


def single_gaussian_kernel(p, tau, units: UnitSystem = NATURAL_UNITS):
    """f(p, tau) = tau Re[(p / 2m) erfc(-p sqrt(i tau / 2m hbar)) + sqrt(hbar / 2 pi i m tau) e^{-i p^2 tau / 2m hbar}].

    q(-, +) of a state sharply peaked at momentum p is |psi(0)|^2 f(p, tau);
    for large p, f -> p tau / m.
    """
    p = np.asarray(p, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("tau must be positive")
    m, hbar = units.mass, units.hbar
    z = -p * np.sqrt(1j * tau / (2 * m * hbar))
    term = (p / (2 * m)) * erfc_complex(z) + np.sqrt(hbar / (2j * np.pi * m * tau)) * np.exp(-0.5j * p * p * tau / (m * hbar))
    return (tau * np.real(term))[()]


def single_gaussian_kernel_quadrature(p: float, tau: float, tol: float = 1e-11) -> float:
    """Re <p| P_+(tau) P_- |p> by quadrature over the quarter plane x < 0 < y (natural units).

    With z = y - x the integrand depends on z only, so the integral over
    the quarter plane collapses to the weight z.  The z contour runs along
    the real axis up to the stationary point max(p tau, 0) and then along
    the ray of angle pi/4, where the Fresnel factor decays.
    """
    rot = cmath.exp(0.25j * math.pi)
    z0 = max(p * tau, 0.0)

    def phase(z):
        return z * cmath.exp(-1j * p * z + 0.5j * z * z / tau)

    value = integrate(lambda r: phase(z0 + r * rot) * rot, 0.0, math.inf, tol=tol)
    if z0 > 0:
        value += integrate(phase, 0.0, z0, tol=tol, limit=20000)
    pref = cmath.exp(0.5j * p * p * tau) / cmath.sqrt(2j * math.pi * tau)
    return (pref * value).real


@dataclass(frozen=True)
class ShortTimeEstimate:
    value: float
    edge: float
    current: float
    kinetic: float
    tau: float
    valid: bool


def short_time_expansion(state: WavepacketState, tau: float,
                         include_edge_term: bool = True) -> ShortTimeEstimate:
    """Small-tau estimate of q(-, +) at (0, tau).

    Terms: |psi(0)|^2 sqrt(tau) / (2 sqrt pi) from the sharp projector edge,
    J(0) tau / 2 and the tau^{3/2} kinetic-density term.  The edge term
    dominates unless psi(0) = 0; ``include_edge_term=False`` drops it.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    psi = complex(state(0.0))
    d1 = complex(state.derivative(0.0))
    d2 = complex(state.derivative(0.0, 2))
    root_p, root_m = cmath.sqrt(0.5j), cmath.sqrt(-0.5j)
    bracket = abs(d1) ** 2 - root_p * psi * d2.conjugate() - root_m * psi.conjugate() * d2
    kinetic = tau**1.5 / (6 * math.sqrt(math.pi)) * bracket.real
    current = 0.5 * current_at_origin(state, 0.0) * tau
    edge = abs(psi) ** 2 * math.sqrt(tau) / (2 * math.sqrt(math.pi)) if include_edge_term else 0.0
    sigma_min = min(g.sigma for g in state.packets)
    return ShortTimeEstimate(edge + current + kinetic, edge, current, kinetic, tau,
                             tau / sigma_min**2 < 0.1)
