"""Special functions and quadrature primitives.

Everything here is a thin, validated layer over :mod:`scipy.special` and
:mod:`scipy.integrate`.  The wrappers add domain guards and a uniform error
vocabulary so the physics modules never have to reason about overflow.

Units are natural (hbar = m = 1) throughout the package; :class:`UnitSystem`
converts dimensionful inputs at the boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _special

__all__ = [
    "DomainError",
    "ConvergenceError",
    "UnitSystem",
    "NATURAL_UNITS",
    "erf_complex",
    "erfc_complex",
    "erfcx_complex",
    "erfi",
    "dawson",
    "sine_integral",
    "quantum_step",
    "QuadratureRule",
    "gauss_legendre",
    "integrate",
]

ERF_ARGUMENT_LIMIT = 30.0
ERFI_ARGUMENT_LIMIT = 6.0


class DomainError(ValueError):
    """Input outside the range where a function is evaluated reliably."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance.

    ``estimate`` carries the best value found, ``error`` its error estimate.
    """

    def __init__(self, message: str, estimate=None, error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class UnitSystem:
    """Scale record for hbar and the particle mass.

    Internally every routine works with hbar = m = 1.  A dimensionful
    momentum p and time t map to natural units as ``p / p_unit`` and
    ``t / t_unit`` where the units below are built from a reference length.
    """

    hbar: float = 1.0
    mass: float = 1.0
    length: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0 or self.length <= 0:
            raise DomainError("hbar, mass and length scale must be positive")

    @property
    def momentum(self) -> float:
        return self.hbar / self.length

    @property
    def time(self) -> float:
        return self.mass * self.length**2 / self.hbar

    @property
    def energy(self) -> float:
        return self.hbar**2 / (self.mass * self.length**2)

    def to_natural(self, *, length=None, momentum=None, time=None):
        out = []
        if length is not None:
            out.append(length / self.length)
        if momentum is not None:
            out.append(momentum / self.momentum)
        if time is not None:
            out.append(time / self.time)
        return out[0] if len(out) == 1 else tuple(out)


NATURAL_UNITS = UnitSystem()


def _guard(z, limit: float, name: str):
    if np.any(~np.isfinite(z)):
        raise DomainError(f"{name}: non-finite argument")
    if np.any(np.abs(z) >= limit):
        raise DomainError(f"{name}: |argument| must stay below {limit}")


def erf_complex(z):
    """erf for complex arguments with |z| < 30."""
    _guard(z, ERF_ARGUMENT_LIMIT, "erf_complex")
    return _special.erf(np.asarray(z, dtype=complex))[()]


def erfc_complex(z):
    """erfc = 1 - erf, evaluated directly to avoid cancellation."""
    _guard(z, ERF_ARGUMENT_LIMIT, "erfc_complex")
    return _special.erfc(np.asarray(z, dtype=complex))[()]


def erfcx_complex(z):
    """Scaled complementary error function exp(z**2) * erfc(z).

    No range guard: the scaled form is finite wherever Re z >= 0 and is the
    stable way to evaluate Gaussian half-line integrals.
    """
    return _special.erfcx(np.asarray(z, dtype=complex))[()]


def erfi(y):
    """Imaginary error function -i erf(iy) for real |y| <= 6."""
    if np.any(np.abs(y) > ERFI_ARGUMENT_LIMIT):
        raise DomainError(f"erfi: |y| must not exceed {ERFI_ARGUMENT_LIMIT}")
    return _special.erfi(np.asarray(y, dtype=float))[()]


def dawson(y):
    """Dawson's integral, exp(-y**2) * erfi(y) * sqrt(pi) / 2.

    Used instead of erfi wherever erfi appears multiplied by exp(-y**2).
    """
    return _special.dawsn(np.asarray(y, dtype=float))[()]


def sine_integral(u):
    """Si(u) for any finite real u (scalar or array)."""
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)):
        raise DomainError("sine_integral: non-finite argument")
    return _special.sici(u)[0][()]


def quantum_step(u):
    """1/2 - Si(u)/pi: a smoothed step that tends to theta(-u)."""
    return 0.5 - sine_integral(u) / math.pi


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    def apply(self, f: Callable[[np.ndarray], np.ndarray]):
        return np.dot(self.weights, f(self.nodes))


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped to [a, b]; exact to degree 2n-1."""
    if n < 1 or not b > a:
        raise DomainError("need n >= 1 and b > a")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (a + b), half * w, (a, b))


def integrate(f: Callable[[float], complex], a: float, b: float,
              tol: float = 1e-10, limit: int = 2000):
    """Adaptive integral of a real- or complex-valued f over [a, b].

    Infinite endpoints are allowed.  Raises ConvergenceError, carrying the
    best estimate, when the reported error exceeds ``tol``.
    """
    with warnings.catch_warnings():
        # quad's warnings are superseded by the error check below
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        value, err = _integrate.quad(f, a, b, epsabs=tol, epsrel=tol,
                                     limit=limit, complex_func=True)
    err = math.hypot(err.real, err.imag) if isinstance(err, complex) else float(err)
    if not err <= max(tol, tol * abs(value)):
        raise ConvergenceError(
            f"integral did not converge: error {err:.3g} > tol {tol:.3g}",
            estimate=value, error=err)
    return value.real if value.imag == 0 else value
