"""Wavepacket states, exact free evolution and single-time observables.

Two representations coexist:

* :class:`WavepacketState`, a finite superposition of Gaussian packets.  Free
  evolution, overlaps and half-line probabilities are closed form.
* :class:`GridWaveFunction`, samples on a uniform grid.  This is the oracle
  representation used by the two-time engine; free evolution is an exact
  phase multiplication in momentum space.

Grids are symmetric with an even number of points, x_j = (j - N/2 + 1/2) dx.
The origin is therefore a cell boundary, each side of x = 0 owns exactly half
of the "x = 0 cell", and sign(x) never evaluates to zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .numerics import erfcx_complex

__all__ = [
    "GaussianPacket",
    "WavepacketState",
    "GridSpec",
    "GridWaveFunction",
    "MomentumWaveFunction",
    "SupportError",
    "evolve_free",
    "to_grid",
    "free_propagate",
    "current_at_origin",
    "prob_negative_axis",
    "kinetic_energy_density_at_origin",
]


class SupportError(ValueError):
    """The grid does not contain the state to the required accuracy."""


# ---------------------------------------------------------------- Gaussians

@dataclass(frozen=True)
class GaussianPacket:
    """Free Gaussian packet launched at time 0 and observed at time ``t``.

    At t = 0 the wavefunction is
    (2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / (4 sigma^2) + i p0 x + i phase).
    """

    x0: float
    sigma: float
    p0: float
    phase: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def complex_width_sq(self) -> complex:
        """sigma_t^2 = sigma^2 + i t / 2."""
        return complex(self.sigma**2, 0.5 * self.t)

    @property
    def spread(self) -> float:
        """Position standard deviation at time t."""
        return math.sqrt(self.sigma**2 + self.t**2 / (4 * self.sigma**2))

    @property
    def center(self) -> float:
        return self.x0 + self.p0 * self.t

    def evolved(self, dt: float) -> "GaussianPacket":
        return replace(self, t=self.t + dt)

    def exponent_coefficients(self) -> tuple[complex, complex, complex]:
        """(a, b, c) with psi(x) = exp(a x^2 + b x + c)."""
        s2 = self.complex_width_sq
        xc = self.center
        a = -1.0 / (4 * s2)
        b = xc / (2 * s2) + 1j * self.p0
        log_norm = -0.25 * math.log(2 * math.pi * self.sigma**2) + 0.5 * cmath.log(self.sigma**2 / s2)
        c = -xc * xc / (4 * s2) - 0.5j * self.p0**2 * self.t + 1j * self.phase + log_norm
        return a, b, c

    def __call__(self, x):
        a, b, c = self.exponent_coefficients()
        x = np.asarray(x, dtype=float)
        return np.exp((a * x + b) * x + c)

    def derivative(self, x, order: int = 1):
        a, b, _ = self.exponent_coefficients()
        x = np.asarray(x, dtype=float)
        psi = self(x)
        slope = 2 * a * x + b
        if order == 1:
            return psi * slope
        if order == 2:
            return psi * (slope * slope + 2 * a)
        raise ValueError("only first and second derivatives are provided")


def _gaussian_integral(A: complex, B: complex, C: complex, side: int = 0) -> complex:
    """Integral of exp(A x^2 + B x + C) over the line (side 0), x > 0 (+1) or x < 0 (-1)."""
    alpha = -A
    if alpha.real <= 0:
        raise ValueError("divergent Gaussian integral")
    root = cmath.sqrt(alpha)
    full_exponent = C + B * B / (4 * alpha)
    full = cmath.sqrt(math.pi / alpha) * cmath.exp(full_exponent)
    if side == 0:
        return full
    w = -side * B / (2 * root)
    # exp(w^2) erfc(w) split so neither piece overflows.
    if w.real >= 0:
        return 0.5 * cmath.sqrt(math.pi / alpha) * cmath.exp(C) * complex(erfcx_complex(w))
    return full - 0.5 * cmath.sqrt(math.pi / alpha) * cmath.exp(C) * complex(erfcx_complex(-w))


def packet_overlap(f: GaussianPacket, g: GaussianPacket, side: int = 0) -> complex:
    """<f|g>, over the whole line or over one half-line (side = +1 / -1)."""
    a1, b1, c1 = f.exponent_coefficients()
    a2, b2, c2 = g.exponent_coefficients()
    return _gaussian_integral(a1.conjugate() + a2, b1.conjugate() + b2, c1.conjugate() + c2, side)


@dataclass(frozen=True)
class WavepacketState:
    """Normalized superposition sum_k c_k g_k of Gaussian packets."""

    terms: tuple[tuple[complex, GaussianPacket], ...]
    norm_tol: float = field(default=1e-10, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(c), g) for c, g in self.terms))
        if not self.terms:
            raise ValueError("empty superposition")
        n = self.norm_sq()
        if abs(n - 1.0) > self.norm_tol:
            raise ValueError(f"state not normalized: <psi|psi> = {n:.12g}")

    @classmethod
    def normalized(cls, coefficients: Iterable[complex], packets: Iterable[GaussianPacket]):
        terms = tuple(zip(coefficients, packets))
        n = _gram_form(terms, terms, 0).real
        if not n > 0:
            raise ValueError("superposition has zero norm")
        scale = 1.0 / math.sqrt(n)
        return cls(tuple((c * scale, g) for c, g in terms))

    @classmethod
    def single(cls, x0: float, sigma: float, p0: float) -> "WavepacketState":
        return cls(((1.0, GaussianPacket(x0, sigma, p0)),))

    @property
    def packets(self) -> tuple[GaussianPacket, ...]:
        return tuple(g for _, g in self.terms)

    @property
    def coefficients(self) -> tuple[complex, ...]:
        return tuple(c for c, _ in self.terms)

    @property
    def t(self) -> float:
        return self.terms[0][1].t

    def norm_sq(self) -> float:
        return _gram_form(self.terms, self.terms, 0).real

    def overlap(self, other: "WavepacketState", side: int = 0) -> complex:
        return _gram_form(self.terms, other.terms, side)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum(c * g(x) for c, g in self.terms)

    def derivative(self, x, order: int = 1):
        return sum(c * g.derivative(x, order) for c, g in self.terms)

    def evolved(self, dt: float) -> "WavepacketState":
        return WavepacketState(tuple((c, g.evolved(dt)) for c, g in self.terms), self.norm_tol)


def _gram_form(left, right, side) -> complex:
    return sum(ci.conjugate() * cj * packet_overlap(gi, gj, side)
               for ci, gi in left for cj, gj in right)


def evolve_free(state: WavepacketState, t: float) -> WavepacketState:
    """Exact free evolution by t (negative t evolves backwards)."""
    return state.evolved(t)


def current_at_origin(state: WavepacketState, t: float = 0.0) -> float:
    """Probability current J(0, t) = Im(psi* psi') at the origin."""
    s = state.evolved(t)
    psi = complex(s(0.0))
    dpsi = complex(s.derivative(0.0))
    return (psi.conjugate() * dpsi).imag


def prob_negative_axis(state: WavepacketState, t: float = 0.0) -> float:
    """Probability of finding the particle at x < 0 at time t."""
    s = state.evolved(t)
    return min(1.0, max(0.0, s.overlap(s, side=-1).real))


def kinetic_energy_density_at_origin(state: WavepacketState, t: float = 0.0,
                                     normalization: float = 1.0) -> float:
    """normalization * |psi'(0, t)|^2.  The prefactor is model dependent and left to the caller."""
    s = state.evolved(t)
    return normalization * abs(complex(s.derivative(0.0))) ** 2


# --------------------------------------------------------------------- grids

@dataclass(frozen=True)
class GridSpec:
    """Symmetric grid of ``n`` (even) points spanning [-half_width, half_width]."""

    half_width: float
    n: int

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError("grid size must be even")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def dx(self) -> float:
        return 2 * self.half_width / self.n

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.n) - self.n / 2 + 0.5) * self.dx

    @property
    def p(self) -> np.ndarray:
        """Momenta in numpy FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, self.dx)

    @property
    def p_nyquist(self) -> float:
        return np.pi / self.dx

    def refined(self) -> "GridSpec":
        return GridSpec(self.half_width, 2 * self.n)

    @classmethod
    def for_state(cls, state: WavepacketState, times: Sequence[float] = (0.0,),
                  width_sigmas: float = 12.0, padding: float = 16.0,
                  points_per_sigma: float = 64.0, n_min: int = 2**14,
                  momentum_sigmas: float = 40.0, n_max: int = 2**23) -> "GridSpec":
        """Box for every packet at every requested time.

        The support (``width_sigmas`` spreads around each centre) is padded by
        ``padding``: a sharp projector emits slowly decaying fast components
        that would otherwise wrap around the periodic box and bias two-time
        quantities.  The spacing resolves the narrowest packet and its momenta.
        """
        support = 0.0
        p_need = 0.0
        sigma_min = min(g.sigma for g in state.packets)
        for g in state.packets:
            p_need = max(p_need, abs(g.p0) + momentum_sigmas / (2 * g.sigma))
            for t in times:
                h = g.evolved(t - g.t)
                support = max(support, abs(h.center) + width_sigmas * h.spread)
        half = padding * support
        n = n_min
        while 2 * half / n > sigma_min / points_per_sigma or np.pi * n / (2 * half) < p_need:
            n *= 2
            if n > n_max:
                raise SupportError(f"state needs more than {n_max} grid points")
        return cls(half, n)


def free_propagate(amplitudes: np.ndarray, p: np.ndarray, t: float) -> np.ndarray:
    """exp(-i p^2 t / 2) applied in momentum space (exact for the grid model)."""
    if t == 0:
        return amplitudes
    return np.fft.ifft(np.exp(-0.5j * p * p * t) * np.fft.fft(amplitudes))


@dataclass(frozen=True)
class GridWaveFunction:
    """Samples psi(x_min + j dx)."""

    x_min: float
    dx: float
    amplitudes: np.ndarray
    norm_tol: float = field(default=1e-8, repr=False, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        n = self.norm_sq()
        if abs(n - 1.0) > self.norm_tol:
            raise ValueError(f"grid state not normalized: {n:.12g}")

    @classmethod
    def on_grid(cls, spec: GridSpec, amplitudes, normalize: bool = True) -> "GridWaveFunction":
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (spec.n,):
            raise ValueError("amplitude count does not match grid")
        if normalize:
            amps = amps / math.sqrt(np.sum(np.abs(amps) ** 2) * spec.dx)
        return cls(float(spec.x[0]), spec.dx, amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx

    @property
    def spec(self) -> GridSpec:
        spec = GridSpec(0.5 * self.n * self.dx, self.n)
        if abs(self.x_min - spec.x[0]) > 1e-9 * self.dx:
            raise ValueError("grid is not origin-symmetric")
        return spec

    @property
    def edge_amplitude(self) -> float:
        a = self.amplitudes
        return float(max(abs(a[0]), abs(a[-1])))

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.dx)

    def evolved(self, t: float) -> "GridWaveFunction":
        p = 2 * np.pi * np.fft.fftfreq(self.n, self.dx)
        return replace(self, amplitudes=free_propagate(self.amplitudes, p, t))

    def to_momentum(self) -> "MomentumWaveFunction":
        n, dx = self.n, self.dx
        dp = 2 * np.pi / (n * dx)
        p = 2 * np.pi * np.fft.fftfreq(n, dx)
        phi = np.fft.fft(self.amplitudes) * np.exp(-1j * p * self.x_min) * dx / math.sqrt(2 * math.pi)
        return MomentumWaveFunction(-0.5 * n * dp, dp, np.fft.fftshift(phi))

    def to_csv_rows(self):
        for xi, a in zip(self.x, self.amplitudes):
            yield (float(xi), float(a.real), float(a.imag))


@dataclass(frozen=True)
class MomentumWaveFunction:
    """Samples phi(p_min + k dp) with phi the unitary Fourier transform of psi."""

    p_min: float
    dp: float
    amplitudes: np.ndarray
    norm_tol: float = field(default=1e-8, repr=False, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        n = float(np.sum(np.abs(amps) ** 2) * self.dp)
        if abs(n - 1.0) > self.norm_tol:
            raise ValueError(f"momentum state not normalized: {n:.12g}")

    @property
    def p(self) -> np.ndarray:
        return self.p_min + np.arange(self.amplitudes.size) * self.dp

    def to_position(self, n: int) -> GridWaveFunction:
        """Place the samples on an n-point symmetric position grid with dx = 2 pi / (n dp)."""
        k0 = self.p_min / self.dp
        if abs(k0 - round(k0)) > 1e-9:
            raise ValueError("p_min must be a multiple of dp")
        k_lo = int(round(k0))
        k_hi = k_lo + self.amplitudes.size
        if k_lo < -n // 2 or k_hi > n // 2:
            raise SupportError("position grid too coarse for the momentum range")
        spec = GridSpec(math.pi / self.dp, n)
        p_fft = spec.p
        index = np.rint(p_fft / self.dp).astype(int) - k_lo
        inside = (index >= 0) & (index < self.amplitudes.size)
        phi = np.zeros(n, dtype=complex)
        phi[inside] = self.amplitudes[index[inside]]
        psi = np.fft.ifft(phi * np.exp(1j * p_fft * spec.x[0])) * n * self.dp / math.sqrt(2 * math.pi)
        return GridWaveFunction.on_grid(spec, psi)


def to_grid(state: WavepacketState, spec: GridSpec, edge_tol: float = 1e-8,
            norm_tol: float = 1e-6) -> GridWaveFunction:
    """Sample an analytic state on a grid, refusing grids that truncate it."""
    amps = state(spec.x)
    edge = float(max(abs(amps[0]), abs(amps[-1])))
    norm = float(np.sum(np.abs(amps) ** 2) * spec.dx)
    if edge > edge_tol or abs(norm - 1.0) > norm_tol:
        raise SupportError(
            f"grid [-{spec.half_width:g}, {spec.half_width:g}] with {spec.n} points truncates the state: "
            f"edge amplitude {edge:.2e}, sampled norm {norm:.10f}")
    return GridWaveFunction(float(spec.x[0]), spec.dx, amps, norm_tol=max(norm_tol, 1e-8))
