import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qarrival.numerics import gauss_legendre, integrate
from qarrival.states import (GaussianPacket, GridSpec, GridWaveFunction, MomentumWaveFunction,
                             SupportError, WavepacketState, current_at_origin, packet_overlap,
                             prob_negative_axis, to_grid)

packets = st.builds(GaussianPacket, st.floats(-3, 3), st.floats(0.5, 2.0), st.floats(-2, 2),
                    st.floats(-math.pi, math.pi))
times = st.floats(0.0, 3.0)


def _grid_integral(values, spec):
    return np.sum(values) * spec.dx


@given(packets, times)
def test_packet_stays_normalized(g, t):
    h = g.evolved(t)
    assert packet_overlap(h, h).real == pytest.approx(1.0, abs=1e-12)
    assert packet_overlap(h, h, 1).real + packet_overlap(h, h, -1).real == pytest.approx(1.0, abs=1e-12)


@given(packets, packets, st.sampled_from([-1, 0, 1]))
def test_overlap_matches_quadrature(f, g, side):
    lo, hi = {-1: (-40.0, 0.0), 0: (-40.0, 40.0), 1: (0.0, 40.0)}[side]
    ref = gauss_legendre(2000, lo, hi).apply(lambda x: np.conj(f(x)) * g(x))
    assert abs(packet_overlap(f, g, side) - ref) < 1e-9


def test_analytic_evolution_matches_grid_propagation(three_packet_state):
    spec = GridSpec.for_state(three_packet_state, (0.0, 2.0))
    start = to_grid(three_packet_state, spec)
    later = start.evolved(2.0)
    exact = three_packet_state.evolved(2.0)(spec.x)
    assert np.max(np.abs(later.amplitudes - exact)) < 1e-9


@given(packets, times)
def test_derivatives_match_finite_differences(g, t):
    h = g.evolved(t)
    x, eps = 0.37, 1e-5
    fd1 = (h(x + eps) - h(x - eps)) / (2 * eps)
    fd2 = (h(x + eps) - 2 * h(x) + h(x - eps)) / eps**2
    assert abs(h.derivative(x) - fd1) < 1e-7
    assert abs(h.derivative(x, 2) - fd2) < 1e-4


def test_current_of_a_plane_wave_like_packet():
    # A very wide packet carries current |psi(0)|^2 p0 at the origin.
    s = WavepacketState.single(0.0, 50.0, 0.8)
    assert current_at_origin(s) == pytest.approx(abs(s(0.0)) ** 2 * 0.8, rel=1e-12)


def test_negative_axis_probability_matches_grid(three_packet_state):
    later = three_packet_state.evolved(1.5)
    ref = integrate(lambda x: abs(complex(later(x))) ** 2, -math.inf, 0.0, tol=1e-12)
    assert prob_negative_axis(three_packet_state, 1.5) == pytest.approx(ref, abs=1e-10)


def test_superposition_is_normalized(three_packet_state):
    assert three_packet_state.norm_sq() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        WavepacketState(((2.0, GaussianPacket(0, 1, 0)),))


@given(st.integers(4, 12).map(lambda k: 2**k), st.floats(1.0, 50.0))
def test_grid_is_origin_symmetric(n, half):
    spec = GridSpec(half, n)
    assert np.allclose(spec.x, -spec.x[::-1], atol=1e-12 * half)
    assert not np.any(spec.x == 0)


def test_grid_rejects_odd_size():
    with pytest.raises(ValueError):
        GridSpec(1.0, 15)


def test_to_grid_refuses_truncation():
    with pytest.raises(SupportError):
        to_grid(WavepacketState.single(0.0, 1.0, 0.0), GridSpec(3.0, 256))


def test_for_state_caps_grid_size():
    with pytest.raises(SupportError):
        GridSpec.for_state(WavepacketState.single(0.0, 0.01, 0.0), (0.0, 100.0), n_max=2**16)


def test_momentum_round_trip(three_packet_state):
    spec = GridSpec(40.0, 2**12)
    psi = to_grid(three_packet_state, spec)
    mom = psi.to_momentum()
    back = mom.to_position(spec.n)
    assert back.x_min == pytest.approx(psi.x_min)
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) < 1e-12


def test_momentum_density_of_a_gaussian():
    sigma, p0 = 0.8, 1.3
    spec = GridSpec(40.0, 2**12)
    mom = to_grid(WavepacketState.single(-1.0, sigma, p0), spec).to_momentum()
    ref = math.sqrt(2 / math.pi) * sigma * np.exp(-2 * sigma**2 * (mom.p - p0) ** 2)
    assert np.max(np.abs(np.abs(mom.amplitudes) ** 2 - ref)) < 1e-10


def test_momentum_grid_checks_alignment():
    flat = np.full(100, 1.0 + 0j) / math.sqrt(10.0)
    mom = MomentumWaveFunction(0.05, 0.1, flat)
    with pytest.raises(ValueError):
        mom.to_position(256)
    ok = MomentumWaveFunction(0.0, 0.1, flat)
    with pytest.raises(SupportError):
        ok.to_position(64)


def test_grid_state_is_read_only(three_packet_state):
    psi = to_grid(three_packet_state, GridSpec(40.0, 2**12))
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0
    with pytest.raises(ValueError):
        GridWaveFunction(-1.0, 0.1, np.ones(4))
