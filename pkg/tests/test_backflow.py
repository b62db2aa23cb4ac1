import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qarrival.backflow import (FluxSpectrumProblem, backflow_increase, build_flux_matrix,
                               extremal_eigenvalue, flux_kernel, modes_for_cutoff,
                               negative_momentum_leakage, q_from_lambda, spectrum)


@given(st.floats(0, 10), st.floats(0, 10), st.floats(0.1, 10))
def test_kernel_is_symmetric_with_finite_diagonal(p, q, T):
    assert flux_kernel(p, q, T) == pytest.approx(flux_kernel(q, p, T), abs=1e-15)
    assert flux_kernel(p, p, T) == pytest.approx(p * T / (2 * math.pi), rel=1e-14, abs=1e-300)


def test_kernel_off_diagonal_formula():
    p, q, T = 1.3, 0.4, 2.0
    ref = math.sin((p * p - q * q) * T / 4) / (math.pi * (p - q))
    assert flux_kernel(p, q, T) == pytest.approx(ref, rel=1e-14)


@pytest.fixture(scope="module")
def pair14():
    u = 14.0
    return extremal_eigenvalue(FluxSpectrumProblem(u, modes_for_cutoff(u)))


def test_lambda_min_at_cutoff_14(pair14):
    # frozen from the symmetric Nystrom discretization with 1.6 U^2 nodes
    assert pair14.lam == pytest.approx(-0.036069373353099, abs=1e-12)
    assert pair14.lam_max <= 1 + 1e-12


@pytest.mark.parametrize("T", [1.0, 9.0])
def test_spectrum_depends_only_on_scaled_cutoff(pair14, T):
    u = 14.0
    other = extremal_eigenvalue(FluxSpectrumProblem(u / math.sqrt(T / 4), modes_for_cutoff(u), T))
    assert other.lam == pytest.approx(pair14.lam, abs=1e-12)


def test_spectrum_is_sorted_and_bounded():
    fm = build_flux_matrix(FluxSpectrumProblem(6.0, 64))
    ev = spectrum(fm)
    assert np.all(np.diff(ev) >= 0)
    assert ev[-1] <= 1 + 1e-10
    assert ev[0] < 0


def test_eigenstate_has_positive_momenta_only(pair14):
    amps = pair14.amplitudes
    assert amps.p.min() >= 0
    assert np.sum(np.abs(amps.amplitudes) ** 2) * amps.dp == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(pair14.interpolate(pair14.flux.nodes), pair14.node_values, atol=1e-8)


def test_backflow_increase_matches_lambda(pair14):
    rise = backflow_increase(pair14)
    assert rise == pytest.approx(-pair14.lam, abs=5e-3)
    assert rise > 0


def test_leakage_is_a_probability(pair14):
    leak = negative_momentum_leakage(pair14)
    assert 0 < leak < 1


def test_q_from_lambda():
    assert q_from_lambda(0.0) == 0.0
    assert q_from_lambda(-0.04) == pytest.approx(-0.0192)
    with pytest.raises(ValueError):
        q_from_lambda(1.5)


def test_problem_validation():
    with pytest.raises(ValueError):
        FluxSpectrumProblem(10.0, 32)
    with pytest.raises(ValueError):
        FluxSpectrumProblem(-1.0, 128)
    assert modes_for_cutoff(20.0) % 2 == 0
